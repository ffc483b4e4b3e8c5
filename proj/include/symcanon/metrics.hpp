#pragma once

// Symmetry-aware pose errors.

#include <string>
#include <vector>

#include <Eigen/Core>

#include "symcanon/symmetry.hpp"

namespace symcanon {

class ModelPoints {
 public:
  /// At least 4 points, all coordinates finite.
  explicit ModelPoints(std::vector<Eigen::Vector3d> pts);

  /// Whitespace-separated XYZ triples.
  static ModelPoints parse_xyz(const std::string& text);

  const std::vector<Eigen::Vector3d>& points() const { return pts_; }
  std::size_t size() const { return pts_.size(); }

 private:
  std::vector<Eigen::Vector3d> pts_;
};

/// Average closest-point distance: mean over ground-truth-placed points of the
/// distance to the nearest estimate-placed point. Brute force, O(n^2).
double adi(const ModelPoints& model, const RigidMotion& est, const RigidMotion& gt);

/// min over S in the group of geodesic_dist(S r_est, r_gt). Evaluated in both
/// argument orders (equal in exact arithmetic) so the result is symmetric and
/// exactly zero when one argument is a group element times the other.
double quotient_rotation_dist(const SymmetryGroup& g, const Rotation& r_est, const Rotation& r_gt);

}  // namespace symcanon
