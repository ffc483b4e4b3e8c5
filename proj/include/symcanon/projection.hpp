#pragma once

// Bounding-box corner projection and pose recovery from projected corners.

#include <array>
#include <string>

#include <Eigen/Core>

#include "symcanon/error.hpp"
#include "symcanon/so3.hpp"

namespace symcanon {

struct Camera {
  double fx = 1.0, fy = 1.0, cx = 0.0, cy = 0.0;

  /// Throws InvalidArgument unless fx, fy > 0 and all fields finite.
  void validate() const;
};

/// Axis-aligned box centered at the object origin. Corner i has coordinates
/// (+-hx, +-hy, +-hz) with bit 0 of i selecting the x sign, bit 1 the y sign
/// and bit 2 the z sign (set bit = positive).
struct Box3 {
  double hx = 1.0, hy = 1.0, hz = 1.0;

  void validate() const;
  Eigen::Vector3d corner(int i) const;
  std::array<Eigen::Vector3d, 8> corners() const;
};

/// Eight (u, v) pixel positions in Box3 corner order.
using Corners2D = Eigen::Matrix<double, 8, 2>;
using CornerJacobian = Eigen::Matrix<double, 16, 6>;

class BehindCamera : public Error {
 public:
  explicit BehindCamera(int corner)
      : Error(ErrorClass::numerical,
              "box corner " + std::to_string(corner) + " is at or behind the camera plane"),
        corner_(corner) {}
  int corner() const noexcept { return corner_; }

 private:
  int corner_;
};

class NoConvergence : public Error {
 public:
  NoConvergence(const std::string& what, RigidMotion last)
      : Error(ErrorClass::numerical, what), last_(std::move(last)) {}
  const RigidMotion& last_iterate() const noexcept { return last_; }

 private:
  RigidMotion last_;
};

/// Minimum camera-frame depth accepted for a projected corner.
inline constexpr double kMinDepth = 1e-6;

Corners2D project_corners(const Camera& cam, const Box3& box, const RigidMotion& pose);

/// Applies a pose increment (w, dt): camera-frame points x = r^T p + t move to
/// exp(w) r^T p + t + dt. This is the parameterization used by the PnP
/// refinement and by reprojection_jacobian.
RigidMotion perturb(const RigidMotion& pose, const Eigen::Matrix<double, 6, 1>& delta);

/// d(u0, v0, u1, v1, ...)/d(w, dt) at delta = 0.
CornerJacobian reprojection_jacobian(const Camera& cam, const Box3& box, const RigidMotion& pose);

/// Root-mean-square over the 16 coordinates of projected - observed.
double reprojection_residual(const Camera& cam, const Box3& box, const RigidMotion& pose,
                             const Corners2D& obs);
/// Mean absolute deviation over the 16 coordinates.
double reprojection_residual_l1(const Camera& cam, const Box3& box, const RigidMotion& pose,
                                const Corners2D& obs);

struct PnpOptions {
  int max_iterations = 50;
  /// Stop once the residual norm changes by less than this between iterations.
  double residual_change_tol = 1e-12;
  /// Consecutive growing full Gauss-Newton steps before giving up.
  int max_growth_streak = 5;
};

struct PnpResult {
  RigidMotion pose;
  double initial_rms = 0.0;  ///< after the linear (DLT) initialization
  double final_rms = 0.0;
  int iterations = 0;
};

/// Normalized DLT over the 8 correspondences, rotation projected onto SO(3),
/// then Gauss-Newton on the reprojection residual with step halving, so the
/// refined residual never exceeds the initial one.
/// Throws DegenerateConfiguration when the linear system is rank-deficient and
/// NoConvergence (carrying the last iterate) when refinement keeps diverging.
PnpResult pnp_solve_detailed(const Camera& cam, const Box3& box, const Corners2D& obs,
                             const PnpOptions& opts = {});

RigidMotion pnp_solve(const Camera& cam, const Box3& box, const Corners2D& obs);

}  // namespace symcanon
