#pragma once

// Small-matrix rotation algebra on SO(3).
//
// Convention used throughout the library: a Rotation R describes an object's
// orientation such that a point p given in object coordinates appears in the
// camera frame at R^T p + t. With this convention an object symmetry S acts on
// the left: S*R and R produce the same appearance.

#include <array>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace symcanon {

/// Caller-owned random engine. All sampling is deterministic for a fixed seed.
using Rng = std::mt19937_64;

inline constexpr double kPi = 3.14159265358979323846;

/// Per-entry orthonormality / determinant tolerance for a valid rotation.
inline constexpr double kOrthoTol = 1e-9;
/// Defects below this are repaired by polar decomposition instead of rejected.
inline constexpr double kRepairTol = 1e-6;

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

class UnitAxis {
 public:
  /// Normalizes v; throws InvalidArgument for zero or non-finite input.
  explicit UnitAxis(const Eigen::Vector3d& v);
  UnitAxis(double x, double y, double z) : UnitAxis(Eigen::Vector3d(x, y, z)) {}

  static UnitAxis x() { return UnitAxis(1, 0, 0); }
  static UnitAxis y() { return UnitAxis(0, 1, 0); }
  static UnitAxis z() { return UnitAxis(0, 0, 1); }

  const Eigen::Vector3d& vec() const { return v_; }
  double operator[](int i) const { return v_[i]; }

 private:
  Eigen::Vector3d v_;
};

class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  /// Validates m. Small defects (< kRepairTol) are projected back onto SO(3);
  /// anything larger throws InvalidArgument.
  static Rotation from_matrix(const Eigen::Matrix3d& m);
  static Rotation from_row_major(const std::array<double, 9>& a);
  static Rotation identity() { return Rotation(); }

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation inverse() const { return Rotation(m_.transpose(), Trusted{}); }
  double trace() const { return m_.trace(); }
  std::array<double, 9> row_major() const;

  /// Largest per-entry deviation of m^T m from I, and |det - 1|.
  static double defect(const Eigen::Matrix3d& m);

  friend bool operator==(const Rotation& a, const Rotation& b) {
    return a.m_ == b.m_;
  }

 private:
  struct Trusted {};
  Rotation(const Eigen::Matrix3d& m, Trusted) : m_(m) {}
  friend Rotation compose(const Rotation&, const Rotation&);
  friend Rotation axis_angle(const UnitAxis&, double);
  friend Rotation random_rotation(Rng&);

  Eigen::Matrix3d m_;
};

struct RigidMotion {
  Rotation r;
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  /// Camera-frame position of object point p: r^T p + t.
  Eigen::Vector3d apply(const Eigen::Vector3d& p) const {
    return r.matrix().transpose() * p + t;
  }
};

/// Rodrigues rotation about axis by angle (radians). Quarter turns are built
/// from exact cosine/sine values. Throws InvalidArgument for non-finite angle.
Rotation axis_angle(const UnitAxis& axis, double angle);

/// Matrix product a*b, re-validated.
Rotation compose(const Rotation& a, const Rotation& b);

inline Rotation operator*(const Rotation& a, const Rotation& b) {
  return compose(a, b);
}

/// ||a - target||_F
double frobenius_dist(const Rotation& a, const Rotation& target);

/// Angle of the relative rotation a^T b, in [0, pi].
double geodesic_dist(const Rotation& a, const Rotation& b);

/// Haar-uniform sample (normalized 4-Gaussian quaternion).
Rotation random_rotation(Rng& rng);

/// Nearest rotation to m in Frobenius norm (polar factor via SVD).
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m);

/// Exponential map of a rotation vector (axis * angle).
Rotation exp_so3(const Eigen::Vector3d& w);

/// Columns (b1, b2, u): a right-handed orthonormal basis whose third column is
/// u. Deterministic; equals I when u is +z.
Eigen::Matrix3d basis_with_z(const UnitAxis& u);

/// Rotation angle about u that best aligns with r: the maximizer of
/// tr(R^u_a^T r) over a, i.e. atan2(r21 - r12, r11 + r22) in the basis where
/// u is the z axis. `degenerate` is set when both arguments vanish (below
/// kTwistDegenerateTol), in which case angle is 0.
struct Twist {
  double angle = 0.0;
  bool degenerate = false;
};
inline constexpr double kTwistDegenerateTol = 1e-12;
Twist twist_about(const UnitAxis& u, const Rotation& r);

}  // namespace symcanon
