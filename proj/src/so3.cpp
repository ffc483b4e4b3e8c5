#include "symcanon/so3.hpp"

#include <algorithm>
#include <limits>
#include <cmath>

#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include "symcanon/error.hpp"

namespace symcanon {

double wrap_angle(double a) {
  double w = std::remainder(a, 2.0 * kPi);  // [-pi, pi]
  if (w <= -kPi) w += 2.0 * kPi;
  return w;
}

UnitAxis::UnitAxis(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n < 1e-12) {
    throw InvalidArgument("axis must be a finite non-zero vector");
  }
  // Already-unit input is kept verbatim so serialized axes reload unchanged.
  v_ = std::abs(n - 1.0) <= 2 * std::numeric_limits<double>::epsilon() ? v : Eigen::Vector3d(v / n);
  // Keep exact coordinate axes exact.
  for (int i = 0; i < 3; ++i) {
    if (v[(i + 1) % 3] == 0.0 && v[(i + 2) % 3] == 0.0) {
      v_ = Eigen::Vector3d::Zero();
      v_[i] = v[i] > 0 ? 1.0 : -1.0;
    }
  }
}

double Rotation::defect(const Eigen::Matrix3d& m) {
  const Eigen::Matrix3d g = m.transpose() * m - Eigen::Matrix3d::Identity();
  return std::max(g.cwiseAbs().maxCoeff(), std::abs(m.determinant() - 1.0));
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& m) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d d = Eigen::Matrix3d::Identity();
  if ((svd.matrixU() * svd.matrixV().transpose()).determinant() < 0) d(2, 2) = -1;
  return svd.matrixU() * d * svd.matrixV().transpose();
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m) {
  if (!m.allFinite()) throw InvalidArgument("rotation has non-finite entries");
  const double err = defect(m);
  if (err <= kOrthoTol) return Rotation(m, Trusted{});
  if (err < kRepairTol) return Rotation(nearest_rotation(m), Trusted{});
  throw InvalidArgument("matrix is not a rotation (orthonormality/determinant defect " +
                        std::to_string(err) + ")");
}

Rotation Rotation::from_row_major(const std::array<double, 9>& a) {
  Eigen::Matrix3d m;
  m << a[0], a[1], a[2], a[3], a[4], a[5], a[6], a[7], a[8];
  return from_matrix(m);
}

std::array<double, 9> Rotation::row_major() const {
  std::array<double, 9> a{};
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a[3 * r + c] = m_(r, c);
  return a;
}

Rotation axis_angle(const UnitAxis& axis, double angle) {
  if (!std::isfinite(angle)) throw InvalidArgument("angle must be finite");
  double c = std::cos(angle);
  double s = std::sin(angle);
  const double quarter = angle / (kPi / 2.0);
  const double k = std::nearbyint(quarter);
  if (std::abs(quarter - k) < 1e-12 * std::max(1.0, std::abs(quarter))) {
    static constexpr double kCos[4] = {1, 0, -1, 0};
    static constexpr double kSin[4] = {0, 1, 0, -1};
    const auto idx = static_cast<int>(((static_cast<long long>(k) % 4) + 4) % 4);
    c = kCos[idx];
    s = kSin[idx];
  }
  const Eigen::Vector3d& u = axis.vec();
  const double omc = 1.0 - c;
  Eigen::Matrix3d m;
  // Diagonal as 1 - (1-c)(1-u_i^2) so entries along the axis stay exactly 1.
  for (int i = 0; i < 3; ++i) m(i, i) = 1.0 - omc * (1.0 - u[i] * u[i]);
  m(0, 1) = omc * u[0] * u[1] - s * u[2];
  m(1, 0) = omc * u[0] * u[1] + s * u[2];
  m(0, 2) = omc * u[0] * u[2] + s * u[1];
  m(2, 0) = omc * u[0] * u[2] - s * u[1];
  m(1, 2) = omc * u[1] * u[2] - s * u[0];
  m(2, 1) = omc * u[1] * u[2] + s * u[0];
  return Rotation(m, Rotation::Trusted{});
}

Rotation compose(const Rotation& a, const Rotation& b) {
  const Eigen::Matrix3d m = a.m_ * b.m_;
  const double err = Rotation::defect(m);
  if (err <= kOrthoTol) return Rotation(m, Rotation::Trusted{});
  return Rotation::from_matrix(m);
}

double frobenius_dist(const Rotation& a, const Rotation& target) {
  return (a.matrix() - target.matrix()).norm();
}

double geodesic_dist(const Rotation& a, const Rotation& b) {
  // rel = a^T b, accumulated in a fixed order so that rel is exactly symmetric
  // whenever a == b.
  double rel[3][3];
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      rel[i][j] = a(0, i) * b(0, j) + a(1, i) * b(1, j) + a(2, i) * b(2, j);
  const double wx = rel[2][1] - rel[1][2];
  const double wy = rel[0][2] - rel[2][0];
  const double wz = rel[1][0] - rel[0][1];
  const double sin_half2 = 0.5 * std::sqrt(wx * wx + wy * wy + wz * wz);
  double cos_val = 0.5 * (rel[0][0] + rel[1][1] + rel[2][2] - 1.0);
  cos_val = std::clamp(cos_val, -1.0, 1.0);
  return std::atan2(sin_half2, cos_val);
}

Rotation random_rotation(Rng& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  double w, x, y, z, n;
  do {
    w = gauss(rng);
    x = gauss(rng);
    y = gauss(rng);
    z = gauss(rng);
    n = std::sqrt(w * w + x * x + y * y + z * z);
  } while (n < 1e-12);
  w /= n;
  x /= n;
  y /= n;
  z /= n;
  Eigen::Matrix3d m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - z * w), 2 * (x * z + y * w),
      2 * (x * y + z * w), 1 - 2 * (x * x + z * z), 2 * (y * z - x * w),
      2 * (x * z - y * w), 2 * (y * z + x * w), 1 - 2 * (x * x + y * y);
  return Rotation::from_matrix(m);
}

Rotation exp_so3(const Eigen::Vector3d& w) {
  const double theta = w.norm();
  if (theta < 1e-300) return Rotation::identity();
  return axis_angle(UnitAxis(w / theta), theta);
}

Eigen::Matrix3d basis_with_z(const UnitAxis& u) {
  const Eigen::Vector3d& z = u.vec();
  Eigen::Vector3d helper = Eigen::Vector3d::UnitX();
  if (std::abs(z.dot(helper)) > 0.9) helper = Eigen::Vector3d::UnitY();
  Eigen::Vector3d b1 = helper - helper.dot(z) * z;
  b1.normalize();
  const Eigen::Vector3d b2 = z.cross(b1);
  Eigen::Matrix3d b;
  b.col(0) = b1;
  b.col(1) = b2;
  b.col(2) = z;
  return b;
}

Twist twist_about(const UnitAxis& u, const Rotation& r) {
  const Eigen::Matrix3d b = basis_with_z(u);
  const Eigen::Matrix3d local = b.transpose() * r.matrix() * b;
  const double cos_part = local(0, 0) + local(1, 1);
  const double sin_part = local(1, 0) - local(0, 1);
  if (std::hypot(cos_part, sin_part) < kTwistDegenerateTol) return {0.0, true};
  return {std::atan2(sin_part, cos_part), false};
}

}  // namespace symcanon
