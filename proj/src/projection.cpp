#include "symcanon/projection.hpp"

#include <cmath>
#include <limits>

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <Eigen/SVD>

namespace symcanon {

void Camera::validate() const {
  if (!(std::isfinite(fx) && std::isfinite(fy) && std::isfinite(cx) && std::isfinite(cy))) {
    throw InvalidArgument("camera parameters must be finite");
  }
  if (!(fx > 0 && fy > 0)) throw InvalidArgument("camera focal lengths must be positive");
}

void Box3::validate() const {
  if (!(hx > 0 && hy > 0 && hz > 0) || !std::isfinite(hx + hy + hz)) {
    throw InvalidArgument("box half-extents must be positive and finite");
  }
}

Eigen::Vector3d Box3::corner(int i) const {
  return {(i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz};
}

std::array<Eigen::Vector3d, 8> Box3::corners() const {
  std::array<Eigen::Vector3d, 8> c;
  for (int i = 0; i < 8; ++i) c[i] = corner(i);
  return c;
}

Corners2D project_corners(const Camera& cam, const Box3& box, const RigidMotion& pose) {
  Corners2D out;
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d x = pose.apply(box.corner(i));
    if (!(x.z() > kMinDepth)) throw BehindCamera(i);
    out(i, 0) = cam.fx * x.x() / x.z() + cam.cx;
    out(i, 1) = cam.fy * x.y() / x.z() + cam.cy;
  }
  return out;
}

RigidMotion perturb(const RigidMotion& pose, const Eigen::Matrix<double, 6, 1>& delta) {
  const Rotation step = exp_so3(delta.head<3>());
  return {compose(pose.r, step.inverse()), pose.t + delta.tail<3>()};
}

CornerJacobian reprojection_jacobian(const Camera& cam, const Box3& box, const RigidMotion& pose) {
  CornerJacobian j;
  const Eigen::Matrix3d rot = pose.r.matrix().transpose();
  for (int i = 0; i < 8; ++i) {
    const Eigen::Vector3d q = rot * box.corner(i);
    const Eigen::Vector3d x = q + pose.t;
    if (!(x.z() > kMinDepth)) throw BehindCamera(i);
    const double iz = 1.0 / x.z();
    Eigen::Matrix<double, 2, 3> duv_dx;
    duv_dx << cam.fx * iz, 0.0, -cam.fx * x.x() * iz * iz,  //
        0.0, cam.fy * iz, -cam.fy * x.y() * iz * iz;
    Eigen::Matrix3d neg_skew_q;  // d(exp(w) q)/dw at 0 = -[q]x
    neg_skew_q << 0.0, q.z(), -q.y(),  //
        -q.z(), 0.0, q.x(),            //
        q.y(), -q.x(), 0.0;
    j.block<2, 3>(2 * i, 0) = duv_dx * neg_skew_q;
    j.block<2, 3>(2 * i, 3) = duv_dx;
  }
  return j;
}

namespace {

using Residual = Eigen::Matrix<double, 16, 1>;

Residual residual_vector(const Camera& cam, const Box3& box, const RigidMotion& pose,
                         const Corners2D& obs) {
  const Corners2D proj = project_corners(cam, box, pose);
  Residual r;
  for (int i = 0; i < 8; ++i) {
    r(2 * i) = proj(i, 0) - obs(i, 0);
    r(2 * i + 1) = proj(i, 1) - obs(i, 1);
  }
  return r;
}

// Sum of squares, or +inf when a corner leaves the valid depth range.
double cost(const Camera& cam, const Box3& box, const RigidMotion& pose, const Corners2D& obs) {
  try {
    return residual_vector(cam, box, pose, obs).squaredNorm();
  } catch (const BehindCamera&) {
    return std::numeric_limits<double>::infinity();
  }
}

RigidMotion dlt_pose(const Camera& cam, const Box3& box, const Corners2D& obs) {
  std::array<Eigen::Vector2d, 8> img;
  Eigen::Vector2d mean2 = Eigen::Vector2d::Zero();
  Eigen::Vector3d mean3 = Eigen::Vector3d::Zero();
  const auto corners = box.corners();
  for (int i = 0; i < 8; ++i) {
    img[i] = {(obs(i, 0) - cam.cx) / cam.fx, (obs(i, 1) - cam.cy) / cam.fy};
    mean2 += img[i];
    mean3 += corners[i];
  }
  mean2 /= 8.0;
  mean3 /= 8.0;
  double rms2 = 0.0, rms3 = 0.0;
  for (int i = 0; i < 8; ++i) {
    rms2 += (img[i] - mean2).squaredNorm();
    rms3 += (corners[i] - mean3).squaredNorm();
  }
  rms2 = std::sqrt(rms2 / 8.0);
  rms3 = std::sqrt(rms3 / 8.0);
  if (!(rms2 > 1e-12)) throw DegenerateConfiguration("observed corners coincide");
  const double s2 = std::sqrt(2.0) / rms2;
  const double s3 = std::sqrt(3.0) / rms3;

  Eigen::Matrix<double, 16, 12> a = Eigen::Matrix<double, 16, 12>::Zero();
  for (int i = 0; i < 8; ++i) {
    Eigen::Vector4d xw;
    xw << s3 * (corners[i] - mean3), 1.0;
    const Eigen::Vector2d xi = s2 * (img[i] - mean2);
    a.block<1, 4>(2 * i, 0) = xw.transpose();
    a.block<1, 4>(2 * i, 8) = -xi.x() * xw.transpose();
    a.block<1, 4>(2 * i + 1, 4) = xw.transpose();
    a.block<1, 4>(2 * i + 1, 8) = -xi.y() * xw.transpose();
  }
  Eigen::JacobiSVD<Eigen::Matrix<double, 16, 12>> svd(a, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(10) > 1e-9 * sv(0))) {
    throw DegenerateConfiguration("DLT design matrix is rank-deficient");
  }
  const Eigen::Matrix<double, 12, 1> p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> pn;
  pn << p.segment<4>(0).transpose(), p.segment<4>(4).transpose(), p.segment<4>(8).transpose();

  Eigen::Matrix3d t2_inv = Eigen::Matrix3d::Identity();
  t2_inv(0, 0) = t2_inv(1, 1) = 1.0 / s2;
  t2_inv.block<2, 1>(0, 2) = mean2;
  Eigen::Matrix4d t3 = Eigen::Matrix4d::Identity();
  t3.block<3, 3>(0, 0) *= s3;
  t3.block<3, 1>(0, 3) = -s3 * mean3;
  Eigen::Matrix<double, 3, 4> proj = t2_inv * pn * t3;

  if (proj.leftCols<3>().determinant() < 0) proj = -proj;
  Eigen::JacobiSVD<Eigen::Matrix3d> rs(proj.leftCols<3>(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double scale = rs.singularValues().mean();
  if (!(scale > 0)) throw DegenerateConfiguration("DLT produced a zero rotation block");
  const Eigen::Matrix3d rot = nearest_rotation(proj.leftCols<3>());
  return {Rotation::from_matrix(rot.transpose()), proj.col(3) / scale};
}

}  // namespace

double reprojection_residual(const Camera& cam, const Box3& box, const RigidMotion& pose,
                             const Corners2D& obs) {
  return std::sqrt(residual_vector(cam, box, pose, obs).squaredNorm() / 16.0);
}

double reprojection_residual_l1(const Camera& cam, const Box3& box, const RigidMotion& pose,
                                const Corners2D& obs) {
  return residual_vector(cam, box, pose, obs).cwiseAbs().sum() / 16.0;
}

PnpResult pnp_solve_detailed(const Camera& cam, const Box3& box, const Corners2D& obs,
                             const PnpOptions& opts) {
  cam.validate();
  box.validate();
  if (!obs.allFinite()) throw InvalidArgument("observed corners must be finite");

  PnpResult res;
  res.pose = dlt_pose(cam, box, obs);
  double c = cost(cam, box, res.pose, obs);
  if (!std::isfinite(c)) {
    throw NoConvergence("linear initialization places the box behind the camera", res.pose);
  }
  res.initial_rms = std::sqrt(c / 16.0);

  int growth = 0;
  for (int it = 0; it < opts.max_iterations; ++it) {
    res.iterations = it + 1;
    const Residual r = residual_vector(cam, box, res.pose, obs);
    const CornerJacobian j = reprojection_jacobian(cam, box, res.pose);
    const Eigen::Matrix<double, 6, 6> jtj = j.transpose() * j;
    const Eigen::Matrix<double, 6, 1> step = jtj.ldlt().solve(-j.transpose() * r);
    if (!step.allFinite()) break;

    double alpha = 1.0;
    RigidMotion cand = perturb(res.pose, step);
    double c_new = cost(cam, box, cand, obs);
    if (c_new > c) {
      if (++growth >= opts.max_growth_streak) {
        throw NoConvergence("Gauss-Newton residual grew on consecutive iterations", res.pose);
      }
      while (c_new > c && alpha > 1e-6) {
        alpha *= 0.5;
        cand = perturb(res.pose, alpha * step);
        c_new = cost(cam, box, cand, obs);
      }
      if (c_new > c) break;  // no descent direction left: stationary
    } else {
      growth = 0;
    }
    const double change = std::abs(std::sqrt(c) - std::sqrt(c_new));
    res.pose = cand;
    c = c_new;
    if (change < opts.residual_change_tol) break;
  }
  res.final_rms = std::sqrt(c / 16.0);
  return res;
}

RigidMotion pnp_solve(const Camera& cam, const Box3& box, const Corners2D& obs) {
  return pnp_solve_detailed(cam, box, obs).pose;
}

}  // namespace symcanon
