#include "symcanon/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "symcanon/error.hpp"

namespace symcanon {

ModelPoints::ModelPoints(std::vector<Eigen::Vector3d> pts) : pts_(std::move(pts)) {
  if (pts_.size() < 4) throw InvalidArgument("model needs at least 4 points");
  for (const auto& p : pts_) {
    if (!p.allFinite()) throw InvalidArgument("model point has non-finite coordinates");
  }
}

ModelPoints ModelPoints::parse_xyz(const std::string& text) {
  std::istringstream in(text);
  std::vector<double> vals;
  std::string tok;
  while (in >> tok) {
    std::size_t used = 0;
    double v = 0;
    try {
      v = std::stod(tok, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used != tok.size()) throw InvalidArgument("model points: bad number '" + tok + "'");
    vals.push_back(v);
  }
  if (vals.size() % 3 != 0) throw InvalidArgument("model points: coordinate count not a multiple of 3");
  std::vector<Eigen::Vector3d> pts;
  for (std::size_t i = 0; i < vals.size(); i += 3) pts.emplace_back(vals[i], vals[i + 1], vals[i + 2]);
  return ModelPoints(std::move(pts));
}

double adi(const ModelPoints& model, const RigidMotion& est, const RigidMotion& gt) {
  std::vector<Eigen::Vector3d> placed;
  placed.reserve(model.size());
  for (const auto& p : model.points()) placed.push_back(est.apply(p));
  double total = 0.0;
  for (const auto& p : model.points()) {
    const Eigen::Vector3d q = gt.apply(p);
    double best = std::numeric_limits<double>::infinity();
    for (const auto& e : placed) best = std::min(best, (e - q).squaredNorm());
    total += std::sqrt(best);
  }
  return total / static_cast<double>(model.size());
}

namespace {

double one_sided(const SymmetryGroup& g, const Rotation& a, const Rotation& b) {
  switch (g.kind()) {
    case SymmetryKind::sphere:
      return 0.0;
    case SymmetryKind::revolution: {
      // max_S tr(b^T S a) = max_S tr(S^T (b a^T)): align b a^T about the axis.
      const UnitAxis& u = g.spec().axis();
      const Rotation s = axis_angle(u, twist_about(u, compose(b, a.inverse())).angle);
      return geodesic_dist(compose(s, a), b);
    }
    default: {
      double best = kPi;
      for (const auto& s : g.elements()) best = std::min(best, geodesic_dist(compose(s, a), b));
      return best;
    }
  }
}

}  // namespace

double quotient_rotation_dist(const SymmetryGroup& g, const Rotation& r_est, const Rotation& r_gt) {
  return std::min(one_sided(g, r_est, r_gt), one_sided(g, r_gt, r_est));
}

}  // namespace symcanon
