#include "symcanon/canonicalize.hpp"

#include <cmath>

#include "symcanon/error.hpp"

namespace symcanon {

std::size_t nearest_element(const SymmetryGroup& g, const Rotation& r, const Rotation& anchor) {
  if (!g.is_discrete()) throw UnsupportedKind("nearest_element needs a discrete group");
  // ||S^T r - A||_F^2 = 6 - 2 tr(S^T r A^T); maximize the trace term.
  const Eigen::Matrix3d x = r.matrix() * anchor.matrix().transpose();
  const auto& elems = g.elements();
  std::size_t best = 0;
  double best_val = -1e300;
  for (std::size_t i = 0; i < elems.size(); ++i) {
    const double val = elems[i].matrix().cwiseProduct(x).sum();
    if (val > best_val + kTieTol) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

Twist map_revolution_angle(const UnitAxis& axis, const Rotation& r) {
  return twist_about(axis, r);
}

CanonicalPose map(const SymmetryGroup& g, const Rotation& r) {
  switch (g.kind()) {
    case SymmetryKind::none:
      return {r, Rotation::identity(), std::nullopt, false};
    case SymmetryKind::cyclic:
    case SymmetryKind::multi_axis: {
      const Rotation& s = g.elements()[nearest_element(g, r)];
      return {compose(s.inverse(), r), s, std::nullopt, false};
    }
    case SymmetryKind::revolution: {
      const Twist tw = map_revolution_angle(g.spec().axis(), r);
      const Rotation s = axis_angle(g.spec().axis(), tw.angle);
      return {compose(s.inverse(), r), s, std::nullopt, tw.degenerate};
    }
    case SymmetryKind::sphere:
      return {Rotation::identity(), r, std::nullopt, false};
  }
  throw UnsupportedKind("unknown symmetry kind");
}

CanonicalPose map_prime_one_axis(const SymmetryGroup& g, const Rotation& r) {
  if (g.kind() != SymmetryKind::cyclic || g.spec().order() < 2) {
    throw UnsupportedKind("map_prime_one_axis needs a cyclic group of order >= 2");
  }
  const UnitAxis& u = g.spec().axis();
  const int m = g.spec().order();
  CanonicalPose base = map(g, r);
  const double theta = twist_about(u, base.canonical).angle;
  const double half = kPi / (2.0 * m);
  if (theta > -half && theta <= half) {
    base.delta = RegionIndex{1, std::nullopt};
    return base;
  }
  const Rotation anchor = axis_angle(u, kPi / m);
  const Rotation& s = g.elements()[nearest_element(g, r, anchor)];
  return {compose(s.inverse(), r), s, RegionIndex{2, std::nullopt}, false};
}

std::array<Rotation, 4> two_axis_chart_anchors(const SymmetrySpec& spec) {
  if (spec.kind() != SymmetryKind::multi_axis || spec.factors().size() != 2) {
    throw UnsupportedKind("two-axis partition needs a multi_axis group with two factors");
  }
  const auto& [u, m] = spec.factors()[0];
  const auto& [v, n] = spec.factors()[1];
  const Rotation au = axis_angle(u, kPi / m);
  const Rotation av = axis_angle(v, kPi / n);
  return {Rotation::identity(), au, av, compose(au, av)};
}

namespace {

constexpr RegionIndex kTwoAxisDelta[4] = {{1, 1}, {2, 1}, {1, 2}, {2, 2}};

std::size_t nearest_anchor(const std::vector<Rotation>& anchors, const Rotation& c) {
  std::size_t best = 0;
  double best_val = -1e300;
  for (std::size_t i = 0; i < anchors.size(); ++i) {
    const double val = anchors[i].matrix().cwiseProduct(c.matrix()).sum();
    if (val > best_val + kTieTol) {
      best_val = val;
      best = i;
    }
  }
  return best;
}

// Chart class of a sqrt(M) anchor: the first chart anchor whose group orbit
// contains it, tested in branch order; anything else falls to (2,2).
int chart_class(const SymmetryGroup& g, const std::array<Rotation, 4>& charts,
                const Rotation& anchor) {
  for (int c = 0; c < 3; ++c) {
    for (const auto& s : g.elements()) {
      if (frobenius_dist(compose(s, charts[c]), anchor) <= kGroupTol) return c;
    }
  }
  return 3;
}

struct TwoAxisRegion {
  std::size_t anchor_index;
  Rotation anchor;
  int chart;
};

TwoAxisRegion two_axis_region(const SymmetryGroup& g, const Rotation& canonical,
                              const std::array<Rotation, 4>& charts) {
  const SqrtGroup sq = sqrt_group(g);
  const std::size_t k = nearest_anchor(sq.anchors, canonical);
  return {k, sq.anchors[k], chart_class(g, charts, sq.anchors[k])};
}

}  // namespace

CanonicalPose map_prime_two_axes(const SymmetryGroup& g, const Rotation& r) {
  const auto charts = two_axis_chart_anchors(g.spec());
  const CanonicalPose base = map(g, r);
  const TwoAxisRegion reg = two_axis_region(g, base.canonical, charts);
  const Rotation& s = g.elements()[nearest_element(g, r, charts[reg.chart])];
  return {compose(s.inverse(), r), s, kTwoAxisDelta[reg.chart], false};
}

CanonicalPose map_prime(const SymmetryGroup& g, const Rotation& r) {
  switch (g.kind()) {
    case SymmetryKind::cyclic:
      return map_prime_one_axis(g, r);
    case SymmetryKind::multi_axis:
      return map_prime_two_axes(g, r);
    case SymmetryKind::revolution:
      return map(g, r);
    default:
      throw UnsupportedKind("map_prime is not defined for " + to_string(g.kind()) + " symmetry");
  }
}

Region region_of(const SymmetryGroup& g, const Rotation& r) {
  switch (g.kind()) {
    case SymmetryKind::none:
      return {0, Rotation::identity(), RegionIndex{1, std::nullopt}};
    case SymmetryKind::cyclic: {
      const UnitAxis& u = g.spec().axis();
      const int m = g.spec().order();
      const double theta = twist_about(u, map(g, r).canonical).angle;
      // Half-open cells (k pi/M - pi/2M, k pi/M + pi/2M].
      const long long k_raw = static_cast<long long>(std::ceil(theta * m / kPi - 0.5));
      const int k = static_cast<int>(((k_raw % (2 * m)) + 2 * m) % (2 * m));
      const Rotation anchor = axis_angle(u, kPi * k / m);
      const SqrtGroup sq = sqrt_group(g);
      std::size_t idx = 0;
      for (std::size_t i = 0; i < sq.anchors.size(); ++i) {
        if (frobenius_dist(sq.anchors[i], anchor) <= kGroupTol) idx = i;
      }
      return {idx, sq.anchors[idx], RegionIndex{k % 2 == 0 ? 1 : 2, std::nullopt}};
    }
    case SymmetryKind::multi_axis: {
      const auto charts = two_axis_chart_anchors(g.spec());
      const TwoAxisRegion reg = two_axis_region(g, map(g, r).canonical, charts);
      return {reg.anchor_index, reg.anchor, kTwoAxisDelta[reg.chart]};
    }
    default:
      throw UnsupportedKind("region_of needs a discrete group");
  }
}

std::pair<Rotation, Rotation> discontinuity_witness(const SymmetryGroup& g, double h, Rng& rng) {
  if (g.kind() != SymmetryKind::cyclic || g.spec().order() < 2) {
    throw UnsupportedKind("discontinuity_witness needs a cyclic group of order >= 2");
  }
  if (!(h > 0) || !std::isfinite(h)) throw InvalidArgument("witness spacing h must be positive");
  const UnitAxis& u = g.spec().axis();
  const int m = g.spec().order();
  std::uniform_real_distribution<double> azimuth(0.0, 2.0 * kPi);
  std::uniform_real_distribution<double> tilt(0.05, 1.2);
  const double phi = azimuth(rng);
  const double beta = tilt(rng);
  // A rotation about an axis perpendicular to u has zero twist about u.
  const Eigen::Vector3d local(std::cos(phi), std::sin(phi), 0.0);
  const Rotation b = axis_angle(UnitAxis(basis_with_z(u) * local), beta);
  return {compose(axis_angle(u, kPi / m + h / 2), b), compose(axis_angle(u, kPi / m - h / 2), b)};
}

double distance_to_map_wrap(const SymmetryGroup& g, const Rotation& r) {
  const int m = g.spec().order();
  const double theta = twist_about(g.spec().axis(), r).angle;
  return std::abs(std::remainder(theta - kPi / m, 2.0 * kPi / m));
}

double distance_to_region_boundary(const SymmetryGroup& g, const Rotation& r) {
  const int m = g.spec().order();
  const double theta = twist_about(g.spec().axis(), map(g, r).canonical).angle;
  return std::abs(std::abs(theta) - kPi / (2.0 * m));
}

}  // namespace symcanon
