#include "symcanon/symmetry.hpp"

#include <algorithm>
#include <cmath>

#include "symcanon/error.hpp"

namespace symcanon {

std::string to_string(SymmetryKind k) {
  switch (k) {
    case SymmetryKind::none: return "none";
    case SymmetryKind::cyclic: return "cyclic";
    case SymmetryKind::multi_axis: return "multi_axis";
    case SymmetryKind::revolution: return "revolution";
    case SymmetryKind::sphere: return "sphere";
  }
  return "unknown";
}

SymmetrySpec SymmetrySpec::none() { return {SymmetryKind::none, {}}; }

SymmetrySpec SymmetrySpec::cyclic(const UnitAxis& axis, int order) {
  if (order < 1) throw InvalidArgument("cyclic order must be >= 1");
  return {SymmetryKind::cyclic, {AxisOrder{axis, order}}};
}

SymmetrySpec SymmetrySpec::multi_axis(std::vector<AxisOrder> factors) {
  if (factors.size() < 2 || factors.size() > 3) {
    throw InvalidArgument("multi_axis needs 2 or 3 (axis, order) factors");
  }
  for (const auto& f : factors) {
    if (f.order < 1) throw InvalidArgument("multi_axis orders must be >= 1");
  }
  return {SymmetryKind::multi_axis, std::move(factors)};
}

SymmetrySpec SymmetrySpec::revolution(const UnitAxis& axis) {
  return {SymmetryKind::revolution, {AxisOrder{axis, 0}}};
}

SymmetrySpec SymmetrySpec::sphere() { return {SymmetryKind::sphere, {}}; }

const UnitAxis& SymmetrySpec::axis() const {
  if (factors_.empty()) throw UnsupportedKind(to_string(kind_) + " symmetry has no axis");
  return factors_.front().axis;
}

int SymmetrySpec::order() const {
  if (kind_ != SymmetryKind::cyclic) throw UnsupportedKind("order is defined for cyclic symmetry only");
  return factors_.front().order;
}

std::optional<std::size_t> SymmetryGroup::find(const Rotation& r, double tol) const {
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    if (frobenius_dist(elements_[i], r) <= tol) return i;
  }
  return std::nullopt;
}

bool SymmetryGroup::contains(const Rotation& r, double tol) const {
  switch (kind()) {
    case SymmetryKind::sphere: return true;
    case SymmetryKind::revolution: {
      const Twist tw = twist_about(spec_.axis(), r);
      return frobenius_dist(axis_angle(spec_.axis(), tw.angle), r) <= tol;
    }
    default: return find(r, tol).has_value();
  }
}

namespace {

constexpr double kOrderTol = 1e-9;

double angle_key(const UnitAxis& axis, const Rotation& r) {
  double a = twist_about(axis, r).angle;
  if (a < -kOrderTol) a += 2.0 * kPi;
  if (a >= 2.0 * kPi - kOrderTol) a = 0.0;
  return std::max(a, 0.0);
}

bool is_identity(const Rotation& r) {
  return frobenius_dist(r, Rotation::identity()) <= kOrderTol;
}

}  // namespace

void sort_canonical(std::vector<Rotation>& rs, const UnitAxis& axis) {
  std::vector<std::pair<double, Rotation>> keyed;
  keyed.reserve(rs.size());
  for (const auto& r : rs) keyed.emplace_back(angle_key(axis, r), r);
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) {
    const bool ia = is_identity(a.second), ib = is_identity(b.second);
    if (ia != ib) return ia;
    if (std::abs(a.first - b.first) > kOrderTol) return a.first < b.first;
    const auto ra = a.second.row_major(), rb = b.second.row_major();
    for (int i = 0; i < 9; ++i) {
      if (std::abs(ra[i] - rb[i]) > kOrderTol) return ra[i] < rb[i];
    }
    return false;
  });
  for (std::size_t i = 0; i < rs.size(); ++i) rs[i] = keyed[i].second;
}

namespace {

bool contains_within(const std::vector<Rotation>& set, const Rotation& r, double tol) {
  return std::any_of(set.begin(), set.end(),
                     [&](const Rotation& e) { return frobenius_dist(e, r) <= tol; });
}

std::vector<Rotation> closure(const std::vector<Rotation>& generators) {
  std::vector<Rotation> elems{Rotation::identity()};
  std::size_t frontier = 0;
  while (frontier < elems.size()) {
    const Rotation current = elems[frontier++];
    for (const auto& g : generators) {
      const Rotation next = compose(g, current);
      if (contains_within(elems, next, kGroupTol)) continue;
      elems.push_back(next);
      if (elems.size() > kMaxGroupOrder) {
        throw GroupNotFinite("generator closure exceeds " + std::to_string(kMaxGroupOrder) +
                             " elements; the generators do not span a finite group");
      }
    }
  }
  return elems;
}

}  // namespace

SymmetryGroup realize(const SymmetrySpec& spec) {
  SymmetryGroup g(spec);
  switch (spec.kind()) {
    case SymmetryKind::none:
      g.elements_ = {Rotation::identity()};
      break;
    case SymmetryKind::cyclic: {
      const int m = spec.order();
      for (int k = 0; k < m; ++k) {
        g.elements_.push_back(axis_angle(spec.axis(), 2.0 * kPi * k / m));
      }
      sort_canonical(g.elements_, spec.axis());
      break;
    }
    case SymmetryKind::multi_axis: {
      std::vector<Rotation> gens;
      for (const auto& f : spec.factors()) gens.push_back(axis_angle(f.axis, 2.0 * kPi / f.order));
      g.elements_ = closure(gens);
      sort_canonical(g.elements_, spec.axis());
      break;
    }
    case SymmetryKind::revolution:
    case SymmetryKind::sphere:
      break;
  }
  return g;
}

bool equivalent(const SymmetryGroup& g, const Rotation& r1, const Rotation& r2, double tol) {
  if (!(tol > 0)) throw InvalidArgument("equivalence tolerance must be positive");
  switch (g.kind()) {
    case SymmetryKind::sphere:
      return true;
    case SymmetryKind::revolution: {
      // ||S r2 - r1||^2 = 6 - 2 tr(S^T r1 r2^T): align about the axis.
      const Rotation target = compose(r1, r2.inverse());
      const Rotation s = axis_angle(g.spec().axis(), twist_about(g.spec().axis(), target).angle);
      return frobenius_dist(compose(s, r2), r1) <= tol;
    }
    default:
      return std::any_of(g.elements().begin(), g.elements().end(), [&](const Rotation& s) {
        return frobenius_dist(compose(s, r2), r1) <= tol;
      });
  }
}

SqrtGroup sqrt_group(const SymmetryGroup& g) {
  const SymmetrySpec& spec = g.spec();
  SqrtGroup out;
  switch (spec.kind()) {
    case SymmetryKind::none:
      // Trivial group: the half-step set of a 1-fold axis has no preferred
      // axis, so only identity is returned.
      out.anchors = {Rotation::identity()};
      return out;
    case SymmetryKind::cyclic: {
      const int m = spec.order();
      for (int k = 0; k < 2 * m; ++k) {
        out.anchors.push_back(axis_angle(spec.axis(), kPi * k / m));
      }
      sort_canonical(out.anchors, spec.axis());
      return out;
    }
    case SymmetryKind::multi_axis: {
      if (spec.factors().size() != 2) {
        throw UnsupportedKind("sqrt_group supports exactly two symmetry axes");
      }
      const auto& [u, m] = spec.factors()[0];
      const auto& [v, n] = spec.factors()[1];
      for (int i = 0; i < 2 * m; ++i) {
        const Rotation ru = axis_angle(u, kPi * i / m);
        for (int j = 0; j < 2 * n; ++j) {
          const Rotation a = compose(ru, axis_angle(v, kPi * j / n));
          if (!contains_within(out.anchors, a, kGroupTol)) out.anchors.push_back(a);
        }
      }
      sort_canonical(out.anchors, u);
      return out;
    }
    case SymmetryKind::revolution:
    case SymmetryKind::sphere:
      break;
  }
  throw UnsupportedKind("sqrt_group is undefined for " + to_string(spec.kind()) +
                        " symmetry; Map is already continuous there");
}

}  // namespace symcanon
