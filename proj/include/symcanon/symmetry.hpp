#pragma once

// Proper symmetry groups of rigid objects: declarative specs and their
// realization as element sets (discrete) or symbolic groups (continuous).

#include <optional>
#include <string>
#include <vector>

#include "symcanon/so3.hpp"

namespace symcanon {

enum class SymmetryKind { none, cyclic, multi_axis, revolution, sphere };

std::string to_string(SymmetryKind k);

struct AxisOrder {
  UnitAxis axis;
  int order;
};

class SymmetrySpec {
 public:
  static SymmetrySpec none();
  /// order >= 1; order 1 realizes the trivial group.
  static SymmetrySpec cyclic(const UnitAxis& axis, int order);
  /// Two or three (axis, order) factors, generating their closure.
  static SymmetrySpec multi_axis(std::vector<AxisOrder> factors);
  static SymmetrySpec revolution(const UnitAxis& axis);
  static SymmetrySpec sphere();

  SymmetryKind kind() const { return kind_; }
  /// cyclic: one factor; multi_axis: 2..3 factors; revolution: one factor
  /// with order 0; otherwise empty.
  const std::vector<AxisOrder>& factors() const { return factors_; }
  const UnitAxis& axis() const;
  int order() const;
  bool is_discrete() const {
    return kind_ == SymmetryKind::none || kind_ == SymmetryKind::cyclic ||
           kind_ == SymmetryKind::multi_axis;
  }

 private:
  SymmetrySpec(SymmetryKind k, std::vector<AxisOrder> f)
      : kind_(k), factors_(std::move(f)) {}
  SymmetryKind kind_;
  std::vector<AxisOrder> factors_;
};

/// Tolerance used for closure dedup and group membership.
inline constexpr double kGroupTol = 1e-7;
/// Closure enumeration aborts beyond this many elements.
inline constexpr std::size_t kMaxGroupOrder = 10000;

class SymmetryGroup {
 public:
  const SymmetrySpec& spec() const { return spec_; }
  SymmetryKind kind() const { return spec_.kind(); }
  bool is_discrete() const { return spec_.is_discrete(); }

  /// Discrete groups only: elements in canonical order, identity first.
  const std::vector<Rotation>& elements() const { return elements_; }
  std::size_t size() const { return elements_.size(); }

  /// Index of the element within kGroupTol of r, if any (discrete only).
  std::optional<std::size_t> find(const Rotation& r, double tol = kGroupTol) const;
  bool contains(const Rotation& r, double tol = kGroupTol) const;

 private:
  friend SymmetryGroup realize(const SymmetrySpec& spec);
  explicit SymmetryGroup(SymmetrySpec spec) : spec_(std::move(spec)) {}
  SymmetrySpec spec_;
  std::vector<Rotation> elements_;
};

/// Anchor set sqrt(M): half-step rotations whose induced partition keeps
/// every chart free of wrap-around discontinuities.
struct SqrtGroup {
  std::vector<Rotation> anchors;
};

/// Cyclic groups are enumerated directly; multi-axis groups are closed under
/// composition of their generators with dedup until fixpoint. Throws
/// GroupNotFinite when the closure exceeds kMaxGroupOrder elements.
SymmetryGroup realize(const SymmetrySpec& spec);

/// True iff some S in the group has ||S*r2 - r1||_F <= tol.
bool equivalent(const SymmetryGroup& g, const Rotation& r1, const Rotation& r2,
                double tol);

/// Anchors {R^u_{m pi/M}} (cyclic) or {R^u_{m pi/M} R^v_{n pi/N}} (two axes).
/// Throws UnsupportedKind for continuous groups and three-axis products.
SqrtGroup sqrt_group(const SymmetryGroup& g);

/// Sorts rotations into the canonical order used for deterministic
/// tie-breaking: identity first, then by rotation angle about `axis` in
/// [0, 2pi), then lexicographically by row-major entries.
void sort_canonical(std::vector<Rotation>& rs, const UnitAxis& axis);

}  // namespace symcanon
