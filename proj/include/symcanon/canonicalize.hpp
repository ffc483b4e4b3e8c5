#pragma once

// Canonicalization of rotations under an object's symmetry group.
//
// map() picks, for every rotation, the representative closest to identity
// within its equivalence class. Its image has wrap-around discontinuities
// when the group is discrete; map_prime() splits SO(3) into regions anchored
// at the half-step rotations of sqrt_group() so that each region's chart is
// continuous, and reports which region (regressor) a rotation belongs to.

#include <array>
#include <optional>
#include <utility>

#include "symcanon/symmetry.hpp"

namespace symcanon {

/// Region index: delta in {1, 2} for one axis, (delta1, delta2) for two.
struct RegionIndex {
  int d1 = 1;
  std::optional<int> d2;

  /// 0-based class id: d1 - 1 (one axis) or 2(d1-1) + (d2-1) (two axes).
  int flat() const { return d2 ? 2 * (d1 - 1) + (*d2 - 1) : d1 - 1; }
  friend bool operator==(const RegionIndex&, const RegionIndex&) = default;
};

struct CanonicalPose {
  Rotation canonical;  ///< s_hat^-1 * r
  Rotation s_hat;      ///< selected group element
  std::optional<RegionIndex> delta;
  bool degenerate = false;  ///< revolution alignment was undefined
};

struct Region {
  std::size_t index = 0;  ///< position of the anchor in sqrt_group().anchors
  Rotation anchor;
  RegionIndex delta;  ///< which regressor chart the region folds onto
};

/// Tie tolerance on the trace objective; earlier group elements win ties.
inline constexpr double kTieTol = 1e-9;

/// Index into g.elements() maximizing tr(S^T r anchor^T), i.e. minimizing
/// ||S^-1 r - anchor||_F. Discrete groups only.
std::size_t nearest_element(const SymmetryGroup& g, const Rotation& r,
                            const Rotation& anchor = Rotation::identity());

CanonicalPose map(const SymmetryGroup& g, const Rotation& r);

/// Closed-form angle about `axis` minimizing ||R^axis_a^-1 r - I||_F.
Twist map_revolution_angle(const UnitAxis& axis, const Rotation& r);

/// One-axis partition. Requires a cyclic group of order >= 2.
CanonicalPose map_prime_one_axis(const SymmetryGroup& g, const Rotation& r);

/// Two-axis partition. Requires a multi_axis group with exactly two factors.
CanonicalPose map_prime_two_axes(const SymmetryGroup& g, const Rotation& r);

/// Dispatches on the group kind: cyclic -> one axis, two-factor multi_axis ->
/// two axes, revolution -> plain map (no partition needed). Throws
/// UnsupportedKind otherwise.
CanonicalPose map_prime(const SymmetryGroup& g, const Rotation& r);

/// sqrt(M) region containing map(g, r).canonical. Discrete groups only.
Region region_of(const SymmetryGroup& g, const Rotation& r);

/// The four chart anchors of the two-axis partition, in branch order
/// (1,1), (2,1), (1,2), (2,2).
std::array<Rotation, 4> two_axis_chart_anchors(const SymmetrySpec& spec);

/// A pair of rotations at most h apart whose plain-map canonicals sit on
/// opposite sides of the chart wrap at rotation angle pi/M about the axis.
/// The shared tilt is a seeded rotation about an axis perpendicular to the
/// symmetry axis. Cyclic groups of order >= 2 only.
std::pair<Rotation, Rotation> discontinuity_witness(const SymmetryGroup& g, double h, Rng& rng);

/// Angular distance (about the symmetry axis) from r's rotation angle to the
/// nearest plain-map chart wrap at +-pi/M + k*2pi/M. Cyclic groups only.
double distance_to_map_wrap(const SymmetryGroup& g, const Rotation& r);

/// Angular distance from map(g, r).canonical's rotation angle to the nearest
/// region boundary at +-pi/(2M). Cyclic groups only.
double distance_to_region_boundary(const SymmetryGroup& g, const Rotation& r);

}  // namespace symcanon
