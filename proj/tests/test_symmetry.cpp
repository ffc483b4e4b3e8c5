#include <doctest.h>

#include <cmath>
#include <set>

#include "symcanon/error.hpp"
#include "symcanon/symmetry.hpp"
#include "test_util.hpp"

using namespace symcanon;
using testutil::max_abs_diff;
using testutil::rx;
using testutil::rz;

namespace {

// Independent closure oracle for groups of signed permutation matrices:
// breadth-first products of generators, deduplicated by exact integer entries.
std::set<std::array<int, 9>> brute_force_closure(const std::vector<Eigen::Matrix3d>& gens) {
  auto key = [](const Eigen::Matrix3d& m) {
    std::array<int, 9> k{};
    for (int i = 0; i < 9; ++i) k[i] = static_cast<int>(std::lround(m(i / 3, i % 3)));
    return k;
  };
  std::set<std::array<int, 9>> seen{key(Eigen::Matrix3d::Identity())};
  std::vector<Eigen::Matrix3d> frontier{Eigen::Matrix3d::Identity()};
  while (!frontier.empty()) {
    std::vector<Eigen::Matrix3d> next;
    for (const auto& m : frontier)
      for (const auto& g : gens) {
        const Eigen::Matrix3d p = (g * m).array().round().matrix();
        if (seen.insert(key(p)).second) next.push_back(p);
      }
    frontier = std::move(next);
  }
  return seen;
}

}  // namespace

TEST_CASE("realize cyclic groups") {
  const auto g2 = realize(SymmetrySpec::cyclic(UnitAxis::z(), 2));
  REQUIRE(g2.size() == 2);
  CHECK(g2.elements()[0] == Rotation::identity());
  CHECK(max_abs_diff(g2.elements()[1], rz(kPi)) == 0.0);

  const auto g1 = realize(SymmetrySpec::cyclic(UnitAxis::z(), 1));
  REQUIRE(g1.size() == 1);
  CHECK(g1.elements()[0] == Rotation::identity());

  for (int m : {3, 4, 5, 6, 12}) {
    const auto g = realize(SymmetrySpec::cyclic(UnitAxis(1, 1, 0), m));
    REQUIRE(g.size() == static_cast<std::size_t>(m));
    const double min_gap = frobenius_dist(axis_angle(UnitAxis::z(), 2 * kPi / m), Rotation::identity());
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        CHECK(frobenius_dist(g.elements()[i], g.elements()[j]) >= min_gap - 1e-12);
  }

  CHECK_THROWS_AS(SymmetrySpec::cyclic(UnitAxis::z(), 0), InvalidArgument);
}

TEST_CASE("realize multi_axis square prism group against brute-force closure") {
  const auto g = realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}}));
  const auto oracle = brute_force_closure({rz(kPi / 2).matrix(), rx(kPi).matrix()});
  REQUIRE(oracle.size() == 8);
  REQUIRE(g.size() == 8);
  // Hand list: Rz(k pi/2) and Rz(k pi/2) Rx(pi).
  for (int k = 0; k < 4; ++k) {
    CHECK(g.contains(rz(k * kPi / 2)));
    CHECK(g.contains(compose(rz(k * kPi / 2), rx(kPi))));
  }
  CHECK(g.elements().front() == Rotation::identity());
}

TEST_CASE("closure of incompatible generators is rejected") {
  CHECK_THROWS_AS(realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 5}, {UnitAxis::x(), 3}})),
                  GroupNotFinite);
  CHECK_THROWS_AS(SymmetrySpec::multi_axis({{UnitAxis::z(), 2}}), InvalidArgument);
}

TEST_CASE("property: realized groups are closed and deduplicated") {
  const std::vector<SymmetrySpec> specs = {
      SymmetrySpec::cyclic(UnitAxis::z(), 6),
      SymmetrySpec::cyclic(UnitAxis(0.3, -0.4, 0.5), 5),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}}),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 3}, {UnitAxis::x(), 2}}),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}, {UnitAxis::y(), 2}}),
  };
  for (const auto& spec : specs) {
    const auto g = realize(spec);
    for (const auto& a : g.elements()) {
      CHECK(g.contains(a.inverse()));
      for (const auto& b : g.elements()) CHECK(g.contains(compose(a, b)));
    }
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j)
        CHECK(frobenius_dist(g.elements()[i], g.elements()[j]) > kGroupTol);
  }
}

TEST_CASE("equivalent") {
  const auto g = realize(SymmetrySpec::cyclic(UnitAxis::z(), 2));
  CHECK(equivalent(g, rz(0.3), rz(0.3 + kPi), 1e-9));
  CHECK_FALSE(equivalent(g, rz(0.3), rz(0.4), 1e-9));
  // Exhaustive oracle over the two elements.
  bool any = false;
  for (const auto& s : g.elements()) any |= frobenius_dist(compose(s, rz(0.4)), rz(0.3)) <= 1e-9;
  CHECK_FALSE(any);

  Rng rng(3);
  const auto sphere = realize(SymmetrySpec::sphere());
  CHECK(equivalent(sphere, random_rotation(rng), random_rotation(rng), 1e-9));

  const auto rev = realize(SymmetrySpec::revolution(UnitAxis::z()));
  const Rotation r = random_rotation(rng);
  CHECK(equivalent(rev, compose(rz(1.234), r), r, 1e-9));
  CHECK_FALSE(equivalent(rev, compose(rx(0.1), r), r, 1e-6));
  CHECK_THROWS_AS(equivalent(g, r, r, 0.0), InvalidArgument);
}

TEST_CASE("property: equivalence relation on group orbits") {
  const std::vector<SymmetrySpec> specs = {
      SymmetrySpec::cyclic(UnitAxis::z(), 3),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}}),
      SymmetrySpec::revolution(UnitAxis(1, 0, 1)),
  };
  Rng rng(11);
  std::uniform_real_distribution<double> ang(0, 2 * kPi);
  for (const auto& spec : specs) {
    const auto g = realize(spec);
    auto element = [&]() {
      if (!g.is_discrete()) return axis_angle(spec.axis(), ang(rng));
      return g.elements()[rng() % g.size()];
    };
    for (int i = 0; i < 1000; ++i) {
      const Rotation a = random_rotation(rng);
      const Rotation b = compose(element(), a);
      const Rotation c = compose(element(), b);
      REQUIRE(equivalent(g, a, a, 1e-9));
      REQUIRE(equivalent(g, a, b, 1e-9));
      REQUIRE(equivalent(g, b, a, 1e-9));
      REQUIRE(equivalent(g, b, c, 1e-9));
      REQUIRE(equivalent(g, a, c, 1e-9));
      REQUIRE_FALSE(equivalent(g, a, random_rotation(rng), 1e-6));
    }
  }
}

TEST_CASE("sqrt_group anchors") {
  const auto g2 = sqrt_group(realize(SymmetrySpec::cyclic(UnitAxis::z(), 2)));
  REQUIRE(g2.anchors.size() == 4);
  for (int k = 0; k < 4; ++k) CHECK(max_abs_diff(g2.anchors[k], rz(k * kPi / 2)) == 0.0);

  const auto g1 = sqrt_group(realize(SymmetrySpec::cyclic(UnitAxis::z(), 1)));
  REQUIRE(g1.anchors.size() == 2);
  CHECK(max_abs_diff(g1.anchors[1], rz(kPi)) == 0.0);

  const auto g3 = sqrt_group(realize(SymmetrySpec::cyclic(UnitAxis::z(), 3)));
  REQUIRE(g3.anchors.size() == 6);
  for (int k = 0; k < 6; ++k) CHECK(max_abs_diff(g3.anchors[k], rz(k * kPi / 3)) < 1e-15);

  const auto two = sqrt_group(realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}})));
  CHECK(two.anchors.size() == 16);

  CHECK_THROWS_AS(sqrt_group(realize(SymmetrySpec::revolution(UnitAxis::z()))), UnsupportedKind);
  CHECK_THROWS_AS(sqrt_group(realize(SymmetrySpec::sphere())), UnsupportedKind);
  CHECK_THROWS_AS(
      sqrt_group(realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}, {UnitAxis::y(), 2}}))),
      UnsupportedKind);
}

TEST_CASE("property: sqrt_group contains the group") {
  const std::vector<SymmetrySpec> specs = {
      SymmetrySpec::cyclic(UnitAxis::z(), 2), SymmetrySpec::cyclic(UnitAxis(0, 1, 1), 5),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}}),
      SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}})};
  for (const auto& spec : specs) {
    const auto g = realize(spec);
    const auto sq = sqrt_group(g);
    for (const auto& e : g.elements()) {
      bool found = false;
      for (const auto& a : sq.anchors) found |= frobenius_dist(a, e) <= 1e-9;
      CHECK(found);
    }
  }
}
