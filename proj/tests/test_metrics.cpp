#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "symcanon/canonicalize.hpp"
#include "symcanon/error.hpp"
#include "symcanon/metrics.hpp"
#include "test_util.hpp"

using namespace symcanon;
using testutil::rx;
using testutil::rz;

namespace {

ModelPoints cuboid(double hx, double hy, double hz) {
  std::vector<Eigen::Vector3d> pts;
  for (int i = 0; i < 8; ++i) pts.emplace_back((i & 1) ? hx : -hx, (i & 2) ? hy : -hy, (i & 4) ? hz : -hz);
  return ModelPoints(pts);
}

std::vector<SymmetrySpec> all_specs() {
  return {SymmetrySpec::none(),
          SymmetrySpec::cyclic(UnitAxis::z(), 2),
          SymmetrySpec::cyclic(UnitAxis(0.3, -1, 2), 5),
          SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}}),
          SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}, {UnitAxis::y(), 2}}),
          SymmetrySpec::revolution(UnitAxis::z()),
          SymmetrySpec::revolution(UnitAxis(1, 1, 0)),
          SymmetrySpec::sphere()};
}

}  // namespace

TEST_CASE("ModelPoints validation and parsing") {
  CHECK_THROWS_AS(ModelPoints({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}}), InvalidArgument);
  CHECK_THROWS_AS(ModelPoints({{0, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 0, NAN}}), InvalidArgument);
  const auto m = ModelPoints::parse_xyz("0 0 0\n1 0 0\n0 1 0\n0 0 1.5e0\n");
  CHECK(m.size() == 4);
  CHECK(m.points()[3].z() == 1.5);
  CHECK_THROWS_AS(ModelPoints::parse_xyz("0 0 0 1 0 0 0 1 0 0 0"), InvalidArgument);
  CHECK_THROWS_AS(ModelPoints::parse_xyz("0 0 0 1 0 0 0 1 0 0 0 x"), InvalidArgument);
}

TEST_CASE("adi examples") {
  const auto box = cuboid(1.0, 0.6, 0.4);
  Rng rng(3);
  const RigidMotion gt{random_rotation(rng), {0.1, -0.2, 5.0}};
  CHECK(adi(box, gt, gt) == 0.0);

  const RigidMotion flipped{compose(rz(kPi), gt.r), gt.t};
  CHECK(adi(box, flipped, gt) < 1e-9);

  const RigidMotion shifted{Rotation::identity(), {1.0, 0.0, 0.0}};
  CHECK(adi(box, shifted, RigidMotion{}) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("adi is invariant under relabeling of model points") {
  Rng rng(4);
  std::normal_distribution<double> n(0, 1);
  std::vector<Eigen::Vector3d> pts(50);
  for (auto& p : pts) p = {n(rng), n(rng), n(rng)};
  for (int trial = 0; trial < 20; ++trial) {
    const RigidMotion a{random_rotation(rng), {n(rng), n(rng), n(rng)}};
    const RigidMotion b{random_rotation(rng), {n(rng), n(rng), n(rng)}};
    auto shuffled = pts;
    std::shuffle(shuffled.begin(), shuffled.end(), rng);
    REQUIRE(adi(ModelPoints(pts), a, b) == doctest::Approx(adi(ModelPoints(shuffled), a, b)).epsilon(1e-12));
  }
}

TEST_CASE("adi vanishes for symmetric point sets under group perturbation") {
  Rng rng(5);
  // Point set closed under the group: orbit of a few seeds.
  const auto g = realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 4}, {UnitAxis::x(), 2}}));
  std::vector<Eigen::Vector3d> pts;
  for (const Eigen::Vector3d seed : {Eigen::Vector3d(0.9, 0.3, 0.35), Eigen::Vector3d(-0.2, 0.55, -0.3)}) {
    for (const auto& s : g.elements()) pts.push_back(s.matrix() * seed);
  }
  const ModelPoints model(pts);
  for (int i = 0; i < 100; ++i) {
    const RigidMotion gt{random_rotation(rng), {0.0, 0.0, 4.0}};
    const auto& s = g.elements()[rng() % g.size()];
    REQUIRE(adi(model, {compose(s, gt.r), gt.t}, gt) < 1e-9);
  }
}

TEST_CASE("quotient_rotation_dist examples") {
  const auto c2 = realize(SymmetrySpec::cyclic(UnitAxis::z(), 2));
  Rng rng(6);
  const Rotation r = random_rotation(rng);
  CHECK(quotient_rotation_dist(c2, compose(rz(kPi), r), r) == 0.0);
  CHECK(quotient_rotation_dist(c2, rz(kPi / 2), Rotation::identity()) ==
        doctest::Approx(kPi / 2).epsilon(1e-14));

  const auto rev = realize(SymmetrySpec::revolution(UnitAxis::z()));
  for (double a : {0.0, 0.4, 2.0, -3.0}) {
    CHECK(quotient_rotation_dist(rev, compose(rz(a), rx(0.2)), rx(0.2)) < 1e-12);
  }
  CHECK(quotient_rotation_dist(realize(SymmetrySpec::sphere()), r, Rotation::identity()) == 0.0);
  const auto none = realize(SymmetrySpec::none());
  CHECK(quotient_rotation_dist(none, r, Rotation::identity()) ==
        doctest::Approx(geodesic_dist(r, Rotation::identity())));
}

TEST_CASE("property: quotient distance zero exactly on orbits") {
  Rng rng(7);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  for (const auto& spec : all_specs()) {
    const auto g = realize(spec);
    for (int i = 0; i < 1000; ++i) {
      const Rotation r = random_rotation(rng);
      Rotation s;
      if (g.is_discrete()) {
        s = g.elements()[rng() % g.size()];
      } else if (spec.kind() == SymmetryKind::revolution) {
        s = axis_angle(spec.axis(), ang(rng));
      } else {
        s = random_rotation(rng);
      }
      const double d = quotient_rotation_dist(g, compose(s, r), r);
      if (spec.kind() == SymmetryKind::revolution) {
        REQUIRE(d < 1e-12);
      } else {
        REQUIRE(d == 0.0);
      }
    }
  }
}

TEST_CASE("property: quotient distance zero iff equivalent, and symmetric") {
  Rng rng(8);
  for (const auto& spec : all_specs()) {
    const auto g = realize(spec);
    for (int i = 0; i < 10000 / 8; ++i) {
      const Rotation a = random_rotation(rng);
      const Rotation b = random_rotation(rng);
      const double d = quotient_rotation_dist(g, a, b);
      REQUIRE(d >= 0.0);
      REQUIRE(d == quotient_rotation_dist(g, b, a));
      REQUIRE((d < 1e-6) == equivalent(g, a, b, 1e-6));
    }
  }
}

TEST_CASE("property: canonicalization preserves the orbit") {
  Rng rng(9);
  for (const auto& spec : all_specs()) {
    const auto g = realize(spec);
    for (int i = 0; i < 1000; ++i) {
      const Rotation r = random_rotation(rng);
      REQUIRE(quotient_rotation_dist(g, map(g, r).canonical, r) < 1e-9);
    }
  }
}
