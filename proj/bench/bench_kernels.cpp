#include <algorithm>

#include <benchmark/benchmark.h>

#include "symcanon/kernels.hpp"

using namespace symcanon;

namespace {

Exec exec_of(const benchmark::State& s) { return s.range(1) ? Exec::parallel : Exec::serial; }

std::vector<Rotation> rotations(int n) {
  Rng rng(1);
  std::vector<Rotation> v;
  for (int i = 0; i < n; ++i) v.push_back(random_rotation(rng));
  return v;
}

Scene scene() {
  Scene s;
  s.landmarks = {{0.9, 0.3, 0.35}, {-0.2, 0.55, -0.3}, {0.4, -0.1, 0.1},    {0.1, -0.7, 0.3},
                 {-0.6, -0.2, -0.25}, {0.7, 0.65, -0.1}, {-0.35, 0.15, 0.45}, {0.25, 0.8, 0.05}};
  return s;
}

void BM_CanonicalizeMapPrime(benchmark::State& state) {
  const auto g = realize(SymmetrySpec::multi_axis({{UnitAxis::z(), 2}, {UnitAxis::x(), 2}}));
  const auto rs = rotations(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(canonicalize_batch(g, rs, Variant::map_prime, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_QuotientDist(benchmark::State& state) {
  const auto g = realize(SymmetrySpec::cyclic(UnitAxis::z(), 6));
  const auto a = rotations(static_cast<int>(state.range(0)));
  auto b = a;
  std::reverse(b.begin(), b.end());
  for (auto _ : state) benchmark::DoNotOptimize(quotient_dist_batch(g, a, b, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Adi(benchmark::State& state) {
  Rng rng(2);
  std::vector<Eigen::Vector3d> pts(500);
  for (auto& p : pts) p = Eigen::Vector3d::Random();
  const ModelPoints model(pts);
  std::vector<RigidMotion> est, gt;
  for (const auto& r : rotations(static_cast<int>(state.range(0)))) {
    est.push_back({r, {0, 0, 5}});
    gt.push_back({random_rotation(rng), {0, 0, 5}});
  }
  for (auto _ : state) benchmark::DoNotOptimize(adi_batch(model, est, gt, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Features(benchmark::State& state) {
  const Scene sc = scene();
  const FeatureMap fm(realize(sc.symmetry), sc.landmarks);
  std::vector<RigidMotion> poses;
  for (const auto& r : rotations(static_cast<int>(state.range(0)))) poses.push_back({r, {0, 0, 10}});
  for (auto _ : state) benchmark::DoNotOptimize(compute_features(fm, poses, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_Evaluate(benchmark::State& state) {
  const Scene sc = scene();
  HarnessParams p;
  p.epochs = 5;
  p.train_samples = 2000;
  p.val_samples = 200;
  const TrainResult r = run_harness(Mode::map_prime, sc, p, 0);
  const Dataset d = make_dataset(sc, static_cast<int>(state.range(0)), 3);
  for (auto _ : state) benchmark::DoNotOptimize(evaluate(r.model, sc, d, exec_of(state)));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_CanonicalizeMapPrime)->ArgsProduct({{10000}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_QuotientDist)->ArgsProduct({{10000}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Adi)->ArgsProduct({{1000}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Features)->ArgsProduct({{10000}, {0, 1}})->ArgNames({"n", "parallel"});
BENCHMARK(BM_Evaluate)->ArgsProduct({{1000}, {0, 1}})->ArgNames({"n", "parallel"})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
