#include "symcanon/kernels.hpp"

#include "symcanon/error.hpp"

namespace symcanon {

namespace {

template <class F>
void for_each_index(long n, Exec exec, F&& f) {
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) f(i);
  } else {
    for (long i = 0; i < n; ++i) f(i);
  }
}

void check_sizes(std::size_t a, std::size_t b) {
  if (a != b) {
    throw InvalidArgument("batch sizes differ: " + std::to_string(a) + " estimates vs " + std::to_string(b) +
                          " ground truths");
  }
}

}  // namespace

std::vector<CanonicalPose> canonicalize_batch(const SymmetryGroup& g, const std::vector<Rotation>& rs,
                                              Variant v, Exec exec) {
  // Validate dispatch once so exceptions never leave a parallel region.
  if (v == Variant::map_prime && !rs.empty()) map_prime(g, rs.front());
  std::vector<CanonicalPose> out(rs.size());
  for_each_index(static_cast<long>(rs.size()), exec, [&](long i) {
    out[i] = v == Variant::map ? map(g, rs[i]) : map_prime(g, rs[i]);
  });
  return out;
}

std::vector<double> quotient_dist_batch(const SymmetryGroup& g, const std::vector<Rotation>& est,
                                        const std::vector<Rotation>& gt, Exec exec) {
  check_sizes(est.size(), gt.size());
  std::vector<double> out(est.size());
  for_each_index(static_cast<long>(est.size()), exec,
                 [&](long i) { out[i] = quotient_rotation_dist(g, est[i], gt[i]); });
  return out;
}

std::vector<double> adi_batch(const ModelPoints& model, const std::vector<RigidMotion>& est,
                              const std::vector<RigidMotion>& gt, Exec exec) {
  check_sizes(est.size(), gt.size());
  std::vector<double> out(est.size());
  for_each_index(static_cast<long>(est.size()), exec, [&](long i) { out[i] = adi(model, est[i], gt[i]); });
  return out;
}

}  // namespace symcanon
