#pragma once

// Batch versions of the per-pose operations. Each kernel has a serial
// reference path and an OpenMP path selected by Exec; both produce identical
// results element by element.

#include <vector>

#include "symcanon/canonicalize.hpp"
#include "symcanon/harness.hpp"
#include "symcanon/metrics.hpp"

namespace symcanon {

enum class Variant { map, map_prime };

std::vector<CanonicalPose> canonicalize_batch(const SymmetryGroup& g, const std::vector<Rotation>& rs,
                                              Variant v, Exec exec = Exec::parallel);

std::vector<double> quotient_dist_batch(const SymmetryGroup& g, const std::vector<Rotation>& est,
                                        const std::vector<Rotation>& gt, Exec exec = Exec::parallel);

std::vector<double> adi_batch(const ModelPoints& model, const std::vector<RigidMotion>& est,
                              const std::vector<RigidMotion>& gt, Exec exec = Exec::parallel);

}  // namespace symcanon
