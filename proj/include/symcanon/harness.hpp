#pragma once

// Synthetic pose-regression harness. Observations of a symmetric scene are
// fed to small regressors that predict the 8 projected box corners; PnP turns
// predicted corners back into a pose. Three training modes differ only in the
// rotation used to build the targets: the raw ground truth, its plain-map
// canonical, or the region-wise canonical plus a region classifier.

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "symcanon/canonicalize.hpp"
#include "symcanon/mlp.hpp"
#include "symcanon/projection.hpp"

namespace symcanon {

enum class Mode { raw, map_only, map_prime };
std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);

enum class Exec { serial, parallel };

/// Translations are drawn uniformly from this slab in front of the camera.
struct TranslationSlab {
  double xy_half_range = 0.5;
  double z_min = 9.0;
  double z_max = 11.0;
};

struct Scene {
  SymmetrySpec symmetry = SymmetrySpec::cyclic(UnitAxis::z(), 2);
  Camera camera{600, 600, 320, 240};
  Box3 box{1.0, 0.6, 0.4};
  /// Seed points; each contributes the orbit of its group images.
  std::vector<Eigen::Vector3d> landmarks;
  TranslationSlab slab;

  void validate() const;
};

/// Appearance surrogate. Each landmark's orbit is projected to normalized
/// image coordinates w = x/z + i y/z, sorted lexicographically, and encoded by
/// the coefficients of prod (w - w_k): real and imaginary parts of all but the
/// leading coefficient. Revolution groups use the landmarks' projections onto
/// the axis; sphere groups use the object center.
///
/// The 3-term dot products are summed in sorted order, so signed-permutation
/// groups give bit-identical features on every orbit of poses.
class FeatureMap {
 public:
  FeatureMap(const SymmetryGroup& g, const std::vector<Eigen::Vector3d>& landmarks);

  int dim() const { return dim_; }
  Eigen::VectorXd operator()(const RigidMotion& pose) const;

 private:
  std::vector<std::vector<Eigen::Vector3d>> orbits_;
  int dim_ = 0;
};

struct Dataset {
  std::vector<RigidMotion> poses;
  Eigen::MatrixXd features;  ///< dim x n, one column per sample

  std::size_t size() const { return poses.size(); }
};

/// Generator for an independent random stream of a seed.
Rng stream_rng(std::uint64_t seed, std::uint32_t stream);

/// Haar rotations and slab translations drawn serially from (seed, stream),
/// then features computed per sample (in parallel for Exec::parallel; the
/// result does not depend on the policy).
Dataset make_dataset(const Scene& scene, int n, std::uint64_t seed, std::uint32_t stream = 0,
                     Exec exec = Exec::parallel);

/// Features of arbitrary poses.
Eigen::MatrixXd compute_features(const FeatureMap& fm, const std::vector<RigidMotion>& poses,
                                 Exec exec = Exec::parallel);

struct HarnessParams {
  int epochs = 150;
  int batch_size = 64;
  double learning_rate = 3e-3;
  std::vector<int> hidden{128};
  Loss loss = Loss::l2;
  int train_samples = 16000;
  int val_samples = 1000;
  /// Rotation error needs a PnP solve per validation sample; it is computed
  /// every this many epochs and at the last epoch.
  int rot_eval_every = 10;
  /// One-axis map_prime only: each region regressor also trains on samples
  /// of the neighbouring region lying within this angle of the boundary,
  /// with targets in its own chart.
  double region_margin = 0.0;

  void validate() const;
};

/// Target rotation for a mode and its region label (0 unless map_prime).
struct Target {
  Rotation rotation;
  int region = 0;
};
Target make_target(Mode mode, const SymmetryGroup& g, const Rotation& r);

/// Number of regressors a mode trains for the group.
int region_count(Mode mode, const SymmetryGroup& g);

struct TrainedModel {
  Mode mode = Mode::raw;
  SymmetrySpec symmetry = SymmetrySpec::none();
  Eigen::VectorXd feature_mean, feature_scale;
  Eigen::VectorXd target_mean;  ///< 16 pixel coordinates
  double target_scale = 1.0;
  std::vector<Mlp> regressors;
  std::optional<Mlp> classifier;
};

struct EpochRecord {
  int epoch = 0;
  double loss = 0.0;
  double val_rms_px = 0.0;
  std::optional<double> val_rot_err_rad;
  std::optional<double> clf_acc;
};

struct HarnessReport {
  Mode mode = Mode::raw;
  std::uint64_t seed = 0;
  std::vector<EpochRecord> epochs;
  double final_val_rot_err_median = 0.0;
  double final_val_rms_px = 0.0;
  /// RMS of the constant predictor equal to the mean training target.
  double centroid_rms_px = 0.0;
  std::optional<double> final_clf_acc;
};

struct TrainResult {
  TrainedModel model;
  HarnessReport report;
};

/// Trains the mode's regressors (and classifier) in lockstep epochs.
/// Deterministic for a given seed. Throws TrainingDiverged on a non-finite
/// epoch loss.
TrainResult train(Mode mode, const Scene& scene, const Dataset& train_set, const Dataset& val_set,
                  const HarnessParams& params, std::uint64_t seed);

struct Inference {
  Corners2D corners;
  RigidMotion pose;
  int region = 0;
};

/// Routes through the classifier (or force_region), predicts corners and
/// solves PnP. PnP errors propagate.
Inference infer(const TrainedModel& model, const Scene& scene, const Eigen::VectorXd& features,
                std::optional<int> force_region = std::nullopt);

struct SampleEval {
  double rot_err = 0.0;  ///< quotient rotation distance; pi when PnP failed
  double rms_px = 0.0;   ///< against the mode's own target corners
  int predicted_region = 0;
  int true_region = 0;
  bool pnp_ok = true;
};

std::vector<SampleEval> evaluate(const TrainedModel& model, const Scene& scene, const Dataset& data,
                                 Exec exec = Exec::parallel);

double median(std::vector<double> v);

/// One (mode, seed) run: datasets from the seed, then train.
TrainResult run_harness(Mode mode, const Scene& scene, const HarnessParams& params, std::uint64_t seed);

struct RunSpec {
  Mode mode;
  std::uint64_t seed;
};

/// Independent runs; Exec::parallel spreads them over threads, each run
/// staying single-threaded.
std::vector<TrainResult> run_many(const std::vector<RunSpec>& runs, const Scene& scene,
                                  const HarnessParams& params, Exec exec = Exec::parallel);

}  // namespace symcanon
