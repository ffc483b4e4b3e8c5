#include "symcanon/harness.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>

#include "symcanon/error.hpp"
#include "symcanon/metrics.hpp"

namespace symcanon {

std::string to_string(Mode m) {
  switch (m) {
    case Mode::raw: return "raw";
    case Mode::map_only: return "map_only";
    case Mode::map_prime: return "map_prime";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& s) {
  if (s == "raw") return Mode::raw;
  if (s == "map_only") return Mode::map_only;
  if (s == "map_prime") return Mode::map_prime;
  throw InvalidArgument("mode must be raw, map_only or map_prime, got \"" + s + "\"");
}

void Scene::validate() const {
  camera.validate();
  box.validate();
  if (landmarks.empty()) throw InvalidArgument("scene needs at least one landmark");
  double radius = Eigen::Vector3d(box.hx, box.hy, box.hz).norm();
  for (const auto& p : landmarks) {
    if (!p.allFinite()) throw InvalidArgument("landmarks must be finite");
    radius = std::max(radius, p.norm());
  }
  const auto& s = slab;
  if (!(std::isfinite(s.xy_half_range) && s.xy_half_range >= 0 && std::isfinite(s.z_max) &&
        s.z_min <= s.z_max)) {
    throw InvalidArgument("translation slab must satisfy xy_half_range >= 0 and z_min <= z_max");
  }
  if (!(s.z_min - radius > kMinDepth)) {
    throw InvalidArgument("translation slab z_min must exceed the scene radius so every point stays in front of the camera");
  }
}

void HarnessParams::validate() const {
  if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
  if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
  if (!(learning_rate > 0) || !std::isfinite(learning_rate)) throw InvalidArgument("learning_rate must be > 0");
  if (hidden.empty()) throw InvalidArgument("hidden must list at least one layer width");
  for (int h : hidden) {
    if (h < 1) throw InvalidArgument("hidden layer widths must be >= 1");
  }
  if (train_samples < 1 || val_samples < 1) throw InvalidArgument("sample counts must be >= 1");
  if (rot_eval_every < 1) throw InvalidArgument("rot_eval_every must be >= 1");
  if (!(region_margin >= 0) || !std::isfinite(region_margin)) throw InvalidArgument("region_margin must be >= 0");
}

// ---- features ---------------------------------------------------------------

FeatureMap::FeatureMap(const SymmetryGroup& g, const std::vector<Eigen::Vector3d>& landmarks) {
  switch (g.kind()) {
    case SymmetryKind::sphere:
      orbits_.push_back({Eigen::Vector3d::Zero()});
      break;
    case SymmetryKind::revolution: {
      const Eigen::Vector3d& u = g.spec().axis().vec();
      for (const auto& p : landmarks) orbits_.push_back({p.dot(u) * u});
      break;
    }
    default:
      for (const auto& p : landmarks) {
        std::vector<Eigen::Vector3d> orbit;
        for (const auto& s : g.elements()) orbit.push_back(s.matrix() * p);
        orbits_.push_back(std::move(orbit));
      }
  }
  for (const auto& o : orbits_) dim_ += 2 * static_cast<int>(o.size());
}

namespace {

// Sum of three products in ascending order, independent of term order.
double sorted_dot(double a0, double b0, double a1, double b1, double a2, double b2) {
  std::array<double, 3> t{a0 * b0, a1 * b1, a2 * b2};
  std::sort(t.begin(), t.end());
  return (t[0] + t[1]) + t[2];
}

}  // namespace

Eigen::VectorXd FeatureMap::operator()(const RigidMotion& pose) const {
  const Eigen::Matrix3d& r = pose.r.matrix();
  Eigen::VectorXd out(dim_);
  int k = 0;
  std::vector<std::complex<double>> w, coef;
  for (const auto& orbit : orbits_) {
    w.clear();
    for (const auto& q : orbit) {
      double x[3];
      for (int i = 0; i < 3; ++i) {
        x[i] = sorted_dot(r(0, i), q[0], r(1, i), q[1], r(2, i), q[2]) + pose.t[i];
      }
      w.emplace_back(x[0] / x[2], x[1] / x[2]);
    }
    std::sort(w.begin(), w.end(), [](const auto& a, const auto& b) {
      return a.real() < b.real() || (a.real() == b.real() && a.imag() < b.imag());
    });
    coef.assign(w.size() + 1, 0.0);
    coef[0] = 1.0;
    for (std::size_t j = 0; j < w.size(); ++j) {
      for (std::size_t c = j + 1; c > 0; --c) coef[c] -= w[j] * coef[c - 1];
    }
    for (std::size_t c = 1; c < coef.size(); ++c) {
      out[k++] = coef[c].real();
      out[k++] = coef[c].imag();
    }
  }
  return out;
}

Rng stream_rng(std::uint64_t seed, std::uint32_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), stream};
  return Rng(seq);
}

Eigen::MatrixXd compute_features(const FeatureMap& fm, const std::vector<RigidMotion>& poses, Exec exec) {
  const long n = static_cast<long>(poses.size());
  Eigen::MatrixXd f(fm.dim(), n);
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i) f.col(i) = fm(poses[i]);
  } else {
    for (long i = 0; i < n; ++i) f.col(i) = fm(poses[i]);
  }
  return f;
}

Dataset make_dataset(const Scene& scene, int n, std::uint64_t seed, std::uint32_t stream, Exec exec) {
  if (n < 1) throw InvalidArgument("dataset size must be >= 1");
  scene.validate();
  const SymmetryGroup g = realize(scene.symmetry);
  Rng rng = stream_rng(seed, stream);
  std::uniform_real_distribution<double> xy(-scene.slab.xy_half_range, scene.slab.xy_half_range);
  std::uniform_real_distribution<double> z(scene.slab.z_min, scene.slab.z_max);
  Dataset d;
  d.poses.reserve(n);
  for (int i = 0; i < n; ++i) {
    const Rotation r = random_rotation(rng);
    const double tx = xy(rng), ty = xy(rng), tz = z(rng);
    d.poses.push_back({r, {tx, ty, tz}});
  }
  d.features = compute_features(FeatureMap(g, scene.landmarks), d.poses, exec);
  return d;
}

// ---- targets ----------------------------------------------------------------

Target make_target(Mode mode, const SymmetryGroup& g, const Rotation& r) {
  switch (mode) {
    case Mode::raw:
      return {r, 0};
    case Mode::map_only:
      return {map(g, r).canonical, 0};
    case Mode::map_prime: {
      const CanonicalPose p = map_prime(g, r);
      return {p.canonical, p.delta ? p.delta->flat() : 0};
    }
  }
  throw InvalidArgument("unknown mode");
}

int region_count(Mode mode, const SymmetryGroup& g) {
  if (mode != Mode::map_prime) return 1;
  switch (g.kind()) {
    case SymmetryKind::revolution:
      return 1;
    case SymmetryKind::cyclic:
      if (g.spec().order() >= 2) return 2;
      break;
    case SymmetryKind::multi_axis:
      if (g.spec().factors().size() == 2) return 4;
      break;
    default:
      break;
  }
  throw UnsupportedKind("map_prime training is not defined for this " + to_string(g.kind()) + " group");
}

namespace {

Eigen::Matrix<double, 16, 1> flatten(const Corners2D& c) {
  Eigen::Matrix<double, 16, 1> v;
  for (int i = 0; i < 8; ++i) {
    v(2 * i) = c(i, 0);
    v(2 * i + 1) = c(i, 1);
  }
  return v;
}

Corners2D unflatten(const Eigen::VectorXd& v) {
  Corners2D c;
  for (int i = 0; i < 8; ++i) {
    c(i, 0) = v(2 * i);
    c(i, 1) = v(2 * i + 1);
  }
  return c;
}

struct Targets {
  Eigen::MatrixXd corners;  // 16 x n, pixels
  std::vector<int> region;
};

Targets build_targets(Mode mode, const SymmetryGroup& g, const Scene& scene, const Dataset& d) {
  Targets t;
  const long n = static_cast<long>(d.size());
  t.corners.resize(16, n);
  t.region.resize(n);
  for (long i = 0; i < n; ++i) {
    const Target tg = make_target(mode, g, d.poses[i].r);
    t.corners.col(i) = flatten(project_corners(scene.camera, scene.box, {tg.rotation, d.poses[i].t}));
    t.region[i] = tg.region;
  }
  return t;
}

Eigen::MatrixXd normalize_features(const TrainedModel& m, const Eigen::MatrixXd& f) {
  return ((f.colwise() - m.feature_mean).array().colwise() / m.feature_scale.array()).matrix();
}

class NetTrainer {
 public:
  NetTrainer(Mlp net, Eigen::MatrixXd x, Eigen::MatrixXd y, Rng rng)
      : net_(std::move(net)), adam_(net_.params().size()), x_(std::move(x)), y_(std::move(y)),
        rng_(std::move(rng)), order_(x_.cols()) {
    std::iota(order_.begin(), order_.end(), Eigen::Index{0});
  }

  /// Sum over batches of (batch loss * batch size) and the sample count.
  std::pair<double, Eigen::Index> epoch(double lr, int batch, Loss loss) {
    const Eigen::Index n = x_.cols();
    if (n == 0) return {0.0, 0};
    std::shuffle(order_.begin(), order_.end(), rng_);
    double total = 0.0;
    Eigen::VectorXd grad;
    for (Eigen::Index start = 0; start < n; start += batch) {
      const Eigen::Index b = std::min<Eigen::Index>(batch, n - start);
      Eigen::MatrixXd xb(x_.rows(), b), yb(y_.rows(), b);
      for (Eigen::Index j = 0; j < b; ++j) {
        xb.col(j) = x_.col(order_[start + j]);
        yb.col(j) = y_.col(order_[start + j]);
      }
      total += net_.loss_and_grad(xb, yb, loss, grad) * static_cast<double>(b);
      adam_.step(net_.params(), grad, lr);
    }
    return {total, n};
  }

  const Mlp& net() const { return net_; }

 private:
  Mlp net_;
  Adam adam_;
  Eigen::MatrixXd x_, y_;
  Rng rng_;
  std::vector<Eigen::Index> order_;
};

Eigen::MatrixXd gather(const Eigen::MatrixXd& m, const std::vector<long>& idx) {
  Eigen::MatrixXd out(m.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t j = 0; j < idx.size(); ++j) out.col(j) = m.col(idx[j]);
  return out;
}

// Predicted regions and corner predictions (pixels) for a whole batch.
std::pair<std::vector<int>, Eigen::MatrixXd> predict(const TrainedModel& m, const Eigen::MatrixXd& features) {
  const Eigen::MatrixXd x = normalize_features(m, features);
  std::vector<int> region(x.cols(), 0);
  if (m.classifier) {
    const Eigen::MatrixXd p = m.classifier->forward(x);
    for (Eigen::Index i = 0; i < p.cols(); ++i) p.col(i).maxCoeff(&region[i]);
  }
  Eigen::MatrixXd out(16, x.cols());
  std::vector<Eigen::MatrixXd> per(m.regressors.size());
  for (std::size_t k = 0; k < m.regressors.size(); ++k) per[k] = m.regressors[k].forward(x);
  for (Eigen::Index i = 0; i < x.cols(); ++i) out.col(i) = per[region[i]].col(i);
  out = (out * m.target_scale).colwise() + m.target_mean;
  return {region, out};
}

double rms(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  return std::sqrt((a - b).squaredNorm() / static_cast<double>(a.size()));
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty set");
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  double m = v[mid];
  if (v.size() % 2 == 0) m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + mid));
  return m;
}

// ---- inference --------------------------------------------------------------

Inference infer(const TrainedModel& model, const Scene& scene, const Eigen::VectorXd& features,
                std::optional<int> force_region) {
  if (features.size() != model.feature_mean.size()) throw InvalidArgument("feature width does not match the model");
  const Eigen::MatrixXd x = normalize_features(model, features);
  int region = 0;
  if (force_region) {
    if (*force_region < 0 || *force_region >= static_cast<int>(model.regressors.size())) {
      throw InvalidArgument("forced region index out of range");
    }
    region = *force_region;
  } else if (model.classifier) {
    model.classifier->forward(x).col(0).maxCoeff(&region);
  }
  const Eigen::VectorXd y = model.regressors[region].forward(x).col(0) * model.target_scale + model.target_mean;
  Inference out;
  out.corners = unflatten(y);
  out.region = region;
  out.pose = pnp_solve(scene.camera, scene.box, out.corners);
  return out;
}

std::vector<SampleEval> evaluate(const TrainedModel& model, const Scene& scene, const Dataset& data, Exec exec) {
  const SymmetryGroup g = realize(model.symmetry);
  const Targets tgt = build_targets(model.mode, g, scene, data);
  const auto [region, pred] = predict(model, data.features);
  const long n = static_cast<long>(data.size());
  std::vector<SampleEval> out(n);
  auto one = [&](long i) {
    SampleEval& e = out[i];
    e.predicted_region = region[i];
    e.true_region = tgt.region[i];
    e.rms_px = rms(pred.col(i), tgt.corners.col(i));
    try {
      const RigidMotion est = pnp_solve(scene.camera, scene.box, unflatten(pred.col(i)));
      e.rot_err = quotient_rotation_dist(g, est.r, data.poses[i].r);
    } catch (const Error&) {
      e.pnp_ok = false;
      e.rot_err = kPi;
    }
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (long i = 0; i < n; ++i) one(i);
  } else {
    for (long i = 0; i < n; ++i) one(i);
  }
  return out;
}

// ---- training ---------------------------------------------------------------

TrainResult train(Mode mode, const Scene& scene, const Dataset& train_set, const Dataset& val_set,
                  const HarnessParams& params, std::uint64_t seed) {
  params.validate();
  scene.validate();
  if (train_set.size() == 0 || val_set.size() == 0) throw InvalidArgument("datasets must be nonempty");
  const SymmetryGroup g = realize(scene.symmetry);
  const int regions = region_count(mode, g);

  TrainResult res;
  TrainedModel& m = res.model;
  m.mode = mode;
  m.symmetry = scene.symmetry;
  const Eigen::MatrixXd& f = train_set.features;
  m.feature_mean = f.rowwise().mean();
  m.feature_scale = ((f.colwise() - m.feature_mean).array().square().rowwise().mean()).sqrt();
  for (Eigen::Index i = 0; i < m.feature_scale.size(); ++i) {
    if (!(m.feature_scale[i] > 1e-12)) m.feature_scale[i] = 1.0;
  }

  const Targets tr = build_targets(mode, g, scene, train_set);
  m.target_mean = tr.corners.rowwise().mean();
  const Eigen::VectorXd tstd =
      ((tr.corners.colwise() - m.target_mean).array().square().rowwise().mean()).sqrt();
  m.target_scale = tstd.mean() > 1e-12 ? tstd.mean() : 1.0;

  const Eigen::MatrixXd x = normalize_features(m, f);
  const Eigen::MatrixXd y = (tr.corners.colwise() - m.target_mean) / m.target_scale;
  const int dim = static_cast<int>(x.rows());

  std::vector<std::vector<long>> members(regions);
  for (long i = 0; i < static_cast<long>(train_set.size()); ++i) members[tr.region[i]].push_back(i);

  std::vector<NetTrainer> trainers;
  for (int k = 0; k < regions; ++k) {
    Eigen::MatrixXd xk = gather(x, members[k]);
    Eigen::MatrixXd yk = gather(y, members[k]);
    if (mode == Mode::map_prime && g.kind() == SymmetryKind::cyclic && params.region_margin > 0) {
      // Neighbouring-region samples near the boundary, targets in chart k.
      const Rotation anchor = axis_angle(g.spec().axis(), k == 0 ? 0.0 : kPi / g.spec().order());
      std::vector<long> extra;
      std::vector<Eigen::Matrix<double, 16, 1>> extra_y;
      for (long i = 0; i < static_cast<long>(train_set.size()); ++i) {
        const Rotation& r = train_set.poses[i].r;
        if (tr.region[i] == k || distance_to_region_boundary(g, r) >= params.region_margin) continue;
        const Rotation& s = g.elements()[nearest_element(g, r, anchor)];
        extra.push_back(i);
        extra_y.push_back(flatten(project_corners(scene.camera, scene.box, {compose(s.inverse(), r), train_set.poses[i].t})));
      }
      const Eigen::Index base = xk.cols();
      xk.conservativeResize(Eigen::NoChange, base + static_cast<Eigen::Index>(extra.size()));
      yk.conservativeResize(Eigen::NoChange, base + static_cast<Eigen::Index>(extra.size()));
      for (std::size_t j = 0; j < extra.size(); ++j) {
        xk.col(base + j) = x.col(extra[j]);
        yk.col(base + j) = (extra_y[j] - m.target_mean) / m.target_scale;
      }
    }
    Rng init = stream_rng(seed, 10 + k);
    Mlp net(dim, params.hidden, 16, Head::linear, init);
    trainers.emplace_back(std::move(net), std::move(xk), std::move(yk), stream_rng(seed, 20 + k));
  }

  std::optional<NetTrainer> clf;
  if (regions > 1) {
    Eigen::MatrixXd onehot = Eigen::MatrixXd::Zero(regions, x.cols());
    for (long i = 0; i < x.cols(); ++i) onehot(tr.region[i], i) = 1.0;
    Rng init = stream_rng(seed, 30);
    clf.emplace(Mlp(dim, params.hidden, regions, Head::softmax, init), x, std::move(onehot), stream_rng(seed, 31));
  }

  const Targets val_t = build_targets(mode, g, scene, val_set);
  res.report.mode = mode;
  res.report.seed = seed;
  res.report.centroid_rms_px = rms(val_t.corners.colwise() - m.target_mean, Eigen::MatrixXd::Zero(16, val_t.corners.cols()));

  for (int e = 0; e < params.epochs; ++e) {
    const double lr = params.learning_rate * 0.5 * (1.0 + std::cos(kPi * e / params.epochs));
    double total = 0.0;
    Eigen::Index count = 0;
    for (auto& t : trainers) {
      const auto [s, c] = t.epoch(lr, params.batch_size, params.loss);
      total += s;
      count += c;
    }
    if (clf) {
      const double cl = clf->epoch(lr, params.batch_size, params.loss).first;
      if (!std::isfinite(cl)) throw TrainingDiverged("classifier loss is not finite", e + 1);
    }
    const double loss = total / static_cast<double>(std::max<Eigen::Index>(count, 1));
    if (!std::isfinite(loss)) throw TrainingDiverged("regressor loss is not finite", e + 1);

    m.regressors.clear();
    for (const auto& t : trainers) m.regressors.push_back(t.net());
    if (clf) m.classifier = clf->net();

    EpochRecord rec;
    rec.epoch = e + 1;
    rec.loss = loss;
    const auto [region, pred] = predict(m, val_set.features);
    rec.val_rms_px = rms(pred, val_t.corners);
    if (clf) {
      long hit = 0;
      for (std::size_t i = 0; i < region.size(); ++i) hit += region[i] == val_t.region[i];
      rec.clf_acc = static_cast<double>(hit) / static_cast<double>(region.size());
    }
    const bool last = e + 1 == params.epochs;
    if (last || (e + 1) % params.rot_eval_every == 0) {
      const auto ev = evaluate(m, scene, val_set);
      std::vector<double> errs;
      errs.reserve(ev.size());
      for (const auto& s : ev) errs.push_back(s.rot_err);
      rec.val_rot_err_rad = median(std::move(errs));
    }
    res.report.epochs.push_back(rec);
  }
  const EpochRecord& fin = res.report.epochs.back();
  res.report.final_val_rot_err_median = *fin.val_rot_err_rad;
  res.report.final_val_rms_px = fin.val_rms_px;
  res.report.final_clf_acc = fin.clf_acc;
  return res;
}

TrainResult run_harness(Mode mode, const Scene& scene, const HarnessParams& params, std::uint64_t seed) {
  params.validate();
  const Dataset tr = make_dataset(scene, params.train_samples, seed, 1);
  const Dataset va = make_dataset(scene, params.val_samples, seed, 2);
  return train(mode, scene, tr, va, params, seed);
}

std::vector<TrainResult> run_many(const std::vector<RunSpec>& runs, const Scene& scene,
                                  const HarnessParams& params, Exec exec) {
  std::vector<std::optional<TrainResult>> out(runs.size());
  const long n = static_cast<long>(runs.size());
  if (exec == Exec::parallel) {
    // Exceptions cannot cross the parallel region; keep the first by index.
    std::vector<std::exception_ptr> errors(runs.size());
#pragma omp parallel for schedule(dynamic, 1)
    for (long i = 0; i < n; ++i) {
      try {
        out[i] = run_harness(runs[i].mode, scene, params, runs[i].seed);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  } else {
    for (long i = 0; i < n; ++i) out[i] = run_harness(runs[i].mode, scene, params, runs[i].seed);
  }
  std::vector<TrainResult> res;
  res.reserve(out.size());
  for (auto& r : out) res.push_back(std::move(*r));
  return res;
}

}  // namespace symcanon
