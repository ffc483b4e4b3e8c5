#include "symcanon/harness_io.hpp"

#include <cmath>

#include "symcanon/error.hpp"

namespace symcanon {

namespace {

int json_int(const Json& j, const char* what) {
  if (!j.is_number_integer()) throw InvalidArgument(std::string(what) + " must be an integer");
  return j.get<int>();
}

Json vector_json(const Eigen::VectorXd& v) {
  Json a = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Eigen::VectorXd vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) throw InvalidArgument(std::string(what) + " must be an array");
  Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = json_number(j[i], what);
  return v;
}

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

void RunConfig::validate() const {
  scene.validate();
  harness.validate();
  if (runs < 1) throw InvalidArgument("runs must be >= 1");
  if (modes.empty()) throw InvalidArgument("at least one mode is required");
}

RunConfig run_config_from_json(const Json& j) {
  if (!j.is_object()) throw InvalidArgument("config must be a JSON object");
  if (j.contains("version") && json_int(j.at("version"), "version") != kConfigVersion) {
    throw InvalidArgument("unsupported config version " + j.at("version").dump());
  }
  RunConfig c;
  c.scene.landmarks.clear();
  if (j.contains("symmetry")) c.scene.symmetry = symmetry_from_json(j.at("symmetry"));
  if (j.contains("camera")) c.scene.camera = camera_from_json(j.at("camera"));
  if (j.contains("box")) c.scene.box = box_from_json(j.at("box"));
  if (j.contains("landmarks")) {
    const Json& l = j.at("landmarks");
    if (!l.is_array()) throw InvalidArgument("landmarks must be an array of [x, y, z]");
    for (const auto& p : l) c.scene.landmarks.push_back(json_vec3(p, "landmark"));
  } else {
    c.scene.landmarks = {{0.9, 0.3, 0.35}, {-0.2, 0.55, -0.3}, {0.4, -0.1, 0.1},    {0.1, -0.7, 0.3},
                         {-0.6, -0.2, -0.25}, {0.7, 0.65, -0.1}, {-0.35, 0.15, 0.45}, {0.25, 0.8, 0.05}};
  }
  if (j.contains("translation")) {
    const Json& t = j.at("translation");
    auto& s = c.scene.slab;
    if (t.contains("xy_half_range")) s.xy_half_range = json_number(t.at("xy_half_range"), "xy_half_range");
    if (t.contains("z_min")) s.z_min = json_number(t.at("z_min"), "z_min");
    if (t.contains("z_max")) s.z_max = json_number(t.at("z_max"), "z_max");
  }
  if (j.contains("harness")) {
    const Json& h = j.at("harness");
    auto& p = c.harness;
    if (h.contains("epochs")) p.epochs = json_int(h.at("epochs"), "epochs");
    if (h.contains("batch_size")) p.batch_size = json_int(h.at("batch_size"), "batch_size");
    if (h.contains("learning_rate")) p.learning_rate = json_number(h.at("learning_rate"), "learning_rate");
    if (h.contains("hidden")) {
      const Json& hl = h.at("hidden");
      if (!hl.is_array()) throw InvalidArgument("hidden must be an array of layer widths");
      p.hidden.clear();
      for (const auto& w : hl) p.hidden.push_back(json_int(w, "hidden width"));
    }
    if (h.contains("loss")) {
      if (!h.at("loss").is_string()) throw InvalidArgument("loss must be a string");
      p.loss = loss_from_string(h.at("loss").get<std::string>());
    }
    if (h.contains("train_samples")) p.train_samples = json_int(h.at("train_samples"), "train_samples");
    if (h.contains("val_samples")) p.val_samples = json_int(h.at("val_samples"), "val_samples");
    if (h.contains("rot_eval_every")) p.rot_eval_every = json_int(h.at("rot_eval_every"), "rot_eval_every");
    if (h.contains("region_margin")) p.region_margin = json_number(h.at("region_margin"), "region_margin");
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) throw InvalidArgument("seed must be a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("runs")) c.runs = json_int(j.at("runs"), "runs");
  if (j.contains("modes")) {
    const Json& m = j.at("modes");
    if (!m.is_array()) throw InvalidArgument("modes must be an array");
    c.modes.clear();
    for (const auto& e : m) {
      if (!e.is_string()) throw InvalidArgument("modes must be strings");
      c.modes.push_back(mode_from_string(e.get<std::string>()));
    }
  }
  if (j.contains("model_points")) c.model_points = model_points_from_json(j.at("model_points"));
  c.validate();
  return c;
}

Json to_json(const RunConfig& c) {
  Json j;
  j["version"] = kConfigVersion;
  j["symmetry"] = to_json(c.scene.symmetry);
  j["camera"] = to_json(c.scene.camera);
  j["box"] = to_json(c.scene.box);
  Json l = Json::array();
  for (const auto& p : c.scene.landmarks) l.push_back(to_json(p));
  j["landmarks"] = l;
  j["translation"] = {{"xy_half_range", c.scene.slab.xy_half_range},
                      {"z_min", c.scene.slab.z_min},
                      {"z_max", c.scene.slab.z_max}};
  const auto& p = c.harness;
  j["harness"] = {{"epochs", p.epochs},
                  {"batch_size", p.batch_size},
                  {"learning_rate", p.learning_rate},
                  {"hidden", p.hidden},
                  {"loss", to_string(p.loss)},
                  {"train_samples", p.train_samples},
                  {"val_samples", p.val_samples},
                  {"rot_eval_every", p.rot_eval_every},
                  {"region_margin", p.region_margin}};
  j["seed"] = c.seed;
  j["runs"] = c.runs;
  Json m = Json::array();
  for (Mode mode : c.modes) m.push_back(to_string(mode));
  j["modes"] = m;
  if (c.model_points) {
    Json pts = Json::array();
    for (const auto& q : c.model_points->points()) pts.push_back(to_json(q));
    j["model_points"] = pts;
  }
  return j;
}

std::string report_csv(const HarnessReport& r) {
  std::string out = "epoch,loss,val_rms_px,val_rot_err_rad,clf_acc\n";
  for (const auto& e : r.epochs) {
    out += std::to_string(e.epoch) + ',' + format_double(e.loss) + ',' + format_double(e.val_rms_px) + ',';
    if (e.val_rot_err_rad) out += format_double(*e.val_rot_err_rad);
    out += ',';
    if (e.clf_acc) out += format_double(*e.clf_acc);
    out += '\n';
  }
  return out;
}

Json to_json(const HarnessReport& r) {
  Json j;
  j["mode"] = to_string(r.mode);
  j["seed"] = r.seed;
  Json ep = Json::array();
  for (const auto& e : r.epochs) {
    ep.push_back({{"epoch", e.epoch},
                  {"loss", e.loss},
                  {"val_rms_px", e.val_rms_px},
                  {"val_rot_err_rad", opt(e.val_rot_err_rad)},
                  {"clf_acc", opt(e.clf_acc)}});
  }
  j["epochs"] = ep;
  j["final"] = {{"val_rot_err_median_rad", r.final_val_rot_err_median},
                {"val_rms_px", r.final_val_rms_px},
                {"centroid_rms_px", r.centroid_rms_px},
                {"clf_acc", opt(r.final_clf_acc)}};
  return j;
}

namespace {

Json net_json(const Mlp& n) {
  return {{"sizes", n.sizes()},
          {"head", n.head() == Head::softmax ? "softmax" : "linear"},
          {"params", vector_json(n.params())}};
}

Mlp net_from_json(const Json& j) {
  const Json& s = json_field(j, "sizes");
  if (!s.is_array()) throw InvalidArgument("network sizes must be an array");
  std::vector<int> sizes;
  for (const auto& e : s) sizes.push_back(json_int(e, "layer size"));
  const Json& h = json_field(j, "head");
  if (!h.is_string() || (h != "linear" && h != "softmax")) throw InvalidArgument("head must be linear or softmax");
  return Mlp::from_params(std::move(sizes), h == "softmax" ? Head::softmax : Head::linear,
                          vector_from_json(json_field(j, "params"), "params"));
}

}  // namespace

Json weights_to_json(const TrainedModel& m) {
  Json j;
  j["format"] = "symcanon-weights";
  j["version"] = kWeightsVersion;
  j["mode"] = to_string(m.mode);
  j["symmetry"] = to_json(m.symmetry);
  j["feature_mean"] = vector_json(m.feature_mean);
  j["feature_scale"] = vector_json(m.feature_scale);
  j["target_mean"] = vector_json(m.target_mean);
  j["target_scale"] = m.target_scale;
  Json regs = Json::array();
  for (const auto& r : m.regressors) regs.push_back(net_json(r));
  j["regressors"] = regs;
  j["classifier"] = m.classifier ? net_json(*m.classifier) : Json(nullptr);
  return j;
}

TrainedModel weights_from_json(const Json& j) {
  if (!j.is_object() || j.value("format", "") != "symcanon-weights") {
    throw InvalidArgument("not a symcanon weights file");
  }
  if (json_int(json_field(j, "version"), "version") != kWeightsVersion) {
    throw InvalidArgument("unsupported weights version " + j.at("version").dump());
  }
  TrainedModel m;
  const Json& mode = json_field(j, "mode");
  if (!mode.is_string()) throw InvalidArgument("mode must be a string");
  m.mode = mode_from_string(mode.get<std::string>());
  m.symmetry = symmetry_from_json(json_field(j, "symmetry"));
  m.feature_mean = vector_from_json(json_field(j, "feature_mean"), "feature_mean");
  m.feature_scale = vector_from_json(json_field(j, "feature_scale"), "feature_scale");
  m.target_mean = vector_from_json(json_field(j, "target_mean"), "target_mean");
  m.target_scale = json_number(json_field(j, "target_scale"), "target_scale");
  const Json& regs = json_field(j, "regressors");
  if (!regs.is_array() || regs.empty()) throw InvalidArgument("regressors must be a nonempty array");
  for (const auto& r : regs) m.regressors.push_back(net_from_json(r));
  const Json& c = json_field(j, "classifier");
  if (!c.is_null()) m.classifier = net_from_json(c);

  const auto dim = m.feature_mean.size();
  if (m.feature_scale.size() != dim || m.target_mean.size() != 16) {
    throw InvalidArgument("normalization vectors have inconsistent lengths");
  }
  for (const auto& r : m.regressors) {
    if (r.inputs() != dim || r.outputs() != 16 || r.head() != Head::linear) {
      throw InvalidArgument("regressor shape does not match the feature width and 16 outputs");
    }
  }
  if (m.classifier && (m.classifier->inputs() != dim ||
                       m.classifier->outputs() != static_cast<int>(m.regressors.size()))) {
    throw InvalidArgument("classifier shape does not match the regressors");
  }
  return m;
}

}  // namespace symcanon
