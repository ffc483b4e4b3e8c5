#include "symcanon/json_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "symcanon/error.hpp"

namespace symcanon {

Json parse_json(std::string_view text) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), e.byte);
  }
}

double json_number(const Json& j, const char* what) {
  if (!j.is_number()) throw InvalidArgument(std::string(what) + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be finite");
  return v;
}

const Json& json_field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw InvalidArgument(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

Eigen::Vector3d json_vec3(const Json& j, const char* what) {
  if (!j.is_array() || j.size() != 3) throw InvalidArgument(std::string(what) + " must be a 3-element array");
  return {json_number(j[0], what), json_number(j[1], what), json_number(j[2], what)};
}

Json to_json(const Eigen::Vector3d& v) { return Json::array({v.x(), v.y(), v.z()}); }


Json to_json(const Rotation& r) {
  Json a = Json::array();
  for (double v : r.row_major()) a.push_back(v);
  return a;
}

Rotation rotation_from_json(const Json& j) {
  if (j.is_array()) {
    if (j.size() != 9) throw InvalidArgument("rotation array must have 9 row-major entries");
    std::array<double, 9> a{};
    for (std::size_t i = 0; i < 9; ++i) a[i] = json_number(j[i], "rotation entry");
    return Rotation::from_row_major(a);
  }
  if (j.is_object()) {
    return axis_angle(axis_from_json(json_field(j, "axis")), json_number(json_field(j, "angle_rad"), "angle_rad"));
  }
  throw InvalidArgument("rotation must be a 9-element array or {\"axis\",\"angle_rad\"} object");
}

Json to_json(const UnitAxis& a) { return to_json(a.vec()); }

UnitAxis axis_from_json(const Json& j) { return UnitAxis(json_vec3(j, "axis")); }

Json to_json(const SymmetrySpec& s) {
  Json j;
  j["kind"] = to_string(s.kind());
  switch (s.kind()) {
    case SymmetryKind::cyclic:
      j["axis"] = to_json(s.axis());
      j["order"] = s.order();
      break;
    case SymmetryKind::multi_axis: {
      Json f = Json::array();
      for (const auto& [axis, order] : s.factors()) {
        Json e;
        e["axis"] = to_json(axis);
        e["order"] = order;
        f.push_back(e);
      }
      j["factors"] = f;
      break;
    }
    case SymmetryKind::revolution:
      j["axis"] = to_json(s.axis());
      break;
    default:
      break;
  }
  return j;
}

namespace {

int order_from_json(const Json& j) {
  if (!j.is_number_integer()) throw InvalidArgument("symmetry order must be an integer");
  return j.get<int>();
}

}  // namespace

SymmetrySpec symmetry_from_json(const Json& j) {
  const Json& kind = json_field(j, "kind");
  if (!kind.is_string()) throw InvalidArgument("symmetry kind must be a string");
  const auto k = kind.get<std::string>();
  if (k == "none") return SymmetrySpec::none();
  if (k == "sphere") return SymmetrySpec::sphere();
  if (k == "cyclic") {
    return SymmetrySpec::cyclic(axis_from_json(json_field(j, "axis")), order_from_json(json_field(j, "order")));
  }
  if (k == "revolution") return SymmetrySpec::revolution(axis_from_json(json_field(j, "axis")));
  if (k == "multi_axis") {
    const Json& f = json_field(j, "factors");
    if (!f.is_array()) throw InvalidArgument("multi_axis factors must be an array");
    std::vector<AxisOrder> factors;
    for (const auto& e : f) {
      factors.push_back({axis_from_json(json_field(e, "axis")), order_from_json(json_field(e, "order"))});
    }
    return SymmetrySpec::multi_axis(std::move(factors));
  }
  throw InvalidArgument("unknown symmetry kind \"" + k + "\"");
}

Json to_json(const Camera& c) {
  Json j;
  j["fx"] = c.fx;
  j["fy"] = c.fy;
  j["cx"] = c.cx;
  j["cy"] = c.cy;
  return j;
}

Camera camera_from_json(const Json& j) {
  Camera c{json_number(json_field(j, "fx"), "fx"), json_number(json_field(j, "fy"), "fy"),
           json_number(json_field(j, "cx"), "cx"), json_number(json_field(j, "cy"), "cy")};
  c.validate();
  return c;
}

Json to_json(const Box3& b) {
  Json j;
  j["half_extents"] = Json::array({b.hx, b.hy, b.hz});
  return j;
}

Box3 box_from_json(const Json& j) {
  const Eigen::Vector3d h = json_vec3(json_field(j, "half_extents"), "half_extents");
  Box3 b{h.x(), h.y(), h.z()};
  b.validate();
  return b;
}

Json to_json(const Corners2D& c) {
  Json a = Json::array();
  for (int i = 0; i < 8; ++i) a.push_back(Json::array({c(i, 0), c(i, 1)}));
  return a;
}

Corners2D corners_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 8) throw InvalidArgument("corners must be an 8x2 array");
  Corners2D c;
  for (int i = 0; i < 8; ++i) {
    const Json& p = j[static_cast<std::size_t>(i)];
    if (!p.is_array() || p.size() != 2) throw InvalidArgument("each corner must be a [u, v] pair");
    c(i, 0) = json_number(p[0], "corner u");
    c(i, 1) = json_number(p[1], "corner v");
  }
  return c;
}

Json to_json(const RigidMotion& m) {
  Json j;
  j["rotation"] = to_json(m.r);
  j["translation"] = to_json(m.t);
  return j;
}

RigidMotion motion_from_json(const Json& j) {
  RigidMotion m{rotation_from_json(json_field(j, "rotation")), Eigen::Vector3d::Zero()};
  if (j.contains("translation")) m.t = json_vec3(j.at("translation"), "translation");
  return m;
}

Json to_json(const CanonicalPose& p) {
  Json j;
  j["canonical"] = to_json(p.canonical);
  j["s_hat"] = to_json(p.s_hat);
  if (p.delta) {
    Json d = Json::array({p.delta->d1});
    if (p.delta->d2) d.push_back(*p.delta->d2);
    j["delta"] = d;
  } else {
    j["delta"] = nullptr;
  }
  j["degenerate"] = p.degenerate;
  return j;
}

ModelPoints model_points_from_json(const Json& j) {
  if (!j.is_array()) throw InvalidArgument("model points must be an array of [x, y, z]");
  std::vector<Eigen::Vector3d> pts;
  for (const auto& p : j) pts.push_back(json_vec3(p, "model point"));
  return ModelPoints(std::move(pts));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidArgument("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file_atomic(const std::string& path, std::string_view contents) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw InvalidArgument("cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw InvalidArgument("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

}  // namespace symcanon
