#pragma once

// JSON wire formats for rotations, symmetry specs, cameras, corner sets,
// poses and canonicalization records. Output objects keep insertion order and
// doubles are printed in shortest round-trip form, so reruns are
// byte-identical.

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "symcanon/canonicalize.hpp"
#include "symcanon/metrics.hpp"
#include "symcanon/projection.hpp"

namespace symcanon {

using Json = nlohmann::ordered_json;

/// Throws ParseError carrying the byte offset of the failure.
Json parse_json(std::string_view text);

// Field access helpers; each throws InvalidArgument naming the field.
const Json& json_field(const Json& j, const char* key);
double json_number(const Json& j, const char* what);
Eigen::Vector3d json_vec3(const Json& j, const char* what);
Json to_json(const Eigen::Vector3d& v);

Json to_json(const Rotation& r);
/// Accepts a row-major 9-element array or {"axis":[x,y,z],"angle_rad":a}.
Rotation rotation_from_json(const Json& j);

Json to_json(const UnitAxis& a);
UnitAxis axis_from_json(const Json& j);

Json to_json(const SymmetrySpec& s);
SymmetrySpec symmetry_from_json(const Json& j);

Json to_json(const Camera& c);
Camera camera_from_json(const Json& j);

/// {"half_extents":[hx,hy,hz]}
Json to_json(const Box3& b);
Box3 box_from_json(const Json& j);

/// 8x2 array in Box3 corner order.
Json to_json(const Corners2D& c);
Corners2D corners_from_json(const Json& j);

/// {"rotation":..., "translation":[x,y,z]}
Json to_json(const RigidMotion& m);
RigidMotion motion_from_json(const Json& j);

/// {"canonical":[9], "s_hat":[9], "delta":[d1(,d2)] | null, "degenerate":bool}
Json to_json(const CanonicalPose& p);

/// Array of 3-element arrays.
ModelPoints model_points_from_json(const Json& j);

/// Reads a whole file; throws InvalidArgument if it cannot be opened.
std::string read_file(const std::string& path);

/// Writes via a temporary sibling file and rename, so readers never observe a
/// partially written file.
void write_file_atomic(const std::string& path, std::string_view contents);

/// Shortest round-trip decimal form of a double.
std::string format_double(double v);

}  // namespace symcanon
