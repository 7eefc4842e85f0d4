#pragma once

#include "hyperslice/complex.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string_view>

namespace hyperslice {

/// Versioned text model format:
///
///     #hyperslice v1
///     name <text>
///     axes x y z w
///     fclose 1e-06
///     color r g b a          (optional)
///     time t_min t_max steps (optional)
///     meta <key> <value>     (any number)
///     v t x y z w v u        (17 significant digits)
///     vec t x y z w v u      (velocity / origin vectors)
///     tet i0 i1 i2 i3 [vel k] [org k]
void write_model(const Complex3& cx, std::ostream& out);

/// Reads a model without re-merging vertices. Throws ParseError (ErrorCode::ParseError
/// or ErrorCode::IndexOutOfRange) carrying the offending line number.
Complex3 read_model(std::istream& in);

void save_model(const Complex3& cx, const std::filesystem::path& path);
Complex3 load_model(const std::filesystem::path& path);

enum class MeshFormat { Obj, Json };

std::optional<MeshFormat> parse_mesh_format(std::string_view name);
// Includes the leading dot.
std::string_view extension(MeshFormat format);

/// Writes only vertices referenced by triangles, renumbered in first-use order.
void export_mesh(const TriMesh& mesh, MeshFormat format, std::ostream& out);

/// Wire shape shared with the viewer: flat positions / triangles / normals / colors arrays.
nlohmann::json mesh_to_json(const TriMesh& mesh);
TriMesh mesh_from_json(const nlohmann::json& j);

} // namespace hyperslice
