#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "romforge/field.hpp"
#include "romforge/mesh.hpp"

namespace romforge {

// Binary containers: a text header terminated by an "end_header" line,
// followed by little-endian payload.
inline constexpr const char* kMeshMagic = "ROMFORGE-MESH v1";
inline constexpr const char* kFieldMagic = "ROMFORGE-FIELD v1";

void write_mesh(const StructuredMesh2D& mesh, const std::filesystem::path& path);
StructuredMesh2D read_mesh(const std::filesystem::path& path);

void write_field(const Field& field, const std::filesystem::path& path);
/// Reads a field and binds it to `mesh`; the stored mesh fingerprint and
/// patch table must match.
Field read_field(const std::filesystem::path& path, MeshPtr mesh);

namespace detail {
void write_f64_le(std::ostream& os, const double* data, std::size_t n);
void read_f64_le(std::istream& is, double* data, std::size_t n);
void write_i32_le(std::ostream& os, std::int32_t v);
std::int32_t read_i32_le(std::istream& is);
/// Reads one '\n'-terminated header line; throws ConfigError at EOF.
std::string read_header_line(std::istream& is);
}  // namespace detail

}  // namespace romforge
