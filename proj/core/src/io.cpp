#include "romforge/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <sstream>
#include <tuple>

#include "romforge/errors.hpp"
#include "romforge/hash.hpp"

namespace romforge {

namespace detail {

namespace {
template <typename T>
T byteswap_if_needed(T v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::array<unsigned char, sizeof(T)> b;
    std::memcpy(b.data(), &v, sizeof(T));
    std::reverse(b.begin(), b.end());
    std::memcpy(&v, b.data(), sizeof(T));
    return v;
  }
}
}  // namespace

void write_f64_le(std::ostream& os, const double* data, std::size_t n) {
  if constexpr (std::endian::native == std::endian::little) {
    os.write(reinterpret_cast<const char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  } else {
    for (std::size_t k = 0; k < n; ++k) {
      const double v = byteswap_if_needed(data[k]);
      os.write(reinterpret_cast<const char*>(&v), sizeof(double));
    }
  }
}

void read_f64_le(std::istream& is, double* data, std::size_t n) {
  is.read(reinterpret_cast<char*>(data), static_cast<std::streamsize>(n * sizeof(double)));
  if (!is) throw ConfigError("truncated binary payload");
  if constexpr (std::endian::native != std::endian::little)
    for (std::size_t k = 0; k < n; ++k) data[k] = byteswap_if_needed(data[k]);
}

void write_i32_le(std::ostream& os, std::int32_t v) {
  v = byteswap_if_needed(v);
  os.write(reinterpret_cast<const char*>(&v), sizeof(v));
}

std::int32_t read_i32_le(std::istream& is) {
  std::int32_t v = 0;
  is.read(reinterpret_cast<char*>(&v), sizeof(v));
  if (!is) throw ConfigError("truncated binary payload");
  return byteswap_if_needed(v);
}

std::string read_header_line(std::istream& is) {
  std::string line;
  if (!std::getline(is, line)) throw ConfigError("unexpected end of header");
  return line;
}

}  // namespace detail

using namespace detail;

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw ConfigError("cannot open '" + path.string() + "' for writing");
  os.precision(17);
  return os;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot open '" + path.string() + "'");
  return is;
}

void expect_magic(std::istream& is, const char* magic, const std::filesystem::path& path) {
  if (read_header_line(is) != magic) throw ConfigError("'" + path.string() + "' is not a " + magic + " file");
}

}  // namespace

void write_mesh(const StructuredMesh2D& mesh, const std::filesystem::path& path) {
  auto os = open_out(path);
  os << kMeshMagic << '\n';
  os << "nx " << mesh.nx() << " ny " << mesh.ny() << '\n';
  os << "dx " << mesh.dx() << " dy " << mesh.dy() << '\n';
  os << "patches " << mesh.patches().size() << '\n';
  for (const auto& p : mesh.patches()) os << p.name << ' ' << to_string(p.kind) << ' ' << p.size() << '\n';
  os << "end_header\n";
  const auto& mask = mesh.active_mask();
  os.write(reinterpret_cast<const char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  for (const auto& p : mesh.patches()) {
    for (const auto& f : p.faces) {
      const auto [i, j] = mesh.cell_ij(f.cell);
      write_i32_le(os, i);
      write_i32_le(os, j);
      write_i32_le(os, static_cast<std::int32_t>(f.side));
    }
  }
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

StructuredMesh2D read_mesh(const std::filesystem::path& path) {
  auto is = open_in(path);
  expect_magic(is, kMeshMagic, path);
  int nx = 0, ny = 0;
  double dx = 0.0, dy = 0.0;
  std::size_t npatch = 0;
  std::string key1, key2;
  {
    std::istringstream ls(read_header_line(is));
    ls >> key1 >> nx >> key2 >> ny;
    if (key1 != "nx" || key2 != "ny" || !ls) throw ConfigError("bad mesh header (nx/ny)");
  }
  {
    std::istringstream ls(read_header_line(is));
    ls >> key1 >> dx >> key2 >> dy;
    if (key1 != "dx" || key2 != "dy" || !ls) throw ConfigError("bad mesh header (dx/dy)");
  }
  {
    std::istringstream ls(read_header_line(is));
    ls >> key1 >> npatch;
    if (key1 != "patches" || !ls) throw ConfigError("bad mesh header (patches)");
  }
  std::vector<StructuredMesh2D::PatchSpec> specs;
  std::vector<std::size_t> counts;
  for (std::size_t p = 0; p < npatch; ++p) {
    std::istringstream ls(read_header_line(is));
    std::string name, kind;
    std::size_t n = 0;
    ls >> name >> kind >> n;
    if (!ls) throw ConfigError("bad patch table entry");
    specs.push_back({name, patch_kind_from_string(kind)});
    counts.push_back(n);
  }
  if (read_header_line(is) != "end_header") throw ConfigError("mesh header not terminated");
  if (nx <= 0 || ny <= 0) throw ConfigError("bad mesh dimensions");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  is.read(reinterpret_cast<char*>(mask.data()), static_cast<std::streamsize>(mask.size()));
  if (!is) throw ConfigError("truncated mesh mask");
  std::map<std::tuple<int, int, int>, int> owner;
  for (std::size_t p = 0; p < npatch; ++p)
    for (std::size_t f = 0; f < counts[p]; ++f) {
      const int i = read_i32_le(is);
      const int j = read_i32_le(is);
      const int s = read_i32_le(is);
      owner[{i, j, s}] = static_cast<int>(p);
    }
  return StructuredMesh2D(nx, ny, dx, dy, std::move(mask), std::move(specs), [&](int i, int j, Side s) {
    auto it = owner.find({i, j, static_cast<int>(s)});
    return it == owner.end() ? -1 : it->second;
  });
}

void write_field(const Field& field, const std::filesystem::path& path) {
  auto os = open_out(path);
  const auto& mesh = field.mesh();
  os << kFieldMagic << '\n';
  os << "components " << field.components() << '\n';
  os << "cells " << mesh.num_cells() << '\n';
  if (field.time_stamp)
    os << "time " << *field.time_stamp << '\n';
  else
    os << "time none\n";
  os << "mesh " << to_hex(mesh.fingerprint()) << '\n';
  os << "patches " << mesh.patches().size() << '\n';
  for (const auto& p : mesh.patches()) os << p.name << ' ' << p.size() << '\n';
  os << "end_header\n";
  const auto data = field.data();
  write_f64_le(os, data.data(), data.size());
  if (!os) throw ConfigError("failed writing '" + path.string() + "'");
}

Field read_field(const std::filesystem::path& path, MeshPtr mesh) {
  auto is = open_in(path);
  expect_magic(is, kFieldMagic, path);
  auto value_of = [&](const char* key) {
    std::istringstream ls(read_header_line(is));
    std::string k, v;
    ls >> k >> v;
    if (k != key) throw ConfigError(std::string("field header: expected '") + key + "'");
    return v;
  };
  const int components = std::stoi(value_of("components"));
  const int cells = std::stoi(value_of("cells"));
  const std::string time = value_of("time");
  const std::string fp = value_of("mesh");
  const std::size_t npatch = std::stoul(value_of("patches"));
  if (cells != mesh->num_cells() || fp != to_hex(mesh->fingerprint()) || npatch != mesh->patches().size())
    throw ConfigError("field '" + path.string() + "' was written for a different mesh");
  for (std::size_t p = 0; p < npatch; ++p) {
    std::istringstream ls(read_header_line(is));
    std::string name;
    std::size_t n = 0;
    ls >> name >> n;
    if (name != mesh->patches()[p].name || n != mesh->patches()[p].size())
      throw ConfigError("field patch table does not match mesh");
  }
  if (read_header_line(is) != "end_header") throw ConfigError("field header not terminated");
  Field f(std::move(mesh), components);
  auto data = f.data();
  read_f64_le(is, data.data(), data.size());
  if (time != "none") f.time_stamp = std::stod(time);
  return f;
}

}  // namespace romforge
