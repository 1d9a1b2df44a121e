#include "romforge/mesh.hpp"

#include <limits>
#include <stdexcept>

#include "romforge/errors.hpp"
#include "romforge/hash.hpp"

namespace romforge {

std::string to_hex(std::uint64_t v) {
  static constexpr char digits[] = "0123456789abcdef";
  std::string out(16, '0');
  for (int i = 15; i >= 0; --i) {
    out[static_cast<std::size_t>(i)] = digits[v & 0xF];
    v >>= 4;
  }
  return out;
}

std::string Fnv1a::hex() const { return to_hex(state_); }

std::string to_string(PatchKind kind) {
  switch (kind) {
    case PatchKind::DirichletVelocity: return "dirichlet";
    case PatchKind::Wall: return "wall";
    case PatchKind::Outlet: return "outlet";
  }
  return "?";
}

PatchKind patch_kind_from_string(const std::string& s) {
  if (s == "dirichlet") return PatchKind::DirichletVelocity;
  if (s == "wall") return PatchKind::Wall;
  if (s == "outlet") return PatchKind::Outlet;
  throw ConfigError("unknown patch kind '" + s + "'");
}

double BoundaryPatch::total_area() const {
  double a = 0.0;
  for (double f : face_areas) a += f;
  return a;
}

namespace {

constexpr std::array<Side, 4> kSides{Side::West, Side::East, Side::South, Side::North};

std::array<int, 2> offset(Side s) {
  switch (s) {
    case Side::West: return {-1, 0};
    case Side::East: return {1, 0};
    case Side::South: return {0, -1};
    case Side::North: return {0, 1};
  }
  return {0, 0};
}

}  // namespace

StructuredMesh2D::StructuredMesh2D(int nx, int ny, double dx, double dy, std::vector<std::uint8_t> active_mask,
                                   std::vector<PatchSpec> patch_specs, const PatchClassifier& classify)
    : nx_(nx), ny_(ny), dx_(dx), dy_(dy), mask_(std::move(active_mask)) {
  if (nx <= 0 || ny <= 0) throw std::invalid_argument("mesh dimensions must be positive");
  if (!(dx > 0.0) || !(dy > 0.0)) throw std::invalid_argument("cell sizes must be positive");
  if (mask_.size() != static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny))
    throw std::invalid_argument("active mask size does not match nx*ny");

  lattice_to_cell_.assign(mask_.size(), -1);
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const auto l = static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i);
      if (mask_[l] == 0) continue;
      lattice_to_cell_[l] = static_cast<int>(cell_ij_.size());
      cell_ij_.push_back({i, j});
    }
  }
  if (cell_ij_.empty()) throw std::invalid_argument("mesh has no active cells");
  volumes_.assign(cell_ij_.size(), dx_ * dy_);

  for (auto& spec : patch_specs) {
    BoundaryPatch p;
    p.name = spec.name;
    p.kind = spec.kind;
    patches_.push_back(std::move(p));
  }

  cell_faces_.resize(cell_ij_.size() * 4);
  for (int c = 0; c < num_cells(); ++c) {
    const auto [i, j] = cell_ij_[static_cast<std::size_t>(c)];
    for (Side s : kSides) {
      FaceRef& ref = cell_faces_[static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(s)];
      const int n = neighbour(c, s);
      if (n >= 0) {
        // Each internal face is created once, by the cell on its west/south side.
        if (s == Side::East || s == Side::North) {
          InternalFace f;
          f.owner = c;
          f.neighbour = n;
          f.normal = side_normal(s);
          f.area = side_area(s);
          f.distance = (s == Side::East) ? dx_ : dy_;
          ref = {FaceRef::Kind::Internal, static_cast<int>(internal_faces_.size()), -1};
          internal_faces_.push_back(f);
          const Side opp = (s == Side::East) ? Side::West : Side::South;
          cell_faces_[static_cast<std::size_t>(n) * 4 + static_cast<std::size_t>(opp)] = ref;
        }
        continue;
      }
      const int pi = classify(i, j, s);
      if (pi < 0 || pi >= static_cast<int>(patches_.size()))
        throw std::invalid_argument("boundary side of cell (" + std::to_string(i) + "," + std::to_string(j) +
                                    ") not assigned to a patch");
      BoundaryPatch& p = patches_[static_cast<std::size_t>(pi)];
      ref = {FaceRef::Kind::Boundary, pi, static_cast<int>(p.faces.size())};
      p.faces.push_back({c, s});
      p.normals.push_back(side_normal(s));
      p.face_areas.push_back(side_area(s));
    }
  }
  for (const auto& p : patches_)
    if (p.faces.empty()) throw std::invalid_argument("patch '" + p.name + "' has no faces");

  Fnv1a h;
  h.update_value(nx_);
  h.update_value(ny_);
  h.update_value(dx_);
  h.update_value(dy_);
  h.update(std::as_bytes(std::span(mask_)));
  for (const auto& p : patches_) {
    h.update(p.name);
    h.update_value(static_cast<int>(p.kind));
    for (const auto& f : p.faces) {
      h.update_value(f.cell);
      h.update_value(static_cast<int>(f.side));
    }
  }
  fingerprint_ = h.digest();
}

Vec2 StructuredMesh2D::cell_center(int c) const {
  const auto [i, j] = cell_ij_[static_cast<std::size_t>(c)];
  return {(i + 0.5) * dx_, (j + 0.5) * dy_};
}

int StructuredMesh2D::cell_at(int i, int j) const {
  if (i < 0 || j < 0 || i >= nx_ || j >= ny_) return -1;
  return lattice_to_cell_[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx_) + static_cast<std::size_t>(i)];
}

int StructuredMesh2D::neighbour(int c, Side side) const {
  const auto [i, j] = cell_ij_[static_cast<std::size_t>(c)];
  const auto [di, dj] = offset(side);
  return cell_at(i + di, j + dj);
}

const BoundaryPatch& StructuredMesh2D::patch(const std::string& name) const {
  if (auto idx = find_patch(name)) return patches_[static_cast<std::size_t>(*idx)];
  throw std::invalid_argument("mesh has no patch named '" + name + "'");
}

std::optional<int> StructuredMesh2D::find_patch(const std::string& name) const {
  for (std::size_t p = 0; p < patches_.size(); ++p)
    if (patches_[p].name == name) return static_cast<int>(p);
  return std::nullopt;
}

int StructuredMesh2D::num_boundary_faces() const {
  int n = 0;
  for (const auto& p : patches_) n += static_cast<int>(p.size());
  return n;
}

int StructuredMesh2D::nearest_cell(Vec2 point) const {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int c = 0; c < num_cells(); ++c) {
    const double d = (cell_center(c) - point).norm();
    if (d < best_d) {
      best_d = d;
      best = c;
    }
  }
  return best;
}

StructuredMesh2D build_cavity_mesh(int n, double length) {
  if (n < 4) throw std::invalid_argument("cavity mesh needs at least 4 cells per side");
  if (!(length > 0.0)) throw std::invalid_argument("cavity side length must be positive");
  const double h = length / n;
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(n) * static_cast<std::size_t>(n), 1);
  return StructuredMesh2D(n, n, h, h, std::move(mask),
                          {{"lid", PatchKind::DirichletVelocity}, {"walls", PatchKind::Wall}},
                          [](int, int, Side s) { return s == Side::North ? 0 : 1; });
}

StructuredMesh2D build_tjunction_mesh(int nw, int nl, double inlet_width) {
  if (nw < 4) throw std::invalid_argument("junction channel width must be at least 4 cells");
  if (nl < nw) throw std::invalid_argument("junction arm length must be at least the channel width (arms overlap)");
  if (!(inlet_width > 0.0)) throw std::invalid_argument("inlet width must be positive");
  const int nx = 2 * nl + 2 * nw;
  const int ny = nl + nw;
  const int stem_lo = nl;
  const int stem_hi = nl + 2 * nw;  // exclusive
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 0);
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      const bool bar = j >= nl;
      const bool stem = i >= stem_lo && i < stem_hi;
      if (bar || stem) mask[static_cast<std::size_t>(j) * static_cast<std::size_t>(nx) + static_cast<std::size_t>(i)] = 1;
    }
  const double h = inlet_width / nw;
  return StructuredMesh2D(nx, ny, h, h, std::move(mask),
                          {{"inlet1", PatchKind::DirichletVelocity},
                           {"inlet2", PatchKind::DirichletVelocity},
                           {"outlet", PatchKind::Outlet},
                           {"walls", PatchKind::Wall}},
                          [nx](int i, int j, Side s) {
                            if (s == Side::West && i == 0) return 0;
                            if (s == Side::East && i == nx - 1) return 1;
                            if (s == Side::South && j == 0) return 2;
                            return 3;
                          });
}

StructuredMesh2D build_channel_mesh(int nx, int ny, double length, double height) {
  if (nx < 2 || ny < 1) throw std::invalid_argument("channel mesh too small");
  std::vector<std::uint8_t> mask(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny), 1);
  return StructuredMesh2D(nx, ny, length / nx, height / ny, std::move(mask),
                          {{"inlet", PatchKind::DirichletVelocity},
                           {"outlet", PatchKind::Outlet},
                           {"walls", PatchKind::Wall}},
                          [](int, int, Side s) {
                            if (s == Side::West) return 0;
                            if (s == Side::East) return 1;
                            return 2;
                          });
}

}  // namespace romforge
