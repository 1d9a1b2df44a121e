#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace romforge {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
  constexpr bool operator==(const Vec2&) const = default;
  double dot(Vec2 o) const { return x * o.x + y * o.y; }
  double norm() const { return std::hypot(x, y); }
  double operator[](int c) const { return c == 0 ? x : y; }
};

enum class Side : std::uint8_t { West = 0, East = 1, South = 2, North = 3 };

/// Outward unit normal of a cell side on the axis-aligned grid.
constexpr Vec2 side_normal(Side s) {
  switch (s) {
    case Side::West: return {-1.0, 0.0};
    case Side::East: return {1.0, 0.0};
    case Side::South: return {0.0, -1.0};
    case Side::North: return {0.0, 1.0};
  }
  return {};
}

enum class PatchKind : std::uint8_t { DirichletVelocity, Wall, Outlet };

std::string to_string(PatchKind kind);
PatchKind patch_kind_from_string(const std::string& s);

struct BoundaryFace {
  int cell = -1;  // active cell index
  Side side = Side::West;
};

struct BoundaryPatch {
  std::string name;
  PatchKind kind = PatchKind::Wall;
  std::vector<BoundaryFace> faces;
  std::vector<Vec2> normals;
  std::vector<double> face_areas;

  std::size_t size() const { return faces.size(); }
  double total_area() const;
};

/// Face shared by two active cells; the normal points from owner to neighbour.
struct InternalFace {
  int owner = -1;
  int neighbour = -1;
  Vec2 normal;
  double area = 0.0;
  double distance = 0.0;  // centre-to-centre
};

/// Where a cell side lives: either an internal face or a patch face.
struct FaceRef {
  enum class Kind : std::uint8_t { Internal, Boundary } kind = Kind::Internal;
  int index = -1;  // internal face index, or patch index for boundary faces
  int local = -1;  // face index inside the patch (boundary only)
};

/// Cell-centred finite-volume grid on an nx*ny lattice with a blocking mask.
///
/// Only active cells carry unknowns; they are numbered row-major (j outer,
/// i inner) over the active lattice positions. Every side of an active cell is
/// either shared with an active neighbour or belongs to exactly one patch.
/// Depth in the third direction is one, so cell volumes are areas.
class StructuredMesh2D {
 public:
  /// Classifies a boundary side of lattice cell (i, j); returns the patch
  /// index into `patch_specs`.
  using PatchClassifier = std::function<int(int i, int j, Side side)>;

  struct PatchSpec {
    std::string name;
    PatchKind kind;
  };

  StructuredMesh2D(int nx, int ny, double dx, double dy, std::vector<std::uint8_t> active_mask,
                   std::vector<PatchSpec> patch_specs, const PatchClassifier& classify);

  int nx() const { return nx_; }
  int ny() const { return ny_; }
  double dx() const { return dx_; }
  double dy() const { return dy_; }
  int num_cells() const { return static_cast<int>(cell_ij_.size()); }
  const std::vector<std::uint8_t>& active_mask() const { return mask_; }

  double cell_volume(int) const { return dx_ * dy_; }
  const std::vector<double>& cell_volumes() const { return volumes_; }
  Vec2 cell_center(int c) const;
  std::array<int, 2> cell_ij(int c) const { return cell_ij_[static_cast<std::size_t>(c)]; }
  /// Active cell index at lattice (i, j) or -1.
  int cell_at(int i, int j) const;
  /// Active neighbour across `side`, or -1.
  int neighbour(int c, Side side) const;
  FaceRef face_of(int c, Side side) const { return cell_faces_[static_cast<std::size_t>(c) * 4 + static_cast<std::size_t>(side)]; }

  const std::vector<InternalFace>& internal_faces() const { return internal_faces_; }
  const std::vector<BoundaryPatch>& patches() const { return patches_; }
  const BoundaryPatch& patch(const std::string& name) const;
  std::optional<int> find_patch(const std::string& name) const;
  int num_boundary_faces() const;

  double side_area(Side s) const { return (s == Side::West || s == Side::East) ? dy_ : dx_; }
  /// Distance from the cell centre to the face centre on `side`.
  double half_width(Side s) const { return (s == Side::West || s == Side::East) ? 0.5 * dx_ : 0.5 * dy_; }

  /// Stable 64-bit fingerprint of geometry, mask and patch table.
  std::uint64_t fingerprint() const { return fingerprint_; }

  int nearest_cell(Vec2 point) const;

 private:
  int nx_, ny_;
  double dx_, dy_;
  std::vector<std::uint8_t> mask_;
  std::vector<int> lattice_to_cell_;
  std::vector<std::array<int, 2>> cell_ij_;
  std::vector<double> volumes_;
  std::vector<InternalFace> internal_faces_;
  std::vector<BoundaryPatch> patches_;
  std::vector<FaceRef> cell_faces_;
  std::uint64_t fingerprint_ = 0;
};

/// Square lid-driven cavity: patches "lid" (north) and "walls".
StructuredMesh2D build_cavity_mesh(int n, double length);

/// T-shaped junction: a horizontal bar of height `nw` cells fed from its west
/// end ("inlet1") and east end ("inlet2"), joined at its centre to a vertical
/// stem of width 2*nw cells that leaves through "outlet" at the bottom. Each
/// inlet arm is `nl` cells long, the stem `nl` cells tall. `inlet_width` is
/// the physical width of one inlet channel.
StructuredMesh2D build_tjunction_mesh(int nw, int nl, double inlet_width = 0.5);

/// Rectangular channel with "inlet" (west), "outlet" (east) and "walls".
StructuredMesh2D build_channel_mesh(int nx, int ny, double length, double height);

}  // namespace romforge
