#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "romforge/mesh.hpp"

namespace romforge {

using MeshPtr = std::shared_ptr<const StructuredMesh2D>;

/// Cell-centred field with one (scalar) or two (vector) components per cell
/// plus values on every boundary face.
///
/// Storage is one contiguous array: all cell values (components interleaved)
/// followed by each patch's face values in patch order. Linear combinations
/// therefore act on interior and boundary data alike.
class Field {
 public:
  Field() = default;
  Field(MeshPtr mesh, int components);

  static Field scalar(MeshPtr mesh) { return Field(std::move(mesh), 1); }
  static Field vector(MeshPtr mesh) { return Field(std::move(mesh), 2); }

  const StructuredMesh2D& mesh() const { return *mesh_; }
  const MeshPtr& mesh_ptr() const { return mesh_; }
  int components() const { return components_; }
  bool empty() const { return !mesh_; }

  double& cell(int c, int comp = 0) { return values_[cell_offset(c, comp)]; }
  double cell(int c, int comp = 0) const { return values_[cell_offset(c, comp)]; }
  Vec2 cell_vec(int c) const { return {values_[cell_offset(c, 0)], values_[cell_offset(c, 1)]}; }
  void set_cell_vec(int c, Vec2 v);

  double& boundary(int patch, int face, int comp = 0) { return values_[boundary_offset(patch, face, comp)]; }
  double boundary(int patch, int face, int comp = 0) const { return values_[boundary_offset(patch, face, comp)]; }
  Vec2 boundary_vec(int patch, int face) const;
  void set_boundary_vec(int patch, int face, Vec2 v);

  std::span<double> cell_values() { return {values_.data(), num_cell_values()}; }
  std::span<const double> cell_values() const { return {values_.data(), num_cell_values()}; }
  std::span<double> patch_values(int patch);
  std::span<const double> patch_values(int patch) const;

  std::span<double> data() { return values_; }
  std::span<const double> data() const { return values_; }

  std::optional<double> time_stamp;

  /// this += alpha * other
  Field& axpy(double alpha, const Field& other);
  Field& operator*=(double s);
  Field& operator+=(const Field& o) { return axpy(1.0, o); }
  Field& operator-=(const Field& o) { return axpy(-1.0, o); }
  friend Field operator+(Field a, const Field& b) { return a += b; }
  friend Field operator-(Field a, const Field& b) { return a -= b; }
  friend Field operator*(double s, Field a) { return a *= s; }

  void set_zero();
  bool all_finite() const;
  /// Largest absolute value over the faces of one patch (all components).
  double max_abs_on_patch(int patch) const;

  /// Throws std::invalid_argument unless both fields live on the same mesh
  /// and have the same component count.
  void require_compatible(const Field& other) const;

 private:
  std::size_t num_cell_values() const;
  std::size_t cell_offset(int c, int comp) const {
    return static_cast<std::size_t>(c) * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp);
  }
  std::size_t boundary_offset(int patch, int face, int comp) const {
    return patch_offsets_[static_cast<std::size_t>(patch)] +
           static_cast<std::size_t>(face) * static_cast<std::size_t>(components_) + static_cast<std::size_t>(comp);
  }

  MeshPtr mesh_;
  int components_ = 0;
  std::vector<double> values_;
  std::vector<std::size_t> patch_offsets_;
};

/// Discrete L2 inner product: sum over cells of a.b times cell volume.
double inner_product(const Field& a, const Field& b);
double l2_norm(const Field& a);

/// Sum over the faces of `patch` of a.b times face area.
double boundary_inner_product(const Field& a, const Field& b, const std::string& patch);

/// Field whose cell and boundary values are all `value` (every component).
Field constant_field(MeshPtr mesh, int components, double value);

}  // namespace romforge
