#include "romforge/field.hpp"

#include <cmath>
#include <stdexcept>

namespace romforge {

Field::Field(MeshPtr mesh, int components) : mesh_(std::move(mesh)), components_(components) {
  if (!mesh_) throw std::invalid_argument("field requires a mesh");
  if (components != 1 && components != 2) throw std::invalid_argument("fields have 1 or 2 components");
  std::size_t n = num_cell_values();
  for (const auto& p : mesh_->patches()) {
    patch_offsets_.push_back(n);
    n += p.size() * static_cast<std::size_t>(components_);
  }
  values_.assign(n, 0.0);
}

std::size_t Field::num_cell_values() const {
  return static_cast<std::size_t>(mesh_->num_cells()) * static_cast<std::size_t>(components_);
}

void Field::set_cell_vec(int c, Vec2 v) {
  values_[cell_offset(c, 0)] = v.x;
  values_[cell_offset(c, 1)] = v.y;
}

Vec2 Field::boundary_vec(int patch, int face) const {
  return {values_[boundary_offset(patch, face, 0)], values_[boundary_offset(patch, face, 1)]};
}

void Field::set_boundary_vec(int patch, int face, Vec2 v) {
  values_[boundary_offset(patch, face, 0)] = v.x;
  values_[boundary_offset(patch, face, 1)] = v.y;
}

std::span<double> Field::patch_values(int patch) {
  const auto& p = mesh_->patches()[static_cast<std::size_t>(patch)];
  return {values_.data() + patch_offsets_[static_cast<std::size_t>(patch)], p.size() * static_cast<std::size_t>(components_)};
}

std::span<const double> Field::patch_values(int patch) const {
  const auto& p = mesh_->patches()[static_cast<std::size_t>(patch)];
  return {values_.data() + patch_offsets_[static_cast<std::size_t>(patch)], p.size() * static_cast<std::size_t>(components_)};
}

Field& Field::axpy(double alpha, const Field& other) {
  require_compatible(other);
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += alpha * other.values_[k];
  return *this;
}

Field& Field::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

void Field::set_zero() {
  for (double& v : values_) v = 0.0;
}

bool Field::all_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) return false;
  return true;
}

double Field::max_abs_on_patch(int patch) const {
  double m = 0.0;
  for (double v : patch_values(patch)) m = std::max(m, std::abs(v));
  return m;
}

void Field::require_compatible(const Field& other) const {
  if (!mesh_ || !other.mesh_) throw std::invalid_argument("operation on an empty field");
  if (mesh_ != other.mesh_ && mesh_->fingerprint() != other.mesh_->fingerprint())
    throw std::invalid_argument("fields live on different meshes");
  if (components_ != other.components_) throw std::invalid_argument("fields have different component counts");
}

double inner_product(const Field& a, const Field& b) {
  a.require_compatible(b);
  const auto& vol = a.mesh().cell_volumes();
  const int nc = a.components();
  const auto av = a.cell_values();
  const auto bv = b.cell_values();
  double sum = 0.0;
  for (std::size_t c = 0; c < vol.size(); ++c) {
    double dot = 0.0;
    for (int k = 0; k < nc; ++k) {
      const std::size_t o = c * static_cast<std::size_t>(nc) + static_cast<std::size_t>(k);
      dot += av[o] * bv[o];
    }
    sum += dot * vol[c];
  }
  return sum;
}

double l2_norm(const Field& a) { return std::sqrt(std::max(0.0, inner_product(a, a))); }

double boundary_inner_product(const Field& a, const Field& b, const std::string& patch) {
  a.require_compatible(b);
  const auto idx = a.mesh().find_patch(patch);
  if (!idx) throw std::invalid_argument("mesh has no patch named '" + patch + "'");
  const auto& p = a.mesh().patches()[static_cast<std::size_t>(*idx)];
  double sum = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f) {
    double dot = 0.0;
    for (int k = 0; k < a.components(); ++k)
      dot += a.boundary(*idx, static_cast<int>(f), k) * b.boundary(*idx, static_cast<int>(f), k);
    sum += dot * p.face_areas[f];
  }
  return sum;
}

Field constant_field(MeshPtr mesh, int components, double value) {
  Field f(std::move(mesh), components);
  for (double& v : f.data()) v = value;
  return f;
}

}  // namespace romforge
