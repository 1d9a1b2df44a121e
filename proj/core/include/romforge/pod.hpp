#pragma once

#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "romforge/field.hpp"

namespace romforge {

enum class ComponentTag { Velocity, Pressure };

std::string to_string(ComponentTag tag);
ComponentTag component_tag_from_string(const std::string& s);

/// A unit-norm lifting function attached to one Dirichlet patch.
///
/// The raw field carries a spatially uniform boundary value on its patch;
/// `direction` is that value normalized to unit length and `scale` is the
/// boundary magnitude left after normalizing the field to unit L2 norm. A
/// physical boundary value `bc` is therefore reproduced by the coefficient
/// bc.direction / scale.
struct Lifting {
  std::string patch;
  Vec2 direction{1.0, 0.0};
  double scale = 1.0;
  Field mode;

  double coefficient(Vec2 bc) const { return bc.dot(direction) / scale; }
};

struct PodBasis {
  ComponentTag tag = ComponentTag::Velocity;
  /// Lifting modes first (if any), then POD modes in order of energy.
  std::vector<Field> modes;
  /// Full snapshot spectrum, descending, negatives clamped to zero.
  std::vector<double> eigenvalues;
  std::vector<Lifting> liftings;

  int size() const { return static_cast<int>(modes.size()); }
  int n_lift() const { return static_cast<int>(liftings.size()); }
  int n_pod() const { return size() - n_lift(); }
  const StructuredMesh2D& mesh() const { return modes.front().mesh(); }
};

/// Reduced coefficients over time: a for velocity, b for pressure, and the
/// enforced boundary value per controlled patch.
struct CoefficientTrajectory {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> a;
  std::vector<Eigen::VectorXd> b;
  std::map<std::string, std::vector<Vec2>> u_bc;

  std::size_t size() const { return times.size(); }
};

/// C_ij = (s_i, s_j).
Eigen::MatrixXd correlation_matrix(const std::vector<Field>& snapshots);

/// Snapshot POD: eigen-decomposes the correlation matrix and builds each mode
/// as the eigenvector-weighted snapshot sum, then rescales it to unit norm.
/// Each mode's largest-magnitude cell value is made positive. Throws
/// ConfigError when n_modes exceeds the numerical rank (eigenvalues below
/// 1e-12 of the largest).
PodBasis compute_pod(const std::vector<Field>& snapshots, int n_modes, ComponentTag tag = ComponentTag::Velocity);

/// Number of eigenvalues above 1e-12 times the largest.
int numerical_rank(const std::vector<double>& eigenvalues);

/// Prefix sums of the spectrum divided by its total.
std::vector<double> cumulative_energy(const std::vector<double>& eigenvalues);

/// raw / ||raw||. Throws std::invalid_argument for a zero field.
Field normalize_lifting(const Field& raw);

/// Normalizes `raw` and records the direction and scale of its (area-mean)
/// boundary value on `patch`.
Lifting make_lifting(const Field& raw, const std::string& patch);

/// s_n - sum_j lifting_j * coefficient_j(bc_j(t_n)). `bc_trace` holds, per
/// lifting patch, the boundary value at each snapshot.
std::vector<Field> homogenize_snapshots(const std::vector<Field>& snapshots, const std::vector<Lifting>& liftings,
                                        const std::map<std::string, std::vector<Vec2>>& bc_trace);

/// Prepends the lifting modes to a POD basis.
PodBasis extend_basis_with_lifting(PodBasis basis, const std::vector<Lifting>& liftings);

/// Lifting coefficients for the given boundary values, in basis order.
Eigen::VectorXd lifting_coefficients(const PodBasis& basis, const std::map<std::string, Vec2>& bc);

/// a_i = (phi_i, field) for every mode of the basis.
Eigen::VectorXd project_field(const Field& field, const PodBasis& basis);

/// sum_i coeffs_i phi_i over cell and boundary values.
Field reconstruct(const PodBasis& basis, const Eigen::VectorXd& coeffs);

/// Homogeneous-part projection for a lifted basis: lifting coefficients from
/// `bc`, POD coefficients from the field with the liftings removed.
Eigen::VectorXd project_with_lifting(const Field& field, const PodBasis& basis, const std::map<std::string, Vec2>& bc);

/// Content hash over mode values, spectrum and lifting metadata.
std::string basis_hash(const PodBasis& basis);

/// Directory layout: manifest.json plus one field file per mode.
void write_basis(const std::string& dir, const PodBasis& basis, const std::string& lineage = {});
PodBasis read_basis(const std::string& dir, const MeshPtr& mesh, std::string* lineage = nullptr);

}  // namespace romforge
