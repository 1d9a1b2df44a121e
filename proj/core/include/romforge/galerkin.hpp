#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "romforge/pod.hpp"

namespace romforge {

/// Third-order tensor stored slice-major: slice i holds T(i, j, k) at (j, k).
using Tensor3 = std::vector<Eigen::MatrixXd>;

/// Contracts slice i of a tensor with a on both sides: out_i = a^T T_i a.
Eigen::VectorXd contract(const Tensor3& t, const Eigen::VectorXd& a);

/// Boundary data of the velocity modes for one patch and one velocity
/// component: the mode values on each patch face and the face areas.
/// Penalty matrices follow from it as P1 = F^T W F, P2 = F^T w.
struct PenaltyTerm {
  std::string patch;
  int component = 0;
  Eigen::VectorXd face_areas;
  Eigen::MatrixXd face_values;  // faces x modes
  Eigen::MatrixXd p1;
  Eigen::VectorXd p2;

  double area() const { return face_areas.sum(); }
};

struct LiftingInfo {
  std::string patch;
  Vec2 direction{1.0, 0.0};
  double scale = 1.0;

  double coefficient(Vec2 bc) const { return bc.dot(direction) / scale; }
};

/// Reduced operators of the momentum equation and the pressure Poisson
/// equation projected on velocity modes phi and pressure modes chi.
struct ReducedSystem {
  int n_u = 0;
  int n_p = 0;
  double nu = 0.0;
  Eigen::MatrixXd M, A, B;  // (phi_i, phi_j), (phi_i, lap phi_j), (phi_i, grad chi_j)
  Tensor3 C;                // (phi_i, div(phi_j (x) phi_k))
  Eigen::MatrixXd D;        // (grad chi_i, grad chi_j)
  Tensor3 G;                // (grad chi_i, div(phi_j (x) phi_k))
  Eigen::MatrixXd N;        // (n x grad chi_i, curl phi_j) on the boundary
  Eigen::MatrixXd T;        // (chi_i, n . phi_j) on the boundary
  std::vector<PenaltyTerm> penalty;
  std::vector<LiftingInfo> liftings;
  std::string basis_hash;
  std::string lineage;

  int n_lift() const { return static_cast<int>(liftings.size()); }
  /// Index of the penalty term for (patch, component), or -1.
  int find_penalty(const std::string& patch, int component) const;
};

inline constexpr int kDefaultTensorCap = 50;

struct MomentumOperators {
  Eigen::MatrixXd M, A, B;
};

/// M, A and B through the full-order operators applied to the modes.
MomentumOperators assemble_momentum(const PodBasis& velocity, const PodBasis& pressure);

/// Convective tensor. Throws ConfigError when the basis exceeds `cap` modes.
Tensor3 assemble_convective_tensor(const PodBasis& velocity, int cap = kDefaultTensorCap);

struct PpeOperators {
  Eigen::MatrixXd D;
  Tensor3 G;
  Eigen::MatrixXd N;
  Eigen::MatrixXd T;
};

/// Pressure Poisson operators in their integrated-by-parts form; the
/// boundary integrals run over every patch.
PpeOperators assemble_ppe(const PodBasis& velocity, const PodBasis& pressure, int cap = kDefaultTensorCap);

/// One term per (patch, component) for each named patch, x then y.
std::vector<PenaltyTerm> assemble_penalty(const PodBasis& velocity, const std::vector<std::string>& patches);

/// Everything above. Penalty terms are built for every Dirichlet-velocity
/// patch of the mesh.
ReducedSystem assemble_reduced_system(const PodBasis& velocity, const PodBasis& pressure, double nu,
                                      int cap = kDefaultTensorCap);

/// Hash identifying a (velocity, pressure) basis pair.
std::string combined_basis_hash(const PodBasis& velocity, const PodBasis& pressure);

inline constexpr const char* kReducedSystemMagic = "ROMFORGE-REDSYS v1";

void write_reduced_system(const ReducedSystem& sys, const std::string& path);
ReducedSystem read_reduced_system(const std::string& path);

}  // namespace romforge
