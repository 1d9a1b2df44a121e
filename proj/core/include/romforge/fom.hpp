#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "romforge/field.hpp"
#include "romforge/linear_solver.hpp"
#include "romforge/schedule.hpp"

namespace romforge {

enum class InitialFieldSource { Zero, Steady, File };

struct FomConfig {
  double nu = 1e-4;  // kinematic viscosity [m^2/s]
  double dt = 5e-4;
  double t_end = 10.0;
  double snapshot_interval = 0.01;
  BcSchedule bc_schedule;  // one entry per Dirichlet-velocity patch

  int outer_iterations = 2;
  int pressure_correctors = 2;
  LinearSolveOptions linear{};
  /// Fraction of central differencing in the convective flux; the rest is upwind.
  double convection_blend = 1.0;

  InitialFieldSource initial_field_source = InitialFieldSource::Zero;
  std::string initial_velocity_file;
  std::string initial_pressure_file;

  /// Reference location whose nearest cell pins p = 0 on meshes without an
  /// outlet.
  Vec2 pressure_reference_point{0.0, 0.0};

  /// Consecutive steps of growing outer-iteration change that abort a run.
  int divergence_patience = 20;

  // Steady (SIMPLE) controls.
  int steady_max_iterations = 20000;
  double steady_tolerance = 1e-7;
  double velocity_relaxation = 0.7;
  double pressure_relaxation = 0.3;

  /// Throws ConfigError on invalid combinations for this mesh.
  void validate(const StructuredMesh2D& mesh) const;
  int num_steps() const;
  int steps_per_snapshot() const;
  /// Canonical text form, used for provenance hashing.
  std::string canonical_text() const;
};

/// Face fluxes A n.u [m^2/s]: internal faces oriented owner -> neighbour,
/// patch faces outward.
struct FaceFluxes {
  std::vector<double> internal;
  std::vector<std::vector<double>> boundary;
};

/// Per-cell net outflow divided by the cell volume.
std::vector<double> flux_divergence(const StructuredMesh2D& mesh, const FaceFluxes& flux);

struct SnapshotSet {
  std::vector<double> times;
  std::vector<Field> velocity;
  std::vector<Field> pressure;
  /// Enforced boundary velocity per Dirichlet patch at each snapshot time.
  std::map<std::string, std::vector<Vec2>> bc_trace;
  /// Solver face fluxes at each snapshot (not persisted).
  std::vector<FaceFluxes> fluxes;
  /// Per time step: max |div u| over cells and |net boundary flux| / reference flux.
  std::vector<double> continuity_residual;
  std::vector<double> mass_imbalance;
  std::string config_hash;

  std::size_t size() const { return times.size(); }
};

/// Transient incompressible Navier-Stokes on a collocated grid: segregated
/// PIMPLE-type outer loop (momentum predictor, pressure equation, velocity
/// and flux correction), BDF2 in time after an implicit-Euler first step.
/// Snapshots are taken every `snapshot_interval`, starting at t = 0.
SnapshotSet solve_transient(const MeshPtr& mesh, const FomConfig& config);

/// Content hash over snapshot times, field values and boundary trace.
std::string snapshot_hash(const SnapshotSet& set);

/// Directory layout: manifest.json (times, boundary trace, hashes, optional
/// config text) plus u_NNNN.field / p_NNNN.field per snapshot.
void write_snapshots(const std::string& dir, const SnapshotSet& set, const std::string& config_json = {});
SnapshotSet read_snapshots(const std::string& dir, const MeshPtr& mesh);

struct SteadyResult {
  Field velocity;
  Field pressure;
  FaceFluxes flux;
  int iterations = 0;
  double velocity_change = 0.0;
};

/// SIMPLE iteration with under-relaxation for the boundary values of the
/// schedule at time `bc_time`.
SteadyResult solve_steady(const MeshPtr& mesh, const FomConfig& config, double bc_time = 0.0);

struct PotentialFlowResult {
  Field velocity;
  Field potential;
  FaceFluxes flux;
};

/// Potential flow through the domain with prescribed inflow speed on each
/// Dirichlet-velocity patch (positive = into the domain along the inward
/// normal). The potential is zero on outlet patches and has zero normal
/// gradient on walls; velocity boundary values are the prescribed inflow on
/// Dirichlet patches and zero-gradient elsewhere.
PotentialFlowResult solve_potential_flow(const MeshPtr& mesh, const std::map<std::string, double>& inflow_speed,
                                         const LinearSolveOptions& options = {1e-12, 20000});

}  // namespace romforge
