#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "romforge/fom.hpp"
#include "romforge/rom.hpp"

namespace romforge {

enum class CaseKind { Cavity, Tjunction };

std::string to_string(CaseKind k);

/// Everything one pipeline run needs, read from a single JSON file.
struct CaseConfig {
  CaseKind kind = CaseKind::Cavity;
  // cavity mesh
  int cells = 64;
  double length = 1.0;
  // junction mesh
  int inlet_cells = 8;
  int arm_cells = 32;
  double inlet_width = 0.5;

  FomConfig fom;
  /// Cavity lifting: steady solution at this viscosity with the initial
  /// boundary values. Junction liftings are potential flows.
  double lifting_nu = 1e-3;

  int modes_u = 10;
  int modes_p = 10;
  /// Online run. Its schedule defaults to the training one.
  RomConfig rom;
  /// True when the online schedule or horizon differs from training, so the
  /// reference for comparison is a separate full-order run.
  bool separate_reference = false;
  /// Errors are averaged over t > t_transient.
  double t_transient = 2.0;

  std::string output_dir = "out";
  std::uint64_t seed = 0;

  MeshPtr build_mesh() const;
  /// Throws ConfigError on invalid values.
  void validate() const;
};

/// Parses a case file. Initial-field paths are taken relative to the file's
/// directory, the output directory relative to the working directory.
CaseConfig load_case_config(const std::string& path);
CaseConfig parse_case_config(const std::string& json_text, const std::string& base_dir = ".");

/// Command-line overrides; unset members leave the file values alone.
struct Overrides {
  std::optional<std::string> output_dir;
  std::optional<int> modes_u;
  std::optional<int> modes_p;
  std::optional<BoundaryMethod> method;
  std::optional<double> epsilon;
  std::optional<double> tau0;
  std::optional<int> n_tau;
  std::optional<std::uint64_t> seed;
};

void apply_overrides(CaseConfig& config, const Overrides& o);

/// Artifact locations under the output directory.
struct Layout {
  std::string root;
  std::string snapshots() const { return root + "/snapshots"; }
  std::string reference() const { return root + "/reference"; }
  std::string lifting() const { return root + "/lifting"; }
  std::string basis_u() const { return root + "/basis_u"; }
  std::string basis_p() const { return root + "/basis_p"; }
  std::string energy_csv() const { return root + "/energy.csv"; }
  std::string reduced_system() const { return root + "/reduced.sys"; }
  std::string penalty() const { return root + "/penalty.json"; }
  std::string tuning_trace() const { return root + "/tuning_trace.csv"; }
  std::string rom() const { return root + "/rom"; }
  std::string compare() const { return root + "/compare"; }
};

/// Training snapshots. With `reference` the online schedule and horizon are
/// used instead and the result goes to the reference directory.
void cmd_fom(const CaseConfig& config, bool reference = false);
/// One normalized lifting field per Dirichlet patch.
void cmd_lifting(const CaseConfig& config);
/// Velocity and pressure bases (homogenized velocity for the lifting method)
/// and the eigenvalue/energy table.
void cmd_pod(const CaseConfig& config);
void cmd_project(const CaseConfig& config);
void cmd_tune(const CaseConfig& config);
void cmd_rom(const CaseConfig& config);
void cmd_compare(const CaseConfig& config);

}  // namespace romforge
