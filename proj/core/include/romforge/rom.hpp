#pragma once

#include <string>
#include <utility>
#include <vector>

#include "romforge/galerkin.hpp"
#include "romforge/schedule.hpp"

namespace romforge {

enum class BoundaryMethod { Lifting, Penalty, None };

std::string to_string(BoundaryMethod m);
BoundaryMethod boundary_method_from_string(const std::string& s);

/// How the reconstructed boundary value of a patch component is reduced to
/// one number: area-weighted mean, or the face value farthest from target.
enum class ResidualMode { Mean, Max };

struct PenaltyConfig {
  double epsilon = 1e-5;
  double tau0 = 1e-6;
  int n_tau = 5;
  int max_tuning_iters = 50;
  double tau_cap = 1e12;
  ResidualMode residual = ResidualMode::Mean;
};

struct RomConfig {
  double dt = 2e-3;
  double t_start = 0.0;
  double t_online = 10.0;
  /// Spacing of stored trajectory entries; 0 stores every step.
  double output_interval = 0.0;
  BoundaryMethod method = BoundaryMethod::Lifting;
  BcSchedule bc_schedule;
  double newton_tol = 1e-10;
  int newton_max_iter = 25;
  PenaltyConfig penalty;
  /// Penalty factor per penalty term of the reduced system; empty means
  /// tau0 everywhere.
  std::vector<double> tau;
  /// Sign of the boundary rate term T a_dot in the reduced pressure equation.
  double ppe_rate_sign = 1.0;

  void validate(const ReducedSystem& sys) const;
  int num_steps() const;
  int steps_per_output() const;
};

struct RomResult {
  CoefficientTrajectory trajectory;
  /// Reconstructed boundary value per penalty term at each stored time.
  std::vector<std::vector<double>> boundary_values;
  int max_newton_iterations = 0;
  double max_newton_residual = 0.0;
  double wall_seconds = 0.0;
};

/// Implicit-Euler integration of the coupled reduced momentum and pressure
/// equations with Newton's method at every step. With the lifting method the
/// lifting coefficients are set from the schedule instead of solved for;
/// with the penalty method the penalty terms are added to the momentum rows.
RomResult integrate(const ReducedSystem& sys, const RomConfig& config, const Eigen::VectorXd& a0,
                    const Eigen::VectorXd& b0);

/// Area-weighted mean over the faces of `patch` of component `component`
/// of the reconstructed velocity.
double reconstruct_boundary_value(const PodBasis& velocity, const Eigen::VectorXd& coeffs, const std::string& patch,
                                  int component);

/// Reconstructed boundary value of one penalty term (mean or max mode)
/// minus `target`.
double boundary_residual(const PenaltyTerm& term, const Eigen::VectorXd& a, double target, ResidualMode mode);

/// Adds sum_l tau_l (P1_l a - u_l P2_l) to `residual` and, when given,
/// sum_l tau_l P1_l to `jacobian` (top-left velocity block).
void apply_penalty_terms(const ReducedSystem& sys, const Eigen::VectorXd& a, const std::vector<double>& tau,
                         const std::vector<double>& u_bc, Eigen::VectorXd& residual,
                         Eigen::MatrixXd* jacobian = nullptr);

/// Target value of every penalty term at time t.
std::vector<double> penalty_targets(const ReducedSystem& sys, const BcSchedule& schedule, double t);

struct TuningRecord {
  int step = 0;
  int iteration = 0;
  std::vector<double> tau;
  std::vector<double> residual;
};

struct TuningResult {
  std::vector<double> tau;
  bool converged = false;
  int updates = 0;
  std::vector<TuningRecord> trace;
  /// Residuals of the accepted solution at each evaluated step.
  std::vector<std::vector<double>> step_residuals;
};

/// Multiplicative penalty-factor iteration over the first n_tau steps:
/// while a term's residual exceeds epsilon its factor is multiplied by
/// |r| / epsilon and the step is repeated. Throws NumericalError if a factor
/// exceeds tau_cap.
TuningResult tune_penalty(const ReducedSystem& sys, const RomConfig& config, const Eigen::VectorXd& a0,
                          const Eigen::VectorXd& b0);

/// Velocity and pressure initial coefficients. A lifted velocity basis gets
/// its lifting coefficients from `bc` and POD coefficients from the field
/// with the liftings removed.
std::pair<Eigen::VectorXd, Eigen::VectorXd> project_initial_conditions(const Field& velocity, const Field& pressure,
                                                                       const PodBasis& velocity_basis,
                                                                       const PodBasis& pressure_basis,
                                                                       const std::map<std::string, Vec2>& bc);

/// CSV: time, a_i..., b_i..., then per penalty term the reconstructed
/// boundary value and the scheduled one.
void write_trajectory_csv(const std::string& path, const RomResult& result, const ReducedSystem& sys,
                          const BcSchedule& schedule);

}  // namespace romforge
