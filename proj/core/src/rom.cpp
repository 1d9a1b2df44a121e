#include "romforge/rom.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "romforge/errors.hpp"

namespace romforge {

std::string to_string(BoundaryMethod m) {
  switch (m) {
    case BoundaryMethod::Lifting: return "lifting";
    case BoundaryMethod::Penalty: return "penalty";
    case BoundaryMethod::None: return "none";
  }
  return "?";
}

BoundaryMethod boundary_method_from_string(const std::string& s) {
  if (s == "lifting") return BoundaryMethod::Lifting;
  if (s == "penalty") return BoundaryMethod::Penalty;
  if (s == "none") return BoundaryMethod::None;
  throw ConfigError("unknown boundary method '" + s + "' (expected lifting, penalty or none)");
}

namespace {

int step_count(double span, double dt, const char* what) {
  const double r = span / dt;
  const long long n = std::llround(r);
  if (n <= 0 || std::abs(r - static_cast<double>(n)) > 1e-7 * std::max(1.0, r))
    throw ConfigError(std::string(what) + " is not a positive integer multiple of the time step");
  return static_cast<int>(n);
}

Vec2 schedule_value(const BcSchedule& s, const std::string& patch, double t) {
  auto it = s.find(patch);
  if (it == s.end()) throw ConfigError("no boundary schedule for patch '" + patch + "'");
  return it->second.value(t);
}

// One implicit-Euler step solved by Newton's method on the coupled system.
class StepSolver {
 public:
  StepSolver(const ReducedSystem& sys, const RomConfig& cfg) : sys_(sys), cfg_(cfg) {
    const int nu = sys.n_u;
    const int np = sys.n_p;
    pinned_ = cfg.method == BoundaryMethod::Lifting ? sys.n_lift() : 0;
    for (int i = pinned_; i < nu + np; ++i) free_.push_back(i);
    mass_ = sys.M / cfg.dt;
    linear_ = -sys.nu * sys.A;
    ppe_rate_ = cfg.ppe_rate_sign / cfg.dt * sys.T;
  }

  struct Outcome {
    Eigen::VectorXd a, b;
    int iterations = 0;
    double residual = 0.0;
  };

  /// Advances (a_old, b_old) to time t with penalty factors `tau`.
  Outcome step(const Eigen::VectorXd& a_old, const Eigen::VectorXd& b_old, double t, const std::vector<double>& tau,
               int step_index) const {
    const int nu = sys_.n_u;
    const int np = sys_.n_p;
    Eigen::VectorXd x(nu + np);
    x << a_old, b_old;
    if (pinned_ > 0) {
      for (int j = 0; j < pinned_; ++j) {
        const auto& l = sys_.liftings[static_cast<std::size_t>(j)];
        x[j] = l.coefficient(schedule_value(cfg_.bc_schedule, l.patch, t));
      }
    }
    std::vector<double> targets;
    if (cfg_.method == BoundaryMethod::Penalty) targets = penalty_targets(sys_, cfg_.bc_schedule, t);

    const auto nfree = static_cast<Eigen::Index>(free_.size());
    Eigen::VectorXd r(nu + np);
    Eigen::MatrixXd j(nu + np, nu + np);
    Eigen::VectorXd rf(nfree);
    Eigen::MatrixXd jf(nfree, nfree);
    Outcome out;
    for (int it = 0;; ++it) {
      evaluate(x, a_old, targets, tau, r, j);
      for (Eigen::Index p = 0; p < nfree; ++p) rf[p] = r[free_[static_cast<std::size_t>(p)]];
      const double norm = rf.norm();
      if (!std::isfinite(norm))
        throw NumericalError("non-finite reduced residual at step " + std::to_string(step_index));
      out.iterations = it;
      out.residual = norm;
      if (norm <= cfg_.newton_tol) break;
      if (it >= cfg_.newton_max_iter)
        throw NumericalError("Newton iteration did not converge at step " + std::to_string(step_index) +
                             " (residual " + std::to_string(norm) + ")");
      for (Eigen::Index p = 0; p < nfree; ++p)
        for (Eigen::Index q = 0; q < nfree; ++q)
          jf(p, q) = j(free_[static_cast<std::size_t>(p)], free_[static_cast<std::size_t>(q)]);
      const Eigen::VectorXd dx = jf.partialPivLu().solve(-rf);
      for (Eigen::Index p = 0; p < nfree; ++p) x[free_[static_cast<std::size_t>(p)]] += dx[p];
      // Round-off floor: the update no longer changes the iterate.
      if (dx.norm() <= 1e-15 * (1.0 + x.norm())) {
        evaluate(x, a_old, targets, tau, r, j);
        for (Eigen::Index p = 0; p < nfree; ++p) rf[p] = r[free_[static_cast<std::size_t>(p)]];
        out.iterations = it + 1;
        out.residual = rf.norm();
        break;
      }
    }
    out.a = x.head(nu);
    out.b = x.tail(np);
    return out;
  }

 private:
  void evaluate(const Eigen::VectorXd& x, const Eigen::VectorXd& a_old, const std::vector<double>& targets,
                const std::vector<double>& tau, Eigen::VectorXd& r, Eigen::MatrixXd& j) const {
    const int nu = sys_.n_u;
    const int np = sys_.n_p;
    const Eigen::VectorXd a = x.head(nu);
    const Eigen::VectorXd b = x.tail(np);
    const Eigen::VectorXd da = a - a_old;

    Eigen::VectorXd rm = mass_ * da + contract(sys_.C, a) + linear_ * a + sys_.B * b;
    Eigen::VectorXd rp = sys_.D * b + contract(sys_.G, a) - sys_.nu * sys_.N * a + ppe_rate_ * da;

    j.setZero();
    j.topLeftCorner(nu, nu) = mass_ + linear_;
    for (int i = 0; i < nu; ++i) j.block(i, 0, 1, nu) += (sys_.C[static_cast<std::size_t>(i)] * a + sys_.C[static_cast<std::size_t>(i)].transpose() * a).transpose();
    j.topRightCorner(nu, np) = sys_.B;
    j.bottomLeftCorner(np, nu) = -sys_.nu * sys_.N + ppe_rate_;
    for (int i = 0; i < np; ++i) j.block(nu + i, 0, 1, nu) += (sys_.G[static_cast<std::size_t>(i)] * a + sys_.G[static_cast<std::size_t>(i)].transpose() * a).transpose();
    j.bottomRightCorner(np, np) = sys_.D;

    if (cfg_.method == BoundaryMethod::Penalty) {
      Eigen::MatrixXd jm = Eigen::MatrixXd::Zero(nu, nu);
      apply_penalty_terms(sys_, a, tau, targets, rm, &jm);
      j.topLeftCorner(nu, nu) += jm;
    }
    r << rm, rp;
  }

  const ReducedSystem& sys_;
  const RomConfig& cfg_;
  int pinned_ = 0;
  std::vector<int> free_;
  Eigen::MatrixXd mass_, linear_, ppe_rate_;
};

std::vector<double> resolved_tau(const ReducedSystem& sys, const RomConfig& cfg) {
  if (cfg.tau.empty()) return std::vector<double>(sys.penalty.size(), cfg.penalty.tau0);
  return cfg.tau;
}

}  // namespace

void RomConfig::validate(const ReducedSystem& sys) const {
  if (!(dt > 0.0)) throw ConfigError("ROM time step must be positive");
  if (!(t_online > t_start)) throw ConfigError("ROM end time must exceed its start time");
  num_steps();
  if (output_interval > 0.0) steps_per_output();
  if (!(newton_tol > 0.0) || newton_max_iter < 1) throw ConfigError("invalid Newton controls");
  switch (method) {
    case BoundaryMethod::Lifting:
      if (sys.n_lift() == 0) throw ConfigError("lifting method needs a reduced system built on a lifted basis");
      for (const auto& l : sys.liftings)
        if (!bc_schedule.contains(l.patch)) throw ConfigError("no boundary schedule for lifting patch '" + l.patch + "'");
      break;
    case BoundaryMethod::Penalty:
      if (sys.n_lift() != 0) throw ConfigError("penalty method expects a basis without lifting modes");
      if (sys.penalty.empty()) throw ConfigError("reduced system has no penalty terms");
      for (const auto& t : sys.penalty)
        if (!bc_schedule.contains(t.patch)) throw ConfigError("no boundary schedule for patch '" + t.patch + "'");
      if (!tau.empty() && tau.size() != sys.penalty.size())
        throw ConfigError("expected " + std::to_string(sys.penalty.size()) + " penalty factors, got " +
                          std::to_string(tau.size()));
      for (double v : tau)
        if (!(v >= 0.0)) throw ConfigError("penalty factors must be non-negative");
      if (!(penalty.epsilon > 0.0) || !(penalty.tau0 > 0.0) || penalty.n_tau < 1)
        throw ConfigError("penalty tuning needs epsilon > 0, tau0 > 0 and n_tau >= 1");
      break;
    case BoundaryMethod::None:
      if (sys.n_lift() != 0) throw ConfigError("method 'none' expects a basis without lifting modes");
      break;
  }
}

int RomConfig::num_steps() const { return step_count(t_online - t_start, dt, "ROM time span"); }
int RomConfig::steps_per_output() const {
  return output_interval > 0.0 ? step_count(output_interval, dt, "ROM output interval") : 1;
}

std::vector<double> penalty_targets(const ReducedSystem& sys, const BcSchedule& schedule, double t) {
  std::vector<double> out;
  for (const auto& term : sys.penalty) {
    const Vec2 v = schedule_value(schedule, term.patch, t);
    out.push_back(v[term.component]);
  }
  return out;
}

void apply_penalty_terms(const ReducedSystem& sys, const Eigen::VectorXd& a, const std::vector<double>& tau,
                         const std::vector<double>& u_bc, Eigen::VectorXd& residual, Eigen::MatrixXd* jacobian) {
  if (tau.size() != sys.penalty.size() || u_bc.size() != sys.penalty.size())
    throw std::invalid_argument("penalty factor / target count does not match the penalty terms");
  for (std::size_t l = 0; l < sys.penalty.size(); ++l) {
    if (tau[l] == 0.0) continue;
    const auto& term = sys.penalty[l];
    residual.noalias() += tau[l] * (term.p1 * a - u_bc[l] * term.p2);
    if (jacobian) *jacobian += tau[l] * term.p1;
  }
}

double reconstruct_boundary_value(const PodBasis& velocity, const Eigen::VectorXd& coeffs, const std::string& patch,
                                  int component) {
  if (coeffs.size() != velocity.size()) throw std::invalid_argument("coefficient count does not match the basis");
  const auto idx = velocity.mesh().find_patch(patch);
  if (!idx) throw std::invalid_argument("mesh has no patch named '" + patch + "'");
  const auto& p = velocity.mesh().patches()[static_cast<std::size_t>(*idx)];
  if (p.size() == 0) throw std::invalid_argument("patch '" + patch + "' is empty");
  double sum = 0.0;
  for (std::size_t f = 0; f < p.size(); ++f) {
    double v = 0.0;
    for (int i = 0; i < velocity.size(); ++i)
      v += coeffs[i] * velocity.modes[static_cast<std::size_t>(i)].boundary(*idx, static_cast<int>(f), component);
    sum += p.face_areas[f] * v;
  }
  return sum / p.total_area();
}

double boundary_residual(const PenaltyTerm& term, const Eigen::VectorXd& a, double target, ResidualMode mode) {
  if (mode == ResidualMode::Mean) return term.p2.dot(a) / term.area() - target;
  const Eigen::VectorXd values = term.face_values * a;
  double worst = 0.0;
  for (Eigen::Index f = 0; f < values.size(); ++f) {
    const double d = values[f] - target;
    if (std::abs(d) > std::abs(worst)) worst = d;
  }
  return worst;
}

RomResult integrate(const ReducedSystem& sys, const RomConfig& config, const Eigen::VectorXd& a0,
                    const Eigen::VectorXd& b0) {
  config.validate(sys);
  if (a0.size() != sys.n_u || b0.size() != sys.n_p)
    throw std::invalid_argument("initial coefficient sizes do not match the reduced system");
  const auto start = std::chrono::steady_clock::now();
  const int nsteps = config.num_steps();
  const int every = config.steps_per_output();
  const std::vector<double> tau = resolved_tau(sys, config);
  StepSolver solver(sys, config);

  RomResult out;
  auto record = [&](double t, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
    out.trajectory.times.push_back(t);
    out.trajectory.a.push_back(a);
    out.trajectory.b.push_back(b);
    for (const auto& [name, f] : config.bc_schedule) out.trajectory.u_bc[name].push_back(f.value(t));
    std::vector<double> bv;
    for (const auto& term : sys.penalty) bv.push_back(boundary_residual(term, a, 0.0, ResidualMode::Mean));
    out.boundary_values.push_back(std::move(bv));
  };

  Eigen::VectorXd a = a0;
  Eigen::VectorXd b = b0;
  record(config.t_start, a, b);
  for (int n = 1; n <= nsteps; ++n) {
    const double t = config.t_start + n * config.dt;
    auto s = solver.step(a, b, t, tau, n);
    a = std::move(s.a);
    b = std::move(s.b);
    out.max_newton_iterations = std::max(out.max_newton_iterations, s.iterations);
    out.max_newton_residual = std::max(out.max_newton_residual, s.residual);
    if (n % every == 0) record(t, a, b);
  }
  out.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

TuningResult tune_penalty(const ReducedSystem& sys, const RomConfig& config, const Eigen::VectorXd& a0,
                          const Eigen::VectorXd& b0) {
  if (config.method != BoundaryMethod::Penalty) throw ConfigError("penalty tuning requires method 'penalty'");
  config.validate(sys);
  const auto& pc = config.penalty;
  StepSolver solver(sys, config);
  TuningResult out;
  out.tau = resolved_tau(sys, config);
  out.converged = true;

  Eigen::VectorXd a = a0;
  Eigen::VectorXd b = b0;
  const int nsteps = std::min(pc.n_tau, config.num_steps());
  for (int n = 1; n <= nsteps; ++n) {
    const double t = config.t_start + n * config.dt;
    const std::vector<double> targets = penalty_targets(sys, config.bc_schedule, t);
    for (int k = 0;; ++k) {
      auto s = solver.step(a, b, t, out.tau, n);
      std::vector<double> r;
      bool ok = true;
      for (std::size_t l = 0; l < sys.penalty.size(); ++l) {
        r.push_back(boundary_residual(sys.penalty[l], s.a, targets[l], pc.residual));
        if (std::abs(r.back()) > pc.epsilon) ok = false;
      }
      out.trace.push_back({n, k, out.tau, r});
      if (ok || out.updates >= pc.max_tuning_iters) {
        if (!ok) out.converged = false;
        out.step_residuals.push_back(r);
        a = std::move(s.a);
        b = std::move(s.b);
        break;
      }
      for (std::size_t l = 0; l < sys.penalty.size(); ++l) {
        if (std::abs(r[l]) <= pc.epsilon) continue;
        out.tau[l] *= std::abs(r[l]) / pc.epsilon;
        if (!(out.tau[l] <= pc.tau_cap))
          throw NumericalError("penalty factor for " + sys.penalty[l].patch + "[" + std::to_string(sys.penalty[l].component) +
                               "] exceeded the cap of " + std::to_string(pc.tau_cap));
      }
      ++out.updates;
    }
    if (!out.converged) break;
  }
  return out;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> project_initial_conditions(const Field& velocity, const Field& pressure,
                                                                       const PodBasis& velocity_basis,
                                                                       const PodBasis& pressure_basis,
                                                                       const std::map<std::string, Vec2>& bc) {
  Eigen::VectorXd a = velocity_basis.n_lift() > 0 ? project_with_lifting(velocity, velocity_basis, bc)
                                                  : project_field(velocity, velocity_basis);
  return {std::move(a), project_field(pressure, pressure_basis)};
}

void write_trajectory_csv(const std::string& path, const RomResult& result, const ReducedSystem& sys,
                          const BcSchedule& schedule) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write trajectory to '" + path + "'");
  os.precision(17);
  os << "time";
  for (int i = 0; i < sys.n_u; ++i) os << ",a" << i;
  for (int i = 0; i < sys.n_p; ++i) os << ",b" << i;
  const char* comp[] = {"x", "y"};
  for (const auto& t : sys.penalty) os << ',' << t.patch << '_' << comp[t.component] << "_rom," << t.patch << '_' << comp[t.component] << "_bc";
  os << '\n';
  const auto& tr = result.trajectory;
  for (std::size_t n = 0; n < tr.size(); ++n) {
    os << tr.times[n];
    for (Eigen::Index i = 0; i < tr.a[n].size(); ++i) os << ',' << tr.a[n][i];
    for (Eigen::Index i = 0; i < tr.b[n].size(); ++i) os << ',' << tr.b[n][i];
    const auto targets = penalty_targets(sys, schedule, tr.times[n]);
    for (std::size_t l = 0; l < sys.penalty.size(); ++l) os << ',' << result.boundary_values[n][l] << ',' << targets[l];
    os << '\n';
  }
}

}  // namespace romforge
