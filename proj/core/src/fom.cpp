#include "romforge/fom.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "romforge/errors.hpp"
#include "romforge/fv_operators.hpp"
#include "romforge/hash.hpp"
#include "romforge/io.hpp"

namespace romforge {

namespace {

constexpr std::array<Side, 4> kSides{Side::West, Side::East, Side::South, Side::North};

bool covers(const PiecewiseLinear& f, double t_end) {
  if (f.times().size() == 1) return true;
  return f.first_time() <= 1e-12 && f.last_time() >= t_end - 1e-9 * std::max(1.0, t_end);
}

int exact_ratio(double num, double den, const char* what) {
  const double r = num / den;
  const long long n = std::llround(r);
  if (n <= 0 || std::abs(r - static_cast<double>(n)) > 1e-7 * std::max(1.0, r))
    throw ConfigError(std::string(what) + " is not an integer multiple of dt");
  return static_cast<int>(n);
}

double reference_speed(const BcSchedule& schedule) {
  double u = 0.0;
  for (const auto& [name, f] : schedule)
    for (const Vec2& v : f.values()) u = std::max(u, v.norm());
  return u > 0.0 ? u : 1.0;
}

bool has_outlet(const StructuredMesh2D& mesh) {
  return std::any_of(mesh.patches().begin(), mesh.patches().end(),
                     [](const BoundaryPatch& p) { return p.kind == PatchKind::Outlet; });
}

FaceFluxes zero_fluxes(const StructuredMesh2D& mesh) {
  FaceFluxes f;
  f.internal.assign(mesh.internal_faces().size(), 0.0);
  for (const auto& p : mesh.patches()) f.boundary.emplace_back(p.size(), 0.0);
  return f;
}

/// Outward flux of `flux` through side `s` of cell `c`.
double outward_flux(const StructuredMesh2D& mesh, const FaceFluxes& flux, int c, Side s) {
  const FaceRef ref = mesh.face_of(c, s);
  if (ref.kind == FaceRef::Kind::Boundary)
    return flux.boundary[static_cast<std::size_t>(ref.index)][static_cast<std::size_t>(ref.local)];
  const auto& face = mesh.internal_faces()[static_cast<std::size_t>(ref.index)];
  const double f = flux.internal[static_cast<std::size_t>(ref.index)];
  return face.owner == c ? f : -f;
}

// Segregated pressure-velocity solver state shared by the transient, steady
// and (indirectly) lifting computations.
class FlowSolver {
 public:
  FlowSolver(MeshPtr mesh, const FomConfig& cfg)
      : mp_(std::move(mesh)),
        m_(*mp_),
        cfg_(cfg),
        u_(Field::vector(mp_)),
        p_(Field::scalar(mp_)),
        flux_(zero_fluxes(m_)),
        ap_(static_cast<std::size_t>(m_.num_cells())),
        an_(static_cast<std::size_t>(m_.num_cells())),
        src_(static_cast<std::size_t>(m_.num_cells())),
        rau_(static_cast<std::size_t>(m_.num_cells())),
        hbya_(Field::vector(mp_)),
        u_ref_(reference_speed(cfg.bc_schedule)) {
    if (!has_outlet(m_)) ref_cell_ = m_.nearest_cell(cfg.pressure_reference_point);
  }

  Field& u() { return u_; }
  Field& p() { return p_; }
  FaceFluxes& flux() { return flux_; }
  double u_ref() const { return u_ref_; }

  void set_boundary_velocity(double t) {
    for (std::size_t pi = 0; pi < m_.patches().size(); ++pi) {
      const auto& patch = m_.patches()[pi];
      const int ip = static_cast<int>(pi);
      Vec2 value{};
      if (patch.kind == PatchKind::DirichletVelocity) value = cfg_.bc_schedule.at(patch.name).value(t);
      for (std::size_t f = 0; f < patch.size(); ++f) {
        if (patch.kind == PatchKind::Outlet) {
          u_.set_boundary_vec(ip, static_cast<int>(f), u_.cell_vec(patch.faces[f].cell));
          continue;
        }
        u_.set_boundary_vec(ip, static_cast<int>(f), value);
        flux_.boundary[pi][f] = patch.face_areas[f] * patch.normals[f].dot(value);
      }
    }
  }

  void sync_outlet_velocity() {
    for (std::size_t pi = 0; pi < m_.patches().size(); ++pi) {
      const auto& patch = m_.patches()[pi];
      if (patch.kind != PatchKind::Outlet) continue;
      for (std::size_t f = 0; f < patch.size(); ++f)
        u_.set_boundary_vec(static_cast<int>(pi), static_cast<int>(f), u_.cell_vec(patch.faces[f].cell));
    }
  }

  /// Pressure boundary values: p = 0 on outlets; elsewhere extrapolated with
  /// the normal gradient -n.(nu curl curl u + df/dt).
  void update_pressure_boundary(double t) {
    const Field omega = fv::vorticity(u_);
    const Field grad_omega = fv::gradient(omega);
    for (std::size_t pi = 0; pi < m_.patches().size(); ++pi) {
      const auto& patch = m_.patches()[pi];
      const int ip = static_cast<int>(pi);
      Vec2 dfdt{};
      if (patch.kind == PatchKind::DirichletVelocity) dfdt = cfg_.bc_schedule.at(patch.name).derivative(t);
      for (std::size_t f = 0; f < patch.size(); ++f) {
        if (patch.kind == PatchKind::Outlet) {
          p_.boundary(ip, static_cast<int>(f)) = 0.0;
          continue;
        }
        const double curlcurl_n = fv::boundary_tangential_derivative(grad_omega, ip, static_cast<int>(f));
        const double g = -cfg_.nu * curlcurl_n - patch.normals[f].dot(dfdt);
        const int c = patch.faces[f].cell;
        p_.boundary(ip, static_cast<int>(f)) = p_.cell(c) + m_.half_width(patch.faces[f].side) * g;
      }
    }
  }

  /// Builds a_P u_P + sum a_N u_N = src for both velocity components.
  /// `time_coeff` multiplies V/dt on the diagonal, `history` is the explicit
  /// part (already scaled so that src += V/dt * history). Relaxation factor
  /// alpha < 1 applies implicit under-relaxation around the current u.
  /// `steady` switches to the SIMPLE form: u_P times the net cell outflow
  /// is subtracted from the convection term (early iterations have
  /// non-conservative fluxes) and the central part of the convection is
  /// applied by deferred correction on top of implicit upwinding.
  void assemble_momentum(double time_coeff, double dt, const std::vector<Vec2>* history, double alpha,
                         bool steady = false) {
    const double gamma = steady ? 0.0 : cfg_.convection_blend;
    const double deferred = steady ? cfg_.convection_blend : 0.0;
    for (int c = 0; c < m_.num_cells(); ++c) {
      const auto cs = static_cast<std::size_t>(c);
      const double vol = m_.cell_volume(c);
      double ap = 0.0;
      Vec2 src{};
      std::array<double, 4> an{};
      double net_out = 0.0;
      if (history) {
        ap += time_coeff * vol / dt;
        src = src + (*history)[cs] * (vol / dt);
      }
      for (Side s : kSides) {
        const FaceRef ref = m_.face_of(c, s);
        const double area = m_.side_area(s);
        const double fout = outward_flux(m_, flux_, c, s);
        net_out += fout;
        if (ref.kind == FaceRef::Kind::Internal) {
          const double d = (s == Side::West || s == Side::East) ? m_.dx() : m_.dy();
          const double diff = cfg_.nu * area / d;
          ap += gamma * 0.5 * fout + (1.0 - gamma) * std::max(fout, 0.0) + diff;
          an[static_cast<std::size_t>(s)] = gamma * 0.5 * fout + (1.0 - gamma) * std::min(fout, 0.0) - diff;
          if (deferred > 0.0) {
            const Vec2 up = u_.cell_vec(c);
            const Vec2 un = u_.cell_vec(m_.neighbour(c, s));
            const Vec2 central = (up + un) * 0.5;
            const Vec2 upwind = fout >= 0.0 ? up : un;
            src = src - (central - upwind) * (deferred * fout);
          }
          continue;
        }
        const auto& patch = m_.patches()[static_cast<std::size_t>(ref.index)];
        if (patch.kind == PatchKind::Outlet) {
          ap += fout;
          continue;
        }
        const Vec2 ub = u_.boundary_vec(ref.index, ref.local);
        const double diff = cfg_.nu * area / m_.half_width(s);
        ap += diff;
        src = src + ub * (diff - fout);
      }
      if (steady) ap -= net_out;
      if (alpha < 1.0) {
        const double ap_relaxed = ap / alpha;
        src = src + u_.cell_vec(c) * (ap_relaxed - ap);
        ap = ap_relaxed;
      }
      ap_[cs] = ap;
      an_[cs] = an;
      src_[cs] = src;
    }
  }

  void solve_momentum() {
    const int n = m_.num_cells();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    Eigen::VectorXd bx(n), by(n), ux(n), uy(n);
    const Field gp = fv::gradient(p_);
    for (int c = 0; c < n; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      trip.emplace_back(c, c, ap_[cs]);
      for (Side s : kSides) {
        const int nb = m_.neighbour(c, s);
        if (nb >= 0) trip.emplace_back(c, nb, an_[cs][static_cast<std::size_t>(s)]);
      }
      const double vol = m_.cell_volume(c);
      bx[c] = src_[cs].x - vol * gp.cell(c, 0);
      by[c] = src_[cs].y - vol * gp.cell(c, 1);
      ux[c] = u_.cell(c, 0);
      uy[c] = u_.cell(c, 1);
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    check(solve_linear(a, bx, ux, MatrixSymmetry::General, cfg_.linear), "momentum (x)");
    check(solve_linear(a, by, uy, MatrixSymmetry::General, cfg_.linear), "momentum (y)");
    for (int c = 0; c < n; ++c) u_.set_cell_vec(c, {ux[c], uy[c]});
    sync_outlet_velocity();
  }

  /// One pressure correction. Returns the new pressure solution (before any
  /// relaxation); fluxes are corrected with it.
  Eigen::VectorXd pressure_equation() {
    const int n = m_.num_cells();
    for (int c = 0; c < n; ++c) {
      const auto cs = static_cast<std::size_t>(c);
      Vec2 h = src_[cs];
      for (Side s : kSides) {
        const int nb = m_.neighbour(c, s);
        if (nb >= 0) h = h - u_.cell_vec(nb) * an_[cs][static_cast<std::size_t>(s)];
      }
      rau_[cs] = m_.cell_volume(c) / ap_[cs];
      hbya_.set_cell_vec(c, h * (1.0 / ap_[cs]));
    }
    // Predicted face fluxes.
    std::vector<double> fh(m_.internal_faces().size());
    std::vector<double> coef(fh.size());
    for (std::size_t f = 0; f < fh.size(); ++f) {
      const auto& face = m_.internal_faces()[f];
      const Vec2 hf = (hbya_.cell_vec(face.owner) + hbya_.cell_vec(face.neighbour)) * 0.5;
      fh[f] = face.area * face.normal.dot(hf);
      coef[f] = 0.5 * (rau_[static_cast<std::size_t>(face.owner)] + rau_[static_cast<std::size_t>(face.neighbour)]) *
                face.area / face.distance;
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(n) * 5);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
    for (std::size_t f = 0; f < fh.size(); ++f) {
      const auto& face = m_.internal_faces()[f];
      diag[face.owner] += coef[f];
      diag[face.neighbour] += coef[f];
      trip.emplace_back(face.owner, face.neighbour, -coef[f]);
      trip.emplace_back(face.neighbour, face.owner, -coef[f]);
      rhs[face.owner] -= fh[f];
      rhs[face.neighbour] += fh[f];
    }
    std::vector<std::vector<double>> outlet_coef(m_.patches().size());
    for (std::size_t pi = 0; pi < m_.patches().size(); ++pi) {
      const auto& patch = m_.patches()[pi];
      outlet_coef[pi].assign(patch.size(), 0.0);
      for (std::size_t f = 0; f < patch.size(); ++f) {
        const int c = patch.faces[f].cell;
        if (patch.kind == PatchKind::Outlet) {
          flux_.boundary[pi][f] = patch.face_areas[f] * patch.normals[f].dot(hbya_.cell_vec(c));
          const double k = rau_[static_cast<std::size_t>(c)] * patch.face_areas[f] / m_.half_width(patch.faces[f].side);
          outlet_coef[pi][f] = k;
          diag[c] += k;
        }
        rhs[c] -= flux_.boundary[pi][f];
      }
    }
    if (ref_cell_ >= 0) diag[ref_cell_] *= 2.0;
    for (int c = 0; c < n; ++c) trip.emplace_back(c, c, diag[c]);
    SparseMatrix a(n, n);
    a.setFromTriplets(trip.begin(), trip.end());
    Eigen::VectorXd pnew(n);
    for (int c = 0; c < n; ++c) pnew[c] = p_.cell(c);
    check(pressure_solver_.solve(a, rhs, pnew, cfg_.linear), "pressure");

    for (std::size_t f = 0; f < fh.size(); ++f) {
      const auto& face = m_.internal_faces()[f];
      flux_.internal[f] = fh[f] - coef[f] * (pnew[face.neighbour] - pnew[face.owner]);
    }
    for (std::size_t pi = 0; pi < m_.patches().size(); ++pi) {
      const auto& patch = m_.patches()[pi];
      if (patch.kind != PatchKind::Outlet) continue;
      for (std::size_t f = 0; f < patch.size(); ++f)
        flux_.boundary[pi][f] += outlet_coef[pi][f] * pnew[patch.faces[f].cell];
    }
    return pnew;
  }

  void correct_velocity(double t) {
    update_pressure_boundary(t);
    const Field gp = fv::gradient(p_);
    for (int c = 0; c < m_.num_cells(); ++c) {
      const double r = rau_[static_cast<std::size_t>(c)];
      u_.set_cell_vec(c, hbya_.cell_vec(c) - gp.cell_vec(c) * r);
    }
    sync_outlet_velocity();
  }

  void set_pressure(const Eigen::VectorXd& pn, double alpha) {
    for (int c = 0; c < m_.num_cells(); ++c) p_.cell(c) += alpha * (pn[c] - p_.cell(c));
  }

  double max_divergence() const {
    const auto div = flux_divergence(m_, flux_);
    double m = 0.0;
    for (double d : div) m = std::max(m, std::abs(d));
    return m;
  }

  double mass_imbalance() const {
    double net = 0.0, gross = 0.0;
    for (const auto& patch : flux_.boundary)
      for (double f : patch) {
        net += f;
        gross += std::abs(f);
      }
    return gross > 0.0 ? std::abs(net) / gross : 0.0;
  }

 private:
  void check(const LinearSolveStats& stats, const char* what) const {
    if (!stats.converged && !(stats.relative_residual < 1e3 * cfg_.linear.relative_tolerance))
      throw NumericalError(std::string(what) + " linear solve failed to converge (relative residual " +
                           std::to_string(stats.relative_residual) + ")");
  }

  MeshPtr mp_;
  const StructuredMesh2D& m_;
  const FomConfig& cfg_;
  Field u_, p_;
  FaceFluxes flux_;
  std::vector<double> ap_;
  std::vector<std::array<double, 4>> an_;
  std::vector<Vec2> src_;
  std::vector<double> rau_;
  Field hbya_;
  double u_ref_;
  int ref_cell_ = -1;
  ReusedFactorSolver pressure_solver_;
};

double max_abs_difference(const Field& a, const Field& b) {
  double m = 0.0;
  const auto av = a.cell_values();
  const auto bv = b.cell_values();
  for (std::size_t k = 0; k < av.size(); ++k) m = std::max(m, std::abs(av[k] - bv[k]));
  return m;
}

}  // namespace

std::vector<double> flux_divergence(const StructuredMesh2D& mesh, const FaceFluxes& flux) {
  std::vector<double> div(static_cast<std::size_t>(mesh.num_cells()), 0.0);
  for (int c = 0; c < mesh.num_cells(); ++c) {
    double net = 0.0;
    for (Side s : kSides) net += outward_flux(mesh, flux, c, s);
    div[static_cast<std::size_t>(c)] = net / mesh.cell_volume(c);
  }
  return div;
}

void FomConfig::validate(const StructuredMesh2D& mesh) const {
  if (!(nu > 0.0)) throw ConfigError("viscosity must be positive");
  if (!(dt > 0.0)) throw ConfigError("time step must be positive");
  if (!(t_end > 0.0)) throw ConfigError("end time must be positive");
  exact_ratio(t_end, dt, "end time");
  exact_ratio(snapshot_interval, dt, "snapshot interval");
  if (outer_iterations < 1 || pressure_correctors < 1) throw ConfigError("iteration counts must be >= 1");
  if (convection_blend < 0.0 || convection_blend > 1.0) throw ConfigError("convection blend must lie in [0, 1]");
  if (!(velocity_relaxation > 0.0 && velocity_relaxation <= 1.0) ||
      !(pressure_relaxation > 0.0 && pressure_relaxation <= 1.0))
    throw ConfigError("relaxation factors must lie in (0, 1]");
  for (const auto& patch : mesh.patches()) {
    if (patch.kind != PatchKind::DirichletVelocity) continue;
    auto it = bc_schedule.find(patch.name);
    if (it == bc_schedule.end()) throw ConfigError("no boundary schedule for Dirichlet patch '" + patch.name + "'");
    if (!covers(it->second, t_end)) throw ConfigError("schedule for '" + patch.name + "' does not cover [0, t_end]");
  }
  for (const auto& [name, f] : bc_schedule) {
    auto idx = mesh.find_patch(name);
    if (!idx || mesh.patches()[static_cast<std::size_t>(*idx)].kind != PatchKind::DirichletVelocity)
      throw ConfigError("schedule given for '" + name + "', which is not a Dirichlet-velocity patch");
  }
  if (initial_field_source == InitialFieldSource::File &&
      (initial_velocity_file.empty() || initial_pressure_file.empty()))
    throw ConfigError("file initial condition needs velocity and pressure files");
}

int FomConfig::num_steps() const { return exact_ratio(t_end, dt, "end time"); }
int FomConfig::steps_per_snapshot() const { return exact_ratio(snapshot_interval, dt, "snapshot interval"); }

std::string FomConfig::canonical_text() const {
  std::ostringstream os;
  os.precision(17);
  os << "nu=" << nu << ";dt=" << dt << ";t_end=" << t_end << ";interval=" << snapshot_interval
     << ";outer=" << outer_iterations << ";correctors=" << pressure_correctors << ";tol=" << linear.relative_tolerance
     << ";blend=" << convection_blend << ";ic=" << static_cast<int>(initial_field_source) << ";icu="
     << initial_velocity_file << ";icp=" << initial_pressure_file;
  for (const auto& [name, f] : bc_schedule) {
    os << ";bc:" << name;
    for (std::size_t k = 0; k < f.times().size(); ++k)
      os << ',' << f.times()[k] << ':' << f.values()[k].x << ':' << f.values()[k].y;
  }
  return os.str();
}

SteadyResult solve_steady(const MeshPtr& mesh, const FomConfig& config, double bc_time) {
  FlowSolver solver(mesh, config);
  solver.set_boundary_velocity(bc_time);
  solver.update_pressure_boundary(bc_time);
  SteadyResult result;
  const double uref = solver.u_ref();
  for (int it = 1; it <= config.steady_max_iterations; ++it) {
    const Field u_prev = solver.u();
    const Field p_prev = solver.p();
    solver.assemble_momentum(0.0, 1.0, nullptr, config.velocity_relaxation, true);
    solver.solve_momentum();
    const Eigen::VectorXd pn = solver.pressure_equation();
    solver.set_pressure(pn, config.pressure_relaxation);
    solver.correct_velocity(bc_time);
    if (!solver.u().all_finite() || !solver.p().all_finite())
      throw NumericalError("steady solve produced non-finite values at iteration " + std::to_string(it));
    const double du = max_abs_difference(solver.u(), u_prev) / uref;
    const double dp = max_abs_difference(solver.p(), p_prev) / (uref * uref);
    result.iterations = it;
    result.velocity_change = du;
    if (du < config.steady_tolerance && dp < config.steady_tolerance) {
      result.velocity = solver.u();
      result.pressure = solver.p();
      result.flux = solver.flux();
      return result;
    }
  }
  throw NumericalError("steady solve did not converge within " + std::to_string(config.steady_max_iterations) +
                       " iterations (last velocity change " + std::to_string(result.velocity_change) + ")");
}

SnapshotSet solve_transient(const MeshPtr& mesh, const FomConfig& config) {
  config.validate(*mesh);
  const int nsteps = config.num_steps();
  const int every = config.steps_per_snapshot();

  FlowSolver solver(mesh, config);
  switch (config.initial_field_source) {
    case InitialFieldSource::Zero:
      solver.set_boundary_velocity(0.0);
      solver.update_pressure_boundary(0.0);
      break;
    case InitialFieldSource::Steady: {
      SteadyResult s = solve_steady(mesh, config, 0.0);
      solver.u() = std::move(s.velocity);
      solver.p() = std::move(s.pressure);
      solver.flux() = std::move(s.flux);
      break;
    }
    case InitialFieldSource::File: {
      solver.u() = read_field(config.initial_velocity_file, mesh);
      solver.p() = read_field(config.initial_pressure_file, mesh);
      solver.flux().internal = fv::interpolated_flux(solver.u());
      solver.set_boundary_velocity(0.0);
      solver.update_pressure_boundary(0.0);
      break;
    }
  }

  SnapshotSet out;
  Fnv1a h;
  h.update(config.canonical_text());
  h.update_value(mesh->fingerprint());
  out.config_hash = h.hex();

  auto record = [&](double t) {
    Field u = solver.u();
    Field p = solver.p();
    u.time_stamp = t;
    p.time_stamp = t;
    out.times.push_back(t);
    out.velocity.push_back(std::move(u));
    out.pressure.push_back(std::move(p));
    out.fluxes.push_back(solver.flux());
    for (const auto& [name, f] : config.bc_schedule) out.bc_trace[name].push_back(f.value(t));
  };
  record(0.0);

  const int n = mesh->num_cells();
  std::vector<Vec2> u_prev(static_cast<std::size_t>(n)), u_now(static_cast<std::size_t>(n)),
      history(static_cast<std::size_t>(n));
  for (int c = 0; c < n; ++c) u_now[static_cast<std::size_t>(c)] = solver.u().cell_vec(c);

  double last_change = 0.0;
  int growth = 0;
  for (int step = 0; step < nsteps; ++step) {
    const double t = (step + 1) * config.dt;
    const bool bdf2 = step > 0;
    for (std::size_t c = 0; c < history.size(); ++c)
      history[c] = bdf2 ? u_now[c] * 2.0 - u_prev[c] * 0.5 : u_now[c];
    solver.set_boundary_velocity(t);
    double change = 0.0;
    for (int outer = 0; outer < config.outer_iterations; ++outer) {
      const Field u_before = solver.u();
      solver.assemble_momentum(bdf2 ? 1.5 : 1.0, config.dt, &history, 1.0);
      solver.solve_momentum();
      for (int corr = 0; corr < config.pressure_correctors; ++corr) {
        const Eigen::VectorXd pn = solver.pressure_equation();
        solver.set_pressure(pn, 1.0);
        solver.correct_velocity(t);
      }
      change = max_abs_difference(solver.u(), u_before) / solver.u_ref();
    }
    if (!solver.u().all_finite() || !solver.p().all_finite())
      throw NumericalError("non-finite field values at step " + std::to_string(step + 1) + " (t = " +
                           std::to_string(t) + ")");
    if (config.outer_iterations > 1) {
      growth = (change > last_change && change > 1e-2) ? growth + 1 : 0;
      if (growth >= config.divergence_patience)
        throw NumericalError("outer iterations diverging at step " + std::to_string(step + 1) +
                             " (change " + std::to_string(change) + ")");
      last_change = change;
    }
    out.continuity_residual.push_back(solver.max_divergence());
    out.mass_imbalance.push_back(solver.mass_imbalance());

    u_prev.swap(u_now);
    for (int c = 0; c < n; ++c) u_now[static_cast<std::size_t>(c)] = solver.u().cell_vec(c);
    if ((step + 1) % every == 0) record(t);
  }
  return out;
}

PotentialFlowResult solve_potential_flow(const MeshPtr& mesh_ptr, const std::map<std::string, double>& inflow_speed,
                                         const LinearSolveOptions& options) {
  const StructuredMesh2D& mesh = *mesh_ptr;
  if (!has_outlet(mesh))
    throw NumericalError("potential flow is singular: no outlet patch fixes the potential level");
  for (const auto& patch : mesh.patches())
    if (patch.kind == PatchKind::DirichletVelocity && !inflow_speed.contains(patch.name))
      throw ConfigError("no inflow speed given for Dirichlet patch '" + patch.name + "'");
  for (const auto& [name, v] : inflow_speed) {
    auto idx = mesh.find_patch(name);
    if (!idx || mesh.patches()[static_cast<std::size_t>(*idx)].kind != PatchKind::DirichletVelocity)
      throw ConfigError("inflow speed given for '" + name + "', which is not a Dirichlet-velocity patch");
  }

  const int n = mesh.num_cells();
  std::vector<Eigen::Triplet<double>> trip;
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n);
  for (const auto& face : mesh.internal_faces()) {
    const double k = face.area / face.distance;
    diag[face.owner] += k;
    diag[face.neighbour] += k;
    trip.emplace_back(face.owner, face.neighbour, -k);
    trip.emplace_back(face.neighbour, face.owner, -k);
  }
  // Prescribed normal gradient (outward) per patch face; outlets carry phi = 0.
  std::vector<std::vector<double>> grad_n(mesh.patches().size());
  for (std::size_t pi = 0; pi < mesh.patches().size(); ++pi) {
    const auto& patch = mesh.patches()[pi];
    grad_n[pi].assign(patch.size(), 0.0);
    for (std::size_t f = 0; f < patch.size(); ++f) {
      const int c = patch.faces[f].cell;
      if (patch.kind == PatchKind::Outlet) {
        diag[c] += patch.face_areas[f] / mesh.half_width(patch.faces[f].side);
      } else if (patch.kind == PatchKind::DirichletVelocity) {
        grad_n[pi][f] = -inflow_speed.at(patch.name);
        rhs[c] += patch.face_areas[f] * grad_n[pi][f];
      }
    }
  }
  for (int c = 0; c < n; ++c) trip.emplace_back(c, c, diag[c]);
  SparseMatrix a(n, n);
  a.setFromTriplets(trip.begin(), trip.end());
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
  const auto stats = solve_linear(a, rhs, phi, MatrixSymmetry::Symmetric, options);
  if (!stats.converged) throw NumericalError("potential-flow solve did not converge");

  PotentialFlowResult out{Field::vector(mesh_ptr), Field::scalar(mesh_ptr), zero_fluxes(mesh)};
  for (int c = 0; c < n; ++c) out.potential.cell(c) = phi[c];
  for (std::size_t pi = 0; pi < mesh.patches().size(); ++pi) {
    const auto& patch = mesh.patches()[pi];
    for (std::size_t f = 0; f < patch.size(); ++f) {
      const int c = patch.faces[f].cell;
      const double hw = mesh.half_width(patch.faces[f].side);
      const double pb = patch.kind == PatchKind::Outlet ? 0.0 : phi[c] + hw * grad_n[pi][f];
      out.potential.boundary(static_cast<int>(pi), static_cast<int>(f)) = pb;
      out.flux.boundary[pi][f] = patch.kind == PatchKind::Outlet ? patch.face_areas[f] * (0.0 - phi[c]) / hw
                                                                   : patch.face_areas[f] * grad_n[pi][f];
    }
  }
  for (std::size_t f = 0; f < mesh.internal_faces().size(); ++f) {
    const auto& face = mesh.internal_faces()[f];
    out.flux.internal[f] = face.area * (phi[face.neighbour] - phi[face.owner]) / face.distance;
  }
  const Field grad = fv::gradient(out.potential);
  for (int c = 0; c < n; ++c) out.velocity.set_cell_vec(c, grad.cell_vec(c));
  for (std::size_t pi = 0; pi < mesh.patches().size(); ++pi) {
    const auto& patch = mesh.patches()[pi];
    for (std::size_t f = 0; f < patch.size(); ++f) {
      Vec2 v = out.velocity.cell_vec(patch.faces[f].cell);
      if (patch.kind == PatchKind::DirichletVelocity) v = patch.normals[f] * (-inflow_speed.at(patch.name));
      out.velocity.set_boundary_vec(static_cast<int>(pi), static_cast<int>(f), v);
    }
  }
  return out;
}

}  // namespace romforge
