#include "romforge/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "romforge/errors.hpp"
#include "romforge/galerkin.hpp"
#include "romforge/io.hpp"
#include "romforge/metrics.hpp"
#include "romforge/pod.hpp"

namespace romforge {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(CaseKind k) { return k == CaseKind::Cavity ? "cavity" : "tjunction"; }

namespace {

void check_keys(const json& j, const std::set<std::string>& allowed, const std::string& where) {
  if (!j.is_object()) throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, value] : j.items())
    if (!allowed.count(key)) throw ConfigError("unknown key '" + key + "' in '" + where + "'");
}

template <typename T>
void read_opt(const json& j, const char* key, T& out) {
  if (j.contains(key)) out = j.at(key).get<T>();
}

BcSchedule parse_schedule(const json& j) {
  BcSchedule s;
  if (!j.is_object()) throw ConfigError("a boundary schedule must map patch names to {times, values}");
  for (const auto& [patch, entry] : j.items()) {
    check_keys(entry, {"times", "values"}, patch);
    auto times = entry.at("times").get<std::vector<double>>();
    std::vector<Vec2> values;
    for (const auto& v : entry.at("values")) {
      if (!v.is_array() || v.size() != 2) throw ConfigError("schedule values of '" + patch + "' must be [x, y] pairs");
      values.push_back({v[0].get<double>(), v[1].get<double>()});
    }
    try {
      s[patch] = PiecewiseLinear(std::move(times), std::move(values));
    } catch (const std::invalid_argument& e) {
      throw ConfigError("schedule of '" + patch + "': " + e.what());
    }
  }
  return s;
}

std::string resolve(const std::string& base, const std::string& p) {
  if (p.empty() || fs::path(p).is_absolute()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

void parse_fom(const json& j, FomConfig& f, const std::string& base) {
  check_keys(j, {"nu", "dt", "t_end", "snapshot_interval", "outer_iterations", "pressure_correctors",
                 "convection_blend", "initial_field", "initial_velocity_file", "initial_pressure_file",
                 "divergence_patience", "steady_max_iterations", "steady_tolerance", "velocity_relaxation",
                 "pressure_relaxation", "linear_tolerance", "linear_max_iterations"},
             "fom");
  read_opt(j, "nu", f.nu);
  read_opt(j, "dt", f.dt);
  read_opt(j, "t_end", f.t_end);
  read_opt(j, "snapshot_interval", f.snapshot_interval);
  read_opt(j, "outer_iterations", f.outer_iterations);
  read_opt(j, "pressure_correctors", f.pressure_correctors);
  read_opt(j, "convection_blend", f.convection_blend);
  read_opt(j, "divergence_patience", f.divergence_patience);
  read_opt(j, "steady_max_iterations", f.steady_max_iterations);
  read_opt(j, "steady_tolerance", f.steady_tolerance);
  read_opt(j, "velocity_relaxation", f.velocity_relaxation);
  read_opt(j, "pressure_relaxation", f.pressure_relaxation);
  read_opt(j, "linear_tolerance", f.linear.relative_tolerance);
  read_opt(j, "linear_max_iterations", f.linear.max_iterations);
  if (j.contains("initial_field")) {
    const auto s = j.at("initial_field").get<std::string>();
    if (s == "zero") f.initial_field_source = InitialFieldSource::Zero;
    else if (s == "steady") f.initial_field_source = InitialFieldSource::Steady;
    else if (s == "file") f.initial_field_source = InitialFieldSource::File;
    else throw ConfigError("initial_field must be zero, steady or file, got '" + s + "'");
  }
  if (j.contains("initial_velocity_file")) f.initial_velocity_file = resolve(base, j.at("initial_velocity_file").get<std::string>());
  if (j.contains("initial_pressure_file")) f.initial_pressure_file = resolve(base, j.at("initial_pressure_file").get<std::string>());
}

ResidualMode residual_mode_from_string(const std::string& s) {
  if (s == "mean") return ResidualMode::Mean;
  if (s == "max") return ResidualMode::Max;
  throw ConfigError("penalty residual must be mean or max, got '" + s + "'");
}

std::string format_index(const char* prefix, std::size_t n) {
  char name[32];
  std::snprintf(name, sizeof name, "%s_%04zu.field", prefix, n);
  return name;
}

json read_json(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open '" + path + "'");
  try {
    json j;
    is >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError("malformed JSON in '" + path + "': " + e.what());
  }
}

void write_json(const std::string& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw ConfigError("cannot write '" + path + "'");
  os << j.dump(2) << '\n';
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string snapshot_manifest_hash(const std::string& dir) {
  const json j = read_json(dir + "/manifest.json");
  if (!j.contains("hash")) throw ConfigError("snapshot manifest in '" + dir + "' has no hash");
  return j.at("hash").get<std::string>();
}

std::map<std::string, Vec2> schedule_at(const BcSchedule& s, double t) {
  std::map<std::string, Vec2> out;
  for (const auto& [patch, f] : s) out[patch] = f.value(t);
  return out;
}

std::string term_name(const PenaltyTerm& t) { return t.patch + (t.component == 0 ? ".x" : ".y"); }

struct Bases {
  PodBasis u;
  PodBasis p;
};

Bases load_bases(const Layout& layout, const MeshPtr& mesh, std::string* lineage = nullptr) {
  std::string lu, lp;
  Bases b{read_basis(layout.basis_u(), mesh, &lu), read_basis(layout.basis_p(), mesh, &lp)};
  if (lu != lp) throw ConfigError("velocity and pressure bases come from different snapshot sets");
  if (lineage) *lineage = lu;
  return b;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> initial_coefficients(const CaseConfig& config, const Layout& layout,
                                                                 const MeshPtr& mesh, const Bases& b) {
  const SnapshotSet snaps = read_snapshots(layout.snapshots(), mesh);
  if (snaps.size() == 0) throw ConfigError("snapshot set in '" + layout.snapshots() + "' is empty");
  return project_initial_conditions(snaps.velocity.front(), snaps.pressure.front(), b.u, b.p,
                                    schedule_at(config.rom.bc_schedule, config.rom.t_start));
}

std::vector<double> load_tau(const Layout& layout, const ReducedSystem& sys) {
  if (!fs::exists(layout.penalty())) throw ConfigError("no penalty factors at '" + layout.penalty() + "'; run tune-penalty first");
  const json j = read_json(layout.penalty());
  std::vector<double> tau;
  try {
    const auto& terms = j.at("terms");
    if (terms.size() != sys.penalty.size()) throw ConfigError("penalty factors do not match the reduced system");
    for (std::size_t l = 0; l < terms.size(); ++l) {
      if (terms[l].at("name").get<std::string>() != term_name(sys.penalty[l]))
        throw ConfigError("penalty factors do not match the reduced system");
      tau.push_back(terms[l].at("tau").get<double>());
    }
    if (j.at("basis_hash").get<std::string>() != sys.basis_hash)
      throw ConfigError("penalty factors were tuned for a different reduced system");
  } catch (const json::exception& e) {
    throw ConfigError("malformed penalty file: " + std::string(e.what()));
  }
  return tau;
}

}  // namespace

MeshPtr CaseConfig::build_mesh() const {
  if (kind == CaseKind::Cavity) return std::make_shared<const StructuredMesh2D>(build_cavity_mesh(cells, length));
  return std::make_shared<const StructuredMesh2D>(build_tjunction_mesh(inlet_cells, arm_cells, inlet_width));
}

void CaseConfig::validate() const {
  if (kind == CaseKind::Cavity && (cells < 2 || !(length > 0.0))) throw ConfigError("cavity mesh needs cells >= 2 and length > 0");
  if (kind == CaseKind::Tjunction && (inlet_cells < 1 || arm_cells < 1 || !(inlet_width > 0.0)))
    throw ConfigError("junction mesh needs inlet_cells, arm_cells >= 1 and inlet_width > 0");
  if (modes_u < 1 || modes_p < 1) throw ConfigError("mode counts must be at least 1");
  if (!(lifting_nu > 0.0)) throw ConfigError("lifting nu must be positive");
  const MeshPtr mesh = build_mesh();
  fom.validate(*mesh);
  if (!(rom.dt > 0.0) || !(rom.t_online > 0.0)) throw ConfigError("rom dt and t_online must be positive");
  const double ratio = rom.output_interval / rom.dt;
  if (!(rom.output_interval > 0.0) || std::abs(ratio - std::round(ratio)) > 1e-9 * std::max(1.0, ratio))
    throw ConfigError("rom output_interval must be a positive multiple of dt");
  for (const auto& p : mesh->patches())
    if (p.kind == PatchKind::DirichletVelocity && !rom.bc_schedule.count(p.name))
      throw ConfigError("online schedule has no entry for patch '" + p.name + "'");
  if (rom.penalty.epsilon <= 0.0 || rom.penalty.tau0 <= 0.0 || rom.penalty.n_tau < 1 || rom.penalty.max_tuning_iters < 1)
    throw ConfigError("penalty needs epsilon, tau0 > 0 and n_tau, max_tuning_iters >= 1");
}

CaseConfig parse_case_config(const std::string& json_text, const std::string& base_dir) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("case file is not valid JSON: ") + e.what());
  }
  CaseConfig c;
  try {
    check_keys(j, {"case", "mesh", "fom", "bc_schedule", "lifting", "pod", "rom", "penalty", "output_dir", "seed"}, "case file");
    const auto kind = j.at("case").get<std::string>();
    if (kind == "cavity") c.kind = CaseKind::Cavity;
    else if (kind == "tjunction") c.kind = CaseKind::Tjunction;
    else throw ConfigError("case must be cavity or tjunction, got '" + kind + "'");

    if (j.contains("mesh")) {
      const auto& m = j.at("mesh");
      if (c.kind == CaseKind::Cavity) {
        check_keys(m, {"cells", "length"}, "mesh");
        read_opt(m, "cells", c.cells);
        read_opt(m, "length", c.length);
      } else {
        check_keys(m, {"inlet_cells", "arm_cells", "inlet_width"}, "mesh");
        read_opt(m, "inlet_cells", c.inlet_cells);
        read_opt(m, "arm_cells", c.arm_cells);
        read_opt(m, "inlet_width", c.inlet_width);
      }
    }
    if (j.contains("fom")) parse_fom(j.at("fom"), c.fom, base_dir);
    c.fom.bc_schedule = parse_schedule(j.at("bc_schedule"));
    if (j.contains("lifting")) {
      check_keys(j.at("lifting"), {"nu"}, "lifting");
      read_opt(j.at("lifting"), "nu", c.lifting_nu);
    }
    if (j.contains("pod")) {
      check_keys(j.at("pod"), {"modes_u", "modes_p"}, "pod");
      read_opt(j.at("pod"), "modes_u", c.modes_u);
      read_opt(j.at("pod"), "modes_p", c.modes_p);
    }

    RomConfig& r = c.rom;
    r.dt = c.fom.dt;
    r.t_online = c.fom.t_end;
    r.output_interval = c.fom.snapshot_interval;
    r.bc_schedule = c.fom.bc_schedule;
    if (j.contains("rom")) {
      const auto& rj = j.at("rom");
      check_keys(rj, {"method", "dt", "t_online", "output_interval", "newton_tol", "newton_max_iter", "ppe_rate_sign",
                      "bc_schedule", "t_transient"},
                 "rom");
      if (rj.contains("method")) {
        try {
          r.method = boundary_method_from_string(rj.at("method").get<std::string>());
        } catch (const std::invalid_argument& e) {
          throw ConfigError(e.what());
        }
      }
      read_opt(rj, "dt", r.dt);
      read_opt(rj, "t_online", r.t_online);
      read_opt(rj, "output_interval", r.output_interval);
      read_opt(rj, "newton_tol", r.newton_tol);
      read_opt(rj, "newton_max_iter", r.newton_max_iter);
      read_opt(rj, "ppe_rate_sign", r.ppe_rate_sign);
      read_opt(rj, "t_transient", c.t_transient);
      if (rj.contains("bc_schedule")) r.bc_schedule = parse_schedule(rj.at("bc_schedule"));
    }
    c.separate_reference = j.contains("rom") && (j.at("rom").contains("bc_schedule") || r.t_online > c.fom.t_end);
    if (j.contains("penalty")) {
      const auto& pj = j.at("penalty");
      check_keys(pj, {"epsilon", "tau0", "n_tau", "max_tuning_iters", "tau_cap", "residual"}, "penalty");
      read_opt(pj, "epsilon", r.penalty.epsilon);
      read_opt(pj, "tau0", r.penalty.tau0);
      read_opt(pj, "n_tau", r.penalty.n_tau);
      read_opt(pj, "max_tuning_iters", r.penalty.max_tuning_iters);
      read_opt(pj, "tau_cap", r.penalty.tau_cap);
      if (pj.contains("residual")) r.penalty.residual = residual_mode_from_string(pj.at("residual").get<std::string>());
    }
    read_opt(j, "output_dir", c.output_dir);
    read_opt(j, "seed", c.seed);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("case file: ") + e.what());
  }
  c.validate();
  return c;
}

CaseConfig load_case_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open case file '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_case_config(ss.str(), fs::path(path).parent_path().string().empty() ? "." : fs::path(path).parent_path().string());
}

void apply_overrides(CaseConfig& c, const Overrides& o) {
  if (o.output_dir) c.output_dir = *o.output_dir;
  if (o.modes_u) c.modes_u = *o.modes_u;
  if (o.modes_p) c.modes_p = *o.modes_p;
  if (o.method) c.rom.method = *o.method;
  if (o.epsilon) c.rom.penalty.epsilon = *o.epsilon;
  if (o.tau0) c.rom.penalty.tau0 = *o.tau0;
  if (o.n_tau) c.rom.penalty.n_tau = *o.n_tau;
  if (o.seed) c.seed = *o.seed;
  c.validate();
}

void cmd_fom(const CaseConfig& config, bool reference) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  FomConfig f = config.fom;
  if (reference) {
    f.bc_schedule = config.rom.bc_schedule;
    f.t_end = config.rom.t_online;
    f.snapshot_interval = config.rom.output_interval;
  }
  const auto t0 = std::chrono::steady_clock::now();
  const SnapshotSet set = solve_transient(mesh, f);
  const double seconds = seconds_since(t0);
  const std::string dir = reference ? layout.reference() : layout.snapshots();
  const json provenance = {{"case", to_string(config.kind)}, {"cells", mesh->num_cells()}, {"fom", f.canonical_text()}};
  write_snapshots(dir, set, provenance.dump());
  write_json(dir + "/timing.json", {{"seconds", seconds}, {"steps", f.num_steps()}, {"cells", mesh->num_cells()}});
}

void cmd_lifting(const CaseConfig& config) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  PodBasis lifts;
  std::vector<std::string> patches;
  for (const auto& p : mesh->patches())
    if (p.kind == PatchKind::DirichletVelocity) patches.push_back(p.name);
  if (config.kind == CaseKind::Cavity) {
    FomConfig f = config.fom;
    f.nu = config.lifting_nu;
    const SteadyResult s = solve_steady(mesh, f, 0.0);
    for (const auto& patch : patches) lifts.liftings.push_back(make_lifting(s.velocity, patch));
  } else {
    for (const auto& patch : patches) {
      std::map<std::string, double> speed;
      for (const auto& q : patches) speed[q] = q == patch ? 1.0 : 0.0;
      lifts.liftings.push_back(make_lifting(solve_potential_flow(mesh, speed).velocity, patch));
    }
  }
  for (const auto& l : lifts.liftings) lifts.modes.push_back(l.mode);
  write_basis(layout.lifting(), lifts);
}

void cmd_pod(const CaseConfig& config) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  const SnapshotSet snaps = read_snapshots(layout.snapshots(), mesh);
  const std::string lineage = snapshot_hash(snaps);
  PodBasis bu;
  if (config.rom.method == BoundaryMethod::Lifting) {
    const PodBasis lifts = read_basis(layout.lifting(), mesh);
    const auto hom = homogenize_snapshots(snaps.velocity, lifts.liftings, snaps.bc_trace);
    bu = extend_basis_with_lifting(compute_pod(hom, config.modes_u), lifts.liftings);
  } else {
    bu = compute_pod(snaps.velocity, config.modes_u);
  }
  const PodBasis bp = compute_pod(snaps.pressure, config.modes_p, ComponentTag::Pressure);
  write_basis(layout.basis_u(), bu, lineage);
  write_basis(layout.basis_p(), bp, lineage);

  const auto cu = cumulative_energy(bu.eigenvalues);
  const auto cp = cumulative_energy(bp.eigenvalues);
  std::ofstream os(layout.energy_csv());
  if (!os) throw ConfigError("cannot write '" + layout.energy_csv() + "'");
  os.precision(12);
  os << "modes,eigenvalue_u,cumulative_u,eigenvalue_p,cumulative_p\n";
  for (std::size_t k = 0; k < cu.size(); ++k)
    os << k + 1 << ',' << bu.eigenvalues[k] << ',' << cu[k] << ',' << bp.eigenvalues[k] << ',' << cp[k] << '\n';
}

void cmd_project(const CaseConfig& config) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  std::string lineage;
  const Bases b = load_bases(layout, mesh, &lineage);
  ReducedSystem sys = assemble_reduced_system(b.u, b.p, config.fom.nu);
  sys.lineage = lineage;
  write_reduced_system(sys, layout.reduced_system());
}

void cmd_tune(const CaseConfig& config) {
  if (config.rom.method != BoundaryMethod::Penalty) throw ConfigError("tune-penalty needs method penalty");
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  const ReducedSystem sys = read_reduced_system(layout.reduced_system());
  const Bases b = load_bases(layout, mesh);
  if (combined_basis_hash(b.u, b.p) != sys.basis_hash) throw ConfigError("reduced system does not match the bases on disk");
  const auto [a0, b0] = initial_coefficients(config, layout, mesh, b);
  const TuningResult t = tune_penalty(sys, config.rom, a0, b0);

  json terms = json::array();
  for (std::size_t l = 0; l < sys.penalty.size(); ++l)
    terms.push_back({{"name", term_name(sys.penalty[l])}, {"tau", t.tau[l]}});
  write_json(layout.penalty(), {{"terms", terms},
                                {"converged", t.converged},
                                {"updates", t.updates},
                                {"epsilon", config.rom.penalty.epsilon},
                                {"step_residuals", t.step_residuals},
                                {"basis_hash", sys.basis_hash}});

  std::ofstream os(layout.tuning_trace());
  if (!os) throw ConfigError("cannot write '" + layout.tuning_trace() + "'");
  os.precision(12);
  os << "step,iteration";
  for (const auto& term : sys.penalty) os << ",tau_" << term_name(term);
  for (const auto& term : sys.penalty) os << ",residual_" << term_name(term);
  os << '\n';
  for (const auto& r : t.trace) {
    os << r.step << ',' << r.iteration;
    for (double v : r.tau) os << ',' << v;
    for (double v : r.residual) os << ',' << v;
    os << '\n';
  }
  if (!t.converged) throw NumericalError("penalty tuning did not converge within " +
                                         std::to_string(config.rom.penalty.max_tuning_iters) + " updates");
}

void cmd_rom(const CaseConfig& config) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  const ReducedSystem sys = read_reduced_system(layout.reduced_system());
  if (sys.lineage != snapshot_manifest_hash(layout.snapshots()))
    throw ConfigError("reduced system was not built from the snapshots in '" + layout.snapshots() + "'");
  const Bases b = load_bases(layout, mesh);
  if (combined_basis_hash(b.u, b.p) != sys.basis_hash) throw ConfigError("reduced system does not match the bases on disk");

  RomConfig rc = config.rom;
  if (rc.method == BoundaryMethod::Penalty) rc.tau = load_tau(layout, sys);
  const auto [a0, b0] = initial_coefficients(config, layout, mesh, b);
  const RomResult res = integrate(sys, rc, a0, b0);

  fs::create_directories(layout.rom() + "/fields");
  write_trajectory_csv(layout.rom() + "/trajectory.csv", res, sys, rc.bc_schedule);
  for (std::size_t n = 0; n < res.trajectory.size(); ++n) {
    Field u = reconstruct(b.u, res.trajectory.a[n]);
    Field p = reconstruct(b.p, res.trajectory.b[n]);
    u.time_stamp = p.time_stamp = res.trajectory.times[n];
    write_field(u, layout.rom() + "/fields/" + format_index("u", n));
    write_field(p, layout.rom() + "/fields/" + format_index("p", n));
  }
  write_json(layout.rom() + "/summary.json", {{"method", to_string(rc.method)},
                                              {"steps", rc.num_steps()},
                                              {"times", res.trajectory.times},
                                              {"max_newton_iterations", res.max_newton_iterations},
                                              {"max_newton_residual", res.max_newton_residual},
                                              {"basis_hash", sys.basis_hash},
                                              {"lineage", sys.lineage},
                                              {"wall_seconds", res.wall_seconds}});
}

void cmd_compare(const CaseConfig& config) {
  const Layout layout{config.output_dir};
  const MeshPtr mesh = config.build_mesh();
  const std::string ref_dir = config.separate_reference ? layout.reference() : layout.snapshots();
  const SnapshotSet ref = read_snapshots(ref_dir, mesh);
  const Bases b = load_bases(layout, mesh);
  const json rom = read_json(layout.rom() + "/summary.json");
  const auto times = rom.at("times").get<std::vector<double>>();
  if (times.size() > ref.size()) throw ConfigError("reference in '" + ref_dir + "' is shorter than the ROM trajectory");

  std::vector<Field> ref_u, ref_p, rom_u, rom_p;
  std::vector<std::map<std::string, Vec2>> bc;
  for (std::size_t n = 0; n < times.size(); ++n) {
    if (std::abs(ref.times[n] - times[n]) > 1e-9 * std::max(1.0, times[n]))
      throw ConfigError("ROM output times do not line up with the reference snapshots");
    ref_u.push_back(ref.velocity[n]);
    ref_p.push_back(ref.pressure[n]);
    rom_u.push_back(read_field(layout.rom() + "/fields/" + format_index("u", n), mesh));
    rom_p.push_back(read_field(layout.rom() + "/fields/" + format_index("p", n), mesh));
    std::map<std::string, Vec2> at;
    for (const auto& [patch, trace] : ref.bc_trace) at[patch] = trace[n];
    bc.push_back(std::move(at));
  }
  auto errors = [](const std::vector<Field>& r, const std::vector<Field>& c) {
    std::vector<std::optional<double>> e;
    for (std::size_t n = 0; n < r.size(); ++n) e.push_back(relative_l2_error(r[n], c[n]));
    return e;
  };
  std::vector<ErrorSeries> series{{"u_prediction", errors(ref_u, rom_u)},
                                  {"p_prediction", errors(ref_p, rom_p)},
                                  {"u_projection", projection_error_series(ref_u, b.u, bc)},
                                  {"p_projection", projection_error_series(ref_p, b.p)},
                                  {"kinetic_energy", kinetic_energy_error(ref_u, rom_u)}};
  fs::create_directories(layout.compare());
  write_error_csv(layout.compare() + "/errors.csv", times, series);

  json averages;
  for (const auto& s : series) {
    const double v = time_average(times, s.values, config.t_transient);
    averages[s.name] = std::isfinite(v) ? json(v) : json(nullptr);
  }
  const json fom_timing = read_json(layout.snapshots() + "/timing.json");
  const TimingReport tr = timing_report({{"fom", fom_timing.at("seconds").get<double>()},
                                         {"rom", rom.at("wall_seconds").get<double>()}});
  write_json(layout.compare() + "/summary.json", {{"method", rom.at("method")},
                                                  {"t_transient", config.t_transient},
                                                  {"time_averaged", averages},
                                                  {"fom_seconds", tr.fom_seconds},
                                                  {"rom_seconds", tr.rom_seconds},
                                                  {"speedup", tr.speedup}});
}

}  // namespace romforge
