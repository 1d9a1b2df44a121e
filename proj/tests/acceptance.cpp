// Acceptance run: one PASS/FAIL line per criterion, non-zero exit on any
// failure. The desk cases come from configs/; artifacts go to argv[1] or a
// temporary directory.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "oracles.hpp"
#include "romforge/errors.hpp"
#include "romforge/fom.hpp"
#include "romforge/galerkin.hpp"
#include "romforge/pipeline.hpp"
#include "romforge/pod.hpp"
#include "romforge/rom.hpp"

using namespace romforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Tolerances.
constexpr double kNoneError = 1.0, kNoneTol = 1e-6;
constexpr double kEpsilon = 1e-5;
constexpr int kMaxTuning = 50;
constexpr double kMethodRatio = 2.0, kVelocityError = 5e-2, kPressureError = 5e-1;
constexpr double kProjection = 1e-2, kEnergy = 0.9999;
constexpr double kOperatorAbs = 1e-12, kContractionRel = 1e-10;
constexpr double kGram = 1e-8, kTrace = 1e-10, kBoundary = 1e-10;
constexpr double kJunctionError = 1e-1;
constexpr double kSpeedup = 10.0;
constexpr double kCentreline = 5e-2;

using Clock = std::chrono::steady_clock;

double since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

struct Verdict {
  bool pass = true;
  std::string detail;
  double seconds = 0.0;
  double budget = 0.0;
};

std::map<int, Verdict> verdicts;

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json read_json(const fs::path& p) {
  std::ifstream is(p);
  return json::parse(is);
}

// Columns of compare/errors.csv by header name.
std::map<std::string, std::vector<double>> read_csv(const fs::path& p) {
  std::ifstream is(p);
  std::string line;
  std::getline(is, line);
  std::vector<std::string> names;
  std::stringstream hs(line);
  for (std::string c; std::getline(hs, c, ',');) names.push_back(c);
  std::map<std::string, std::vector<double>> out;
  while (std::getline(is, line)) {
    std::stringstream ls(line);
    std::size_t k = 0;
    for (std::string c; std::getline(ls, c, ',') && k < names.size(); ++k) out[names[k]].push_back(std::strtod(c.c_str(), nullptr));
  }
  return out;
}

struct MethodRun {
  json summary;
  std::map<std::string, std::vector<double>> errors;
  std::map<std::string, std::vector<double>> energy;
  double seconds = 0.0;
};

MethodRun run_method(CaseConfig c, BoundaryMethod m) {
  const auto t0 = Clock::now();
  c.rom.method = m;
  cmd_pod(c);
  cmd_project(c);
  if (m == BoundaryMethod::Penalty) cmd_tune(c);
  cmd_rom(c);
  cmd_compare(c);
  const Layout l{c.output_dir};
  MethodRun r;
  r.summary = read_json(fs::path(l.compare()) / "summary.json");
  r.errors = read_csv(fs::path(l.compare()) / "errors.csv");
  r.energy = read_csv(l.energy_csv());
  r.seconds = since(t0);
  return r;
}

double averaged(const MethodRun& r, const char* name) {
  const auto& v = r.summary.at("time_averaged").at(name);
  return v.is_null() ? NAN : v.get<double>();
}

CaseConfig load(const char* name, const fs::path& out) {
  CaseConfig c = load_case_config((fs::path(ROMFORGE_SOURCE_DIR) / "configs" / name).string());
  Overrides o;
  o.output_dir = out.string();
  apply_overrides(c, o);
  return c;
}

// Guards a criterion body so one exception does not hide the rest.
void criterion(int id, double budget, const std::function<void(Verdict&)>& body) {
  Verdict v;
  v.budget = budget;
  const auto t0 = Clock::now();
  try {
    body(v);
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail += std::string(" exception: ") + e.what();
  }
  if (v.seconds == 0.0) v.seconds = since(t0);
  if (v.seconds > budget) {
    v.pass = false;
    v.detail += " over time budget";
  }
  verdicts[id] = v;
  std::printf("  [criterion %d evaluated in %.1f s]\n", id, v.seconds);
  std::fflush(stdout);
}

// Desk cavity runs shared by criteria 1-4, 6 and 8.
struct CavityRuns {
  CaseConfig config;
  double fom_seconds = 0.0, lifting_seconds = 0.0;
  MethodRun lifting, penalty, none;
  json tuning;
  std::vector<std::map<std::string, double>> trace;
};

std::vector<std::map<std::string, double>> read_trace(const fs::path& p) {
  const auto cols = read_csv(p);
  std::vector<std::map<std::string, double>> rows(cols.begin()->second.size());
  for (const auto& [name, values] : cols)
    for (std::size_t i = 0; i < values.size(); ++i) rows[i][name] = values[i];
  return rows;
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::temp_directory_path() / "romforge_acceptance";
  fs::remove_all(root);
  fs::create_directories(root);
  std::printf("acceptance artifacts in %s\n", root.string().c_str());

  CavityRuns cav;
  cav.config = load("cavity-desk.json", root / "cavity");
  cav.config.rom.penalty.epsilon = kEpsilon;
  cav.config.rom.penalty.tau0 = 1e-6;
  cav.config.rom.penalty.n_tau = 5;
  cav.config.rom.penalty.max_tuning_iters = kMaxTuning;
  {
    auto t0 = Clock::now();
    cmd_fom(cav.config);
    cav.fom_seconds = since(t0);
    t0 = Clock::now();
    cmd_lifting(cav.config);
    cav.lifting_seconds = since(t0);
    std::printf("  cavity full-order run %.1f s, lifting %.1f s\n", cav.fom_seconds, cav.lifting_seconds);
  }
  const Layout cl{cav.config.output_dir};
  const MeshPtr cmesh = cav.config.build_mesh();

  criterion(1, 60.0, [&](Verdict& v) {
    cav.none = run_method(cav.config, BoundaryMethod::None);
    const auto& t = cav.none.errors.at("time");
    const auto& e = cav.none.errors.at("u_prediction");
    double worst = 0.0;
    int checked = 0;
    for (std::size_t n = 0; n < t.size(); ++n) {
      if (std::isnan(e[n])) continue;  // zero reference at t = 0
      worst = std::max(worst, std::abs(e[n] - kNoneError));
      ++checked;
    }
    v.pass = checked + 1 >= static_cast<int>(t.size()) && worst <= kNoneTol;
    v.detail = "max |err - 1| = " + fmt("%.2e", worst) + " over " + std::to_string(checked) + " times";
  });

  criterion(2, 300.0, [&](Verdict& v) {
    const auto t0 = Clock::now();
    cav.penalty = run_method(cav.config, BoundaryMethod::Penalty);
    v.seconds = since(t0);
    cav.tuning = read_json(cl.penalty());
    cav.trace = read_trace(cl.tuning_trace());
    const int updates = cav.tuning.at("updates").get<int>();
    double worst = 0.0;
    for (const auto& step : cav.tuning.at("step_residuals"))
      for (const auto& r : step) worst = std::max(worst, std::abs(r.get<double>()));
    bool monotone = true;
    for (std::size_t k = 1; k < cav.trace.size(); ++k) {
      const auto& prev = cav.trace[k - 1];
      const auto& cur = cav.trace[k];
      if (cur.at("step") != prev.at("step")) continue;
      for (const auto& [name, tau] : cur) {
        if (name.rfind("tau_", 0) != 0) continue;
        const double r = prev.at("residual_" + name.substr(4));
        if (std::abs(r) > kEpsilon && !(tau > prev.at(name))) monotone = false;
      }
    }
    v.pass = cav.tuning.at("converged").get<bool>() && updates <= kMaxTuning && worst <= kEpsilon && monotone;
    v.detail = std::to_string(updates) + " updates, max step residual " + fmt("%.2e", worst) + ", tau " +
               cav.tuning.at("terms").dump() + (monotone ? ", trace increasing" : ", trace NOT increasing");
  });

  criterion(3, 600.0, [&](Verdict& v) {
    cav.lifting = run_method(cav.config, BoundaryMethod::Lifting);
    v.seconds = cav.fom_seconds + cav.lifting_seconds + cav.lifting.seconds + cav.penalty.seconds;
    const double el = averaged(cav.lifting, "u_prediction"), ep = averaged(cav.penalty, "u_prediction");
    const double pl = averaged(cav.lifting, "p_prediction"), pp = averaged(cav.penalty, "p_prediction");
    const double ratio = std::max(el, ep) / std::min(el, ep);
    v.pass = ratio <= kMethodRatio && el <= kVelocityError && ep <= kVelocityError && pl <= kPressureError &&
             pp <= kPressureError;
    v.detail = "u error lifting " + fmt("%.3e", el) + " penalty " + fmt("%.3e", ep) + " (ratio " + fmt("%.2f", ratio) +
               "), p error lifting " + fmt("%.3e", pl) + " penalty " + fmt("%.3e", pp);
  });

  criterion(4, 600.0, [&](Verdict& v) {
    v.seconds = verdicts.at(3).seconds;
    bool ok = true;
    std::string d;
    for (const auto* run : {&cav.lifting, &cav.penalty}) {
      const double proj = averaged(*run, "u_projection"), pred = averaged(*run, "u_prediction");
      // cumulative energy of the ten POD modes of this run's basis
      const auto& cum = run->energy.at("cumulative_u");
      const double energy = cum.size() >= 10 ? cum[9] : NAN;
      ok = ok && proj <= pred && proj <= kProjection && energy >= kEnergy;
      d += run->summary.at("method").get<std::string>() + ": projection " + fmt("%.3e", proj) + " <= prediction " +
           fmt("%.3e", pred) + ", energy(10) " + fmt("%.6f", energy) + "; ";
    }
    v.pass = ok;
    v.detail = d;
  });

  criterion(5, 10.0, [&](Verdict& v) {
    std::mt19937_64 rng(cav.config.seed + 5);
    std::normal_distribution<double> n01;
    auto mesh = oracle::cavity(8);
    const PodBasis u = oracle::random_basis(mesh, 2, 3, rng);
    const PodBasis p = oracle::random_basis(mesh, 1, 3, rng);
    const ReducedSystem sys = assemble_reduced_system(u, p, 1e-2);
    const oracle::Reduced ref = oracle::reduce(u, p);
    double worst = 0.0;
    auto upd = [&](const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) { worst = std::max(worst, (a - b).cwiseAbs().maxCoeff()); };
    upd(sys.M, ref.M);
    upd(sys.A, ref.A);
    upd(sys.B, ref.B);
    upd(sys.D, ref.D);
    for (const auto& t : sys.penalty) {
      upd(t.p1, oracle::penalty_matrix(u, t.patch, t.component));
      upd(t.p2, oracle::penalty_vector(u, t.patch, t.component));
    }
    double contraction = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
      const Eigen::VectorXd a = Eigen::VectorXd::NullaryExpr(3, [&] { return n01(rng); });
      const Field ur = reconstruct(u, a);
      const Eigen::MatrixXd conv = oracle::convection(ur, ur);
      Eigen::VectorXd r(3);
      for (int i = 0; i < 3; ++i) r[i] = oracle::inner(*mesh, oracle::cells(u.modes[i]), conv);
      contraction = std::max(contraction, (contract(sys.C, a) - r).norm() / r.norm());
    }
    v.pass = worst <= kOperatorAbs && contraction <= kContractionRel;
    v.detail = "max entry deviation " + fmt("%.2e", worst) + ", contraction " + fmt("%.2e", contraction);
  });

  criterion(6, 30.0, [&](Verdict& v) {
    // desk cavity lifted basis
    const SnapshotSet snaps = read_snapshots(cl.snapshots(), cmesh);
    const PodBasis lifts = read_basis(cl.lifting(), cmesh);
    const auto hom = homogenize_snapshots(snaps.velocity, lifts.liftings, snaps.bc_trace);
    const PodBasis b = compute_pod(hom, cav.config.modes_u);
    double gram = 0.0;
    for (int i = 0; i < b.size(); ++i)
      for (int j = 0; j < b.size(); ++j)
        gram = std::max(gram, std::abs(oracle::inner(*cmesh, oracle::cells(b.modes[i]), oracle::cells(b.modes[j])) - (i == j)));
    double sum_l = 0.0, sum_n = 0.0;
    for (double l : b.eigenvalues) sum_l += l;
    for (const auto& f : hom) sum_n += oracle::inner(*cmesh, oracle::cells(f), oracle::cells(f));
    const double trace = std::abs(sum_l - sum_n) / sum_n;
    double lid = 0.0, u_lid = 0.0;
    const int ilid = *cmesh->find_patch("lid");
    for (const auto& m : b.modes) lid = std::max(lid, m.max_abs_on_patch(ilid));
    for (const auto& v2 : snaps.bc_trace.at("lid")) u_lid = std::max(u_lid, v2.norm());

    // analytic two-mode set
    std::mt19937_64 rng(cav.config.seed + 6);
    auto mesh = oracle::cavity(16);
    const Field g1 = oracle::random_field(mesh, 2, rng), g2 = oracle::random_field(mesh, 2, rng);
    std::vector<Field> s;
    for (int n = 0; n < 40; ++n) s.push_back(std::sin(0.3 * n) * g1 + std::cos(0.3 * n) * g2);
    const PodBasis two = compute_pod(s, 2);
    int significant = 0;
    for (double l : two.eigenvalues) significant += l > 1e-10 * two.eigenvalues.front();

    v.pass = gram <= kGram && trace <= kTrace && lid <= kBoundary * u_lid && significant == 2;
    v.detail = "gram " + fmt("%.2e", gram) + ", trace " + fmt("%.2e", trace) + ", lid " + fmt("%.2e", lid) +
               ", significant eigenvalues " + std::to_string(significant);
  });

  // Desk T-junction, both methods, online schedule over 1.5x the training horizon.
  CaseConfig tj = load("tjunction-desk.json", root / "tjunction");
  tj.rom.penalty.epsilon = kEpsilon;
  double tj_fom = 0.0;
  MethodRun tl, tp;
  json tj_tuning;
  criterion(7, 900.0, [&](Verdict& v) {
    auto t0 = Clock::now();
    cmd_fom(tj);
    tj_fom = since(t0);
    cmd_fom(tj, true);
    cmd_lifting(tj);
    std::printf("  junction full-order runs and liftings %.1f s\n", since(t0));
    tl = run_method(tj, BoundaryMethod::Lifting);
    tp = run_method(tj, BoundaryMethod::Penalty);
    tj_tuning = read_json(Layout{tj.output_dir}.penalty());
    double worst = 0.0;
    for (const auto& step : tj_tuning.at("step_residuals"))
      for (const auto& r : step) worst = std::max(worst, std::abs(r.get<double>()));
    const double el = averaged(tl, "u_prediction"), ep = averaged(tp, "u_prediction");
    const double horizon = tj.rom.t_online / tj.fom.t_end;
    v.pass = el <= kJunctionError && ep <= kJunctionError && worst <= kEpsilon && horizon >= 1.5 &&
             tj_tuning.at("converged").get<bool>();
    v.detail = "u error lifting " + fmt("%.3e", el) + " penalty " + fmt("%.3e", ep) + ", p error lifting " +
               fmt("%.3e", averaged(tl, "p_prediction")) + " penalty " + fmt("%.3e", averaged(tp, "p_prediction")) +
               ", tuned-step residual " + fmt("%.2e", worst) + " after " + std::to_string(tj_tuning.at("updates").get<int>()) +
               " updates, horizon x" + fmt("%.2f", horizon);
  });

  criterion(8, 1e9, [&](Verdict& v) {
    double lowest = INFINITY;
    std::string d;
    for (const auto& [name, run] : std::vector<std::pair<std::string, const MethodRun*>>{
             {"cavity lifting", &cav.lifting}, {"cavity penalty", &cav.penalty}, {"junction lifting", &tl}, {"junction penalty", &tp}}) {
      const double s = run->summary.at("speedup").get<double>();
      lowest = std::min(lowest, s);
      d += name + " " + fmt("%.1f", s) + "x (" + fmt("%.2f", run->summary.at("fom_seconds").get<double>()) + " s / " +
           fmt("%.3f", run->summary.at("rom_seconds").get<double>()) + " s); ";
    }
    v.pass = lowest >= kSpeedup;
    v.detail = d;
  });

  criterion(9, 1e9, [&](Verdict& v) {
    FomConfig f = cav.config.fom;
    f.nu = 1e-3;  // Re = U L / nu = 100
    auto coarse = std::make_shared<const StructuredMesh2D>(build_cavity_mesh(64, cav.config.length));
    auto fine = std::make_shared<const StructuredMesh2D>(build_cavity_mesh(128, cav.config.length));
    const auto uc = oracle::centreline_u(solve_steady(coarse, f).velocity);
    const auto uf = oracle::centreline_u(solve_steady(fine, f).velocity);
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < uc.size(); ++j) {
      const double r = 0.5 * (uf[2 * j] + uf[2 * j + 1]);
      num += (uc[j] - r) * (uc[j] - r);
      den += r * r;
    }
    const double rel = std::sqrt(num / den);
    v.pass = rel <= kCentreline;
    v.detail = "centreline relative L2 " + fmt("%.3e", rel);
  });

  std::printf("\n");
  bool all = true;
  for (const auto& [id, v] : verdicts) {
    all = all && v.pass;
    std::printf("%s criterion %d: %s [%.1f s]\n", v.pass ? "PASS" : "FAIL", id, v.detail.c_str(), v.seconds);
  }
  return all ? 0 : 1;
}
