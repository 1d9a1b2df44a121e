#include <cstdio>
#include <exception>
#include <functional>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "romforge/errors.hpp"
#include "romforge/pipeline.hpp"

using namespace romforge;

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericalError = 3;

struct Flags {
  std::string config;
  std::optional<std::string> out;
  std::optional<int> modes_u, modes_p;
  std::optional<std::string> method;
  std::optional<double> epsilon, tau0;
  std::optional<int> n_tau;
  std::optional<std::uint64_t> seed;
  bool reference = false;
};

void add_common(CLI::App* sub, Flags& f) {
  sub->add_option("--config", f.config, "case file (JSON)")->required()->check(CLI::ExistingFile);
  sub->add_option("--out", f.out, "output directory (overrides the case file)");
  sub->add_option("--modes-u", f.modes_u, "velocity POD modes")->check(CLI::PositiveNumber);
  sub->add_option("--modes-p", f.modes_p, "pressure POD modes")->check(CLI::PositiveNumber);
  sub->add_option("--method", f.method, "boundary method")->check(CLI::IsMember({"lifting", "penalty", "none"}));
  sub->add_option("--epsilon", f.epsilon, "penalty tuning tolerance");
  sub->add_option("--tau0", f.tau0, "initial penalty factor");
  sub->add_option("--n-tau", f.n_tau, "steps used for penalty tuning");
  sub->add_option("--seed", f.seed, "random seed");
}

CaseConfig load(const Flags& f) {
  CaseConfig c = load_case_config(f.config);
  Overrides o;
  o.output_dir = f.out;
  o.modes_u = f.modes_u;
  o.modes_p = f.modes_p;
  if (f.method) o.method = boundary_method_from_string(*f.method);
  o.epsilon = f.epsilon;
  o.tau0 = f.tau0;
  o.n_tau = f.n_tau;
  o.seed = f.seed;
  apply_overrides(c, o);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"POD-Galerkin reduced-order models for 2D incompressible flow"};
  app.require_subcommand(1);
  Flags flags;
  std::function<void(const CaseConfig&)> run;

  auto add = [&](const char* name, const char* help, std::function<void(const CaseConfig&)> fn) {
    CLI::App* sub = app.add_subcommand(name, help);
    add_common(sub, flags);
    sub->callback([&run, fn] { run = fn; });
    return sub;
  };
  auto* fom = add("fom", "run the full-order model and store snapshots", [&](const CaseConfig& c) { cmd_fom(c, flags.reference); });
  fom->add_flag("--reference", flags.reference, "use the online schedule and write the comparison reference");
  add("lifting", "compute lifting functions", cmd_lifting);
  add("pod", "compute velocity and pressure bases", cmd_pod);
  add("project", "assemble the reduced system", cmd_project);
  add("tune-penalty", "tune the penalty factors", cmd_tune);
  add("rom", "integrate the reduced system", cmd_rom);
  add("compare", "error and timing report against full-order results", cmd_compare);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }
  try {
    run(load(flags));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kConfigError;
  } catch (const NumericalError& e) {
    std::fprintf(stderr, "numerical failure: %s\n", e.what());
    return kNumericalError;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}
