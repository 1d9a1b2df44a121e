#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>

#include "oracles.hpp"
#include "romforge/errors.hpp"
#include "romforge/fom.hpp"
#include "romforge/fv_operators.hpp"
#include "romforge/io.hpp"

using namespace romforge;
namespace fs = std::filesystem;

namespace {

FomConfig cavity_config(double lid, double nu, double t_end, double interval, double dt) {
  FomConfig c;
  c.nu = nu;
  c.dt = dt;
  c.t_end = t_end;
  c.snapshot_interval = interval;
  c.bc_schedule["lid"] = PiecewiseLinear::constant({lid, 0.0});
  return c;
}

FomConfig junction_config(double u1, double u2) {
  FomConfig c;
  c.nu = 1e-2;
  c.dt = 5e-3;
  c.t_end = 0.05;
  c.snapshot_interval = 0.05;
  c.convection_blend = 0.5;
  c.bc_schedule["inlet1"] = PiecewiseLinear::constant({u1, 0.0});
  c.bc_schedule["inlet2"] = PiecewiseLinear::constant({-u2, 0.0});
  return c;
}

double patch_flux(const StructuredMesh2D& mesh, const FaceFluxes& flux, const std::string& name) {
  const auto& f = flux.boundary[static_cast<std::size_t>(*mesh.find_patch(name))];
  return std::accumulate(f.begin(), f.end(), 0.0);
}

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

}  // namespace

TEST_SUITE("fom") {

TEST_CASE("snapshot counts of the reference setups") {
  auto cav = oracle::cavity(4, 0.1);
  const FomConfig full = cavity_config(1.0, 1e-4, 10.0, 0.01, 5e-4);
  full.validate(*cav);
  CHECK(full.num_steps() / full.steps_per_snapshot() + 1 == 1001);

  auto tj = oracle::junction(4, 4);
  FomConfig j = junction_config(1.0, 1.0);
  j.t_end = 12.0;
  j.snapshot_interval = 0.03;
  j.dt = 5e-4;
  j.validate(*tj);
  CHECK(j.num_steps() / j.steps_per_snapshot() + 1 == 401);
}

TEST_CASE("invalid configurations are rejected") {
  auto mesh = oracle::cavity(4);
  FomConfig c = cavity_config(1.0, 1e-2, 1.0, 0.015, 0.01);
  CHECK_THROWS_AS(c.validate(*mesh), ConfigError);
  c.snapshot_interval = 0.02;
  c.nu = 0.0;
  CHECK_THROWS_AS(c.validate(*mesh), ConfigError);
  c.nu = 1e-2;
  c.bc_schedule.clear();
  CHECK_THROWS_AS(c.validate(*mesh), ConfigError);
  c.bc_schedule["nope"] = PiecewiseLinear::constant({1.0, 0.0});
  CHECK_THROWS_AS(c.validate(*mesh), ConfigError);
}

TEST_CASE("short cavity run: counts, times and divergence") {
  auto mesh = oracle::cavity(16, 0.1);
  const FomConfig c = cavity_config(1.0, 1e-3, 0.01, 0.002, 1e-3);
  const SnapshotSet s = solve_transient(mesh, c);
  REQUIRE(s.size() == 6);
  CHECK(s.times.front() == 0.0);
  for (std::size_t n = 1; n < s.size(); ++n) CHECK(s.times[n] > s.times[n - 1]);
  CHECK(s.velocity.size() == s.size());
  CHECK(s.pressure.size() == s.size());
  CHECK(l2_norm(s.velocity.front()) == 0.0);
  // U/L = 10
  for (std::size_t n = 0; n < s.size(); ++n) CHECK(max_abs(flux_divergence(*mesh, s.fluxes[n])) < 1e-6 * 10.0);
  for (double r : s.continuity_residual) CHECK(r < 1e-5);
  for (double m : s.mass_imbalance) CHECK(m < 1e-8);
  for (const Vec2& v : s.bc_trace.at("lid")) CHECK((v.x == 1.0 && v.y == 0.0));
  // the lid value is imposed on every face
  const int lid = *mesh->find_patch("lid");
  for (std::size_t i = 0; i < mesh->patches()[static_cast<std::size_t>(lid)].size(); ++i)
    CHECK(s.velocity.back().boundary(lid, static_cast<int>(i), 0) == 1.0);
}

TEST_CASE("zero lid and zero initial field stay at rest") {
  auto mesh = oracle::cavity(8);
  const SnapshotSet s = solve_transient(mesh, cavity_config(0.0, 1e-2, 0.05, 0.01, 0.01));
  for (std::size_t n = 0; n < s.size(); ++n) {
    CHECK(l2_norm(s.velocity[n]) == 0.0);
    const auto pc = oracle::cells(s.pressure[n]);
    CHECK(pc.maxCoeff() - pc.minCoeff() == 0.0);
  }
}

TEST_CASE("boundary trace is the schedule sampled at snapshot times") {
  auto mesh = oracle::cavity(8);
  FomConfig c = cavity_config(1.0, 1e-2, 0.1, 0.02, 0.01);
  c.bc_schedule["lid"] = PiecewiseLinear({0.0, 0.05, 0.1}, {{0.0, 0.0}, {1.0, 0.0}, {0.25, 0.0}});
  const SnapshotSet s = solve_transient(mesh, c);
  const auto& trace = s.bc_trace.at("lid");
  REQUIRE(trace.size() == s.size());
  for (std::size_t n = 0; n < s.size(); ++n) {
    const Vec2 v = c.bc_schedule.at("lid").value(s.times[n]);
    CHECK(trace[n].x == v.x);
    CHECK(trace[n].y == v.y);
  }
}

TEST_CASE("snapshot directory round-trip and tamper detection") {
  auto mesh = oracle::cavity(6);
  const SnapshotSet s = solve_transient(mesh, cavity_config(1.0, 1e-2, 0.02, 0.01, 0.01));
  const fs::path dir = fs::temp_directory_path() / "romforge_fom_snapshots";
  fs::remove_all(dir);
  write_snapshots(dir.string(), s, R"({"case": "test"})");
  const SnapshotSet r = read_snapshots(dir.string(), mesh);
  CHECK(snapshot_hash(r) == snapshot_hash(s));
  CHECK(r.times == s.times);
  CHECK(r.config_hash == s.config_hash);
  CHECK_THROWS_AS(write_snapshots((dir / "x").string(), s, "not json"), ConfigError);

  std::ofstream(dir / "u_0001.field", std::ios::binary | std::ios::trunc) << "garbage";
  CHECK_THROWS_AS(read_snapshots(dir.string(), mesh), ConfigError);
}

TEST_CASE("steady junction conserves mass") {
  auto mesh = oracle::junction(4, 8);
  SUBCASE("both inlets at 1 m/s") {
    const SteadyResult r = solve_steady(mesh, junction_config(1.0, 1.0));
    const double in = -(patch_flux(*mesh, r.flux, "inlet1") + patch_flux(*mesh, r.flux, "inlet2"));
    const double out = patch_flux(*mesh, r.flux, "outlet");
    CHECK(in == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(std::abs(out - in) <= 1e-8 * in);
  }
  SUBCASE("inlets at 1 and 0.5 m/s") {
    const SteadyResult r = solve_steady(mesh, junction_config(1.0, 0.5));
    // outlet mean speed = (1 * 0.5 + 0.5 * 0.5) / 1
    const double mean = patch_flux(*mesh, r.flux, "outlet") / mesh->patch("outlet").total_area();
    CHECK(mean == doctest::Approx(0.75).epsilon(1e-8));
  }
  SUBCASE("closed inlets") {
    const SteadyResult r = solve_steady(mesh, junction_config(0.0, 0.0));
    CHECK(l2_norm(r.velocity) == 0.0);
  }
}

TEST_CASE("steady cavity scales with lid speed at fixed Reynolds number") {
  auto mesh = oracle::cavity(10);
  FomConfig c1 = cavity_config(1.0, 0.05, 1.0, 1.0, 1.0);
  FomConfig c2 = cavity_config(2.0, 0.1, 1.0, 1.0, 1.0);
  c1.steady_tolerance = c2.steady_tolerance = 1e-9;
  const Field u1 = solve_steady(mesh, c1).velocity;
  const Field u2 = solve_steady(mesh, c2).velocity;
  CHECK(l2_norm(0.5 * u2 - u1) <= 1e-6 * l2_norm(u1));
}

TEST_CASE("potential flow") {
  SUBCASE("channel gives a plug flow") {
    auto mesh = std::make_shared<const StructuredMesh2D>(build_channel_mesh(12, 4, 3.0, 1.0));
    const auto r = solve_potential_flow(mesh, {{"inlet", 1.0}});
    for (int c = 0; c < mesh->num_cells(); ++c) {
      CHECK(r.velocity.cell(c, 0) == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(r.velocity.cell(c, 1)) < 1e-9);
    }
    CHECK(max_abs(flux_divergence(*mesh, r.flux)) < 1e-8);
  }
  SUBCASE("junction with one open inlet") {
    auto mesh = oracle::junction(4, 8);
    const auto r = solve_potential_flow(mesh, {{"inlet1", 1.0}, {"inlet2", 0.0}});
    const int i1 = *mesh->find_patch("inlet1"), i2 = *mesh->find_patch("inlet2");
    for (std::size_t i = 0; i < mesh->patch("inlet1").size(); ++i) {
      CHECK(r.velocity.boundary(i1, static_cast<int>(i), 0) == 1.0);
      CHECK(r.velocity.boundary(i1, static_cast<int>(i), 1) == 0.0);
      CHECK(r.velocity.boundary(i2, static_cast<int>(i), 0) == 0.0);
    }
    // U/L with U = 1, L = inlet width 0.5
    CHECK(max_abs(flux_divergence(*mesh, r.flux)) < 1e-8 * 2.0);
    CHECK(patch_flux(*mesh, r.flux, "outlet") == doctest::Approx(0.5).epsilon(1e-9));
  }
  SUBCASE("no outlet") {
    CHECK_THROWS_AS(solve_potential_flow(oracle::cavity(4), {{"lid", 1.0}}), NumericalError);
  }
}

TEST_CASE("non-finite initial field aborts the run") {
  auto mesh = oracle::cavity(8);
  const fs::path dir = fs::temp_directory_path() / "romforge_fom_nan";
  fs::create_directories(dir);
  Field u = Field::vector(mesh);
  u.cell(10, 0) = std::numeric_limits<double>::quiet_NaN();
  write_field(u, dir / "u.field");
  write_field(Field::scalar(mesh), dir / "p.field");
  FomConfig c = cavity_config(1.0, 1e-2, 0.05, 0.01, 0.01);
  c.initial_field_source = InitialFieldSource::File;
  c.initial_velocity_file = (dir / "u.field").string();
  c.initial_pressure_file = (dir / "p.field").string();
  CHECK_THROWS_AS(solve_transient(mesh, c), NumericalError);
}

}
