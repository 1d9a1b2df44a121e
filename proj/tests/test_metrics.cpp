#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <random>

#include "oracles.hpp"
#include "romforge/errors.hpp"
#include "romforge/metrics.hpp"

using namespace romforge;
namespace fs = std::filesystem;

TEST_SUITE("metrics") {

TEST_CASE("relative error") {
  std::mt19937_64 rng(51);
  auto mesh = oracle::cavity(6);
  const Field x = oracle::random_field(mesh, 2, rng);
  const Field y = oracle::random_field(mesh, 2, rng);
  CHECK(*relative_l2_error(x, x) == 0.0);
  CHECK(*relative_l2_error(x, Field::vector(mesh)) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(*relative_l2_error(x, 2.0 * x) == doctest::Approx(1.0).epsilon(1e-15));
  CHECK_FALSE(relative_l2_error(Field::vector(mesh), x).has_value());

  const Eigen::MatrixXd d = oracle::cells(x) - oracle::cells(y);
  const double ref = std::sqrt(oracle::inner(*mesh, d, d) / oracle::inner(*mesh, oracle::cells(x), oracle::cells(x)));
  CHECK(*relative_l2_error(x, y) == doctest::Approx(ref).epsilon(1e-13));
  for (double s : {1e-3, 7.0, -2.0}) CHECK(*relative_l2_error(s * x, s * y) == doctest::Approx(ref).epsilon(1e-13));
}

TEST_CASE("kinetic energy error") {
  std::mt19937_64 rng(52);
  auto mesh = oracle::cavity(5);
  std::vector<Field> ref, same, scaled;
  for (int n = 0; n < 4; ++n) {
    Field f = oracle::random_field(mesh, 2, rng);
    f.time_stamp = 0.1 * n;
    ref.push_back(f);
    same.push_back(f);
    Field g = std::sqrt(2.0) * f;
    g.time_stamp = f.time_stamp;
    scaled.push_back(g);
  }
  for (const auto& e : kinetic_energy_error(ref, same)) CHECK(*e == 0.0);
  for (const auto& e : kinetic_energy_error(ref, scaled)) CHECK(*e == doctest::Approx(1.0).epsilon(1e-14));

  scaled[2].time_stamp = 0.25;
  CHECK_THROWS_AS(kinetic_energy_error(ref, scaled), std::invalid_argument);
  scaled.pop_back();
  CHECK_THROWS_AS(kinetic_energy_error(ref, scaled), std::invalid_argument);
  ref[0] = Field::vector(mesh);
  CHECK_FALSE(kinetic_energy_error(ref, same)[0].has_value());
}

TEST_CASE("prediction and projection series") {
  std::mt19937_64 rng(53);
  auto mesh = oracle::cavity(6);
  std::vector<Field> s;
  for (int n = 0; n < 8; ++n) s.push_back(oracle::random_field(mesh, 2, rng));
  const PodBasis b = compute_pod(s, 3);
  std::vector<Eigen::VectorXd> coeffs;
  for (const auto& f : s) coeffs.push_back(project_field(f, b));
  const auto pred = prediction_error_series(s, b, coeffs);
  const auto proj = projection_error_series(s, b);
  REQUIRE(pred.size() == 8);
  for (std::size_t n = 0; n < 8; ++n) {
    CHECK(*pred[n] == doctest::Approx(*proj[n]).epsilon(1e-14));
    CHECK(*proj[n] == doctest::Approx(*relative_l2_error(s[n], reconstruct(b, coeffs[n]))).epsilon(1e-14));
  }
  // zero coefficients predict nothing
  for (auto& c : coeffs) c.setZero();
  for (const auto& e : prediction_error_series(s, b, coeffs)) CHECK(*e == doctest::Approx(1.0).epsilon(1e-15));
  coeffs.pop_back();
  CHECK_THROWS_AS(prediction_error_series(s, b, coeffs), std::invalid_argument);
}

TEST_CASE("time average") {
  const std::vector<double> t{0.0, 1.0, 2.0, 3.0, 4.0};
  const std::vector<std::optional<double>> v{std::nullopt, 5.0, 1.0, 2.0, std::nullopt};
  CHECK(time_average(t, v, -1.0) == doctest::Approx(8.0 / 3.0));
  CHECK(time_average(t, v, 2.0) == 2.0);
  CHECK(std::isnan(time_average(t, v, 10.0)));
  CHECK_THROWS_AS(time_average(t, {1.0}, 0.0), std::invalid_argument);
}

TEST_CASE("timing report") {
  const auto r = timing_report({{"fom", 100.0}, {"pod", 3.0}, {"rom", 1.0}});
  CHECK(r.speedup == 100.0);
  CHECK(r.phases.size() == 3);
  // reported cavity timings: 37 min against 8.2 s and 7.2 s
  CHECK(timing_report({{"fom", 37 * 60.0}, {"rom", 8.2}}).speedup == doctest::Approx(270).epsilon(0.01));
  CHECK(timing_report({{"fom", 37 * 60.0}, {"rom", 7.2}}).speedup == doctest::Approx(308).epsilon(0.01));
  CHECK_THROWS_AS(timing_report({{"fom", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(timing_report({{"fom", 1.0}, {"rom", 0.0}}), std::invalid_argument);
  CHECK(timing_report({{"offline", 4.0}, {"online", 2.0}}, "offline", "online").speedup == 2.0);
}

TEST_CASE("error csv") {
  const fs::path path = fs::temp_directory_path() / "romforge_metrics.csv";
  write_error_csv(path.string(), {0.0, 0.5}, {{"u", {std::nullopt, 0.25}}, {"p", {1.0, 2.0}}});
  std::ifstream is(path);
  std::string l0, l1, l2, extra;
  std::getline(is, l0);
  std::getline(is, l1);
  std::getline(is, l2);
  CHECK(l0 == "time,u,p");
  CHECK(l1 == "0,nan,1");
  CHECK(l2 == "0.5,0.25,2");
  CHECK_FALSE(std::getline(is, extra));
  CHECK_THROWS_AS(write_error_csv(path.string(), {0.0}, {{"u", {1.0, 2.0}}}), std::invalid_argument);
  CHECK_THROWS_AS(write_error_csv("/nonexistent/dir/x.csv", {0.0}, {{"u", {1.0}}}), ConfigError);
}

}
