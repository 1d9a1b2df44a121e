#include <doctest.h>

#include <random>

#include "oracles.hpp"
#include "romforge/fv_operators.hpp"

using namespace romforge;

namespace {

// Field from an analytic function evaluated at cell and face centres.
template <typename Fn>
Field sample(const MeshPtr& mesh, int components, Fn fn) {
  Field f(mesh, components);
  for (int c = 0; c < mesh->num_cells(); ++c)
    for (int k = 0; k < components; ++k) f.cell(c, k) = fn(mesh->cell_center(c), k);
  for (std::size_t p = 0; p < mesh->patches().size(); ++p) {
    const auto& patch = mesh->patches()[p];
    for (std::size_t i = 0; i < patch.size(); ++i) {
      const Vec2 x = mesh->cell_center(patch.faces[i].cell) + patch.normals[i] * oracle::half_distance(*mesh, patch.normals[i]);
      for (int k = 0; k < components; ++k) f.boundary(static_cast<int>(p), static_cast<int>(i), k) = fn(x, k);
    }
  }
  return f;
}

double max_diff(const Field& f, const Eigen::MatrixXd& ref) { return (oracle::cells(f) - ref).cwiseAbs().maxCoeff(); }

}  // namespace

TEST_SUITE("fv") {

TEST_CASE("operators match face-loop assembly on random fields") {
  std::mt19937_64 rng(5);
  for (const auto& mesh : {oracle::cavity(7, 0.3), oracle::junction(4, 6)}) {
    const Field s = oracle::random_field(mesh, 1, rng);
    const Field u = oracle::random_field(mesh, 2, rng);
    const Field v = oracle::random_field(mesh, 2, rng);
    const double scale = 1.0 / (mesh->dx() * mesh->dx());
    CHECK(max_diff(fv::laplacian(u), oracle::laplacian(u)) < 1e-12 * scale);
    CHECK(max_diff(fv::laplacian(s), oracle::laplacian(s)) < 1e-12 * scale);
    CHECK(max_diff(fv::gradient(s), oracle::gradient(s)) < 1e-12 / mesh->dx());
    CHECK(max_diff(fv::convection(u, v), oracle::convection(u, v)) < 1e-12 / mesh->dx());
  }
}

TEST_CASE("gradient of a linear field is exact") {
  auto mesh = oracle::junction(4, 5);
  const Field p = sample(mesh, 1, [](Vec2 x, int) { return 2.0 * x.x - 3.0 * x.y + 1.0; });
  const Field g = fv::gradient(p);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    CHECK(g.cell(c, 0) == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(g.cell(c, 1) == doctest::Approx(-3.0).epsilon(1e-12));
  }
}

TEST_CASE("laplacian of a quadratic is exact away from the boundary") {
  auto mesh = oracle::cavity(10, 1.0);
  const Field q = sample(mesh, 1, [](Vec2 x, int) { return x.x * x.x + 0.5 * x.y * x.y; });
  const Field l = fv::laplacian(q);
  for (int c = 0; c < mesh->num_cells(); ++c) {
    const auto ij = mesh->cell_ij(c);
    if (ij[0] == 0 || ij[1] == 0 || ij[0] == 9 || ij[1] == 9) continue;
    CHECK(l.cell(c) == doctest::Approx(3.0).epsilon(1e-10));
  }
}

TEST_CASE("divergence of a uniform field vanishes") {
  auto mesh = oracle::junction(4, 4);
  const Field d = fv::divergence(constant_field(mesh, 2, 1.7));
  for (int c = 0; c < mesh->num_cells(); ++c) CHECK(std::abs(d.cell(c)) < 1e-12);
}

TEST_CASE("rigid rotation has vorticity two, boundary faces included") {
  auto mesh = oracle::cavity(6, 1.0);
  const Field u = sample(mesh, 2, [](Vec2 x, int k) { return k == 0 ? -x.y : x.x; });
  const Field w = fv::boundary_vorticity(u);
  for (int c = 0; c < mesh->num_cells(); ++c) CHECK(w.cell(c) == doctest::Approx(2.0).epsilon(1e-12));
  for (std::size_t p = 0; p < mesh->patches().size(); ++p)
    for (std::size_t i = 0; i < mesh->patches()[p].size(); ++i)
      CHECK(w.boundary(static_cast<int>(p), static_cast<int>(i)) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("convection is linear in each argument") {
  std::mt19937_64 rng(9);
  auto mesh = oracle::cavity(5);
  const Field a = oracle::random_field(mesh, 2, rng);
  const Field b = oracle::random_field(mesh, 2, rng);
  const Field v = oracle::random_field(mesh, 2, rng);
  const Field lhs = fv::convection(2.0 * a + b, v);
  const Field rhs = 2.0 * fv::convection(a, v) + fv::convection(b, v);
  CHECK(max_diff(lhs, oracle::cells(rhs)) < 1e-11);
}

}
