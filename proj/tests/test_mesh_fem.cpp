#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>

#include "scl/fem.hpp"
#include "scl/mesh.hpp"
#include "scl/radial.hpp"
#include "scl/eigensolve.hpp"

using namespace scl;
using Catch::Approx;

TEST_CASE("reference P1 element matrices", "[fem]") {
  auto k = fem::element_stiffness({0, 0}, {1, 0}, {0, 1});
  double expected[3][3] = {{1.0, -0.5, -0.5}, {-0.5, 0.5, 0.0}, {-0.5, 0.0, 0.5}};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(k(i, j) == Approx(expected[i][j]).margin(1e-15));

  auto m = fem::element_mass(0.5);
  CHECK(m(0, 0) == Approx(1.0 / 12.0));
  CHECK(m(0, 1) == Approx(1.0 / 24.0));

  CHECK_THROWS_AS(fem::element_stiffness({0, 0}, {0, 1}, {1, 0}), error);  // clockwise
}

TEST_CASE("structured disk mesh invariants", "[fem]") {
  auto cfg = reference_config(Transmission::flux);
  auto mesh = fem::build_disk_mesh(cfg, 0.1);
  auto check = fem::check_mesh(mesh, cfg);
  INFO(check.issues.empty() ? "" : check.issues.front());
  CHECK(check.ok);
  for (int v : mesh.interface_vertices) {
    double r = std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]);
    CHECK(std::abs(r - cfg.rz) <= 1e-12 * cfg.rz);
  }
  CHECK_THROWS_AS(fem::build_disk_mesh(cfg, 2.5), error);
  try {
    fem::build_disk_mesh(cfg, 2.5);
  } catch (const error& e) {
    CHECK(e.code() == errc::mesh_invalid);
  }
  CHECK_THROWS_AS(fem::build_disk_mesh(cfg, -0.1), error);

  auto fine = fem::build_disk_mesh(cfg, 0.05);
  double growth = static_cast<double>(fine.triangles.size()) / mesh.triangles.size();
  CHECK(growth == Approx(4.0).epsilon(0.2));
}

TEST_CASE("assembly produces an exactly symmetric indefinite pair", "[fem]") {
  auto cfg = reference_config(Transmission::flux);
  auto mesh = fem::build_disk_mesh(cfg, 0.12);
  auto pair = fem::assemble(cfg, mesh);

  fem::SparseMatrix diff = fem::SparseMatrix(pair.k_matrix.transpose()) - pair.k_matrix;
  double asym = 0.0;
  for (int c = 0; c < diff.outerSize(); ++c)
    for (fem::SparseMatrix::InnerIterator it(diff, c); it; ++it)
      asym = std::max(asym, std::abs(it.value()));
  CHECK(asym == 0.0);

  Eigen::SimplicialLLT<fem::SparseMatrix> llt(pair.m_matrix);
  CHECK(llt.info() == Eigen::Success);  // mass is SPD

  // quadratic form signs on vectors supported in a single phase
  Eigen::VectorXd in_plus = Eigen::VectorXd::Zero(pair.size());
  Eigen::VectorXd in_minus = Eigen::VectorXd::Zero(pair.size());
  for (int dof = 0; dof < pair.size(); ++dof) {
    double r = std::hypot(mesh.vertices[pair.free_vertices[dof]][0],
                          mesh.vertices[pair.free_vertices[dof]][1]);
    if (r < 0.8) in_plus[dof] = std::sin(3.0 * r) + 0.2;
    if (r > 1.2) in_minus[dof] = std::cos(2.0 * r) + 1.4;
  }
  CHECK(in_plus.dot(pair.k_matrix * in_plus) > 0.0);
  CHECK(in_minus.dot(pair.k_matrix * in_minus) < 0.0);

  // the unit-normal condition has no variational form here
  auto bad = reference_config(Transmission::unit_normal);
  CHECK_THROWS_AS(fem::assemble(bad, mesh), error);
  try {
    fem::assemble(bad, mesh);
  } catch (const error& e) {
    CHECK(e.code() == errc::unsupported_convention);
  }
}

TEST_CASE("stiffness annihilates affine interpolants away from the interface", "[fem]") {
  auto cfg = reference_config(Transmission::flux);
  auto mesh = fem::build_disk_mesh(cfg, 0.15);
  auto pair = fem::assemble(cfg, mesh);

  Eigen::VectorXd affine(pair.size());
  for (int dof = 0; dof < pair.size(); ++dof) {
    const auto& v = mesh.vertices[pair.free_vertices[dof]];
    affine[dof] = 0.7 + 1.3 * v[0] - 0.4 * v[1];
  }
  Eigen::VectorXd residual = pair.k_matrix * affine;

  // vertices whose whole patch sits strictly inside one phase and away from
  // the Dirichlet ring see an exact cancellation
  std::vector<double> vertex_scale(mesh.vertices.size(), 0.0);
  std::vector<bool> clean(mesh.vertices.size(), true);
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    bool touches_interface = false, touches_boundary = false;
    for (int i = 0; i < 3; ++i) {
      int v = mesh.triangles[t][i];
      double r = std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]);
      if (std::abs(r - cfg.rz) <= 1e-9) touches_interface = true;
      if (pair.dof_of_vertex[v] < 0) touches_boundary = true;
    }
    for (int i = 0; i < 3; ++i) {
      int v = mesh.triangles[t][i];
      if (touches_interface || touches_boundary) clean[v] = false;
      vertex_scale[v] += std::abs(cfg.a_plus_z());
    }
  }
  int checked = 0, nontrivial = 0;
  for (std::size_t v = 0; v < mesh.vertices.size(); ++v) {
    int dof = pair.dof_of_vertex[v];
    if (dof < 0) continue;
    if (clean[v]) {
      CHECK(std::abs(residual[dof]) <= 1e-12);
      ++checked;
    }
    double r = std::hypot(mesh.vertices[v][0], mesh.vertices[v][1]);
    if (std::abs(r - cfg.rz) <= 1e-9 && std::abs(residual[dof]) > 1e-6) ++nontrivial;
  }
  CHECK(checked > 100);
  CHECK(nontrivial > 0);  // the sign change leaves a genuine interface trace
}

TEST_CASE("discrete eigenvalues converge quadratically to the mode-wise truth", "[fem][slow]") {
  auto cfg = reference_config(Transmission::flux);
  oracle::RadialSolver solver(cfg);
  auto oracle_spec = solver.full_spectrum(60.0, 2);
  std::vector<double> opos, oneg;
  for (const auto& rec : oracle_spec)
    for (int k = 0; k < rec.multiplicity; ++k)
      (rec.lambda >= 0 ? opos : oneg).push_back(rec.lambda);
  std::sort(opos.begin(), opos.end());
  std::sort(oneg.begin(), oneg.end(), std::greater<>());
  REQUIRE(opos.size() >= 10);
  REQUIRE(oneg.size() >= 10);

  auto first_each_sign = [&](double edge) {
    auto mesh = fem::build_disk_mesh(cfg, edge);
    auto pair = fem::assemble(cfg, mesh);
    auto sol = eig::solve_range(pair, oneg[9] * 1.2 - 0.5, opos[9] * 1.2 + 0.5);
    std::vector<double> pos, neg;
    for (int i = 0; i < sol.values.size(); ++i)
      (sol.values[i] >= 0 ? pos : neg).push_back(sol.values[i]);
    std::sort(pos.begin(), pos.end());
    std::sort(neg.begin(), neg.end(), std::greater<>());
    return std::pair{pos, neg};
  };
  auto [pos_c, neg_c] = first_each_sign(0.16);
  auto [pos_f, neg_f] = first_each_sign(0.08);
  REQUIRE(pos_c.size() >= 10);
  REQUIRE(neg_c.size() >= 10);

  for (int i = 0; i < 10; ++i) {
    double slope_pos =
        std::log2(std::abs(pos_c[i] - opos[i]) / std::abs(pos_f[i] - opos[i]));
    double slope_neg =
        std::log2(std::abs(neg_c[i] - oneg[i]) / std::abs(neg_f[i] - oneg[i]));
    CHECK(slope_pos >= 1.7);
    CHECK(slope_pos <= 2.3);
    CHECK(slope_neg >= 1.7);
    CHECK(slope_neg <= 2.3);
  }
}

TEST_CASE("mesh and matrix exports are deterministic", "[fem]") {
  auto cfg = reference_config(Transmission::flux);
  auto mesh = fem::build_disk_mesh(cfg, 0.3);
  auto pair = fem::assemble(cfg, mesh);
  std::ostringstream a, b;
  fem::write_mesh(a, mesh);
  fem::write_mesh(b, mesh);
  CHECK(a.str() == b.str());
  std::ostringstream c, d;
  fem::write_coo(c, pair.k_matrix);
  fem::write_coo(d, pair.k_matrix);
  CHECK(c.str() == d.str());
  CHECK(a.str().find("plus") != std::string::npos);
  CHECK(a.str().find("minus") != std::string::npos);
}
