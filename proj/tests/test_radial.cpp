#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <boost/math/special_functions/bessel.hpp>
#include <cmath>

#include "scl/radial.hpp"
#include "support/fd_radial.hpp"

using namespace scl;
using oracle::RadialSolver;
using oracle::Side;
using Catch::Approx;

namespace {

double bessel_j_logderiv(int n, double x) {
  using boost::math::cyl_bessel_j;
  double jn = cyl_bessel_j(n, x);
  double jp = (n == 0) ? -cyl_bessel_j(1, x)
                       : 0.5 * (cyl_bessel_j(n - 1, x) - cyl_bessel_j(n + 1, x));
  return jp / jn;
}

double bessel_i_logderiv(int n, double x) {
  using boost::math::cyl_bessel_i;
  double in = cyl_bessel_i(n, x);
  double ip = (n == 0) ? cyl_bessel_i(1, x)
                       : 0.5 * (cyl_bessel_i(n - 1, x) + cyl_bessel_i(n + 1, x));
  return ip / in;
}

}  // namespace

TEST_CASE("regular solution log-derivative: harmonic cases are exact", "[radial]") {
  RadialSolver solver(reference_config());
  // lambda = 0 on the disk side: f = r^n regardless of the constant coefficient
  CHECK(solver.inner_logderiv(3, 0.0, 1.0) == Approx(3.0).epsilon(1e-10));
  CHECK(solver.inner_logderiv(0, 0.0, 0.5) == Approx(0.0).margin(1e-12));
  CHECK(solver.inner_logderiv(7, 0.0, 0.35) == Approx(7.0 / 0.35).epsilon(1e-10));
}

TEST_CASE("regular solution log-derivative matches the Bessel series", "[radial]") {
  RadialSolver solver(reference_config());
  // a+ = 2, lambda = 10: f = J_n(sqrt(lambda/2) r)
  double kappa = std::sqrt(10.0 / 2.0);
  double expected = kappa * bessel_j_logderiv(2, kappa * 1.0);
  CHECK(solver.inner_logderiv(2, 10.0, 1.0) == Approx(expected).epsilon(1e-8));

  // oscillatory with several zeros inside, and a large-order evanescent case
  double kappa2 = std::sqrt(300.0 / 2.0);
  CHECK(solver.inner_logderiv(1, 300.0, 1.0) ==
        Approx(kappa2 * bessel_j_logderiv(1, kappa2)).epsilon(1e-8));
  double kappa3 = std::sqrt(200.0 / 2.0);  // n = 25 > kappa3: no oscillation
  CHECK(solver.inner_logderiv(25, 200.0, 1.0) ==
        Approx(kappa3 * bessel_j_logderiv(25, kappa3)).epsilon(1e-8));

  // negative spectral parameter on the disk side: modified Bessel regime
  double kappa4 = std::sqrt(50.0 / 2.0);
  CHECK(solver.inner_logderiv(4, -50.0, 1.0) ==
        Approx(kappa4 * bessel_i_logderiv(4, kappa4)).epsilon(1e-8));
}

TEST_CASE("outer solution log-derivative against closed forms", "[radial]") {
  RadialSolver solver(reference_config());
  // harmonic annulus solution f = ln(r/ry) for n = 0, lambda = 0
  CHECK(solver.outer_logderiv(0, 0.0, 1.0) == Approx(1.0 / std::log(0.5)).epsilon(1e-10));
  CHECK(solver.outer_logderiv(0, 0.0, 1.5) ==
        Approx(1.0 / (1.5 * std::log(0.75))).epsilon(1e-10));
  // harmonic n >= 1: f = r^{-n} - r^n ry^{-2n}
  {
    int n = 3;
    double r = 1.0, ry = 2.0;
    double q = std::pow(r / ry, 2 * n);
    double expected = -(n / r) * (1.0 + q) / (1.0 - q);
    CHECK(solver.outer_logderiv(n, 0.0, r) == Approx(expected).epsilon(1e-10));
  }
  // positive lambda: evanescent on the annulus (modified Bessel I/K pair)
  {
    using boost::math::cyl_bessel_i;
    using boost::math::cyl_bessel_k;
    double kappa = 3.0;  // lambda = +9, a- = 1
    auto f = [&](double r) {
      return cyl_bessel_i(0, kappa * r) * cyl_bessel_k(0, 2.0 * kappa) -
             cyl_bessel_k(0, kappa * r) * cyl_bessel_i(0, 2.0 * kappa);
    };
    auto fp = [&](double r) {
      return kappa * (cyl_bessel_i(1, kappa * r) * cyl_bessel_k(0, 2.0 * kappa) +
                      cyl_bessel_k(1, kappa * r) * cyl_bessel_i(0, 2.0 * kappa));
    };
    CHECK(solver.outer_logderiv(0, 9.0, 1.0) == Approx(fp(1.0) / f(1.0)).epsilon(1e-8));
  }
  // negative lambda: oscillatory J/Y combination vanishing at ry
  {
    using boost::math::cyl_bessel_j;
    using boost::math::cyl_neumann;
    double kappa = 3.0;  // lambda = -9
    int n = 1;
    auto f = [&](double r) {
      return cyl_bessel_j(n, kappa * r) * cyl_neumann(n, 2.0 * kappa) -
             cyl_neumann(n, kappa * r) * cyl_bessel_j(n, 2.0 * kappa);
    };
    auto deriv = [&](auto bess, double r) {
      return kappa * 0.5 * (bess(n - 1, kappa * r) - bess(n + 1, kappa * r));
    };
    auto fp = [&](double r) {
      return deriv([](int m, double x) { return boost::math::cyl_bessel_j(m, x); }, r) *
                 cyl_neumann(n, 2.0 * kappa) -
             deriv([](int m, double x) { return boost::math::cyl_neumann(m, x); }, r) *
                 cyl_bessel_j(n, 2.0 * kappa);
    };
    CHECK(solver.outer_logderiv(n, -9.0, 1.0) == Approx(fp(1.0) / f(1.0)).epsilon(1e-8));
  }
}

TEST_CASE("secular function brackets the interface roots", "[radial]") {
  RadialSolver un(reference_config());
  CHECK(un.secular(10, 45.0) > 0.0);
  CHECK(un.secular(10, 55.0) < 0.0);

  RadialSolver fx(reference_config(Transmission::flux));
  CHECK(fx.secular(10, 90.0) > 0.0);
  CHECK(fx.secular(10, 110.0) < 0.0);
}

TEST_CASE("secular scan has constant sign between roots", "[radial]") {
  RadialSolver solver(reference_config());
  auto roots = solver.mode_eigenvalues(5, 0.0, 400.0);
  REQUIRE(roots.size() >= 2);
  for (std::size_t i = 0; i + 1 < roots.size(); ++i) {
    double a = roots[i].lambda, b = roots[i + 1].lambda;
    double first = solver.secular_bounded(5, a + 0.05 * (b - a));
    for (int k = 1; k <= 8; ++k) {
      double x = a + (0.05 + 0.9 * k / 9.0) * (b - a);
      CHECK(first * solver.secular_bounded(5, x) > 0.0);
    }
  }
}

TEST_CASE("mode eigenvalues agree with an independent finite-difference solve", "[radial]") {
  auto cfg = reference_config();
  RadialSolver solver(cfg);
  auto mine = solver.mode_eigenvalues(0, -50.0, 50.0);
  for (const auto& rec : mine) CHECK(rec.residual <= 1e-8);
  auto fd = testsupport::fd_mode_eigenvalues(cfg, 0, -50.0, 50.0);
  REQUIRE(mine.size() == fd.size());
  for (std::size_t i = 0; i < mine.size(); ++i)
    CHECK(mine[i].lambda == Approx(fd[i]).epsilon(2e-3));

  // mode with an interface root: n = 12 under the flux convention
  auto cfg_fx = reference_config(Transmission::flux);
  RadialSolver fx(cfg_fx);
  auto mine_fx = fx.mode_eigenvalues(12, 0.0, 250.0);
  auto fd_fx = testsupport::fd_mode_eigenvalues(cfg_fx, 12, 0.0, 250.0);
  REQUIRE(mine_fx.size() == fd_fx.size());
  for (std::size_t i = 0; i < mine_fx.size(); ++i)
    CHECK(mine_fx[i].lambda == Approx(fd_fx[i]).epsilon(5e-3));
}

TEST_CASE("variable coefficient modes agree with the finite-difference solve", "[radial]") {
  auto cfg = reference_config();
  cfg.a_plus = RadialCoefficient::polynomial({2.0, 0.5});      // 2 + r/2 on the disk
  cfg.a_minus = RadialCoefficient::polynomial({1.5, -0.25});   // decreasing on the annulus
  RadialSolver solver(cfg);
  for (int n : {0, 4}) {
    auto mine = solver.mode_eigenvalues(n, -60.0, 60.0);
    auto fd = testsupport::fd_mode_eigenvalues(cfg, n, -60.0, 60.0);
    REQUIRE(mine.size() == fd.size());
    for (std::size_t i = 0; i < mine.size(); ++i)
      CHECK(mine[i].lambda == Approx(fd[i]).epsilon(5e-3));
  }
}

TEST_CASE("single interface root sits near the dispersion prediction", "[radial]") {
  RadialSolver solver(reference_config());
  auto roots = solver.mode_eigenvalues(40, 700.0, 900.0);
  REQUIRE(roots.size() == 1);
  CHECK(roots[0].lambda == Approx(800.0).epsilon(0.02));
  CHECK(roots[0].multiplicity == 2);
}

TEST_CASE("empty and degenerate windows", "[radial]") {
  RadialSolver solver(reference_config());
  CHECK(solver.mode_eigenvalues(0, 0.0, 0.0).empty());
  CHECK(solver.mode_eigenvalues(3, 20.0, 20.5).empty());
}

TEST_CASE("eigenvalues are stable under integrator tolerance tightening", "[radial]") {
  auto cfg = reference_config();
  RadialSolver coarse(cfg);
  coarse.ode_options().rel_tol = 1e-9;
  RadialSolver fine(cfg);
  fine.ode_options().rel_tol = 1e-12;
  auto a = coarse.mode_eigenvalues(7, 0.0, 300.0);
  auto b = fine.mode_eigenvalues(7, 0.0, 300.0);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i)
    CHECK(a[i].lambda == Approx(b[i].lambda).epsilon(1e-8));
}

TEST_CASE("merged spectrum counts track the area prediction", "[radial]") {
  RadialSolver solver(reference_config());
  auto spec = solver.full_spectrum(100.0, 2);
  int n_plus = 0;
  for (const auto& rec : spec) {
    CHECK(rec.multiplicity == (rec.n == 0 ? 1 : 2));
    if (rec.lambda >= 0) n_plus += rec.multiplicity;
  }
  // leading bulk term + the interface lattice
  double lattice = 2.0 * std::floor(std::sqrt(2.0) * 10.0);
  double predicted = (1.0 / 8.0) * 100.0 + lattice;
  CHECK(std::abs(n_plus - predicted) <= 0.10 * predicted);

  CHECK(solver.full_spectrum(0.5, 2).empty());
}

TEST_CASE("window doubling roughly doubles the two-sided counts", "[radial]") {
  RadialSolver solver(reference_config());
  auto spec1 = solver.full_spectrum(400.0, 2);
  auto spec2 = solver.full_spectrum(800.0, 2);
  auto counts = [](const std::vector<SpectrumRecord>& spec) {
    std::pair<int, int> c{0, 0};
    for (const auto& r : spec) (r.lambda >= 0 ? c.first : c.second) += r.multiplicity;
    return c;
  };
  auto [p1, m1] = counts(spec1);
  auto [p2, m2] = counts(spec2);
  CHECK(static_cast<double>(p2) / p1 == Approx(2.0).margin(0.4));
  CHECK(static_cast<double>(m2) / m1 == Approx(2.0).margin(0.4));
}

TEST_CASE("parallel fan-out reproduces the sequential spectrum exactly", "[radial]") {
  RadialSolver solver(reference_config());
  auto serial = solver.full_spectrum(120.0, 1);
  auto parallel = solver.full_spectrum(120.0, 2);
  REQUIRE(serial.size() == parallel.size());
  for (std::size_t i = 0; i < serial.size(); ++i) {
    CHECK(serial[i].lambda == parallel[i].lambda);  // bitwise: same mode-wise work
    CHECK(serial[i].n == parallel[i].n);
  }
}

TEST_CASE("semiclassical boundary multipliers", "[radial][dtn]") {
  TwoPhaseDiskConfig disk;
  disk.rz = 1.0;
  disk.ry = 2.0;
  disk.a_plus = RadialCoefficient::constant(1.0);
  disk.a_minus = RadialCoefficient::constant(1.0);
  RadialSolver ds(disk);

  SECTION("harmonic extension is the exact multiplier h n") {
    for (int n : {0, 2, 9})
      for (double h : {0.2, 0.05})
        CHECK(ds.dtn_eigenvalue(Side::plus, 0, h, n) == Approx(h * n).margin(1e-10));
  }
  SECTION("general constant coefficient scales by sqrt(a)/R") {
    TwoPhaseDiskConfig cfg;
    cfg.rz = 1.7;
    cfg.ry = 2.5;
    cfg.a_plus = RadialCoefficient::constant(3.0);
    cfg.a_minus = RadialCoefficient::constant(1.0);
    RadialSolver s(cfg);
    CHECK(s.dtn_eigenvalue(Side::plus, 0, 0.1, 6) ==
          Approx(0.1 * std::sqrt(3.0) * 6.0 / 1.7).epsilon(1e-10));
  }
  SECTION("eps = +1 tends to sqrt(k* + 1) at rate h, matching the I0 series") {
    double prev_err = 1.0;
    for (double h : {0.1, 0.05, 0.025}) {
      double d = ds.dtn_eigenvalue(Side::plus, 1, h, 0);
      double ref = bessel_i_logderiv(0, 1.0 / h);  // h * (1/h) I0'/I0
      CHECK(d == Approx(ref).epsilon(1e-8));
      double err = std::abs(d - 1.0);
      CHECK(err < 0.6 * prev_err);
      prev_err = err;
    }
  }
  SECTION("eps = -1 along h n = 2 tends to sqrt(3)") {
    double prev_err = 1.0;
    for (double h : {0.1, 0.05, 0.025}) {
      int n = static_cast<int>(std::lround(2.0 / h));
      double d = ds.dtn_eigenvalue(Side::plus, -1, h, n);
      double kappa = 1.0 / h;
      CHECK(d == Approx(h * kappa * bessel_j_logderiv(n, kappa)).epsilon(1e-8));
      double err = std::abs(d - std::sqrt(3.0));
      CHECK(err < 0.7 * prev_err);
      prev_err = err;
    }
  }
  SECTION("hyperbolic-region requests are rejected for eps = -1") {
    CHECK_THROWS_AS(ds.dtn_eigenvalue(Side::plus, -1, 0.1, 5), error);
    try {
      ds.dtn_eigenvalue(Side::plus, -1, 0.1, 5);
    } catch (const error& e) {
      CHECK(e.code() == errc::elliptic_region_violated);
    }
  }
}

TEST_CASE("profiles decompose into bands that sum to one", "[radial]") {
  auto cfg = reference_config();
  RadialSolver solver(cfg);
  auto roots = solver.mode_eigenvalues(30, 400.0, 500.0);  // interface root near 450
  REQUIRE(roots.size() == 1);
  auto prof = solver.sample_profile(30, roots[0].lambda);
  double m1 = prof.mass(0.0, 0.85);
  double m2 = prof.mass(0.85, 1.15);
  double m3 = prof.mass(1.15, 2.0);
  CHECK(m1 + m2 + m3 == Approx(1.0).margin(1e-10));
  CHECK(m2 >= 0.99);  // sharply localized at the interface

  auto bulk = solver.mode_eigenvalues(0, 170.0, 180.0);  // a disk-branch mode
  REQUIRE(bulk.size() == 1);
  auto bp = solver.sample_profile(0, bulk[0].lambda);
  CHECK(bp.mass(0.0, 2.0) == Approx(1.0).margin(1e-10));
  CHECK(bp.mass(0.0, 1.0) > 0.5);
}
