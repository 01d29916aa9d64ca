#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "scl/radial.hpp"
#include "scl/wkb.hpp"

using namespace scl;
using oracle::RadialSolver;
using oracle::Side;
using Catch::Approx;

namespace {

TwoPhaseDiskConfig unit_disk() {
  TwoPhaseDiskConfig cfg;
  cfg.rz = 1.0;
  cfg.ry = 2.0;
  cfg.a_plus = RadialCoefficient::constant(1.0);
  cfg.a_minus = RadialCoefficient::constant(1.0);
  return cfg;
}

}  // namespace

TEST_CASE("subprincipal coefficient of an exact multiplier is zero", "[wkb][dtn]") {
  RadialSolver solver(unit_disk());
  auto est = wkb::subprincipal_estimate(solver, Side::plus, 0, 0.8, 0.1);
  CHECK(est.exact);
  CHECK(est.c1 == 0.0);
  CHECK(est.c0 == Approx(est.eta).epsilon(1e-12));
}

TEST_CASE("subprincipal coefficient of the zero-mode modified extension", "[wkb][dtn]") {
  // d(h) = I0'(1/h)/I0(1/h) = 1 - h/2 - h^2/8 + ...: c0 = 1, c1 = -1/2
  RadialSolver solver(unit_disk());
  auto est = wkb::subprincipal_estimate(solver, Side::plus, 1, 0.0, 0.1);
  CHECK_FALSE(est.exact);
  CHECK(est.c0 == Approx(1.0).epsilon(1e-12));
  CHECK(est.trend_slope == Approx(1.0).margin(0.1));
  CHECK(est.c1 == Approx(-0.5).margin(5e-3));
}

TEST_CASE("subprincipal estimate in the evanescent regime has a clean h^2 remainder",
          "[wkb][dtn]") {
  RadialSolver solver(unit_disk());
  auto est = wkb::subprincipal_estimate(solver, Side::plus, -1, std::sqrt(2.0), 0.1);
  CHECK_FALSE(est.exact);
  CHECK(est.c0 == Approx(std::sqrt(est.eta * est.eta - 1.0)).epsilon(1e-12));
  CHECK(std::isfinite(est.c1));
  CHECK(est.remainder_slope == Approx(2.0).margin(0.5));
}

TEST_CASE("interface-side families converge to the principal symbol at first order",
          "[wkb][dtn]") {
  auto cfg = reference_config();
  RadialSolver solver(cfg);
  for (auto side : {Side::plus, Side::minus}) {
    for (int eps : {0, 1, -1}) {
      if (side == Side::minus && eps == 0) continue;  // superlinear case, covered below
      double eta = (eps == -1) ? 1.3 : 0.9;
      auto est = wkb::subprincipal_estimate(solver, side, eps, eta, 0.1);
      double c0_ref = std::sqrt(est.eta * est.eta + eps);
      CHECK(est.c0 == Approx(c0_ref).epsilon(1e-12));
      if (!est.exact) {
        CHECK(est.trend_slope >= 0.8);
        CHECK(est.trend_slope <= 1.2);
      }
    }
  }
}

TEST_CASE("a family with superlinear decay is flagged as inconsistent", "[wkb][dtn]") {
  // the annulus-side harmonic multiplier differs from |eta| only through
  // boundary terms that vanish much faster than h
  RadialSolver solver(reference_config());
  CHECK_THROWS_AS(wkb::subprincipal_estimate(solver, Side::minus, 0, 1.1, 0.1), error);
  try {
    wkb::subprincipal_estimate(solver, Side::minus, 0, 1.1, 0.1);
  } catch (const error& e) {
    CHECK(e.code() == errc::expansion_inconsistent);
  }
}

TEST_CASE("eta snapping keeps the mode number integral along the family", "[wkb][dtn]") {
  RadialSolver solver(reference_config());
  auto est = wkb::subprincipal_estimate(solver, Side::plus, -1, 1.23, 0.1);
  double scale = std::sqrt(reference_config().a_plus_z()) / 1.0;
  double n0 = est.eta / (scale * 0.1);
  CHECK(n0 == Approx(std::round(n0)).margin(1e-9));
}
