#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "scl/series.hpp"
#include "scl/wkb.hpp"

using namespace scl;
using namespace scl::wkb;
using Catch::Approx;

namespace {

TruncatedSeries random_series(std::mt19937& rng, int order, double floor_c0) {
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  TruncatedSeries s(order);
  s[0] = Complex{floor_c0 + std::abs(uni(rng)), 0.3 * uni(rng)};
  for (int k = 1; k <= order; ++k) s[k] = Complex{uni(rng), uni(rng)};
  return s;
}

}  // namespace

TEST_CASE("series square root and reciprocal are exact inverses", "[series]") {
  std::mt19937 rng(3);
  for (int trial = 0; trial < 25; ++trial) {
    auto p = random_series(rng, 8, 0.5);
    auto q = p.sqrt();
    auto back = q * q;
    for (int k = 0; k <= 8; ++k) CHECK(std::abs(back[k] - p[k]) <= 1e-12);

    auto inv = p.reciprocal();
    auto unit = p * inv;
    CHECK(std::abs(unit[0] - Complex{1.0, 0.0}) <= 1e-12);
    for (int k = 1; k <= 8; ++k) CHECK(std::abs(unit[k]) <= 1e-11);
  }
  CHECK_THROWS_AS(TruncatedSeries(4).sqrt(), error);
  CHECK_THROWS_AS(TruncatedSeries(4).reciprocal(), error);
}

TEST_CASE("series calculus: derivative, antiderivative, composition", "[series]") {
  auto p = TruncatedSeries::from_coefficients({{1, 0}, {2, 0}, {3, 0}, {0, 0}});
  auto d = p.derivative();
  CHECK(d[0] == Complex{2, 0});
  CHECK(d[1] == Complex{6, 0});
  auto a = d.antiderivative();
  CHECK(a[0] == Complex{0, 0});
  CHECK(a[1] == Complex{2, 0});
  CHECK(a[2] == Complex{3, 0});

  // compose (1 + x)^2-style check: p(g) with g = x + x^2 at order 3
  auto base = TruncatedSeries::from_coefficients({{1, 0}, {1, 0}, {0, 0}, {0, 0}});
  auto g = TruncatedSeries::from_coefficients({{0, 0}, {1, 0}, {1, 0}, {0, 0}});
  auto comp = base.compose(g);
  CHECK(comp[0] == Complex{1, 0});
  CHECK(comp[1] == Complex{1, 0});
  CHECK(comp[2] == Complex{1, 0});
  CHECK_THROWS_AS(base.compose(base), error);  // g(0) != 0
}

TEST_CASE("flat-collar eikonal phases are linear", "[wkb]") {
  auto flat = MetricCollar::flat();
  // eps = -1, eta^2 = 2: S = i x
  auto s = eikonal_series(flat, -1, std::sqrt(2.0));
  CHECK(std::abs(s[1] - Complex{0.0, 1.0}) <= 1e-14);
  for (int k = 2; k <= s.order(); ++k) CHECK(std::abs(s[k]) <= 1e-14);
  // eps = 0: S = i |eta| x
  auto s0 = eikonal_series(flat, 0, 0.37);
  CHECK(std::abs(s0[1] - Complex{0.0, 0.37}) <= 1e-14);
  for (int k = 2; k <= s0.order(); ++k) CHECK(std::abs(s0[k]) <= 1e-14);
}

TEST_CASE("curved-collar eikonal matches hand-computed coefficients", "[wkb]") {
  // disk side, R = 1, a = 1, eps = -1:
  // S1 = i sqrt(eta^2 - 1), S2 = i eta^2 / (2 sqrt(eta^2 - 1))
  MetricCollar collar{oracle::Side::plus, 1.0, 1.0, 0.4};
  for (double eta : {1.2, 1.7, 2.5}) {
    auto s = eikonal_series(collar, -1, eta);
    double mu = std::sqrt(eta * eta - 1.0);
    CHECK(std::abs(s[1] - Complex{0.0, mu}) <= 1e-12);
    CHECK(std::abs(s[2] - Complex{0.0, eta * eta / (2.0 * mu)}) <= 1e-12);
  }
}

TEST_CASE("eikonal residual vanishes termwise", "[wkb]") {
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> uni(0.5, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    double a = uni(rng), radius = uni(rng);
    auto side = (trial % 2 == 0) ? oracle::Side::plus : oracle::Side::minus;
    MetricCollar collar{side, radius, a, 0.2};
    int eps = trial % 3 - 1;
    double eta = (eps == -1) ? 1.1 + uni(rng) : 0.3 * uni(rng);
    auto s = eikonal_series(collar, eps, eta);
    auto sp = s.derivative();
    auto residual = sp * sp + collar.hstar(eta, s.order());
    residual[0] += static_cast<double>(eps);
    for (int k = 0; k < s.order(); ++k) CHECK(std::abs(residual[k]) <= 1e-11);
  }
}

TEST_CASE("decay into the collar: Im S positive on the usable range", "[wkb]") {
  auto cfg = reference_config();
  for (auto side : {oracle::Side::plus, oracle::Side::minus}) {
    auto collar = interface_collar(cfg, side);
    auto s = eikonal_series(collar, -1, 1.4);
    for (double frac : {0.05, 0.3, 0.7, 1.0}) {
      double x = frac * collar.width;
      CHECK(s.evaluate(x).imag() > 0.0);
    }
  }
}

TEST_CASE("transport amplitude with trivial and constant coefficients", "[wkb]") {
  auto flat = MetricCollar::flat();
  auto s = eikonal_series(flat, -1, std::sqrt(5.0));
  auto zero = TruncatedSeries(default_series_order);
  auto a0 = transport_series(flat, s, zero);
  CHECK(std::abs(a0[0] - Complex{1.0, 0.0}) <= 1e-14);
  for (int k = 1; k <= a0.order(); ++k) CHECK(std::abs(a0[k]) <= 1e-14);

  // D = c: A0 = exp(-c x / (2 Im S1))
  double c = 0.8;
  auto d = TruncatedSeries::constant(Complex{c, 0.0}, default_series_order);
  auto a1 = transport_series(flat, s, d);
  double rate = -c / (2.0 * s[1].imag());
  double factorial = 1.0;
  for (int k = 0; k <= a1.order(); ++k) {
    if (k > 0) factorial *= k;
    CHECK(std::abs(a1[k] - Complex{std::pow(rate, k) / factorial, 0.0}) <= 1e-12);
  }

  // first-order linearity: doubling D doubles the leading log coefficient
  auto a2 = transport_series(flat, s, Complex{2.0, 0.0} * d);
  CHECK(std::abs(a2[1] - 2.0 * a1[1]) <= 1e-13);

  auto degenerate = TruncatedSeries(default_series_order);  // S' (0) = 0
  CHECK_THROWS_AS(transport_series(flat, degenerate, d), error);
}

TEST_CASE("principal DtN symbols for the three extension regimes", "[wkb]") {
  auto flat = MetricCollar::flat();
  CHECK(dtn_symbol(flat, 0, 0.7).c0 == Approx(0.7).epsilon(1e-13));
  CHECK(dtn_symbol(flat, 1, 0.0).c0 == Approx(1.0).epsilon(1e-13));
  CHECK(dtn_symbol(flat, -1, 2.0).c0 == Approx(std::sqrt(3.0)).epsilon(1e-13));

  auto cfg = reference_config();
  auto collar = interface_collar(cfg, oracle::Side::plus);
  CHECK(dtn_symbol(collar, -1, 2.0).c0 == Approx(std::sqrt(3.0)).epsilon(1e-13));
  CHECK_FALSE(dtn_symbol(collar, -1, 2.0).c1.has_value());

  auto with_model =
      dtn_symbol(flat, 1, 0.0, TruncatedSeries::constant(Complex{-1.0, 0.0}, default_series_order));
  REQUIRE(with_model.c1.has_value());
  CHECK(*with_model.c1 == Approx(-0.5).epsilon(1e-12));

  CHECK_THROWS_AS(eikonal_series(flat, -1, 0.9), error);  // hyperbolic region
  CHECK_THROWS_AS(eikonal_series(flat, 0, 0.0), error);   // branch point
  try {
    eikonal_series(flat, -1, 0.9);
  } catch (const error& e) {
    CHECK(e.code() == errc::elliptic_region_violated);
  }
  try {
    eikonal_series(flat, 0, 0.0);
  } catch (const error& e) {
    CHECK(e.code() == errc::singular_symbol);
  }
}
