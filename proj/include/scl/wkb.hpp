#pragma once

#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/radial.hpp"
#include "scl/series.hpp"

namespace scl::wkb {

inline constexpr int default_series_order = 8;

/// Constant-coefficient collar of a boundary circle in the conformal metric
/// a^{-1} g0. In the Fermi coordinate x (geodesic distance into the domain)
/// the tangential symbol is H*(x, eta) = (R / (R -+ sqrt(a) x))^2 eta^2,
/// with the minus sign on the disk side (x points toward the center) and the
/// plus sign on the annulus side. eta is dual to metric arclength, so the
/// angular mode n sits at eta = h n sqrt(a) / R and k*(eta) = eta^2.
struct MetricCollar {
  oracle::Side side = oracle::Side::plus;
  double radius = 1.0;  // boundary circle radius (Euclidean)
  double a = 1.0;       // constant conformal coefficient
  double width = 0.5;   // usable x-range of the collar

  static MetricCollar flat(double a = 1.0, double width = 1.0) {
    return MetricCollar{oracle::Side::plus, std::numeric_limits<double>::infinity(), a, width};
  }

  bool is_flat() const { return std::isinf(radius); }

  double eta_of_mode(double h, int n) const { return h * n * std::sqrt(a) / radius; }

  TruncatedSeries hstar(double eta, int order) const {
    TruncatedSeries s(order);
    if (is_flat()) {
      s[0] = eta * eta;
      return s;
    }
    double u = (side == oracle::Side::plus ? 1.0 : -1.0) * std::sqrt(a) / radius;
    double uk = 1.0;
    for (int k = 0; k <= order; ++k) {
      s[k] = eta * eta * static_cast<double>(k + 1) * uk;
      uk *= u;
    }
    return s;
  }
};

inline MetricCollar interface_collar(const TwoPhaseDiskConfig& cfg, oracle::Side side) {
  double a = (side == oracle::Side::plus) ? cfg.a_plus_z() : cfg.a_minus_z();
  double width = (side == oracle::Side::plus) ? 0.5 * cfg.rz / std::sqrt(a)
                                              : (cfg.ry - cfg.rz) / std::sqrt(a);
  return MetricCollar{side, cfg.rz, a, width};
}

/// Complex phase S(x) of the decaying WKB extension of the boundary mode,
/// solving the eikonal equation (dS/dx)^2 + H*(x, eta) + eps = 0 with
/// S(0) = 0 and Im S increasing into the domain:
/// dS/dx = i sqrt(H*(x, eta) + eps).
inline TruncatedSeries eikonal_series(const MetricCollar& collar, int eps, double eta,
                                      int order = default_series_order) {
  double kstar = eta * eta;
  if (eps == -1 && !(kstar > 1.0))
    raise(errc::elliptic_region_violated, "eps = -1 needs k*(eta) > 1");
  if (std::abs(kstar + eps) < 1e-14)
    raise(errc::singular_symbol, "branch point: k*(eta) + eps = 0");
  TruncatedSeries p = collar.hstar(eta, order);
  p[0] += static_cast<double>(eps);
  TruncatedSeries q = p.sqrt();  // real positive leading coefficient
  return (Complex{0.0, 1.0} * q).antiderivative();
}

/// First transport amplitude A0(x): solves (1/i) 2 S' A0' + D A0 = 0 with
/// A0(0) = 1, order by order. D is the (model-supplied) zeroth-order
/// coefficient of the transport operator, as a series in x.
inline TruncatedSeries transport_series(const MetricCollar&, const TruncatedSeries& s,
                                        const TruncatedSeries& d, int order = default_series_order) {
  TruncatedSeries sprime = s.derivative();
  if (std::abs(sprime[0]) < 1e-14)
    raise(errc::transport_degenerate, "dS/dx vanishes at the boundary");
  if (d.order() != order || s.order() != order)
    raise(errc::config_invalid, "series order mismatch in transport");
  // A0' = g A0 with g = -i D / (2 S')
  TruncatedSeries g = (Complex{0.0, -0.5} * d) * sprime.reciprocal();
  TruncatedSeries a0(order);
  a0[0] = 1.0;
  for (int k = 0; k < order; ++k) {
    Complex acc{0.0, 0.0};
    for (int j = 0; j <= k; ++j) acc += g[j] * a0[k - j];
    a0[k + 1] = acc / static_cast<double>(k + 1);
  }
  return a0;
}

struct SymbolExpansion {
  int eps = 0;
  double eta = 0.0;
  double c0 = 0.0;                 // principal symbol sqrt(k* + eps)
  std::optional<double> c1;        // subprincipal; only with a D-model
};

/// Principal (and, given a transport D-model, subprincipal) DtN symbol at
/// eta, extracted from the WKB normal derivative -dS/dx(0) = -i S_1.
inline SymbolExpansion dtn_symbol(const MetricCollar& collar, int eps, double eta,
                                  const std::optional<TruncatedSeries>& d_model = std::nullopt,
                                  int order = default_series_order) {
  TruncatedSeries s = eikonal_series(collar, eps, eta, order);
  Complex c0 = Complex{0.0, -1.0} * s[1];
  SymbolExpansion out;
  out.eps = eps;
  out.eta = eta;
  out.c0 = c0.real();
  if (std::abs(c0.imag()) > 1e-12 * (1.0 + std::abs(c0.real())))
    raise(errc::singular_symbol, "principal symbol came out non-real");
  if (d_model) {
    TruncatedSeries a0 = transport_series(collar, s, *d_model, order);
    out.c1 = (-a0[1]).real();  // h-coefficient of the normal derivative
  }
  return out;
}

struct SubprincipalEstimate {
  oracle::Side side;
  int eps;
  double eta;            // snapped so that the mode number is integral at h0
  double c0;
  double c1;             // Richardson-extrapolated (d_exact - c0)/h
  double trend_slope;    // log-log slope of |d_exact - c0| in h
  double remainder_slope;  // slope after subtracting c0 + h c1 (NaN if at floor)
  bool exact;            // all errors at the floor: the multiplier is exact
  std::vector<double> h;
  std::vector<double> d_exact;
};

namespace detail {

inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) continue;
    double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++m;
  }
  if (m < 2) return std::numeric_limits<double>::quiet_NaN();
  return (m * sxy - sx * sy) / (m * sxx - sx * sx);
}

}  // namespace detail

/// Measures the subprincipal coefficient of the exact DtN multiplier along a
/// fixed-eta family h in {h0, h0/2, h0/4} (the mode number doubles as h
/// halves, which is what keeps eta fixed exactly).
inline SubprincipalEstimate subprincipal_estimate(const oracle::RadialSolver& solver,
                                                  oracle::Side side, int eps, double eta,
                                                  double h0, int levels = 3) {
  const auto& cfg = solver.config();
  const double a_z = (side == oracle::Side::plus) ? cfg.a_plus_z() : cfg.a_minus_z();
  const double scale = std::sqrt(a_z) / cfg.rz;
  long n0 = std::lround(eta / (scale * h0));
  if (eta > 0.0 && n0 < 1)
    raise(errc::config_invalid, "eta too small for an integral mode at h0; decrease h0");
  double eta_exact = h0 * static_cast<double>(n0) * scale;

  SubprincipalEstimate out;
  out.side = side;
  out.eps = eps;
  out.eta = eta_exact;
  out.c0 = dtn_symbol(interface_collar(cfg, side), eps, eta_exact).c0;

  for (int k = 0; k < levels; ++k) {
    double hk = h0 / static_cast<double>(1 << k);
    int nk = static_cast<int>(n0 << k);
    out.h.push_back(hk);
    out.d_exact.push_back(solver.dtn_eigenvalue(side, eps, hk, nk));
  }

  std::vector<double> err(out.h.size());
  double floor = 1e-9 * (1.0 + std::abs(out.c0));
  bool all_floor = true;
  for (std::size_t i = 0; i < out.h.size(); ++i) {
    err[i] = std::abs(out.d_exact[i] - out.c0);
    all_floor = all_floor && err[i] <= floor;
  }
  if (all_floor) {
    out.c1 = 0.0;
    out.trend_slope = std::numeric_limits<double>::quiet_NaN();
    out.remainder_slope = std::numeric_limits<double>::quiet_NaN();
    out.exact = true;
    return out;
  }
  out.exact = false;
  out.trend_slope = detail::loglog_slope(out.h, err);
  if (!(out.trend_slope >= 0.8 && out.trend_slope <= 1.2))
    raise(errc::expansion_inconsistent,
          "|d - c0| does not decay linearly in h (slope " + std::to_string(out.trend_slope) + ")");

  std::vector<double> g(out.h.size());
  for (std::size_t i = 0; i < out.h.size(); ++i) g[i] = (out.d_exact[i] - out.c0) / out.h[i];
  if (g.size() >= 3) {
    double r1 = 2.0 * g[1] - g[0];
    double r2 = 2.0 * g[2] - g[1];
    out.c1 = (4.0 * r2 - r1) / 3.0;
  } else {
    out.c1 = 2.0 * g[1] - g[0];
  }
  std::vector<double> res(out.h.size());
  for (std::size_t i = 0; i < out.h.size(); ++i)
    res[i] = std::abs(out.d_exact[i] - out.c0 - out.h[i] * out.c1);
  out.remainder_slope = detail::loglog_slope(out.h, res);
  return out;
}

}  // namespace scl::wkb
