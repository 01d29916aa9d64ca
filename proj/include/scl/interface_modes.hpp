#pragma once

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/geometry.hpp"
#include "scl/io.hpp"
#include "scl/radial.hpp"

namespace scl::iface {

/// Principal symbol of the interface operator at mode n and semiclassical
/// parameter h: q = A (h n / rz)^2 - 1 with A = (a+ - a-)/2 on the interface.
inline double q_principal(const TwoPhaseDiskConfig& cfg, double h, int n) {
  double big_a = 0.5 * (cfg.a_plus_z() - cfg.a_minus_z());
  double t = h * n / cfg.rz;
  return big_a * t * t - 1.0;
}

/// Exact per-mode value of the interface operator, assembled from the two
/// one-sided DtN multipliers: q = (d+ + d-)(d+ - d-)/2.
inline double q_exact(const oracle::RadialSolver& solver, double h, int n) {
  double dp = solver.dtn_eigenvalue(oracle::Side::plus, -1, h, n);
  double dm = solver.dtn_eigenvalue(oracle::Side::minus, +1, h, n);
  return 0.5 * (dp + dm) * (dp - dm);
}

struct InterfaceMode {
  int n = 0;
  double h_star = 0.0;
  double lambda = 0.0;            // h_star^{-2}
  double lambda_principal = 0.0;  // mu_n = A (n/rz)^2 (or the flux analog)
  double lambda_corrected = 0.0;  // after the first-order correction
  double alpha1 = 0.0;
  Transmission convention = Transmission::unit_normal;
};

/// Dispersion constant of the interface branch under each matching
/// convention: A for unit-normal, 2A = a+ - a- for flux.
inline double dispersion_constant(const TwoPhaseDiskConfig& cfg, Transmission conv) {
  double big_a = 0.5 * (cfg.a_plus_z() - cfg.a_minus_z());
  return conv == Transmission::unit_normal ? big_a : 2.0 * big_a;
}

namespace detail {

/// Weighted matching function G(lambda) = c+ w+ + c- w- whose unique zero in
/// the elliptic window is the interface eigenvalue of mode n. G is strictly
/// decreasing there and the window is pole-free (the first inner Dirichlet
/// eigenvalue lies above the elliptic cutoff a+ (n/rz)^2).
inline double matching_value(const oracle::RadialSolver& solver, Transmission conv, int n,
                             double lambda) {
  const auto& cfg = solver.config();
  double ap = cfg.a_plus_z(), am = cfg.a_minus_z();
  double cp = (conv == Transmission::unit_normal) ? std::sqrt(ap) : ap;
  double cm = (conv == Transmission::unit_normal) ? std::sqrt(am) : am;
  double wp = solver.inner_logderiv_plain(n, lambda, cfg.rz);
  double wm = solver.outer_logderiv_plain(n, -lambda, cfg.rz);
  return cp * wp + cm * wm;
}

}  // namespace detail

/// Solves the two-sided DtN matching for the interface eigenvalue of mode n,
/// seeded at the principal prediction mu_n; throws NoInterfaceMode when the
/// matching has no zero below the elliptic cutoff (expected for small n).
inline InterfaceMode quantize(const oracle::RadialSolver& solver, int n,
                              std::optional<Transmission> conv_opt = std::nullopt) {
  const auto& cfg = solver.config();
  Transmission conv = conv_opt.value_or(cfg.transmission);
  if (n < 1) raise(errc::no_interface_mode, "mode n = 0 has no interface branch");
  auto rep = validate(cfg);
  if (!rep.ok) raise(errc::ellipticity_violated, rep.violations.front());

  const double cutoff = cfg.a_plus_z() * std::pow(n / cfg.rz, 2);  // elliptic region bound
  const double hi = cutoff * (1.0 - 1e-9);
  const double lo = cutoff * 1e-8;

  auto g = [&](double lam) { return detail::matching_value(solver, conv, n, lam); };
  double g_lo = g(lo);
  if (!(g_lo > 0.0)) raise(errc::no_interface_mode, "matching already negative at the window floor");

  // G is monotone decreasing: march toward the cutoff until the sign flips
  double a = lo, b = hi, g_b = g(b);
  if (g_b > 0.0) raise(errc::no_interface_mode, "no sign change below the elliptic cutoff");
  const int grid = 32;
  double prev = lo, g_prev = g_lo;
  for (int i = 1; i <= grid; ++i) {
    double x = lo + (hi - lo) * i / grid;
    double gx = (i == grid) ? g_b : g(x);
    if (g_prev > 0.0 && gx <= 0.0) {
      a = prev;
      b = x;
      g_lo = g_prev;
      g_b = gx;
      break;
    }
    prev = x;
    g_prev = gx;
  }

  auto tol = [&](double x, double y) {
    return std::abs(y - x) <= cfg.tol.root_rel * std::max(1.0, std::abs(0.5 * (x + y)));
  };
  std::uintmax_t iters = 100;
  auto bracket = boost::math::tools::toms748_solve(g, a, b, g_lo, g_b, tol, iters);
  double lambda = 0.5 * (bracket.first + bracket.second);

  InterfaceMode mode;
  mode.n = n;
  mode.convention = conv;
  mode.lambda = lambda;
  mode.h_star = 1.0 / std::sqrt(lambda);
  mode.lambda_principal = dispersion_constant(cfg, conv) * std::pow(n / cfg.rz, 2);
  mode.lambda_corrected = mode.lambda_principal;  // filled by the caller via perturbation
  return mode;
}

struct DeltaKMode {
  int n;
  double mu;  // A (n/rz)^2 = (2 pi n / l)^2
  int multiplicity;
  double h;   // mu^{-1/2}; 0 marks the absent n = 0 value
};

/// Spectrum of the comparison operator on the interface circle with metric
/// A^{-1} dy^2: mu_n = (2 pi n / l)^2 with multiplicity 2 for n >= 1.
inline std::vector<DeltaKMode> delta_k_spectrum(const TwoPhaseDiskConfig& cfg, int n_max) {
  auto lk = k_length(cfg);
  std::vector<DeltaKMode> out;
  for (int n = 0; n <= n_max; ++n) {
    double mu = lk.c_minus2 * n * n;  // (2 pi / l)^2 n^2
    out.push_back({n, mu, n == 0 ? 1 : 2, n == 0 ? 0.0 : 1.0 / std::sqrt(mu)});
  }
  return out;
}

struct FirstOrderCorrection {
  double p1;                // empirical subprincipal multiplier at mode n
  double alpha1;            // -p1 / 2
  double lambda_corrected;  // root of mu h^2 + p1 h - 1 = 0, as h^{-2}
};

/// First-order correction to the principal interface eigenvalue, extracted
/// from the exact interface operator at the principal h. Rotational symmetry
/// makes the degenerate 2x2 block over e^{±i n theta} scalar, so the scalar
/// scheme applies verbatim.
inline FirstOrderCorrection perturbation_first_order(const oracle::RadialSolver& solver, int n) {
  const auto& cfg = solver.config();
  double mu = dispersion_constant(cfg, Transmission::unit_normal) * std::pow(n / cfg.rz, 2);
  if (!(mu > 0.0)) raise(errc::correction_failed, "principal eigenvalue must be positive");
  double h0 = 1.0 / std::sqrt(mu);
  FirstOrderCorrection out;
  out.p1 = q_exact(solver, h0, n) / h0;
  out.alpha1 = -0.5 * out.p1;
  double disc = out.p1 * out.p1 + 4.0 * mu;
  if (!(disc > 0.0)) raise(errc::correction_failed, "negative discriminant in the corrected root");
  double h_corr = (-out.p1 + std::sqrt(disc)) / (2.0 * mu);
  if (!(h_corr > 0.0)) raise(errc::correction_failed, "corrected h is not positive");
  out.lambda_corrected = 1.0 / (h_corr * h_corr);
  return out;
}

struct InterfaceCount {
  int lattice;        // exact count of {mu_n <= Lambda}, n >= 1, with multiplicity
  double asymptotic;  // (l / pi) sqrt(Lambda)
};

inline InterfaceCount interface_weyl(const TwoPhaseDiskConfig& cfg, double Lambda) {
  auto lk = k_length(cfg);
  InterfaceCount out{0, 0.0};
  if (Lambda > 0.0) {
    out.lattice = 2 * static_cast<int>(std::floor(lk.l_k * std::sqrt(Lambda) / two_pi + 1e-12));
    out.asymptotic = lk.l_k / std::numbers::pi * std::sqrt(Lambda);
  }
  return out;
}

/// Interface table over a mode range, with first-order corrections filled in.
inline std::vector<InterfaceMode> interface_table(const oracle::RadialSolver& solver, int n_lo,
                                                  int n_hi,
                                                  std::optional<Transmission> conv = std::nullopt) {
  std::vector<InterfaceMode> out;
  for (int n = n_lo; n <= n_hi; ++n) {
    InterfaceMode mode = quantize(solver, n, conv);
    if (mode.convention == Transmission::unit_normal) {
      auto corr = perturbation_first_order(solver, n);
      mode.alpha1 = corr.alpha1;
      mode.lambda_corrected = corr.lambda_corrected;
    }
    out.push_back(mode);
  }
  return out;
}

inline void write_interface_csv(std::ostream& os, const std::vector<InterfaceMode>& modes) {
  os << "n,h_star,lambda,lambda_principal,lambda_corrected,alpha1,convention\n";
  for (const auto& m : modes)
    os << m.n << ',' << format_g17(m.h_star) << ',' << format_g17(m.lambda) << ','
       << format_g17(m.lambda_principal) << ',' << format_g17(m.lambda_corrected) << ','
       << format_g17(m.alpha1) << ',' << transmission_name(m.convention) << '\n';
}

inline void write_interface_csv(const std::string& path, const std::vector<InterfaceMode>& modes) {
  std::ofstream os(path);
  if (!os) raise(errc::numerical_failure, "cannot open " + path + " for writing");
  write_interface_csv(os, modes);
}

}  // namespace scl::iface
