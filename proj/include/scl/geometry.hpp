#pragma once

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "scl/config.hpp"
#include "scl/error.hpp"

namespace scl {

/// Adaptive Gauss–Kronrod to an absolute tolerance.
template <class F>
double integrate_gk(F&& f, double lo, double hi, double abs_tol) {
  double err = 0.0;
  double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(
      std::forward<F>(f), lo, hi, 12, abs_tol, &err);
  if (!std::isfinite(val) || err > 100.0 * abs_tol + 1e-14 * std::abs(val))
    raise(errc::numerical_failure, "quadrature did not reach requested tolerance");
  return val;
}

struct ValidationReport {
  bool ok = false;
  std::vector<std::string> violations;
  double ellipticity_margin = 0.0;  // a+(rz) - a-(rz)
  bool sign_flip_remedy = false;    // contrast reversed everywhere: -M restores ellipticity
};

inline ValidationReport validate(const TwoPhaseDiskConfig& cfg) {
  ValidationReport rep;
  bool geometry_ok = true;
  if (!(cfg.rz > 0.0)) {
    rep.violations.push_back("interface radius rz must be positive");
    geometry_ok = false;
  }
  if (!(cfg.rz < cfg.ry)) {
    rep.violations.push_back("outer radius ry must exceed rz");
    geometry_ok = false;
  }
  if (geometry_ok) {
    if (cfg.a_plus.min_on(0.0, cfg.rz) <= 0.0)
      rep.violations.push_back("a_plus must be strictly positive on [0, rz]");
    if (cfg.a_minus.min_on(cfg.rz, cfg.ry) <= 0.0)
      rep.violations.push_back("a_minus must be strictly positive on [rz, ry]");
    rep.ellipticity_margin = cfg.a_plus_z() - cfg.a_minus_z();
    if (!(rep.ellipticity_margin > 0.0)) {
      rep.sign_flip_remedy = rep.ellipticity_margin < 0.0;
      rep.violations.push_back(
          rep.sign_flip_remedy
              ? "contrast reversed (a+ < a- on the interface): swap the sign of the operator"
              : "vanishing contrast on the interface");
    }
  }
  rep.ok = rep.violations.empty();
  return rep;
}

/// Shape and positivity only (volumes and per-side solves are meaningful
/// without the interface contrast).
inline void require_positive_geometry(const TwoPhaseDiskConfig& cfg) {
  if (!(cfg.rz > 0.0) || !(cfg.rz < cfg.ry))
    raise(errc::config_invalid, "need 0 < rz < ry");
  if (cfg.a_plus.min_on(0.0, cfg.rz) <= 0.0)
    raise(errc::config_invalid, "a_plus must be strictly positive on [0, rz]");
  if (cfg.a_minus.min_on(cfg.rz, cfg.ry) <= 0.0)
    raise(errc::config_invalid, "a_minus must be strictly positive on [rz, ry]");
}

/// Throwing variant: distinguishes shape errors from contrast errors.
inline void require_valid(const TwoPhaseDiskConfig& cfg) {
  require_positive_geometry(cfg);
  ValidationReport rep = validate(cfg);
  if (!rep.ok) raise(errc::ellipticity_violated, rep.violations.front());
}

/// C_d = Vol(B_d) / (2 pi)^d with B_d the unit ball.
inline double weyl_constant(int d) {
  if (d < 1) raise(errc::config_invalid, "dimension must be >= 1");
  double vol_ball = std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(0.5 * d + 1.0);
  return vol_ball / std::pow(two_pi, d);
}

/// Areas of the two phases for the conformal metrics a^{-1} g0:
/// v± = 2 pi ∫ r / a±(r) dr over the respective radial interval.
inline std::pair<double, double> riemannian_volumes(const TwoPhaseDiskConfig& cfg) {
  require_positive_geometry(cfg);
  double vp = two_pi * integrate_gk([&](double r) { return r / cfg.a_plus(r); }, 0.0, cfg.rz,
                                    cfg.tol.quad_abs);
  double vm = two_pi * integrate_gk([&](double r) { return r / cfg.a_minus(r); }, cfg.rz, cfg.ry,
                                    cfg.tol.quad_abs);
  return {vp, vm};
}

struct InterfaceLength {
  double big_a;     // A = (a+ - a-)/2 on the interface
  double length;    // Euclidean length L = 2 pi rz
  double l_k;       // l = L / sqrt(A) for radial coefficients
  double c_minus2;  // (2 pi)^2 / l^2
};

inline InterfaceLength k_length(const TwoPhaseDiskConfig& cfg) {
  double big_a = 0.5 * (cfg.a_plus_z() - cfg.a_minus_z());
  if (!(big_a > 0.0))
    raise(errc::ellipticity_violated, "interface symbol coefficient A must be positive");
  InterfaceLength out;
  out.big_a = big_a;
  out.length = two_pi * cfg.rz;
  out.l_k = out.length / std::sqrt(big_a);
  out.c_minus2 = (two_pi * two_pi) / (out.l_k * out.l_k);
  return out;
}

struct Predictions {
  double v_plus;
  double v_minus;
  double c_d;       // d = 2
  double big_a;
  double l_k;
  double c_minus2;
  double margin;    // a+(rz) - a-(rz)
};

inline Predictions predictions(const TwoPhaseDiskConfig& cfg) {
  auto [vp, vm] = riemannian_volumes(cfg);
  auto lk = k_length(cfg);
  return Predictions{vp, vm, weyl_constant(2), lk.big_a, lk.l_k, lk.c_minus2,
                     cfg.a_plus_z() - cfg.a_minus_z()};
}

}  // namespace scl
