#pragma once

#include <array>
#include <cmath>
#include <cstddef>

#include "scl/error.hpp"

namespace scl {

struct OdeOptions {
  double rel_tol = 1e-10;
  double abs_tol = 1e-13;
  int max_steps = 400000;
};

/// Adaptive Dormand–Prince 5(4) for small fixed-size systems. Integrates
/// y' = f(t, y) from t0 to t1 (either direction). An optional observer is
/// invoked after every accepted step with (t, y).
template <std::size_t N, class F, class Observer>
std::array<double, N> integrate_ode(F&& f, double t0, double t1, std::array<double, N> y,
                                    const OdeOptions& opt, Observer&& observe) {
  using State = std::array<double, N>;
  if (t0 == t1) return y;
  const double dir = (t1 > t0) ? 1.0 : -1.0;

  // Dormand–Prince tableau
  constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                   a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                   a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784,
                   b6 = 11.0 / 84;
  constexpr double e1 = 35.0 / 384 - 5179.0 / 57600, e3 = 500.0 / 1113 - 7571.0 / 16695,
                   e4 = 125.0 / 192 - 393.0 / 640, e5 = -2187.0 / 6784 + 92097.0 / 339200,
                   e6 = 11.0 / 84 - 187.0 / 2100, e7 = -1.0 / 40;

  double t = t0;
  double h = dir * std::min(std::abs(t1 - t0), std::abs(t1 - t0) * 1e-2 + 1e-6);
  State k1;
  f(t, y, k1);
  int steps = 0;
  while (dir * (t1 - t) > 0.0) {
    if (++steps > opt.max_steps) raise(errc::numerical_failure, "ODE step limit exceeded");
    if (dir * (t + h - t1) > 0.0) h = t1 - t;

    State tmp, k2, k3, k4, k5, k6, k7, ynew;
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(t + c2 * h, tmp, k2);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(t + c3 * h, tmp, k3);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(t + c4 * h, tmp, k4);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(t + c5 * h, tmp, k5);
    for (std::size_t i = 0; i < N; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(t + h, tmp, k6);
    for (std::size_t i = 0; i < N; ++i)
      ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
    f(t + h, ynew, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      double e = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
      double scale = opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ynew[i]));
      err = std::max(err, std::abs(e) / scale);
    }
    if (err <= 1.0) {
      t += h;
      y = ynew;
      k1 = k7;  // FSAL
      observe(t, y);
    }
    double factor = (err > 0.0) ? 0.9 * std::pow(err, -0.2) : 5.0;
    h *= std::clamp(factor, 0.2, 5.0);
    if (std::abs(h) < 1e-15 * (std::abs(t) + 1.0))
      raise(errc::numerical_failure, "ODE step size underflow");
  }
  return y;
}

template <std::size_t N, class F>
std::array<double, N> integrate_ode(F&& f, double t0, double t1, std::array<double, N> y,
                                    const OdeOptions& opt) {
  return integrate_ode<N>(std::forward<F>(f), t0, t1, y, opt,
                          [](double, const std::array<double, N>&) {});
}

}  // namespace scl
