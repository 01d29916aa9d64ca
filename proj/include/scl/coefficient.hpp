#pragma once

#include <algorithm>
#include <cmath>
#include <utility>
#include <variant>
#include <vector>

#include "scl/error.hpp"

namespace scl {

/// A strictly positive radial coefficient a(r), evaluable with its first
/// derivative. Three representations: constant, polynomial in r, or sampled
/// values joined by a monotonicity-preserving cubic (Fritsch–Carlson).
class RadialCoefficient {
 public:
  struct Constant {
    double value;
  };
  struct Polynomial {
    std::vector<double> coeffs;  // a(r) = sum_k coeffs[k] r^k
  };
  struct Sampled {
    std::vector<double> r;
    std::vector<double> v;
    std::vector<double> slope;  // Hermite slopes at the nodes
  };

  RadialCoefficient() : repr_(Constant{1.0}) {}

  static RadialCoefficient constant(double v) { return RadialCoefficient(Constant{v}); }

  static RadialCoefficient polynomial(std::vector<double> coeffs) {
    if (coeffs.empty()) raise(errc::config_invalid, "polynomial coefficient needs at least one term");
    return RadialCoefficient(Polynomial{std::move(coeffs)});
  }

  static RadialCoefficient sampled(std::vector<double> r, std::vector<double> v) {
    if (r.size() != v.size() || r.size() < 2)
      raise(errc::config_invalid, "sampled coefficient needs matching grids with >= 2 points");
    for (std::size_t i = 1; i < r.size(); ++i)
      if (!(r[i] > r[i - 1])) raise(errc::config_invalid, "sampled grid must be strictly increasing");
    Sampled s{std::move(r), std::move(v), {}};
    s.slope = fritsch_carlson_slopes(s.r, s.v);
    return RadialCoefficient(std::move(s));
  }

  double operator()(double r) const {
    if (const auto* c = std::get_if<Constant>(&repr_)) return c->value;
    if (const auto* p = std::get_if<Polynomial>(&repr_)) {
      double acc = 0.0;
      for (std::size_t k = p->coeffs.size(); k-- > 0;) acc = acc * r + p->coeffs[k];
      return acc;
    }
    const auto& s = std::get<Sampled>(repr_);
    return hermite(s, clamp_to_grid(s, r)).first;
  }

  double derivative(double r) const {
    if (std::holds_alternative<Constant>(repr_)) return 0.0;
    if (const auto* p = std::get_if<Polynomial>(&repr_)) {
      double acc = 0.0;
      for (std::size_t k = p->coeffs.size(); k-- > 1;) acc = acc * r + static_cast<double>(k) * p->coeffs[k];
      return acc;
    }
    const auto& s = std::get<Sampled>(repr_);
    return hermite(s, clamp_to_grid(s, r)).second;
  }

  bool is_constant() const { return std::holds_alternative<Constant>(repr_); }

  /// Minimum over [lo, hi]; exact for constants, dense scan otherwise.
  double min_on(double lo, double hi, int samples = 2048) const {
    if (const auto* c = std::get_if<Constant>(&repr_)) return c->value;
    double m = (*this)(lo);
    for (int i = 1; i <= samples; ++i) {
      double r = lo + (hi - lo) * static_cast<double>(i) / samples;
      m = std::min(m, (*this)(r));
    }
    return m;
  }

  const std::variant<Constant, Polynomial, Sampled>& repr() const { return repr_; }

 private:
  explicit RadialCoefficient(std::variant<Constant, Polynomial, Sampled> r) : repr_(std::move(r)) {}

  static std::vector<double> fritsch_carlson_slopes(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    std::vector<double> h(n - 1), delta(n - 1), d(n);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      h[i] = x[i + 1] - x[i];
      delta[i] = (y[i + 1] - y[i]) / h[i];
    }
    d[0] = delta[0];
    d[n - 1] = delta[n - 2];
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (delta[i - 1] * delta[i] <= 0.0) {
        d[i] = 0.0;
      } else {
        // weighted harmonic mean keeps the interpolant monotone on monotone data
        double w1 = 2.0 * h[i] + h[i - 1];
        double w2 = h[i] + 2.0 * h[i - 1];
        d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
      }
    }
    for (std::size_t i = 0; i + 1 < n; ++i) {
      if (delta[i] == 0.0) {
        d[i] = d[i + 1] = 0.0;
      } else {
        double alpha = d[i] / delta[i], beta = d[i + 1] / delta[i];
        double s = alpha * alpha + beta * beta;
        if (s > 9.0) {
          double tau = 3.0 / std::sqrt(s);
          d[i] = tau * alpha * delta[i];
          d[i + 1] = tau * beta * delta[i];
        }
      }
    }
    return d;
  }

  static double clamp_to_grid(const Sampled& s, double r) {
    return std::clamp(r, s.r.front(), s.r.back());
  }

  static std::pair<double, double> hermite(const Sampled& s, double r) {
    auto it = std::upper_bound(s.r.begin(), s.r.end(), r);
    std::size_t i = (it == s.r.begin()) ? 0 : static_cast<std::size_t>(it - s.r.begin()) - 1;
    i = std::min(i, s.r.size() - 2);
    double h = s.r[i + 1] - s.r[i];
    double t = (r - s.r[i]) / h;
    double h00 = (1 + 2 * t) * (1 - t) * (1 - t);
    double h10 = t * (1 - t) * (1 - t);
    double h01 = t * t * (3 - 2 * t);
    double h11 = t * t * (t - 1);
    double value = h00 * s.v[i] + h10 * h * s.slope[i] + h01 * s.v[i + 1] + h11 * h * s.slope[i + 1];
    double dh00 = 6 * t * (t - 1);
    double dh10 = (1 - t) * (1 - 3 * t);
    double dh01 = -dh00;
    double dh11 = t * (3 * t - 2);
    double deriv = (dh00 * s.v[i] + dh01 * s.v[i + 1]) / h + dh10 * s.slope[i] + dh11 * s.slope[i + 1];
    return {value, deriv};
  }

  std::variant<Constant, Polynomial, Sampled> repr_;
};

}  // namespace scl
