#pragma once

#include <complex>
#include <vector>

#include "scl/error.hpp"

namespace scl::wkb {

using Complex = std::complex<double>;

/// Polynomial-truncated formal power series with complex coefficients.
/// All arithmetic is closed at the fixed truncation order J (terms beyond
/// x^J are dropped).
class TruncatedSeries {
 public:
  explicit TruncatedSeries(int order) : c_(static_cast<std::size_t>(order) + 1, Complex{0.0, 0.0}) {
    if (order < 0) raise(errc::config_invalid, "series order must be >= 0");
  }

  static TruncatedSeries constant(Complex v, int order) {
    TruncatedSeries s(order);
    s.c_[0] = v;
    return s;
  }

  static TruncatedSeries from_coefficients(std::vector<Complex> coeffs) {
    if (coeffs.empty()) raise(errc::config_invalid, "series needs at least the constant term");
    TruncatedSeries s(static_cast<int>(coeffs.size()) - 1);
    s.c_ = std::move(coeffs);
    return s;
  }

  int order() const { return static_cast<int>(c_.size()) - 1; }
  Complex operator[](int k) const { return c_[static_cast<std::size_t>(k)]; }
  Complex& operator[](int k) { return c_[static_cast<std::size_t>(k)]; }

  TruncatedSeries& operator+=(const TruncatedSeries& o) {
    check_order(o);
    for (int k = 0; k <= order(); ++k) c_[k] += o.c_[k];
    return *this;
  }
  TruncatedSeries& operator-=(const TruncatedSeries& o) {
    check_order(o);
    for (int k = 0; k <= order(); ++k) c_[k] -= o.c_[k];
    return *this;
  }
  friend TruncatedSeries operator+(TruncatedSeries a, const TruncatedSeries& b) { return a += b; }
  friend TruncatedSeries operator-(TruncatedSeries a, const TruncatedSeries& b) { return a -= b; }

  friend TruncatedSeries operator*(const TruncatedSeries& a, const TruncatedSeries& b) {
    a.check_order(b);
    TruncatedSeries out(a.order());
    for (int i = 0; i <= a.order(); ++i)
      for (int j = 0; i + j <= a.order(); ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    return out;
  }

  friend TruncatedSeries operator*(Complex s, TruncatedSeries a) {
    for (auto& v : a.c_) v *= s;
    return a;
  }

  /// Principal-branch square root; requires a nonvanishing constant term.
  TruncatedSeries sqrt() const {
    if (c_[0] == Complex{0.0, 0.0})
      raise(errc::singular_symbol, "series sqrt needs a nonzero constant term");
    TruncatedSeries out(order());
    out.c_[0] = std::sqrt(c_[0]);
    for (int k = 1; k <= order(); ++k) {
      Complex acc = c_[k];
      for (int j = 1; j < k; ++j) acc -= out.c_[j] * out.c_[k - j];
      out.c_[k] = acc / (2.0 * out.c_[0]);
    }
    return out;
  }

  TruncatedSeries reciprocal() const {
    if (c_[0] == Complex{0.0, 0.0})
      raise(errc::singular_symbol, "series reciprocal needs a nonzero constant term");
    TruncatedSeries out(order());
    out.c_[0] = 1.0 / c_[0];
    for (int k = 1; k <= order(); ++k) {
      Complex acc{0.0, 0.0};
      for (int j = 1; j <= k; ++j) acc += c_[j] * out.c_[k - j];
      out.c_[k] = -acc / c_[0];
    }
    return out;
  }

  /// Substitute g(x) for x; g must have no constant term.
  TruncatedSeries compose(const TruncatedSeries& g) const {
    check_order(g);
    if (g.c_[0] != Complex{0.0, 0.0})
      raise(errc::config_invalid, "composition requires g(0) = 0");
    TruncatedSeries out = constant(c_[0], order());
    TruncatedSeries power = constant(1.0, order());
    for (int k = 1; k <= order(); ++k) {
      power = power * g;
      for (int j = 0; j <= order(); ++j) out.c_[j] += c_[k] * power.c_[j];
    }
    return out;
  }

  TruncatedSeries derivative() const {
    TruncatedSeries out(order());
    for (int k = 0; k < order(); ++k) out.c_[k] = static_cast<double>(k + 1) * c_[k + 1];
    return out;
  }

  /// Antiderivative with zero constant term; the x^J input term falls
  /// outside the truncation and is dropped.
  TruncatedSeries antiderivative() const {
    TruncatedSeries out(order());
    for (int k = 1; k <= order(); ++k) out.c_[k] = c_[k - 1] / static_cast<double>(k);
    return out;
  }

  Complex evaluate(double x) const {
    Complex acc{0.0, 0.0};
    for (int k = order(); k >= 0; --k) acc = acc * x + c_[k];
    return acc;
  }

  const std::vector<Complex>& coefficients() const { return c_; }

 private:
  void check_order(const TruncatedSeries& o) const {
    if (o.order() != order()) raise(errc::config_invalid, "series order mismatch");
  }

  std::vector<Complex> c_;
};

}  // namespace scl::wkb
