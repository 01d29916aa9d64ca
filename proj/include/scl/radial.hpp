#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include <boost/math/tools/roots.hpp>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/ode.hpp"
#include "scl/spectrum.hpp"

namespace scl::oracle {

enum class Side { plus, minus };

inline const char* side_name(Side s) { return s == Side::plus ? "plus" : "minus"; }

/// Prüfer representation of a radial solution: f = rho sin(phi),
/// p f' = rho cos(phi) with p(r) = r a(r). The angle stays finite through
/// zeros of f and of f', which is what lets the secular scan cross
/// log-derivative poles without bookkeeping.
struct AngleState {
  double phi = 0.0;
  double log_rho = 0.0;
};

/// A sampled eigenfunction profile, normalized to unit L2(X) mass
/// (2 pi ∫ f^2 r dr = 1). Samples are uniform per side.
struct RadialProfile {
  std::vector<double> r_plus, f_plus;
  std::vector<double> r_minus, f_minus;

  /// L2 mass of the normalized profile on the radial band [r0, r1].
  double mass(double r0, double r1) const {
    return band_integral(r_plus, f_plus, r0, r1) + band_integral(r_minus, f_minus, r0, r1);
  }

  static double band_integral(const std::vector<double>& r, const std::vector<double>& f,
                              double r0, double r1) {
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < r.size(); ++i) {
      double a = std::max(r[i], r0), b = std::min(r[i + 1], r1);
      if (b <= a) continue;
      auto g = [&](double x) {
        double t = (x - r[i]) / (r[i + 1] - r[i]);
        double v = f[i] + t * (f[i + 1] - f[i]);
        return v * v * x;
      };
      acc += 0.5 * (b - a) * (g(a) + g(b));
    }
    return 2.0 * std::numbers::pi * acc;
  }
};

/// Exact (to integrator tolerance) separation-of-variables solver for the
/// sign-changing disk problem. Per angular mode n the inner solution is
/// regular at 0, the outer one vanishes at ry; eigenvalues are the zeros of
/// the secular matching at rz. The spectral parameter lambda follows the
/// operator convention: the annulus side sees -lambda.
class RadialSolver {
 public:
  explicit RadialSolver(const TwoPhaseDiskConfig& cfg) : cfg_(cfg) {
    ode_.rel_tol = cfg.tol.ode_rel;
    ode_.abs_tol = cfg.tol.ode_abs;
  }

  const TwoPhaseDiskConfig& config() const { return cfg_; }
  OdeOptions& ode_options() { return ode_; }

  // --- plain-parameter solutions of -div(a grad f) = mu f, mode n ---------

  AngleState inner_angle(int n, double mu, double r) const {
    if (!(r > 0.0 && r <= cfg_.rz + 1e-12 * cfg_.rz))
      raise(errc::config_invalid, "inner radius out of range");
    auto [r0, state] = inner_start(n, mu, r);
    if (r0 >= r) return state;
    return integrate_side(cfg_.a_plus, n, mu, r0, r, state);
  }

  AngleState outer_angle(int n, double mu, double r) const {
    if (!(r >= cfg_.rz - 1e-12 * cfg_.rz && r < cfg_.ry))
      raise(errc::config_invalid, "outer radius out of range");
    AngleState state{std::numbers::pi, 0.0};  // f(ry) = 0, f' = -1
    return integrate_side(cfg_.a_minus, n, mu, cfg_.ry, r, state);
  }

  double inner_logderiv_plain(int n, double mu, double r) const {
    return logderiv_from_angle(inner_angle(n, mu, r), r, cfg_.a_plus(r));
  }

  double outer_logderiv_plain(int n, double mu, double r) const {
    return logderiv_from_angle(outer_angle(n, mu, r), r, cfg_.a_minus(r));
  }

  // --- operator-convention wrappers (lambda) -------------------------------

  /// f'/f at r for the regular-at-0 solution of the mode-n problem at
  /// eigenvalue parameter lambda.
  double inner_logderiv(int n, double lambda, double r) const {
    return inner_logderiv_plain(n, lambda, r);
  }

  /// f'/f at r for the solution vanishing at ry; the annulus side carries
  /// the reversed spectral parameter.
  double outer_logderiv(int n, double lambda, double r) const {
    return outer_logderiv_plain(n, -lambda, r);
  }

  /// Matching weights: sqrt(a±) for the unit-normal condition, a± for the
  /// flux condition.
  std::pair<double, double> matching_weights() const {
    double ap = cfg_.a_plus_z(), am = cfg_.a_minus_z();
    if (cfg_.transmission == Transmission::unit_normal) return {std::sqrt(ap), std::sqrt(am)};
    return {ap, am};
  }

  /// Secular value s(lambda) = c+ w+ + c- w-. Blows up at log-derivative
  /// poles; near one, throws and the caller must use the bounded scan form.
  double secular(int n, double lambda) const {
    AngleState in = inner_angle(n, lambda, cfg_.rz);
    AngleState out = outer_angle(n, -lambda, cfg_.rz);
    if (std::abs(std::sin(in.phi)) < 1e-12 || std::abs(std::sin(out.phi)) < 1e-12)
      raise(errc::secular_pole, "lambda is at (or hugging) a log-derivative pole");
    auto [cp, cm] = matching_weights();
    double pp = cfg_.rz * cfg_.a_plus_z(), pm = cfg_.rz * cfg_.a_minus_z();
    return cp * std::cos(in.phi) / (pp * std::sin(in.phi)) +
           cm * std::cos(out.phi) / (pm * std::sin(out.phi));
  }

  /// Bounded secular form F = (c+/p+) cos(phi+) sin(phi-) + (c-/p-) cos(phi-) sin(phi+).
  /// Same zeros as s, continuous across poles, |F| = O(1); sign changes of F
  /// happen exactly at eigenvalues.
  double secular_bounded(int n, double lambda) const {
    AngleState in = inner_angle(n, lambda, cfg_.rz);
    AngleState out = outer_angle(n, -lambda, cfg_.rz);
    auto [cp, cm] = matching_weights();
    double pp = cfg_.rz * cfg_.a_plus_z(), pm = cfg_.rz * cfg_.a_minus_z();
    return (cp / pp) * std::cos(in.phi) * std::sin(out.phi) +
           (cm / pm) * std::cos(out.phi) * std::sin(in.phi);
  }

  // --- eigenvalues ----------------------------------------------------------

  /// All eigenvalues of mode n in [lo, hi]. Scan of the bounded secular form
  /// with the grid doubled until the sign-change count stabilizes twice, then
  /// TOMS 748 refinement of each bracket.
  std::vector<SpectrumRecord> mode_eigenvalues(int n, double lo, double hi) const {
    std::vector<SpectrumRecord> out;
    if (!(std::isfinite(lo) && std::isfinite(hi))) raise(errc::config_invalid, "window must be finite");
    if (!(lo < hi)) return out;

    std::vector<double> grid, values;
    const int initial = 128;
    grid.reserve(initial + 1);
    for (int i = 0; i <= initial; ++i) grid.push_back(lo + (hi - lo) * i / initial);
    values.reserve(grid.size());
    for (double x : grid) values.push_back(secular_bounded(n, x));

    auto count_changes = [&]() {
      int c = 0;
      for (std::size_t i = 0; i + 1 < values.size(); ++i)
        if (values[i] == 0.0 || values[i] * values[i + 1] < 0.0) ++c;
      return c;
    };

    int stable = 0;
    int count = count_changes();
    while (stable < 2 && grid.size() < (1u << 17)) {
      std::vector<double> g2, v2;
      g2.reserve(2 * grid.size());
      v2.reserve(2 * grid.size());
      for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        double mid = 0.5 * (grid[i] + grid[i + 1]);
        g2.push_back(grid[i]);
        v2.push_back(values[i]);
        g2.push_back(mid);
        v2.push_back(secular_bounded(n, mid));
      }
      g2.push_back(grid.back());
      v2.push_back(values.back());
      grid.swap(g2);
      values.swap(v2);
      int c2 = count_changes();
      stable = (c2 == count) ? stable + 1 : 0;
      count = c2;
    }

    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      bool crossing = values[i] == 0.0 || values[i] * values[i + 1] < 0.0;
      if (!crossing) continue;
      double root;
      if (values[i] == 0.0) {
        root = grid[i];
      } else {
        auto f = [&](double x) { return secular_bounded(n, x); };
        auto tol = [&](double a, double b) {
          return std::abs(b - a) <= cfg_.tol.root_rel * std::max(1.0, std::abs(0.5 * (a + b)));
        };
        std::uintmax_t iters = 80;
        auto bracket =
            boost::math::tools::toms748_solve(f, grid[i], grid[i + 1], values[i], values[i + 1], tol, iters);
        if (iters >= 80)
          raise(errc::numerical_failure, "secular root refinement did not converge in bracket [" +
                                             std::to_string(grid[i]) + ", " + std::to_string(grid[i + 1]) + "]");
        root = 0.5 * (bracket.first + bracket.second);
      }
      SpectrumRecord rec;
      rec.lambda = root;
      rec.n = n;
      rec.multiplicity = (n == 0) ? 1 : 2;
      rec.residual = std::abs(secular_bounded(n, root));
      rec.provenance = Provenance::oracle;
      out.push_back(rec);
    }
    return out;
  }

  /// Merged spectrum with |lambda| <= Lambda over all angular modes.
  /// Modes are independent and fan out to `jobs` workers; the merge is a
  /// deterministic sort by (lambda, n).
  std::vector<SpectrumRecord> full_spectrum(double Lambda, int jobs = 0) const {
    if (!(Lambda >= 0.0)) raise(errc::config_invalid, "Lambda must be nonnegative");
    if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));

    std::vector<std::vector<SpectrumRecord>> per_mode;
    int empty_run = 0;
    int n = 0;
    const int n_cap = mode_cap(Lambda);
    while (empty_run < 2 && n <= n_cap) {
      int block = std::max(1, jobs);
      std::vector<std::vector<SpectrumRecord>> results(block);
      std::vector<std::thread> workers;
      for (int t = 0; t < block; ++t)
        workers.emplace_back([&, t] { results[t] = mode_eigenvalues(n + t, -Lambda, Lambda); });
      for (auto& w : workers) w.join();
      for (int t = 0; t < block && empty_run < 2; ++t) {
        per_mode.push_back(std::move(results[t]));
        empty_run = per_mode.back().empty() ? empty_run + 1 : 0;
      }
      n += block;
    }

    std::vector<SpectrumRecord> merged;
    for (auto& v : per_mode)
      for (auto& rec : v) merged.push_back(rec);
    std::stable_sort(merged.begin(), merged.end(), spectrum_order);
    return merged;
  }

  // --- semiclassical Dirichlet-to-Neumann ----------------------------------

  /// Exact per-mode DtN eigenvalue d = h * dn f / f on the interface circle,
  /// for the extension solving (h^2 Delta + eps) f = 0 on the given side
  /// (regular at 0 on the disk side, vanishing at ry on the annulus side).
  /// The metric-unit normal gives the sqrt(a) weight and the outward
  /// orientation flips the sign on the annulus side.
  double dtn_eigenvalue(Side side, int eps, double h, int n) const {
    if (!(h > 0.0) || n < 0) raise(errc::config_invalid, "need h > 0 and n >= 0");
    if (eps != 0 && eps != 1 && eps != -1) raise(errc::config_invalid, "eps must be in {0,+1,-1}");
    const double a_z = (side == Side::plus) ? cfg_.a_plus_z() : cfg_.a_minus_z();
    if (eps == -1) {
      double kstar = a_z * std::pow(h * n / cfg_.rz, 2);
      if (!(kstar > 1.0))
        raise(errc::elliptic_region_violated,
              "mode (h=" + std::to_string(h) + ", n=" + std::to_string(n) + ") has k* <= 1");
    }
    const double mu = -static_cast<double>(eps) / (h * h);
    double w = (side == Side::plus) ? inner_logderiv_plain(n, mu, cfg_.rz)
                                    : outer_logderiv_plain(n, mu, cfg_.rz);
    double orient = (side == Side::plus) ? 1.0 : -1.0;
    return orient * h * std::sqrt(a_z) * w;
  }

  // --- eigenfunction profiles -----------------------------------------------

  /// Sample the radial profile of the eigenfunction at (n, lambda); lambda
  /// should be an eigenvalue (the two sides are glued by value continuity,
  /// falling back to the derivative condition at a shared zero).
  RadialProfile sample_profile(int n, double lambda, int samples_per_side = 2000) const {
    RadialProfile prof;
    auto [r0_plus, st] = inner_start(n, lambda, cfg_.rz);

    std::vector<AngleState> plus_states;
    prof.r_plus = linspace(r0_plus, cfg_.rz, samples_per_side);
    plus_states = integrate_with_samples(cfg_.a_plus, n, lambda, prof.r_plus, st);

    prof.r_minus = linspace(cfg_.ry, cfg_.rz, samples_per_side);
    AngleState st_out{std::numbers::pi, 0.0};
    std::vector<AngleState> minus_states =
        integrate_with_samples(cfg_.a_minus, n, -lambda, prof.r_minus, st_out);
    std::reverse(prof.r_minus.begin(), prof.r_minus.end());
    std::reverse(minus_states.begin(), minus_states.end());

    // glue: rescale the annulus side so the two traces agree at rz
    const AngleState& ip = plus_states.back();
    const AngleState& im = minus_states.front();
    double log_beta, beta_sign;
    double sp = std::sin(ip.phi), sm = std::sin(im.phi);
    if (std::abs(sp) > 1e-8 && std::abs(sm) > 1e-8) {
      log_beta = ip.log_rho - im.log_rho + std::log(std::abs(sp / sm));
      beta_sign = (sp * sm > 0) ? 1.0 : -1.0;
    } else {
      auto [cpw, cmw] = matching_weights();
      double pp = cfg_.rz * cfg_.a_plus_z(), pm = cfg_.rz * cfg_.a_minus_z();
      double cp = std::cos(ip.phi), cm = std::cos(im.phi);
      log_beta = ip.log_rho - im.log_rho + std::log(std::abs((cpw * pm * cp) / (cmw * pp * cm)));
      beta_sign = ((cp * cm > 0) ? -1.0 : 1.0);
    }

    double umax = -1e300;
    for (const auto& s : plus_states) umax = std::max(umax, s.log_rho);
    for (const auto& s : minus_states) umax = std::max(umax, s.log_rho + log_beta);

    prof.f_plus.reserve(plus_states.size());
    for (const auto& s : plus_states) prof.f_plus.push_back(std::exp(s.log_rho - umax) * std::sin(s.phi));
    prof.f_minus.reserve(minus_states.size());
    for (const auto& s : minus_states)
      prof.f_minus.push_back(beta_sign * std::exp(s.log_rho + log_beta - umax) * std::sin(s.phi));

    double total = RadialProfile::band_integral(prof.r_plus, prof.f_plus, 0.0, cfg_.ry) +
                   RadialProfile::band_integral(prof.r_minus, prof.f_minus, 0.0, cfg_.ry);
    if (!(total > 0.0)) raise(errc::numerical_failure, "profile has vanishing mass");
    double scale = 1.0 / std::sqrt(total);
    for (auto& v : prof.f_plus) v *= scale;
    for (auto& v : prof.f_minus) v *= scale;
    return prof;
  }

 private:
  static double logderiv_from_angle(const AngleState& st, double r, double a) {
    double s = std::sin(st.phi);
    if (std::abs(s) < 1e-13)
      raise(errc::secular_pole, "log-derivative pole (f = 0) at the evaluation radius");
    return std::cos(st.phi) / (r * a * s);
  }

  static std::vector<double> linspace(double a, double b, int intervals) {
    std::vector<double> v(intervals + 1);
    for (int i = 0; i <= intervals; ++i) v[i] = a + (b - a) * i / intervals;
    return v;
  }

  // phi' = cos^2(phi)/p - q sin^2(phi),  (log rho)' = (1/p + q) sin cos,
  // with p = r a(r), q = a n^2 / r - mu r.
  AngleState integrate_side(const RadialCoefficient& a, int n, double mu, double r_from,
                            double r_to, AngleState st) const {
    auto rhs = [&](double r, const std::array<double, 2>& y, std::array<double, 2>& dy) {
      double ar = a(r);
      double p = r * ar;
      double q = ar * n * n / r - mu * r;
      double s = std::sin(y[0]), c = std::cos(y[0]);
      dy[0] = c * c / p - q * s * s;
      dy[1] = (1.0 / p + q) * s * c;
    };
    auto y = integrate_ode<2>(rhs, r_from, r_to, {st.phi, st.log_rho}, ode_);
    return {y[0], y[1]};
  }

  std::vector<AngleState> integrate_with_samples(const RadialCoefficient& a, int n, double mu,
                                                 const std::vector<double>& rs, AngleState st) const {
    std::vector<AngleState> out;
    out.reserve(rs.size());
    out.push_back(st);
    for (std::size_t i = 0; i + 1 < rs.size(); ++i) {
      st = integrate_side(a, n, mu, rs[i], rs[i + 1], st);
      out.push_back(st);
    }
    return out;
  }

  /// Series start for the regular solution near r = 0. Constant coefficient:
  /// full power series f = sum c_k r^{n+2k} at a radius where it converges
  /// without cancellation; variable coefficient: two-term Frobenius from a
  /// much smaller radius.
  std::pair<double, AngleState> inner_start(int n, double mu, double r_target) const {
    const double a0 = cfg_.a_plus(0.0);
    double r0;
    if (cfg_.a_plus.is_constant()) {
      double kappa = std::sqrt(std::abs(mu) / a0);
      double reach = (mu > 0.0) ? 2.0 * std::sqrt(n + 1.0) : 2.0 * (n + 1.0);
      r0 = (kappa > 0.0) ? std::min(0.25 * cfg_.rz, reach / kappa) : 0.25 * cfg_.rz;
      r0 = std::min(r0, r_target);
      // f_rel = sum c_k r^{2k}, fp_rel = sum c_k (n + 2k) r^{2k}; rescale on the
      // fly so large modified-regime terms cannot overflow.
      double term = 1.0, s1 = 0.0, s2 = 0.0;
      const double x2 = r0 * r0;
      for (int k = 0; k < 400; ++k) {
        s1 += term;
        s2 += term * (n + 2.0 * k);
        double next = term * (-mu / a0) * x2 / (4.0 * (k + 1.0) * (n + k + 1.0));
        if (std::abs(next) < 1e-17 * (std::abs(s1) + 1e-300)) break;
        term = next;
        if (std::abs(s1) > 1e250) {
          s1 *= 1e-250;
          s2 *= 1e-250;
          term *= 1e-250;
        }
      }
      return {r0, AngleState{std::atan2(s1, a0 * s2), 0.0}};
    }
    double a1 = cfg_.a_plus.derivative(0.0);
    double delta = 1e-4 * cfg_.rz;
    double a2 = 0.5 * (cfg_.a_plus.derivative(delta) - a1) / delta;
    double c1 = -a1 * n / (a0 * (2.0 * n + 1.0));
    double c2 = -(a1 * c1 * (3.0 * n + 2.0) + 2.0 * a2 * n + mu) / (4.0 * a0 * (n + 1.0));
    r0 = std::min({1e-3 * cfg_.rz, 1e-2 / (1.0 + std::abs(c1)),
                   std::sqrt(1e-8 / (1.0 + std::abs(c2))), r_target});
    r0 = std::max(r0, 1e-9 * cfg_.rz);
    double f_rel = 1.0 + c1 * r0 + c2 * r0 * r0;
    double fp_rel = n + c1 * (n + 1.0) * r0 + c2 * (n + 2.0) * r0 * r0;
    return {r0, AngleState{std::atan2(f_rel, cfg_.a_plus(r0) * fp_rel), 0.0}};
  }

  int mode_cap(double Lambda) const {
    double a_floor = std::min(cfg_.a_plus.min_on(0.0, cfg_.rz), cfg_.a_minus.min_on(cfg_.rz, cfg_.ry));
    a_floor = std::max(a_floor, 1e-8);
    return 16 + static_cast<int>(4.0 * cfg_.ry * std::sqrt(Lambda / a_floor));
  }

  TwoPhaseDiskConfig cfg_;
  OdeOptions ode_;
};

}  // namespace scl::oracle
