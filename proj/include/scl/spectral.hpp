#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "scl/config.hpp"
#include "scl/error.hpp"
#include "scl/fem.hpp"
#include "scl/radial.hpp"
#include "scl/spectrum.hpp"

namespace scl::stats {

/// Two-sided counting function of a multiplicity-weighted spectrum.
/// N+(t) counts 0 <= lambda_j <= t, N-(t) counts -t <= lambda_j < 0.
class CountingFunction {
 public:
  explicit CountingFunction(std::vector<SpectrumRecord> records) : records_(std::move(records)) {
    std::stable_sort(records_.begin(), records_.end(), spectrum_order);
  }

  std::pair<int, int> operator()(double t) const {
    if (!(t >= 0.0)) raise(errc::config_invalid, "counting threshold must be >= 0");
    int np = 0, nm = 0;
    for (const auto& rec : records_) {
      if (rec.lambda >= 0.0 && rec.lambda <= t) np += rec.multiplicity;
      if (rec.lambda < 0.0 && rec.lambda >= -t) nm += rec.multiplicity;
    }
    return {np, nm};
  }

  const std::vector<SpectrumRecord>& records() const { return records_; }

  /// |lambda| jump points of the given sign within [lo, hi].
  std::vector<double> jump_points(int sign, double lo, double hi) const {
    std::vector<double> out;
    for (const auto& rec : records_) {
      double t = std::abs(rec.lambda);
      bool wanted = (sign > 0) ? rec.lambda >= 0.0 : rec.lambda < 0.0;
      if (wanted && t >= lo && t <= hi) out.push_back(t);
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
  }

 private:
  std::vector<SpectrumRecord> records_;
};

struct FitResult {
  double slope = 0.0;
  double r2 = 0.0;  // uncentered: 1 - SS_res / SS_tot
  int points = 0;
};

/// Least squares of y against x^power through the origin, sampled at the
/// counting function's own jump points.
inline FitResult fit_through_origin(const std::vector<double>& xs, const std::vector<double>& ys,
                                    double power) {
  FitResult out;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double x = std::pow(xs[i], power);
    sxx += x * x;
    sxy += x * ys[i];
    syy += ys[i] * ys[i];
  }
  if (sxx == 0.0) raise(errc::not_enough_eigenvalues, "no usable fit points");
  out.slope = sxy / sxx;
  double ss_res = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    double pred = out.slope * std::pow(xs[i], power);
    ss_res += (ys[i] - pred) * (ys[i] - pred);
  }
  out.r2 = (syy > 0.0) ? 1.0 - ss_res / syy : 1.0;
  out.points = static_cast<int>(xs.size());
  return out;
}

struct WeylFit {
  FitResult plus;
  FitResult minus;
  double r2() const { return std::min(plus.r2, minus.r2); }
};

/// Fits N±(t) against t^{d/2} through the origin over [lo, hi], sampling at
/// the eigenvalue jump points. Requires at least `min_points` eigenvalues of
/// each sign in the window.
inline WeylFit weyl_fit(const CountingFunction& counting, int d, double lo, double hi,
                        int min_points = 30) {
  WeylFit out;
  for (int sign : {+1, -1}) {
    auto ts = counting.jump_points(sign, lo, hi);
    if (static_cast<int>(ts.size()) < min_points)
      raise(errc::not_enough_eigenvalues,
            std::string(sign > 0 ? "positive" : "negative") + " side has only " +
                std::to_string(ts.size()) + " eigenvalues in the fit window");
    std::vector<double> ys;
    ys.reserve(ts.size());
    for (double t : ts) {
      auto [np, nm] = counting(t);
      ys.push_back(sign > 0 ? np : nm);
    }
    (sign > 0 ? out.plus : out.minus) = fit_through_origin(ts, ys, 0.5 * d);
  }
  return out;
}

/// Same fit on the symmetric count #{|lambda_j| <= t}.
inline FitResult combined_weyl(const CountingFunction& counting, int d, double lo, double hi,
                               int min_points = 30) {
  std::vector<double> ts;
  for (const auto& rec : counting.records()) {
    double t = std::abs(rec.lambda);
    if (t >= lo && t <= hi) ts.push_back(t);
  }
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  if (static_cast<int>(ts.size()) < min_points)
    raise(errc::not_enough_eigenvalues, "combined count has too few eigenvalues in the window");
  std::vector<double> ys;
  ys.reserve(ts.size());
  for (double t : ts) {
    auto [np, nm] = counting(t);
    ys.push_back(np + nm);
  }
  return fit_through_origin(ts, ys, 0.5 * d);
}

enum class ModeClass { bulk_plus, bulk_minus, interface };

inline const char* mode_class_name(ModeClass c) {
  switch (c) {
    case ModeClass::bulk_plus: return "bulk_plus";
    case ModeClass::bulk_minus: return "bulk_minus";
    case ModeClass::interface: return "interface";
  }
  return "?";
}

/// Per-eigenfunction mass split: inner bulk {r < rz - delta}, interface tube
/// {|r - rz| <= delta}, outer bulk {r > rz + delta}.
struct ModeClassification {
  double m_plus = 0.0;
  double m_tube = 0.0;
  double m_minus = 0.0;
  double delta = 0.0;
  ModeClass cls = ModeClass::bulk_plus;
};

inline ModeClassification classify_masses(double m_plus, double m_tube, double m_minus,
                                          double delta, double threshold) {
  ModeClassification out{m_plus, m_tube, m_minus, delta, ModeClass::bulk_plus};
  double sum = m_plus + m_tube + m_minus;
  if (!(std::abs(sum - 1.0) <= 1e-6))
    raise(errc::input_invalid, "mass fractions must sum to 1 (got " + std::to_string(sum) + ")");
  if (m_tube >= threshold)
    out.cls = ModeClass::interface;
  else
    out.cls = (m_plus >= m_minus) ? ModeClass::bulk_plus : ModeClass::bulk_minus;
  return out;
}

/// Classify an oracle eigenfunction profile (normalized by construction).
inline ModeClassification classify(const oracle::RadialProfile& profile,
                                   const TwoPhaseDiskConfig& cfg,
                                   std::optional<double> delta_opt = std::nullopt) {
  double delta = delta_opt.value_or(cfg.tol.tube_delta_factor * cfg.rz);
  double mp = profile.mass(0.0, cfg.rz - delta);
  double mt = profile.mass(cfg.rz - delta, cfg.rz + delta);
  double mm = profile.mass(cfg.rz + delta, cfg.ry);
  double total = mp + mt + mm;
  if (!(std::abs(total - 1.0) <= 1e-6))
    raise(errc::input_invalid, "profile is not normalized");
  return classify_masses(mp / total, mt / total, mm / total, delta,
                         cfg.tol.interface_mass_threshold);
}

/// Classify an M-normalized FEM eigenvector by mass-matrix partial sums over
/// the triangle bands (triangles assigned by centroid radius).
inline ModeClassification classify(const Eigen::VectorXd& x, const TwoPhaseDiskConfig& cfg,
                                   const fem::TriangleMesh& mesh, const fem::AssembledPair& pair,
                                   std::optional<double> delta_opt = std::nullopt) {
  double delta = delta_opt.value_or(cfg.tol.tube_delta_factor * cfg.rz);
  double xm = x.dot(pair.m_matrix * x);
  if (std::abs(xm - 1.0) > 1e-6)
    raise(errc::input_invalid, "eigenvector must be M-normalized");
  double masses[3] = {0.0, 0.0, 0.0};  // plus, tube, minus
  for (std::size_t t = 0; t < mesh.triangles.size(); ++t) {
    auto c = mesh.centroid(static_cast<int>(t));
    double rc = std::hypot(c[0], c[1]);
    int band = (rc < cfg.rz - delta) ? 0 : (rc <= cfg.rz + delta ? 1 : 2);
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
      int dof = pair.dof_of_vertex[mesh.triangles[t][i]];
      v[i] = (dof >= 0) ? x[dof] : 0.0;
    }
    Eigen::Matrix3d me = fem::element_mass(mesh.triangle_area(static_cast<int>(t)));
    masses[band] += v.dot(me * v);
  }
  double total = masses[0] + masses[1] + masses[2];
  return classify_masses(masses[0] / total, masses[1] / total, masses[2] / total, delta,
                         cfg.tol.interface_mass_threshold);
}

struct LocalizationRow {
  double lambda;
  int n;
  double band_mass;  // L2 mass on the fixed observation band
};

/// Mass-on-a-band trend for a bulk family: for positive modes the band sits
/// inside the annulus away from both circles; mirrored for negative modes.
inline std::vector<LocalizationRow> localization_trend(const oracle::RadialSolver& solver,
                                                       const std::vector<SpectrumRecord>& family,
                                                       double band_lo, double band_hi) {
  std::vector<LocalizationRow> out;
  for (const auto& rec : family) {
    auto prof = solver.sample_profile(rec.n, rec.lambda);
    out.push_back({rec.lambda, rec.n, prof.mass(band_lo, band_hi)});
  }
  std::sort(out.begin(), out.end(),
            [](const LocalizationRow& a, const LocalizationRow& b) { return a.lambda < b.lambda; });
  return out;
}

/// Default observation band in the annulus: clear of the interface tube and
/// of the outer boundary.
inline std::pair<double, double> annulus_band(const TwoPhaseDiskConfig& cfg) {
  double w = cfg.ry - cfg.rz;
  return {cfg.rz + 0.3 * w, cfg.ry - 0.1 * w};
}

inline std::pair<double, double> disk_band(const TwoPhaseDiskConfig& cfg) {
  return {0.1 * cfg.rz, 0.85 * cfg.rz};
}

}  // namespace scl::stats
