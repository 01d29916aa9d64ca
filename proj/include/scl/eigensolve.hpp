#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <memory>
#include <random>
#include <string>
#include <vector>

#include <lapacke.h>

#include "scl/error.hpp"
#include "scl/fem.hpp"

namespace scl::eig {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using fem::AssembledPair;
using fem::SparseMatrix;

struct SolveOptions {
  int dense_cap = 6000;
  double residual_tol = 1e-8;   // relative to ||K||_1 + |lambda| ||M||_1
  int max_refine = 12;          // block inverse-iteration sweeps
  int ncv_cap = 800;
  unsigned seed = 12345;        // deterministic Krylov start
};

struct EigenSolution {
  VectorXd values;     // ascending
  MatrixXd vectors;    // M-orthonormal columns
  VectorXd residuals;  // ||K x - lambda M x||_2 / (||K||_1 + |lambda| ||M||_1)
  std::string path;    // "dense" or "shift-invert"
  std::vector<double> shifts;
  int iterations = 0;
};

inline double one_norm(const SparseMatrix& m) {
  double best = 0.0;
  for (int col = 0; col < m.outerSize(); ++col) {
    double s = 0.0;
    for (SparseMatrix::InnerIterator it(m, col); it; ++it) s += std::abs(it.value());
    best = std::max(best, s);
  }
  return best;
}

inline VectorXd relative_residuals(const AssembledPair& pair, const VectorXd& values,
                                   const MatrixXd& vectors) {
  double nk = one_norm(pair.k_matrix), nm = one_norm(pair.m_matrix);
  VectorXd out(values.size());
  for (int i = 0; i < values.size(); ++i) {
    VectorXd r = pair.k_matrix * vectors.col(i) - values[i] * (pair.m_matrix * vectors.col(i));
    double xm = std::sqrt(vectors.col(i).dot(pair.m_matrix * vectors.col(i)));
    out[i] = r.norm() / ((nk + std::abs(values[i]) * nm) * std::max(xm, 1e-300));
  }
  return out;
}

/// Full spectrum of the symmetric pencil (K, M) with M SPD, via Cholesky
/// reduction to a standard symmetric problem (LAPACK dsygvd).
inline EigenSolution solve_dense(const AssembledPair& pair, const SolveOptions& opts = {}) {
  const int n = pair.size();
  if (n > opts.dense_cap)
    raise(errc::use_windowed_solver, "pencil dimension " + std::to_string(n) +
                                         " exceeds the dense cap " + std::to_string(opts.dense_cap));
  MatrixXd a = MatrixXd(pair.k_matrix);
  MatrixXd b = MatrixXd(pair.m_matrix);
  VectorXd w(n);
  lapack_int info = LAPACKE_dsygvd(LAPACK_COL_MAJOR, 1, 'V', 'L', n, a.data(), n, b.data(), n,
                                   w.data());
  if (info > n) raise(errc::mass_not_spd, "mass matrix is not positive definite");
  if (info != 0) raise(errc::numerical_failure, "dense eigensolve failed, info = " + std::to_string(info));
  EigenSolution sol;
  sol.values = w;
  sol.vectors = a;
  sol.residuals = relative_residuals(pair, sol.values, sol.vectors);
  sol.path = "dense";
  return sol;
}

namespace detail {

struct ShiftedFactor {
  std::unique_ptr<Eigen::SimplicialLDLT<SparseMatrix>> ldlt;
  double sigma = 0.0;
  int negatives = 0;

  VectorXd solve(const VectorXd& b) const { return ldlt->solve(b); }
};

inline ShiftedFactor factor_shifted(const AssembledPair& pair, double sigma) {
  ShiftedFactor f;
  f.sigma = sigma;
  f.ldlt = std::make_unique<Eigen::SimplicialLDLT<SparseMatrix>>();
  SparseMatrix shifted = pair.k_matrix - sigma * pair.m_matrix;
  f.ldlt->compute(shifted);
  if (f.ldlt->info() != Eigen::Success)
    raise(errc::shift_too_close, "LDLT breakdown at shift " + std::to_string(sigma));
  VectorXd d = f.ldlt->vectorD();
  double dmax = d.cwiseAbs().maxCoeff();
  if (d.cwiseAbs().minCoeff() < 1e-12 * dmax)
    raise(errc::shift_too_close, "near-singular pivot at shift " + std::to_string(sigma));
  // guard against pivot growth: the unpivoted LDLT must still solve accurately
  VectorXd probe = VectorXd::LinSpaced(pair.size(), 1.0, 2.0);
  VectorXd x = f.ldlt->solve(probe);
  if ((shifted * x - probe).norm() > 1e-8 * probe.norm())
    raise(errc::shift_too_close, "inaccurate factorization at shift " + std::to_string(sigma));
  for (int i = 0; i < d.size(); ++i)
    if (d[i] < 0.0) ++f.negatives;
  return f;
}

inline ShiftedFactor factor_with_retry(const AssembledPair& pair, double& sigma) {
  double scale = std::abs(sigma) + 1.0;
  for (int attempt = 0; attempt < 6; ++attempt) {
    try {
      return factor_shifted(pair, sigma);
    } catch (const error& e) {
      if (e.code() != errc::shift_too_close || attempt == 5) throw;
      sigma += scale * 3e-7 * (attempt + 1);
    }
  }
  raise(errc::shift_too_close, "unreachable");
}

}  // namespace detail

/// Number of pencil eigenvalues strictly below sigma (Sylvester inertia of
/// K - sigma M). Retries with a perturbed shift if sigma grazes an eigenvalue.
inline int inertia_below(const AssembledPair& pair, double sigma) {
  double s = sigma;
  return detail::factor_with_retry(pair, s).negatives;
}

/// The m eigenpairs nearest sigma by shift-invert Lanczos with full
/// reorthogonalization in the M inner product, polished by block inverse
/// iteration with Rayleigh–Ritz extraction.
inline EigenSolution solve_window(const AssembledPair& pair, double sigma, int m,
                                  const SolveOptions& opts = {}) {
  const int n = pair.size();
  if (m <= 0 || m > n) raise(errc::config_invalid, "requested window size out of range");
  double sig = sigma;
  detail::ShiftedFactor factor = detail::factor_with_retry(pair, sig);

  const int ncv = std::min(n, std::min(opts.ncv_cap, std::max(3 * m, m + 24)));
  MatrixXd v(n, ncv);
  std::vector<double> alpha, beta;  // T diagonal / subdiagonal
  std::mt19937 rng(opts.seed);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);

  auto m_dot = [&](const VectorXd& x, const VectorXd& y) { return x.dot(pair.m_matrix * y); };

  // a symmetry-free deterministic start: the ones vector is M-orthogonal to
  // every angular mode and would stall the Krylov build
  VectorXd v0(n);
  for (int i = 0; i < n; ++i) v0[i] = uni(rng);
  v0 /= std::sqrt(m_dot(v0, v0));
  v.col(0) = v0;

  VectorXd prev = VectorXd::Zero(n);
  double beta_prev = 0.0;
  int built = 0;
  for (int j = 0; j < ncv; ++j) {
    built = j + 1;
    VectorXd w = factor.solve(pair.m_matrix * v.col(j));
    double a = m_dot(w, v.col(j));
    alpha.push_back(a);
    w -= a * v.col(j);
    if (j > 0) w -= beta_prev * prev;
    for (int pass = 0; pass < 2; ++pass)
      for (int i = 0; i <= j; ++i) w -= m_dot(w, v.col(i)) * v.col(i);
    if (j + 1 == ncv) break;
    double b = std::sqrt(std::max(0.0, m_dot(w, w)));
    if (b < 1e-14) {
      // invariant subspace found: restart with a fresh deterministic direction
      VectorXd r(n);
      for (int i = 0; i < n; ++i) r[i] = uni(rng);
      for (int pass = 0; pass < 2; ++pass)
        for (int i = 0; i <= j; ++i) r -= m_dot(r, v.col(i)) * v.col(i);
      double rb = std::sqrt(m_dot(r, r));
      if (rb < 1e-14) break;
      w = r / rb;
      b = 0.0;
      beta.push_back(b);
      prev = v.col(j);
      beta_prev = b;
      v.col(j + 1) = w;
      continue;
    }
    beta.push_back(b);
    prev = v.col(j);
    beta_prev = b;
    v.col(j + 1) = w / b;
  }

  MatrixXd t = MatrixXd::Zero(built, built);
  for (int i = 0; i < built; ++i) {
    t(i, i) = alpha[i];
    if (i + 1 < built) t(i, i + 1) = t(i + 1, i) = beta[i];
  }
  Eigen::SelfAdjointEigenSolver<MatrixXd> tes(t);
  if (tes.info() != Eigen::Success) raise(errc::numerical_failure, "tridiagonal solve failed");

  // Ritz values theta map to pencil eigenvalues sigma + 1/theta
  std::vector<std::pair<double, int>> order;
  for (int i = 0; i < built; ++i) {
    double th = tes.eigenvalues()[i];
    if (std::abs(th) < 1e-14) continue;
    order.push_back({std::abs(1.0 / th), i});
  }
  std::sort(order.begin(), order.end());
  int take = std::min<int>(m, static_cast<int>(order.size()));
  if (take == 0) raise(errc::numerical_failure, "no converging Ritz values near the shift");

  MatrixXd x(n, take);
  for (int i = 0; i < take; ++i)
    x.col(i) = v.leftCols(built) * tes.eigenvectors().col(order[i].second);

  // block inverse iteration + Rayleigh-Ritz until the residual certificate holds
  EigenSolution sol;
  sol.path = "shift-invert";
  sol.shifts.push_back(sig);
  for (int sweep = 0; sweep < opts.max_refine; ++sweep) {
    // M-orthonormalize via the small Gram matrix
    MatrixXd mx = pair.m_matrix * x;
    Eigen::LLT<MatrixXd> gram(MatrixXd(x.transpose() * mx));
    if (gram.info() != Eigen::Success) raise(errc::numerical_failure, "refinement basis collapsed");
    x = gram.matrixL().solve(x.transpose()).transpose();
    // Rayleigh-Ritz on the block
    MatrixXd kp = x.transpose() * (pair.k_matrix * x);
    Eigen::SelfAdjointEigenSolver<MatrixXd> small(kp);
    x = x * small.eigenvectors();
    sol.values = small.eigenvalues();
    sol.vectors = x;
    sol.residuals = relative_residuals(pair, sol.values, sol.vectors);
    sol.iterations = sweep + 1;
    if (sol.residuals.maxCoeff() <= opts.residual_tol) break;
    for (int i = 0; i < take; ++i) x.col(i) = factor.solve(pair.m_matrix * x.col(i));
  }
  if (sol.residuals.maxCoeff() > opts.residual_tol)
    raise(errc::numerical_failure, "windowed solve did not reach the residual tolerance");
  return sol;
}

/// Every eigenvalue in [lo, hi), slice by slice, with the count of each slice
/// certified against the factorization inertia at its endpoints.
inline EigenSolution solve_range(const AssembledPair& pair, double lo, double hi,
                                 const SolveOptions& opts = {}) {
  if (!(lo < hi)) raise(errc::config_invalid, "empty range");
  EigenSolution sol;
  sol.path = "shift-invert";

  struct Slice {
    double lo, hi;
    int count;
  };
  std::vector<Slice> todo;
  int total = inertia_below(pair, hi) - inertia_below(pair, lo);
  todo.push_back({lo, hi, total});
  const int chunk = 20;

  std::vector<double> values;
  std::vector<VectorXd> vectors;
  while (!todo.empty()) {
    Slice s = todo.back();
    todo.pop_back();
    if (s.count == 0) continue;
    if (s.count > chunk) {
      double mid = 0.5 * (s.lo + s.hi);
      int below = inertia_below(pair, mid) - inertia_below(pair, s.lo);
      todo.push_back({s.lo, mid, below});
      todo.push_back({mid, s.hi, s.count - below});
      continue;
    }
    double sigma = 0.5 * (s.lo + s.hi);
    int want = s.count;
    bool done = false;
    for (int attempt = 0; attempt < 4 && !done; ++attempt) {
      int ask = std::min(pair.size(), want + 6 + 8 * attempt);
      SolveOptions local = opts;
      local.seed = opts.seed + 1000u * static_cast<unsigned>(attempt);
      EigenSolution win;
      try {
        win = solve_window(pair, sigma, ask, local);
      } catch (const error& e) {
        if (e.code() == errc::numerical_failure && attempt < 3) continue;
        throw;
      }
      int got = 0;
      for (int i = 0; i < win.values.size(); ++i)
        if (win.values[i] >= s.lo && win.values[i] < s.hi) ++got;
      if (got == want) {
        for (int i = 0; i < win.values.size(); ++i)
          if (win.values[i] >= s.lo && win.values[i] < s.hi) {
            values.push_back(win.values[i]);
            vectors.push_back(win.vectors.col(i));
          }
        for (double sh : win.shifts) sol.shifts.push_back(sh);
        sol.iterations += win.iterations;
        done = true;
      }
    }
    if (!done)
      raise(errc::numerical_failure,
            "slice [" + std::to_string(s.lo) + ", " + std::to_string(s.hi) +
                ") kept missing eigenvalues against the inertia count");
  }

  std::vector<int> idx(values.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = static_cast<int>(i);
  std::sort(idx.begin(), idx.end(), [&](int a, int b) { return values[a] < values[b]; });
  sol.values.resize(static_cast<int>(values.size()));
  sol.vectors.resize(pair.size(), static_cast<int>(values.size()));
  for (std::size_t i = 0; i < idx.size(); ++i) {
    sol.values[static_cast<int>(i)] = values[idx[i]];
    sol.vectors.col(static_cast<int>(i)) = vectors[idx[i]];
  }
  sol.residuals = relative_residuals(pair, sol.values, sol.vectors);
  return sol;
}

}  // namespace scl::eig
