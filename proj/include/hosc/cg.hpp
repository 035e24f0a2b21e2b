#pragma once

#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hosc/errors.hpp"
#include "hosc/sparse.hpp"
#include "hosc/vector_ops.hpp"

namespace hosc {

struct CgOptions {
  double rel_tol = 1e-10;
  int max_iter = 20000;
  bool jacobi = true;  // diagonal scaling
};

struct CgResult {
  std::vector<double> x;
  int iterations = 0;
  double relative_residual = 0.0;
};

/// Preconditioned conjugate gradients for SPD A. Stops when the true
/// residual satisfies |b - Ax| <= rel_tol |b|.
inline CgResult cg_solve(const SparseSymmetricMatrix& A, std::span<const double> b, const CgOptions& opt = {}) {
  const std::size_t N = A.dim();
  require_size(b.size(), N, "cg_solve right-hand side");
  require(opt.rel_tol > 0.0, "cg_solve: tolerance must be positive");
  CgResult res;
  res.x.assign(N, 0.0);
  const double bnorm = std::sqrt(dot(b, b));
  if (bnorm == 0.0) return res;

  std::vector<double> inv_diag(N, 1.0);
  if (opt.jacobi) {
    const std::vector<double> d = A.csr().diagonal_entries();
    for (std::size_t i = 0; i < N; ++i) {
      if (d[i] <= 0.0) throw IndefiniteMatrix("cg_solve: nonpositive diagonal entry at row " + std::to_string(i));
      inv_diag[i] = 1.0 / d[i];
    }
  }

  std::vector<double> r(b.begin(), b.end()), z(N), p(N), q(N);
  std::vector<double>& x = res.x;
  const double target = opt.rel_tol * bnorm;
  int it = 0;

  // Outer loop re-anchors on the true residual when the recurrence drifts.
  while (true) {
    for (std::size_t i = 0; i < N; ++i) z[i] = inv_diag[i] * r[i];
    p = z;
    double rz = dot(r, z);
    double rnorm = std::sqrt(dot(r, r));
    while (rnorm > target && it < opt.max_iter) {
      A.multiply(p, q);
      const double curv = dot(p, q);
      if (!(curv > 0.0)) throw IndefiniteMatrix("cg_solve: negative curvature p^T A p = " + std::to_string(curv));
      const double alpha = rz / curv;
      for (std::size_t i = 0; i < N; ++i) {
        x[i] += alpha * p[i];
        r[i] -= alpha * q[i];
      }
      for (std::size_t i = 0; i < N; ++i) z[i] = inv_diag[i] * r[i];
      const double rz_new = dot(r, z);
      const double beta = rz_new / rz;
      rz = rz_new;
      for (std::size_t i = 0; i < N; ++i) p[i] = z[i] + beta * p[i];
      rnorm = std::sqrt(dot(r, r));
      ++it;
    }
    A.multiply(x, q);
    for (std::size_t i = 0; i < N; ++i) r[i] = b[i] - q[i];
    const double true_norm = std::sqrt(dot(r, r));
    res.iterations = it;
    res.relative_residual = true_norm / bnorm;
    if (true_norm <= target) return res;
    if (it >= opt.max_iter)
      throw ConvergenceError("cg_solve: no convergence after " + std::to_string(it) + " iterations",
                             res.relative_residual, it);
  }
}

inline std::vector<double> cg_solve(const SparseSymmetricMatrix& A, std::span<const double> b, double rel_tol,
                                    int max_iter) {
  return cg_solve(A, b, CgOptions{rel_tol, max_iter, true}).x;
}

}  // namespace hosc
