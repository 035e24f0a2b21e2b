#pragma once

// k smallest eigenpairs of a sparse SPD matrix: block Lanczos with full
// reorthogonalization and thick restart, run on the shift-inverted operator
// w -> A^{-1} w (shift 0) with the inverse applied by conjugate gradients.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "hosc/cg.hpp"
#include "hosc/errors.hpp"
#include "hosc/sparse.hpp"
#include "hosc/vector_ops.hpp"

namespace hosc {

struct SolverConfig {
  int k = 10;
  double tol = 1e-8;
  int max_subspace = 0;  // 0: max(3k, k + 50)
  double cg_tol = 1e-10;
  int cg_max_iter = 20000;
  std::uint64_t seed = 42;
  int block_size = 2;  // largest multiplicity resolved without relying on rounding
  int max_restarts = 60;

  int subspace_cap() const { return max_subspace > 0 ? max_subspace : std::max(3 * k, k + 50); }

  void validate(std::size_t N) const {
    require(k > 0 && static_cast<std::size_t>(k) < N, "solver: need 0 < k < N (k = " + std::to_string(k) +
                                                          ", N = " + std::to_string(N) + ")");
    require(tol > 0.0 && cg_tol > 0.0, "solver: tolerances must be positive");
    require(cg_max_iter > 0 && block_size >= 1 && max_restarts >= 0, "solver: invalid iteration limits");
    require(subspace_cap() > k, "solver: max_subspace must exceed k");
  }
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;  // |A v - value v|_2
};

struct EigenResult {
  std::vector<EigenPair> pairs;  // ascending
  bool complete = false;         // all k pairs met the residual bound
  std::string diagnostic;
  int restarts = 0;
  std::size_t inverse_applications = 0;
  std::size_t cg_iterations = 0;
};

namespace detail {

class ShiftInvertLanczos {
 public:
  using Mat = Eigen::MatrixXd;
  using Vec = Eigen::VectorXd;

  ShiftInvertLanczos(const SparseSymmetricMatrix& A, const SolverConfig& cfg)
      : A_(A), cfg_(cfg), N_(A.dim()), b_(cfg.block_size), rng_(cfg.seed) {
    const std::size_t cap = static_cast<std::size_t>(cfg.subspace_cap());
    m_ = static_cast<int>(std::min(cap, N_ - static_cast<std::size_t>(b_)));
    m_ -= m_ % b_;
    require(m_ > cfg.k, "solver: matrix too small for the requested k and block size");
    V_.setZero(static_cast<Eigen::Index>(N_), m_ + b_);
    H_.setZero(m_, m_);
  }

  EigenResult run() {
    EigenResult out;
    // Frontier block at columns [cur, cur + b).
    int cur = 0;
    for (int c = 0; c < b_; ++c) fresh_direction(c);
    double safety = 1.0;
    for (int cycle = 0;; ++cycle) {
      while (cur < m_) {
        expand(cur, out);
        cur += b_;
      }
      // Rayleigh-Ritz on span V[:, 0:m).
      Eigen::SelfAdjointEigenSolver<Mat> es(H_);
      const Vec& theta_asc = es.eigenvalues();
      const Mat& Y_asc = es.eigenvectors();
      // Descending theta <=> ascending eigenvalue of A.
      std::vector<int> order(static_cast<std::size_t>(m_));
      std::iota(order.begin(), order.end(), 0);
      std::reverse(order.begin(), order.end());

      // A-residual estimate: A x - x/theta = -(A Q R y_last)/theta.
      const Mat AQ = apply_A_block(V_.middleCols(m_, b_));
      int converged = 0;
      for (int i = 0; i < cfg_.k; ++i) {
        const int col = order[static_cast<std::size_t>(i)];
        const double th = theta_asc(col);
        if (!(th > 0.0)) break;
        const Vec coupling = R_last_ * Y_asc.col(col).tail(b_);
        const double est = (AQ * coupling).norm() / th;
        if (est <= safety * cfg_.tol * std::max(1.0, 1.0 / th))
          ++converged;
        else
          break;
      }

      const bool last_cycle = cycle >= cfg_.max_restarts;
      if (converged == cfg_.k || last_cycle) {
        const int count = last_cycle ? converged : cfg_.k;
        Mat X(static_cast<Eigen::Index>(N_), count);
        for (int i = 0; i < count; ++i) X.col(i) = V_.leftCols(m_) * Y_asc.col(order[static_cast<std::size_t>(i)]);
        std::vector<EigenPair> pairs;
        std::size_t ok_prefix = 0;
        for (int round = 0; round < 3 && count > 0; ++round) {
          pairs = polish(X, out);
          ok_prefix = 0;
          while (ok_prefix < pairs.size() &&
                 pairs[ok_prefix].residual <= cfg_.tol * std::max(1.0, pairs[ok_prefix].value))
            ++ok_prefix;
          if (ok_prefix == pairs.size()) break;
          for (int i = 0; i < count; ++i)
            X.col(i) = Eigen::Map<const Vec>(pairs[static_cast<std::size_t>(i)].vector.data(), static_cast<Eigen::Index>(N_));
        }
        if (count == cfg_.k && ok_prefix == pairs.size()) {
          out.pairs = std::move(pairs);
          out.complete = true;
          out.restarts = cycle;
          return out;
        }
        if (last_cycle) {
          pairs.resize(ok_prefix);
          out.pairs = std::move(pairs);
          out.complete = false;
          out.restarts = cycle;
          out.diagnostic = "restart limit reached with " + std::to_string(ok_prefix) + " of " +
                           std::to_string(cfg_.k) + " eigenpairs converged";
          return out;
        }
        safety *= 0.1;
      }

      // Thick restart: keep the leading Ritz vectors plus the frontier block.
      int keep = cfg_.k + (m_ - cfg_.k) / 2;
      keep = std::min(keep, m_ - b_);
      keep += (m_ - keep) % b_;  // frontier blocks must end exactly at m
      Mat Ysel(m_, keep);
      for (int i = 0; i < keep; ++i) Ysel.col(i) = Y_asc.col(order[static_cast<std::size_t>(i)]);
      rotate_basis(Ysel);
      V_.middleCols(keep, b_) = V_.middleCols(m_, b_).eval();
      H_.setZero();
      for (int i = 0; i < keep; ++i) H_(i, i) = theta_asc(order[static_cast<std::size_t>(i)]);
      cur = keep;
    }
  }

 private:
  // Orthonormal random direction at column c, orthogonal to columns [0, c).
  void fresh_direction(int c) {
    std::uniform_real_distribution<double> U(-1.0, 1.0);
    for (int attempt = 0; attempt < 5; ++attempt) {
      Vec v(static_cast<Eigen::Index>(N_));
      for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = U(rng_);
      for (int pass = 0; pass < 2; ++pass)
        if (c > 0) v -= V_.leftCols(c) * (V_.leftCols(c).transpose() * v);
      const double nv = v.norm();
      if (nv > 1e-8 * std::sqrt(static_cast<double>(N_))) {
        V_.col(c) = v / nv;
        return;
      }
    }
    throw Error("solver: could not extend the basis with a random direction");
  }

  Vec apply_inverse(const Eigen::Ref<const Vec>& v, EigenResult& out) {
    const CgResult r = cg_solve(A_, std::span<const double>(v.data(), N_), CgOptions{cfg_.cg_tol, cfg_.cg_max_iter, true});
    ++out.inverse_applications;
    out.cg_iterations += static_cast<std::size_t>(r.iterations);
    return Eigen::Map<const Vec>(r.x.data(), static_cast<Eigen::Index>(N_));
  }

  Mat apply_A_block(const Eigen::Ref<const Mat>& X) const {
    Mat Y(X.rows(), X.cols());
    for (Eigen::Index c = 0; c < X.cols(); ++c)
      A_.multiply(std::span<const double>(X.col(c).data(), N_), std::span<double>(Y.col(c).data(), N_));
    return Y;
  }

  // Applies the inverse to the frontier block at [cur, cur + b), projects
  // against everything so far (twice), and installs the next frontier.
  void expand(int cur, EigenResult& out) {
    const int upto = cur + b_;
    Mat W(static_cast<Eigen::Index>(N_), b_);
    for (int c = 0; c < b_; ++c) W.col(c) = apply_inverse(V_.col(cur + c), out);
    Mat h = V_.leftCols(upto).transpose() * W;
    W -= V_.leftCols(upto) * h;
    const Mat h2 = V_.leftCols(upto).transpose() * W;
    W -= V_.leftCols(upto) * h2;
    h += h2;

    // Upper-triangle projections, mirrored; the diagonal block is symmetrized.
    const int rows = std::min(upto, m_);
    for (int c = 0; c < b_; ++c) {
      const int j = cur + c;
      if (j >= m_) break;
      for (int i = 0; i < rows; ++i) {
        if (i >= cur && i < upto) continue;
        H_(i, j) = h(i, c);
        H_(j, i) = h(i, c);
      }
    }
    for (int a = 0; a < b_ && cur + a < m_; ++a)
      for (int c = 0; c < b_ && cur + c < m_; ++c) H_(cur + a, cur + c) = 0.5 * (h(cur + a, c) + h(cur + c, a));

    // Next frontier: QR of the residual block, random fill on breakdown.
    Eigen::HouseholderQR<Mat> qr(W);
    Mat R = qr.matrixQR().topRows(b_).template triangularView<Eigen::Upper>();
    Mat Q = qr.householderQ() * Mat::Identity(static_cast<Eigen::Index>(N_), b_);
    const double scale = std::max(1.0, h.cwiseAbs().maxCoeff());
    for (int c = 0; c < b_; ++c) {
      V_.col(upto + c) = Q.col(c);
      if (std::abs(R(c, c)) < 1e-13 * scale) {
        fresh_direction(upto + c);
        R.row(c).setZero();
      }
    }
    // Re-orthogonalize the new frontier once more against the whole basis.
    for (int c = 0; c < b_; ++c) {
      auto v = V_.col(upto + c);
      v -= V_.leftCols(upto + c) * (V_.leftCols(upto + c).transpose() * v);
      v.normalize();
    }
    R_last_ = R;
  }

  // V[:, 0:keep) = V[:, 0:m) * Ysel, in row blocks.
  void rotate_basis(const Mat& Ysel) {
    const Eigen::Index block = 2048;
    const Eigen::Index keep = Ysel.cols();
    for (Eigen::Index r0 = 0; r0 < static_cast<Eigen::Index>(N_); r0 += block) {
      const Eigen::Index rb = std::min(block, static_cast<Eigen::Index>(N_) - r0);
      const Mat tmp = V_.block(r0, 0, rb, m_) * Ysel;
      V_.block(r0, 0, rb, keep) = tmp;
    }
  }

  // One block inverse-iteration step on X followed by Rayleigh-Ritz with A
  // itself. Inner-solve noise in the Krylov basis is amplified by |A| in the
  // residual; the extra inverse damps it.
  std::vector<EigenPair> polish(const Mat& X, EigenResult& out) {
    const Eigen::Index c = X.cols();
    Mat Y(static_cast<Eigen::Index>(N_), c);
    for (Eigen::Index j = 0; j < c; ++j) Y.col(j) = apply_inverse(X.col(j), out);
    Eigen::HouseholderQR<Mat> qr(Y);
    const Mat Q = qr.householderQ() * Mat::Identity(static_cast<Eigen::Index>(N_), c);
    const Mat AQ = apply_A_block(Q);
    Mat G = Q.transpose() * AQ;
    G = (0.5 * (G + G.transpose())).eval();
    Eigen::SelfAdjointEigenSolver<Mat> es(G);
    std::vector<EigenPair> pairs;
    Vec Ax(static_cast<Eigen::Index>(N_));
    for (Eigen::Index i = 0; i < c; ++i) {
      Vec x = Q * es.eigenvectors().col(i);
      x.normalize();
      A_.multiply(std::span<const double>(x.data(), N_), std::span<double>(Ax.data(), N_));
      EigenPair p;
      p.value = x.dot(Ax);
      p.residual = (Ax - p.value * x).norm();
      p.vector.assign(x.data(), x.data() + x.size());
      pairs.push_back(std::move(p));
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const EigenPair& a, const EigenPair& b) { return a.value < b.value; });
    return pairs;
  }

  const SparseSymmetricMatrix& A_;
  const SolverConfig& cfg_;
  std::size_t N_;
  int b_;
  int m_ = 0;
  std::mt19937_64 rng_;
  Mat V_;
  Mat H_;
  Mat R_last_;
};

}  // namespace detail

/// Smallest k eigenpairs of a symmetric positive definite A, ascending.
/// Every returned pair satisfies |A v - lambda v| <= tol * max(1, lambda);
/// when the restart limit is hit the converged prefix is returned and
/// EigenResult::complete is false.
inline EigenResult smallest_eigenpairs(const SparseSymmetricMatrix& A, const SolverConfig& cfg) {
  cfg.validate(A.dim());
  detail::ShiftInvertLanczos solver(A, cfg);
  return solver.run();
}

}  // namespace hosc
