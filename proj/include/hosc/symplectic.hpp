#pragma once

// The skew form B_l = l([., .]) for l = lambda Z* on h_{n,2}/RZ and its Pfaffian.

#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

#include "hosc/errors.hpp"
#include "hosc/lie_algebra.hpp"

namespace hosc {

/// Small dense row-major matrix.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), a_(rows * cols, 0.0) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a_[i * cols_ + j]; }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<double> a_;
};

/// Determinant by LU with partial pivoting.
inline double determinant(DenseMatrix m) {
  require(m.rows() == m.cols(), "determinant of a non-square matrix");
  const std::size_t n = m.rows();
  double det = 1.0;
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(m(r, c)) > std::abs(m(piv, c))) piv = r;
    if (m(piv, c) == 0.0) return 0.0;
    if (piv != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(m(piv, k), m(c, k));
      det = -det;
    }
    det *= m(c, c);
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = m(r, c) / m(c, c);
      for (std::size_t k = c; k < n; ++k) m(r, k) -= f * m(c, k);
    }
  }
  return det;
}

/// B_ij = lambda * (Z-component of [e_i, e_j]) over the basis with Z removed,
/// in the order (Y_1, ..., Y_{2n+1}, X_{2n+1}, ..., X_1).
inline DenseMatrix b_form_matrix(const LieAlgebraSpec& A, double lambda) {
  require(lambda != 0.0, "b_form_matrix: lambda must be nonzero");
  const auto m = static_cast<std::size_t>(A.dim() - 1);
  DenseMatrix B(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      for (const auto& [k, c] : A.structure(static_cast<int>(i + 1), static_cast<int>(j + 1)))
        if (k == 0) B(i, j) = lambda * c.to_double();
  return B;
}

namespace detail {

// Expansion along the first remaining row: Pf(A) = sum_j (-1)^j a_{0j} Pf(A with rows/cols 0, j removed).
inline double pfaffian_expand(const DenseMatrix& a, std::vector<std::size_t>& idx) {
  if (idx.empty()) return 1.0;
  const std::size_t first = idx.front();
  double sum = 0.0;
  for (std::size_t p = 1; p < idx.size(); ++p) {
    const double entry = a(first, idx[p]);
    if (entry == 0.0) continue;
    std::vector<std::size_t> rest;
    rest.reserve(idx.size() - 2);
    for (std::size_t q = 1; q < idx.size(); ++q)
      if (q != p) rest.push_back(idx[q]);
    const double sign = (p % 2 == 1) ? 1.0 : -1.0;
    sum += sign * entry * pfaffian_expand(a, rest);
  }
  return sum;
}

}  // namespace detail

/// Signed Pfaffian of a skew-symmetric matrix by recursive expansion.
inline double pfaffian_recursive(const DenseMatrix& a) {
  require(a.rows() == a.cols(), "pfaffian of a non-square matrix");
  if (a.rows() % 2 == 1) return 0.0;
  std::vector<std::size_t> idx(a.rows());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  return detail::pfaffian_expand(a, idx);
}

/// |Pf(B_l)|: recursive expansion up to size 10, sqrt|det| beyond.
inline double pfaffian(const LieAlgebraSpec& A, double lambda) {
  const DenseMatrix B = b_form_matrix(A, lambda);
  const double pf = B.rows() <= 10 ? std::abs(pfaffian_recursive(B)) : std::sqrt(std::abs(determinant(B)));
  if (pf == 0.0) throw InvalidArgument("pfaffian: B_l is degenerate");
  return pf;
}

}  // namespace hosc
