#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <istream>
#include <limits>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "hosc/errors.hpp"

namespace hosc {

struct Triplet {
  std::size_t row, col;
  double value;
};

/// Compressed-row sparse matrix.
class CsrMatrix {
 public:
  CsrMatrix() = default;
  CsrMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), row_ptr_(rows + 1, 0) {}

  /// Duplicates are summed in insertion order, so two entries fed the same
  /// sequence of addends end up bitwise equal.
  static CsrMatrix from_triplets(std::size_t rows, std::size_t cols, std::vector<Triplet> t) {
    std::stable_sort(t.begin(), t.end(), [](const Triplet& a, const Triplet& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    CsrMatrix m(rows, cols);
    m.col_.reserve(t.size());
    m.val_.reserve(t.size());
    for (std::size_t i = 0; i < t.size();) {
      const Triplet& head = t[i];
      if (head.row >= rows || head.col >= cols) throw DimensionMismatch("triplet outside matrix bounds");
      double v = 0.0;
      std::size_t j = i;
      for (; j < t.size() && t[j].row == head.row && t[j].col == head.col; ++j) v += t[j].value;
      if (v != 0.0) {
        m.col_.push_back(static_cast<std::uint32_t>(head.col));
        m.val_.push_back(v);
        ++m.row_ptr_[head.row + 1];
      }
      i = j;
    }
    for (std::size_t r = 0; r < rows; ++r) m.row_ptr_[r + 1] += m.row_ptr_[r];
    return m;
  }

  static CsrMatrix diagonal(std::span<const double> d) {
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < d.size(); ++i) t.push_back({i, i, d[i]});
    return from_triplets(d.size(), d.size(), std::move(t));
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t nnz() const { return val_.size(); }

  std::span<const std::size_t> row_ptr() const { return row_ptr_; }
  std::span<const std::uint32_t> col_index() const { return col_; }
  std::span<const double> values() const { return val_; }

  void multiply(std::span<const double> x, std::span<double> y) const {
    require_size(x.size(), cols_, "matvec operand");
    require_size(y.size(), rows_, "matvec result");
    for (std::size_t r = 0; r < rows_; ++r) {
      double s = 0.0;
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) s += val_[k] * x[col_[k]];
      y[r] = s;
    }
  }

  std::vector<double> operator*(std::span<const double> x) const {
    std::vector<double> y(rows_);
    multiply(x, y);
    return y;
  }

  double at(std::size_t r, std::size_t c) const {
    const auto b = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r]);
    const auto e = col_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[r + 1]);
    const auto it = std::lower_bound(b, e, static_cast<std::uint32_t>(c));
    return (it != e && *it == c) ? val_[static_cast<std::size_t>(it - col_.begin())] : 0.0;
  }

  std::vector<double> diagonal_entries() const {
    std::vector<double> d(std::min(rows_, cols_), 0.0);
    for (std::size_t r = 0; r < d.size(); ++r) d[r] = at(r, r);
    return d;
  }

  std::size_t max_row_nnz() const {
    std::size_t m = 0;
    for (std::size_t r = 0; r < rows_; ++r) m = std::max(m, row_ptr_[r + 1] - row_ptr_[r]);
    return m;
  }

  double max_abs() const {
    double m = 0.0;
    for (double v : val_) m = std::max(m, std::abs(v));
    return m;
  }

  CsrMatrix transpose() const {
    std::vector<Triplet> t;
    t.reserve(nnz());
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) t.push_back({col_[k], r, val_[k]});
    return from_triplets(cols_, rows_, std::move(t));
  }

  /// max |A - A^T|.
  double symmetry_defect() const {
    if (rows_ != cols_) return std::numeric_limits<double>::infinity();
    double m = 0.0;
    for (std::size_t r = 0; r < rows_; ++r)
      for (std::size_t k = row_ptr_[r]; k < row_ptr_[r + 1]; ++k) m = std::max(m, std::abs(val_[k] - at(col_[k], r)));
    return m;
  }

 private:
  std::size_t rows_ = 0, cols_ = 0;
  std::vector<std::size_t> row_ptr_{0};
  std::vector<std::uint32_t> col_;
  std::vector<double> val_;
};

/// A CSR matrix whose symmetry has been checked on construction.
class SparseSymmetricMatrix {
 public:
  SparseSymmetricMatrix() = default;

  /// Accepts m when max|A - A^T| <= rel_tol * max|A| (0 demands exact symmetry).
  explicit SparseSymmetricMatrix(CsrMatrix m, double rel_tol = 0.0) : m_(std::move(m)) {
    if (m_.rows() != m_.cols()) throw DimensionMismatch("symmetric matrix must be square");
    const double defect = m_.symmetry_defect();
    if (defect > rel_tol * m_.max_abs())
      throw InvalidArgument("matrix is not symmetric: max |A - A^T| = " + std::to_string(defect));
  }

  std::size_t dim() const { return m_.rows(); }
  const CsrMatrix& csr() const { return m_; }

  void multiply(std::span<const double> x, std::span<double> y) const { m_.multiply(x, y); }
  std::vector<double> operator*(std::span<const double> x) const { return m_ * x; }

 private:
  CsrMatrix m_;
};

inline std::vector<double> matvec(const SparseSymmetricMatrix& A, std::span<const double> v) {
  require_size(v.size(), A.dim(), "matvec");
  return A * v;
}

// Matrix Market coordinate format, "real symmetric": lower triangle, 1-based.

inline void write_matrix_market(std::ostream& os, const SparseSymmetricMatrix& A) {
  const CsrMatrix& m = A.csr();
  std::size_t lower = 0;
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
      if (m.col_index()[k] <= r) ++lower;
  os << "%%MatrixMarket matrix coordinate real symmetric\n";
  os << m.rows() << " " << m.cols() << " " << lower << "\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < m.rows(); ++r)
    for (std::size_t k = m.row_ptr()[r]; k < m.row_ptr()[r + 1]; ++k)
      if (m.col_index()[k] <= r) os << (r + 1) << " " << (m.col_index()[k] + 1) << " " << m.values()[k] << "\n";
}

inline SparseSymmetricMatrix read_matrix_market(std::istream& is) {
  std::string line;
  std::getline(is, line);
  if (line.rfind("%%MatrixMarket matrix coordinate real symmetric", 0) != 0)
    throw InvalidArgument("unsupported Matrix Market header: " + line);
  while (std::getline(is, line) && !line.empty() && line[0] == '%') {
  }
  std::istringstream head(line);
  std::size_t rows = 0, cols = 0, entries = 0;
  head >> rows >> cols >> entries;
  std::vector<Triplet> t;
  t.reserve(2 * entries);
  for (std::size_t e = 0; e < entries; ++e) {
    std::size_t r = 0, c = 0;
    double v = 0.0;
    if (!(is >> r >> c >> v)) throw InvalidArgument("truncated Matrix Market body");
    t.push_back({r - 1, c - 1, v});
    if (r != c) t.push_back({c - 1, r - 1, v});
  }
  return SparseSymmetricMatrix(CsrMatrix::from_triplets(rows, cols, std::move(t)));
}

}  // namespace hosc
