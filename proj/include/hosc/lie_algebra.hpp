#pragma once

// Structure constants of the Dynin-Folland Lie algebra h_{n,2} and the
// exact algebraic checks that go with it (antisymmetry, Jacobi, nilpotency,
// grading, dilations).

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"

#include "hosc/dyadic.hpp"
#include "hosc/errors.hpp"

namespace hosc {

/// One of Z, Y_k, X_k (k = 1..2n+1).
struct BasisIndex {
  enum class Kind { Z, Y, X };

  Kind kind = Kind::Z;
  int index = 0;  // unused for Z

  static constexpr BasisIndex z() { return {Kind::Z, 0}; }
  static constexpr BasisIndex y(int k) { return {Kind::Y, k}; }
  static constexpr BasisIndex x(int k) { return {Kind::X, k}; }

  friend constexpr bool operator==(const BasisIndex&, const BasisIndex&) = default;
};

inline std::string label(const BasisIndex& b) {
  switch (b.kind) {
    case BasisIndex::Kind::Z: return "Z";
    case BasisIndex::Kind::Y: return "Y" + std::to_string(b.index);
    case BasisIndex::Kind::X: return "X" + std::to_string(b.index);
  }
  return "?";
}

/// Position of a basis vector in the fixed layout
/// (Z, Y_1, ..., Y_{2n+1}, X_{2n+1}, ..., X_1).
inline int flat_index(int n, const BasisIndex& b) {
  const int top = 2 * n + 1;
  switch (b.kind) {
    case BasisIndex::Kind::Z: return 0;
    case BasisIndex::Kind::Y:
      require(b.index >= 1 && b.index <= top, "basis index Y" + std::to_string(b.index) + " out of range");
      return b.index;
    case BasisIndex::Kind::X:
      require(b.index >= 1 && b.index <= top, "basis index X" + std::to_string(b.index) + " out of range");
      return 4 * n + 3 - b.index;
  }
  throw InvalidArgument("unknown basis kind");
}

inline BasisIndex basis_at(int n, int pos) {
  const int dim = 4 * n + 3;
  require(pos >= 0 && pos < dim, "basis position out of range");
  if (pos == 0) return BasisIndex::z();
  if (pos <= 2 * n + 1) return BasisIndex::y(pos);
  return BasisIndex::x(4 * n + 3 - pos);
}

/// Sparse exact vector: (position, coefficient) pairs sorted by position, no zeros.
using ExactVector = std::vector<std::pair<int, Dyadic>>;

namespace detail {

inline void axpy_exact(ExactVector& acc, Dyadic scale, const ExactVector& v) {
  for (const auto& [pos, c] : v) {
    auto it = std::lower_bound(acc.begin(), acc.end(), pos,
                               [](const auto& e, int p) { return e.first < p; });
    if (it != acc.end() && it->first == pos) {
      it->second += scale * c;
      if (it->second.is_zero()) acc.erase(it);
    } else {
      const Dyadic val = scale * c;
      if (!val.is_zero()) acc.insert(it, {pos, val});
    }
  }
}

inline double max_abs(const ExactVector& v) {
  double m = 0.0;
  for (const auto& e : v) m = std::max(m, std::abs(e.second.to_double()));
  return m;
}

}  // namespace detail

class LieAlgebraBuilder;

/// Basis, structure constants and grading of a Lie algebra on the
/// (4n+3)-dimensional Dynin-Folland basis. Immutable once built.
class LieAlgebraSpec {
 public:
  int n() const { return n_; }
  int dim() const { return dim_; }
  int degree(int pos) const { return degrees_.at(static_cast<std::size_t>(pos)); }
  int degree(const BasisIndex& b) const { return degree(flat_index(n_, b)); }
  std::string label(int pos) const { return hosc::label(basis_at(n_, pos)); }

  /// [e_i, e_j] as an exact sparse vector.
  const ExactVector& structure(int i, int j) const {
    return table_[static_cast<std::size_t>(i) * dim_ + j];
  }

  /// True when every depth-4 nested bracket of basis vectors vanishes.
  bool step_at_most_3() const { return step3_; }

  struct Entry {
    int i, j, k;
    Dyadic coef;
  };

  /// All stored coefficients, ordered by (i, j, k).
  std::vector<Entry> entries() const {
    std::vector<Entry> out;
    for (int i = 0; i < dim_; ++i)
      for (int j = 0; j < dim_; ++j)
        for (const auto& [k, c] : structure(i, j)) out.push_back({i, j, k, c});
    return out;
  }

 private:
  friend class LieAlgebraBuilder;
  LieAlgebraSpec(int n, std::vector<int> degrees, std::vector<ExactVector> table);

  int n_ = 0;
  int dim_ = 0;
  std::vector<int> degrees_;
  std::vector<ExactVector> table_;
  bool step3_ = false;
};

/// Mutable staging area for a structure-constant table.
class LieAlgebraBuilder {
 public:
  explicit LieAlgebraBuilder(int n) : n_(n) {
    require(n >= 1, "n must be a positive integer, got " + std::to_string(n));
    dim_ = 4 * n + 3;
    table_.resize(static_cast<std::size_t>(dim_) * dim_);
    degrees_.assign(static_cast<std::size_t>(dim_), 0);
  }

  int n() const { return n_; }

  LieAlgebraBuilder& degree(const BasisIndex& b, int d) {
    degrees_[static_cast<std::size_t>(flat_index(n_, b))] = d;
    return *this;
  }

  /// [a, b] += coef * c together with [b, a] -= coef * c.
  LieAlgebraBuilder& bracket(const BasisIndex& a, const BasisIndex& b, const BasisIndex& c, Dyadic coef) {
    one_sided(a, b, c, coef);
    return one_sided(b, a, c, -coef);
  }

  /// Adds to [a, b] only. Used to build deliberately broken tables.
  LieAlgebraBuilder& one_sided(const BasisIndex& a, const BasisIndex& b, const BasisIndex& c, Dyadic coef) {
    return raw(flat_index(n_, a), flat_index(n_, b), flat_index(n_, c), coef);
  }

  LieAlgebraBuilder& raw(int i, int j, int k, Dyadic coef) {
    require(i >= 0 && i < dim_ && j >= 0 && j < dim_ && k >= 0 && k < dim_, "bracket entry index out of range");
    detail::axpy_exact(table_[static_cast<std::size_t>(i) * dim_ + j], Dyadic(1), ExactVector{{k, coef}});
    return *this;
  }

  /// Overwrites the coefficient of e_k in [e_i, e_j] (one-sided).
  LieAlgebraBuilder& set_raw(int i, int j, int k, Dyadic coef) {
    auto& cell = table_[static_cast<std::size_t>(i) * dim_ + j];
    std::erase_if(cell, [k](const auto& e) { return e.first == k; });
    return raw(i, j, k, coef);
  }

  LieAlgebraSpec build() const { return LieAlgebraSpec(n_, degrees_, table_); }

 private:
  int n_;
  int dim_;
  std::vector<int> degrees_;
  std::vector<ExactVector> table_;
};

/// Exact bracket of two sparse exact vectors.
inline ExactVector exact_bracket(const LieAlgebraSpec& A, const ExactVector& u, const ExactVector& v) {
  ExactVector out;
  for (const auto& [i, a] : u)
    for (const auto& [j, b] : v) detail::axpy_exact(out, a * b, A.structure(i, j));
  return out;
}

inline ExactVector exact_basis(int pos) { return ExactVector{{pos, Dyadic(1)}}; }

/// Largest coefficient over all depth-4 nested brackets [e_i,[e_j,[e_k,e_l]]].
inline double depth4_bracket_max(const LieAlgebraSpec& A) {
  const int d = A.dim();
  double worst = 0.0;
  for (int k = 0; k < d; ++k)
    for (int l = 0; l < d; ++l) {
      const ExactVector& kl = A.structure(k, l);
      if (kl.empty()) continue;
      for (int j = 0; j < d; ++j) {
        const ExactVector jkl = exact_bracket(A, exact_basis(j), kl);
        if (jkl.empty()) continue;
        for (int i = 0; i < d; ++i) worst = std::max(worst, detail::max_abs(exact_bracket(A, exact_basis(i), jkl)));
      }
    }
  return worst;
}

inline LieAlgebraSpec::LieAlgebraSpec(int n, std::vector<int> degrees, std::vector<ExactVector> table)
    : n_(n), dim_(4 * n + 3), degrees_(std::move(degrees)), table_(std::move(table)) {
  step3_ = depth4_bracket_max(*this) == 0.0;
}

/// The Dynin-Folland algebra: [X_j, X_{n+j}] = X_{2n+1}, [X_j, Y_{2n+1}] = -1/2 Y_{n+j},
/// [X_{n+j}, Y_{2n+1}] = 1/2 Y_j, [X_k, Y_k] = Z, graded in three strata.
inline LieAlgebraSpec build_dynin_folland(int n) {
  LieAlgebraBuilder b(n);
  using B = BasisIndex;
  const int top = 2 * n + 1;
  const Dyadic half(1, 1);
  for (int j = 1; j <= n; ++j) {
    b.bracket(B::x(j), B::x(n + j), B::x(top), Dyadic(1));
    b.bracket(B::x(j), B::y(top), B::y(n + j), -half);
    b.bracket(B::x(n + j), B::y(top), B::y(j), half);
  }
  for (int k = 1; k <= top; ++k) b.bracket(B::x(k), B::y(k), B::z(), Dyadic(1));

  b.degree(B::z(), 3);
  for (int k = 1; k <= 2 * n; ++k) {
    b.degree(B::y(k), 2);
    b.degree(B::x(k), 1);
  }
  b.degree(B::x(top), 2);
  b.degree(B::y(top), 1);
  return b.build();
}

/// Real coefficient vector over the basis of a LieAlgebraSpec.
struct AlgebraVector {
  std::vector<double> c;

  AlgebraVector() = default;
  explicit AlgebraVector(std::size_t dim) : c(dim, 0.0) {}
  explicit AlgebraVector(std::vector<double> coeffs) : c(std::move(coeffs)) {}

  std::size_t size() const { return c.size(); }
  double& operator[](std::size_t i) { return c[i]; }
  double operator[](std::size_t i) const { return c[i]; }

  AlgebraVector& operator+=(const AlgebraVector& o) {
    require_size(o.size(), size(), "AlgebraVector +=");
    for (std::size_t i = 0; i < c.size(); ++i) c[i] += o.c[i];
    return *this;
  }
  AlgebraVector& operator*=(double s) {
    for (double& x : c) x *= s;
    return *this;
  }
  friend AlgebraVector operator+(AlgebraVector a, const AlgebraVector& b) { return a += b; }
  friend AlgebraVector operator-(AlgebraVector a, const AlgebraVector& b) { return a += (-1.0 * b); }
  friend AlgebraVector operator*(double s, AlgebraVector a) { return a *= s; }

  double max_abs() const {
    double m = 0.0;
    for (double x : c) m = std::max(m, std::abs(x));
    return m;
  }
};

inline AlgebraVector basis_vector(const LieAlgebraSpec& A, const BasisIndex& b) {
  AlgebraVector v(static_cast<std::size_t>(A.dim()));
  v[static_cast<std::size_t>(flat_index(A.n(), b))] = 1.0;
  return v;
}

inline AlgebraVector bracket(const LieAlgebraSpec& A, const AlgebraVector& u, const AlgebraVector& v) {
  const auto d = static_cast<std::size_t>(A.dim());
  require_size(u.size(), d, "bracket lhs");
  require_size(v.size(), d, "bracket rhs");
  AlgebraVector out(d);
  for (std::size_t i = 0; i < d; ++i) {
    if (u[i] == 0.0) continue;
    for (std::size_t j = 0; j < d; ++j) {
      if (v[j] == 0.0) continue;
      const double uv = u[i] * v[j];
      for (const auto& [k, coef] : A.structure(static_cast<int>(i), static_cast<int>(j)))
        out[static_cast<std::size_t>(k)] += uv * coef.to_double();
    }
  }
  return out;
}

/// max_{i,j} |[e_i,e_j] + [e_j,e_i]|_inf, computed exactly.
inline double antisymmetry_defect(const LieAlgebraSpec& A) {
  double worst = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = i; j < A.dim(); ++j) {
      ExactVector s = A.structure(i, j);
      detail::axpy_exact(s, Dyadic(1), A.structure(j, i));
      worst = std::max(worst, detail::max_abs(s));
    }
  return worst;
}

/// Jacobi defect at one basis triple.
inline ExactVector jacobi_residual(const LieAlgebraSpec& A, int i, int j, int k) {
  const auto ei = exact_basis(i), ej = exact_basis(j), ek = exact_basis(k);
  ExactVector sum = exact_bracket(A, ei, A.structure(j, k));
  detail::axpy_exact(sum, Dyadic(1), exact_bracket(A, ej, A.structure(k, i)));
  detail::axpy_exact(sum, Dyadic(1), exact_bracket(A, ek, A.structure(i, j)));
  return sum;
}

/// max over basis triples of |[e_i,[e_j,e_k]] + [e_j,[e_k,e_i]] + [e_k,[e_i,e_j]]|_inf.
inline double jacobi_defect(const LieAlgebraSpec& A) {
  double worst = 0.0;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j)
      for (int k = 0; k < A.dim(); ++k) worst = std::max(worst, detail::max_abs(jacobi_residual(A, i, j, k)));
  return worst;
}

struct DegreeViolation {
  int i, j, k;
};

/// Brackets with a component outside degree deg(i) + deg(j).
inline std::vector<DegreeViolation> degree_additivity_violations(const LieAlgebraSpec& A) {
  std::vector<DegreeViolation> bad;
  for (int i = 0; i < A.dim(); ++i)
    for (int j = 0; j < A.dim(); ++j)
      for (const auto& [k, c] : A.structure(i, j))
        if (A.degree(k) != A.degree(i) + A.degree(j)) bad.push_back({i, j, k});
  return bad;
}

/// Homogeneous dilation: scales the coefficient of e_i by r^deg(i).
inline AlgebraVector dilate(const LieAlgebraSpec& A, double r, const AlgebraVector& v) {
  require(r > 0.0, "dilation factor must be positive");
  require_size(v.size(), static_cast<std::size_t>(A.dim()), "dilate");
  AlgebraVector out = v;
  for (int i = 0; i < A.dim(); ++i) out[static_cast<std::size_t>(i)] *= std::pow(r, A.degree(i));
  return out;
}

/// |[D_r u, D_r v] - D_r [u, v]|_inf.
inline double dilation_automorphism_defect(const LieAlgebraSpec& A, double r, const AlgebraVector& u,
                                           const AlgebraVector& v) {
  return (bracket(A, dilate(A, r, u), dilate(A, r, v)) - dilate(A, r, bracket(A, u, v))).max_abs();
}

/// Degree-1 basis vectors, ordered X_1, ..., X_{2n}, Y_{2n+1} for the Dynin-Folland grading.
inline std::vector<BasisIndex> sublaplacian_generators(const LieAlgebraSpec& A) {
  std::vector<BasisIndex> out;
  for (int pos = 0; pos < A.dim(); ++pos)
    if (A.degree(pos) == 1) out.push_back(basis_at(A.n(), pos));
  std::stable_sort(out.begin(), out.end(), [](const BasisIndex& a, const BasisIndex& b) {
    auto key = [](const BasisIndex& x) {
      return std::pair{x.kind == BasisIndex::Kind::X ? 0 : x.kind == BasisIndex::Kind::Y ? 1 : 2, x.index};
    };
    return key(a) < key(b);
  });
  return out;
}

// JSON: {"n", "dim", "labels", "degrees", "brackets": [[i, j, k, numerator, log2_denominator], ...]}

inline nlohmann::json to_json(const LieAlgebraSpec& A) {
  nlohmann::json j;
  j["n"] = A.n();
  j["dim"] = A.dim();
  auto& labels = j["labels"] = nlohmann::json::array();
  auto& degrees = j["degrees"] = nlohmann::json::array();
  for (int p = 0; p < A.dim(); ++p) {
    labels.push_back(A.label(p));
    degrees.push_back(A.degree(p));
  }
  auto& br = j["brackets"] = nlohmann::json::array();
  for (const auto& e : A.entries())
    br.push_back({e.i, e.j, e.k, e.coef.numerator(), e.coef.log2_denominator()});
  return j;
}

inline LieAlgebraSpec algebra_from_json(const nlohmann::json& j) {
  const int n = j.at("n").get<int>();
  LieAlgebraBuilder b(n);
  const auto& degrees = j.at("degrees");
  require(degrees.size() == static_cast<std::size_t>(4 * n + 3), "degrees array has the wrong length");
  for (int p = 0; p < 4 * n + 3; ++p) b.degree(basis_at(n, p), degrees[static_cast<std::size_t>(p)].get<int>());
  for (const auto& t : j.at("brackets")) {
    require(t.is_array() && t.size() == 5, "bracket triplet must be [i, j, k, numerator, log2_denominator]");
    b.raw(t[0].get<int>(), t[1].get<int>(), t[2].get<int>(),
          Dyadic(t[3].get<std::int64_t>(), t[4].get<int>()));
  }
  return b.build();
}

}  // namespace hosc
