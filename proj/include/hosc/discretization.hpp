#pragma once

// Finite-difference assembly of the Heisenberg harmonic oscillator
// Q = -sum_j (X_j)^2 + 4 pi^2 t_{2n+1}^2 on a truncated box with zero
// (Dirichlet) extension, in sum-of-squares and in expanded form.

#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "hosc/errors.hpp"
#include "hosc/grid.hpp"
#include "hosc/lie_algebra.hpp"
#include "hosc/sparse.hpp"

namespace hosc {

enum class DifferenceScheme { forward, centered };

inline std::string to_string(DifferenceScheme s) { return s == DifferenceScheme::forward ? "forward" : "centered"; }

/// Discrete left-invariant vector field D_j ~ d/dt_j + c_j d/dt_{2n+1}.
struct StencilField {
  BasisIndex generator;
  DifferenceScheme scheme;
  CsrMatrix op;
};

/// Affine coefficient c_j in X_j = d/dt_j + c_j d/dt_{2n+1}:
/// -t_{n+j}/2 for j <= n, +t_{j-n}/2 for n < j <= 2n.
inline double field_coefficient(const GridSpec& g, int j, const std::vector<int>& idx) {
  const int n = g.n;
  return j <= n ? -0.5 * g.coordinate(n + j - 1, idx[static_cast<std::size_t>(n + j - 1)])
                : 0.5 * g.coordinate(j - n - 1, idx[static_cast<std::size_t>(j - n - 1)]);
}

namespace detail {

// Row entries of D_j at grid point p; out-of-grid neighbours are dropped.
inline void vector_field_row(const GridSpec& g, int j, DifferenceScheme scheme, std::size_t p,
                             const std::vector<int>& idx, std::vector<Triplet>& out) {
  const int a = j - 1, top = g.top_axis();
  const double c = field_coefficient(g, j, idx);
  auto push = [&](int axis, int offset, double w) {
    const int i = idx[static_cast<std::size_t>(axis)] + offset;
    if (i < 0 || i >= g.points[static_cast<std::size_t>(axis)]) return;
    const auto q = static_cast<std::ptrdiff_t>(p) + offset * static_cast<std::ptrdiff_t>(g.stride(axis));
    out.push_back({p, static_cast<std::size_t>(q), w});
  };
  if (scheme == DifferenceScheme::centered) {
    const double ha = 2.0 * g.spacing(a), ht = 2.0 * g.spacing(top);
    push(a, 1, 1.0 / ha);
    push(a, -1, -1.0 / ha);
    push(top, 1, c / ht);
    push(top, -1, -c / ht);
  } else {
    const double ha = g.spacing(a), ht = g.spacing(top);
    push(a, 1, 1.0 / ha);
    push(top, 1, c / ht);
    out.push_back({p, p, -1.0 / ha - c / ht});
  }
}

inline void check_degree_one_x(const GridSpec& g, const BasisIndex& V) {
  if (V.kind != BasisIndex::Kind::X || V.index < 1 || V.index > 2 * g.n)
    throw InvalidArgument("assemble_vector_field: " + label(V) + " is not one of X_1..X_2n");
}

}  // namespace detail

inline StencilField assemble_vector_field(const GridSpec& g, const BasisIndex& V,
                                          DifferenceScheme scheme = DifferenceScheme::centered) {
  g.validate();
  detail::check_degree_one_x(g, V);
  std::vector<Triplet> t;
  t.reserve(4 * g.size());
  for (std::size_t p = 0; p < g.size(); ++p) detail::vector_field_row(g, V.index, scheme, p, g.unflatten(p), t);
  return {V, scheme, CsrMatrix::from_triplets(g.size(), g.size(), std::move(t))};
}

/// Upper bound on nonzeros per row of the sum-of-squares matrix.
inline std::size_t sos_row_nnz_bound(int n, DifferenceScheme scheme) {
  return scheme == DifferenceScheme::forward ? static_cast<std::size_t>(8 * n + 3) : static_cast<std::size_t>(12 * n + 3);
}

inline std::size_t expanded_row_nnz_bound(int n) { return static_cast<std::size_t>(12 * n + 3); }

inline double potential(const GridSpec& g, const std::vector<int>& idx) {
  const double t = g.coordinate(g.top_axis(), idx[static_cast<std::size_t>(g.top_axis())]);
  return 4.0 * std::numbers::pi * std::numbers::pi * t * t;
}

/// Q_h = sum_{j=1}^{2n} D_j^T D_j + diag(4 pi^2 t_{2n+1}^2).
/// Symmetric and positive semidefinite for either difference scheme.
inline SparseSymmetricMatrix assemble_oscillator_sos(const GridSpec& g,
                                                     DifferenceScheme scheme = DifferenceScheme::forward) {
  g.validate();
  const std::size_t N = g.size();
  std::vector<Triplet> out;
  out.reserve(N * (scheme == DifferenceScheme::forward ? 9 : 16) * static_cast<std::size_t>(2 * g.n) + N);
  std::vector<Triplet> row;
  for (std::size_t p = 0; p < N; ++p) {
    const std::vector<int> idx = g.unflatten(p);
    for (int j = 1; j <= 2 * g.n; ++j) {
      row.clear();
      detail::vector_field_row(g, j, scheme, p, idx, row);
      // (D^T D)_{ab} += D_{pa} D_{pb}
      for (const Triplet& x : row)
        for (const Triplet& y : row) out.push_back({x.col, y.col, x.value * y.value});
    }
    out.push_back({p, p, potential(g, idx)});
  }
  return SparseSymmetricMatrix(CsrMatrix::from_triplets(N, N, std::move(out)));
}

/// Orientation of the mixed term 2 sigma sum_j c_j d_j d_{2n+1}.
/// sum_of_squares: sigma = -1, the expansion of -sum_j X_j^2.
/// printed_display: the opposite sign, equivalent under t_{2n+1} -> -t_{2n+1}.
enum class CrossTermSign { sum_of_squares, printed_display };

/// -sum_j d_j^2 - (sum_j c_j^2) d_top^2 - 2 sum_j c_j d_j d_top + 4 pi^2 t_top^2
/// with centred second differences and centred-centred mixed differences.
inline SparseSymmetricMatrix assemble_oscillator_expanded(const GridSpec& g,
                                                          CrossTermSign sign = CrossTermSign::sum_of_squares) {
  g.validate();
  const std::size_t N = g.size();
  const int top = g.top_axis();
  const double ht = g.spacing(top);
  const double sigma = sign == CrossTermSign::sum_of_squares ? 1.0 : -1.0;
  std::vector<Triplet> out;
  out.reserve(N * expanded_row_nnz_bound(g.n));
  for (std::size_t p = 0; p < N; ++p) {
    const std::vector<int> idx = g.unflatten(p);
    auto inside = [&](int axis, int off) {
      const int i = idx[static_cast<std::size_t>(axis)] + off;
      return i >= 0 && i < g.points[static_cast<std::size_t>(axis)];
    };
    auto nb = [&](int axis, int off) {
      return static_cast<std::size_t>(static_cast<std::ptrdiff_t>(p) + off * static_cast<std::ptrdiff_t>(g.stride(axis)));
    };
    double diag = potential(g, idx);
    auto second_difference = [&](int axis, double coef) {
      const double w = coef / (g.spacing(axis) * g.spacing(axis));
      diag += 2.0 * w;
      for (int off : {-1, 1})
        if (inside(axis, off)) out.push_back({p, nb(axis, off), -w});
    };
    double csum = 0.0;
    for (int j = 1; j <= 2 * g.n; ++j) {
      const double c = field_coefficient(g, j, idx);
      csum += c * c;
      second_difference(j - 1, 1.0);
      const double w = -2.0 * sigma * c / (4.0 * g.spacing(j - 1) * ht);
      for (int oj : {-1, 1})
        for (int ot : {-1, 1})
          if (inside(j - 1, oj) && inside(top, ot))
            out.push_back({p, nb(j - 1, oj) + nb(top, ot) - p, w * oj * ot});
    }
    second_difference(top, csum);
    out.push_back({p, p, diag});
  }
  return SparseSymmetricMatrix(CsrMatrix::from_triplets(N, N, std::move(out)), 1e-14);
}

enum class Assembly { sos, expanded };

inline std::string to_string(Assembly a) { return a == Assembly::sos ? "sos" : "expanded"; }

inline SparseSymmetricMatrix assemble_oscillator(const GridSpec& g, Assembly a) {
  return a == Assembly::sos ? assemble_oscillator_sos(g) : assemble_oscillator_expanded(g);
}

}  // namespace hosc
