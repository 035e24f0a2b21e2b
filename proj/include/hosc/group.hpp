#pragma once

// Group laws in exponential coordinates: the Heisenberg group H_n and the
// Dynin-Folland group H_{n,2}, the latter through the truncated
// Baker-Campbell-Hausdorff series.

#include <algorithm>
#include <cmath>
#include <span>
#include <string>
#include <vector>

#include "hosc/errors.hpp"
#include "hosc/lie_algebra.hpp"
#include "hosc/vector_ops.hpp"

namespace hosc {

/// Point of H_n in exponential coordinates. Storage follows the display
/// order (t_{2n+1}, t_{2n}, ..., t_1); use t(k) for 1-based access.
class HeisPoint {
 public:
  HeisPoint() = default;
  explicit HeisPoint(int n) : n_(n), coords_(static_cast<std::size_t>(2 * n + 1), 0.0) {
    require(n >= 1, "HeisPoint needs n >= 1");
  }
  HeisPoint(int n, std::vector<double> display) : n_(n), coords_(std::move(display)) {
    require(n >= 1, "HeisPoint needs n >= 1");
    require_size(coords_.size(), static_cast<std::size_t>(2 * n + 1), "HeisPoint");
  }

  /// Build from (t_1, ..., t_{2n+1}).
  static HeisPoint from_ascending(int n, std::span<const double> t) {
    require_size(t.size(), static_cast<std::size_t>(2 * n + 1), "HeisPoint::from_ascending");
    HeisPoint p(n);
    for (int k = 1; k <= 2 * n + 1; ++k) p.t(k) = t[static_cast<std::size_t>(k - 1)];
    return p;
  }

  int n() const { return n_; }
  std::size_t size() const { return coords_.size(); }

  double t(int k) const { return coords_[slot(k)]; }
  double& t(int k) { return coords_[slot(k)]; }

  std::span<const double> display() const { return coords_; }
  std::span<double> display() { return coords_; }

  /// Grouped views: t3 = t_{2n+1}, t2 = (t_{2n}, ..., t_{n+1}), t1 = (t_n, ..., t_1).
  double block3() const { return coords_[0]; }
  std::span<const double> block2() const { return display().subspan(1, static_cast<std::size_t>(n_)); }
  std::span<const double> block1() const {
    return display().subspan(static_cast<std::size_t>(n_) + 1, static_cast<std::size_t>(n_));
  }

  HeisPoint operator-() const {
    HeisPoint p = *this;
    for (double& x : p.coords_) x = -x;
    return p;
  }
  HeisPoint scaled(double s) const {
    HeisPoint p = *this;
    for (double& x : p.coords_) x *= s;
    return p;
  }

  double max_abs_diff(const HeisPoint& o) const {
    require_size(o.size(), size(), "HeisPoint comparison");
    double m = 0.0;
    for (std::size_t i = 0; i < coords_.size(); ++i) m = std::max(m, std::abs(coords_[i] - o.coords_[i]));
    return m;
  }

 private:
  std::size_t slot(int k) const {
    if (k < 1 || k > 2 * n_ + 1) throw InvalidArgument("HeisPoint coordinate index " + std::to_string(k) + " out of range");
    return static_cast<std::size_t>(2 * n_ + 1 - k);
  }

  int n_ = 0;
  std::vector<double> coords_;
};

/// H_n group law in grouped form:
/// (t3 + t3' + 1/2(<t1, t2'> - <t2, t1'>), t2 + t2', t1 + t1').
inline HeisPoint heis_mul(const HeisPoint& a, const HeisPoint& b) {
  require(a.n() == b.n(), "heis_mul: points belong to different H_n");
  require_size(b.size(), a.size(), "heis_mul");
  HeisPoint r(a.n());
  auto out = r.display();
  auto da = a.display(), db = b.display();
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = da[i] + db[i];
  out[0] += 0.5 * (dot(a.block1(), b.block2()) - dot(a.block2(), b.block1()));
  return r;
}

/// Printed coadjoint formula: coad(t)(t') = (0, -t3 t1', t3 t2').
inline HeisPoint coad(const HeisPoint& t, const HeisPoint& tp) {
  require(t.n() == tp.n(), "coad: points belong to different H_n");
  const int n = t.n();
  HeisPoint r(n);
  auto out = r.display();
  const double t3 = t.block3();
  for (int i = 0; i < n; ++i) {
    out[static_cast<std::size_t>(1 + i)] = -t3 * tp.block1()[static_cast<std::size_t>(i)];
    out[static_cast<std::size_t>(1 + n + i)] = t3 * tp.block2()[static_cast<std::size_t>(i)];
  }
  return r;
}

/// ad*(X) l = -l o ad(X) on the dual of h_n, with the bracket taken from the
/// X-block of the algebra table. Dual coordinates use the HeisPoint layout.
inline HeisPoint coad_from_bracket(const LieAlgebraSpec& A, const HeisPoint& X, const HeisPoint& l) {
  const int n = A.n();
  require(X.n() == n && l.n() == n, "coad_from_bracket: n mismatch");
  AlgebraVector xv(static_cast<std::size_t>(A.dim()));
  for (int k = 1; k <= 2 * n + 1; ++k) xv[static_cast<std::size_t>(flat_index(n, BasisIndex::x(k)))] = X.t(k);
  HeisPoint r(n);
  for (int k = 1; k <= 2 * n + 1; ++k) {
    const AlgebraVector br = bracket(A, xv, basis_vector(A, BasisIndex::x(k)));
    double s = 0.0;
    for (int m = 1; m <= 2 * n + 1; ++m) s += l.t(m) * br[static_cast<std::size_t>(flat_index(n, BasisIndex::x(m)))];
    r.t(k) = -s;
  }
  return r;
}

/// Element (z, y, x) of H_{n,2}; y holds y_1..y_{2n+1}.
struct GroupElement {
  double z = 0.0;
  std::vector<double> y;
  HeisPoint x;

  GroupElement() = default;
  explicit GroupElement(int n) : y(static_cast<std::size_t>(2 * n + 1), 0.0), x(n) {}
  GroupElement(double z_, std::vector<double> y_, HeisPoint x_) : z(z_), y(std::move(y_)), x(std::move(x_)) {
    require_size(y.size(), x.size(), "GroupElement y-block");
  }

  int n() const { return x.n(); }

  /// Coordinates in the basis layout (z, y_1..y_{2n+1}, x_{2n+1}..x_1).
  AlgebraVector coordinates() const {
    AlgebraVector v(1 + y.size() + x.size());
    v[0] = z;
    std::copy(y.begin(), y.end(), v.c.begin() + 1);
    std::copy(x.display().begin(), x.display().end(), v.c.begin() + 1 + static_cast<std::ptrdiff_t>(y.size()));
    return v;
  }

  static GroupElement from_coordinates(int n, const AlgebraVector& v) {
    require_size(v.size(), static_cast<std::size_t>(4 * n + 3), "GroupElement::from_coordinates");
    const auto m = static_cast<std::ptrdiff_t>(2 * n + 1);
    GroupElement g(n);
    g.z = v[0];
    std::copy(v.c.begin() + 1, v.c.begin() + 1 + m, g.y.begin());
    std::copy(v.c.begin() + 1 + m, v.c.end(), g.x.display().begin());
    return g;
  }

  GroupElement inverse() const {
    GroupElement g = *this;
    g.z = -g.z;
    for (double& v : g.y) v = -v;
    g.x = -g.x;
    return g;
  }

  /// exp(s V) in exponential coordinates.
  static GroupElement exp_basis(int n, const BasisIndex& V, double s) {
    GroupElement g(n);
    switch (V.kind) {
      case BasisIndex::Kind::Z: g.z = s; break;
      case BasisIndex::Kind::Y: g.y.at(static_cast<std::size_t>(V.index - 1)) = s; break;
      case BasisIndex::Kind::X: g.x.t(V.index) = s; break;
    }
    return g;
  }
};

/// u + v + 1/2[u,v] + 1/12([u,[u,v]] + [v,[v,u]]); exact for step <= 3.
inline AlgebraVector bch(const LieAlgebraSpec& A, const AlgebraVector& u, const AlgebraVector& v) {
  if (!A.step_at_most_3()) throw InvalidArgument("bch: algebra is not nilpotent of step <= 3");
  const AlgebraVector uv = bracket(A, u, v);
  const AlgebraVector vu = -1.0 * uv;
  return u + v + 0.5 * uv + (1.0 / 12.0) * (bracket(A, u, uv) + bracket(A, v, vu));
}

/// Product in H_{n,2}, defined through bch on exponential coordinates.
inline GroupElement df_mul(const LieAlgebraSpec& A, const GroupElement& g, const GroupElement& gp) {
  require(g.n() == A.n() && gp.n() == A.n(), "df_mul: group elements do not match the algebra's n");
  return GroupElement::from_coordinates(A.n(), bch(A, g.coordinates(), gp.coordinates()));
}

/// The H_{n,2} closed form exactly as printed, including its z-term
/// <x,y'> - <x,y'>. Kept for comparison with df_mul only.
inline GroupElement printed_closed_form_mul(const GroupElement& g, const GroupElement& gp) {
  const int n = g.n();
  require(gp.n() == n, "printed_closed_form_mul: n mismatch");
  auto as_point = [n](const std::vector<double>& y) { return HeisPoint::from_ascending(n, y); };
  GroupElement r(n);
  double xy = 0.0;
  for (int k = 1; k <= 2 * n + 1; ++k) xy += g.x.t(k) * gp.y[static_cast<std::size_t>(k - 1)];
  r.z = g.z + gp.z + 0.5 * (xy - xy);
  const HeisPoint a = coad(g.x, as_point(gp.y));
  const HeisPoint b = coad(as_point(g.y), gp.x);
  for (int k = 1; k <= 2 * n + 1; ++k) {
    const auto i = static_cast<std::size_t>(k - 1);
    r.y[i] = g.y[i] + gp.y[i] + 0.25 * (a.t(k) - b.t(k));
  }
  r.x = heis_mul(g.x, gp.x);
  return r;
}

/// Componentwise max |df_mul - printed closed form|.
inline double closed_form_discrepancy(const LieAlgebraSpec& A, const GroupElement& g, const GroupElement& gp) {
  return (df_mul(A, g, gp).coordinates() - printed_closed_form_mul(g, gp).coordinates()).max_abs();
}

}  // namespace hosc
