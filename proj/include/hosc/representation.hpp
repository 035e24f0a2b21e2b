#pragma once

// The generic representation pi_lambda of H_{n,2} on functions over H_n, the
// Schroedinger representation rho_lambda of H_n, and the infinitesimal
// generators d pi_lambda(V) of the basis of h_{n,2}.

#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <span>
#include <string>
#include <vector>

#include "hosc/errors.hpp"
#include "hosc/group.hpp"
#include "hosc/lie_algebra.hpp"

namespace hosc {

using cplx = std::complex<double>;

inline constexpr double two_pi = 2.0 * std::numbers::pi;

/// Nonzero representation parameter lambda.
class ReprParam {
 public:
  explicit ReprParam(double lambda = 1.0) : lambda_(lambda) {
    require(lambda != 0.0, "representation parameter lambda must be nonzero");
  }
  double value() const { return lambda_; }

 private:
  double lambda_;
};

/// exp(-sum_j a_j (t_j - c_j)^2) on R^d, with exact derivatives.
/// Coordinates are indexed 1..d; on H_n the index k refers to t_k.
class Gaussian {
 public:
  Gaussian(std::vector<double> a, std::vector<double> c) : a_(std::move(a)), c_(std::move(c)) {
    require_size(c_.size(), a_.size(), "Gaussian centre");
    for (double w : a_) require(w > 0.0, "Gaussian widths must be positive");
  }

  std::size_t dim() const { return a_.size(); }

  double operator()(std::span<const double> t) const {
    require_size(t.size(), dim(), "Gaussian argument");
    double e = 0.0;
    for (std::size_t j = 0; j < dim(); ++j) e += a_[j] * (t[j] - c_[j]) * (t[j] - c_[j]);
    return std::exp(-e);
  }
  double operator()(const HeisPoint& p) const { return (*this)(ascending(p)); }

  /// d/dt_k
  double partial(std::span<const double> t, int k) const {
    const auto i = static_cast<std::size_t>(k - 1);
    return -2.0 * a_.at(i) * (t[i] - c_[i]) * (*this)(t);
  }
  double partial(const HeisPoint& p, int k) const { return partial(ascending(p), k); }

  /// d^2/dt_j dt_k
  double second_partial(std::span<const double> t, int j, int k) const {
    const auto a = static_cast<std::size_t>(j - 1), b = static_cast<std::size_t>(k - 1);
    const double g = (*this)(t);
    const double da = -2.0 * a_.at(a) * (t[a] - c_[a]);
    const double db = -2.0 * a_.at(b) * (t[b] - c_[b]);
    return (da * db - (a == b ? 2.0 * a_[a] : 0.0)) * g;
  }

 private:
  static std::vector<double> ascending(const HeisPoint& p) {
    std::vector<double> t(p.size());
    for (int k = 1; k <= static_cast<int>(p.size()); ++k) t[static_cast<std::size_t>(k - 1)] = p.t(k);
    return t;
  }

  std::vector<double> a_, c_;
};

/// How the phase <t . 1/2 x, y> is read: as the H_n product with the halved
/// coordinate vector (default), or as the Euclidean sum t + x/2.
enum class PhaseReading { heisenberg_product, euclidean_sum };

/// (pi_lambda(z, y, x) f)(t) = e^{2 pi i lambda z} e^{2 pi i lambda <t . x/2, y>} f(t . x).
/// f is any callable HeisPoint -> complex (or real).
template <class F>
auto pi_apply(ReprParam lambda, const GroupElement& g, F f,
              PhaseReading reading = PhaseReading::heisenberg_product) {
  return [lam = lambda.value(), g, f = std::move(f), reading](const HeisPoint& t) -> cplx {
    require(t.n() == g.n(), "pi_apply: point and group element disagree on n");
    const HeisPoint half = g.x.scaled(0.5);
    HeisPoint shifted(t.n());
    if (reading == PhaseReading::heisenberg_product) {
      shifted = heis_mul(t, half);
    } else {
      for (int k = 1; k <= 2 * t.n() + 1; ++k) shifted.t(k) = t.t(k) + half.t(k);
    }
    double pairing = 0.0;
    for (int k = 1; k <= 2 * t.n() + 1; ++k) pairing += shifted.t(k) * g.y[static_cast<std::size_t>(k - 1)];
    const cplx phase = std::polar(1.0, two_pi * lam * (g.z + pairing));
    return phase * cplx(f(heis_mul(t, g.x)));
  };
}

/// (rho_lambda(t) f)(u) = e^{2 pi i lambda (t3 + 1/2<t1, t2> + <t2, u>)} f(u + t1).
/// Points u of R^n are indexed by j = 1..n, paired with t_j and t_{n+j}.
template <class F>
auto rho_apply(ReprParam lambda, const HeisPoint& t, F f) {
  return [lam = lambda.value(), t, f = std::move(f)](std::span<const double> u) -> cplx {
    const int n = t.n();
    require_size(u.size(), static_cast<std::size_t>(n), "rho_apply argument");
    double t12 = 0.0, t2u = 0.0;
    std::vector<double> moved(u.begin(), u.end());
    for (int j = 1; j <= n; ++j) {
      t12 += t.t(j) * t.t(n + j);
      t2u += t.t(n + j) * u[static_cast<std::size_t>(j - 1)];
      moved[static_cast<std::size_t>(j - 1)] += t.t(j);
    }
    const cplx phase = std::polar(1.0, two_pi * lam * (t.t(2 * n + 1) + 0.5 * t12 + t2u));
    return phase * cplx(f(std::span<const double>(moved)));
  };
}

/// Symbolic image d pi_lambda(V) of a basis vector.
struct GeneratorDescriptor {
  enum class Kind { constant_multiplication, coordinate_multiplication, vector_field };

  /// (constant + coef * t_{coef_axis}) d/dt_{axis}; coef_axis == 0 means no affine part.
  struct Term {
    int axis;
    double constant;
    int coef_axis;
    double coef;
  };

  Kind kind;
  BasisIndex generator;
  cplx factor{0.0, 0.0};  // 2 pi i lambda for the multiplication kinds
  int coordinate = 0;     // k of Y_k
  std::vector<Term> terms;

  std::string to_string() const {
    std::ostringstream os;
    switch (kind) {
      case Kind::constant_multiplication:
        os << "multiply by " << factor.imag() / std::numbers::pi << "*pi*i";
        break;
      case Kind::coordinate_multiplication:
        os << "multiply by " << factor.imag() / std::numbers::pi << "*pi*i*t" << coordinate;
        break;
      case Kind::vector_field:
        for (std::size_t i = 0; i < terms.size(); ++i) {
          const Term& tm = terms[i];
          if (tm.coef_axis == 0) {
            os << (i ? " + " : "") << "d/dt" << tm.axis;
          } else {
            os << (tm.coef < 0 ? (i ? " - " : "-") : (i ? " + " : "")) << std::abs(tm.coef) << "*t" << tm.coef_axis
               << "*d/dt" << tm.axis;
          }
        }
        break;
    }
    return os.str();
  }
};

inline GeneratorDescriptor dpi_generator(ReprParam lambda, int n, const BasisIndex& V) {
  const int top = 2 * n + 1;
  flat_index(n, V);  // range check
  using K = GeneratorDescriptor::Kind;
  const cplx tpil(0.0, two_pi * lambda.value());
  switch (V.kind) {
    case BasisIndex::Kind::Z: return {K::constant_multiplication, V, tpil, 0, {}};
    case BasisIndex::Kind::Y: return {K::coordinate_multiplication, V, tpil, V.index, {}};
    case BasisIndex::Kind::X: {
      GeneratorDescriptor d{K::vector_field, V, cplx{}, 0, {{V.index, 1.0, 0, 0.0}}};
      if (V.index <= n)
        d.terms.push_back({top, 0.0, n + V.index, -0.5});
      else if (V.index < top)
        d.terms.push_back({top, 0.0, V.index - n, 0.5});
      return d;
    }
  }
  throw InvalidArgument("dpi_generator: unknown basis index");
}

/// (d pi(V) f)(t) for a Gaussian f, using exact derivatives.
inline cplx apply_generator(const GeneratorDescriptor& d, const Gaussian& f, const HeisPoint& t) {
  using K = GeneratorDescriptor::Kind;
  switch (d.kind) {
    case K::constant_multiplication: return d.factor * f(t);
    case K::coordinate_multiplication: return d.factor * t.t(d.coordinate) * f(t);
    case K::vector_field: {
      double s = 0.0;
      for (const auto& tm : d.terms) {
        const double c = tm.constant + (tm.coef_axis ? tm.coef * t.t(tm.coef_axis) : 0.0);
        s += c * f.partial(t, tm.axis);
      }
      return s;
    }
  }
  return 0.0;
}

/// |(pi(exp sV) f - pi(exp -sV) f)(t) / 2s - (d pi(V) f)(t)|.
inline double dpi_fd_check(ReprParam lambda, const BasisIndex& V, const Gaussian& f, const HeisPoint& t, double s) {
  require(s > 0.0, "dpi_fd_check: step must be positive");
  const int n = t.n();
  auto fwd = pi_apply(lambda, GroupElement::exp_basis(n, V, s), f);
  auto bwd = pi_apply(lambda, GroupElement::exp_basis(n, V, -s), f);
  const cplx central = (fwd(t) - bwd(t)) / (2.0 * s);
  return std::abs(central - apply_generator(dpi_generator(lambda, n, V), f, t));
}

}  // namespace hosc
