#pragma once

// Self-checks run by the command-line front end: algebraic identities of a
// structure table, the group law, and the representation pi_lambda.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "json.hpp"

#include "hosc/group.hpp"
#include "hosc/lie_algebra.hpp"
#include "hosc/representation.hpp"
#include "hosc/symplectic.hpp"

namespace hosc {

struct CheckReport {
  bool pass = true;
  nlohmann::json details;
  std::vector<std::string> violations;

  void gate(const std::string& name, bool ok) {
    details["gates"][name] = ok;
    if (!ok) {
      pass = false;
      violations.push_back(name);
    }
  }

  nlohmann::json to_json() const {
    nlohmann::json j = details;
    j["pass"] = pass;
    j["violations"] = violations;
    return j;
  }
};

struct AlgebraTolerances {
  double jacobi = 1e-13;
  double dilation = 1e-12;
  double associativity = 1e-12;
  double closed_form = 1e-12;
  int probes = 100;
  int triples = 1000;
};

namespace detail {

inline AlgebraVector random_algebra_vector(int dim, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  AlgebraVector v(static_cast<std::size_t>(dim));
  for (double& c : v.c) c = U(rng);
  return v;
}

inline HeisPoint random_point(int n, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> U(lo, hi);
  HeisPoint p(n);
  for (double& c : p.display()) c = U(rng);
  return p;
}

}  // namespace detail

/// Structure-table identities, plus the group law when the table is step <= 3.
inline CheckReport algebra_check(const LieAlgebraSpec& A, std::uint64_t seed = 42, const AlgebraTolerances& tol = {}) {
  CheckReport rep;
  auto& d = rep.details;
  d["n"] = A.n();
  d["dim"] = A.dim();

  const double anti = antisymmetry_defect(A);
  d["antisymmetry_defect"] = anti;
  rep.gate("antisymmetry", anti == 0.0);

  const double jac = jacobi_defect(A);
  d["jacobi_defect"] = jac;
  rep.gate("jacobi", jac <= tol.jacobi);

  const double depth4 = depth4_bracket_max(A);
  d["depth4_bracket_max"] = depth4;
  rep.gate("nilpotent_step3", depth4 == 0.0);

  const auto bad = degree_additivity_violations(A);
  nlohmann::json bad_json = nlohmann::json::array();
  for (const auto& v : bad) bad_json.push_back("[" + A.label(v.i) + "," + A.label(v.j) + "] -> " + A.label(v.k));
  d["degree_violations"] = bad_json;
  rep.gate("degree_additivity", bad.empty());

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> R(0.1, 3.0);
  double dil = 0.0;
  for (int p = 0; p < tol.probes; ++p) {
    const AlgebraVector u = detail::random_algebra_vector(A.dim(), rng);
    const AlgebraVector v = detail::random_algebra_vector(A.dim(), rng);
    dil = std::max(dil, dilation_automorphism_defect(A, R(rng), u, v));
  }
  d["dilation_defect"] = dil;
  rep.gate("dilation_automorphism", dil <= tol.dilation);

  if (!A.step_at_most_3()) {
    d["group_law"] = "skipped: table is not nilpotent of step <= 3";
    return rep;
  }

  // Group law through BCH: associativity and the X-block against H_n.
  double assoc = 0.0, xblock = 0.0, closed = 0.0;
  const int n = A.n();
  for (int t = 0; t < tol.triples; ++t) {
    const auto a = GroupElement::from_coordinates(n, detail::random_algebra_vector(A.dim(), rng));
    const auto b = GroupElement::from_coordinates(n, detail::random_algebra_vector(A.dim(), rng));
    const auto c = GroupElement::from_coordinates(n, detail::random_algebra_vector(A.dim(), rng));
    const auto left = df_mul(A, df_mul(A, a, b), c);
    const auto right = df_mul(A, a, df_mul(A, b, c));
    assoc = std::max(assoc, (left.coordinates() - right.coordinates()).max_abs());
    xblock = std::max(xblock, df_mul(A, a, b).x.max_abs_diff(heis_mul(a.x, b.x)));
    closed = std::max(closed, closed_form_discrepancy(A, a, b));
  }
  d["bch_associativity_defect"] = assoc;
  d["x_block_vs_heisenberg_defect"] = xblock;
  d["printed_closed_form_discrepancy"] = closed;
  rep.gate("bch_associativity", assoc <= tol.associativity);
  rep.gate("x_block_heisenberg_law", xblock <= tol.closed_form);

  // Coadjoint formula against -l o ad(X) from the table, in both argument orders.
  double same = 0.0, swapped = 0.0;
  for (int p = 0; p < tol.probes; ++p) {
    const HeisPoint t = detail::random_point(n, rng), tp = detail::random_point(n, rng);
    same = std::max(same, coad(t, tp).max_abs_diff(coad_from_bracket(A, t, tp)));
    swapped = std::max(swapped, coad(t, tp).max_abs_diff(coad_from_bracket(A, tp, t)));
  }
  d["coad_vs_bracket"] = {{"as_printed_order", same}, {"arguments_swapped", swapped}};
  return rep;
}

inline CheckReport algebra_check(int n, std::uint64_t seed = 42, const AlgebraTolerances& tol = {}) {
  require(n >= 1, "algebra check: n must be >= 1");
  const LieAlgebraSpec A = build_dynin_folland(n);
  CheckReport rep = algebra_check(A, seed, tol);
  std::vector<double> pf;
  for (double lam : {-2.0, -0.5, 0.5, 1.0, 2.0}) {
    pf.push_back(std::abs(pfaffian(A, lam) - std::pow(std::abs(lam), 2 * n + 1)));
  }
  const double pf_err = *std::max_element(pf.begin(), pf.end());
  rep.details["pfaffian_defect"] = pf_err;
  rep.gate("pfaffian", pf_err <= 1e-12);
  return rep;
}

struct RepTolerances {
  double homomorphism = 1e-10;
  double unitarity = 1e-14;
  double ratio_lo = 3.5, ratio_hi = 4.5;
  double step = 1e-2;
};

/// Homomorphism, unitarity, inverse and generator checks of pi_lambda on
/// Gaussian test functions. `samples` random group pairs, 50 points each.
inline CheckReport rep_check(int n, double lambda, int samples = 100, std::uint64_t seed = 42,
                             const RepTolerances& tol = {}) {
  require(n >= 1, "rep check: n must be >= 1");
  require(samples >= 1, "rep check: samples must be >= 1");
  const ReprParam lam(lambda);
  const LieAlgebraSpec A = build_dynin_folland(n);
  CheckReport rep;
  auto& d = rep.details;
  d["n"] = n;
  d["lambda"] = lambda;
  d["samples"] = samples;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> W(0.3, 1.0), C(-0.5, 0.5);
  const auto m = static_cast<std::size_t>(2 * n + 1);
  std::vector<double> widths(m), centre(m);
  for (std::size_t i = 0; i < m; ++i) {
    widths[i] = W(rng);
    centre[i] = C(rng);
  }
  const Gaussian f(widths, centre);
  d["gaussian"] = {{"widths", widths}, {"centre", centre}};

  const int points = 50;
  double hom = 0.0, hom_euclid = 0.0, unit = 0.0, inv = 0.0;
  for (int s = 0; s < samples; ++s) {
    const auto g = GroupElement::from_coordinates(n, detail::random_algebra_vector(A.dim(), rng));
    const auto gp = GroupElement::from_coordinates(n, detail::random_algebra_vector(A.dim(), rng));
    const auto prod = df_mul(A, g, gp);
    for (PhaseReading reading : {PhaseReading::heisenberg_product, PhaseReading::euclidean_sum}) {
      auto two_step = pi_apply(lam, g, pi_apply(lam, gp, f, reading), reading);
      auto one_step = pi_apply(lam, prod, f, reading);
      double worst = 0.0;
      std::mt19937_64 prng(seed + static_cast<std::uint64_t>(s));
      for (int p = 0; p < points; ++p) {
        const HeisPoint t = detail::random_point(n, prng, -3.0, 3.0);
        worst = std::max(worst, std::abs(two_step(t) - one_step(t)));
      }
      double& slot = reading == PhaseReading::heisenberg_product ? hom : hom_euclid;
      slot = std::max(slot, worst);
    }
    auto moved = pi_apply(lam, g, f);
    auto back = pi_apply(lam, g.inverse(), pi_apply(lam, g, f));
    for (int p = 0; p < points; ++p) {
      const HeisPoint t = detail::random_point(n, rng, -3.0, 3.0);
      unit = std::max(unit, std::abs(std::abs(moved(t)) - std::abs(f(heis_mul(t, g.x)))));
      inv = std::max(inv, std::abs(back(t) - cplx(f(t))));
    }
  }
  d["homomorphism_defect"] = hom;
  d["homomorphism_defect_euclidean_reading"] = hom_euclid;
  d["unitarity_defect"] = unit;
  d["inverse_defect"] = inv;
  rep.gate("homomorphism", hom <= tol.homomorphism);
  rep.gate("unitarity", unit <= tol.unitarity);
  rep.gate("inverse", inv <= tol.homomorphism);

  // Central differences of s -> pi(exp sV) f against d pi(V) f, at s and s/2.
  // FD probes stay where the Gaussian is not negligibly small.
  std::vector<HeisPoint> pts;
  for (int p = 0; p < 20; ++p) pts.push_back(detail::random_point(n, rng, -1.5, 1.5));
  nlohmann::json gens = nlohmann::json::array();
  bool ratios_ok = true;
  for (int pos = 0; pos < A.dim(); ++pos) {
    const BasisIndex V = basis_at(n, pos);
    double e1 = 0.0, e2 = 0.0;
    for (const HeisPoint& t : pts) {
      e1 = std::max(e1, dpi_fd_check(lam, V, f, t, tol.step));
      e2 = std::max(e2, dpi_fd_check(lam, V, f, t, 0.5 * tol.step));
    }
    const double ratio = e1 / e2;
    const bool ok = ratio >= tol.ratio_lo && ratio <= tol.ratio_hi;
    ratios_ok = ratios_ok && ok;
    gens.push_back({{"generator", label(V)},
                    {"d_pi", dpi_generator(lam, n, V).to_string()},
                    {"error_s", e1},
                    {"error_half_s", e2},
                    {"ratio", ratio},
                    {"ok", ok}});
  }
  d["generators"] = gens;
  rep.gate("generator_finite_differences", ratios_ok);
  return rep;
}

}  // namespace hosc
