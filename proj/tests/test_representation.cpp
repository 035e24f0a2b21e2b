#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "hosc/checks.hpp"
#include "hosc/representation.hpp"

using namespace hosc;

namespace {

GroupElement random_element(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-1.0, 1.0);
  AlgebraVector v(static_cast<std::size_t>(4 * n + 3));
  for (double& c : v.c) c = U(rng);
  return GroupElement::from_coordinates(n, v);
}

HeisPoint random_point(int n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> U(-2.0, 2.0);
  HeisPoint p(n);
  for (double& c : p.display()) c = U(rng);
  return p;
}

const Gaussian kGauss({0.7, 0.5, 0.9}, {0.1, -0.2, 0.3});

}  // namespace

TEST(Representation, RejectsZeroLambda) {
  EXPECT_THROW(ReprParam(0.0), InvalidArgument);
  EXPECT_THROW(rep_check(1, 0.0), InvalidArgument);
}

TEST(Representation, CentreActsByCharacter) {
  const ReprParam lam(1.5);
  const auto g = GroupElement::exp_basis(1, BasisIndex::z(), 0.2);
  auto pf = pi_apply(lam, g, kGauss);
  const HeisPoint t(1, {0.3, -0.4, 0.5});
  const cplx expected = std::polar(1.0, two_pi * 1.5 * 0.2) * kGauss(t);
  EXPECT_LE(std::abs(pf(t) - expected), 1e-15);
}

TEST(Representation, YActsByMultiplication) {
  const ReprParam lam(-2.0);
  const auto g = GroupElement::exp_basis(1, BasisIndex::y(2), 0.25);
  auto pf = pi_apply(lam, g, kGauss);
  const HeisPoint t(1, {0.3, -0.4, 0.5});
  const cplx expected = std::polar(1.0, two_pi * -2.0 * 0.25 * t.t(2)) * kGauss(t);
  EXPECT_LE(std::abs(pf(t) - expected), 1e-15);
}

class Homomorphism : public ::testing::TestWithParam<double> {};

TEST_P(Homomorphism, PointwiseOnGaussians) {
  const ReprParam lam(GetParam());
  const LieAlgebraSpec A = build_dynin_folland(1);
  std::mt19937_64 rng(21);
  double worst = 0.0;
  for (int s = 0; s < 100; ++s) {
    const auto g = random_element(1, rng), h = random_element(1, rng);
    auto two = pi_apply(lam, g, pi_apply(lam, h, kGauss));
    auto one = pi_apply(lam, df_mul(A, g, h), kGauss);
    for (int p = 0; p < 50; ++p) {
      const HeisPoint t = random_point(1, rng);
      worst = std::max(worst, std::abs(two(t) - one(t)));
    }
  }
  EXPECT_LE(worst, 1e-10);
}

TEST_P(Homomorphism, EuclideanPhaseReadingIsNotAHomomorphism) {
  const ReprParam lam(GetParam());
  const LieAlgebraSpec A = build_dynin_folland(1);
  std::mt19937_64 rng(22);
  double worst = 0.0;
  for (int s = 0; s < 20; ++s) {
    const auto g = random_element(1, rng), h = random_element(1, rng);
    auto two = pi_apply(lam, g, pi_apply(lam, h, kGauss, PhaseReading::euclidean_sum), PhaseReading::euclidean_sum);
    auto one = pi_apply(lam, df_mul(A, g, h), kGauss, PhaseReading::euclidean_sum);
    for (int p = 0; p < 10; ++p) {
      const HeisPoint t = random_point(1, rng);
      worst = std::max(worst, std::abs(two(t) - one(t)));
    }
  }
  EXPECT_GT(worst, 1e-3);
}

TEST_P(Homomorphism, UnitaryModulusAndInverse) {
  const ReprParam lam(GetParam());
  std::mt19937_64 rng(23);
  for (int s = 0; s < 20; ++s) {
    const auto g = random_element(1, rng);
    auto moved = pi_apply(lam, g, kGauss);
    auto back = pi_apply(lam, g.inverse(), pi_apply(lam, g, kGauss));
    for (int p = 0; p < 10; ++p) {
      const HeisPoint t = random_point(1, rng);
      EXPECT_LE(std::abs(std::abs(moved(t)) - kGauss(heis_mul(t, g.x))), 1e-14);
      EXPECT_LE(std::abs(back(t) - cplx(kGauss(t))), 1e-12);
    }
  }
}

INSTANTIATE_TEST_SUITE_P(Lambda, Homomorphism, ::testing::Values(1.0, -2.0, 0.5));

TEST(Representation, HomomorphismAtN2) {
  const ReprParam lam(0.75);
  const LieAlgebraSpec A = build_dynin_folland(2);
  const Gaussian f({0.6, 0.8, 0.5, 0.7, 0.9}, {0.1, 0.0, -0.1, 0.2, 0.0});
  std::mt19937_64 rng(24);
  for (int s = 0; s < 20; ++s) {
    const auto g = random_element(2, rng), h = random_element(2, rng);
    auto two = pi_apply(lam, g, pi_apply(lam, h, f));
    auto one = pi_apply(lam, df_mul(A, g, h), f);
    for (int p = 0; p < 10; ++p) {
      const HeisPoint t = random_point(2, rng);
      EXPECT_LE(std::abs(two(t) - one(t)), 1e-10);
    }
  }
}

TEST(Schroedinger, RhoIsAHomomorphismOfHn) {
  const ReprParam lam(1.3);
  auto f = [](std::span<const double> u) { return std::exp(-0.5 * u[0] * u[0] + 0.1 * u[0]); };
  std::mt19937_64 rng(25);
  for (int s = 0; s < 20; ++s) {
    const HeisPoint a = random_point(1, rng), b = random_point(1, rng);
    auto two = rho_apply(lam, a, rho_apply(lam, b, f));
    auto one = rho_apply(lam, heis_mul(a, b), f);
    for (double u : {-1.0, 0.0, 0.7}) {
      const double arg[1] = {u};
      EXPECT_LE(std::abs(two(arg) - one(arg)), 1e-12);
    }
  }
}

TEST(Generators, SymbolicForms) {
  const ReprParam lam(1.0);
  EXPECT_EQ(dpi_generator(lam, 1, BasisIndex::x(1)).to_string(), "d/dt1 - 0.5*t2*d/dt3");
  EXPECT_EQ(dpi_generator(lam, 1, BasisIndex::x(2)).to_string(), "d/dt2 + 0.5*t1*d/dt3");
  EXPECT_EQ(dpi_generator(lam, 1, BasisIndex::x(3)).to_string(), "d/dt3");
  const auto y = dpi_generator(lam, 1, BasisIndex::y(2));
  EXPECT_EQ(y.kind, GeneratorDescriptor::Kind::coordinate_multiplication);
  EXPECT_EQ(y.coordinate, 2);
  EXPECT_NEAR(y.factor.imag(), two_pi, 1e-15);
  EXPECT_EQ(dpi_generator(ReprParam(-2.0), 1, BasisIndex::z()).factor, cplx(0.0, -2.0 * two_pi));
}

TEST(Generators, FiniteDifferencesConvergeAtSecondOrder) {
  std::mt19937_64 rng(26);
  for (double l : {1.0, -2.0}) {
    const ReprParam lam(l);
    std::vector<HeisPoint> pts;
    for (int p = 0; p < 10; ++p) pts.push_back(random_point(1, rng));
    for (int pos = 0; pos < 7; ++pos) {
      const BasisIndex V = basis_at(1, pos);
      double e1 = 0.0, e2 = 0.0;
      for (const auto& t : pts) {
        e1 = std::max(e1, dpi_fd_check(lam, V, kGauss, t, 1e-2));
        e2 = std::max(e2, dpi_fd_check(lam, V, kGauss, t, 5e-3));
      }
      EXPECT_GE(e1 / e2, 3.5) << label(V);
      EXPECT_LE(e1 / e2, 4.5) << label(V);
    }
  }
}

namespace {

// (A (B f))(t) for vector-field descriptors with affine coefficients, using
// exact first and second derivatives of a Gaussian.
double compose_fields(const GeneratorDescriptor& A, const GeneratorDescriptor& B, const Gaussian& f, const HeisPoint& t) {
  std::vector<double> tt;
  for (int k = 1; k <= static_cast<int>(t.size()); ++k) tt.push_back(t.t(k));
  auto coef = [&](const GeneratorDescriptor::Term& m) { return m.constant + (m.coef_axis ? m.coef * t.t(m.coef_axis) : 0.0); };
  double s = 0.0;
  for (const auto& a : A.terms)
    for (const auto& b : B.terms) {
      const double db = b.coef_axis == a.axis ? b.coef : 0.0;
      s += coef(a) * (db * f.partial(t, b.axis) + coef(b) * f.second_partial(tt, a.axis, b.axis));
    }
  return s;
}

}  // namespace

TEST(Generators, BracketRelationsHoldForTheImages) {
  const ReprParam lam(0.8);
  const int n = 2;
  const Gaussian f({0.6, 0.8, 0.5, 0.7, 0.9}, {0.1, 0.0, -0.1, 0.2, 0.0});
  const HeisPoint t(n, {0.6, -0.3, 0.4, 0.2, -0.5});
  // [X_j, X_{n+j}] = X_{2n+1}
  for (int j = 1; j <= n; ++j) {
    const auto a = dpi_generator(lam, n, BasisIndex::x(j)), b = dpi_generator(lam, n, BasisIndex::x(n + j));
    const double comm = compose_fields(a, b, f, t) - compose_fields(b, a, f, t);
    EXPECT_NEAR(comm, apply_generator(dpi_generator(lam, n, BasisIndex::x(2 * n + 1)), f, t).real(), 1e-14);
  }
  // [X_1, X_2] = 0 for n = 2 (no bracket between X_1 and X_2)
  {
    const auto a = dpi_generator(lam, n, BasisIndex::x(1)), b = dpi_generator(lam, n, BasisIndex::x(2));
    EXPECT_NEAR(compose_fields(a, b, f, t) - compose_fields(b, a, f, t), 0.0, 1e-14);
  }
  // [X_k, Y_k] = Z: d_k(c t_k f) - c t_k d_k f = c f with c = 2 pi i lambda
  const cplx c(0.0, two_pi * lam.value());
  for (int k = 1; k <= 2 * n + 1; ++k) {
    cplx xy = 0.0, yx = 0.0;
    for (const auto& m : dpi_generator(lam, n, BasisIndex::x(k)).terms) {
      const double w = m.constant + (m.coef_axis ? m.coef * t.t(m.coef_axis) : 0.0);
      xy += w * c * ((m.axis == k ? f(t) : 0.0) + t.t(k) * f.partial(t, m.axis));
      yx += c * t.t(k) * w * f.partial(t, m.axis);
    }
    EXPECT_LE(std::abs(xy - yx - apply_generator(dpi_generator(lam, n, BasisIndex::z()), f, t)), 1e-13);
  }
  // [X_j, Y_{2n+1}] = -1/2 Y_{n+j}: only the d/dt_{2n+1} part of X_j acts on t_{2n+1}
  for (int j = 1; j <= 2 * n; ++j) {
    cplx comm = 0.0;
    for (const auto& m : dpi_generator(lam, n, BasisIndex::x(j)).terms)
      if (m.axis == 2 * n + 1) comm += (m.constant + (m.coef_axis ? m.coef * t.t(m.coef_axis) : 0.0)) * c * f(t);
    const int partner = j <= n ? n + j : j - n;
    const double sign = j <= n ? -0.5 : 0.5;
    EXPECT_LE(std::abs(comm - sign * c * t.t(partner) * f(t)), 1e-14);
  }
}

TEST(RepCheck, DefaultsPassForBothSigns) {
  for (double l : {1.0, -2.0}) {
    const CheckReport r = rep_check(1, l, 100, 42);
    EXPECT_TRUE(r.pass) << r.to_json().dump(2);
    EXPECT_LE(r.details["homomorphism_defect"].get<double>(), 1e-10);
  }
}
