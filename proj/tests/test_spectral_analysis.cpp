#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hosc/discretization.hpp"
#include "hosc/eigensolver.hpp"
#include "hosc/spectral_analysis.hpp"
#include "oracles.hpp"

using namespace hosc;

namespace {

std::vector<double> unit(std::size_t n, std::size_t at) {
  std::vector<double> v(n, 0.0);
  v[at] = 1.0;
  return v;
}

std::vector<double> power_law(std::size_t count, double exponent, double scale = 1.0) {
  std::vector<double> v(count);
  for (std::size_t s = 0; s < count; ++s) v[s] = scale * std::pow(static_cast<double>(s + 1), exponent);
  return v;
}

}  // namespace

TEST(BoundaryMass, CentralAndShellPoints) {
  const GridSpec g = GridSpec::uniform(1, 1.0, 19);
  EXPECT_EQ(shell_layers(g, 0, 0.1), 1);
  EXPECT_EQ(boundary_mass(g, unit(g.size(), g.flatten({9, 9, 9})), 0.1), 0.0);
  EXPECT_EQ(boundary_mass(g, unit(g.size(), g.flatten({0, 9, 9})), 0.1), 1.0);
  EXPECT_EQ(boundary_mass(g, unit(g.size(), g.flatten({9, 18, 9})), 0.1), 1.0);
  EXPECT_EQ(boundary_mass(g, unit(g.size(), g.flatten({9, 9, 1})), 0.1), 0.0);
}

TEST(BoundaryMass, UniformVectorCountsShellPoints) {
  const GridSpec g = GridSpec::uniform(1, 1.0, 19);
  const double c = 1.0 / std::sqrt(static_cast<double>(g.size()));
  const std::vector<double> v(g.size(), c);
  const double expected = static_cast<double>(oracle::shell_point_count(19, 1)) / static_cast<double>(g.size());
  EXPECT_NEAR(boundary_mass(g, v, 0.1), expected, 1e-13);
  const double expected2 = static_cast<double>(oracle::shell_point_count(19, 3)) / static_cast<double>(g.size());
  EXPECT_NEAR(boundary_mass(g, v, 0.3), expected2, 1e-13);
}

TEST(BoundaryMass, RejectsBadInput) {
  const GridSpec g = GridSpec::uniform(1, 1.0, 5);
  const auto v = unit(g.size(), 0);
  EXPECT_THROW(boundary_mass(g, v, 0.0), InvalidArgument);
  EXPECT_THROW(boundary_mass(g, v, 1.0), InvalidArgument);
  std::vector<double> w = v;
  w[0] = 2.0;
  EXPECT_THROW(boundary_mass(g, w, 0.1), InvalidArgument);
  EXPECT_THROW(boundary_mass(g, std::vector<double>(3, 0.0), 0.1), DimensionMismatch);
}

TEST(BoundaryMass, FilterMonotoneInThreshold) {
  const std::vector<double> masses{0.0, 1e-6, 5e-5, 2e-4, 0.3, 1e-5};
  std::size_t prev = 0;
  for (double thr : {0.0, 1e-6, 1e-5, 1e-4, 1e-3, 1.0}) {
    const auto idx = accepted_indices(masses, FilterSettings{0.1, thr});
    EXPECT_GE(idx.size(), prev);
    prev = idx.size();
  }
  EXPECT_EQ(accepted_indices(masses, FilterSettings{0.1, 1e-4}), (std::vector<std::size_t>{0, 1, 2, 5}));
}

TEST(Counting, StepFunctionExamples) {
  const std::vector<double> v{1.0, 2.0, 2.0, 3.0};
  EXPECT_EQ(counting_function(v, 0.5), 0u);
  EXPECT_EQ(counting_function(v, 1.0), 1u);
  EXPECT_EQ(counting_function(v, 2.0), 3u);
  EXPECT_EQ(counting_function(v, 2.5), 3u);
  EXPECT_EQ(counting_function(v, 10.0), 4u);
  const auto samples = counting_samples(v);
  // one sample per distinct value
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[1].lambda, 2.0);
  EXPECT_EQ(samples[1].count, 3u);
}

TEST(Fit, SyntheticPowerLawRecovered) {
  const auto v = power_law(80, 2.0 / 9.0, 3.7);
  const FitResult c = fit_counting_exponent(v, FitWindow{10, 0}, 1);
  const FitResult m = fit_eigenvalue_exponent(v, FitWindow{10, 0}, 1);
  EXPECT_NEAR(m.slope, 2.0 / 9.0, 1e-6);
  EXPECT_NEAR(c.slope, 4.5, 1e-6);
  EXPECT_NEAR(c.slope * m.slope, 1.0, 1e-12);
  EXPECT_NEAR(m.r_squared, 1.0, 1e-12);
  EXPECT_EQ(c.reference, 4.5);
  EXPECT_NEAR(m.reference, 2.0 / 9.0, 1e-15);
  EXPECT_EQ(c.count, 70u);
}

TEST(Fit, ProductIsOneForNoisyData) {
  std::mt19937_64 rng(9);
  std::normal_distribution<double> N(0.0, 0.05);
  std::vector<double> v = power_law(100, 0.3);
  for (double& x : v) x *= std::exp(N(rng));
  std::sort(v.begin(), v.end());
  const FitResult c = fit_counting_exponent(v, {}, 1), m = fit_eigenvalue_exponent(v, {}, 1);
  EXPECT_NEAR(c.slope * m.slope, 1.0, 1e-12);
  EXPECT_LT(m.ols_slope * c.ols_slope, 1.0);
}

TEST(Fit, ScaleInvariance) {
  const auto v = power_law(60, 0.25);
  std::vector<double> w = v;
  for (double& x : w) x *= 1234.5;
  EXPECT_NEAR(fit_eigenvalue_exponent(v).slope, fit_eigenvalue_exponent(w).slope, 1e-12);
  EXPECT_NEAR(fit_counting_exponent(v).slope, fit_counting_exponent(w).slope, 1e-11);
}

TEST(Fit, ConstantSpectrumWarns) {
  const std::vector<double> v(40, 2.0);
  const FitResult m = fit_eigenvalue_exponent(v);
  EXPECT_EQ(m.slope, 0.0);
  EXPECT_FALSE(m.warning.empty());
  EXPECT_FALSE(fit_counting_exponent(v).warning.empty());
}

TEST(Fit, WindowSelectsTheRequestedRange) {
  const auto v = power_law(100, 0.5);
  const FitResult f = fit_eigenvalue_exponent(v, FitWindow{5, 30});
  EXPECT_EQ(f.skip, 5u);
  EXPECT_EQ(f.count, 30u);
  EXPECT_EQ(f.lambda_min, v[5]);
  EXPECT_EQ(f.lambda_max, v[34]);
}

TEST(Fit, TooFewValuesRaise) {
  EXPECT_THROW(fit_eigenvalue_exponent(power_law(29, 0.5)), InsufficientData);
  EXPECT_NO_THROW(fit_eigenvalue_exponent(power_law(30, 0.5)));
  EXPECT_THROW(fit_eigenvalue_exponent(power_law(100, 0.5), FitWindow{10, 200}), InsufficientData);
  EXPECT_THROW(fit_eigenvalue_exponent(power_law(40, 0.5), FitWindow{-1, 0}), InvalidArgument);
  std::vector<double> bad = power_law(40, 0.5);
  bad[20] = -1.0;
  EXPECT_THROW(fit_eigenvalue_exponent(bad), InvalidArgument);
}

TEST(GramDefect, Examples) {
  EXPECT_EQ(gram_defect({unit(4, 0), unit(4, 2)}), 0.0);
  EXPECT_NEAR(gram_defect({unit(4, 1), unit(4, 1)}), 1.0, 1e-15);
  std::mt19937_64 rng(10);
  std::normal_distribution<double> N01;
  std::vector<std::vector<double>> vs(8, std::vector<double>(30));
  for (auto& v : vs)
    for (double& x : v) x = N01(rng);
  EXPECT_LE(gram_defect(oracle::gram_schmidt(vs)), 1e-12);
}

TEST(Multiplets, GroupsCloseValues) {
  const std::vector<double> v{1.0, 2.0, 2.0 + 1e-10, 2.0 + 2e-10, 3.0, 4.0, 4.0};
  const auto m = multiplets(v, 1e-8);
  ASSERT_EQ(m.size(), 4u);
  EXPECT_EQ(m[1].first, 1u);
  EXPECT_EQ(m[1].size, 3u);
  EXPECT_EQ(m[3].size, 2u);
}

TEST(Analysis, ReportOnSmallOperator) {
  const GridSpec g = GridSpec::uniform(1, 6.0, 12);
  SolverConfig cfg;
  cfg.k = 40;
  const EigenResult r = smallest_eigenpairs(assemble_oscillator_sos(g), cfg);
  const SpectrumReport rep = analyze_spectrum(g, r, FilterSettings{0.1, 1.0}, FitWindow{10, 0}, "sos");
  EXPECT_EQ(rep.accepted.size(), 40u);
  EXPECT_TRUE(rep.fits_available) << rep.fit_error;
  EXPECT_NEAR(rep.count_fit.slope * rep.mag_fit.slope, 1.0, 1e-12);
  EXPECT_LE(rep.accepted_gram_defect, 1e-8);
  const SpectrumReport strict = analyze_spectrum(g, r, FilterSettings{0.1, 0.0}, FitWindow{10, 0}, "sos");
  EXPECT_LE(strict.accepted.size(), rep.accepted.size());
  const nlohmann::json j = to_json(rep);
  EXPECT_EQ(j["eigenvalues"].size(), 40u);
  std::ostringstream csv;
  write_eigenvalues_csv(csv, rep);
  const std::string text = csv.str();
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 41);
}

TEST(Refinement, IdenticalGridsGiveZeroDifferences) {
  const auto v = power_law(30, 0.5);
  const auto t = refinement_study(std::vector<int>{1, 2}, [&](int) { return v; }, [](int m) { return std::to_string(m); });
  ASSERT_EQ(t.max_difference.size(), 1u);
  EXPECT_EQ(t.max_difference[0], 0.0);
}

TEST(Refinement, LaplacianErrorsShrinkAtSecondOrder) {
  // Dirichlet Laplacian on (0, 1): exact eigenvalues (k pi)^2.
  std::vector<double> exact;
  for (int k = 1; k <= 5; ++k) exact.push_back(std::pow(k * std::numbers::pi, 2));
  auto solve = [](int m) {
    const double h = 1.0 / (m + 1);
    std::vector<double> v;
    for (int k = 1; k <= 5; ++k) v.push_back(oracle::dirichlet_laplacian_eigenvalue(m, k, h));
    return v;
  };
  const auto t = refinement_study(std::vector<int>{31, 63, 127}, solve, [](int m) { return std::to_string(m); }, 5,
                                  exact);
  EXPECT_TRUE(t.differences_decrease());
  for (std::size_t s = 0; s < 5; ++s) {
    const double ratio = t.rows[0].reference_error[s] / t.rows[1].reference_error[s];
    EXPECT_GE(ratio, 3.8);
    EXPECT_LE(ratio, 4.2);
  }
}

TEST(Refinement, TooFewAcceptedValuesRaise) {
  EXPECT_THROW(refinement_study(std::vector<int>{1, 2}, [](int) { return std::vector<double>(5, 1.0); },
                                [](int m) { return std::to_string(m); }),
               InvalidArgument);
}

TEST(Comparison, MaxRelativeGap) {
  const std::vector<double> a{1.0, 2.2, 3.0}, b{1.0, 2.0, 3.3};
  EXPECT_NEAR(max_relative_gap(a, b, 3), 0.1, 1e-15);
  EXPECT_THROW(max_relative_gap(a, b, 4), InvalidArgument);
}
