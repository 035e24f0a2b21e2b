#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "hosc/discretization.hpp"
#include "hosc/vector_ops.hpp"
#include "consistency.hpp"
#include "oracles.hpp"

using namespace hosc;
using testsupport::interior_consistency_error;
using testsupport::sample_gaussian;

namespace {

std::vector<double> random_vector(std::size_t n, std::mt19937_64& rng) {
  std::normal_distribution<double> N01;
  std::vector<double> v(n);
  for (double& x : v) x = N01(rng);
  return v;
}

}  // namespace

TEST(Grid, ValidationAndIndexing) {
  EXPECT_THROW(GridSpec::uniform(1, 6.0, 2), InvalidArgument);
  EXPECT_THROW(GridSpec::uniform(1, -1.0, 8), InvalidArgument);
  EXPECT_THROW((GridSpec{1, {6.0, 6.0}, {8, 8}}).validate(), InvalidArgument);
  const GridSpec g{1, {1.0, 2.0, 3.0}, {3, 4, 5}};
  g.validate();
  EXPECT_DOUBLE_EQ(g.spacing(1), 4.0 / 5.0);
  EXPECT_DOUBLE_EQ(g.coordinate(0, 0), -0.5);
  EXPECT_DOUBLE_EQ(g.coordinate(0, 2), 0.5);
  EXPECT_EQ(g.size(), 60u);
  for (std::size_t p = 0; p < g.size(); ++p) EXPECT_EQ(g.flatten(g.unflatten(p)), p);
  EXPECT_EQ(g.stride(2), 12u);
}

TEST(Grid, JsonRoundTrip) {
  const GridSpec g{1, {1.0, 2.0, 3.0}, {3, 4, 5}};
  nlohmann::json j = g;
  EXPECT_EQ(j.get<GridSpec>(), g);
}

TEST(VectorField, RejectsNonFirstStratumGenerators) {
  const GridSpec g = GridSpec::uniform(1, 6.0, 6);
  EXPECT_THROW(assemble_vector_field(g, BasisIndex::x(3)), InvalidArgument);
  EXPECT_THROW(assemble_vector_field(g, BasisIndex::y(1)), InvalidArgument);
  EXPECT_NO_THROW(assemble_vector_field(g, BasisIndex::x(2)));
}

TEST(VectorField, CentredDifferenceIsSecondOrder) {
  // D_1 applied to a Gaussian vs the exact X_1 f = f_1 - t2/2 f_3, deep interior.
  auto error = [](int m) {
    const GridSpec g = GridSpec::uniform(1, 6.0, m);
    const CsrMatrix D = assemble_vector_field(g, BasisIndex::x(1)).op;
    const std::vector<double> f = sample_gaussian(g);
    const std::vector<double> Df = D * f;
    double worst = 0.0;
    for (std::size_t p = 0; p < g.size(); ++p) {
      const auto idx = g.unflatten(p);
      double t[3], u[3];
      bool deep = true;
      for (int a = 0; a < 3; ++a) {
        t[a] = g.coordinate(a, idx[static_cast<std::size_t>(a)]);
        u[a] = t[a] - testsupport::kGaussCentre[a];
        deep = deep && std::abs(t[a]) <= 3.0;
      }
      if (!deep) continue;
      const double fv = f[p];
      const double exact = -2 * testsupport::kGaussWidth[0] * u[0] * fv - 0.5 * t[1] * (-2 * testsupport::kGaussWidth[2] * u[2] * fv);
      worst = std::max(worst, std::abs(Df[p] - exact));
    }
    return worst;
  };
  const double ratio = error(47) / error(95);  // h = 1/4 and 1/8
  EXPECT_GE(ratio, 3.5);
  EXPECT_LE(ratio, 4.5);
}

TEST(Assembly, SosEqualsSumOfDtDPlusPotential) {
  const GridSpec g{1, {2.0, 3.0, 4.0}, {5, 6, 7}};
  const SparseSymmetricMatrix Q = assemble_oscillator_sos(g);
  std::mt19937_64 rng(1);
  const std::vector<double> v = random_vector(g.size(), rng);
  std::vector<double> ref(g.size(), 0.0);
  for (int j = 1; j <= 2; ++j) {
    const CsrMatrix D = assemble_vector_field(g, BasisIndex::x(j), DifferenceScheme::forward).op;
    const std::vector<double> DtDv = D.transpose() * (D * v);
    for (std::size_t i = 0; i < ref.size(); ++i) ref[i] += DtDv[i];
  }
  for (std::size_t p = 0; p < g.size(); ++p) ref[p] += potential(g, g.unflatten(p)) * v[p];
  const std::vector<double> Qv = Q * v;
  for (std::size_t i = 0; i < ref.size(); ++i) EXPECT_NEAR(Qv[i], ref[i], 1e-11 * (1.0 + std::abs(ref[i])));
}

class BothAssemblies : public ::testing::TestWithParam<Assembly> {};

TEST_P(BothAssemblies, ExactlySymmetric) {
  for (int m : {6, 11}) {
    const GridSpec g = GridSpec::uniform(1, 6.0, m);
    EXPECT_EQ(assemble_oscillator(g, GetParam()).csr().symmetry_defect(), 0.0);
  }
  const GridSpec g2 = GridSpec::uniform(2, 3.0, 4);
  EXPECT_EQ(assemble_oscillator(g2, GetParam()).csr().symmetry_defect(), 0.0);
}

TEST_P(BothAssemblies, RowSparsityWithinBound) {
  for (int n : {1, 2}) {
    const GridSpec g = GridSpec::uniform(n, 3.0, 5);
    const auto A = assemble_oscillator(g, GetParam());
    const std::size_t bound =
        GetParam() == Assembly::sos ? sos_row_nnz_bound(n, DifferenceScheme::forward) : expanded_row_nnz_bound(n);
    EXPECT_LE(A.csr().max_row_nnz(), bound);
  }
}

TEST_P(BothAssemblies, GaussianConsistencyIsSecondOrder) {
  const GridSpec coarse = GridSpec::uniform(1, 6.0, 24), fine = GridSpec::uniform(1, 6.0, 48);
  const double e1 = interior_consistency_error(coarse, assemble_oscillator(coarse, GetParam()));
  const double e2 = interior_consistency_error(fine, assemble_oscillator(fine, GetParam()));
  EXPECT_GE(e1 / e2, 3.2);
  EXPECT_LE(e1 / e2, 4.8);
}

INSTANTIATE_TEST_SUITE_P(Kind, BothAssemblies, ::testing::Values(Assembly::sos, Assembly::expanded),
                         [](const auto& info) { return to_string(info.param); });

TEST(Assembly, SosIsPositiveSemidefiniteOnProbes) {
  std::mt19937_64 rng(2);
  for (auto scheme : {DifferenceScheme::forward, DifferenceScheme::centered}) {
    const GridSpec g = GridSpec::uniform(1, 6.0, 12);
    const SparseSymmetricMatrix Q = assemble_oscillator_sos(g, scheme);
    for (int i = 0; i < 50; ++i) {
      const std::vector<double> v = random_vector(g.size(), rng);
      EXPECT_GE(dot(v, Q * v), -1e-12 * dot(v, v));
    }
  }
}

TEST(Assembly, CentredSosUsesWiderStencil) {
  const GridSpec g = GridSpec::uniform(1, 6.0, 9);
  const auto A = assemble_oscillator_sos(g, DifferenceScheme::centered);
  EXPECT_LE(A.csr().max_row_nnz(), sos_row_nnz_bound(1, DifferenceScheme::centered));
  EXPECT_GT(A.csr().max_row_nnz(), sos_row_nnz_bound(1, DifferenceScheme::forward));
}

TEST(Assembly, CrossTermSignsAreRelatedByReflection) {
  // t_3 -> -t_3 maps one sign convention onto the other on a symmetric grid.
  const GridSpec g = GridSpec::uniform(1, 4.0, 7);
  const CsrMatrix a = assemble_oscillator_expanded(g, CrossTermSign::sum_of_squares).csr();
  const CsrMatrix b = assemble_oscillator_expanded(g, CrossTermSign::printed_display).csr();
  auto flip = [&](std::size_t p) {
    auto idx = g.unflatten(p);
    idx[2] = g.points[2] - 1 - idx[2];
    return g.flatten(idx);
  };
  double worst = 0.0, differ = 0.0;
  for (std::size_t r = 0; r < g.size(); ++r)
    for (std::size_t k = a.row_ptr()[r]; k < a.row_ptr()[r + 1]; ++k) {
      const std::size_t c = a.col_index()[k];
      worst = std::max(worst, std::abs(a.values()[k] - b.at(flip(r), flip(c))));
      differ = std::max(differ, std::abs(a.values()[k] - b.at(r, c)));
    }
  EXPECT_LE(worst, 1e-13);
  EXPECT_GT(differ, 0.1);
}

TEST(Assembly, CentredSchemeDecouplesParityClasses) {
  // Products of centred differences only reach even index-sum shifts.
  const GridSpec g = GridSpec::uniform(1, 4.0, 7);
  auto crossings = [&](DifferenceScheme s) {
    const CsrMatrix A = assemble_oscillator_sos(g, s).csr();
    std::size_t count = 0;
    for (std::size_t r = 0; r < g.size(); ++r)
      for (std::size_t k = A.row_ptr()[r]; k < A.row_ptr()[r + 1]; ++k) {
        const auto a = g.unflatten(r), b = g.unflatten(A.col_index()[k]);
        if ((a[0] + a[1] + a[2] + b[0] + b[1] + b[2]) % 2 != 0) ++count;
      }
    return count;
  };
  EXPECT_EQ(crossings(DifferenceScheme::centered), 0u);
  EXPECT_GT(crossings(DifferenceScheme::forward), 0u);
}

TEST(Assembly, InvalidGridRejectedBeforeWork) {
  GridSpec g = GridSpec::uniform(1, 6.0, 8);
  g.points[1] = 2;
  EXPECT_THROW(assemble_oscillator_sos(g), InvalidArgument);
  EXPECT_THROW(assemble_oscillator_expanded(g), InvalidArgument);
}

TEST(MatrixMarket, RoundTripIsExact) {
  const GridSpec g = GridSpec::uniform(1, 6.0, 5);
  const SparseSymmetricMatrix A = assemble_oscillator_expanded(g);
  std::stringstream ss;
  write_matrix_market(ss, A);
  const SparseSymmetricMatrix B = read_matrix_market(ss);
  ASSERT_EQ(B.dim(), A.dim());
  ASSERT_EQ(B.csr().nnz(), A.csr().nnz());
  for (std::size_t i = 0; i < A.csr().nnz(); ++i) {
    EXPECT_EQ(B.csr().values()[i], A.csr().values()[i]);
    EXPECT_EQ(B.csr().col_index()[i], A.csr().col_index()[i]);
  }
}

TEST(Sparse, TripletsSumDuplicatesAndDropZeros) {
  const CsrMatrix m = CsrMatrix::from_triplets(2, 2, {{0, 0, 1.0}, {0, 0, 2.0}, {1, 0, 1.0}, {1, 0, -1.0}, {1, 1, 5.0}});
  EXPECT_EQ(m.nnz(), 2u);
  EXPECT_EQ(m.at(0, 0), 3.0);
  EXPECT_EQ(m.at(1, 0), 0.0);
  EXPECT_THROW(SparseSymmetricMatrix(CsrMatrix::from_triplets(2, 2, {{0, 1, 1.0}})), InvalidArgument);
  EXPECT_THROW(CsrMatrix::from_triplets(2, 2, {{2, 0, 1.0}}), DimensionMismatch);
}
