#include "jgmc/kpsvd.hpp"
#include "jgmc/graph.hpp"
#include "jgmc/metrics.hpp"

#include <gtest/gtest.h>

#include <numeric>
#include <random>

using namespace jgmc;

namespace {

Matrix random_matrix(Eigen::Index r, Eigen::Index c, std::mt19937_64& rng) {
  std::normal_distribution<double> g(0.0, 1.0);
  return Matrix::NullaryExpr(r, c, [&] { return g(rng); });
}

Matrix symmetric(std::mt19937_64& rng, Eigen::Index n) {
  const Matrix m = random_matrix(n, n, rng);
  return m + m.transpose();
}

}  // namespace

TEST(Rearrange, KroneckerProductHasRankOne) {
  std::mt19937_64 rng(1);
  const Matrix a = random_matrix(3, 3, rng), b = random_matrix(3, 3, rng);
  const Matrix r = rearrange(kron_from_kb(a, b));
  EXPECT_TRUE(r.isApprox(vec(a) * vec(b).transpose(), 1e-14));
  Eigen::JacobiSVD<Matrix> svd(r);
  EXPECT_LT(svd.singularValues()(1), 1e-12 * svd.singularValues()(0));
}

TEST(Rearrange, IdentityOfOrderFour) {
  const Vector v = vec(Matrix::Identity(2, 2));
  EXPECT_EQ(rearrange(Matrix::Identity(4, 4)), Matrix(v * v.transpose()));
}

TEST(Rearrange, RoundTripIsExact) {
  std::mt19937_64 rng(2);
  const Matrix k = random_matrix(16, 16, rng);
  EXPECT_EQ(inverse_rearrange(rearrange(k)), k);
}

TEST(Rearrange, RejectsNonSquareOrder) {
  EXPECT_THROW(rearrange(Matrix::Zero(5, 5)), InputError);
  EXPECT_THROW(rearrange(Matrix::Zero(4, 9)), InputError);
}

TEST(Kpsvd, SingleTermReconstructsProduct) {
  std::mt19937_64 rng(3);
  const Matrix k = kron_from_kb(random_matrix(4, 4, rng), random_matrix(4, 4, rng));
  const auto r = kpsvd_decompose(k, 1);
  ASSERT_EQ(r.terms.size(), 1u);
  EXPECT_LE((reconstruct(r.terms, 4) - k).norm() / k.norm(), 1e-10);
  EXPECT_NEAR(r.captured_energy, 1.0, 1e-12);
}

TEST(Kpsvd, FullRankReconstruction) {
  std::mt19937_64 rng(4);
  for (int n = 2; n <= 6; ++n) {
    const Matrix k = random_matrix(n * n, n * n, rng);
    const auto r = kpsvd_decompose(k, n * n);
    EXPECT_LE((reconstruct(r.terms, n) - k).norm() / k.norm(), 1e-8);
  }
}

TEST(Kpsvd, TailIdentity) {
  std::mt19937_64 rng(5);
  const int n = 4;
  const Matrix k = random_matrix(n * n, n * n, rng);
  for (int t = 1; t <= n * n; ++t) {
    const auto r = kpsvd_decompose(k, t);
    const double tail = r.singular_values.tail(n * n - t).norm();
    EXPECT_NEAR((reconstruct(r.terms, n) - k).norm(), tail, 1e-8);
    EXPECT_NEAR(r.captured_energy, 1.0 - tail * tail / k.squaredNorm(), 1e-10);
  }
}

TEST(Kpsvd, TermsOrderedAndSignFixed) {
  std::mt19937_64 rng(6);
  const auto r = kpsvd_decompose(random_matrix(9, 9, rng), 9);
  for (std::size_t t = 0; t < r.terms.size(); ++t) {
    if (t) {
      EXPECT_GE(r.terms[t - 1].sigma, r.terms[t].sigma);
    }
    Eigen::Index row = 0, col = 0;
    r.terms[t].a.cwiseAbs().maxCoeff(&row, &col);
    EXPECT_GT(r.terms[t].a(row, col), 0.0);
    EXPECT_NEAR(r.terms[t].a.norm(), std::sqrt(r.terms[t].sigma), 1e-12);
    EXPECT_NEAR(r.terms[t].b.norm(), std::sqrt(r.terms[t].sigma), 1e-12);
  }
}

TEST(Kpsvd, DropsNegligibleTerms) {
  std::mt19937_64 rng(7);
  const Matrix k = kron_from_kb(symmetric(rng, 3), symmetric(rng, 3));
  EXPECT_EQ(kpsvd_decompose(k, 5).terms.size(), 1u);
}

TEST(Kpsvd, RejectsBadInput) {
  EXPECT_THROW(kpsvd_decompose(Matrix::Identity(4, 4), 0), InputError);
  EXPECT_THROW(kpsvd_decompose(Matrix::Identity(4, 4), 5), InputError);
  Matrix bad = Matrix::Identity(4, 4);
  bad(0, 1) = std::nan("");
  EXPECT_THROW(kpsvd_decompose(bad, 1), NumericalError);
}

TEST(Reconstruct, EmptyListIsZero) { EXPECT_EQ(reconstruct({}, 3), Matrix::Zero(9, 9)); }

TEST(Kpsvd, ObjectiveFidelityOverAllPermutations) {
  std::mt19937_64 rng(8);
  for (int n = 2; n <= 5; ++n) {
    const Matrix k = random_matrix(n * n, n * n, rng);
    const auto terms = kpsvd_decompose(k, n * n).terms;
    Assignment p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
      const Matrix x = assignment_matrix(p);
      EXPECT_NEAR(lawler_objective(k, p), kb_objective(terms, x), 1e-8);
    } while (std::next_permutation(p.begin(), p.end()));
  }
}

TEST(Kpsvd, SymmetrizationKeepsObjectiveOnSymmetricAffinity) {
  std::mt19937_64 rng(9);
  Graph g1, g2;
  g1.n = g2.n = 5;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j) {
      g1.edges.push_back({i, j, u(rng)});
      g2.edges.push_back({i, j, u(rng)});
    }
  g1.edges = symmetric_edges(g1.edges);
  g2.edges = symmetric_edges(g2.edges);
  const Matrix k = build_affinity_K(g1, g2, nullptr, [](double a, double b) { return std::exp(-(a - b) * (a - b)); });
  const auto terms = kpsvd_decompose(k, 25).terms;
  const auto sym = symmetrize_terms(terms);
  for (const auto& t : sym) {
    EXPECT_EQ(t.a, t.a.transpose());
    EXPECT_EQ(t.b, t.b.transpose());
  }
  for (int rep = 0; rep < 30; ++rep) {
    Assignment p(5);
    std::iota(p.begin(), p.end(), 0);
    std::shuffle(p.begin(), p.end(), rng);
    const Matrix x = assignment_matrix(p);
    EXPECT_NEAR(kb_objective(terms, x), kb_objective(sym, x), 1e-9);
  }
}
