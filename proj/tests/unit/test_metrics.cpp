#include "jgmc/graph.hpp"
#include "jgmc/metrics.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace jgmc;

TEST(MatchAccuracy, WorkedExamples) {
  EXPECT_EQ(m_acc(Assignment{0, 1, 2}, Assignment{0, 1, 2}), 1.0);
  EXPECT_EQ(m_acc(Assignment{0, 1, 2}, Assignment{1, 2, 0}), 0.0);
  EXPECT_EQ(m_acc(Assignment{0, 1, 2, 3}, Assignment{0, 1, 3, 2}), 0.5);
}

TEST(MatchAccuracy, MatrixFormAgrees) {
  const Assignment a{0, 1, 2, 3}, b{0, 1, 3, 2};
  EXPECT_EQ(m_acc(assignment_matrix(a), assignment_matrix(b)), 0.5);
  EXPECT_EQ(m_acc(assignment_matrix(a), assignment_matrix(a)), 1.0);
}

TEST(MatchAccuracy, UnmatchedGroundTruthIgnored) {
  EXPECT_EQ(m_acc(Assignment{0, 1, 2}, Assignment{0, -1, 1}), 0.5);
  EXPECT_THROW(m_acc(Assignment{0}, Assignment{-1}), InputError);
  EXPECT_THROW(m_acc(Assignment{0, 1}, Assignment{0}), InputError);
}

TEST(FScore, WorkedExamples) {
  EXPECT_EQ(pairwise_f_score({1, 1, -1, -1}, {1, 1, -1, -1}), 1.0);
  EXPECT_EQ(pairwise_f_score({1, 1, 1, -1}, {1, 1, -1, -1}), 2.0 / 3.0);
  EXPECT_EQ(pairwise_f_score({-1, -1, 1, 1}, {1, 1, -1, -1}), 1.0);
}

TEST(FScore, PairCounts) {
  const auto c = pair_counts({1, 1, 1, -1}, {1, 1, -1, -1});
  EXPECT_EQ(c.tp, 3);
  EXPECT_EQ(c.fp, 2);
  EXPECT_EQ(c.fn, 1);
  EXPECT_THROW(pairwise_f_score({1}, {1}), InputError);
}

TEST(CombinedScores, WorkedExamples) {
  EXPECT_EQ(c_acc(1, 1), 1.0);
  EXPECT_EQ(c_acc(0, 1), 0.0);
  EXPECT_EQ(c_acc(0.64, 0.25), 0.4);
  EXPECT_EQ(mc_acc(1, 1, 1), 1.0);
  EXPECT_EQ(mc_acc(0, 0.7, 0.3), 0.0);
  EXPECT_EQ(mc_acc(0.5, 0.5, 0.5), 0.5);
}

TEST(CombinedScores, BetweenMinAndMax) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int rep = 0; rep < 100; ++rep) {
    const double m = u(rng), f1 = u(rng), f2 = u(rng);
    const double v = mc_acc(m, f1, f2);
    EXPECT_LE(v, std::max({m, f1, f2}) + 1e-15);
    EXPECT_GE(v, std::min({m, f1, f2}) - 1e-15);
  }
}

TEST(Lawler, IdentityMatchesTrace) {
  std::mt19937_64 rng(2);
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix a = Matrix::NullaryExpr(3, 3, [&] { return g(rng); }), b = Matrix::NullaryExpr(3, 3, [&] { return g(rng); });
  const Matrix k = kron_from_kb(a, b);
  EXPECT_NEAR(lawler_objective(k, Assignment{0, 1, 2}), (a.transpose() * b).trace(), 1e-12);
  const Assignment p{2, 0, 1};
  EXPECT_NEAR(lawler_objective(k, p), lawler_objective(k, assignment_matrix(p)), 1e-12);
}

TEST(MaxCut, WorkedExamples) {
  const Matrix tri = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  EXPECT_EQ(maxcut_objective(tri, {1, 1, 1}), 0.0);
  EXPECT_EQ(maxcut_objective(tri, {1, -1, -1}), 8.0);
  EXPECT_THROW(maxcut_objective(tri, {1, 1}), InputError);
}
