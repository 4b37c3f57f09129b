#include "jgmc/solver.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

using namespace jgmc;

namespace {

// min <diag(1,-1), Z>  s.t. tr Z = 1, Z psd
ConicProgram min_eigenvalue_program() {
  ProgramBuilder b;
  const int blk = b.add_psd(2);
  b.add_equality({b.entry(blk, 0, 0), b.entry(blk, 1, 1)}, 1.0);
  Matrix g(2, 2);
  g << 1, 0, 0, -1;
  b.add_block_objective(0, blk, g);
  return b.finalize({1.0, 0.0});
}

// min x  s.t. x - t = 3, t >= 0
ConicProgram shifted_lp() {
  ProgramBuilder b;
  const auto x = b.add_free();
  const auto t = b.add_nonneg();
  b.add_equality({ProgramBuilder::scalar(x), ProgramBuilder::scalar(t, -1.0)}, 3.0);
  b.add_objective(0, ProgramBuilder::scalar(x));
  return b.finalize({1.0, 0.0});
}

// min <W, L>  s.t. L_ii = 1, L psd, W the unit-weight triangle
ConicProgram triangle_maxcut() {
  ProgramBuilder b;
  const int blk = b.add_psd(3);
  for (int i = 0; i < 3; ++i) b.add_equality({b.entry(blk, i, i)}, 1.0);
  Matrix w = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  b.add_block_objective(0, blk, w);
  return b.finalize({1.0, 0.0});
}

}  // namespace

TEST(VerifyKkt, HandOptimalPairOfMinEigenvalueProgram) {
  const auto p = min_eigenvalue_program();
  Vector x(3), y(1);
  x << 0, 0, 1;
  y << -1;
  const auto r = verify_kkt(p, x, y);
  EXPECT_LE(r.primal, 1e-9);
  EXPECT_LE(r.dual, 1e-9);
  EXPECT_LE(r.gap, 1e-9);
}

TEST(VerifyKkt, PerturbedPrimalIsDetected) {
  const auto p = min_eigenvalue_program();
  Vector x(3), y(1);
  x << 0.1, 0, 1;
  y << -1;
  EXPECT_GT(verify_kkt(p, x, y).primal, 1e-3);
}

TEST(VerifyKkt, FreeVariablesNeedZeroDualSlack) {
  const auto p = shifted_lp();
  Vector x(2), y(1);
  x << 3, 0;
  y << 1;
  EXPECT_LE(verify_kkt(p, x, y).dual, 1e-12);
  y << 0.5;
  EXPECT_GT(verify_kkt(p, x, y).dual, 0.1);
}

TEST(Solve, MinimumEigenvalueProgram) {
  const auto p = min_eigenvalue_program();
  const auto r = solve(p);
  ASSERT_EQ(r.report.status, SolveStatus::optimal);
  EXPECT_NEAR(r.report.objective, -1.0, 1e-5);
  const auto k = verify_kkt(p, r.x, r.y);
  EXPECT_LE(k.primal, 1e-6);
  EXPECT_LE(k.dual, 1e-6);
  EXPECT_LE(k.gap, 1e-6);
  EXPECT_NEAR(smat(r.x)(1, 1), 1.0, 1e-5);
}

TEST(Solve, ShiftedLinearProgram) {
  const auto p = shifted_lp();
  const auto r = solve(p);
  ASSERT_EQ(r.report.status, SolveStatus::optimal);
  EXPECT_NEAR(r.report.objective, 3.0, 1e-5);
  const auto k = verify_kkt(p, r.x, r.y);
  EXPECT_LE(std::max({k.primal, k.dual, k.gap}), 1e-6);
}

TEST(Solve, EquilateralMaxCutRelaxation) {
  const auto p = triangle_maxcut();
  const auto r = solve(p);
  ASSERT_EQ(r.report.status, SolveStatus::optimal);
  // Relaxed cut value sum W (1 - L) = 6 - <W, L>; L off-diagonals at -1/2 give 9.
  const double relaxed_cut = 6.0 - r.report.objective;
  EXPECT_GE(relaxed_cut, 8.0);
  EXPECT_NEAR(relaxed_cut, 9.0, 1e-4);
  const auto k = verify_kkt(p, r.x, r.y);
  EXPECT_LE(std::max({k.primal, k.dual, k.gap}), 1e-6);
}

TEST(Solve, WeakDualityAndDeterminism) {
  const auto p = triangle_maxcut();
  const auto a = solve(p);
  const auto b = solve(p);
  EXPECT_EQ(a.report.iterations, b.report.iterations);
  EXPECT_EQ((a.x - b.x).norm(), 0.0);
  EXPECT_GE(a.report.objective, a.report.dual_objective - 1e-6 * (1 + std::abs(a.report.objective)));
}

TEST(Solve, DetectsPrimalInfeasibility) {
  // x >= 0 and x = -1
  ProgramBuilder b;
  const auto x = b.add_nonneg();
  b.add_equality({ProgramBuilder::scalar(x)}, -1.0);
  b.add_objective(0, ProgramBuilder::scalar(x));
  const auto r = solve(b.finalize({1.0, 0.0}));
  EXPECT_EQ(r.report.status, SolveStatus::primal_infeasible);
}

TEST(Solve, DetectsUnboundedness) {
  // min -x1 s.t. x1 - x2 = 0, x >= 0
  ProgramBuilder b;
  const auto x1 = b.add_nonneg();
  const auto x2 = b.add_nonneg();
  b.add_equality({ProgramBuilder::scalar(x1), ProgramBuilder::scalar(x2, -1.0)}, 0.0);
  b.add_objective(0, ProgramBuilder::scalar(x1, -1.0));
  const auto r = solve(b.finalize({1.0, 0.0}));
  EXPECT_EQ(r.report.status, SolveStatus::dual_infeasible);
}

TEST(Solve, IterationLogIsCsv) {
  std::ostringstream log;
  SolverSettings s;
  s.log = &log;
  solve(shifted_lp(), s);
  std::istringstream in(log.str());
  std::string line;
  ASSERT_TRUE(std::getline(in, line));
  EXPECT_EQ(std::count(line.begin(), line.end(), ','), 3);
}

TEST(Solve, RejectsBadSettings) {
  SolverSettings s;
  s.alpha = 2.5;
  EXPECT_THROW(solve(shifted_lp(), s), InputError);
}

TEST(Solve, RandomSdpSatisfiesOwnStopRule) {
  // min <C, Z> s.t. <A_i, Z> = b_i with a strictly feasible point Z0 = I.
  std::mt19937_64 rng(7);
  std::normal_distribution<double> g;
  const int m = 5;
  ProgramBuilder b;
  const int blk = b.add_psd(m);
  Matrix c(m, m);
  for (auto& v : c.reshaped()) v = g(rng);
  c = c * c.transpose();  // psd objective keeps the problem bounded
  b.add_block_objective(0, blk, c);
  for (int i = 0; i < 4; ++i) {
    Matrix a(m, m);
    for (auto& v : a.reshaped()) v = g(rng);
    a = 0.5 * (a + a.transpose()).eval();
    std::vector<ProgramBuilder::Term> terms;
    for (int cc = 0; cc < m; ++cc)
      for (int r = cc; r < m; ++r) terms.push_back(b.entry(blk, r, cc, r == cc ? a(r, r) : 2 * a(r, cc)));
    b.add_equality(terms, a.trace());
  }
  const auto p = b.finalize({1.0, 0.0});
  SolverSettings s;
  const auto r = solve(p, s);
  ASSERT_EQ(r.report.status, SolveStatus::optimal);
  const auto k = verify_kkt(p, r.x, r.y);
  EXPECT_LE(k.primal, s.eps_primal);
  EXPECT_LE(k.dual, s.eps_dual);
  EXPECT_LE(k.gap, s.eps_gap);
}
