#pragma once

#include "jgmc/metrics.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <random>
#include <type_traits>

namespace jgmc {

struct JointSolution {
  Assignment target;
  Labels y1, y2;
  double value = 0.0;
};

struct CutSolution {
  Labels y;
  double value = 0.0;
};

inline constexpr int kJointOracleCap = 7;
inline constexpr int kCutOracleCap = 16;

/// Exhaustive maximizer of score(perm) + cut_weight * (cut(W1, y1) + cut(W2, y2)) over
/// permutations and labelings with matched nodes in the same cluster. Labelings are
/// enumerated with y1_0 = +1 (the objective is invariant under a global flip). Ties keep
/// the lexicographically first permutation and labeling.
template <class Score>
  requires std::is_convertible_v<std::invoke_result_t<Score&, const Assignment&>, double>
JointSolution brute_force_joint(Score&& score, const Matrix& w1, const Matrix& w2, double cut_weight = 1.0) {
  const int n = static_cast<int>(w1.rows());
  require(n >= 1, "brute_force_joint: empty instance");
  if (n > kJointOracleCap) throw InputError("brute_force_joint: n exceeds the oracle cap of 7");
  require(w2.rows() == n && w1.cols() == n && w2.cols() == n, "brute_force_joint: size mismatch");
  JointSolution best;
  best.value = -std::numeric_limits<double>::infinity();
  Assignment perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  Labels y1(n), y2(n);
  do {
    const double s = score(perm);
    for (int mask = 0; mask < (1 << (n - 1)); ++mask) {
      y1[0] = 1;
      for (int i = 1; i < n; ++i) y1[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
      for (int j = 0; j < n; ++j) y2[perm[j]] = y1[j];
      const double v = s + cut_weight * (maxcut_objective(w1, y1) + maxcut_objective(w2, y2));
      if (v > best.value) best = {perm, y1, y2, v};
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Lawler-form joint problem: max x^T K x + cut(W1, y1) + cut(W2, y2).
inline JointSolution brute_force_joint(const Matrix& k, const Matrix& w1, const Matrix& w2) {
  const auto n = w1.rows();
  require(k.rows() == n * n && k.cols() == n * n, "brute_force_joint: K must be n^2 x n^2");
  return brute_force_joint([&](const Assignment& p) { return lawler_objective(k, p); }, w1, w2);
}

/// Exhaustive MAX CUT with y_0 = +1.
inline CutSolution brute_force_maxcut(const Matrix& w) {
  const int n = static_cast<int>(w.rows());
  require(n >= 1 && w.cols() == n, "brute_force_maxcut: W must be square and nonempty");
  if (n > kCutOracleCap) throw InputError("brute_force_maxcut: n exceeds the oracle cap of 16");
  CutSolution best;
  best.value = -std::numeric_limits<double>::infinity();
  Labels y(n);
  for (long mask = 0; mask < (1L << (n - 1)); ++mask) {
    y[0] = 1;
    for (int i = 1; i < n; ++i) y[i] = (mask >> (i - 1)) & 1 ? -1 : 1;
    const double v = maxcut_objective(w, y);
    if (v > best.value) best = {y, v};
  }
  return best;
}

/// Exhaustive linear assignment, maximizing sum X(target[j], j).
inline Assignment brute_force_assignment(const Matrix& x) {
  const int n = static_cast<int>(x.rows());
  require(n <= 9, "brute_force_assignment: n too large");
  Assignment perm(n), best;
  std::iota(perm.begin(), perm.end(), 0);
  double bv = -std::numeric_limits<double>::infinity();
  do {
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += x(perm[j], j);
    if (v > bv) bv = v, best = perm;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

/// Leading eigenvector of K by power iteration, then greedy conflict-free
/// discretization (largest entry first, ties to the lowest pair index).
inline Assignment spectral_matching_baseline(const Matrix& k, int max_iters = 5000, double tol = 1e-12) {
  const auto m = k.rows();
  require(k.cols() == m, "spectral_matching: K must be square");
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(m))));
  require(n * n == m && n >= 1, "spectral_matching: K must be n^2 x n^2");
  if (!k.allFinite()) throw NumericalError("spectral_matching: non-finite affinity");
  Vector v = Vector::Constant(m, 1.0 / std::sqrt(static_cast<double>(m)));
  for (int it = 0; it < max_iters; ++it) {
    Vector next = k * v;
    const double norm = next.norm();
    if (norm == 0.0) break;
    next /= norm;
    const double change = (next - v).norm();
    v = next;
    if (change < tol) break;
  }
  if (v.sum() < 0.0) v = -v;
  const double scale = v.cwiseAbs().maxCoeff();
  const double eps = 1e-9 * (scale > 0.0 ? scale : 1.0);
  Assignment target(n, -1);
  std::vector<char> used(n, 0);
  for (Eigen::Index step = 0; step < n; ++step) {
    Eigen::Index bj = -1, bl = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (Eigen::Index j = 0; j < n; ++j) {
      if (target[j] >= 0) continue;
      for (Eigen::Index l = 0; l < n; ++l)
        if (!used[l] && v(j * n + l) > best + eps) best = v(j * n + l), bj = j, bl = l;
    }
    target[bj] = static_cast<int>(bl);
    used[bl] = 1;
  }
  return target;
}

/// 2-means on the columns of `coords` with farthest-point seeding; the best of
/// `restarts` runs by inertia. Node 0 is labelled +1.
inline Labels kmeans2_baseline(const Matrix& coords, std::uint64_t seed = 0, int restarts = 50) {
  const auto n = coords.cols();
  require(n >= 1, "kmeans2: no points");
  require(restarts >= 1, "kmeans2: restarts must be positive");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
  Labels best(n, 1);
  double best_inertia = std::numeric_limits<double>::infinity();
  for (int r = 0; r < restarts; ++r) {
    const Eigen::Index first = r == 0 ? 0 : pick(rng);
    Eigen::Index second = first;
    double far = -1.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double dist = (coords.col(i) - coords.col(first)).squaredNorm();
      if (dist > far) far = dist, second = i;
    }
    Vector c0 = coords.col(first), c1 = coords.col(second);
    std::vector<int> assign(n, 0);
    for (int it = 0; it < 100; ++it) {
      bool changed = false;
      for (Eigen::Index i = 0; i < n; ++i) {
        const int a = (coords.col(i) - c1).squaredNorm() < (coords.col(i) - c0).squaredNorm() ? 1 : 0;
        if (a != assign[i]) assign[i] = a, changed = true;
      }
      Vector s0 = Vector::Zero(coords.rows()), s1 = s0;
      int n0 = 0, n1 = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        if (assign[i]) s1 += coords.col(i), ++n1;
        else s0 += coords.col(i), ++n0;
      }
      if (n0) c0 = s0 / n0;
      if (n1) c1 = s1 / n1;
      if (!changed && it > 0) break;
    }
    double inertia = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) inertia += (coords.col(i) - (assign[i] ? c1 : c0)).squaredNorm();
    if (inertia < best_inertia - 1e-12) {
      best_inertia = inertia;
      for (Eigen::Index i = 0; i < n; ++i) best[i] = assign[i] == assign[0] ? 1 : -1;
    }
  }
  return best;
}

}  // namespace jgmc
