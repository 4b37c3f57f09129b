#pragma once

#include "jgmc/common.hpp"

#include <cmath>
#include <limits>
#include <utility>

namespace jgmc {

/// Minimum-cost perfect assignment (Hungarian method, O(n^3)). Returns col[r],
/// the column assigned to row r.
inline std::vector<int> solve_lap_min(const Matrix& cost) {
  if (cost.rows() != cost.cols()) throw InputError("lap: cost matrix must be square");
  if (!cost.allFinite()) throw InputError("lap: non-finite cost");
  const int n = static_cast<int>(cost.rows());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0), minv(n + 1);
  std::vector<int> p(n + 1, 0), way(n + 1, 0);
  std::vector<char> used(n + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= n; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) minv[j] = cur, way[j] = j0;
        if (minv[j] < delta) delta = minv[j], j1 = j;
      }
      for (int j = 0; j <= n; ++j) {
        if (used[j]) u[p[j]] += delta, v[j] -= delta;
        else minv[j] -= delta;
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  std::vector<int> col(n);
  for (int j = 1; j <= n; ++j) col[p[j] - 1] = j - 1;
  return col;
}

/// Permutation maximizing sum X_relaxed(target[j], j).
inline Assignment project_permutation(const Matrix& x_relaxed) {
  if (!x_relaxed.allFinite()) throw InputError("project_permutation: non-finite entries");
  if (x_relaxed.rows() != x_relaxed.cols()) throw InputError("project_permutation: matrix must be square");
  // rows of the LAP are G1 nodes (columns of X)
  return solve_lap_min(-x_relaxed.transpose());
}

/// Repeatedly takes the largest remaining entry; ties go to the smallest (column, row).
inline Assignment greedy_permutation(const Matrix& x_relaxed) {
  if (!x_relaxed.allFinite()) throw InputError("greedy_permutation: non-finite entries");
  const int n = static_cast<int>(x_relaxed.rows());
  Assignment target(n, -1);
  std::vector<char> row_used(n, 0);
  for (int step = 0; step < n; ++step) {
    int bj = -1, bl = -1;
    double best = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
      if (target[j] >= 0) continue;
      for (int l = 0; l < n; ++l)
        if (!row_used[l] && x_relaxed(l, j) > best) best = x_relaxed(l, j), bj = j, bl = l;
    }
    target[bj] = bl;
    row_used[bl] = 1;
  }
  return target;
}

inline constexpr double kTieTolerance = 1e-9;
inline constexpr double kLabelRangeTolerance = 1e-3;

/// Sign threshold of the stacked relaxed labels (y1; y2); |v| <= 1e-9 maps to +1.
inline std::pair<Labels, Labels> threshold_clusters(const Vector& y) {
  if (y.size() % 2 != 0) throw InputError("threshold_clusters: expected 2n entries");
  const auto n = y.size() / 2;
  Labels y1(n), y2(n);
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (!std::isfinite(y(i)) || std::abs(y(i)) > 1.0 + kLabelRangeTolerance)
      throw InputError("threshold_clusters: entry outside [-1, 1]");
    const int s = y(i) < -kTieTolerance ? -1 : 1;
    (i < n ? y1[i] : y2[i - n]) = s;
  }
  return {y1, y2};
}

/// Matched pairs whose labels disagree.
inline int consistency_report(const Assignment& target, const Labels& y1, const Labels& y2) {
  require(target.size() == y1.size() && y1.size() == y2.size(), "consistency_report: size mismatch");
  int bad = 0;
  for (std::size_t j = 0; j < target.size(); ++j)
    if (y1[j] != y2[target[j]]) ++bad;
  return bad;
}

/// Flips y2 when that makes more matched pairs agree; ties keep it.
inline std::pair<Labels, Labels> align_cluster_signs(Labels y1, Labels y2, const Assignment& target) {
  const int n = static_cast<int>(target.size());
  const int disagree = consistency_report(target, y1, y2);
  if (disagree > n - disagree)
    for (int& v : y2) v = -v;
  return {std::move(y1), std::move(y2)};
}

/// Cluster-restricted re-assignment: the LAP on X_relaxed with cross-cluster pairs
/// penalized, so cross matches appear only where cluster sizes differ.
inline Assignment repair_assignment(const Matrix& x_relaxed, const Labels& y1, const Labels& y2) {
  const int n = static_cast<int>(x_relaxed.rows());
  require(static_cast<int>(y1.size()) == n && static_cast<int>(y2.size()) == n, "repair_assignment: size mismatch");
  Matrix w = x_relaxed;
  const double penalty = 2.0 * n * (1.0 + x_relaxed.cwiseAbs().maxCoeff());
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l)
      if (y1[j] != y2[l]) w(l, j) -= penalty;
  return project_permutation(w);
}

}  // namespace jgmc
