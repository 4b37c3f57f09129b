#pragma once

#include "jgmc/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <utility>

namespace jgmc {

struct Edge {
  int src = 0;
  int dst = 0;
  double weight = 1.0;

  friend bool operator==(const Edge&, const Edge&) = default;
};

/// Weighted graph. Undirected graphs keep both orientations of every edge.
struct Graph {
  int n = 0;
  bool directed = false;
  std::optional<Matrix> coords;  // dim x n, one point per column
  std::vector<Edge> edges;
  std::optional<Labels> gt_cluster;
  std::optional<Assignment> gt_match;

  int dim() const { return coords ? static_cast<int>(coords->rows()) : 0; }

  void validate() const {
    require(n > 0, "graph: node count must be positive");
    if (coords) {
      require(coords->cols() == n, "graph: coords must have one point per node");
      require(coords->rows() == 2 || coords->rows() == 3, "graph: coords must be 2D or 3D");
      require(coords->allFinite(), "graph: coords must be finite");
    }
    std::set<std::pair<int, int>> seen;
    for (const auto& e : edges) {
      require(e.src >= 0 && e.src < n && e.dst >= 0 && e.dst < n, "graph: edge endpoint out of range");
      require(e.src != e.dst, "graph: self-loops are not allowed");
      require(std::isfinite(e.weight) && e.weight >= 0.0, "graph: edge weights must be finite and >= 0");
      seen.emplace(e.src, e.dst);
    }
    if (!directed) {
      for (const auto& [s, d] : seen) require(seen.count({d, s}) > 0, "graph: undirected edge set is not symmetric");
    }
    if (gt_cluster) {
      require(static_cast<int>(gt_cluster->size()) == n, "graph: gt_cluster size mismatch");
      for (int l : *gt_cluster) require(l == 1 || l == -1, "graph: gt_cluster labels must be +-1");
    }
    if (gt_match) {
      require(static_cast<int>(gt_match->size()) == n && is_permutation(*gt_match),
              "graph: gt_match must be a permutation of size n");
    }
  }
};

/// Builds an undirected edge list holding both orientations from unordered pairs.
inline std::vector<Edge> symmetric_edges(const std::vector<Edge>& undirected) {
  std::set<std::pair<int, int>> seen;
  std::vector<Edge> out;
  for (const auto& e : undirected) {
    const auto key = std::minmax(e.src, e.dst);
    if (!seen.insert(key).second) continue;
    out.push_back({key.first, key.second, e.weight});
    out.push_back({key.second, key.first, e.weight});
  }
  return out;
}

inline Matrix build_adjacency(const Graph& g) {
  Matrix a = Matrix::Zero(g.n, g.n);
  for (const auto& e : g.edges) a(e.src, e.dst) = e.weight;
  return a;
}

/// Pairwise Euclidean distances between points stored as columns.
inline Matrix pairwise_distances(const Matrix& points) {
  const auto n = points.cols();
  Matrix w = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = i + 1; j < n; ++j) w(i, j) = w(j, i) = (points.col(i) - points.col(j)).norm();
  return w;
}

inline Matrix intra_affinity(const Graph& g) {
  if (!g.coords) throw InputError("intra_affinity: graph has no coordinates");
  return pairwise_distances(*g.coords);
}

inline double cmu_edge_affinity(double e1, double e2) {
  const double d = e1 - e2;
  return std::exp(-d * d / 2500.0);
}

using NodeAffinity = std::function<double(int, int)>;
using EdgeAffinity = std::function<double(double, double)>;

/// Lawler affinity. Pair (i1 of g1, i2 of g2) has index i1 * n + i2, which is the
/// column-major position of X(i2, i1).
inline Matrix build_affinity_K(const Graph& g1, const Graph& g2, const NodeAffinity& node_aff,
                               const EdgeAffinity& edge_aff) {
  if (g1.n != g2.n) throw InputError("build_affinity_K: graphs differ in size");
  const int n = g1.n;
  const int nn = n * n;
  Matrix k = Matrix::Zero(nn, nn);
  if (node_aff) {
    for (int i1 = 0; i1 < n; ++i1)
      for (int i2 = 0; i2 < n; ++i2) k(i1 * n + i2, i1 * n + i2) = node_aff(i1, i2);
  }
  for (const auto& e1 : g1.edges) {
    for (const auto& e2 : g2.edges) {
      k(e1.src * n + e2.src, e1.dst * n + e2.dst) = edge_aff(e1.weight, e2.weight);
    }
  }
  return 0.5 * (k + k.transpose());
}

/// K = A (x) B, so that vec(X)^T K vec(X) = tr(A^T X^T B X).
inline Matrix kron_from_kb(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw InputError("kron_from_kb: A and B must be square and of equal size");
  const auto n = a.rows();
  Matrix k(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) = a(i, j) * b;
  return k;
}

/// Symmetrized k-nearest-neighbour edges (both orientations), Euclidean weights.
inline std::vector<Edge> knn_edges(const Matrix& points, int k) {
  const int n = static_cast<int>(points.cols());
  if (k <= 0) throw InputError("knn_edges: k must be positive");
  if (k >= n) throw InputError("knn_edges: k must be smaller than the point count");
  const Matrix dist = pairwise_distances(points);
  std::vector<Edge> pairs;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) order[j] = j;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist(i, a) < dist(i, b); });
    int taken = 0;
    for (int j : order) {
      if (j == i) continue;
      pairs.push_back({i, j, dist(i, j)});
      if (++taken == k) break;
    }
  }
  return symmetric_edges(pairs);
}

}  // namespace jgmc
