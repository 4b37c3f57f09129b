#pragma once

#include "jgmc/graph.hpp"

#include <array>
#include <map>

namespace jgmc {

struct Triangle {
  std::array<int, 3> v;
};

namespace detail {

struct Circumcircle {
  long double x, y, r2;
};

inline Circumcircle circumcircle(const std::vector<std::array<long double, 2>>& p, const std::array<int, 3>& t) {
  const auto& a = p[t[0]];
  const auto& b = p[t[1]];
  const auto& c = p[t[2]];
  const long double bx = b[0] - a[0], by = b[1] - a[1];
  const long double cx = c[0] - a[0], cy = c[1] - a[1];
  const long double d = 2.0L * (bx * cy - by * cx);
  const long double b2 = bx * bx + by * by, c2 = cx * cx + cy * cy;
  const long double ux = (cy * b2 - by * c2) / d;
  const long double uy = (bx * c2 - cx * b2) / d;
  return {a[0] + ux, a[1] + uy, ux * ux + uy * uy};
}

}  // namespace detail

/// Bowyer-Watson triangulation of 2D points (columns of a 2 x n matrix).
/// Rejects fewer than three points, duplicates and all-collinear input.
inline std::vector<Triangle> delaunay_triangles(const Matrix& points) {
  require(points.rows() == 2, "delaunay_2d: points must be 2D");
  const int n = static_cast<int>(points.cols());
  if (n < 3) throw InputError("delaunay_2d: need at least 3 points");
  require(points.allFinite(), "delaunay_2d: non-finite point");
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if ((points.col(i) - points.col(j)).norm() == 0.0) throw InputError("delaunay_2d: duplicate points");

  // Work in a normalized frame so the in-circle tolerance is scale free.
  const Eigen::Vector2d lo = points.rowwise().minCoeff();
  const Eigen::Vector2d hi = points.rowwise().maxCoeff();
  const double extent = std::max((hi - lo).maxCoeff(), 1e-300);
  std::vector<std::array<long double, 2>> p(n + 3);
  for (int i = 0; i < n; ++i)
    p[i] = {static_cast<long double>((points(0, i) - lo(0)) / extent),
            static_cast<long double>((points(1, i) - lo(1)) / extent)};
  p[n] = {-1e3L, -1e3L};
  p[n + 1] = {1e3L, -1e3L};
  p[n + 2] = {0.5L, 1e3L};

  struct Live {
    std::array<int, 3> v;
    detail::Circumcircle cc;
  };
  std::vector<Live> tris{{{n, n + 1, n + 2}, detail::circumcircle(p, {n, n + 1, n + 2})}};
  constexpr long double eps = 1e-12L;

  for (int i = 0; i < n; ++i) {
    std::vector<Live> keep;
    std::map<std::pair<int, int>, int> boundary;
    for (const auto& t : tris) {
      const long double dx = p[i][0] - t.cc.x, dy = p[i][1] - t.cc.y;
      if (dx * dx + dy * dy < t.cc.r2 * (1.0L - eps)) {
        for (int e = 0; e < 3; ++e) {
          const auto key = std::minmax(t.v[e], t.v[(e + 1) % 3]);
          ++boundary[{key.first, key.second}];
        }
      } else {
        keep.push_back(t);
      }
    }
    for (const auto& [edge, count] : boundary) {
      if (count != 1) continue;
      const std::array<int, 3> v{edge.first, edge.second, i};
      const long double area = (p[v[1]][0] - p[v[0]][0]) * (p[v[2]][1] - p[v[0]][1]) -
                               (p[v[1]][1] - p[v[0]][1]) * (p[v[2]][0] - p[v[0]][0]);
      if (area == 0.0L) continue;
      keep.push_back({v, detail::circumcircle(p, v)});
    }
    tris = std::move(keep);
  }

  std::vector<Triangle> out;
  for (const auto& t : tris) {
    if (t.v[0] >= n || t.v[1] >= n || t.v[2] >= n) continue;
    const long double area = (p[t.v[1]][0] - p[t.v[0]][0]) * (p[t.v[2]][1] - p[t.v[0]][1]) -
                             (p[t.v[1]][1] - p[t.v[0]][1]) * (p[t.v[2]][0] - p[t.v[0]][0]);
    if (std::abs(area) < 1e-14L) continue;
    out.push_back({t.v});
  }
  if (out.empty()) throw InputError("delaunay_2d: degenerate (collinear) input");
  return out;
}

/// Delaunay edges (both orientations) weighted by Euclidean length.
inline std::vector<Edge> delaunay_2d(const Matrix& points) {
  std::vector<Edge> pairs;
  for (const auto& t : delaunay_triangles(points)) {
    for (int e = 0; e < 3; ++e) {
      const int a = t.v[e], b = t.v[(e + 1) % 3];
      pairs.push_back({a, b, (points.col(a) - points.col(b)).norm()});
    }
  }
  return symmetric_edges(pairs);
}

}  // namespace jgmc
