#pragma once

#include "jgmc/common.hpp"

#include <cmath>

namespace jgmc {

/// tr(X^T X_gt) / tr(1 X_gt). Ground truth entries < 0 mark nodes without a match.
inline double m_acc(const Assignment& target, const Assignment& gt) {
  require(target.size() == gt.size(), "m_acc: size mismatch");
  int hits = 0, total = 0;
  for (std::size_t j = 0; j < gt.size(); ++j) {
    if (gt[j] < 0) continue;
    ++total;
    if (target[j] == gt[j]) ++hits;
  }
  require(total > 0, "m_acc: empty ground truth");
  return static_cast<double>(hits) / total;
}

inline double m_acc(const Matrix& x, const Matrix& x_gt) {
  require(x.rows() == x_gt.rows() && x.cols() == x_gt.cols(), "m_acc: size mismatch");
  const double denom = x_gt.sum();
  require(denom > 0.0, "m_acc: empty ground truth");
  return (x.transpose() * x_gt).trace() / denom;
}

struct PairCounts {
  int tp = 0, fp = 0, fn = 0;
};

/// Over unordered pairs: tp = same/different relation predicted correctly,
/// fp = predicted together but apart in truth, fn = predicted apart but together.
inline PairCounts pair_counts(const Labels& pred, const Labels& gt) {
  require(pred.size() == gt.size(), "pairwise_f_score: size mismatch");
  require(pred.size() >= 2, "pairwise_f_score: need at least 2 nodes");
  PairCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i)
    for (std::size_t j = i + 1; j < pred.size(); ++j) {
      const bool ps = pred[i] == pred[j], gs = gt[i] == gt[j];
      if (ps == gs) ++c.tp;
      else if (ps) ++c.fp;
      else ++c.fn;
    }
  return c;
}

inline double pairwise_f_score(const Labels& pred, const Labels& gt) {
  const auto c = pair_counts(pred, gt);
  const double denom = c.tp + 0.5 * (c.fp + c.fn);
  return denom > 0.0 ? c.tp / denom : 1.0;
}

inline double c_acc(double f1, double f2) { return std::sqrt(f1 * f2); }

inline double mc_acc(double m, double f1, double f2) { return std::cbrt(m * f1 * f2); }

/// vec(X)^T K vec(X) for the assignment matrix X.
inline double lawler_objective(const Matrix& k, const Assignment& target) {
  const auto n = static_cast<Eigen::Index>(target.size());
  require(k.rows() == n * n && k.cols() == n * n, "lawler_objective: size mismatch");
  double v = 0.0;
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index j2 = 0; j2 < n; ++j2) v += k(j * n + target[j], j2 * n + target[j2]);
  return v;
}

inline double lawler_objective(const Matrix& k, const Matrix& x) {
  require(k.rows() == x.size() && k.cols() == x.size(), "lawler_objective: size mismatch");
  const Vector v = vec(x);
  return v.dot(k * v);
}

/// sum_ij W_ij (1 - y_i y_j)
inline double maxcut_objective(const Matrix& w, const Labels& y) {
  require(w.rows() == static_cast<Eigen::Index>(y.size()) && w.cols() == w.rows(), "maxcut_objective: size mismatch");
  double v = 0.0;
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    for (Eigen::Index j = 0; j < w.cols(); ++j) v += w(i, j) * (1.0 - y[i] * y[j]);
  return v;
}

}  // namespace jgmc
