#pragma once

#include "jgmc/common.hpp"

#include <Eigen/SVD>
#include <algorithm>

namespace jgmc {

/// HOPE embedding with points as columns: P (source roles) and Q (target roles), both d x n.
struct EmbeddingPair {
  Matrix p;
  Matrix q;
  int d = 0;
  Vector sigma;  // the d singular values used
};

/// Common-neighbour proximity S = A^2.
inline Matrix common_neighbour_similarity(const Matrix& a) {
  if (a.rows() != a.cols()) throw InputError("common_neighbour_similarity: matrix must be square");
  return a * a;
}

inline Vector similarity_spectrum(const Matrix& a) {
  return Eigen::JacobiSVD<Matrix>(common_neighbour_similarity(a)).singularValues();
}

/// Rank-d HOPE factorization of S = A^2: column j of P is (sqrt(s_t) u_t[j])_t, Q likewise
/// from the right singular vectors, so P^T Q is the best rank-d approximation of S.
inline EmbeddingPair hope(const Matrix& a, int d) {
  const Matrix s = common_neighbour_similarity(a);
  const auto n = s.rows();
  if (d < 1 || d > n) throw InputError("hope: embedding dimension must be in [1, n]");
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  EmbeddingPair e;
  e.d = d;
  e.sigma = svd.singularValues().head(d);
  e.p.resize(d, n);
  e.q.resize(d, n);
  for (int t = 0; t < d; ++t) {
    Vector u = svd.matrixU().col(t);
    Vector v = svd.matrixV().col(t);
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) u = -u, v = -v;
    const double root = std::sqrt(e.sigma(t));
    e.p.row(t) = root * u.transpose();
    e.q.row(t) = root * v.transpose();
  }
  return e;
}

/// Smallest d whose leading squared singular values hold `energy` of the total, clamped to [d_min, d_max].
inline int choose_dim(const Vector& sigma, double energy, int d_min, int d_max) {
  if (sigma.size() == 0) throw InputError("choose_dim: empty spectrum");
  require(energy > 0.0 && energy <= 1.0, "choose_dim: energy must be in (0, 1]");
  require(d_min >= 1 && d_min <= d_max, "choose_dim: need 1 <= d_min <= d_max");
  const double total = sigma.squaredNorm();
  int d = static_cast<int>(sigma.size());
  if (total > 0.0) {
    double acc = 0.0;
    for (Eigen::Index t = 0; t < sigma.size(); ++t) {
      acc += sigma(t) * sigma(t);
      if (acc / total >= energy - 1e-12) {
        d = static_cast<int>(t) + 1;
        break;
      }
    }
  } else {
    d = 1;
  }
  return std::clamp(d, d_min, d_max);
}

/// Zero-pads the embedding to `d` rows.
inline EmbeddingPair pad_embedding(EmbeddingPair e, int d) {
  if (e.d >= d) return e;
  const auto n = e.p.cols();
  Matrix p = Matrix::Zero(d, n), q = Matrix::Zero(d, n);
  p.topRows(e.d) = e.p;
  q.topRows(e.d) = e.q;
  Vector s = Vector::Zero(d);
  s.head(e.d) = e.sigma;
  return {p, q, d, s};
}

}  // namespace jgmc
