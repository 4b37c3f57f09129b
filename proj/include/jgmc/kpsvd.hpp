#pragma once

#include "jgmc/common.hpp"

#include <Eigen/SVD>
#include <cmath>

namespace jgmc {

struct KroneckerTerm {
  Matrix a;  // graph-1 factor
  Matrix b;  // graph-2 factor
  double sigma = 0.0;
};

struct KpsvdResult {
  std::vector<KroneckerTerm> terms;
  double captured_energy = 0.0;  // sum_{t<=k} sigma_t^2 / sum_t sigma_t^2
  Vector singular_values;        // full spectrum of the rearranged matrix
};

namespace detail {
inline Eigen::Index kron_side(Eigen::Index size) {
  const auto n = static_cast<Eigen::Index>(std::llround(std::sqrt(static_cast<double>(size))));
  if (n * n != size) throw InputError("kpsvd: matrix order is not a perfect square");
  return n;
}
}  // namespace detail

/// Van Loan-Pitsianis rearrangement: row j*n+i holds vec(block(i, j)), so a
/// Kronecker product A (x) B maps to vec(A) vec(B)^T.
inline Matrix rearrange(const Matrix& k) {
  if (k.rows() != k.cols()) throw InputError("rearrange: matrix must be square");
  const auto n = detail::kron_side(k.rows());
  Matrix r(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i) {
      const Matrix block = k.block(i * n, j * n, n, n);
      r.row(j * n + i) = vec(block).transpose();
    }
  return r;
}

inline Matrix inverse_rearrange(const Matrix& r) {
  if (r.rows() != r.cols()) throw InputError("inverse_rearrange: matrix must be square");
  const auto n = detail::kron_side(r.rows());
  Matrix k(n * n, n * n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < n; ++i)
      k.block(i * n, j * n, n, n) = unvec(r.row(j * n + i).transpose(), n, n);
  return k;
}

/// Top-k nearest Kronecker-sum terms of K. sqrt(sigma) is split evenly between
/// the factors; the sign makes the largest-magnitude entry of each A_t positive.
inline KpsvdResult kpsvd_decompose(const Matrix& k, int count) {
  if (!k.allFinite()) throw NumericalError("kpsvd: non-finite input");
  const Matrix r = rearrange(k);
  const auto n = detail::kron_side(k.rows());
  if (count < 1 || count > n * n) throw InputError("kpsvd: term count must be in [1, n^2]");
  Eigen::BDCSVD<Matrix> svd(r, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) throw NumericalError("kpsvd: SVD failed");
  const Vector& s = svd.singularValues();

  KpsvdResult out;
  out.singular_values = s;
  const double total = s.squaredNorm();
  double kept = 0.0;
  for (int t = 0; t < count; ++t) {
    if (s(t) <= 0.0 || s(t) < 1e-12 * s(0)) break;
    Vector u = svd.matrixU().col(t);
    Vector v = svd.matrixV().col(t);
    Eigen::Index arg = 0;
    u.cwiseAbs().maxCoeff(&arg);
    if (u(arg) < 0) u = -u, v = -v;
    const double root = std::sqrt(s(t));
    out.terms.push_back({unvec(root * u, n, n), unvec(root * v, n, n), s(t)});
    kept += s(t) * s(t);
  }
  out.captured_energy = total > 0.0 ? kept / total : 1.0;
  return out;
}

/// Replaces every factor by its symmetric part.
inline std::vector<KroneckerTerm> symmetrize_terms(std::vector<KroneckerTerm> terms) {
  for (auto& t : terms) {
    t.a = (0.5 * (t.a + t.a.transpose())).eval();
    t.b = (0.5 * (t.b + t.b.transpose())).eval();
  }
  return terms;
}

/// Sum of A_t (x) B_t. Zero matrix of order n^2 for an empty list.
inline Matrix reconstruct(const std::vector<KroneckerTerm>& terms, Eigen::Index n) {
  Matrix k = Matrix::Zero(n * n, n * n);
  for (const auto& t : terms)
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) k.block(i * n, j * n, n, n) += t.a(i, j) * t.b;
  return k;
}

/// Sum of Koopmans-Beckmann objectives tr(A_t^T X^T B_t X) for the assignment matrix X.
inline double kb_objective(const std::vector<KroneckerTerm>& terms, const Matrix& x) {
  double v = 0.0;
  for (const auto& t : terms) v += (t.a.transpose() * x.transpose() * t.b * x).trace();
  return v;
}

}  // namespace jgmc
