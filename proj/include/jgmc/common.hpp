#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>
#include <vector>

namespace jgmc {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Cluster labels in {-1, +1}.
using Labels = std::vector<int>;

/// One-to-one matching stored as target[j] = node of graph 2 matched to node j of graph 1.
using Assignment = std::vector<int>;

/// Malformed or inconsistent user input (CLI exit code 2).
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Non-finite data or a failed factorization (CLI exit code 4).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline void require(bool cond, const std::string& what) {
  if (!cond) throw InputError(what);
}

/// 0/1 matrix with X(target[j], j) = 1.
inline Matrix assignment_matrix(const Assignment& target) {
  const auto n = static_cast<Eigen::Index>(target.size());
  Matrix x = Matrix::Zero(n, n);
  for (Eigen::Index j = 0; j < n; ++j) x(target[j], j) = 1.0;
  return x;
}

inline bool is_permutation(const Assignment& target) {
  std::vector<char> seen(target.size(), 0);
  for (int t : target) {
    if (t < 0 || t >= static_cast<int>(target.size()) || seen[t]) return false;
    seen[t] = 1;
  }
  return true;
}

inline Assignment inverse(const Assignment& target) {
  Assignment inv(target.size());
  for (std::size_t j = 0; j < target.size(); ++j) inv[target[j]] = static_cast<int>(j);
  return inv;
}

/// Column-major stacking: entry (r, c) of an n x n matrix lands at c * n + r.
inline Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

inline Matrix unvec(const Vector& v, Eigen::Index rows, Eigen::Index cols) {
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

}  // namespace jgmc
