#pragma once

#include "jgmc/common.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace jgmc {

inline constexpr double kSqrt2 = std::numbers::sqrt2;

inline Eigen::Index svec_size(Eigen::Index m) { return m * (m + 1) / 2; }

/// Position of entry (r, c), r >= c, in the column-major lower-triangle scan.
inline Eigen::Index svec_index(Eigen::Index m, Eigen::Index r, Eigen::Index c) {
  if (r < c) std::swap(r, c);
  return c * m - c * (c - 1) / 2 + (r - c);
}

/// Lower-triangle scan with off-diagonals scaled by sqrt(2), so <M, N> = svec(M)^T svec(N).
inline Vector svec(const Matrix& m) {
  if (m.rows() != m.cols()) throw InputError("svec: matrix must be square");
  const auto n = m.rows();
  const double tol = 1e-12 * std::max(1.0, m.cwiseAbs().maxCoeff());
  Vector v(svec_size(n));
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) {
      if (std::abs(m(r, c) - m(c, r)) > tol) throw InputError("svec: matrix is not symmetric");
      v(k++) = r == c ? m(r, c) : kSqrt2 * m(r, c);
    }
  return v;
}

template <class Derived>
Matrix smat(const Eigen::MatrixBase<Derived>& v) {
  const auto len = v.size();
  const auto n = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  if (svec_size(n) != len) throw InputError("smat: length is not triangular");
  Matrix m(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) {
      const double x = v(k++);
      m(r, c) = m(c, r) = r == c ? x : x / kSqrt2;
    }
  return m;
}

/// Frobenius-nearest positive semidefinite matrix.
inline Matrix project_psd(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> eig(m);
  if (eig.info() != Eigen::Success) throw NumericalError("project_psd: eigensolver failed");
  const Vector lam = eig.eigenvalues().cwiseMax(0.0);
  return eig.eigenvectors() * lam.asDiagonal() * eig.eigenvectors().transpose();
}

/// In-place projection of one svec-stored block.
inline void project_psd_svec(Eigen::Ref<Vector> block, Matrix& work) {
  const auto len = block.size();
  const auto n = static_cast<Eigen::Index>(std::llround((std::sqrt(8.0 * len + 1.0) - 1.0) / 2.0));
  work.resize(n, n);
  Eigen::Index k = 0;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) {
      const double x = block(k++);
      work(r, c) = r == c ? x : x / kSqrt2;
    }
  Eigen::SelfAdjointEigenSolver<Matrix> eig(work, Eigen::ComputeEigenvectors);
  if (eig.info() != Eigen::Success) throw NumericalError("project_psd: eigensolver failed");
  const Vector& lam = eig.eigenvalues();
  if (lam(0) >= 0.0) return;
  if (lam(n - 1) <= 0.0) {
    block.setZero();
    return;
  }
  Eigen::Index first = 0;
  while (lam(first) <= 0.0) ++first;
  const auto kept = n - first;
  const Matrix v = eig.eigenvectors().rightCols(kept) * lam.tail(kept).cwiseSqrt().asDiagonal();
  work.noalias() = v * v.transpose();
  k = 0;
  for (Eigen::Index c = 0; c < n; ++c)
    for (Eigen::Index r = c; r < n; ++r) block(k++) = r == c ? work(r, c) : kSqrt2 * work(r, c);
}

/// Variable cones in fixed order: free, nonnegative, then PSD blocks in svec form.
struct ConeLayout {
  int free = 0;
  int nonneg = 0;
  std::vector<int> psd;  // block orders

  Eigen::Index size() const {
    Eigen::Index s = free + nonneg;
    for (int m : psd) s += svec_size(m);
    return s;
  }
};

/// Projection onto the cone described by `cones`.
inline void project_cone(const ConeLayout& cones, Vector& x, Matrix& work) {
  Eigen::Index off = cones.free;
  for (int i = 0; i < cones.nonneg; ++i, ++off) x(off) = std::max(x(off), 0.0);
  for (int m : cones.psd) {
    const auto len = svec_size(m);
    project_psd_svec(x.segment(off, len), work);
    off += len;
  }
}

inline Vector project_cone(const ConeLayout& cones, Vector x) {
  Matrix work;
  project_cone(cones, x, work);
  return x;
}

/// Projection onto the dual cone: the free block's dual is {0}, the rest is self-dual.
inline Vector project_dual_cone(const ConeLayout& cones, Vector x) {
  x = project_cone(cones, std::move(x));
  x.head(cones.free).setZero();
  return x;
}

/// Affine function of the variable vector.
struct AffineExpr {
  double constant = 0.0;
  std::vector<std::pair<Eigen::Index, double>> terms;

  double eval(const Vector& x) const {
    double v = constant;
    for (const auto& [i, a] : terms) v += a * x(i);
    return v;
  }
};

/// Named model quantity (matrix-shaped) as affine functions of the variables.
struct LedgerEntry {
  Eigen::Index rows = 0;
  Eigen::Index cols = 0;
  std::vector<AffineExpr> entries;  // column-major

  Matrix value(const Vector& x) const {
    Matrix m(rows, cols);
    for (Eigen::Index k = 0; k < rows * cols; ++k) m(k) = entries[k].eval(x);
    return m;
  }
};

/// min c^T x  s.t.  A x = b,  x in cones.
struct ConicProgram {
  Vector c;
  double objective_offset = 0.0;
  Eigen::SparseMatrix<double> a;
  Vector b;
  ConeLayout cones;
  std::map<std::string, LedgerEntry> ledger;

  Eigen::Index variables() const { return c.size(); }
  Eigen::Index constraints() const { return b.size(); }

  void validate() const {
    require(c.size() == cones.size(), "conic program: objective size does not match cones");
    require(a.cols() == c.size() && a.rows() == b.size(), "conic program: constraint shape mismatch");
    require(c.allFinite() && b.allFinite(), "conic program: non-finite data");
    for (const auto& [name, entry] : ledger) {
      require(static_cast<Eigen::Index>(entry.entries.size()) == entry.rows * entry.cols,
              "conic program: ledger entry " + name + " has the wrong size");
      for (const auto& e : entry.entries)
        for (const auto& [i, coef] : e.terms)
          require(i >= 0 && i < c.size(), "conic program: ledger index out of range in " + name);
    }
  }
};

/// Incremental assembly of a ConicProgram. Variables are placed by cone category
/// when the program is finalized, so components can be added in any order.
class ProgramBuilder {
 public:
  enum class Cone { free, nonneg, psd };
  struct Var {
    Cone cone = Cone::free;
    Eigen::Index local = 0;
  };
  /// coefficient on the variable itself (svec scaling already applied)
  struct Term {
    Var var;
    double coeff = 0.0;
  };
  struct Expr {
    double constant = 0.0;
    std::vector<Term> terms;
  };

  static constexpr int kChannels = 2;

  Var add_free() { return {Cone::free, free_++}; }
  Var add_nonneg() { return {Cone::nonneg, nonneg_++}; }

  int add_psd(int order) {
    block_offset_.push_back(psd_len_);
    block_order_.push_back(order);
    psd_len_ += svec_size(order);
    return static_cast<int>(block_order_.size()) - 1;
  }

  int block_order(int block) const { return block_order_[block]; }
  int psd_blocks() const { return static_cast<int>(block_order_.size()); }

  /// Term for coeff * M(r, c) of a PSD block, where M(r, c) is the matrix entry.
  Term entry(int block, int r, int c, double coeff = 1.0) const {
    const Var v{Cone::psd, block_offset_[block] + svec_index(block_order_[block], r, c)};
    return {v, r == c ? coeff : coeff / kSqrt2};
  }
  static Term scalar(Var v, double coeff = 1.0) { return {v, coeff}; }

  void add_equality(std::vector<Term> terms, double rhs) {
    const Eigen::Index row = rows_++;
    for (const auto& t : terms) triplets_.push_back({row, t.var, t.coeff});
    rhs_.push_back(rhs);
  }

  void add_objective(int channel, Term t) { objective_[channel].push_back(t); }

  /// Adds <G, M> over the full symmetric block to a channel.
  void add_block_objective(int channel, int block, const Matrix& g) {
    const int m = block_order_[block];
    require(g.rows() == m && g.cols() == m, "objective block size mismatch");
    for (int c = 0; c < m; ++c)
      for (int r = c; r < m; ++r) {
        const double w = r == c ? g(r, r) : g(r, c) + g(c, r);
        if (w != 0.0) objective_[channel].push_back(entry(block, r, c, w));
      }
  }

  void add_constant(int channel, double v) { constant_[channel] += v; }
  double constant(int channel) const { return constant_[channel]; }

  void set_ledger(const std::string& name, Eigen::Index rows, Eigen::Index cols, std::vector<Expr> entries) {
    ledger_[name] = {rows, cols, std::move(entries)};
  }
  static Expr value_of(Term t) { return {0.0, {t}}; }

  Eigen::Index rows() const { return rows_; }

  Eigen::Index index(const Var& v) const {
    switch (v.cone) {
      case Cone::free: return v.local;
      case Cone::nonneg: return free_ + v.local;
      case Cone::psd: return free_ + nonneg_ + v.local;
    }
    return -1;
  }

  /// Per-channel objective vectors (no weights applied).
  Vector channel_objective(int channel) const {
    Vector c = Vector::Zero(free_ + nonneg_ + psd_len_);
    for (const auto& t : objective_[channel]) c(index(t.var)) += t.coeff;
    return c;
  }

  ConicProgram finalize(std::array<double, kChannels> weights) const {
    ConicProgram p;
    p.cones.free = static_cast<int>(free_);
    p.cones.nonneg = static_cast<int>(nonneg_);
    p.cones.psd = block_order_;
    const Eigen::Index nvar = free_ + nonneg_ + psd_len_;
    p.c = Vector::Zero(nvar);
    for (int ch = 0; ch < kChannels; ++ch) {
      if (weights[ch] == 0.0) continue;
      for (const auto& t : objective_[ch]) p.c(index(t.var)) += weights[ch] * t.coeff;
      p.objective_offset += weights[ch] * constant_[ch];
    }
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(triplets_.size());
    for (const auto& t : triplets_) trip.emplace_back(t.row, index(t.var), t.coeff);
    p.a.resize(rows_, nvar);
    p.a.setFromTriplets(trip.begin(), trip.end());
    p.a.makeCompressed();
    p.b = Eigen::Map<const Vector>(rhs_.data(), static_cast<Eigen::Index>(rhs_.size()));
    for (const auto& [name, raw] : ledger_) {
      LedgerEntry e{raw.rows, raw.cols, {}};
      for (const auto& ex : raw.entries) {
        AffineExpr a{ex.constant, {}};
        for (const auto& t : ex.terms) a.terms.emplace_back(index(t.var), t.coeff);
        e.entries.push_back(std::move(a));
      }
      p.ledger[name] = std::move(e);
    }
    return p;
  }

 private:
  struct RawTriplet {
    Eigen::Index row;
    Var var;
    double coeff;
  };
  struct RawLedger {
    Eigen::Index rows = 0, cols = 0;
    std::vector<Expr> entries;
  };

  Eigen::Index free_ = 0, nonneg_ = 0, psd_len_ = 0, rows_ = 0;
  std::vector<Eigen::Index> block_offset_;
  std::vector<int> block_order_;
  std::vector<RawTriplet> triplets_;
  std::vector<double> rhs_;
  std::array<std::vector<Term>, kChannels> objective_;
  std::array<double, kChannels> constant_{};
  std::map<std::string, RawLedger> ledger_;
};

}  // namespace jgmc
