#pragma once

#include "jgmc/conic.hpp"

#include <optional>

namespace jgmc {

/// Embeddings of one Kronecker term: HOPE(A_t) = (p1, p2), HOPE(B_t) = (q1, q2), all d x n.
struct TermEmbedding {
  Matrix p1, p2;
  Matrix q1, q2;

  const Matrix& p(int side) const { return side == 0 ? p1 : p2; }
  const Matrix& q(int side) const { return side == 0 ? q1 : q2; }
};

enum class CouplingForm {
  same_cluster,      // X(l, j) <= (1 + y1_j y2_l) / 2
  positive_cluster,  // X(l, j) <= z1_j z2_l, the stacked z = (1 + y) / 2 form
};

struct ModelOptions {
  bool coupling = true;
  CouplingForm coupling_form = CouplingForm::same_cluster;
  bool decoupled_lbar = false;      // independent (1, z, Lbar) block tied to y by z = (1 + y) / 2
  bool row_sum_tightening = true;   // Xi_j 1 = x_j
  bool anchor_gauge = true;         // y1_0 = +1
  std::optional<double> lambda_m;   // default 1 / sum(|P|^2 + |Q|^2)
  std::optional<double> lambda_c;   // default 1 / (sum W1 + sum W2)
};

inline constexpr int kMatchingChannel = 0;
inline constexpr int kClusteringChannel = 1;

/// Monomial basis of a moment block. Logical coordinates that are affine in the
/// others (forced by the constraints) are substituted out, so the stored block has
/// no structural null vector.
struct MomentMap {
  std::vector<std::vector<std::pair<int, double>>> rows;  // logical -> combination of physical
  std::vector<int> kept;                                   // logical index of each physical coordinate

  int logical_order() const { return static_cast<int>(rows.size()); }
  int physical_order() const { return static_cast<int>(kept.size()); }
  bool eliminated(int r) const {
    return rows[r].size() != 1 || rows[r][0].second != 1.0 || kept[rows[r][0].first] != r;
  }

  static MomentMap identity(int m) {
    MomentMap mm;
    for (int r = 0; r < m; ++r) mm.rows.push_back({{r, 1.0}}), mm.kept.push_back(r);
    return mm;
  }

  /// Logical coordinate r replaced by sum coeff * logical[q] over the (kept) q in `combo`.
  static MomentMap substitute(int m, int r, const std::vector<std::pair<int, double>>& combo) {
    MomentMap mm;
    std::vector<int> phys(m, -1);
    for (int q = 0; q < m; ++q)
      if (q != r) phys[q] = static_cast<int>(mm.kept.size()), mm.kept.push_back(q);
    mm.rows.resize(m);
    for (int q = 0; q < m; ++q)
      if (q != r) mm.rows[q] = {{phys[q], 1.0}};
    for (const auto& [q, a] : combo) mm.rows[r].push_back({phys[q], a});
    return mm;
  }

  Matrix basis() const {
    Matrix v = Matrix::Zero(logical_order(), physical_order());
    for (int r = 0; r < logical_order(); ++r)
      for (const auto& [p, a] : rows[r]) v(r, p) += a;
    return v;
  }
  /// Objective over logical entries as an objective over the stored block.
  Matrix pull(const Matrix& g) const {
    const Matrix v = basis();
    return v.transpose() * g * v;
  }
  Vector restrict(const Vector& logical) const {
    Vector out(physical_order());
    for (int p = 0; p < physical_order(); ++p) out(p) = logical(kept[p]);
    return out;
  }
};

using Terms = std::vector<ProgramBuilder::Term>;

/// coeff * M(r, c) for logical indices of a mapped block.
inline Terms moment(const ProgramBuilder& b, int blk, const MomentMap& mm, int r, int c, double coeff = 1.0) {
  Terms out;
  for (const auto& [p, a] : mm.rows[r])
    for (const auto& [q, a2] : mm.rows[c]) out.push_back(b.entry(blk, p, q, coeff * a * a2));
  return out;
}

inline Terms operator+(Terms a, const Terms& b) {
  a.insert(a.end(), b.begin(), b.end());
  return a;
}

inline ProgramBuilder::Expr expr(Terms t, double constant = 0.0) { return {constant, std::move(t)}; }

/// Per (side s, term i, column j) a PSD block over (1, vec(R_si), x_j).
struct MatchingLayout {
  int n = 0, d = 0, k = 0;
  std::vector<int> blocks;  // index ((s * k + i) * n + j)
  MomentMap map;

  int order() const { return 1 + d * d + n; }  // logical
  int block(int s, int i, int j) const { return blocks[(s * k + i) * n + j]; }
  int r_index(int a, int b) const { return 1 + b * d + a; }  // entry R(a, b)
  int x_index(int l) const { return 1 + d * d + l; }
  bool empty() const { return blocks.empty(); }
};

/// One PSD block over (1, y1, y2); with the gauge anchor y1_0 is the constant coordinate.
struct ClusterLayout {
  int n = 0;
  int block = -1;
  MomentMap map;
  int y1(int i) const { return 1 + i; }
  int y2(int l) const { return 1 + n + l; }
  bool empty() const { return block < 0; }
};

struct CouplingLayout {
  int rows = 0;
  int lbar_block = -1;  // only with decoupled_lbar
  MomentMap map;
};

namespace detail {

inline void check_symmetric(const Matrix& w, const char* what) {
  if (w.rows() != w.cols() || (w.size() > 0 && (w - w.transpose()).cwiseAbs().maxCoeff() > 1e-12))
    throw InputError(std::string(what) + " must be symmetric");
}

inline MomentMap label_map(int n, bool anchored) {
  return anchored ? MomentMap::substitute(2 * n + 1, 1, {{0, 1.0}}) : MomentMap::identity(2 * n + 1);
}

}  // namespace detail

/// Registration moment blocks, orthogonality and assignment constraints, and the
/// lifted objective sum ||R p_j - Q x_j||^2.
inline MatchingLayout assemble_matching(ProgramBuilder& b, const std::vector<TermEmbedding>& terms, int n, int d,
                                        const ModelOptions& opt = {}) {
  MatchingLayout lay;
  lay.n = n;
  lay.d = d;
  lay.k = static_cast<int>(terms.size());
  if (terms.empty()) return lay;
  require(n >= 1 && d >= 1, "assemble_matching: n and d must be positive");
  for (const auto& t : terms)
    for (int s = 0; s < 2; ++s)
      if (t.p(s).rows() != d || t.p(s).cols() != n || t.q(s).rows() != d || t.q(s).cols() != n)
        throw InputError("assemble_matching: embeddings must all be d x n");

  const int k = lay.k;
  const int m = lay.order();
  // With Xi_j 1 = x_j and 1^T x_j = 1 the vector (-1, 0, 1, ..., 1) is in the kernel:
  // x_{n-1} = 1 - sum_{l<n-1} x_l.
  if (opt.row_sum_tightening) {
    std::vector<std::pair<int, double>> combo{{0, 1.0}};
    for (int l = 0; l + 1 < n; ++l) combo.push_back({lay.x_index(l), -1.0});
    lay.map = MomentMap::substitute(m, lay.x_index(n - 1), combo);
  } else {
    lay.map = MomentMap::identity(m);
  }
  const MomentMap& mm = lay.map;
  const auto mom = [&](int blk, int r, int c, double coeff = 1.0) { return moment(b, blk, mm, r, c, coeff); };

  lay.blocks.resize(2 * k * n);
  for (auto& blk : lay.blocks) blk = b.add_psd(mm.physical_order());

  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < k; ++i) {
      const Matrix& p = terms[i].p(s);
      const Matrix& q = terms[i].q(s);
      const Matrix qtq = q.transpose() * q;
      for (int j = 0; j < n; ++j) {
        const int blk = lay.block(s, i, j);
        Matrix g = Matrix::Zero(m, m);
        for (int a = 0; a < d; ++a)
          for (int bb = 0; bb < d; ++bb) {
            for (int b2 = 0; b2 < d; ++b2) g(lay.r_index(a, bb), lay.r_index(a, b2)) += p(bb, j) * p(b2, j);
            for (int l = 0; l < n; ++l) {
              const double v = -q(a, l) * p(bb, j);
              g(lay.r_index(a, bb), lay.x_index(l)) += v;
              g(lay.x_index(l), lay.r_index(a, bb)) += v;
            }
          }
        for (int l = 0; l < n; ++l)
          for (int l2 = 0; l2 < n; ++l2) g(lay.x_index(l), lay.x_index(l2)) += qtq(l, l2);
        b.add_block_objective(kMatchingChannel, blk, mm.pull(g));
        b.add_equality(mom(blk, 0, 0), 1.0);
      }
    }

  // Stored coordinates of the rotation part and of the assignment part.
  std::vector<int> r_idx{0}, x_idx{0};
  for (int r = 0; r < d * d; ++r) r_idx.push_back(1 + r);
  for (int l = 0; l < n; ++l)
    if (!mm.eliminated(lay.x_index(l))) x_idx.push_back(lay.x_index(l));
  const auto share = [&](int blk, int head, const std::vector<int>& idx) {
    for (std::size_t c = 0; c < idx.size(); ++c)
      for (std::size_t r = c; r < idx.size(); ++r) {
        if (r == 0) continue;
        b.add_equality(mom(blk, idx[r], idx[c]) + mom(head, idx[r], idx[c], -1.0), 0.0);
      }
  };

  // Rotation moments are shared by all columns of one (s, i).
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < k; ++i) {
      const int head = lay.block(s, i, 0);
      for (int j = 1; j < n; ++j) share(lay.block(s, i, j), head, r_idx);
      // R R^T = I and R^T R = I in the moments; the trace of the second copy is implied.
      for (int a = 0; a < d; ++a)
        for (int a2 = a; a2 < d; ++a2) {
          Terms rows, cols;
          for (int c = 0; c < d; ++c) {
            rows = rows + mom(head, lay.r_index(a, c), lay.r_index(a2, c));
            cols = cols + mom(head, lay.r_index(c, a), lay.r_index(c, a2));
          }
          b.add_equality(rows, a == a2 ? 1.0 : 0.0);
          if (!(a == a2 && a == d - 1)) b.add_equality(cols, a == a2 ? 1.0 : 0.0);
        }
    }

  // Assignment columns and their moments are shared by all (s, i).
  for (int j = 0; j < n; ++j) {
    const int head = lay.block(0, 0, j);
    for (int t = 1; t < 2 * k; ++t) share(lay.blocks[t * n + j], head, x_idx);
    for (int l = 0; l < n; ++l) {
      b.add_equality(mom(head, lay.x_index(l), lay.x_index(l)) + mom(head, 0, lay.x_index(l), -1.0), 0.0);
      if (opt.row_sum_tightening) continue;
      // explicit x >= 0 on the unreduced block
      const auto slack = b.add_nonneg();
      b.add_equality(mom(head, 0, lay.x_index(l)) + Terms{ProgramBuilder::scalar(slack, -1.0)}, 0.0);
    }
    if (!opt.row_sum_tightening) {
      Terms col_sum;
      for (int l = 0; l < n; ++l) col_sum = col_sum + mom(head, 0, lay.x_index(l));
      b.add_equality(col_sum, 1.0);
    }
  }
  // Row sums; the last one follows from the column sums.
  for (int l = 0; l + 1 < n; ++l) {
    Terms row_sum;
    for (int j = 0; j < n; ++j) row_sum = row_sum + mom(lay.block(0, 0, j), 0, lay.x_index(l));
    b.add_equality(row_sum, 1.0);
  }

  // Ledger.
  std::vector<ProgramBuilder::Expr> xs;
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) xs.push_back(expr(mom(lay.block(0, 0, j), 0, lay.x_index(l))));
  b.set_ledger("X", n, n, std::move(xs));
  for (int j = 0; j < n; ++j) {
    std::vector<ProgramBuilder::Expr> xi;
    const int head = lay.block(0, 0, j);
    for (int l2 = 0; l2 < n; ++l2)
      for (int l = 0; l < n; ++l) xi.push_back(expr(mom(head, lay.x_index(l), lay.x_index(l2))));
    b.set_ledger("Xi[" + std::to_string(j) + "]", n, n, std::move(xi));
  }
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < k; ++i) {
      const int head = lay.block(s, i, 0);
      const std::string tag = "[" + std::to_string(s + 1) + "][" + std::to_string(i) + "]";
      std::vector<ProgramBuilder::Expr> r1, r2;
      for (int bb = 0; bb < d; ++bb)
        for (int a = 0; a < d; ++a) r1.push_back(expr(mom(head, 0, lay.r_index(a, bb))));
      for (int c = 0; c < d * d; ++c)
        for (int r = 0; r < d * d; ++r) r2.push_back(expr(mom(head, 1 + r, 1 + c)));
      b.set_ledger("R" + tag, d, d, std::move(r1));
      b.set_ledger("Rmoment" + tag, d * d, d * d, std::move(r2));
    }
  return lay;
}

/// MAX CUT moment block for both graphs; the objective is the minimization form
/// sum W1_ij L_ij + sum W2_ij L_{n+i,n+j}, with sum W1 + sum W2 kept as the constant.
inline ClusterLayout assemble_clustering(ProgramBuilder& b, const Matrix& w1, const Matrix& w2,
                                         const ModelOptions& opt = {}) {
  detail::check_symmetric(w1, "assemble_clustering: W1");
  detail::check_symmetric(w2, "assemble_clustering: W2");
  require(w1.rows() == w2.rows(), "assemble_clustering: W1 and W2 differ in size");
  ClusterLayout lay;
  lay.n = static_cast<int>(w1.rows());
  const int n = lay.n;
  require(n >= 1, "assemble_clustering: empty affinity");
  lay.map = detail::label_map(n, opt.anchor_gauge);
  const MomentMap& mm = lay.map;
  lay.block = b.add_psd(mm.physical_order());
  const int blk = lay.block;

  Matrix g = Matrix::Zero(2 * n + 1, 2 * n + 1);
  g.block(1, 1, n, n) = w1;
  g.block(1 + n, 1 + n, n, n) = w2;
  b.add_block_objective(kClusteringChannel, blk, mm.pull(g));
  b.add_constant(kClusteringChannel, w1.sum() + w2.sum());

  b.add_equality(moment(b, blk, mm, 0, 0), 1.0);
  for (int i = 1; i <= 2 * n; ++i) {
    if (mm.eliminated(i)) continue;
    b.add_equality(moment(b, blk, mm, i, i), 1.0);
    const auto up = b.add_nonneg();
    const auto down = b.add_nonneg();
    b.add_equality(moment(b, blk, mm, 0, i) + Terms{ProgramBuilder::scalar(up)}, 1.0);
    b.add_equality(moment(b, blk, mm, 0, i) + Terms{ProgramBuilder::scalar(down, -1.0)}, -1.0);
  }

  std::vector<ProgramBuilder::Expr> y, l;
  for (int i = 1; i <= 2 * n; ++i) y.push_back(expr(moment(b, blk, mm, 0, i)));
  for (int c = 1; c <= 2 * n; ++c)
    for (int r = 1; r <= 2 * n; ++r) l.push_back(expr(moment(b, blk, mm, r, c)));
  b.set_ledger("y", 2 * n, 1, std::move(y));
  b.set_ledger("L", 2 * n, 2 * n, std::move(l));
  return lay;
}

/// Coupling rows X(l, j) <= rhs(y1_j, y2_l, L_{j, n+l}) through nonnegative slacks.
inline CouplingLayout assemble_coupling(ProgramBuilder& b, const MatchingLayout& m, const ClusterLayout& c,
                                        const ModelOptions& opt = {}) {
  if (m.empty() || c.empty()) throw InputError("assemble_coupling: matching and clustering layouts are required");
  require(m.n == c.n, "assemble_coupling: layouts disagree on n");
  const int n = m.n;
  CouplingLayout lay;
  const int cb = c.block;
  const auto cm = [&](int r, int col, double coeff = 1.0) { return moment(b, cb, c.map, r, col, coeff); };

  // Stacked z = (1 + y) / 2 and Lbar = zz^T, either as affine images of (y, L)
  // or as an independent block tied by z = (1 + y) / 2.
  std::vector<ProgramBuilder::Expr> z(2 * n), lbar(4 * n * n);
  if (opt.decoupled_lbar) {
    lay.map = detail::label_map(n, opt.anchor_gauge);
    lay.lbar_block = b.add_psd(lay.map.physical_order());
    const int zb = lay.lbar_block;
    const auto zm = [&](int r, int col, double coeff = 1.0) { return moment(b, zb, lay.map, r, col, coeff); };
    b.add_equality(zm(0, 0), 1.0);
    for (int i = 1; i <= 2 * n; ++i) {
      z[i - 1] = expr(zm(0, i));
      if (lay.map.eliminated(i)) continue;
      b.add_equality(zm(0, i) + cm(0, i, -0.5), 0.5);
      b.add_equality(zm(i, i) + zm(0, i, -1.0), 0.0);
    }
    for (int cc = 1; cc <= 2 * n; ++cc)
      for (int r = 1; r <= 2 * n; ++r) lbar[(cc - 1) * 2 * n + (r - 1)] = expr(zm(r, cc));
  } else {
    for (int i = 1; i <= 2 * n; ++i) z[i - 1] = expr(cm(0, i, 0.5), 0.5);
    for (int cc = 1; cc <= 2 * n; ++cc)
      for (int r = 1; r <= 2 * n; ++r) {
        auto e = expr(cm(0, r, 0.25) + cm(0, cc, 0.25), 0.25);
        if (r == cc) e.constant += 0.25;
        else e.terms = e.terms + cm(r, cc, 0.25);
        lbar[(cc - 1) * 2 * n + (r - 1)] = e;
      }
  }
  b.set_ledger("z", 2 * n, 1, z);
  b.set_ledger("Lbar", 2 * n, 2 * n, lbar);

  for (int j = 0; j < n; ++j)
    for (int l = 0; l < n; ++l) {
      const Terms x = moment(b, m.block(0, 0, j), m.map, 0, m.x_index(l));
      const Terms slack{ProgramBuilder::scalar(b.add_nonneg())};
      const int yj = c.y1(j), yl = c.y2(l);
      if (opt.decoupled_lbar) {
        const auto zm = [&](int r, int col, double coeff = 1.0) {
          return moment(b, lay.lbar_block, lay.map, r, col, coeff);
        };
        if (opt.coupling_form == CouplingForm::same_cluster)
          b.add_equality(x + zm(0, yj) + zm(0, yl) + zm(yj, yl, -2.0) + slack, 1.0);
        else
          b.add_equality(x + zm(yj, yl, -1.0) + slack, 0.0);
      } else {
        if (opt.coupling_form == CouplingForm::same_cluster)
          b.add_equality(x + cm(yj, yl, -0.5) + slack, 0.5);
        else
          b.add_equality(x + cm(0, yj, -0.25) + cm(0, yl, -0.25) + cm(yj, yl, -0.25) + slack, 0.25);
      }
      ++lay.rows;
    }
  return lay;
}

/// Assembled joint relaxation plus everything needed to read a solution back.
struct JointModel {
  ConicProgram program;
  MatchingLayout matching;
  ClusterLayout clustering;
  std::optional<CouplingLayout> coupling;
  ModelOptions options;
  double lambda_m = 1.0;
  double lambda_c = 1.0;
  double cut_constant = 0.0;  // sum W1 + sum W2
  Vector c_matching;          // unweighted channel objectives
  Vector c_clustering;
  std::vector<Eigen::Index> block_offset;  // global offset of each PSD block
  std::map<std::string, Matrix> data;      // P/Q per term and side, W1, W2

  bool has(const std::string& name) const { return program.ledger.count(name) > 0; }
  Matrix value(const std::string& name, const Vector& x) const { return program.ledger.at(name).value(x); }

  Matrix relaxed_assignment(const Vector& x) const { return value("X", x); }
  Vector relaxed_labels(const Vector& x) const { return value("y", x); }

  /// Registration value (relaxed) and clustering minimization value.
  double matching_value(const Vector& x) const { return c_matching.size() ? c_matching.dot(x) : 0.0; }
  double clustering_value(const Vector& x) const { return c_clustering.size() ? c_clustering.dot(x) : 0.0; }
  /// sum W1 (1 - L1) + sum W2 (1 - L2)
  double cut_value(const Vector& x) const { return cut_constant - clustering_value(x); }
  double objective(const Vector& x) const {
    return lambda_m * matching_value(x) + lambda_c * clustering_value(x);
  }
  int psd_block_count() const { return static_cast<int>(program.cones.psd.size()); }
};

inline double default_lambda_m(const std::vector<TermEmbedding>& terms) {
  double s = 0.0;
  for (const auto& t : terms) s += t.p1.squaredNorm() + t.p2.squaredNorm() + t.q1.squaredNorm() + t.q2.squaredNorm();
  return s > 0.0 ? 1.0 / s : 1.0;
}

inline double default_lambda_c(const Matrix& w1, const Matrix& w2) {
  const double s = w1.cwiseAbs().sum() + w2.cwiseAbs().sum();
  return s > 0.0 ? 1.0 / s : 1.0;
}

/// Joint relaxation: lambda_m * registration + lambda_c * clustering (minimization form).
/// Empty `terms` drops the matching part; lambda_c = 0 without coupling drops clustering.
inline JointModel assemble_joint(const std::vector<TermEmbedding>& terms, const Matrix& w1, const Matrix& w2, int d,
                                 const ModelOptions& opt = {}) {
  JointModel jm;
  jm.options = opt;
  jm.lambda_m = opt.lambda_m.value_or(default_lambda_m(terms));
  jm.lambda_c = opt.lambda_c.value_or(default_lambda_c(w1, w2));
  require(jm.lambda_m >= 0.0 && jm.lambda_c >= 0.0, "assemble_joint: weights must be nonnegative");
  const int n = static_cast<int>(w1.rows());

  ProgramBuilder b;
  jm.matching = assemble_matching(b, terms, n, d, opt);
  const bool need_clustering = jm.lambda_c > 0.0 || (opt.coupling && !terms.empty());
  if (need_clustering) jm.clustering = assemble_clustering(b, w1, w2, opt);
  if (opt.coupling && !jm.matching.empty() && !jm.clustering.empty())
    jm.coupling = assemble_coupling(b, jm.matching, jm.clustering, opt);
  if (jm.matching.empty() && jm.clustering.empty()) throw InputError("assemble_joint: nothing to assemble");

  jm.program = b.finalize({jm.lambda_m, jm.lambda_c});
  jm.cut_constant = b.constant(kClusteringChannel);
  jm.program.objective_offset = 0.0;
  jm.c_matching = b.channel_objective(kMatchingChannel);
  jm.c_clustering = b.channel_objective(kClusteringChannel);
  for (int blk = 0; blk < b.psd_blocks(); ++blk)
    jm.block_offset.push_back(b.index(b.entry(blk, 0, 0).var));

  for (std::size_t i = 0; i < terms.size(); ++i) {
    const std::string t = "[" + std::to_string(i) + "]";
    jm.data["P1" + t] = terms[i].p1;
    jm.data["P2" + t] = terms[i].p2;
    jm.data["Q1" + t] = terms[i].q1;
    jm.data["Q2" + t] = terms[i].q2;
  }
  jm.data["W1"] = w1;
  jm.data["W2"] = w2;
  jm.program.validate();
  return jm;
}

/// Orthogonal R minimizing ||R p - q||_F.
inline Matrix procrustes(const Matrix& p, const Matrix& q) {
  require(p.rows() == q.rows() && p.cols() == q.cols(), "procrustes: shape mismatch");
  Eigen::JacobiSVD<Matrix> svd(q * p.transpose(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().transpose();
}

/// sum_{s,i} min_R ||R P_si - Q_si X||_F^2 for an assignment.
inline double registration_value(const std::vector<TermEmbedding>& terms, const Assignment& target,
                                 std::vector<Matrix>* rotations = nullptr) {
  const Matrix x = assignment_matrix(target);
  double v = 0.0;
  if (rotations) rotations->assign(2 * terms.size(), Matrix());
  for (int s = 0; s < 2; ++s)
    for (std::size_t i = 0; i < terms.size(); ++i) {
      const Matrix qx = terms[i].q(s) * x;
      const Matrix r = procrustes(terms[i].p(s), qx);
      v += (r * terms[i].p(s) - qx).squaredNorm();
      if (rotations) (*rotations)[s * terms.size() + i] = r;
    }
  return v;
}

/// Sets every nonnegative variable that appears in exactly one equality row so
/// that row holds; used to complete lifted points with their slack values.
inline void complete_slacks(const ConicProgram& p, Vector& x) {
  const Eigen::Index first = p.cones.free, last = p.cones.free + p.cones.nonneg;
  for (Eigen::Index v = first; v < last; ++v) x(v) = 0.0;
  const Vector r = p.b - p.a * x;
  for (Eigen::Index v = first; v < last; ++v) {
    Eigen::SparseMatrix<double>::InnerIterator it(p.a, v);
    if (!it) continue;
    const auto row = it.row();
    const double coeff = it.value();
    if (++it) continue;
    x(v) = r(row) / coeff;
  }
}

/// Lifted point of an integral solution: each block holds the outer product of its
/// monomial vector. `rotations` is indexed s * k + i.
inline Vector lift(const JointModel& jm, const std::vector<Matrix>& rotations, const Assignment& target,
                   const Labels& y1, const Labels& y2) {
  Vector x = Vector::Zero(jm.program.variables());
  auto put_block = [&](int blk, const MomentMap& mm, const Vector& logical) {
    const Vector v = mm.restrict(logical);
    const Matrix outer = v * v.transpose();
    x.segment(jm.block_offset[blk], svec_size(v.size())) = svec(outer);
  };
  const auto& m = jm.matching;
  if (!m.empty()) {
    require(static_cast<int>(rotations.size()) == 2 * m.k, "lift: need one rotation per (side, term)");
    for (int s = 0; s < 2; ++s)
      for (int i = 0; i < m.k; ++i)
        for (int j = 0; j < m.n; ++j) {
          Vector v = Vector::Zero(m.order());
          v(0) = 1.0;
          v.segment(1, m.d * m.d) = vec(rotations[s * m.k + i]);
          v(m.x_index(target[j])) = 1.0;
          put_block(m.block(s, i, j), m.map, v);
        }
  }
  const auto& c = jm.clustering;
  if (!c.empty()) {
    require(!jm.options.anchor_gauge || y1[0] == 1, "lift: anchored model needs y1[0] = +1");
    Vector v(2 * c.n + 1);
    v(0) = 1.0;
    for (int i = 0; i < c.n; ++i) v(c.y1(i)) = y1[i], v(c.y2(i)) = y2[i];
    put_block(c.block, c.map, v);
    if (jm.coupling && jm.coupling->lbar_block >= 0) {
      Vector zv = 0.5 * (Vector::Ones(v.size()) + v);
      zv(0) = 1.0;
      put_block(jm.coupling->lbar_block, jm.coupling->map, zv);
    }
  }
  complete_slacks(jm.program, x);
  return x;
}

}  // namespace jgmc
