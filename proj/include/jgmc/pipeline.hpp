#pragma once

#include "jgmc/embedding.hpp"
#include "jgmc/graph.hpp"
#include "jgmc/kpsvd.hpp"
#include "jgmc/metrics.hpp"
#include "jgmc/model.hpp"
#include "jgmc/oracle.hpp"
#include "jgmc/rounding.hpp"
#include "jgmc/solver.hpp"

#include <chrono>

namespace jgmc {

struct PipelineConfig {
  int k = 6;                        // Kronecker terms kept
  std::optional<int> dim;           // fixed embedding dimension; empty = chosen from the spectrum
  double energy = 0.9;
  int d_min = 1;
  int d_max = 27;
  double edge_kernel_scale = 2500.0;  // exp(-(e1 - e2)^2 / scale)
  ModelOptions model;
  bool repair = false;
  bool dummy_padding = false;
  SolverSettings solver;
};

struct StageTimes {
  double affinity = 0.0, kpsvd = 0.0, embedding = 0.0, assembly = 0.0, solve = 0.0, rounding = 0.0;
  double total() const { return affinity + kpsvd + embedding + assembly + solve + rounding; }
};

struct JointResult {
  Assignment target;  // G1 node j -> G2 node target[j]
  Labels y1, y2;
  int d = 0;
  int terms = 0;
  double captured_energy = 0.0;
  double lambda_m = 0.0, lambda_c = 0.0;
  double relaxed_objective = 0.0;  // model objective at the SDP optimum (minimization)
  double rounded_objective = 0.0;  // model objective at the rounded point
  double lawler = 0.0;             // x^T K x of the rounded matching
  double cut1 = 0.0, cut2 = 0.0;   // MAX CUT values of the rounded labels
  int violations = 0;              // matched pairs split across clusters
  int dummies = 0;                 // padded nodes (appended to the smaller graph)
  SolveReport report;
  StageTimes times;
  Matrix x_relaxed;
  Vector y_relaxed;
};

namespace detail {

class Stopwatch {
 public:
  double lap() {
    const auto now = std::chrono::steady_clock::now();
    const double s = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    return s;
  }

 private:
  std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

/// Node coordinates for the intra-graph affinity; graphs without coordinates use
/// a low-dimensional spectral embedding of their adjacency.
inline Matrix node_points(const Graph& g) {
  if (g.coords) return *g.coords;
  const Matrix a = build_adjacency(g);
  return hope(0.5 * (a + a.transpose()), std::min(3, g.n)).p;
}

inline Graph pad_graph(const Graph& g, int n) {
  Graph out = g;
  out.n = n;
  if (g.coords) {
    Matrix c = Matrix::Zero(g.coords->rows(), n);
    c.leftCols(g.n) = *g.coords;
    out.coords = c;
  }
  if (g.gt_cluster) out.gt_cluster->resize(n, 1);
  out.gt_match.reset();
  return out;
}

}  // namespace detail

/// Intra-graph affinity with padded nodes given zero rows and columns.
inline Matrix intra_affinity_padded(const Graph& g, int real_nodes) {
  Matrix w = pairwise_distances(detail::node_points(g));
  if (real_nodes < g.n) {
    w.rightCols(g.n - real_nodes).setZero();
    w.bottomRows(g.n - real_nodes).setZero();
  }
  return w;
}

inline Matrix pipeline_affinity(const Graph& g1, const Graph& g2, double kernel_scale) {
  require(kernel_scale > 0.0, "pipeline: edge kernel scale must be positive");
  return build_affinity_K(g1, g2, nullptr, [kernel_scale](double e1, double e2) {
    const double d = e1 - e2;
    return std::exp(-d * d / kernel_scale);
  });
}

/// Embeddings of the symmetrized factors with one common dimension.
inline std::vector<TermEmbedding> embed_terms(const std::vector<KroneckerTerm>& terms, const PipelineConfig& cfg,
                                              int& d_out) {
  require(!terms.empty(), "pipeline: no Kronecker terms");
  const int n = static_cast<int>(terms.front().a.rows());
  int d = 1;
  if (cfg.dim) {
    require(*cfg.dim >= 1, "pipeline: embedding dimension must be positive");
    d = std::min(*cfg.dim, n);
  } else {
    const int hi = std::min(cfg.d_max, n);
    const int lo = std::min(cfg.d_min, hi);
    for (const auto& t : terms)
      for (const Matrix* f : {&t.a, &t.b}) d = std::max(d, choose_dim(similarity_spectrum(*f), cfg.energy, lo, hi));
  }
  std::vector<TermEmbedding> out;
  for (const auto& t : terms) {
    const EmbeddingPair ea = hope(t.a, d), eb = hope(t.b, d);
    out.push_back({ea.p, ea.q, eb.p, eb.q});
  }
  d_out = d;
  return out;
}

/// End-to-end joint matching and clustering of two graphs.
inline JointResult solve_joint(const Graph& g1_in, const Graph& g2_in, const PipelineConfig& cfg,
                               const ConicSolver& solver = default_solver()) {
  g1_in.validate();
  g2_in.validate();
  require(cfg.k >= 1, "pipeline: k must be positive");
  JointResult res;
  Graph g1 = g1_in, g2 = g2_in;
  if (g1.n != g2.n) {
    if (!cfg.dummy_padding) throw InputError("pipeline: graphs differ in size (enable dummy padding)");
    const int n = std::max(g1.n, g2.n);
    res.dummies = n - std::min(g1.n, g2.n);
    if (g1.n < n) g1 = detail::pad_graph(g1, n);
    else g2 = detail::pad_graph(g2, n);
  }
  const int n = g1.n;
  detail::Stopwatch clock;

  const Matrix w1 = intra_affinity_padded(g1, g1_in.n), w2 = intra_affinity_padded(g2, g2_in.n);
  const Matrix kmat = pipeline_affinity(g1, g2, cfg.edge_kernel_scale);
  res.times.affinity = clock.lap();

  const KpsvdResult kp = kpsvd_decompose(kmat, std::min(cfg.k, n * n));
  if (kp.terms.empty()) throw NumericalError("pipeline: affinity has no dominant Kronecker term");
  const auto terms = symmetrize_terms(kp.terms);
  res.terms = static_cast<int>(terms.size());
  res.captured_energy = kp.captured_energy;
  res.times.kpsvd = clock.lap();

  const auto emb = embed_terms(terms, cfg, res.d);
  res.times.embedding = clock.lap();

  const JointModel jm = assemble_joint(emb, w1, w2, res.d, cfg.model);
  res.lambda_m = jm.lambda_m;
  res.lambda_c = jm.lambda_c;
  res.times.assembly = clock.lap();

  const SolveResult sol = solver(jm.program, cfg.solver);
  res.report = sol.report;
  res.times.solve = clock.lap();
  if (res.report.status == SolveStatus::numerical_failure || !sol.x.allFinite())
    throw NumericalError("pipeline: solver failed numerically");

  res.relaxed_objective = jm.program.c.dot(sol.x);
  res.x_relaxed = jm.relaxed_assignment(sol.x);
  res.y_relaxed = jm.has("y") ? jm.relaxed_labels(sol.x) : Vector::Zero(2 * n);
  res.target = project_permutation(res.x_relaxed);
  auto [y1, y2] = threshold_clusters(res.y_relaxed.cwiseMax(-1.0).cwiseMin(1.0));
  std::tie(y1, y2) = align_cluster_signs(y1, y2, res.target);
  if (cfg.repair) res.target = repair_assignment(res.x_relaxed, y1, y2);
  res.y1 = y1;
  res.y2 = y2;
  res.violations = consistency_report(res.target, y1, y2);
  res.lawler = lawler_objective(kmat, res.target);
  res.cut1 = maxcut_objective(w1, y1);
  res.cut2 = maxcut_objective(w2, y2);
  double cut_min = 0.0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) cut_min += w1(i, j) * y1[i] * y1[j] + w2(i, j) * y2[i] * y2[j];
  res.rounded_objective = jm.lambda_m * registration_value(emb, res.target) + jm.lambda_c * cut_min;
  res.times.rounding = clock.lap();
  return res;
}

struct BaselineResult {
  Assignment target;
  Labels y1, y2;
  double seconds = 0.0;
};

/// Naive two-stage baseline: spectral matching on K, 2-means on the first graph's
/// points, labels carried to the second graph through the matching.
inline BaselineResult solve_baseline(const Graph& g1, const Graph& g2, const PipelineConfig& cfg,
                                     std::uint64_t seed = 0) {
  g1.validate();
  g2.validate();
  require(g1.n == g2.n, "baseline: graphs differ in size");
  detail::Stopwatch clock;
  BaselineResult res;
  res.target = spectral_matching_baseline(pipeline_affinity(g1, g2, cfg.edge_kernel_scale));
  res.y1 = kmeans2_baseline(detail::node_points(g1), seed);
  res.y2.assign(g1.n, 1);
  for (int j = 0; j < g1.n; ++j) res.y2[res.target[j]] = res.y1[j];
  res.seconds = clock.lap();
  return res;
}

struct Scores {
  double m_acc = 0.0, f1 = 0.0, f2 = 0.0, c_acc = 0.0, mc_acc = 0.0;
};

/// Metrics against the ground truth stored in the graphs (g1.gt_match, gt_cluster).
inline Scores score(const Graph& g1, const Graph& g2, const Assignment& target, const Labels& y1, const Labels& y2) {
  if (!g1.gt_match || !g1.gt_cluster || !g2.gt_cluster) throw InputError("score: ground truth missing");
  Scores s;
  Assignment gt = *g1.gt_match;
  Assignment pred(target.begin(), target.begin() + g1.n);
  s.m_acc = m_acc(pred, gt);
  s.f1 = pairwise_f_score(Labels(y1.begin(), y1.begin() + g1.n), *g1.gt_cluster);
  s.f2 = pairwise_f_score(Labels(y2.begin(), y2.begin() + g2.n), *g2.gt_cluster);
  s.c_acc = c_acc(s.f1, s.f2);
  s.mc_acc = mc_acc(s.m_acc, s.f1, s.f2);
  return s;
}

}  // namespace jgmc
