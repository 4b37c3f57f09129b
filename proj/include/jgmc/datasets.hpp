#pragma once

#include "jgmc/delaunay.hpp"
#include "jgmc/graph.hpp"

#include <cstdint>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>

namespace jgmc {

enum class Primitive { prism, box, pyramid4, pyramid5 };

inline int corner_count(Primitive p) {
  switch (p) {
    case Primitive::prism: return 6;
    case Primitive::box: return 8;
    case Primitive::pyramid4: return 4;
    case Primitive::pyramid5: return 5;
  }
  return 0;
}

inline Primitive primitive_from_string(const std::string& s) {
  if (s == "prism") return Primitive::prism;
  if (s == "box") return Primitive::box;
  if (s == "pyramid4") return Primitive::pyramid4;
  if (s == "pyramid5" || s == "pyramid") return Primitive::pyramid5;
  throw InputError("unknown primitive '" + s + "'");
}

inline std::string to_string(Primitive p) {
  switch (p) {
    case Primitive::prism: return "prism";
    case Primitive::box: return "box";
    case Primitive::pyramid4: return "pyramid4";
    case Primitive::pyramid5: return "pyramid5";
  }
  return "?";
}

struct PrimitivePlacement {
  Primitive shape = Primitive::box;
  int cluster = 1;  // +1 or -1
};

struct OutlierSpec {
  int count = 0;
  double spread = 0.1;
  std::optional<int> label;  // defaults to the nearest node's cluster
  double offset = 2.5;       // distance of the outlier centre from its cluster, in primitive diameters
};

/// Synthetic two-cluster scene: primitive corners become nodes.
struct SyntheticScenario {
  std::string id = "scenario";
  int dimension = 2;  // 2: Delaunay edges, 3: k-NN edges
  std::vector<PrimitivePlacement> primitives;
  double separation = 6.0;   // cross-cluster centroid distance, in primitive diameters
  double spacing = 2.0;      // within-cluster centroid distance, in primitive diameters
  double irregularity = 0.1;  // uniform corner jitter relative to primitive size
  double noise_sigma = 0.0;
  std::optional<OutlierSpec> outliers;
  int knn_k = 4;
  bool shuffle = false;  // permute the node order of the second graph
  std::uint64_t seed = 1;

  int node_count() const {
    int n = 0;
    for (const auto& p : primitives) n += corner_count(p.shape);
    return n + (outliers ? outliers->count : 0);
  }
};

namespace detail {

inline Matrix primitive_corners(Primitive p) {
  const double h = std::sqrt(3.0) / 2.0;
  Matrix c;
  switch (p) {
    case Primitive::prism:
      c.resize(3, 6);
      c << 0, 1, 0.5, 0, 1, 0.5,  //
          0, 0, h, 0, 0, h,       //
          0, 0, 0, 1.2, 1.2, 1.2;
      break;
    case Primitive::box:
      c.resize(3, 8);
      c << 0, 1, 1, 0, 0, 1, 1, 0,  //
          0, 0, 0.8, 0.8, 0, 0, 0.8, 0.8,  //
          0, 0, 0, 0, 0.6, 0.6, 0.6, 0.6;
      break;
    case Primitive::pyramid4:
      c.resize(3, 4);
      c << 0, 1, 0.5, 0.5,  //
          0, 0, h, h / 3,   //
          0, 0, 0, 1.0;
      break;
    case Primitive::pyramid5:
      c.resize(3, 5);
      c << 0, 1, 1, 0, 0.5,  //
          0, 0, 1, 1, 0.5,   //
          0, 0, 0, 0, 1.1;
      break;
  }
  const Eigen::Vector3d centroid = c.rowwise().mean();
  return c.colwise() - centroid;
}

inline Eigen::Matrix3d random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::Quaterniond q(gauss(rng), gauss(rng), gauss(rng), gauss(rng));
  q.normalize();
  return q.toRotationMatrix();
}

inline double diameter(const Matrix& pts) { return pairwise_distances(pts).maxCoeff(); }

inline std::vector<Edge> scene_edges(const Matrix& coords, int knn_k) {
  const int n = static_cast<int>(coords.cols());
  if (coords.rows() != 2) return knn_edges(coords, std::min(knn_k, n - 1));
  // coincident points share the triangulation of their first occurrence
  std::vector<int> rep(n), distinct;
  for (int i = 0; i < n; ++i) {
    rep[i] = i;
    for (int d : distinct)
      if (coords.col(d) == coords.col(i)) rep[i] = d;
    if (rep[i] == i) distinct.push_back(i);
  }
  if (static_cast<int>(distinct.size()) == n) return delaunay_2d(coords);
  if (distinct.size() < 3) return knn_edges(coords, std::min(knn_k, n - 1));
  Matrix unique(2, static_cast<Eigen::Index>(distinct.size()));
  for (std::size_t u = 0; u < distinct.size(); ++u) unique.col(u) = coords.col(distinct[u]);
  std::vector<Edge> pairs;
  for (const Edge& e : delaunay_2d(unique)) {
    const int a = distinct[e.src], b = distinct[e.dst];
    for (int i = 0; i < n; ++i)
      if (rep[i] == a)
        for (int j = 0; j < n; ++j)
          if (rep[j] == b) pairs.push_back({i, j, e.weight});
  }
  for (int i = 0; i < n; ++i)
    if (rep[i] != i) pairs.push_back({rep[i], i, 0.0});
  return symmetric_edges(pairs);
}

}  // namespace detail

/// Regenerates the edge set from coordinates (Delaunay in 2D, k-NN in 3D).
inline void regenerate_edges(Graph& g, int knn_k = 4) {
  if (!g.coords) throw InputError("regenerate_edges: graph has no coordinates");
  g.edges = detail::scene_edges(*g.coords, knn_k);
}

/// Nominal primitive diameter used for placement and outlier offsets.
inline double nominal_diameter() { return 1.6; }

/// Appends `count` nodes drawn around a common random centre near the labelled cluster.
inline Graph add_clustered_outliers(const Graph& g, int count, double spread, std::uint64_t seed,
                                    std::optional<int> label = std::nullopt, double offset = 2.5,
                                    int knn_k = 4) {
  if (count <= 0) return g;
  if (!g.coords) throw InputError("add_clustered_outliers: graph has no coordinates");
  require(spread >= 0.0, "add_clustered_outliers: spread must be >= 0");
  std::mt19937_64 rng(seed * 0x9E3779B97F4A7C15ull + 7);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const Matrix& pts = *g.coords;
  const auto dim = pts.rows();

  Vector anchor = pts.rowwise().mean();
  if (label && g.gt_cluster) {
    Vector sum = Vector::Zero(dim);
    int m = 0;
    for (int i = 0; i < g.n; ++i)
      if ((*g.gt_cluster)[i] == *label) sum += pts.col(i), ++m;
    if (m > 0) anchor = sum / m;
  }
  Vector dir(dim);
  for (auto& v : dir) v = gauss(rng);
  dir.normalize();
  const Vector centre = anchor + offset * nominal_diameter() * dir;

  int out_label = label.value_or(1);
  if (!label && g.gt_cluster) {
    Eigen::Index nearest = 0;
    (pts.colwise() - centre).colwise().squaredNorm().minCoeff(&nearest);
    out_label = (*g.gt_cluster)[nearest];
  }

  Graph out = g;
  Matrix grown(dim, g.n + count);
  grown.leftCols(g.n) = pts;
  for (int i = 0; i < count; ++i) {
    Vector p = centre;
    for (auto& v : p) v += spread * gauss(rng);
    grown.col(g.n + i) = p;
  }
  out.n = g.n + count;
  out.coords = grown;
  if (g.gt_cluster) {
    out.gt_cluster->insert(out.gt_cluster->end(), count, out_label);
  } else {
    Labels l(g.n, 1);
    l.insert(l.end(), count, out_label);
    out.gt_cluster = l;
  }
  if (g.gt_match) {
    for (int i = 0; i < count; ++i) out.gt_match->push_back(g.n + i);
  }
  regenerate_edges(out, knn_k);
  return out;
}

/// Noise-free scene geometry with cluster labels (no edges yet).
inline Graph scenario_base(const SyntheticScenario& spec) {
  require(spec.dimension == 2 || spec.dimension == 3, "scenario: dimension must be 2 or 3");
  int pos = 0, neg = 0;
  for (const auto& p : spec.primitives) {
    require(p.cluster == 1 || p.cluster == -1, "scenario: primitive cluster must be +-1");
    (p.cluster == 1 ? pos : neg)++;
  }
  if (spec.primitives.size() < 2 || pos == 0 || neg == 0)
    throw InputError("scenario: two clusters need at least two primitives, one per cluster");

  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::uniform_real_distribution<double> scale(0.8, 1.2);
  const double diam = nominal_diameter();

  std::vector<Vector> corners;
  Labels labels;
  int placed_pos = 0, placed_neg = 0;
  for (const auto& prim : spec.primitives) {
    Matrix c = detail::primitive_corners(prim.shape);
    const double s = scale(rng);
    for (Eigen::Index i = 0; i < c.cols(); ++i)
      for (Eigen::Index r = 0; r < 3; ++r) c(r, i) += spec.irregularity * unit(rng);
    c = detail::random_rotation(rng) * (s * c);
    const int slot = prim.cluster == 1 ? placed_pos++ : placed_neg++;
    Eigen::Vector3d centroid(prim.cluster == 1 ? 0.0 : spec.separation * diam, slot * spec.spacing * diam, 0.0);
    for (Eigen::Index i = 0; i < c.cols(); ++i) {
      const Eigen::Vector3d p = c.col(i) + centroid;
      corners.push_back(p.head(spec.dimension));
      labels.push_back(prim.cluster);
    }
  }
  Graph g;
  g.n = static_cast<int>(corners.size());
  Matrix coords(spec.dimension, g.n);
  for (int i = 0; i < g.n; ++i) coords.col(i) = corners[i];
  g.coords = coords;
  g.gt_cluster = labels;
  return g;
}

/// Two graphs of one scene; the second carries N(0, sigma^2) noise per coordinate.
inline std::pair<Graph, Graph> gen_pair(const SyntheticScenario& spec) {
  require(spec.noise_sigma >= 0.0, "scenario: noise_sigma must be >= 0");
  Graph base = scenario_base(spec);
  if (spec.outliers && spec.outliers->count > 0) {
    const auto& o = *spec.outliers;
    base = add_clustered_outliers(base, o.count, o.spread, spec.seed + 0x51u, o.label, o.offset, spec.knn_k);
  }
  Graph g1 = base;
  regenerate_edges(g1, spec.knn_k);

  std::mt19937_64 noise_rng(spec.seed * 0x2545F4914F6CDD1Dull + 0xABCDu);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix noisy = *base.coords;
  if (spec.noise_sigma > 0.0)
    for (Eigen::Index i = 0; i < noisy.size(); ++i) noisy(i) += spec.noise_sigma * gauss(noise_rng);

  Assignment target(base.n);
  for (int i = 0; i < base.n; ++i) target[i] = i;
  if (spec.shuffle) {
    std::mt19937_64 perm_rng(spec.seed ^ 0x5DEECE66Dull);
    std::shuffle(target.begin(), target.end(), perm_rng);
  }
  Graph g2;
  g2.n = base.n;
  Matrix moved(noisy.rows(), noisy.cols());
  Labels labels2(base.n);
  for (int j = 0; j < base.n; ++j) {
    moved.col(target[j]) = noisy.col(j);
    labels2[target[j]] = (*base.gt_cluster)[j];
  }
  g2.coords = moved;
  g2.gt_cluster = labels2;
  regenerate_edges(g2, spec.knn_k);
  g1.gt_match = target;
  g2.gt_match = inverse(target);
  return {g1, g2};
}

/// Renumbers the nodes of g: node j becomes node target[j]. Edges, coordinates and
/// cluster labels and this graph's gt_match entries move with their node.
inline Graph relabel_nodes(const Graph& g, const Assignment& target) {
  require(static_cast<int>(target.size()) == g.n, "relabel_nodes: permutation size mismatch");
  Graph out = g;
  if (g.coords)
    for (int j = 0; j < g.n; ++j) out.coords->col(target[j]) = g.coords->col(j);
  if (g.gt_cluster)
    for (int j = 0; j < g.n; ++j) (*out.gt_cluster)[target[j]] = (*g.gt_cluster)[j];
  if (g.gt_match)
    for (int j = 0; j < g.n; ++j) (*out.gt_match)[target[j]] = (*g.gt_match)[j];
  for (auto& e : out.edges) e.src = target[e.src], e.dst = target[e.dst];
  return out;
}

/// Landmark frames stored as whitespace-separated blocks of `landmarks` x 2 numbers.
inline std::vector<Matrix> read_landmark_frames(std::istream& in, int landmarks = 30) {
  std::vector<double> values;
  std::string token;
  while (in >> token) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(token, &used));
      if (used != token.size()) throw InputError("landmark file: bad number '" + token + "'");
    } catch (const std::logic_error&) {
      throw InputError("landmark file: bad number '" + token + "'");
    }
  }
  const std::size_t per_frame = static_cast<std::size_t>(landmarks) * 2;
  if (values.empty() || values.size() % per_frame != 0)
    throw InputError("landmark file: expected whole " + std::to_string(landmarks) + "x2 frames");
  std::vector<Matrix> frames;
  for (std::size_t f = 0; f < values.size() / per_frame; ++f) {
    Matrix m(2, landmarks);
    for (int i = 0; i < landmarks; ++i) {
      m(0, i) = values[f * per_frame + 2 * i];
      m(1, i) = values[f * per_frame + 2 * i + 1];
    }
    frames.push_back(m);
  }
  return frames;
}

inline void write_landmark_frames(std::ostream& out, const std::vector<Matrix>& frames) {
  out.precision(10);
  for (const auto& f : frames) {
    for (Eigen::Index i = 0; i < f.cols(); ++i) out << f(0, i) << ' ' << f(1, i) << '\n';
    out << '\n';
  }
}

/// Graph pair from two frames (1-based) of a CMU-House-style landmark file,
/// keeping the first `keep` landmarks.
inline std::pair<Graph, Graph> load_cmu_house(const std::vector<Matrix>& frames, int frame_a, int frame_b,
                                              int keep = 30) {
  const int count = static_cast<int>(frames.size());
  if (frame_a < 1 || frame_a > count || frame_b < 1 || frame_b > count)
    throw InputError("load_cmu_house: frame out of range");
  const int total = static_cast<int>(frames.front().cols());
  require(keep >= 3 && keep <= total, "load_cmu_house: landmark count must be in [3, " + std::to_string(total) + "]");
  auto make = [&](const Matrix& f) {
    Graph g;
    g.n = keep;
    g.coords = Matrix(f.leftCols(keep));
    g.edges = delaunay_2d(*g.coords);
    Assignment id(keep);
    for (int i = 0; i < keep; ++i) id[i] = i;
    g.gt_match = id;
    return g;
  };
  return {make(frames[frame_a - 1]), make(frames[frame_b - 1])};
}

inline std::pair<Graph, Graph> load_cmu_house(const std::string& path, int frame_a, int frame_b, int keep = 30) {
  std::ifstream in(path);
  if (!in) throw InputError("load_cmu_house: cannot open " + path);
  return load_cmu_house(read_landmark_frames(in), frame_a, frame_b, keep);
}

/// Rigid landmark sequence: a fixed 2D point set rotated and translated a little per
/// frame with isotropic pixel noise. Stands in for the CMU House sequence.
inline std::vector<Matrix> synthetic_landmark_sequence(int frame_count, int landmarks, std::uint64_t seed,
                                                       double pixel_noise = 1.0, double degrees_per_frame = 0.3) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(0.0, 400.0), uy(0.0, 300.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix base(2, landmarks);
  for (int i = 0; i < landmarks; ++i) base.col(i) << ux(rng), uy(rng);
  const Eigen::Vector2d centre = base.rowwise().mean();
  std::vector<Matrix> frames;
  for (int f = 0; f < frame_count; ++f) {
    const double t = f * degrees_per_frame * std::numbers::pi / 180.0;
    Eigen::Matrix2d rot;
    rot << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
    Matrix m = (rot * (base.colwise() - centre)).colwise() + centre;
    m.row(0).array() += 0.5 * f;
    for (Eigen::Index i = 0; i < m.size(); ++i) m(i) += pixel_noise * gauss(rng);
    frames.push_back(m);
  }
  return frames;
}

}  // namespace jgmc
