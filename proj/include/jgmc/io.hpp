#pragma once

#include "jgmc/datasets.hpp"
#include "jgmc/pipeline.hpp"

#include <json.hpp>

#include <fstream>
#include <iomanip>
#include <sstream>

namespace jgmc {

using Json = nlohmann::ordered_json;

// ---- files ----

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

inline void write_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write '" + path + "'");
  out << std::setw(2) << j << '\n';
}

namespace detail {

template <class T>
T field(const Json& j, const char* key, const T& fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception& e) {
    throw InputError(std::string("field '") + key + "': " + e.what());
  }
}

template <class T>
T required_field(const Json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) throw InputError(std::string("missing field '") + key + "'");
  return field<T>(j, key, T{});
}

}  // namespace detail

// ---- matrices (row-major nested arrays) ----

inline Json matrix_to_json(const Matrix& m) {
  Json rows = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    Json row = Json::array();
    for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

inline Matrix matrix_from_json(const Json& j) {
  if (!j.is_array()) throw InputError("matrix: expected an array of rows");
  const auto rows = static_cast<Eigen::Index>(j.size());
  const auto cols = rows ? static_cast<Eigen::Index>(j.front().size()) : 0;
  Matrix m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r) {
    const Json& row = j[r];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) throw InputError("matrix: ragged rows");
    for (Eigen::Index c = 0; c < cols; ++c) {
      if (!row[c].is_number()) throw InputError("matrix: non-numeric entry");
      m(r, c) = row[c].get<double>();
    }
  }
  return m;
}

// ---- graphs ----

inline Json graph_to_json(const Graph& g) {
  Json j;
  j["n"] = g.n;
  j["directed"] = g.directed;
  j["coords"] = g.coords ? matrix_to_json(g.coords->transpose()) : Json(nullptr);
  Json edges = Json::array();
  for (const auto& e : g.edges) edges.push_back({e.src, e.dst, e.weight});
  j["edges"] = edges;
  j["gt_cluster"] = g.gt_cluster ? Json(*g.gt_cluster) : Json(nullptr);
  j["gt_match"] = g.gt_match ? Json(*g.gt_match) : Json(nullptr);
  return j;
}

inline Graph graph_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("graph: expected a JSON object");
  Graph g;
  g.n = detail::required_field<int>(j, "n");
  g.directed = detail::field<bool>(j, "directed", false);
  if (j.contains("coords") && !j["coords"].is_null()) g.coords = Matrix(matrix_from_json(j["coords"]).transpose());
  if (j.contains("edges")) {
    if (!j["edges"].is_array()) throw InputError("graph: edges must be an array");
    for (const auto& e : j["edges"]) {
      if (!e.is_array() || e.size() < 2 || e.size() > 3) throw InputError("graph: edge must be [src, dst] or [src, dst, w]");
      Edge edge{e[0].get<int>(), e[1].get<int>(), e.size() == 3 ? e[2].get<double>() : 1.0};
      g.edges.push_back(edge);
    }
  }
  if (j.contains("gt_cluster") && !j["gt_cluster"].is_null()) g.gt_cluster = j["gt_cluster"].get<Labels>();
  if (j.contains("gt_match") && !j["gt_match"].is_null()) g.gt_match = j["gt_match"].get<Assignment>();
  g.validate();
  return g;
}

inline Graph read_graph(const std::string& path) {
  try {
    return graph_from_json(read_json_file(path));
  } catch (const Json::exception& e) {
    throw InputError("'" + path + "': " + e.what());
  }
}

// ---- scenarios ----

inline Json scenario_to_json(const SyntheticScenario& s) {
  Json j;
  j["id"] = s.id;
  j["dimension"] = s.dimension;
  Json prims = Json::array();
  for (const auto& p : s.primitives) prims.push_back({{"shape", to_string(p.shape)}, {"cluster", p.cluster}});
  j["primitives"] = prims;
  j["separation"] = s.separation;
  j["spacing"] = s.spacing;
  j["irregularity"] = s.irregularity;
  j["noise_sigma"] = s.noise_sigma;
  if (s.outliers) {
    j["outliers"] = {{"count", s.outliers->count},
                     {"spread", s.outliers->spread},
                     {"label", s.outliers->label ? Json(*s.outliers->label) : Json(nullptr)},
                     {"offset", s.outliers->offset}};
  } else {
    j["outliers"] = nullptr;
  }
  j["knn_k"] = s.knn_k;
  j["shuffle"] = s.shuffle;
  j["seed"] = s.seed;
  return j;
}

inline SyntheticScenario scenario_from_json(const Json& j) {
  if (!j.is_object()) throw InputError("scenario: expected a JSON object");
  SyntheticScenario s;
  s.id = detail::field<std::string>(j, "id", s.id);
  s.dimension = detail::field<int>(j, "dimension", s.dimension);
  if (!j.contains("primitives") || !j["primitives"].is_array()) throw InputError("scenario: missing primitives");
  for (const auto& p : j["primitives"]) {
    if (p.is_string()) throw InputError("scenario: primitive needs {\"shape\", \"cluster\"}");
    s.primitives.push_back({primitive_from_string(detail::required_field<std::string>(p, "shape")),
                            detail::required_field<int>(p, "cluster")});
  }
  s.separation = detail::field<double>(j, "separation", s.separation);
  s.spacing = detail::field<double>(j, "spacing", s.spacing);
  s.irregularity = detail::field<double>(j, "irregularity", s.irregularity);
  s.noise_sigma = detail::field<double>(j, "noise_sigma", s.noise_sigma);
  if (j.contains("outliers") && !j["outliers"].is_null()) {
    const Json& o = j["outliers"];
    OutlierSpec spec;
    spec.count = detail::field<int>(o, "count", spec.count);
    spec.spread = detail::field<double>(o, "spread", spec.spread);
    if (o.contains("label") && !o["label"].is_null()) spec.label = o["label"].get<int>();
    spec.offset = detail::field<double>(o, "offset", spec.offset);
    s.outliers = spec;
  }
  s.knn_k = detail::field<int>(j, "knn_k", s.knn_k);
  s.shuffle = detail::field<bool>(j, "shuffle", s.shuffle);
  s.seed = detail::field<std::uint64_t>(j, "seed", s.seed);
  return s;
}

/// Noise levels of a scenario document: "sigma_grid" if present, else the single noise_sigma.
inline std::vector<double> sigma_grid(const Json& j) {
  if (j.contains("sigma_grid")) {
    const auto grid = j["sigma_grid"].get<std::vector<double>>();
    if (grid.empty()) throw InputError("scenario: sigma_grid is empty");
    for (double s : grid) require(s >= 0.0, "scenario: sigma must be >= 0");
    return grid;
  }
  return {detail::field<double>(j, "noise_sigma", 0.0)};
}

// ---- run configuration ----

inline void apply_solver_json(const Json& j, SolverSettings& s) {
  if (j.contains("tol")) s.eps_primal = s.eps_dual = s.eps_gap = j["tol"].get<double>();
  s.eps_primal = detail::field<double>(j, "eps_primal", s.eps_primal);
  s.eps_dual = detail::field<double>(j, "eps_dual", s.eps_dual);
  s.eps_gap = detail::field<double>(j, "eps_gap", s.eps_gap);
  s.max_iters = detail::field<int>(j, "max_iters", s.max_iters);
  s.alpha = detail::field<double>(j, "alpha", s.alpha);
  s.rho = detail::field<double>(j, "rho", s.rho);
  s.adaptive_rho = detail::field<bool>(j, "adaptive_rho", s.adaptive_rho);
  s.anderson_memory = detail::field<int>(j, "anderson_memory", s.anderson_memory);
  s.time_limit = detail::field<double>(j, "time_limit", s.time_limit);
  s.seed = detail::field<std::uint64_t>(j, "seed", s.seed);
  s.validate();
}

namespace detail {

inline std::optional<double> auto_or_real(const Json& j, const char* key, std::optional<double> fallback) {
  if (!j.contains(key)) return fallback;
  const Json& v = j[key];
  if (v.is_null() || (v.is_string() && v.get<std::string>() == "auto")) return std::nullopt;
  if (!v.is_number()) throw InputError(std::string("field '") + key + "' must be a number or \"auto\"");
  return v.get<double>();
}

}  // namespace detail

inline CouplingForm coupling_form_from_string(const std::string& s) {
  if (s == "same" || s == "same_cluster") return CouplingForm::same_cluster;
  if (s == "positive" || s == "positive_cluster") return CouplingForm::positive_cluster;
  throw InputError("unknown coupling form '" + s + "'");
}

inline std::string to_string(CouplingForm f) { return f == CouplingForm::same_cluster ? "same" : "positive"; }

/// Overlays a JSON run-config onto `cfg`; absent keys keep their current values.
inline void apply_config_json(const Json& j, PipelineConfig& cfg) {
  if (!j.is_object()) throw InputError("config: expected a JSON object");
  cfg.k = detail::field<int>(j, "k", cfg.k);
  if (j.contains("dim")) {
    const Json& d = j["dim"];
    if (d.is_null() || (d.is_string() && d.get<std::string>() == "auto")) cfg.dim.reset();
    else if (d.is_number_integer()) cfg.dim = d.get<int>();
    else throw InputError("config: dim must be an integer or \"auto\"");
  }
  cfg.energy = detail::field<double>(j, "energy", cfg.energy);
  cfg.d_min = detail::field<int>(j, "d_min", cfg.d_min);
  cfg.d_max = detail::field<int>(j, "d_max", cfg.d_max);
  cfg.edge_kernel_scale = detail::field<double>(j, "edge_kernel_scale", cfg.edge_kernel_scale);
  cfg.model.lambda_m = detail::auto_or_real(j, "lambda_m", cfg.model.lambda_m);
  cfg.model.lambda_c = detail::auto_or_real(j, "lambda_c", cfg.model.lambda_c);
  cfg.model.coupling = detail::field<bool>(j, "coupling", cfg.model.coupling);
  if (j.contains("coupling_form")) cfg.model.coupling_form = coupling_form_from_string(j["coupling_form"].get<std::string>());
  cfg.model.decoupled_lbar = detail::field<bool>(j, "decoupled_lbar", cfg.model.decoupled_lbar);
  cfg.model.row_sum_tightening = detail::field<bool>(j, "row_sum_tightening", cfg.model.row_sum_tightening);
  cfg.model.anchor_gauge = detail::field<bool>(j, "anchor", cfg.model.anchor_gauge);
  cfg.repair = detail::field<bool>(j, "repair", cfg.repair);
  cfg.dummy_padding = detail::field<bool>(j, "dummy_padding", cfg.dummy_padding);
  if (j.contains("solver")) apply_solver_json(j["solver"], cfg.solver);
}

inline Json config_to_json(const PipelineConfig& cfg) {
  Json j;
  j["k"] = cfg.k;
  j["dim"] = cfg.dim ? Json(*cfg.dim) : Json("auto");
  j["energy"] = cfg.energy;
  j["d_min"] = cfg.d_min;
  j["d_max"] = cfg.d_max;
  j["edge_kernel_scale"] = cfg.edge_kernel_scale;
  j["lambda_m"] = cfg.model.lambda_m ? Json(*cfg.model.lambda_m) : Json("auto");
  j["lambda_c"] = cfg.model.lambda_c ? Json(*cfg.model.lambda_c) : Json("auto");
  j["coupling"] = cfg.model.coupling;
  j["coupling_form"] = to_string(cfg.model.coupling_form);
  j["decoupled_lbar"] = cfg.model.decoupled_lbar;
  j["row_sum_tightening"] = cfg.model.row_sum_tightening;
  j["anchor"] = cfg.model.anchor_gauge;
  j["repair"] = cfg.repair;
  j["dummy_padding"] = cfg.dummy_padding;
  const auto& s = cfg.solver;
  j["solver"] = {{"eps_primal", s.eps_primal}, {"eps_dual", s.eps_dual},   {"eps_gap", s.eps_gap},
                 {"max_iters", s.max_iters},   {"alpha", s.alpha},         {"rho", s.rho},
                 {"adaptive_rho", s.adaptive_rho}, {"anderson_memory", s.anderson_memory},
                 {"time_limit", s.time_limit}, {"seed", s.seed}};
  return j;
}

// ---- results ----

inline Json report_to_json(const SolveReport& r) {
  return {{"status", to_string(r.status)},
          {"iterations", r.iterations},
          {"primal_residual", r.primal_residual},
          {"dual_residual", r.dual_residual},
          {"gap", r.gap},
          {"objective", r.objective},
          {"dual_objective", r.dual_objective},
          {"seconds", r.seconds},
          {"rho", r.rho}};
}

inline Json result_to_json(const JointResult& r) {
  Json j;
  j["target"] = r.target;
  j["y1"] = r.y1;
  j["y2"] = r.y2;
  j["d"] = r.d;
  j["terms"] = r.terms;
  j["captured_energy"] = r.captured_energy;
  j["lambda_m"] = r.lambda_m;
  j["lambda_c"] = r.lambda_c;
  j["relaxed_objective"] = r.relaxed_objective;
  j["rounded_objective"] = r.rounded_objective;
  j["lawler"] = r.lawler;
  j["cut1"] = r.cut1;
  j["cut2"] = r.cut2;
  j["violations"] = r.violations;
  j["dummies"] = r.dummies;
  j["solver"] = report_to_json(r.report);
  j["times"] = {{"affinity", r.times.affinity},   {"kpsvd", r.times.kpsvd}, {"embedding", r.times.embedding},
                {"assembly", r.times.assembly},   {"solve", r.times.solve}, {"rounding", r.times.rounding},
                {"total", r.times.total()}};
  return j;
}

struct StoredResult {
  Assignment target;
  Labels y1, y2;
  double seconds = 0.0;
  std::string status;
};

inline StoredResult stored_result_from_json(const Json& j) {
  StoredResult r;
  r.target = detail::required_field<Assignment>(j, "target");
  r.y1 = detail::required_field<Labels>(j, "y1");
  r.y2 = detail::required_field<Labels>(j, "y2");
  require(r.target.size() == r.y1.size() && r.y1.size() == r.y2.size(), "result: size mismatch");
  if (j.contains("times")) r.seconds = detail::field<double>(j["times"], "total", 0.0);
  if (j.contains("solver")) r.status = detail::field<std::string>(j["solver"], "status", "");
  return r;
}

// ---- problem dump ----

inline Json program_to_json(const ConicProgram& p) {
  Json j;
  j["variables"] = p.variables();
  j["constraints"] = p.constraints();
  j["cones"] = {{"free", p.cones.free}, {"nonneg", p.cones.nonneg}, {"psd", p.cones.psd}};
  j["objective_offset"] = p.objective_offset;
  j["c"] = std::vector<double>(p.c.data(), p.c.data() + p.c.size());
  j["b"] = std::vector<double>(p.b.data(), p.b.data() + p.b.size());
  Json triplets = Json::array();
  for (int k = 0; k < p.a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(p.a, k); it; ++it)
      triplets.push_back({it.row(), it.col(), it.value()});
  j["a"] = triplets;
  return j;
}

// ---- CSV ----

struct CsvRow {
  std::string scenario;
  double sigma = 0.0;
  std::string method;
  double m_acc = 0.0, f1 = 0.0, f2 = 0.0, c_acc = 0.0, mc_acc = 0.0, secs = 0.0;
};

inline constexpr const char* kCsvHeader = "scenario,sigma,method,m_acc,f1,f2,c_acc,mc_acc,secs";

inline CsvRow make_row(std::string scenario, double sigma, std::string method, const Scores& s, double secs) {
  return {std::move(scenario), sigma, std::move(method), s.m_acc, s.f1, s.f2, s.c_acc, s.mc_acc, secs};
}

inline std::string to_csv(const CsvRow& r) {
  std::ostringstream out;
  out << std::setprecision(10) << r.scenario << ',' << r.sigma << ',' << r.method << ',' << r.m_acc << ',' << r.f1
      << ',' << r.f2 << ',' << r.c_acc << ',' << r.mc_acc << ',' << r.secs;
  return out.str();
}

/// Appends rows, writing the header when the file is new or empty.
inline void append_csv(const std::string& path, const std::vector<CsvRow>& rows) {
  bool fresh = true;
  {
    std::ifstream probe(path);
    fresh = !probe || probe.peek() == std::ifstream::traits_type::eof();
  }
  std::ofstream out(path, std::ios::app);
  if (!out) throw InputError("cannot write '" + path + "'");
  if (fresh) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << to_csv(r) << '\n';
}

inline std::vector<CsvRow> read_csv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    if (header) {
      header = false;
      if (line.rfind("scenario,", 0) == 0) continue;
    }
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (cells.size() != 9) throw InputError("csv: expected 9 columns in '" + line + "'");
    try {
      rows.push_back({cells[0], std::stod(cells[1]), cells[2], std::stod(cells[3]), std::stod(cells[4]),
                      std::stod(cells[5]), std::stod(cells[6]), std::stod(cells[7]), std::stod(cells[8])});
    } catch (const std::exception&) {
      throw InputError("csv: bad number in '" + line + "'");
    }
  }
  return rows;
}

inline std::vector<CsvRow> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open '" + path + "'");
  return read_csv(in);
}

}  // namespace jgmc
