#include "jgmc/io.hpp"
#include "jgmc/plot.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <filesystem>
#include <iostream>
#include <mutex>
#include <thread>

namespace fs = std::filesystem;
using namespace jgmc;

namespace {

constexpr int kExitOk = 0, kExitInput = 2, kExitNonconvergence = 3, kExitNumerical = 4;

struct PairFiles {
  std::string id;
  double sigma = 0.0;
  std::uint64_t seed = 0;
  std::string a, b;
};

std::vector<PairFiles> read_manifest(const std::string& path) {
  const Json j = read_json_file(path);
  if (!j.contains("pairs") || !j["pairs"].is_array()) throw InputError("manifest: missing pairs");
  const fs::path dir = fs::path(path).parent_path();
  std::vector<PairFiles> out;
  for (const auto& p : j["pairs"])
    out.push_back({p.at("id").get<std::string>(), p.at("sigma").get<double>(), p.at("seed").get<std::uint64_t>(),
                   (dir / p.at("a").get<std::string>()).string(), (dir / p.at("b").get<std::string>()).string()});
  return out;
}

// ---- flags shared by solve and sweep ----

struct RunFlags {
  std::string config;
  int k = 0;
  std::string dim, lambda_m, lambda_c, coupling_form;
  double tol = 0.0, kernel_scale = 0.0, time_limit = 0.0;
  int max_iters = 0;
  bool no_coupling = false, decoupled = false, repair = false, padding = false, no_anchor = false, no_tighten = false;
};

void add_run_flags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config, "JSON run-config; flags override it");
  cmd->add_option("--k", f.k, "Kronecker terms")->check(CLI::PositiveNumber);
  cmd->add_option("--dim", f.dim, "embedding dimension or 'auto'");
  cmd->add_option("--lambda-m", f.lambda_m, "matching weight or 'auto'");
  cmd->add_option("--lambda-c", f.lambda_c, "clustering weight or 'auto'");
  cmd->add_flag("--no-coupling", f.no_coupling, "drop the matching/clustering coupling");
  cmd->add_option("--coupling-form", f.coupling_form, "same | positive");
  cmd->add_flag("--decoupled-lbar", f.decoupled, "separate PSD block for the coupling variables");
  cmd->add_flag("--no-anchor", f.no_anchor, "do not fix y1_0 = +1");
  cmd->add_flag("--no-row-sums", f.no_tighten, "drop the row-sum tightening");
  cmd->add_flag("--repair", f.repair, "cluster-restricted re-assignment after rounding");
  cmd->add_flag("--dummy-padding", f.padding, "pad the smaller graph with isolated nodes");
  cmd->add_option("--tol", f.tol, "solver tolerance (primal, dual, gap)")->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", f.max_iters, "solver iteration cap")->check(CLI::PositiveNumber);
  cmd->add_option("--time-limit", f.time_limit, "solver time limit in seconds");
  cmd->add_option("--kernel-scale", f.kernel_scale, "edge kernel scale")->check(CLI::PositiveNumber);
}

std::optional<double> auto_or_number(const std::string& s, const char* what) {
  if (s == "auto") return std::nullopt;
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw InputError(std::string(what) + " must be a number or 'auto'");
  }
}

PipelineConfig build_config(const CLI::App* cmd, const RunFlags& f) {
  PipelineConfig cfg;
  if (!f.config.empty()) apply_config_json(read_json_file(f.config), cfg);
  if (cmd->count("--k")) cfg.k = f.k;
  if (cmd->count("--dim")) {
    if (f.dim == "auto") cfg.dim.reset();
    else cfg.dim = static_cast<int>(*auto_or_number(f.dim, "--dim"));
  }
  if (cmd->count("--lambda-m")) cfg.model.lambda_m = auto_or_number(f.lambda_m, "--lambda-m");
  if (cmd->count("--lambda-c")) cfg.model.lambda_c = auto_or_number(f.lambda_c, "--lambda-c");
  if (f.no_coupling) cfg.model.coupling = false;
  if (cmd->count("--coupling-form")) cfg.model.coupling_form = coupling_form_from_string(f.coupling_form);
  if (f.decoupled) cfg.model.decoupled_lbar = true;
  if (f.no_anchor) cfg.model.anchor_gauge = false;
  if (f.no_tighten) cfg.model.row_sum_tightening = false;
  if (f.repair) cfg.repair = true;
  if (f.padding) cfg.dummy_padding = true;
  if (cmd->count("--tol")) cfg.solver.eps_primal = cfg.solver.eps_dual = cfg.solver.eps_gap = f.tol;
  if (cmd->count("--max-iters")) cfg.solver.max_iters = f.max_iters;
  if (cmd->count("--time-limit")) cfg.solver.time_limit = f.time_limit;
  if (cmd->count("--kernel-scale")) cfg.edge_kernel_scale = f.kernel_scale;
  cfg.solver.validate();
  return cfg;
}

// ---- generate ----

int run_generate(const std::string& scenario_path, std::optional<std::uint64_t> seed, const std::string& out_dir) {
  const Json doc = read_json_file(scenario_path);
  SyntheticScenario spec = scenario_from_json(doc);
  if (seed) spec.seed = *seed;
  fs::create_directories(out_dir);
  Json manifest;
  manifest["scenario"] = scenario_to_json(spec);
  manifest["pairs"] = Json::array();
  const auto grid = sigma_grid(doc);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    SyntheticScenario s = spec;
    s.noise_sigma = grid[i];
    const auto [g1, g2] = gen_pair(s);
    const std::string stem = s.id + "_seed" + std::to_string(s.seed) + "_s" + std::to_string(i);
    write_json_file((fs::path(out_dir) / (stem + "_a.json")).string(), graph_to_json(g1));
    write_json_file((fs::path(out_dir) / (stem + "_b.json")).string(), graph_to_json(g2));
    manifest["pairs"].push_back(
        {{"id", stem}, {"sigma", grid[i]}, {"seed", s.seed}, {"a", stem + "_a.json"}, {"b", stem + "_b.json"}});
  }
  write_json_file((fs::path(out_dir) / "manifest.json").string(), manifest);
  std::cout << "wrote " << grid.size() << " pair(s) to " << out_dir << '\n';
  return kExitOk;
}

// ---- solve ----

int run_solve(const CLI::App* cmd, const RunFlags& flags, const std::vector<std::string>& pair,
              const std::string& out, const std::string& dump, const std::string& log_path) {
  const PipelineConfig cfg = build_config(cmd, flags);
  const Graph g1 = read_graph(pair.at(0)), g2 = read_graph(pair.at(1));
  std::ofstream log_file;
  PipelineConfig run = cfg;
  if (!log_path.empty()) {
    log_file.open(log_path);
    if (!log_file) throw InputError("cannot write '" + log_path + "'");
    run.solver.log = &log_file;
  }
  ConicSolver solver = default_solver();
  if (!dump.empty()) {
    solver = [dump](const ConicProgram& p, const SolverSettings& s) {
      write_json_file(dump, program_to_json(p));
      return solve(p, s);
    };
  }
  const JointResult res = solve_joint(g1, g2, run, solver);
  Json j = result_to_json(res);
  j["config"] = config_to_json(cfg);
  if (g1.gt_match && g1.gt_cluster && g2.gt_cluster && g1.n == g2.n) {
    const Scores s = score(g1, g2, res.target, res.y1, res.y2);
    j["scores"] = {{"m_acc", s.m_acc}, {"f1", s.f1}, {"f2", s.f2}, {"c_acc", s.c_acc}, {"mc_acc", s.mc_acc}};
  }
  if (out.empty()) std::cout << std::setw(2) << j << '\n';
  else write_json_file(out, j);
  std::cerr << "status " << to_string(res.report.status) << " after " << res.report.iterations << " iterations, "
            << res.times.total() << " s\n";
  return res.report.status == SolveStatus::optimal ? kExitOk : kExitNonconvergence;
}

// ---- eval ----

Scores score_stored(const Graph& g1, const Graph& g2, const StoredResult& r) {
  require(static_cast<int>(r.target.size()) >= g1.n, "eval: result does not cover the graphs");
  return score(g1, g2, r.target, r.y1, r.y2);
}

int run_eval(const std::string& result, const std::vector<std::string>& pair, const std::string& dir,
             const std::string& id, double sigma, const std::string& method, const std::string& out) {
  std::vector<CsvRow> rows;
  if (!dir.empty()) {
    for (const auto& p : read_manifest((fs::path(dir) / "manifest.json").string())) {
      const fs::path rp = fs::path(dir) / (p.id + "_result.json");
      if (!fs::exists(rp)) throw InputError("eval: missing result " + rp.string());
      const StoredResult r = stored_result_from_json(read_json_file(rp.string()));
      rows.push_back(make_row(p.id, p.sigma, method, score_stored(read_graph(p.a), read_graph(p.b), r), r.seconds));
    }
  } else {
    if (result.empty() || pair.size() != 2) throw InputError("eval: need --result and --gt a.json b.json (or --dir)");
    const StoredResult r = stored_result_from_json(read_json_file(result));
    rows.push_back(make_row(id, sigma, method, score_stored(read_graph(pair[0]), read_graph(pair[1]), r), r.seconds));
  }
  if (out.empty()) {
    std::cout << kCsvHeader << '\n';
    for (const auto& r : rows) std::cout << to_csv(r) << '\n';
  } else {
    append_csv(out, rows);
  }
  return kExitOk;
}

// ---- sweep ----

struct SweepTask {
  std::string id;
  double sigma;
  std::uint64_t seed;
  std::string method;
  SyntheticScenario spec;
};

int run_sweep(const CLI::App* cmd, const RunFlags& flags, const std::string& scenario_path, int seeds,
              std::uint64_t first_seed, const std::vector<std::string>& methods, int workers, const std::string& out) {
  const PipelineConfig cfg = build_config(cmd, flags);
  const Json doc = read_json_file(scenario_path);
  const SyntheticScenario base = scenario_from_json(doc);
  const auto grid = sigma_grid(doc);
  for (const auto& m : methods)
    require(m == "joint" || m == "no-coupling" || m == "baseline", "sweep: unknown method '" + m + "'");
  std::vector<SweepTask> tasks;
  for (std::size_t g = 0; g < grid.size(); ++g)
    for (int s = 0; s < seeds; ++s)
      for (const auto& m : methods) {
        SyntheticScenario spec = base;
        spec.noise_sigma = grid[g];
        spec.seed = first_seed + static_cast<std::uint64_t>(s);
        tasks.push_back({base.id + "_seed" + std::to_string(spec.seed) + "_s" + std::to_string(g), grid[g], spec.seed,
                         m, spec});
      }
  std::vector<std::optional<CsvRow>> rows(tasks.size());
  std::vector<std::string> errors(tasks.size());
  std::atomic<std::size_t> next{0};
  std::mutex print;
  const auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      const auto& t = tasks[i];
      try {
        const auto [g1, g2] = gen_pair(t.spec);
        if (t.method == "baseline") {
          const BaselineResult b = solve_baseline(g1, g2, cfg, t.seed);
          rows[i] = make_row(t.id, t.sigma, t.method, score(g1, g2, b.target, b.y1, b.y2), b.seconds);
        } else {
          PipelineConfig c = cfg;
          if (t.method == "no-coupling") c.model.coupling = false;
          const JointResult r = solve_joint(g1, g2, c);
          rows[i] = make_row(t.id, t.sigma, t.method, score(g1, g2, r.target, r.y1, r.y2), r.times.total());
          if (r.report.status != SolveStatus::optimal) errors[i] = "status " + to_string(r.report.status);
        }
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
      std::lock_guard<std::mutex> lock(print);
      std::cerr << '[' << i + 1 << '/' << tasks.size() << "] " << t.id << ' ' << t.method
                << (rows[i] ? " mc_acc " + std::to_string(rows[i]->mc_acc) : std::string(" failed"))
                << (errors[i].empty() ? "" : " (" + errors[i] + ")") << '\n';
    }
  };
  std::vector<std::thread> pool;
  for (int w = 0; w < std::max(1, workers); ++w) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  std::vector<CsvRow> done;
  int failed = 0;
  for (const auto& r : rows)
    if (r) done.push_back(*r);
    else ++failed;
  if (out.empty()) {
    std::cout << kCsvHeader << '\n';
    for (const auto& r : done) std::cout << to_csv(r) << '\n';
  } else {
    append_csv(out, done);
  }
  return failed ? kExitNumerical : kExitOk;
}

// ---- import-cmu ----

int run_import_cmu(const std::string& frames_path, int a, int b, int keep, const std::string& out_dir) {
  const auto [g1, g2] = load_cmu_house(frames_path, a, b, keep);
  fs::create_directories(out_dir);
  const std::string stem = "cmu_" + std::to_string(a) + "_" + std::to_string(b);
  write_json_file((fs::path(out_dir) / (stem + "_a.json")).string(), graph_to_json(g1));
  write_json_file((fs::path(out_dir) / (stem + "_b.json")).string(), graph_to_json(g2));
  std::cout << "wrote " << stem << "_a.json, " << stem << "_b.json\n";
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Joint graph matching and two-way clustering via a convex relaxation"};
  app.require_subcommand(1);

  auto* gen = app.add_subcommand("generate", "write synthetic graph pairs with ground truth");
  std::string scenario, out_dir;
  std::uint64_t seed = 0;
  gen->add_option("--scenario", scenario, "scenario JSON")->required()->check(CLI::ExistingFile);
  gen->add_option("--seed", seed, "override the scenario seed");
  gen->add_option("--out", out_dir, "output directory")->required();

  auto* sol = app.add_subcommand("solve", "match and cluster one graph pair");
  RunFlags solve_flags;
  std::vector<std::string> pair;
  std::string out, dump, log_path;
  add_run_flags(sol, solve_flags);
  sol->add_option("--pair", pair, "two graph JSON files")->required()->expected(2);
  sol->add_option("--out", out, "result JSON (stdout if omitted)");
  sol->add_option("--dump-program", dump, "write the conic program as JSON");
  sol->add_option("--log", log_path, "solver iteration log (CSV)");

  auto* ev = app.add_subcommand("eval", "score results against ground truth");
  std::string result, eval_dir, eval_id = "pair", method = "joint", csv_out;
  std::vector<std::string> gt;
  double sigma = 0.0;
  ev->add_option("--result", result, "result JSON");
  ev->add_option("--gt", gt, "graph pair with ground truth")->expected(2);
  ev->add_option("--dir", eval_dir, "directory with manifest.json and <id>_result.json files");
  ev->add_option("--id", eval_id, "scenario id for the CSV row");
  ev->add_option("--sigma", sigma, "noise level for the CSV row");
  ev->add_option("--method", method, "method name for the CSV row");
  ev->add_option("--out", csv_out, "CSV file to append to (stdout if omitted)");

  auto* pl = app.add_subcommand("plot", "SVG chart of a metric against sigma");
  std::string csv_in, svg_out, metric = "mc_acc";
  pl->add_option("--csv", csv_in, "CSV input")->required()->check(CLI::ExistingFile);
  pl->add_option("--out", svg_out, "SVG output")->required();
  pl->add_option("--metric", metric, "m_acc | f1 | f2 | c_acc | mc_acc | secs");

  auto* sw = app.add_subcommand("sweep", "run methods over a sigma grid and seeds");
  RunFlags sweep_flags;
  std::string sweep_scenario, sweep_out;
  int seeds = 10, workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::uint64_t first_seed = 1;
  std::vector<std::string> methods{"joint", "no-coupling", "baseline"};
  add_run_flags(sw, sweep_flags);
  sw->add_option("--scenario", sweep_scenario, "scenario JSON with sigma_grid")->required()->check(CLI::ExistingFile);
  sw->add_option("--seeds", seeds, "seeds per sigma")->check(CLI::PositiveNumber);
  sw->add_option("--first-seed", first_seed, "first seed");
  sw->add_option("--methods", methods, "joint, no-coupling, baseline")->delimiter(',');
  sw->add_option("--workers", workers, "parallel instances")->check(CLI::PositiveNumber);
  sw->add_option("--out", sweep_out, "CSV file to append to (stdout if omitted)");

  auto* cmu = app.add_subcommand("import-cmu", "convert two frames of a landmark file to graph JSON");
  std::string frames;
  int frame_a = 1, frame_b = 2, keep = 30;
  cmu->add_option("--frames", frames, "landmark file")->required()->check(CLI::ExistingFile);
  cmu->add_option("--a", frame_a, "first frame (1-based)");
  cmu->add_option("--b", frame_b, "second frame (1-based)");
  cmu->add_option("--keep", keep, "landmarks kept");
  cmu->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*gen) return run_generate(scenario, gen->count("--seed") ? std::optional(seed) : std::nullopt, out_dir);
    if (*sol) return run_solve(sol, solve_flags, pair, out, dump, log_path);
    if (*ev) return run_eval(result, gt, eval_dir, eval_id, sigma, method, csv_out);
    if (*pl) {
      std::ofstream svg(svg_out);
      if (!svg) throw InputError("cannot write '" + svg_out + "'");
      svg << svg_chart(read_csv(csv_in), metric);
      return kExitOk;
    }
    if (*sw) return run_sweep(sw, sweep_flags, sweep_scenario, seeds, first_seed, methods, workers, sweep_out);
    if (*cmu) return run_import_cmu(frames, frame_a, frame_b, keep, out_dir);
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kExitNumerical;
  }
  return kExitOk;
}
