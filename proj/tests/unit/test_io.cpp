#include "jgmc/plot.hpp"

#include <gtest/gtest.h>

#include <filesystem>

using namespace jgmc;

namespace {

std::string temp_path(const std::string& name) {
  return (std::filesystem::temp_directory_path() / ("jgmc_test_" + name)).string();
}

SyntheticScenario small_scene() {
  SyntheticScenario s;
  s.id = "small";
  s.primitives = {{Primitive::pyramid4, 1}, {Primitive::pyramid4, -1}};
  s.noise_sigma = 0.02;
  s.shuffle = true;
  s.seed = 5;
  return s;
}

}  // namespace

TEST(JsonMatrix, RoundTrip) {
  Matrix m(2, 3);
  m << 1, 2, 3, 4, 5, 6.5;
  const Json j = matrix_to_json(m);
  EXPECT_EQ(j.dump(), "[[1.0,2.0,3.0],[4.0,5.0,6.5]]");
  EXPECT_EQ(matrix_from_json(j), m);
  EXPECT_THROW(matrix_from_json(Json::parse("[[1,2],[3]]")), InputError);
}

TEST(JsonGraph, RoundTrip) {
  const auto [g1, g2] = gen_pair(small_scene());
  const Graph back = graph_from_json(graph_to_json(g2));
  EXPECT_EQ(back.n, g2.n);
  EXPECT_EQ(back.edges, g2.edges);
  EXPECT_EQ(*back.coords, *g2.coords);
  EXPECT_EQ(*back.gt_cluster, *g2.gt_cluster);
  EXPECT_EQ(*back.gt_match, *g2.gt_match);
}

TEST(JsonGraph, Format) {
  Graph g;
  g.n = 2;
  g.edges = {{0, 1, 2.0}};
  g.directed = true;
  const Json j = graph_to_json(g);
  EXPECT_EQ(j["n"], 2);
  EXPECT_EQ(j["directed"], true);
  EXPECT_TRUE(j["coords"].is_null());
  EXPECT_EQ(j["edges"].dump(), "[[0,1,2.0]]");
}

TEST(JsonGraph, RejectsInvalid) {
  EXPECT_THROW(graph_from_json(Json::parse(R"({"n": 2, "edges": [[0, 5, 1]]})")), InputError);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"edges": []})")), InputError);
  EXPECT_THROW(graph_from_json(Json::parse(R"({"n": 2, "coords": [[0, 0]]})")), InputError);
  EXPECT_THROW(read_graph(temp_path("missing.json")), InputError);
}

TEST(JsonScenario, RoundTrip) {
  SyntheticScenario s = small_scene();
  s.outliers = OutlierSpec{3, 0.2, -1, 2.0};
  const SyntheticScenario back = scenario_from_json(scenario_to_json(s));
  EXPECT_EQ(scenario_to_json(back).dump(), scenario_to_json(s).dump());
  EXPECT_EQ(gen_pair(back).second.coords, gen_pair(s).second.coords);
}

TEST(JsonScenario, SigmaGrid) {
  EXPECT_EQ(sigma_grid(Json::parse(R"({"sigma_grid": [0, 0.1]})")), (std::vector<double>{0, 0.1}));
  EXPECT_EQ(sigma_grid(Json::parse(R"({"noise_sigma": 0.3})")), (std::vector<double>{0.3}));
}

TEST(JsonConfig, OverlayAndRoundTrip) {
  PipelineConfig cfg;
  apply_config_json(Json::parse(R"({"k": 3, "dim": 2, "lambda_c": 0, "coupling": false,
                                    "coupling_form": "positive", "solver": {"tol": 1e-3, "max_iters": 50}})"),
                    cfg);
  EXPECT_EQ(cfg.k, 3);
  EXPECT_EQ(*cfg.dim, 2);
  EXPECT_EQ(*cfg.model.lambda_c, 0.0);
  EXPECT_FALSE(cfg.model.lambda_m);
  EXPECT_FALSE(cfg.model.coupling);
  EXPECT_EQ(cfg.model.coupling_form, CouplingForm::positive_cluster);
  EXPECT_EQ(cfg.solver.eps_gap, 1e-3);
  EXPECT_EQ(cfg.solver.max_iters, 50);
  PipelineConfig again;
  apply_config_json(config_to_json(cfg), again);
  EXPECT_EQ(config_to_json(again).dump(), config_to_json(cfg).dump());
  apply_config_json(Json::parse(R"({"dim": "auto"})"), cfg);
  EXPECT_FALSE(cfg.dim);
}

TEST(JsonConfig, RejectsBadValues) {
  PipelineConfig cfg;
  EXPECT_THROW(apply_config_json(Json::parse(R"({"dim": 2.5})"), cfg), InputError);
  EXPECT_THROW(apply_config_json(Json::parse(R"({"coupling_form": "weird"})"), cfg), InputError);
  EXPECT_THROW(apply_config_json(Json::parse(R"({"solver": {"alpha": 3}})"), cfg), InputError);
  EXPECT_THROW(apply_config_json(Json::parse("[]"), cfg), InputError);
}

TEST(JsonConfig, ShippedPresetsLoad) {
  for (const char* name : {"cmu", "nodes11", "nodes28", "princeton", "desk33", "cmu15"}) {
    PipelineConfig cfg;
    EXPECT_NO_THROW(apply_config_json(read_json_file(std::string(JGMC_CONFIG_DIR) + "/" + name + ".json"), cfg))
        << name;
  }
  EXPECT_EQ(scenario_from_json(read_json_file(std::string(JGMC_CONFIG_DIR) + "/scenario_33.json")).node_count(), 33);
  EXPECT_EQ(scenario_from_json(read_json_file(std::string(JGMC_CONFIG_DIR) + "/scenario_28.json")).node_count(), 28);
  EXPECT_EQ(scenario_from_json(read_json_file(std::string(JGMC_CONFIG_DIR) + "/scenario_11.json")).node_count(), 11);
}

TEST(JsonResult, StoredFieldsRoundTrip) {
  JointResult r;
  r.target = {1, 0, 2};
  r.y1 = {1, 1, -1};
  r.y2 = {1, 1, -1};
  r.times.solve = 2.5;
  r.report.status = SolveStatus::optimal;
  const StoredResult s = stored_result_from_json(result_to_json(r));
  EXPECT_EQ(s.target, r.target);
  EXPECT_EQ(s.y2, r.y2);
  EXPECT_EQ(s.seconds, 2.5);
  EXPECT_EQ(s.status, "optimal");
  EXPECT_THROW(stored_result_from_json(Json::parse(R"({"target": [0], "y1": [1]})")), InputError);
}

TEST(JsonProgram, DumpHasTriplets) {
  ProgramBuilder b;
  const auto x = b.add_free();
  b.add_equality({ProgramBuilder::scalar(x, 2.0)}, 4.0);
  b.add_objective(0, ProgramBuilder::scalar(x));
  const Json j = program_to_json(b.finalize({1.0, 0.0}));
  EXPECT_EQ(j["variables"], 1);
  EXPECT_EQ(j["constraints"], 1);
  EXPECT_EQ(j["a"].dump(), "[[0,0,2.0]]");
  EXPECT_EQ(j["b"].dump(), "[4.0]");
}

TEST(Csv, RoundTripAndHeader) {
  const std::string path = temp_path("rows.csv");
  std::filesystem::remove(path);
  Scores perfect{1, 1, 1, 1, 1};
  append_csv(path, {make_row("a", 0.0, "joint", perfect, 1.5)});
  append_csv(path, {make_row("b", 0.05, "baseline", {0.5, 1, 1, 1, 0.79}, 0.1)});
  std::ifstream in(path);
  std::string first;
  std::getline(in, first);
  EXPECT_EQ(first, kCsvHeader);
  const auto rows = read_csv(path);
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(to_csv(rows[0]), "a,0,joint,1,1,1,1,1,1.5");
  EXPECT_EQ(rows[1].method, "baseline");
  EXPECT_EQ(rows[1].sigma, 0.05);
  std::filesystem::remove(path);
}

TEST(Csv, RejectsMalformed) {
  std::istringstream short_row("a,0,joint,1\n");
  EXPECT_THROW(read_csv(short_row), InputError);
  std::istringstream bad_number("a,x,joint,1,1,1,1,1,1\n");
  EXPECT_THROW(read_csv(bad_number), InputError);
}

TEST(Plot, SinglePoint) {
  const std::string svg = svg_chart({make_row("a", 0.0, "joint", {1, 1, 1, 1, 1}, 1.0)});
  EXPECT_NE(svg.find("<svg"), std::string::npos);
  EXPECT_NE(svg.find("<polyline"), std::string::npos);
  EXPECT_EQ(svg.find("<polyline", svg.find("<polyline") + 1), std::string::npos);
}

TEST(Plot, TwoSeriesWithLegend) {
  std::vector<CsvRow> rows;
  for (double s : {0.0, 0.05})
    for (const char* m : {"joint", "no-coupling"}) rows.push_back(make_row("x", s, m, {1, 1, 1, 1, 0.9}, 1.0));
  const std::string svg = svg_chart(rows, "m_acc");
  std::size_t lines = 0, pos = 0;
  while ((pos = svg.find("<polyline", pos)) != std::string::npos) ++lines, ++pos;
  EXPECT_EQ(lines, 2u);
  EXPECT_NE(svg.find(">joint<"), std::string::npos);
  EXPECT_NE(svg.find(">no-coupling<"), std::string::npos);
}

TEST(Plot, Errors) {
  EXPECT_THROW(svg_chart({}), InputError);
  EXPECT_THROW(svg_chart({make_row("a", 0.0, "joint", {}, 1.0)}, "bogus"), InputError);
}
