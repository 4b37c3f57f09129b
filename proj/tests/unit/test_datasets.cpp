#include "jgmc/datasets.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace jgmc;

namespace {

SyntheticScenario eleven() {
  SyntheticScenario s;
  s.primitives = {{Primitive::prism, 1}, {Primitive::pyramid5, -1}};
  return s;
}

SyntheticScenario twenty_eight() {
  SyntheticScenario s;
  s.primitives = {{Primitive::box, 1}, {Primitive::prism, 1}, {Primitive::box, -1}, {Primitive::prism, -1}};
  return s;
}

}  // namespace

TEST(Primitives, CornerCounts) {
  EXPECT_EQ(corner_count(Primitive::prism), 6);
  EXPECT_EQ(corner_count(Primitive::box), 8);
  EXPECT_EQ(corner_count(Primitive::pyramid4), 4);
  EXPECT_EQ(corner_count(Primitive::pyramid5), 5);
  EXPECT_EQ(primitive_from_string(to_string(Primitive::pyramid5)), Primitive::pyramid5);
  EXPECT_THROW(primitive_from_string("cone"), InputError);
}

TEST(GenPair, NoiselessPairIsCongruent) {
  const auto [g1, g2] = gen_pair(eleven());
  EXPECT_EQ(g1.n, 11);
  EXPECT_EQ(g2.n, 11);
  EXPECT_TRUE(g1.coords->isApprox(*g2.coords));
  for (int j = 0; j < 11; ++j) EXPECT_EQ((*g1.gt_match)[j], j);
  EXPECT_EQ(g1.edges, g2.edges);
}

TEST(GenPair, TwentyEightNodes) {
  const auto [g1, g2] = gen_pair(twenty_eight());
  EXPECT_EQ(g1.n, 28);
  EXPECT_EQ(twenty_eight().node_count(), 28);
}

TEST(GenPair, ShuffledGroundTruthIsConsistent) {
  auto s = twenty_eight();
  s.shuffle = true;
  s.noise_sigma = 0.02;
  s.seed = 9;
  const auto [g1, g2] = gen_pair(s);
  const Assignment& t = *g1.gt_match;
  EXPECT_TRUE(is_permutation(t));
  EXPECT_EQ(*g2.gt_match, inverse(t));
  for (int j = 0; j < g1.n; ++j) {
    EXPECT_EQ((*g1.gt_cluster)[j], (*g2.gt_cluster)[t[j]]);
    EXPECT_LT((g1.coords->col(j) - g2.coords->col(t[j])).norm(), 0.2);
  }
}

TEST(GenPair, Deterministic) {
  auto s = eleven();
  s.noise_sigma = 0.05;
  s.shuffle = true;
  s.seed = 42;
  const auto a = gen_pair(s), b = gen_pair(s);
  EXPECT_EQ(*a.second.coords, *b.second.coords);
  EXPECT_EQ(a.second.edges, b.second.edges);
  EXPECT_EQ(*a.first.gt_match, *b.first.gt_match);
  s.seed = 43;
  EXPECT_NE(*gen_pair(s).second.coords, *a.second.coords);
}

TEST(GenPair, NoiseOnlyOnSecondGraph) {
  auto s = eleven();
  const auto clean = gen_pair(s);
  s.noise_sigma = 0.1;
  const auto noisy = gen_pair(s);
  EXPECT_EQ(*clean.first.coords, *noisy.first.coords);
  EXPECT_NE(*clean.second.coords, *noisy.second.coords);
}

TEST(GenPair, ThreeDimensionalUsesKnn) {
  auto s = eleven();
  s.dimension = 3;
  const auto [g1, g2] = gen_pair(s);
  EXPECT_EQ(g1.dim(), 3);
  std::vector<int> degree(g1.n, 0);
  for (const auto& e : g1.edges) ++degree[e.src];
  for (int d : degree) EXPECT_GE(d, s.knn_k);
}

TEST(GenPair, RejectsSingleCluster) {
  SyntheticScenario s;
  s.primitives = {{Primitive::box, 1}, {Primitive::box, 1}};
  EXPECT_THROW(gen_pair(s), InputError);
  s.primitives = {{Primitive::box, 1}};
  EXPECT_THROW(gen_pair(s), InputError);
}

TEST(Outliers, ZeroCountLeavesGraph) {
  const Graph base = scenario_base(eleven());
  const Graph out = add_clustered_outliers(base, 0, 0.1, 1);
  EXPECT_EQ(out.n, base.n);
  EXPECT_EQ(*out.coords, *base.coords);
}

TEST(Outliers, CoincidentOutliersShareLabel) {
  const Graph base = scenario_base(eleven());
  const Graph out = add_clustered_outliers(base, 5, 0.0, 3);
  ASSERT_EQ(out.n, 16);
  for (int i = 12; i < 16; ++i) {
    EXPECT_EQ(out.coords->col(i), out.coords->col(11));
    EXPECT_EQ((*out.gt_cluster)[i], (*out.gt_cluster)[11]);
  }
}

TEST(Outliers, ForcedLabel) {
  const Graph out = add_clustered_outliers(scenario_base(eleven()), 3, 0.1, 3, -1);
  for (int i = 11; i < 14; ++i) EXPECT_EQ((*out.gt_cluster)[i], -1);
}

TEST(Outliers, ThirtyThreeNodeScenario) {
  auto s = twenty_eight();
  s.outliers = OutlierSpec{5, 0.1, std::nullopt, 2.5};
  s.noise_sigma = 0.01;
  const auto [g1, g2] = gen_pair(s);
  EXPECT_EQ(g1.n, 33);
  EXPECT_EQ(s.node_count(), 33);
  g1.validate();
  g2.validate();
}

TEST(Landmarks, ReadWriteRoundTrip) {
  const auto frames = synthetic_landmark_sequence(4, 30, 1);
  std::stringstream buf;
  write_landmark_frames(buf, frames);
  const auto back = read_landmark_frames(buf);
  ASSERT_EQ(back.size(), 4u);
  for (int f = 0; f < 4; ++f) EXPECT_TRUE(back[f].isApprox(frames[f], 1e-8));
}

TEST(Landmarks, MalformedFileThrows) {
  std::stringstream bad("1 2 3");
  EXPECT_THROW(read_landmark_frames(bad), InputError);
  std::stringstream junk("1 2 x 4");
  EXPECT_THROW(read_landmark_frames(junk), InputError);
}

TEST(Landmarks, SameFrameTwiceIsIsomorphic) {
  const auto frames = synthetic_landmark_sequence(5, 30, 2);
  const auto [g1, g2] = load_cmu_house(frames, 3, 3);
  EXPECT_EQ(g1.n, 30);
  EXPECT_EQ(g1.edges, g2.edges);
  for (int i = 0; i < 30; ++i) EXPECT_EQ((*g1.gt_match)[i], i);
}

TEST(Landmarks, SubsamplingAndRange) {
  const auto frames = synthetic_landmark_sequence(90, 30, 2);
  const auto [g1, g2] = load_cmu_house(frames, 1, 90, 15);
  EXPECT_EQ(g1.n, 15);
  EXPECT_EQ(g2.n, 15);
  EXPECT_THROW(load_cmu_house(frames, 0, 90), InputError);
  EXPECT_THROW(load_cmu_house(frames, 1, 91), InputError);
  EXPECT_THROW(load_cmu_house(frames, 1, 2, 31), InputError);
}

TEST(Relabel, MovesEverythingAlong) {
  auto s = eleven();
  s.noise_sigma = 0.01;
  auto [g1, g2] = gen_pair(s);
  const Assignment perm{3, 0, 1, 2, 4, 10, 9, 8, 7, 6, 5};
  const Graph moved = relabel_nodes(g2, perm);
  for (int j = 0; j < 11; ++j) {
    EXPECT_EQ(moved.coords->col(perm[j]), g2.coords->col(j));
    EXPECT_EQ((*moved.gt_cluster)[perm[j]], (*g2.gt_cluster)[j]);
  }
  const Matrix a = build_adjacency(g2), b = build_adjacency(moved);
  for (int i = 0; i < 11; ++i)
    for (int j = 0; j < 11; ++j) EXPECT_EQ(b(perm[i], perm[j]), a(i, j));
}
