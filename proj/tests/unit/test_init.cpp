#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "commex/errors.hpp"
#include "commex/init.hpp"
#include "oracles/oracles.hpp"

using namespace commex;

namespace {

oracle::Bits to_bits(const std::vector<std::vector<int>>& rows) { return rows; }

oracle::Bits to_bits(const BitMatrix& m) {
  oracle::Bits b(m.rows(), std::vector<int>(m.cols()));
  for (std::size_t r = 0; r < m.rows(); ++r) {
    for (std::size_t c = 0; c < m.cols(); ++c) b[r][c] = m(r, c);
  }
  return b;
}

/// Columns of `assign` as node sets, ignoring column order.
std::set<std::set<std::size_t>> column_sets(const oracle::Bits& assign) {
  std::set<std::set<std::size_t>> out;
  const std::size_t c = assign.empty() ? 0 : assign[0].size();
  for (std::size_t k = 0; k < c; ++k) {
    std::set<std::size_t> col;
    for (std::size_t u = 0; u < assign.size(); ++u) {
      if (assign[u][k]) col.insert(u);
    }
    out.insert(col);
  }
  return out;
}

const std::vector<std::vector<int>> kBlocks = {
    {1, 1, 0, 0}, {1, 1, 0, 0}, {0, 0, 1, 1}, {0, 0, 1, 1}};

}  // namespace

TEST(MacCluster, BlockDiagonalMatchesExhaustiveOptimum) {
  const NodeFeatures x = NodeFeatures::from_dense(kBlocks);
  const auto best = oracle::all_optimal_factorizations(to_bits(kBlocks), 2);
  ASSERT_FALSE(best.empty());
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const MacResult r = mac_cluster(x, 2, seed);
    EXPECT_EQ(r.error, best.front().error);
    EXPECT_EQ(column_sets(to_bits(r.assignment)),
              (std::set<std::set<std::size_t>>{{0, 1}, {2, 3}}));
  }
}

TEST(MacCluster, UnionRowJoinsBothCommunities) {
  auto rows = kBlocks;
  rows.push_back({1, 1, 1, 1});
  const NodeFeatures x = NodeFeatures::from_dense(rows);
  const auto best = oracle::all_optimal_factorizations(to_bits(rows), 2);
  // The oracle's optima all put node 4 in both columns.
  for (const auto& f : best) EXPECT_EQ(f.assignment[4][0] + f.assignment[4][1], 2);
  const MacResult r = mac_cluster(x, 2, 3);
  EXPECT_EQ(r.error, best.front().error);
  EXPECT_EQ(r.assignment.row_count(4), 2U);
}

TEST(MacCluster, ZeroRowJoinsExactlyOneCommunity) {
  auto rows = kBlocks;
  rows.push_back({0, 0, 0, 0});
  const MacResult r = mac_cluster(NodeFeatures::from_dense(rows), 2, 0);
  EXPECT_EQ(r.assignment.row_count(4), 1U);
}

TEST(MacCluster, NoWorseThanBestSingleAssignment) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 15; ++trial) {
    const std::size_t n = 3 + rng() % 4;
    const std::size_t d = 2 + rng() % 5;
    std::vector<std::vector<int>> rows(n, std::vector<int>(d));
    for (auto& row : rows) {
      for (auto& b : row) b = static_cast<int>(rng() & 1U);
    }
    const MacResult r = mac_cluster(NodeFeatures::from_dense(rows), 2, trial);
    const std::size_t oracle_err = oracle::best_single_assignment_error(rows, 2);
    EXPECT_LE(r.error, oracle_err) << "trial " << trial;
    EXPECT_EQ(r.error, oracle::boolean_error(rows, to_bits(r.assignment), to_bits(r.prototypes)));
  }
}

TEST(MacCluster, EveryNodeAndColumnIsCovered) {
  std::mt19937_64 rng(5);
  std::vector<std::vector<int>> rows(20, std::vector<int>(10));
  for (auto& row : rows) {
    for (auto& b : row) b = (rng() % 4) == 0;
  }
  const MacResult r = mac_cluster(NodeFeatures::from_dense(rows), 4, 1);
  for (std::size_t u = 0; u < 20; ++u) EXPECT_GE(r.assignment.row_count(u), 1U);
  for (std::size_t c = 0; c < 4; ++c) EXPECT_GE(r.assignment.col_count(c), 1U);
}

TEST(MacCluster, DegenerateInputs) {
  const NodeFeatures x = NodeFeatures::from_dense(kBlocks);
  EXPECT_THROW(mac_cluster(x, 0, 0), DegenerateInput);
  EXPECT_THROW(mac_cluster(x, 5, 0), DegenerateInput);
}

TEST(MacCluster, DeterministicInSeed) {
  const NodeFeatures x = NodeFeatures::from_dense(
      {{1, 0, 1, 0, 1}, {0, 1, 1, 0, 0}, {1, 1, 0, 0, 1}, {0, 0, 0, 1, 1}, {1, 0, 0, 1, 0}});
  const MacResult a = mac_cluster(x, 2, 42);
  const MacResult b = mac_cluster(x, 2, 42);
  EXPECT_EQ(a.assignment, b.assignment);
  EXPECT_EQ(a.prototypes, b.prototypes);
}

TEST(AgmInfer, ZeroOverlapGivesNoEdges) {
  BitMatrix f0(4, 2);
  f0(0, 0) = f0(1, 0) = 0;
  f0(2, 1) = f0(3, 1) = 0;
  EXPECT_TRUE(agm_infer(f0, 1).empty());
  BitMatrix g0(4, 4);
  for (std::size_t u = 0; u < 4; ++u) g0(u, u) = 1;
  EXPECT_TRUE(agm_infer(g0, 1).empty());
}

TEST(AgmInfer, UnitOverlapFrequency) {
  BitMatrix f0(2, 1);
  f0(0, 0) = f0(1, 0) = 1;
  int hits = 0;
  const int trials = 10000;
  for (int s = 0; s < trials; ++s) hits += static_cast<int>(agm_infer(f0, s).size());
  EXPECT_NEAR(static_cast<double>(hits) / trials, 1.0 - std::exp(-1.0), 0.01);
}

TEST(AgmInfer, DeterministicAndOnlySharedPairs) {
  std::mt19937_64 rng(3);
  BitMatrix f0(10, 3);
  for (std::size_t u = 0; u < 10; ++u) {
    for (std::size_t c = 0; c < 3; ++c) f0(u, c) = (rng() % 3) == 0;
  }
  EXPECT_EQ(agm_infer(f0, 8), agm_infer(f0, 8));
  for (std::uint64_t s = 0; s < 20; ++s) {
    for (const Edge& e : agm_infer(f0, s)) {
      bool shared = false;
      for (std::size_t c = 0; c < 3; ++c) shared |= f0(e.lo, c) && f0(e.hi, c);
      EXPECT_TRUE(shared);
    }
  }
}

TEST(AgmInfer, ThresholdModeKeepsLikelyPairs) {
  BitMatrix f0(3, 1);
  f0(0, 0) = f0(1, 0) = 1;
  // 1 - e^-1 >= 0.5: the shared pair is kept, the others have p = 0.
  EXPECT_EQ(agm_infer(f0, 0, AgmMode::kThreshold), (std::vector<Edge>{{0, 1}}));
}

TEST(FInit, BlockDiagonalHasNoCrossBlockEdges) {
  const NodeFeatures x = NodeFeatures::from_dense(kBlocks);
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const ObservedNetwork g = f_init(x, 2, seed);
    EXPECT_TRUE(g.revealed().empty());
    for (const Edge& e : g.inferred()) EXPECT_EQ(e.lo < 2, e.hi < 2);
  }
}

TEST(FInit, SingleCommunityLinksEveryPairWithUnitProbability) {
  const NodeFeatures x = NodeFeatures::from_dense({{1, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 1}});
  const int trials = 2000;
  double edges = 0;
  for (int s = 0; s < trials; ++s) edges += static_cast<double>(f_init(x, 1, s).n_edges());
  // 10 pairs, each present with probability 1 - e^-1.
  EXPECT_NEAR(edges / (trials * 10.0), 1.0 - std::exp(-1.0), 0.01);
}

TEST(FInit, SingleNodeIsEmpty) {
  const ObservedNetwork g = f_init(NodeFeatures::from_dense({{1, 0}}), 1, 0);
  EXPECT_EQ(g.n_nodes(), 1U);
  EXPECT_EQ(g.n_edges(), 0U);
}

TEST(FInit, PureFunctionOfInputs) {
  const NodeFeatures x = NodeFeatures::from_dense(
      {{1, 0, 1, 0}, {0, 1, 1, 0}, {1, 1, 0, 0}, {0, 0, 0, 1}, {1, 0, 0, 1}, {0, 1, 0, 1}});
  EXPECT_EQ(f_init(x, 2, 11).edge_list(), f_init(x, 2, 11).edge_list());
}

TEST(KnnInit, IdenticalRowsConnect) {
  const ObservedNetwork g = knn_init(NodeFeatures::from_dense({{1, 1, 0}, {0, 0, 1}, {1, 1, 0}}), 1);
  EXPECT_TRUE(g.has_edge(0, 2));
}

TEST(KnnInit, OrthogonalRowsTieToLowestId) {
  const ObservedNetwork g = knn_init(
      NodeFeatures::from_dense({{1, 0, 0, 0}, {0, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}), 1);
  // 0->1, 1->0, 2->0, 3->0: four directed picks, three distinct pairs.
  EXPECT_EQ(g.edge_list(), (std::vector<Edge>{{0, 1}, {0, 2}, {0, 3}}));
}

TEST(KnnInit, FullNeighborhoodIsCompleteAmongNonZeroRows) {
  const ObservedNetwork g =
      knn_init(NodeFeatures::from_dense({{1, 0}, {0, 1}, {0, 0}, {1, 1}}), 3);
  EXPECT_EQ(g.edge_list(), (std::vector<Edge>{{0, 1}, {0, 3}, {1, 3}}));
}

TEST(KnnInit, RejectsBadK) {
  const NodeFeatures x = NodeFeatures::from_dense({{1, 0}, {0, 1}});
  EXPECT_THROW(knn_init(x, 0), PreconditionError);
  EXPECT_THROW(knn_init(x, 2), PreconditionError);
}
