#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "commex/metrics.hpp"
#include "oracles/oracles.hpp"

using namespace commex;

namespace {

CommunityCover cover(std::vector<std::vector<NodeId>> c) {
  CommunityCover out{std::move(c), 0};
  normalize(out);
  return out;
}

/// Random cover over n nodes with up to max_c non-empty communities.
CommunityCover random_cover(std::mt19937_64& rng, std::size_t n, std::size_t max_c) {
  const std::size_t c = 1 + rng() % max_c;
  std::vector<std::vector<NodeId>> comms(c);
  for (auto& members : comms) {
    for (NodeId u = 0; u < n; ++u) {
      if (rng() % 3 == 0) members.push_back(u);
    }
    if (members.empty()) members.push_back(static_cast<NodeId>(rng() % n));
  }
  return cover(std::move(comms));
}

CommunityCover relabel(const CommunityCover& c, const std::vector<NodeId>& perm) {
  std::vector<std::vector<NodeId>> out;
  for (const auto& members : c.communities) {
    std::vector<NodeId> m;
    for (NodeId u : members) m.push_back(perm[u]);
    out.push_back(std::move(m));
  }
  return cover(std::move(out));
}

}  // namespace

TEST(AffiliationThreshold, DensityExample) {
  EXPECT_NEAR(affiliation_threshold(10, 9), std::sqrt(-std::log(0.8)), 1e-15);
  EXPECT_NEAR(affiliation_threshold(10, 9), 0.4724, 1e-4);
}

TEST(CoverFromAffiliations, ZeroRowFallsBackToFirstCommunity) {
  Matrix f(2, 2);
  f << 0.0, 0.0, 5.0, 5.0;
  const auto c = cover_from_affiliations({f}, ObservedNetwork(2), 0.5);
  ASSERT_EQ(c.size(), 2U);
  EXPECT_EQ(c.communities[0], (std::vector<NodeId>{0, 1}));
  EXPECT_EQ(c.communities[1], (std::vector<NodeId>{1}));
}

TEST(CoverFromAffiliations, StrongDiagonal) {
  const Matrix f = 10.0 * Matrix::Identity(3, 3);
  const std::vector<Edge> e{{0, 1}};
  const auto c = cover_from_affiliations({f}, ObservedNetwork(3, e));
  EXPECT_EQ(c, cover({{0}, {1}, {2}}));
}

TEST(CoverFromAffiliations, ZeroThresholdNeedsPositiveWeight) {
  Matrix f(2, 2);
  f << 0.3, 0.0, 0.0, 0.2;
  // With no edges delta is 0; zero entries still do not confer membership.
  const auto c = cover_from_affiliations({f}, ObservedNetwork(2));
  EXPECT_EQ(c, cover({{0}, {1}}));
}

TEST(CoverFromAffiliations, EmptyColumnsAreDroppedAndCounted) {
  Matrix f(2, 3);
  f << 1.0, 0.0, 0.0, 2.0, 0.0, 0.0;
  const auto c = cover_from_affiliations({f}, ObservedNetwork(2), 0.5);
  EXPECT_EQ(c.size(), 1U);
  EXPECT_EQ(c.dropped_empty, 2U);
}

TEST(OverlappingNmi, IdentityIsOne) {
  const auto a = cover({{0, 1, 2}, {2, 3}, {4}});
  EXPECT_DOUBLE_EQ(overlapping_nmi(a, a, 6), 1.0);
}

TEST(OverlappingNmi, RandomCoverAgainstItselfIsExactlyOne) {
  std::mt19937_64 rng(2024);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 2 + rng() % 14;
    const auto a = random_cover(rng, n, 6);
    EXPECT_EQ(overlapping_nmi(a, a, n), 1.0) << i;
  }
}

TEST(OverlappingNmi, CrossedPartitionsMatchOracle) {
  const auto a = cover({{0, 1}, {2, 3}});
  const auto b = cover({{0, 2}, {1, 3}});
  EXPECT_NEAR(overlapping_nmi(a, b, 4), oracle::lfk_nmi(a.communities, b.communities, 4), 1e-12);
}

TEST(OverlappingNmi, UniversalCommunityAgainstItself) {
  const auto a = cover({{0, 1, 2, 3}});
  EXPECT_DOUBLE_EQ(overlapping_nmi(a, a, 4), 1.0);
  EXPECT_DOUBLE_EQ(overlapping_nmi(a, cover({{0, 1}}), 4), 0.0);
}

TEST(OverlappingNmi, EmptyCovers) {
  EXPECT_EQ(overlapping_nmi({}, {}, 5), 1.0);
  EXPECT_EQ(overlapping_nmi(cover({{1}}), {}, 5), 0.0);
  EXPECT_EQ(overlapping_nmi({}, cover({{1}}), 5), 0.0);
}

TEST(OverlappingNmi, MatchesOracleOnRandomCovers) {
  std::mt19937_64 rng(99);
  for (int i = 0; i < 200; ++i) {
    const std::size_t n = 3 + rng() % 12;
    const auto a = random_cover(rng, n, 5);
    const auto b = random_cover(rng, n, 5);
    EXPECT_NEAR(overlapping_nmi(a, b, n), oracle::lfk_nmi(a.communities, b.communities, n), 1e-9);
  }
}

TEST(OverlappingNmi, SymmetricAndRelabelInvariant) {
  std::mt19937_64 rng(5);
  for (int i = 0; i < 50; ++i) {
    const std::size_t n = 4 + rng() % 10;
    const auto a = random_cover(rng, n, 4);
    const auto b = random_cover(rng, n, 4);
    const double v = overlapping_nmi(a, b, n);
    EXPECT_NEAR(v, overlapping_nmi(b, a, n), 1e-12);
    std::vector<NodeId> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    EXPECT_NEAR(v, overlapping_nmi(relabel(a, perm), relabel(b, perm), n), 1e-12);
    auto rev = a;
    std::reverse(rev.communities.begin(), rev.communities.end());
    EXPECT_NEAR(v, overlapping_nmi(rev, b, n), 1e-12);
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
}

TEST(BestMatchF1, Identity) {
  const auto a = cover({{1, 2}, {3}});
  EXPECT_EQ(best_match_f1(a, a), 1.0);
}

TEST(BestMatchF1, HandTable) {
  const auto d = cover({{1, 2}, {3, 4}});
  const auto t = cover({{1, 2, 3}, {4}});
  // Rows of the pairwise table: (0.8, 0), (0.4, 2/3).
  EXPECT_NEAR(best_match_f1(d, t), (0.8 + 2.0 / 3.0) / 2.0, 1e-15);
  EXPECT_NEAR(best_match_f1(d, t), 0.7333, 1e-4);
}

TEST(BestMatchF1, DisjointNodeSets) {
  EXPECT_EQ(best_match_f1(cover({{0, 1}}), cover({{2, 3}, {4}})), 0.0);
}

TEST(BestMatchF1, MatchesExhaustiveOracleExactly) {
  std::mt19937_64 rng(1234);
  for (int i = 0; i < 100; ++i) {
    const std::size_t n = 2 + rng() % 10;
    const auto a = random_cover(rng, n, 6);
    const auto b = random_cover(rng, n, 6);
    EXPECT_EQ(best_match_f1(a, b), oracle::best_match_f1(a.communities, b.communities));
    EXPECT_NEAR(best_match_f1(a, b), best_match_f1(b, a), 1e-15);
  }
}

TEST(ExploredCount, Examples) {
  std::vector<Edge> star;
  for (NodeId v = 1; v <= 5; ++v) star.push_back({0, v});
  ObservedNetwork g(8);
  EXPECT_EQ(explored_count(g), 0U);
  const std::vector<NodeId> nbrs{1, 2, 3, 4, 5};
  g.apply_query(0, nbrs);
  EXPECT_EQ(explored_count(g), 6U);
  g.apply_query(7, {});
  EXPECT_EQ(explored_count(g), 7U);
}

TEST(ExploredCount, IsolatedQueryCountsItself) {
  ObservedNetwork g(3);
  g.apply_query(1, {});
  EXPECT_EQ(explored_count(g), 1U);
}

TEST(ExploredCount, MonotoneAlongQueries) {
  std::mt19937_64 rng(2);
  std::vector<Edge> e;
  for (NodeId u = 0; u < 20; ++u) {
    for (NodeId v = u + 1; v < 20; ++v) {
      if (rng() % 6 == 0) e.push_back({u, v});
    }
  }
  const HiddenNetwork h(20, e);
  QueryOracle o(h, 20);
  ObservedNetwork g(20);
  std::size_t prev = 0;
  for (NodeId u : {5, 3, 19, 0, 7, 12}) {
    g.apply_query(u, o.query(u));
    const std::size_t now = explored_count(g);
    EXPECT_GE(now, prev);
    prev = now;
  }
}

TEST(Evaluate, CoveredOnlyIgnoresUncoveredNodes) {
  Matrix f(4, 2);
  f << 5, 0, 5, 0, 0, 5, 0, 5;
  const auto truth = cover({{0, 1}, {2}});
  const auto all = evaluate({f}, ObservedNetwork(4), truth, {0.5, false});
  const auto covered = evaluate({f}, ObservedNetwork(4), truth, {0.5, true});
  EXPECT_LT(all.nmi, 1.0);
  EXPECT_DOUBLE_EQ(covered.nmi, 1.0);
  EXPECT_DOUBLE_EQ(covered.f1, 1.0);
  EXPECT_EQ(all.n_detected, 2U);
}
