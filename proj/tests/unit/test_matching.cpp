#include <gtest/gtest.h>

#include <algorithm>
#include <set>

#include "autolabel/error.hpp"
#include "autolabel/matching.hpp"
#include "autolabel/rng.hpp"
#include "oracles.hpp"

using namespace autolabel;

namespace {

std::vector<AttributeIndex> random_profile(SplitMix64& r, std::size_t len, std::size_t vocab) {
  std::vector<AttributeIndex> all(vocab);
  for (std::size_t i = 0; i < vocab; ++i) all[i] = static_cast<AttributeIndex>(i);
  r.shuffle(std::span<AttributeIndex>(all));
  all.resize(len);
  return all;
}

AttributeProfile profile(const std::vector<AttributeIndex>& attrs) {
  AttributeProfile p{std::size_t{0}, {}};
  double score = 1.0;
  for (auto a : attrs) p.entries.push_back({a, score -= 0.01, 1});
  return p;
}

CandidateLabel candidate(const std::vector<AttributeIndex>& attrs, std::size_t cluster) {
  return {"c" + std::to_string(cluster), profile(attrs), cluster};
}

}  // namespace

TEST(PositionWeights, KnownValues) {
  EXPECT_EQ(position_weights(1), (std::vector<double>{1.0}));
  EXPECT_EQ(position_weights(2), (std::vector<double>{1.0, 0.0}));
  const auto w = position_weights(5);
  const std::vector<double> expected{1.0, 0.75, 0.5, 0.25, 0.0};
  ASSERT_EQ(w.size(), 5u);
  for (std::size_t i = 0; i < 5; ++i) EXPECT_DOUBLE_EQ(w[i], expected[i]);
}

TEST(AttributeSim, FixedCases) {
  const std::vector<AttributeIndex> abc{0, 1, 2};
  EXPECT_DOUBLE_EQ(attribute_sim(abc, abc), 1.0);
  EXPECT_DOUBLE_EQ(attribute_sim(std::vector<AttributeIndex>{0, 1}, std::vector<AttributeIndex>{1, 0}), 0.0);
  EXPECT_DOUBLE_EQ(attribute_sim(abc, std::vector<AttributeIndex>{7, 8, 9}), 0.0);
}

TEST(AttributeSim, NormalizedBySourceLength) {
  // source [a, b, c], target [a]: one match at distance 0, divided by 3
  EXPECT_DOUBLE_EQ(attribute_sim(std::vector<AttributeIndex>{0, 1, 2}, std::vector<AttributeIndex>{0}), 1.0 / 3.0);
  // target longer than source: distance beyond the source weights counts 0
  EXPECT_DOUBLE_EQ(attribute_sim(std::vector<AttributeIndex>{5, 6}, std::vector<AttributeIndex>{1, 2, 3, 5}), 0.0);
}

TEST(AttributeSim, MatchesBruteForceOnRandomPairs) {
  SplitMix64 r(31);
  for (int trial = 0; trial < 1000; ++trial) {
    const auto s = random_profile(r, 1 + r.below(8), 10);
    const auto t = random_profile(r, 1 + r.below(8), 10);
    ASSERT_EQ(attribute_sim(s, t), oracle::sim(s, t)) << "trial " << trial;
  }
}

TEST(AttributeSim, EmptyProfileIsAnError) {
  try {
    attribute_sim(std::vector<AttributeIndex>{}, std::vector<AttributeIndex>{1});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::EmptyProfile);
  }
}

TEST(SimilarityMatrix, DuplicatedSourceProfileScoresOne) {
  const std::vector<std::string> names{"x", "y"};
  const std::vector<AttributeProfile> src{profile({0, 1, 2}), profile({3, 4})};
  const std::vector<CandidateLabel> cands{candidate({5, 6}, 0), candidate({0, 1, 2}, 1)};
  const auto s = build_similarity_matrix(names, src, cands);
  EXPECT_EQ(s.values[0][1], 1.0);
  EXPECT_EQ(s.values[1][0], 0.0);
  EXPECT_EQ(s.col_clusters, (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(s.row_labels, names);
}

TEST(SimilarityMatrix, DisjointProfilesGiveZeroMatrix) {
  const std::vector<std::string> names{"x", "y"};
  const std::vector<AttributeProfile> src{profile({0, 1}), profile({2})};
  const std::vector<CandidateLabel> cands{candidate({3}, 0), candidate({4, 5}, 1), candidate({6}, 2)};
  for (const auto& row : build_similarity_matrix(names, src, cands).values) {
    for (double v : row) EXPECT_EQ(v, 0.0);
  }
}

TEST(SimilarityMatrix, MatchesEntrywiseOracle) {
  SplitMix64 r(77);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<std::vector<AttributeIndex>> src_attrs;
    std::vector<AttributeProfile> src;
    std::vector<CandidateLabel> cands;
    for (int i = 0; i < 3; ++i) src.push_back(profile(src_attrs.emplace_back(random_profile(r, 1 + r.below(5), 8))));
    for (std::size_t j = 0; j < 4; ++j) cands.push_back(candidate(random_profile(r, 1 + r.below(5), 8), j));
    const std::vector<std::string> names{"a", "b", "c"};
    const auto s = build_similarity_matrix(names, src, cands);
    for (std::size_t i = 0; i < 3; ++i) {
      for (std::size_t j = 0; j < 4; ++j) {
        EXPECT_EQ(s.values[i][j], oracle::sim(src_attrs[i], cands[j].profile.attributes()));
      }
    }
  }
}

TEST(Prune, GammaZeroPrunesAnyOverlapAndKeepsZeroColumns) {
  SimilarityMatrix s;
  s.row_labels = {"x"};
  s.col_clusters = {0, 1, 2};
  s.values = {{0.0, 0.2, 0.0}};
  const std::vector<CandidateLabel> cands{candidate({1}, 0), candidate({2}, 1), candidate({3}, 2)};
  const auto kept = match_and_prune(s, 0.0, cands);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].source_cluster, 0u);
  EXPECT_EQ(kept[1].source_cluster, 2u);
  s.values = {{0.0, 0.0, 0.0}};
  EXPECT_EQ(match_and_prune(s, 0.0, cands).size(), 3u);
}

TEST(Prune, GammaOnePrunesOnlyExactDuplicates) {
  const std::vector<std::string> names{"x"};
  const std::vector<AttributeProfile> src{profile({0, 1, 2})};
  const std::vector<CandidateLabel> cands{candidate({0, 1, 2}, 0), candidate({0, 1, 3}, 1), candidate({1, 0, 2}, 2)};
  const auto kept = match_and_prune(build_similarity_matrix(names, src, cands), 1.0, cands);
  ASSERT_EQ(kept.size(), 2u);
  EXPECT_EQ(kept[0].source_cluster, 1u);
  EXPECT_EQ(kept[1].source_cluster, 2u);
}

TEST(Prune, HigherGammaKeepsASuperset) {
  SplitMix64 r(5);
  for (int trial = 0; trial < 100; ++trial) {
    SimilarityMatrix s;
    const std::size_t rows = 1 + r.below(6);
    const std::size_t cols = 1 + r.below(10);
    std::vector<CandidateLabel> cands;
    for (std::size_t j = 0; j < cols; ++j) {
      s.col_clusters.push_back(j);
      cands.push_back(candidate({static_cast<AttributeIndex>(j)}, j));
    }
    for (std::size_t i = 0; i < rows; ++i) {
      s.row_labels.push_back("r" + std::to_string(i));
      auto& row = s.values.emplace_back();
      for (std::size_t j = 0; j < cols; ++j) row.push_back(r.below(4) == 0 ? 0.0 : r.uniform());
    }
    std::set<std::size_t> low;
    std::set<std::size_t> high;
    for (const auto& c : match_and_prune(s, 0.3, cands)) low.insert(c.source_cluster);
    for (const auto& c : match_and_prune(s, 0.7, cands)) high.insert(c.source_cluster);
    EXPECT_TRUE(std::includes(high.begin(), high.end(), low.begin(), low.end()));
  }
}

TEST(Prune, MatchedPairsListEveryHit) {
  SimilarityMatrix s;
  s.row_labels = {"x", "y"};
  s.col_clusters = {0, 1};
  s.values = {{0.6, 0.1}, {0.5, 0.0}};
  const auto pairs = matched_pairs(s, 0.5);
  ASSERT_EQ(pairs.size(), 2u);
  EXPECT_EQ(pairs[0].row, 0u);
  EXPECT_EQ(pairs[1].row, 1u);
  EXPECT_EQ(pairs[1].score, 0.5);
}

TEST(Prune, RejectsGammaOutsideUnitInterval) {
  SimilarityMatrix s;
  for (double g : {-0.1, 1.1}) {
    try {
      match_and_prune(s, g, {});
      ADD_FAILURE();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::InvalidConfig);
    }
  }
}
