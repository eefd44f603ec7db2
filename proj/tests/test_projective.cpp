#include <gtest/gtest.h>

#include <random>

#include "depsrl/projective.hpp"
#include "depsrl/tree.hpp"
#include "test_util.hpp"

using namespace depsrl;

namespace {

ArcScoreMatrix random_scores(std::mt19937_64& rng, int n, bool dyadic) {
  ArcScoreMatrix s(n);
  std::uniform_int_distribution<int> small(-8, 8);
  std::normal_distribution<double> g(0.0, 1.0);
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d)
      if (h != d) s.at(h, d) = dyadic ? small(rng) / 4.0 : g(rng);
  return s;
}

int roots(const std::vector<int>& heads) { return static_cast<int>(std::count(heads.begin(), heads.end(), 0)); }

}  // namespace

TEST(Eisner, SingleToken) {
  ArcScoreMatrix s(1, 0.0);
  EXPECT_EQ(eisner(s, true), (std::vector<int>{0}));
  EXPECT_EQ(eisner(s, false), (std::vector<int>{0}));
  EXPECT_EQ(brute_force_projective(s), (std::vector<int>{0}));
}

TEST(Eisner, TwoTokensByHand) {
  // single-root candidates: [0,1] = 5+3 = 8, [2,0] = 1+2 = 3
  ArcScoreMatrix s(2, 0.0);
  s.at(0, 1) = 5;
  s.at(0, 2) = 1;
  s.at(1, 2) = 3;
  s.at(2, 1) = 2;
  const auto h = eisner(s, true);
  EXPECT_EQ(h, (std::vector<int>{0, 1}));
  EXPECT_EQ(tree_score(s, h), 8.0);
  EXPECT_EQ(brute_force_projective(s, true), (std::vector<int>{0, 1}));
}

TEST(Eisner, UniformScoresUseCanonicalTie) {
  ArcScoreMatrix s(3, 1.0);
  const auto e = eisner(s, true);
  EXPECT_EQ(e, brute_force_projective(s, true));
  EXPECT_EQ(e, (std::vector<int>{0, 1, 1}));
  EXPECT_EQ(eisner(s, false), (std::vector<int>{0, 0, 0}));
}

TEST(Eisner, MatchesBruteForce) {
  std::mt19937_64 rng(99);
  for (int n = 1; n <= 7; ++n)
    for (bool single : {true, false})
      for (int trial = 0; trial < 60; ++trial) {
        const bool dyadic = trial % 2 == 0;
        const auto s = random_scores(rng, n, dyadic);
        const auto e = eisner(s, single);
        const auto b = brute_force_projective(s, single);
        ASSERT_TRUE(is_valid_tree(e));
        ASSERT_TRUE(is_projective(e));
        if (single) {
          ASSERT_EQ(roots(e), 1);
        }
        if (dyadic) {
          ASSERT_EQ(tree_score(s, e), tree_score(s, b)) << "n=" << n;
          ASSERT_EQ(e, b) << "n=" << n;  // same tie-break
        } else {
          ASSERT_NEAR(tree_score(s, e), tree_score(s, b), 1e-9) << "n=" << n;
        }
      }
}

TEST(Eisner, ShiftAndScaleInvariance) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 2 + trial % 12;
    auto s = random_scores(rng, n, false);
    const auto base = eisner(s);
    auto shifted = s;
    const int d = 1 + trial % n;
    for (int h = 0; h <= n; ++h) shifted.at(h, d) += 3.25;
    EXPECT_EQ(eisner(shifted), base);
    auto scaled = s;
    for (int h = 0; h <= n; ++h)
      for (int dd = 1; dd <= n; ++dd) scaled.at(h, dd) *= 4.0;
    EXPECT_EQ(eisner(scaled), base);
  }
}

TEST(Eisner, RecoversPlantedTree) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const int n = 3 + trial;
    const auto gold = testutil::random_projective_tree(rng, n);
    ArcScoreMatrix s(n, -1.0);
    for (int d = 1; d <= n; ++d) s.at(gold[static_cast<std::size_t>(d - 1)], d) = 1.0;
    EXPECT_EQ(eisner(s, true), gold);
  }
}

TEST(Eisner, BruteForceRefusesLongSentences) {
  ArcScoreMatrix s(kMaxBruteForceLength + 1);
  EXPECT_THROW(brute_force_projective(s), std::invalid_argument);
}

TEST(Eisner, EmptyInput) {
  EXPECT_TRUE(eisner(ArcScoreMatrix(0)).empty());
}

// The pruned search against every head vector, filtered afterwards.
TEST(Eisner, BruteForceMatchesFullEnumeration) {
  std::mt19937_64 rng(23);
  for (int n = 1; n <= 5; ++n)
    for (bool single : {true, false})
      for (int trial = 0; trial < 20; ++trial) {
        const auto s = random_scores(rng, n, true);
        std::vector<int> heads(static_cast<std::size_t>(n), 0), best;
        double best_score = 0;
        while (true) {
          if (is_valid_tree(heads) && is_projective(heads) && (!single || roots(heads) == 1)) {
            const double v = tree_score(s, heads);
            if (best.empty() || v > best_score) {
              best = heads;
              best_score = v;
            }
          }
          int pos = n - 1;
          while (pos >= 0 && heads[static_cast<std::size_t>(pos)] == n) heads[static_cast<std::size_t>(pos--)] = 0;
          if (pos < 0) break;
          ++heads[static_cast<std::size_t>(pos)];
        }
        ASSERT_EQ(brute_force_projective(s, single), best) << "n=" << n;
      }
}
