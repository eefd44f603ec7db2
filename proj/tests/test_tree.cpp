#include <gtest/gtest.h>

#include <random>

#include "depsrl/tree.hpp"
#include "test_util.hpp"

using namespace depsrl;

TEST(Tree, SubtreeOfDesign) {
  const auto s = testutil::wanted();
  const auto r = subtree_span(s.tree, 4);
  EXPECT_EQ(r.span, (Span{3, 6}));
  EXPECT_TRUE(r.contiguous);
}

TEST(Tree, LeafSubtree) {
  const auto s = testutil::wanted();
  for (int leaf : {1, 3, 5}) {
    const auto r = subtree_span(s.tree, leaf);
    EXPECT_EQ(r.span, (Span{leaf, leaf}));
    EXPECT_TRUE(r.contiguous);
  }
}

TEST(Tree, GappedSubtree) {
  // 1 is the root; 4 heads 2 and 5 while 3 hangs off 1, so 4 covers
  // {2,4,5} inside [2,5].
  const std::vector<int> heads = {0, 4, 1, 1, 4};
  const auto r = subtree_span(heads, 4);
  EXPECT_EQ(r.span, (Span{2, 5}));
  EXPECT_FALSE(r.contiguous);
  EXPECT_FALSE(is_projective(heads));
}

TEST(Tree, RootChildCoversSentence) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto heads = testutil::random_tree(rng, 1 + trial % 9);
    const int root = static_cast<int>(std::find(heads.begin(), heads.end(), 0) - heads.begin()) + 1;
    EXPECT_EQ(subtree_span(heads, root).span, (Span{1, static_cast<int>(heads.size())}));
  }
}

TEST(Tree, Projectivity) {
  EXPECT_TRUE(is_projective(testutil::wanted().tree));
  EXPECT_TRUE(is_projective(std::vector<int>{0, 1, 2, 3, 4, 5}));
  // arcs 2->4 and 3->1 cross
  EXPECT_FALSE(is_projective(std::vector<int>{3, 0, 2, 2}));
}

namespace {

bool crossing_free(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int a = 1; a <= n; ++a)
    for (int b = 1; b <= n; ++b) {
      const int l1 = std::min(a, heads[a - 1]), r1 = std::max(a, heads[a - 1]);
      const int l2 = std::min(b, heads[b - 1]), r2 = std::max(b, heads[b - 1]);
      if (l1 < l2 && l2 < r1 && r1 < r2) return false;
    }
  return true;
}

}  // namespace

TEST(Tree, ProjectivityMatchesPairwiseCheck) {
  // Arcs from the root count as arcs from position 0, so crossing-free
  // already implies contiguous subtrees.
  std::mt19937_64 rng(11);
  int nonprojective = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto heads = testutil::random_tree(rng, 1 + trial % 10, trial % 3 == 0);
    const bool expected = crossing_free(heads);
    nonprojective += !expected;
    ASSERT_EQ(is_projective(heads), expected) << "trial " << trial;
  }
  EXPECT_GT(nonprojective, 100);
}

TEST(Tree, Validation) {
  EXPECT_THROW(validate_tree(std::vector<int>{2, 1}), TreeError);     // cycle
  EXPECT_THROW(validate_tree(std::vector<int>{0, 2}), TreeError);     // self loop
  EXPECT_THROW(validate_tree(std::vector<int>{0, 3}), TreeError);     // out of range
  EXPECT_NO_THROW(validate_tree(std::vector<int>{0, 0, 1}));          // several roots are allowed
}

TEST(Tree, Preorder) {
  EXPECT_EQ(preorder(testutil::wanted().tree.heads), (std::vector<int>{2, 1, 4, 3, 6, 5}));
}
