#pragma once

#include <vector>

#include "depsrl/types.hpp"

namespace depsrl {

struct SubtreeSpan {
  Span span;
  bool contiguous = true;

  bool operator==(const SubtreeSpan&) const = default;
};

/// Children of every position 0..n (index 0 is the root), each list ascending.
std::vector<std::vector<int>> children_of(const std::vector<int>& heads);

/// Range covered by the subtree of token i and whether it has gaps.
SubtreeSpan subtree_span(const std::vector<int>& heads, int i);
SubtreeSpan subtree_span(const DepTree& tree, int i);

/// Marks every token dominated by i (i itself included); index 0 unused.
std::vector<bool> subtree_mask(const std::vector<int>& heads, int i);

/// True if `ancestor` dominates `node` (reflexive).
bool dominates(const std::vector<int>& heads, int ancestor, int node);

/// Preorder (parents before children, left to right) starting at the root.
std::vector<int> preorder(const std::vector<int>& heads);

bool is_projective(const std::vector<int>& heads);
bool is_projective(const DepTree& tree);

}  // namespace depsrl
