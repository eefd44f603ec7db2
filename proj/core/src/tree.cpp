#include "depsrl/tree.hpp"

#include <algorithm>

namespace depsrl {

std::vector<std::vector<int>> children_of(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  std::vector<std::vector<int>> kids(static_cast<std::size_t>(n + 1));
  for (int i = 1; i <= n; ++i) kids[static_cast<std::size_t>(heads[static_cast<std::size_t>(i - 1)])].push_back(i);
  return kids;
}

std::vector<bool> subtree_mask(const std::vector<int>& heads, int i) {
  const int n = static_cast<int>(heads.size());
  std::vector<bool> in(static_cast<std::size_t>(n + 1), false);
  in[static_cast<std::size_t>(i)] = true;
  // Resolve each token by walking up until a decided ancestor is found.
  std::vector<signed char> known(static_cast<std::size_t>(n + 1), -1);
  known[static_cast<std::size_t>(i)] = 1;
  known[0] = (i == 0) ? 1 : 0;
  std::vector<int> path;
  for (int t = 1; t <= n; ++t) {
    int cur = t;
    path.clear();
    while (known[static_cast<std::size_t>(cur)] < 0) {
      path.push_back(cur);
      cur = heads[static_cast<std::size_t>(cur - 1)];
    }
    const signed char v = known[static_cast<std::size_t>(cur)];
    for (int p : path) known[static_cast<std::size_t>(p)] = v;
  }
  for (int t = 0; t <= n; ++t) in[static_cast<std::size_t>(t)] = known[static_cast<std::size_t>(t)] == 1;
  return in;
}

bool dominates(const std::vector<int>& heads, int ancestor, int node) {
  while (node != 0) {
    if (node == ancestor) return true;
    node = heads[static_cast<std::size_t>(node - 1)];
  }
  return ancestor == 0;
}

SubtreeSpan subtree_span(const std::vector<int>& heads, int i) {
  const auto mask = subtree_mask(heads, i);
  const int n = static_cast<int>(heads.size());
  int lo = i, hi = i, count = 0;
  for (int t = 1; t <= n; ++t) {
    if (!mask[static_cast<std::size_t>(t)]) continue;
    lo = std::min(lo, t);
    hi = std::max(hi, t);
    ++count;
  }
  if (i == 0) lo = std::min(lo, 1);
  return {{lo, hi}, count == hi - lo + 1};
}

SubtreeSpan subtree_span(const DepTree& tree, int i) { return subtree_span(tree.heads, i); }

std::vector<int> preorder(const std::vector<int>& heads) {
  const auto kids = children_of(heads);
  std::vector<int> order;
  order.reserve(heads.size());
  std::vector<int> stack{0};
  while (!stack.empty()) {
    const int cur = stack.back();
    stack.pop_back();
    if (cur != 0) order.push_back(cur);
    const auto& ks = kids[static_cast<std::size_t>(cur)];
    for (auto it = ks.rbegin(); it != ks.rend(); ++it) stack.push_back(*it);
  }
  return order;
}

bool is_projective(const std::vector<int>& heads) {
  // Every token strictly between a head and its dependent must be
  // dominated by that head; this excludes crossing arcs and gapped yields.
  const int n = static_cast<int>(heads.size());
  for (int d = 1; d <= n; ++d) {
    const int h = heads[static_cast<std::size_t>(d - 1)];
    const int lo = std::min(h, d), hi = std::max(h, d);
    for (int k = lo + 1; k < hi; ++k)
      if (!dominates(heads, h, k)) return false;
  }
  return true;
}

bool is_projective(const DepTree& tree) { return is_projective(tree.heads); }

}  // namespace depsrl
