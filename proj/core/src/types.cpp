#include "depsrl/types.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace depsrl {

void canonicalize(SrlFrame& frame) {
  auto& args = frame.arguments;
  std::sort(args.begin(), args.end(), [](const Argument& a, const Argument& b) {
    if (a.span != b.span) return a.span < b.span;
    return a.label < b.label;
  });
  args.erase(std::unique(args.begin(), args.end()), args.end());
}

void canonicalize(std::vector<SrlFrame>& frames) {
  for (auto& f : frames) canonicalize(f);
  std::stable_sort(frames.begin(), frames.end(),
                   [](const SrlFrame& a, const SrlFrame& b) { return a.predicate < b.predicate; });
}

void validate_tree(const std::vector<int>& heads) {
  const int n = static_cast<int>(heads.size());
  for (int i = 1; i <= n; ++i) {
    const int h = heads[static_cast<std::size_t>(i - 1)];
    if (h < 0 || h > n)
      throw TreeError("token " + std::to_string(i) + " has head " + std::to_string(h) +
                      " outside [0, " + std::to_string(n) + "]");
    if (h == i) throw TreeError("token " + std::to_string(i) + " heads itself");
  }
  // 0 = unvisited, 1 = on current path, 2 = known to reach the root
  std::vector<int> state(static_cast<std::size_t>(n + 1), 0);
  state[0] = 2;
  std::vector<int> path;
  for (int i = 1; i <= n; ++i) {
    int cur = i;
    path.clear();
    while (state[static_cast<std::size_t>(cur)] == 0) {
      state[static_cast<std::size_t>(cur)] = 1;
      path.push_back(cur);
      cur = heads[static_cast<std::size_t>(cur - 1)];
    }
    if (state[static_cast<std::size_t>(cur)] == 1)
      throw TreeError("cycle through token " + std::to_string(cur));
    for (int p : path) state[static_cast<std::size_t>(p)] = 2;
  }
}

void validate_tree(const DepTree& tree) {
  if (tree.rels.size() != tree.heads.size())
    throw TreeError("relation count does not match head count");
  validate_tree(tree.heads);
}

bool is_valid_tree(const std::vector<int>& heads) {
  try {
    validate_tree(heads);
    return true;
  } catch (const TreeError&) {
    return false;
  }
}

void validate_frame(const SrlFrame& frame, int sentence_length) {
  const int p = frame.predicate;
  if (p < 1 || p > sentence_length)
    throw TreeError("predicate " + std::to_string(p) + " outside sentence");
  std::set<Argument> seen;
  for (const auto& arg : frame.arguments) {
    const auto& s = arg.span;
    if (s.start < 1 || s.start > s.end || s.end > sentence_length)
      throw TreeError("argument " + arg.label + " of predicate " + std::to_string(p) +
                      " has span [" + std::to_string(s.start) + "," + std::to_string(s.end) +
                      "] outside sentence");
    if (s.contains(p))
      throw TreeError("argument " + arg.label + " of predicate " + std::to_string(p) +
                      " covers its own predicate");
    if (arg.label.empty()) throw TreeError("empty argument label");
    if (!seen.insert(arg).second)
      throw TreeError("duplicate argument " + arg.label + " of predicate " + std::to_string(p));
  }
}

DepTree JointTree::syntax() const {
  DepTree t;
  t.heads = heads;
  t.rels.reserve(labels.size());
  for (const auto& l : labels) t.rels.push_back(l.syn);
  return t;
}

const char* to_string(PatternClass p) {
  switch (p) {
    case PatternClass::D: return "D";
    case PatternClass::C: return "C";
    case PatternClass::R: return "R";
    case PatternClass::Other: return "Other";
  }
  return "?";
}

std::vector<int> AnnotatedSentence::predicates() const {
  std::vector<int> out;
  out.reserve(frames.size());
  for (const auto& f : frames) out.push_back(f.predicate);
  std::sort(out.begin(), out.end());
  return out;
}

bool is_modifier_label(const std::string& label) { return label.rfind("ARGM-", 0) == 0; }

}  // namespace depsrl
