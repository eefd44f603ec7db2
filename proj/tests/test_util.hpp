#pragma once

#include <algorithm>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "depsrl/convert.hpp"
#include "depsrl/io.hpp"
#include "depsrl/types.hpp"

namespace depsrl::testutil {

#ifndef DEPSRL_TEST_DATA_DIR
#define DEPSRL_TEST_DATA_DIR "tests/data"
#endif

inline std::string data_path(const std::string& name) { return std::string(DEPSRL_TEST_DATA_DIR) + "/" + name; }

inline std::vector<Token> make_tokens(const std::vector<std::string>& forms) {
  std::vector<Token> t;
  for (std::size_t i = 0; i < forms.size(); ++i) t.push_back({static_cast<int>(i) + 1, forms[i], std::nullopt});
  return t;
}

// "She wanted to design the bridge", A0/A1 style labels.
inline AnnotatedSentence wanted() {
  AnnotatedSentence s;
  s.tokens = make_tokens({"She", "wanted", "to", "design", "the", "bridge"});
  s.tree.heads = {2, 0, 4, 2, 6, 4};
  s.tree.rels = {"nsubj", "root", "mark", "xcomp", "det", "dobj"};
  s.frames = {{2, {{"A0", {1, 1}}, {"A1", {3, 6}}}}, {4, {{"A0", {1, 1}}, {"A1", {5, 6}}}}};
  canonicalize(s.frames);
  return s;
}

// Uniformly attaches tokens in a random order to already placed ones.
// With allow_multi_root, later tokens may also attach to the root.
inline std::vector<int> random_tree(std::mt19937_64& rng, int n, bool allow_multi_root = false) {
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 1);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  for (int k = 1; k < n; ++k) {
    std::uniform_int_distribution<int> pick(allow_multi_root ? -1 : 0, k - 1);
    const int r = pick(rng);
    heads[static_cast<std::size_t>(order[static_cast<std::size_t>(k)] - 1)] =
        r < 0 ? 0 : order[static_cast<std::size_t>(r)];
  }
  return heads;
}

// Random projective tree: recursively split [lo, hi] around a head.
inline void random_projective(std::mt19937_64& rng, std::vector<int>& heads, int lo, int hi, int parent) {
  if (lo > hi) return;
  std::uniform_int_distribution<int> pick(lo, hi);
  const int h = pick(rng);
  heads[static_cast<std::size_t>(h - 1)] = parent;
  random_projective(rng, heads, lo, h - 1, h);
  random_projective(rng, heads, h + 1, hi, h);
}

inline std::vector<int> random_projective_tree(std::mt19937_64& rng, int n) {
  std::vector<int> heads(static_cast<std::size_t>(n), 0);
  random_projective(rng, heads, 1, n, 0);
  return heads;
}

inline const std::vector<std::string>& srl_alphabet() {
  static const std::vector<std::string> labels = {
      "ARG0",     "ARG1",     "ARG2",     "ARG3",     "ARG4",     "ARG5",     "ARGA",     "ARGM-ADV", "ARGM-CAU",
      "ARGM-DIR", "ARGM-DIS", "ARGM-EXT", "ARGM-LOC", "ARGM-MNR", "ARGM-MOD", "ARGM-NEG", "ARGM-PNC", "ARGM-PRD",
      "ARGM-TMP", "ARGM-PRX", "ARGM-GOL", "ARGM-COM", "ARGM-REC", "ARGM-LVB", "ARGM-ADJ", "ARGM-DSP", "C-ARG0",
      "C-ARG1",   "C-ARG2",   "R-ARG0",   "R-ARG1",   "R-ARG2",   "R-ARGM-LOC", "R-ARGM-TMP", "C-ARGM-ADV",
      "A0",       "A1",       "AM-TMP"};
  return labels;
}

inline const std::vector<std::string>& syn_alphabet() {
  static const std::vector<std::string> labels = {
      "nsubj", "dobj", "iobj", "xcomp", "ccomp", "conj", "cc", "vmod", "rcmod", "amod", "det", "prep", "pobj",
      "aux", "auxpass", "nsubjpass", "mark", "advmod", "neg", "punct", "root", "dep", "mmod", "nn", "poss",
      "prt", "npadvmod", "compound:prt", "acl:relcl", "obl:tmod"};
  return labels;
}

template <class T>
const T& pick(std::mt19937_64& rng, const std::vector<T>& v) {
  std::uniform_int_distribution<std::size_t> d(0, v.size() - 1);
  return v[d(rng)];
}

// Non-overlapping random arguments for every predicate, none covering it.
inline std::vector<SrlFrame> random_frames(std::mt19937_64& rng, int n, const std::vector<int>& predicates) {
  std::vector<SrlFrame> frames;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int p : predicates) {
    SrlFrame f{p, {}};
    int i = 1;
    while (i <= n) {
      if (i == p || u(rng) < 0.5) {
        ++i;
        continue;
      }
      int j = i;
      while (j + 1 <= n && j + 1 != p && u(rng) < 0.5) ++j;
      f.arguments.push_back({pick(rng, srl_alphabet()), {i, j}});
      i = j + 1;
    }
    frames.push_back(std::move(f));
  }
  canonicalize(frames);
  return frames;
}

inline std::vector<int> random_predicates(std::mt19937_64& rng, int n) {
  std::vector<int> preds;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 1; i <= n; ++i)
    if (u(rng) < 0.3) preds.push_back(i);
  return preds;
}

inline std::string random_form(std::mt19937_64& rng) {
  static const std::vector<std::string> pieces = {"a", "bridge", "Z", "7", "-", "\xc3\xa9t\xc3\xa9", "\xe6\xa1\xa5", "_x", "'s", "#",
                                                  ",", "(", ")", "|", "B-", "I-ARG0"};
  std::uniform_int_distribution<int> len(1, 3);
  std::string f;
  for (int k = len(rng); k > 0; --k) f += pick(rng, pieces);
  return f;
}

inline std::vector<std::string> random_comments(std::mt19937_64& rng) {
  std::vector<std::string> c;
  std::uniform_int_distribution<int> count(0, 2);
  for (int k = count(rng); k > 0; --k) c.push_back("# note " + random_form(rng));
  return c;
}

inline AnnotatedSentence random_sentence(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> len(1, 12);
  std::bernoulli_distribution coin(0.5);
  const int n = len(rng);
  AnnotatedSentence s;
  s.comments = random_comments(rng);
  for (int i = 1; i <= n; ++i) {
    std::optional<std::string> pos;
    if (coin(rng)) pos = pick(rng, std::vector<std::string>{"NN", "VBD", "PRP$", "-LRB-", ","});
    s.tokens.push_back({i, random_form(rng), pos});
  }
  s.tree.heads = random_tree(rng, n, coin(rng));
  for (int i = 0; i < n; ++i) s.tree.rels.push_back(pick(rng, syn_alphabet()));
  s.frames = random_frames(rng, n, random_predicates(rng, n));
  return s;
}

inline io::FullDocument random_full_document(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> count(0, 6);
  io::FullDocument d;
  for (int k = count(rng); k > 0; --k) d.sentences.push_back(random_sentence(rng));
  return d;
}

inline io::JointDocument random_joint_document(std::mt19937_64& rng) {
  io::JointDocument d;
  for (auto& s : random_full_document(rng).sentences) {
    auto jt = encode_joint(s.tree, s.frames).tree;
    d.sentences.push_back({s.comments, s.tokens, std::move(jt), s.predicates()});
  }
  return d;
}

}  // namespace depsrl::testutil
