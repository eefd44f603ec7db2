#include "depsrl/projective.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "depsrl/tree.hpp"
#include "depsrl/types.hpp"

namespace depsrl {

double tree_score(const ArcScoreMatrix& scores, const std::vector<int>& heads) {
  double total = 0.0;
  for (int d = 1; d <= static_cast<int>(heads.size()); ++d)
    total += scores.at(heads[static_cast<std::size_t>(d - 1)], d);
  return total;
}

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

// Item kinds. Right items are headed at s, left items at t.
enum Kind { kCompleteLeft = 0, kCompleteRight = 1, kIncompleteLeft = 2, kIncompleteRight = 3 };

class EisnerChart {
 public:
  EisnerChart(const ArcScoreMatrix& scores, bool single_root)
      : scores_(scores), n_(scores.size()), width_(n_ + 1), single_root_(single_root) {
    for (auto& v : score_) v.assign(static_cast<std::size_t>(width_ * width_), kNegInf);
    for (auto& v : split_) v.assign(static_cast<std::size_t>(width_ * width_), -1);
    buf_a_.assign(static_cast<std::size_t>(width_), 0);
    buf_b_.assign(static_cast<std::size_t>(width_), 0);
  }

  std::vector<int> solve() {
    for (int s = 0; s <= n_; ++s) {
      score(kCompleteLeft, s, s) = 0.0;
      score(kCompleteRight, s, s) = 0.0;
    }
    for (int len = 1; len <= n_; ++len) {
      for (int s = 0; s + len <= n_; ++s) {
        const int t = s + len;
        fill_incomplete(s, t);
        fill_complete(s, t);
      }
    }
    std::vector<int> heads(static_cast<std::size_t>(n_ + 1), 0);
    write(kCompleteRight, 0, n_, heads);
    return {heads.begin() + 1, heads.end()};
  }

 private:
  double& score(int kind, int s, int t) { return score_[kind][idx(s, t)]; }
  int& split(int kind, int s, int t) { return split_[kind][idx(s, t)]; }
  std::size_t idx(int s, int t) const { return static_cast<std::size_t>(s * width_ + t); }

  // Sub-items a candidate split combines, and the arc it adds (if any).
  struct Parts {
    int kind_a, sa, ta, kind_b, sb, tb;
    int arc_head = -1, arc_dep = -1;
  };

  Parts parts(int kind, int s, int t, int r) const {
    switch (kind) {
      case kIncompleteLeft: return {kCompleteRight, s, r, kCompleteLeft, r + 1, t, t, s};
      case kIncompleteRight: return {kCompleteRight, s, r, kCompleteLeft, r + 1, t, s, t};
      case kCompleteLeft: return {kCompleteLeft, s, r, kIncompleteLeft, r, t};
      default: return {kIncompleteRight, s, r, kCompleteRight, r, t};
    }
  }

  // Heads of every position an item assigns: right items cover (s, t],
  // left items cover [s, t).
  void write(int kind, int s, int t, std::vector<int>& heads) {
    if (s == t) return;
    const int r = split(kind, s, t);
    write_candidate(kind, s, t, r, heads);
  }

  void write_candidate(int kind, int s, int t, int r, std::vector<int>& heads) {
    const Parts p = parts(kind, s, t, r);
    write(p.kind_a, p.sa, p.ta, heads);
    write(p.kind_b, p.sb, p.tb, heads);
    if (p.arc_head >= 0) heads[static_cast<std::size_t>(p.arc_dep)] = p.arc_head;
  }

  // On equal scores keep the candidate whose head assignment over the
  // item's positions is lexicographically smaller.
  void offer(int kind, int s, int t, int r, double value) {
    if (value == kNegInf) return;
    double& best = score(kind, s, t);
    int& best_r = split(kind, s, t);
    if (value > best) {
      best = value;
      best_r = r;
      return;
    }
    if (value < best) return;
    const bool right = kind == kCompleteRight || kind == kIncompleteRight;
    const int lo = right ? s + 1 : s;
    const int hi = right ? t : t - 1;
    write_candidate(kind, s, t, r, buf_a_);
    write_candidate(kind, s, t, best_r, buf_b_);
    if (std::lexicographical_compare(buf_a_.begin() + lo, buf_a_.begin() + hi + 1, buf_b_.begin() + lo,
                                     buf_b_.begin() + hi + 1))
      best_r = r;
  }

  void fill_incomplete(int s, int t) {
    for (int r = s; r < t; ++r) {
      const double inner = score(kCompleteRight, s, r) + score(kCompleteLeft, r + 1, t);
      if (s > 0) offer(kIncompleteLeft, s, t, r, inner + scores_.at(t, s));
      if (s == 0 && single_root_ && r > 0) continue;
      offer(kIncompleteRight, s, t, r, inner + scores_.at(s, t));
    }
  }

  void fill_complete(int s, int t) {
    if (s > 0)
      for (int r = s; r < t; ++r)
        offer(kCompleteLeft, s, t, r, score(kCompleteLeft, s, r) + score(kIncompleteLeft, r, t));
    for (int r = s + 1; r <= t; ++r)
      offer(kCompleteRight, s, t, r, score(kIncompleteRight, s, r) + score(kCompleteRight, r, t));
  }

  const ArcScoreMatrix& scores_;
  int n_;
  int width_;
  bool single_root_;
  std::vector<double> score_[4];
  std::vector<int> split_[4];
  std::vector<int> buf_a_, buf_b_;
};

}  // namespace

std::vector<int> eisner(const ArcScoreMatrix& scores, bool single_root) {
  if (scores.size() == 0) return {};
  return EisnerChart(scores, single_root).solve();
}

namespace {

bool arcs_cross(int h1, int d1, int h2, int d2) {
  const int a = std::min(h1, d1), b = std::max(h1, d1);
  const int c = std::min(h2, d2), e = std::max(h2, d2);
  return (a < c && c < b && b < e) || (c < a && a < e && e < b);
}

// Depth-first over head vectors in lexicographic order. A partial assignment
// is abandoned once it has a self-loop, a cycle, a second root (single-root
// mode) or two crossing arcs; none of these can be repaired later. Complete
// vectors are still checked in full.
struct BruteForce {
  const ArcScoreMatrix& scores;
  bool single_root;
  int n;
  std::vector<int> heads;
  std::vector<int> best;
  double best_score = kNegInf;

  // heads of 1..d-1 are assigned; the walk stops at the root or at a
  // token without a head yet
  bool closes_cycle(int h, int d) const {
    int k = h;
    while (k != 0 && k < d) k = heads[static_cast<std::size_t>(k - 1)];
    return k == d;
  }

  void search(int d, int roots) {
    if (d > n) {
      if (single_root && roots != 1) return;
      if (!is_valid_tree(heads) || !is_projective(heads)) return;
      const double v = tree_score(scores, heads);
      if (best.empty() || v > best_score) {
        best_score = v;
        best = heads;
      }
      return;
    }
    for (int h = 0; h <= n; ++h) {
      if (h == d) continue;
      if (h == 0 && single_root && roots == 1) continue;
      if (h != 0 && closes_cycle(h, d)) continue;
      bool crosses = false;
      for (int e = 1; e < d && !crosses; ++e) crosses = arcs_cross(heads[static_cast<std::size_t>(e - 1)], e, h, d);
      if (crosses) continue;
      heads[static_cast<std::size_t>(d - 1)] = h;
      search(d + 1, roots + (h == 0));
    }
    heads[static_cast<std::size_t>(d - 1)] = 0;
  }
};

}  // namespace

std::vector<int> brute_force_projective(const ArcScoreMatrix& scores, bool single_root) {
  const int n = scores.size();
  if (n > kMaxBruteForceLength)
    throw std::invalid_argument("brute-force decoding refuses n = " + std::to_string(n) + " > " +
                                std::to_string(kMaxBruteForceLength));
  if (n == 0) return {};
  BruteForce bf{scores, single_root, n, std::vector<int>(static_cast<std::size_t>(n), 0), {}, kNegInf};
  bf.search(1, 0);
  return bf.best;
}

}  // namespace depsrl
