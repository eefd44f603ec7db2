#pragma once

#include <stdexcept>
#include <vector>

namespace depsrl {

// Dense arc scores for a sentence of n tokens: at(h, d) scores the arc
// h -> d with h in [0, n] (0 is the root) and d in [1, n].
class ArcScoreMatrix {
 public:
  ArcScoreMatrix() = default;
  explicit ArcScoreMatrix(int n, double fill = 0.0)
      : n_(n), data_(static_cast<std::size_t>((n + 1) * (n + 1)), fill) {}

  int size() const { return n_; }
  double& at(int head, int dep) { return data_[index(head, dep)]; }
  double at(int head, int dep) const { return data_[index(head, dep)]; }

 private:
  std::size_t index(int head, int dep) const {
    return static_cast<std::size_t>(head * (n_ + 1) + dep);
  }

  int n_ = 0;
  std::vector<double> data_;
};

/// Sum of selected arc scores, accumulated in token order.
double tree_score(const ArcScoreMatrix& scores, const std::vector<int>& heads);

/// Highest-scoring projective tree (Eisner's O(n^3) dynamic program).
/// Among equal-scoring trees the lexicographically smallest head vector
/// is returned, i.e. earlier tokens prefer smaller head indices. With
/// `single_root` exactly one token attaches to the root.
std::vector<int> eisner(const ArcScoreMatrix& scores, bool single_root = true);

/// Exhaustive reference with the same objective and tie-break; refuses
/// sentences longer than kMaxBruteForceLength.
inline constexpr int kMaxBruteForceLength = 8;
std::vector<int> brute_force_projective(const ArcScoreMatrix& scores, bool single_root = true);

}  // namespace depsrl
