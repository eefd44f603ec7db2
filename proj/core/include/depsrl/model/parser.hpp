#pragma once

#include <array>
#include <vector>

#include "depsrl/convert.hpp"
#include "depsrl/model/config.hpp"
#include "depsrl/model/params.hpp"
#include "depsrl/model/vocab.hpp"
#include "depsrl/types.hpp"

namespace depsrl::model {

struct SentenceInput {
  std::vector<std::string> forms;      // tokens 1..n
  std::vector<bool> predicate_flags;   // parallel to forms
  Matrix pretrained;                   // empty, or (n+1) x pretrained_emb_dim with row 0 for the root

  int size() const { return static_cast<int>(forms.size()); }
};

SentenceInput make_input(const std::vector<Token>& tokens, const std::vector<int>& predicates);
SentenceInput make_input(const std::vector<std::string>& forms, const std::vector<int>& predicates);

struct Targets {
  std::vector<int> heads;  // gold head per token
  LabelIds labels;         // -1 entries contribute no loss
};

struct LossBreakdown {
  std::array<double, kNumComponents> components{};  // unweighted summed cross-entropies
  double total = 0.0;                               // weighted sum
  int tokens = 0;
};

// Raw scores of one sentence.
struct ScoreTables {
  Matrix arc;                  // (n+1) x (n+1), arc(i, j) scores head i for dependent j
  Matrix arc_log_probs;        // column-wise log-softmax of arc; the diagonal and column 0 are -inf
  std::vector<int> heads;      // heads the label tables were computed against
  std::array<Matrix, 4> labels;  // syn, d, c, r: n x |V| logits
};

struct PredictOptions {
  bool single_root = true;
  bool gold_syntax = false;  // heads and syntactic labels from the reference tree
  bool gold_d = false;       // additionally D slots from the reference labels
  bool gold_rc = false;      // additionally C and R slots from the reference labels
  Language language = Language::en;

  /// gold_d and gold_rc need gold_syntax and exclude each other.
  void validate() const;
};

struct Prediction {
  JointTree tree;
  std::vector<SrlFrame> frames;
  int ignored_c_labels = 0;
};

/// Bilinear DBA form for one ordered pair:
///   z_k = [mlp_i(x_i); 1]^T U_k [mlp_j(x_j); 1],  mlp(x) = leaky(W^T x + b)
/// with U stored as (d+1) x r(d+1), block k holding U_k.
Eigen::VectorXd dba(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j, const Matrix& w_i, const Matrix& b_i,
                    const Matrix& w_j, const Matrix& b_j, const Matrix& u, double leaky_slope);

// Transformer encoder shared by a unary attachment scorer and four label
// scorers (syn, D, C, R), each a separately parameterized deep biaffine.
class JointParser {
 public:
  /// Random initialization seeded by config.encoder.seed.
  JointParser(ModelConfig config, ModelVocab vocab);

  const ModelConfig& config() const { return config_; }
  const ModelVocab& vocab() const { return vocab_; }
  ParameterStore& params() { return params_; }
  const ParameterStore& params() const { return params_; }

  /// Contextual vectors for positions 0..n (row 0 is the root).
  Matrix encode(const SentenceInput& input) const;

  /// Scores labels against `heads`, or against the decoded tree when null.
  ScoreTables score(const SentenceInput& input, const std::vector<int>* heads = nullptr,
                    bool single_root = true) const;

  /// Summed cross-entropy of all five components with labels scored
  /// against the gold heads. When grad_scale != 0 the gradient times
  /// grad_scale is accumulated into params().grad.
  LossBreakdown loss(const SentenceInput& input, const Targets& targets, double grad_scale = 0.0);

  /// Same objective evaluated in extended (long double) arithmetic; used by
  /// finite-difference checks where the rounding noise of double swamps
  /// gradients that are exactly zero.
  long double loss_extended(const SentenceInput& input, const Targets& targets, double grad_scale = 0.0);

  /// `gold` is required by the ablation options.
  Prediction predict(const SentenceInput& input, const std::vector<int>& predicates,
                     const PredictOptions& options = {}, const JointTree* gold = nullptr) const;

  template <typename T>
  struct Cache;

 private:
  struct LayerIds {
    int ln1_g, ln1_b, wq, bq, wk, bk, wv, bv, wo, bo, ln2_g, ln2_b, w1, b1, w2, b2;
  };
  struct ScorerIds {
    int wi, bi, wj, bj, u;
    int rank;
  };

  void build(std::mt19937_64& rng);
  template <typename T>
  void forward(const SentenceInput& input, Cache<T>& cache) const;
  template <typename T>
  void backward(Cache<T>& cache);
  template <typename T>
  LossBreakdown loss_impl(const SentenceInput& input, const Targets& targets, double grad_scale, T* total);
  template <typename T>
  decltype(auto) p(int id) const { return params_[id].value.template cast<T>(); }
  Matrix& g(int id) { return params_[id].grad; }

  ModelConfig config_;
  ModelVocab vocab_;
  ParameterStore params_;
  int word_emb_, pred_emb_, pos_emb_, proj_w_, proj_b_, final_g_, final_b_;
  std::vector<LayerIds> layers_;
  std::array<ScorerIds, kNumComponents> scorers_{};
};

}  // namespace depsrl::model
