#pragma once

#include <functional>
#include <vector>

#include "depsrl/convert.hpp"
#include "depsrl/eval.hpp"
#include "depsrl/model/parser.hpp"

namespace depsrl::model {

struct TrainingExample {
  SentenceInput input;
  Targets targets;
};

std::vector<TrainingExample> make_examples(const ModelVocab& vocab, const std::vector<JointSentence>& corpus);

/// Forward conversion of every sentence (the joint-label training corpus).
std::vector<JointSentence> encode_corpus(const std::vector<AnnotatedSentence>& corpus,
                                         const EncodeOptions& options = {});

/// Predicted sentences in input order, each with one frame per predicate.
/// Ablation options take their reference labels from the encoded input.
std::vector<AnnotatedSentence> predict_corpus(const JointParser& model, const std::vector<AnnotatedSentence>& corpus,
                                              const PredictOptions& options = {}, int* ignored_c_labels = nullptr);

struct DevScores {
  PrfScore srl;
  AttachmentScore attachment;
};

DevScores evaluate(const JointParser& model, const std::vector<AnnotatedSentence>& corpus,
                   const PredictOptions& options = {});

struct EpochStats {
  int epoch = 0;
  double train_loss = 0.0;  // weighted loss per token
  double learning_rate = 0.0;
  double max_grad_norm = 0.0;  // largest pre-clipping norm of the epoch
  DevScores dev;
  bool improved = false;
  int decays = 0;
};

struct TrainCallbacks {
  std::function<void(const EpochStats&)> on_epoch;
  // Called after clipping with the step number, the total batch loss and
  // the gradient norm before and after clipping.
  std::function<void(long step, double loss, double pre_norm, double post_norm)> on_step;
};

struct TrainResult {
  JointParser model;  // parameters of the best dev epoch
  std::vector<EpochStats> history;
  int best_epoch = 0;
};

/// Minibatch Adam on the summed component cross-entropies. The learning
/// rate decays after `lr_patience` epochs without a better dev score
/// (SRL F1, then UAS); training stops at the first plateau after
/// `max_decays` decays or after `max_epochs`.
TrainResult train(const std::vector<JointSentence>& corpus, const std::vector<AnnotatedSentence>& dev,
                  const ModelConfig& config, const TrainCallbacks& callbacks = {});

}  // namespace depsrl::model
