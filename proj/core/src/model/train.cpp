#include "depsrl/model/train.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>

namespace depsrl::model {

std::vector<TrainingExample> make_examples(const ModelVocab& vocab, const std::vector<JointSentence>& corpus) {
  std::vector<TrainingExample> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    TrainingExample ex;
    ex.input = make_input(s.tokens, s.predicates);
    ex.targets.heads = s.tree.heads;
    ex.targets.labels = label_ids(vocab, s.tree);
    out.push_back(std::move(ex));
  }
  return out;
}

std::vector<JointSentence> encode_corpus(const std::vector<AnnotatedSentence>& corpus, const EncodeOptions& options) {
  std::vector<JointSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    JointSentence j;
    j.comments = s.comments;
    j.tokens = s.tokens;
    j.tree = encode_joint(s.tree, s.frames, options).tree;
    j.predicates = s.predicates();
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<AnnotatedSentence> predict_corpus(const JointParser& model, const std::vector<AnnotatedSentence>& corpus,
                                              const PredictOptions& options, int* ignored_c_labels) {
  options.validate();
  std::vector<AnnotatedSentence> out;
  out.reserve(corpus.size());
  for (const auto& s : corpus) {
    const auto preds = s.predicates();
    std::optional<JointTree> gold;
    if (options.gold_syntax) gold = encode_joint(s.tree, s.frames, {std::nullopt, options.language}).tree;
    auto p = model.predict(make_input(s.tokens, preds), preds, options, gold ? &*gold : nullptr);
    if (ignored_c_labels) *ignored_c_labels += p.ignored_c_labels;
    AnnotatedSentence a;
    a.comments = s.comments;
    a.tokens = s.tokens;
    a.tree = p.tree.syntax();
    a.frames = std::move(p.frames);
    out.push_back(std::move(a));
  }
  return out;
}

DevScores evaluate(const JointParser& model, const std::vector<AnnotatedSentence>& corpus,
                   const PredictOptions& options) {
  const auto predicted = predict_corpus(model, corpus, options);
  std::vector<std::vector<SrlFrame>> gold_frames, pred_frames;
  std::vector<DepTree> gold_trees, pred_trees;
  for (std::size_t i = 0; i < corpus.size(); ++i) {
    gold_frames.push_back(corpus[i].frames);
    pred_frames.push_back(predicted[i].frames);
    gold_trees.push_back(corpus[i].tree);
    pred_trees.push_back(predicted[i].tree);
  }
  return {srl_prf(gold_frames, pred_frames), attachment_scores(gold_trees, pred_trees)};
}

TrainResult train(const std::vector<JointSentence>& corpus, const std::vector<AnnotatedSentence>& dev,
                  const ModelConfig& config, const TrainCallbacks& callbacks) {
  config.validate();
  if (corpus.empty()) throw std::invalid_argument("training corpus is empty");
  if (dev.empty()) throw std::invalid_argument("development corpus is empty");

  JointParser model(config, ModelVocab::build(corpus, config.encoder.unk_threshold));
  const auto examples = make_examples(model.vocab(), corpus);
  const auto& tc = config.train;
  std::mt19937_64 rng(tc.seed);
  Adam adam(tc);
  auto& params = model.params();

  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<Matrix> best_values;
  std::vector<EpochStats> history;
  double best_f1 = -1.0, best_uas = -1.0;
  int best_epoch = 0, bad_epochs = 0, decays = 0;
  double lr = tc.learning_rate;
  long step = 0;

  for (int epoch = 1; epoch <= tc.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    EpochStats stats;
    stats.epoch = epoch;
    stats.learning_rate = lr;
    double loss_sum = 0.0;
    long token_sum = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += static_cast<std::size_t>(tc.batch_size)) {
      const std::size_t end = std::min(order.size(), begin + static_cast<std::size_t>(tc.batch_size));
      long tokens = 0;
      for (std::size_t b = begin; b < end; ++b) tokens += examples[order[b]].input.size();
      params.zero_grad();
      double batch_loss = 0.0;
      for (std::size_t b = begin; b < end; ++b) {
        const auto& ex = examples[order[b]];
        batch_loss += model.loss(ex.input, ex.targets, 1.0 / static_cast<double>(tokens)).total;
      }
      const double pre = params.clip_grad_norm(tc.grad_clip);
      stats.max_grad_norm = std::max(stats.max_grad_norm, pre);
      ++step;
      if (callbacks.on_step) callbacks.on_step(step, batch_loss, pre, params.grad_norm());
      adam.step(params, lr);
      loss_sum += batch_loss;
      token_sum += tokens;
    }
    stats.train_loss = loss_sum / static_cast<double>(std::max<long>(token_sum, 1));
    stats.dev = evaluate(model, dev);

    const double f1 = stats.dev.srl.f1, uas = stats.dev.attachment.uas;
    stats.improved = f1 > best_f1 || (f1 == best_f1 && uas > best_uas);
    bool stop = false;
    if (stats.improved) {
      best_f1 = f1;
      best_uas = uas;
      best_epoch = epoch;
      bad_epochs = 0;
      best_values.clear();
      for (const auto& prm : params) best_values.push_back(prm.value);
    } else if (++bad_epochs >= tc.lr_patience) {
      if (decays >= tc.max_decays) {
        stop = true;
      } else {
        lr *= tc.lr_decay;
        ++decays;
        bad_epochs = 0;
      }
    }
    stats.decays = decays;
    history.push_back(stats);
    if (callbacks.on_epoch) callbacks.on_epoch(stats);
    if (stop) break;
  }

  for (int i = 0; i < params.size(); ++i) params[i].value = best_values[static_cast<std::size_t>(i)];
  params.zero_grad();
  return {std::move(model), std::move(history), best_epoch};
}

}  // namespace depsrl::model
