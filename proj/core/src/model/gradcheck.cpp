#include "depsrl/model/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "depsrl/model/train.hpp"

namespace depsrl::model {

GradCheckResult grad_check(JointParser& model, const SentenceInput& input, const Targets& targets,
                           const GradCheckOptions& options) {
  auto& params = model.params();
  params.zero_grad();
  if (options.extended_precision)
    model.loss_extended(input, targets, 1.0);
  else
    model.loss(input, targets, 1.0);
  std::vector<Matrix> analytic;
  for (const auto& p : params) analytic.push_back(p.grad);
  params.zero_grad();

  std::mt19937_64 rng(options.seed);
  GradCheckResult result;
  for (int t = 0; t < params.size(); ++t) {
    auto& prm = params[t];
    const auto size = static_cast<std::size_t>(prm.value.size());
    std::vector<std::size_t> idx(size);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    if (options.samples_per_tensor > 0 && size > static_cast<std::size_t>(options.samples_per_tensor)) {
      std::shuffle(idx.begin(), idx.end(), rng);
      idx.resize(static_cast<std::size_t>(options.samples_per_tensor));
    }
    TensorCheck tc;
    tc.name = prm.name;
    for (const auto k : idx) {
      double* v = prm.value.data() + k;
      const double saved = *v;
      // Offsets are applied in double, so divide by the step actually taken.
      auto at = [&](double offset) {
        *v = saved + offset;
        const long double l = options.extended_precision ? model.loss_extended(input, targets)
                                                          : static_cast<long double>(model.loss(input, targets).total);
        *v = saved;
        return l;
      };
      const double h = options.epsilon;
      const long double step1 = static_cast<long double>(saved + h) - static_cast<long double>(saved - h);
      const double numeric = static_cast<double>((at(h) - at(-h)) / step1);
      const double a = analytic[static_cast<std::size_t>(t)].data()[k];
      const double abs_err = std::abs(a - numeric);
      const double rel = abs_err / std::max({std::abs(a), std::abs(numeric), options.denominator_floor});
      tc.max_abs_error = std::max(tc.max_abs_error, abs_err);
      tc.max_rel_error = std::max(tc.max_rel_error, rel);
      ++tc.checked;
    }
    if (result.worst_tensor.empty() || tc.max_rel_error > result.max_rel_error) {
      result.max_rel_error = tc.max_rel_error;
      result.worst_tensor = tc.name;
    }
    result.tensors.push_back(std::move(tc));
  }
  return result;
}

namespace {

// Control (C), direct (D) and reduced-relative (R) relations in one
// sentence, so every label scorer has a non-trivial target.
AnnotatedSentence builtin_sentence() {
  AnnotatedSentence s;
  const char* forms[] = {"She", "wanted", "to", "design", "the", "bridge", "built", "by", "them"};
  for (int i = 0; i < 9; ++i) s.tokens.push_back({i + 1, forms[i], std::nullopt});
  s.tree.heads = {2, 0, 4, 2, 6, 4, 6, 7, 8};
  s.tree.rels = {"nsubj", "root", "mark", "xcomp", "det", "dobj", "vmod", "prep", "pobj"};
  s.frames = {{2, {{"A0", {1, 1}}, {"A1", {3, 9}}}},
              {4, {{"A0", {1, 1}}, {"A1", {5, 9}}}},
              {7, {{"A1", {5, 6}}, {"A0", {8, 9}}}}};
  return s;
}

}  // namespace

GradCheckResult grad_check_builtin(const ModelConfig& config, const GradCheckOptions& options) {
  const auto corpus = encode_corpus({builtin_sentence()});
  JointParser model(config, ModelVocab::build(corpus, 1));
  std::mt19937_64 rng(options.seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> jitter(-0.2, 0.2);
  for (auto& p : model.params())
    for (Eigen::Index k = 0; k < p.value.size(); ++k) p.value.data()[k] += jitter(rng);
  auto ex = make_examples(model.vocab(), corpus).front();
  if (config.encoder.pretrained_emb_dim > 0) {
    ex.input.pretrained = Matrix(ex.input.size() + 1, config.encoder.pretrained_emb_dim);
    init_uniform(ex.input.pretrained, 1.0, rng);
  }
  return grad_check(model, ex.input, ex.targets, options);
}

}  // namespace depsrl::model
