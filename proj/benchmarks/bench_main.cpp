#include <benchmark/benchmark.h>

#include <random>

#include "depsrl/analyze.hpp"
#include "depsrl/convert.hpp"
#include "depsrl/io.hpp"
#include "depsrl/model/config.hpp"
#include "depsrl/model/parser.hpp"
#include "depsrl/model/train.hpp"
#include "depsrl/projective.hpp"

using namespace depsrl;

namespace {

const std::vector<AnnotatedSentence>& fixture() {
  static const auto s = io::read_full(std::string(DEPSRL_BENCH_DATA_DIR) + "/fixture.full").sentences;
  return s;
}

ArcScoreMatrix random_scores(int n) {
  std::mt19937_64 rng(static_cast<std::uint64_t>(n));
  std::normal_distribution<double> g;
  ArcScoreMatrix s(n);
  for (int h = 0; h <= n; ++h)
    for (int d = 1; d <= n; ++d)
      if (h != d) s.at(h, d) = g(rng);
  return s;
}

void BM_Eisner(benchmark::State& state) {
  const auto s = random_scores(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(eisner(s, true));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Eisner)->RangeMultiplier(2)->Range(8, 128)->Complexity(benchmark::oNCubed);

void BM_EncodeFixture(benchmark::State& state) {
  const auto& corpus = fixture();
  for (auto _ : state)
    for (const auto& s : corpus) benchmark::DoNotOptimize(encode_joint(s.tree, s.frames));
}
BENCHMARK(BM_EncodeFixture);

void BM_OracleFixture(benchmark::State& state) {
  const auto& corpus = fixture();
  for (auto _ : state) benchmark::DoNotOptimize(oracle_roundtrip(corpus));
}
BENCHMARK(BM_OracleFixture);

void BM_Predict(benchmark::State& state) {
  const auto joint = model::encode_corpus(fixture());
  const model::JointParser m(model::desk_config(), model::ModelVocab::build(joint, 1));
  const auto& s = joint[0];
  const auto input = model::make_input(s.tokens, s.predicates);
  for (auto _ : state) benchmark::DoNotOptimize(m.predict(input, s.predicates));
}
BENCHMARK(BM_Predict);

void BM_LossAndGradient(benchmark::State& state) {
  const auto joint = model::encode_corpus(fixture());
  model::JointParser m(model::desk_config(), model::ModelVocab::build(joint, 1));
  const auto ex = model::make_examples(m.vocab(), joint);
  for (auto _ : state) benchmark::DoNotOptimize(m.loss(ex[0].input, ex[0].targets, 1.0));
}
BENCHMARK(BM_LossAndGradient);

}  // namespace

BENCHMARK_MAIN();
