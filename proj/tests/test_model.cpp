#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "depsrl/io.hpp"
#include "depsrl/model/checkpoint.hpp"
#include "depsrl/model/config.hpp"
#include "depsrl/model/gradcheck.hpp"
#include "depsrl/model/train.hpp"
#include "depsrl/tree.hpp"
#include "test_util.hpp"

using namespace depsrl;
using namespace depsrl::model;

namespace {

const std::vector<JointSentence>& joint_fixture() {
  static const auto corpus = encode_corpus(io::read_full(testutil::data_path("fixture.full")).sentences);
  return corpus;
}

JointParser tiny_model(std::uint64_t seed = 1) {
  auto c = tiny_config();
  c.encoder.seed = seed;
  return JointParser(c, ModelVocab::build(joint_fixture(), 1));
}

Matrix random_matrix(std::mt19937_64& rng, int r, int c) {
  std::normal_distribution<double> g(0.0, 1.0);
  Matrix m(r, c);
  for (int i = 0; i < r; ++i)
    for (int j = 0; j < c; ++j) m(i, j) = g(rng);
  return m;
}

// Written out with explicit loops, independent of the Eigen expressions
// in the model.
std::vector<double> naive_dba(const Eigen::VectorXd& xi, const Eigen::VectorXd& xj, const Matrix& wi,
                              const Matrix& bi, const Matrix& wj, const Matrix& bj, const Matrix& u, double slope) {
  const int d = static_cast<int>(wi.cols());
  auto mlp = [&](const Eigen::VectorXd& x, const Matrix& w, const Matrix& b) {
    std::vector<double> h(static_cast<std::size_t>(d + 1), 1.0);
    for (int k = 0; k < d; ++k) {
      double s = b(0, k);
      for (int a = 0; a < x.size(); ++a) s += w(a, k) * x(a);
      h[static_cast<std::size_t>(k)] = s > 0 ? s : slope * s;
    }
    return h;
  };
  const auto hi = mlp(xi, wi, bi);
  const auto hj = mlp(xj, wj, bj);
  const int r = static_cast<int>(u.cols()) / (d + 1);
  std::vector<double> z(static_cast<std::size_t>(r), 0.0);
  for (int k = 0; k < r; ++k)
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b)
        z[static_cast<std::size_t>(k)] += hi[static_cast<std::size_t>(a)] * u(a, k * (d + 1) + b) * hj[static_cast<std::size_t>(b)];
  return z;
}

Targets targets_of(const JointParser& m, const JointSentence& s) { return {s.tree.heads, label_ids(m.vocab(), s.tree)}; }

}  // namespace

TEST(Dba, ZeroTensorGivesZero) {
  std::mt19937_64 rng(1);
  const Matrix wi = random_matrix(rng, 4, 3), bi = random_matrix(rng, 1, 3);
  const Matrix wj = random_matrix(rng, 4, 3), bj = random_matrix(rng, 1, 3);
  const Matrix u = Matrix::Zero(4, 4 * 5);
  const auto z = dba(random_matrix(rng, 4, 1).col(0), random_matrix(rng, 4, 1).col(0), wi, bi, wj, bj, u, 0.1);
  ASSERT_EQ(z.size(), 5);
  for (int k = 0; k < 5; ++k) EXPECT_EQ(z(k), 0.0);
}

TEST(Dba, OneDimensionalIdentity) {
  const Matrix one = Matrix::Constant(1, 1, 1.0), zero = Matrix::Zero(1, 1);
  Matrix u = Matrix::Zero(2, 2);
  u(0, 0) = 1.0;
  Eigen::VectorXd a(1), b(1);
  for (double x : {-2.0, 0.5, 3.0})
    for (double y : {-1.5, 0.0, 4.0}) {
      a(0) = x;
      b(0) = y;
      const auto z = dba(a, b, one, zero, one, zero, u, 1.0);
      EXPECT_DOUBLE_EQ(z(0), x * y);
    }
}

TEST(Dba, MatchesNaiveLoops) {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    const int in = 3 + trial % 4, d = 2 + trial % 3, r = 1 + trial % 5;
    const Matrix wi = random_matrix(rng, in, d), bi = random_matrix(rng, 1, d);
    const Matrix wj = random_matrix(rng, in, d), bj = random_matrix(rng, 1, d);
    const Matrix u = random_matrix(rng, d + 1, r * (d + 1));
    const Eigen::VectorXd xi = random_matrix(rng, in, 1).col(0), xj = random_matrix(rng, in, 1).col(0);
    const auto z = dba(xi, xj, wi, bi, wj, bj, u, 0.1);
    const auto ref = naive_dba(xi, xj, wi, bi, wj, bj, u, 0.1);
    for (int k = 0; k < r; ++k) EXPECT_NEAR(z(k), ref[static_cast<std::size_t>(k)], 1e-9);
  }
}

TEST(Model, ShapesAndNormalization) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[1];
  const auto input = make_input(s.tokens, s.predicates);
  const int n = s.size();
  const auto x = m.encode(input);
  EXPECT_EQ(x.rows(), n + 1);
  EXPECT_EQ(x.cols(), m.config().encoder.model_dim);
  const auto st = m.score(input);
  EXPECT_EQ(st.arc.rows(), n + 1);
  EXPECT_EQ(st.arc.cols(), n + 1);
  EXPECT_EQ(st.labels[0].rows(), n);
  EXPECT_EQ(st.labels[0].cols(), m.vocab().syn.size());
  EXPECT_EQ(st.labels[1].cols(), m.vocab().d.size());
  EXPECT_EQ(st.labels[2].cols(), m.vocab().c.size());
  EXPECT_EQ(st.labels[3].cols(), m.vocab().r.size());
  for (int j = 1; j <= n; ++j) {
    double total = 0.0;
    for (int i = 0; i <= n; ++i)
      if (i != j) total += std::exp(st.arc_log_probs(i, j));
    EXPECT_NEAR(total, 1.0, 1e-6);
    EXPECT_TRUE(std::isinf(st.arc_log_probs(j, j)));
  }
  EXPECT_TRUE(is_projective(st.heads));
}

TEST(Model, ZeroAttachmentScorerIsUniform) {
  auto m = tiny_model();
  for (auto& p : m.params())
    if (p.name.rfind("attachment.", 0) == 0) p.value.setZero();
  const auto& s = joint_fixture()[0];
  const auto st = m.score(make_input(s.tokens, s.predicates));
  const int n = s.size();
  for (int j = 1; j <= n; ++j)
    for (int i = 0; i <= n; ++i)
      if (i != j) {
        EXPECT_NEAR(st.arc_log_probs(i, j), -std::log(static_cast<double>(n)), 1e-12);
      }
}

TEST(Model, DeterministicInitialization) {
  auto a = tiny_model(5), b = tiny_model(5), c = tiny_model(6);
  const auto& s = joint_fixture()[3];
  const auto input = make_input(s.tokens, s.predicates);
  EXPECT_EQ(a.score(input).arc, b.score(input).arc);
  EXPECT_NE(a.score(input).arc, c.score(input).arc);
}

TEST(Model, PredicateFlagMatters) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[0];
  const auto with = m.encode(make_input(s.tokens, s.predicates));
  const auto without = m.encode(make_input(s.tokens, std::vector<int>{}));
  EXPECT_GT((with - without).norm(), 1e-6);
}

TEST(Model, UnseenWordsMapToUnknown) {
  auto m = tiny_model();
  EXPECT_EQ(m.vocab().word_id("zyzzyva"), kUnkWord);
  const auto p = m.predict(make_input(std::vector<std::string>{"zyzzyva", "qux"}, {1}), {1});
  EXPECT_EQ(p.tree.size(), 2);
  ASSERT_EQ(p.frames.size(), 1u);
}

TEST(Model, UntrainedPredictionIsTotal) {
  auto m = tiny_model(3);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 1 + trial % 20;
    std::vector<std::string> forms;
    for (int i = 0; i < n; ++i) forms.push_back(testutil::random_form(rng));
    const auto preds = testutil::random_predicates(rng, n);
    for (bool single : {true, false}) {
      PredictOptions o;
      o.single_root = single;
      const auto p = m.predict(make_input(forms, preds), preds, o);
      ASSERT_TRUE(is_valid_tree(p.tree.heads));
      ASSERT_TRUE(is_projective(p.tree.heads));
      ASSERT_EQ(p.frames.size(), preds.size());
      for (const auto& f : p.frames) validate_frame(f, n);
    }
  }
}

TEST(Model, LongSentencesReuseLastPosition) {
  auto m = tiny_model();
  const int n = m.config().encoder.max_positions + 4;
  std::vector<std::string> forms(static_cast<std::size_t>(n), "the");
  EXPECT_EQ(m.encode(make_input(forms, {})).rows(), n + 1);
}

TEST(Model, AblationNeedsReference) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[0];
  PredictOptions o;
  o.gold_syntax = true;
  EXPECT_THROW(m.predict(make_input(s.tokens, s.predicates), s.predicates, o), std::invalid_argument);
  const auto p = m.predict(make_input(s.tokens, s.predicates), s.predicates, o, &s.tree);
  EXPECT_EQ(p.tree.heads, s.tree.heads);
  EXPECT_EQ(p.tree.syntax(), s.tree.syntax());
  o.gold_d = true;
  const auto q = m.predict(make_input(s.tokens, s.predicates), s.predicates, o, &s.tree);
  for (int i = 1; i <= s.size(); ++i) EXPECT_EQ(q.tree.label(i).d, s.tree.label(i).d);
  o.gold_rc = true;
  EXPECT_THROW(o.validate(), std::invalid_argument);
}

TEST(Loss, ExtendedMatchesDouble) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[1];
  const auto input = make_input(s.tokens, s.predicates);
  const auto t = targets_of(m, s);
  const double a = m.loss(input, t).total;
  const long double b = m.loss_extended(input, t);
  EXPECT_NEAR(a, static_cast<double>(b), 1e-9 * std::abs(a));
}

TEST(Loss, WeightsScaleGradientsLinearly) {
  auto base = tiny_config();
  auto doubled = base;
  for (auto& w : doubled.train.loss_weights) w *= 2.0;
  const auto vocab = ModelVocab::build(joint_fixture(), 1);
  JointParser a(base, vocab), b(doubled, vocab);
  const auto& s = joint_fixture()[2];
  const auto input = make_input(s.tokens, s.predicates);
  const auto ta = targets_of(a, s);
  a.params().zero_grad();
  b.params().zero_grad();
  const auto la = a.loss(input, ta, 1.0);
  const auto lb = b.loss(input, ta, 1.0);
  EXPECT_NEAR(lb.total, 2.0 * la.total, 1e-9);
  for (int i = 0; i < a.params().size(); ++i)
    EXPECT_LT((b.params()[i].grad - 2.0 * a.params()[i].grad).norm(), 1e-9 * (1.0 + a.params()[i].grad.norm()))
        << a.params()[i].name;
}

TEST(Loss, ZeroWeightSilencesScorer) {
  auto c = tiny_config();
  c.train.loss_weights[static_cast<int>(Component::r)] = 0.0;
  JointParser m(c, ModelVocab::build(joint_fixture(), 1));
  const auto& s = joint_fixture()[5];
  m.params().zero_grad();
  m.loss(make_input(s.tokens, s.predicates), targets_of(m, s), 1.0);
  for (const auto& p : m.params()) {
    if (p.name.rfind("r.", 0) == 0) {
      EXPECT_EQ(p.grad.norm(), 0.0) << p.name;
    }
  }
  EXPECT_GT(m.params()[m.params().find("d.u")].grad.norm(), 0.0);
}

TEST(Loss, UnseenLabelsAreSkipped) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[0];
  auto t = targets_of(m, s);
  const double full = m.loss(make_input(s.tokens, s.predicates), t).components[1];
  std::fill(t.labels.syn.begin(), t.labels.syn.end(), -1);
  EXPECT_EQ(m.loss(make_input(s.tokens, s.predicates), t).components[1], 0.0);
  EXPECT_GT(full, 0.0);
}

TEST(GradCheck, TinyConfig) {
  const auto r = grad_check_builtin(tiny_config());
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_tensor;
  EXPECT_EQ(static_cast<int>(r.tensors.size()), JointParser(tiny_config(), ModelVocab::build(joint_fixture(), 1)).params().size());
  for (const auto& t : r.tensors) EXPECT_GT(t.checked, 0) << t.name;
}

TEST(GradCheck, WithPretrainedChannelAndSampling) {
  auto c = tiny_config();
  c.encoder.pretrained_emb_dim = 3;
  c.encoder.layers = 1;
  GradCheckOptions o;
  o.samples_per_tensor = 4;
  o.seed = 3;
  const auto r = grad_check_builtin(c, o);
  EXPECT_LT(r.max_rel_error, 1e-4) << r.worst_tensor;
}

TEST(GradCheck, FixtureSentence) {
  auto m = tiny_model();
  const auto& s = joint_fixture()[1];
  GradCheckOptions o;
  o.samples_per_tensor = 3;
  EXPECT_LT(grad_check(m, make_input(s.tokens, s.predicates), targets_of(m, s), o).max_rel_error, 1e-4);
}

TEST(Optim, ClipBoundsNorm) {
  ParameterStore ps;
  const int a = ps.add("a", 3, 2);
  const int b = ps.add("b", 4, 1);
  ps[a].grad.setConstant(7.0);
  ps[b].grad.setConstant(-3.0);
  const double before = ps.clip_grad_norm(5.0);
  EXPECT_NEAR(before, std::sqrt(6 * 49.0 + 4 * 9.0), 1e-12);
  EXPECT_LE(ps.grad_norm(), 5.0 + 1e-9);
  ps[a].grad.setConstant(0.1);
  ps[b].grad.setConstant(0.1);
  ps.clip_grad_norm(5.0);
  EXPECT_NEAR(ps[a].grad(0, 0), 0.1, 0.0);  // untouched below the bound
}

TEST(Optim, AdamFirstStepByHand) {
  // m = 0.05, v = 0.00025; bias-corrected m = 0.5, v = 0.25; step 0.1 * 0.5 / (0.5 + 1e-8)
  ParameterStore ps;
  const int a = ps.add("a", 1, 1);
  ps[a].value(0, 0) = 1.0;
  ps[a].grad(0, 0) = 0.5;
  TrainConfig tc;
  Adam adam(tc);
  adam.step(ps, 0.1);
  EXPECT_NEAR(ps[a].value(0, 0), 1.0 - 0.1 * 0.5 / (0.5 + 1e-8), 1e-15);
  EXPECT_EQ(adam.steps(), 1);
}

TEST(Train, ClippedStepsAndDescent) {
  auto c = tiny_config();
  c.train.max_epochs = 2;
  c.train.grad_clip = 5.0;
  c.train.learning_rate = 1e-3;
  const std::vector<JointSentence> corpus(joint_fixture().begin(), joint_fixture().begin() + 8);
  const auto dev = io::read_full(testutil::data_path("fixture.full")).sentences;
  double worst = 0.0;
  std::vector<double> losses;
  TrainCallbacks cb;
  cb.on_step = [&](long, double loss, double, double post) {
    worst = std::max(worst, post);
    losses.push_back(loss);
  };
  const auto r = train(corpus, {dev.begin(), dev.begin() + 8}, c, cb);
  EXPECT_LE(worst, 5.0 + 1e-9);
  EXPECT_EQ(r.history.size(), 2u);
  ASSERT_FALSE(losses.empty());

  // one small step on a single batch lowers that batch's loss
  auto m = tiny_model();
  const auto& s = joint_fixture()[0];
  const auto input = make_input(s.tokens, s.predicates);
  const auto t = targets_of(m, s);
  m.params().zero_grad();
  const double before = m.loss(input, t, 1.0).total;
  Adam adam(c.train);
  adam.step(m.params(), 1e-3);
  EXPECT_LT(m.loss(input, t).total, before);
}

TEST(Train, RejectsEmptyInput) {
  EXPECT_THROW(train({}, io::read_full(testutil::data_path("fixture.full")).sentences, tiny_config()),
               std::invalid_argument);
  EXPECT_THROW(train(joint_fixture(), {}, tiny_config()), std::invalid_argument);
}

TEST(Config, JsonRoundTrip) {
  for (const auto& c : {desk_config(), tiny_config(), full_scale_config()})
    EXPECT_EQ(config_to_json(config_from_json(config_to_json(c))), config_to_json(c));
  EXPECT_THROW(config_from_json(R"({"encoder": {"layerz": 2}})"), ConfigError);
  auto bad = tiny_config();
  bad.encoder.model_dim = 7;  // not divisible by 2 heads
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny_config();
  bad.train.lr_decay = 1.0;
  EXPECT_THROW(bad.validate(), ConfigError);
  bad = tiny_config();
  bad.train.grad_clip = 0.0;
  EXPECT_THROW(bad.validate(), ConfigError);
}

TEST(Checkpoint, RoundTrip) {
  auto m = tiny_model(9);
  std::stringstream buf;
  save_checkpoint(m, buf);
  const auto bytes = buf.str();
  EXPECT_EQ(bytes.substr(0, 8), "DEPSRLCK");
  std::istringstream in(bytes);
  const auto back = load_checkpoint(in);
  EXPECT_EQ(back.vocab(), m.vocab());
  EXPECT_EQ(config_to_json(back.config()), config_to_json(m.config()));
  for (int i = 0; i < m.params().size(); ++i) EXPECT_EQ(back.params()[i].value, m.params()[i].value);
  const auto& s = joint_fixture()[4];
  const auto input = make_input(s.tokens, s.predicates);
  EXPECT_EQ(back.score(input).arc, m.score(input).arc);
  std::stringstream again;
  save_checkpoint(back, again);
  EXPECT_EQ(again.str(), bytes);
}

TEST(Checkpoint, RejectsDamage) {
  auto m = tiny_model();
  std::stringstream buf;
  save_checkpoint(m, buf);
  const auto bytes = buf.str();

  auto version = bytes;
  version[8] = 9;  // format version
  std::istringstream v(version);
  EXPECT_THROW(load_checkpoint(v), CheckpointError);

  auto magic = bytes;
  magic[0] = 'X';
  std::istringstream mg(magic);
  EXPECT_THROW(load_checkpoint(mg), CheckpointError);

  std::istringstream trunc(bytes.substr(0, bytes.size() - 5));
  EXPECT_THROW(load_checkpoint(trunc), CheckpointError);

  auto cfg = bytes;
  const auto pos = cfg.find("\"config_version\":1");
  ASSERT_NE(pos, std::string::npos);
  cfg[pos + 17] = '2';
  std::istringstream cv(cfg);
  EXPECT_THROW(load_checkpoint(cv), CheckpointError);
}
