#include "depsrl/model/parser.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "depsrl/label.hpp"
#include "depsrl/projective.hpp"

namespace depsrl::model {

namespace {

template <typename T>
using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <typename T>
using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
template <typename T>
using RowVec = Eigen::Matrix<T, 1, Eigen::Dynamic>;

template <typename T>
constexpr T neg_inf() {
  return -std::numeric_limits<T>::infinity();
}

template <typename T>
struct LnCache {
  Mat<T> xhat;
  Vec<T> inv_std;
};

template <typename T, typename G, typename B>
Mat<T> layer_norm(const Mat<T>& x, const G& gamma, const B& beta, double eps, LnCache<T>& c) {
  const Vec<T> mean = x.rowwise().mean();
  const Mat<T> centered = x.colwise() - mean;
  const Vec<T> var = centered.cwiseAbs2().rowwise().mean();
  c.inv_std = (var.array() + static_cast<T>(eps)).sqrt().inverse().matrix();
  c.xhat = (centered.array().colwise() * c.inv_std.array()).matrix();
  Mat<T> y = (c.xhat.array().rowwise() * gamma.row(0).array()).matrix();
  y.rowwise() += beta.row(0);
  return y;
}

template <typename T, typename G>
Mat<T> layer_norm_backward(const Mat<T>& dy, const LnCache<T>& c, const G& gamma, Matrix& dgamma, Matrix& dbeta) {
  dgamma.row(0) += (dy.array() * c.xhat.array()).colwise().sum().matrix().template cast<double>();
  dbeta.row(0) += dy.colwise().sum().template cast<double>();
  const Mat<T> dxhat = (dy.array().rowwise() * gamma.row(0).array()).matrix();
  const Vec<T> m1 = dxhat.rowwise().mean();
  const Vec<T> m2 = (dxhat.array() * c.xhat.array()).rowwise().mean();
  Mat<T> dx = dxhat.colwise() - m1;
  dx.array() -= c.xhat.array().colwise() * m2.array();
  return (dx.array().colwise() * c.inv_std.array()).matrix();
}

template <typename T>
void softmax_rows(Mat<T>& s) {
  for (Eigen::Index i = 0; i < s.rows(); ++i) {
    const T mx = s.row(i).maxCoeff();
    s.row(i) = (s.row(i).array() - mx).exp().matrix();
    s.row(i) /= s.row(i).sum();
  }
}

template <typename T>
Mat<T> leaky(const Mat<T>& x, double slope) {
  const T a = static_cast<T>(slope);
  return x.unaryExpr([a](T v) { return v > T(0) ? v : a * v; });
}

template <typename T>
Mat<T> leaky_grad(const Mat<T>& pre, double slope) {
  const T a = static_cast<T>(slope);
  return pre.unaryExpr([a](T v) { return v > T(0) ? T(1) : a; });
}

template <typename T, typename B>
void add_bias(Mat<T>& x, const B& b) {
  x.rowwise() += b.row(0);
}

template <typename T>
Mat<T> augment(const Mat<T>& h) {
  Mat<T> a(h.rows(), h.cols() + 1);
  a.leftCols(h.cols()) = h;
  a.col(h.cols()).setOnes();
  return a;
}

// Log-sum-exp ignoring -inf entries.
template <typename V>
auto log_sum_exp(const V& v) {
  using T = typename V::Scalar;
  const T mx = v.maxCoeff();
  if (mx == neg_inf<T>()) return mx;
  return static_cast<T>(mx + std::log((v.array() - mx).exp().sum()));
}

int argmax(const Eigen::Ref<const Eigen::RowVectorXd>& row) {
  Eigen::Index best = 0;
  row.maxCoeff(&best);
  return static_cast<int>(best);
}

template <typename T>
struct LayerCache {
  Mat<T> h_in;
  LnCache<T> ln1;
  Mat<T> a, q, k, v;
  std::vector<Mat<T>> probs;
  Mat<T> o, h_mid;
  LnCache<T> ln2;
  Mat<T> b, u1, r;
};

template <typename T>
struct SideCache {
  Mat<T> pre, aug;
};

}  // namespace

template <typename T>
struct JointParser::Cache {
  int n = 0;
  std::vector<int> word_ids, flag_ids, pos_ids;
  Mat<T> x0;
  std::vector<LayerCache<T>> layers;
  LnCache<T> final_ln;
  Mat<T> out;
  std::array<SideCache<T>, kNumComponents> side_i, side_j;
  Mat<T> d_out;
};

SentenceInput make_input(const std::vector<std::string>& forms, const std::vector<int>& predicates) {
  SentenceInput in;
  in.forms = forms;
  in.predicate_flags.assign(forms.size(), false);
  for (int p : predicates) {
    if (p < 1 || p > static_cast<int>(forms.size()))
      throw std::invalid_argument("predicate " + std::to_string(p) + " outside sentence");
    in.predicate_flags[static_cast<std::size_t>(p - 1)] = true;
  }
  return in;
}

SentenceInput make_input(const std::vector<Token>& tokens, const std::vector<int>& predicates) {
  std::vector<std::string> forms;
  forms.reserve(tokens.size());
  for (const auto& t : tokens) forms.push_back(t.form);
  return make_input(forms, predicates);
}

void PredictOptions::validate() const {
  if ((gold_d || gold_rc) && !gold_syntax) throw std::invalid_argument("gold D/RC ablations require gold syntax");
  if (gold_d && gold_rc) throw std::invalid_argument("gold D and gold RC ablations are mutually exclusive");
}

Eigen::VectorXd dba(const Eigen::VectorXd& x_i, const Eigen::VectorXd& x_j, const Matrix& w_i, const Matrix& b_i,
                    const Matrix& w_j, const Matrix& b_j, const Matrix& u, double leaky_slope) {
  if (b_i.rows() != 1 || b_i.cols() != w_i.cols() || b_j.rows() != 1 || b_j.cols() != w_j.cols())
    throw std::invalid_argument("MLP biases must be row vectors matching W");
  const Matrix pre_i = x_i.transpose() * w_i + b_i;
  const Matrix pre_j = x_j.transpose() * w_j + b_j;
  const Matrix hi = augment(leaky(pre_i, leaky_slope));
  const Matrix hj = augment(leaky(pre_j, leaky_slope));
  const Eigen::Index d1 = hi.cols();
  if (u.rows() != d1 || u.cols() % d1 != 0) throw std::invalid_argument("U has the wrong shape");
  const Eigen::Index r = u.cols() / d1;
  Eigen::VectorXd z(r);
  for (Eigen::Index k = 0; k < r; ++k) z(k) = (hi * u.middleCols(k * d1, d1) * hj.transpose())(0, 0);
  return z;
}

JointParser::JointParser(ModelConfig config, ModelVocab vocab) : config_(std::move(config)), vocab_(std::move(vocab)) {
  config_.validate();
  if (vocab_.words.size() < 2) throw std::invalid_argument("word vocabulary lacks <unk>/<root>");
  if (vocab_.syn.size() == 0) throw std::invalid_argument("syntactic label vocabulary is empty");
  for (const auto* v : {&vocab_.d, &vocab_.c, &vocab_.r})
    if (v->size() == 0 || v->at(kAbsentLabel) != kAbsentSlot)
      throw std::invalid_argument("SRL vocabularies must start with the absent label");
  std::mt19937_64 rng(config_.encoder.seed);
  build(rng);
}

void JointParser::build(std::mt19937_64& rng) {
  const auto& e = config_.encoder;
  const int D = e.model_dim;
  const int in_dim = e.word_emb_dim + e.pretrained_emb_dim + e.predicate_indicator_dim + e.positional_dim;

  word_emb_ = params_.add("embed.word", vocab_.words.size(), e.word_emb_dim);
  pred_emb_ = params_.add("embed.predicate", 2, e.predicate_indicator_dim);
  pos_emb_ = params_.add("embed.position", e.max_positions, e.positional_dim);
  proj_w_ = params_.add("embed.proj_w", in_dim, D);
  proj_b_ = params_.add("embed.proj_b", 1, D);
  init_uniform(params_[word_emb_].value, std::sqrt(3.0 / e.word_emb_dim), rng);
  init_uniform(params_[pred_emb_].value, std::sqrt(3.0 / e.predicate_indicator_dim), rng);
  init_uniform(params_[pos_emb_].value, std::sqrt(3.0 / e.positional_dim), rng);
  init_xavier(params_[proj_w_].value, in_dim, D, rng);

  for (int l = 0; l < e.layers; ++l) {
    const std::string pre = "layer" + std::to_string(l) + ".";
    LayerIds ids{};
    ids.ln1_g = params_.add(pre + "ln1_g", 1, D);
    ids.ln1_b = params_.add(pre + "ln1_b", 1, D);
    ids.wq = params_.add(pre + "attn_wq", D, D);
    ids.bq = params_.add(pre + "attn_bq", 1, D);
    ids.wk = params_.add(pre + "attn_wk", D, D);
    ids.bk = params_.add(pre + "attn_bk", 1, D);
    ids.wv = params_.add(pre + "attn_wv", D, D);
    ids.bv = params_.add(pre + "attn_bv", 1, D);
    ids.wo = params_.add(pre + "attn_wo", D, D);
    ids.bo = params_.add(pre + "attn_bo", 1, D);
    ids.ln2_g = params_.add(pre + "ln2_g", 1, D);
    ids.ln2_b = params_.add(pre + "ln2_b", 1, D);
    ids.w1 = params_.add(pre + "ffn_w1", D, e.ffn_dim);
    ids.b1 = params_.add(pre + "ffn_b1", 1, e.ffn_dim);
    ids.w2 = params_.add(pre + "ffn_w2", e.ffn_dim, D);
    ids.b2 = params_.add(pre + "ffn_b2", 1, D);
    params_[ids.ln1_g].value.setOnes();
    params_[ids.ln2_g].value.setOnes();
    for (int id : {ids.wq, ids.wk, ids.wv, ids.wo}) init_xavier(params_[id].value, D, D, rng);
    init_xavier(params_[ids.w1].value, D, e.ffn_dim, rng);
    init_xavier(params_[ids.w2].value, e.ffn_dim, D, rng);
    layers_.push_back(ids);
  }
  final_g_ = params_.add("final_ln.g", 1, D);
  final_b_ = params_.add("final_ln.b", 1, D);
  params_[final_g_].value.setOnes();

  const int ranks[kNumComponents] = {1, vocab_.syn.size(), vocab_.d.size(), vocab_.c.size(), vocab_.r.size()};
  for (int s = 0; s < kNumComponents; ++s) {
    const std::string pre = std::string(to_string(static_cast<Component>(s))) + ".";
    const int d = s == 0 ? config_.scorer.arc_dim : config_.scorer.label_dim;
    ScorerIds ids{};
    ids.rank = ranks[s];
    ids.wi = params_.add(pre + "mlp_i_w", D, d);
    ids.bi = params_.add(pre + "mlp_i_b", 1, d);
    ids.wj = params_.add(pre + "mlp_j_w", D, d);
    ids.bj = params_.add(pre + "mlp_j_b", 1, d);
    ids.u = params_.add(pre + "u", d + 1, ids.rank * (d + 1));
    init_xavier(params_[ids.wi].value, D, d, rng);
    init_xavier(params_[ids.wj].value, D, d, rng);
    init_xavier(params_[ids.u].value, d + 1, d + 1, rng);
    scorers_[static_cast<std::size_t>(s)] = ids;
  }
}

template <typename T>
void JointParser::forward(const SentenceInput& in, Cache<T>& c) const {
  const auto& e = config_.encoder;
  const int n = in.size();
  const int N = n + 1;
  if (static_cast<int>(in.predicate_flags.size()) != n)
    throw std::invalid_argument("predicate flags do not match sentence length");
  const bool has_pretrained = in.pretrained.size() != 0;
  if (has_pretrained && (in.pretrained.rows() != N || in.pretrained.cols() != e.pretrained_emb_dim))
    throw std::invalid_argument("pretrained vectors must be (n+1) x pretrained_emb_dim");

  c.n = n;
  c.word_ids.resize(static_cast<std::size_t>(N));
  c.flag_ids.resize(static_cast<std::size_t>(N));
  c.pos_ids.resize(static_cast<std::size_t>(N));
  const int wd = e.word_emb_dim, pd = e.predicate_indicator_dim, qd = e.positional_dim;
  const int off_pred = wd + e.pretrained_emb_dim;
  const int off_pos = off_pred + pd;
  Matrix x0 = Matrix::Zero(N, off_pos + qd);
  for (int t = 0; t < N; ++t) {
    const auto ut = static_cast<std::size_t>(t);
    c.word_ids[ut] = t == 0 ? kRootWord : vocab_.word_id(in.forms[ut - 1]);
    c.flag_ids[ut] = t > 0 && in.predicate_flags[ut - 1] ? 1 : 0;
    c.pos_ids[ut] = std::min(t, e.max_positions - 1);
    x0.block(t, 0, 1, wd) = params_[word_emb_].value.row(c.word_ids[ut]);
    if (has_pretrained) x0.block(t, wd, 1, e.pretrained_emb_dim) = in.pretrained.row(t);
    x0.block(t, off_pred, 1, pd) = params_[pred_emb_].value.row(c.flag_ids[ut]);
    x0.block(t, off_pos, 1, qd) = params_[pos_emb_].value.row(c.pos_ids[ut]);
  }
  c.x0 = x0.template cast<T>();

  Mat<T> h = c.x0 * p<T>(proj_w_);
  add_bias(h, p<T>(proj_b_));
  const int D = e.model_dim;
  const int dh = D / e.heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  c.layers.assign(layers_.size(), LayerCache<T>{});
  for (std::size_t l = 0; l < layers_.size(); ++l) {
    const auto& ids = layers_[l];
    auto& lc = c.layers[l];
    lc.h_in = h;
    lc.a = layer_norm(h, p<T>(ids.ln1_g), p<T>(ids.ln1_b), e.layer_norm_eps, lc.ln1);
    lc.q = lc.a * p<T>(ids.wq);
    add_bias(lc.q, p<T>(ids.bq));
    lc.k = lc.a * p<T>(ids.wk);
    add_bias(lc.k, p<T>(ids.bk));
    lc.v = lc.a * p<T>(ids.wv);
    add_bias(lc.v, p<T>(ids.bv));
    lc.o.resize(N, D);
    lc.probs.resize(static_cast<std::size_t>(e.heads));
    for (int hh = 0; hh < e.heads; ++hh) {
      Mat<T> sc = lc.q.middleCols(hh * dh, dh) * lc.k.middleCols(hh * dh, dh).transpose() * scale;
      softmax_rows(sc);
      lc.o.middleCols(hh * dh, dh) = sc * lc.v.middleCols(hh * dh, dh);
      lc.probs[static_cast<std::size_t>(hh)] = std::move(sc);
    }
    lc.h_mid = h + lc.o * p<T>(ids.wo);
    add_bias(lc.h_mid, p<T>(ids.bo));
    lc.b = layer_norm(lc.h_mid, p<T>(ids.ln2_g), p<T>(ids.ln2_b), e.layer_norm_eps, lc.ln2);
    lc.u1 = lc.b * p<T>(ids.w1);
    add_bias(lc.u1, p<T>(ids.b1));
    lc.r = lc.u1.cwiseMax(T(0));
    h = lc.h_mid + lc.r * p<T>(ids.w2);
    add_bias(h, p<T>(ids.b2));
  }
  c.out = layer_norm(h, p<T>(final_g_), p<T>(final_b_), e.layer_norm_eps, c.final_ln);

  const double slope = config_.scorer.leaky_slope;
  for (std::size_t s = 0; s < scorers_.size(); ++s) {
    const auto& ids = scorers_[s];
    c.side_i[s].pre = c.out * p<T>(ids.wi);
    add_bias(c.side_i[s].pre, p<T>(ids.bi));
    c.side_i[s].aug = augment(leaky(c.side_i[s].pre, slope));
    c.side_j[s].pre = c.out * p<T>(ids.wj);
    add_bias(c.side_j[s].pre, p<T>(ids.bj));
    c.side_j[s].aug = augment(leaky(c.side_j[s].pre, slope));
  }
}

template <typename T>
void JointParser::backward(Cache<T>& c) {
  const auto& e = config_.encoder;
  const int D = e.model_dim;
  const int dh = D / e.heads;
  const T scale = T(1) / std::sqrt(static_cast<T>(dh));
  auto acc = [this](int id, const Mat<T>& value) { g(id) += value.template cast<double>(); };
  auto acc_bias = [this](int id, const Mat<T>& d) { g(id).row(0) += d.colwise().sum().template cast<double>(); };

  Mat<T> dh_cur = layer_norm_backward(c.d_out, c.final_ln, p<T>(final_g_), g(final_g_), g(final_b_));
  for (std::size_t li = layers_.size(); li-- > 0;) {
    const auto& ids = layers_[li];
    const auto& lc = c.layers[li];
    // feed-forward sublayer
    acc(ids.w2, lc.r.transpose() * dh_cur);
    acc_bias(ids.b2, dh_cur);
    const Mat<T> du1 =
        (dh_cur * p<T>(ids.w2).transpose()).cwiseProduct(lc.u1.unaryExpr([](T v) { return v > T(0) ? T(1) : T(0); }));
    acc(ids.w1, lc.b.transpose() * du1);
    acc_bias(ids.b1, du1);
    const Mat<T> db = du1 * p<T>(ids.w1).transpose();
    const Mat<T> dmid = dh_cur + layer_norm_backward(db, lc.ln2, p<T>(ids.ln2_g), g(ids.ln2_g), g(ids.ln2_b));
    // attention sublayer
    acc(ids.wo, lc.o.transpose() * dmid);
    acc_bias(ids.bo, dmid);
    const Mat<T> d_o = dmid * p<T>(ids.wo).transpose();
    Mat<T> dq(lc.q.rows(), D), dk(lc.k.rows(), D), dv(lc.v.rows(), D);
    for (int hh = 0; hh < e.heads; ++hh) {
      const Mat<T>& pr = lc.probs[static_cast<std::size_t>(hh)];
      const Mat<T> doh = d_o.middleCols(hh * dh, dh);
      const Mat<T> dp = doh * lc.v.middleCols(hh * dh, dh).transpose();
      dv.middleCols(hh * dh, dh) = pr.transpose() * doh;
      const Vec<T> row_dot = (dp.array() * pr.array()).rowwise().sum();
      const Mat<T> ds = (pr.array() * (dp.colwise() - row_dot).array()).matrix() * scale;
      dq.middleCols(hh * dh, dh) = ds * lc.k.middleCols(hh * dh, dh);
      dk.middleCols(hh * dh, dh) = ds.transpose() * lc.q.middleCols(hh * dh, dh);
    }
    acc(ids.wq, lc.a.transpose() * dq);
    acc_bias(ids.bq, dq);
    acc(ids.wk, lc.a.transpose() * dk);
    acc_bias(ids.bk, dk);
    acc(ids.wv, lc.a.transpose() * dv);
    acc_bias(ids.bv, dv);
    const Mat<T> da = dq * p<T>(ids.wq).transpose() + dk * p<T>(ids.wk).transpose() + dv * p<T>(ids.wv).transpose();
    dh_cur = dmid + layer_norm_backward(da, lc.ln1, p<T>(ids.ln1_g), g(ids.ln1_g), g(ids.ln1_b));
  }

  acc(proj_w_, c.x0.transpose() * dh_cur);
  acc_bias(proj_b_, dh_cur);
  const Matrix dx0 = (dh_cur * p<T>(proj_w_).transpose()).template cast<double>();
  const int wd = e.word_emb_dim, pd = e.predicate_indicator_dim, qd = e.positional_dim;
  const int off_pred = wd + e.pretrained_emb_dim;
  const int off_pos = off_pred + pd;
  for (Eigen::Index t = 0; t < dx0.rows(); ++t) {
    const auto ut = static_cast<std::size_t>(t);
    g(word_emb_).row(c.word_ids[ut]) += dx0.block(t, 0, 1, wd);
    g(pred_emb_).row(c.flag_ids[ut]) += dx0.block(t, off_pred, 1, pd);
    g(pos_emb_).row(c.pos_ids[ut]) += dx0.block(t, off_pos, 1, qd);
  }
}

Matrix JointParser::encode(const SentenceInput& input) const {
  Cache<double> c;
  forward(input, c);
  return c.out;
}

namespace {

// Label logits of every token against `heads`, with the gathered head-side
// rows and the product t * U kept for backpropagation.
template <typename T>
struct LabelPass {
  Mat<T> t;  // n x (d+1)
  Mat<T> m;  // n x r(d+1)
  Mat<T> logits;
};

template <typename T, typename U>
LabelPass<T> label_pass(const Mat<T>& aug_i, const Mat<T>& aug_j, const U& u, const std::vector<int>& heads) {
  const auto n = static_cast<Eigen::Index>(heads.size());
  const Eigen::Index d1 = aug_i.cols();
  const Eigen::Index r = u.cols() / d1;
  LabelPass<T> lp;
  lp.t.resize(n, d1);
  for (Eigen::Index j = 0; j < n; ++j) lp.t.row(j) = aug_i.row(heads[static_cast<std::size_t>(j)]);
  lp.m = lp.t * u;
  lp.logits.resize(n, r);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index k = 0; k < r; ++k) lp.logits(j, k) = lp.m.row(j).segment(k * d1, d1).dot(aug_j.row(j + 1));
  return lp;
}

Matrix arc_log_probs(const Matrix& z) {
  Matrix lp = Matrix::Constant(z.rows(), z.cols(), neg_inf<double>());
  for (Eigen::Index j = 1; j < z.cols(); ++j) {
    Eigen::VectorXd col = z.col(j);
    col(j) = neg_inf<double>();
    const double lse = log_sum_exp(col);
    for (Eigen::Index i = 0; i < z.rows(); ++i)
      if (i != j) lp(i, j) = col(i) - lse;
  }
  return lp;
}

}  // namespace

ScoreTables JointParser::score(const SentenceInput& input, const std::vector<int>* heads, bool single_root) const {
  Cache<double> c;
  forward(input, c);
  const int n = c.n;
  ScoreTables st;
  const auto& arc = scorers_[0];
  st.arc = c.side_i[0].aug * p<double>(arc.u) * c.side_j[0].aug.transpose();
  st.arc_log_probs = arc_log_probs(st.arc);
  if (heads) {
    if (static_cast<int>(heads->size()) != n) throw std::invalid_argument("heads do not match sentence length");
    st.heads = *heads;
  } else {
    ArcScoreMatrix m(n);
    for (int h = 0; h <= n; ++h)
      for (int d = 1; d <= n; ++d) m.at(h, d) = h == d ? neg_inf<double>() : st.arc_log_probs(h, d);
    st.heads = eisner(m, single_root);
  }
  for (std::size_t s = 1; s < scorers_.size(); ++s)
    st.labels[s - 1] = label_pass(c.side_i[s].aug, c.side_j[s].aug, p<double>(scorers_[s].u), st.heads).logits;
  return st;
}

LossBreakdown JointParser::loss(const SentenceInput& input, const Targets& targets, double grad_scale) {
  return loss_impl<double>(input, targets, grad_scale, nullptr);
}

long double JointParser::loss_extended(const SentenceInput& input, const Targets& targets, double grad_scale) {
  long double total = 0;
  loss_impl<long double>(input, targets, grad_scale, &total);
  return total;
}

template <typename T>
LossBreakdown JointParser::loss_impl(const SentenceInput& input, const Targets& targets, double grad_scale,
                                     T* total) {
  Cache<T> c;
  forward(input, c);
  const int n = c.n;
  const int N = n + 1;
  if (static_cast<int>(targets.heads.size()) != n) throw std::invalid_argument("target heads do not match sentence");
  validate_tree(targets.heads);
  const bool grads = grad_scale != 0.0;
  const auto& w = config_.train.loss_weights;
  std::array<T, kNumComponents> comp{};
  std::array<Mat<T>, kNumComponents> d_aug_i, d_aug_j;
  if (grads)
    for (std::size_t s = 0; s < scorers_.size(); ++s) {
      d_aug_i[s] = Mat<T>::Zero(N, c.side_i[s].aug.cols());
      d_aug_j[s] = Mat<T>::Zero(N, c.side_j[s].aug.cols());
    }

  {  // attachment: one distribution over heads per dependent
    const auto& ids = scorers_[0];
    const Mat<T>& ai = c.side_i[0].aug;
    const Mat<T>& aj = c.side_j[0].aug;
    const Mat<T> z = ai * p<T>(ids.u) * aj.transpose();
    Mat<T> dz = Mat<T>::Zero(N, N);
    for (int j = 1; j <= n; ++j) {
      Vec<T> col = z.col(j);
      col(j) = neg_inf<T>();
      const T lse = log_sum_exp(col);
      const int gold = targets.heads[static_cast<std::size_t>(j - 1)];
      comp[0] += lse - col(gold);
      if (grads) {
        for (int i = 0; i < N; ++i)
          if (i != j) dz(i, j) = std::exp(col(i) - lse);
        dz(gold, j) -= T(1);
      }
    }
    if (grads) {
      dz *= static_cast<T>(w[0] * grad_scale);
      g(ids.u) += (ai.transpose() * dz * aj).template cast<double>();
      d_aug_i[0] += dz * aj * p<T>(ids.u).transpose();
      d_aug_j[0] += dz.transpose() * ai * p<T>(ids.u);
    }
  }

  const std::vector<int>* gold_ids[4] = {&targets.labels.syn, &targets.labels.d, &targets.labels.c,
                                         &targets.labels.r};
  for (std::size_t s = 1; s < scorers_.size(); ++s) {
    const auto& ids = scorers_[s];
    const auto& gold = *gold_ids[s - 1];
    if (static_cast<int>(gold.size()) != n) throw std::invalid_argument("target labels do not match sentence");
    const Mat<T> u = p<T>(ids.u);
    const LabelPass<T> lp = label_pass(c.side_i[s].aug, c.side_j[s].aug, u, targets.heads);
    const Eigen::Index d1 = lp.t.cols();
    const Eigen::Index r = lp.logits.cols();
    Mat<T> dl = Mat<T>::Zero(n, r);
    for (int j = 0; j < n; ++j) {
      const int t = gold[static_cast<std::size_t>(j)];
      if (t < 0) continue;
      if (t >= r) throw std::invalid_argument("target label index out of range");
      const RowVec<T> row = lp.logits.row(j);
      const T lse = log_sum_exp(row);
      comp[s] += lse - row(t);
      if (grads) {
        dl.row(j) = (row.array() - lse).exp().matrix();
        dl(j, t) -= T(1);
      }
    }
    if (!grads) continue;
    dl *= static_cast<T>(w[s] * grad_scale);
    Mat<T> dm(n, lp.m.cols());
    for (int j = 0; j < n; ++j)
      for (Eigen::Index k = 0; k < r; ++k) {
        dm.row(j).segment(k * d1, d1) = dl(j, k) * c.side_j[s].aug.row(j + 1);
        d_aug_j[s].row(j + 1) += dl(j, k) * lp.m.row(j).segment(k * d1, d1);
      }
    g(ids.u) += (lp.t.transpose() * dm).template cast<double>();
    const Mat<T> dt = dm * u.transpose();
    for (int j = 0; j < n; ++j) d_aug_i[s].row(targets.heads[static_cast<std::size_t>(j)]) += dt.row(j);
  }

  LossBreakdown out;
  out.tokens = n;
  T weighted = 0;
  for (std::size_t s = 0; s < comp.size(); ++s) {
    out.components[s] = static_cast<double>(comp[s]);
    weighted += static_cast<T>(w[s]) * comp[s];
  }
  out.total = static_cast<double>(weighted);
  if (total) *total = weighted;
  if (!grads) return out;

  const double slope = config_.scorer.leaky_slope;
  c.d_out = Mat<T>::Zero(N, config_.encoder.model_dim);
  for (std::size_t s = 0; s < scorers_.size(); ++s) {
    const auto& ids = scorers_[s];
    for (int side = 0; side < 2; ++side) {
      const SideCache<T>& sc = side == 0 ? c.side_i[s] : c.side_j[s];
      const Mat<T>& da = side == 0 ? d_aug_i[s] : d_aug_j[s];
      const Mat<T> dpre = da.leftCols(da.cols() - 1).cwiseProduct(leaky_grad(sc.pre, slope));
      g(side == 0 ? ids.wi : ids.wj) += (c.out.transpose() * dpre).template cast<double>();
      g(side == 0 ? ids.bi : ids.bj).row(0) += dpre.colwise().sum().template cast<double>();
      c.d_out += dpre * p<T>(side == 0 ? ids.wi : ids.wj).transpose();
    }
  }
  backward(c);
  return out;
}

Prediction JointParser::predict(const SentenceInput& input, const std::vector<int>& predicates,
                                const PredictOptions& options, const JointTree* gold) const {
  options.validate();
  const int n = input.size();
  if (options.gold_syntax) {
    if (!gold) throw std::invalid_argument("gold-component ablations need a reference tree");
    if (gold->size() != n || static_cast<int>(gold->labels.size()) != n)
      throw std::invalid_argument("reference tree does not match sentence length");
  }
  const ScoreTables st = score(input, options.gold_syntax ? &gold->heads : nullptr, options.single_root);

  Prediction pred;
  pred.tree.heads = st.heads;
  pred.tree.labels.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    auto& label = pred.tree.labels[static_cast<std::size_t>(j)];
    const JointLabel* ref = gold ? &gold->labels[static_cast<std::size_t>(j)] : nullptr;
    label.syn = options.gold_syntax ? ref->syn : vocab_.syn.at(argmax(st.labels[0].row(j)));
    if (options.gold_d) {
      label.d = ref->d;
    } else if (const int k = argmax(st.labels[1].row(j)); k != kAbsentLabel) {
      label.d = vocab_.d.at(k);
    }
    if (options.gold_rc) {
      label.c = ref->c;
      label.r = ref->r;
    } else {
      if (const int k = argmax(st.labels[2].row(j)); k != kAbsentLabel) label.c = parse_cshare(vocab_.c.at(k));
      if (const int k = argmax(st.labels[3].row(j)); k != kAbsentLabel) label.r = vocab_.r.at(k);
    }
  }
  auto decoded = decode_joint_detailed(pred.tree, predicates, {options.language});
  pred.frames = std::move(decoded.frames);
  pred.ignored_c_labels = decoded.ignored_c_labels;
  return pred;
}

}  // namespace depsrl::model
