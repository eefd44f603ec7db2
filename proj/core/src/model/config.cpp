#include "depsrl/model/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace depsrl::model {

using nlohmann::json;

const char* to_string(Component c) {
  switch (c) {
    case Component::attachment: return "attachment";
    case Component::syn: return "syn";
    case Component::d: return "d";
    case Component::c: return "c";
    case Component::r: return "r";
  }
  return "?";
}

void ModelConfig::validate() const {
  auto positive = [](int v, const char* name) {
    if (v <= 0) throw ConfigError(std::string(name) + " must be positive, got " + std::to_string(v));
  };
  const auto& e = encoder;
  positive(e.word_emb_dim, "encoder.word_emb_dim");
  positive(e.predicate_indicator_dim, "encoder.predicate_indicator_dim");
  positive(e.positional_dim, "encoder.positional_dim");
  positive(e.max_positions, "encoder.max_positions");
  positive(e.layers, "encoder.layers");
  positive(e.heads, "encoder.heads");
  positive(e.ffn_dim, "encoder.ffn_dim");
  positive(e.model_dim, "encoder.model_dim");
  positive(e.unk_threshold, "encoder.unk_threshold");
  if (e.pretrained_emb_dim < 0) throw ConfigError("encoder.pretrained_emb_dim must be >= 0");
  if (e.model_dim % e.heads != 0)
    throw ConfigError("encoder.heads (" + std::to_string(e.heads) + ") must divide encoder.model_dim (" +
                      std::to_string(e.model_dim) + ")");
  if (!(e.layer_norm_eps > 0)) throw ConfigError("encoder.layer_norm_eps must be positive");
  positive(scorer.arc_dim, "scorer.arc_dim");
  positive(scorer.label_dim, "scorer.label_dim");
  if (!(scorer.leaky_slope >= 0 && scorer.leaky_slope < 1)) throw ConfigError("scorer.leaky_slope must be in [0, 1)");
  const auto& t = train;
  positive(t.batch_size, "train.batch_size");
  positive(t.max_epochs, "train.max_epochs");
  positive(t.lr_patience, "train.lr_patience");
  if (t.max_decays < 0) throw ConfigError("train.max_decays must be >= 0");
  if (!(t.learning_rate > 0)) throw ConfigError("train.learning_rate must be positive");
  if (!(t.grad_clip > 0)) throw ConfigError("train.grad_clip must be positive");
  if (!(t.lr_decay > 0 && t.lr_decay < 1)) throw ConfigError("train.lr_decay must be in (0, 1)");
  if (!(t.beta1 >= 0 && t.beta1 < 1) || !(t.beta2 >= 0 && t.beta2 < 1))
    throw ConfigError("train.beta1/beta2 must be in [0, 1)");
  if (!(t.adam_eps > 0)) throw ConfigError("train.adam_eps must be positive");
  for (double w : t.loss_weights)
    if (!(w >= 0)) throw ConfigError("train.loss_weights must be non-negative");
}

ModelConfig desk_config() { return {}; }

ModelConfig full_scale_config() {
  ModelConfig c;
  c.encoder.word_emb_dim = 100;
  c.encoder.predicate_indicator_dim = 16;
  c.encoder.positional_dim = 128;
  c.encoder.layers = 8;
  c.encoder.heads = 8;
  c.encoder.ffn_dim = 2048;
  c.encoder.model_dim = 512;
  c.scorer.arc_dim = 400;
  c.scorer.label_dim = 100;
  c.train.batch_size = 64;
  c.train.learning_rate = 1e-4;
  c.train.max_epochs = 1000;
  return c;
}

ModelConfig tiny_config() {
  ModelConfig c;
  c.encoder.word_emb_dim = 5;
  c.encoder.predicate_indicator_dim = 3;
  c.encoder.positional_dim = 4;
  c.encoder.max_positions = 16;
  c.encoder.layers = 2;
  c.encoder.heads = 2;
  c.encoder.ffn_dim = 8;
  c.encoder.model_dim = 6;
  c.scorer.arc_dim = 5;
  c.scorer.label_dim = 4;
  c.train.batch_size = 2;
  return c;
}

namespace {

class Section {
 public:
  Section(const json& root, const char* name) : name_(name) {
    if (root.contains(name)) {
      obj_ = root.at(name);
      if (!obj_.is_object()) throw ConfigError(std::string("config section '") + name + "' must be an object");
    } else {
      obj_ = json::object();
    }
  }

  template <typename T>
  void read(const char* key, T& field) {
    known_.insert(key);
    if (!obj_.contains(key)) return;
    try {
      field = obj_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(name_ + "." + key + ": " + e.what());
    }
  }

  void finish() const {
    for (const auto& item : obj_.items())
      if (!known_.count(item.key())) throw ConfigError("unknown config key '" + name_ + "." + item.key() + "'");
  }

 private:
  std::string name_;
  json obj_;
  std::set<std::string> known_;
};

}  // namespace

std::string config_to_json(const ModelConfig& c) {
  json j;
  j["config_version"] = kConfigVersion;
  const auto& e = c.encoder;
  j["encoder"] = {{"word_emb_dim", e.word_emb_dim},
                  {"pretrained_emb_dim", e.pretrained_emb_dim},
                  {"predicate_indicator_dim", e.predicate_indicator_dim},
                  {"positional_dim", e.positional_dim},
                  {"max_positions", e.max_positions},
                  {"layers", e.layers},
                  {"heads", e.heads},
                  {"ffn_dim", e.ffn_dim},
                  {"model_dim", e.model_dim},
                  {"unk_threshold", e.unk_threshold},
                  {"seed", e.seed},
                  {"layer_norm_eps", e.layer_norm_eps}};
  j["scorer"] = {{"arc_dim", c.scorer.arc_dim},
                 {"label_dim", c.scorer.label_dim},
                 {"mlp", "affine+leaky_relu"},
                 {"leaky_slope", c.scorer.leaky_slope}};
  const auto& t = c.train;
  j["train"] = {{"batch_size", t.batch_size},   {"learning_rate", t.learning_rate},
                {"lr_decay", t.lr_decay},       {"lr_patience", t.lr_patience},
                {"max_decays", t.max_decays},   {"grad_clip", t.grad_clip},
                {"beta1", t.beta1},             {"beta2", t.beta2},
                {"adam_eps", t.adam_eps},       {"max_epochs", t.max_epochs},
                {"seed", t.seed},               {"loss_weights", t.loss_weights}};
  return j.dump(2);
}

ModelConfig config_from_json(const std::string& text) {
  json root;
  try {
    root = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!root.is_object()) throw ConfigError("config must be a JSON object");
  for (const auto& item : root.items())
    if (item.key() != "config_version" && item.key() != "encoder" && item.key() != "scorer" && item.key() != "train")
      throw ConfigError("unknown config key '" + item.key() + "'");
  if (root.contains("config_version") && root.at("config_version") != kConfigVersion)
    throw ConfigError("config_version " + root.at("config_version").dump() + " is not supported (expected " +
                      std::to_string(kConfigVersion) + ")");

  ModelConfig c = desk_config();
  Section enc(root, "encoder");
  auto& e = c.encoder;
  enc.read("word_emb_dim", e.word_emb_dim);
  enc.read("pretrained_emb_dim", e.pretrained_emb_dim);
  enc.read("predicate_indicator_dim", e.predicate_indicator_dim);
  enc.read("positional_dim", e.positional_dim);
  enc.read("max_positions", e.max_positions);
  enc.read("layers", e.layers);
  enc.read("heads", e.heads);
  enc.read("ffn_dim", e.ffn_dim);
  enc.read("model_dim", e.model_dim);
  enc.read("unk_threshold", e.unk_threshold);
  enc.read("seed", e.seed);
  enc.read("layer_norm_eps", e.layer_norm_eps);
  enc.finish();

  Section sc(root, "scorer");
  std::string mlp = "affine+leaky_relu";
  sc.read("arc_dim", c.scorer.arc_dim);
  sc.read("label_dim", c.scorer.label_dim);
  sc.read("mlp", mlp);
  sc.read("leaky_slope", c.scorer.leaky_slope);
  sc.finish();
  if (mlp != "affine+leaky_relu") throw ConfigError("scorer.mlp '" + mlp + "' is not supported");

  Section tr(root, "train");
  auto& t = c.train;
  tr.read("batch_size", t.batch_size);
  tr.read("learning_rate", t.learning_rate);
  tr.read("lr_decay", t.lr_decay);
  tr.read("lr_patience", t.lr_patience);
  tr.read("max_decays", t.max_decays);
  tr.read("grad_clip", t.grad_clip);
  tr.read("beta1", t.beta1);
  tr.read("beta2", t.beta2);
  tr.read("adam_eps", t.adam_eps);
  tr.read("max_epochs", t.max_epochs);
  tr.read("seed", t.seed);
  tr.read("loss_weights", t.loss_weights);
  tr.finish();

  c.validate();
  return c;
}

ModelConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return config_from_json(ss.str());
}

}  // namespace depsrl::model
