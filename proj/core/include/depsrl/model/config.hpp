#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace depsrl::model {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kConfigVersion = 1;

struct EncoderConfig {
  int word_emb_dim = 100;
  int pretrained_emb_dim = 0;  // 0 = no precomputed input channel
  int predicate_indicator_dim = 16;
  int positional_dim = 128;
  int max_positions = 512;  // positions past the table share its last row
  int layers = 2;
  int heads = 4;
  int ffn_dim = 256;
  int model_dim = 64;
  int unk_threshold = 1;  // words seen fewer times map to <unk>
  std::uint64_t seed = 1;
  double layer_norm_eps = 1e-5;
};

// Sizes of the deep biaffine scorers. Each side's MLP is one affine layer
// followed by a leaky rectifier.
struct ScorerConfig {
  int arc_dim = 128;
  int label_dim = 64;
  double leaky_slope = 0.1;
};

enum class Component { attachment = 0, syn, d, c, r };
inline constexpr int kNumComponents = 5;
const char* to_string(Component c);

struct TrainConfig {
  int batch_size = 8;
  double learning_rate = 2e-3;
  double lr_decay = 0.1;
  int lr_patience = 5;   // epochs without dev improvement before decaying
  int max_decays = 3;    // stop at the next plateau after this many decays
  double grad_clip = 5.0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_eps = 1e-8;
  int max_epochs = 200;
  std::uint64_t seed = 1;
  std::array<double, kNumComponents> loss_weights = {1.0, 1.0, 1.0, 1.0, 1.0};
};

struct ModelConfig {
  EncoderConfig encoder;
  ScorerConfig scorer;
  TrainConfig train;

  /// Throws ConfigError naming the first violated constraint.
  void validate() const;
};

/// CPU-sized defaults used by the tool and tests.
ModelConfig desk_config();
/// Full-size settings (8 layers, 8 heads, 2048 FFN, 400/100 scorers,
/// batches of 64, learning rate 1e-4).
ModelConfig full_scale_config();
/// Very small network for finite-difference checks.
ModelConfig tiny_config();

std::string config_to_json(const ModelConfig& config);
/// Missing keys keep their desk defaults; unknown keys are an error.
ModelConfig config_from_json(const std::string& text);
ModelConfig load_config(const std::string& path);

}  // namespace depsrl::model
