#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "depsrl/model/parser.hpp"

namespace depsrl::model {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Evaluate the loss and its gradient in long double.
  bool extended_precision = true;
  // Entries per tensor to probe; 0 checks every entry.
  int samples_per_tensor = 0;
  // Relative error is |a - n| / max(|a|, |n|, denominator_floor).
  double denominator_floor = 1e-6;
  std::uint64_t seed = 7;
};

struct TensorCheck {
  std::string name;
  int checked = 0;
  double max_rel_error = 0.0;
  double max_abs_error = 0.0;
};

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_tensor;
  std::vector<TensorCheck> tensors;
};

/// Compares the analytic gradient of the total loss against central
/// differences. Parameter values are restored afterwards.
GradCheckResult grad_check(JointParser& model, const SentenceInput& input, const Targets& targets,
                           const GradCheckOptions& options = {});

/// Builds a randomly initialized model for `config` on a small built-in
/// sentence, jitters every parameter (so biases and norms are non-trivial)
/// and runs grad_check.
GradCheckResult grad_check_builtin(const ModelConfig& config, const GradCheckOptions& options = {});

}  // namespace depsrl::model
