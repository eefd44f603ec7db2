#pragma once

#include <Eigen/Dense>
#include <random>
#include <string>
#include <vector>

#include "depsrl/model/config.hpp"

namespace depsrl::model {

using Matrix = Eigen::MatrixXd;

struct Parameter {
  std::string name;  // "<group>.<tensor>", e.g. "layer0.attn.wq"
  Matrix value;
  Matrix grad;
};

class ParameterStore {
 public:
  /// Registers a zero-initialized tensor and returns its index.
  int add(const std::string& name, int rows, int cols);

  Parameter& operator[](int i) { return params_[static_cast<std::size_t>(i)]; }
  const Parameter& operator[](int i) const { return params_[static_cast<std::size_t>(i)]; }
  int size() const { return static_cast<int>(params_.size()); }
  int find(const std::string& name) const;  // -1 if absent
  std::size_t scalar_count() const;

  void zero_grad();
  double grad_norm() const;
  /// Rescales gradients so their global norm is at most max_norm;
  /// returns the norm before clipping.
  double clip_grad_norm(double max_norm);

  auto begin() { return params_.begin(); }
  auto end() { return params_.end(); }
  auto begin() const { return params_.begin(); }
  auto end() const { return params_.end(); }

 private:
  std::vector<Parameter> params_;
};

void init_uniform(Matrix& m, double limit, std::mt19937_64& rng);
/// Glorot/Xavier uniform over the given fan sizes.
void init_xavier(Matrix& m, int fan_in, int fan_out, std::mt19937_64& rng);

class Adam {
 public:
  explicit Adam(const TrainConfig& config) : beta1_(config.beta1), beta2_(config.beta2), eps_(config.adam_eps) {}

  void step(ParameterStore& params, double learning_rate);
  long steps() const { return t_; }

 private:
  double beta1_, beta2_, eps_;
  long t_ = 0;
  std::vector<Matrix> m_, v_;
};

}  // namespace depsrl::model
