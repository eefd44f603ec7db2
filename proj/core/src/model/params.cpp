#include "depsrl/model/params.hpp"

#include <cmath>
#include <stdexcept>

namespace depsrl::model {

int ParameterStore::add(const std::string& name, int rows, int cols) {
  if (find(name) >= 0) throw std::logic_error("duplicate parameter " + name);
  params_.push_back({name, Matrix::Zero(rows, cols), Matrix::Zero(rows, cols)});
  return size() - 1;
}

int ParameterStore::find(const std::string& name) const {
  for (int i = 0; i < size(); ++i)
    if (params_[static_cast<std::size_t>(i)].name == name) return i;
  return -1;
}

std::size_t ParameterStore::scalar_count() const {
  std::size_t n = 0;
  for (const auto& p : params_) n += static_cast<std::size_t>(p.value.size());
  return n;
}

void ParameterStore::zero_grad() {
  for (auto& p : params_) p.grad.setZero();
}

double ParameterStore::grad_norm() const {
  double sq = 0.0;
  for (const auto& p : params_) sq += p.grad.squaredNorm();
  return std::sqrt(sq);
}

double ParameterStore::clip_grad_norm(double max_norm) {
  const double norm = grad_norm();
  if (norm > max_norm) {
    const double scale = max_norm / norm;
    for (auto& p : params_) p.grad *= scale;
  }
  return norm;
}

void init_uniform(Matrix& m, double limit, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-limit, limit);
  for (Eigen::Index j = 0; j < m.cols(); ++j)
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
}

void init_xavier(Matrix& m, int fan_in, int fan_out, std::mt19937_64& rng) {
  init_uniform(m, std::sqrt(6.0 / static_cast<double>(fan_in + fan_out)), rng);
}

void Adam::step(ParameterStore& params, double learning_rate) {
  if (m_.empty()) {
    for (const auto& p : params) {
      m_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
      v_.push_back(Matrix::Zero(p.value.rows(), p.value.cols()));
    }
  }
  if (static_cast<int>(m_.size()) != params.size()) throw std::logic_error("optimizer bound to another store");
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(t_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(t_));
  for (int i = 0; i < params.size(); ++i) {
    auto& p = params[i];
    auto& m = m_[static_cast<std::size_t>(i)];
    auto& v = v_[static_cast<std::size_t>(i)];
    m = beta1_ * m + (1.0 - beta1_) * p.grad;
    v = beta2_ * v + (1.0 - beta2_) * p.grad.cwiseAbs2();
    p.value.array() -= learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + eps_);
  }
}

}  // namespace depsrl::model
