#include "graphtrans/optimizer.hpp"

#include <cmath>

#include "graphtrans/error.hpp"

namespace graphtrans {

OptimizerKind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerKind::Adam;
  if (name == "sgd") return OptimizerKind::Sgd;
  throw InvalidArgument("unknown optimizer '" + name + "' (expected adam or sgd)");
}

std::string to_string(OptimizerKind kind) { return kind == OptimizerKind::Adam ? "adam" : "sgd"; }

Optimizer::Optimizer(OptimizerConfig config, std::span<const std::span<double>> params)
    : config_(config) {
  if (!(config_.learning_rate >= 0.0)) {
    throw InvalidArgument("Optimizer: learning rate must be non-negative");
  }
  if (config_.kind == OptimizerKind::Adam) {
    for (const auto& block : params) {
      m_.emplace_back(block.size(), 0.0);
      v_.emplace_back(block.size(), 0.0);
    }
  }
}

void Optimizer::step(std::span<const std::span<double>> params,
                     std::span<const std::span<double>> grads) {
  if (params.size() != grads.size()) throw InvalidArgument("Optimizer: block count mismatch");
  ++steps_;
  const double lr = config_.learning_rate;
  if (config_.kind == OptimizerKind::Sgd) {
    for (std::size_t b = 0; b < params.size(); ++b) {
      for (std::size_t i = 0; i < params[b].size(); ++i) params[b][i] -= lr * grads[b][i];
    }
    return;
  }
  if (m_.size() != params.size()) throw InvalidArgument("Optimizer: block count changed");
  const double t = static_cast<double>(steps_);
  const double c1 = 1.0 - std::pow(config_.beta1, t);
  const double c2 = 1.0 - std::pow(config_.beta2, t);
  for (std::size_t b = 0; b < params.size(); ++b) {
    auto& m = m_[b];
    auto& v = v_[b];
    for (std::size_t i = 0; i < params[b].size(); ++i) {
      const double g = grads[b][i];
      m[i] = config_.beta1 * m[i] + (1.0 - config_.beta1) * g;
      v[i] = config_.beta2 * v[i] + (1.0 - config_.beta2) * g * g;
      const double m_hat = m[i] / c1;
      const double v_hat = v[i] / c2;
      params[b][i] -= lr * m_hat / (std::sqrt(v_hat) + config_.epsilon);
    }
  }
}

void Optimizer::restore(std::size_t steps, std::vector<std::vector<double>> m,
                        std::vector<std::vector<double>> v) {
  if (m.size() != m_.size() || v.size() != v_.size()) {
    throw InvalidArgument("Optimizer::restore: state shape mismatch");
  }
  for (std::size_t b = 0; b < m.size(); ++b) {
    if (m[b].size() != m_[b].size() || v[b].size() != v_[b].size()) {
      throw InvalidArgument("Optimizer::restore: state shape mismatch");
    }
  }
  steps_ = steps;
  m_ = std::move(m);
  v_ = std::move(v);
}

}  // namespace graphtrans
