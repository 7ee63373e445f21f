#pragma once

#include <span>
#include <string>
#include <vector>

namespace graphtrans {

enum class OptimizerKind { Adam, Sgd };

struct OptimizerConfig {
  OptimizerKind kind = OptimizerKind::Adam;
  double learning_rate = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

OptimizerKind parse_optimizer_kind(const std::string& name);
std::string to_string(OptimizerKind kind);

/// Adam or plain SGD over a fixed list of parameter blocks.
class Optimizer {
 public:
  Optimizer(OptimizerConfig config, std::span<const std::span<double>> params);

  void step(std::span<const std::span<double>> params, std::span<const std::span<double>> grads);

  const OptimizerConfig& config() const { return config_; }
  std::size_t steps_taken() const { return steps_; }

  // First/second moment estimates, one vector per parameter block (Adam only).
  const std::vector<std::vector<double>>& first_moments() const { return m_; }
  const std::vector<std::vector<double>>& second_moments() const { return v_; }
  void restore(std::size_t steps, std::vector<std::vector<double>> m,
               std::vector<std::vector<double>> v);

 private:
  OptimizerConfig config_;
  std::size_t steps_ = 0;
  std::vector<std::vector<double>> m_;
  std::vector<std::vector<double>> v_;
};

}  // namespace graphtrans
