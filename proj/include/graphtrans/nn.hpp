#pragma once

#include <random>
#include <span>
#include <vector>

#include "graphtrans/transform.hpp"
#include "graphtrans/types.hpp"

namespace graphtrans {

enum class Activation { Identity, ReLU };

/// Graph-Signal Layer parameters: one C_in x C_out filter matrix per slice
/// of S, plus a bias per output channel.
struct GslLayer {
  std::vector<Matrix> weights;
  Vector bias;

  std::size_t in_channels() const { return weights.empty() ? 0 : weights.front().rows(); }
  std::size_t out_channels() const { return static_cast<std::size_t>(bias.size()); }
};

/// GSL_1 ... GSL_n -> [global average pool] -> FC -> softmax.
///
/// Hidden GSLs use ReLU, the last GSL is linear. In vertex mode the pool is
/// skipped and the FC head is applied to every vertex.
struct Model {
  std::vector<GslLayer> layers;
  Matrix fc_weight;  // C_last x num_classes
  Vector fc_bias;
  TaskMode mode = TaskMode::Signal;

  std::size_t num_slices() const {
    return layers.empty() ? 0 : layers.front().weights.size();
  }
  std::size_t input_channels() const {
    return layers.empty() ? 0 : layers.front().in_channels();
  }
  std::size_t num_classes() const { return static_cast<std::size_t>(fc_bias.size()); }
  Activation activation(std::size_t layer) const {
    return layer + 1 < layers.size() ? Activation::ReLU : Activation::Identity;
  }

  /// Throws InvalidArgument if shapes are inconsistent.
  void validate() const;

  /// All-zero model; `widths` are the output channel counts of the GSLs.
  static Model zeros(std::size_t num_slices, std::size_t in_channels,
                     std::span<const std::size_t> widths, std::size_t num_classes, TaskMode mode);
};

/// Fan-in scaled uniform weights, zero biases.
void initialize(Model& model, std::mt19937_64& rng);

/// sigma( sum_k S_k^T x W_k + b ).
Matrix gsl_forward(const Matrix& x, const SoftTransforms& s, const GslLayer& layer,
                   Activation activation);

/// Per-channel mean over vertices.
Vector global_average_pool(const Matrix& x);

/// Class probabilities. Signal mode returns a 1 x num_classes row, vertex
/// mode an N x num_classes matrix.
Matrix model_forward(const Matrix& x, const Model& model, const EdgeLogits& params, double t);
Matrix model_forward(const Matrix& x, const Model& model, const SoftTransforms& s);

/// Signal mode only: probabilities for a batch, one row per input.
Matrix forward_batch(std::span<const Matrix* const> xs, const Model& model,
                     const SoftTransforms& s);

/// Probabilities are clamped at this value before taking the log.
inline constexpr double kProbabilityFloor = 1e-12;

double cross_entropy(std::span<const double> probs, std::size_t y);

/// Mean cross-entropy over vertices with a non-negative label.
double cross_entropy(const Matrix& probs, std::span<const int> vertex_labels);

/// Gradients share the Model layout; `logits` matches EdgeLogits::values().
struct Gradients {
  Model model;
  std::vector<double> logits;
  double loss = 0.0;
  /// dLoss / d(pre-softmax outputs), same shape as the probabilities.
  Matrix output_grad;
  /// Probabilities from the forward pass.
  Matrix probs;
};

/// Signal-mode loss and gradients averaged over a batch.
Gradients backward_batch(std::span<const Matrix* const> xs, std::span<const int> labels,
                         const Model& model, const EdgeLogits& params, double t);

/// Single signal-mode sample.
Gradients backward(const Matrix& x, int label, const Model& model, const EdgeLogits& params,
                   double t);

/// Vertex mode: labels per vertex, negative entries are excluded from the loss.
Gradients backward(const Matrix& x, std::span<const int> vertex_labels, const Model& model,
                   const EdgeLogits& params, double t);

/// Flat views over every trainable scalar, in a fixed order: for each GSL
/// its K weight matrices then its bias, then FC weight, FC bias, S logits.
std::vector<std::span<double>> parameter_blocks(Model& model, EdgeLogits& params);
std::vector<std::span<double>> parameter_blocks(Gradients& grads);

}  // namespace graphtrans
