#pragma once

#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "graphtrans/graph.hpp"
#include "graphtrans/types.hpp"

namespace graphtrans {

/// Learnable parameters of the edge-constrained tensor S.
///
/// For every slice k and vertex i there is one logit per entry of
/// neighbors(i), stored flat as [k][row_offset(i) + position]. Entries of S
/// outside the graph support do not exist, which is how the edge constraint
/// is enforced.
class EdgeLogits {
 public:
  EdgeLogits(std::shared_ptr<const Graph> graph, std::size_t num_slices, double fill = 0.0);

  /// i.i.d. uniform logits in [lo, hi].
  static EdgeLogits uniform(std::shared_ptr<const Graph> graph, std::size_t num_slices, double lo,
                            double hi, std::mt19937_64& rng);

  const Graph& graph() const { return *graph_; }
  const std::shared_ptr<const Graph>& graph_ptr() const { return graph_; }
  std::size_t num_slices() const { return num_slices_; }

  std::span<double> row(std::size_t k, Vertex i);
  std::span<const double> row(std::size_t k, Vertex i) const;

  std::vector<double>& values() { return values_; }
  const std::vector<double>& values() const { return values_; }

 private:
  std::shared_ptr<const Graph> graph_;
  std::size_t num_slices_;
  std::vector<double> values_;
};

/// Row-stochastic relaxation softmax(logits / t) of S, same layout as
/// EdgeLogits.
class SoftTransforms {
 public:
  SoftTransforms(std::shared_ptr<const Graph> graph, std::size_t num_slices,
                 std::vector<double> probs, double temperature);

  const Graph& graph() const { return *graph_; }
  std::size_t num_slices() const { return num_slices_; }
  double temperature() const { return temperature_; }

  std::span<const double> row(std::size_t k, Vertex i) const;
  const std::vector<double>& values() const { return probs_; }

  /// Dense N x N view of slice k.
  Matrix slice(std::size_t k) const;

  /// out += S_k^T x, i.e. out[j, :] += sum_i S_k[i, j] x[i, :]. x and out are
  /// N x C.
  void add_transpose_product(std::size_t k, const Eigen::Ref<const Matrix>& x,
                             Eigen::Ref<Matrix> out) const;
  /// out += S_k x, i.e. out[i, :] += sum_j S_k[i, j] x[j, :].
  void add_product(std::size_t k, const Eigen::Ref<const Matrix>& x, Eigen::Ref<Matrix> out) const;

 private:
  std::shared_ptr<const Graph> graph_;
  std::size_t num_slices_;
  std::vector<double> probs_;
  double temperature_;
};

/// Discrete pseudo-translations: targets[k][i] is the neighbor vertex i is
/// sent to by slice k (row i of S_k is one-hot at that column).
struct HardTransforms {
  std::size_t n = 0;
  std::vector<std::vector<Vertex>> targets;

  std::size_t num_slices() const { return targets.size(); }
};

/// Exponential temperature interpolation from t_init to t_final over
/// total_steps training steps.
struct Schedule {
  double t_init = 10.0;
  double t_final = 0.01;
  std::size_t total_steps = 1;

  void validate() const;
};

SoftTransforms soften(const EdgeLogits& params, double t);

/// Row-wise argmax of the logits (the zero-temperature limit of soften).
/// Ties go to the smallest vertex index.
HardTransforms harden(const EdgeLogits& params);

/// One-hot SoftTransforms realising the given hard transforms on `graph`.
/// Throws InvalidArgument if a target is not a neighbor.
SoftTransforms one_hot(std::shared_ptr<const Graph> graph, const HardTransforms& hard);

/// S x_3 w = sum_k w[k] S_k as a dense N x N matrix.
Matrix mode3_product(const SoftTransforms& s, std::span<const double> w);

/// Graph convolution s^T (S x_3 w), returned as a column vector.
Vector convolve(const Vector& signal, const SoftTransforms& s, std::span<const double> w);

double temperature_at(std::size_t step, const Schedule& sched);

/// T_k^T signal: output[j] = sum over i with target_k(i) = j of signal[i].
Matrix apply_hard(const HardTransforms& hard, std::size_t k, const Matrix& signal);

/// True if every target of every slice is a neighbor of its source vertex.
bool is_edge_constrained(const HardTransforms& hard, const Graph& graph);

/// JSON document {"n": N, "k": K, "targets": [[...], ...]}.
std::string hard_transforms_to_json(const HardTransforms& hard);
/// Throws ParseError with the parser's location on malformed input.
HardTransforms hard_transforms_from_json(const std::string& text);

}  // namespace graphtrans
