#include "graphtrans/nn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "graphtrans/error.hpp"

namespace graphtrans {

namespace {

struct LayerCache {
  Matrix input;               // B*N x C_in
  std::vector<Matrix> mixed;  // per slice: input * W_k, B*N x C_out
  Matrix pre;                 // pre-activation, B*N x C_out
};

struct ForwardPass {
  std::size_t batch = 0;
  std::size_t vertices = 0;
  std::vector<LayerCache> layers;
  Matrix features;  // output of the last GSL, B*N x C_last
  Matrix pooled;    // B x C_last (signal mode)
  Matrix probs;
};

void check_finite(const Matrix& m, const std::string& where) {
  if (!m.allFinite()) throw NumericError("non-finite values in " + where);
}

void softmax_rows(Matrix& logits) {
  for (Eigen::Index r = 0; r < logits.rows(); ++r) {
    auto row = logits.row(r);
    row.array() -= row.maxCoeff();
    row = row.array().exp().matrix();
    row /= row.sum();
  }
}

Matrix stack_inputs(std::span<const Matrix* const> xs, const Model& model, std::size_t n) {
  const auto c = static_cast<Eigen::Index>(model.input_channels());
  Matrix stacked(static_cast<Eigen::Index>(xs.size() * n), c);
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const Matrix& x = *xs[b];
    if (static_cast<std::size_t>(x.rows()) != n || x.cols() != c) {
      throw InvalidArgument("input " + std::to_string(b) + " is " + std::to_string(x.rows()) +
                            " x " + std::to_string(x.cols()) + ", expected " + std::to_string(n) +
                            " x " + std::to_string(c));
    }
    stacked.middleRows(static_cast<Eigen::Index>(b * n), static_cast<Eigen::Index>(n)) = x;
  }
  return stacked;
}

void check_compatible(const Model& model, const SoftTransforms& s) {
  model.validate();
  if (model.num_slices() != s.num_slices()) {
    throw InvalidArgument("model has " + std::to_string(model.num_slices()) +
                          " slices per layer but S has " + std::to_string(s.num_slices()));
  }
}

ForwardPass forward_impl(Matrix stacked, std::size_t batch, const Model& model,
                         const SoftTransforms& s) {
  ForwardPass fp;
  fp.batch = batch;
  fp.vertices = s.graph().size();
  const auto n = static_cast<Eigen::Index>(fp.vertices);
  Matrix h = std::move(stacked);
  fp.layers.resize(model.layers.size());
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const GslLayer& layer = model.layers[l];
    LayerCache& cache = fp.layers[l];
    cache.input = std::move(h);
    cache.pre.resize(cache.input.rows(), static_cast<Eigen::Index>(layer.out_channels()));
    cache.pre.rowwise() = layer.bias.transpose();
    cache.mixed.resize(layer.weights.size());
    for (std::size_t k = 0; k < layer.weights.size(); ++k) {
      cache.mixed[k].noalias() = cache.input * layer.weights[k];
      for (std::size_t b = 0; b < batch; ++b) {
        const auto off = static_cast<Eigen::Index>(b) * n;
        s.add_transpose_product(k, cache.mixed[k].middleRows(off, n), cache.pre.middleRows(off, n));
      }
    }
    check_finite(cache.pre, "GSL layer " + std::to_string(l));
    h = model.activation(l) == Activation::ReLU ? Matrix(cache.pre.cwiseMax(0.0)) : cache.pre;
  }
  fp.features = std::move(h);

  Matrix logits;
  if (model.mode == TaskMode::Signal) {
    fp.pooled.resize(static_cast<Eigen::Index>(batch), fp.features.cols());
    for (std::size_t b = 0; b < batch; ++b) {
      fp.pooled.row(static_cast<Eigen::Index>(b)) =
          fp.features.middleRows(static_cast<Eigen::Index>(b) * n, n).colwise().mean();
    }
    logits = fp.pooled * model.fc_weight;
  } else {
    logits = fp.features * model.fc_weight;
  }
  logits.rowwise() += model.fc_bias.transpose();
  check_finite(logits, "fully connected head");
  softmax_rows(logits);
  fp.probs = std::move(logits);
  return fp;
}

// Backpropagates dLoss/d(pre-softmax outputs) through the network.
void backward_impl(const ForwardPass& fp, const Matrix& output_grad, const Model& model,
                   const SoftTransforms& s, Gradients& grads) {
  const auto n = static_cast<Eigen::Index>(fp.vertices);
  grads.model = Model::zeros(model.num_slices(), model.input_channels(), {}, model.num_classes(),
                             model.mode);
  grads.model.layers.resize(model.layers.size());

  Matrix d_features;
  if (model.mode == TaskMode::Signal) {
    grads.model.fc_weight = fp.pooled.transpose() * output_grad;
    const Matrix d_pooled = output_grad * model.fc_weight.transpose();
    d_features.resize(fp.features.rows(), fp.features.cols());
    for (std::size_t b = 0; b < fp.batch; ++b) {
      d_features.middleRows(static_cast<Eigen::Index>(b) * n, n).rowwise() =
          d_pooled.row(static_cast<Eigen::Index>(b)) / static_cast<double>(n);
    }
  } else {
    grads.model.fc_weight = fp.features.transpose() * output_grad;
    d_features = output_grad * model.fc_weight.transpose();
  }
  grads.model.fc_bias = output_grad.colwise().sum().transpose();

  const Graph& g = s.graph();
  const auto& cols = g.flat_neighbors();
  std::vector<double> d_soft(s.values().size(), 0.0);

  Matrix d_out = std::move(d_features);
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    const GslLayer& layer = model.layers[l];
    const LayerCache& cache = fp.layers[l];
    GslLayer& glayer = grads.model.layers[l];

    Matrix d_pre = model.activation(l) == Activation::ReLU
                       ? Matrix(d_out.cwiseProduct((cache.pre.array() > 0.0).cast<double>().matrix()))
                       : std::move(d_out);
    check_finite(d_pre, "gradient of GSL layer " + std::to_string(l));
    glayer.bias = d_pre.colwise().sum().transpose();
    glayer.weights.resize(layer.weights.size());

    Matrix d_input = Matrix::Zero(cache.input.rows(), cache.input.cols());
    Matrix d_mixed(d_pre.rows(), d_pre.cols());
    for (std::size_t k = 0; k < layer.weights.size(); ++k) {
      d_mixed.setZero();
      double* ds = d_soft.data() + k * g.num_entries();
      for (std::size_t b = 0; b < fp.batch; ++b) {
        const auto off = static_cast<Eigen::Index>(b) * n;
        s.add_product(k, d_pre.middleRows(off, n), d_mixed.middleRows(off, n));
        // dS_k[i, j] = <mixed_k[i, :], d_pre[j, :]> on the edge support.
        for (Vertex i = 0; i < g.size(); ++i) {
          const auto xi = cache.mixed[k].row(off + static_cast<Eigen::Index>(i));
          for (std::size_t e = g.row_offset(i); e < g.row_offset(i + 1); ++e) {
            ds[e] += xi.dot(d_pre.row(off + static_cast<Eigen::Index>(cols[e])));
          }
        }
      }
      glayer.weights[k].noalias() = cache.input.transpose() * d_mixed;
      d_input.noalias() += d_mixed * layer.weights[k].transpose();
    }
    d_out = std::move(d_input);
  }

  // Chain rule through softmax(logits / t), row by row.
  grads.logits.assign(d_soft.size(), 0.0);
  const double inv_t = 1.0 / s.temperature();
  for (std::size_t k = 0; k < s.num_slices(); ++k) {
    for (Vertex i = 0; i < g.size(); ++i) {
      const std::size_t base = k * g.num_entries() + g.row_offset(i);
      const std::size_t len = g.neighbors(i).size();
      const double* p = s.values().data() + base;
      double mean = 0.0;
      for (std::size_t e = 0; e < len; ++e) mean += p[e] * d_soft[base + e];
      for (std::size_t e = 0; e < len; ++e) {
        grads.logits[base + e] = p[e] * (d_soft[base + e] - mean) * inv_t;
      }
    }
  }
  for (double v : grads.logits) {
    if (!std::isfinite(v)) throw NumericError("non-finite gradient for S logits");
  }
}

}  // namespace

void Model::validate() const {
  if (layers.empty()) throw InvalidArgument("Model: at least one GSL is required");
  const std::size_t k = layers.front().weights.size();
  if (k == 0) throw InvalidArgument("Model: GSL needs at least one slice");
  std::size_t channels = layers.front().in_channels();
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto& layer = layers[l];
    if (layer.weights.size() != k) {
      throw InvalidArgument("Model: layer " + std::to_string(l) + " has a different slice count");
    }
    for (const auto& w : layer.weights) {
      if (static_cast<std::size_t>(w.rows()) != channels ||
          static_cast<std::size_t>(w.cols()) != layer.out_channels()) {
        throw InvalidArgument("Model: layer " + std::to_string(l) + " has inconsistent shape");
      }
    }
    channels = layer.out_channels();
  }
  if (static_cast<std::size_t>(fc_weight.rows()) != channels ||
      fc_weight.cols() != fc_bias.size()) {
    throw InvalidArgument("Model: fully connected head has inconsistent shape");
  }
  if (num_classes() < 2) throw InvalidArgument("Model: need at least two classes");
}

Model Model::zeros(std::size_t num_slices, std::size_t in_channels,
                   std::span<const std::size_t> widths, std::size_t num_classes, TaskMode mode) {
  Model m;
  m.mode = mode;
  std::size_t c_in = in_channels;
  for (std::size_t width : widths) {
    GslLayer layer;
    layer.weights.assign(num_slices, Matrix::Zero(static_cast<Eigen::Index>(c_in),
                                                  static_cast<Eigen::Index>(width)));
    layer.bias = Vector::Zero(static_cast<Eigen::Index>(width));
    m.layers.push_back(std::move(layer));
    c_in = width;
  }
  m.fc_weight = Matrix::Zero(static_cast<Eigen::Index>(c_in), static_cast<Eigen::Index>(num_classes));
  m.fc_bias = Vector::Zero(static_cast<Eigen::Index>(num_classes));
  return m;
}

void initialize(Model& model, std::mt19937_64& rng) {
  auto fill = [&rng](Matrix& w, std::size_t fan_in) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(fan_in, 1)));
    std::uniform_real_distribution<double> dist(-bound, bound);
    for (Eigen::Index i = 0; i < w.size(); ++i) w.data()[i] = dist(rng);
  };
  for (auto& layer : model.layers) {
    const std::size_t fan_in = layer.weights.size() * layer.in_channels();
    for (auto& w : layer.weights) fill(w, fan_in);
    layer.bias.setZero();
  }
  fill(model.fc_weight, static_cast<std::size_t>(model.fc_weight.rows()));
  model.fc_bias.setZero();
}

Matrix gsl_forward(const Matrix& x, const SoftTransforms& s, const GslLayer& layer,
                   Activation activation) {
  if (layer.weights.size() != s.num_slices()) {
    throw InvalidArgument("gsl_forward: layer has " + std::to_string(layer.weights.size()) +
                          " filters per channel pair, S has " + std::to_string(s.num_slices()) +
                          " slices");
  }
  if (static_cast<std::size_t>(x.rows()) != s.graph().size() ||
      static_cast<std::size_t>(x.cols()) != layer.in_channels()) {
    throw InvalidArgument("gsl_forward: input shape does not match graph and layer");
  }
  Matrix out(x.rows(), static_cast<Eigen::Index>(layer.out_channels()));
  out.rowwise() = layer.bias.transpose();
  for (std::size_t k = 0; k < layer.weights.size(); ++k) {
    const Matrix mixed = x * layer.weights[k];
    s.add_transpose_product(k, mixed, out);
  }
  if (activation == Activation::ReLU) out = out.cwiseMax(0.0);
  return out;
}

Vector global_average_pool(const Matrix& x) {
  if (x.rows() == 0) throw InvalidArgument("global_average_pool: empty signal");
  return x.colwise().mean().transpose();
}

Matrix model_forward(const Matrix& x, const Model& model, const SoftTransforms& s) {
  check_compatible(model, s);
  const Matrix* xs[] = {&x};
  return forward_impl(stack_inputs(xs, model, s.graph().size()), 1, model, s).probs;
}

Matrix model_forward(const Matrix& x, const Model& model, const EdgeLogits& params, double t) {
  return model_forward(x, model, soften(params, t));
}

Matrix forward_batch(std::span<const Matrix* const> xs, const Model& model,
                     const SoftTransforms& s) {
  check_compatible(model, s);
  if (model.mode != TaskMode::Signal) {
    throw InvalidArgument("forward_batch: only defined for signal mode");
  }
  return forward_impl(stack_inputs(xs, model, s.graph().size()), xs.size(), model, s).probs;
}

double cross_entropy(std::span<const double> probs, std::size_t y) {
  if (y >= probs.size()) {
    throw InvalidArgument("cross_entropy: label " + std::to_string(y) + " out of range");
  }
  return -std::log(std::max(probs[y], kProbabilityFloor));
}

double cross_entropy(const Matrix& probs, std::span<const int> vertex_labels) {
  if (static_cast<std::size_t>(probs.rows()) != vertex_labels.size()) {
    throw InvalidArgument("cross_entropy: one label per vertex required");
  }
  double total = 0.0;
  std::size_t count = 0;
  for (std::size_t i = 0; i < vertex_labels.size(); ++i) {
    if (vertex_labels[i] < 0) continue;
    const auto y = static_cast<Eigen::Index>(vertex_labels[i]);
    if (y >= probs.cols()) throw InvalidArgument("cross_entropy: label out of range");
    total -= std::log(std::max(probs(static_cast<Eigen::Index>(i), y), kProbabilityFloor));
    ++count;
  }
  if (count == 0) throw InvalidArgument("cross_entropy: no labeled vertices");
  return total / static_cast<double>(count);
}

Gradients backward_batch(std::span<const Matrix* const> xs, std::span<const int> labels,
                         const Model& model, const EdgeLogits& params, double t) {
  if (model.mode != TaskMode::Signal) {
    throw InvalidArgument("backward_batch: model is not in signal mode");
  }
  if (xs.empty() || xs.size() != labels.size()) {
    throw InvalidArgument("backward_batch: need one label per input and a non-empty batch");
  }
  const SoftTransforms s = soften(params, t);
  check_compatible(model, s);
  ForwardPass fp = forward_impl(stack_inputs(xs, model, s.graph().size()), xs.size(), model, s);

  Gradients grads;
  grads.output_grad = fp.probs;
  const double scale = 1.0 / static_cast<double>(xs.size());
  for (std::size_t b = 0; b < xs.size(); ++b) {
    const auto row = static_cast<Eigen::Index>(b);
    if (labels[b] < 0 || static_cast<std::size_t>(labels[b]) >= model.num_classes()) {
      throw InvalidArgument("backward_batch: label out of range");
    }
    const auto* p = fp.probs.row(row).data();
    grads.loss += cross_entropy({p, model.num_classes()}, static_cast<std::size_t>(labels[b]));
    grads.output_grad(row, labels[b]) -= 1.0;
  }
  grads.loss *= scale;
  grads.output_grad *= scale;
  backward_impl(fp, grads.output_grad, model, s, grads);
  grads.probs = std::move(fp.probs);
  return grads;
}

Gradients backward(const Matrix& x, int label, const Model& model, const EdgeLogits& params,
                   double t) {
  const Matrix* xs[] = {&x};
  const int labels[] = {label};
  return backward_batch(xs, labels, model, params, t);
}

Gradients backward(const Matrix& x, std::span<const int> vertex_labels, const Model& model,
                   const EdgeLogits& params, double t) {
  if (model.mode != TaskMode::Vertex) {
    throw InvalidArgument("backward: per-vertex labels require a vertex-mode model");
  }
  const SoftTransforms s = soften(params, t);
  check_compatible(model, s);
  if (vertex_labels.size() != s.graph().size()) {
    throw InvalidArgument("backward: one label per vertex required");
  }
  const Matrix* xs[] = {&x};
  ForwardPass fp = forward_impl(stack_inputs(xs, model, s.graph().size()), 1, model, s);

  Gradients grads;
  grads.loss = cross_entropy(fp.probs, vertex_labels);
  std::size_t count = 0;
  for (int y : vertex_labels) count += y >= 0 ? 1 : 0;
  grads.output_grad = Matrix::Zero(fp.probs.rows(), fp.probs.cols());
  const double scale = 1.0 / static_cast<double>(count);
  for (std::size_t i = 0; i < vertex_labels.size(); ++i) {
    if (vertex_labels[i] < 0) continue;
    const auto row = static_cast<Eigen::Index>(i);
    grads.output_grad.row(row) = fp.probs.row(row) * scale;
    grads.output_grad(row, vertex_labels[i]) -= scale;
  }
  backward_impl(fp, grads.output_grad, model, s, grads);
  grads.probs = std::move(fp.probs);
  return grads;
}

namespace {

std::span<double> as_span(Matrix& m) { return {m.data(), static_cast<std::size_t>(m.size())}; }
std::span<double> as_span(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

void append_model_blocks(Model& model, std::vector<std::span<double>>& blocks) {
  for (auto& layer : model.layers) {
    for (auto& w : layer.weights) blocks.push_back(as_span(w));
    blocks.push_back(as_span(layer.bias));
  }
  blocks.push_back(as_span(model.fc_weight));
  blocks.push_back(as_span(model.fc_bias));
}

}  // namespace

std::vector<std::span<double>> parameter_blocks(Model& model, EdgeLogits& params) {
  std::vector<std::span<double>> blocks;
  append_model_blocks(model, blocks);
  blocks.emplace_back(params.values());
  return blocks;
}

std::vector<std::span<double>> parameter_blocks(Gradients& grads) {
  std::vector<std::span<double>> blocks;
  append_model_blocks(grads.model, blocks);
  blocks.emplace_back(grads.logits);
  return blocks;
}

}  // namespace graphtrans
