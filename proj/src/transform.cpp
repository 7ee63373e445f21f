#include "graphtrans/transform.hpp"

#include <algorithm>
#include <cmath>
#include <json.hpp>

#include "graphtrans/error.hpp"

namespace graphtrans {

EdgeLogits::EdgeLogits(std::shared_ptr<const Graph> graph, std::size_t num_slices, double fill)
    : graph_(std::move(graph)), num_slices_(num_slices) {
  if (!graph_) throw InvalidArgument("EdgeLogits: null graph");
  if (num_slices_ == 0) throw InvalidArgument("EdgeLogits: need at least one slice");
  values_.assign(num_slices_ * graph_->num_entries(), fill);
}

EdgeLogits EdgeLogits::uniform(std::shared_ptr<const Graph> graph, std::size_t num_slices,
                               double lo, double hi, std::mt19937_64& rng) {
  EdgeLogits params(std::move(graph), num_slices);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (auto& v : params.values_) v = dist(rng);
  return params;
}

std::span<double> EdgeLogits::row(std::size_t k, Vertex i) {
  const auto len = graph_->neighbors(i).size();
  return {values_.data() + k * graph_->num_entries() + graph_->row_offset(i), len};
}

std::span<const double> EdgeLogits::row(std::size_t k, Vertex i) const {
  const auto len = graph_->neighbors(i).size();
  return {values_.data() + k * graph_->num_entries() + graph_->row_offset(i), len};
}

SoftTransforms::SoftTransforms(std::shared_ptr<const Graph> graph, std::size_t num_slices,
                               std::vector<double> probs, double temperature)
    : graph_(std::move(graph)),
      num_slices_(num_slices),
      probs_(std::move(probs)),
      temperature_(temperature) {
  if (probs_.size() != num_slices_ * graph_->num_entries()) {
    throw InvalidArgument("SoftTransforms: probability array has wrong size");
  }
}

std::span<const double> SoftTransforms::row(std::size_t k, Vertex i) const {
  const auto len = graph_->neighbors(i).size();
  return {probs_.data() + k * graph_->num_entries() + graph_->row_offset(i), len};
}

Matrix SoftTransforms::slice(std::size_t k) const {
  const auto n = static_cast<Eigen::Index>(graph_->size());
  Matrix m = Matrix::Zero(n, n);
  for (Vertex i = 0; i < graph_->size(); ++i) {
    auto cols = graph_->neighbors(i);
    auto p = row(k, i);
    for (std::size_t e = 0; e < cols.size(); ++e) m(i, cols[e]) = p[e];
  }
  return m;
}

void SoftTransforms::add_transpose_product(std::size_t k, const Eigen::Ref<const Matrix>& x,
                                           Eigen::Ref<Matrix> out) const {
  const double* p = probs_.data() + k * graph_->num_entries();
  const auto& cols = graph_->flat_neighbors();
  for (Vertex i = 0; i < graph_->size(); ++i) {
    for (std::size_t e = graph_->row_offset(i); e < graph_->row_offset(i + 1); ++e) {
      out.row(cols[e]) += p[e] * x.row(i);
    }
  }
}

void SoftTransforms::add_product(std::size_t k, const Eigen::Ref<const Matrix>& x,
                                 Eigen::Ref<Matrix> out) const {
  const double* p = probs_.data() + k * graph_->num_entries();
  const auto& cols = graph_->flat_neighbors();
  for (Vertex i = 0; i < graph_->size(); ++i) {
    for (std::size_t e = graph_->row_offset(i); e < graph_->row_offset(i + 1); ++e) {
      out.row(i) += p[e] * x.row(cols[e]);
    }
  }
}

void Schedule::validate() const {
  if (!(t_init > 0.0) || !(t_final > 0.0)) {
    throw InvalidArgument("Schedule: temperatures must be positive");
  }
  if (total_steps == 0) throw InvalidArgument("Schedule: total_steps must be >= 1");
}

SoftTransforms soften(const EdgeLogits& params, double t) {
  if (!(t > 0.0) || !std::isfinite(t)) {
    throw InvalidArgument("soften: temperature must be positive and finite");
  }
  const Graph& g = params.graph();
  std::vector<double> probs(params.values().size());
  for (std::size_t k = 0; k < params.num_slices(); ++k) {
    for (Vertex i = 0; i < g.size(); ++i) {
      auto logits = params.row(k, i);
      if (logits.empty()) continue;
      double* out = probs.data() + k * g.num_entries() + g.row_offset(i);
      double peak = -INFINITY;
      for (double v : logits) {
        if (!std::isfinite(v)) {
          throw NumericError("soften: non-finite logit at slice " + std::to_string(k) +
                             ", vertex " + std::to_string(i));
        }
        peak = std::max(peak, v);
      }
      double total = 0.0;
      for (std::size_t e = 0; e < logits.size(); ++e) {
        out[e] = std::exp((logits[e] - peak) / t);
        total += out[e];
      }
      for (std::size_t e = 0; e < logits.size(); ++e) out[e] /= total;
    }
  }
  return SoftTransforms(params.graph_ptr(), params.num_slices(), std::move(probs), t);
}

HardTransforms harden(const EdgeLogits& params) {
  const Graph& g = params.graph();
  HardTransforms hard;
  hard.n = g.size();
  hard.targets.assign(params.num_slices(), std::vector<Vertex>(g.size(), 0));
  for (std::size_t k = 0; k < params.num_slices(); ++k) {
    for (Vertex i = 0; i < g.size(); ++i) {
      auto logits = params.row(k, i);
      auto cols = g.neighbors(i);
      if (cols.empty()) {
        throw InvalidArgument("harden: vertex " + std::to_string(i) +
                              " has no neighbors to map to");
      }
      // Neighbor lists are sorted, so the first maximum has the smallest index.
      std::size_t best = 0;
      for (std::size_t e = 1; e < logits.size(); ++e) {
        if (logits[e] > logits[best]) best = e;
      }
      hard.targets[k][i] = cols[best];
    }
  }
  return hard;
}

SoftTransforms one_hot(std::shared_ptr<const Graph> graph, const HardTransforms& hard) {
  if (hard.n != graph->size()) throw InvalidArgument("one_hot: vertex count mismatch");
  std::vector<double> probs(hard.num_slices() * graph->num_entries(), 0.0);
  for (std::size_t k = 0; k < hard.num_slices(); ++k) {
    for (Vertex i = 0; i < hard.n; ++i) {
      auto cols = graph->neighbors(i);
      auto it = std::lower_bound(cols.begin(), cols.end(), hard.targets[k][i]);
      if (it == cols.end() || *it != hard.targets[k][i]) {
        throw InvalidArgument("one_hot: target of vertex " + std::to_string(i) +
                              " is not a neighbor");
      }
      probs[k * graph->num_entries() + graph->row_offset(i) +
            static_cast<std::size_t>(it - cols.begin())] = 1.0;
    }
  }
  const auto k = hard.num_slices();
  return SoftTransforms(std::move(graph), k, std::move(probs), 0.0);
}

Matrix mode3_product(const SoftTransforms& s, std::span<const double> w) {
  if (w.size() != s.num_slices()) {
    throw InvalidArgument("mode3_product: weight vector has length " + std::to_string(w.size()) +
                          ", expected " + std::to_string(s.num_slices()));
  }
  const Graph& g = s.graph();
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix m = Matrix::Zero(n, n);
  for (std::size_t k = 0; k < w.size(); ++k) {
    for (Vertex i = 0; i < g.size(); ++i) {
      auto cols = g.neighbors(i);
      auto p = s.row(k, i);
      for (std::size_t e = 0; e < cols.size(); ++e) m(i, cols[e]) += w[k] * p[e];
    }
  }
  return m;
}

Vector convolve(const Vector& signal, const SoftTransforms& s, std::span<const double> w) {
  if (static_cast<std::size_t>(signal.size()) != s.graph().size()) {
    throw InvalidArgument("convolve: signal length does not match vertex count");
  }
  const Matrix m = mode3_product(s, w);
  return m.transpose() * signal;
}

double temperature_at(std::size_t step, const Schedule& sched) {
  sched.validate();
  if (step > sched.total_steps) {
    throw InvalidArgument("temperature_at: step " + std::to_string(step) + " exceeds total " +
                          std::to_string(sched.total_steps));
  }
  if (step == 0) return sched.t_init;
  if (step == sched.total_steps) return sched.t_final;
  const double frac = static_cast<double>(step) / static_cast<double>(sched.total_steps);
  return sched.t_init * std::pow(sched.t_final / sched.t_init, frac);
}

Matrix apply_hard(const HardTransforms& hard, std::size_t k, const Matrix& signal) {
  if (k >= hard.num_slices()) {
    throw InvalidArgument("apply_hard: slice " + std::to_string(k) + " out of range");
  }
  if (static_cast<std::size_t>(signal.rows()) != hard.n) {
    throw InvalidArgument("apply_hard: signal has " + std::to_string(signal.rows()) +
                          " rows, expected " + std::to_string(hard.n));
  }
  Matrix out = Matrix::Zero(signal.rows(), signal.cols());
  for (Vertex i = 0; i < hard.n; ++i) out.row(hard.targets[k][i]) += signal.row(i);
  return out;
}

bool is_edge_constrained(const HardTransforms& hard, const Graph& graph) {
  if (hard.n != graph.size()) return false;
  for (const auto& slice : hard.targets) {
    if (slice.size() != hard.n) return false;
    for (Vertex i = 0; i < hard.n; ++i) {
      if (!graph.contains(i, slice[i])) return false;
    }
  }
  return true;
}

std::string hard_transforms_to_json(const HardTransforms& hard) {
  nlohmann::json doc;
  doc["n"] = hard.n;
  doc["k"] = hard.num_slices();
  doc["targets"] = hard.targets;
  return doc.dump() + "\n";
}

HardTransforms hard_transforms_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("transforms JSON: ") + e.what());
  }
  HardTransforms hard;
  try {
    hard.n = doc.at("n").get<std::size_t>();
    const auto k = doc.at("k").get<std::size_t>();
    hard.targets = doc.at("targets").get<std::vector<std::vector<Vertex>>>();
    if (hard.targets.size() != k) throw ParseError("transforms JSON: 'targets' has wrong length");
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("transforms JSON: ") + e.what());
  }
  for (const auto& slice : hard.targets) {
    if (slice.size() != hard.n) throw ParseError("transforms JSON: slice length differs from n");
    for (auto t : slice) {
      if (t >= hard.n) throw ParseError("transforms JSON: target index out of range");
    }
  }
  return hard;
}

}  // namespace graphtrans
