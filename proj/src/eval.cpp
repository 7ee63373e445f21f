#include "graphtrans/eval.hpp"

#include <algorithm>
#include <iomanip>
#include <ostream>

#include "graphtrans/error.hpp"

namespace graphtrans {

std::vector<CanonicalTransform> canonical_transforms(std::size_t height, std::size_t width) {
  if (height < 2 || width < 2) {
    throw InvalidArgument("canonical_transforms: grid must be at least 2x2, got " +
                          std::to_string(height) + "x" + std::to_string(width));
  }
  const std::size_t center_row = (height - 1) / 2;
  const std::size_t center_col = (width - 1) / 2;
  auto step_toward = [](std::size_t x, std::size_t center) {
    return x < center ? x + 1 : x > center ? x - 1 : x;
  };
  auto step_away = [](std::size_t x, std::size_t center, std::size_t extent) {
    if (x < center) return x == 0 ? x : x - 1;
    if (x > center) return x + 1 == extent ? x : x + 1;
    return x;
  };

  std::vector<CanonicalTransform> out;
  for (const auto& name : kCanonicalNames) out.push_back({name, std::vector<Vertex>(height * width)});
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      const std::size_t i = r * width + c;
      auto at = [width](std::size_t rr, std::size_t cc) { return rr * width + cc; };
      out[0].target[i] = i;
      out[1].target[i] = at(r == 0 ? r : r - 1, c);
      out[2].target[i] = at(r + 1 == height ? r : r + 1, c);
      out[3].target[i] = at(r, c == 0 ? c : c - 1);
      out[4].target[i] = at(r, c + 1 == width ? c : c + 1);
      out[5].target[i] = at(r, step_away(c, center_col, width));
      out[6].target[i] = at(r, step_toward(c, center_col));
      out[7].target[i] = at(step_away(r, center_row, height), c);
      out[8].target[i] = at(step_toward(r, center_row), c);
    }
  }
  return out;
}

double transform_distance(std::span<const Vertex> a, std::span<const Vertex> b) {
  if (a.size() != b.size()) throw InvalidArgument("transform_distance: domain size mismatch");
  if (a.empty()) return 0.0;
  std::size_t differences = 0;
  for (std::size_t i = 0; i < a.size(); ++i) differences += a[i] != b[i] ? 1 : 0;
  return static_cast<double>(differences) / static_cast<double>(a.size());
}

NearestCanonical nearest_canonical(std::span<const Vertex> target,
                                   std::span<const CanonicalTransform> references) {
  if (references.empty()) throw InvalidArgument("nearest_canonical: no references");
  NearestCanonical best{references.front().name, transform_distance(target, references.front().target)};
  for (std::size_t r = 1; r < references.size(); ++r) {
    const double d = transform_distance(target, references[r].target);
    if (d < best.distance) best = {references[r].name, d};
  }
  return best;
}

NearestCanonical nearest_canonical(std::span<const Vertex> target, std::size_t height,
                                   std::size_t width) {
  if (target.size() != height * width) {
    throw InvalidArgument("nearest_canonical: transform has " + std::to_string(target.size()) +
                          " vertices, grid has " + std::to_string(height * width));
  }
  const auto refs = canonical_transforms(height, width);
  return nearest_canonical(target, refs);
}

double closest_slice_distance(const HardTransforms& hard, const CanonicalTransform& reference) {
  double best = 1.0;
  for (const auto& slice : hard.targets) best = std::min(best, transform_distance(slice, reference.target));
  return best;
}

double evaluate_accuracy(const Model& model, const SoftTransforms& s, const Dataset& dataset,
                         std::span<const std::size_t> items) {
  if (items.empty()) throw InvalidArgument("evaluate_accuracy: empty split");
  std::size_t correct = 0;
  auto predicted = [](const Matrix& probs, Eigen::Index row) {
    Eigen::Index best = 0;
    probs.row(row).maxCoeff(&best);
    return static_cast<int>(best);
  };
  if (dataset.mode == TaskMode::Vertex) {
    const Matrix probs = model_forward(dataset.signals.front(), model, s);
    for (auto i : items) {
      correct += predicted(probs, static_cast<Eigen::Index>(i)) == dataset.labels.at(i) ? 1 : 0;
    }
  } else {
    constexpr std::size_t kChunk = 256;
    std::vector<const Matrix*> xs;
    for (std::size_t start = 0; start < items.size(); start += kChunk) {
      const std::size_t end = std::min(items.size(), start + kChunk);
      xs.clear();
      for (std::size_t i = start; i < end; ++i) xs.push_back(&dataset.signals.at(items[i]));
      const Matrix probs = forward_batch(xs, model, s);
      for (std::size_t i = start; i < end; ++i) {
        correct += predicted(probs, static_cast<Eigen::Index>(i - start)) == dataset.labels[items[i]]
                       ? 1
                       : 0;
      }
    }
  }
  return static_cast<double>(correct) / static_cast<double>(items.size());
}

double evaluate_accuracy(const Model& model, const EdgeLogits& params, const Dataset& dataset,
                         SplitKind split, double t) {
  return evaluate_accuracy(model, soften(params, t), dataset, dataset.indices(split));
}

double write_eval_report(std::ostream& out, const HardTransforms& hard, std::size_t height,
                         std::size_t width) {
  const auto refs = canonical_transforms(height, width);
  out << "k,nearest_name,distance\n" << std::setprecision(17);
  double total = 0.0;
  for (std::size_t k = 0; k < hard.num_slices(); ++k) {
    if (hard.targets[k].size() != height * width) {
      throw InvalidArgument("write_eval_report: transform size does not match the grid");
    }
    const auto best = nearest_canonical(hard.targets[k], refs);
    out << k << ',' << best.name << ',' << best.distance << '\n';
    total += best.distance;
  }
  const double mean = hard.num_slices() == 0 ? 0.0 : total / static_cast<double>(hard.num_slices());
  out << "mean,," << mean << '\n';
  return mean;
}

}  // namespace graphtrans
