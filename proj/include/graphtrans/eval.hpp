#pragma once

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "graphtrans/data.hpp"
#include "graphtrans/nn.hpp"
#include "graphtrans/transform.hpp"

namespace graphtrans {

/// Reference grid transforms, in tie-break order.
inline const std::array<std::string, 9> kCanonicalNames = {
    "identity", "up", "down", "left", "right", "h-dilate", "h-contract", "v-dilate", "v-contract"};

struct CanonicalTransform {
  std::string name;
  std::vector<Vertex> target;
};

/// The nine edge-constrained reference transforms on a height x width grid
/// (pixel (r, c) is vertex r * width + c). Moves that would leave the grid
/// map the pixel to itself. Dilations move one step away from the centre
/// column (row) floor((w - 1) / 2); contractions one step toward it.
std::vector<CanonicalTransform> canonical_transforms(std::size_t height, std::size_t width);

/// Fraction of vertices on which two maps disagree.
double transform_distance(std::span<const Vertex> a, std::span<const Vertex> b);

struct NearestCanonical {
  std::string name;
  double distance = 0.0;
};

NearestCanonical nearest_canonical(std::span<const Vertex> target, std::size_t height,
                                   std::size_t width);
NearestCanonical nearest_canonical(std::span<const Vertex> target,
                                   std::span<const CanonicalTransform> references);

/// For each reference, the smallest distance to any slice.
double closest_slice_distance(const HardTransforms& hard, const CanonicalTransform& reference);

/// Fraction of the split's samples (or labeled vertices) whose argmax
/// prediction equals the label.
double evaluate_accuracy(const Model& model, const EdgeLogits& params, const Dataset& dataset,
                         SplitKind split, double t);
double evaluate_accuracy(const Model& model, const SoftTransforms& s, const Dataset& dataset,
                         std::span<const std::size_t> items);

/// Writes "k,nearest_name,distance" rows and a final "mean,,<avg>" row.
/// Returns the mean distance.
double write_eval_report(std::ostream& out, const HardTransforms& hard, std::size_t height,
                         std::size_t width);

}  // namespace graphtrans
