#include "graphtrans/eval.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "graphtrans/error.hpp"
#include "graphtrans/data.hpp"
#include "graphtrans/graph.hpp"
#include "graphtrans/nn.hpp"

namespace graphtrans {
namespace {

int sign(long v) { return (v > 0) - (v < 0); }

// Displacement-field oracle: each canonical is a per-pixel (dr, dc) step,
// clamped to self when the step leaves the grid.
std::vector<Vertex> oracle(const std::string& name, long h, long w) {
  const long cr = (h - 1) / 2;
  const long cc = (w - 1) / 2;
  std::vector<Vertex> out(static_cast<std::size_t>(h * w));
  for (long r = 0; r < h; ++r) {
    for (long c = 0; c < w; ++c) {
      long dr = 0;
      long dc = 0;
      if (name == "up") dr = -1;
      if (name == "down") dr = 1;
      if (name == "left") dc = -1;
      if (name == "right") dc = 1;
      if (name == "h-dilate") dc = sign(c - cc);
      if (name == "h-contract") dc = -sign(c - cc);
      if (name == "v-dilate") dr = sign(r - cr);
      if (name == "v-contract") dr = -sign(r - cr);
      long nr = r + dr;
      long nc = c + dc;
      if (nr < 0 || nr >= h || nc < 0 || nc >= w) {
        nr = r;
        nc = c;
      }
      out[static_cast<std::size_t>(r * w + c)] = static_cast<Vertex>(nr * w + nc);
    }
  }
  return out;
}

TEST(Canonical, MatchesDisplacementOracle) {
  for (long h = 2; h <= 7; ++h) {
    for (long w = 2; w <= 7; ++w) {
      const auto refs = canonical_transforms(static_cast<std::size_t>(h), static_cast<std::size_t>(w));
      ASSERT_EQ(refs.size(), 9u);
      for (std::size_t i = 0; i < refs.size(); ++i) {
        EXPECT_EQ(refs[i].name, kCanonicalNames[i]);
        EXPECT_EQ(refs[i].target, oracle(refs[i].name, h, w)) << refs[i].name << " on " << h << "x" << w;
      }
    }
  }
}

TEST(Canonical, HorizontalContractionOnThreeByThree) {
  const auto refs = canonical_transforms(3, 3);
  const auto& contract = refs[6].target;
  EXPECT_EQ(contract[0], 1u);
  EXPECT_EQ(contract[1], 1u);
  EXPECT_EQ(contract[2], 1u);
}

TEST(Canonical, EdgeConstrainedOnSelfLoopedGrid) {
  for (auto [h, w] : {std::pair{2, 2}, {3, 5}, {16, 16}, {9, 4}}) {
    const Graph g = build_grid_graph(static_cast<std::size_t>(h), static_cast<std::size_t>(w), true);
    for (const auto& ref : canonical_transforms(static_cast<std::size_t>(h), static_cast<std::size_t>(w))) {
      for (Vertex i = 0; i < g.size(); ++i) EXPECT_TRUE(g.contains(i, ref.target[i])) << ref.name;
    }
  }
}

TEST(Canonical, RejectsDegenerateGrids) {
  EXPECT_THROW(canonical_transforms(1, 5), InvalidArgument);
  EXPECT_THROW(canonical_transforms(5, 1), InvalidArgument);
}

TEST(Canonical, CoincideOnThreeByThree) {
  // Both dilations clamp every moving pixel at the border.
  const auto refs = canonical_transforms(3, 3);
  EXPECT_EQ(refs[5].target, refs[0].target);
  EXPECT_EQ(refs[7].target, refs[0].target);
}

TEST(Canonical, EachIsItsOwnNearest) {
  for (std::size_t side : {4u, 5u, 16u}) {
    const auto refs = canonical_transforms(side, side);
    for (const auto& ref : refs) {
      const NearestCanonical nc = nearest_canonical(ref.target, side, side);
      EXPECT_EQ(nc.name, ref.name);
      EXPECT_EQ(nc.distance, 0.0);
    }
  }
}

TEST(Distance, Examples) {
  std::vector<Vertex> a(256);
  for (Vertex i = 0; i < 256; ++i) a[i] = i;
  std::vector<Vertex> b = a;
  EXPECT_EQ(transform_distance(a, b), 0.0);
  b[3] = 4;
  b[100] = 0;
  b[255] = 1;
  EXPECT_DOUBLE_EQ(transform_distance(a, b), 3.0 / 256.0);
  EXPECT_NEAR(transform_distance(a, b), 0.0117, 1e-4);
  std::vector<Vertex> shorter(10);
  EXPECT_THROW(transform_distance(a, shorter), InvalidArgument);
}

TEST(Distance, IsAMetricOnRandomFunctions) {
  std::mt19937_64 rng(2024);
  std::size_t violations = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const std::size_t n = 1 + rng() % 40;
    std::uniform_int_distribution<Vertex> pick(0, n - 1);
    auto draw = [&] {
      std::vector<Vertex> f(n);
      for (auto& v : f) v = pick(rng);
      return f;
    };
    const auto a = draw();
    const auto b = draw();
    const auto c = draw();
    const double ab = transform_distance(a, b);
    violations += ab != transform_distance(b, a);
    violations += transform_distance(a, a) != 0.0;
    violations += (ab == 0.0) != (a == b);
    violations += ab > transform_distance(a, c) + transform_distance(c, b) + 1e-15;
  }
  EXPECT_EQ(violations, 0u);
}

TEST(Nearest, UpWithTwoBoundaryChanges) {
  auto up = canonical_transforms(16, 16)[1].target;
  up[0] = 1;    // top row: was self
  up[15] = 14;
  const NearestCanonical nc = nearest_canonical(up, 16, 16);
  EXPECT_EQ(nc.name, "up");
  EXPECT_DOUBLE_EQ(nc.distance, 2.0 / 256.0);
  EXPECT_THROW(nearest_canonical(up, 15, 16), InvalidArgument);
}

TEST(Nearest, TiesFollowListedOrder) {
  // On 2x2, "up" and "v-contract" coincide; the earlier name wins.
  const auto refs = canonical_transforms(2, 2);
  EXPECT_EQ(refs[1].target, refs[8].target);
  EXPECT_EQ(nearest_canonical(refs[8].target, 2, 2).name, "up");
}

TEST(ClosestSlice, PicksBestSlice) {
  const auto refs = canonical_transforms(4, 4);
  HardTransforms hard{16, {refs[3].target, refs[0].target}};
  EXPECT_EQ(closest_slice_distance(hard, refs[0]), 0.0);
  EXPECT_EQ(closest_slice_distance(hard, refs[3]), 0.0);
  EXPECT_GT(closest_slice_distance(hard, refs[1]), 0.0);
}

TEST(EvalReport, RowsAndMean) {
  const auto refs = canonical_transforms(4, 4);
  auto noisy = refs[4].target;
  noisy[5] = 5;
  noisy[9] = 9;
  HardTransforms hard{16, {refs[0].target, noisy}};
  std::ostringstream out;
  const double mean = write_eval_report(out, hard, 4, 4);
  EXPECT_DOUBLE_EQ(mean, 1.0 / 16.0);
  EXPECT_EQ(out.str(), "k,nearest_name,distance\n0,identity,0\n1,right,0.125\nmean,,0.0625\n");
}

Dataset two_class_signals() {
  Dataset d;
  d.num_classes = 2;
  for (int i = 0; i < 8; ++i) {
    d.signals.push_back(Matrix::Constant(4, 1, i % 2 == 0 ? -1.0 : 1.0));
    d.labels.push_back(i % 2);
    d.split.validation.push_back(static_cast<std::size_t>(i));
  }
  return d;
}

TEST(Accuracy, ConstantPredictionOnBalancedSplit) {
  const Dataset d = two_class_signals();
  auto g = std::make_shared<const Graph>(build_ring_graph(4, true));
  const std::vector<std::size_t> widths = {1};
  Model model = Model::zeros(1, 1, widths, 2, TaskMode::Signal);
  model.fc_bias << 1.0, 0.0;
  EXPECT_EQ(evaluate_accuracy(model, EdgeLogits(g, 1), d, SplitKind::Validation, 1.0), 0.5);
}

TEST(Accuracy, PerfectModel) {
  const Dataset d = two_class_signals();
  auto g = std::make_shared<const Graph>(build_ring_graph(4, true));
  const std::vector<std::size_t> widths = {1};
  Model model = Model::zeros(1, 1, widths, 2, TaskMode::Signal);
  model.layers[0].weights[0](0, 0) = 1.0;
  model.fc_weight << -1.0, 1.0;
  EXPECT_EQ(evaluate_accuracy(model, EdgeLogits(g, 1), d, SplitKind::Validation, 1.0), 1.0);
  EXPECT_THROW(evaluate_accuracy(model, EdgeLogits(g, 1), d, SplitKind::Test, 1.0), InvalidArgument);
}

}  // namespace
}  // namespace graphtrans
