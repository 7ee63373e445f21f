#include "graphtrans/graph.hpp"

#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "graphtrans/error.hpp"

namespace graphtrans {
namespace {

std::vector<Vertex> to_vec(std::span<const Vertex> s) { return {s.begin(), s.end()}; }

TEST(RingGraph, FourRingSupportMatchesCirculantPattern) {
  const Graph g = build_ring_graph(4, true);
  EXPECT_EQ(to_vec(g.neighbors(0)), (std::vector<Vertex>{0, 1, 3}));
  // Nonzero pattern of w0*I + w1*T1 + w2*T2 on the 4-ring.
  const Matrix expected{{1, 1, 0, 1}, {1, 1, 1, 0}, {0, 1, 1, 1}, {1, 0, 1, 1}};
  EXPECT_EQ(adjacency(g), expected);
  EXPECT_TRUE(g.has_self_loops());
}

TEST(RingGraph, TriangleIsComplete) {
  const Graph g = build_ring_graph(3, false);
  const Matrix expected = Matrix::Ones(3, 3) - Matrix::Identity(3, 3);
  EXPECT_EQ(adjacency(g), expected);
}

TEST(RingGraph, EveryVertexHasDegreeTwo) {
  const Graph g = build_ring_graph(8, false);
  for (Vertex i = 0; i < 8; ++i) EXPECT_EQ(g.degree(i), 2u);
  EXPECT_EQ(g.num_edges(), 8u);
}

TEST(RingGraph, RejectsTooFewVertices) {
  EXPECT_THROW(build_ring_graph(2, true), InvalidArgument);
  EXPECT_THROW(build_ring_graph(0, false), InvalidArgument);
}

TEST(GridGraph, TwoByTwoWithSelfLoops) {
  const Graph g = build_grid_graph(2, 2, true);
  for (Vertex i = 0; i < 4; ++i) EXPECT_EQ(g.neighbors(i).size(), 3u);
}

TEST(GridGraph, SixteenBySixteenDegreeClasses) {
  const Graph g = build_grid_graph(16, 16, true);
  ASSERT_EQ(g.size(), 256u);
  // Position classes: 4 corners, 4 * 14 border pixels, 14 * 14 interior.
  std::map<std::size_t, std::size_t> histogram;
  for (Vertex i = 0; i < g.size(); ++i) ++histogram[g.neighbors(i).size()];
  EXPECT_EQ(histogram[3], 4u);
  EXPECT_EQ(histogram[4], 56u);
  EXPECT_EQ(histogram[5], 196u);
  EXPECT_EQ(histogram.size(), 3u);
  // Interior pixel (5, 7) and corner (0, 15).
  EXPECT_EQ(g.neighbors(5 * 16 + 7).size(), 5u);
  EXPECT_EQ(g.neighbors(15).size(), 3u);
}

TEST(GridGraph, SingleRowIsAPath) {
  const Graph g = build_grid_graph(1, 4, false);
  EXPECT_EQ(g.degree(0), 1u);
  EXPECT_EQ(g.degree(1), 2u);
  EXPECT_EQ(g.degree(2), 2u);
  EXPECT_EQ(g.degree(3), 1u);
}

TEST(GridGraph, RejectsZeroDimension) {
  EXPECT_THROW(build_grid_graph(0, 4, true), InvalidArgument);
  EXPECT_THROW(build_grid_graph(3, 0, false), InvalidArgument);
}

TEST(GridGraph, VertexAndEdgeCounts) {
  for (std::size_t h = 1; h <= 6; ++h) {
    for (std::size_t w = 1; w <= 6; ++w) {
      const Graph g = build_grid_graph(h, w, h % 2 == 0);
      EXPECT_EQ(g.size(), h * w);
      EXPECT_EQ(g.num_edges(), h * (w - 1) + w * (h - 1));
      EXPECT_TRUE(g.is_symmetric());
    }
  }
}

TEST(Graph, NeighborListsAreSortedAndDeduplicated) {
  const Graph g(3, {{2, 1, 1}, {0}, {0, 2}}, false);
  EXPECT_EQ(to_vec(g.neighbors(0)), (std::vector<Vertex>{1, 2}));
  EXPECT_THROW(Graph(2, {{5}, {}}, false), InvalidArgument);
  EXPECT_THROW(Graph(2, {{1}, {0}}, true), InvalidArgument);
}

TEST(KnnCovarianceGraph, MatchesBruteForceCovariance) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> normal;
  const Matrix samples = Matrix::NullaryExpr(40, 5, [&] { return normal(rng); });
  const Matrix cov = covariance(samples);
  for (int a = 0; a < 5; ++a) {
    for (int b = 0; b < 5; ++b) {
      double ma = 0;
      double mb = 0;
      for (int r = 0; r < 40; ++r) {
        ma += samples(r, a) / 40.0;
        mb += samples(r, b) / 40.0;
      }
      double acc = 0;
      for (int r = 0; r < 40; ++r) acc += (samples(r, a) - ma) * (samples(r, b) - mb);
      EXPECT_NEAR(cov(a, b), acc / 39.0, 1e-12);
    }
  }
}

TEST(KnnCovarianceGraph, PerfectlyCorrelatedPairLinks) {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> normal;
  Matrix samples(200, 3);
  for (int r = 0; r < 200; ++r) {
    const double z = normal(rng);
    samples(r, 0) = z;
    samples(r, 1) = normal(rng);
    samples(r, 2) = 2.0 * z;
  }
  const Graph g = build_knn_covariance_graph(samples, 2);
  EXPECT_TRUE(g.contains(0, 2));
  EXPECT_TRUE(g.contains(2, 0));
  for (Vertex i = 0; i < 3; ++i) EXPECT_TRUE(g.contains(i, i));
  EXPECT_TRUE(g.has_self_loops());
  EXPECT_TRUE(g.is_symmetric());
}

TEST(KnnCovarianceGraph, DegenerateSamplesStillCarrySelfLoops) {
  Matrix samples(10, 6);
  for (int r = 0; r < 10; ++r) samples.row(r).setConstant(0.1 * r);
  const Graph g = build_knn_covariance_graph(samples, 3);
  for (Vertex i = 0; i < 6; ++i) EXPECT_TRUE(g.contains(i, i));
  EXPECT_TRUE(g.is_symmetric());
}

TEST(KnnCovarianceGraph, KEqualsNIsComplete) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u;
  const Matrix samples = Matrix::NullaryExpr(8, 5, [&] { return u(rng); });
  const Graph g = build_knn_covariance_graph(samples, 5);
  EXPECT_EQ(adjacency(g), Matrix::Ones(5, 5));
}

TEST(KnnCovarianceGraph, Errors) {
  EXPECT_THROW(build_knn_covariance_graph(Matrix::Zero(1, 4), 2), InsufficientData);
  EXPECT_THROW(build_knn_covariance_graph(Matrix::Zero(5, 4), 5), InvalidArgument);
}

TEST(Laplacian, Definitions) {
  const Matrix l3 = laplacian(build_ring_graph(3, false));
  EXPECT_EQ(l3, (Matrix{{2, -1, -1}, {-1, 2, -1}, {-1, -1, 2}}));
  const Matrix l2 = laplacian(build_grid_graph(1, 2, false));
  EXPECT_EQ(l2, (Matrix{{1, -1}, {-1, 1}}));
  // Self-loops do not change the Laplacian.
  EXPECT_EQ(laplacian(build_ring_graph(5, true)), laplacian(build_ring_graph(5, false)));
}

TEST(Laplacian, SymmetricPositiveSemidefiniteWithZeroRowSums) {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> normal;
  for (const Graph& g : {build_grid_graph(5, 7, true), build_ring_graph(9, false),
                         build_grid_graph(1, 6, false)}) {
    const Matrix l = laplacian(g);
    EXPECT_EQ(l, l.transpose());
    EXPECT_LT((l * Vector::Ones(l.rows())).cwiseAbs().maxCoeff(), 1e-12);
    for (int trial = 0; trial < 50; ++trial) {
      const Vector x = Vector::NullaryExpr(l.rows(), [&] { return normal(rng); });
      EXPECT_GE(x.dot(l * x), -1e-9);
    }
  }
}

TEST(EdgeList, RoundTripAndSymmetrization) {
  const Graph grid = build_grid_graph(3, 4, true);
  std::stringstream buf;
  write_edge_list(buf, grid);
  EXPECT_EQ(read_edge_list(buf), grid);

  std::istringstream directed("0 1\n1 2\n\n# comment\n");
  const Graph g = read_edge_list(directed);
  EXPECT_EQ(g.size(), 3u);
  EXPECT_TRUE(g.contains(1, 0));
  EXPECT_TRUE(g.contains(2, 1));
  EXPECT_FALSE(g.has_self_loops());
}

TEST(EdgeList, MalformedLinesReportLineNumber) {
  std::istringstream bad("0 1\n2 x\n");
  try {
    read_edge_list(bad);
    FAIL() << "expected IngestionError";
  } catch (const IngestionError& e) {
    EXPECT_EQ(e.offset(), 2u);
  }
}

TEST(Graph, HashDistinguishesStructure) {
  EXPECT_EQ(build_ring_graph(6, true).hash(), build_ring_graph(6, true).hash());
  EXPECT_NE(build_ring_graph(6, true).hash(), build_ring_graph(6, false).hash());
  EXPECT_NE(build_grid_graph(2, 3, true).hash(), build_grid_graph(3, 2, true).hash());
}

}  // namespace
}  // namespace graphtrans
