#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "graphtrans/types.hpp"

namespace graphtrans {

/// Unweighted graph stored as sorted, duplicate-free neighbor lists (CSR).
///
/// The neighbor list of vertex i is the support of row i of every learned
/// transform, so the ordering here also fixes the layout of edge logits.
class Graph {
 public:
  Graph() = default;

  /// Takes ownership of per-vertex neighbor lists. Lists are sorted and
  /// deduplicated; out-of-range indices throw InvalidArgument. When
  /// `self_loops` is set every vertex must list itself.
  Graph(std::size_t n, std::vector<std::vector<Vertex>> neighbors, bool self_loops);

  /// Builds a graph from an edge list. Edges are symmetrized by union.
  static Graph from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges,
                          bool add_self_loops);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  bool has_self_loops() const { return self_loops_; }

  std::span<const Vertex> neighbors(Vertex i) const {
    return {cols_.data() + offsets_[i], offsets_[i + 1] - offsets_[i]};
  }
  /// Position of row i's first entry in the flat edge arrays.
  std::size_t row_offset(Vertex i) const { return offsets_[i]; }
  /// Number of stored (directed) entries, self-loops included.
  std::size_t num_entries() const { return cols_.size(); }
  const std::vector<Vertex>& flat_neighbors() const { return cols_; }

  bool contains(Vertex i, Vertex j) const;
  /// Degree ignoring any self-loop.
  std::size_t degree(Vertex i) const;
  /// Undirected edge count, self-loops excluded.
  std::size_t num_edges() const;
  bool is_symmetric() const;

  /// Stable 64-bit FNV-1a digest of the structure; used to tie checkpoints
  /// to the graph they were trained on.
  std::uint64_t hash() const;

  friend bool operator==(const Graph& a, const Graph& b) {
    return a.self_loops_ == b.self_loops_ && a.offsets_ == b.offsets_ && a.cols_ == b.cols_;
  }

 private:
  std::vector<std::size_t> offsets_;
  std::vector<Vertex> cols_;
  bool self_loops_ = false;
};

Graph build_ring_graph(std::size_t n, bool with_self_loops);

/// Pixel (r, c) is vertex r * width + c; 4-neighborhood, no wrap-around.
Graph build_grid_graph(std::size_t height, std::size_t width, bool with_self_loops);

/// k-nearest-neighbor graph on the empirical covariance of `samples`
/// (M samples x N vertices). Each vertex keeps itself plus the k - 1 other
/// vertices of largest |covariance|; the selection is then symmetrized.
Graph build_knn_covariance_graph(const Matrix& samples, std::size_t k);

/// Empirical covariance (unbiased, 1 / (M - 1)) of the columns of `samples`.
Matrix covariance(const Matrix& samples);

Matrix adjacency(const Graph& g);

/// Combinatorial Laplacian D - A, ignoring self-loops.
Matrix laplacian(const Graph& g);

/// "i j" per line, each undirected edge written once with i <= j, self-loops
/// as "i i". A leading "# n <count>" line records isolated trailing vertices.
void write_edge_list(std::ostream& out, const Graph& g);

/// Reads the format written by write_edge_list. Blank lines and other '#'
/// lines are ignored. The result is symmetric; self_loops is set when every
/// vertex carries one.
Graph read_edge_list(std::istream& in);

}  // namespace graphtrans
