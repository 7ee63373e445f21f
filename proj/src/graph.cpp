#include "graphtrans/graph.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "graphtrans/error.hpp"

namespace graphtrans {

Graph::Graph(std::size_t n, std::vector<std::vector<Vertex>> neighbors, bool self_loops)
    : self_loops_(self_loops) {
  if (neighbors.size() != n) {
    throw InvalidArgument("Graph: expected " + std::to_string(n) + " neighbor lists, got " +
                          std::to_string(neighbors.size()));
  }
  offsets_.assign(n + 1, 0);
  for (std::size_t i = 0; i < n; ++i) {
    auto& list = neighbors[i];
    std::sort(list.begin(), list.end());
    list.erase(std::unique(list.begin(), list.end()), list.end());
    if (!list.empty() && list.back() >= n) {
      throw InvalidArgument("Graph: neighbor index " + std::to_string(list.back()) +
                            " out of range for vertex " + std::to_string(i));
    }
    if (self_loops && !std::binary_search(list.begin(), list.end(), i)) {
      throw InvalidArgument("Graph: self_loops set but vertex " + std::to_string(i) +
                            " has no self-loop");
    }
    offsets_[i + 1] = offsets_[i] + list.size();
  }
  cols_.reserve(offsets_[n]);
  for (const auto& list : neighbors) cols_.insert(cols_.end(), list.begin(), list.end());
}

Graph Graph::from_edges(std::size_t n, std::span<const std::pair<Vertex, Vertex>> edges,
                        bool add_self_loops) {
  std::vector<std::vector<Vertex>> lists(n);
  for (auto [a, b] : edges) {
    if (a >= n || b >= n) {
      throw InvalidArgument("Graph::from_edges: edge (" + std::to_string(a) + ", " +
                            std::to_string(b) + ") out of range");
    }
    lists[a].push_back(b);
    lists[b].push_back(a);
  }
  if (add_self_loops) {
    for (std::size_t i = 0; i < n; ++i) lists[i].push_back(i);
  }
  return Graph(n, std::move(lists), add_self_loops);
}

bool Graph::contains(Vertex i, Vertex j) const {
  auto row = neighbors(i);
  return std::binary_search(row.begin(), row.end(), j);
}

std::size_t Graph::degree(Vertex i) const {
  auto row = neighbors(i);
  return row.size() - (contains(i, i) ? 1 : 0);
}

std::size_t Graph::num_edges() const {
  std::size_t total = 0;
  for (Vertex i = 0; i < size(); ++i) total += degree(i);
  return total / 2;
}

bool Graph::is_symmetric() const {
  for (Vertex i = 0; i < size(); ++i) {
    for (Vertex j : neighbors(i)) {
      if (!contains(j, i)) return false;
    }
  }
  return true;
}

std::uint64_t Graph::hash() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](std::uint64_t v) {
    for (int byte = 0; byte < 8; ++byte) {
      h ^= (v >> (8 * byte)) & 0xffU;
      h *= 1099511628211ULL;
    }
  };
  mix(size());
  mix(self_loops_ ? 1 : 0);
  for (auto o : offsets_) mix(o);
  for (auto c : cols_) mix(c);
  return h;
}

Graph build_ring_graph(std::size_t n, bool with_self_loops) {
  if (n < 3) throw InvalidArgument("build_ring_graph: n must be >= 3, got " + std::to_string(n));
  std::vector<std::vector<Vertex>> lists(n);
  for (std::size_t i = 0; i < n; ++i) {
    lists[i] = {(i + n - 1) % n, (i + 1) % n};
    if (with_self_loops) lists[i].push_back(i);
  }
  return Graph(n, std::move(lists), with_self_loops);
}

Graph build_grid_graph(std::size_t height, std::size_t width, bool with_self_loops) {
  if (height == 0 || width == 0) {
    throw InvalidArgument("build_grid_graph: dimensions must be positive");
  }
  const std::size_t n = height * width;
  std::vector<std::vector<Vertex>> lists(n);
  for (std::size_t r = 0; r < height; ++r) {
    for (std::size_t c = 0; c < width; ++c) {
      auto& list = lists[r * width + c];
      if (r > 0) list.push_back((r - 1) * width + c);
      if (c > 0) list.push_back(r * width + c - 1);
      if (with_self_loops) list.push_back(r * width + c);
      if (c + 1 < width) list.push_back(r * width + c + 1);
      if (r + 1 < height) list.push_back((r + 1) * width + c);
    }
  }
  return Graph(n, std::move(lists), with_self_loops);
}

Matrix covariance(const Matrix& samples) {
  const auto m = samples.rows();
  if (m < 2) {
    throw InsufficientData("covariance: need at least 2 samples, got " + std::to_string(m));
  }
  Matrix centered = samples.rowwise() - samples.colwise().mean();
  Matrix cov = centered.transpose() * centered;
  cov /= static_cast<double>(m - 1);
  return cov;
}

Graph build_knn_covariance_graph(const Matrix& samples, std::size_t k) {
  const auto n = static_cast<std::size_t>(samples.cols());
  if (samples.rows() < 2) {
    throw InsufficientData("build_knn_covariance_graph: need at least 2 samples");
  }
  if (k == 0 || k > n) {
    throw InvalidArgument("build_knn_covariance_graph: k must be in [1, " + std::to_string(n) +
                          "], got " + std::to_string(k));
  }
  const Matrix cov = covariance(samples);
  std::vector<std::vector<Vertex>> lists(n);
  std::vector<Vertex> order(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::iota(order.begin(), order.end(), Vertex{0});
    // The self-loop is always kept; the remaining k - 1 slots go to the
    // largest |cov| entries, ties to the smaller index.
    std::swap(order[0], order[i]);
    auto by_magnitude = [&](Vertex a, Vertex b) {
      const double ma = std::abs(cov(i, a));
      const double mb = std::abs(cov(i, b));
      return ma != mb ? ma > mb : a < b;
    };
    std::sort(order.begin() + 1, order.end(), by_magnitude);
    for (std::size_t r = 0; r < k; ++r) {
      lists[i].push_back(order[r]);
      lists[order[r]].push_back(i);
    }
  }
  return Graph(n, std::move(lists), true);
}

Matrix adjacency(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix a = Matrix::Zero(n, n);
  for (Vertex i = 0; i < g.size(); ++i) {
    for (Vertex j : g.neighbors(i)) a(i, j) = 1.0;
  }
  return a;
}

Matrix laplacian(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.size());
  Matrix l = Matrix::Zero(n, n);
  for (Vertex i = 0; i < g.size(); ++i) {
    for (Vertex j : g.neighbors(i)) {
      if (j == i) continue;
      l(i, j) = -1.0;
      l(i, i) += 1.0;
    }
  }
  return l;
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << "# n " << g.size() << '\n';
  for (Vertex i = 0; i < g.size(); ++i) {
    for (Vertex j : g.neighbors(i)) {
      if (j >= i) out << i << ' ' << j << '\n';
    }
  }
}

Graph read_edge_list(std::istream& in) {
  std::vector<std::pair<Vertex, Vertex>> edges;
  std::size_t n = 0;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string first;
    if (!(fields >> first)) continue;
    if (first[0] == '#') {
      std::string key;
      std::size_t count = 0;
      if (first == "#" && (fields >> key) && key == "n" && (fields >> count)) n = std::max(n, count);
      continue;
    }
    long long a = -1;
    long long b = -1;
    std::istringstream pair(line);
    if (!(pair >> a >> b) || a < 0 || b < 0) {
      throw IngestionError("edge list: expected two non-negative indices", line_no);
    }
    std::string extra;
    if (pair >> extra) throw IngestionError("edge list: trailing data on line", line_no);
    edges.emplace_back(static_cast<Vertex>(a), static_cast<Vertex>(b));
    n = std::max({n, static_cast<std::size_t>(a) + 1, static_cast<std::size_t>(b) + 1});
  }
  std::vector<std::vector<Vertex>> lists(n);
  for (auto [a, b] : edges) {
    lists[a].push_back(b);
    lists[b].push_back(a);
  }
  bool all_loops = n > 0;
  for (Vertex i = 0; i < n && all_loops; ++i) {
    all_loops = std::find(lists[i].begin(), lists[i].end(), i) != lists[i].end();
  }
  return Graph(n, std::move(lists), all_loops);
}

}  // namespace graphtrans
