#pragma once
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rnsim {

using Vertex = std::uint32_t;
using Edge = std::pair<Vertex, Vertex>;

struct GraphError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable undirected simple graph in CSR form with sorted neighbor lists.
class Graph {
 public:
  Graph() = default;
  explicit Graph(std::size_t n);
  // Throws GraphError on self-loops, duplicates or out-of-range endpoints.
  static Graph from_edges(std::size_t n, const std::vector<Edge>& edges);

  std::size_t size() const { return offsets_.empty() ? 0 : offsets_.size() - 1; }
  std::size_t edge_count() const { return adj_.size() / 2; }
  std::span<const Vertex> neighbors(Vertex v) const {
    return {adj_.data() + offsets_[v], adj_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const { return offsets_[v + 1] - offsets_[v]; }
  std::size_t max_degree() const;
  bool has_edge(Vertex u, Vertex v) const;
  // Edges as (u, v) with u < v in lexicographic order.
  std::vector<Edge> edges() const;
  bool connected() const;

  friend bool operator==(const Graph&, const Graph&) = default;

 private:
  std::vector<std::uint32_t> offsets_;
  std::vector<Vertex> adj_;
};

inline constexpr std::uint32_t kUnreached = 0xffffffffu;

}  // namespace rnsim
