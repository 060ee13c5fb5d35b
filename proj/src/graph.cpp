#include "rnsim/graph.hpp"

#include <algorithm>

namespace rnsim {

Graph::Graph(std::size_t n) : offsets_(n + 1, 0) {}

Graph Graph::from_edges(std::size_t n, const std::vector<Edge>& edges) {
  std::vector<std::uint32_t> deg(n, 0);
  for (auto [u, v] : edges) {
    if (u >= n || v >= n)
      throw GraphError("edge (" + std::to_string(u) + "," + std::to_string(v) + ") out of range");
    if (u == v) throw GraphError("self-loop at vertex " + std::to_string(u));
    ++deg[u];
    ++deg[v];
  }
  Graph g(n);
  for (std::size_t v = 0; v < n; ++v) g.offsets_[v + 1] = g.offsets_[v] + deg[v];
  g.adj_.resize(g.offsets_[n]);
  std::vector<std::uint32_t> fill(g.offsets_.begin(), g.offsets_.end() - 1);
  for (auto [u, v] : edges) {
    g.adj_[fill[u]++] = v;
    g.adj_[fill[v]++] = u;
  }
  for (std::size_t v = 0; v < n; ++v) {
    auto b = g.adj_.begin() + g.offsets_[v], e = g.adj_.begin() + g.offsets_[v + 1];
    std::sort(b, e);
    if (std::adjacent_find(b, e) != e)
      throw GraphError("duplicate edge at vertex " + std::to_string(v));
  }
  return g;
}

std::size_t Graph::max_degree() const {
  std::size_t best = 0;
  for (Vertex v = 0; v < size(); ++v) best = std::max(best, degree(v));
  return best;
}

bool Graph::has_edge(Vertex u, Vertex v) const {
  auto nb = neighbors(u);
  return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<Edge> Graph::edges() const {
  std::vector<Edge> out;
  out.reserve(edge_count());
  for (Vertex u = 0; u < size(); ++u)
    for (Vertex v : neighbors(u))
      if (u < v) out.emplace_back(u, v);
  return out;
}

bool Graph::connected() const {
  const std::size_t n = size();
  if (n <= 1) return true;
  std::vector<char> seen(n, 0);
  std::vector<Vertex> stack{0};
  seen[0] = 1;
  std::size_t count = 1;
  while (!stack.empty()) {
    Vertex u = stack.back();
    stack.pop_back();
    for (Vertex v : neighbors(u))
      if (!seen[v]) {
        seen[v] = 1;
        ++count;
        stack.push_back(v);
      }
  }
  return count == n;
}

}  // namespace rnsim
