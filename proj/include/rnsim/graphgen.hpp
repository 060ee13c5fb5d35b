#pragma once
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "rnsim/graph.hpp"
#include "rnsim/rng.hpp"

namespace rnsim {

Graph make_path(std::size_t n);
Graph make_cycle(std::size_t n);
Graph make_grid(std::size_t rows, std::size_t cols);
Graph make_complete(std::size_t n);
// K_n without the edge {0, 1}.
Graph make_complete_minus_edge(std::size_t n);
// G(n, p) resampled until connected; throws GraphError after max_retries.
Graph make_gnp_connected(std::size_t n, double p, Rng& rng, int max_retries = 1000);
// Points uniform in the unit square, edges between points within `radius`.
Graph make_unit_disc(std::size_t n, double radius, Rng& rng, int max_retries = 1000);

struct DisjointnessInstance {
  unsigned k = 0;  // universe size, a power of two
  std::vector<unsigned> set_a, set_b;
  unsigned bits() const;
  bool disjoint() const;
};

// Vertex order: one vertex per element of set_a, then set_b, then the
// ones-gadget (bits()), the zeros-gadget (bits()), then the two hubs.
Graph gen_disjointness(const DisjointnessInstance& inst);
// Non-empty random sets; intersecting instances share at least one element.
DisjointnessInstance random_disjointness(unsigned k, bool disjoint, Rng& rng);

// Graph from a spec string such as "path:256", "grid:24x24", "gnp:512:8"
// (average degree), "unit-disc:200:0.15", "disjointness:16:1" (1 = disjoint)
// or a path to an edge-list file.
Graph make_graph(const std::string& spec, std::uint64_t seed);

// Oracles.
std::vector<std::uint32_t> oracle_bfs(const Graph& g, std::span<const Vertex> sources);
// BFS in the subgraph induced by `active` (sources outside it are ignored).
std::vector<std::uint32_t> oracle_bfs_within(const Graph& g, std::span<const Vertex> sources,
                                             const std::vector<char>& active);
// Dense boolean matrix-power reachability; intended for small n.
std::vector<std::uint32_t> reachability_distances(const Graph& g, std::span<const Vertex> sources);
std::uint32_t eccentricity(const Graph& g, Vertex v);
std::uint32_t oracle_diameter(const Graph& g);         // parallel over sources
std::uint32_t oracle_diameter_serial(const Graph& g);  // reference
std::size_t degeneracy(const Graph& g);

// Edge-list files: first line n, then "u v" per edge with u < v.
Graph read_edge_list(std::istream& in);
Graph read_edge_list_file(const std::string& path);
void write_edge_list(std::ostream& out, const Graph& g);

}  // namespace rnsim
