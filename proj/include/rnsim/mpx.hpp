#pragma once
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "rnsim/lbcast.hpp"

namespace rnsim {

struct ClusterParams {
  double beta = 0.125;             // 1/beta must be an integer
  std::size_t n = 2;               // network size used by all formulas
  std::uint32_t contention = 0;    // 0 selects the default
  std::uint32_t set_size = 0;      // 0 selects the default
  unsigned seed_bits = 24;         // width of the shared-set seed in join messages

  std::uint32_t inverse_beta() const;
  std::uint32_t radius_bound() const;      // ceil(4 ln n / beta), at least 1
  std::uint32_t contention_bound() const;  // ceil(4 ln n / ln(1/(2 beta))) + 1
  std::uint32_t shared_set_size() const;   // ceil(12 C ln n)
};

// Inverse-CDF exponential draw with rate beta.
double sample_exponential(double beta, Rng& rng);
// Sorted indices in [0, set_size), each kept independently with probability 1/contention.
std::vector<std::uint32_t> gen_shared_set(std::uint32_t contention, std::uint32_t set_size, Rng& rng);

struct Clustering {
  double beta = 0;
  // Per vertex of the clustered graph.
  std::vector<double> delta;
  std::vector<std::uint32_t> start;
  std::vector<Vertex> center_of;  // ID of the cluster centre
  std::vector<std::uint32_t> cluster_of;  // compact cluster index
  std::vector<std::uint32_t> layer;
  std::vector<std::uint32_t> joined;  // round in which the vertex became clustered
  // Per cluster, indexed by compact index (ordered by centre ID).
  std::vector<Vertex> centers;
  std::vector<std::vector<Vertex>> members;  // sorted by (layer, ID)
  std::vector<std::vector<std::uint32_t>> shared_set;
  std::uint32_t set_size = 0;

  std::size_t cluster_count() const { return centers.size(); }
  std::uint32_t max_layer() const;
  std::uint32_t radius(std::uint32_t cluster) const;
};

struct ClusteringError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Runs the exponential-shift clustering as radius_bound() broadcast rounds on
// `ch`. `level` separates the random streams of nested virtual graphs.
Clustering cluster(BroadcastChannel& ch, const ClusterParams& params, std::uint64_t seed, std::uint32_t level = 0);

// Round in which each vertex joins when every broadcast delivers:
// min(start_v, min over u != v of start_u + dist(u, v) - 1).
std::vector<std::uint32_t> join_round_oracle(const Graph& g, const std::vector<std::uint32_t>& start);

struct ClusterGraph {
  Graph graph;  // vertices are compact cluster indices
  std::vector<Vertex> center;
  std::vector<std::vector<Vertex>> members;
};

ClusterGraph build_cluster_graph(const Graph& g, const Clustering& c);

struct ClusteringCheck {
  bool partition_ok = true;
  bool layers_ok = true;
  std::uint32_t max_layer = 0;
  std::size_t cut_edges = 0;
  double cut_fraction = 0;
  std::size_t isolation_failures = 0;  // vertices without a private shared index
};

ClusteringCheck check_clustering(const Graph& g, const Clustering& c);

// CSV: vertex,cluster_id,layer,start
void write_clustering_csv(std::ostream& out, const Clustering& c);

}  // namespace rnsim
