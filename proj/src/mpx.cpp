#include "rnsim/mpx.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

namespace rnsim {

std::uint32_t ClusterParams::inverse_beta() const {
  double inv = 1.0 / beta;
  auto r = static_cast<std::uint32_t>(std::llround(inv));
  if (!(beta > 0.0 && beta <= 1.0) || std::abs(inv - r) > 1e-9)
    throw std::invalid_argument("1/beta must be a positive integer");
  return r;
}

std::uint32_t ClusterParams::radius_bound() const {
  inverse_beta();
  double x = 4.0 * std::log(static_cast<double>(n)) / beta;
  return std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::ceil(x - 1e-9)));
}

std::uint32_t ClusterParams::contention_bound() const {
  if (contention) return contention;
  double denom = std::max(std::log(2.0), std::log(1.0 / (2.0 * beta)));
  return static_cast<std::uint32_t>(std::ceil(4.0 * std::log(static_cast<double>(n)) / denom - 1e-9)) + 1;
}

std::uint32_t ClusterParams::shared_set_size() const {
  if (set_size) return set_size;
  double x = 12.0 * contention_bound() * std::log(static_cast<double>(std::max<std::size_t>(n, 2)));
  return static_cast<std::uint32_t>(std::ceil(x - 1e-9));
}

double sample_exponential(double beta, Rng& rng) { return -std::log(unit_open_closed(rng())) / beta; }

std::vector<std::uint32_t> gen_shared_set(std::uint32_t contention, std::uint32_t set_size, Rng& rng) {
  std::vector<std::uint32_t> s;
  std::bernoulli_distribution keep(1.0 / std::max<std::uint32_t>(contention, 1));
  for (std::uint32_t j = 0; j < set_size; ++j)
    if (keep(rng)) s.push_back(j);
  return s;
}

std::uint32_t Clustering::max_layer() const {
  return layer.empty() ? 0 : *std::max_element(layer.begin(), layer.end());
}

std::uint32_t Clustering::radius(std::uint32_t c) const { return members[c].empty() ? 0 : layer[members[c].back()]; }

Clustering cluster(BroadcastChannel& ch, const ClusterParams& params, std::uint64_t seed, std::uint32_t level) {
  const std::size_t n = ch.size();
  const std::uint32_t rounds = params.radius_bound();
  const double horizon = 4.0 * std::log(static_cast<double>(params.n)) / params.beta;
  constexpr std::uint32_t kNone = 0xffffffffu;

  Clustering c;
  c.beta = params.beta;
  c.delta.resize(n);
  c.start.resize(n);
  c.center_of.assign(n, kNone);
  c.layer.assign(n, 0);
  c.joined.assign(n, 0);
  std::vector<std::uint64_t> set_seed(n, 0);
  const std::uint64_t seed_mask = params.seed_bits >= 64 ? ~0ULL : ((1ULL << params.seed_bits) - 1);
  for (Vertex v = 0; v < n; ++v) {
    Rng rng = device_stream(seed, Purpose::Shift, v, level);
    c.delta[v] = sample_exponential(params.beta, rng);
    double s = std::ceil(horizon - c.delta[v] - 1e-12);
    c.start[v] = s < 1.0 ? 1u : static_cast<std::uint32_t>(s);
  }

  const unsigned id_bits = bits_for(n), layer_bits = bits_for(rounds + 1);
  auto message = [&](Vertex v) {
    return Payload{}.push(c.center_of[v], id_bits).push(c.layer[v], layer_bits).push(set_seed[v], params.seed_bits);
  };

  std::vector<Vertex> clustered, waiting(n);
  std::iota(waiting.begin(), waiting.end(), Vertex{0});
  for (std::uint32_t round = 1; round <= rounds; ++round) {
    for (Vertex v : waiting)
      if (c.start[v] == round) {
        c.center_of[v] = v;
        c.joined[v] = round;
        set_seed[v] = device_stream(seed, Purpose::SharedSet, v, level)() & seed_mask;
        clustered.push_back(v);
      }
    std::erase_if(waiting, [&](Vertex v) { return c.center_of[v] != kNone; });
    if (waiting.empty() && ch.fidelity() == Fidelity::Fast) {
      ch.skip_calls(clustered, {}, rounds - round + 1);
      break;
    }
    Delivery got = ch.broadcast(clustered, message, waiting);
    for (std::size_t k = 0; k < waiting.size(); ++k)
      if (got[k]) {
        Vertex v = waiting[k];
        c.center_of[v] = static_cast<Vertex>((*got[k])[0]);
        c.layer[v] = static_cast<std::uint32_t>((*got[k])[1]) + 1;
        set_seed[v] = (*got[k])[2];
        c.joined[v] = round;
        clustered.push_back(v);
      }
    std::erase_if(waiting, [&](Vertex v) { return c.center_of[v] != kNone; });
  }
  if (!waiting.empty())
    throw ClusteringError(std::to_string(waiting.size()) + " vertices left unclustered");

  std::vector<std::uint32_t> index(n, kNone);
  for (Vertex v = 0; v < n; ++v)
    if (c.center_of[v] == v) {
      index[v] = static_cast<std::uint32_t>(c.centers.size());
      c.centers.push_back(v);
    }
  c.cluster_of.resize(n);
  c.members.resize(c.centers.size());
  for (Vertex v = 0; v < n; ++v) {
    c.cluster_of[v] = index[c.center_of[v]];
    c.members[c.cluster_of[v]].push_back(v);
  }
  for (auto& m : c.members)
    std::stable_sort(m.begin(), m.end(), [&](Vertex a, Vertex b) { return c.layer[a] < c.layer[b]; });
  c.set_size = params.shared_set_size();
  const std::uint32_t contention = params.contention_bound();
  for (Vertex center : c.centers) {
    Rng expand(set_seed[center]);
    c.shared_set.push_back(gen_shared_set(contention, c.set_size, expand));
  }
  return c;
}

std::vector<std::uint32_t> join_round_oracle(const Graph& g, const std::vector<std::uint32_t>& start) {
  const std::size_t n = g.size();
  // h(x) = min over u of start_u - 1 + dist(u, x), by bucketed relaxation.
  std::vector<std::uint32_t> h(n);
  std::uint32_t top = 0;
  for (Vertex v = 0; v < n; ++v) top = std::max(top, h[v] = start[v] - 1);
  std::vector<std::vector<Vertex>> bucket(top + n + 2);
  for (Vertex v = 0; v < n; ++v) bucket[h[v]].push_back(v);
  for (std::size_t b = 0; b < bucket.size(); ++b)
    for (std::size_t k = 0; k < bucket[b].size(); ++k) {
      Vertex x = bucket[b][k];
      if (h[x] != b) continue;
      for (Vertex y : g.neighbors(x))
        if (h[y] > b + 1) {
          h[y] = static_cast<std::uint32_t>(b + 1);
          bucket[b + 1].push_back(y);
        }
    }
  std::vector<std::uint32_t> joined(n);
  for (Vertex v = 0; v < n; ++v) {
    joined[v] = start[v];
    for (Vertex x : g.neighbors(v)) joined[v] = std::min(joined[v], h[x] + 1);
  }
  return joined;
}

ClusterGraph build_cluster_graph(const Graph& g, const Clustering& c) {
  std::vector<Edge> e;
  for (auto [u, v] : g.edges()) {
    auto a = c.cluster_of[u], b = c.cluster_of[v];
    if (a != b) e.emplace_back(std::min(a, b), std::max(a, b));
  }
  std::sort(e.begin(), e.end());
  e.erase(std::unique(e.begin(), e.end()), e.end());
  return {Graph::from_edges(c.cluster_count(), e), c.centers, c.members};
}

ClusteringCheck check_clustering(const Graph& g, const Clustering& c) {
  ClusteringCheck r;
  const std::size_t n = g.size();
  for (Vertex v = 0; v < n; ++v) {
    Vertex ctr = c.center_of[v];
    if (ctr >= n || c.center_of[ctr] != ctr || c.layer[ctr] != 0 || c.centers[c.cluster_of[v]] != ctr)
      r.partition_ok = false;
    if (c.layer[v] == 0) {
      if (ctr != v) r.layers_ok = false;
      continue;
    }
    bool parent = false;
    for (Vertex u : g.neighbors(v))
      parent |= c.cluster_of[u] == c.cluster_of[v] && c.layer[u] + 1 == c.layer[v];
    r.layers_ok &= parent;
  }
  r.max_layer = c.max_layer();
  for (auto [u, v] : g.edges()) r.cut_edges += c.cluster_of[u] != c.cluster_of[v];
  r.cut_fraction = g.edge_count() ? double(r.cut_edges) / double(g.edge_count()) : 0.0;

  const std::size_t words = (c.set_size + 63) / 64;
  std::vector<std::vector<std::uint64_t>> bitmap(c.cluster_count(), std::vector<std::uint64_t>(words, 0));
  for (std::size_t k = 0; k < c.cluster_count(); ++k)
    for (auto j : c.shared_set[k]) bitmap[k][j / 64] |= 1ULL << (j % 64);
  std::vector<std::uint64_t> free_bits(words);
  for (Vertex v = 0; v < n; ++v) {
    free_bits = bitmap[c.cluster_of[v]];
    for (Vertex u : g.neighbors(v))
      if (c.cluster_of[u] != c.cluster_of[v])
        for (std::size_t w = 0; w < words; ++w) free_bits[w] &= ~bitmap[c.cluster_of[u]][w];
    bool any = false;
    for (auto w : free_bits) any |= w != 0;
    r.isolation_failures += !any;
  }
  return r;
}

void write_clustering_csv(std::ostream& out, const Clustering& c) {
  out << "vertex,cluster_id,layer,start\n";
  for (Vertex v = 0; v < c.center_of.size(); ++v)
    out << v << ',' << c.center_of[v] << ',' << c.layer[v] << ',' << c.start[v] << '\n';
}

}  // namespace rnsim
