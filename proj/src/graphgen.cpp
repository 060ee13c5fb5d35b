#include "rnsim/graphgen.hpp"

#include <algorithm>
#include <bitset>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace rnsim {

Graph make_path(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  return Graph::from_edges(n, e);
}

Graph make_cycle(std::size_t n) {
  if (n < 3) throw GraphError("cycle needs n >= 3");
  std::vector<Edge> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(v - 1, v);
  e.emplace_back(0, static_cast<Vertex>(n - 1));
  return Graph::from_edges(n, e);
}

Graph make_grid(std::size_t rows, std::size_t cols) {
  std::vector<Edge> e;
  auto id = [cols](std::size_t r, std::size_t c) { return static_cast<Vertex>(r * cols + c); };
  for (std::size_t r = 0; r < rows; ++r)
    for (std::size_t c = 0; c < cols; ++c) {
      if (c + 1 < cols) e.emplace_back(id(r, c), id(r, c + 1));
      if (r + 1 < rows) e.emplace_back(id(r, c), id(r + 1, c));
    }
  return Graph::from_edges(rows * cols, e);
}

Graph make_complete(std::size_t n) {
  std::vector<Edge> e;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

Graph make_complete_minus_edge(std::size_t n) {
  if (n < 2) throw GraphError("complete-minus-edge needs n >= 2");
  std::vector<Edge> e;
  for (Vertex u = 0; u < n; ++u)
    for (Vertex v = u + 1; v < n; ++v)
      if (!(u == 0 && v == 1)) e.emplace_back(u, v);
  return Graph::from_edges(n, e);
}

Graph make_gnp_connected(std::size_t n, double p, Rng& rng, int max_retries) {
  if (!(p > 0.0 && p <= 1.0)) throw GraphError("gnp needs p in (0, 1]");
  std::bernoulli_distribution coin(p);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (coin(rng)) e.emplace_back(u, v);
    Graph g = Graph::from_edges(n, e);
    if (g.connected()) return g;
  }
  throw GraphError("gnp: connectivity retries exhausted");
}

Graph make_unit_disc(std::size_t n, double radius, Rng& rng, int max_retries) {
  std::uniform_real_distribution<double> coord(0.0, 1.0);
  for (int attempt = 0; attempt < max_retries; ++attempt) {
    std::vector<double> x(n), y(n);
    for (std::size_t i = 0; i < n; ++i) {
      x[i] = coord(rng);
      y[i] = coord(rng);
    }
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (std::hypot(x[u] - x[v], y[u] - y[v]) <= radius) e.emplace_back(u, v);
    Graph g = Graph::from_edges(n, e);
    if (g.connected()) return g;
  }
  throw GraphError("unit-disc: connectivity retries exhausted");
}

unsigned DisjointnessInstance::bits() const {
  unsigned b = 0;
  while ((1u << b) < k) ++b;
  return b;
}

bool DisjointnessInstance::disjoint() const {
  for (unsigned a : set_a)
    if (std::find(set_b.begin(), set_b.end(), a) != set_b.end()) return false;
  return true;
}

Graph gen_disjointness(const DisjointnessInstance& inst) {
  if (inst.k == 0 || (inst.k & (inst.k - 1)) != 0) throw GraphError("disjointness: k must be a power of two");
  for (unsigned a : inst.set_a)
    if (a >= inst.k) throw GraphError("disjointness: element out of universe");
  for (unsigned b : inst.set_b)
    if (b >= inst.k) throw GraphError("disjointness: element out of universe");
  const unsigned bits = inst.bits();
  const Vertex na = static_cast<Vertex>(inst.set_a.size());
  const Vertex nb = static_cast<Vertex>(inst.set_b.size());
  const Vertex ones = na + nb, zeros = ones + bits, hub_a = zeros + bits, hub_b = hub_a + 1;
  std::vector<Edge> e;
  for (Vertex i = 0; i < na; ++i)
    for (unsigned j = 0; j < bits; ++j)
      e.emplace_back(i, ((inst.set_a[i] >> j) & 1u) ? ones + j : zeros + j);
  for (Vertex i = 0; i < nb; ++i)
    for (unsigned j = 0; j < bits; ++j)
      e.emplace_back(na + i, ((inst.set_b[i] >> j) & 1u) ? zeros + j : ones + j);
  for (Vertex i = 0; i < na; ++i) e.emplace_back(i, hub_a);
  for (Vertex i = 0; i < nb; ++i) e.emplace_back(na + i, hub_b);
  for (unsigned j = 0; j < 2 * bits; ++j) {
    e.emplace_back(ones + j, hub_a);
    e.emplace_back(ones + j, hub_b);
  }
  return Graph::from_edges(hub_b + 1, e);
}

DisjointnessInstance random_disjointness(unsigned k, bool disjoint, Rng& rng) {
  std::uniform_int_distribution<unsigned> elem(0, k - 1);
  std::bernoulli_distribution half(0.5);
  for (;;) {
    DisjointnessInstance inst{k, {}, {}};
    for (unsigned x = 0; x < k; ++x) {
      if (half(rng)) inst.set_a.push_back(x);
      if (half(rng)) inst.set_b.push_back(x);
    }
    if (disjoint) {
      std::erase_if(inst.set_b, [&](unsigned x) {
        return std::find(inst.set_a.begin(), inst.set_a.end(), x) != inst.set_a.end();
      });
    } else if (inst.disjoint()) {
      unsigned x = elem(rng);
      if (std::find(inst.set_a.begin(), inst.set_a.end(), x) == inst.set_a.end()) inst.set_a.push_back(x);
      inst.set_b.push_back(x);
      std::sort(inst.set_a.begin(), inst.set_a.end());
      std::sort(inst.set_b.begin(), inst.set_b.end());
    }
    if (!inst.set_a.empty() && !inst.set_b.empty() && inst.disjoint() == disjoint) return inst;
  }
}

namespace {

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, sep)) out.push_back(item);
  return out;
}

}  // namespace

Graph make_graph(const std::string& spec, std::uint64_t seed) {
  auto parts = split(spec, ':');
  const std::string& family = parts.empty() ? spec : parts[0];
  auto num = [&](std::size_t i) -> std::size_t {
    if (i >= parts.size()) throw GraphError("graph spec '" + spec + "' is missing a parameter");
    return std::stoul(parts[i]);
  };
  Rng rng = device_stream(seed, Purpose::Topology, 0);
  if (family == "path") return make_path(num(1));
  if (family == "cycle") return make_cycle(num(1));
  if (family == "complete") return make_complete(num(1));
  if (family == "complete-minus-edge") return make_complete_minus_edge(num(1));
  if (family == "grid") {
    if (parts.size() < 2) throw GraphError("grid spec needs RxC");
    auto rc = split(parts[1], 'x');
    if (rc.size() != 2) throw GraphError("grid spec needs RxC");
    return make_grid(std::stoul(rc[0]), std::stoul(rc[1]));
  }
  if (family == "gnp") {
    std::size_t n = num(1);
    double deg = parts.size() > 2 ? std::stod(parts[2]) : 8.0;
    return make_gnp_connected(n, std::min(1.0, deg / static_cast<double>(n - 1)), rng);
  }
  if (family == "unit-disc") {
    if (parts.size() < 3) throw GraphError("unit-disc spec needs n and radius");
    return make_unit_disc(num(1), std::stod(parts[2]), rng);
  }
  if (family == "disjointness") {
    bool disjoint = parts.size() > 2 ? std::stoul(parts[2]) != 0 : true;
    return gen_disjointness(random_disjointness(static_cast<unsigned>(num(1)), disjoint, rng));
  }
  return read_edge_list_file(spec);
}

std::vector<std::uint32_t> oracle_bfs(const Graph& g, std::span<const Vertex> sources) {
  return oracle_bfs_within(g, sources, std::vector<char>(g.size(), 1));
}

std::vector<std::uint32_t> oracle_bfs_within(const Graph& g, std::span<const Vertex> sources,
                                             const std::vector<char>& active) {
  std::vector<std::uint32_t> dist(g.size(), kUnreached);
  std::vector<Vertex> queue;
  for (Vertex s : sources)
    if (active[s] && dist[s] != 0) {
      dist[s] = 0;
      queue.push_back(s);
    }
  for (std::size_t head = 0; head < queue.size(); ++head) {
    Vertex u = queue[head];
    for (Vertex v : g.neighbors(u))
      if (active[v] && dist[v] == kUnreached) {
        dist[v] = dist[u] + 1;
        queue.push_back(v);
      }
  }
  return dist;
}

std::vector<std::uint32_t> reachability_distances(const Graph& g, std::span<const Vertex> sources) {
  constexpr std::size_t kMax = 64;
  const std::size_t n = g.size();
  if (n > kMax) throw GraphError("reachability oracle limited to 64 vertices");
  std::vector<std::bitset<kMax>> adj(n);
  for (auto [u, v] : g.edges()) {
    adj[u].set(v);
    adj[v].set(u);
  }
  std::bitset<kMax> reached;
  for (Vertex s : sources) reached.set(s);
  std::vector<std::uint32_t> dist(n, kUnreached);
  for (std::uint32_t step = 0; step <= n; ++step) {
    for (std::size_t v = 0; v < n; ++v)
      if (reached.test(v) && dist[v] == kUnreached) dist[v] = step;
    std::bitset<kMax> next = reached;
    for (std::size_t v = 0; v < n; ++v)
      if (reached.test(v)) next |= adj[v];
    if (next == reached) break;
    reached = next;
  }
  return dist;
}

std::uint32_t eccentricity(const Graph& g, Vertex v) {
  Vertex src[] = {v};
  auto d = oracle_bfs(g, src);
  std::uint32_t ecc = 0;
  for (auto x : d) {
    if (x == kUnreached) throw GraphError("eccentricity of a disconnected graph");
    ecc = std::max(ecc, x);
  }
  return ecc;
}

std::uint32_t oracle_diameter_serial(const Graph& g) {
  if (!g.connected()) throw GraphError("diameter of a disconnected graph");
  std::uint32_t diam = 0;
  for (Vertex v = 0; v < g.size(); ++v) diam = std::max(diam, eccentricity(g, v));
  return diam;
}

std::uint32_t oracle_diameter(const Graph& g) {
  if (!g.connected()) throw GraphError("diameter of a disconnected graph");
  std::uint32_t diam = 0;
  const long n = static_cast<long>(g.size());
#pragma omp parallel for reduction(max : diam) schedule(dynamic, 16)
  for (long v = 0; v < n; ++v) diam = std::max(diam, eccentricity(g, static_cast<Vertex>(v)));
  return diam;
}

std::size_t degeneracy(const Graph& g) {
  const std::size_t n = g.size();
  std::vector<std::size_t> deg(n);
  std::size_t maxd = 0;
  for (Vertex v = 0; v < n; ++v) maxd = std::max(maxd, deg[v] = g.degree(v));
  std::vector<std::vector<Vertex>> bucket(maxd + 1);
  for (Vertex v = 0; v < n; ++v) bucket[deg[v]].push_back(v);
  std::vector<char> removed(n, 0);
  std::size_t result = 0, d = 0;
  for (std::size_t done = 0; done < n;) {
    d = std::min(d, maxd);
    while (bucket[d].empty()) ++d;
    Vertex v = bucket[d].back();
    bucket[d].pop_back();
    if (removed[v] || deg[v] != d) continue;
    removed[v] = 1;
    ++done;
    result = std::max(result, d);
    for (Vertex u : g.neighbors(v))
      if (!removed[u]) {
        --deg[u];
        bucket[deg[u]].push_back(u);
      }
    if (d > 0) --d;
  }
  return result;
}

Graph read_edge_list(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto fail = [&](const std::string& what) {
    throw GraphError("edge list line " + std::to_string(line_no) + ": " + what);
  };
  std::size_t n = 0;
  bool have_n = false;
  std::vector<Edge> edges;
  std::vector<std::pair<Edge, std::size_t>> seen;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream ls(line);
    if (!have_n) {
      long long v;
      std::string extra;
      if (!(ls >> v) || v < 0 || (ls >> extra)) fail("expected vertex count");
      n = static_cast<std::size_t>(v);
      have_n = true;
      continue;
    }
    long long u, v;
    std::string extra;
    if (!(ls >> u >> v) || (ls >> extra)) fail("expected 'u v'");
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n)
      fail("vertex out of range");
    if (u == v) fail("self-loop");
    Edge e{static_cast<Vertex>(std::min(u, v)), static_cast<Vertex>(std::max(u, v))};
    edges.push_back(e);
    seen.emplace_back(e, line_no);
  }
  if (!have_n) throw GraphError("edge list line 1: missing vertex count");
  std::sort(seen.begin(), seen.end());
  for (std::size_t i = 1; i < seen.size(); ++i)
    if (seen[i].first == seen[i - 1].first) {
      line_no = std::max(seen[i].second, seen[i - 1].second);
      fail("duplicate edge");
    }
  return Graph::from_edges(n, edges);
}

Graph read_edge_list_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw GraphError("cannot open graph file '" + path + "'");
  return read_edge_list(in);
}

void write_edge_list(std::ostream& out, const Graph& g) {
  out << g.size() << '\n';
  for (auto [u, v] : g.edges()) out << u << ' ' << v << '\n';
}

}  // namespace rnsim
