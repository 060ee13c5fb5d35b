#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rnsim/diam.hpp"
#include "rnsim/graphgen.hpp"

using namespace rnsim;

namespace {

struct Net {
  Graph g;
  RadioNetwork radio;
  PhysicalChannel phys;
  Net(Graph graph, std::uint64_t seed)
      : g(std::move(graph)),
        radio(g, default_budget_bits(g.size())),
        phys(radio,
             {std::max<std::uint32_t>(1, g.max_degree()), std::pow(double(std::max<std::size_t>(g.size(), 2)), -4.0)},
             seed) {}
};

BfsTree exact_tree(const Graph& g, Vertex root) {
  Vertex src[] = {root};
  auto d = oracle_bfs(g, src);
  return {root, d, *std::max_element(d.begin(), d.end())};
}

Payload tag(std::uint64_t x) { return Payload{}.push(x, 16); }

}  // namespace

TEST_CASE("tree validity") {
  auto g = make_grid(4, 5);
  auto t = exact_tree(g, 7);
  CHECK(valid_tree(g, t));
  t.label[0] += 1;
  CHECK_FALSE(valid_tree(g, t));
  auto layers = exact_tree(make_path(6), 0).layers();
  CHECK(layers.size() == 6);
  CHECK(layers[3] == std::vector<Vertex>{3});
}

TEST_CASE("equal keys: lowest ID is the witness") {
  Net net(make_grid(5, 5), 1);
  auto t = exact_tree(net.g, 12);
  std::vector<std::uint64_t> keys(25, 7);
  keys[0] = 0;  // not a holder
  std::vector<Payload> pay(25);
  for (Vertex v = 0; v < 25; ++v) pay[v] = tag(100 + v);
  for (Extreme mode : {Extreme::Min, Extreme::Max}) {
    auto r = find_extremum(net.phys, t, keys, pay, 20, mode);
    CHECK(r.found);
    CHECK(r.key == 7);
    CHECK(r.witness == 1);
    CHECK(r.payload == tag(101));
    CHECK(std::count(r.informed.begin(), r.informed.end(), 1) == 25);
  }
}

TEST_CASE("minimum of IDs on a path") {
  int good = 0;
  for (std::uint64_t s = 0; s < 200; ++s) {
    Net net(make_path(16), s);
    auto t = exact_tree(net.g, 15);
    std::vector<std::uint64_t> keys(16);
    std::vector<Payload> pay(16);
    for (Vertex v = 0; v < 16; ++v) {
      keys[v] = v + 1;  // keys start at 1; key 1 is vertex 0
      pay[v] = tag(1000 + v);
    }
    auto r = find_extremum(net.phys, t, keys, pay, 16, Extreme::Min);
    good += r.found && r.key == 1 && r.witness == 0 &&
            std::all_of(r.informed.begin(), r.informed.end(), [](char c) { return c; });
  }
  CHECK(good >= 198);
}

TEST_CASE("maximum and the energy budget per phase") {
  Net net(make_path(32), 5);
  auto t = exact_tree(net.g, 0);
  std::vector<std::uint64_t> keys(32);
  for (Vertex v = 0; v < 32; ++v) keys[v] = (v * 7) % 32 + 1;
  auto r = find_extremum(net.phys, t, keys, std::vector<Payload>(32, tag(1)), 32, Extreme::Max);
  CHECK(r.found);
  CHECK(r.key == 32);
  CHECK((r.witness * 7) % 32 == 31);
  // Each phase is one ascent and one descent: at most four calls per device.
  const std::uint64_t phases = r.key_phases + r.id_phases + 1;
  CHECK(net.radio.meters().max_lb_calls() <= 4 * phases);
}

TEST_CASE("single key value needs no key phases") {
  Net net(make_cycle(9), 2);
  auto t = exact_tree(net.g, 0);
  std::vector<std::uint64_t> keys(9, 0);
  keys[4] = keys[6] = 1;
  auto r = find_extremum(net.phys, t, keys, std::vector<Payload>(9, tag(3)), 1, Extreme::Min);
  CHECK(r.key_phases == 0);
  CHECK(r.found);
  CHECK(r.witness == 4);
}

TEST_CASE("no holders floods the error flag") {
  Net net(make_path(10), 3);
  auto t = exact_tree(net.g, 0);
  auto r = find_extremum(net.phys, t, std::vector<std::uint64_t>(10, 0), std::vector<Payload>(10), 8, Extreme::Min);
  CHECK_FALSE(r.found);
  CHECK(std::count(r.informed.begin(), r.informed.end(), 1) == 10);
}

TEST_CASE("2-approximation examples") {
  {
    Net net(make_complete(8), 1);
    CHECK(approx_diameter_2(net.phys, 0, 1).d_prime == 1);
  }
  {
    Net net(make_path(9), 1);
    CHECK(approx_diameter_2(net.phys, 0, 1).d_prime == 8);
  }
  {
    Net net(make_path(9), 1);
    CHECK(approx_diameter_2(net.phys, 4, 1).d_prime == 4);
  }
}

TEST_CASE("2-approximation brackets the diameter") {
  for (const char* spec : {"grid:6x7", "gnp:120:5", "cycle:15", "disjointness:8:0"}) {
    for (std::uint64_t s = 0; s < 5; ++s) {
      Net net(make_graph(spec, s), s);
      const auto d = oracle_diameter(net.g);
      auto r = approx_diameter_2(net.phys, 0, s);
      CHECK(r.ok);
      CHECK(r.d_prime >= (d + 1) / 2);
      CHECK(r.d_prime <= d);
    }
  }
}

TEST_CASE("3/2-approximation examples") {
  {
    Net net(make_complete(8), 4);
    CHECK(approx_diameter_32(net.phys, 0, 4).d_prime == 1);
  }
  for (std::uint64_t s = 0; s < 40; ++s) {
    Net net(make_path(10), s);
    auto r = approx_diameter_32(net.phys, 0, s);
    CHECK(r.ok);
    CHECK(r.d_prime >= 6);
    CHECK(r.d_prime <= 9);
    CHECK(r.closest_size == 4);
  }
  for (std::uint64_t s = 0; s < 40; ++s) {
    Net net(make_cycle(12), s);
    auto r = approx_diameter_32(net.phys, 0, s);
    CHECK(r.d_prime >= 4);
    CHECK(r.d_prime <= 6);
  }
}

TEST_CASE("3/2-approximation on a larger graph") {
  Net net(make_graph("gnp:128:6", 9), 9);
  const auto d = oracle_diameter(net.g);
  auto r = approx_diameter_32(net.phys, 0, 9);
  CHECK(r.ok);
  CHECK(r.d_prime >= 2 * d / 3);
  CHECK(r.d_prime <= d);
  CHECK(r.sample_size > 0);
  CHECK(r.bfs_runs == 2 + r.sample_size + r.closest_size);
}
