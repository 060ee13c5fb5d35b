#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <sstream>

#include "rnsim/graphgen.hpp"

using namespace rnsim;

TEST_CASE("family examples") {
  Graph k5 = make_complete(5);
  CHECK(k5.edge_count() == 10);
  CHECK(oracle_diameter(k5) == 1);

  Graph k5e = make_complete_minus_edge(5);
  CHECK(k5e.edge_count() == 9);
  CHECK(oracle_diameter(k5e) == 2);

  Graph p4 = make_path(4);
  CHECK(p4.edges() == std::vector<Edge>{{0, 1}, {1, 2}, {2, 3}});
  CHECK(oracle_diameter(p4) == 3);

  CHECK(oracle_diameter(make_grid(4, 4)) == 6);
  CHECK(oracle_diameter(make_cycle(12)) == 6);
}

TEST_CASE("oracle_bfs examples") {
  Vertex zero[] = {0};
  CHECK(oracle_bfs(make_path(4), zero) == std::vector<std::uint32_t>{0, 1, 2, 3});
  std::vector<Vertex> all{0, 1, 2, 3, 4};
  CHECK(oracle_bfs(make_grid(1, 5), all) == std::vector<std::uint32_t>(5, 0));
  auto d = oracle_bfs(make_complete_minus_edge(5), zero);
  CHECK(d == std::vector<std::uint32_t>{0, 2, 1, 1, 1});
  Graph split = Graph::from_edges(3, {{0, 1}});
  CHECK(oracle_bfs(split, zero)[2] == kUnreached);
}

TEST_CASE("generators respect graph invariants") {
  Rng rng = device_stream(5, Purpose::Topology, 0);
  std::vector<Graph> gs{make_path(30), make_cycle(30), make_grid(5, 7), make_complete(9),
                        make_complete_minus_edge(9), make_gnp_connected(60, 0.1, rng),
                        make_unit_disc(60, 0.3, rng), make_graph("disjointness:16:1", 3)};
  for (const Graph& g : gs) {
    CHECK(g.connected());
    for (Vertex v = 0; v < g.size(); ++v) {
      auto nb = g.neighbors(v);
      CHECK(std::is_sorted(nb.begin(), nb.end()));
      CHECK(std::adjacent_find(nb.begin(), nb.end()) == nb.end());
      for (Vertex u : nb) {
        CHECK(u != v);
        CHECK(g.has_edge(u, v));
      }
    }
  }
}

TEST_CASE("oracle_bfs agrees with matrix-power reachability for n <= 32") {
  Rng rng = device_stream(11, Purpose::Topology, 1);
  std::uniform_real_distribution<double> pr(0.05, 0.5);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t n = 1 + trial % 32;
    std::bernoulli_distribution coin(pr(rng));
    std::vector<Edge> e;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v)
        if (coin(rng)) e.emplace_back(u, v);
    Graph g = Graph::from_edges(n, e);
    std::vector<Vertex> src{static_cast<Vertex>(rng() % n)};
    if (trial % 3 == 0) src.push_back(static_cast<Vertex>(rng() % n));
    CHECK(oracle_bfs(g, src) == reachability_distances(g, src));
  }
}

TEST_CASE("parallel and serial diameter oracles agree") {
  Rng rng = device_stream(2, Purpose::Topology, 0);
  for (int i = 0; i < 10; ++i) {
    Graph g = make_gnp_connected(80, 0.06, rng);
    CHECK(oracle_diameter(g) == oracle_diameter_serial(g));
  }
  CHECK_THROWS_AS(oracle_diameter(Graph::from_edges(3, {{0, 1}})), GraphError);
}

TEST_CASE("disjointness construction examples") {
  DisjointnessInstance meet{8, {5}, {5}};
  Graph g = gen_disjointness(meet);
  CHECK(g.size() == 1 + 1 + 2 * 3 + 2);
  CHECK(oracle_diameter(g) == 3);
  CHECK(oracle_diameter(gen_disjointness({8, {1}, {2}})) == 2);
  CHECK(oracle_diameter(gen_disjointness({4, {}, {}})) <= 2);
  CHECK_THROWS_AS(gen_disjointness({8, {8}, {1}}), GraphError);
}

TEST_CASE("disjointness diameter characterises set intersection") {
  Rng rng = device_stream(99, Purpose::Topology, 0);
  int checked = 0;
  for (unsigned k : {2u, 4u, 8u, 16u, 32u})
    for (int i = 0; i < 40; ++i) {
      bool disjoint = (i % 2) == 0;
      auto inst = random_disjointness(k, disjoint, rng);
      Graph g = gen_disjointness(inst);
      CHECK(oracle_diameter(g) == (inst.disjoint() ? 2u : 3u));
      CHECK(degeneracy(g) <= 2 * inst.bits() + 2);
      ++checked;
    }
  CHECK(checked == 200);
}

TEST_CASE("degeneracy on known graphs") {
  CHECK(degeneracy(make_path(10)) == 1);
  CHECK(degeneracy(make_cycle(10)) == 2);
  CHECK(degeneracy(make_complete(6)) == 5);
  CHECK(degeneracy(make_grid(5, 5)) == 2);
}

TEST_CASE("edge-list I/O") {
  std::istringstream in("3\n0 1\n1 2\n");
  Graph g = read_edge_list(in);
  CHECK(g == make_path(3));

  Rng rng = device_stream(4, Purpose::Topology, 0);
  for (Graph h : {make_grid(4, 6), make_gnp_connected(40, 0.15, rng), make_complete(1)}) {
    std::stringstream buf;
    write_edge_list(buf, h);
    CHECK(read_edge_list(buf) == h);
  }

  auto error_of = [](const std::string& text) {
    std::istringstream s(text);
    try {
      read_edge_list(s);
    } catch (const GraphError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(error_of("3\n0 0\n").find("self-loop") != std::string::npos);
  CHECK(error_of("3\n0 0\n").find("line 2") != std::string::npos);
  CHECK(error_of("3\n0 1\n1 0\n").find("duplicate") != std::string::npos);
  CHECK(error_of("3\n0 1\n1 x\n").find("line 3") != std::string::npos);
  CHECK(error_of("3\n0 5\n").find("range") != std::string::npos);
}
