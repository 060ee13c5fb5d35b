#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <sstream>

#include "rnsim/graphgen.hpp"
#include "rnsim/mpx.hpp"

using namespace rnsim;

namespace {

struct Run {
  Graph g;
  RadioNetwork net;
  PhysicalChannel ch;
  Run(Graph graph, std::uint64_t seed, Fidelity fid = Fidelity::Fast)
      : g(std::move(graph)),
        net(g, default_budget_bits(g.size())),
        ch(net, {std::max<std::uint32_t>(1, g.max_degree()), std::pow(double(std::max<std::size_t>(g.size(), 2)), -4.0)}, seed, fid) {}
};

ClusterParams params_for(std::size_t n, double beta) {
  ClusterParams p;
  p.beta = beta;
  p.n = n;
  return p;
}

}  // namespace

TEST_CASE("exponential draws") {
  Rng rng = device_stream(3, Purpose::Shift, 0);
  const int draws = 100000;
  double sum = 0;
  for (int i = 0; i < draws; ++i) {
    double x = sample_exponential(0.125, rng);
    REQUIRE(x >= 0.0);
    sum += x;
  }
  CHECK(sum / draws == doctest::Approx(8.0).epsilon(0.1 / 8.0));

  // Tail beyond 4 ln n / beta has mass n^-4; at n = 256 that is ~2e-10.
  const double cut = 4.0 * std::log(256.0) / 0.125;
  int over = 0;
  for (int i = 0; i < 1000000; ++i) over += sample_exponential(0.125, rng) >= cut;
  CHECK(over <= 1);
}

TEST_CASE("parameter formulas") {
  auto p = params_for(4097, 1.0 / 128);
  CHECK(p.radius_bound() == 4259);
  CHECK(p.contention_bound() == 10);
  CHECK(p.shared_set_size() == 999);
  CHECK(params_for(8, 1.0).radius_bound() == 9);
  CHECK(params_for(1, 1.0).radius_bound() == 1);
  CHECK_THROWS(params_for(8, 0.3).inverse_beta());
}

TEST_CASE("shared set size concentrates at set_size / contention") {
  Rng rng(11);
  double total = 0;
  for (int i = 0; i < 2000; ++i) {
    auto s = gen_shared_set(10, 1000, rng);
    REQUIRE(std::is_sorted(s.begin(), s.end()));
    if (!s.empty()) REQUIRE(s.back() < 1000);
    total += s.size();
  }
  CHECK(total / 2000 == doctest::Approx(100.0).epsilon(0.02));
}

TEST_CASE("single vertex and complete graph") {
  Run one(make_path(1), 1);
  auto c = cluster(one.ch, params_for(1, 1.0), 1);
  CHECK(c.cluster_count() == 1);
  CHECK(c.centers[0] == 0);
  CHECK(c.radius(0) == 0);

  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Run k8(make_complete(8), seed);
    auto p = params_for(8, 1.0);
    auto cl = cluster(k8.ch, p, seed);
    auto chk = check_clustering(k8.g, cl);
    CHECK(chk.partition_ok);
    CHECK(chk.layers_ok);
    CHECK(chk.max_layer <= p.radius_bound());
  }
}

TEST_CASE("join rounds match the all-deliveries oracle") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng grng = device_stream(seed, Purpose::Topology, 0);
    Run r(make_gnp_connected(40, 0.1, grng), seed, Fidelity::Reference);
    auto cl = cluster(r.ch, params_for(40, 0.5), seed);
    CHECK(join_round_oracle(r.g, cl.start) == cl.joined);
    auto chk = check_clustering(r.g, cl);
    CHECK(chk.partition_ok);
    CHECK(chk.layers_ok);
  }
}

TEST_CASE("reference and fast clustering agree") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Graph g = make_grid(8, 8);
    Run a(g, seed, Fidelity::Reference), b(g, seed, Fidelity::Fast);
    auto p = params_for(64, 0.25);
    auto ca = cluster(a.ch, p, seed), cb = cluster(b.ch, p, seed);
    CHECK(ca.center_of == cb.center_of);
    CHECK(ca.layer == cb.layer);
    CHECK(ca.shared_set == cb.shared_set);
    CHECK(a.ch.now() == b.ch.now());
    CHECK(a.net.meters().lb_calls == b.net.meters().lb_calls);
    CHECK(a.net.meters().energy == b.net.meters().energy);
  }
}

TEST_CASE("cut fraction on a long path") {
  double total = 0;
  const int seeds = 100;
  for (int seed = 0; seed < seeds; ++seed) {
    Run r(make_path(512), seed);
    auto cl = cluster(r.ch, params_for(512, 1.0 / 16), seed);
    auto chk = check_clustering(r.g, cl);
    REQUIRE(chk.partition_ok);
    REQUIRE(chk.layers_ok);
    total += chk.cut_fraction;
  }
  // Each edge is cut with probability O(beta); the constant measured here is about 1.
  CHECK(total / seeds <= 2.0 / 16);
}

TEST_CASE("isolation property with default parameters") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    Rng grng = device_stream(seed, Purpose::Topology, 0);
    Run r(make_gnp_connected(256, 8.0 / 255, grng), seed);
    auto cl = cluster(r.ch, params_for(256, 1.0 / 8), seed);
    CHECK(check_clustering(r.g, cl).isolation_failures == 0);
  }
}

TEST_CASE("cluster graph construction") {
  Run one(make_path(3), 2);
  auto p = params_for(3, 1.0);
  Clustering c = cluster(one.ch, p, 2);
  auto cg = build_cluster_graph(one.g, c);
  CHECK(cg.graph.size() == c.cluster_count());
  CHECK(cg.center == c.centers);

  // Hand-made partitions.
  Clustering single;
  single.center_of = {0, 0, 0};
  single.cluster_of = {0, 0, 0};
  single.layer = {0, 1, 2};
  single.centers = {0};
  single.members = {{0, 1, 2}};
  auto g1 = build_cluster_graph(make_path(3), single);
  CHECK(g1.graph.size() == 1);
  CHECK(g1.graph.edge_count() == 0);

  Clustering split;
  split.center_of = {0, 1};
  split.cluster_of = {0, 1};
  split.layer = {0, 0};
  split.centers = {0, 1};
  split.members = {{0}, {1}};
  auto g2 = build_cluster_graph(make_path(2), split);
  CHECK(g2.graph.size() == 2);
  CHECK(g2.graph.edge_count() == 1);
  CHECK(g2.graph.has_edge(0, 1));

  // Edge set matches the contraction definition on random graphs.
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Rng grng = device_stream(seed, Purpose::Topology, 0);
    Run r(make_gnp_connected(60, 0.08, grng), seed);
    auto cl = cluster(r.ch, params_for(60, 0.5), seed);
    auto cg2 = build_cluster_graph(r.g, cl);
    for (Vertex a = 0; a < cg2.graph.size(); ++a)
      for (Vertex b = a + 1; b < cg2.graph.size(); ++b) {
        bool adj = false;
        for (Vertex u : cl.members[a])
          for (Vertex v : r.g.neighbors(u)) adj |= cl.cluster_of[v] == b;
        CHECK(cg2.graph.has_edge(a, b) == adj);
      }
  }
}

TEST_CASE("clustering csv") {
  Run r(make_path(4), 5);
  auto cl = cluster(r.ch, params_for(4, 1.0), 5);
  std::ostringstream out;
  write_clustering_csv(out, cl);
  std::string s = out.str();
  CHECK(s.rfind("vertex,cluster_id,layer,start\n", 0) == 0);
  CHECK(std::count(s.begin(), s.end(), '\n') == 5);
}
