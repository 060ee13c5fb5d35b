#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "rnsim/graphgen.hpp"
#include "rnsim/lbcast.hpp"

using namespace rnsim;

namespace {

Payload tag(Vertex v) { return Payload{}.push(v, 16); }

LbRequest request(std::vector<Vertex> senders, std::vector<Vertex> receivers) {
  LbRequest r;
  for (Vertex s : senders) r.senders.push_back({s, tag(s)});
  r.receivers = std::move(receivers);
  return r;
}

// Runs one Decay call as a device program: senders transmit in their drawn
// slot of each repetition, receivers listen throughout.
struct DecayDevice : DeviceProgram {
  DecayDevice(const PhysicalChannel& ch, Vertex v, int role)
      : ch(ch), v(v), role(role), total(ch.params().slots_per_call()) {}
  DeviceAction act(std::uint64_t slot) override {
    ++done;
    if (role == 0) return DeviceAction::idle();
    if (role == 2) return DeviceAction::listen();
    const unsigned top = ch.params().slots_per_rep();
    unsigned rep = static_cast<unsigned>(slot / top), t = static_cast<unsigned>(slot % top) + 1;
    return ch.draw_slot(v, 0, rep) == t ? DeviceAction::transmit(tag(v)) : DeviceAction::idle();
  }
  void observe(std::uint64_t, const SlotFeedback& fb) override {
    if (fb && heard < 0) heard = static_cast<std::int64_t>((*fb)[0]);
  }
  bool halted() const override { return done >= total; }
  std::int64_t output() const override { return heard; }
  const PhysicalChannel& ch;
  Vertex v;
  int role;
  std::uint64_t total, done = 0;
  std::int64_t heard = -1;
};

}  // namespace

TEST_CASE("decay slot distribution") {
  for (int i = 0; i < 100; ++i) CHECK(sample_decay_slot(1, static_cast<std::uint64_t>(i) * 7919) == 1);
  Rng rng = device_stream(1, Purpose::Decay, 0);
  const int draws = 100000;
  std::array<int, 4> hist{};
  for (int i = 0; i < draws; ++i) {
    unsigned t = sample_decay_slot(7, rng);
    REQUIRE(t >= 1);
    REQUIRE(t <= 3);
    ++hist[t];
  }
  auto sigma = [&](double p) { return std::sqrt(p * (1 - p) / draws); };
  CHECK(hist[1] / double(draws) >= 0.5 - 3 * sigma(0.5));
  CHECK(hist[2] / double(draws) >= 0.25 - 3 * sigma(0.25));
  CHECK(DecayParams{7, 0.01}.slots_per_rep() == 3);
  CHECK(DecayParams{8, 0.01}.slots_per_rep() == 4);
  CHECK(DecayParams{1, 0.5}.repetitions() == 8);
}

TEST_CASE("single sender reaches its receiver") {
  Graph g = make_path(2);
  int got = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RadioNetwork net(g, 32);
    PhysicalChannel ch(net, {1, 0.01}, seed);
    auto d = ch.local_broadcast(request({0}, {1}));
    got += d[0] && (*d[0])[0] == 0;
  }
  CHECK(got >= 9900);
}

TEST_CASE("no senders: receivers hear nothing and pay the full call") {
  Graph g = make_grid(3, 3);
  RadioNetwork net(g, 64);
  DecayParams p{4, 0.01};
  PhysicalChannel ch(net, p, 3, Fidelity::Reference);
  auto d = ch.local_broadcast(request({}, {0, 4, 8}));
  for (auto& x : d) CHECK_FALSE(x);
  CHECK(net.meters().energy[4] == p.slots_per_call());
  CHECK(net.meters().energy[1] == 0);
  CHECK(net.meters().lb_calls[4] == 1);
}

TEST_CASE("star centre hears one of eight leaves") {
  Graph g = Graph::from_edges(9, {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {0, 5}, {0, 6}, {0, 7}, {0, 8}});
  int got = 0;
  for (std::uint64_t seed = 0; seed < 10000; ++seed) {
    RadioNetwork net(g, 64);
    PhysicalChannel ch(net, {8, 0.01}, seed);
    auto d = ch.local_broadcast(request({1, 2, 3, 4, 5, 6, 7, 8}, {0}));
    got += d[0].has_value();
  }
  CHECK(got >= 9900);
}

TEST_CASE("reference slots and fast evaluation agree exactly") {
  Rng rng = device_stream(8, Purpose::Topology, 0);
  Graph g = make_gnp_connected(60, 0.12, rng);
  const auto delta = static_cast<std::uint32_t>(g.max_degree());
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Rng pick = device_stream(seed, Purpose::Workload, 0);
    std::vector<Vertex> s, r;
    for (Vertex v = 0; v < g.size(); ++v) {
      auto x = pick() % 3;
      if (x == 0) s.push_back(v);
      if (x == 1) r.push_back(v);
    }
    RadioNetwork n1(g, 96), n2(g, 96);
    PhysicalChannel slow(n1, {delta, 0.05}, seed, Fidelity::Reference);
    PhysicalChannel fast(n2, {delta, 0.05}, seed, Fidelity::Fast);
    for (int call = 0; call < 3; ++call) {
      auto a = slow.local_broadcast(request(s, r));
      auto b = fast.local_broadcast(request(s, r));
      CHECK(a == b);
      for (std::size_t k = 0; k < r.size(); ++k)
        if (a[k]) CHECK(g.has_edge(r[k], static_cast<Vertex>((*a[k])[0])));
    }
    CHECK(n1.meters().energy == n2.meters().energy);
    CHECK(n1.meters().lb_calls == n2.meters().lb_calls);
    CHECK(n1.meters().slots == n2.meters().slots);
    for (Vertex v : s) CHECK(n1.meters().energy[v] == 3 * slow.params().repetitions());
    for (Vertex v : r) CHECK(n1.meters().energy[v] <= 3 * slow.params().slots_per_call());
  }
}

TEST_CASE("Decay as a device program on a 16-star matches the channel") {
  std::vector<Edge> e;
  for (Vertex v = 1; v < 16; ++v) e.emplace_back(0, v);
  Graph star = Graph::from_edges(16, e);
  DecayParams p{15, 0.01};
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    RadioNetwork net(star, 64);
    PhysicalChannel ch(net, p, seed, Fidelity::Reference);
    std::vector<Vertex> senders{1, 2, 3, 4, 5, 6, 7, 8};
    auto d = ch.local_broadcast(request(senders, {0}));

    RadioNetwork scratch(star, 64);
    PhysicalChannel keys(scratch, p, seed);
    auto r = run(
        star,
        [&](Vertex v, Rng) {
          int role = v == 0 ? 2 : (v <= 8 ? 1 : 0);
          return std::make_unique<DecayDevice>(keys, v, role);
        },
        seed, 1 << 20, 64);
    CHECK(r.meters.energy == net.meters().energy);
    CHECK(r.meters.slots == net.meters().slots);
    REQUIRE(d[0]);
    CHECK(r.outputs[0] == static_cast<std::int64_t>((*d[0])[0]));
  }
}

TEST_CASE("payload audit applies to senders") {
  Graph g = make_path(2);
  RadioNetwork net(g, 8);
  PhysicalChannel ch(net, {1, 0.1}, 0);
  LbRequest r;
  r.senders.push_back({0, Payload{}.push(1, 9)});
  r.receivers = {1};
  CHECK_THROWS_AS(ch.local_broadcast(r), MessageBudgetError);
}
