// Acceptance gate: one PASS/FAIL line per criterion. Optional arguments pick
// a subset by number, e.g. `acceptance 5 11`.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <set>
#include <string>

#include "rnsim/harness.hpp"

using namespace rnsim;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, double a = 0, double b = 0, double c = 0, double d = 0, double e = 0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c, d, e);
  return buf;
}

// Pinned tolerances.
constexpr double kDeliveryRate = 0.99;
constexpr double kRadiusRate = 0.99;
constexpr double kCutFactor = 4.0;
constexpr double kProxyUpper = 8.0;
constexpr double kProxyFar = 16.0;
constexpr double kProxyRate = 0.99;
constexpr double kBfsRate = 0.95;
constexpr double kClaimFactor = 4.0;
constexpr double kRecursiveSlope = 0.8;
constexpr double kTrivialSlopeTolerance = 0.1;
constexpr double kDiam32Rate = 0.95;
constexpr double kDiamEnergyFactor = 32.0;

Verdict channel_semantics() {
  std::uint64_t discrepancies = 0, cases = 0;
  for (std::size_t n = 1; n <= 6; ++n) {
    std::vector<Edge> all;
    for (Vertex u = 0; u < n; ++u)
      for (Vertex v = u + 1; v < n; ++v) all.push_back({u, v});
    for (std::uint32_t emask = 0; emask < (1u << all.size()); ++emask) {
      std::vector<Edge> es;
      for (std::size_t k = 0; k < all.size(); ++k)
        if (emask >> k & 1) es.push_back(all[k]);
      const Graph g = Graph::from_edges(n, es);
      RadioNetwork net(g, 64);
      for (std::uint32_t tx = 0; tx < (1u << n); ++tx) {
        std::vector<DeviceAction> acts(n);
        for (Vertex v = 0; v < n; ++v)
          acts[v] = tx >> v & 1 ? DeviceAction::transmit(Payload{}.push(v + 1, 8)) : DeviceAction::listen();
        const auto fb = net.step(acts);
        for (Vertex v = 0; v < n; ++v) {
          if (tx >> v & 1) continue;
          ++cases;
          int heard = 0;
          Vertex from = 0;
          for (const auto& [a, b] : es)
            if ((a == v && (tx >> b & 1)) || (b == v && (tx >> a & 1))) ++heard, from = a == v ? b : a;
          const bool ok = heard == 1 ? fb[v] && (*fb[v])[0] == from + 1 : !fb[v];
          discrepancies += !ok;
        }
      }
    }
  }
  return {discrepancies == 0, fmt("%.0f listener checks, %.0f discrepancies", cases, discrepancies)};
}

Verdict local_broadcast() {
  const Graph g = make_graph("gnp:500:8", 1);
  auto v = verify_local_broadcast(g, 0.01, 8.0, 1000, 1);
  const bool pass = v.rate() >= kDeliveryRate && v.sender_energy_mismatches == 0 && v.receiver_energy_violations == 0;
  return {pass, fmt("delivery %.5f over %.0f receiver-calls; sender energy != R: %.0f; receiver > R*T: %.0f",
                    v.rate(), v.eligible, v.sender_energy_mismatches, v.receiver_energy_violations)};
}

Verdict clustering() {
  bool pass = true;
  std::string detail;
  for (const char* spec : {"path:4096", "grid:64x64"})
    for (double beta : {1.0 / 8, 1.0 / 16}) {
      const Graph g = make_graph(spec, 1);
      int partition = 0, radius = 0;
      double cut = 0;
      const int seeds = 100;
      for (int s = 0; s < seeds; ++s) {
        auto v = verify_clustering(g, beta, s);
        partition += v.partition_ok;
        radius += v.radius_ok;
        cut += v.cut_fraction;
      }
      cut /= seeds;
      const bool ok = partition == seeds && radius >= kRadiusRate * seeds && cut <= kCutFactor * beta;
      pass &= ok;
      detail += std::string(spec) + fmt(" 1/beta=%.0f: partition %.0f%%, radius %.0f%%, cut %.4f (<= %.3f); ",
                                         1 / beta, 100.0 * partition / seeds, 100.0 * radius / seeds, cut,
                                         kCutFactor * beta);
    }
  return {pass, detail};
}

Verdict distance_proxy() {
  const Graph g = make_path(4096);
  ProxyVerify total;
  for (int s = 0; s < 100; ++s) {
    auto v = verify_distance_proxy(g, 1.0 / 16, 50, s, kProxyUpper, kProxyFar);
    total.pairs += v.pairs;
    total.in_band += v.in_band;
    total.far_pairs += v.far_pairs;
    total.far_ok += v.far_ok;
  }
  const double band = double(total.in_band) / total.pairs;
  const double far = total.far_pairs ? double(total.far_ok) / total.far_pairs : 1.0;
  return {band >= kProxyRate && far >= kProxyRate,
          fmt("in band %.4f of %.0f pairs; far pairs within 16 beta d: %.4f of %.0f", band, total.pairs, far,
              total.far_pairs)};
}

Verdict z_sequence() {
  std::uint64_t checked = 0, violations = 0;
  for (std::uint64_t d = 4; d <= 1024; d *= 2) {
    for (auto c : {check_periodicity(d, 4096), check_next_larger(d, 4096)}) {
      checked += c.checked;
      violations += c.violations;
    }
  }
  return {violations == 0, fmt("%.0f checks, %.0f violations", checked, violations)};
}

struct BfsSuite {
  bool ran = false;
  std::string detail;
  bool correct = true, invariants = true, claims = true;
  std::string inv_detail, claim_detail;
};

BfsSuite& bfs_suite() {
  static BfsSuite s;
  if (s.ran) return s;
  s.ran = true;
  std::uint64_t bracket_checks = 0, bracket_bad = 0, lower_bad = 0, upper_checks = 0, upper_bad = 0;
  double worst_x = 0, worst_g = 0;
  for (const char* spec : {"path:256", "cycle:300", "grid:24x24", "gnp:512:8", "disjointness:16:1"}) {
    const Graph g = make_graph(spec, 1);
    Vertex src[] = {0};
    const auto truth = oracle_bfs(g, src);
    const double w = default_w(g.size());
    int good = 0;
    const int seeds = 100;
    std::uint64_t max_x = 0;
    double max_g = 0;
    for (int seed = 0; seed < seeds; ++seed) {
      Simulation sim(g, seed);
      BfsOptions opt;
      opt.instrumented = true;
      auto o = bfs_driver(sim.channel, 0, seed, opt);
      const bool ok = o.labels == truth;
      good += ok;
      if (!ok) continue;
      bracket_checks += o.stats.bracket_checks;
      bracket_bad += o.stats.bracket_violations;
      lower_bad += o.stats.lower_violations;
      upper_checks += o.stats.upper_checks;
      upper_bad += o.stats.upper_violations;
      max_x = std::max(max_x, o.stats.max_x_count);
      max_g = std::max(max_g, o.stats.max_g_ratio);
    }
    s.correct &= good >= kBfsRate * seeds;
    s.claims &= max_x <= kClaimFactor * w * w && max_g <= kClaimFactor * w * w;
    worst_x = std::max(worst_x, max_x / (w * w));
    worst_g = std::max(worst_g, max_g / (w * w));
    s.detail += std::string(spec) + fmt(" %.0f/%.0f; ", good, seeds);
  }
  s.invariants = bracket_bad == 0 && upper_bad == 0;
  s.inv_detail = fmt("bracket %.0f violations (%.0f on the lower side) of %.0f checks; ", bracket_bad, lower_bad,
                     bracket_checks) +
                 fmt("U after Special Update %.0f of %.0f", upper_bad, upper_checks);
  s.claim_detail = fmt("max X count / w^2 = %.5f, max G count / (w^2 log2 D) = %.5f (limit %.0f each)", worst_x,
                       worst_g, kClaimFactor);
  return s;
}

Verdict bfs_correctness() {
  auto& s = bfs_suite();
  return {s.correct, s.detail};
}
Verdict bfs_invariants() {
  auto& s = bfs_suite();
  return {s.invariants, s.inv_detail};
}
Verdict bfs_claims() {
  auto& s = bfs_suite();
  return {s.claims, s.claim_detail};
}

Verdict energy_trend() {
  std::vector<std::uint64_t> depths;
  for (int k = 7; k <= 12; ++k) depths.push_back(std::uint64_t{1} << k);
  auto st = energy_scaling_study("path", depths, {0, 1, 2});
  const bool pass = st.recursive_slope < kRecursiveSlope &&
                    std::abs(st.trivial_slope - 1.0) <= kTrivialSlopeTolerance && st.labels_agree;
  std::string detail = fmt("recursive slope %.3f (< %.1f), trivial slope %.3f (1 +- %.1f)", st.recursive_slope,
                           kRecursiveSlope, st.trivial_slope, kTrivialSlopeTolerance);
  detail += st.labels_agree ? ", labels agree" : ", labels differ";
  detail += "; recursive max LB at D=128: " + std::to_string(st.rows.front().recursive_lb) +
            ", at D=4096: " + std::to_string(st.rows.back().recursive_lb);
  return {pass, detail};
}

Verdict diameter() {
  bool pass = true;
  std::string detail;
  std::uint64_t d2_runs = 0, d2_bad = 0;
  for (const char* spec : {"path:10", "cycle:12", "grid:8x8", "gnp:128:6", "complete:16", "complete-minus-edge:16",
                           "disjointness:8:1", "disjointness:8:0"}) {
    const Graph g = make_graph(spec, 1);
    const auto d = oracle_diameter(g);
    int good = 0;
    const int seeds = 200;
    for (int s = 0; s < seeds; ++s) {
      Simulation a(g, s), b(g, s);
      auto r2 = approx_diameter_2(a.channel, 0, s);
      if (r2.ok) {
        ++d2_runs;
        d2_bad += r2.d_prime < (d + 1) / 2 || r2.d_prime > d;
      }
      auto r3 = approx_diameter_32(b.channel, 0, s);
      good += r3.ok && r3.d_prime >= 2 * d / 3 && r3.d_prime <= d;
    }
    pass &= good >= kDiam32Rate * seeds;
    detail += std::string(spec) + fmt(" %.0f/%.0f; ", good, seeds);
  }
  pass &= d2_bad == 0;
  detail += fmt("2-approx out of range %.0f of %.0f; ", d2_bad, d2_runs);

  double worst = 0;
  const Graph g = make_graph("gnp:256:8", 1);
  const double bound = std::sqrt(256.0) * std::pow(std::log(256.0), 3);
  for (int s = 0; s < 5; ++s) {
    Simulation sim(g, s);
    approx_diameter_32(sim.channel, 0, s);
    worst = std::max(worst, sim.radio.meters().max_lb_calls() / bound);
  }
  pass &= worst <= kDiamEnergyFactor;
  detail += fmt("energy at n=256: c = %.3f (<= %.0f)", worst, kDiamEnergyFactor);
  return {pass, detail};
}

Verdict hard_instances() {
  Rng rng = device_stream(11, Purpose::Topology, 0);
  int agree = 0, arboricity_ok = 0;
  const int instances = 200;
  const unsigned ks[] = {2, 4, 8, 16, 32};
  for (int i = 0; i < instances; ++i) {
    const unsigned k = ks[i % 5];
    const bool disjoint = rng() & 1;
    auto inst = random_disjointness(k, disjoint, rng);
    const Graph g = gen_disjointness(inst);
    agree += (oracle_diameter(g) == 2) == inst.disjoint();
    arboricity_ok += degeneracy(g) <= 2 * std::log2(double(k)) + 2;
  }
  return {agree == instances && arboricity_ok == instances,
          fmt("diameter 2 iff disjoint: %.0f/%.0f; degeneracy within 2 log2 k + 2: %.0f/%.0f", agree, instances,
              arboricity_ok, instances)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<const char*, std::function<Verdict()>>> criteria{
      {"channel semantics", channel_semantics},
      {"local broadcast", local_broadcast},
      {"clustering", clustering},
      {"distance proxy", distance_proxy},
      {"Z-sequence periodicity", z_sequence},
      {"recursive BFS correctness", bfs_correctness},
      {"estimate invariants", bfs_invariants},
      {"membership counters", bfs_claims},
      {"energy trend", energy_trend},
      {"diameter approximation", diameter},
      {"hard-instance sanity", hard_instances},
  };
  std::set<int> pick;
  for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
  int failed = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!pick.empty() && !pick.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Verdict v = criteria[k].second();
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("[%s] %2d %s: %s (%.1f s)\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first, v.detail.c_str(), sec);
    std::fflush(stdout);
    failed += !v.pass;
  }
  std::printf("%d criteria failed\n", failed);
  return failed ? 1 : 0;
}
