#include "rnsim/rbfs.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "rnsim/graphgen.hpp"

namespace rnsim {

namespace {

constexpr double kNever = std::numeric_limits<double>::infinity();

Payload number(std::uint64_t x, unsigned width) { return Payload{}.push(x, width); }

// Encodes kInfinity as `limit + 1` so a field of bits_for(limit + 2) suffices.
std::uint64_t encode(std::uint32_t x, std::uint64_t limit) { return x == kInfinity ? limit + 1 : x; }
std::uint32_t decode(std::uint64_t x, std::uint64_t limit) {
  return x > limit ? kInfinity : static_cast<std::uint32_t>(x);
}

}  // namespace

std::uint32_t default_w(std::size_t n) {
  return static_cast<std::uint32_t>(std::ceil(16.0 * std::log(double(std::max<std::size_t>(n, 2))) - 1e-9)) + 2;
}

BfsParams choose_params(std::size_t n, std::uint64_t d0) {
  BfsParams p;
  p.d0 = std::max<std::uint64_t>(d0, 1);
  p.w = default_w(n);
  const double lg_d0 = std::log2(double(p.d0));
  const double llg = std::log2(std::max(2.0, std::log2(double(std::max<std::size_t>(n, 4)))));
  const auto k = static_cast<unsigned>(std::ceil(std::sqrt(lg_d0 * llg) - 1e-9));
  p.inv_beta = 1u << std::min(k, 30u);
  if (n <= 16 || p.inv_beta >= p.d0 || k == 0)
    p.max_depth = 0;
  else
    p.max_depth = static_cast<std::uint32_t>(std::ceil(lg_d0 / k - 1e-9));
  return p;
}

void BfsStats::merge(const BfsStats& o) {
  bracket_checks += o.bracket_checks;
  bracket_violations += o.bracket_violations;
  lower_violations += o.lower_violations;
  upper_checks += o.upper_checks;
  upper_violations += o.upper_violations;
  coverage_violations += o.coverage_violations;
  max_x_count = std::max(max_x_count, o.max_x_count);
  max_g_count = std::max(max_g_count, o.max_g_count);
  max_g_ratio = std::max(max_g_ratio, o.max_g_ratio);
  special_updates += o.special_updates;
  trivial_calls += o.trivial_calls;
  if (calls_per_depth.size() < o.calls_per_depth.size()) calls_per_depth.resize(o.calls_per_depth.size());
  if (max_d_per_depth.size() < o.max_d_per_depth.size()) max_d_per_depth.resize(o.max_d_per_depth.size());
  for (std::size_t r = 0; r < o.calls_per_depth.size(); ++r) calls_per_depth[r] += o.calls_per_depth[r];
  for (std::size_t r = 0; r < o.max_d_per_depth.size(); ++r)
    max_d_per_depth[r] = std::max(max_d_per_depth[r], o.max_d_per_depth[r]);
}

BfsEngine::BfsEngine(BroadcastChannel& base, BfsParams params, std::uint64_t seed, std::size_t network_size)
    : base_(&base), params_(params), seed_(seed), network_size_(network_size) {
  if (params_.inv_beta == 0 || (params_.inv_beta & (params_.inv_beta - 1)))
    throw std::invalid_argument("1/beta must be a power of two");
}

BfsEngine::~BfsEngine() = default;

void BfsEngine::set_stage_dump(std::ostream* out) {
  dump_ = out;
  if (dump_) *dump_ << "depth,call,stage,cluster,L,U,update,in_upsilon,in_wstar\n";
}

BroadcastChannel& BfsEngine::level(std::uint32_t r) { return r == 0 ? *base_ : above(r - 1); }

VirtualChannel& BfsEngine::above(std::uint32_t r) {
  while (tower_.size() <= r) {
    const auto lvl = static_cast<std::uint32_t>(tower_.size());
    BroadcastChannel& lower = level(lvl);
    ClusterParams cp;
    cp.beta = params_.beta();
    cp.n = network_size_;
    cp.contention = params_.contention;
    cp.set_size = params_.set_size;
    Clustering c = cluster(lower, cp, seed_, lvl);
    tower_.push_back(std::make_unique<VirtualChannel>(lower, std::move(c), cp.radius_bound(), lower.fidelity()));
  }
  return *tower_[r];
}

std::vector<std::uint32_t> BfsEngine::recursive_bfs(const std::vector<Vertex>& sources,
                                                    const std::vector<char>& active, std::uint64_t depth) {
  std::vector<char> src(base_->size(), 0);
  for (Vertex s : sources) src[s] = 1;
  return run(0, src, active, depth);
}

std::vector<std::uint32_t> BfsEngine::trivial_bfs(const std::vector<Vertex>& sources, const std::vector<char>& active,
                                                  std::uint64_t depth) {
  std::vector<char> src(base_->size(), 0);
  for (Vertex s : sources) src[s] = 1;
  return trivial(0, src, active, depth);
}

std::vector<std::uint32_t> BfsEngine::trivial(std::uint32_t r, const std::vector<char>& source,
                                              const std::vector<char>& active, std::uint64_t depth) {
  BroadcastChannel& ch = level(r);
  const std::size_t n = ch.size();
  ++stats_.trivial_calls;
  std::vector<std::uint32_t> labels(n, kInfinity);
  std::vector<Vertex> frontier, waiting, next;
  for (Vertex v = 0; v < n; ++v) {
    if (!active[v]) continue;
    if (source[v]) {
      labels[v] = 0;
      frontier.push_back(v);
    } else {
      waiting.push_back(v);
    }
  }
  const unsigned width = bits_for(depth + 1);
  for (std::uint64_t round = 1; round <= depth; ++round) {
    const std::uint64_t left = depth - round + 1;
    if (frontier.empty()) {
      // Unlabelled vertices cannot tell that nothing is coming.
      ch.skip_calls({}, waiting, left);
      break;
    }
    if (waiting.empty()) {
      ch.skip_calls(frontier, {}, 1);
      ch.advance(ch.call_length() * (left - 1));
      break;
    }
    const std::uint64_t label = round - 1;
    Delivery got = ch.broadcast(frontier, [&](Vertex) { return number(label, width); }, waiting);
    next.clear();
    std::size_t keep = 0;
    for (std::size_t k = 0; k < waiting.size(); ++k) {
      if (got[k]) {
        labels[waiting[k]] = static_cast<std::uint32_t>((*got[k])[0] + 1);
        next.push_back(waiting[k]);
      } else {
        waiting[keep++] = waiting[k];
      }
    }
    waiting.resize(keep);
    frontier.swap(next);
  }
  return labels;
}

std::vector<std::uint32_t> BfsEngine::run(std::uint32_t r, const std::vector<char>& source,
                                          const std::vector<char>& active, std::uint64_t depth) {
  BroadcastChannel& ch = level(r);
  const Graph& g = ch.topology();
  const std::size_t n = g.size();
  if (stats_.calls_per_depth.size() <= r) {
    stats_.calls_per_depth.resize(r + 1, 0);
    stats_.max_d_per_depth.resize(r + 1, 0);
  }
  ++stats_.calls_per_depth[r];
  stats_.max_d_per_depth[r] = std::max(stats_.max_d_per_depth[r], depth);

  if (depth == 0 || r >= params_.max_depth) {
    if (depth > 0) return trivial(r, source, active, depth);
    std::vector<std::uint32_t> labels(n, kInfinity);
    for (Vertex v = 0; v < n; ++v)
      if (source[v] && active[v]) labels[v] = 0;
    return labels;
  }

  VirtualChannel& vc = above(r);
  const Clustering& cl = vc.clustering();
  const std::size_t k = cl.cluster_count();
  const double ib = params_.inv_beta, w = params_.w;
  const std::uint64_t call = ++call_counter_;

  std::vector<std::uint32_t> truth;
  if (instrumented_) {
    std::vector<Vertex> s;
    for (Vertex v = 0; v < n; ++v)
      if (source[v] && active[v]) s.push_back(v);
    truth = oracle_bfs_within(g, s, active);
  }

  std::vector<std::uint32_t> labels(n, kInfinity);
  for (Vertex v = 0; v < n; ++v)
    if (source[v] && active[v]) labels[v] = 0;

  // Step 1: cluster-level sources and active set, then a search on the cluster graph.
  std::vector<std::uint32_t> touched;
  for (std::uint32_t c = 0; c < k; ++c)
    for (Vertex v : cl.members[c])
      if (active[v]) {
        touched.push_back(c);
        break;
      }
  std::vector<std::pair<Vertex, Payload>> flags;
  for (Vertex v = 0; v < n; ++v)
    if (active[v]) flags.push_back({v, number(1, 1)});
  auto a_hit = vc.up_cast(touched, flags);
  flags.clear();
  for (Vertex v = 0; v < n; ++v)
    if (active[v] && source[v]) flags.push_back({v, number(1, 1)});
  auto s_hit = vc.up_cast(touched, flags);
  std::vector<char> a_star(k, 0), s_star(k, 0);
  for (std::uint32_t c = 0; c < k; ++c) {
    a_star[c] = a_hit[c].has_value();
    s_star[c] = s_hit[c].has_value() && a_star[c];
  }

  const std::uint64_t top = d_star(params_.w, params_.inv_beta, depth);
  auto x0 = run(r + 1, s_star, a_star, top);

  // Member copies (lo, hi) drive X_i; centre copies (clo, chi) drive cluster decisions.
  std::vector<double> lo(n, 0.0), hi(n, kNever), clo(k, kNever), chi(k, kNever);
  std::vector<char> kind(k, 0);  // 0 automatic, 1 special, 2 initial
  auto lower_of = [&](std::uint32_t x) { return x == kInfinity ? kNever : x * ib / w; };
  {
    const unsigned width = bits_for(top + 2);
    std::vector<std::pair<std::uint32_t, Payload>> casts;
    for (std::uint32_t c = 0; c < k; ++c)
      if (a_star[c]) casts.push_back({c, number(encode(x0[c], top), width)});
    auto got = vc.down_cast(casts);
    for (Vertex v = 0; v < n; ++v) {
      if (!active[v] || !got[v]) continue;
      lo[v] = lower_of(decode((*got[v])[0], top));
      hi[v] = std::max(w * ib, w * w * lo[v]);
    }
    for (std::uint32_t c = 0; c < k; ++c)
      if (a_star[c]) {
        clo[c] = lower_of(x0[c]);
        chi[c] = std::max(w * ib, w * w * clo[c]);
        kind[c] = 2;
      }
  }

  // Step 2.
  std::vector<char> act(active);
  for (Vertex v = 0; v < n; ++v)
    if (act[v] && lo[v] == kNever) act[v] = 0;
  for (std::uint32_t c = 0; c < k; ++c)
    if (a_star[c] && clo[c] == kNever) a_star[c] = 0;

  // Cluster-level: distance from the wavefront to the cluster's unsettled part.
  auto check_brackets = [&](std::uint64_t front) {
    if (!instrumented_) return;
    for (std::uint32_t c = 0; c < k; ++c) {
      if (!a_star[c]) continue;
      std::uint32_t near = kInfinity;
      for (Vertex v : cl.members[c])
        if (act[v] && truth[v] != kInfinity && truth[v] >= front) near = std::min(near, truth[v]);
      if (near == kInfinity || near > depth) continue;
      const double gap = double(near - front);
      ++stats_.bracket_checks;
      const bool low = clo[c] > gap + 1e-9;
      stats_.bracket_violations += low || chi[c] < gap - 1e-9;
      stats_.lower_violations += low;
    }
  };
  check_brackets(0);

  const std::uint64_t stages = (depth + params_.inv_beta - 1) / params_.inv_beta;
  const ZSequence zs(top);
  std::vector<std::uint32_t> x_count(n, 0), g_count(k, 0);
  std::vector<Vertex> members;
  std::vector<char> in_ups(k, 0), in_w(k, 0);
  const unsigned label_width = bits_for(stages * params_.inv_beta + 2);

  for (std::uint64_t i = 0; i < stages; ++i) {
    const std::uint64_t front = i * params_.inv_beta;
    // Step 4.
    members.clear();
    for (Vertex v = 0; v < n; ++v)
      if (act[v] && lo[v] <= ib) members.push_back(v);
    if (instrumented_) {
      std::vector<char> in_x(n, 0);
      for (Vertex v : members) in_x[v] = 1;
      for (Vertex v = 0; v < n; ++v)
        if (act[v] && !in_x[v] && truth[v] != kInfinity && truth[v] >= front && truth[v] <= front + params_.inv_beta &&
            truth[v] <= depth)
          ++stats_.coverage_violations;
    }
    for (Vertex v : members) ++x_count[v];

    // Step 5: beta^-1 calls among X_i.
    {
      std::vector<Vertex> senders, waiting;
      for (Vertex v : members)
        if (labels[v] == kInfinity) waiting.push_back(v);
      for (std::uint64_t step = 1; step <= params_.inv_beta; ++step) {
        const std::uint64_t label = front + step - 1;
        const std::uint64_t left = params_.inv_beta - step + 1;
        senders.clear();
        for (Vertex v : members)
          if (labels[v] == label) senders.push_back(v);
        if (senders.empty()) {
          ch.skip_calls({}, waiting, left);
          break;
        }
        if (waiting.empty()) {
          ch.skip_calls(senders, {}, 1);
          ch.advance(ch.call_length() * (left - 1));
          break;
        }
        Delivery got = ch.broadcast(senders, [&](Vertex) { return number(label, label_width); }, waiting);
        std::size_t keep = 0;
        for (std::size_t j = 0; j < waiting.size(); ++j) {
          if (got[j])
            labels[waiting[j]] = static_cast<std::uint32_t>((*got[j])[0] + 1);
          else
            waiting[keep++] = waiting[j];
        }
        waiting.resize(keep);
      }
    }

    // Step 6.
    const std::uint64_t next_front = front + params_.inv_beta;
    for (Vertex v = 0; v < n; ++v)
      if (act[v] && labels[v] != kInfinity && labels[v] < next_front) act[v] = 0;
    if (i + 1 == stages) break;  // later estimates would never be read

    // Step 7: special update on the clusters that may be near the next wavefront.
    const std::uint64_t z = zs[i + 1];
    std::vector<std::uint32_t> ups;
    for (std::uint32_t c = 0; c < k; ++c)
      if (a_star[c] && clo[c] <= (double(z) + 1) * ib) ups.push_back(c);
    std::fill(in_ups.begin(), in_ups.end(), 0);
    std::fill(in_w.begin(), in_w.end(), 0);
    std::vector<char> updated(n, 0);
    if (!ups.empty()) {
      std::vector<char> ups_mask(k, 0);
      for (auto c : ups) ups_mask[c] = 1;
      std::vector<std::pair<Vertex, Payload>> wave, alive;
      for (auto c : ups)
        for (Vertex v : cl.members[c])
          if (act[v]) {
            alive.push_back({v, number(1, 1)});
            if (labels[v] == next_front) wave.push_back({v, number(1, 1)});
          }
      auto w_hit = vc.up_cast(ups, wave);
      auto a_now = vc.up_cast(ups, alive);
      std::vector<std::uint32_t> kept;
      for (auto c : ups) {
        if (!a_now[c]) {
          a_star[c] = 0;
          continue;
        }
        kept.push_back(c);
        in_ups[c] = 1;
        in_w[c] = w_hit[c].has_value();
        ++g_count[c];
      }
      ups.swap(kept);
      ++stats_.special_updates;
      auto x = run(r + 1, in_w, in_ups, z);

      const unsigned width = bits_for(z + 2);
      std::vector<std::pair<std::uint32_t, Payload>> casts;
      for (auto c : ups) casts.push_back({c, number(encode(x[c], z), width)});
      auto got = vc.down_cast(casts);
      auto special = [&](double& l, double& u, std::uint32_t xc) {
        if (xc == kInfinity) {
          l = double(z) * ib + 1;
          u = u - ib;
        } else {
          l = std::min(double(z) * ib + 1, xc * ib / w);
          u = std::min(u - ib, std::max<double>(xc, 1) * ib * w);
        }
      };
      for (auto c : ups) {
        for (Vertex v : cl.members[c])
          if (act[v] && got[v]) {
            special(lo[v], hi[v], decode((*got[v])[0], z));
            updated[v] = 1;
          }
        special(clo[c], chi[c], x[c]);
        kind[c] = 1;
        if (instrumented_) {
          ++stats_.upper_checks;
          if (chi[c] > std::max(2 * w * w * clo[c], 2 * w * w * ib) + 1e-9) ++stats_.upper_violations;
        }
      }
    }
    // Step 8.
    for (Vertex v = 0; v < n; ++v)
      if (act[v] && !updated[v]) {
        lo[v] -= ib;
        hi[v] -= ib;
      }
    for (std::uint32_t c = 0; c < k; ++c)
      if (a_star[c] && !in_ups[c]) {
        clo[c] -= ib;
        chi[c] -= ib;
        kind[c] = 0;
      }
    check_brackets(next_front);

    if (dump_)
      for (std::uint32_t c = 0; c < k; ++c)
        if (a_star[c])
          *dump_ << r << ',' << call << ',' << i + 1 << ',' << c << ',' << clo[c] << ',' << chi[c] << ','
                 << (kind[c] == 1 ? "special" : "automatic") << ',' << int(in_ups[c]) << ',' << int(in_w[c]) << '\n';

    bool any = false;
    for (std::uint32_t c = 0; c < k && !any; ++c) any = a_star[c];
    for (Vertex v = 0; v < n && !any; ++v) any = act[v];
    if (!any) break;  // nothing can happen in the remaining stages
  }

  for (Vertex v = 0; v < n; ++v) {
    if (!active[v] || labels[v] > depth) labels[v] = kInfinity;
    stats_.max_x_count = std::max<std::uint64_t>(stats_.max_x_count, x_count[v]);
  }
  const double lg = std::max(1.0, std::log2(double(depth)));
  for (std::uint32_t c = 0; c < k; ++c) {
    stats_.max_g_count = std::max<std::uint64_t>(stats_.max_g_count, g_count[c]);
    stats_.max_g_ratio = std::max(stats_.max_g_ratio, g_count[c] / lg);
  }
  return labels;
}

BfsOutcome bfs_driver(BroadcastChannel& base, Vertex source, std::uint64_t seed, const BfsOptions& opt) {
  const std::size_t n = base.size();
  BfsOutcome out;
  std::vector<char> all(n, 1);
  for (std::uint64_t d0 = 1;; d0 *= 2) {
    BfsParams p = choose_params(n, d0);
    if (opt.inv_beta) {
      p.inv_beta = opt.inv_beta;
      if (p.inv_beta >= d0) p.max_depth = 0;
    }
    if (opt.w) p.w = opt.w;
    p.contention = opt.contention;
    p.set_size = opt.set_size;
    if (opt.trivial) p.max_depth = 0;
    BfsEngine engine(base, p, hash_key(seed, d0), n);
    engine.set_instrumented(opt.instrumented);
    if (opt.stage_dump) engine.set_stage_dump(opt.stage_dump);
    out.labels = engine.recursive_bfs({source}, all, d0);
    out.stats.merge(engine.stats());
    out.d0 = d0;
    out.complete = std::none_of(out.labels.begin(), out.labels.end(), [](std::uint32_t x) { return x == kInfinity; });
    if (out.complete || d0 >= n) break;
  }
  return out;
}

}  // namespace rnsim
