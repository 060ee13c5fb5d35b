#include "rnsim/diam.hpp"

#include <algorithm>
#include <cmath>

namespace rnsim {

std::vector<std::vector<Vertex>> BfsTree::layers() const {
  std::vector<std::vector<Vertex>> out(std::size_t{depth} + 1);
  for (Vertex v = 0; v < label.size(); ++v)
    if (label[v] <= depth) out[label[v]].push_back(v);
  return out;
}

bool valid_tree(const Graph& g, const BfsTree& t) {
  if (t.label.size() != g.size() || t.root >= g.size() || t.label[t.root] != 0) return false;
  for (Vertex v = 0; v < g.size(); ++v) {
    const auto l = t.label[v];
    if (l == kUnreached || v == t.root) continue;
    if (l == 0) return false;
    bool parent = false;
    for (Vertex u : g.neighbors(v)) {
      if (t.label[u] != kUnreached && t.label[u] + 1 < l) return false;
      parent |= t.label[u] == l - 1;
    }
    if (!parent) return false;
  }
  return true;
}

namespace {

// One call; empty sides are metered without simulating the channel.
void call(BroadcastChannel& ch, const std::vector<Vertex>& senders, const std::vector<Payload>& msg,
          const std::vector<Vertex>& receivers, std::vector<char>& has, std::vector<Payload>& got) {
  if (senders.empty() || receivers.empty()) {
    if (senders.empty() && receivers.empty())
      ch.advance(ch.call_length());
    else
      ch.skip_calls(senders, receivers, 1);
    return;
  }
  Delivery d = ch.broadcast(senders, [&](Vertex v) { return msg[v]; }, receivers);
  for (std::size_t k = 0; k < receivers.size(); ++k)
    if (d[k]) {
      has[receivers[k]] = 1;
      got[receivers[k]] = *d[k];
    }
}

// Deepest layer first; a holder stops listening once it has something to send.
void ascend(BroadcastChannel& ch, const std::vector<std::vector<Vertex>>& layers, std::vector<char>& has,
            std::vector<Payload>& msg) {
  std::vector<Vertex> senders, receivers;
  for (std::size_t t = layers.size() - 1; t >= 1; --t) {
    senders.clear();
    receivers.clear();
    for (Vertex v : layers[t])
      if (has[v]) senders.push_back(v);
    for (Vertex v : layers[t - 1])
      if (!has[v]) receivers.push_back(v);
    call(ch, senders, msg, receivers, has, msg);
  }
}

void descend(BroadcastChannel& ch, const std::vector<std::vector<Vertex>>& layers, std::vector<char>& has,
             std::vector<Payload>& msg) {
  std::vector<Vertex> senders, receivers;
  for (std::size_t t = 1; t < layers.size(); ++t) {
    senders.clear();
    receivers.clear();
    for (Vertex v : layers[t - 1])
      if (has[v]) senders.push_back(v);
    for (Vertex v : layers[t]) receivers.push_back(v);
    call(ch, senders, msg, receivers, has, msg);
  }
}

unsigned ceil_log2(std::uint64_t x) {
  unsigned k = 0;
  while ((std::uint64_t{1} << k) < x) ++k;
  return k;
}

// Per-device binary search for the least (Min) or greatest (Max) value in
// [lo, hi] among holders. A device that misses a verdict takes it as "no".
void search(BroadcastChannel& ch, const std::vector<std::vector<Vertex>>& layers, Vertex root,
            const std::vector<char>& holder, const std::vector<std::uint64_t>& value, std::vector<std::uint64_t>& lo,
            std::vector<std::uint64_t>& hi, unsigned phases, Extreme mode) {
  const std::size_t n = holder.size();
  std::vector<char> has(n);
  std::vector<Payload> msg(n);
  const Payload yes = Payload{}.push(1, 1);
  for (unsigned p = 0; p < phases; ++p) {
    for (Vertex v = 0; v < n; ++v) {
      const std::uint64_t mid = lo[v] + (hi[v] - lo[v]) / 2;
      const bool in = mode == Extreme::Min ? value[v] >= lo[v] && value[v] <= mid
                                           : value[v] > mid && value[v] <= hi[v];
      has[v] = holder[v] && lo[v] < hi[v] && in;
      msg[v] = yes;
    }
    ascend(ch, layers, has, msg);
    msg[root] = Payload{}.push(has[root] ? 1 : 0, 1);
    for (Vertex v = 0; v < n; ++v) has[v] = v == root;
    descend(ch, layers, has, msg);
    for (Vertex v = 0; v < n; ++v) {
      if (lo[v] >= hi[v]) continue;
      const std::uint64_t mid = lo[v] + (hi[v] - lo[v]) / 2;
      const bool verdict = has[v] && msg[v][0] == 1;
      if (mode == Extreme::Min)
        (verdict ? hi[v] : lo[v]) = verdict ? mid : mid + 1;
      else
        (verdict ? lo[v] : hi[v]) = verdict ? mid + 1 : mid;
    }
  }
}

}  // namespace

ExtremumResult find_extremum(BroadcastChannel& ch, const BfsTree& tree, const std::vector<std::uint64_t>& keys,
                             const std::vector<Payload>& payloads, std::uint64_t max_key, Extreme mode) {
  const std::size_t n = ch.size();
  const auto layers = tree.layers();
  ExtremumResult out;
  out.key_phases = ceil_log2(std::max<std::uint64_t>(max_key, 1));
  out.id_phases = ceil_log2(std::max<std::size_t>(n, 1));

  std::vector<char> holder(n);
  for (Vertex v = 0; v < n; ++v) holder[v] = keys[v] >= 1 && keys[v] <= max_key;
  std::vector<std::uint64_t> lo(n, 1), hi(n, std::max<std::uint64_t>(max_key, 1));
  search(ch, layers, tree.root, holder, keys, lo, hi, out.key_phases, mode);

  std::vector<char> tied(n);
  std::vector<std::uint64_t> ids(n), id_lo(n, 0), id_hi(n, n ? n - 1 : 0);
  for (Vertex v = 0; v < n; ++v) {
    tied[v] = holder[v] && keys[v] == lo[v];
    ids[v] = v;
  }
  search(ch, layers, tree.root, tied, ids, id_lo, id_hi, out.id_phases, Extreme::Min);

  // Witness ascent, then the root floods the payload or the error flag.
  std::vector<char> has(n, 0);
  std::vector<Payload> msg(n);
  for (Vertex v = 0; v < n; ++v)
    if (tied[v] && id_lo[v] == v) {
      has[v] = 1;
      msg[v] = payloads[v];
    }
  ascend(ch, layers, has, msg);
  const Vertex root = tree.root;
  out.found = has[root];
  out.key = lo[root];
  out.witness = static_cast<Vertex>(id_lo[root]);
  out.payload = out.found ? msg[root] : Payload{};
  Payload flood = out.payload;
  flood.push(out.found ? 1 : 0, 1);
  std::fill(has.begin(), has.end(), 0);
  has[root] = 1;
  msg[root] = flood;
  descend(ch, layers, has, msg);
  out.informed.assign(n, 0);
  for (Vertex v = 0; v < n; ++v) out.informed[v] = has[v] && msg[v] == flood;
  return out;
}

namespace {

struct Runner {
  BroadcastChannel& ch;
  std::uint64_t seed;
  const BfsOptions& opt;
  DiamResult& res;

  BfsTree bfs(Vertex s, std::uint64_t tag) {
    auto o = bfs_driver(ch, s, hash_key(seed, tag, s), opt);
    ++res.bfs_runs;
    return {s, std::move(o.labels), static_cast<std::uint32_t>(o.d0)};
  }
};

void note_max(std::vector<std::uint32_t>& seen, const BfsTree& t) {
  for (Vertex v = 0; v < seen.size(); ++v)
    if (t.label[v] != kInfinity) seen[v] = std::max(seen[v], t.label[v]);
}

std::uint32_t publish_max(BroadcastChannel& ch, const BfsTree& tree, const std::vector<std::uint32_t>& seen,
                          DiamResult& res) {
  const std::size_t n = ch.size();
  std::vector<std::uint64_t> keys(n);
  for (Vertex v = 0; v < n; ++v) keys[v] = seen[v] == kInfinity ? 0 : std::uint64_t{seen[v]} + 1;
  auto r = find_extremum(ch, tree, keys, std::vector<Payload>(n), n + 1, Extreme::Max);
  res.ok &= r.found;
  return r.found ? static_cast<std::uint32_t>(r.key - 1) : 0;
}

}  // namespace

DiamResult approx_diameter_2(BroadcastChannel& ch, Vertex leader, std::uint64_t seed, const BfsOptions& opt) {
  DiamResult res;
  Runner run{ch, seed, opt, res};
  BfsTree t = run.bfs(leader, 0);
  std::vector<std::uint32_t> seen(ch.size(), 0);
  for (Vertex v = 0; v < seen.size(); ++v) seen[v] = t.label[v];
  res.d_prime = publish_max(ch, t, seen, res);
  return res;
}

DiamResult approx_diameter_32(BroadcastChannel& ch, Vertex leader, std::uint64_t seed, const BfsOptions& opt,
                              std::uint32_t max_retries) {
  const std::size_t n = ch.size();
  DiamResult res;
  Runner run{ch, seed, opt, res};
  const std::vector<Payload> blank(n);
  BfsTree home = run.bfs(leader, 0);
  std::vector<std::uint32_t> seen(n, 0);
  note_max(seen, home);

  // Sample S and announce it one ID at a time.
  const double p = std::min(1.0, std::log(double(std::max<std::size_t>(n, 2))) / std::sqrt(double(n)));
  std::vector<Vertex> sample;
  for (std::uint32_t attempt = 0; sample.empty(); ++attempt) {
    if (attempt > max_retries) {
      res.ok = false;
      return res;
    }
    res.retries = attempt;
    std::vector<std::uint64_t> keys(n, 0);
    for (Vertex v = 0; v < n; ++v) {
      Rng rng = device_stream(seed, Purpose::Sample, v, attempt);
      keys[v] = std::uniform_real_distribution<double>(0.0, 1.0)(rng) < p ? 1 : 0;
    }
    for (;;) {
      auto r = find_extremum(ch, home, keys, blank, 1, Extreme::Min);
      if (!r.found) break;
      sample.push_back(r.witness);
      keys[r.witness] = 0;
    }
  }
  res.sample_size = sample.size();

  std::vector<std::uint32_t> to_sample(n, kInfinity);
  for (std::size_t k = 0; k < sample.size(); ++k) {
    BfsTree t = run.bfs(sample[k], 1 + k);
    note_max(seen, t);
    for (Vertex v = 0; v < n; ++v) to_sample[v] = std::min(to_sample[v], t.label[v]);
  }

  std::vector<std::uint64_t> keys(n);
  for (Vertex v = 0; v < n; ++v) keys[v] = to_sample[v] == kInfinity ? 0 : std::uint64_t{to_sample[v]} + 1;
  auto far = find_extremum(ch, home, keys, blank, n + 1, Extreme::Max);
  if (!far.found) {
    res.ok = false;
    return res;
  }
  res.far_vertex = far.witness;
  BfsTree from_far = run.bfs(far.witness, n + 1);
  note_max(seen, from_far);

  // The ceil(sqrt n) vertices closest to the far vertex, ties by lower ID.
  const auto want = static_cast<std::size_t>(std::ceil(std::sqrt(double(n)) - 1e-9));
  std::vector<Vertex> closest;
  for (Vertex v = 0; v < n; ++v) keys[v] = from_far.label[v] == kInfinity ? 0 : std::uint64_t{from_far.label[v]} + 1;
  while (closest.size() < want) {
    auto r = find_extremum(ch, home, keys, blank, n + 1, Extreme::Min);
    if (!r.found) break;
    closest.push_back(r.witness);
    keys[r.witness] = 0;
  }
  res.closest_size = closest.size();
  for (std::size_t k = 0; k < closest.size(); ++k) note_max(seen, run.bfs(closest[k], n + 2 + k));

  res.d_prime = publish_max(ch, home, seen, res);
  return res;
}

}  // namespace rnsim
