#include "rnsim/vnet.hpp"

#include <algorithm>
#include <map>
#include <queue>

namespace rnsim {

VirtualChannel::VirtualChannel(BroadcastChannel& under, Clustering clustering, std::uint32_t radius_bound,
                               Fidelity fidelity)
    : under_(&under),
      under_virtual_(dynamic_cast<VirtualChannel*>(&under) != nullptr),
      clustering_(std::move(clustering)),
      graph_(build_cluster_graph(under.topology(), clustering_)),
      radius_bound_(radius_bound),
      fidelity_(fidelity),
      id_bits_(bits_for(under.size())) {
  const std::size_t k = clustering_.cluster_count();
  if (clustering_.max_layer() >= radius_bound_ && k > 0)
    throw std::invalid_argument("cluster radius exceeds the cast schedule");
  bits_.assign(k, std::vector<std::uint64_t>((clustering_.set_size + 63) / 64, 0));
  layer_start_.resize(k);
  for (std::uint32_t c = 0; c < k; ++c) {
    for (auto j : clustering_.shared_set[c]) bits_[c][j >> 6] |= 1ULL << (j & 63);
    const auto& m = clustering_.members[c];
    auto& ls = layer_start_[c];
    ls.assign(clustering_.radius(c) + 2, 0);
    for (std::uint32_t l = 0; l + 1 < ls.size(); ++l) {
      std::uint32_t pos = ls[l];
      while (pos < m.size() && layer(m[pos]) == l) ++pos;
      ls[l + 1] = pos;
    }
  }
  lb_calls_.assign(k, 0);
  role_.assign(k, 0);
  const std::size_t n = under.size();
  has_.assign(n, 0);
  msg_.resize(n);
  mark_.assign(n, 0);
  cursor_.assign(n, 0);
}

std::span<const Vertex> VirtualChannel::layer_members(std::uint32_t c, std::uint32_t l) const {
  const auto& ls = layer_start_[c];
  if (l + 1 >= ls.size()) return {};
  const auto& m = clustering_.members[c];
  return {m.data() + ls[l], m.data() + ls[l + 1]};
}

void VirtualChannel::set_roles(const std::vector<std::uint32_t>& clusters, char role) {
  for (auto c : clusters) role_[c] = role;
}

void VirtualChannel::clear_holders(const std::vector<std::uint32_t>& clusters) {
  for (auto c : clusters)
    for (Vertex v : clustering_.members[c]) has_[v] = 0;
}

// ---------------------------------------------------------------- reference

void VirtualChannel::full_down(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge) {
  std::uint32_t max_r = 0;
  for (auto c : clusters) max_r = std::max(max_r, clustering_.radius(c));
  const Wide unit = under_->call_length();
  const std::uint32_t ell = set_size();
  LbRequest req;
  for (std::uint32_t i = 1; i <= std::min(radius_bound_, max_r + 1); ++i)
    for (std::uint32_t j = 0; j < ell; ++j) {
      req.senders.clear();
      req.receivers.clear();
      for (auto c : clusters) {
        if (!in_set(c, j)) continue;
        for (Vertex u : layer_members(c, i - 1))
          if (has_[u]) req.senders.push_back({u, wrap(msg_[u], c)});
        for (Vertex v : layer_members(c, i)) req.receivers.push_back(v);
      }
      if (req.senders.empty() && req.receivers.empty()) continue;
      Delivery d = under_->execute(req, t0 + (Wide{i - 1} * ell + j) * unit, charge);
      for (std::size_t k = 0; k < d.size(); ++k) {
        Vertex v = req.receivers[k];
        if (d[k] && !has_[v] && d[k]->back() == graph_.center[cluster_of(v)]) {
          has_[v] = 1;
          msg_[v] = *d[k];
          msg_[v].pop();
        }
      }
    }
}

void VirtualChannel::full_up(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge) {
  std::uint32_t max_r = 0;
  for (auto c : clusters) max_r = std::max(max_r, clustering_.radius(c));
  const Wide unit = under_->call_length();
  const std::uint32_t ell = set_size();
  LbRequest req;
  for (std::int64_t r = std::min<std::int64_t>(max_r, radius_bound_ - 1); r >= 0; --r) {
    const auto recv = static_cast<std::uint32_t>(r);
    const std::uint64_t stage = radius_bound_ - recv - 1;
    for (std::uint32_t j = 0; j < ell; ++j) {
      req.senders.clear();
      req.receivers.clear();
      for (auto c : clusters) {
        if (!in_set(c, j)) continue;
        for (Vertex u : layer_members(c, recv + 1))
          if (has_[u]) req.senders.push_back({u, wrap(msg_[u], c)});
        for (Vertex v : layer_members(c, recv)) req.receivers.push_back(v);
      }
      if (req.senders.empty() && req.receivers.empty()) continue;
      Delivery d = under_->execute(req, t0 + (Wide{stage} * ell + j) * unit, charge);
      for (std::size_t k = 0; k < d.size(); ++k) {
        Vertex v = req.receivers[k];
        if (d[k] && !has_[v] && d[k]->back() == graph_.center[cluster_of(v)]) {
          has_[v] = 1;
          msg_[v] = *d[k];
          msg_[v].pop();
        }
      }
    }
  }
}

// ---------------------------------------------------------------- fast

void VirtualChannel::fast_stage(std::vector<Vertex>& pending, std::uint32_t sender_layer, Wide t0,
                                std::uint64_t stage_index) {
  using Item = std::pair<std::uint32_t, Vertex>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  const char role = pending.empty() ? 0 : role_[cluster_of(pending.front())];
  for (Vertex v : pending) {
    const auto& s = clustering_.shared_set[cluster_of(v)];
    if (s.empty()) continue;
    cursor_[v] = 0;
    heap.push({s[0], v});
  }
  const Wide unit = under_->call_length();
  const Graph& g = under_->topology();
  LbRequest req;
  while (!heap.empty()) {
    const std::uint32_t j = heap.top().first;
    req.senders.clear();
    req.receivers.clear();
    while (!heap.empty() && heap.top().first == j) {
      req.receivers.push_back(heap.top().second);
      heap.pop();
    }
    for (Vertex v : req.receivers)
      for (Vertex u : g.neighbors(v)) {
        auto c = cluster_of(u);
        if (!mark_[u] && has_[u] && role_[c] == role && layer(u) == sender_layer && in_set(c, j)) {
          mark_[u] = 1;
          req.senders.push_back({u, wrap(msg_[u], c)});
        }
      }
    for (auto& s : req.senders) mark_[s.v] = 0;
    Delivery d = under_->execute(req, t0 + (Wide{stage_index} * set_size() + j) * unit, false);
    for (std::size_t k = 0; k < d.size(); ++k) {
      Vertex v = req.receivers[k];
      auto c = cluster_of(v);
      if (d[k] && d[k]->back() == graph_.center[c]) {
        has_[v] = 1;
        msg_[v] = *d[k];
        msg_[v].pop();
      } else if (++cursor_[v] < clustering_.shared_set[c].size()) {
        heap.push({clustering_.shared_set[c][cursor_[v]], v});
      }
    }
  }
}

void VirtualChannel::fast_down(const std::vector<std::uint32_t>& clusters, Wide t0) {
  const Graph& g = under_->topology();
  std::uint32_t max_r = 0;
  for (auto c : clusters) max_r = std::max(max_r, clustering_.radius(c));
  std::vector<Vertex> pending;
  for (std::uint32_t i = 1; i <= max_r; ++i) {
    pending.clear();
    for (auto c : clusters)
      for (Vertex v : layer_members(c, i))
        for (Vertex u : g.neighbors(v))
          if (has_[u] && cluster_of(u) == c && layer(u) + 1 == i) {
            pending.push_back(v);
            break;
          }
    fast_stage(pending, i - 1, t0, i - 1);
  }
}

void VirtualChannel::fast_up(const std::vector<std::uint32_t>& clusters, Wide t0) {
  const Graph& g = under_->topology();
  std::uint32_t deepest = 0;
  for (auto c : clusters)
    for (Vertex v : clustering_.members[c])
      if (has_[v]) deepest = std::max(deepest, layer(v));
  std::vector<Vertex> pending;
  for (std::int64_t k = static_cast<std::int64_t>(deepest) - 1; k >= 0; --k) {
    const auto recv = static_cast<std::uint32_t>(k);
    pending.clear();
    for (auto c : clusters)
      for (Vertex v : layer_members(c, recv)) {
        if (has_[v]) continue;
        for (Vertex u : g.neighbors(v))
          if (has_[u] && cluster_of(u) == c && layer(u) == recv + 1) {
            pending.push_back(v);
            break;
          }
      }
    fast_stage(pending, recv + 1, t0, radius_bound_ - recv - 1);
  }
}

void VirtualChannel::down_stages(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge) {
  if (fidelity_ == Fidelity::Reference)
    full_down(clusters, t0, charge);
  else
    fast_down(clusters, t0);
}

void VirtualChannel::up_stages(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge) {
  if (fidelity_ == Fidelity::Reference)
    full_up(clusters, t0, charge);
  else
    fast_up(clusters, t0);
}

// ---------------------------------------------------------------- calls

Delivery VirtualChannel::execute(const LbRequest& req, Wide at, bool charge) {
  const Graph& g = under_->topology();
  const Graph& cg = graph_.graph;
  std::vector<std::uint32_t> send, recv;
  for (const auto& s : req.senders) send.push_back(s.v);
  recv.assign(req.receivers.begin(), req.receivers.end());

  if (fidelity_ == Fidelity::Fast) {
    if (charge) account(send, recv, 1);
    // Only receivers next to a sending cluster, and senders next to those, matter.
    set_roles(send, 1);
    std::vector<std::uint32_t> live_recv, live_send;
    for (auto c : recv)
      for (Vertex d : cg.neighbors(c))
        if (role_[d] == 1) {
          live_recv.push_back(c);
          break;
        }
    // Down-casts of neighbouring sending clusters interfere, so keep every
    // sending component that touches a live receiver.
    for (auto c : live_recv)
      for (Vertex d : cg.neighbors(c))
        if (role_[d] == 1) {
          role_[d] = 3;
          live_send.push_back(d);
        }
    for (std::size_t k = 0; k < live_send.size(); ++k)
      for (Vertex d : cg.neighbors(live_send[k]))
        if (role_[d] == 1) {
          role_[d] = 3;
          live_send.push_back(d);
        }
    set_roles(send, 0);
    send.swap(live_send);
    recv.swap(live_recv);
  } else if (charge) {
    for (auto c : send) ++lb_calls_[c];
    for (auto c : recv) ++lb_calls_[c];
  }

  Delivery out(req.receivers.size());
  if (recv.empty() && fidelity_ == Fidelity::Fast) return out;

  set_roles(send, 1);
  set_roles(recv, 2);
  for (const auto& s : req.senders)
    if (role_[s.v] == 1) {
      Vertex ctr = graph_.center[s.v];
      has_[ctr] = 1;
      msg_[ctr] = s.payload;
    }
  down_stages(send, at, charge);

  LbRequest mid;
  if (fidelity_ == Fidelity::Reference) {
    for (auto c : send)
      for (Vertex u : clustering_.members[c])
        if (has_[u]) mid.senders.push_back({u, wrap(msg_[u], c)});
    for (auto c : recv)
      for (Vertex v : clustering_.members[c]) mid.receivers.push_back(v);
  } else {
    for (auto c : recv)
      for (Vertex v : clustering_.members[c]) {
        bool any = false;
        for (Vertex u : g.neighbors(v))
          if (role_[cluster_of(u)] == 1 && has_[u]) {
            any = true;
            if (!mark_[u]) {
              mark_[u] = 1;
              mid.senders.push_back({u, wrap(msg_[u], cluster_of(u))});
            }
          }
        if (any) mid.receivers.push_back(v);
      }
    for (auto& s : mid.senders) mark_[s.v] = 0;
  }
  Delivery d = under_->execute(mid, at + cast_steps() * under_->call_length(),
                               charge && fidelity_ == Fidelity::Reference);
  clear_holders(send);
  for (std::size_t k = 0; k < d.size(); ++k)
    if (d[k]) {
      Vertex v = mid.receivers[k];
      has_[v] = 1;
      msg_[v] = *d[k];
      msg_[v].pop();
    }
  up_stages(recv, at + (cast_steps() + 1) * under_->call_length(), charge);

  for (std::size_t k = 0; k < req.receivers.size(); ++k) {
    Vertex ctr = graph_.center[req.receivers[k]];
    if (has_[ctr]) out[k] = msg_[ctr];
  }
  clear_holders(recv);
  set_roles(send, 0);
  set_roles(recv, 0);
  return out;
}

std::vector<std::optional<Payload>> VirtualChannel::down_cast(const Sources& sources) {
  std::vector<std::uint32_t> clusters;
  for (const auto& [c, p] : sources) {
    clusters.push_back(c);
    has_[graph_.center[c]] = 1;
    msg_[graph_.center[c]] = p;
  }
  set_roles(clusters, 1);
  if (fidelity_ == Fidelity::Fast)
    for (auto c : clusters) account_down(c, 1);
  down_stages(clusters, now(), true);
  std::vector<std::optional<Payload>> out(under_->size());
  for (auto c : clusters)
    for (Vertex v : clustering_.members[c])
      if (has_[v]) out[v] = msg_[v];
  clear_holders(clusters);
  set_roles(clusters, 0);
  advance(cast_length());
  return out;
}

std::vector<std::optional<Payload>> VirtualChannel::up_cast(const std::vector<std::uint32_t>& clusters,
                                                            const std::vector<std::pair<Vertex, Payload>>& sources) {
  set_roles(clusters, 2);
  for (const auto& [v, p] : sources) {
    if (role_[cluster_of(v)] != 2) throw std::invalid_argument("up_cast source outside participating clusters");
    has_[v] = 1;
    msg_[v] = p;
  }
  if (fidelity_ == Fidelity::Fast) {
    // Holders after a successful cast: sources and every member with a holder below it.
    const Graph& g = under_->topology();
    std::vector<char> holder(under_->size(), 0);
    for (auto c : clusters) {
      const auto& m = clustering_.members[c];
      for (auto it = m.rbegin(); it != m.rend(); ++it) {
        Vertex v = *it;
        holder[v] = has_[v];
        for (Vertex u : g.neighbors(v))
          if (!holder[v] && holder[u] && cluster_of(u) == c && layer(u) == layer(v) + 1) holder[v] = 1;
      }
    }
    for (auto c : clusters)
      for (Vertex v : clustering_.members[c]) {
        std::vector<Vertex> near;
        for (Vertex u : g.neighbors(v))
          if (holder[u] && role_[cluster_of(u)] == 2 && layer(u) == layer(v) + 1) near.push_back(u);
        account_listen(v, c, near, 1);
        if (holder[v] && layer(v) >= 1) under_->account_sender(v, clustering_.shared_set[c].size());
      }
  }
  up_stages(clusters, now(), true);
  std::vector<std::optional<Payload>> out(graph_.graph.size());
  for (auto c : clusters)
    if (has_[graph_.center[c]]) out[c] = msg_[graph_.center[c]];
  clear_holders(clusters);
  set_roles(clusters, 0);
  advance(cast_length());
  return out;
}

// ---------------------------------------------------------------- metering

void VirtualChannel::account_listen(Vertex v, std::uint32_t own, const std::vector<Vertex>& near,
                                    std::uint64_t times) {
  const auto& s = clustering_.shared_set[own];
  if (s.empty()) return;
  if (!under_virtual_) {
    under_->account_receiver(v, {}, s.size() * times);
    return;
  }
  bool foreign = false;
  for (Vertex u : near) foreign |= cluster_of(u) != own;
  if (!foreign) {
    under_->account_receiver(v, near, s.size() * times);
    return;
  }
  // Foreign neighbours transmit only in steps of their own index sets.
  std::map<std::vector<Vertex>, std::uint64_t> groups;
  std::vector<Vertex> ctx;
  for (auto j : s) {
    ctx.clear();
    for (Vertex u : near)
      if (cluster_of(u) == own || in_set(cluster_of(u), j)) ctx.push_back(u);
    groups[ctx] += times;
  }
  for (const auto& [c, k] : groups) under_->account_receiver(v, c, k);
}

void VirtualChannel::account_down(std::uint32_t c, std::uint64_t times) {
  const Graph& g = under_->topology();
  const std::uint64_t steps = clustering_.shared_set[c].size();
  std::vector<Vertex> near;
  for (Vertex v : clustering_.members[c]) {
    under_->account_sender(v, steps * times);
    if (layer(v) == 0) continue;
    near.clear();
    if (under_virtual_)
      for (Vertex u : g.neighbors(v))
        if (role_[cluster_of(u)] == 1 && layer(u) + 1 == layer(v)) near.push_back(u);
    account_listen(v, c, near, times);
  }
}

void VirtualChannel::account_impl(std::span<const Vertex> senders, std::span<const Vertex> receivers,
                                  std::uint64_t times, bool charge_senders, bool charge_receivers) {
  const Graph& g = under_->topology();
  for (Vertex c : senders) role_[c] = 1;
  for (Vertex c : receivers) role_[c] = 2;
  if (charge_senders)
    for (Vertex c : senders) {
      lb_calls_[c] += times;
      account_down(c, times);
      for (Vertex v : clustering_.members[c]) under_->account_sender(v, times);
    }
  if (charge_receivers) {
    std::vector<Vertex> near;
    for (Vertex c : receivers) {
      lb_calls_[c] += times;
      const auto& m = clustering_.members[c];
      // Step 2: every member listens once; those next to a sender become sources.
      for (Vertex v : m) {
        near.clear();
        for (Vertex u : g.neighbors(v))
          if (role_[cluster_of(u)] == 1) near.push_back(u);
        under_->account_receiver(v, near, times);
        has_[v] = !near.empty();
      }
      // Up-cast holders, deepest layer first.
      for (auto it = m.rbegin(); it != m.rend(); ++it) {
        Vertex v = *it;
        if (has_[v]) continue;
        for (Vertex u : g.neighbors(v))
          if (has_[u] && cluster_of(u) == c && layer(u) == layer(v) + 1) {
            has_[v] = 1;
            break;
          }
      }
    }
    for (Vertex c : receivers) {
      const std::uint64_t steps = clustering_.shared_set[c].size();
      for (Vertex v : clustering_.members[c]) {
        near.clear();
        if (under_virtual_)
          for (Vertex u : g.neighbors(v))
            if (has_[u] && role_[cluster_of(u)] == 2 && layer(u) == layer(v) + 1) near.push_back(u);
        account_listen(v, c, near, times);
        if (has_[v] && layer(v) >= 1) under_->account_sender(v, steps * times);
      }
    }
    for (Vertex c : receivers)
      for (Vertex v : clustering_.members[c]) has_[v] = 0;
  }
  for (Vertex c : senders) role_[c] = 0;
  for (Vertex c : receivers) role_[c] = 0;
}

void VirtualChannel::account(std::span<const Vertex> senders, std::span<const Vertex> receivers,
                             std::uint64_t times) {
  account_impl(senders, receivers, times, true, true);
}

void VirtualChannel::account_sender(Vertex c, std::uint64_t times) {
  Vertex one[] = {c};
  account_impl(one, {}, times, true, false);
}

void VirtualChannel::account_receiver(Vertex c, std::span<const Vertex> context, std::uint64_t times) {
  Vertex one[] = {c};
  account_impl(context, one, times, false, true);
}

}  // namespace rnsim
