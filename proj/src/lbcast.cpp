#include "rnsim/lbcast.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace rnsim {

Delivery BroadcastChannel::broadcast(std::span<const Vertex> senders,
                                     const std::function<Payload(Vertex)>& payload_of,
                                     std::span<const Vertex> receivers) {
  LbRequest req;
  if (fidelity() == Fidelity::Reference) {
    for (Vertex v : senders) req.senders.push_back({v, payload_of(v)});
    req.receivers.assign(receivers.begin(), receivers.end());
    return local_broadcast(req);
  }
  const Graph& g = topology();
  mark_.resize(g.size(), 0);
  for (Vertex v : receivers) mark_[v] = 1;
  for (Vertex v : senders)
    for (Vertex u : g.neighbors(v))
      if (mark_[u]) {
        req.senders.push_back({v, payload_of(v)});
        break;
      }
  for (Vertex v : receivers) mark_[v] = 0;
  account(senders, receivers, 1);
  Delivery out(receivers.size());
  if (!req.senders.empty()) {
    for (const auto& s : req.senders) mark_[s.v] = 1;
    std::vector<std::size_t> where;
    for (std::size_t k = 0; k < receivers.size(); ++k)
      for (Vertex u : g.neighbors(receivers[k]))
        if (mark_[u]) {
          req.receivers.push_back(receivers[k]);
          where.push_back(k);
          break;
        }
    for (const auto& s : req.senders) mark_[s.v] = 0;
    Delivery live = execute(req, now(), false);
    for (std::size_t i = 0; i < where.size(); ++i) out[where[i]] = std::move(live[i]);
  }
  advance(call_length());
  return out;
}

unsigned DecayParams::slots_per_rep() const {
  unsigned t = 0;
  while ((std::uint64_t{1} << t) < std::uint64_t{delta_bound} + 1) ++t;
  return std::max(t, 1u);
}

unsigned DecayParams::repetitions() const {
  return static_cast<unsigned>(std::max(1.0, std::ceil(c_r * std::log2(1.0 / f) - 1e-9)));
}

unsigned sample_decay_slot(std::uint32_t delta_bound, std::uint64_t random_bits) {
  unsigned top = DecayParams{delta_bound, 0.5, 1.0}.slots_per_rep();
  return std::min<unsigned>(top, 1 + std::countr_zero(random_bits));
}

unsigned sample_decay_slot(std::uint32_t delta_bound, Rng& rng) { return sample_decay_slot(delta_bound, rng()); }

PhysicalChannel::PhysicalChannel(RadioNetwork& net, DecayParams params, std::uint64_t seed, Fidelity fidelity)
    : net_(&net), params_(params), seed_(seed), fidelity_(fidelity), sender_slot_(net.graph().size(), -1) {
  if (!(params.f > 0.0 && params.f < 1.0)) throw std::invalid_argument("f must lie in (0, 1)");
  if (params.delta_bound < 1) throw std::invalid_argument("delta_bound must be >= 1");
}

void PhysicalChannel::advance(Wide calls) {
  clock_ += calls;
  net_->meters().slots = clock_ * params_.slots_per_call();
}

unsigned PhysicalChannel::draw_slot(Vertex v, Wide at, unsigned rep) const {
  auto lo = static_cast<std::uint64_t>(at), hi = static_cast<std::uint64_t>(at >> 64);
  return sample_decay_slot(params_.delta_bound,
                           hash_key(seed_, static_cast<std::uint64_t>(Purpose::Decay), v, lo, hi, rep));
}

Delivery PhysicalChannel::execute(const LbRequest& req, Wide at, bool charge) {
  for (const auto& s : req.senders) net_->audit(s.payload);
  if (charge && fidelity_ == Fidelity::Reference) {
    Delivery d = execute_slots(req, at);
    for (const auto& s : req.senders) ++net_->meters().lb_calls[s.v];
    for (Vertex v : req.receivers) ++net_->meters().lb_calls[v];
    return d;
  }
  Delivery d = execute_direct(req, at);
  if (charge) {
    for (const auto& s : req.senders) account_sender(s.v, 1);
    for (Vertex v : req.receivers) account_receiver(v, {}, 1);
  }
  return d;
}

Delivery PhysicalChannel::execute_slots(const LbRequest& req, Wide at) {
  const unsigned reps = params_.repetitions(), top = params_.slots_per_rep();
  Delivery out(req.receivers.size());
  std::vector<unsigned> slot_of(req.senders.size());
  std::vector<Vertex> tx;
  std::vector<Payload> payloads;
  std::vector<SlotFeedback> heard;
  net_->meters().slots = at * params_.slots_per_call();
  for (unsigned r = 0; r < reps; ++r) {
    for (std::size_t i = 0; i < req.senders.size(); ++i) slot_of[i] = draw_slot(req.senders[i].v, at, r);
    for (unsigned t = 1; t <= top; ++t) {
      tx.clear();
      payloads.clear();
      for (std::size_t i = 0; i < req.senders.size(); ++i)
        if (slot_of[i] == t) {
          tx.push_back(req.senders[i].v);
          payloads.push_back(req.senders[i].payload);
        }
      net_->step_sparse(tx, payloads, req.receivers, heard);
      for (std::size_t k = 0; k < heard.size(); ++k)
        if (heard[k] && !out[k]) out[k] = std::move(heard[k]);
    }
  }
  return out;
}

Delivery PhysicalChannel::execute_direct(const LbRequest& req, Wide at) {
  const Graph& g = net_->graph();
  const unsigned reps = params_.repetitions(), top = params_.slots_per_rep();
  for (std::size_t i = 0; i < req.senders.size(); ++i) sender_slot_[req.senders[i].v] = static_cast<std::int32_t>(i);
  Delivery out(req.receivers.size());
  std::vector<std::int32_t> near;
  std::vector<unsigned> count(top + 1);
  std::vector<std::int32_t> who(top + 1);
  for (std::size_t k = 0; k < req.receivers.size(); ++k) {
    near.clear();
    for (Vertex u : g.neighbors(req.receivers[k]))
      if (sender_slot_[u] >= 0) near.push_back(sender_slot_[u]);
    if (near.empty()) continue;
    if (near.size() == 1) {  // a lone neighbour is heard in its first slot
      out[k] = req.senders[near[0]].payload;
      continue;
    }
    for (unsigned r = 0; r < reps && !out[k]; ++r) {
      std::fill(count.begin(), count.end(), 0u);
      for (auto i : near) {
        unsigned t = draw_slot(req.senders[i].v, at, r);
        ++count[t];
        who[t] = i;
      }
      for (unsigned t = 1; t <= top; ++t)
        if (count[t] == 1) {
          out[k] = req.senders[who[t]].payload;
          break;
        }
    }
  }
  for (const auto& s : req.senders) sender_slot_[s.v] = -1;
  return out;
}

void PhysicalChannel::account(std::span<const Vertex> senders, std::span<const Vertex> receivers,
                              std::uint64_t times) {
  for (Vertex v : senders) account_sender(v, times);
  for (Vertex v : receivers) account_receiver(v, {}, times);
}

void PhysicalChannel::account_sender(Vertex v, std::uint64_t times) {
  net_->meters().lb_calls[v] += times;
  net_->meters().energy[v] += times * params_.repetitions();
}

void PhysicalChannel::account_receiver(Vertex v, std::span<const Vertex>, std::uint64_t times) {
  net_->meters().lb_calls[v] += times;
  net_->meters().energy[v] += times * params_.slots_per_call();
}

}  // namespace rnsim
