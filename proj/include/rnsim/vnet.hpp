#pragma once
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "rnsim/lbcast.hpp"
#include "rnsim/mpx.hpp"

namespace rnsim {

// The cluster graph of `under`, run as a radio network of its own. A virtual
// call is a down-cast in the sending clusters, one underlying call between
// clusters, and an up-cast in the receiving clusters; casts use radius_bound()
// stages of set_size() steps, each step restricted to clusters whose shared
// index set contains it.
class VirtualChannel final : public BroadcastChannel {
 public:
  VirtualChannel(BroadcastChannel& under, Clustering clustering, std::uint32_t radius_bound,
                 Fidelity fidelity = Fidelity::Fast);

  const Graph& topology() const override { return graph_.graph; }
  Wide call_length() const override { return (2 * cast_steps() + 1) * under_->call_length(); }
  Wide cast_length() const { return cast_steps() * under_->call_length(); }
  Wide now() const override { return under_->now(); }
  void advance(Wide calls) override { under_->advance(calls); }

  Delivery execute(const LbRequest& req, Wide at, bool charge) override;
  void account(std::span<const Vertex> senders, std::span<const Vertex> receivers,
               std::uint64_t times) override;
  void account_sender(Vertex c, std::uint64_t times) override;
  void account_receiver(Vertex c, std::span<const Vertex> context, std::uint64_t times) override;
  const std::vector<std::uint64_t>& lb_calls() const override { return lb_calls_; }
  Fidelity fidelity() const override { return fidelity_; }

  // Every member of each source cluster learns the centre's payload.
  // Result is indexed by underlying vertex. Advances the clock by one cast.
  std::vector<std::optional<Payload>> down_cast(const std::vector<std::pair<std::uint32_t, Payload>>& sources);
  // Centres of `clusters` learn some source payload from their own cluster.
  // Result is indexed by cluster. Advances the clock by one cast.
  std::vector<std::optional<Payload>> up_cast(const std::vector<std::uint32_t>& clusters,
                                              const std::vector<std::pair<Vertex, Payload>>& sources);

  BroadcastChannel& underlying() { return *under_; }
  const Clustering& clustering() const { return clustering_; }
  const ClusterGraph& cluster_graph() const { return graph_; }
  std::uint32_t radius_bound() const { return radius_bound_; }
  std::uint32_t set_size() const { return clustering_.set_size; }
  std::uint64_t cast_steps() const { return std::uint64_t{radius_bound_} * clustering_.set_size; }
  std::uint32_t cluster_of(Vertex v) const { return clustering_.cluster_of[v]; }
  bool in_set(std::uint32_t c, std::uint32_t j) const { return (bits_[c][j >> 6] >> (j & 63)) & 1; }

 private:
  using Sources = std::vector<std::pair<std::uint32_t, Payload>>;

  Payload wrap(Payload p, std::uint32_t c) const { return p.push(graph_.center[c], id_bits_); }
  std::uint32_t layer(Vertex v) const { return clustering_.layer[v]; }
  std::span<const Vertex> layer_members(std::uint32_t c, std::uint32_t l) const;

  // Outcome machinery; holders live in has_/msg_ and callers clear them.
  void down_stages(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge);
  void up_stages(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge);
  void full_down(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge);
  void full_up(const std::vector<std::uint32_t>& clusters, Wide t0, bool charge);
  void fast_down(const std::vector<std::uint32_t>& clusters, Wide t0);
  void fast_up(const std::vector<std::uint32_t>& clusters, Wide t0);
  // Runs a stage's steps only where a pending receiver can still succeed.
  void fast_stage(std::vector<Vertex>& pending, std::uint32_t sender_layer, Wide t0, std::uint64_t stage_index);
  void clear_holders(const std::vector<std::uint32_t>& clusters);
  void set_roles(const std::vector<std::uint32_t>& clusters, char role);

  void account_impl(std::span<const Vertex> senders, std::span<const Vertex> receivers, std::uint64_t times,
                    bool charge_senders, bool charge_receivers);
  void account_down(std::uint32_t c, std::uint64_t times);
  void account_listen(Vertex v, std::uint32_t own, const std::vector<Vertex>& near, std::uint64_t times);

  BroadcastChannel* under_;
  bool under_virtual_;
  Clustering clustering_;
  ClusterGraph graph_;
  std::uint32_t radius_bound_;
  Fidelity fidelity_;
  unsigned id_bits_;
  std::vector<std::vector<std::uint64_t>> bits_;
  std::vector<std::vector<std::uint32_t>> layer_start_;
  std::vector<std::uint64_t> lb_calls_;

  std::vector<char> role_;  // per cluster: 0 idle, 1 sending, 2 receiving
  std::vector<char> has_;   // per underlying vertex
  std::vector<Payload> msg_;
  std::vector<char> mark_;
  std::vector<std::uint32_t> cursor_;
};

}  // namespace rnsim
