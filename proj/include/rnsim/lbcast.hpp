#pragma once
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "rnsim/radio.hpp"

namespace rnsim {

struct LbSender {
  Vertex v;
  Payload payload;
};

struct LbRequest {
  std::vector<LbSender> senders;
  std::vector<Vertex> receivers;
};

// One entry per receiver, in request order.
using Delivery = std::vector<std::optional<Payload>>;

// Reference runs every slot (or every underlying call) and meters what
// actually happens. Fast computes outcomes only where they can matter and
// meters by schedule; both agree whenever every underlying delivery succeeds.
enum class Fidelity { Reference, Fast };

// A network on which Local-Broadcast can be invoked: the radio network
// itself or a cluster graph simulated on top of another channel.
class BroadcastChannel {
 public:
  virtual ~BroadcastChannel() = default;

  virtual const Graph& topology() const = 0;
  std::size_t size() const { return topology().size(); }
  // Length of one call, in physical Local-Broadcast calls.
  virtual Wide call_length() const = 0;
  // Global clock, in physical Local-Broadcast calls.
  virtual Wide now() const = 0;
  virtual void advance(Wide physical_calls) = 0;

  // Runs one call at the current time and advances the clock.
  Delivery local_broadcast(const LbRequest& req) {
    Delivery d = execute(req, now(), true);
    advance(call_length());
    return d;
  }
  // Charges `times` idle-outcome calls for these participants and advances the clock.
  void skip_calls(std::span<const Vertex> senders, std::span<const Vertex> receivers, std::uint64_t times) {
    account(senders, receivers, times);
    advance(call_length() * times);
  }

  // Same outcome as local_broadcast. In Fast mode, senders without a
  // receiving neighbour are metered but not simulated.
  Delivery broadcast(std::span<const Vertex> senders, const std::function<Payload(Vertex)>& payload_of,
                     std::span<const Vertex> receivers);

  // Runs a call scheduled at time `at` without moving the clock. With
  // charge=false only the outcome is produced and meters are untouched.
  virtual Delivery execute(const LbRequest& req, Wide at, bool charge) = 0;

  // Schedule-based metering of `times` identical calls, assuming every
  // underlying delivery succeeds.
  virtual void account(std::span<const Vertex> senders, std::span<const Vertex> receivers,
                       std::uint64_t times) = 0;
  virtual void account_sender(Vertex v, std::uint64_t times) = 0;
  // `context` lists the transmitting neighbours of v during those calls.
  virtual void account_receiver(Vertex v, std::span<const Vertex> context, std::uint64_t times) = 0;

  // Participations at this level.
  virtual const std::vector<std::uint64_t>& lb_calls() const = 0;
  virtual Fidelity fidelity() const = 0;

 private:
  std::vector<char> mark_;
};

struct DecayParams {
  std::uint32_t delta_bound = 1;
  double f = 0.01;
  double c_r = 8.0;

  unsigned slots_per_rep() const;  // ceil(log2(delta_bound + 1))
  unsigned repetitions() const;    // ceil(c_r * log2(1/f))
  std::uint64_t slots_per_call() const { return std::uint64_t{slots_per_rep()} * repetitions(); }
};

// Slot in [1, T] with P[t] = 2^-t for t < T; the remaining mass sits on T.
unsigned sample_decay_slot(std::uint32_t delta_bound, std::uint64_t random_bits);
unsigned sample_decay_slot(std::uint32_t delta_bound, Rng& rng);

// Decay Local-Broadcast on the radio network.
class PhysicalChannel final : public BroadcastChannel {
 public:
  PhysicalChannel(RadioNetwork& net, DecayParams params, std::uint64_t seed,
                  Fidelity fidelity = Fidelity::Fast);

  const Graph& topology() const override { return net_->graph(); }
  Wide call_length() const override { return 1; }
  Wide now() const override { return clock_; }
  void advance(Wide calls) override;

  Delivery execute(const LbRequest& req, Wide at, bool charge) override;
  void account(std::span<const Vertex> senders, std::span<const Vertex> receivers,
               std::uint64_t times) override;
  void account_sender(Vertex v, std::uint64_t times) override;
  void account_receiver(Vertex v, std::span<const Vertex> context, std::uint64_t times) override;
  const std::vector<std::uint64_t>& lb_calls() const override { return net_->meters().lb_calls; }
  Fidelity fidelity() const override { return fidelity_; }

  const DecayParams& params() const { return params_; }
  RadioNetwork& network() { return *net_; }
  // The slot sender v draws in repetition `rep` of the call at time `at`.
  unsigned draw_slot(Vertex v, Wide at, unsigned rep) const;

 private:
  Delivery execute_slots(const LbRequest& req, Wide at);
  Delivery execute_direct(const LbRequest& req, Wide at);

  RadioNetwork* net_;
  DecayParams params_;
  std::uint64_t seed_;
  Fidelity fidelity_;
  Wide clock_ = 0;
  std::vector<std::int32_t> sender_slot_;  // index into request senders, -1 otherwise
};

}  // namespace rnsim
