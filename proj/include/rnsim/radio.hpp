#pragma once
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "rnsim/graph.hpp"
#include "rnsim/payload.hpp"
#include "rnsim/rng.hpp"

namespace rnsim {

// Slot and call counters can exceed 2^64 for deep virtual recursion.
using Wide = unsigned __int128;
std::string to_string(Wide x);
inline double to_double(Wide x) { return static_cast<double>(x); }

enum class ActionKind : std::uint8_t { Idle, Listen, Transmit };

struct DeviceAction {
  ActionKind kind = ActionKind::Idle;
  Payload payload;

  static DeviceAction idle() { return {}; }
  static DeviceAction listen() { return {ActionKind::Listen, {}}; }
  static DeviceAction transmit(const Payload& p) { return {ActionKind::Transmit, p}; }
};

// Empty when zero or several neighbours transmitted: the two are indistinguishable.
using SlotFeedback = std::optional<Payload>;

struct MessageBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Meters {
  Meters() = default;
  explicit Meters(std::size_t n) : energy(n, 0), lb_calls(n, 0) {}

  std::vector<std::uint64_t> energy;    // slots spent listening or transmitting
  std::vector<std::uint64_t> lb_calls;  // Local-Broadcast participations
  Wide slots = 0;

  std::uint64_t max_energy() const;
  std::uint64_t max_lb_calls() const;
};

// Default message budget: 16 * ceil(log2 n) bits.
std::size_t default_budget_bits(std::size_t n, std::size_t multiplier = 16);

// The shared radio medium over a fixed topology.
class RadioNetwork {
 public:
  RadioNetwork(const Graph& graph, std::size_t budget_bits);

  const Graph& graph() const { return *graph_; }
  std::size_t budget_bits() const { return budget_bits_; }
  Meters& meters() { return meters_; }
  const Meters& meters() const { return meters_; }
  void set_trace(std::ostream* out) { trace_ = out; }

  std::vector<SlotFeedback> step(const std::vector<DeviceAction>& actions);

  // Same semantics as step() with every unlisted device idle. Feedback is
  // written to `out` aligned with `listeners`.
  void step_sparse(std::span<const Vertex> transmitters, std::span<const Payload> payloads,
                   std::span<const Vertex> listeners, std::vector<SlotFeedback>& out);

  // Bulk accounting used when slots are not simulated one by one.
  void advance_slots(Wide slots) { meters_.slots += slots; }
  void charge_energy(Vertex v, std::uint64_t slots) { meters_.energy[v] += slots; }
  void audit(const Payload& p) const;

 private:
  const Graph* graph_;
  std::size_t budget_bits_;
  Meters meters_;
  std::ostream* trace_ = nullptr;
  std::vector<std::uint32_t> hits_;
  std::vector<std::uint32_t> last_sender_;
  std::vector<char> transmitting_;
};

class DeviceProgram {
 public:
  virtual ~DeviceProgram() = default;
  virtual DeviceAction act(std::uint64_t slot) = 0;
  // Called after every slot in which the device listened.
  virtual void observe(std::uint64_t slot, const SlotFeedback& feedback) = 0;
  virtual bool halted() const = 0;
  virtual std::int64_t output() const { return 0; }
};

using ProgramFactory = std::function<std::unique_ptr<DeviceProgram>(Vertex, Rng)>;

struct RunResult {
  Meters meters;
  std::vector<std::int64_t> outputs;
};

struct RunTimeout : std::runtime_error {
  RunTimeout(Meters m) : std::runtime_error("max_slots exceeded"), partial(std::move(m)) {}
  Meters partial;
};

// Drives one program per device until all halt. Throws RunTimeout.
RunResult run(const Graph& graph, const ProgramFactory& factory, std::uint64_t seed,
              std::uint64_t max_slots, std::size_t budget_bits, std::ostream* trace = nullptr);

}  // namespace rnsim
