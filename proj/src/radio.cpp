#include "rnsim/radio.hpp"

#include <algorithm>
#include <cmath>

namespace rnsim {

std::string to_string(Wide x) {
  if (x == 0) return "0";
  std::string s;
  while (x > 0) {
    s.push_back(static_cast<char>('0' + static_cast<int>(x % 10)));
    x /= 10;
  }
  std::reverse(s.begin(), s.end());
  return s;
}

std::uint64_t Meters::max_energy() const {
  return energy.empty() ? 0 : *std::max_element(energy.begin(), energy.end());
}

std::uint64_t Meters::max_lb_calls() const {
  return lb_calls.empty() ? 0 : *std::max_element(lb_calls.begin(), lb_calls.end());
}

std::size_t default_budget_bits(std::size_t n, std::size_t multiplier) {
  std::size_t log_n = 0;
  while ((std::size_t{1} << log_n) < n) ++log_n;
  return multiplier * std::max<std::size_t>(log_n, 1);
}

RadioNetwork::RadioNetwork(const Graph& graph, std::size_t budget_bits)
    : graph_(&graph),
      budget_bits_(budget_bits),
      meters_(graph.size()),
      hits_(graph.size(), 0),
      last_sender_(graph.size(), 0),
      transmitting_(graph.size(), 0) {}

void RadioNetwork::audit(const Payload& p) const {
  if (p.bits() > budget_bits_)
    throw MessageBudgetError("payload of " + std::to_string(p.bits()) + " bits exceeds budget " +
                             std::to_string(budget_bits_));
}

std::vector<SlotFeedback> RadioNetwork::step(const std::vector<DeviceAction>& actions) {
  if (actions.size() != graph_->size()) throw std::invalid_argument("one action per device required");
  std::vector<Vertex> tx, rx;
  std::vector<Payload> payloads;
  for (Vertex v = 0; v < actions.size(); ++v) {
    if (actions[v].kind == ActionKind::Transmit) {
      tx.push_back(v);
      payloads.push_back(actions[v].payload);
    } else if (actions[v].kind == ActionKind::Listen) {
      rx.push_back(v);
    }
  }
  std::vector<SlotFeedback> heard;
  step_sparse(tx, payloads, rx, heard);
  std::vector<SlotFeedback> out(actions.size());
  for (std::size_t i = 0; i < rx.size(); ++i) out[rx[i]] = std::move(heard[i]);
  return out;
}

void RadioNetwork::step_sparse(std::span<const Vertex> transmitters, std::span<const Payload> payloads,
                               std::span<const Vertex> listeners, std::vector<SlotFeedback>& out) {
  for (const auto& p : payloads) audit(p);
  for (std::size_t i = 0; i < transmitters.size(); ++i) {
    Vertex u = transmitters[i];
    transmitting_[u] = 1;
    for (Vertex v : graph_->neighbors(u)) {
      ++hits_[v];
      last_sender_[v] = static_cast<std::uint32_t>(i);
    }
  }
  out.assign(listeners.size(), std::nullopt);
  for (std::size_t k = 0; k < listeners.size(); ++k) {
    Vertex v = listeners[k];
    if (transmitting_[v]) throw std::invalid_argument("device both transmits and listens");
    if (hits_[v] == 1) out[k] = payloads[last_sender_[v]];
  }
  if (trace_) {
    // slot, device, action, payload-hex, feedback
    const std::string slot = to_string(meters_.slots);
    std::vector<std::pair<Vertex, std::string>> lines;
    for (std::size_t i = 0; i < transmitters.size(); ++i)
      lines.emplace_back(transmitters[i], "T\t" + payloads[i].hex() + "\t-");
    for (std::size_t k = 0; k < listeners.size(); ++k)
      lines.emplace_back(listeners[k], std::string("L\t-\t") + (out[k] ? out[k]->hex() : "-"));
    std::sort(lines.begin(), lines.end());
    for (auto& [v, rest] : lines) *trace_ << slot << '\t' << v << '\t' << rest << '\n';
  }
  for (Vertex u : transmitters) {
    transmitting_[u] = 0;
    ++meters_.energy[u];
    for (Vertex v : graph_->neighbors(u)) hits_[v] = 0;
  }
  for (Vertex v : listeners) ++meters_.energy[v];
  ++meters_.slots;
}

RunResult run(const Graph& graph, const ProgramFactory& factory, std::uint64_t seed,
              std::uint64_t max_slots, std::size_t budget_bits, std::ostream* trace) {
  RadioNetwork net(graph, budget_bits);
  net.set_trace(trace);
  std::vector<std::unique_ptr<DeviceProgram>> programs;
  programs.reserve(graph.size());
  for (Vertex v = 0; v < graph.size(); ++v)
    programs.push_back(factory(v, device_stream(seed, Purpose::Protocol, v)));

  std::vector<DeviceAction> actions(graph.size());
  for (std::uint64_t slot = 0;; ++slot) {
    bool all_halted = std::all_of(programs.begin(), programs.end(), [](auto& p) { return p->halted(); });
    if (all_halted) break;
    if (slot >= max_slots) throw RunTimeout(net.meters());
    for (Vertex v = 0; v < graph.size(); ++v)
      actions[v] = programs[v]->halted() ? DeviceAction::idle() : programs[v]->act(slot);
    auto feedback = net.step(actions);
    for (Vertex v = 0; v < graph.size(); ++v)
      if (actions[v].kind == ActionKind::Listen) programs[v]->observe(slot, feedback[v]);
  }
  RunResult result{net.meters(), {}};
  for (auto& p : programs) result.outputs.push_back(p->output());
  return result;
}

}  // namespace rnsim
