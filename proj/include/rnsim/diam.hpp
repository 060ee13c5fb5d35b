#pragma once
#include <cstdint>
#include <optional>
#include <vector>

#include "rnsim/rbfs.hpp"

namespace rnsim {

// Distance labels from a finished BFS. `depth` is the layer count every
// device schedules for (the search threshold, which all devices know).
struct BfsTree {
  Vertex root = 0;
  std::vector<std::uint32_t> label;
  std::uint32_t depth = 0;

  std::vector<std::vector<Vertex>> layers() const;
};

// Labels are exact BFS distances from the root and each non-root labelled
// vertex has a neighbour one layer up.
bool valid_tree(const Graph& g, const BfsTree& t);

enum class Extreme { Min, Max };

struct ExtremumResult {
  bool found = false;  // false: the error flag was flooded
  std::uint64_t key = 0;
  Vertex witness = 0;
  Payload payload;
  std::vector<char> informed;  // devices that received the root's final message
  std::uint32_t key_phases = 0;
  std::uint32_t id_phases = 0;
};

// Binary search over keys in [1, max_key] by layered up/down casts over the
// tree, then over device IDs among holders of the winning key (lowest ID wins),
// then one ascent of the witness's payload and one flood of it. A key of 0
// marks a non-holder.
ExtremumResult find_extremum(BroadcastChannel& ch, const BfsTree& tree, const std::vector<std::uint64_t>& keys,
                             const std::vector<Payload>& payloads, std::uint64_t max_key, Extreme mode);

struct DiamResult {
  std::uint32_t d_prime = 0;
  bool ok = true;  // false when a step ended with the error flag
  std::uint32_t retries = 0;
  std::size_t sample_size = 0;
  std::size_t closest_size = 0;
  std::size_t bfs_runs = 0;
  Vertex far_vertex = 0;
};

// Eccentricity of the leader.
DiamResult approx_diameter_2(BroadcastChannel& ch, Vertex leader, std::uint64_t seed, const BfsOptions& opt = {});

// Sampled-sources 3/2-approximation. Retries with fresh randomness while the
// sample is empty, at most `max_retries` times.
DiamResult approx_diameter_32(BroadcastChannel& ch, Vertex leader, std::uint64_t seed, const BfsOptions& opt = {},
                              std::uint32_t max_retries = 8);

}  // namespace rnsim
