#pragma once
#include <cstdint>
#include <random>

namespace rnsim {

// SplitMix64 finalizer; a bijection with good avalanche.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_key(std::uint64_t h) { return mix64(h); }

template <class... Rest>
constexpr std::uint64_t hash_key(std::uint64_t h, std::uint64_t next, Rest... rest) {
  return hash_key(mix64(h) ^ (next * 0xd6e8feb86659fd93ULL + 0x632be59bd9b4e019ULL), rest...);
}

enum class Purpose : std::uint64_t {
  Decay = 1,
  Shift = 2,
  SharedSet = 3,
  Sample = 4,
  Topology = 5,
  Workload = 6,
  Protocol = 7,
};

using Rng = std::mt19937_64;

// Independent stream for one device (or one virtual device, keyed by level).
inline Rng device_stream(std::uint64_t seed, Purpose purpose, std::uint64_t device,
                         std::uint64_t epoch = 0) {
  std::uint64_t k = hash_key(seed, static_cast<std::uint64_t>(purpose), device, epoch);
  std::seed_seq seq{static_cast<std::uint32_t>(k), static_cast<std::uint32_t>(k >> 32)};
  return Rng(seq);
}

// Uniform double in (0, 1] from 53 high bits.
inline double unit_open_closed(std::uint64_t bits) {
  return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace rnsim
