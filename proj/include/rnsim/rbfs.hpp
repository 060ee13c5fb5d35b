#pragma once
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <vector>

#include "rnsim/vnet.hpp"
#include "rnsim/zsequence.hpp"

namespace rnsim {

inline constexpr std::uint32_t kInfinity = kUnreached;

struct BfsParams {
  std::uint32_t inv_beta = 1;   // power of two
  std::uint32_t max_depth = 0;  // depth at which the trivial BFS takes over
  std::uint32_t w = 2;
  std::uint64_t d0 = 1;
  std::uint32_t contention = 0;  // clustering overrides, 0 = default
  std::uint32_t set_size = 0;

  double beta() const { return 1.0 / inv_beta; }
};

// ceil(16 ln n) + 2.
std::uint32_t default_w(std::size_t n);
// 1/beta = 2^ceil(sqrt(log2 D0 * log2 log2 n)); max_depth = ceil(log2 D0 / log2(1/beta)),
// forced to 0 when 1/beta >= D0 or n <= 16.
BfsParams choose_params(std::size_t n, std::uint64_t d0);

// Oracle-instrumented counters. Claim counters are maxima over invocations.
struct BfsStats {
  std::uint64_t bracket_checks = 0, bracket_violations = 0;
  std::uint64_t lower_violations = 0;  // the part of bracket_violations where L exceeds the distance
  std::uint64_t upper_checks = 0, upper_violations = 0;
  std::uint64_t coverage_violations = 0;  // vertex within reach of the wavefront left out of X_i
  std::uint64_t max_x_count = 0;          // stages a vertex spends in X_i, per invocation
  std::uint64_t max_g_count = 0;          // special updates a cluster joins, per invocation
  double max_g_ratio = 0;                 // max_g_count / log2(D) of the same invocation
  std::uint64_t special_updates = 0;
  std::uint64_t trivial_calls = 0;
  std::vector<std::uint64_t> calls_per_depth;
  std::vector<std::uint64_t> max_d_per_depth;  // effective search depth per level

  void merge(const BfsStats& o);
};

// Recursive-BFS over a tower of cluster graphs built on `base`. Level r+1 is
// clustered from level r on first use and kept for the engine's lifetime.
class BfsEngine {
 public:
  BfsEngine(BroadcastChannel& base, BfsParams params, std::uint64_t seed, std::size_t network_size);
  ~BfsEngine();

  // Labels for every vertex of `base`: distance within `active` if at most
  // `depth`, kInfinity otherwise (and for inactive vertices).
  std::vector<std::uint32_t> recursive_bfs(const std::vector<Vertex>& sources, const std::vector<char>& active,
                                           std::uint64_t depth);
  std::vector<std::uint32_t> trivial_bfs(const std::vector<Vertex>& sources, const std::vector<char>& active,
                                         std::uint64_t depth);

  void set_instrumented(bool on) { instrumented_ = on; }
  // Per-stage rows: depth,call,stage,cluster,L,U,update,in_upsilon,in_wstar
  void set_stage_dump(std::ostream* out);
  const BfsStats& stats() const { return stats_; }
  const BfsParams& params() const { return params_; }
  BroadcastChannel& level(std::uint32_t r);

 private:
  std::vector<std::uint32_t> run(std::uint32_t r, const std::vector<char>& source, const std::vector<char>& active,
                                 std::uint64_t depth);
  std::vector<std::uint32_t> trivial(std::uint32_t r, const std::vector<char>& source,
                                     const std::vector<char>& active, std::uint64_t depth);
  VirtualChannel& above(std::uint32_t r);

  BroadcastChannel* base_;
  BfsParams params_;
  std::uint64_t seed_;
  std::size_t network_size_;
  std::vector<std::unique_ptr<VirtualChannel>> tower_;
  bool instrumented_ = false;
  std::ostream* dump_ = nullptr;
  std::uint64_t call_counter_ = 0;
  BfsStats stats_;
};

struct BfsOptions {
  bool trivial = false;          // skip the recursion entirely
  std::uint32_t inv_beta = 0;    // overrides, 0 = from choose_params
  std::uint32_t w = 0;
  std::uint32_t contention = 0;
  std::uint32_t set_size = 0;
  bool instrumented = false;
  std::ostream* stage_dump = nullptr;
};

struct BfsOutcome {
  std::vector<std::uint32_t> labels;
  std::uint64_t d0 = 0;  // threshold of the final attempt
  bool complete = false;
  BfsStats stats;
};

// Unknown-depth driver: thresholds D0 = 1, 2, 4, ... until every vertex is
// labelled (checked globally, outside the protocol's meters) or D0 >= n.
BfsOutcome bfs_driver(BroadcastChannel& base, Vertex source, std::uint64_t seed, const BfsOptions& opt);

}  // namespace rnsim
