#pragma once
#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "rnsim/diam.hpp"
#include "rnsim/graphgen.hpp"

namespace rnsim {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Thresholds {
  double success_rate = 0.95;   // bfs, trivial-bfs, diam32
  double delivery_rate = 0.99;  // lb-verify
  double radius_rate = 0.99;    // cluster-verify: runs with max layer within the bound
  double cut_factor = 4.0;      // cluster-verify: mean cut fraction <= cut_factor * beta
  double recursive_slope = 0.8;
  double trivial_slope = 1.0;
  double trivial_slope_tolerance = 0.1;
};

struct ExperimentConfig {
  std::string task;
  std::string graph;
  std::vector<std::uint64_t> seeds{0};
  // Overrides; zero keeps the default of the module concerned.
  double beta = 0;
  std::uint32_t w = 0;
  double f = 0;  // 0: n^-4
  double c_r = 8.0;
  std::uint32_t set_size = 0;
  std::uint32_t contention = 0;
  std::uint32_t budget_multiplier = 16;
  std::string fidelity = "fast";
  Vertex source = 0;
  std::uint32_t trials = 1000;  // lb-verify calls per seed
  std::string family = "path";  // energy-scaling
  std::vector<std::uint64_t> sizes{128, 256, 512, 1024, 2048, 4096};
  std::string out;
  bool trace = false;
  bool serial = false;
  Thresholds thresholds;
};

// Unknown keys and malformed values throw ConfigError.
ExperimentConfig parse_config(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentConfig& c);
// "a..b" (inclusive) or a single integer.
std::vector<std::uint64_t> parse_seed_range(const std::string& s);
const std::vector<std::string>& task_names();

// One graph with its radio network and Decay channel, built from a config.
struct Simulation {
  Graph graph;
  RadioNetwork radio;
  PhysicalChannel channel;
  Simulation(Graph g, std::uint64_t seed, double f = 0, double c_r = 8.0, std::uint32_t budget_multiplier = 16,
             Fidelity fidelity = Fidelity::Fast);
};

struct MetricsRecord {
  std::uint64_t seed = 0;
  bool success = false;
  std::uint64_t max_energy_slots = 0;
  std::uint64_t max_energy_lb = 0;
  std::string slots = "0";
  std::uint64_t max_x_count = 0;
  std::uint64_t max_g_count = 0;
  std::uint64_t violations = 0;
  double pass_rate = 0;  // fraction of per-seed checks that held
  double value = 0;      // task result: D', delivery rate, cut fraction, ...
  double reference = 0;  // what the oracle says it should be, when there is one
};

struct ScalingRow {
  std::uint64_t depth = 0;
  std::uint64_t seed = 0;
  std::uint64_t recursive_lb = 0;
  std::uint64_t trivial_lb = 0;
  bool labels_equal = false;
};

struct ScalingStudy {
  std::vector<ScalingRow> rows;
  double recursive_slope = 0;
  double trivial_slope = 0;
  bool labels_agree = true;
};

// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

ScalingStudy energy_scaling_study(const std::string& family, const std::vector<std::uint64_t>& depths,
                                  const std::vector<std::uint64_t>& seeds, bool serial = false);

struct ExperimentResult {
  std::vector<MetricsRecord> records;
  std::optional<ScalingStudy> scaling;
  nlohmann::json summary;
  bool thresholds_met = false;
};

ExperimentResult run_experiment(const ExperimentConfig& cfg);
// metrics.csv, summary.json and, for energy-scaling, scaling.csv under cfg.out.
void write_outputs(const ExperimentConfig& cfg, const ExperimentResult& res);
void write_metrics_csv(std::ostream& out, const std::vector<MetricsRecord>& records);

// Statistical verifiers.
struct LbVerify {
  std::uint64_t eligible = 0, delivered = 0;
  double rate() const { return eligible ? double(delivered) / eligible : 1.0; }
  std::uint64_t sender_energy_mismatches = 0;    // sender energy per call != R
  std::uint64_t receiver_energy_violations = 0;  // receiver energy per call > R*T
  std::uint32_t repetitions = 0, slots_per_rep = 0;
};
// `trials` Reference-fidelity calls; each vertex sends with probability 1/2.
LbVerify verify_local_broadcast(const Graph& g, double f, double c_r, std::uint32_t trials, std::uint64_t seed);

struct ClusterVerify {
  bool partition_ok = false;
  bool radius_ok = false;
  std::uint32_t max_layer = 0, radius_bound = 0;
  double cut_fraction = 0;
  std::size_t isolation_failures = 0;
};
ClusterVerify verify_clustering(const Graph& g, double beta, std::uint64_t seed);

struct ProxyVerify {
  std::uint64_t pairs = 0, in_band = 0;
  std::uint64_t far_pairs = 0, far_ok = 0;
};
// Random pairs on one clustering: cluster-graph distance against
// [floor(d beta / (8 ln n)), ceil(d beta) * upper_factor * ln n], and for
// d >= ln^2 n / beta against far_factor * beta * d.
ProxyVerify verify_distance_proxy(const Graph& g, double beta, std::uint32_t pairs, std::uint64_t seed,
                                  double upper_factor = 8, double far_factor = 16);

}  // namespace rnsim
