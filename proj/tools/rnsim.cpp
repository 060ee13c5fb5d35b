#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "rnsim/harness.hpp"

using nlohmann::json;

int main(int argc, char** argv) {
  CLI::App app{"Radio-network simulator: BFS, clustering and diameter experiments"};
  std::string task, config_path, seeds;
  json j = json::object();

  app.add_option("task", task, "bfs | trivial-bfs | cluster-verify | lb-verify | diam2 | diam32 | energy-scaling");
  app.add_option("--config", config_path, "JSON experiment config; flags given on the command line override it");
  app.add_option("--seeds", seeds, "seed or inclusive range a..b");

  std::string graph, out, family, fidelity;
  double beta = 0, f = 0, c_r = 0;
  std::uint32_t w = 0, set_size = 0, contention = 0, budget = 0, trials = 0, source = 0;
  std::vector<std::uint64_t> sizes;
  bool trace = false, serial = false;
  auto* o_graph = app.add_option("--graph", graph, "graph spec (path:256, grid:24x24, gnp:512:8, ...) or edge-list file");
  auto* o_beta = app.add_option("--beta", beta, "clustering rate; 1/beta must be an integer");
  auto* o_w = app.add_option("--w", w, "slack factor w");
  auto* o_f = app.add_option("--f", f, "Local-Broadcast failure probability (default n^-4)");
  auto* o_cr = app.add_option("--c-r", c_r, "Decay repetition constant");
  auto* o_ell = app.add_option("--set-size", set_size, "shared index set size");
  auto* o_c = app.add_option("--contention", contention, "contention bound C");
  auto* o_b = app.add_option("--budget-multiplier", budget, "message budget is this times ceil(log2 n) bits");
  auto* o_t = app.add_option("--trials", trials, "lb-verify calls per seed");
  auto* o_src = app.add_option("--source", source, "BFS source or diameter leader");
  auto* o_fam = app.add_option("--family", family, "energy-scaling family: path | cycle");
  auto* o_sizes = app.add_option("--sizes", sizes, "energy-scaling depths");
  auto* o_fid = app.add_option("--fidelity", fidelity, "fast | reference");
  auto* o_out = app.add_option("--out", out, "output directory for metrics.csv and summary.json");
  auto* o_trace = app.add_flag("--trace", trace, "per-slot trace logs (forces reference fidelity)");
  auto* o_serial = app.add_flag("--serial", serial, "run seeds on one thread");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw rnsim::ConfigError("cannot open " + config_path);
      j = json::parse(in);
    }
    if (!task.empty()) j["task"] = task;
    if (!seeds.empty()) j["seeds"] = seeds;
    if (*o_graph) j["graph"] = graph;
    if (*o_beta) j["beta"] = beta;
    if (*o_w) j["w"] = w;
    if (*o_f) j["f"] = f;
    if (*o_cr) j["c_r"] = c_r;
    if (*o_ell) j["set_size"] = set_size;
    if (*o_c) j["contention"] = contention;
    if (*o_b) j["budget_multiplier"] = budget;
    if (*o_t) j["trials"] = trials;
    if (*o_src) j["source"] = source;
    if (*o_fam) j["family"] = family;
    if (*o_sizes) j["sizes"] = sizes;
    if (*o_fid) j["fidelity"] = fidelity;
    if (*o_out) j["out"] = out;
    if (*o_trace) j["trace"] = trace;
    if (*o_serial) j["serial"] = serial;
    const auto cfg = rnsim::parse_config(j);
    const auto res = rnsim::run_experiment(cfg);
    rnsim::write_outputs(cfg, res);
    json brief = res.summary;
    brief.erase("config");
    std::cout << brief.dump(2) << '\n';
    return res.thresholds_met ? 0 : 1;
  } catch (const rnsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const rnsim::GraphError& e) {
    std::cerr << "graph error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << '\n';
    return 1;
  }
}
