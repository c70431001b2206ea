#pragma once

#include <array>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "mapf/bench_io.hpp"
#include "mapf/grid.hpp"
#include "mapf/heuristics.hpp"
#include "mapf/lacam.hpp"
#include "mapf/policy.hpp"

namespace mapf {

enum class Algo { OneStepPibt, Lacam };
enum class Shield { Naive, Pibt };

struct PolicySpec {
  enum class Kind { None, Uniform, Softmax, External };
  Kind kind = Kind::None;
  double tau = 0.5;
  double kappa = 0.0;
  std::string command;

  std::string label() const;
};

// none | uniform | softmax:TAU,KAPPA | external:CMD
PolicySpec parse_policy_spec(const std::string& s);
Algo parse_algo(const std::string& s);
Shield parse_shield(const std::string& s);
HeuristicKind parse_heuristic(const std::string& s);

struct RunSpec {
  std::string map_path;
  std::string scen_path;
  int n_agents = 1;
  Algo algo = Algo::Lacam;
  Shield shield = Shield::Pibt;
  RankMode ordering = RankMode::h();
  SampleMode sample = SampleMode::Sampled;
  PolicySpec policy;
  HeuristicKind heuristic = HeuristicKind::BackwardDijkstra;
  double noise_k = 0.0;
  long seed = 0;
  double timeout_s = 60.0;
  int max_timesteps = 0;  // 0: 16 * (width + height)
  long node_cap = 10'000'000;
  double policy_step_timeout_s = 10.0;

  // Throws std::invalid_argument when the combination is not runnable.
  void check() const;
  // Key of the aggregation cell: everything except scen and seed.
  std::string cell_key() const;
};

// Seed offsets: components are reproducible individually.
inline constexpr long kPolicySeedOffset = 1'000'003;
inline constexpr long kDegradeSeedOffset = 2'000'003;

struct RunOutput {
  RunRecord record;
  PathSet paths;
  bool valid = false;  // validate_paths verdict for successful runs
  std::string reason;
};

// Per-step log of the distributions an agent received, consumed by
// ordering_histogram(). One CSV line per agent per step.
struct OrderingLogEntry {
  int t = 0;
  int agent = 0;
  bool at_goal = false;
  ActionDistribution dist;
};

// Shared per-instance data so sweeps build the exact tables once.
struct InstanceData {
  Instance inst;
  std::vector<HeuristicTable> bd;
  std::string map_label;
  std::string scen_label;

  InstanceData(Instance i, std::string map_label, std::string scen_label);
};

RunOutput run_onestep(const RunSpec& spec, const InstanceData& data, std::vector<OrderingLogEntry>* log = nullptr);
RunOutput run_lacam(const RunSpec& spec, const InstanceData& data);
RunOutput run_spec(const RunSpec& spec, const InstanceData& data, std::vector<OrderingLogEntry>* log = nullptr);
// Loads map and scenario from spec paths.
RunOutput run_spec(const RunSpec& spec, std::vector<OrderingLogEntry>* log = nullptr);

struct CellAggregate {
  std::string key;
  RunRecord exemplar;  // labels of the cell
  int runs = 0;
  int successes = 0;
  double success_rate = 0;
  std::optional<double> mean_cost;         // own successful runs, per agent
  std::optional<double> mean_cost_common;  // instances every >=50% cell at this N solved
  double mean_runtime_ms = 0;
};

// Groups by cell, applies the common-solved-instance cost protocol per
// (map, n_agents). Output order follows first appearance.
std::vector<CellAggregate> aggregate(const std::vector<RunSpec>& specs, const std::vector<RunRecord>& records);
RunRecord aggregate_record(const CellAggregate& a);

struct SweepOptions {
  int threads = 0;  // 0: OpenMP default
  bool progress = false;
};

// Runs every spec (in parallel, one job per run) and returns records in spec order.
std::vector<RunRecord> run_sweep(const std::vector<RunSpec>& specs, const SweepOptions& opt = {});
// Single-threaded reference for run_sweep.
std::vector<RunRecord> run_sweep_serial(const std::vector<RunSpec>& specs);

// Run rows followed by one aggregate row per cell.
std::string bench_sweep(const std::vector<RunSpec>& specs, const SweepOptions& opt = {});

struct NoiseStudyConfig {
  std::string map_path;
  std::vector<std::string> scen_paths;
  std::vector<long> seeds;
  std::vector<double> k_values;
  std::vector<int> agent_counts;
  std::vector<Algo> algos;
  double timeout_s = 60.0;
};

std::vector<RunSpec> noise_study_specs(const NoiseStudyConfig& cfg);
// Aggregate rows carry cost_ratio (mean cost at K over mean cost at K=0 on
// instances both solved).
std::string noise_study(const NoiseStudyConfig& cfg, const SweepOptions& opt = {});

using OrderingMatrix = std::array<std::array<double, kNumActions>, kNumActions>;  // [action][position]

struct OrderingHistogram {
  // Index [sample mode][at_goal].
  OrderingMatrix matrix[2][2]{};
  long samples[2][2]{};
  double max_strict_sampled_diff = 0;
};

OrderingHistogram ordering_histogram(const std::vector<OrderingLogEntry>& entries, std::uint64_t seed = 0);
std::string write_ordering_log(const std::vector<OrderingLogEntry>& entries);
std::vector<OrderingLogEntry> read_ordering_log(std::string_view text);
std::string write_histogram_csv(const OrderingHistogram& h);

}  // namespace mapf
