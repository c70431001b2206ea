#include "mapf/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <set>
#include <sstream>
#include <stdexcept>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mapf/external_policy.hpp"
#include "mapf/pibt.hpp"

namespace mapf {
namespace {

std::string fmt_double(double v, int prec = 4) {
  std::ostringstream os;
  os << std::setprecision(prec) << v;
  return os.str();
}

std::string base_name(const std::string& path) { return std::filesystem::path(path).filename().string(); }

const char* algo_label(Algo a) { return a == Algo::Lacam ? "lacam" : "pibt"; }
const char* shield_label(Shield s) { return s == Shield::Naive ? "naive" : "pibt"; }
const char* heuristic_label(HeuristicKind k) { return k == HeuristicKind::Manhattan ? "manhattan" : "bd"; }

// Ranking tables for a run: exact or Manhattan, then degraded at noise K.
std::vector<HeuristicTable> ranking_tables(const RunSpec& spec, const InstanceData& data) {
  std::vector<HeuristicTable> tables =
      spec.heuristic == HeuristicKind::Manhattan
          ? build_tables_serial(data.inst.map, data.inst.goals, HeuristicKind::Manhattan)
          : data.bd;
  if (spec.noise_k > 0) {
    const std::uint64_t s = static_cast<std::uint64_t>(spec.seed + kDegradeSeedOffset);
    std::vector<HeuristicTable> out;
    out.reserve(tables.size());
    for (std::size_t i = 0; i < tables.size(); ++i) out.push_back(degrade_serial(tables[i], spec.noise_k, mix_seed(s, i)));
    return out;
  }
  return tables;
}

std::unique_ptr<PolicyProvider> make_policy(const RunSpec& spec, const InstanceData& data) {
  const std::uint64_t s = static_cast<std::uint64_t>(spec.seed + kPolicySeedOffset);
  switch (spec.policy.kind) {
    case PolicySpec::Kind::None: return nullptr;
    case PolicySpec::Kind::Uniform: return std::make_unique<UniformPolicy>(data.inst.num_agents());
    case PolicySpec::Kind::Softmax:
      return std::make_unique<SoftmaxHPolicy>(data.inst, data.bd, spec.policy.tau, spec.policy.kappa, s);
    case PolicySpec::Kind::External:
      return std::make_unique<ExternalPolicy>(
          spec.policy.command, data.inst, s,
          std::chrono::milliseconds(static_cast<long>(spec.policy_step_timeout_s * 1000)));
  }
  return nullptr;
}

RunRecord base_record(const RunSpec& spec, const InstanceData& data) {
  RunRecord r;
  r.algo = algo_label(spec.algo);
  r.ordering_mode = spec.ordering.label();
  r.shield = spec.algo == Algo::Lacam ? "pibt" : shield_label(spec.shield);
  r.map = sanitize_label(data.map_label);
  r.scen = sanitize_label(data.scen_label);
  r.n_agents = data.inst.num_agents();
  r.seed = spec.seed;
  r.params = {{"heuristic", heuristic_label(spec.heuristic)},
              {"noise_K", fmt_double(spec.noise_k)},
              {"policy", spec.policy.label()},
              {"sample", sample_mode_name(spec.sample)}};
  // Noise draws are frozen per run, keyed by the run seed.
  if (spec.noise_k > 0) r.params.emplace_back("noise_seed", std::to_string(spec.seed + kDegradeSeedOffset));
  return r;
}

void finalize(RunOutput& out, const InstanceData& data, bool success) {
  RunRecord& r = out.record;
  if (success) {
    const ValidationReport rep = validate_paths(out.paths, data.inst);
    out.valid = rep.ok;
    if (!rep.ok) {
      success = false;
      out.reason = "invalid solution: " + rep.summary();
    }
  }
  r.success = success;
  r.params.emplace_back("valid", success ? "1" : "0");
  if (success) {
    r.flowtime = flowtime(out.paths, data.inst.goals);
    r.makespan = makespan(out.paths, data.inst.goals);
  } else {
    r.flowtime = 0;
    r.makespan = 0;
  }
  if (!out.reason.empty()) r.params.emplace_back("reason", sanitize_label(out.reason));
}

}  // namespace

std::string PolicySpec::label() const {
  switch (kind) {
    case Kind::None: return "none";
    case Kind::Uniform: return "uniform";
    case Kind::Softmax: return "softmax_" + fmt_double(tau) + "_" + fmt_double(kappa);
    case Kind::External: return "external";
  }
  return "?";
}

PolicySpec parse_policy_spec(const std::string& s) {
  PolicySpec p;
  if (s == "none" || s.empty()) return p;
  if (s == "uniform") {
    p.kind = PolicySpec::Kind::Uniform;
    return p;
  }
  if (s.rfind("softmax:", 0) == 0) {
    p.kind = PolicySpec::Kind::Softmax;
    const std::string rest = s.substr(8);
    const auto comma = rest.find(',');
    if (comma == std::string::npos) throw std::invalid_argument("softmax policy expects softmax:TAU,KAPPA");
    p.tau = std::stod(rest.substr(0, comma));
    p.kappa = std::stod(rest.substr(comma + 1));
    if (p.tau < 0 || p.kappa < 0 || p.kappa > 100) throw std::invalid_argument("softmax TAU/KAPPA out of range");
    return p;
  }
  if (s.rfind("external:", 0) == 0) {
    p.kind = PolicySpec::Kind::External;
    p.command = s.substr(9);
    if (p.command.empty()) throw std::invalid_argument("external policy needs a command");
    return p;
  }
  throw std::invalid_argument("unknown policy '" + s + "' (expected none|uniform|softmax:TAU,KAPPA|external:CMD)");
}

Algo parse_algo(const std::string& s) {
  if (s == "pibt" || s == "onestep-pibt" || s == "onestep") return Algo::OneStepPibt;
  if (s == "lacam") return Algo::Lacam;
  throw std::invalid_argument("unknown algo '" + s + "' (expected pibt|lacam)");
}

Shield parse_shield(const std::string& s) {
  if (s == "naive") return Shield::Naive;
  if (s == "pibt") return Shield::Pibt;
  throw std::invalid_argument("unknown shield '" + s + "' (expected naive|pibt)");
}

HeuristicKind parse_heuristic(const std::string& s) {
  if (s == "bd") return HeuristicKind::BackwardDijkstra;
  if (s == "manhattan") return HeuristicKind::Manhattan;
  throw std::invalid_argument("unknown heuristic '" + s + "' (expected bd|manhattan)");
}

void RunSpec::check() const {
  const bool has_policy = policy.kind != PolicySpec::Kind::None;
  if (n_agents < 1) throw std::invalid_argument("agent count must be at least 1");
  if (shield == Shield::Naive && algo == Algo::OneStepPibt && !has_policy)
    throw std::invalid_argument("the naive shield needs a policy to propose actions");
  if (ordering.needs_policy() && !has_policy)
    throw std::invalid_argument("ordering " + ordering.label() + " needs a policy");
  if (!(noise_k >= 0 && noise_k <= 100)) throw std::invalid_argument("noise K must lie in [0, 100]");
  if (!(timeout_s > 0)) throw std::invalid_argument("timeout must be positive");
}

std::string RunSpec::cell_key() const {
  std::ostringstream os;
  os << base_name(map_path) << '|' << n_agents << '|' << algo_label(algo) << '|'
     << (algo == Algo::Lacam ? "pibt" : shield_label(shield)) << '|' << ordering.label() << '|'
     << sample_mode_name(sample) << '|' << policy.label() << '|' << heuristic_label(heuristic) << '|' << noise_k;
  return os.str();
}

InstanceData::InstanceData(Instance i, std::string m, std::string s)
    : inst(std::move(i)), map_label(std::move(m)), scen_label(std::move(s)) {
  bd = build_tables(inst.map, inst.goals, HeuristicKind::BackwardDijkstra);
}

RunOutput run_onestep(const RunSpec& spec, const InstanceData& data, std::vector<OrderingLogEntry>* log) {
  spec.check();
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto deadline = t0 + std::chrono::duration_cast<clock::duration>(std::chrono::duration<double>(spec.timeout_s));
  const Instance& inst = data.inst;
  const GridMap& map = inst.map;
  const int n = inst.num_agents();
  const int max_t = spec.max_timesteps > 0 ? spec.max_timesteps : 16 * (map.width() + map.height());

  RunOutput out;
  out.record = base_record(spec, data);
  out.record.params.emplace_back("max_timesteps", std::to_string(max_t));

  const auto tables = ranking_tables(spec, data);
  Rng rng(static_cast<std::uint64_t>(spec.seed));
  std::unique_ptr<PolicyProvider> policy;
  bool success = false;
  try {
    policy = make_policy(spec, data);
    const bool use_policy_for_rank = spec.ordering.needs_policy();
    ActionRanker ranker(map, tables, use_policy_for_rank ? policy.get() : nullptr, spec.ordering, spec.sample);
    PibtPlanner planner(map);
    auto priorities = initial_priorities(inst, data.bd);

    std::vector<CellId> cur(n), next;
    for (int i = 0; i < n; ++i) cur[i] = map.id(inst.starts[i]);
    std::vector<CellId> goal_ids(n);
    for (int i = 0; i < n; ++i) goal_ids[i] = map.id(inst.goals[i]);
    std::vector<std::vector<CellId>> history{cur};
    std::vector<ActionOrdering> orderings;
    std::vector<ActionDistribution> dists;
    Configuration cells(n);

    int t = 0;
    while (true) {
      if (cur == goal_ids) {
        success = true;
        break;
      }
      if (t >= max_t) {
        out.reason = "timestep limit";
        break;
      }
      if (clock::now() >= deadline) {
        out.reason = "timeout";
        break;
      }
      for (int i = 0; i < n; ++i) cells[i] = map.cell(cur[i]);
      if (policy && (spec.shield == Shield::Naive || (log != nullptr && !use_policy_for_rank))) {
        policy->distributions(t, cells, dists);
        if (static_cast<int>(dists.size()) != n) throw std::runtime_error("policy returned wrong distribution count");
      }
      if (spec.shield == Shield::Naive) {
        std::vector<Action> proposed(n);
        for (int i = 0; i < n; ++i) proposed[i] = dists[i].argmax();
        const StepResult r = cs_naive_step(cells, proposed, map);
        for (int i = 0; i < n; ++i) cur[i] = map.id(r.next[i]);
      } else {
        ranker.orderings(t, cur, orderings, rng);
        if (use_policy_for_rank) dists = ranker.last_distributions();
        const auto order = priority_order(priorities);
        planner.plan(cur, orderings, order, {}, next);
        cur = next;
      }
      if (log != nullptr && policy) {
        for (int i = 0; i < n; ++i) log->push_back({t, i, cells[i] == inst.goals[i], dists[i]});
      }
      history.push_back(cur);
      for (int i = 0; i < n; ++i) cells[i] = map.cell(cur[i]);
      priorities = update_priorities(std::move(priorities), cells, inst.goals);
      ++t;
    }
    out.paths.assign(n, {});
    for (int i = 0; i < n; ++i) {
      out.paths[i].reserve(history.size());
      for (const auto& cfg : history) out.paths[i].push_back(map.cell(cfg[i]));
    }
    out.record.params.emplace_back("timesteps", std::to_string(t));
  } catch (const std::exception& e) {
    success = false;
    out.reason = e.what();
  }
  if (policy) {
    policy->finish(success);
    for (auto& kv : policy->stats()) out.record.params.push_back(kv);
  }
  out.record.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
  finalize(out, data, success);
  return out;
}

RunOutput run_lacam(const RunSpec& spec, const InstanceData& data) {
  spec.check();
  const auto t0 = std::chrono::steady_clock::now();
  RunOutput out;
  out.record = base_record(spec, data);
  const auto tables = ranking_tables(spec, data);
  std::unique_ptr<PolicyProvider> policy;
  bool success = false;
  try {
    policy = make_policy(spec, data);
    ActionRanker ranker(data.inst.map, tables, spec.ordering.needs_policy() ? policy.get() : nullptr, spec.ordering,
                        spec.sample);
    SolveLimits limits;
    limits.timeout = std::chrono::milliseconds(static_cast<long>(spec.timeout_s * 1000));
    limits.node_cap = spec.node_cap;
    SolveResult res = lacam_solve(data.inst, ranker, initial_priorities(data.inst, data.bd), limits,
                                  static_cast<std::uint64_t>(spec.seed));
    success = res.success();
    out.paths = std::move(res.paths);
    out.record.hl_nodes = res.hl_nodes_generated;
    out.record.params.emplace_back("status", status_name(res.status));
    out.record.params.emplace_back("ll_nodes", std::to_string(res.ll_nodes_expanded));
    if (!success) out.reason = res.reason;
  } catch (const std::exception& e) {
    out.reason = e.what();
  }
  if (policy) {
    policy->finish(success);
    for (auto& kv : policy->stats()) out.record.params.push_back(kv);
  }
  out.record.runtime_ms =
      std::chrono::duration_cast<std::chrono::milliseconds>(std::chrono::steady_clock::now() - t0).count();
  finalize(out, data, success);
  return out;
}

RunOutput run_spec(const RunSpec& spec, const InstanceData& data, std::vector<OrderingLogEntry>* log) {
  return spec.algo == Algo::Lacam ? run_lacam(spec, data) : run_onestep(spec, data, log);
}

RunOutput run_spec(const RunSpec& spec, std::vector<OrderingLogEntry>* log) {
  const GridMap map = load_map(spec.map_path);
  const auto entries = load_scen(spec.scen_path);
  InstanceData data(make_instance(map, entries, spec.n_agents), base_name(spec.map_path), base_name(spec.scen_path));
  return run_spec(spec, data, log);
}

namespace {

struct InstanceCache {
  std::map<std::string, std::shared_ptr<GridMap>> maps;
  std::map<std::string, std::shared_ptr<std::vector<ScenarioEntry>>> scens;
  std::map<std::tuple<std::string, std::string, int>, std::shared_ptr<InstanceData>> data;

  std::shared_ptr<InstanceData> get(const RunSpec& s) {
    auto key = std::make_tuple(s.map_path, s.scen_path, s.n_agents);
    if (auto it = data.find(key); it != data.end()) return it->second;
    auto& m = maps[s.map_path];
    if (!m) m = std::make_shared<GridMap>(load_map(s.map_path));
    auto& e = scens[s.scen_path];
    if (!e) e = std::make_shared<std::vector<ScenarioEntry>>(load_scen(s.scen_path));
    auto d = std::make_shared<InstanceData>(make_instance(*m, *e, s.n_agents), base_name(s.map_path),
                                            base_name(s.scen_path));
    data[key] = d;
    return d;
  }
};

RunRecord failed_record(const RunSpec& spec, const std::string& why) {
  RunRecord r;
  r.algo = algo_label(spec.algo);
  r.ordering_mode = spec.ordering.label();
  r.shield = shield_label(spec.shield);
  r.map = sanitize_label(base_name(spec.map_path));
  r.scen = sanitize_label(base_name(spec.scen_path));
  r.n_agents = spec.n_agents;
  r.seed = spec.seed;
  r.params = {{"reason", sanitize_label(why)}, {"valid", "0"}};
  return r;
}

std::vector<std::shared_ptr<InstanceData>> load_all(const std::vector<RunSpec>& specs,
                                                    std::vector<std::string>& errors) {
  InstanceCache cache;
  std::vector<std::shared_ptr<InstanceData>> out(specs.size());
  errors.assign(specs.size(), {});
  for (std::size_t i = 0; i < specs.size(); ++i) {
    try {
      specs[i].check();
      out[i] = cache.get(specs[i]);
    } catch (const std::exception& e) {
      errors[i] = e.what();
    }
  }
  return out;
}

}  // namespace

std::vector<RunRecord> run_sweep(const std::vector<RunSpec>& specs, const SweepOptions& opt) {
  std::vector<std::string> errors;
  const auto data = load_all(specs, errors);
  std::vector<RunRecord> out(specs.size());
  const int n = static_cast<int>(specs.size());
  std::mutex progress_mu;
  int done = 0;
  // Runs are independent jobs; each owns its planner, rng and policy.
#ifdef _OPENMP
  const int threads = opt.threads > 0 ? opt.threads : omp_get_max_threads();
#endif
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
  for (int i = 0; i < n; ++i) {
    if (!data[i]) {
      out[i] = failed_record(specs[i], errors[i]);
    } else {
      try {
        out[i] = run_spec(specs[i], *data[i]).record;
      } catch (const std::exception& e) {
        out[i] = failed_record(specs[i], e.what());
      }
    }
    if (opt.progress) {
      std::lock_guard lock(progress_mu);
      ++done;
      if (done % 25 == 0 || done == n) std::cerr << "  " << done << "/" << n << " runs\r" << std::flush;
    }
  }
  if (opt.progress) std::cerr << "\n";
  return out;
}

std::vector<RunRecord> run_sweep_serial(const std::vector<RunSpec>& specs) {
  std::vector<std::string> errors;
  const auto data = load_all(specs, errors);
  std::vector<RunRecord> out;
  out.reserve(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!data[i]) {
      out.push_back(failed_record(specs[i], errors[i]));
      continue;
    }
    try {
      out.push_back(run_spec(specs[i], *data[i]).record);
    } catch (const std::exception& e) {
      out.push_back(failed_record(specs[i], e.what()));
    }
  }
  return out;
}

std::vector<CellAggregate> aggregate(const std::vector<RunSpec>& specs, const std::vector<RunRecord>& records) {
  if (specs.size() != records.size()) throw std::invalid_argument("aggregate: specs and records differ in size");
  std::vector<CellAggregate> cells;
  std::map<std::string, std::size_t> index;
  std::vector<std::size_t> cell_of(specs.size());
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const std::string key = specs[i].cell_key();
    auto [it, fresh] = index.emplace(key, cells.size());
    if (fresh) {
      CellAggregate a;
      a.key = key;
      a.exemplar = records[i];
      cells.push_back(std::move(a));
    }
    cell_of[i] = it->second;
  }
  std::vector<double> cost_sum(cells.size(), 0), runtime_sum(cells.size(), 0);
  for (std::size_t i = 0; i < specs.size(); ++i) {
    CellAggregate& a = cells[cell_of[i]];
    ++a.runs;
    runtime_sum[cell_of[i]] += records[i].runtime_ms;
    if (records[i].success) {
      ++a.successes;
      cost_sum[cell_of[i]] += static_cast<double>(records[i].flowtime) / records[i].n_agents;
    }
  }
  for (std::size_t c = 0; c < cells.size(); ++c) {
    CellAggregate& a = cells[c];
    a.success_rate = a.runs ? static_cast<double>(a.successes) / a.runs : 0.0;
    a.mean_runtime_ms = a.runs ? runtime_sum[c] / a.runs : 0.0;
    if (a.successes) a.mean_cost = cost_sum[c] / a.successes;
  }

  // Common-solved protocol: per (map, N), the instances solved by every cell
  // whose success rate is at least 0.5.
  using Group = std::pair<std::string, int>;
  std::map<Group, std::vector<std::size_t>> groups;
  for (std::size_t c = 0; c < cells.size(); ++c)
    groups[{cells[c].exemplar.map, cells[c].exemplar.n_agents}].push_back(c);
  for (const auto& [g, members] : groups) {
    std::vector<std::size_t> qualifying;
    for (std::size_t c : members)
      if (cells[c].success_rate >= 0.5) qualifying.push_back(c);
    if (qualifying.empty()) continue;
    std::map<std::pair<std::string, long>, int> solved_by;
    std::map<std::pair<std::size_t, std::pair<std::string, long>>, double> cost_of;
    for (std::size_t i = 0; i < specs.size(); ++i) {
      const std::size_t c = cell_of[i];
      if (!records[i].success || std::find(qualifying.begin(), qualifying.end(), c) == qualifying.end()) continue;
      const auto inst = std::make_pair(records[i].scen, records[i].seed);
      ++solved_by[inst];
      cost_of[{c, inst}] = static_cast<double>(records[i].flowtime) / records[i].n_agents;
    }
    for (std::size_t c : qualifying) {
      double sum = 0;
      int cnt = 0;
      for (const auto& [inst, k] : solved_by) {
        if (k != static_cast<int>(qualifying.size())) continue;
        auto it = cost_of.find({c, inst});
        if (it == cost_of.end()) continue;
        sum += it->second;
        ++cnt;
      }
      if (cnt) cells[c].mean_cost_common = sum / cnt;
    }
  }
  return cells;
}

RunRecord aggregate_record(const CellAggregate& a) {
  RunRecord r = a.exemplar;
  r.scen = "ALL";
  r.seed = -1;
  r.success = a.success_rate >= 0.5;
  r.flowtime = 0;
  r.makespan = 0;
  r.hl_nodes = 0;
  r.runtime_ms = static_cast<long>(std::llround(a.mean_runtime_ms));
  std::vector<std::pair<std::string, std::string>> params;
  for (const auto& kv : a.exemplar.params) {
    if (kv.first == "heuristic" || kv.first == "noise_K" || kv.first == "policy" || kv.first == "sample")
      params.push_back(kv);
  }
  params.emplace_back("aggregate", "1");
  params.emplace_back("runs", std::to_string(a.runs));
  params.emplace_back("success_rate", fmt_double(a.success_rate));
  params.emplace_back("mean_cost", a.mean_cost ? fmt_double(*a.mean_cost, 5) : "NA");
  params.emplace_back("mean_cost_common", a.mean_cost_common ? fmt_double(*a.mean_cost_common, 5) : "NA");
  r.params = std::move(params);
  return r;
}

std::string bench_sweep(const std::vector<RunSpec>& specs, const SweepOptions& opt) {
  std::vector<RunRecord> records = run_sweep(specs, opt);
  const auto cells = aggregate(specs, records);
  for (const auto& a : cells) records.push_back(aggregate_record(a));
  return write_csv(records);
}

std::vector<RunSpec> noise_study_specs(const NoiseStudyConfig& cfg) {
  std::vector<RunSpec> specs;
  for (double k : cfg.k_values)
    for (Algo algo : cfg.algos)
      for (int n : cfg.agent_counts)
        for (const auto& scen : cfg.scen_paths)
          for (long seed : cfg.seeds) {
            RunSpec s;
            s.map_path = cfg.map_path;
            s.scen_path = scen;
            s.n_agents = n;
            s.algo = algo;
            s.noise_k = k;
            s.seed = seed;
            s.timeout_s = cfg.timeout_s;
            specs.push_back(s);
          }
  return specs;
}

std::string noise_study(const NoiseStudyConfig& cfg, const SweepOptions& opt) {
  const auto specs = noise_study_specs(cfg);
  std::vector<RunRecord> records = run_sweep(specs, opt);
  const auto cells = aggregate(specs, records);
  // Baseline (K = 0) cost per (algo, N, scen, seed).
  std::map<std::tuple<std::string, int, std::string, long>, double> base;
  for (std::size_t i = 0; i < specs.size(); ++i)
    if (specs[i].noise_k == 0 && records[i].success)
      base[{records[i].algo, records[i].n_agents, records[i].scen, records[i].seed}] =
          static_cast<double>(records[i].flowtime);
  std::map<std::string, std::pair<double, double>> ratio_parts;  // key -> (sum K cost, sum base cost)
  for (std::size_t i = 0; i < specs.size(); ++i) {
    if (!records[i].success) continue;
    auto it = base.find({records[i].algo, records[i].n_agents, records[i].scen, records[i].seed});
    if (it == base.end()) continue;
    auto& p = ratio_parts[specs[i].cell_key()];
    p.first += static_cast<double>(records[i].flowtime);
    p.second += it->second;
  }
  for (const auto& a : cells) {
    RunRecord r = aggregate_record(a);
    auto it = ratio_parts.find(a.key);
    r.params.emplace_back("cost_ratio",
                          it != ratio_parts.end() && it->second.second > 0 ? fmt_double(it->second.first / it->second.second, 5) : "NA");
    records.push_back(std::move(r));
  }
  return write_csv(records);
}

OrderingHistogram ordering_histogram(const std::vector<OrderingLogEntry>& entries, std::uint64_t seed) {
  OrderingHistogram h;
  Rng rng(seed);
  for (const auto& e : entries) {
    const int g = e.at_goal ? 1 : 0;
    const ActionOrdering strict = strict_ordering(e.dist, rng);
    const ActionOrdering sampled = sampled_ordering(e.dist, rng);
    for (int k = 0; k < kNumActions; ++k) {
      h.matrix[0][g][index_of(strict[k])][k] += 1;
      h.matrix[1][g][index_of(sampled[k])][k] += 1;
    }
    ++h.samples[0][g];
    ++h.samples[1][g];
  }
  for (int m = 0; m < 2; ++m)
    for (int g = 0; g < 2; ++g)
      if (h.samples[m][g] > 0)
        for (auto& row : h.matrix[m][g])
          for (double& v : row) v /= static_cast<double>(h.samples[m][g]);
  for (int g = 0; g < 2; ++g)
    for (int a = 0; a < kNumActions; ++a)
      for (int k = 0; k < kNumActions; ++k)
        h.max_strict_sampled_diff = std::max(h.max_strict_sampled_diff, std::abs(h.matrix[0][g][a][k] - h.matrix[1][g][a][k]));
  return h;
}

std::string write_ordering_log(const std::vector<OrderingLogEntry>& entries) {
  std::ostringstream os;
  os << "t,agent,at_goal,p_up,p_down,p_left,p_right,p_wait\n";
  os << std::setprecision(17);
  for (const auto& e : entries) {
    os << e.t << ',' << e.agent << ',' << (e.at_goal ? 1 : 0);
    for (double p : e.dist.probs) os << ',' << p;
    os << '\n';
  }
  return os.str();
}

std::vector<OrderingLogEntry> read_ordering_log(std::string_view text) {
  std::vector<OrderingLogEntry> out;
  std::istringstream in{std::string(text)};
  std::string line;
  int ln = 0;
  while (std::getline(in, line)) {
    ++ln;
    if (ln == 1) {
      if (line.rfind("t,agent,at_goal", 0) != 0) throw ParseError(1, "unexpected ordering log header");
      continue;
    }
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    OrderingLogEntry e;
    int g = 0;
    if (!(ls >> e.t >> e.agent >> g)) throw ParseError(ln, "malformed ordering log line");
    e.at_goal = g != 0;
    for (double& p : e.dist.probs)
      if (!(ls >> p)) throw ParseError(ln, "malformed ordering log probabilities");
    out.push_back(e);
  }
  return out;
}

std::string write_histogram_csv(const OrderingHistogram& h) {
  std::ostringstream os;
  os << "mode,at_goal,action,samples,k1,k2,k3,k4,k5\n";
  for (int m = 0; m < 2; ++m)
    for (int g = 0; g < 2; ++g)
      for (int a = 0; a < kNumActions; ++a) {
        os << (m == 0 ? "strict" : "sampled") << ',' << g << ',' << action_name(static_cast<Action>(a)) << ','
           << h.samples[m][g];
        for (int k = 0; k < kNumActions; ++k) os << ',' << std::setprecision(6) << h.matrix[m][g][a][k];
        os << '\n';
      }
  return os.str();
}

}  // namespace mapf
