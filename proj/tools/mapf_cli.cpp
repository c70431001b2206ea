#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "mapf/bench_io.hpp"
#include "mapf/runner.hpp"
#include "mapf/sweep_config.hpp"

namespace fs = std::filesystem;
using namespace mapf;

namespace {

constexpr int kOk = 0;
constexpr int kFail = 1;
constexpr int kUsage = 2;

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
}

struct SolveArgs {
  std::string map, scen, algo = "lacam", heuristic = "bd", order = "h", shield = "pibt", sample = "sampled";
  std::string policy = "none", out, log_orderings;
  int agents = 1;
  double noise_k = 0, R = 1, timeout = 60;
  int max_timesteps = 0;
  long seed = 0;
};

int cmd_solve(const SolveArgs& a) {
  RunSpec s;
  try {
    s.map_path = a.map;
    s.scen_path = a.scen;
    s.n_agents = a.agents;
    s.algo = parse_algo(a.algo);
    s.heuristic = parse_heuristic(a.heuristic);
    s.noise_k = a.noise_k;
    s.ordering = parse_rank_mode(a.order, a.R);
    s.shield = parse_shield(a.shield);
    s.sample = parse_sample_mode(a.sample);
    s.policy = parse_policy_spec(a.policy);
    s.seed = a.seed;
    s.timeout_s = a.timeout;
    s.max_timesteps = a.max_timesteps;
    s.check();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::optional<GridMap> map;
  std::vector<ScenarioEntry> entries;
  try {
    map.emplace(load_map(a.map));
    entries = load_scen(a.scen);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::vector<OrderingLogEntry> log;
  RunOutput out;
  try {
    InstanceData data(make_instance(*map, entries, a.agents), fs::path(a.map).filename().string(),
                      fs::path(a.scen).filename().string());
    out = run_spec(s, data, a.log_orderings.empty() ? nullptr : &log);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  std::cout << csv_header() << "\n" << csv_row(out.record) << "\n";
  if (!out.record.success) std::cerr << "failed: " << out.reason << "\n";
  if (!a.out.empty() && !out.paths.empty()) write_text(a.out, write_solution(out.paths));
  if (!a.log_orderings.empty()) write_text(a.log_orderings, write_ordering_log(log));
  return out.record.success ? kOk : kFail;
}

int cmd_bench(const std::string& config, const std::string& out_path, int threads) {
  SweepConfig cfg;
  try {
    cfg = load_sweep(config);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  SweepOptions opt;
  opt.threads = threads > 0 ? threads : cfg.threads;
  opt.progress = true;
  std::cerr << cfg.specs.size() << " runs\n";
  write_text(out_path, bench_sweep(cfg.specs, opt));
  return kOk;
}

int cmd_validate(const std::string& map_path, const std::string& scen, int agents, const std::string& paths_path) {
  std::optional<Instance> inst;
  PathSet paths;
  try {
    inst.emplace(make_instance(load_map(map_path), load_scen(scen), agents));
    paths = read_solution(read_file(paths_path));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  const ValidationReport rep = validate_paths(paths, *inst);
  std::cout << rep.summary() << "\n";
  if (rep.ok) std::cout << "flowtime " << flowtime(paths, inst->goals) << " makespan " << makespan(paths, inst->goals) << "\n";
  return rep.ok ? kOk : kFail;
}

int cmd_stats(const std::string& dir, const std::string& out_path, unsigned long seed) {
  std::vector<OrderingLogEntry> all;
  try {
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(dir))
      if (e.path().extension() == ".csv") files.push_back(e.path());
    std::sort(files.begin(), files.end());
    if (files.empty()) throw std::runtime_error("no .csv ordering logs in " + dir);
    for (const auto& f : files) {
      auto part = read_ordering_log(read_file(f.string()));
      all.insert(all.end(), part.begin(), part.end());
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  const OrderingHistogram h = ordering_histogram(all, seed);
  write_text(out_path, write_histogram_csv(h));
  std::cerr << all.size() << " entries, max |strict - sampled| = " << h.max_strict_sampled_diff << "\n";
  return kOk;
}

int cmd_noise(const NoiseStudyConfig& cfg, const std::string& scen_dir, const std::vector<std::string>& algos,
              const std::string& out_path) {
  NoiseStudyConfig c = cfg;
  try {
    for (const auto& e : fs::directory_iterator(scen_dir))
      if (e.path().extension() == ".scen") c.scen_paths.push_back(e.path().string());
    std::sort(c.scen_paths.begin(), c.scen_paths.end());
    for (const auto& a : algos) c.algos.push_back(parse_algo(a));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  }
  SweepOptions opt;
  opt.progress = true;
  write_text(out_path, noise_study(c, opt));
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Grid MAPF solvers: one-step PIBT and LaCAM with heuristic and policy orderings"};
  app.require_subcommand(1);

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "Solve one instance and print its run record");
  solve->add_option("--map", sa.map, "MovingAI .map file")->required();
  solve->add_option("--scen", sa.scen, "MovingAI .scen file")->required();
  solve->add_option("--agents", sa.agents, "Number of agents (first N entries)")->required();
  solve->add_option("--algo", sa.algo, "pibt | lacam");
  solve->add_option("--heuristic", sa.heuristic, "bd | manhattan");
  solve->add_option("--noise-K", sa.noise_k, "Heuristic degradation K in percent");
  solve->add_option("--order", sa.order, "h | h2 | pi | tie | sum");
  solve->add_option("--R", sa.R, "Policy weight for --order sum");
  solve->add_option("--shield", sa.shield, "naive | pibt (one-step only)");
  solve->add_option("--sample", sa.sample, "strict | sampled");
  solve->add_option("--policy", sa.policy, "none | uniform | softmax:TAU,KAPPA | external:CMD");
  solve->add_option("--seed", sa.seed);
  solve->add_option("--timeout", sa.timeout, "Seconds");
  solve->add_option("--max-timesteps", sa.max_timesteps, "One-step horizon, 0 for 16*(w+h)");
  solve->add_option("--out", sa.out, "Write the solution paths here");
  solve->add_option("--log-orderings", sa.log_orderings, "Write per-step policy distributions (for stats)");

  std::string config, bench_out = "-";
  int threads = 0;
  auto* bench = app.add_subcommand("bench", "Run a sweep file and write run + aggregate rows");
  bench->add_option("--config", config, "Sweep file")->required();
  bench->add_option("--out", bench_out, "CSV output, - for stdout");
  bench->add_option("--threads", threads, "Worker threads, 0 for the config/OpenMP default");

  std::string v_map, v_scen, v_paths;
  int v_agents = 1;
  auto* validate = app.add_subcommand("validate", "Check a solution file for conflicts");
  validate->add_option("--map", v_map)->required();
  validate->add_option("--scen", v_scen)->required();
  validate->add_option("--agents", v_agents)->required();
  validate->add_option("--paths", v_paths)->required();

  std::string logs_dir, stats_out = "-";
  unsigned long stats_seed = 0;
  auto* stats = app.add_subcommand("stats", "Ordering-position histograms from --log-orderings files");
  stats->add_option("--logs", logs_dir, "Directory of ordering logs (*.csv)")->required();
  stats->add_option("--out", stats_out, "CSV output, - for stdout");
  stats->add_option("--seed", stats_seed);

  NoiseStudyConfig nc;
  std::string noise_scen_dir, noise_out = "-";
  std::vector<std::string> noise_algos = {"pibt", "lacam"};
  auto* noise = app.add_subcommand("noise", "Degraded-heuristic study with cost ratios against K=0");
  noise->add_option("--map", nc.map_path)->required();
  noise->add_option("--scen-dir", noise_scen_dir)->required();
  noise->add_option("--K", nc.k_values, "Noise levels; include 0 for ratios")->required();
  noise->add_option("--agents", nc.agent_counts)->required();
  noise->add_option("--seeds", nc.seeds)->required();
  noise->add_option("--algos", noise_algos);
  noise->add_option("--timeout", nc.timeout_s);
  noise->add_option("--out", noise_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }

  try {
    if (*solve) return cmd_solve(sa);
    if (*bench) return cmd_bench(config, bench_out, threads);
    if (*validate) return cmd_validate(v_map, v_scen, v_agents, v_paths);
    if (*stats) return cmd_stats(logs_dir, stats_out, stats_seed);
    if (*noise) return cmd_noise(nc, noise_scen_dir, noise_algos, noise_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFail;
  }
  return kUsage;
}
