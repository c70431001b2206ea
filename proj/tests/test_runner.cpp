#include <doctest.h>

#include <filesystem>
#include <cstdlib>
#include <fstream>
#include <sys/wait.h>

#include "mapf/runner.hpp"
#include "test_util.hpp"

using namespace mapf;
namespace fs = std::filesystem;

namespace {

const std::string kDir = MAPF_DATA_DIR;
const std::string kMap = kDir + "/random-32-32-10.map";
std::string scen(int i) { return kDir + "/scen/random-32-32-10-random-" + std::to_string(i) + ".scen"; }

RunSpec spec(Algo algo, int n, long seed = 0, int sc = 1) {
  RunSpec s;
  s.map_path = kMap;
  s.scen_path = scen(sc);
  s.n_agents = n;
  s.algo = algo;
  s.seed = seed;
  return s;
}

RunRecord strip_runtime(RunRecord r) {
  r.runtime_ms = 0;
  std::erase_if(r.params, [](const auto& kv) { return kv.first == "policy_latency_us"; });
  return r;
}

RunRecord rec(const std::string& algo, const std::string& scen_name, long seed, bool ok, long flow, int n = 2) {
  RunRecord r;
  r.algo = algo;
  r.map = "m";
  r.scen = scen_name;
  r.seed = seed;
  r.n_agents = n;
  r.success = ok;
  r.flowtime = ok ? flow : 0;
  return r;
}

}  // namespace

TEST_CASE("spec parsing helpers") {
  CHECK(parse_algo("lacam") == Algo::Lacam);
  CHECK(parse_algo("pibt") == Algo::OneStepPibt);
  CHECK_THROWS_AS(parse_algo("cbs"), std::invalid_argument);
  CHECK(parse_shield("naive") == Shield::Naive);
  CHECK(parse_heuristic("manhattan") == HeuristicKind::Manhattan);
  const auto p = parse_policy_spec("softmax:0.5,20");
  CHECK(p.kind == PolicySpec::Kind::Softmax);
  CHECK(p.tau == 0.5);
  CHECK(p.kappa == 20);
  CHECK(parse_policy_spec("external:python3 client.py --mode x").command == "python3 client.py --mode x");
  CHECK_THROWS_AS(parse_policy_spec("softmax:0.5"), std::invalid_argument);
  CHECK_THROWS_AS(parse_policy_spec("magat"), std::invalid_argument);
}

TEST_CASE("RunSpec::check rejects unrunnable combinations") {
  RunSpec s = spec(Algo::OneStepPibt, 5);
  s.shield = Shield::Naive;
  CHECK_THROWS_AS(s.check(), std::invalid_argument);
  s.policy = parse_policy_spec("softmax:0.5,0");
  CHECK_NOTHROW(s.check());
  RunSpec t = spec(Algo::Lacam, 5);
  t.ordering = RankMode::tie();
  CHECK_THROWS_AS(t.check(), std::invalid_argument);
  t.ordering = RankMode::h();
  t.noise_k = 120;
  CHECK_THROWS_AS(t.check(), std::invalid_argument);
}

TEST_CASE("runs are valid, reproducible and carry their parameters") {
  for (Algo algo : {Algo::OneStepPibt, Algo::Lacam}) {
    const RunSpec s = spec(algo, 40, 3);
    const auto a = run_spec(s);
    const auto b = run_spec(s);
    REQUIRE(a.record.success);
    CHECK(a.valid);
    CHECK(strip_runtime(a.record) == strip_runtime(b.record));
    CHECK(a.paths == b.paths);
    CHECK(a.record.flowtime == flowtime(a.paths, make_instance(load_map(kMap), load_scen(scen(1)), 40).goals));
    CHECK(a.record.param("heuristic") == "bd");
    CHECK(a.record.param("valid") == "1");
  }
  const auto pibt = run_spec(spec(Algo::OneStepPibt, 10));
  CHECK(pibt.record.param("max_timesteps") == "1024");
}

TEST_CASE("agents already at their goals succeed at t = 0") {
  const fs::path dir = fs::temp_directory_path() / "mapf_runner_trivial";
  fs::create_directories(dir);
  std::ofstream(dir / "m.map") << "type octile\nheight 2\nwidth 3\nmap\n...\n.@.\n";
  std::ofstream(dir / "s.scen") << "version 1\n0\tm.map\t3\t2\t0\t0\t0\t0\t0\n0\tm.map\t3\t2\t2\t1\t2\t1\t0\n";
  for (Algo algo : {Algo::OneStepPibt, Algo::Lacam}) {
    RunSpec s;
    s.map_path = (dir / "m.map").string();
    s.scen_path = (dir / "s.scen").string();
    s.n_agents = 2;
    s.algo = algo;
    const auto out = run_spec(s);
    CHECK(out.record.success);
    CHECK(out.record.flowtime == 0);
    CHECK(out.paths[0].size() == 1);
  }
}

TEST_CASE("one-step failures hit the timestep cap") {
  RunSpec s = spec(Algo::OneStepPibt, 50);
  s.heuristic = HeuristicKind::Manhattan;
  s.max_timesteps = 30;
  const auto out = run_spec(s);
  CHECK_FALSE(out.record.success);
  CHECK(out.reason == "timestep limit");
  CHECK(out.paths[0].size() == 31);
}

TEST_CASE("policy-driven shields") {
  RunSpec s = spec(Algo::OneStepPibt, 20);
  s.policy = parse_policy_spec("softmax:0.5,0");
  s.ordering = RankMode::pi();
  for (Shield sh : {Shield::Naive, Shield::Pibt})
    for (SampleMode m : {SampleMode::Strict, SampleMode::Sampled}) {
      s.shield = sh;
      s.sample = m;
      std::vector<OrderingLogEntry> log;
      const auto out = run_onestep(s, InstanceData(make_instance(load_map(kMap), load_scen(scen(1)), 20), "m", "s"), &log);
      if (out.record.success) CHECK(out.valid);
      CHECK_FALSE(log.empty());
      CHECK(log.size() % 20 == 0);
    }
}

TEST_CASE("noise K = 0 reproduces the plain run bit for bit") {
  RunSpec a = spec(Algo::Lacam, 60, 2);
  RunSpec b = a;
  b.noise_k = 0;
  CHECK(run_spec(a).paths == run_spec(b).paths);
  b.noise_k = 20;
  const auto noisy = run_spec(b);
  CHECK(noisy.record.param("noise_K") == "20");
}

TEST_CASE("aggregate applies the common-solved protocol") {
  // Two cells at N = 2. Cell A solves s1, s2; cell B solves s1 only (50%).
  std::vector<RunSpec> specs(4);
  std::vector<RunRecord> recs = {rec("pibt", "s1", 0, true, 10), rec("pibt", "s2", 0, true, 30),
                                 rec("lacam", "s1", 0, true, 14), rec("lacam", "s2", 0, false, 0)};
  for (int i = 0; i < 4; ++i) {
    specs[i] = spec(i < 2 ? Algo::OneStepPibt : Algo::Lacam, 2);
    specs[i].scen_path = recs[i].scen;
  }
  const auto cells = aggregate(specs, recs);
  REQUIRE(cells.size() == 2);
  CHECK(cells[0].success_rate == 1.0);
  CHECK(*cells[0].mean_cost == doctest::Approx(10.0));  // (5 + 15) / 2
  CHECK(*cells[0].mean_cost_common == doctest::Approx(5.0));
  CHECK(cells[1].success_rate == 0.5);
  CHECK(*cells[1].mean_cost == doctest::Approx(7.0));
  CHECK(*cells[1].mean_cost_common == doctest::Approx(7.0));
  const RunRecord row = aggregate_record(cells[0]);
  CHECK(row.scen == "ALL");
  CHECK(row.seed == -1);
  CHECK(row.param("success_rate") == "1");
  CHECK(row.param("runs") == "2");

  // A cell under 50% does not shrink the common set and gets no common cost.
  recs[3] = rec("lacam", "s2", 0, false, 0);
  recs[2] = rec("lacam", "s1", 0, false, 0);
  const auto c2 = aggregate(specs, recs);
  CHECK(*c2[0].mean_cost_common == doctest::Approx(10.0));
  CHECK_FALSE(c2[1].mean_cost_common.has_value());
  CHECK_FALSE(c2[1].mean_cost.has_value());
  CHECK_THROWS_AS(aggregate(specs, {}), std::invalid_argument);
}

TEST_CASE("bench_sweep output shape") {
  CHECK(bench_sweep({}) == csv_header() + "\n");
  std::vector<RunSpec> specs;
  for (int sc = 1; sc <= 3; ++sc)
    for (long seed = 0; seed < 2; ++seed) specs.push_back(spec(Algo::OneStepPibt, 20, seed, sc));
  const auto rows = read_csv(bench_sweep(specs));
  REQUIRE(rows.size() == 7);
  CHECK(rows.back().scen == "ALL");
  CHECK(rows.back().param("runs") == "6");
}

TEST_CASE("parallel sweep equals the serial reference") {
  std::vector<RunSpec> specs;
  for (int sc = 1; sc <= 4; ++sc) {
    specs.push_back(spec(Algo::Lacam, 30, sc, sc));
    specs.push_back(spec(Algo::OneStepPibt, 30, sc, sc));
  }
  RunSpec broken = spec(Algo::Lacam, 30);
  broken.scen_path = "/nonexistent.scen";
  specs.push_back(broken);
  SweepOptions opt;
  opt.threads = 4;
  const auto par = run_sweep(specs, opt);
  const auto ser = run_sweep_serial(specs);
  REQUIRE(par.size() == ser.size());
  for (std::size_t i = 0; i < par.size(); ++i) CHECK(strip_runtime(par[i]) == strip_runtime(ser[i]));
  CHECK_FALSE(par.back().success);
  CHECK_FALSE(par.back().param("reason").empty());
}

TEST_CASE("noise study rows carry cost ratios against K = 0") {
  NoiseStudyConfig cfg;
  cfg.map_path = kMap;
  cfg.scen_paths = {scen(1), scen(2)};
  cfg.seeds = {0};
  cfg.k_values = {0, 5};
  cfg.agent_counts = {30};
  cfg.algos = {Algo::Lacam};
  cfg.timeout_s = 20;
  CHECK(noise_study_specs(cfg).size() == 4);
  const auto rows = read_csv(noise_study(cfg));
  REQUIRE(rows.size() == 6);
  CHECK(rows[4].param("cost_ratio") == "1");
  CHECK(std::stod(rows[5].param("cost_ratio")) >= 0.5);
}

TEST_CASE("ordering histograms") {
  SUBCASE("deterministic policy gives the identity pattern") {
    std::vector<OrderingLogEntry> log;
    for (int i = 0; i < 100; ++i) log.push_back({i, 0, false, ActionDistribution::deterministic(Action::Right)});
    const auto h = ordering_histogram(log, 1);
    for (int m = 0; m < 2; ++m) {
      CHECK(h.matrix[m][0][index_of(Action::Right)][0] == 1.0);
      CHECK(h.samples[m][1] == 0);
    }
  }
  SUBCASE("rows and columns are stochastic") {
    Rng rng(5);
    std::vector<OrderingLogEntry> log;
    for (int i = 0; i < 500; ++i) {
      ActionDistribution d;
      double s = 0;
      for (double& p : d.probs) s += (p = uniform01(rng));
      for (double& p : d.probs) p /= s;
      log.push_back({i, i % 7, i % 3 == 0, d});
    }
    const auto h = ordering_histogram(log, 2);
    for (int m = 0; m < 2; ++m)
      for (int g = 0; g < 2; ++g)
        for (int i = 0; i < 5; ++i) {
          double row = 0, col = 0;
          for (int j = 0; j < 5; ++j) {
            row += h.matrix[m][g][i][j];
            col += h.matrix[m][g][j][i];
          }
          CHECK(row == doctest::Approx(1.0));
          CHECK(col == doctest::Approx(1.0));
        }
    CHECK(h.max_strict_sampled_diff > 0);
    CHECK(h.max_strict_sampled_diff < 1);
    const auto back = read_ordering_log(write_ordering_log(log));
    REQUIRE(back.size() == log.size());
    CHECK(back[3].dist.probs == log[3].dist.probs);
    CHECK(back[3].at_goal == log[3].at_goal);
    CHECK(write_histogram_csv(h).find("sampled,1,Up") != std::string::npos);
  }
  CHECK_THROWS_AS(read_ordering_log("bad header\n"), ParseError);
}

TEST_CASE("cli exit codes") {
  const std::string cli = MAPF_CLI;
  auto run = [&](const std::string& args) {
    const int st = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(st);
  };
  CHECK(run("solve --map " + kMap + " --scen " + scen(1) + " --agents 10 --algo lacam") == 0);
  CHECK(run("solve --map " + kMap + " --scen " + scen(1) + " --agents 400 --algo pibt --heuristic manhattan "
            "--max-timesteps 5") == 1);
  CHECK(run("solve --map /nonexistent.map --scen " + scen(1) + " --agents 10") == 2);
  CHECK(run("solve --map " + kMap + " --scen " + scen(1) + " --agents 10 --algo pibt --shield naive") == 2);
  CHECK(run("frobnicate") == 2);
}
