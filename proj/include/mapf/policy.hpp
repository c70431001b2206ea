#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/heuristics.hpp"
#include "mapf/rng.hpp"

namespace mapf {

// Probabilities over the five actions in canonical order.
struct ActionDistribution {
  std::array<double, kNumActions> probs{};

  static ActionDistribution uniform();
  static ActionDistribution deterministic(Action a);
  double operator[](Action a) const { return probs[index_of(a)]; }
  bool valid(double tol = 1e-6) const;
  Action argmax() const;  // lowest index on ties
};

// Most-preferred action first.
using ActionOrdering = std::array<Action, kNumActions>;

bool is_permutation(const ActionOrdering& o);
int position_of(const ActionOrdering& o, Action a);

ActionOrdering strict_ordering(const ActionDistribution& d, Rng& rng);
ActionOrdering sampled_ordering(const ActionDistribution& d, Rng& rng);

enum class SampleMode { Strict, Sampled };

struct RankMode {
  enum class Kind { H, H2, Pi, Tie, Sum };
  Kind kind = Kind::H;
  double R = 0.0;  // O_sum weight

  static RankMode h() { return {Kind::H, 0}; }
  static RankMode h2() { return {Kind::H2, 0}; }
  static RankMode pi() { return {Kind::Pi, 0}; }
  static RankMode tie() { return {Kind::Tie, 0}; }
  static RankMode sum(double r) { return {Kind::Sum, r}; }

  bool needs_policy() const { return kind == Kind::Pi || kind == Kind::Tie || kind == Kind::Sum; }
  std::string label() const;
};

// Parses h | h2 | pi | tie | sum (R supplied separately).
RankMode parse_rank_mode(const std::string& s, double r = 0.0);
SampleMode parse_sample_mode(const std::string& s);
const char* sample_mode_name(SampleMode m);

// Orders the five actions from `cell` by ascending score for `mode`.
// Off-map/blocked targets go last (canonical order), unreachable targets just
// before them. `occupied` (cells holding an agent, indexed by CellId; empty span
// for none) is only consulted by O_h2. Throws std::invalid_argument when the
// mode needs a distribution and `dist` is null.
ActionOrdering rank_actions(CellId cell, const GridMap& map, const HeuristicTable& h, const ActionDistribution* dist,
                            RankMode mode, SampleMode sample, std::span<const std::uint8_t> occupied, Rng& rng);
ActionOrdering rank_actions(Cell cell, const GridMap& map, const HeuristicTable& h, const ActionDistribution* dist,
                            RankMode mode, SampleMode sample, std::span<const std::uint8_t> occupied, Rng& rng);

// Supplies one distribution per agent each timestep. Implementations see the
// whole configuration and restrict their own view if they want to.
class PolicyProvider {
 public:
  virtual ~PolicyProvider() = default;
  virtual void distributions(int t, const Configuration& config, std::vector<ActionDistribution>& out) = 0;
  virtual void finish(bool /*success*/) {}
  virtual std::string label() const = 0;
  // Extra key=value pairs for the run record (latency and the like).
  virtual std::vector<std::pair<std::string, std::string>> stats() const { return {}; }
};

class UniformPolicy final : public PolicyProvider {
 public:
  explicit UniformPolicy(int n_agents) : n_(n_agents) {}
  void distributions(int, const Configuration&, std::vector<ActionDistribution>& out) override;
  std::string label() const override { return "uniform"; }

 private:
  int n_;
};

// Surrogate learnt policy: softmax over -h̄(T(s,a)) / tau, with h̄ each
// agent's table degraded at level kappa. Infeasible actions get zero mass;
// agents on their goal put all mass on Wait.
class SoftmaxHPolicy final : public PolicyProvider {
 public:
  SoftmaxHPolicy(const Instance& inst, const std::vector<HeuristicTable>& exact, double tau, double kappa,
                 std::uint64_t seed);
  void distributions(int t, const Configuration& config, std::vector<ActionDistribution>& out) override;
  // Single-threaded reference for distributions().
  void distributions_serial(int t, const Configuration& config, std::vector<ActionDistribution>& out) const;
  ActionDistribution distribution_for(int agent, Cell at) const;
  std::string label() const override;

 private:
  const GridMap& map_;
  std::vector<Cell> goals_;
  std::vector<HeuristicTable> tables_;
  double tau_;
  double kappa_;
};

// Turns the current configuration into one ordering per agent: heuristic
// ranking, policy ranking, or a combination, per RankMode. Distributions are
// fetched from the policy once per distinct (t, configuration) and cached.
class ActionRanker {
 public:
  ActionRanker(const GridMap& map, const std::vector<HeuristicTable>& tables, PolicyProvider* policy, RankMode mode,
               SampleMode sample);

  void orderings(int t, std::span<const CellId> config, std::vector<ActionOrdering>& out, Rng& rng);

  // Distributions behind the most recent orderings() call (empty without a policy).
  const std::vector<ActionDistribution>& last_distributions() const { return dists_; }
  RankMode mode() const { return mode_; }
  SampleMode sample_mode() const { return sample_; }
  PolicyProvider* policy() const { return policy_; }

 private:
  const GridMap& map_;
  const std::vector<HeuristicTable>& tables_;
  PolicyProvider* policy_;
  RankMode mode_;
  SampleMode sample_;
  std::vector<std::uint8_t> occupied_;
  std::vector<ActionDistribution> dists_;
  std::vector<CellId> cached_config_;
  int cached_t_ = -1;
  Configuration scratch_;
};

}  // namespace mapf
