#pragma once

#include <optional>
#include <span>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/heuristics.hpp"
#include "mapf/policy.hpp"
#include "mapf/rng.hpp"

namespace mapf {

// Dynamic priority: steps since the agent last rested at its goal, plus a
// fixed per-agent tiebreak in [0, 1). Larger value plans first.
struct PriorityState {
  int elapsed = 0;
  double tiebreak = 0.0;
  double value() const { return elapsed + tiebreak; }
  friend bool operator==(const PriorityState&, const PriorityState&) = default;
};

// Tiebreaks ranked by descending start distance (farthest agent gets the
// largest value), scaled into [0, 1); elapsed starts at 0.
std::vector<PriorityState> initial_priorities(const Instance& inst, const std::vector<HeuristicTable>& tables);

std::vector<PriorityState> update_priorities(std::vector<PriorityState> priorities, const Configuration& config,
                                             std::span<const Cell> goals);

struct StepResult {
  std::vector<Action> moves;
  Configuration next;
  bool feasible = true;  // false only when constraints cannot be met
};

// Agent indices sorted by descending priority value (ties by index).
std::vector<int> priority_order(std::span<const PriorityState> priorities);

// Reusable one-step PIBT planner working on cell ids. Buffers are sized to the
// map once; one instance must not be shared between threads.
class PibtPlanner {
 public:
  explicit PibtPlanner(const GridMap& map);

  // Computes next positions for every agent. `constraints` is either empty
  // or holds one entry per agent (kNoCell = unconstrained). Returns false when
  // the constraints are infeasible; `next` is then unspecified.
  bool plan(std::span<const CellId> current, std::span<const ActionOrdering> orderings, std::span<const int> order,
            std::span<const CellId> constraints, std::vector<CellId>& next);

  const GridMap& map() const { return map_; }

 private:
  bool plan_agent(int agent);

  const GridMap& map_;
  std::vector<int> occupied_now_;
  std::vector<int> occupied_next_;
  std::span<const CellId> current_;
  std::span<const ActionOrdering> orderings_;
  std::vector<CellId>* next_ = nullptr;
};

// PIBT over Cell configurations; `constraints` may be empty or hold one
// optional required next cell per agent.
StepResult pibt_step(const Configuration& config, std::span<const ActionOrdering> orderings,
                     std::span<const PriorityState> priorities, std::span<const std::optional<Cell>> constraints,
                     const GridMap& map);

// Executes proposals, repeatedly freezing every agent involved in an
// obstacle, vertex or edge conflict until none remain.
StepResult cs_naive_step(const Configuration& config, std::span<const Action> proposed, const GridMap& map);

// Orders each distribution (strict or Plackett-Luce sampled) and runs PIBT.
StepResult cs_pibt_step(const Configuration& config, std::span<const ActionDistribution> dists,
                        std::span<const PriorityState> priorities, SampleMode mode, const GridMap& map, Rng& rng);

// Action taking `from` to the adjacent-or-equal cell `to`.
Action action_between(Cell from, Cell to);

}  // namespace mapf
