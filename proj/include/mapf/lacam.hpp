#pragma once

#include <chrono>
#include <deque>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mapf/grid.hpp"
#include "mapf/pibt.hpp"
#include "mapf/policy.hpp"

namespace mapf {

// A set of "agent must be at cell" constraints, in the order they were added.
struct LowNode {
  std::vector<int> who;
  std::vector<CellId> where;
  int depth() const { return static_cast<int>(who.size()); }
};

struct HighNode {
  std::vector<CellId> config;
  HighNode* parent = nullptr;
  std::vector<int> elapsed;  // per-agent dynamic priority; tiebreaks are shared by the solve
  std::vector<int> order;    // descending priority; constraint enumeration order
  std::deque<LowNode> low_queue;
  int depth = 0;
  std::size_t hash = 0;
};

// Pops the front LowNode of `node` and appends one child per cell in the
// closed neighborhood of the next unconstrained agent in `node.order`
// (canonical action order, current cell last). Returns the popped node, or
// nullopt when the queue is empty.
std::optional<LowNode> expand_lownode(HighNode& node, const GridMap& map);

enum class SolveStatus { Success, FailureTimeout, FailureExhausted, FailureLimit };
const char* status_name(SolveStatus s);

struct SolveResult {
  SolveStatus status = SolveStatus::FailureExhausted;
  PathSet paths;
  long flowtime = 0;
  long makespan = 0;
  long runtime_ms = 0;
  long hl_nodes_generated = 0;
  long hl_nodes_expanded = 0;
  long ll_nodes_expanded = 0;
  std::string reason;
  bool success() const { return status == SolveStatus::Success; }
};

struct SolveLimits {
  std::chrono::milliseconds timeout = std::chrono::seconds(60);
  long node_cap = 10'000'000;
  // Push an already explored configuration back onto the stack when the
  // generator reproduces it, instead of discarding the generation.
  bool reinsert_explored = true;
};

// Configuration path root..goal as per-agent paths, one timestep per edge.
PathSet reconstruct(const HighNode& goal_node, const GridMap& map);

// Depth-first search over configurations with lazily added constraints,
// using PIBT guided by `ranker` as the configuration generator. Child nodes
// carry priorities updated from their parent's. A re-encountered
// configuration never gets a second node; with reinsert_explored its
// existing node returns to the top of the stack.
SolveResult lacam_solve(const Instance& inst, ActionRanker& ranker, const std::vector<PriorityState>& initial,
                        const SolveLimits& limits, std::uint64_t seed);

}  // namespace mapf
