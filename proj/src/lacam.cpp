#include "mapf/lacam.hpp"

#include <algorithm>
#include <stdexcept>
#include <unordered_set>

namespace mapf {
namespace {

std::size_t hash_config(const std::vector<CellId>& c) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (CellId v : c) {
    h ^= static_cast<std::uint32_t>(v);
    h *= 0x100000001b3ULL;
    h ^= h >> 29;
  }
  return static_cast<std::size_t>(h);
}

struct NodeHash {
  std::size_t operator()(const HighNode* n) const { return n->hash; }
};
struct NodeEq {
  bool operator()(const HighNode* a, const HighNode* b) const { return a->config == b->config; }
};

std::vector<int> order_from(const std::vector<int>& elapsed, const std::vector<double>& tiebreak) {
  std::vector<PriorityState> p(elapsed.size());
  for (std::size_t i = 0; i < p.size(); ++i) p[i] = {elapsed[i], tiebreak[i]};
  return priority_order(p);
}

}  // namespace

const char* status_name(SolveStatus s) {
  switch (s) {
    case SolveStatus::Success: return "success";
    case SolveStatus::FailureTimeout: return "failure_timeout";
    case SolveStatus::FailureExhausted: return "failure_exhausted";
    case SolveStatus::FailureLimit: return "failure_limit";
  }
  return "?";
}

std::optional<LowNode> expand_lownode(HighNode& node, const GridMap& map) {
  if (node.low_queue.empty()) return std::nullopt;
  LowNode low = std::move(node.low_queue.front());
  node.low_queue.pop_front();
  const int n = static_cast<int>(node.config.size());
  if (low.depth() < n) {
    const int agent = node.order[low.depth()];
    const CellId here = node.config[agent];
    auto push = [&](CellId where) {
      LowNode child = low;
      child.who.push_back(agent);
      child.where.push_back(where);
      node.low_queue.push_back(std::move(child));
    };
    for (CellId u : map.neighbors(here)) push(u);
    push(here);
  }
  return low;
}

PathSet reconstruct(const HighNode& goal_node, const GridMap& map) {
  std::vector<const HighNode*> chain;
  for (const HighNode* p = &goal_node; p != nullptr; p = p->parent) chain.push_back(p);
  std::reverse(chain.begin(), chain.end());
  const std::size_t n = goal_node.config.size();
  PathSet paths(n);
  for (std::size_t i = 0; i < n; ++i) {
    paths[i].reserve(chain.size());
    for (const HighNode* h : chain) paths[i].push_back(map.cell(h->config[i]));
  }
  return paths;
}

SolveResult lacam_solve(const Instance& inst, ActionRanker& ranker, const std::vector<PriorityState>& initial,
                        const SolveLimits& limits, std::uint64_t seed) {
  using clock = std::chrono::steady_clock;
  const auto t0 = clock::now();
  const auto deadline = t0 + limits.timeout;
  const GridMap& map = inst.map;
  const int n = inst.num_agents();
  if (static_cast<int>(initial.size()) != n) throw std::invalid_argument("lacam_solve: priorities size mismatch");

  Rng rng(seed);
  PibtPlanner planner(map);
  std::vector<double> tiebreak(n);
  for (int i = 0; i < n; ++i) tiebreak[i] = initial[i].tiebreak;
  std::vector<CellId> goal_config(n);
  for (int i = 0; i < n; ++i) goal_config[i] = map.id(inst.goals[i]);

  std::deque<HighNode> storage;
  std::vector<HighNode*> open;
  std::unordered_set<HighNode*, NodeHash, NodeEq> explored;

  SolveResult res;
  auto finish = [&](SolveStatus status, const HighNode* goal) {
    res.status = status;
    if (goal != nullptr) {
      res.paths = reconstruct(*goal, map);
      res.flowtime = flowtime(res.paths, inst.goals);
      res.makespan = makespan(res.paths, inst.goals);
    }
    res.runtime_ms = std::chrono::duration_cast<std::chrono::milliseconds>(clock::now() - t0).count();
    return res;
  };

  {
    HighNode& root = storage.emplace_back();
    root.config.resize(n);
    for (int i = 0; i < n; ++i) root.config[i] = map.id(inst.starts[i]);
    root.elapsed.resize(n);
    for (int i = 0; i < n; ++i) root.elapsed[i] = initial[i].elapsed;
    root.order = order_from(root.elapsed, tiebreak);
    root.low_queue.emplace_back();
    root.hash = hash_config(root.config);
    explored.insert(&root);
    open.push_back(&root);
    res.hl_nodes_generated = 1;
    if (root.config == goal_config) return finish(SolveStatus::Success, &root);
  }

  std::vector<ActionOrdering> orderings;
  std::vector<CellId> constraints(n, kNoCell);
  std::vector<CellId> next;

  while (!open.empty()) {
    if (clock::now() >= deadline) {
      res.reason = "timeout";
      return finish(SolveStatus::FailureTimeout, nullptr);
    }
    HighNode* node = open.back();
    if (node->low_queue.empty()) {
      open.pop_back();
      node->low_queue = {};  // release
      node->order = {};
      continue;
    }
    if (node->low_queue.size() == 1 && node->low_queue.front().depth() == 0) ++res.hl_nodes_expanded;
    std::optional<LowNode> low = expand_lownode(*node, map);
    ++res.ll_nodes_expanded;

    ranker.orderings(node->depth, node->config, orderings, rng);
    for (int k = 0; k < low->depth(); ++k) constraints[low->who[k]] = low->where[k];
    const bool ok = planner.plan(node->config, orderings, node->order, constraints, next);
    for (int k = 0; k < low->depth(); ++k) constraints[low->who[k]] = kNoCell;
    if (!ok) continue;

    HighNode probe;
    probe.config = next;
    probe.hash = hash_config(next);
    if (auto it = explored.find(&probe); it != explored.end()) {
      // Revisit the known node: its remaining constraints are tried next.
      if (limits.reinsert_explored) open.push_back(*it);
      continue;
    }

    if (res.hl_nodes_generated >= limits.node_cap) {
      res.reason = "node cap";
      return finish(SolveStatus::FailureLimit, nullptr);
    }
    HighNode& child = storage.emplace_back(std::move(probe));
    child.parent = node;
    child.depth = node->depth + 1;
    child.elapsed.resize(n);
    for (int i = 0; i < n; ++i) child.elapsed[i] = child.config[i] == goal_config[i] ? 0 : node->elapsed[i] + 1;
    child.order = order_from(child.elapsed, tiebreak);
    child.low_queue.emplace_back();
    explored.insert(&child);
    open.push_back(&child);
    ++res.hl_nodes_generated;
    if (child.config == goal_config) return finish(SolveStatus::Success, &child);
  }
  res.reason = "search space exhausted";
  return finish(SolveStatus::FailureExhausted, nullptr);
}

}  // namespace mapf
