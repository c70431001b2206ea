#include "mapf/pibt.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace mapf {

std::vector<PriorityState> initial_priorities(const Instance& inst, const std::vector<HeuristicTable>& tables) {
  const int n = inst.num_agents();
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  auto dist = [&](int i) { return tables[i].at(inst.starts[i]); };
  std::stable_sort(idx.begin(), idx.end(), [&](int a, int b) { return dist(a) > dist(b); });
  std::vector<PriorityState> out(n);
  for (int r = 0; r < n; ++r) out[idx[r]].tiebreak = static_cast<double>(n - 1 - r) / n;
  return out;
}

std::vector<PriorityState> update_priorities(std::vector<PriorityState> priorities, const Configuration& config,
                                             std::span<const Cell> goals) {
  for (std::size_t i = 0; i < priorities.size(); ++i)
    priorities[i].elapsed = config[i] == goals[i] ? 0 : priorities[i].elapsed + 1;
  return priorities;
}

std::vector<int> priority_order(std::span<const PriorityState> priorities) {
  std::vector<int> order(priorities.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return priorities[a].value() > priorities[b].value(); });
  return order;
}

PibtPlanner::PibtPlanner(const GridMap& map)
    : map_(map), occupied_now_(map.num_cells(), -1), occupied_next_(map.num_cells(), -1) {}

bool PibtPlanner::plan(std::span<const CellId> current, std::span<const ActionOrdering> orderings,
                       std::span<const int> order, std::span<const CellId> constraints, std::vector<CellId>& next) {
  const int n = static_cast<int>(current.size());
  current_ = current;
  orderings_ = orderings;
  next_ = &next;
  next.assign(n, kNoCell);
  for (int i = 0; i < n; ++i) occupied_now_[current[i]] = i;

  bool ok = true;
  if (!constraints.empty()) {
    for (int i = 0; i < n && ok; ++i) {
      const CellId u = constraints[i];
      if (u == kNoCell) continue;
      const CellId v = current[i];
      bool adjacent = u == v;
      for (CellId w : map_.neighbors(v)) adjacent = adjacent || w == u;
      if (!adjacent || occupied_next_[u] != -1) {
        ok = false;
        break;
      }
      const int j = occupied_now_[u];
      if (j != -1 && j != i && next[j] == v) {
        ok = false;  // constrained swap
        break;
      }
      next[i] = u;
      occupied_next_[u] = i;
    }
  }
  if (ok) {
    for (int k : order) {
      if (next[k] == kNoCell && !plan_agent(k)) {
        ok = false;
        break;
      }
    }
  }
  // Reset only the touched entries so the buffers stay O(N) per call.
  for (int i = 0; i < n; ++i) {
    occupied_now_[current[i]] = -1;
    if (next[i] != kNoCell) occupied_next_[next[i]] = -1;
  }
  return ok;
}

bool PibtPlanner::plan_agent(int agent) {
  std::vector<CellId>& next = *next_;
  const CellId here = current_[agent];
  for (Action a : orderings_[agent]) {
    const CellId u = map_.move(here, a);
    if (u == kNoCell || occupied_next_[u] != -1) continue;
    const int other = occupied_now_[u];
    if (other != -1 && next[other] == here) continue;  // swap with a committed agent
    next[agent] = u;
    occupied_next_[u] = agent;
    if (other != -1 && other != agent && next[other] == kNoCell) {
      // Priority inheritance: the occupant must make room.
      if (plan_agent(other)) return true;
      // The occupant stays on u (and now holds its reservation); try the next action.
      continue;
    }
    return true;
  }
  next[agent] = here;
  occupied_next_[here] = agent;
  return false;
}

Action action_between(Cell from, Cell to) {
  if (to.y == from.y - 1 && to.x == from.x) return Action::Up;
  if (to.y == from.y + 1 && to.x == from.x) return Action::Down;
  if (to.x == from.x - 1 && to.y == from.y) return Action::Left;
  if (to.x == from.x + 1 && to.y == from.y) return Action::Right;
  return Action::Wait;
}

namespace {

StepResult to_result(const Configuration& config, const std::vector<CellId>& next_ids, const GridMap& map) {
  StepResult r;
  r.next.resize(config.size());
  r.moves.resize(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) {
    r.next[i] = map.cell(next_ids[i]);
    r.moves[i] = action_between(config[i], r.next[i]);
  }
  return r;
}

}  // namespace

StepResult pibt_step(const Configuration& config, std::span<const ActionOrdering> orderings,
                     std::span<const PriorityState> priorities, std::span<const std::optional<Cell>> constraints,
                     const GridMap& map) {
  const std::size_t n = config.size();
  if (orderings.size() != n || priorities.size() != n || (!constraints.empty() && constraints.size() != n))
    throw std::invalid_argument("pibt_step: per-agent inputs differ in size");
  std::vector<CellId> cur(n), cons;
  for (std::size_t i = 0; i < n; ++i) cur[i] = map.id(config[i]);
  if (!constraints.empty()) {
    cons.assign(n, kNoCell);
    for (std::size_t i = 0; i < n; ++i) {
      if (!constraints[i]) continue;
      if (!map.is_free(*constraints[i])) {
        StepResult r;
        r.feasible = false;
        return r;
      }
      cons[i] = map.id(*constraints[i]);
    }
  }
  PibtPlanner planner(map);
  std::vector<CellId> next;
  const auto order = priority_order(priorities);
  if (!planner.plan(cur, orderings, order, cons, next)) {
    StepResult r;
    r.feasible = false;
    return r;
  }
  return to_result(config, next, map);
}

StepResult cs_naive_step(const Configuration& config, std::span<const Action> proposed, const GridMap& map) {
  const int n = static_cast<int>(config.size());
  if (static_cast<int>(proposed.size()) != n) throw std::invalid_argument("cs_naive_step: size mismatch");
  std::vector<Action> moves(proposed.begin(), proposed.end());
  std::vector<CellId> cur(n), next(n);
  for (int i = 0; i < n; ++i) cur[i] = map.id(config[i]);
  std::vector<int> at_now(map.num_cells(), -1), at_next(map.num_cells(), -1);
  for (int i = 0; i < n; ++i) at_now[cur[i]] = i;

  // Obstacle collisions: the move is impossible, the agent waits.
  for (int i = 0; i < n; ++i)
    if (map.move(cur[i], moves[i]) == kNoCell) moves[i] = Action::Wait;

  std::vector<char> freeze(n);
  while (true) {
    for (int i = 0; i < n; ++i) next[i] = map.move(cur[i], moves[i]);
    std::fill(freeze.begin(), freeze.end(), 0);
    for (int i = 0; i < n; ++i) {
      int& slot = at_next[next[i]];
      if (slot == -1) {
        slot = i;
      } else {
        freeze[i] = 1;
        freeze[slot] = 1;
      }
    }
    // Third and later arrivals at a cell were already flagged above; the
    // first arrival is flagged through `slot`.
    for (int i = 0; i < n; ++i) {
      if (next[i] == cur[i]) continue;
      const int j = at_now[next[i]];
      if (j != -1 && j != i && next[j] == cur[i]) {
        freeze[i] = 1;
        freeze[j] = 1;
      }
    }
    for (int i = 0; i < n; ++i) at_next[next[i]] = -1;
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      if (freeze[i] && moves[i] != Action::Wait) {
        moves[i] = Action::Wait;
        changed = true;
      }
    }
    if (!changed) break;
  }
  StepResult r;
  r.moves = moves;
  r.next.resize(n);
  for (int i = 0; i < n; ++i) r.next[i] = map.cell(next[i]);
  return r;
}

StepResult cs_pibt_step(const Configuration& config, std::span<const ActionDistribution> dists,
                        std::span<const PriorityState> priorities, SampleMode mode, const GridMap& map, Rng& rng) {
  std::vector<ActionOrdering> orderings(config.size());
  for (std::size_t i = 0; i < config.size(); ++i)
    orderings[i] = mode == SampleMode::Sampled ? sampled_ordering(dists[i], rng) : strict_ordering(dists[i], rng);
  return pibt_step(config, orderings, priorities, {}, map);
}

}  // namespace mapf
