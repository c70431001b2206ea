#include "mapf/grid.hpp"

#include <sstream>
#include <stdexcept>
#include <unordered_map>
#include <unordered_set>

namespace mapf {

const char* action_name(Action a) {
  switch (a) {
    case Action::Up: return "Up";
    case Action::Down: return "Down";
    case Action::Left: return "Left";
    case Action::Right: return "Right";
    case Action::Wait: return "Wait";
  }
  return "?";
}

Cell step(Cell c, Action a) {
  switch (a) {
    case Action::Up: return {c.x, c.y - 1};
    case Action::Down: return {c.x, c.y + 1};
    case Action::Left: return {c.x - 1, c.y};
    case Action::Right: return {c.x + 1, c.y};
    case Action::Wait: return c;
  }
  return c;
}

GridMap::GridMap(int width, int height, std::vector<Cell> blocked) : width_(width), height_(height) {
  if (width < 1 || height < 1) throw std::invalid_argument("map dimensions must be positive");
  free_.assign(static_cast<std::size_t>(width) * height, 1);
  for (const Cell& c : blocked) {
    if (!in_bounds(c)) throw std::invalid_argument("blocked cell outside map bounds");
    free_[id(c)] = 0;
  }
  const int n = num_cells();
  moves_.assign(static_cast<std::size_t>(n) * kNumActions, kNoCell);
  adj_begin_.assign(n + 1, 0);
  for (CellId v = 0; v < n; ++v) {
    adj_begin_[v] = static_cast<int>(adj_.size());
    if (!free_[v]) continue;
    ++num_free_;
    const Cell c = cell(v);
    for (Action a : kAllActions) {
      const Cell t = step(c, a);
      if (!in_bounds(t) || !free_[id(t)]) continue;
      moves_[v * kNumActions + index_of(a)] = id(t);
      if (a != Action::Wait) adj_.push_back(id(t));
    }
  }
  adj_begin_[n] = static_cast<int>(adj_.size());
}

std::vector<Cell> GridMap::blocked_cells() const {
  std::vector<Cell> out;
  for (CellId v = 0; v < num_cells(); ++v)
    if (!free_[v]) out.push_back(cell(v));
  return out;
}

Instance::Instance(GridMap m, std::vector<Cell> s, std::vector<Cell> g)
    : map(std::move(m)), starts(std::move(s)), goals(std::move(g)) {
  if (starts.size() != goals.size()) throw std::invalid_argument("starts and goals differ in size");
  std::unordered_set<Cell> seen_s, seen_g;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    if (!map.is_free(starts[i]) || !map.is_free(goals[i]))
      throw std::invalid_argument("agent " + std::to_string(i) + " has a blocked or out-of-bounds endpoint");
    if (!seen_s.insert(starts[i]).second)
      throw std::invalid_argument("duplicate start for agent " + std::to_string(i));
    if (!seen_g.insert(goals[i]).second)
      throw std::invalid_argument("duplicate goal for agent " + std::to_string(i));
  }
}

std::optional<Cell> apply_action(Cell cell, Action action, const GridMap& map) {
  const Cell t = step(cell, action);
  if (!map.is_free(t)) return std::nullopt;
  return t;
}

const char* conflict_name(ConflictKind k) {
  switch (k) {
    case ConflictKind::Obstacle: return "obstacle";
    case ConflictKind::NonAdjacent: return "non-adjacent";
    case ConflictKind::Vertex: return "vertex";
    case ConflictKind::Edge: return "edge";
  }
  return "?";
}

std::vector<Conflict> validate_step(const Configuration& prev, const Configuration& next,
                                    const GridMap& map) {
  if (prev.size() != next.size()) throw std::invalid_argument("configuration size mismatch");
  std::vector<Conflict> out;
  const int n = static_cast<int>(next.size());
  for (int i = 0; i < n; ++i) {
    if (!map.is_free(next[i])) out.push_back({ConflictKind::Obstacle, i});
    const int d = std::abs(prev[i].x - next[i].x) + std::abs(prev[i].y - next[i].y);
    if (d > 1) out.push_back({ConflictKind::NonAdjacent, i});
  }
  std::unordered_map<Cell, int> at_next, at_prev;
  at_next.reserve(n);
  at_prev.reserve(n);
  for (int i = 0; i < n; ++i) at_prev.emplace(prev[i], i);
  for (int i = 0; i < n; ++i) {
    auto [it, fresh] = at_next.emplace(next[i], i);
    if (!fresh) out.push_back({ConflictKind::Vertex, it->second, i});
  }
  for (int i = 0; i < n; ++i) {
    if (prev[i] == next[i]) continue;
    auto it = at_prev.find(next[i]);
    if (it == at_prev.end()) continue;
    const int j = it->second;
    if (j > i && next[j] == prev[i]) out.push_back({ConflictKind::Edge, i, j});
  }
  return out;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (ok) return "valid";
  if (!error.empty()) os << error << "; ";
  os << conflicts.size() << " conflict(s)";
  for (std::size_t k = 0; k < conflicts.size() && k < 5; ++k) {
    const auto& c = conflicts[k];
    os << "; " << conflict_name(c.kind) << " at t=" << c.timestep << " agent " << c.agent_a;
    if (c.agent_b >= 0) os << "/" << c.agent_b;
  }
  int off_goal = 0;
  for (bool g : at_goal) off_goal += !g;
  if (off_goal) os << "; " << off_goal << " agent(s) not at goal";
  return os.str();
}

ValidationReport validate_paths(const PathSet& paths, const Instance& inst) {
  ValidationReport rep;
  const int n = inst.num_agents();
  if (paths.empty() || static_cast<int>(paths.size()) != n) {
    rep.error = "expected " + std::to_string(n) + " paths, got " + std::to_string(paths.size());
    return rep;
  }
  const std::size_t len = paths[0].size();
  for (int i = 0; i < n; ++i) {
    if (paths[i].size() != len || len == 0) {
      rep.error = "paths have unequal or zero length";
      return rep;
    }
    if (paths[i][0] != inst.starts[i]) {
      rep.error = "agent " + std::to_string(i) + " does not begin at its start";
      return rep;
    }
  }
  Configuration prev = config_at(paths, 0);
  for (int i = 0; i < n; ++i)
    if (!inst.map.is_free(prev[i])) rep.conflicts.push_back({ConflictKind::Obstacle, i, -1, 0});
  for (std::size_t t = 1; t < len; ++t) {
    Configuration next = config_at(paths, static_cast<int>(t));
    for (Conflict c : validate_step(prev, next, inst.map)) {
      c.timestep = static_cast<int>(t);
      rep.conflicts.push_back(c);
    }
    prev = std::move(next);
  }
  rep.at_goal.resize(n);
  bool all_goal = true;
  for (int i = 0; i < n; ++i) {
    rep.at_goal[i] = paths[i].back() == inst.goals[i];
    all_goal = all_goal && rep.at_goal[i];
  }
  rep.ok = rep.conflicts.empty() && all_goal;
  return rep;
}

int path_cost(const Path& path, Cell goal) {
  for (int t = static_cast<int>(path.size()) - 1; t >= 0; --t)
    if (path[t] != goal) return t + 1;
  return 0;
}

long flowtime(const PathSet& paths, std::span<const Cell> goals) {
  long sum = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) sum += path_cost(paths[i], goals[i]);
  return sum;
}

int makespan(const PathSet& paths, std::span<const Cell> goals) {
  int m = 0;
  for (std::size_t i = 0; i < paths.size(); ++i) m = std::max(m, path_cost(paths[i], goals[i]));
  return m;
}

Configuration config_at(const PathSet& paths, int t) {
  Configuration c;
  c.reserve(paths.size());
  for (const Path& p : paths) c.push_back(p[std::min<std::size_t>(t, p.size() - 1)]);
  return c;
}

}  // namespace mapf
