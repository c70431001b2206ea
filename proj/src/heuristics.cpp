#include "mapf/heuristics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mapf/rng.hpp"

namespace mapf {

HeuristicTable backward_dijkstra(const GridMap& map, Cell goal) {
  if (!map.is_free(goal)) throw std::invalid_argument("heuristic goal is blocked or out of bounds");
  std::vector<double> dist(map.num_cells(), HeuristicTable::kUnreachable);
  std::vector<CellId> queue;
  queue.reserve(map.num_free());
  const CellId g = map.id(goal);
  dist[g] = 0;
  queue.push_back(g);
  // Unit edge costs: FIFO order already pops cells in nondecreasing distance.
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const CellId v = queue[head];
    const double next = dist[v] + 1;
    for (CellId u : map.neighbors(v)) {
      if (dist[u] != HeuristicTable::kUnreachable) continue;
      dist[u] = next;
      queue.push_back(u);
    }
  }
  return HeuristicTable(goal, map.width(), std::move(dist));
}

int manhattan(Cell a, Cell b) { return std::abs(a.x - b.x) + std::abs(a.y - b.y); }

HeuristicTable manhattan_table(const GridMap& map, Cell goal) {
  if (!map.is_free(goal)) throw std::invalid_argument("heuristic goal is blocked or out of bounds");
  std::vector<double> values(map.num_cells(), HeuristicTable::kUnreachable);
  for (CellId v = 0; v < map.num_cells(); ++v)
    if (map.is_free(v)) values[v] = manhattan(map.cell(v), goal);
  return HeuristicTable(goal, map.width(), std::move(values));
}

double noise_factor(double k_percent, std::uint64_t seed, CellId cell) {
  const double lo = 1.0 - k_percent / 100.0;
  const double u = unit_double(mix_seed(seed, static_cast<std::uint64_t>(cell)));
  return std::clamp(lo + (1.0 - lo) * u, lo, 1.0);
}

namespace {

void check_k(double k) {
  if (!(k >= 0.0 && k <= 100.0)) throw std::invalid_argument("noise level K must lie in [0, 100]");
}

inline void degrade_cell(std::vector<double>& values, double k, std::uint64_t seed, int v) {
  // Unreachable markers and the goal (0) are left as they are.
  if (values[v] == HeuristicTable::kUnreachable || values[v] == 0.0) return;
  values[v] *= noise_factor(k, seed, v);
}

}  // namespace

HeuristicTable degrade(const HeuristicTable& table, double k_percent, std::uint64_t seed) {
  check_k(k_percent);
  if (k_percent == 0.0) return table;
  const auto in = table.values();
  std::vector<double> out(in.begin(), in.end());
  const int n = static_cast<int>(out.size());
#pragma omp parallel for schedule(static) if (n > 1 << 14)
  for (int v = 0; v < n; ++v) degrade_cell(out, k_percent, seed, v);
  return HeuristicTable(table.goal(), table.width(), std::move(out));
}

HeuristicTable degrade_serial(const HeuristicTable& table, double k_percent, std::uint64_t seed) {
  check_k(k_percent);
  if (k_percent == 0.0) return table;
  const auto in = table.values();
  std::vector<double> out(in.begin(), in.end());
  for (int v = 0; v < static_cast<int>(out.size()); ++v) degrade_cell(out, k_percent, seed, v);
  return HeuristicTable(table.goal(), table.width(), std::move(out));
}

namespace {

HeuristicTable build_one(const GridMap& map, Cell goal, HeuristicKind kind) {
  return kind == HeuristicKind::BackwardDijkstra ? backward_dijkstra(map, goal) : manhattan_table(map, goal);
}

}  // namespace

std::vector<HeuristicTable> build_tables(const GridMap& map, std::span<const Cell> goals, HeuristicKind kind) {
  const int n = static_cast<int>(goals.size());
  std::vector<HeuristicTable> out(n);
  for (const Cell& g : goals)
    if (!map.is_free(g)) throw std::invalid_argument("heuristic goal is blocked or out of bounds");
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) out[i] = build_one(map, goals[i], kind);
  return out;
}

std::vector<HeuristicTable> build_tables_serial(const GridMap& map, std::span<const Cell> goals,
                                                HeuristicKind kind) {
  std::vector<HeuristicTable> out;
  out.reserve(goals.size());
  for (const Cell& g : goals) out.push_back(build_one(map, g, kind));
  return out;
}

std::vector<HeuristicTable> degrade_all(const std::vector<HeuristicTable>& tables, double k_percent,
                                        std::uint64_t seed) {
  check_k(k_percent);
  const int n = static_cast<int>(tables.size());
  std::vector<HeuristicTable> out(n);
#pragma omp parallel for schedule(dynamic, 4)
  for (int i = 0; i < n; ++i) out[i] = degrade_serial(tables[i], k_percent, mix_seed(seed, i));
  return out;
}

}  // namespace mapf
