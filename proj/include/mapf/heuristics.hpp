#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

// Cost-to-go from every cell to one goal. Blocked and disconnected cells hold
// kUnreachable; exact tables hold integers stored as double so degraded
// tables share the type.
class HeuristicTable {
 public:
  static constexpr double kUnreachable = std::numeric_limits<double>::infinity();

  HeuristicTable() = default;
  HeuristicTable(Cell goal, int width, std::vector<double> values)
      : goal_(goal), width_(width), values_(std::move(values)) {}

  Cell goal() const { return goal_; }
  int width() const { return width_; }
  double at(CellId v) const { return values_[v]; }
  double at(Cell c) const { return values_[c.y * width_ + c.x]; }
  bool reachable(CellId v) const { return values_[v] != kUnreachable; }
  std::span<const double> values() const { return values_; }

  friend bool operator==(const HeuristicTable&, const HeuristicTable&) = default;

 private:
  Cell goal_;
  int width_ = 0;
  std::vector<double> values_;
};

// Exact unit-cost distances (breadth-first from the goal). Throws
// std::invalid_argument on a blocked goal.
HeuristicTable backward_dijkstra(const GridMap& map, Cell goal);

int manhattan(Cell a, Cell b);
// Manhattan distance for every free cell (ignores obstacles).
HeuristicTable manhattan_table(const GridMap& map, Cell goal);

// Each cell scaled by e ~ U[1 - K/100, 1], drawn from a stream keyed by
// (seed, cell index) so the result does not depend on evaluation order.
// Throws std::invalid_argument for K outside [0, 100].
HeuristicTable degrade(const HeuristicTable& table, double k_percent, std::uint64_t seed);
HeuristicTable degrade_serial(const HeuristicTable& table, double k_percent, std::uint64_t seed);

// The noise factor degrade() applies to one cell.
double noise_factor(double k_percent, std::uint64_t seed, CellId cell);

enum class HeuristicKind { BackwardDijkstra, Manhattan };

// One table per goal; goals are processed in parallel (OpenMP).
std::vector<HeuristicTable> build_tables(const GridMap& map, std::span<const Cell> goals, HeuristicKind kind);
// Single-threaded reference for build_tables.
std::vector<HeuristicTable> build_tables_serial(const GridMap& map, std::span<const Cell> goals,
                                                HeuristicKind kind);

// degrade() applied to every table; table i uses seed mix_seed(seed, i).
std::vector<HeuristicTable> degrade_all(const std::vector<HeuristicTable>& tables, double k_percent,
                                        std::uint64_t seed);

}  // namespace mapf
