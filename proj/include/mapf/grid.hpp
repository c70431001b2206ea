#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace mapf {

// x = column from the left, y = row from the top (MovingAI convention).
struct Cell {
  int x = 0;
  int y = 0;
  friend bool operator==(const Cell&, const Cell&) = default;
  friend auto operator<=>(const Cell&, const Cell&) = default;
};

// Canonical order; shared by orderings, distributions and the wire protocol.
enum class Action : std::uint8_t { Up = 0, Down = 1, Left = 2, Right = 3, Wait = 4 };

inline constexpr int kNumActions = 5;
inline constexpr std::array<Action, kNumActions> kAllActions = {
    Action::Up, Action::Down, Action::Left, Action::Right, Action::Wait};

inline constexpr int index_of(Action a) { return static_cast<int>(a); }
const char* action_name(Action a);

// Unchecked displacement; Up decreases y.
Cell step(Cell c, Action a);

using CellId = std::int32_t;
inline constexpr CellId kNoCell = -1;

class GridMap {
 public:
  GridMap(int width, int height, std::vector<Cell> blocked = {});

  int width() const { return width_; }
  int height() const { return height_; }
  int num_cells() const { return width_ * height_; }
  int num_free() const { return num_free_; }

  bool in_bounds(Cell c) const {
    return c.x >= 0 && c.y >= 0 && c.x < width_ && c.y < height_;
  }
  bool is_free(Cell c) const { return in_bounds(c) && free_[id(c)]; }
  bool is_free(CellId v) const { return free_[v] != 0; }

  CellId id(Cell c) const { return c.y * width_ + c.x; }
  Cell cell(CellId v) const { return {v % width_, v / width_}; }

  // Free 4-neighbors of a free cell, canonical action order (Wait excluded).
  std::span<const CellId> neighbors(CellId v) const {
    return {adj_.data() + adj_begin_[v], adj_.data() + adj_begin_[v + 1]};
  }

  // Target of action a from v, or kNoCell when off-map or blocked.
  CellId move(CellId v, Action a) const { return moves_[v * kNumActions + index_of(a)]; }

  std::vector<Cell> blocked_cells() const;

  friend bool operator==(const GridMap& a, const GridMap& b) {
    return a.width_ == b.width_ && a.height_ == b.height_ && a.free_ == b.free_;
  }

 private:
  int width_;
  int height_;
  int num_free_ = 0;
  std::vector<std::uint8_t> free_;
  std::vector<CellId> moves_;
  std::vector<CellId> adj_;
  std::vector<int> adj_begin_;
};

using Configuration = std::vector<Cell>;
using Path = std::vector<Cell>;
// Indexed [agent][t]; every path has the same length (makespan + 1).
using PathSet = std::vector<Path>;

struct Instance {
  GridMap map;
  std::vector<Cell> starts;
  std::vector<Cell> goals;

  Instance(GridMap m, std::vector<Cell> s, std::vector<Cell> g);
  int num_agents() const { return static_cast<int>(starts.size()); }
};

std::optional<Cell> apply_action(Cell cell, Action action, const GridMap& map);

enum class ConflictKind { Obstacle, NonAdjacent, Vertex, Edge };
const char* conflict_name(ConflictKind k);

struct Conflict {
  ConflictKind kind;
  int agent_a;
  int agent_b = -1;  // -1 for single-agent faults
  int timestep = 0;  // index of the "next" configuration
  friend bool operator==(const Conflict&, const Conflict&) = default;
};

// Throws std::invalid_argument on size mismatch.
std::vector<Conflict> validate_step(const Configuration& prev, const Configuration& next,
                                    const GridMap& map);

struct ValidationReport {
  bool ok = false;
  std::string error;  // structural problems (size, start mismatch)
  std::vector<Conflict> conflicts;
  std::vector<bool> at_goal;
  std::string summary() const;
};

ValidationReport validate_paths(const PathSet& paths, const Instance& inst);

int path_cost(const Path& path, Cell goal);
long flowtime(const PathSet& paths, std::span<const Cell> goals);
int makespan(const PathSet& paths, std::span<const Cell> goals);

// Configuration at timestep t (clamped to the last step).
Configuration config_at(const PathSet& paths, int t);

}  // namespace mapf

template <>
struct std::hash<mapf::Cell> {
  std::size_t operator()(const mapf::Cell& c) const noexcept {
    return std::hash<std::uint64_t>{}((static_cast<std::uint64_t>(static_cast<std::uint32_t>(c.x)) << 32) |
                                      static_cast<std::uint32_t>(c.y));
  }
};
