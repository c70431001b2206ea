#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mapf/grid.hpp"

namespace mapf {

// Thrown by every text parser in this module; line is 1-based (0 if unknown).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

struct ScenarioEntry {
  int bucket = 0;
  std::string map_name;
  int map_width = 0;
  int map_height = 0;
  Cell start;
  Cell goal;
  double optimal_length = 0.0;  // single-agent length; unused by the solvers
};

GridMap parse_map(std::string_view text);
std::string render_map(const GridMap& map);
std::vector<ScenarioEntry> parse_scen(std::string_view text);
Instance make_instance(const GridMap& map, const std::vector<ScenarioEntry>& entries, int n);

std::string read_file(const std::string& path);
GridMap load_map(const std::string& path);
std::vector<ScenarioEntry> load_scen(const std::string& path);

// `t: (x1,y1) (x2,y2) ...` one line per timestep.
std::string write_solution(const PathSet& paths);
PathSet read_solution(std::string_view text);

struct RunRecord {
  std::string algo;
  std::string ordering_mode;
  std::string shield;
  std::string map;
  std::string scen;
  int n_agents = 0;
  long seed = 0;
  bool success = false;
  long flowtime = 0;
  long makespan = 0;
  long runtime_ms = 0;
  long hl_nodes = 0;
  std::vector<std::pair<std::string, std::string>> params;

  std::string param(const std::string& key, const std::string& fallback = "") const;
  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

std::string csv_header();
std::string csv_row(const RunRecord& r);
std::string write_csv(const std::vector<RunRecord>& records);
std::vector<RunRecord> read_csv(std::string_view text);

// Replaces characters outside [A-Za-z0-9_.-] so labels stay CSV-safe.
std::string sanitize_label(std::string_view s);

}  // namespace mapf
