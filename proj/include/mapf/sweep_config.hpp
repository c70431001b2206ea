#pragma once

#include <map>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mapf/runner.hpp"

namespace mapf {

// Sweep files use a small TOML subset: `key = value` lines, `#` comments,
// strings, numbers, booleans, flat arrays, and `[[grid]]` table arrays.
// Top-level keys are defaults; each grid table is expanded as the cartesian
// product of its array-valued keys.
//
//   map = "random-32-32-10.map"
//   scen_dir = "scen"          # every *.scen in the directory, sorted
//   seeds = [0, 1, 2, 3, 4]
//   timeout = 60
//   [[grid]]
//   algo = ["pibt", "lacam"]
//   agents = [50, 100]
using TomlValue = std::variant<std::string, double, bool, std::vector<std::variant<std::string, double, bool>>>;
using TomlTable = std::map<std::string, TomlValue>;

struct TomlDoc {
  TomlTable top;
  std::vector<TomlTable> grids;
};

// Throws ParseError with the offending line.
TomlDoc parse_toml_subset(std::string_view text);

struct SweepConfig {
  std::vector<RunSpec> specs;
  int threads = 0;
};

// Relative paths resolve against `base_dir`.
SweepConfig sweep_from_toml(std::string_view text, const std::string& base_dir);
SweepConfig load_sweep(const std::string& path);

}  // namespace mapf
