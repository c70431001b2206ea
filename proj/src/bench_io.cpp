#include "mapf/bench_io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace mapf {
namespace {

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }
  return lines;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split_ws(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t') ++j;
    if (j > i) out.push_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t pos = 0;
  while (true) {
    std::size_t end = s.find(sep, pos);
    if (end == std::string_view::npos) {
      out.push_back(s.substr(pos));
      return out;
    }
    out.push_back(s.substr(pos, end - pos));
    pos = end + 1;
  }
}

template <typename T>
bool parse_num(std::string_view s, T& out) {
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  return ec == std::errc() && p == s.data() + s.size();
}

int parse_int_at(std::string_view s, int line, const char* what) {
  int v = 0;
  if (!parse_num(s, v)) throw ParseError(line, std::string("expected integer ") + what + ", got '" + std::string(s) + "'");
  return v;
}

}  // namespace

GridMap parse_map(std::string_view text) {
  const auto lines = split_lines(text);
  int height = -1, width = -1;
  std::size_t li = 0;
  bool saw_map = false;
  bool saw_type = false;
  for (; li < lines.size(); ++li) {
    const auto toks = split_ws(lines[li]);
    const int ln = static_cast<int>(li) + 1;
    if (toks.empty()) continue;
    if (toks[0] == "type") {
      if (toks.size() != 2) throw ParseError(ln, "malformed type line");
      saw_type = true;
    } else if (toks[0] == "height") {
      if (toks.size() != 2) throw ParseError(ln, "malformed height line");
      height = parse_int_at(toks[1], ln, "height");
    } else if (toks[0] == "width") {
      if (toks.size() != 2) throw ParseError(ln, "malformed width line");
      width = parse_int_at(toks[1], ln, "width");
    } else if (toks[0] == "map" && toks.size() == 1) {
      saw_map = true;
      ++li;
      break;
    } else {
      throw ParseError(ln, "unexpected header line '" + std::string(lines[li]) + "'");
    }
  }
  if (!saw_type) throw ParseError(1, "missing 'type' header");
  if (!saw_map) throw ParseError(static_cast<int>(lines.size()), "missing 'map' header line");
  if (height < 1 || width < 1) throw ParseError(static_cast<int>(li), "missing or non-positive height/width");

  std::vector<Cell> blocked;
  int y = 0;
  for (; li < lines.size(); ++li) {
    const int ln = static_cast<int>(li) + 1;
    std::string_view row = lines[li];
    if (y == height) {
      if (!trim(row).empty()) throw ParseError(ln, "more than " + std::to_string(height) + " map rows");
      continue;
    }
    if (static_cast<int>(row.size()) != width)
      throw ParseError(ln, "row has " + std::to_string(row.size()) + " characters, expected " + std::to_string(width));
    for (int x = 0; x < width; ++x) {
      switch (row[x]) {
        case '.': case 'G': case 'S': break;
        case '@': case 'O': case 'T': case 'W': blocked.push_back({x, y}); break;
        default: throw ParseError(ln, std::string("unknown map character '") + row[x] + "'");
      }
    }
    ++y;
  }
  if (y != height)
    throw ParseError(static_cast<int>(lines.size()), "expected " + std::to_string(height) + " map rows, got " + std::to_string(y));
  return GridMap(width, height, std::move(blocked));
}

std::string render_map(const GridMap& map) {
  std::string out = "type octile\nheight " + std::to_string(map.height()) + "\nwidth " +
                    std::to_string(map.width()) + "\nmap\n";
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) out += map.is_free(Cell{x, y}) ? '.' : '@';
    out += '\n';
  }
  return out;
}

std::vector<ScenarioEntry> parse_scen(std::string_view text) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  while (li < lines.size() && trim(lines[li]).empty()) ++li;
  if (li == lines.size()) throw ParseError(1, "missing scenario version header");
  {
    const auto toks = split_ws(lines[li]);
    const bool ok = (toks.size() == 2 && toks[0] == "version" && (toks[1] == "1" || toks[1] == "1.0")) ||
                    (toks.size() == 1 && toks[0] == "1");
    if (!ok) throw ParseError(static_cast<int>(li) + 1, "expected 'version 1' header");
  }
  std::vector<ScenarioEntry> out;
  for (++li; li < lines.size(); ++li) {
    const int ln = static_cast<int>(li) + 1;
    if (trim(lines[li]).empty()) continue;
    auto f = split_on(lines[li], '\t');
    if (f.size() != 9) f = split_ws(lines[li]);
    if (f.size() != 9) throw ParseError(ln, "expected 9 fields, got " + std::to_string(f.size()));
    ScenarioEntry e;
    e.bucket = parse_int_at(trim(f[0]), ln, "bucket");
    e.map_name = std::string(trim(f[1]));
    e.map_width = parse_int_at(trim(f[2]), ln, "map width");
    e.map_height = parse_int_at(trim(f[3]), ln, "map height");
    e.start = {parse_int_at(trim(f[4]), ln, "start x"), parse_int_at(trim(f[5]), ln, "start y")};
    e.goal = {parse_int_at(trim(f[6]), ln, "goal x"), parse_int_at(trim(f[7]), ln, "goal y")};
    if (!parse_num(trim(f[8]), e.optimal_length)) throw ParseError(ln, "expected decimal optimal length");
    auto inside = [&](Cell c) { return c.x >= 0 && c.y >= 0 && c.x < e.map_width && c.y < e.map_height; };
    if (!inside(e.start)) throw ParseError(ln, "start outside declared map dimensions");
    if (!inside(e.goal)) throw ParseError(ln, "goal outside declared map dimensions");
    out.push_back(std::move(e));
  }
  return out;
}

Instance make_instance(const GridMap& map, const std::vector<ScenarioEntry>& entries, int n) {
  if (n < 1) throw std::invalid_argument("agent count must be at least 1");
  if (n > static_cast<int>(entries.size()))
    throw std::invalid_argument("requested " + std::to_string(n) + " agents but scenario has " +
                                std::to_string(entries.size()) + " entries");
  std::vector<Cell> starts, goals;
  for (int i = 0; i < n; ++i) {
    starts.push_back(entries[i].start);
    goals.push_back(entries[i].goal);
  }
  return Instance(map, std::move(starts), std::move(goals));
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

GridMap load_map(const std::string& path) {
  try {
    return parse_map(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::vector<ScenarioEntry> load_scen(const std::string& path) {
  try {
    return parse_scen(read_file(path));
  } catch (const ParseError& e) {
    throw ParseError(e.line(), path + ": " + e.what());
  }
}

std::string write_solution(const PathSet& paths) {
  std::string out;
  if (paths.empty()) return out;
  const std::size_t len = paths[0].size();
  for (std::size_t t = 0; t < len; ++t) {
    out += std::to_string(t) + ":";
    for (const Path& p : paths) {
      const Cell c = p[std::min(t, p.size() - 1)];
      out += " (" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
    }
    out += '\n';
  }
  return out;
}

PathSet read_solution(std::string_view text) {
  PathSet paths;
  int expected_t = 0;
  const auto lines = split_lines(text);
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const int ln = static_cast<int>(li) + 1;
    std::string_view line = trim(lines[li]);
    if (line.empty()) continue;
    const std::size_t colon = line.find(':');
    if (colon == std::string_view::npos) throw ParseError(ln, "missing ':' after timestep");
    int t = 0;
    if (!parse_num(trim(line.substr(0, colon)), t) || t != expected_t)
      throw ParseError(ln, "expected timestep " + std::to_string(expected_t));
    std::vector<Cell> cfg;
    for (auto tok : split_ws(line.substr(colon + 1))) {
      if (tok.size() < 5 || tok.front() != '(' || tok.back() != ')') throw ParseError(ln, "malformed cell '" + std::string(tok) + "'");
      tok = tok.substr(1, tok.size() - 2);
      const std::size_t comma = tok.find(',');
      Cell c;
      if (comma == std::string_view::npos || !parse_num(tok.substr(0, comma), c.x) || !parse_num(tok.substr(comma + 1), c.y))
        throw ParseError(ln, "malformed cell coordinates");
      cfg.push_back(c);
    }
    if (cfg.empty()) throw ParseError(ln, "timestep without positions");
    if (paths.empty()) paths.resize(cfg.size());
    if (cfg.size() != paths.size()) throw ParseError(ln, "agent count changes between timesteps");
    for (std::size_t i = 0; i < cfg.size(); ++i) paths[i].push_back(cfg[i]);
    ++expected_t;
  }
  if (paths.empty()) throw ParseError(0, "empty solution");
  return paths;
}

std::string RunRecord::param(const std::string& key, const std::string& fallback) const {
  for (const auto& [k, v] : params)
    if (k == key) return v;
  return fallback;
}

std::string sanitize_label(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
                    c == '.' || c == '-';
    if (!ok) c = '_';
  }
  return out;
}

std::string csv_header() {
  return "algo,ordering_mode,shield,map,scen,n_agents,seed,success,flowtime,makespan,runtime_ms,hl_nodes,params";
}

std::string csv_row(const RunRecord& r) {
  std::string params;
  for (const auto& [k, v] : r.params) {
    if (!params.empty()) params += ';';
    params += sanitize_label(k) + "=" + sanitize_label(v);
  }
  std::ostringstream os;
  os << sanitize_label(r.algo) << ',' << sanitize_label(r.ordering_mode) << ',' << sanitize_label(r.shield) << ','
     << sanitize_label(r.map) << ',' << sanitize_label(r.scen) << ',' << r.n_agents << ',' << r.seed << ','
     << (r.success ? 1 : 0) << ',' << r.flowtime << ',' << r.makespan << ',' << r.runtime_ms << ',' << r.hl_nodes
     << ',' << params;
  return os.str();
}

std::string write_csv(const std::vector<RunRecord>& records) {
  std::string out = csv_header() + "\n";
  for (const auto& r : records) out += csv_row(r) + "\n";
  return out;
}

std::vector<RunRecord> read_csv(std::string_view text) {
  const auto lines = split_lines(text);
  if (lines.empty() || lines[0] != csv_header()) throw ParseError(1, "unexpected CSV header");
  std::vector<RunRecord> out;
  for (std::size_t li = 1; li < lines.size(); ++li) {
    const int ln = static_cast<int>(li) + 1;
    if (lines[li].empty()) continue;
    const auto f = split_on(lines[li], ',');
    if (f.size() != 13) throw ParseError(ln, "expected 13 CSV columns");
    RunRecord r;
    r.algo = f[0];
    r.ordering_mode = f[1];
    r.shield = f[2];
    r.map = f[3];
    r.scen = f[4];
    int success = 0;
    if (!parse_num(f[5], r.n_agents) || !parse_num(f[6], r.seed) || !parse_num(f[7], success) ||
        !parse_num(f[8], r.flowtime) || !parse_num(f[9], r.makespan) || !parse_num(f[10], r.runtime_ms) ||
        !parse_num(f[11], r.hl_nodes))
      throw ParseError(ln, "malformed numeric CSV field");
    r.success = success != 0;
    if (!f[12].empty()) {
      for (auto kv : split_on(f[12], ';')) {
        const std::size_t eq = kv.find('=');
        if (eq == std::string_view::npos) throw ParseError(ln, "malformed params entry");
        r.params.emplace_back(std::string(kv.substr(0, eq)), std::string(kv.substr(eq + 1)));
      }
    }
    out.push_back(std::move(r));
  }
  return out;
}

}  // namespace mapf
