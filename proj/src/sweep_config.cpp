#include "mapf/sweep_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>
#include <sstream>
#include <stdexcept>

namespace mapf {
namespace {

namespace fs = std::filesystem;
using Scalar = std::variant<std::string, double, bool>;

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

// Strips a trailing comment that is not inside a string.
std::string_view strip_comment(std::string_view s) {
  bool in_str = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"' && (i == 0 || s[i - 1] != '\\')) in_str = !in_str;
    if (s[i] == '#' && !in_str) return s.substr(0, i);
  }
  return s;
}

Scalar parse_scalar(std::string_view s, int line) {
  s = trim(s);
  if (s.empty()) throw ParseError(line, "missing value");
  if (s.front() == '"') {
    if (s.size() < 2 || s.back() != '"') throw ParseError(line, "unterminated string");
    std::string out;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
      if (s[i] == '\\' && i + 2 < s.size()) ++i;
      out += s[i];
    }
    return out;
  }
  if (s == "true") return true;
  if (s == "false") return false;
  std::string tmp(s);
  tmp.erase(std::remove(tmp.begin(), tmp.end(), '_'), tmp.end());
  std::size_t used = 0;
  double v = 0;
  try {
    v = std::stod(tmp, &used);
  } catch (const std::exception&) {
    throw ParseError(line, "bad value '" + std::string(s) + "'");
  }
  if (used != tmp.size()) throw ParseError(line, "bad value '" + std::string(s) + "'");
  return v;
}

std::vector<std::string_view> split_array(std::string_view body, int line) {
  std::vector<std::string_view> items;
  bool in_str = false;
  std::size_t start = 0;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (body[i] == '"' && (i == 0 || body[i - 1] != '\\')) in_str = !in_str;
    if (body[i] == ',' && !in_str) {
      items.push_back(trim(body.substr(start, i - start)));
      start = i + 1;
    }
  }
  if (in_str) throw ParseError(line, "unterminated string in array");
  auto last = trim(body.substr(start));
  if (!last.empty()) items.push_back(last);
  for (auto it : items)
    if (it.empty()) throw ParseError(line, "empty array element");
  return items;
}

std::vector<Scalar> as_list(const TomlValue& v) {
  if (auto* arr = std::get_if<std::vector<Scalar>>(&v)) return *arr;
  return {std::visit([](const auto& x) -> Scalar {
    if constexpr (std::is_same_v<std::decay_t<decltype(x)>, std::vector<Scalar>>)
      return Scalar{};
    else
      return x;
  }, v)};
}

std::string to_string(const Scalar& s, const std::string& key) {
  if (auto* p = std::get_if<std::string>(&s)) return *p;
  if (auto* d = std::get_if<double>(&s)) {
    std::ostringstream os;
    os << *d;
    return os.str();
  }
  throw std::invalid_argument("key '" + key + "' expects a string");
}

double to_double(const Scalar& s, const std::string& key) {
  if (auto* d = std::get_if<double>(&s)) return *d;
  throw std::invalid_argument("key '" + key + "' expects a number");
}

long to_long(const Scalar& s, const std::string& key) {
  const double d = to_double(s, key);
  if (d != std::floor(d)) throw std::invalid_argument("key '" + key + "' expects an integer");
  return static_cast<long>(d);
}

std::string resolve(const std::string& p, const std::string& base) {
  if (p.empty() || fs::path(p).is_absolute() || base.empty()) return p;
  return (fs::path(base) / p).lexically_normal().string();
}

const std::set<std::string> kKnownKeys = {"map",    "scens",     "scen_dir", "seeds",         "timeout",   "threads",
                                          "algo",   "agents",    "shield",   "order",         "R",         "sample",
                                          "policy", "heuristic", "noise_K",  "max_timesteps", "node_cap", "policy_timeout"};

// Keys expanded in the cartesian product, in a fixed nesting order.
const std::vector<std::string> kGridKeys = {"algo",   "heuristic", "noise_K", "shield", "order", "R",
                                            "sample", "policy",    "agents",  "timeout", "max_timesteps", "node_cap",
                                            "policy_timeout"};

void apply(RunSpec& s, const std::string& key, const Scalar& v) {
  if (key == "algo") s.algo = parse_algo(to_string(v, key));
  else if (key == "heuristic") s.heuristic = parse_heuristic(to_string(v, key));
  else if (key == "noise_K") s.noise_k = to_double(v, key);
  else if (key == "shield") s.shield = parse_shield(to_string(v, key));
  else if (key == "order") s.ordering = parse_rank_mode(to_string(v, key), s.ordering.R);
  else if (key == "R") s.ordering.R = to_double(v, key);
  else if (key == "sample") s.sample = parse_sample_mode(to_string(v, key));
  else if (key == "policy") s.policy = parse_policy_spec(to_string(v, key));
  else if (key == "agents") s.n_agents = static_cast<int>(to_long(v, key));
  else if (key == "timeout") s.timeout_s = to_double(v, key);
  else if (key == "max_timesteps") s.max_timesteps = static_cast<int>(to_long(v, key));
  else if (key == "node_cap") s.node_cap = to_long(v, key);
  else if (key == "policy_timeout") s.policy_step_timeout_s = to_double(v, key);
}

}  // namespace

TomlDoc parse_toml_subset(std::string_view text) {
  TomlDoc doc;
  TomlTable* cur = &doc.top;
  std::istringstream in{std::string(text)};
  std::string raw;
  int ln = 0;
  while (std::getline(in, raw)) {
    ++ln;
    std::string_view line = trim(strip_comment(raw));
    if (line.empty()) continue;
    if (line == "[[grid]]") {
      cur = &doc.grids.emplace_back();
      continue;
    }
    if (line.front() == '[') throw ParseError(ln, "only [[grid]] tables are supported");
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(ln, "expected key = value");
    std::string key(trim(line.substr(0, eq)));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (key.empty()) throw ParseError(ln, "empty key");
    if (!kKnownKeys.count(key)) throw ParseError(ln, "unknown key '" + key + "'");
    if (cur->count(key)) throw ParseError(ln, "duplicate key '" + key + "'");
    std::string_view val = trim(line.substr(eq + 1));
    if (!val.empty() && val.front() == '[') {
      if (val.back() != ']') throw ParseError(ln, "arrays must close on the same line");
      std::vector<Scalar> items;
      for (auto item : split_array(val.substr(1, val.size() - 2), ln)) items.push_back(parse_scalar(item, ln));
      (*cur)[key] = std::move(items);
    } else {
      (*cur)[key] = std::visit([](auto&& x) -> TomlValue { return x; }, parse_scalar(val, ln));
    }
  }
  return doc;
}

SweepConfig sweep_from_toml(std::string_view text, const std::string& base_dir) {
  const TomlDoc doc = parse_toml_subset(text);
  SweepConfig cfg;
  auto top = [&](const std::string& k) -> const TomlValue* {
    auto it = doc.top.find(k);
    return it == doc.top.end() ? nullptr : &it->second;
  };
  if (auto* t = top("threads")) cfg.threads = static_cast<int>(to_long(as_list(*t).at(0), "threads"));
  if (doc.grids.empty()) return cfg;

  for (const TomlTable& g : doc.grids) {
    auto get = [&](const std::string& k) -> const TomlValue* {
      if (auto it = g.find(k); it != g.end()) return &it->second;
      return top(k);
    };
    const TomlValue* map_v = get("map");
    if (map_v == nullptr) throw std::invalid_argument("sweep: 'map' is required");
    const std::string map_path = resolve(to_string(as_list(*map_v).at(0), "map"), base_dir);

    std::vector<std::string> scens;
    if (auto* v = get("scens"))
      for (const auto& s : as_list(*v)) scens.push_back(resolve(to_string(s, "scens"), base_dir));
    if (auto* v = get("scen_dir")) {
      const std::string dir = resolve(to_string(as_list(*v).at(0), "scen_dir"), base_dir);
      std::vector<std::string> found;
      for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".scen") found.push_back(e.path().string());
      std::sort(found.begin(), found.end());
      scens.insert(scens.end(), found.begin(), found.end());
    }
    if (scens.empty()) throw std::invalid_argument("sweep: no scenarios (set 'scens' or 'scen_dir')");

    std::vector<long> seeds = {0};
    if (auto* v = get("seeds")) {
      seeds.clear();
      for (const auto& s : as_list(*v)) seeds.push_back(to_long(s, "seeds"));
    }

    std::vector<RunSpec> partial(1);
    partial[0].map_path = map_path;
    for (const std::string& key : kGridKeys) {
      const TomlValue* v = get(key);
      if (v == nullptr) continue;
      const auto values = as_list(*v);
      if (values.empty()) throw std::invalid_argument("sweep: '" + key + "' is an empty array");
      std::vector<RunSpec> next;
      next.reserve(partial.size() * values.size());
      for (const RunSpec& p : partial)
        for (const Scalar& val : values) {
          RunSpec s = p;
          apply(s, key, val);
          next.push_back(std::move(s));
        }
      partial = std::move(next);
    }
    for (const RunSpec& p : partial)
      for (const auto& scen : scens)
        for (long seed : seeds) {
          RunSpec s = p;
          s.scen_path = scen;
          s.seed = seed;
          s.check();
          cfg.specs.push_back(std::move(s));
        }
  }
  return cfg;
}

SweepConfig load_sweep(const std::string& path) {
  return sweep_from_toml(read_file(path), fs::path(path).parent_path().string());
}

}  // namespace mapf
