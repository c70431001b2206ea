#include "mapf/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace mapf {

ActionDistribution ActionDistribution::uniform() {
  ActionDistribution d;
  d.probs.fill(1.0 / kNumActions);
  return d;
}

ActionDistribution ActionDistribution::deterministic(Action a) {
  ActionDistribution d;
  d.probs[index_of(a)] = 1.0;
  return d;
}

bool ActionDistribution::valid(double tol) const {
  double sum = 0;
  for (double p : probs) {
    if (!(p >= 0.0 && p <= 1.0 + tol)) return false;
    sum += p;
  }
  return std::abs(sum - 1.0) <= tol;
}

Action ActionDistribution::argmax() const {
  return static_cast<Action>(std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool is_permutation(const ActionOrdering& o) {
  std::array<bool, kNumActions> seen{};
  for (Action a : o) {
    const int i = index_of(a);
    if (i < 0 || i >= kNumActions || seen[i]) return false;
    seen[i] = true;
  }
  return true;
}

int position_of(const ActionOrdering& o, Action a) {
  for (int k = 0; k < kNumActions; ++k)
    if (o[k] == a) return k;
  return -1;
}

ActionOrdering strict_ordering(const ActionDistribution& d, Rng& rng) {
  std::array<double, kNumActions> noise;
  for (double& r : noise) r = uniform01(rng);
  ActionOrdering o = kAllActions;
  std::sort(o.begin(), o.end(), [&](Action a, Action b) {
    const double pa = d[a], pb = d[b];
    if (pa != pb) return pa > pb;
    return noise[index_of(a)] < noise[index_of(b)];
  });
  return o;
}

ActionOrdering sampled_ordering(const ActionDistribution& d, Rng& rng) {
  ActionOrdering o{};
  std::array<bool, kNumActions> used{};
  int k = 0;
  // Plackett-Luce: draw the next position proportionally to the remaining mass.
  for (; k < kNumActions; ++k) {
    double total = 0;
    for (int a = 0; a < kNumActions; ++a)
      if (!used[a] && d.probs[a] > 0) total += d.probs[a];
    if (total <= 0) break;
    const double u = uniform01(rng) * total;
    double acc = 0;
    int pick = -1;
    for (int a = 0; a < kNumActions; ++a) {
      if (used[a] || d.probs[a] <= 0) continue;
      pick = a;
      acc += d.probs[a];
      if (u < acc) break;
    }
    used[pick] = true;
    o[k] = static_cast<Action>(pick);
  }
  // Zero-probability tail in random order.
  std::array<Action, kNumActions> rest{};
  int m = 0;
  for (int a = 0; a < kNumActions; ++a)
    if (!used[a]) rest[m++] = static_cast<Action>(a);
  std::shuffle(rest.begin(), rest.begin() + m, rng);
  for (int i = 0; i < m; ++i) o[k + i] = rest[i];
  return o;
}

std::string RankMode::label() const {
  switch (kind) {
    case Kind::H: return "h";
    case Kind::H2: return "h2";
    case Kind::Pi: return "pi";
    case Kind::Tie: return "tie";
    case Kind::Sum: {
      std::ostringstream os;
      os << "sum" << R;
      return os.str();
    }
  }
  return "?";
}

RankMode parse_rank_mode(const std::string& s, double r) {
  if (s == "h") return RankMode::h();
  if (s == "h2") return RankMode::h2();
  if (s == "pi") return RankMode::pi();
  if (s == "tie") return RankMode::tie();
  if (s == "sum") {
    if (!(r >= 0)) throw std::invalid_argument("O_sum weight R must be nonnegative");
    return RankMode::sum(r);
  }
  throw std::invalid_argument("unknown ordering '" + s + "' (expected h|h2|pi|tie|sum)");
}

SampleMode parse_sample_mode(const std::string& s) {
  if (s == "strict") return SampleMode::Strict;
  if (s == "sampled") return SampleMode::Sampled;
  throw std::invalid_argument("unknown sample mode '" + s + "' (expected strict|sampled)");
}

const char* sample_mode_name(SampleMode m) { return m == SampleMode::Strict ? "strict" : "sampled"; }

ActionOrdering rank_actions(CellId cell, const GridMap& map, const HeuristicTable& h, const ActionDistribution* dist,
                            RankMode mode, SampleMode sample, std::span<const std::uint8_t> occupied, Rng& rng) {
  if (mode.needs_policy() && dist == nullptr)
    throw std::invalid_argument("ordering " + mode.label() + " requires an action distribution");

  // 0 = feasible and reachable, 1 = unreachable, 2 = off-map or blocked.
  std::array<int, kNumActions> cls{};
  for (int a = 0; a < kNumActions; ++a) {
    const CellId t = map.move(cell, static_cast<Action>(a));
    cls[a] = t == kNoCell ? 2 : (h.reachable(t) ? 0 : 1);
  }

  ActionOrdering o = kAllActions;
  if (mode.kind == RankMode::Kind::Pi) {
    o = sample == SampleMode::Sampled ? sampled_ordering(*dist, rng) : strict_ordering(*dist, rng);
    std::stable_sort(o.begin(), o.end(), [&](Action a, Action b) { return cls[index_of(a)] < cls[index_of(b)]; });
    // Unusable actions keep canonical order so orderings compare across modes.
    auto tail = std::find_if(o.begin(), o.end(), [&](Action a) { return cls[index_of(a)] != 0; });
    std::sort(tail, o.end(), [&](Action a, Action b) {
      return std::pair(cls[index_of(a)], index_of(a)) < std::pair(cls[index_of(b)], index_of(b));
    });
    return o;
  }

  struct Key {
    double primary = 0;
    double secondary = 0;
    double noise = 0;
  };
  std::array<Key, kNumActions> key{};
  for (int a = 0; a < kNumActions; ++a) {
    key[a].noise = uniform01(rng);
    if (cls[a] != 0) continue;
    const CellId t = map.move(cell, static_cast<Action>(a));
    const double hv = h.at(t);
    switch (mode.kind) {
      case RankMode::Kind::H:
        key[a].primary = hv;
        break;
      case RankMode::Kind::H2:
        key[a].primary = hv;
        key[a].secondary = (!occupied.empty() && occupied[t]) ? 1.0 : 0.0;
        break;
      case RankMode::Kind::Tie:
        key[a].primary = hv;
        key[a].secondary = 1.0 - dist->probs[a];
        break;
      case RankMode::Kind::Sum:
        key[a].primary = hv + mode.R * (1.0 - dist->probs[a]);
        break;
      case RankMode::Kind::Pi:
        break;
    }
  }
  std::sort(o.begin(), o.end(), [&](Action x, Action y) {
    const int a = index_of(x), b = index_of(y);
    if (cls[a] != cls[b]) return cls[a] < cls[b];
    if (cls[a] != 0) return a < b;
    if (key[a].primary != key[b].primary) return key[a].primary < key[b].primary;
    if (key[a].secondary != key[b].secondary) return key[a].secondary < key[b].secondary;
    return key[a].noise < key[b].noise;
  });
  return o;
}

ActionOrdering rank_actions(Cell cell, const GridMap& map, const HeuristicTable& h, const ActionDistribution* dist,
                            RankMode mode, SampleMode sample, std::span<const std::uint8_t> occupied, Rng& rng) {
  return rank_actions(map.id(cell), map, h, dist, mode, sample, occupied, rng);
}

void UniformPolicy::distributions(int, const Configuration&, std::vector<ActionDistribution>& out) {
  out.assign(n_, ActionDistribution::uniform());
}

SoftmaxHPolicy::SoftmaxHPolicy(const Instance& inst, const std::vector<HeuristicTable>& exact, double tau,
                               double kappa, std::uint64_t seed)
    : map_(inst.map), goals_(inst.goals), tau_(tau), kappa_(kappa) {
  if (!(tau >= 0)) throw std::invalid_argument("softmax temperature must be nonnegative");
  if (exact.size() != goals_.size()) throw std::invalid_argument("one heuristic table per agent required");
  tables_ = degrade_all(exact, kappa, seed);
}

std::string SoftmaxHPolicy::label() const {
  std::ostringstream os;
  os << "softmax_" << tau_ << "_" << kappa_;
  return os.str();
}

ActionDistribution SoftmaxHPolicy::distribution_for(int agent, Cell at) const {
  const HeuristicTable& h = tables_[agent];
  const CellId v = map_.id(at);
  std::array<double, kNumActions> score{};
  double best = HeuristicTable::kUnreachable;
  for (int a = 0; a < kNumActions; ++a) {
    const CellId t = map_.move(v, static_cast<Action>(a));
    score[a] = (t == kNoCell) ? HeuristicTable::kUnreachable : h.at(t);
    best = std::min(best, score[a]);
  }
  ActionDistribution d;
  if (best == HeuristicTable::kUnreachable) return ActionDistribution::deterministic(Action::Wait);
  double total = 0;
  for (int a = 0; a < kNumActions; ++a) {
    double w = 0;
    if (score[a] != HeuristicTable::kUnreachable) {
      if (tau_ > 0)
        w = std::exp(-(score[a] - best) / tau_);
      else
        w = score[a] == best ? 1.0 : 0.0;
    }
    d.probs[a] = w;
    total += w;
  }
  for (double& p : d.probs) p /= total;
  // Resting agents stay put.
  if (at == goals_[agent]) return ActionDistribution::deterministic(Action::Wait);
  return d;
}

void SoftmaxHPolicy::distributions(int, const Configuration& config, std::vector<ActionDistribution>& out) {
  const int n = static_cast<int>(config.size());
  out.resize(n);
#pragma omp parallel for schedule(static) if (n >= 512)
  for (int i = 0; i < n; ++i) out[i] = distribution_for(i, config[i]);
}

void SoftmaxHPolicy::distributions_serial(int, const Configuration& config,
                                          std::vector<ActionDistribution>& out) const {
  out.resize(config.size());
  for (std::size_t i = 0; i < config.size(); ++i) out[i] = distribution_for(static_cast<int>(i), config[i]);
}

ActionRanker::ActionRanker(const GridMap& map, const std::vector<HeuristicTable>& tables, PolicyProvider* policy,
                           RankMode mode, SampleMode sample)
    : map_(map), tables_(tables), policy_(policy), mode_(mode), sample_(sample) {
  if (mode.needs_policy() && policy == nullptr)
    throw std::invalid_argument("ordering " + mode.label() + " requires a policy");
  if (mode.kind == RankMode::Kind::H2) occupied_.assign(map.num_cells(), 0);
}

void ActionRanker::orderings(int t, std::span<const CellId> config, std::vector<ActionOrdering>& out, Rng& rng) {
  const std::size_t n = config.size();
  if (policy_ != nullptr &&
      (t != cached_t_ || cached_config_.size() != n || !std::equal(config.begin(), config.end(), cached_config_.begin()))) {
    scratch_.resize(n);
    for (std::size_t i = 0; i < n; ++i) scratch_[i] = map_.cell(config[i]);
    policy_->distributions(t, scratch_, dists_);
    if (dists_.size() != n) throw std::runtime_error("policy returned a wrong number of distributions");
    cached_config_.assign(config.begin(), config.end());
    cached_t_ = t;
  }
  if (!occupied_.empty())
    for (CellId v : config) occupied_[v] = 1;
  out.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const ActionDistribution* d = policy_ != nullptr ? &dists_[i] : nullptr;
    out[i] = rank_actions(config[i], map_, tables_[i], d, mode_, sample_, occupied_, rng);
  }
  if (!occupied_.empty())
    for (CellId v : config) occupied_[v] = 0;
}

}  // namespace mapf
