#include <doctest.h>

#include <algorithm>

#include "mapf/pibt.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace mapf;

namespace {

ActionOrdering ord(std::initializer_list<Action> first) {
  ActionOrdering o{};
  int k = 0;
  for (Action a : first) o[k++] = a;
  for (Action a : kAllActions)
    if (std::find(o.begin(), o.begin() + k, a) == o.begin() + k) o[k++] = a;
  return o;
}

std::vector<PriorityState> prio(std::initializer_list<double> v) {
  std::vector<PriorityState> p;
  for (double x : v) p.push_back({static_cast<int>(x), x - static_cast<int>(x)});
  return p;
}

}  // namespace

TEST_CASE("disjoint top actions are both taken") {
  const GridMap m(4, 4);
  const Configuration c{{0, 0}, {3, 3}};
  const std::vector<ActionOrdering> o{ord({Action::Right}), ord({Action::Up})};
  const auto r = pibt_step(c, o, prio({1.5, 0.5}), {}, m);
  REQUIRE(r.feasible);
  CHECK(r.next == Configuration{{1, 0}, {3, 2}});
  CHECK(r.moves == std::vector<Action>{Action::Right, Action::Up});
}

TEST_CASE("contention: higher priority wins the cell, the other takes its second choice") {
  const GridMap m(3, 3);
  // Both want the centre (1,1).
  const Configuration c{{0, 1}, {1, 0}};
  const std::vector<ActionOrdering> o{ord({Action::Right, Action::Up}), ord({Action::Down, Action::Right})};
  const auto r = pibt_step(c, o, prio({2.5, 1.5}), {}, m);
  CHECK(r.next == Configuration{{1, 1}, {2, 0}});
  const auto r2 = pibt_step(c, o, prio({1.5, 2.5}), {}, m);
  CHECK(r2.next == Configuration{{0, 0}, {1, 1}});
  bool member = false;
  for (const auto& mv : oracle::exhaustive_onestep(c, m)) member = member || mv == r.moves;
  CHECK(member);
}

TEST_CASE("priority inheritance pushes a lower-priority agent out of the way") {
  const GridMap m(3, 1);
  const Configuration c{{0, 0}, {1, 0}};
  // Agent 1 would rather wait, but agent 0 needs its cell.
  const std::vector<ActionOrdering> o{ord({Action::Right}), ord({Action::Wait, Action::Right})};
  const auto r = pibt_step(c, o, prio({2.0, 1.0}), {}, m);
  CHECK(r.next == Configuration{{1, 0}, {2, 0}});
}

TEST_CASE("backtracking: a trapped occupant makes the pusher try its next action") {
  // 1-wide corridor ending in a wall; agent 1 sits at the dead end.
  const GridMap m = testutil::grid({"...", "@.@"});
  const Configuration c{{1, 0}, {1, 1}};
  const std::vector<ActionOrdering> o{ord({Action::Down, Action::Left}), ord({Action::Wait})};
  const auto r = pibt_step(c, o, prio({2.0, 1.0}), {}, m);
  CHECK(r.next == Configuration{{0, 0}, {1, 1}});
}

TEST_CASE("no swaps through priority inheritance") {
  const GridMap m(2, 1);
  const Configuration c{{0, 0}, {1, 0}};
  const std::vector<ActionOrdering> o{ord({Action::Right}), ord({Action::Left})};
  const auto r = pibt_step(c, o, prio({2.0, 1.0}), {}, m);
  CHECK(r.next == c);
  CHECK(validate_step(c, r.next, m).empty());
}

TEST_CASE("constraints are honoured or reported infeasible") {
  const GridMap m(3, 3);
  const Configuration c{{0, 0}, {2, 2}};
  const std::vector<ActionOrdering> o{ord({Action::Right}), ord({Action::Up})};
  std::vector<std::optional<Cell>> cons{Cell{0, 1}, std::nullopt};
  const auto r = pibt_step(c, o, prio({2.0, 1.0}), cons, m);
  REQUIRE(r.feasible);
  CHECK(r.next[0] == Cell{0, 1});
  cons[0] = Cell{2, 0};  // not adjacent
  CHECK_FALSE(pibt_step(c, o, prio({2.0, 1.0}), cons, m).feasible);
  // Two agents constrained onto one cell.
  const Configuration c2{{0, 0}, {1, 1}};
  std::vector<std::optional<Cell>> both{Cell{1, 0}, Cell{1, 0}};
  CHECK_FALSE(pibt_step(c2, o, prio({2.0, 1.0}), both, m).feasible);
  // Constrained swap.
  const Configuration c3{{0, 0}, {1, 0}};
  std::vector<std::optional<Cell>> sw{Cell{1, 0}, Cell{0, 0}};
  CHECK_FALSE(pibt_step(c3, o, prio({2.0, 1.0}), sw, m).feasible);
}

TEST_CASE("update_priorities") {
  std::vector<PriorityState> p{{7, 0.5}, {0, 0.25}};
  const std::vector<Cell> goals{{0, 0}, {1, 1}};
  p = update_priorities(p, {{0, 0}, {0, 1}}, goals);
  CHECK(p[0].elapsed == 0);
  CHECK(p[1].elapsed == 1);
  CHECK(p[0].tiebreak == 0.5);
}

TEST_CASE("initial priorities rank farthest agents first with distinct tiebreaks") {
  const GridMap m(6, 1);
  const Instance inst(m, {{0, 0}, {1, 0}, {2, 0}}, {{1, 0}, {5, 0}, {4, 0}});
  const auto tables = build_tables(m, inst.goals, HeuristicKind::BackwardDijkstra);
  const auto p = initial_priorities(inst, tables);
  CHECK(p[1].tiebreak > p[2].tiebreak);
  CHECK(p[2].tiebreak > p[0].tiebreak);
  for (const auto& x : p) {
    CHECK(x.elapsed == 0);
    CHECK(x.tiebreak >= 0);
    CHECK(x.tiebreak < 1);
  }
  CHECK(priority_order(p) == std::vector<int>{1, 2, 0});
}

TEST_CASE("fuzz: pibt_step output is a conflict-free joint move and honours the top agent") {
  Rng rng(12345);
  int checked = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 4);
    const Instance inst = testutil::random_instance(rng, 4, 4, n, 0.15);
    const Configuration& c = inst.starts;
    std::vector<ActionOrdering> o(n);
    std::vector<PriorityState> p(n);
    for (int i = 0; i < n; ++i) {
      o[i] = kAllActions;
      std::shuffle(o[i].begin(), o[i].end(), rng);
      p[i] = {static_cast<int>(rng() % 3), (i + 0.5) / n};
    }
    const auto r = pibt_step(c, o, p, {}, inst.map);
    REQUIRE(r.feasible);
    REQUIRE(validate_step(c, r.next, inst.map).empty());
    const auto all = oracle::exhaustive_onestep(c, inst.map);
    CHECK(std::find(all.begin(), all.end(), r.moves) != all.end());
    // The highest-priority agent gets its first usable target when that cell is empty.
    const int top = priority_order(p)[0];
    for (Action a : o[top]) {
      const auto t = apply_action(c[top], a, inst.map);
      if (!t) continue;
      if (std::find(c.begin(), c.end(), *t) == c.end() || *t == c[top]) CHECK(r.next[top] == *t);
      break;
    }
    // Determinism.
    CHECK(pibt_step(c, o, p, {}, inst.map).next == r.next);
    ++checked;
  }
  CHECK(checked == 10000);
}

TEST_CASE("cs_naive_step freezes conflicting agents until a fixpoint") {
  const GridMap m(4, 3);
  SUBCASE("no conflicts") {
    const auto r = cs_naive_step({{0, 0}, {3, 2}}, std::vector<Action>{Action::Right, Action::Up}, m);
    CHECK(r.moves == std::vector<Action>{Action::Right, Action::Up});
  }
  SUBCASE("same target: both wait") {
    const auto r = cs_naive_step({{0, 0}, {2, 0}}, std::vector<Action>{Action::Right, Action::Left}, m);
    CHECK(r.moves == std::vector<Action>{Action::Wait, Action::Wait});
  }
  SUBCASE("cascade: a frozen agent blocks its follower") {
    // 0 and 1 collide on (1,1); 2 follows into 1's old cell (1,0).
    const Configuration c{{0, 1}, {1, 0}, {2, 0}};
    const auto r = cs_naive_step(c, std::vector<Action>{Action::Right, Action::Down, Action::Left}, m);
    CHECK(r.moves == std::vector<Action>{Action::Wait, Action::Wait, Action::Wait});
    CHECK(validate_step(c, r.next, m).empty());
  }
  SUBCASE("obstacle and swap") {
    const auto r = cs_naive_step({{0, 0}, {1, 0}}, std::vector<Action>{Action::Right, Action::Left}, m);
    CHECK(r.next == Configuration{{0, 0}, {1, 0}});
    const auto o = cs_naive_step({{0, 0}}, std::vector<Action>{Action::Up}, m);
    CHECK(o.moves[0] == Action::Wait);
  }
}

TEST_CASE("cs_pibt_step with deterministic distributions equals argmax when conflict-free") {
  const GridMap m(4, 4);
  const Configuration c{{0, 0}, {3, 3}};
  const std::vector<ActionDistribution> d{ActionDistribution::deterministic(Action::Down),
                                          ActionDistribution::deterministic(Action::Left)};
  Rng rng(1);
  for (SampleMode mode : {SampleMode::Strict, SampleMode::Sampled}) {
    const auto r = cs_pibt_step(c, d, prio({1.5, 0.5}), mode, m, rng);
    CHECK(r.moves == std::vector<Action>{Action::Down, Action::Left});
  }
}
