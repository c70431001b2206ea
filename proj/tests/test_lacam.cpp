#include <doctest.h>

#include <set>

#include "mapf/lacam.hpp"
#include "oracles/oracles.hpp"
#include "test_util.hpp"

using namespace mapf;

namespace {

SolveResult solve(const Instance& inst, RankMode mode = RankMode::h(), PolicyProvider* pol = nullptr,
                  SolveLimits lim = {}, std::uint64_t seed = 0) {
  const auto tables = build_tables(inst.map, inst.goals, HeuristicKind::BackwardDijkstra);
  ActionRanker ranker(inst.map, tables, pol, mode, SampleMode::Sampled);
  return lacam_solve(inst, ranker, initial_priorities(inst, tables), lim, seed);
}

}  // namespace

TEST_CASE("expand_lownode enumerates the closed neighbourhood, stay last") {
  const GridMap m = testutil::grid({"...", "@.@"});
  HighNode node;
  node.config = {m.id({0, 0}), m.id({1, 0})};
  node.order = {1, 0};
  node.low_queue.emplace_back();
  const auto root = expand_lownode(node, m);
  REQUIRE(root.has_value());
  CHECK(root->depth() == 0);
  // Agent 1 at (1,0): Down, Left, Right, then stay.
  REQUIRE(node.low_queue.size() == 4);
  CHECK(node.low_queue[0].who == std::vector<int>{1});
  CHECK(node.low_queue[0].where == std::vector<CellId>{m.id({1, 1})});
  CHECK(node.low_queue[1].where.back() == m.id({0, 0}));
  CHECK(node.low_queue[2].where.back() == m.id({2, 0}));
  CHECK(node.low_queue[3].where.back() == m.id({1, 0}));
  // Next level constrains agent 0 at (0,0): Right, then stay.
  expand_lownode(node, m);
  CHECK(node.low_queue.size() == 3 + 2);
  CHECK(node.low_queue.back().who == std::vector<int>{1, 0});
  // A full-depth node has no children.
  LowNode full{{1, 0}, {m.id({1, 0}), m.id({0, 0})}};
  HighNode leaf = node;
  leaf.low_queue = {full};
  expand_lownode(leaf, m);
  CHECK(leaf.low_queue.empty());
  HighNode empty;
  CHECK_FALSE(expand_lownode(empty, m).has_value());
}

TEST_CASE("total low nodes under one high node are bounded by the product of closed degrees") {
  const GridMap m(3, 2);
  HighNode node;
  node.config = {m.id({0, 0}), m.id({2, 1})};
  node.order = {0, 1};
  node.low_queue.emplace_back();
  long generated = 1;
  while (true) {
    const std::size_t before = node.low_queue.size();
    auto low = expand_lownode(node, m);
    if (!low) break;
    generated += static_cast<long>(node.low_queue.size() + 1 - before);
  }
  // 1 root + 3 (agent 0) + 3*3 (agent 1).
  CHECK(generated == 1 + 3 + 9);
}

TEST_CASE("single agent on an open grid follows a shortest path") {
  const Instance inst(GridMap(4, 4), {{0, 0}}, {{3, 2}});
  const auto r = solve(inst);
  REQUIRE(r.success());
  CHECK(r.flowtime == 5);
  CHECK(validate_paths(r.paths, inst).ok);
}

TEST_CASE("start equals goal") {
  const Instance inst(GridMap(3, 3), {{0, 0}, {1, 1}}, {{0, 0}, {1, 1}});
  const auto r = solve(inst);
  REQUIRE(r.success());
  CHECK(r.flowtime == 0);
  CHECK(r.paths[0].size() == 1);
}

TEST_CASE("1x2 swap is exhausted") {
  const Instance inst(GridMap(2, 1), {{0, 0}, {1, 0}}, {{1, 0}, {0, 0}});
  const auto r = solve(inst);
  CHECK(r.status == SolveStatus::FailureExhausted);
  CHECK(r.hl_nodes_generated <= 2);
  CHECK_FALSE(oracle::joint_bfs(inst).solvable);
}

TEST_CASE("crossing on a 2x2 grid") {
  const Instance inst(GridMap(2, 2), {{0, 0}, {1, 1}}, {{1, 1}, {0, 0}});
  const auto r = solve(inst);
  REQUIRE(r.success());
  CHECK(validate_paths(r.paths, inst).ok);
  const auto bfs = oracle::joint_bfs(inst);
  CHECK(bfs.solvable);
  CHECK(bfs.optimal_makespan == 2);
  CHECK(bfs.optimal_flowtime == 4);
}

TEST_CASE("limits: node cap and timeout") {
  Rng rng(1);
  const Instance inst(GridMap(2, 1), {{0, 0}, {1, 0}}, {{1, 0}, {0, 0}});
  SolveLimits lim;
  lim.node_cap = 1;
  const Instance walk(GridMap(3, 1), {{0, 0}}, {{2, 0}});
  CHECK(solve(walk, RankMode::h(), nullptr, lim).status == SolveStatus::FailureLimit);
  lim = {};
  lim.timeout = std::chrono::milliseconds(0);
  CHECK(solve(inst, RankMode::h(), nullptr, lim).status == SolveStatus::FailureTimeout);
}

TEST_CASE("micro-instance agreement with joint BFS, heuristic and policy orderings") {
  Rng rng(2024);
  int cases = 0, solvable = 0;
  for (int trial = 0; trial < 150; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 3);
    const Instance inst = testutil::random_instance(rng, 4, 4, n, 0.25);
    const auto truth = oracle::joint_bfs(inst);
    REQUIRE(truth.conclusive);
    const auto tables = build_tables(inst.map, inst.goals, HeuristicKind::BackwardDijkstra);
    SoftmaxHPolicy pol(inst, tables, 0.5, 20, 3);
    for (bool reinsert : {true, false}) {
      SolveLimits lim;
      lim.reinsert_explored = reinsert;
      const auto a = solve(inst, RankMode::h(), nullptr, lim, trial);
      const auto b = solve(inst, RankMode::pi(), &pol, lim, trial);
      CHECK(a.success() == truth.solvable);
      CHECK(b.success() == truth.solvable);
      if (a.success()) {
        CHECK(validate_paths(a.paths, inst).ok);
        CHECK(a.flowtime >= *truth.optimal_flowtime);
        CHECK(a.makespan >= *truth.optimal_makespan);
      }
      if (!truth.solvable) CHECK(a.status == SolveStatus::FailureExhausted);
    }
    ++cases;
    solvable += truth.solvable;
  }
  CHECK(cases == 150);
  CHECK(solvable > 0);
  CHECK(solvable < cases);
}

TEST_CASE("reconstruct walks parent links") {
  const GridMap m(3, 1);
  HighNode a, b, c;
  a.config = {m.id({0, 0})};
  b.config = {m.id({1, 0})};
  b.parent = &a;
  c.config = {m.id({2, 0})};
  c.parent = &b;
  const auto p = reconstruct(c, m);
  REQUIRE(p.size() == 1);
  CHECK(p[0] == Path{{0, 0}, {1, 0}, {2, 0}});
  CHECK(reconstruct(a, m)[0].size() == 1);
}
