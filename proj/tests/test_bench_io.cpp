#include <doctest.h>

#include "mapf/bench_io.hpp"

using namespace mapf;

namespace {
const char* kMap =
    "type octile\n"
    "height 3\n"
    "width 4\n"
    "map\n"
    "..@.\n"
    ".T..\n"
    "....\n";
}

TEST_CASE("parse_map reads MovingAI grids") {
  const GridMap m = parse_map(kMap);
  CHECK(m.width() == 4);
  CHECK(m.height() == 3);
  CHECK_FALSE(m.is_free(Cell{2, 0}));
  CHECK_FALSE(m.is_free(Cell{1, 1}));
  CHECK(m.is_free(Cell{3, 2}));
  CHECK(m.num_free() == 10);
  CHECK(parse_map(render_map(m)) == m);
}

TEST_CASE("parse_map errors name the line") {
  try {
    parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n.\n");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line() == 6);
  }
  CHECK_THROWS_AS(parse_map("type octile\nheight 2\nwidth 2\nmap\n..\n"), ParseError);
  CHECK_THROWS_AS(parse_map("type octile\nheight 1\nwidth 2\nmap\n.x\n"), ParseError);
  CHECK_THROWS_AS(parse_map("height 1\nmap\n.\n"), ParseError);
}

TEST_CASE("parse_scen reads entries and validates bounds") {
  const std::string scen =
      "version 1\n"
      "0\tm.map\t4\t3\t0\t0\t3\t2\t5.00000000\n"
      "1\tm.map\t4\t3\t3\t0\t0\t2\t5\n";
  const auto e = parse_scen(scen);
  REQUIRE(e.size() == 2);
  CHECK(e[0].start == Cell{0, 0});
  CHECK(e[0].goal == Cell{3, 2});
  CHECK(e[1].bucket == 1);
  CHECK(e[1].optimal_length == doctest::Approx(5));

  const auto inst = make_instance(parse_map(kMap), e, 2);
  CHECK(inst.num_agents() == 2);
  CHECK_THROWS_AS(make_instance(parse_map(kMap), e, 3), std::invalid_argument);
  CHECK_THROWS_AS(make_instance(parse_map(kMap), e, 0), std::invalid_argument);

  CHECK_THROWS_AS(parse_scen("version 2\n"), ParseError);
  CHECK_THROWS_AS(parse_scen("version 1\n0\tm.map\t4\t3\t9\t0\t3\t2\t5\n"), ParseError);
  CHECK_THROWS_AS(parse_scen("version 1\n0\tm.map\t4\t3\t0\t0\t3\n"), ParseError);
}

TEST_CASE("solution files round-trip") {
  const PathSet p = {{{0, 0}, {1, 0}}, {{3, 2}, {3, 1}}};
  const std::string text = write_solution(p);
  CHECK(text.find("0: (0,0) (3,2)") != std::string::npos);
  CHECK(read_solution(text) == p);
  CHECK_THROWS_AS(read_solution(""), ParseError);
  CHECK_THROWS_AS(read_solution("0: (0,0\n"), ParseError);
}

TEST_CASE("run records round-trip through CSV") {
  RunRecord r;
  r.algo = "lacam";
  r.ordering_mode = "sum0.5";
  r.shield = "pibt";
  r.map = "random-32-32-10.map";
  r.scen = "s1.scen";
  r.n_agents = 50;
  r.seed = 3;
  r.success = true;
  r.flowtime = 1234;
  r.makespan = 60;
  r.runtime_ms = 12;
  r.hl_nodes = 61;
  r.params = {{"heuristic", "bd"}, {"noise_K", "0"}};
  const std::string csv = write_csv({r, r});
  CHECK(csv.rfind(csv_header() + "\n", 0) == 0);
  const auto back = read_csv(csv);
  REQUIRE(back.size() == 2);
  CHECK(back[0] == r);
  CHECK(back[1].param("heuristic") == "bd");
  CHECK(back[1].param("missing", "x") == "x");
  CHECK(read_csv(csv_header() + "\n").empty());
  CHECK(sanitize_label("a,b;c=d e") == "a_b_c_d_e");
}
