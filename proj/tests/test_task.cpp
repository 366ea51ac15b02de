#include <catch2/catch_amalgamated.hpp>

#include <fstream>
#include <sstream>

#include "nebula/oracles.hpp"
#include "nebula/task.hpp"
#include "nebula/task_io.hpp"

using namespace nebula;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const char* kMinimalDoc =
    "facts a b\n"
    "operator step\n"
    "  pre a\n"
    "  add b\n"
    "init a\n"
    "goal b\n";

}  // namespace

TEST_CASE("state bitset basics") {
  State s(70);  // spans two blocks
  REQUIRE(s.count() == 0);
  s.set(0);
  s.set(63);
  s.set(64);
  REQUIRE(s.test(0));
  REQUIRE(s.test(63));
  REQUIRE(s.test(64));
  REQUIRE_FALSE(s.test(1));
  REQUIRE(s.count() == 3);
  REQUIRE(s.facts() == std::vector<FactId>{0, 63, 64});

  State t(70);
  t.set(0);
  t.set(63);
  t.set(64);
  REQUIRE(s == t);
  REQUIRE(s.hash() == t.hash());
  t.reset(64);
  REQUIRE_FALSE(s == t);

  auto mask = make_mask({0, 64}, 70);
  REQUIRE(s.contains_all(mask));
  REQUIRE_FALSE(t.contains_all(mask));
}

TEST_CASE("parse minimal document") {
  Task task = parse_task(kMinimalDoc);
  REQUIRE(task.num_facts() == 2);
  REQUIRE(task.num_operators() == 1);
  REQUIRE(task.operators[0].name == "step");
  REQUIRE(task.init.test(0));
  REQUIRE_FALSE(task.init.test(1));
  REQUIRE(task.goal == std::vector<FactId>{1});
  REQUIRE_FALSE(task.is_goal(task.init));
}

TEST_CASE("parse rejects add/delete overlap") {
  const char* doc =
      "facts a b\n"
      "operator bad\n"
      "  pre a\n"
      "  add b\n"
      "  del b\n"
      "init a\n"
      "goal b\n";
  REQUIRE_THROWS_AS(parse_task(doc), std::invalid_argument);
}

TEST_CASE("parse errors carry line numbers") {
  SECTION("operator before facts") {
    try {
      parse_task("operator move\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line() == 1);
      REQUIRE(std::string(e.what()).find("'operator' before 'facts'") !=
              std::string::npos);
    }
  }
  SECTION("unknown fact") {
    try {
      parse_task("facts a b\ninit a c\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line() == 2);
      REQUIRE(std::string(e.what()).find("unknown fact 'c'") != std::string::npos);
    }
  }
  SECTION("duplicate fact") {
    try {
      parse_task("facts a\nfacts a\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line() == 2);
      REQUIRE(std::string(e.what()).find("duplicate fact") != std::string::npos);
    }
  }
  SECTION("missing operators") {
    REQUIRE_THROWS_AS(parse_task("facts a b\ninit a\ngoal b\n"), ParseError);
  }
  SECTION("missing goal") {
    const char* doc =
        "facts a b\n"
        "operator o\n"
        "  pre a\n"
        "  add b\n"
        "init a\n";
    REQUIRE_THROWS_AS(parse_task(doc), ParseError);
  }
  SECTION("stray name with no section") {
    try {
      parse_task("bogus\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      REQUIRE(e.line() == 1);
    }
  }
}

TEST_CASE("comments and continuation lines") {
  const char* doc =
      "# leading comment\n"
      "facts\n"
      "  a b  # trailing comment\n"
      "  c\n"
      "operator o\n"
      "  pre a\n"
      "  add b c\n"
      "init a\n"
      "goal b c\n";
  Task task = parse_task(doc);
  REQUIRE(task.num_facts() == 3);
  REQUIRE(task.operators[0].add == std::vector<FactId>{1, 2});
  REQUIRE(task.goal == std::vector<FactId>{1, 2});
}

TEST_CASE("successors follow declaration order") {
  const char* doc =
      "facts a b c\n"
      "operator to_b\n"
      "  pre a\n"
      "  add b\n"
      "  del a\n"
      "operator to_c\n"
      "  pre a\n"
      "  add c\n"
      "  del a\n"
      "operator from_b\n"
      "  pre b\n"
      "  add c\n"
      "init a\n"
      "goal c\n";
  Task task = parse_task(doc);
  auto succ = successors(task, task.init);
  REQUIRE(succ.size() == 2);
  REQUIRE(succ[0].first == 0);
  REQUIRE(succ[1].first == 1);
  REQUIRE(succ[0].second.test(1));
  REQUIRE_FALSE(succ[0].second.test(0));  // delete applied

  State dead(3);  // no fact set: nothing applicable
  REQUIRE(successors(task, dead).empty());
}

TEST_CASE("validate_plan") {
  Task task = parse_task(kMinimalDoc);
  SECTION("empty plan fails when init is not a goal") {
    REQUIRE_FALSE(validate_plan(task, Plan{}));
  }
  SECTION("single correct step") {
    REQUIRE(validate_plan(task, Plan{{0}}));
  }
  SECTION("inapplicable step") {
    Task t2 = parse_task(
        "facts a b c\n"
        "operator o\n"
        "  pre c\n"
        "  add b\n"
        "init a\n"
        "goal b\n");
    REQUIRE_FALSE(validate_plan(t2, Plan{{0}}));
  }
  SECTION("out of range step") {
    REQUIRE_FALSE(validate_plan(task, Plan{{7}}));
  }
  SECTION("empty plan on goal-in-init task") {
    Task t3 = parse_task(
        "facts a b\n"
        "operator o\n"
        "  pre a\n"
        "  add b\n"
        "init a\n"
        "goal a\n");
    REQUIRE(validate_plan(t3, Plan{}));
  }
}

TEST_CASE("serialize round-trip is stable") {
  Task task = parse_task(kMinimalDoc);
  std::string once = serialize_task(task);
  std::string twice = serialize_task(parse_task(once));
  REQUIRE(once == twice);
}

TEST_CASE("shipped hanoi-3 document") {
  Task task = parse_task(read_file(std::string(TEST_DATA_DIR) + "/hanoi3.task"));
  REQUIRE(task.num_facts() > 0);

  // smallest disk can move to either free peg
  REQUIRE(successors(task, task.init).size() == 2);

  // three at(disk,p3) goal facts, none holding initially
  int unmet = 0;
  for (FactId f : task.goal)
    if (!task.init.test(f)) ++unmet;
  REQUIRE(unmet == 3);

  auto res = oracle::bfs(task);
  REQUIRE(res.solved);
  REQUIRE(res.optimal_length == 7);
  REQUIRE(validate_plan(task, res.plan));

  std::string once = serialize_task(task);
  REQUIRE(serialize_task(parse_task(once)) == once);
}
