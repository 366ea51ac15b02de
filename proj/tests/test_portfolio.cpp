#include <catch2/catch_amalgamated.hpp>

#include <array>

#include "nebula/alternation.hpp"
#include "nebula/bench.hpp"
#include "nebula/engine.hpp"
#include "nebula/generators.hpp"
#include "nebula/task_io.hpp"

using namespace nebula;

TEST_CASE("alternation cycles the queues in order") {
  AlternationScheduler sched({false, false}, 0);
  std::vector<bool> nonempty{true, true};
  for (int expect : {0, 1, 0, 1, 0, 1}) {
    REQUIRE(sched.pick(nonempty) == expect);
    sched.popped();
  }
  REQUIRE(sched.boosted_pops() == 0);
}

TEST_CASE("empty queues are skipped without losing their turn") {
  AlternationScheduler sched({false, false, false}, 0);
  std::vector<bool> holey{true, false, true};
  REQUIRE(sched.pick(holey) == 0);
  sched.popped();
  REQUIRE(sched.pick(holey) == 2);
  sched.popped();
  REQUIRE(sched.pick(holey) == 0);
  sched.popped();
  // the skipped queue gets served as soon as it has work
  std::vector<bool> refilled{false, true, true};
  REQUIRE(sched.pick(refilled) == 1);
  sched.popped();
  REQUIRE(sched.pick(refilled) == 2);
  sched.popped();
  REQUIRE(sched.pick({false, false, false}) == -1);
}

TEST_CASE("boost credit makes preferred queues exclusive") {
  AlternationScheduler sched({false, true}, 3);
  std::vector<bool> both{true, true};
  REQUIRE(sched.pick(both) == 0);  // no credit yet: regular rotation
  sched.popped();
  REQUIRE(sched.boost_credit() == 0);

  sched.on_improvement();
  REQUIRE(sched.boost_credit() == 3);
  for (int i = 0; i < 3; ++i) {
    REQUIRE(sched.pick(both) == 1);
    sched.popped();
  }
  REQUIRE(sched.boost_credit() == 0);
  REQUIRE(sched.boosted_pops() == 3);
  REQUIRE(sched.improvements() == 1);
  REQUIRE(sched.pick(both) == 1);  // regular rotation resumes where it left off
  sched.popped();
  REQUIRE(sched.boosted_pops() == 3);
}

TEST_CASE("credit is preserved while preferred queues are empty") {
  AlternationScheduler sched({false, true}, 3);
  sched.on_improvement();
  std::vector<bool> only_regular{true, false};
  REQUIRE(sched.pick(only_regular) == 0);
  sched.popped();
  REQUIRE(sched.boost_credit() == 3);  // not spent on the fallback pop
  REQUIRE(sched.boosted_pops() == 0);
  std::vector<bool> both{true, true};
  REQUIRE(sched.pick(both) == 1);
  sched.popped();
  REQUIRE(sched.boost_credit() == 2);
}

TEST_CASE("alternation is fair over many picks") {
  AlternationScheduler sched({false, false, false}, 0);
  std::vector<bool> nonempty{true, true, true};
  std::array<int, 3> counts{};
  for (int i = 0; i < 50; ++i) {
    int q = sched.pick(nonempty);
    sched.popped();
    ++counts[static_cast<size_t>(q)];
  }
  int lo = *std::min_element(counts.begin(), counts.end());
  int hi = *std::max_element(counts.begin(), counts.end());
  REQUIRE(hi - lo <= 1);
}

TEST_CASE("mask size mismatches are rejected") {
  AlternationScheduler sched({false, true}, 1);
  REQUIRE_THROWS_AS(sched.pick({true}), std::invalid_argument);
}

TEST_CASE("the full portfolio solves hanoi") {
  SECTION("hanoi-4") {
    Task task = gen_hanoi(4);
    SearchResult res = run_search(task, nebula_lite_config());
    REQUIRE(res.outcome == Outcome::Solved);
    REQUIRE(validate_plan(task, res.plan));
  }
  SECTION("hanoi-5 exercises the boosted queues") {
    Task task = gen_hanoi(5);
    SearchResult res = run_search(task, nebula_lite_config());
    REQUIRE(res.outcome == Outcome::Solved);
    REQUIRE(validate_plan(task, res.plan));
    REQUIRE(res.metrics.watch_improvements >= 1);
    REQUIRE(res.metrics.boosted_pops >= 1);
    REQUIRE(res.metrics.boosted_pops <= 10 * res.metrics.watch_improvements);
    REQUIRE(res.metrics.novelty_partitions >= 1);
  }
}

TEST_CASE("the portfolio handles a goal that already holds") {
  Task task = parse_task(
      "facts a b\n"
      "operator o\n"
      "  pre a\n"
      "  add b\n"
      "init a\n"
      "goal a\n");
  SearchResult res = run_search(task, nebula_lite_config());
  REQUIRE(res.outcome == Outcome::Solved);
  REQUIRE(res.plan.steps.empty());
  REQUIRE(res.metrics.expansions == 0);
}

TEST_CASE("named configurations cover a mini suite") {
  std::vector<Task> tasks;
  tasks.push_back(gen_hanoi(3));
  tasks.push_back(gen_hanoi(4));
  tasks.push_back(gen_hanoi(5));
  tasks.push_back(gen_grid(8, 8, 0));
  for (const char* name : {"gbfs-hff", "nebula-lite"}) {
    for (const Task& task : tasks) {
      SearchConfig cfg = config_by_name(name);
      cfg.max_expansions = 200000;
      SearchResult res = run_search(task, cfg);
      INFO(name);
      REQUIRE(res.outcome == Outcome::Solved);
      REQUIRE(validate_plan(task, res.plan));
    }
  }
}
