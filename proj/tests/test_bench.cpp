#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "nebula/bench.hpp"

using namespace nebula;

TEST_CASE("csv quoting") {
  REQUIRE(csv_quote("plain") == "plain");
  REQUIRE(csv_quote("with,comma") == "\"with,comma\"");
  REQUIRE(csv_quote("say \"hi\"") == "\"say \"\"hi\"\"\"");
  REQUIRE(csv_quote("") == "");
}

TEST_CASE("run records survive a csv round trip") {
  RunRecord r;
  r.instance = "weird,name \"x\"";
  r.config = "nebula-lite";
  r.seed = 42;
  r.outcome = "solved";
  r.wall_time_s = 0.12345678901234567;
  r.expansions = 123456789;
  r.evaluations = 987654321;
  r.evals_per_sec = 1.5e6;
  r.mean_eval_depth = 17.25;
  r.descent_edges = 55;
  r.scan_steps = 66;
  r.plan_length = 31;

  std::stringstream csv;
  csv << csv_header() << "\n" << to_csv_row(r) << "\n";
  std::vector<RunRecord> parsed = parse_csv(csv);
  REQUIRE(parsed.size() == 1);
  const RunRecord& p = parsed[0];
  REQUIRE(p.instance == r.instance);
  REQUIRE(p.config == r.config);
  REQUIRE(p.seed == r.seed);
  REQUIRE(p.outcome == r.outcome);
  REQUIRE(p.wall_time_s == r.wall_time_s);  // %.17g is lossless for doubles
  REQUIRE(p.expansions == r.expansions);
  REQUIRE(p.evaluations == r.evaluations);
  REQUIRE(p.evals_per_sec == r.evals_per_sec);
  REQUIRE(p.mean_eval_depth == r.mean_eval_depth);
  REQUIRE(p.descent_edges == r.descent_edges);
  REQUIRE(p.scan_steps == r.scan_steps);
  REQUIRE(p.plan_length == r.plan_length);
}

TEST_CASE("csv parsing rejects malformed input") {
  SECTION("wrong header") {
    std::stringstream csv("foo,bar\n");
    REQUIRE_THROWS_AS(parse_csv(csv), std::invalid_argument);
  }
  SECTION("wrong field count") {
    std::stringstream csv;
    csv << csv_header() << "\n" << "a,b,c\n";
    REQUIRE_THROWS_AS(parse_csv(csv), std::invalid_argument);
  }
  SECTION("crlf and blank lines are tolerated") {
    RunRecord r;
    r.instance = "i";
    r.config = "c";
    r.outcome = "solved";
    std::stringstream csv;
    csv << csv_header() << "\r\n" << to_csv_row(r) << "\r\n\r\n";
    REQUIRE(parse_csv(csv).size() == 1);
  }
}

TEST_CASE("agile scores") {
  const double limit = 300;
  REQUIRE(agile_instance_score(false, 5, limit) == 0.0);
  REQUIRE(agile_instance_score(true, 1.0, limit) == 1.0);
  REQUIRE(agile_instance_score(true, 0.25, limit) == 1.0);
  REQUIRE(agile_instance_score(true, limit, limit) ==
          Catch::Approx(0.0).margin(1e-12));
  REQUIRE(agile_instance_score(true, std::sqrt(limit), limit) ==
          Catch::Approx(0.5).margin(1e-12));
  REQUIRE(agile_instance_score(true, 2 * limit, limit) == 0.0);  // clamped
}

TEST_CASE("suite scores aggregate per instance then sum") {
  auto rec = [](const char* inst, const char* outcome, double t) {
    RunRecord r;
    r.instance = inst;
    r.outcome = outcome;
    r.wall_time_s = t;
    return r;
  };
  std::vector<RunRecord> records{
      rec("a", "solved", 1.0),
      rec("a", "solved", std::sqrt(300.0)),
      rec("b", "solved", 0.5),
      rec("b", "exhausted", 2.0),
  };
  SuiteScore score = score_suite(records, 300.0);
  REQUIRE(score.agile == Catch::Approx(1.25).margin(1e-12));
  REQUIRE(score.coverage == Catch::Approx(1.5).margin(1e-12));
}

TEST_CASE("every named configuration is constructible") {
  std::vector<std::string> names = config_names();
  REQUIRE(names.size() == 7);
  for (const std::string& name : names) REQUIRE_NOTHROW(config_by_name(name));
  REQUIRE_THROWS_AS(config_by_name("no-such-config"), std::invalid_argument);
}

TEST_CASE("the flagship configuration wires the whole stack") {
  SearchConfig cfg = nebula_lite_config();
  REQUIRE(cfg.mode == SearchMode::Bilevel);
  REQUIRE(cfg.policy == TreePolicy::Normal2);
  REQUIRE(cfg.collapse == CollapseMode::Dynamic);
  REQUIRE(cfg.boost == 10);
  REQUIRE(cfg.portfolio.size() == 4);
  REQUIRE(cfg.novelty_partition.size() == 2);
  int preferred = 0, tree = 0;
  for (const SourceSpec& s : cfg.portfolio) {
    if (s.kind == SourceSpec::Kind::Preferred) ++preferred;
    if (s.kind == SourceSpec::Kind::Tree) ++tree;
  }
  REQUIRE(preferred == 2);
  REQUIRE(tree == 2);
}

TEST_CASE("run_one fills the record deterministically") {
  Task task = gen_hanoi(3);
  RunRecord a = run_one("hanoi-3", task, "gbfs-hff", 0, config_by_name("gbfs-hff"));
  RunRecord b = run_one("hanoi-3", task, "gbfs-hff", 0, config_by_name("gbfs-hff"));
  REQUIRE(a.instance == "hanoi-3");
  REQUIRE(a.config == "gbfs-hff");
  REQUIRE(a.outcome == "solved");
  REQUIRE(a.plan_length >= 7);
  REQUIRE(a.expansions > 0);
  REQUIRE(a.evaluations > 0);
  REQUIRE(a.expansions == b.expansions);
  REQUIRE(a.evaluations == b.evaluations);
  REQUIRE(a.plan_length == b.plan_length);
}

TEST_CASE("the built-in suite runs end to end") {
  SuiteOptions opt;
  opt.configs = {"gbfs-hff"};
  opt.seeds = 1;
  opt.time_limit_s = 5;
  opt.jobs = 4;
  std::vector<RunRecord> records = run_suite(opt);
  REQUIRE(records.size() == builtin_suite().size());
  REQUIRE(std::is_sorted(records.begin(), records.end(),
                         [](const RunRecord& a, const RunRecord& b) {
                           return std::tie(a.instance, a.config, a.seed) <
                                  std::tie(b.instance, b.config, b.seed);
                         }));
  bool saw_hanoi3 = false;
  for (const RunRecord& r : records) {
    REQUIRE(r.config == "gbfs-hff");
    if (r.instance == "hanoi-3") {
      saw_hanoi3 = true;
      REQUIRE(r.outcome == "solved");
      REQUIRE(r.plan_length >= 7);
    }
  }
  REQUIRE(saw_hanoi3);
}

TEST_CASE("line fits") {
  LineFit fit = fit_line({1, 2, 3}, {3, 5, 7});
  REQUIRE(fit.slope == Catch::Approx(2.0).margin(1e-12));
  REQUIRE(fit.intercept == Catch::Approx(1.0).margin(1e-12));
  REQUIRE(fit.r2 == Catch::Approx(1.0).margin(1e-12));
  REQUIRE_THROWS_AS(fit_line({1}, {2}), std::invalid_argument);
  REQUIRE_THROWS_AS(fit_line({1, 2}, {1}), std::invalid_argument);
}

TEST_CASE("probe rows keep the advertised schema") {
  std::vector<std::string> header = split_csv_line(probe_csv_header());
  REQUIRE(header.size() == 13);
  ProbeRow row;
  row.config = "with,comma";
  row.depth = 4;
  std::vector<std::string> fields = split_csv_line(to_probe_csv_row(row));
  REQUIRE(fields.size() == 13);
  REQUIRE(fields[0] == "with,comma");
  REQUIRE(fields[1] == "4");
}

TEST_CASE("selection cost probes exhaust the synthetic trees") {
  SearchConfig plain;
  plain.mode = SearchMode::Plain;
  plain.policy = TreePolicy::Normal2;
  ProbeRow p = selection_cost_probe("plain", plain, 2, 4);
  REQUIRE(p.expansions == 31);
  REQUIRE(p.depth == 4);
  REQUIRE(p.descent_cost > 0);
  REQUIRE(p.queue_cost == 0.0);  // plain descent never touches a frontier queue

  SearchConfig bb;
  bb.mode = SearchMode::Bilevel;
  bb.policy = TreePolicy::Normal2;
  ProbeRow q = selection_cost_probe("bilevel-bucket", bb, 2, 4);
  REQUIRE(q.expansions == 31);
  REQUIRE(q.queue_pushes > 0);
  REQUIRE(q.queue_cost > 0);
}
