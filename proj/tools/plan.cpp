// Command-line front end: single runs, the built-in benchmark suite,
// selection-cost probes, and score aggregation over result CSVs.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "nebula/bench.hpp"
#include "nebula/oracles.hpp"
#include "nebula/task_io.hpp"

using namespace nebula;

namespace {

HeuristicKind parse_heuristic(const std::string& name) {
  if (name == "goalcount") return HeuristicKind::GoalCount;
  if (name == "hmax") return HeuristicKind::HMax;
  if (name == "hadd") return HeuristicKind::HAdd;
  if (name == "hff") return HeuristicKind::Ff;
  if (name == "statehash") return HeuristicKind::StateHash;
  throw std::invalid_argument("unknown heuristic: " + name);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

Task make_generated(const std::string& spec) {
  std::vector<std::string> parts = split(spec, ':');
  const std::string& kind = parts[0];
  auto arg = [&](size_t i, long long fallback) -> long long {
    return parts.size() > i ? std::stoll(parts[i]) : fallback;
  };
  if (kind == "hanoi" && parts.size() == 2)
    return gen_hanoi(static_cast<int>(arg(1, 0)));
  if (kind == "grid" && (parts.size() == 2 || parts.size() == 3)) {
    std::vector<std::string> dims = split(parts[1], 'x');
    if (dims.size() != 2) throw std::invalid_argument("grid spec needs WxH");
    return gen_grid(std::stoi(dims[0]), std::stoi(dims[1]),
                    static_cast<uint64_t>(arg(2, 0)));
  }
  if (kind == "random" && parts.size() >= 2)
    return gen_random_strips(static_cast<uint64_t>(arg(1, 0)),
                             static_cast<int>(arg(2, 24)),
                             static_cast<int>(arg(3, 60)), 2, 2, 2);
  if (kind == "tree" && parts.size() == 3)
    return gen_tree(static_cast<int>(arg(1, 0)), static_cast<int>(arg(2, 0)));
  if (kind == "rtree" && parts.size() == 3)
    return gen_random_tree(static_cast<uint64_t>(arg(1, 0)),
                           static_cast<int>(arg(2, 0)), true)
        .task;
  throw std::invalid_argument("bad generator spec: " + spec);
}

std::vector<SourceSpec> parse_alternate(const std::string& list) {
  std::vector<SourceSpec> specs;
  for (const std::string& token : split(list, ',')) {
    std::vector<std::string> kv = split(token, ':');
    if (kv.size() != 2)
      throw std::invalid_argument("bad queue spec: " + token);
    SourceSpec spec;
    spec.h = parse_heuristic(kv[1]);
    if (kv[0] == "n2") {
      spec.kind = SourceSpec::Kind::Tree;
      spec.use_novelty = true;
    } else if (kv[0] == "tree") {
      spec.kind = SourceSpec::Kind::Tree;
    } else if (kv[0] == "plain") {
      spec.kind = SourceSpec::Kind::Plain;
    } else if (kv[0] == "pr") {
      spec.kind = SourceSpec::Kind::Preferred;
    } else {
      throw std::invalid_argument("bad queue kind: " + kv[0]);
    }
    specs.push_back(spec);
  }
  return specs;
}

struct RunArgs {
  std::string task_path;
  std::string gen_spec;
  std::string config_name;
  std::string search = "bilevel";
  std::string heuristic = "hff";
  std::string bandit = "normal2";
  double ucb1_c = 1.0;
  std::string queue = "bucket";
  std::string budget = "depth";
  std::string collapse = "off";
  std::string eval = "eager";
  bool reopen = false;
  bool graft = false;
  std::string novelty = "off";
  std::string novelty_partition;
  std::string alternate;
  int boost = 10;
  bool no_own_sample = false;
  uint64_t max_nodes = 0;
  uint64_t max_expansions = 0;
  double time_limit = 0;
  uint64_t seed = 0;
  std::string out_path;
  bool show_plan = false;
};

SearchConfig build_config(const RunArgs& a) {
  SearchConfig cfg;
  if (!a.config_name.empty()) {
    cfg = config_by_name(a.config_name);
  } else {
    bool policy_fixed_by_mode = false;
    if (a.search == "gbfs") {
      cfg.mode = SearchMode::QueueGbfs;
    } else if (a.search == "plain") {
      cfg.mode = SearchMode::Plain;
    } else if (a.search == "guct") {
      cfg.mode = SearchMode::Plain;
      cfg.policy = TreePolicy::Ucb1;
      policy_fixed_by_mode = true;
    } else if (a.search == "guctn2") {
      cfg.mode = SearchMode::Plain;
      cfg.policy = TreePolicy::Normal2;
      policy_fixed_by_mode = true;
    } else if (a.search == "bilevel") {
      cfg.mode = SearchMode::Bilevel;
    } else if (a.search == "fixed") {
      cfg.mode = SearchMode::FixedBudget;
    } else {
      throw std::invalid_argument("unknown search mode: " + a.search);
    }

    if (!policy_fixed_by_mode) {
      if (a.bandit == "greedy")
        cfg.policy = TreePolicy::GreedyMin;
      else if (a.bandit == "ucb1")
        cfg.policy = TreePolicy::Ucb1;
      else if (a.bandit == "normal2")
        cfg.policy = TreePolicy::Normal2;
      else
        throw std::invalid_argument("unknown bandit: " + a.bandit);
    }

    cfg.heuristic = parse_heuristic(a.heuristic);
    cfg.ucb1_c = a.ucb1_c;
    cfg.queue = a.queue == "heap" ? QueueBackend::Heap : QueueBackend::Bucket;
    if (a.queue != "heap" && a.queue != "bucket")
      throw std::invalid_argument("unknown queue backend: " + a.queue);

    if (a.budget == "depth") {
      // bilevel default
    } else if (a.budget.rfind("fixed:", 0) == 0) {
      if (cfg.mode == SearchMode::Bilevel) cfg.mode = SearchMode::FixedBudget;
      cfg.fixed_budget = std::stoll(a.budget.substr(6));
      if (cfg.fixed_budget <= 0)
        throw std::invalid_argument("fixed budget must be positive");
    } else {
      throw std::invalid_argument("bad budget spec: " + a.budget);
    }

    if (a.collapse == "off") {
      cfg.collapse = CollapseMode::Off;
    } else if (a.collapse == "dtc") {
      cfg.collapse = CollapseMode::Dynamic;
    } else if (a.collapse.rfind("theta:", 0) == 0) {
      cfg.collapse = CollapseMode::FixedTheta;
      cfg.theta = std::stoi(a.collapse.substr(6));
    } else {
      throw std::invalid_argument("bad collapse spec: " + a.collapse);
    }

    cfg.eval = a.eval == "lazy" ? EvalMode::Lazy : EvalMode::Eager;
    if (a.eval != "lazy" && a.eval != "eager")
      throw std::invalid_argument("unknown eval mode: " + a.eval);

    if (a.novelty == "w2")
      cfg.novelty = NoveltyMode::W2;
    else if (a.novelty != "off")
      throw std::invalid_argument("unknown novelty mode: " + a.novelty);

    if (!a.novelty_partition.empty())
      for (const std::string& h : split(a.novelty_partition, ','))
        cfg.novelty_partition.push_back(parse_heuristic(h));
    if (!a.alternate.empty()) cfg.portfolio = parse_alternate(a.alternate);
  }
  cfg.reopen = a.reopen;
  cfg.graft = a.graft;
  cfg.boost = a.boost;
  cfg.include_own_sample = !a.no_own_sample;
  cfg.max_nodes = a.max_nodes;
  cfg.max_expansions = a.max_expansions;
  cfg.time_limit_s = a.time_limit;
  return cfg;
}

Task load_task(const RunArgs& a) {
  if (!a.gen_spec.empty()) return make_generated(a.gen_spec);
  std::ifstream in(a.task_path);
  if (!in) throw std::invalid_argument("cannot open task file: " + a.task_path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_task(buf.str());
}

int cmd_run(const RunArgs& a) {
  Task task = load_task(a);
  SearchConfig cfg = build_config(a);
  std::string instance = a.gen_spec.empty() ? a.task_path : a.gen_spec;
  std::string config_id = a.config_name.empty() ? a.search : a.config_name;
  SearchResult res = run_search(task, cfg);

  RunRecord rec = {instance,
                   config_id,
                   a.seed,
                   outcome_name(res.outcome),
                   res.metrics.wall_time_s,
                   res.metrics.expansions,
                   res.metrics.evaluations,
                   res.metrics.evals_per_sec(),
                   res.metrics.mean_eval_depth(),
                   res.metrics.descent_edges,
                   res.metrics.scan_steps,
                   res.outcome == Outcome::Solved
                       ? static_cast<int64_t>(res.plan.steps.size())
                       : -1};

  std::cout << "outcome:        " << rec.outcome << "\n";
  if (res.outcome == Outcome::Solved) {
    bool valid = validate_plan(task, res.plan);
    std::cout << "plan length:    " << rec.plan_length << "\n"
              << "plan valid:     " << (valid ? "yes" : "NO") << "\n";
    if (a.show_plan)
      for (int32_t step : res.plan.steps)
        std::cout << "  " << task.operators[step].name << "\n";
    if (!valid) return 2;
  }
  const Metrics& m = res.metrics;
  std::cout << "expansions:     " << rec.expansions << "\n"
            << "evaluations:    " << rec.evaluations << "\n"
            << "evals/sec:      " << format_double(rec.evals_per_sec) << "\n"
            << "mean eval depth:" << format_double(rec.mean_eval_depth) << "\n"
            << "descent edges:  " << rec.descent_edges << "\n"
            << "nec evals:      " << m.nec_evals << "\n"
            << "bursts:         " << m.bursts << "\n"
            << "scan steps:     " << rec.scan_steps << "\n"
            << "heap compares:  " << m.heap_compares << "\n"
            << "queue pushes:   " << m.queue_pushes << "\n"
            << "queue pops:     " << m.queue_pops << "\n"
            << "collapses:      " << m.collapses << "\n"
            << "reopenings:     " << m.reopenings << "\n"
            << "duplicates:     " << m.duplicates << "\n"
            << "wall time (s):  " << format_double(rec.wall_time_s) << "\n";

  if (!a.out_path.empty()) {
    std::ofstream out(a.out_path);
    if (!out) throw std::runtime_error("cannot write " + a.out_path);
    out << csv_header() << "\n" << to_csv_row(rec) << "\n";
  }
  return 0;
}

int cmd_suite(const SuiteOptions& opt, const std::string& out_path) {
  std::vector<RunRecord> records = run_suite(opt);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << csv_header() << "\n";
  for (const RunRecord& r : records) *out << to_csv_row(r) << "\n";
  if (!out_path.empty()) {
    SuiteScore score = score_suite(records, opt.time_limit_s > 1 ? opt.time_limit_s : 300);
    std::cout << "runs:     " << records.size() << "\n"
              << "coverage: " << format_double(score.coverage) << "\n"
              << "agile:    " << format_double(score.agile) << "\n";
  }
  return 0;
}

int cmd_probe(int branching, const std::string& depths_csv,
              const std::string& out_path, bool with_oracles) {
  std::vector<int> depths;
  for (const std::string& d : split(depths_csv, ','))
    depths.push_back(std::stoi(d));
  std::vector<ProbeRow> rows = probe_selection_costs(branching, depths);
  std::ostream* out = &std::cout;
  std::ofstream file;
  if (!out_path.empty()) {
    file.open(out_path);
    if (!file) throw std::runtime_error("cannot write " + out_path);
    out = &file;
  }
  *out << probe_csv_header() << "\n";
  for (const ProbeRow& r : rows) *out << to_probe_csv_row(r) << "\n";

  if (with_oracles) {
    // sanity: the probe trees must exhaust exactly their node counts
    for (int d : depths) {
      Task t = gen_tree(branching, d);
      oracle::BfsResult bfs = oracle::bfs(t);
      std::cout << "oracle tree depth " << d << ": "
                << (bfs.solved ? "unexpected goal" : "exhausted") << " after "
                << bfs.expanded << " expansions\n";
    }
  }
  return 0;
}

int cmd_score(const std::string& in_path, double limit) {
  std::ifstream in(in_path);
  if (!in) throw std::invalid_argument("cannot open " + in_path);
  std::vector<RunRecord> records = parse_csv(in);
  SuiteScore score = score_suite(records, limit);
  std::cout << "records:  " << records.size() << "\n"
            << "coverage: " << format_double(score.coverage) << "\n"
            << "agile:    " << format_double(score.agile) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"best-first search engine with tree-based open lists"};
  app.require_subcommand(1);

  RunArgs run_args;
  CLI::App* run = app.add_subcommand("run", "run one search on one task");
  run->add_option("--task", run_args.task_path, "task file");
  run->add_option("--gen", run_args.gen_spec,
                  "generator spec: hanoi:K | grid:WxH[:SEED] | "
                  "random:SEED[:FACTS:OPS] | tree:B:D | rtree:SEED:N");
  run->add_option("--config", run_args.config_name,
                  "named configuration (overrides search flags)");
  run->add_option("--search", run_args.search,
                  "gbfs | plain | guct | guctn2 | bilevel | fixed");
  run->add_option("--heuristic", run_args.heuristic,
                  "goalcount | hmax | hadd | hff | statehash");
  run->add_option("--bandit", run_args.bandit, "greedy | ucb1 | normal2");
  run->add_option("--ucb1-c", run_args.ucb1_c, "UCB1 exploration constant");
  run->add_option("--queue", run_args.queue, "bucket | heap");
  run->add_option("--budget", run_args.budget, "depth | fixed:N");
  run->add_option("--collapse", run_args.collapse, "off | theta:N | dtc");
  run->add_option("--eval", run_args.eval, "eager | lazy");
  run->add_flag("--reopen", run_args.reopen, "adopt cheaper paths to duplicates");
  run->add_flag("--graft", run_args.graft, "also move subtrees on reopening");
  run->add_option("--novelty", run_args.novelty, "off | w2");
  run->add_option("--novelty-partition", run_args.novelty_partition,
                  "comma list of heuristics forming the partition tuple");
  run->add_option("--alternate", run_args.alternate,
                  "comma list of queues: n2:H | tree:H | plain:H | pr:H");
  run->add_option("--boost", run_args.boost, "preferred-queue boost");
  run->add_flag("--no-own-sample", run_args.no_own_sample,
                "exclude a node's own h from its aggregate");
  run->add_option("--max-nodes", run_args.max_nodes, "node cap (0 = none)");
  run->add_option("--max-expansions", run_args.max_expansions,
                  "expansion cap (0 = none)");
  run->add_option("--time-limit", run_args.time_limit, "seconds (0 = none)");
  run->add_option("--seed", run_args.seed, "seed recorded with the run");
  run->add_option("--out", run_args.out_path, "write single-row CSV");
  run->add_flag("--show-plan", run_args.show_plan, "print the plan steps");

  SuiteOptions suite_opt;
  std::string suite_configs = "gbfs-hff,nebula-lite";
  std::string suite_out;
  CLI::App* suite = app.add_subcommand("suite", "run the built-in suite");
  suite->add_option("--configs", suite_configs, "comma list of named configs");
  suite->add_option("--seeds", suite_opt.seeds, "seeds per instance");
  suite->add_option("--time-limit", suite_opt.time_limit_s, "seconds per run");
  suite->add_option("--max-nodes", suite_opt.max_nodes, "node cap per run");
  suite->add_option("--jobs", suite_opt.jobs, "parallel workers");
  suite->add_option("--out", suite_out, "CSV output path (default stdout)");

  int probe_branching = 3;
  std::string probe_depths = "6,8,10,12";
  std::string probe_out;
  bool probe_oracles = false;
  CLI::App* probe =
      app.add_subcommand("probe", "selection-cost probes on synthetic trees");
  probe->add_option("--branching", probe_branching, "tree branching factor");
  probe->add_option("--depths", probe_depths, "comma list of depths");
  probe->add_option("--out", probe_out, "CSV output path (default stdout)");
  probe->add_flag("--with-oracles", probe_oracles,
                  "cross-check tree sizes with the breadth-first oracle");

  std::string score_in;
  double score_limit = 300;
  CLI::App* score = app.add_subcommand("score", "aggregate a results CSV");
  score->add_option("--in", score_in, "results CSV")->required();
  score->add_option("--limit", score_limit, "agile time limit L");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    std::cerr << e.what() << "\n";
    return 1;
  }

  try {
    if (run->parsed()) {
      if (run_args.task_path.empty() == run_args.gen_spec.empty()) {
        std::cerr << "run: give exactly one of --task or --gen\n";
        return 1;
      }
      return cmd_run(run_args);
    }
    if (suite->parsed()) {
      suite_opt.configs.clear();
      for (const std::string& c : split(suite_configs, ','))
        suite_opt.configs.push_back(c);
      return cmd_suite(suite_opt, suite_out);
    }
    if (probe->parsed())
      return cmd_probe(probe_branching, probe_depths, probe_out, probe_oracles);
    if (score->parsed()) return cmd_score(score_in, score_limit);
    return 1;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nebula::ParseError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 2;
  }
}
