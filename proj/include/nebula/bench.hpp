#pragma once

// Benchmark plumbing: run records with a stable CSV schema, named search
// configurations, the built-in instance suite, agile scoring, and the
// selection-cost probes over synthetic balanced trees.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <istream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "nebula/engine.hpp"
#include "nebula/generators.hpp"
#include "nebula/task.hpp"

namespace nebula {

struct RunRecord {
  std::string instance;
  std::string config;
  uint64_t seed = 0;
  std::string outcome;
  double wall_time_s = 0;
  uint64_t expansions = 0;
  uint64_t evaluations = 0;
  double evals_per_sec = 0;
  double mean_eval_depth = 0;
  uint64_t descent_edges = 0;
  uint64_t scan_steps = 0;
  int64_t plan_length = -1;  // -1 when unsolved
};

inline const char* csv_header() {
  return "instance,config,seed,outcome,wall_time_s,expansions,evaluations,"
         "evals_per_sec,mean_eval_depth,descent_edges,scan_steps,plan_length";
}

inline std::string csv_quote(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline std::string to_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << csv_quote(r.instance) << ',' << csv_quote(r.config) << ',' << r.seed
      << ',' << csv_quote(r.outcome) << ',' << format_double(r.wall_time_s)
      << ',' << r.expansions << ',' << r.evaluations << ','
      << format_double(r.evals_per_sec) << ','
      << format_double(r.mean_eval_depth) << ',' << r.descent_edges << ','
      << r.scan_steps << ',' << r.plan_length;
  return out.str();
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

inline std::vector<RunRecord> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line))
    throw std::invalid_argument("csv: missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != csv_header())
    throw std::invalid_argument("csv: unexpected header: " + line);
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv_line(line);
    if (f.size() != 12)
      throw std::invalid_argument("csv: expected 12 fields, got " +
                                  std::to_string(f.size()));
    RunRecord r;
    r.instance = f[0];
    r.config = f[1];
    r.seed = std::stoull(f[2]);
    r.outcome = f[3];
    r.wall_time_s = std::stod(f[4]);
    r.expansions = std::stoull(f[5]);
    r.evaluations = std::stoull(f[6]);
    r.evals_per_sec = std::stod(f[7]);
    r.mean_eval_depth = std::stod(f[8]);
    r.descent_edges = std::stoull(f[9]);
    r.scan_steps = std::stoull(f[10]);
    r.plan_length = std::stoll(f[11]);
    records.push_back(std::move(r));
  }
  return records;
}

// -- named configurations -----------------------------------------------------

inline SearchConfig nebula_lite_config() {
  SearchConfig cfg;
  cfg.mode = SearchMode::Bilevel;
  cfg.policy = TreePolicy::Normal2;
  cfg.eval = EvalMode::Eager;
  cfg.collapse = CollapseMode::Dynamic;
  cfg.boost = 10;
  cfg.portfolio = {
      {SourceSpec::Kind::Tree, HeuristicKind::Ff, true},
      {SourceSpec::Kind::Preferred, HeuristicKind::Ff, false},
      {SourceSpec::Kind::Tree, HeuristicKind::GoalCount, true},
      {SourceSpec::Kind::Preferred, HeuristicKind::GoalCount, false},
  };
  cfg.novelty_partition = {HeuristicKind::Ff, HeuristicKind::GoalCount};
  return cfg;
}

inline std::vector<std::string> config_names() {
  return {"gbfs-hff",           "gbfs-hff-lazy",        "guct-hff",
          "guctn2-hff",         "guctn2-bilevel-hff",   "guctn2-bilevel-dtc-hff",
          "nebula-lite"};
}

inline SearchConfig config_by_name(const std::string& name) {
  SearchConfig cfg;
  cfg.heuristic = HeuristicKind::Ff;
  if (name == "gbfs-hff") {
    cfg.mode = SearchMode::QueueGbfs;
    return cfg;
  }
  if (name == "gbfs-hff-lazy") {
    cfg.mode = SearchMode::QueueGbfs;
    cfg.eval = EvalMode::Lazy;
    return cfg;
  }
  if (name == "guct-hff") {
    cfg.mode = SearchMode::Plain;
    cfg.policy = TreePolicy::Ucb1;
    return cfg;
  }
  if (name == "guctn2-hff") {
    cfg.mode = SearchMode::Plain;
    cfg.policy = TreePolicy::Normal2;
    return cfg;
  }
  if (name == "guctn2-bilevel-hff") {
    cfg.mode = SearchMode::Bilevel;
    cfg.policy = TreePolicy::Normal2;
    return cfg;
  }
  if (name == "guctn2-bilevel-dtc-hff") {
    cfg.mode = SearchMode::Bilevel;
    cfg.policy = TreePolicy::Normal2;
    cfg.collapse = CollapseMode::Dynamic;
    return cfg;
  }
  if (name == "nebula-lite") return nebula_lite_config();
  throw std::invalid_argument("unknown config: " + name);
}

// -- single runs ----------------------------------------------------------------

inline RunRecord run_one(const std::string& instance, const Task& task,
                         const std::string& config_name, uint64_t seed,
                         SearchConfig cfg) {
  SearchResult res = run_search(task, cfg);
  RunRecord r;
  r.instance = instance;
  r.config = config_name;
  r.seed = seed;
  r.outcome = outcome_name(res.outcome);
  r.wall_time_s = res.metrics.wall_time_s;
  r.expansions = res.metrics.expansions;
  r.evaluations = res.metrics.evaluations;
  r.evals_per_sec = res.metrics.evals_per_sec();
  r.mean_eval_depth = res.metrics.mean_eval_depth();
  r.descent_edges = res.metrics.descent_edges;
  r.scan_steps = res.metrics.scan_steps;
  r.plan_length = res.outcome == Outcome::Solved
                      ? static_cast<int64_t>(res.plan.steps.size())
                      : -1;
  return r;
}

// -- built-in suite ---------------------------------------------------------------

struct SuiteInstance {
  std::string name;
  std::function<Task(uint64_t seed)> make;  // seed feeds randomized instances
};

inline std::vector<SuiteInstance> builtin_suite() {
  std::vector<SuiteInstance> out;
  for (int k = 3; k <= 7; ++k) {
    out.push_back({"hanoi-" + std::to_string(k),
                   [k](uint64_t) { return gen_hanoi(k); }});
  }
  out.push_back({"grid-8x8", [](uint64_t) { return gen_grid(8, 8, 0); }});
  out.push_back(
      {"grid-10x10-obst", [](uint64_t seed) { return gen_grid(10, 10, seed + 1); }});
  out.push_back({"random-24-60", [](uint64_t seed) {
                   return gen_random_strips(seed * 3 + 1, 24, 60, 2, 2, 2);
                 }});
  out.push_back({"random-20-40", [](uint64_t seed) {
                   return gen_random_strips(seed * 5 + 2, 20, 40, 2, 2, 2);
                 }});
  out.push_back({"random-28-80", [](uint64_t seed) {
                   return gen_random_strips(seed * 7 + 3, 28, 80, 3, 2, 2);
                 }});
  return out;
}

struct SuiteOptions {
  std::vector<std::string> configs{"gbfs-hff", "nebula-lite"};
  int seeds = 5;
  double time_limit_s = 300;
  uint64_t max_nodes = 0;
  int jobs = 1;
};

inline std::vector<RunRecord> run_suite(const SuiteOptions& opt) {
  struct Job {
    std::string instance;
    std::string config;
    uint64_t seed;
  };
  std::vector<SuiteInstance> instances = builtin_suite();
  std::vector<Job> jobs;
  for (const auto& inst : instances)
    for (const auto& cfg : opt.configs)
      for (int s = 0; s < opt.seeds; ++s)
        jobs.push_back({inst.name, cfg, static_cast<uint64_t>(s)});

  std::vector<RunRecord> records(jobs.size());
  std::atomic<size_t> next{0};
  auto worker = [&]() {
    for (;;) {
      size_t i = next.fetch_add(1);
      if (i >= jobs.size()) return;
      const Job& job = jobs[i];
      const SuiteInstance* inst = nullptr;
      for (const auto& cand : instances)
        if (cand.name == job.instance) inst = &cand;
      Task task = inst->make(job.seed);
      SearchConfig cfg = config_by_name(job.config);
      cfg.time_limit_s = opt.time_limit_s;
      cfg.max_nodes = opt.max_nodes;
      records[i] = run_one(job.instance, task, job.config, job.seed, cfg);
    }
  };
  int nthreads = std::max(1, opt.jobs);
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  std::sort(records.begin(), records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              return std::tie(a.instance, a.config, a.seed) <
                     std::tie(b.instance, b.config, b.seed);
            });
  return records;
}

// -- scoring ------------------------------------------------------------------------

struct SuiteScore {
  double coverage = 0;  // solved count, averaged over seeds per instance
  double agile = 0;     // sum over instances of seed-averaged agile scores
};

inline double agile_instance_score(bool solved, double t, double limit) {
  if (!solved) return 0;
  if (t <= 1.0) return 1;
  double v = 1.0 - std::log(t) / std::log(limit);
  return std::min(1.0, std::max(0.0, v));
}

inline SuiteScore score_suite(const std::vector<RunRecord>& records,
                              double limit) {
  struct Acc {
    double score_sum = 0;
    double solved_sum = 0;
    int n = 0;
  };
  std::vector<std::pair<std::string, Acc>> per_instance;
  for (const RunRecord& r : records) {
    Acc* acc = nullptr;
    for (auto& [name, a] : per_instance)
      if (name == r.instance) acc = &a;
    if (!acc) {
      per_instance.emplace_back(r.instance, Acc{});
      acc = &per_instance.back().second;
    }
    bool solved = r.outcome == "solved";
    acc->score_sum += agile_instance_score(solved, r.wall_time_s, limit);
    acc->solved_sum += solved ? 1.0 : 0.0;
    acc->n += 1;
  }
  SuiteScore score;
  for (const auto& [name, acc] : per_instance) {
    score.agile += acc.score_sum / acc.n;
    score.coverage += acc.solved_sum / acc.n;
  }
  return score;
}

// -- probes -------------------------------------------------------------------------

struct ProbeRow {
  std::string config;
  int depth = 0;
  uint64_t expansions = 0;
  uint64_t bursts = 0;
  uint64_t descent_edges = 0;
  uint64_t nec_evals = 0;
  uint64_t scan_steps = 0;
  uint64_t heap_compares = 0;
  uint64_t queue_pushes = 0;
  uint64_t queue_pops = 0;
  double descent_cost = 0;
  double queue_cost = 0;
  double wall_time_s = 0;
};

inline const char* probe_csv_header() {
  return "config,depth,expansions,bursts,descent_edges,nec_evals,scan_steps,"
         "heap_compares,queue_pushes,queue_pops,descent_cost,queue_cost,"
         "wall_time_s";
}

inline std::string to_probe_csv_row(const ProbeRow& r) {
  std::ostringstream out;
  out << csv_quote(r.config) << ',' << r.depth << ',' << r.expansions << ','
      << r.bursts << ',' << r.descent_edges << ',' << r.nec_evals << ','
      << r.scan_steps << ',' << r.heap_compares << ',' << r.queue_pushes << ','
      << r.queue_pops << ',' << format_double(r.descent_cost) << ','
      << format_double(r.queue_cost) << ',' << format_double(r.wall_time_s);
  return out.str();
}

// Exhausts the whole tree so every counter is a deterministic function of the
// task alone; per-expansion figures then average over all N(depth) expansions.
inline ProbeRow selection_cost_probe(const std::string& label, SearchConfig cfg,
                                     int branching, int depth) {
  Task task = gen_tree(branching, depth);
  cfg.heuristic = HeuristicKind::StateHash;
  SearchResult res = run_search(task, cfg);
  ProbeRow row;
  row.config = label;
  row.depth = depth;
  row.expansions = res.metrics.expansions;
  row.bursts = res.metrics.bursts;
  row.descent_edges = res.metrics.descent_edges;
  row.nec_evals = res.metrics.nec_evals;
  row.scan_steps = res.metrics.scan_steps;
  row.heap_compares = res.metrics.heap_compares;
  row.queue_pushes = res.metrics.queue_pushes;
  row.queue_pops = res.metrics.queue_pops;
  row.descent_cost = res.metrics.descent_cost_per_expansion();
  row.queue_cost = res.metrics.queue_cost_per_expansion();
  row.wall_time_s = res.metrics.wall_time_s;
  return row;
}

inline std::vector<ProbeRow> probe_selection_costs(
    int branching = 3, const std::vector<int>& depths = {6, 8, 10, 12}) {
  std::vector<ProbeRow> rows;
  for (int d : depths) {
    SearchConfig plain;
    plain.mode = SearchMode::Plain;
    plain.policy = TreePolicy::Normal2;
    rows.push_back(selection_cost_probe("plain", plain, branching, d));
  }
  for (int d : depths) {
    SearchConfig bb;
    bb.mode = SearchMode::Bilevel;
    bb.policy = TreePolicy::Normal2;
    bb.queue = QueueBackend::Bucket;
    rows.push_back(selection_cost_probe("bilevel-bucket", bb, branching, d));
  }
  for (int d : depths) {
    SearchConfig bh;
    bh.mode = SearchMode::Bilevel;
    bh.policy = TreePolicy::Normal2;
    bh.queue = QueueBackend::Heap;
    rows.push_back(selection_cost_probe("bilevel-heap", bh, branching, d));
  }
  return rows;
}

// Least-squares fit y = slope*x + intercept with coefficient of determination.
struct LineFit {
  double slope = 0;
  double intercept = 0;
  double r2 = 0;
};

inline LineFit fit_line(const std::vector<double>& xs,
                        const std::vector<double>& ys) {
  if (xs.size() != ys.size() || xs.size() < 2)
    throw std::invalid_argument("fit_line: need >= 2 points");
  double n = static_cast<double>(xs.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < xs.size(); ++i) {
    sx += xs[i];
    sy += ys[i];
    sxx += xs[i] * xs[i];
    sxy += xs[i] * ys[i];
  }
  LineFit fit;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0, ss_tot = 0, mean_y = sy / n;
  for (size_t i = 0; i < xs.size(); ++i) {
    double pred = fit.slope * xs[i] + fit.intercept;
    ss_res += (ys[i] - pred) * (ys[i] - pred);
    ss_tot += (ys[i] - mean_y) * (ys[i] - mean_y);
  }
  fit.r2 = ss_tot > 0 ? 1.0 - ss_res / ss_tot : 1.0;
  return fit;
}

}  // namespace nebula
