#pragma once

// The search engine: tree-based open lists selected by bandit descent (plain,
// bilevel with depth-proportional budgeted bursts, fixed budgets), tree
// collapsing, novelty-keyed selection, alternation portfolios with boosted
// preferred-operator queues, and a classic queue-based GBFS baseline.

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "nebula/alternation.hpp"
#include "nebula/bandit.hpp"
#include "nebula/heuristics.hpp"
#include "nebula/novelty.hpp"
#include "nebula/queues.hpp"
#include "nebula/task.hpp"
#include "nebula/tree.hpp"

namespace nebula {

enum class SearchMode { QueueGbfs, Plain, Bilevel, FixedBudget };
enum class TreePolicy { GreedyMin, Ucb1, Normal2 };
enum class QueueBackend { Bucket, Heap };
enum class EvalMode { Eager, Lazy };
enum class CollapseMode { Off, FixedTheta, Dynamic };
enum class NoveltyMode { Off, W2 };

struct SourceSpec {
  enum class Kind { Tree, Plain, Preferred };
  Kind kind = Kind::Tree;
  HeuristicKind h = HeuristicKind::Ff;
  bool use_novelty = false;  // tree sources: key leaves by w instead of h
};

struct SearchConfig {
  SearchMode mode = SearchMode::Plain;
  TreePolicy policy = TreePolicy::Normal2;
  double ucb1_c = 1.0;
  HeuristicKind heuristic = HeuristicKind::Ff;
  QueueBackend queue = QueueBackend::Bucket;
  int64_t fixed_budget = 1000;
  CollapseMode collapse = CollapseMode::Off;
  int theta = 0;
  EvalMode eval = EvalMode::Eager;
  bool reopen = false;
  bool graft = false;  // implies reopening
  NoveltyMode novelty = NoveltyMode::Off;
  std::vector<HeuristicKind> novelty_partition;  // empty: novelty tree kinds
  std::vector<SourceSpec> portfolio;             // empty: single source
  int boost = 10;
  bool include_own_sample = true;
  uint64_t max_nodes = 0;       // 0 = unlimited
  uint64_t max_expansions = 0;  // 0 = unlimited
  double time_limit_s = 0;      // 0 = unlimited
  bool record_trace = false;
  bool audit_collapse = false;
  Heuristic* heuristic_override = nullptr;  // not owned; tests inject tables
};

struct NoveltyLogEntry {
  int32_t state_id = -1;
  std::vector<int> tuple;
  int w = 0;
};

struct Metrics {
  uint64_t expansions = 0;
  uint64_t evaluations = 0;
  uint64_t generated = 0;
  uint64_t duplicates = 0;
  uint64_t descent_edges = 0;
  uint64_t nec_evals = 0;
  uint64_t bursts = 0;
  uint64_t scan_steps = 0;
  uint64_t heap_compares = 0;
  uint64_t queue_pushes = 0;
  uint64_t queue_pops = 0;
  uint64_t collapses = 0;
  uint64_t reopenings = 0;
  uint64_t grafts = 0;
  uint64_t nodes_created = 0;
  uint64_t peak_live_nodes = 0;
  uint64_t novelty_partitions = 0;
  uint64_t novelty_disabled = 0;
  uint64_t boosted_pops = 0;
  uint64_t watch_improvements = 0;
  uint64_t audit_failures = 0;
  double sum_eval_depth = 0;
  double wall_time_s = 0;
  std::vector<int32_t> expansion_trace;      // state ids, if record_trace
  std::vector<NoveltyLogEntry> novelty_log;  // assessments, if record_trace

  double evals_per_sec() const {
    return wall_time_s > 0 ? static_cast<double>(evaluations) / wall_time_s : 0;
  }
  double mean_eval_depth() const {
    return evaluations ? sum_eval_depth / static_cast<double>(evaluations) : 0;
  }
  // Work spent choosing the next expansion, per expansion.
  // Tree-walk work per expansion: edges descended plus child keys examined.
  double descent_cost_per_expansion() const {
    if (!expansions) return 0;
    return static_cast<double>(descent_edges + nec_evals) /
           static_cast<double>(expansions);
  }
  // Frontier-queue work per expansion: bucket cursor scans, heap compares,
  // and the push/pop operations themselves.
  double queue_cost_per_expansion() const {
    if (!expansions) return 0;
    return static_cast<double>(scan_steps + heap_compares + queue_pushes +
                               queue_pops) /
           static_cast<double>(expansions);
  }
};

enum class Outcome { Solved, Exhausted, ResourceLimit };

inline const char* outcome_name(Outcome o) {
  switch (o) {
    case Outcome::Solved: return "solved";
    case Outcome::Exhausted: return "exhausted";
    case Outcome::ResourceLimit: return "resource-limit";
  }
  return "?";
}

struct SearchResult {
  Outcome outcome = Outcome::Exhausted;
  Plan plan;
  Metrics metrics;
};

class SearchEngine {
 public:
  SearchEngine(const Task& task, SearchConfig cfg)
      : task_(task), cfg_(std::move(cfg)), space_(task) {
    build_sources();
  }

  SearchResult run() {
    start_ = Clock::now();
    if (task_.is_goal(task_.init)) return finish(Outcome::Solved, Plan{});
    if (cfg_.mode == SearchMode::QueueGbfs) return run_queue_gbfs();
    return run_tree();
  }

  const StateSpace& space() const { return space_; }
  const TreeNode* root() const { return root_; }

 private:
  using Clock = std::chrono::steady_clock;

  struct Channel {
    int evaluator = 0;
    bool use_novelty = false;
  };

  struct Source {
    bool is_tree = false;
    int channel = -1;                              // tree sources
    bool preferred = false;                        // queue sources
    int evaluator = -1;                            // queue sources
    std::unique_ptr<BucketQueue<TreeNode*>> queue;  // queue sources
  };

  // Either frontier backend behind one face; used by bursts.
  struct BurstQueue {
    BucketQueue<TreeNode*> bucket;
    HeapQueue<TreeNode*> heap;
    bool use_heap = false;
    void push(int key, TreeNode* n) {
      use_heap ? heap.push(key, n) : bucket.push(key, n);
    }
    std::pair<int, TreeNode*> popmin() {
      return use_heap ? heap.popmin() : bucket.popmin();
    }
    bool empty() const { return use_heap ? heap.empty() : bucket.empty(); }
  };

  // -- setup ---------------------------------------------------------------

  int ensure_evaluator(HeuristicKind kind) {
    for (size_t i = 0; i < evaluator_kinds_.size(); ++i)
      if (evaluator_kinds_[i] == kind) return static_cast<int>(i);
    evaluator_kinds_.push_back(kind);
    if (cfg_.heuristic_override)
      owned_evaluators_.push_back(nullptr);
    else
      owned_evaluators_.push_back(make_heuristic(task_, kind));
    return static_cast<int>(evaluator_kinds_.size() - 1);
  }

  Heuristic* evaluator(int idx) {
    return cfg_.heuristic_override ? cfg_.heuristic_override
                                   : owned_evaluators_[idx].get();
  }

  void build_sources() {
    std::vector<SourceSpec> specs = cfg_.portfolio;
    if (specs.empty())
      specs.push_back(SourceSpec{SourceSpec::Kind::Tree, cfg_.heuristic,
                                 cfg_.novelty == NoveltyMode::W2});

    std::vector<bool> preferred_mask;
    for (const auto& spec : specs) {
      Source src;
      int eval_idx = ensure_evaluator(spec.h);
      if (spec.kind == SourceSpec::Kind::Tree) {
        src.is_tree = true;
        int ch = -1;
        for (size_t c = 0; c < channels_.size(); ++c)
          if (channels_[c].evaluator == eval_idx &&
              channels_[c].use_novelty == spec.use_novelty)
            ch = static_cast<int>(c);
        if (ch < 0) {
          channels_.push_back(Channel{eval_idx, spec.use_novelty});
          ch = static_cast<int>(channels_.size() - 1);
        }
        src.channel = ch;
      } else {
        src.evaluator = eval_idx;
        src.preferred = spec.kind == SourceSpec::Kind::Preferred;
        src.queue = std::make_unique<BucketQueue<TreeNode*>>();
      }
      preferred_mask.push_back(src.preferred);
      sources_.push_back(std::move(src));
    }
    if (channels_.empty()) channels_.push_back(Channel{ensure_evaluator(cfg_.heuristic), false});

    track_preferred_.assign(evaluator_kinds_.size(), false);
    for (const auto& src : sources_)
      if (!src.is_tree && src.preferred) {
        track_preferred_[src.evaluator] = true;
        track_any_preferred_ = true;
      }

    bool any_novelty = false;
    for (const auto& ch : channels_) any_novelty |= ch.use_novelty;
    if (any_novelty || cfg_.novelty == NoveltyMode::W2) {
      novelty_.emplace(task_.num_facts());
      if (!cfg_.novelty_partition.empty()) {
        for (HeuristicKind k : cfg_.novelty_partition)
          partition_evaluators_.push_back(ensure_evaluator(k));
      } else {
        for (const auto& ch : channels_)
          if (ch.use_novelty || cfg_.novelty == NoveltyMode::W2) {
            int e = ch.evaluator;
            if (std::find(partition_evaluators_.begin(), partition_evaluators_.end(), e) ==
                partition_evaluators_.end())
              partition_evaluators_.push_back(e);
          }
      }
      if (partition_evaluators_.empty())
        partition_evaluators_.push_back(channels_[0].evaluator);
    }

    best_h_seen_.assign(evaluator_kinds_.size(), kDeadEnd);
    scheduler_.emplace(std::move(preferred_mask), cfg_.boost);
  }

  // -- shared node plumbing -------------------------------------------------

  TreeNode* new_node(int32_t sid, TreeNode* parent, int g, int depth) {
    TreeNode* n = arena_.make();
    n->state_id = sid;
    n->parent = parent;
    n->g = g;
    n->depth = depth;
    n->stats.resize(channels_.size());
    n->min_key.assign(channels_.size(), kDeadEnd);
    ++metrics_.nodes_created;
    ++live_nodes_;
    metrics_.peak_live_nodes = std::max(metrics_.peak_live_nodes, live_nodes_);
    space_.entry(sid).node = n;
    return n;
  }

  bool is_dead(const TreeNode* n) const {
    for (int h : n->h)
      if (h == kDeadEnd) return true;
    return false;
  }

  void evaluate_node(TreeNode* n, bool allow_boost) {
    const State& s = space_.state(n->state_id);
    n->h.resize(evaluator_kinds_.size());
    if (track_any_preferred_) n->preferred.resize(evaluator_kinds_.size());
    for (size_t e = 0; e < evaluator_kinds_.size(); ++e) {
      Evaluation ev = evaluator(static_cast<int>(e))->evaluate(s);
      n->h[e] = ev.h;
      if (track_any_preferred_ && track_preferred_[e])
        n->preferred[e] = std::move(ev.preferred);
    }
    n->evaluated = true;
    ++metrics_.evaluations;
    metrics_.sum_eval_depth += n->g;
    for (size_t e = 0; e < evaluator_kinds_.size(); ++e) {
      if (n->h[e] < best_h_seen_[e]) {
        best_h_seen_[e] = n->h[e];
        if (allow_boost) {
          ++metrics_.watch_improvements;
          scheduler_->on_improvement();
        }
      }
    }
  }

  void inherit_values(TreeNode* child, const TreeNode* parent) {
    child->h = parent->h;  // provisional until the node is expanded
  }

  uint8_t assess_novelty(TreeNode* n, const Operator* gen_op) {
    std::vector<int> tuple;
    tuple.reserve(partition_evaluators_.size());
    for (int e : partition_evaluators_) tuple.push_back(n->h[e]);
    bool same_partition = false;
    if (gen_op && n->parent && !n->parent->h.empty()) {
      same_partition = true;
      for (int e : partition_evaluators_)
        if (n->parent->h[e] != n->h[e]) same_partition = false;
    }
    const State& s = space_.state(n->state_id);
    int w;
    if (same_partition) {
      w = novelty_->assess_and_record(s, std::span<const FactId>(gen_op->add), tuple);
    } else {
      std::vector<FactId> all = s.facts();
      w = novelty_->assess_and_record(s, std::span<const FactId>(all), tuple);
    }
    if (cfg_.record_trace)
      metrics_.novelty_log.push_back({n->state_id, std::move(tuple), w});
    return static_cast<uint8_t>(w);
  }

  // Leaf payload once h values (true or provisional) are in place: own-sample
  // stats, novelty class, per-channel keys; locks dead ends.
  void finish_leaf(TreeNode* n, const Operator* gen_op) {
    if (is_dead(n)) {
      n->locked = true;
      return;
    }
    if (novelty_) n->w = assess_novelty(n, gen_op);
    for (size_t c = 0; c < channels_.size(); ++c) {
      ArmStats own;
      own.update(static_cast<double>(n->h[channels_[c].evaluator]));
      n->stats[c] = own;
      n->min_key[c] = leaf_key(n, static_cast<int>(c));
    }
  }

  int leaf_key(const TreeNode* n, int channel) const {
    const Channel& ch = channels_[channel];
    return ch.use_novelty ? static_cast<int>(n->w) : n->h[ch.evaluator];
  }

  // Lazy mode: compute the true h at expansion time. Returns false when the
  // node turns out to be a dead end (now locked).
  bool ensure_evaluated(TreeNode* n) {
    if (n->evaluated) return !n->locked;
    evaluate_node(n, true);
    if (is_dead(n)) {
      n->locked = true;
      return false;
    }
    for (size_t c = 0; c < channels_.size(); ++c) {
      ArmStats own;
      own.update(static_cast<double>(n->h[channels_[c].evaluator]));
      n->stats[c] = own;
      n->min_key[c] = leaf_key(n, static_cast<int>(c));
    }
    return true;
  }

  void insert_open(TreeNode* n, int32_t gen_op, const TreeNode* parent) {
    for (auto& src : sources_) {
      if (src.is_tree) continue;
      if (src.preferred) {
        if (!parent || gen_op < 0) continue;
        const auto& pref = parent->preferred[src.evaluator];
        if (!std::binary_search(pref.begin(), pref.end(), gen_op)) continue;
      }
      src.queue->push(n->h[src.evaluator], n);
    }
  }

  // -- duplicates, reopening, grafting --------------------------------------

  void fix_subtree(TreeNode* n) {
    for (TreeNode* c : n->children) {
      c->g = n->g + 1;
      c->depth = n->depth + 1;
      auto& ent = space_.entry(c->state_id);
      if (c->g < ent.g) {
        ent.g = c->g;
        ent.pred_state = n->state_id;
        ent.pred_op = c->gen_op;
      }
      fix_subtree(c);
    }
  }

  void handle_duplicate(TreeNode* leaf, int32_t op_id, int32_t sid) {
    ++metrics_.duplicates;
    if (!cfg_.reopen && !cfg_.graft) return;
    auto& ent = space_.entry(sid);
    int new_g = leaf->g + 1;
    if (new_g >= ent.g) return;
    ++metrics_.reopenings;
    ent.g = new_g;
    ent.pred_state = leaf->state_id;
    ent.pred_op = op_id;
    TreeNode* n = ent.node;
    if (!n || n->discarded) return;
    n->g = new_g;
    if (cfg_.graft && n->parent) {
      ++metrics_.grafts;
      TreeNode* old_parent = n->parent;
      std::erase(old_parent->children, n);
      n->parent = leaf;
      n->gen_op = op_id;
      n->depth = leaf->depth + 1;
      leaf->children.push_back(n);
      fix_subtree(n);
      if (old_parent->children.empty()) {
        // stole the last child: nothing selectable remains below, so the
        // node reverts to expanded-childless semantics (own sample, locked)
        old_parent->locked = true;
        for (size_t c = 0; c < channels_.size(); ++c) {
          ArmStats own;
          own.update(static_cast<double>(old_parent->h[channels_[c].evaluator]));
          old_parent->stats[c] = own;
          old_parent->min_key[c] = kDeadEnd;
        }
      }
      backprop_.push(old_parent);
    }
    backprop_.push(n);
  }

  // -- expansion -------------------------------------------------------------

  std::optional<int32_t> expand_node(TreeNode* leaf, BurstQueue* burst,
                                     int burst_channel) {
    leaf->expanded = true;
    ++metrics_.expansions;
    if (cfg_.record_trace) metrics_.expansion_trace.push_back(leaf->state_id);
    const State& s = space_.state(leaf->state_id);
    for (int32_t op_id = 0; op_id < task_.num_operators(); ++op_id) {
      const Operator& op = task_.operators[op_id];
      if (!task_.applicable(op, s)) continue;
      State succ = task_.apply(op, s);
      ++metrics_.generated;
      bool fresh;
      int32_t sid = space_.intern(succ, fresh);
      if (!fresh) {
        handle_duplicate(leaf, op_id, sid);
        continue;
      }
      auto& ent = space_.entry(sid);
      ent.g = leaf->g + 1;
      ent.pred_state = leaf->state_id;
      ent.pred_op = op_id;
      if (task_.is_goal(space_.state(sid))) return sid;  // early goal detection
      TreeNode* child = new_node(sid, leaf, leaf->g + 1, leaf->depth + 1);
      child->gen_op = op_id;
      leaf->children.push_back(child);
      if (cfg_.eval == EvalMode::Eager)
        evaluate_node(child, /*allow_boost=*/true);
      else
        inherit_values(child, leaf);
      finish_leaf(child, &op);
      if (!child->locked) {
        insert_open(child, op_id, leaf);
        if (burst)
          burst->push(child->h[channels_[burst_channel].evaluator], child);
      }
    }
    bool all_locked = true;
    for (TreeNode* c : leaf->children) all_locked &= c->locked;
    if (leaf->children.empty() || all_locked) leaf->locked = true;
    return std::nullopt;
  }

  // -- collapsing ------------------------------------------------------------

  void collect_leaf_states(const TreeNode* n, std::vector<int32_t>& out) const {
    if (n->children.empty()) {
      out.push_back(n->state_id);
      return;
    }
    for (const TreeNode* c : n->children) collect_leaf_states(c, out);
  }

  void fix_depths(TreeNode* n) {
    for (TreeNode* c : n->children) {
      c->depth = n->depth + 1;
      fix_depths(c);
    }
  }

  TreeNode* maybe_collapse(TreeNode* p) {
    if (cfg_.collapse == CollapseMode::Off) return p;
    if (!p->parent || p->children.empty()) return p;
    int theta = cfg_.collapse == CollapseMode::FixedTheta ? cfg_.theta : p->depth;
    TreeNode* pp = p->parent;
    if (static_cast<int>(pp->children.size() + p->children.size()) - 1 >= theta)
      return p;

    std::vector<int32_t> before;
    if (cfg_.audit_collapse) {
      collect_leaf_states(pp, before);
      std::sort(before.begin(), before.end());
    }

    std::erase(pp->children, p);
    for (TreeNode* c : p->children) {
      c->parent = pp;
      c->depth = pp->depth + 1;
      if (!c->children.empty()) fix_depths(c);
      pp->children.push_back(c);
    }
    p->children.clear();
    p->discarded = true;
    p->in_backprop = false;
    space_.entry(p->state_id).node = nullptr;
    --live_nodes_;
    ++metrics_.collapses;

    if (cfg_.audit_collapse) {
      std::vector<int32_t> after;
      collect_leaf_states(pp, after);
      std::sort(after.begin(), after.end());
      if (before != after) ++metrics_.audit_failures;
    }
    return pp;
  }

  // -- backpropagation --------------------------------------------------------

  bool recompute(TreeNode* n) {
    if (n->children.empty()) return false;  // leaf flags are set directly
    bool new_locked = true;
    for (TreeNode* c : n->children) new_locked &= c->locked;
    bool changed = new_locked != n->locked;
    n->locked = new_locked;
    for (size_t c = 0; c < channels_.size(); ++c) {
      ArmStats agg;
      if (cfg_.include_own_sample)
        agg.update(static_cast<double>(n->h[channels_[c].evaluator]));
      int new_min = kDeadEnd;
      for (TreeNode* child : n->children) {
        agg = combine(agg, child->stats[c]);
        if (!child->locked) new_min = std::min(new_min, child->min_key[c]);
      }
      const ArmStats& old = n->stats[c];
      if (agg.t != old.t || agg.mean != old.mean || agg.m2 != old.m2 ||
          new_min != n->min_key[c])
        changed = true;
      n->stats[c] = agg;
      n->min_key[c] = new_min;
    }
    return changed;
  }

  void drain_backprop() {
    while (TreeNode* n = backprop_.popmax()) {
      // childless nodes carry their own flags; always escalate those
      bool changed = n->children.empty() ? true : recompute(n);
      if (changed && n->parent) backprop_.push(n->parent);
    }
  }

  // -- selection ---------------------------------------------------------------

  TreeNode* pick_child(TreeNode* n, int channel) {
    const Channel& ch = channels_[channel];
    const bool primary_key = ch.use_novelty || cfg_.policy == TreePolicy::GreedyMin;
    TreeNode* best = nullptr;

    if (primary_key) {
      int best_key = kDeadEnd;
      for (TreeNode* c : n->children) {
        if (c->locked) continue;
        ++metrics_.nec_evals;
        if (c->min_key[channel] < best_key) best_key = c->min_key[channel];
      }
      if (cfg_.policy == TreePolicy::GreedyMin) {
        for (TreeNode* c : n->children)
          if (!c->locked && c->min_key[channel] == best_key) return c;
        return nullptr;
      }
      // dual backup: min novelty class first, bandit breaks ties
      int64_t total = 0;
      for (TreeNode* c : n->children)
        if (!c->locked) total += c->stats[channel].t;
      BanditContext ctx{std::max<int64_t>(total, 1), cfg_.ucb1_c};
      BanditPolicy pol = cfg_.policy == TreePolicy::Ucb1 ? BanditPolicy::Ucb1
                                                         : BanditPolicy::Normal2;
      double best_idx = 0;
      for (TreeNode* c : n->children) {
        if (c->locked || c->min_key[channel] != best_key) continue;
        ++metrics_.nec_evals;
        double idx = bandit_index(c->stats[channel], ctx, pol);
        if (!best || idx < best_idx) {
          best = c;
          best_idx = idx;
        }
      }
      return best;
    }

    int64_t total = 0;
    for (TreeNode* c : n->children)
      if (!c->locked) total += c->stats[channel].t;
    BanditContext ctx{std::max<int64_t>(total, 1), cfg_.ucb1_c};
    BanditPolicy pol = cfg_.policy == TreePolicy::Ucb1 ? BanditPolicy::Ucb1
                                                       : BanditPolicy::Normal2;
    double best_idx = 0;
    for (TreeNode* c : n->children) {
      if (c->locked) continue;
      ++metrics_.nec_evals;
      double idx = bandit_index(c->stats[channel], ctx, pol);
      if (!best || idx < best_idx) {
        best = c;
        best_idx = idx;
      }
    }
    return best;
  }

  TreeNode* select_leaf(int channel) {
    TreeNode* n = root_;
    while (n->expanded) {
      n = pick_child(n, channel);
      ++metrics_.descent_edges;
    }
    return n;
  }

  // -- iteration kinds ----------------------------------------------------------

  std::optional<int32_t> plain_iteration(int channel) {
    TreeNode* leaf = select_leaf(channel);
    if (!ensure_evaluated(leaf)) {
      backprop_.push(leaf);
      drain_backprop();
      return std::nullopt;
    }
    auto goal = expand_node(leaf, nullptr, channel);
    if (goal) return goal;
    backprop_.push(maybe_collapse(leaf));
    drain_backprop();
    return std::nullopt;
  }

  std::optional<int32_t> bilevel_iteration(int channel) {
    ++metrics_.bursts;
    uint64_t edges_before = metrics_.descent_edges;
    TreeNode* leaf = select_leaf(channel);
    int64_t descended = static_cast<int64_t>(metrics_.descent_edges - edges_before);
    int64_t budget = cfg_.mode == SearchMode::FixedBudget
                         ? cfg_.fixed_budget
                         : std::max<int64_t>(descended, 1);

    if (!ensure_evaluated(leaf)) {
      backprop_.push(leaf);
      drain_backprop();
      return std::nullopt;
    }

    BurstQueue q;
    q.use_heap = cfg_.queue == QueueBackend::Heap;
    q.push(leaf->h[channels_[channel].evaluator], leaf);

    std::optional<int32_t> goal;
    int pops = 0;
    while (budget > 0 && !q.empty()) {
      if (over_expansion_cap()) break;
      auto [key, n] = q.popmin();
      --budget;
      if (n->locked || n->expanded || n->discarded) continue;
      if (!ensure_evaluated(n)) {
        backprop_.push(n);
        continue;
      }
      goal = expand_node(n, &q, channel);
      if (goal) break;
      backprop_.push(maybe_collapse(n));
      if ((++pops & 0xff) == 0 && out_of_time()) break;
    }
    metrics_.scan_steps += q.bucket.counters().scan_steps;
    metrics_.heap_compares += q.heap.counters().compares;
    metrics_.queue_pushes += q.bucket.counters().pushes + q.heap.counters().pushes;
    metrics_.queue_pops += q.bucket.counters().pops + q.heap.counters().pops;
    drain_backprop();
    return goal;
  }

  TreeNode* pop_fresh(Source& src) {
    while (!src.queue->empty()) {
      auto [key, n] = src.queue->popmin();
      if (!n->expanded && !n->locked && !n->discarded) return n;
    }
    return nullptr;
  }

  // -- main loops ------------------------------------------------------------

  bool out_of_time() const {
    if (cfg_.time_limit_s <= 0) return false;
    return std::chrono::duration<double>(Clock::now() - start_).count() >
           cfg_.time_limit_s;
  }

  bool over_node_cap(uint64_t count) const {
    return cfg_.max_nodes > 0 && count >= cfg_.max_nodes;
  }

  bool over_expansion_cap() const {
    return cfg_.max_expansions > 0 && metrics_.expansions >= cfg_.max_expansions;
  }

  SearchResult run_tree() {
    bool fresh;
    int32_t sid0 = space_.intern(task_.init, fresh);
    space_.entry(sid0).g = 0;
    root_ = new_node(sid0, nullptr, 0, 0);
    evaluate_node(root_, /*allow_boost=*/false);
    finish_leaf(root_, nullptr);
    if (root_->locked) return finish(Outcome::Exhausted, Plan{});
    insert_open(root_, -1, nullptr);

    std::vector<bool> nonempty(sources_.size());
    for (;;) {
      if (over_node_cap(arena_.size()) || over_expansion_cap() || out_of_time())
        return finish(Outcome::ResourceLimit, Plan{});

      bool any = false;
      for (size_t i = 0; i < sources_.size(); ++i) {
        nonempty[i] = sources_[i].is_tree ? !root_->locked
                                          : !sources_[i].queue->empty();
        any |= static_cast<bool>(nonempty[i]);
      }
      if (!any) return finish(Outcome::Exhausted, Plan{});

      int qi = scheduler_->pick(nonempty);
      if (qi < 0) return finish(Outcome::Exhausted, Plan{});
      Source& src = sources_[qi];

      std::optional<int32_t> goal;
      if (src.is_tree) {
        scheduler_->popped();
        goal = cfg_.mode == SearchMode::Plain ? plain_iteration(src.channel)
                                              : bilevel_iteration(src.channel);
      } else {
        TreeNode* n = pop_fresh(src);
        if (!n) continue;
        scheduler_->popped();
        if (!ensure_evaluated(n)) {
          backprop_.push(n);
          drain_backprop();
          continue;
        }
        goal = expand_node(n, nullptr, 0);
        if (!goal) {
          backprop_.push(maybe_collapse(n));
          drain_backprop();
        }
      }
      if (goal) return finish(Outcome::Solved, space_.extract_plan(*goal));
    }
  }

  SearchResult run_queue_gbfs() {
    BucketQueue<int32_t> qb;
    HeapQueue<int32_t> qh;
    const bool heap = cfg_.queue == QueueBackend::Heap;
    auto push = [&](int key, int32_t sid) {
      heap ? qh.push(key, sid) : qb.push(key, sid);
    };
    auto pop = [&]() { return heap ? qh.popmin() : qb.popmin(); };
    auto empty = [&]() { return heap ? qh.empty() : qb.empty(); };
    auto done = [&](Outcome outcome, Plan plan) {
      metrics_.scan_steps += qb.counters().scan_steps;
      metrics_.heap_compares += qh.counters().compares;
      metrics_.queue_pushes += qb.counters().pushes + qh.counters().pushes;
      metrics_.queue_pops += qb.counters().pops + qh.counters().pops;
      return finish(outcome, std::move(plan));
    };

    Heuristic* eval = evaluator(channels_[0].evaluator);
    std::vector<char> evaluated;
    auto grow = [&](int32_t sid) {
      if (evaluated.size() <= static_cast<size_t>(sid)) evaluated.resize(sid + 1, 0);
    };

    bool fresh;
    int32_t sid0 = space_.intern(task_.init, fresh);
    auto& e0 = space_.entry(sid0);
    e0.g = 0;
    e0.h = eval->evaluate(task_.init).h;
    ++metrics_.evaluations;
    grow(sid0);
    evaluated[sid0] = 1;
    if (e0.h == kDeadEnd) return done(Outcome::Exhausted, Plan{});
    push(e0.h, sid0);

    while (!empty()) {
      if (over_node_cap(metrics_.expansions) || over_expansion_cap() ||
          out_of_time())
        return done(Outcome::ResourceLimit, Plan{});
      auto [key, sid] = pop();
      auto& ent = space_.entry(sid);
      if (ent.expanded) continue;  // stale entry
      grow(sid);
      if (!evaluated[sid]) {  // lazy: true h on pop
        ent.h = eval->evaluate(space_.state(sid)).h;
        ++metrics_.evaluations;
        metrics_.sum_eval_depth += ent.g;
        evaluated[sid] = 1;
        if (ent.h == kDeadEnd) {
          ent.expanded = true;  // close it, never expand
          continue;
        }
      }
      ent.expanded = true;
      ++metrics_.expansions;
      if (cfg_.record_trace) metrics_.expansion_trace.push_back(sid);
      const State& s = space_.state(sid);
      const int parent_h = ent.h;
      const int parent_g = ent.g;
      for (int32_t op_id = 0; op_id < task_.num_operators(); ++op_id) {
        const Operator& op = task_.operators[op_id];
        if (!task_.applicable(op, s)) continue;
        State succ = task_.apply(op, s);
        ++metrics_.generated;
        bool is_fresh;
        int32_t nsid = space_.intern(succ, is_fresh);
        auto& nent = space_.entry(nsid);
        if (!is_fresh) {
          ++metrics_.duplicates;
          if ((cfg_.reopen || cfg_.graft) && parent_g + 1 < nent.g) {
            ++metrics_.reopenings;
            nent.g = parent_g + 1;
            nent.pred_state = sid;
            nent.pred_op = op_id;
            if (nent.expanded) {
              nent.expanded = false;
              push(nent.h, nsid);
            }
          }
          continue;
        }
        nent.g = parent_g + 1;
        nent.pred_state = sid;
        nent.pred_op = op_id;
        grow(nsid);
        if (task_.is_goal(space_.state(nsid)))
          return done(Outcome::Solved, space_.extract_plan(nsid));
        if (cfg_.eval == EvalMode::Eager) {
          nent.h = eval->evaluate(space_.state(nsid)).h;
          ++metrics_.evaluations;
          metrics_.sum_eval_depth += nent.g;
          evaluated[nsid] = 1;
          if (nent.h == kDeadEnd) continue;  // never enqueued
        } else {
          nent.h = parent_h;  // provisional key
        }
        push(nent.h, nsid);
      }
    }
    return done(Outcome::Exhausted, Plan{});
  }

  SearchResult finish(Outcome outcome, Plan plan) {
    metrics_.wall_time_s =
        std::chrono::duration<double>(Clock::now() - start_).count();
    for (auto& src : sources_) {
      if (src.is_tree || !src.queue) continue;
      metrics_.scan_steps += src.queue->counters().scan_steps;
      metrics_.queue_pushes += src.queue->counters().pushes;
      metrics_.queue_pops += src.queue->counters().pops;
    }
    if (novelty_) {
      metrics_.novelty_partitions = novelty_->partition_count();
      metrics_.novelty_disabled = novelty_->disabled_partitions();
    }
    metrics_.boosted_pops = scheduler_->boosted_pops();
    return SearchResult{outcome, std::move(plan), std::move(metrics_)};
  }

  const Task& task_;
  SearchConfig cfg_;
  StateSpace space_;
  NodeArena arena_;
  BackpropQueue backprop_;
  Metrics metrics_;
  TreeNode* root_ = nullptr;
  std::vector<std::unique_ptr<Heuristic>> owned_evaluators_;
  std::vector<HeuristicKind> evaluator_kinds_;
  std::vector<Channel> channels_;
  std::vector<Source> sources_;
  std::vector<int> partition_evaluators_;
  std::optional<NoveltyStore> novelty_;
  std::optional<AlternationScheduler> scheduler_;
  std::vector<int> best_h_seen_;
  std::vector<bool> track_preferred_;
  bool track_any_preferred_ = false;
  uint64_t live_nodes_ = 0;
  Clock::time_point start_;
};

inline SearchResult run_search(const Task& task, const SearchConfig& cfg) {
  SearchEngine engine(task, cfg);
  return engine.run();
}

}  // namespace nebula
