#pragma once

// Delete-relaxation heuristics over the unit-cost task model: goal count,
// h_max, h_add, and h_ff with preferred operators (applicable relaxed-plan
// actions). All evaluators are goal-aware (h = 0 iff the goal holds) and
// return kDeadEnd when the goal is relaxed-unreachable.

#include <algorithm>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "nebula/task.hpp"

namespace nebula {

constexpr int kDeadEnd = std::numeric_limits<int>::max();

struct Evaluation {
  int h = 0;
  std::vector<int32_t> preferred;  // operator ids, ascending
};

class Heuristic {
 public:
  virtual ~Heuristic() = default;
  virtual Evaluation evaluate(const State& s) = 0;
  virtual const char* name() const = 0;
};

enum class HeuristicKind { GoalCount, HMax, HAdd, Ff, StateHash };

inline const char* heuristic_name(HeuristicKind k) {
  switch (k) {
    case HeuristicKind::GoalCount: return "goalcount";
    case HeuristicKind::HMax: return "hmax";
    case HeuristicKind::HAdd: return "hadd";
    case HeuristicKind::Ff: return "hff";
    case HeuristicKind::StateHash: return "statehash";
  }
  return "?";
}

class GoalCountHeuristic : public Heuristic {
 public:
  explicit GoalCountHeuristic(const Task& task) : task_(task) {}
  Evaluation evaluate(const State& s) override {
    int unmet = 0;
    for (FactId f : task_.goal)
      if (!s.test(f)) ++unmet;
    return Evaluation{unmet, {}};
  }
  const char* name() const override { return "goalcount"; }

 private:
  const Task& task_;
};

namespace detail {

// Shared Dijkstra-style fixpoint over the relaxed task. Computes per-fact
// costs under max (h_max) or sum (h_add) aggregation; h_ff backchains best
// supporters over the h_add costs.
class RelaxedExploration {
 public:
  explicit RelaxedExploration(const Task& task) : task_(task) {
    const int nf = task.num_facts();
    precond_of_.resize(nf);
    for (int32_t o = 0; o < task.num_operators(); ++o)
      for (FactId f : task.operators[o].pre) precond_of_[f].push_back(o);
    fact_cost_.resize(nf);
    unsatisfied_.resize(task.num_operators());
    pre_cost_.resize(task.num_operators());
    supporter_.resize(nf);
  }

  // Runs the fixpoint from s; afterwards fact_cost/op_total are valid.
  void run(const State& s, bool use_max) {
    const int nf = task_.num_facts();
    std::fill(fact_cost_.begin(), fact_cost_.end(), kDeadEnd);
    heap_.clear();
    for (int32_t o = 0; o < task_.num_operators(); ++o) {
      unsatisfied_[o] = static_cast<int>(task_.operators[o].pre.size());
      pre_cost_[o] = 0;
    }
    for (FactId f = 0; f < nf; ++f)
      if (s.test(f)) {
        fact_cost_[f] = 0;
        heap_.push_back({0, f});
      }
    std::make_heap(heap_.begin(), heap_.end(), Greater{});
    for (int32_t o = 0; o < task_.num_operators(); ++o)
      if (unsatisfied_[o] == 0) relax(o);

    while (!heap_.empty()) {
      std::pop_heap(heap_.begin(), heap_.end(), Greater{});
      auto [cost, fact] = heap_.back();
      heap_.pop_back();
      if (cost > fact_cost_[fact]) continue;  // stale entry
      for (int32_t o : precond_of_[fact]) {
        pre_cost_[o] = use_max ? std::max(pre_cost_[o], cost) : pre_cost_[o] + cost;
        if (--unsatisfied_[o] == 0) relax(o);
      }
    }
  }

  int goal_cost_max() const {
    int best = 0;
    for (FactId f : task_.goal) {
      if (fact_cost_[f] == kDeadEnd) return kDeadEnd;
      best = std::max(best, fact_cost_[f]);
    }
    return best;
  }

  int goal_cost_sum() const {
    long long sum = 0;
    for (FactId f : task_.goal) {
      if (fact_cost_[f] == kDeadEnd) return kDeadEnd;
      sum += fact_cost_[f];
    }
    return static_cast<int>(sum);
  }

  // Best supporter per fact: the achiever with minimal h_add total, ties to
  // the lowest operator id. Requires a preceding run(s, false).
  void compute_supporters() {
    std::fill(supporter_.begin(), supporter_.end(), -1);
    for (int32_t o = 0; o < task_.num_operators(); ++o) {
      if (unsatisfied_[o] != 0) continue;  // relaxed-unreachable
      int total = pre_cost_[o] >= kDeadEnd - 1 ? kDeadEnd : pre_cost_[o] + 1;
      for (FactId f : task_.operators[o].add)
        if (total == fact_cost_[f] && supporter_[f] == -1) supporter_[f] = o;
    }
  }

  // Marks the relaxed plan for the goal; returns kDeadEnd if unreachable.
  // marked_ops holds the plan's operator ids ascending afterwards.
  int extract_plan(const State& s, std::vector<int32_t>& marked_ops) {
    marked_ops.clear();
    for (FactId f : task_.goal)
      if (fact_cost_[f] == kDeadEnd) return kDeadEnd;
    op_marked_.assign(task_.num_operators(), false);
    fact_done_.assign(task_.num_facts(), false);
    stack_.clear();
    for (FactId f : task_.goal)
      if (!s.test(f)) stack_.push_back(f);
    while (!stack_.empty()) {
      FactId f = stack_.back();
      stack_.pop_back();
      if (fact_done_[f]) continue;
      fact_done_[f] = true;
      int32_t o = supporter_[f];
      if (o < 0 || op_marked_[o]) continue;
      op_marked_[o] = true;
      for (FactId p : task_.operators[o].pre)
        if (!s.test(p) && !fact_done_[p]) stack_.push_back(p);
    }
    for (int32_t o = 0; o < task_.num_operators(); ++o)
      if (op_marked_[o]) marked_ops.push_back(o);
    return static_cast<int>(marked_ops.size());
  }

 private:
  struct Entry {
    int cost;
    FactId fact;
  };
  struct Greater {
    bool operator()(const Entry& a, const Entry& b) const {
      return a.cost > b.cost || (a.cost == b.cost && a.fact > b.fact);
    }
  };

  void relax(int32_t o) {
    int total = pre_cost_[o] >= kDeadEnd - 1 ? kDeadEnd : pre_cost_[o] + 1;
    for (FactId f : task_.operators[o].add) {
      if (total < fact_cost_[f]) {
        fact_cost_[f] = total;
        heap_.push_back({total, f});
        std::push_heap(heap_.begin(), heap_.end(), Greater{});
      }
    }
  }

  const Task& task_;
  std::vector<std::vector<int32_t>> precond_of_;
  std::vector<int> fact_cost_;
  std::vector<int> unsatisfied_;
  std::vector<int> pre_cost_;
  std::vector<int32_t> supporter_;
  std::vector<Entry> heap_;
  std::vector<bool> op_marked_;
  std::vector<bool> fact_done_;
  std::vector<FactId> stack_;
};

}  // namespace detail

class HMaxHeuristic : public Heuristic {
 public:
  explicit HMaxHeuristic(const Task& task) : task_(task), core_(task) {}
  Evaluation evaluate(const State& s) override {
    core_.run(s, /*use_max=*/true);
    return Evaluation{core_.goal_cost_max(), {}};
  }
  const char* name() const override { return "hmax"; }

 private:
  const Task& task_;
  detail::RelaxedExploration core_;
};

class HAddHeuristic : public Heuristic {
 public:
  explicit HAddHeuristic(const Task& task) : task_(task), core_(task) {}
  Evaluation evaluate(const State& s) override {
    core_.run(s, /*use_max=*/false);
    return Evaluation{core_.goal_cost_sum(), {}};
  }
  const char* name() const override { return "hadd"; }

 private:
  const Task& task_;
  detail::RelaxedExploration core_;
};

class FfHeuristic : public Heuristic {
 public:
  explicit FfHeuristic(const Task& task) : task_(task), core_(task) {}
  Evaluation evaluate(const State& s) override {
    core_.run(s, /*use_max=*/false);
    core_.compute_supporters();
    int h = core_.extract_plan(s, plan_ops_);
    Evaluation eval;
    eval.h = h;
    if (h != kDeadEnd) {
      for (int32_t o : plan_ops_)
        if (task_.applicable(task_.operators[o], s)) eval.preferred.push_back(o);
    }
    return eval;
  }
  const char* name() const override { return "hff"; }

 private:
  const Task& task_;
  detail::RelaxedExploration core_;
  std::vector<int32_t> plan_ops_;
};

// Deterministic pseudo-random values in [0, range); keeps synthetic-tree
// descents from degenerating while staying in a dense bucket-key range.
class StateHashHeuristic : public Heuristic {
 public:
  explicit StateHashHeuristic(int range = 8) : range_(range) {}
  Evaluation evaluate(const State& s) override {
    uint64_t z = s.hash() + 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    z ^= z >> 31;
    return Evaluation{static_cast<int>(z % static_cast<uint64_t>(range_)), {}};
  }
  const char* name() const override { return "statehash"; }

 private:
  int range_;
};

// Test helper: looks up h by the lowest set fact (single-fact state spaces).
class TableHeuristic : public Heuristic {
 public:
  explicit TableHeuristic(std::vector<int> by_fact) : by_fact_(std::move(by_fact)) {}
  Evaluation evaluate(const State& s) override {
    for (FactId f = 0; f < s.num_facts(); ++f)
      if (s.test(f)) return Evaluation{by_fact_[f], {}};
    return Evaluation{0, {}};
  }
  const char* name() const override { return "table"; }

 private:
  std::vector<int> by_fact_;
};

inline std::unique_ptr<Heuristic> make_heuristic(const Task& task,
                                                 HeuristicKind kind) {
  switch (kind) {
    case HeuristicKind::GoalCount: return std::make_unique<GoalCountHeuristic>(task);
    case HeuristicKind::HMax: return std::make_unique<HMaxHeuristic>(task);
    case HeuristicKind::HAdd: return std::make_unique<HAddHeuristic>(task);
    case HeuristicKind::Ff: return std::make_unique<FfHeuristic>(task);
    case HeuristicKind::StateHash: return std::make_unique<StateHashHeuristic>();
  }
  throw std::invalid_argument("unknown heuristic kind");
}

}  // namespace nebula
