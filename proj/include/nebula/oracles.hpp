#pragma once

// Small, deliberately naive reference implementations used only by the test
// suite to cross-check the engine: breadth-first search for optimal lengths,
// a linear-scan greedy best-first search, and an exhaustive tuple-novelty
// assessor. Kept simple enough to inspect by eye.

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <unordered_map>
#include <vector>

#include "nebula/heuristics.hpp"
#include "nebula/task.hpp"

namespace nebula::oracle {

struct BfsResult {
  bool solved = false;
  int optimal_length = -1;
  Plan plan;
  uint64_t expanded = 0;
};

inline BfsResult bfs(const Task& task, uint64_t max_states = 10'000'000) {
  BfsResult res;
  if (task.is_goal(task.init)) {
    res.solved = true;
    res.optimal_length = 0;
    return res;
  }
  struct Info {
    int64_t pred = -1;
    int32_t op = -1;
  };
  std::vector<State> states{task.init};
  std::vector<Info> info{{}};
  std::unordered_map<State, int64_t> seen{{task.init, 0}};
  std::deque<int64_t> frontier{0};
  while (!frontier.empty()) {
    int64_t cur = frontier.front();
    frontier.pop_front();
    ++res.expanded;
    State s = states[cur];
    for (int32_t op_id = 0; op_id < task.num_operators(); ++op_id) {
      const Operator& op = task.operators[op_id];
      if (!task.applicable(op, s)) continue;
      State succ = task.apply(op, s);
      if (seen.count(succ)) continue;
      int64_t id = static_cast<int64_t>(states.size());
      seen.emplace(succ, id);
      states.push_back(succ);
      info.push_back({cur, op_id});
      if (task.is_goal(succ)) {
        std::vector<int32_t> steps;
        for (int64_t at = id; info[at].op >= 0; at = info[at].pred)
          steps.push_back(info[at].op);
        std::reverse(steps.begin(), steps.end());
        res.solved = true;
        res.plan.steps = std::move(steps);
        res.optimal_length = static_cast<int>(res.plan.steps.size());
        return res;
      }
      frontier.push_back(id);
      if (states.size() >= max_states) return res;
    }
  }
  return res;
}

struct GbfsResult {
  bool solved = false;
  Plan plan;
  std::vector<State> expansion_order;
  uint64_t evaluations = 0;
};

// Greedy best-first search with an unsorted open list scanned linearly for
// the entry with minimal (h, insertion-seq). Duplicate states are skipped;
// goals are detected as soon as they are generated.
inline GbfsResult gbfs_reference(const Task& task, Heuristic& heuristic,
                                 uint64_t max_expansions = 1'000'000) {
  GbfsResult res;
  if (task.is_goal(task.init)) {
    res.solved = true;
    return res;
  }
  struct OpenEntry {
    State s;
    int h;
    uint64_t seq;
    int64_t id;
  };
  struct Info {
    int64_t pred = -1;
    int32_t op = -1;
  };
  std::vector<Info> info{{}};
  std::unordered_map<State, char> seen{{task.init, 1}};
  std::vector<OpenEntry> open;
  uint64_t seq = 0;

  int h0 = heuristic.evaluate(task.init).h;
  ++res.evaluations;
  if (h0 == kDeadEnd) return res;
  open.push_back({task.init, h0, seq++, 0});
  std::vector<State> state_of_id{task.init};

  while (!open.empty() && res.expansion_order.size() < max_expansions) {
    size_t best = 0;
    for (size_t i = 1; i < open.size(); ++i) {
      if (open[i].h < open[best].h ||
          (open[i].h == open[best].h && open[i].seq < open[best].seq))
        best = i;
    }
    OpenEntry cur = open[best];
    open.erase(open.begin() + static_cast<std::ptrdiff_t>(best));
    res.expansion_order.push_back(cur.s);
    for (int32_t op_id = 0; op_id < task.num_operators(); ++op_id) {
      const Operator& op = task.operators[op_id];
      if (!task.applicable(op, cur.s)) continue;
      State succ = task.apply(op, cur.s);
      if (seen.count(succ)) continue;
      seen.emplace(succ, 1);
      int64_t id = static_cast<int64_t>(state_of_id.size());
      state_of_id.push_back(succ);
      info.push_back({cur.id, op_id});
      if (task.is_goal(succ)) {
        std::vector<int32_t> steps;
        for (int64_t at = id; info[at].op >= 0; at = info[at].pred)
          steps.push_back(info[at].op);
        std::reverse(steps.begin(), steps.end());
        res.solved = true;
        res.plan.steps = std::move(steps);
        return res;
      }
      int h = heuristic.evaluate(succ).h;
      ++res.evaluations;
      if (h == kDeadEnd) continue;
      open.push_back({succ, h, seq++, id});
    }
  }
  return res;
}

// Exhaustive novelty assessor: keeps the full history of (state, tuple)
// pairs per partition and recomputes tuple novelty from scratch each call.
class NoveltyBruteforce {
 public:
  explicit NoveltyBruteforce(int num_facts) : num_facts_(num_facts) {}

  int assess_and_record(const State& s, const std::vector<int>& h_tuple) {
    auto& history = partitions_[h_tuple];
    std::vector<FactId> facts = s.facts();

    bool novel1 = false;
    for (FactId f : facts) {
      bool seen = false;
      for (const State& past : history) seen |= past.test(f);
      if (!seen) novel1 = true;
    }
    bool novel2 = false;
    for (size_t a = 0; a < facts.size(); ++a) {
      for (size_t b = a + 1; b < facts.size(); ++b) {
        bool seen = false;
        for (const State& past : history)
          seen |= past.test(facts[a]) && past.test(facts[b]);
        if (!seen) novel2 = true;
      }
    }
    history.push_back(s);
    if (novel1) return 1;
    if (novel2) return 2;
    return 3;
  }

 private:
  struct TupleHash {
    size_t operator()(const std::vector<int>& v) const {
      size_t h = 1469598103934665603ull;
      for (int x : v) {
        h ^= static_cast<size_t>(x) + 0x9e3779b97f4a7c15ull;
        h *= 1099511628211ull;
      }
      return h;
    }
  };
  int num_facts_;
  std::unordered_map<std::vector<int>, std::vector<State>, TupleHash> partitions_;
};

}  // namespace nebula::oracle
