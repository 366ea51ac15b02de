#pragma once

// Search-tree node storage, the state registry with closed/predecessor
// bookkeeping, and the g-ordered backpropagation queue.

#include <cstdint>
#include <deque>
#include <queue>
#include <tuple>
#include <unordered_map>
#include <vector>

#include "nebula/bandit.hpp"
#include "nebula/task.hpp"

namespace nebula {

struct TreeNode {
  uint32_t id = 0;        // creation order
  int32_t state_id = -1;
  int32_t gen_op = -1;    // operator that produced this node from its parent
  int g = 0;              // path cost from the initial state
  int depth = 0;          // tree depth; collapsing shrinks it, depth <= g
  uint8_t w = 0;          // novelty class, 0 = unassessed
  bool locked = false;
  bool expanded = false;
  bool in_backprop = false;
  bool discarded = false;  // removed by a collapse
  bool evaluated = false;  // true h computed (lazy mode may defer it)
  TreeNode* parent = nullptr;
  std::vector<TreeNode*> children;
  std::vector<int> h;                        // per evaluator
  std::vector<std::vector<int32_t>> preferred;  // per evaluator, if tracked
  std::vector<ArmStats> stats;               // per channel
  std::vector<int> min_key;                  // per channel Bellman backup
};

class NodeArena {
 public:
  TreeNode* make() {
    nodes_.emplace_back();
    nodes_.back().id = static_cast<uint32_t>(nodes_.size() - 1);
    return &nodes_.back();
  }
  size_t size() const { return nodes_.size(); }

 private:
  std::deque<TreeNode> nodes_;  // stable addresses
};

// Interned states with best-known g, owning tree node, and the predecessor
// link used for plan extraction. The predecessor table survives collapsing
// (which only rewrites the tree structure).
class StateSpace {
 public:
  explicit StateSpace(const Task& task) : task_(task) {}

  // Returns the state id; fresh is set when the state was not known.
  int32_t intern(const State& s, bool& fresh) {
    auto [it, inserted] = ids_.try_emplace(s, static_cast<int32_t>(states_.size()));
    fresh = inserted;
    if (inserted) {
      states_.push_back(&it->first);
      entries_.push_back(Entry{});
    }
    return it->second;
  }

  struct Entry {
    int g = -1;
    int h = -1;               // queue-mode cache (re-push key)
    bool expanded = false;    // queue-mode closed flag
    TreeNode* node = nullptr;
    int32_t pred_state = -1;
    int32_t pred_op = -1;
  };

  const State& state(int32_t id) const { return *states_[id]; }
  Entry& entry(int32_t id) { return entries_[id]; }
  size_t size() const { return states_.size(); }

  Plan extract_plan(int32_t goal_state) const {
    Plan plan;
    int32_t cur = goal_state;
    while (entries_[cur].pred_state != -1) {
      plan.steps.push_back(entries_[cur].pred_op);
      cur = entries_[cur].pred_state;
    }
    std::reverse(plan.steps.begin(), plan.steps.end());
    return plan;
  }

 private:
  const Task& task_;
  std::unordered_map<State, int32_t> ids_;
  std::vector<const State*> states_;  // stable: unordered_map nodes don't move
  std::vector<Entry> entries_;
};

// Set of nodes awaiting stat recomputation, popped in order of decreasing g
// (ties: newer node first). Membership is tracked on the node so re-inserts
// are no-ops; stale heap entries for discarded nodes are skipped on pop.
class BackpropQueue {
 public:
  void push(TreeNode* n) {
    if (n->in_backprop) return;
    n->in_backprop = true;
    heap_.emplace(n->g, n->id, n);
  }

  TreeNode* popmax() {
    while (!heap_.empty()) {
      TreeNode* n = std::get<2>(heap_.top());
      heap_.pop();
      if (n->discarded || !n->in_backprop) continue;
      n->in_backprop = false;
      return n;
    }
    return nullptr;
  }

  bool empty() const { return heap_.empty(); }

 private:
  std::priority_queue<std::tuple<int, uint32_t, TreeNode*>> heap_;
};

}  // namespace nebula
