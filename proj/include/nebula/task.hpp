#pragma once

// Unit-cost STRIPS task model: dense fact ids, bitset states, grounded
// operators with precondition/add/delete sets.

#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nebula {

using FactId = int32_t;

class State {
 public:
  State() = default;
  explicit State(int num_facts)
      : nbits_(num_facts), blocks_((num_facts + 63) / 64, 0) {}

  int num_facts() const { return nbits_; }

  bool test(FactId f) const {
    return (blocks_[f >> 6] >> (f & 63)) & 1;
  }
  void set(FactId f) { blocks_[f >> 6] |= uint64_t(1) << (f & 63); }
  void reset(FactId f) { blocks_[f >> 6] &= ~(uint64_t(1) << (f & 63)); }

  int count() const {
    int n = 0;
    for (uint64_t b : blocks_) n += __builtin_popcountll(b);
    return n;
  }

  const std::vector<uint64_t>& blocks() const { return blocks_; }
  std::vector<uint64_t>& blocks() { return blocks_; }

  bool contains_all(const std::vector<uint64_t>& mask) const {
    for (size_t i = 0; i < mask.size(); ++i)
      if ((blocks_[i] & mask[i]) != mask[i]) return false;
    return true;
  }

  std::vector<FactId> facts() const {
    std::vector<FactId> out;
    for (FactId f = 0; f < nbits_; ++f)
      if (test(f)) out.push_back(f);
    return out;
  }

  bool operator==(const State& o) const {
    return nbits_ == o.nbits_ && blocks_ == o.blocks_;
  }

  uint64_t hash() const {
    uint64_t h = 0x9e3779b97f4a7c15ull;
    for (uint64_t b : blocks_) {
      h ^= b + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
    }
    return h;
  }

 private:
  int nbits_ = 0;
  std::vector<uint64_t> blocks_;
};

struct Operator {
  std::string name;
  std::vector<FactId> pre, add, del;  // sorted, duplicate-free
  // Bit masks over the fact set, filled in by Task::finalize().
  std::vector<uint64_t> pre_mask, add_mask, del_mask;
};

struct Plan {
  std::vector<int32_t> steps;  // operator indices
  size_t length() const { return steps.size(); }
};

struct Task {
  std::vector<std::string> fact_names;
  std::vector<Operator> operators;
  State init;
  std::vector<FactId> goal;  // sorted, duplicate-free
  std::vector<uint64_t> goal_mask;

  int num_facts() const { return static_cast<int>(fact_names.size()); }
  int num_operators() const { return static_cast<int>(operators.size()); }

  // Validates ids and the add/del disjointness invariant, builds bit masks.
  void finalize();

  bool applicable(const Operator& op, const State& s) const {
    return s.contains_all(op.pre_mask);
  }

  State apply(const Operator& op, const State& s) const {
    State succ = s;
    auto& blocks = succ.blocks();
    for (size_t i = 0; i < blocks.size(); ++i)
      blocks[i] = (blocks[i] & ~op.del_mask[i]) | op.add_mask[i];
    return succ;
  }

  bool is_goal(const State& s) const { return s.contains_all(goal_mask); }
};

inline std::vector<uint64_t> make_mask(const std::vector<FactId>& facts,
                                       int num_facts) {
  std::vector<uint64_t> mask((num_facts + 63) / 64, 0);
  for (FactId f : facts) mask[f >> 6] |= uint64_t(1) << (f & 63);
  return mask;
}

inline void Task::finalize() {
  const int nf = num_facts();
  if (nf == 0) throw std::invalid_argument("task has no facts");
  auto check_ids = [nf](const std::vector<FactId>& v, const char* what) {
    for (FactId f : v)
      if (f < 0 || f >= nf)
        throw std::invalid_argument(std::string("fact id out of range in ") +
                                    what);
  };
  for (auto& op : operators) {
    check_ids(op.pre, "pre");
    check_ids(op.add, "add");
    check_ids(op.del, "del");
    size_t ai = 0;
    for (FactId d : op.del) {
      while (ai < op.add.size() && op.add[ai] < d) ++ai;
      if (ai < op.add.size() && op.add[ai] == d)
        throw std::invalid_argument("operator '" + op.name +
                                    "' adds and deletes the same fact");
    }
    op.pre_mask = make_mask(op.pre, nf);
    op.add_mask = make_mask(op.add, nf);
    op.del_mask = make_mask(op.del, nf);
  }
  check_ids(goal, "goal");
  goal_mask = make_mask(goal, nf);
  if (init.num_facts() != nf)
    throw std::invalid_argument("init state has wrong fact count");
}

// Applicable (operator id, successor state) pairs in declaration order.
inline std::vector<std::pair<int32_t, State>> successors(const Task& task,
                                                         const State& s) {
  std::vector<std::pair<int32_t, State>> out;
  for (int32_t i = 0; i < task.num_operators(); ++i) {
    const Operator& op = task.operators[i];
    if (task.applicable(op, s)) out.emplace_back(i, task.apply(op, s));
  }
  return out;
}

inline bool validate_plan(const Task& task, const Plan& plan) {
  State s = task.init;
  for (int32_t step : plan.steps) {
    if (step < 0 || step >= task.num_operators()) return false;
    const Operator& op = task.operators[step];
    if (!task.applicable(op, s)) return false;
    s = task.apply(op, s);
  }
  return task.is_goal(s);
}

}  // namespace nebula

template <>
struct std::hash<nebula::State> {
  size_t operator()(const nebula::State& s) const noexcept {
    return static_cast<size_t>(s.hash());
  }
};
