#pragma once

// Built-in task generators: Tower of Hanoi, grid navigation, random STRIPS,
// and the synthetic tree spaces used by the selection-cost probes.

#include <algorithm>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "nebula/task.hpp"

namespace nebula {

// k disks on 3 pegs, all on p1 initially, goal: every disk in p3's stack.
// Facts: on(d,base), at(d,peg) (peg membership), clear(x). The at() facts of
// the moved disk are rewritten by deleting at(d,p) for every peg p other than
// the target (deleting a false fact is a no-op), so operators need not be
// grounded over the source peg.
inline Task gen_hanoi(int k) {
  if (k < 1 || k > 12) throw std::invalid_argument("gen_hanoi: k must be in [1,12]");
  const int kPegs = 3;
  Task task;

  auto disk = [](int i) { return "d" + std::to_string(i); };
  auto peg = [](int p) { return "p" + std::to_string(p); };

  std::vector<std::vector<FactId>> on(k + 1);   // on[i][base index]
  std::vector<std::vector<FactId>> at(k + 1);   // at[i][peg]
  std::vector<FactId> clear_disk(k + 1), clear_peg(kPegs + 1);

  auto add_fact = [&](const std::string& name) {
    task.fact_names.push_back(name);
    return static_cast<FactId>(task.fact_names.size() - 1);
  };

  // bases(i) = pegs then strictly larger disks, in that order
  auto bases = [&](int i) {
    std::vector<int> b;           // 1..3 encode pegs, 4.. encode disk j = b-3
    for (int p = 1; p <= kPegs; ++p) b.push_back(p);
    for (int j = i + 1; j <= k; ++j) b.push_back(kPegs + j);
    return b;
  };
  auto base_name = [&](int b) { return b <= kPegs ? peg(b) : disk(b - kPegs); };

  for (int i = 1; i <= k; ++i) {
    for (int b : bases(i)) on[i].push_back(add_fact("on(" + disk(i) + "," + base_name(b) + ")"));
    at[i].resize(kPegs + 1);
    for (int p = 1; p <= kPegs; ++p) at[i][p] = add_fact("at(" + disk(i) + "," + peg(p) + ")");
  }
  for (int i = 1; i <= k; ++i) clear_disk[i] = add_fact("clear(" + disk(i) + ")");
  for (int p = 1; p <= kPegs; ++p) clear_peg[p] = add_fact("clear(" + peg(p) + ")");

  auto on_fact = [&](int i, int b) {
    const auto bs = bases(i);
    auto it = std::find(bs.begin(), bs.end(), b);
    return on[i][it - bs.begin()];
  };
  auto clear_fact = [&](int b) { return b <= kPegs ? clear_peg[b] : clear_disk[b - kPegs]; };

  for (int i = 1; i <= k; ++i) {
    for (int fb : bases(i)) {
      for (int tb : bases(i)) {
        if (fb == tb) continue;
        if (tb <= kPegs) {  // target is a peg
          Operator op;
          op.name = "move(" + disk(i) + "," + base_name(fb) + "," + base_name(tb) + ")";
          op.pre = {on_fact(i, fb), clear_disk[i], clear_fact(tb)};
          op.add = {on_fact(i, tb), at[i][tb], clear_fact(fb)};
          op.del = {on_fact(i, fb), clear_fact(tb)};
          for (int p = 1; p <= kPegs; ++p)
            if (p != tb) op.del.push_back(at[i][p]);
          task.operators.push_back(std::move(op));
        } else {  // target is a larger disk, ground over its peg
          const int j = tb - kPegs;
          for (int tp = 1; tp <= kPegs; ++tp) {
            Operator op;
            op.name = "move(" + disk(i) + "," + base_name(fb) + "," + disk(j) + "," + peg(tp) + ")";
            op.pre = {on_fact(i, fb), clear_disk[i], clear_disk[j], at[j][tp]};
            op.add = {on_fact(i, tb), at[i][tp], clear_fact(fb)};
            op.del = {on_fact(i, fb), clear_disk[j]};
            for (int p = 1; p <= kPegs; ++p)
              if (p != tp) op.del.push_back(at[i][p]);
            task.operators.push_back(std::move(op));
          }
        }
      }
    }
  }

  for (auto& op : task.operators) {
    std::sort(op.pre.begin(), op.pre.end());
    std::sort(op.add.begin(), op.add.end());
    std::sort(op.del.begin(), op.del.end());
  }

  task.init = State(task.num_facts());
  task.init.set(on_fact(k, 1));  // largest disk on p1
  for (int i = 1; i < k; ++i) task.init.set(on_fact(i, kPegs + i + 1));
  for (int i = 1; i <= k; ++i) task.init.set(at[i][1]);
  task.init.set(clear_disk[1]);
  task.init.set(clear_peg[2]);
  task.init.set(clear_peg[3]);

  for (int i = 1; i <= k; ++i) task.goal.push_back(at[i][3]);
  std::sort(task.goal.begin(), task.goal.end());

  task.finalize();
  return task;
}

// width x height 4-connected grid, start (0,0), goal (w-1,h-1).
// obstacle_seed 0 = free grid; otherwise each non-corner cell is blocked with
// probability 0.2 (solvability not guaranteed).
inline Task gen_grid(int width, int height, uint64_t obstacle_seed) {
  if (width < 1 || height < 1)
    throw std::invalid_argument("gen_grid: dimensions must be positive");
  Task task;
  auto cell_name = [](int x, int y) {
    return "at(" + std::to_string(x) + "," + std::to_string(y) + ")";
  };
  std::vector<std::vector<bool>> blocked(width, std::vector<bool>(height, false));
  if (obstacle_seed != 0) {
    std::mt19937_64 rng(obstacle_seed);
    for (int x = 0; x < width; ++x)
      for (int y = 0; y < height; ++y) {
        bool corner = (x == 0 && y == 0) || (x == width - 1 && y == height - 1);
        if (!corner && (rng() % 100) < 20) blocked[x][y] = true;
      }
  }
  std::vector<std::vector<FactId>> cell(width, std::vector<FactId>(height));
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      cell[x][y] = static_cast<FactId>(task.fact_names.size());
      task.fact_names.push_back(cell_name(x, y));
    }
  const int dx[4] = {1, -1, 0, 0}, dy[4] = {0, 0, 1, -1};
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x) {
      if (blocked[x][y]) continue;
      for (int d = 0; d < 4; ++d) {
        int nx = x + dx[d], ny = y + dy[d];
        if (nx < 0 || ny < 0 || nx >= width || ny >= height || blocked[nx][ny])
          continue;
        Operator op;
        op.name = "move(" + std::to_string(x) + "," + std::to_string(y) + "," +
                  std::to_string(nx) + "," + std::to_string(ny) + ")";
        op.pre = {cell[x][y]};
        op.add = {cell[nx][ny]};
        op.del = {cell[x][y]};
        task.operators.push_back(std::move(op));
      }
    }
  task.init = State(task.num_facts());
  task.init.set(cell[0][0]);
  task.goal = {cell[width - 1][height - 1]};
  task.finalize();
  return task;
}

namespace detail {

inline std::vector<int> sample_distinct(std::mt19937_64& rng, int n, int k) {
  std::vector<int> pool(n);
  std::iota(pool.begin(), pool.end(), 0);
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> dist(i, n - 1);
    std::swap(pool[i], pool[dist(rng)]);
  }
  pool.resize(k);
  return pool;
}

}  // namespace detail

inline Task gen_random_strips(uint64_t seed, int num_facts, int num_ops,
                              int pre_size, int eff_size, int goal_size = 2) {
  if (num_facts < 1 || num_ops < 1)
    throw std::invalid_argument("gen_random_strips: need at least one fact and operator");
  if (pre_size < 0 || pre_size > num_facts || eff_size < 1 ||
      2 * eff_size > num_facts || goal_size < 1 || goal_size > num_facts)
    throw std::invalid_argument("gen_random_strips: infeasible sizes");

  std::mt19937_64 rng(seed);
  Task task;
  for (int f = 0; f < num_facts; ++f)
    task.fact_names.push_back("f" + std::to_string(f));

  for (int o = 0; o < num_ops; ++o) {
    Operator op;
    op.name = "op" + std::to_string(o);
    op.pre = [&] {
      auto v = detail::sample_distinct(rng, num_facts, pre_size);
      std::vector<FactId> out(v.begin(), v.end());
      std::sort(out.begin(), out.end());
      return out;
    }();
    for (int attempt = 0;; ++attempt) {
      if (attempt > 10000)
        throw std::runtime_error("gen_random_strips: cannot draw disjoint effects");
      auto a = detail::sample_distinct(rng, num_facts, eff_size);
      auto d = detail::sample_distinct(rng, num_facts, eff_size);
      std::sort(a.begin(), a.end());
      std::sort(d.begin(), d.end());
      std::vector<int> overlap;
      std::set_intersection(a.begin(), a.end(), d.begin(), d.end(),
                            std::back_inserter(overlap));
      if (!overlap.empty()) continue;  // retry on add/delete overlap
      op.add.assign(a.begin(), a.end());
      op.del.assign(d.begin(), d.end());
      break;
    }
    task.operators.push_back(std::move(op));
  }

  task.init = State(num_facts);
  for (int f = 0; f < num_facts; ++f)
    if (rng() & 1) task.init.set(f);
  auto g = detail::sample_distinct(rng, num_facts, goal_size);
  task.goal.assign(g.begin(), g.end());
  std::sort(task.goal.begin(), task.goal.end());
  task.finalize();
  return task;
}

// Balanced B-ary tree of the given depth as a STRIPS task: a state at depth l
// is {lvl(l), c(1,b1), .., c(l,bl)}; the goal is unreachable so searches run
// to exhaustion. Used by the selection-cost probes.
inline Task gen_tree(int branching, int depth) {
  if (branching < 1 || depth < 1)
    throw std::invalid_argument("gen_tree: branching and depth must be positive");
  Task task;
  std::vector<FactId> lvl(depth + 1);
  for (int l = 0; l <= depth; ++l) {
    lvl[l] = static_cast<FactId>(task.fact_names.size());
    task.fact_names.push_back("lvl" + std::to_string(l));
  }
  std::vector<std::vector<FactId>> choice(depth + 1, std::vector<FactId>(branching));
  for (int l = 1; l <= depth; ++l)
    for (int b = 0; b < branching; ++b) {
      choice[l][b] = static_cast<FactId>(task.fact_names.size());
      task.fact_names.push_back("c(" + std::to_string(l) + "," + std::to_string(b) + ")");
    }
  FactId unreachable = static_cast<FactId>(task.fact_names.size());
  task.fact_names.push_back("goal-marker");

  for (int l = 1; l <= depth; ++l)
    for (int b = 0; b < branching; ++b) {
      Operator op;
      op.name = "choose(" + std::to_string(l) + "," + std::to_string(b) + ")";
      op.pre = {lvl[l - 1]};
      op.add = {std::min(choice[l][b], lvl[l]), std::max(choice[l][b], lvl[l])};
      op.del = {lvl[l - 1]};
      task.operators.push_back(std::move(op));
    }
  task.init = State(task.num_facts());
  task.init.set(lvl[0]);
  task.goal = {unreachable};
  task.finalize();
  return task;
}

// Irregular random tree task with one fact per node; states hold exactly one
// fact, so a per-node heuristic table can key on it. node_h holds distinct
// values >= 1 (0 for the goal node if one is designated).
struct RandomTree {
  Task task;
  std::vector<int> node_h;  // by node id == fact id
  int goal_node = -1;
};

inline RandomTree gen_random_tree(uint64_t seed, int num_nodes,
                                  bool with_goal) {
  if (num_nodes < 2)
    throw std::invalid_argument("gen_random_tree: need at least two nodes");
  std::mt19937_64 rng(seed);
  RandomTree out;
  Task& task = out.task;
  for (int i = 0; i < num_nodes; ++i)
    task.fact_names.push_back("n" + std::to_string(i));

  std::vector<std::pair<int, int>> edges;
  for (int i = 1; i < num_nodes; ++i) {
    std::uniform_int_distribution<int> dist(0, i - 1);
    edges.emplace_back(dist(rng), i);
  }
  std::shuffle(edges.begin(), edges.end(), rng);
  for (auto [p, c] : edges) {
    Operator op;
    op.name = "edge(" + std::to_string(p) + "," + std::to_string(c) + ")";
    op.pre = {p};
    op.add = {c};
    op.del = {p};
    task.operators.push_back(std::move(op));
  }

  out.node_h.resize(num_nodes);
  std::iota(out.node_h.begin(), out.node_h.end(), 1);  // distinct, >= 1
  std::shuffle(out.node_h.begin(), out.node_h.end(), rng);

  task.init = State(num_nodes);
  task.init.set(0);
  if (with_goal) {
    std::uniform_int_distribution<int> dist(1, num_nodes - 1);
    out.goal_node = dist(rng);
    out.node_h[out.goal_node] = 0;
    task.goal = {out.goal_node};
  } else {
    // goal on a fresh fact nothing adds: searches exhaust the space
    task.fact_names.push_back("goal-marker");
    task.init = State(num_nodes + 1);
    task.init.set(0);
    task.goal = {num_nodes};
  }
  task.finalize();
  return out;
}

}  // namespace nebula
