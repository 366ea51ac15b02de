#pragma once

// Width <= 2 novelty metric over per-heuristic-tuple partitions. Each
// partition keeps two bitvectors: seen single facts (|P| bits) and seen fact
// pairs (|P| choose 2 bits, triangular packing). Assessment inspects only the
// tuples the generating operator could have newly introduced (fired adds x
// state); callers fall back to fired = all facts of s when no same-partition
// operator context exists, which keeps the incremental metric exactly equal
// to whole-state recomputation.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "nebula/task.hpp"

namespace nebula {

constexpr int kNoveltyMax = 2;  // tracked tuple size; w in {1, 2, 3}

// Triangular pair packing, requires i < j; bijective onto [0, C(n,2)).
inline size_t pair_index(FactId i, FactId j) {
  if (i >= j) throw std::invalid_argument("pair_index: requires i < j");
  return static_cast<size_t>(j) * (j - 1) / 2 + i;
}

class NoveltyStore {
 public:
  explicit NoveltyStore(int num_facts, uint64_t max_bits = uint64_t(1) << 33)
      : num_facts_(num_facts), max_bits_(max_bits) {}

  // Returns 1, 2, or kNoveltyMax + 1 and marks all inspected tuples.
  // fired_adds must be a subset of s's facts.
  int assess_and_record(const State& s, std::span<const FactId> fired_adds,
                        const std::vector<int>& h_tuple) {
    Partition& part = partition(h_tuple);
    if (part.disabled) return kNoveltyMax + 1;

    bool novel1 = false, novel2 = false;
    for (FactId f : fired_adds)
      if (!test_and_set(part.v1, f)) novel1 = true;
    for (FactId f : fired_adds) {
      for (FactId g = 0; g < num_facts_; ++g) {
        if (g == f || !s.test(g)) continue;
        size_t idx = pair_index(std::min(f, g), std::max(f, g));
        if (!test_and_set(part.v2, idx)) novel2 = true;
      }
    }
    return novel1 ? 1 : novel2 ? 2 : kNoveltyMax + 1;
  }

  size_t partition_count() const { return partitions_.size(); }
  uint64_t disabled_partitions() const { return disabled_; }
  uint64_t bits_used() const { return bits_used_; }

 private:
  struct Partition {
    std::vector<uint64_t> v1, v2;
    bool disabled = false;
  };

  struct TupleHash {
    size_t operator()(const std::vector<int>& v) const {
      uint64_t h = 0xcbf29ce484222325ull;
      for (int x : v) {
        h ^= static_cast<uint64_t>(x) + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
      }
      return static_cast<size_t>(h);
    }
  };

  Partition& partition(const std::vector<int>& h_tuple) {
    auto it = partitions_.find(h_tuple);
    if (it != partitions_.end()) return it->second;
    Partition part;
    const uint64_t n = static_cast<uint64_t>(num_facts_);
    const uint64_t need = n + n * (n - 1) / 2;
    if (bits_used_ + need > max_bits_) {
      // graceful degradation: new partitions report nothing as novel
      part.disabled = true;
      ++disabled_;
    } else {
      part.v1.assign((n + 63) / 64, 0);
      part.v2.assign((n * (n - 1) / 2 + 63) / 64, 0);
      bits_used_ += need;
    }
    return partitions_.emplace(h_tuple, std::move(part)).first->second;
  }

  static bool test_and_set(std::vector<uint64_t>& bits, size_t idx) {
    uint64_t& word = bits[idx >> 6];
    uint64_t mask = uint64_t(1) << (idx & 63);
    bool was = word & mask;
    word |= mask;
    return was;
  }

  int num_facts_;
  uint64_t max_bits_;
  uint64_t bits_used_ = 0;
  uint64_t disabled_ = 0;
  std::unordered_map<std::vector<int>, Partition, TupleHash> partitions_;
};

}  // namespace nebula
