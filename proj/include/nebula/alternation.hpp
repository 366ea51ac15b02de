#pragma once

// Round-robin scheduling over open-list sources with boosted preferred
// queues: while boost credit is positive, pops come exclusively from
// preferred queues (credit is preserved when all of them are empty).

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace nebula {

class AlternationScheduler {
 public:
  AlternationScheduler(std::vector<bool> is_preferred, int boost)
      : is_preferred_(std::move(is_preferred)), boost_(boost) {}

  int num_queues() const { return static_cast<int>(is_preferred_.size()); }

  // Picks the queue to pop from given which queues are currently nonempty;
  // returns -1 if all are empty. Empty queues are skipped without consuming
  // their turn. The caller must report the pop via popped().
  int pick(const std::vector<bool>& nonempty) {
    const int n = num_queues();
    if (static_cast<int>(nonempty.size()) != n)
      throw std::invalid_argument("pick: mask size mismatch");
    if (boost_credit_ > 0) {
      for (int i = 0; i < n; ++i) {
        int q = (preferred_cursor_ + i) % n;
        if (is_preferred_[q] && nonempty[q]) {
          preferred_cursor_ = (q + 1) % n;
          picked_preferred_ = true;
          return q;
        }
      }
      // all preferred queues empty: fall through, credit preserved
    }
    picked_preferred_ = false;
    for (int i = 0; i < n; ++i) {
      int q = (cursor_ + i) % n;
      if (nonempty[q]) {
        cursor_ = (q + 1) % n;
        return q;
      }
    }
    return -1;
  }

  // Accounts for the pop the last pick() led to.
  void popped() {
    if (picked_preferred_ && boost_credit_ > 0) {
      --boost_credit_;
      ++boosted_pops_;
    }
  }

  // A watched heuristic improved: grant boost credit.
  void on_improvement() {
    boost_credit_ += boost_;
    ++improvements_;
  }

  int64_t boost_credit() const { return boost_credit_; }
  uint64_t boosted_pops() const { return boosted_pops_; }
  uint64_t improvements() const { return improvements_; }

 private:
  std::vector<bool> is_preferred_;
  int boost_;
  int cursor_ = 0;
  int preferred_cursor_ = 0;
  bool picked_preferred_ = false;
  int64_t boost_credit_ = 0;
  uint64_t boosted_pops_ = 0;
  uint64_t improvements_ = 0;
};

}  // namespace nebula
