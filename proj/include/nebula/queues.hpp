#pragma once

// Interchangeable min-priority frontier queues over non-negative integer keys
// with FIFO tie-breaking and operation counters.
//
// BucketQueue is the array-based (Dial) variant: one FIFO bucket per key and a
// monotone min-key cursor that is reset downward when a smaller key arrives.
// HeapQueue is a binary heap over (key, insertion seq). Both expose the same
// push/popmin interface and yield identical pop sequences on any workload.

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace nebula {

struct QueueCounters {
  uint64_t pushes = 0;
  uint64_t pops = 0;
  uint64_t scan_steps = 0;  // bucket cursor advances
  uint64_t compares = 0;    // heap key comparisons
};

template <typename T>
class BucketQueue {
 public:
  void push(int key, T value) {
    if (key < 0) throw std::invalid_argument("BucketQueue: negative key");
    if (static_cast<size_t>(key) >= buckets_.size()) grow(key + 1);
    buckets_[key].push_back(std::move(value));
    if (key < min_key_) min_key_ = key;
    ++size_;
    ++counters_.pushes;
  }

  std::pair<int, T> popmin() {
    if (size_ == 0) throw std::logic_error("BucketQueue: pop on empty queue");
    while (head_[min_key_] == buckets_[min_key_].size()) {
      ++min_key_;
      ++counters_.scan_steps;
    }
    auto& bucket = buckets_[min_key_];
    T value = std::move(bucket[head_[min_key_]]);
    if (++head_[min_key_] == bucket.size()) {
      bucket.clear();
      head_[min_key_] = 0;
    }
    --size_;
    ++counters_.pops;
    return {min_key_, std::move(value)};
  }

  bool empty() const { return size_ == 0; }
  size_t size() const { return size_; }
  const QueueCounters& counters() const { return counters_; }

 private:
  void grow(size_t need) {
    size_t cap = buckets_.empty() ? 16 : buckets_.size();
    while (cap < need) cap *= 2;
    buckets_.resize(cap);
    head_.resize(cap, 0);
  }

  std::vector<std::vector<T>> buckets_;
  std::vector<size_t> head_;  // consumed prefix per bucket
  int min_key_ = 0;
  size_t size_ = 0;
  QueueCounters counters_;
};

template <typename T>
class HeapQueue {
 public:
  void push(int key, T value) {
    if (key < 0) throw std::invalid_argument("HeapQueue: negative key");
    entries_.push_back(Entry{key, next_seq_++, std::move(value)});
    sift_up(entries_.size() - 1);
    ++counters_.pushes;
  }

  std::pair<int, T> popmin() {
    if (entries_.empty()) throw std::logic_error("HeapQueue: pop on empty queue");
    Entry top = std::move(entries_.front());
    entries_.front() = std::move(entries_.back());
    entries_.pop_back();
    if (!entries_.empty()) sift_down(0);
    ++counters_.pops;
    return {top.key, std::move(top.value)};
  }

  bool empty() const { return entries_.empty(); }
  size_t size() const { return entries_.size(); }
  const QueueCounters& counters() const { return counters_; }

 private:
  struct Entry {
    int key;
    uint64_t seq;
    T value;
  };

  bool less(const Entry& a, const Entry& b) {
    ++counters_.compares;
    return a.key < b.key || (a.key == b.key && a.seq < b.seq);
  }

  void sift_up(size_t i) {
    while (i > 0) {
      size_t parent = (i - 1) / 2;
      if (!less(entries_[i], entries_[parent])) break;
      std::swap(entries_[i], entries_[parent]);
      i = parent;
    }
  }

  void sift_down(size_t i) {
    const size_t n = entries_.size();
    for (;;) {
      size_t best = i, l = 2 * i + 1, r = 2 * i + 2;
      if (l < n && less(entries_[l], entries_[best])) best = l;
      if (r < n && less(entries_[r], entries_[best])) best = r;
      if (best == i) break;
      std::swap(entries_[i], entries_[best]);
      i = best;
    }
  }

  std::vector<Entry> entries_;
  uint64_t next_seq_ = 0;
  QueueCounters counters_;
};

}  // namespace nebula
