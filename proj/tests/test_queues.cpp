#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "nebula/queues.hpp"

using namespace nebula;

TEST_CASE("pops come out in key order") {
  BucketQueue<int> bq;
  HeapQueue<int> hq;
  bq.push(3, 30);
  bq.push(1, 10);
  bq.push(2, 20);
  hq.push(3, 30);
  hq.push(1, 10);
  hq.push(2, 20);
  for (int want : {10, 20, 30}) {
    REQUIRE(bq.popmin().second == want);
    REQUIRE(hq.popmin().second == want);
  }
  REQUIRE(bq.empty());
  REQUIRE(hq.empty());
}

TEST_CASE("equal keys are FIFO") {
  BucketQueue<int> bq;
  HeapQueue<int> hq;
  for (int v = 0; v < 5; ++v) {
    bq.push(7, v);
    hq.push(7, v);
  }
  for (int v = 0; v < 5; ++v) {
    REQUIRE(bq.popmin() == std::pair<int, int>{7, v});
    REQUIRE(hq.popmin() == std::pair<int, int>{7, v});
  }
}

TEST_CASE("bucket cursor resets on a smaller key") {
  BucketQueue<int> q;
  q.push(5, 50);
  REQUIRE(q.popmin().first == 5);  // cursor now sits at 5
  q.push(0, 1);
  q.push(5, 51);
  REQUIRE(q.popmin() == std::pair<int, int>{0, 1});
  REQUIRE(q.popmin() == std::pair<int, int>{5, 51});
}

TEST_CASE("empty pop and negative key throw") {
  BucketQueue<int> bq;
  HeapQueue<int> hq;
  REQUIRE_THROWS_AS(bq.popmin(), std::logic_error);
  REQUIRE_THROWS_AS(hq.popmin(), std::logic_error);
  REQUIRE_THROWS_AS(bq.push(-1, 0), std::invalid_argument);
  REQUIRE_THROWS_AS(hq.push(-1, 0), std::invalid_argument);
  bq.push(0, 1);
  bq.popmin();
  REQUIRE_THROWS_AS(bq.popmin(), std::logic_error);
}

TEST_CASE("operation counters") {
  BucketQueue<int> q;
  REQUIRE(q.counters().pushes == 0);
  REQUIRE(q.counters().pops == 0);
  REQUIRE(q.counters().scan_steps == 0);
  for (int i = 0; i < 5; ++i) q.push(i, i);
  for (int i = 0; i < 5; ++i) q.popmin();
  REQUIRE(q.counters().pushes == 5);
  REQUIRE(q.counters().pops == 5);

  HeapQueue<int> h;
  h.push(1, 1);
  h.push(2, 2);
  h.popmin();
  REQUIRE(h.counters().pushes == 2);
  REQUIRE(h.counters().pops == 1);
  REQUIRE(h.counters().compares > 0);
}

TEST_CASE("backends agree on random workloads") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 1000; ++trial) {
    BucketQueue<int> bq;
    HeapQueue<int> hq;
    int payload = 0;
    int ops = 5 + static_cast<int>(rng() % 60);
    for (int i = 0; i < ops; ++i) {
      if (bq.empty() || rng() % 3) {
        int key = static_cast<int>(rng() % 20);
        bq.push(key, payload);
        hq.push(key, payload);
        ++payload;
      } else {
        REQUIRE(bq.popmin() == hq.popmin());
      }
    }
    while (!bq.empty()) REQUIRE(bq.popmin() == hq.popmin());
    REQUIRE(hq.empty());
  }
}

TEST_CASE("bucket scan bound in the monotone regime") {
  // keys never fall below the current minimum: Dial's regime, where total
  // cursor advances are bounded by the key range
  std::mt19937_64 rng(99);
  BucketQueue<int> q;
  int cur_min = 0;
  int max_key = 0;
  q.push(0, 0);
  for (int i = 0; i < 5000; ++i) {
    if (q.empty() || rng() % 2) {
      int key = cur_min + static_cast<int>(rng() % 4);
      max_key = std::max(max_key, key);
      q.push(key, i);
    } else {
      cur_min = q.popmin().first;
    }
  }
  REQUIRE(q.counters().scan_steps <= q.counters().pushes + static_cast<uint64_t>(max_key));
}
