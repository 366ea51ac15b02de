#pragma once

// Streaming arm statistics (Welford updates, parallel-variance combine) and
// the two selection indices. The engine minimizes node evaluation costs, so
// both indices are lower confidence bounds:
//
//   ucb1     mean - c * sqrt(2 ln T / t)
//   normal2  mean - sigma * sqrt(2 ln T),  sigma = sqrt(m2 / (t - 1))
//
// Arms with too few pulls (t < 1 for ucb1, t < 2 for normal2) get -inf so
// that unsampled arms are selected first.

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>

namespace nebula {

struct ArmStats {
  int64_t t = 0;     // pull count
  double mean = 0;   // running mean
  double m2 = 0;     // sum of squared deviations from the mean

  void update(double reward) {
    ++t;
    double delta = reward - mean;
    mean += delta / static_cast<double>(t);
    m2 += delta * (reward - mean);
  }

  double variance() const { return t > 1 ? m2 / static_cast<double>(t - 1) : 0.0; }
  double stddev() const { return std::sqrt(variance()); }
};

inline ArmStats combine(const ArmStats& a, const ArmStats& b) {
  if (a.t == 0) return b;
  if (b.t == 0) return a;
  ArmStats out;
  out.t = a.t + b.t;
  double delta = b.mean - a.mean;
  double ta = static_cast<double>(a.t), tb = static_cast<double>(b.t);
  out.mean = a.mean + delta * tb / (ta + tb);
  out.m2 = a.m2 + b.m2 + delta * delta * ta * tb / (ta + tb);
  return out;
}

struct BanditContext {
  int64_t total_pulls = 0;  // T, across sibling arms
  double ucb1_c = 1.0;
};

enum class BanditPolicy { Ucb1, Normal2 };

constexpr double kForcedArm = -std::numeric_limits<double>::infinity();

inline double index_ucb1(const ArmStats& arm, const BanditContext& ctx) {
  if (ctx.total_pulls < 1) throw std::invalid_argument("index_ucb1: T < 1");
  if (arm.t < 1) return kForcedArm;
  double log_term = 2.0 * std::log(static_cast<double>(ctx.total_pulls));
  return arm.mean - ctx.ucb1_c * std::sqrt(log_term / static_cast<double>(arm.t));
}

inline double index_normal2(const ArmStats& arm, const BanditContext& ctx) {
  if (ctx.total_pulls < 1) throw std::invalid_argument("index_normal2: T < 1");
  if (arm.t < 2) return kForcedArm;
  double log_term = 2.0 * std::log(static_cast<double>(ctx.total_pulls));
  return arm.mean - arm.stddev() * std::sqrt(log_term);
}

inline double bandit_index(const ArmStats& arm, const BanditContext& ctx,
                           BanditPolicy policy) {
  return policy == BanditPolicy::Ucb1 ? index_ucb1(arm, ctx)
                                      : index_normal2(arm, ctx);
}

// Argmin over arms; ties break toward the lowest arm index (insertion order).
inline size_t select_arm(std::span<const ArmStats> arms, const BanditContext& ctx,
                         BanditPolicy policy) {
  if (arms.empty()) throw std::invalid_argument("select_arm: no arms");
  size_t best = 0;
  double best_index = bandit_index(arms[0], ctx, policy);
  for (size_t i = 1; i < arms.size(); ++i) {
    double idx = bandit_index(arms[i], ctx, policy);
    if (idx < best_index) {
      best = i;
      best_index = idx;
    }
  }
  return best;
}

}  // namespace nebula
