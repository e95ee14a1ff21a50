#pragma once

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>

#include "qbench/error.hpp"

namespace qbench {

/// Resource tuple granted to every solver call. Only time is enforced; cost
/// and energy are declared limits reported alongside solver-declared usage.
/// `max_iterations`, when set, switches the bundled solvers to a fixed
/// iteration count so that results are bit-reproducible across machines.
struct Budget {
  double time_s = 0.0;
  double cost_usd = 0.0;
  double energy_j = 0.0;
  std::optional<std::uint64_t> max_iterations;

  friend bool operator==(const Budget&, const Budget&) = default;
};

inline void validate(const Budget& b) {
  if (!(b.time_s > 0.0)) {
    throw DomainError("budget time_s must be positive, got " + std::to_string(b.time_s));
  }
  if (!(b.cost_usd >= 0.0) || !(b.energy_j >= 0.0)) {
    throw DomainError("budget cost_usd and energy_j must be nonnegative");
  }
  if (b.max_iterations && *b.max_iterations == 0) {
    throw DomainError("budget max_iterations must be positive when set");
  }
}

using MonotonicClock = std::chrono::steady_clock;

inline double seconds_since(MonotonicClock::time_point start) {
  return std::chrono::duration<double>(MonotonicClock::now() - start).count();
}

/// Cooperative deadline on the monotonic clock. Solvers poll `expired()` once
/// per iteration; nothing is preempted.
class BudgetGuard {
 public:
  explicit BudgetGuard(double seconds)
      : start_(MonotonicClock::now()),
        deadline_(start_ + std::chrono::duration_cast<MonotonicClock::duration>(
                               std::chrono::duration<double>(seconds))) {
    if (!(seconds > 0.0)) throw DomainError("budget guard needs a positive duration");
  }

  bool expired() const { return MonotonicClock::now() >= deadline_; }
  double elapsed_s() const { return seconds_since(start_); }
  MonotonicClock::time_point deadline() const { return deadline_; }

 private:
  MonotonicClock::time_point start_;
  MonotonicClock::time_point deadline_;
};

inline BudgetGuard budget_guard(const Budget& budget) {
  validate(budget);
  return BudgetGuard(budget.time_s);
}

}  // namespace qbench
