#pragma once

// Synthetic binary quadratic testbed: minimize x^T Q x over x in {0,1}^n.
//
// Bundled heuristics: a fixed-temperature single-flip walk ("sa") and a
// best-improvement descent with random restarts ("greedy"), plus an exact
// enumeration used as a test oracle and for quality calibration.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbench/budget.hpp"
#include "qbench/error.hpp"
#include "qbench/harness.hpp"

namespace qbench::qubo {

/// Symmetric n x n matrix with zero diagonal, stored row-major.
struct QuboInstance {
  int n = 0;
  double density = 1.0;
  std::uint64_t seed = 0;
  std::vector<double> values;

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * n + j]; }
  double& at(int i, int j) { return values[static_cast<std::size_t>(i) * n + j]; }

  friend bool operator==(const QuboInstance&, const QuboInstance&) = default;
};

struct BitVector {
  std::vector<std::uint8_t> bits;

  std::size_t size() const { return bits.size(); }
  friend bool operator==(const BitVector&, const BitVector&) = default;
};

struct QualityBounds {
  double f_reference_low = 0.0;   // best (minimum) objective reference
  double f_reference_high = 0.0;  // worst / baseline reference
};

inline void validate(const QuboInstance& q) {
  if (q.n < 1) throw DomainError("QUBO size must be at least 1");
  if (q.values.size() != static_cast<std::size_t>(q.n) * q.n) {
    throw DomainError("QUBO matrix must have n*n entries");
  }
  for (int i = 0; i < q.n; ++i) {
    if (q.at(i, i) != 0.0) throw DomainError("QUBO diagonal must be zero");
    for (int j = i + 1; j < q.n; ++j) {
      if (q.at(i, j) != q.at(j, i)) throw DomainError("QUBO matrix must be symmetric");
      if (!std::isfinite(q.at(i, j))) throw DomainError("QUBO entries must be finite");
    }
  }
}

/// Standard-normal couplings on the strict upper triangle, each kept with
/// probability `density`, mirrored to the lower triangle.
inline QuboInstance generate_qubo(int n, double density, std::uint64_t seed) {
  if (n < 1) throw DomainError("QUBO size must be at least 1");
  if (!(density > 0.0 && density <= 1.0)) {
    throw DomainError("density must lie in (0,1], got " + std::to_string(density));
  }
  QuboInstance q{n, density, seed, std::vector<double>(static_cast<std::size_t>(n) * n, 0.0)};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double v = normal(rng);
      const bool keep = unit(rng) < density;
      if (keep) {
        q.at(i, j) = v;
        q.at(j, i) = v;
      }
    }
  }
  return q;
}

/// x^T Q x, summed over pairs of set bits.
inline double objective(const QuboInstance& q, const BitVector& x) {
  if (x.size() != static_cast<std::size_t>(q.n)) {
    throw DomainError("bit vector length " + std::to_string(x.size()) +
                      " does not match QUBO size " + std::to_string(q.n));
  }
  std::vector<int> on;
  for (int i = 0; i < q.n; ++i) {
    if (x.bits[i] > 1) throw DomainError("bit vector entries must be 0 or 1");
    if (x.bits[i]) on.push_back(i);
  }
  double f = 0.0;
  for (int a : on) {
    for (int b : on) f += q.at(a, b);
  }
  return f;
}

inline double quality_from_objective(double f, const QualityBounds& bounds) {
  const double lo = bounds.f_reference_low;
  const double hi = bounds.f_reference_high;
  if (hi == lo) return 1.0;
  return std::clamp((hi - f) / (hi - lo), 0.0, 1.0);
}

// ---------------------------------------------------------------------------
// Incremental state shared by the solvers and the oracle
// ---------------------------------------------------------------------------

namespace detail {

/// Tracks x, f(x) and the local fields h_i = sum_j Q_ij x_j. Flipping bit i
/// changes f by (1 - 2 x_i) * 2 h_i because Q is symmetric with zero diagonal.
class FlipState {
 public:
  explicit FlipState(const QuboInstance& q) : q_(&q), x_(q.n, 0), h_(q.n, 0.0) {}

  void assign(const std::vector<std::uint8_t>& x) {
    x_ = x;
    std::fill(h_.begin(), h_.end(), 0.0);
    f_ = 0.0;
    for (int i = 0; i < q_->n; ++i) {
      double hi = 0.0;
      for (int j = 0; j < q_->n; ++j) {
        if (x_[j]) hi += q_->at(i, j);
      }
      h_[i] = hi;
      if (x_[i]) f_ += hi;
    }
  }

  double delta(int i) const { return (x_[i] ? -2.0 : 2.0) * h_[i]; }

  void flip(int i) {
    f_ += delta(i);
    const double s = x_[i] ? -1.0 : 1.0;
    x_[i] ^= 1;
    const double* row = &q_->values[static_cast<std::size_t>(i) * q_->n];
    for (int j = 0; j < q_->n; ++j) h_[j] += s * row[j];
  }

  double f() const { return f_; }
  const std::vector<std::uint8_t>& x() const { return x_; }

 private:
  const QuboInstance* q_;
  std::vector<std::uint8_t> x_;
  std::vector<double> h_;
  double f_ = 0.0;
};

inline std::vector<std::uint8_t> random_bits(int n, std::mt19937_64& rng) {
  std::uniform_int_distribution<int> bit(0, 1);
  std::vector<std::uint8_t> x(n);
  for (auto& b : x) b = static_cast<std::uint8_t>(bit(rng));
  return x;
}

/// Loop control shared by both solvers: a fixed iteration count when the
/// budget carries one, the monotonic deadline otherwise.
class StopRule {
 public:
  explicit StopRule(const Budget& b) : guard_(budget_guard(b)), max_iter_(b.max_iterations) {}
  bool done(std::uint64_t iterations) const {
    return max_iter_ ? iterations >= *max_iter_ : guard_.expired();
  }
  double elapsed_s() const { return guard_.elapsed_s(); }
  bool iteration_mode() const { return max_iter_.has_value(); }

 private:
  BudgetGuard guard_;
  std::optional<std::uint64_t> max_iter_;
};

/// Most negative single-flip gain, lowest index among equal gains.
// Gains this close to zero are round-off from incremental updates, not progress.
inline constexpr double kImprovementEps = 1e-12;

inline std::pair<int, double> best_flip(const FlipState& s) {
  int i_best = 0;
  double g_best = s.delta(0);
  for (int i = 1; i < static_cast<int>(s.x().size()); ++i) {
    const double g = s.delta(i);
    if (g < g_best) {
      g_best = g;
      i_best = i;
    }
  }
  return {i_best, g_best};
}

struct BestTracker {
  double f_best = 0.0;
  double f_worst = 0.0;
  std::vector<std::uint8_t> x_best;
  double time_to_best_s = 0.0;

  void start(const FlipState& s) {
    f_best = f_worst = s.f();
    x_best = s.x();
  }
  void observe(const FlipState& s, const StopRule& stop) {
    if (s.f() < f_best) {
      f_best = s.f();
      x_best = s.x();
      time_to_best_s = stop.elapsed_s();
    }
    f_worst = std::max(f_worst, s.f());
  }
};

/// Quality measured against the solver's own
/// best and worst visited objective; this is 1.0 whenever the walk moved.
inline double self_referenced_quality(double f_best, double f_worst) {
  return quality_from_objective(f_best, {f_best, f_worst > f_best ? f_worst : f_best + 1.0});
}

inline Meta common_meta(const QuboInstance& q, const BestTracker& best, const StopRule& stop,
                        std::uint64_t iterations) {
  Meta m;
  // Recomputed exactly; the incremental value carries rounding drift.
  m["f_best"] = objective(q, BitVector{best.x_best});
  m["f_worst"] = best.f_worst;
  m["iterations"] = static_cast<std::int64_t>(iterations);
  m["time_s"] = stop.elapsed_s();
  m["time_to_best_s"] = best.time_to_best_s;
  m["energy_j"] = 0.0;
  m["cost_usd"] = 0.0;
  m["budget_mode"] = std::string(stop.iteration_mode() ? "iterations" : "time");
  return m;
}

}  // namespace detail

/// Probability of accepting a non-improving flip; no cooling schedule.
inline constexpr double kSaUphillAcceptance = 0.01;

/// Single-flip walk: a uniformly chosen bit is flipped if that does not
/// increase the objective, or otherwise with probability 0.01.
inline SolveOutcome solve_sa(const QuboInstance& q, const Budget& budget, std::uint64_t seed) {
  validate(budget);
  detail::StopRule stop(budget);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> pick(0, q.n - 1);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  detail::FlipState state(q);
  state.assign(detail::random_bits(q.n, rng));
  detail::BestTracker best;
  best.start(state);

  std::uint64_t flips = 0;
  std::uint64_t accepted = 0;
  while (!stop.done(flips)) {
    const int i = pick(rng);
    ++flips;
    if (state.delta(i) <= 0.0 || unit(rng) < kSaUphillAcceptance) {
      state.flip(i);
      ++accepted;
      best.observe(state, stop);
    }
  }

  SolveOutcome out;
  out.meta = detail::common_meta(q, best, stop, flips);
  out.meta["flips_evaluated"] = static_cast<std::int64_t>(flips);
  out.meta["flips_accepted"] = static_cast<std::int64_t>(accepted);
  out.quality = detail::self_referenced_quality(best.f_best, best.f_worst);
  return out;
}

/// Called after every greedy step with the current objective; `restarted` is
/// true when the step was a random restart rather than an improving flip.
using GreedyObserver = std::function<void(double f, bool restarted)>;

/// Best-improvement descent from the all-zero string. Each step applies the
/// single flip with the most negative gain (lowest index on ties); when no
/// flip improves, the walk restarts from a uniform random bit string.
inline SolveOutcome solve_greedy(const QuboInstance& q, const Budget& budget, std::uint64_t seed,
                                 const GreedyObserver& observer = {}) {
  validate(budget);
  detail::StopRule stop(budget);
  std::mt19937_64 rng(seed);

  detail::FlipState state(q);
  state.assign(std::vector<std::uint8_t>(q.n, 0));
  detail::BestTracker best;
  best.start(state);

  std::uint64_t steps = 0;
  std::uint64_t restarts = 0;
  while (!stop.done(steps)) {
    ++steps;
    const auto [i_best, g_best] = detail::best_flip(state);
    const bool restart = !(g_best < -detail::kImprovementEps * (1.0 + std::abs(state.f())));
    if (restart) {
      state.assign(detail::random_bits(q.n, rng));
      ++restarts;
    } else {
      state.flip(i_best);
    }
    best.observe(state, stop);
    if (observer) observer(state.f(), restart);
  }

  SolveOutcome out;
  out.meta = detail::common_meta(q, best, stop, steps);
  out.meta["restarts"] = static_cast<std::int64_t>(restarts);
  out.quality = detail::self_referenced_quality(best.f_best, best.f_worst);
  return out;
}

inline constexpr int kBruteForceMaxN = 24;

struct Optimum {
  double f_min = 0.0;
  BitVector argmin;
};

/// Exact minimum by enumeration in lexicographic order of (x_0, ..., x_{n-1}).
/// Values within a relative 1e-9 of the incumbent count as ties and keep the
/// earlier (lexicographically smaller) string.
inline Optimum brute_force_optimum(const QuboInstance& q) {
  if (q.n > kBruteForceMaxN) {
    throw DomainError("brute force is limited to n <= " + std::to_string(kBruteForceMaxN) +
                      ", got n = " + std::to_string(q.n));
  }
  const int n = q.n;
  detail::FlipState state(q);
  state.assign(std::vector<std::uint8_t>(n, 0));
  double best = state.f();
  std::vector<std::uint8_t> x_best = state.x();

  // Counter bit b drives x_{n-1-b}, so counting up walks lexicographic order.
  const std::uint64_t count = std::uint64_t{1} << n;
  for (std::uint64_t m = 1; m < count; ++m) {
    std::uint64_t changed = m ^ (m - 1);
    for (int b = 0; changed; ++b, changed >>= 1) {
      if (changed & 1) state.flip(n - 1 - b);
    }
    if (state.f() < best - 1e-9 * (1.0 + std::abs(best))) {
      best = state.f();
      x_best = state.x();
    }
  }
  BitVector arg{x_best};
  return {objective(q, arg), arg};
}

// ---------------------------------------------------------------------------
// Quality calibration
// ---------------------------------------------------------------------------

inline constexpr int kReferenceSamples = 256;
inline constexpr int kBruteForceCalibrationMaxN = 20;

/// Mean objective of uniformly random bit strings; the "no effort" baseline.
inline double random_baseline(const QuboInstance& q, std::uint64_t seed,
                              int samples = kReferenceSamples) {
  std::mt19937_64 rng(seed);
  double sum = 0.0;
  for (int s = 0; s < samples; ++s) sum += objective(q, BitVector{detail::random_bits(q.n, rng)});
  return sum / samples;
}

/// Shared per-instance bounds: low is the best objective any solver found on
/// the instance (or the exact optimum for small n), high the random baseline.
inline QualityBounds shared_reference_bounds(const QuboInstance& q,
                                             std::span<const double> solver_best) {
  double low = std::numeric_limits<double>::infinity();
  for (double f : solver_best) low = std::min(low, f);
  if (q.n <= kBruteForceCalibrationMaxN) low = std::min(low, brute_force_optimum(q).f_min);
  const double high = random_baseline(q, splitmix64(q.seed ^ 0x5eed5eed5eed5eedULL));
  if (!std::isfinite(low)) low = high;
  return {std::min(low, high), std::max(low, high)};
}

inline constexpr const char* kPolicySharedBounds = "shared_bounds";
inline constexpr const char* kPolicySelfReferenced = "self_referenced";

/// Calibration hook for run_benchmark. Under "shared_bounds" every record on
/// the instance is rescored against the same bounds; "self_referenced" keeps
/// the solver-reported quality.
inline std::function<void(const QuboInstance&, std::span<RunRecord>)> make_calibrator(
    const std::string& policy) {
  if (policy == kPolicySelfReferenced) {
    return [](const QuboInstance&, std::span<RunRecord> recs) {
      for (auto& r : recs) r.meta["quality_policy"] = std::string(kPolicySelfReferenced);
    };
  }
  if (policy != kPolicySharedBounds) throw ConfigError("unknown quality policy '" + policy + "'");
  return [](const QuboInstance& q, std::span<RunRecord> recs) {
    std::vector<double> bests;
    for (const auto& r : recs) {
      if (auto f = meta_number(r.meta, "f_best"); f && !r.meta.count("error")) bests.push_back(*f);
    }
    const QualityBounds b = shared_reference_bounds(q, bests);
    for (auto& r : recs) {
      r.meta["quality_policy"] = std::string(kPolicySharedBounds);
      r.meta["f_reference_low"] = b.f_reference_low;
      r.meta["f_reference_high"] = b.f_reference_high;
      const auto f = meta_number(r.meta, "f_best");
      if (f && !r.meta.count("error")) r.quality = quality_from_objective(*f, b);
    }
  };
}

inline std::vector<SolverSpec<QuboInstance>> bundled_solvers() {
  return {
      {"sa", [](const QuboInstance& q, const Budget& b, std::uint64_t s) { return solve_sa(q, b, s); }},
      {"greedy",
       [](const QuboInstance& q, const Budget& b, std::uint64_t s) { return solve_greedy(q, b, s); }},
  };
}

}  // namespace qbench::qubo
