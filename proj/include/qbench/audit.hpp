#pragma once

// Stage timing and bottleneck attribution.
//
// A StageTrace accumulates the wall time of named pipeline stages for one run.
// audit_bottlenecks averages per-run stage shares over all replicates and
// ranks stages by their mean share.

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbench/budget.hpp"
#include "qbench/error.hpp"
#include "qbench/quantile.hpp"

namespace qbench {

struct StageTrace {
  std::string run_id;
  std::map<std::string, double> durations;  // seconds

  double total() const {
    double t = 0.0;
    for (const auto& [_, d] : durations) t += d;
    return t;
  }

  friend bool operator==(const StageTrace&, const StageTrace&) = default;
};

/// Re-entering a stage adds to its accumulated duration.
inline void add_stage(StageTrace& trace, const std::string& stage_name, double elapsed) {
  if (!(elapsed >= 0.0)) {
    throw DomainError("stage '" + stage_name + "' elapsed time must be nonnegative");
  }
  trace.durations[stage_name] += elapsed;
}

inline StageTrace record_stage(StageTrace trace, const std::string& stage_name, double elapsed) {
  add_stage(trace, stage_name, elapsed);
  return trace;
}

/// Times the enclosing scope into `trace` under `stage_name`, including scopes
/// left by an exception.
class ScopedStageTimer {
 public:
  ScopedStageTimer(StageTrace& trace, std::string stage_name)
      : trace_(trace), stage_(std::move(stage_name)), start_(MonotonicClock::now()) {}
  ScopedStageTimer(const ScopedStageTimer&) = delete;
  ScopedStageTimer& operator=(const ScopedStageTimer&) = delete;
  ~ScopedStageTimer() { add_stage(trace_, stage_, seconds_since(start_)); }

 private:
  StageTrace& trace_;
  std::string stage_;
  MonotonicClock::time_point start_;
};

struct AuditReport {
  std::map<std::string, double> mean_shares;
  std::vector<std::pair<std::string, double>> bottlenecks;
  std::optional<double> drift_mean_ppm;
  std::optional<double> drift_p95_ppm;
  int replicate_count = 0;
  // Runs with zero total time contribute nothing to the shares but still
  // count toward the replicate divisor, so mean shares then sum to
  // (replicate_count - skipped_runs) / replicate_count.
  int skipped_runs = 0;
  bool degenerate = false;  // every run had zero total time

  friend bool operator==(const AuditReport&, const AuditReport&) = default;
};

/// Sums after sorting so the result does not depend on input order.
inline double order_independent_sum(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  return std::accumulate(v.begin(), v.end(), 0.0);
}

inline AuditReport audit_bottlenecks(std::span<const StageTrace> traces, int top_k,
                                     std::optional<std::span<const double>> drift_samples_ppm = {}) {
  if (traces.empty()) throw DomainError("audit needs at least one stage trace");
  if (top_k < 1) throw DomainError("top_k must be at least 1");

  std::set<std::string> stages;
  for (const auto& t : traces) {
    for (const auto& [name, d] : t.durations) {
      if (!(d >= 0.0)) throw DomainError("stage '" + name + "' has a negative duration");
      stages.insert(name);
    }
  }

  std::map<std::string, std::vector<double>> shares;
  AuditReport rep;
  rep.replicate_count = static_cast<int>(traces.size());
  for (const auto& t : traces) {
    const double total = t.total();
    if (total <= 0.0) {
      ++rep.skipped_runs;
      continue;
    }
    for (const auto& s : stages) {
      const auto it = t.durations.find(s);
      shares[s].push_back(it == t.durations.end() ? 0.0 : it->second / total);
    }
  }

  const double r = static_cast<double>(traces.size());
  for (const auto& s : stages) {
    rep.mean_shares[s] = order_independent_sum(shares[s]) / r;
  }
  rep.degenerate = rep.skipped_runs == rep.replicate_count;

  if (!rep.degenerate) {
    std::vector<std::pair<std::string, double>> ranked(rep.mean_shares.begin(),
                                                       rep.mean_shares.end());
    std::stable_sort(ranked.begin(), ranked.end(),
                     [](const auto& a, const auto& b) { return a.second > b.second; });
    if (ranked.size() > static_cast<std::size_t>(top_k)) ranked.resize(top_k);
    rep.bottlenecks = std::move(ranked);
  }

  if (drift_samples_ppm && !drift_samples_ppm->empty()) {
    std::vector<double> sorted(drift_samples_ppm->begin(), drift_samples_ppm->end());
    for (double d : sorted) {
      if (!(d >= 0.0)) throw DomainError("drift samples must be nonnegative");
    }
    std::sort(sorted.begin(), sorted.end());
    rep.drift_mean_ppm = std::accumulate(sorted.begin(), sorted.end(), 0.0) /
                         static_cast<double>(sorted.size());
    rep.drift_p95_ppm = quantile_sorted(sorted, 0.95);
  }
  return rep;
}

}  // namespace qbench
