#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <map>
#include <numeric>
#include <random>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "qbench/error.hpp"
#include "qbench/harness.hpp"
#include "qbench/metrics.hpp"
#include "qbench/quantile.hpp"

namespace qbench {

struct SolverSummary {
  std::string solver;
  double mean_quality = 0.0;
  double mean_time_s = 0.0;
  double mean_energy_j = 0.0;  // solver-declared
  double mean_cost_usd = 0.0;  // solver-declared
  double quality_p95 = 0.0;
  double time_p95 = 0.0;
  int count = 0;

  friend bool operator==(const SolverSummary&, const SolverSummary&) = default;
};

/// One row per solver, in order of first appearance in the records.
struct SummaryTable {
  std::vector<SolverSummary> rows;

  const SolverSummary* find(const std::string& solver) const {
    for (const auto& r : rows) {
      if (r.solver == solver) return &r;
    }
    return nullptr;
  }

  friend bool operator==(const SummaryTable&, const SummaryTable&) = default;
};

inline SummaryTable summarize(std::span<const RunRecord> records) {
  if (records.empty()) throw DomainError("cannot summarize an empty record set");
  std::vector<std::string> order;
  std::map<std::string, std::vector<const RunRecord*>> by_solver;
  for (const auto& r : records) {
    auto& v = by_solver[r.solver];
    if (v.empty()) order.push_back(r.solver);
    v.push_back(&r);
  }

  // Sorted before summing so duplicated or permuted inputs give identical means.
  const auto mean = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  };

  SummaryTable table;
  for (const auto& name : order) {
    const auto& recs = by_solver[name];
    std::vector<double> q, t, e, c;
    for (const auto* r : recs) {
      q.push_back(r->quality);
      t.push_back(r->time_s);
      e.push_back(r->energy_j);
      c.push_back(r->cost_usd);
    }
    SolverSummary s;
    s.solver = name;
    s.count = static_cast<int>(recs.size());
    s.mean_quality = mean(q);
    s.mean_time_s = mean(t);
    s.mean_energy_j = mean(e);
    s.mean_cost_usd = mean(c);
    s.quality_p95 = quantile(q, 0.95);
    s.time_p95 = quantile(t, 0.95);
    table.rows.push_back(std::move(s));
  }
  return table;
}

inline QualityTimeSeries series_for(std::span<const RunRecord> records, const std::string& solver) {
  QualityTimeSeries s;
  for (const auto& r : records) {
    if (r.solver == solver) s.entries.push_back({r.instance_id, r.time_s, r.quality});
  }
  return s;
}

/// S_norm(tau) of solver_a over solver_b across all records.
inline SpeedupOutcome speedup_from_records(std::span<const RunRecord> records,
                                           const std::string& solver_a,
                                           const std::string& solver_b, double tau) {
  return normalized_speedup(series_for(records, solver_a), series_for(records, solver_b), tau);
}

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.05;
  int n_boot = 0;
  int n_unreachable_resamples = 0;
  bool degenerate = false;  // every resample was unreachable
  std::vector<double> distribution;  // bootstrap values in resample order, +inf when unreachable

  friend bool operator==(const ConfidenceInterval&, const ConfidenceInterval&) = default;
};

inline constexpr std::uint64_t kDefaultBootstrapSeed = 42;

/// Instance-paired records for two solvers, keyed by instance id.
struct PairedRecords {
  std::vector<std::int64_t> instance_ids;  // ascending
  std::vector<QualityTimeEntry> a;         // parallel to instance_ids
  std::vector<QualityTimeEntry> b;
};

inline PairedRecords pair_records(std::span<const RunRecord> records, const std::string& solver_a,
                                  const std::string& solver_b) {
  std::map<std::int64_t, const RunRecord*> a, b;
  for (const auto& r : records) {
    auto* side = r.solver == solver_a ? &a : r.solver == solver_b ? &b : nullptr;
    if (!side) continue;
    if (!side->emplace(r.instance_id, &r).second) {
      throw DomainError("solver '" + r.solver + "' has more than one record for instance " +
                        std::to_string(r.instance_id));
    }
  }
  if (a.empty()) throw DomainError("no records for solver '" + solver_a + "'");
  if (b.empty()) throw DomainError("no records for solver '" + solver_b + "'");
  PairedRecords p;
  for (const auto& [id, ra] : a) {
    const auto it = b.find(id);
    if (it == b.end()) {
      throw DomainError("instance " + std::to_string(id) + " has no record for '" + solver_b + "'");
    }
    p.instance_ids.push_back(id);
    p.a.push_back({id, ra->time_s, ra->quality});
    p.b.push_back({id, it->second->time_s, it->second->quality});
  }
  if (b.size() != a.size()) {
    throw DomainError("records are unpaired: '" + solver_b + "' covers instances '" + solver_a +
                      "' does not");
  }
  return p;
}

/// S_norm(tau) over the paired instances selected by `picks` (indices into
/// the paired arrays, with repetition).
inline SpeedupOutcome resample_speedup(const PairedRecords& p, std::span<const std::size_t> picks,
                                       double tau) {
  QualityTimeSeries sa, sb;
  sa.entries.reserve(picks.size());
  sb.entries.reserve(picks.size());
  for (std::size_t k : picks) {
    sa.entries.push_back(p.a[k]);
    sb.entries.push_back(p.b[k]);
  }
  return normalized_speedup(sa, sb, tau);
}

/// Paired bootstrap over instance ids: each resample draws as many ids as
/// there are distinct instances, with replacement, and keeps both solvers'
/// records for every drawn id. Unreachable resamples enter the quantiles as
/// +inf and are counted.
inline ConfidenceInterval paired_bootstrap_ci(std::span<const RunRecord> records,
                                              const std::string& solver_a,
                                              const std::string& solver_b, double tau,
                                              int n_boot = 1000, double alpha = 0.05,
                                              std::uint64_t seed = kDefaultBootstrapSeed) {
  if (!(tau >= 0.0 && tau <= 1.0)) throw DomainError("tau must lie in [0,1]");
  if (n_boot < 1) throw DomainError("n_boot must be positive");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw DomainError("alpha must lie in (0,1]");
  const PairedRecords p = pair_records(records, solver_a, solver_b);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, p.instance_ids.size() - 1);
  std::vector<std::size_t> picks(p.instance_ids.size());

  ConfidenceInterval ci;
  ci.alpha = alpha;
  ci.n_boot = n_boot;
  ci.distribution.reserve(n_boot);
  for (int b = 0; b < n_boot; ++b) {
    for (auto& k : picks) k = pick(rng);
    const SpeedupOutcome s = resample_speedup(p, picks, tau);
    if (!s.reachable()) ++ci.n_unreachable_resamples;
    ci.distribution.push_back(s.as_double());
  }

  std::vector<double> sorted = ci.distribution;
  std::sort(sorted.begin(), sorted.end());
  ci.lower = quantile_sorted(sorted, alpha / 2.0);
  ci.upper = quantile_sorted(sorted, 1.0 - alpha / 2.0);
  ci.degenerate = ci.n_unreachable_resamples == n_boot;
  return ci;
}

}  // namespace qbench
