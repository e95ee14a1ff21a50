#pragma once

// Readiness scoring (weighted checklist plus drift bonus, mapped onto a 1..9
// stage) and normalized speedup at a target quality.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "qbench/error.hpp"

namespace qbench {

// ---------------------------------------------------------------------------
// Readiness
// ---------------------------------------------------------------------------

/// Drift in (lower, upper] ppm earns `bonus` points.
struct DriftBracket {
  double lower_exclusive = 0.0;
  double upper_inclusive = 0.0;
  double bonus = 0.0;

  friend bool operator==(const DriftBracket&, const DriftBracket&) = default;
};

inline std::vector<DriftBracket> default_drift_brackets() {
  return {{0.0, 10.0, 10.0}, {10.0, 100.0, 6.0}};
}

struct ChecklistItem {
  std::string name;
  bool satisfied = false;

  friend bool operator==(const ChecklistItem&, const ChecklistItem&) = default;
};

struct ReadinessAssessment {
  std::vector<ChecklistItem> checklist;
  std::vector<double> weights;  // parallel to checklist
  double drift_ppm = 0.0;
  std::string rubric_version;

  friend bool operator==(const ReadinessAssessment&, const ReadinessAssessment&) = default;
};

struct ItemContribution {
  std::string name;
  double points = 0.0;

  friend bool operator==(const ItemContribution&, const ItemContribution&) = default;
};

struct ReadinessResult {
  double score = 0.0;
  int stage = 1;
  double drift_bonus = 0.0;
  std::vector<ItemContribution> per_item_contribution;

  friend bool operator==(const ReadinessResult&, const ReadinessResult&) = default;
};

/// Bonus for the first bracket whose half-open interval (lower, upper]
/// contains `drift_ppm`; 0 when none does (this includes drift == 0).
inline double drift_bonus(double drift_ppm,
                          std::span<const DriftBracket> brackets) {
  if (!(drift_ppm >= 0.0)) {
    throw DomainError("drift_ppm must be nonnegative, got " + std::to_string(drift_ppm));
  }
  for (const auto& b : brackets) {
    if (drift_ppm > b.lower_exclusive && drift_ppm <= b.upper_inclusive) {
      return b.bonus;
    }
  }
  return 0.0;
}

inline double drift_bonus(double drift_ppm) {
  static const std::vector<DriftBracket> kDefault = default_drift_brackets();
  return drift_bonus(drift_ppm, kDefault);
}

/// Lower-closed stage thresholds: S in [10,20) is stage 2, S >= 95 is stage 9.
inline constexpr std::array<double, 8> kStageThresholds = {10, 20, 35, 50, 65, 75, 85, 95};

inline int stage_map(double score) {
  int stage = 1;
  for (double t : kStageThresholds) {
    if (score >= t) ++stage;
  }
  return stage;
}

inline void validate(const ReadinessAssessment& a) {
  if (a.checklist.size() != a.weights.size()) {
    throw ConfigError("rubric '" + a.rubric_version + "': checklist has " +
                      std::to_string(a.checklist.size()) + " items but " +
                      std::to_string(a.weights.size()) + " weights");
  }
  for (std::size_t i = 0; i < a.weights.size(); ++i) {
    if (!(a.weights[i] >= 0.0) || !std::isfinite(a.weights[i])) {
      throw DomainError("rubric '" + a.rubric_version + "': weight for '" +
                        a.checklist[i].name + "' must be a finite nonnegative number");
    }
  }
  if (!(a.drift_ppm >= 0.0)) {
    throw DomainError("drift_ppm must be nonnegative");
  }
}

inline ReadinessResult readiness_score(const ReadinessAssessment& a,
                                       std::span<const DriftBracket> brackets) {
  validate(a);
  ReadinessResult r;
  r.per_item_contribution.reserve(a.checklist.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < a.checklist.size(); ++i) {
    const double pts = a.checklist[i].satisfied ? a.weights[i] : 0.0;
    r.per_item_contribution.push_back({a.checklist[i].name, pts});
    sum += pts;
  }
  r.drift_bonus = drift_bonus(a.drift_ppm, brackets);
  r.score = sum + r.drift_bonus;
  r.stage = stage_map(r.score);
  return r;
}

inline ReadinessResult readiness_score(const ReadinessAssessment& a) {
  const auto brackets = default_drift_brackets();
  return readiness_score(a, brackets);
}

struct RubricItem {
  std::string name;
  double weight = 0.0;

  friend bool operator==(const RubricItem&, const RubricItem&) = default;
};

/// Versioned scoring rubric: checklist items with weights and the drift
/// bracket table. Lives in a configuration document whose hash goes into
/// the audit trail.
struct Rubric {
  std::string version;
  std::vector<RubricItem> items;
  std::vector<DriftBracket> drift_brackets = default_drift_brackets();

  friend bool operator==(const Rubric&, const Rubric&) = default;
};

/// Thirteen-item checklist with uniform weights summing to 90, so a complete
/// checklist plus the best drift bonus scores exactly 100.
inline Rubric default_rubric() {
  static const char* const kItems[] = {
      "problem_formulation", "encoding_specification", "prototype_components",
      "integrated_pipeline", "reproducible_runs",      "error_budget",
      "classical_baseline",  "matched_budget_protocol", "change_control",
      "audit_trail",         "service_level_objectives", "external_replication",
      "governed_deployment"};
  Rubric r;
  r.version = "qrl-default-v1";
  for (const char* name : kItems) r.items.push_back({name, 90.0 / 13.0});
  return r;
}

inline void validate(const Rubric& r) {
  if (r.version.empty()) throw ConfigError("rubric has no version string");
  if (r.items.empty()) throw ConfigError("rubric '" + r.version + "' has no checklist items");
  for (const auto& it : r.items) {
    if (it.name.empty()) throw ConfigError("rubric '" + r.version + "' has an unnamed item");
    if (!(it.weight >= 0.0) || !std::isfinite(it.weight)) {
      throw DomainError("rubric '" + r.version + "': weight for '" + it.name +
                        "' must be a finite nonnegative number");
    }
  }
  for (const auto& b : r.drift_brackets) {
    if (!(b.lower_exclusive < b.upper_inclusive)) {
      throw ConfigError("rubric '" + r.version + "': drift bracket bounds are not increasing");
    }
  }
}

/// Pairs attested checklist answers with the rubric's weights. Answers must
/// name the rubric's items in the rubric's order.
inline ReadinessAssessment make_assessment(const Rubric& rubric,
                                           const std::vector<ChecklistItem>& answers,
                                           double drift_ppm) {
  validate(rubric);
  if (answers.size() != rubric.items.size()) {
    throw ConfigError("assessment has " + std::to_string(answers.size()) +
                      " checklist items but rubric '" + rubric.version + "' defines " +
                      std::to_string(rubric.items.size()));
  }
  ReadinessAssessment a;
  a.rubric_version = rubric.version;
  a.drift_ppm = drift_ppm;
  for (std::size_t i = 0; i < answers.size(); ++i) {
    if (answers[i].name != rubric.items[i].name) {
      throw ConfigError("assessment item " + std::to_string(i) + " is '" + answers[i].name +
                        "' but rubric '" + rubric.version + "' expects '" +
                        rubric.items[i].name + "'");
    }
    a.checklist.push_back(answers[i]);
    a.weights.push_back(rubric.items[i].weight);
  }
  validate(a);
  return a;
}

// ---------------------------------------------------------------------------
// Normalized speedup at target quality
// ---------------------------------------------------------------------------

struct QualityTimeEntry {
  std::int64_t instance_id = 0;
  double time = 0.0;     // seconds, or any unit shared by both series
  double quality = 0.0;  // in [0,1]
};

struct QualityTimeSeries {
  std::vector<QualityTimeEntry> entries;
};

/// Ratio of the fastest qualifying time of A over that of B. An empty value
/// means at least one side never reached tau (the ratio is undefined); use
/// `as_double()` only where +inf is an acceptable stand-in.
struct SpeedupOutcome {
  std::optional<double> value;
  double tau = 0.0;
  std::optional<double> numerator_time;
  std::optional<double> denominator_time;

  bool reachable() const { return value.has_value(); }
  double as_double() const {
    return value ? *value : std::numeric_limits<double>::infinity();
  }

  friend bool operator==(const SpeedupOutcome&, const SpeedupOutcome&) = default;
};

namespace detail {

inline void check_tau(double tau) {
  if (!(tau >= 0.0 && tau <= 1.0)) {
    throw DomainError("tau must lie in [0,1], got " + std::to_string(tau));
  }
}

inline std::optional<double> min_time_at_quality(const QualityTimeSeries& s, double tau) {
  std::optional<double> best;
  for (const auto& e : s.entries) {
    if (!(e.quality >= 0.0 && e.quality <= 1.0) || !(e.time >= 0.0)) {
      throw DomainError("series entry for instance " + std::to_string(e.instance_id) +
                        " has quality outside [0,1] or negative time");
    }
    if (e.quality >= tau && (!best || e.time < *best)) best = e.time;
  }
  return best;
}

}  // namespace detail

inline SpeedupOutcome normalized_speedup(const QualityTimeSeries& a,
                                         const QualityTimeSeries& b, double tau) {
  detail::check_tau(tau);
  SpeedupOutcome out;
  out.tau = tau;
  out.numerator_time = detail::min_time_at_quality(a, tau);
  out.denominator_time = detail::min_time_at_quality(b, tau);
  if (out.numerator_time && out.denominator_time) {
    out.value = *out.numerator_time / *out.denominator_time;
  }
  return out;
}

inline std::vector<std::pair<double, SpeedupOutcome>> tau_sweep(const QualityTimeSeries& a,
                                                                const QualityTimeSeries& b,
                                                                std::span<const double> taus) {
  for (double t : taus) detail::check_tau(t);
  std::vector<std::pair<double, SpeedupOutcome>> out;
  out.reserve(taus.size());
  for (double t : taus) out.emplace_back(t, normalized_speedup(a, b, t));
  return out;
}

}  // namespace qbench
