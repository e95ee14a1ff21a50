#pragma once

// Document formats. Configurations and reports are JSON trees; run records and
// stage traces are newline-delimited JSON, one object per line. Hashes are
// SHA-256 over the canonical serialization (sorted keys, compact, shortest
// round-trip number formatting), so key order in a source file never matters.
//
// Non-finite reals are written as the strings "+inf" / "-inf"; an unreachable
// speedup is written with a null value and "unreachable": true.

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "qbench/audit.hpp"
#include "qbench/error.hpp"
#include "qbench/governance.hpp"
#include "qbench/harness.hpp"
#include "qbench/metrics.hpp"
#include "qbench/qubo.hpp"
#include "qbench/stats.hpp"

namespace qbench::io {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Primitives
// ---------------------------------------------------------------------------

inline std::string sha256_hex(const std::string& data) {
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), md, &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 digest failed");
  }
  static const char* hex = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(hex[md[i] >> 4]);
    out.push_back(hex[md[i] & 0xf]);
  }
  return out;
}

inline std::string canonical(const json& j) { return j.dump(); }
inline std::string canonical_hash(const json& j) { return sha256_hex(canonical(j)); }

inline json real(double v) {
  if (std::isnan(v)) return nullptr;
  if (std::isinf(v)) return v > 0 ? "+inf" : "-inf";
  return v;
}

inline double read_real(const json& j, const std::string& what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "+inf" || s == "inf") return std::numeric_limits<double>::infinity();
    if (s == "-inf") return -std::numeric_limits<double>::infinity();
  }
  throw ConfigError("field '" + what + "' must be a number");
}

/// Required member lookup with a diagnostic naming the field and document.
inline const json& member(const json& j, const std::string& key, const std::string& doc) {
  if (!j.is_object()) throw ConfigError(doc + ": expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end()) throw ConfigError(doc + ": missing field '" + key + "'");
  return *it;
}

template <class T>
T field(const json& j, const std::string& key, const std::string& doc) {
  const json& v = member(j, key, doc);
  try {
    if constexpr (std::is_same_v<T, double>) {
      return read_real(v, key);
    } else {
      return v.get<T>();
    }
  } catch (const json::exception&) {
    throw ConfigError(doc + ": field '" + key + "' has the wrong type");
  }
}

template <class T>
T field_or(const json& j, const std::string& key, const std::string& doc, T fallback) {
  if (!j.is_object()) throw ConfigError(doc + ": expected a JSON object");
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  return field<T>(j, key, doc);
}

inline std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline json parse_json(const std::string& text, const std::string& doc) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(doc + ": invalid JSON: " + e.what());
  }
}

inline json read_json(const std::filesystem::path& path) {
  return parse_json(read_text(path), path.string());
}

/// Writes to a sibling temporary file and renames it into place.
inline void write_atomic(const std::filesystem::path& path, const std::string& content) {
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("short write to '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

inline void write_json(const std::filesystem::path& path, const json& j) {
  write_atomic(path, j.dump(2) + "\n");
}

inline std::vector<json> parse_ndjson(const std::string& text, const std::string& doc) {
  std::vector<json> out;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw ConfigError(doc + " line " + std::to_string(lineno) + ": invalid JSON: " + e.what());
    }
  }
  return out;
}

inline std::string to_ndjson(const std::vector<json>& rows) {
  std::string out;
  for (const auto& r : rows) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Rubric and assessment
// ---------------------------------------------------------------------------

inline json to_json(const Rubric& r) {
  json items = json::array();
  for (const auto& it : r.items) items.push_back({{"name", it.name}, {"weight", it.weight}});
  json brackets = json::array();
  for (const auto& b : r.drift_brackets) {
    brackets.push_back({{"lower_exclusive", b.lower_exclusive},
                        {"upper_inclusive", b.upper_inclusive},
                        {"bonus", b.bonus}});
  }
  return {{"rubric_version", r.version}, {"items", items}, {"drift_brackets", brackets}};
}

inline Rubric rubric_from_json(const json& j) {
  const std::string doc = "rubric";
  Rubric r;
  r.version = field<std::string>(j, "rubric_version", doc);
  const json& items = member(j, "items", doc);
  if (!items.is_array()) throw ConfigError(doc + ": field 'items' must be an array");
  for (const auto& it : items) {
    r.items.push_back({field<std::string>(it, "name", doc + " item"),
                       field<double>(it, "weight", doc + " item")});
  }
  if (j.contains("drift_brackets")) {
    r.drift_brackets.clear();
    for (const auto& b : j.at("drift_brackets")) {
      const std::string bd = doc + " drift bracket";
      r.drift_brackets.push_back({field<double>(b, "lower_exclusive", bd),
                                  field<double>(b, "upper_inclusive", bd),
                                  field<double>(b, "bonus", bd)});
    }
  }
  validate(r);
  return r;
}

struct AssessmentDocument {
  std::string rubric_version;
  double drift_ppm = 0.0;
  std::vector<ChecklistItem> checklist;
};

inline json to_json(const AssessmentDocument& a) {
  json items = json::array();
  for (const auto& c : a.checklist) items.push_back({{"item", c.name}, {"satisfied", c.satisfied}});
  return {{"rubric_version", a.rubric_version}, {"drift_ppm", a.drift_ppm}, {"checklist", items}};
}

inline AssessmentDocument assessment_from_json(const json& j) {
  const std::string doc = "assessment";
  AssessmentDocument a;
  a.rubric_version = field<std::string>(j, "rubric_version", doc);
  a.drift_ppm = field<double>(j, "drift_ppm", doc);
  const json& items = member(j, "checklist", doc);
  if (!items.is_array()) throw ConfigError(doc + ": field 'checklist' must be an array");
  for (const auto& it : items) {
    a.checklist.push_back({field<std::string>(it, "item", doc + " checklist entry"),
                           field<bool>(it, "satisfied", doc + " checklist entry")});
  }
  return a;
}

/// Binds an assessment document to the rubric it claims to answer.
inline ReadinessAssessment bind(const Rubric& rubric, const AssessmentDocument& doc) {
  if (doc.rubric_version != rubric.version) {
    throw ConfigError("assessment targets rubric '" + doc.rubric_version + "' but rubric '" +
                      rubric.version + "' was supplied");
  }
  return make_assessment(rubric, doc.checklist, doc.drift_ppm);
}

inline json to_json(const ReadinessResult& r, const std::string& rubric_version) {
  json items = json::array();
  for (const auto& c : r.per_item_contribution) {
    items.push_back({{"name", c.name}, {"points", c.points}});
  }
  return {{"rubric_version", rubric_version},
          {"score", r.score},
          {"stage", r.stage},
          {"drift_bonus", r.drift_bonus},
          {"per_item_contribution", items}};
}

inline ReadinessResult readiness_result_from_json(const json& j) {
  const std::string doc = "readiness result";
  ReadinessResult r;
  r.score = field<double>(j, "score", doc);
  r.stage = field<int>(j, "stage", doc);
  r.drift_bonus = field<double>(j, "drift_bonus", doc);
  for (const auto& it : member(j, "per_item_contribution", doc)) {
    r.per_item_contribution.push_back(
        {field<std::string>(it, "name", doc), field<double>(it, "points", doc)});
  }
  return r;
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

inline json to_json(const Budget& b) {
  json j = {{"time_s", b.time_s}, {"cost_usd", b.cost_usd}, {"energy_j", b.energy_j}};
  if (b.max_iterations) j["max_iterations"] = *b.max_iterations;
  return j;
}

inline Budget budget_from_json(const json& j) {
  const std::string doc = "budget";
  Budget b;
  b.time_s = field<double>(j, "time_s", doc);
  b.cost_usd = field_or<double>(j, "cost_usd", doc, 0.0);
  b.energy_j = field_or<double>(j, "energy_j", doc, 0.0);
  if (j.contains("max_iterations") && !j.at("max_iterations").is_null()) {
    b.max_iterations = field<std::uint64_t>(j, "max_iterations", doc);
  }
  validate(b);
  return b;
}

/// Canonical manifest tree; `config_hash` is excluded because it is derived
/// from this tree.
inline json to_json(const RunManifest& m) {
  json j = {{"master_seed", m.master_seed},
            {"num_instances", m.num_instances},
            {"budget", to_json(m.budget)},
            {"target_quality", m.target_quality ? json(*m.target_quality) : json(nullptr)},
            {"solvers", m.solver_names},
            {"instance_generator",
             {{"id", m.instance_generator_id}, {"params", m.instance_generator_params}}},
            {"rubric_version", m.rubric_version},
            {"overshoot_tolerance", m.overshoot_tolerance},
            {"quality_policy", m.quality_policy},
            {"bootstrap",
             {{"n_boot", m.bootstrap.n_boot},
              {"alpha", m.bootstrap.alpha},
              {"seed", m.bootstrap.seed}}},
            {"sweep_taus", m.sweep_taus}};
  if (m.preregistration) j["preregistration"] = *m.preregistration;
  return j;
}

inline std::string manifest_hash(const RunManifest& m) { return canonical_hash(to_json(m)); }

inline RunManifest manifest_from_json(const json& j) {
  const std::string doc = "manifest";
  RunManifest m;
  m.master_seed = field_or<std::uint64_t>(j, "master_seed", doc, 7);
  m.num_instances = field<int>(j, "num_instances", doc);
  m.budget = budget_from_json(member(j, "budget", doc));
  if (j.contains("target_quality") && !j.at("target_quality").is_null()) {
    m.target_quality = field<double>(j, "target_quality", doc);
  }
  m.solver_names = field<std::vector<std::string>>(j, "solvers", doc);
  const json& gen = member(j, "instance_generator", doc);
  m.instance_generator_id = field<std::string>(gen, "id", doc + " instance_generator");
  m.instance_generator_params = field_or<std::map<std::string, double>>(
      gen, "params", doc + " instance_generator", {});
  m.rubric_version = field_or<std::string>(j, "rubric_version", doc, "");
  m.overshoot_tolerance = field_or<double>(j, "overshoot_tolerance", doc, 0.10);
  m.quality_policy = field_or<std::string>(j, "quality_policy", doc, qubo::kPolicySharedBounds);
  if (j.contains("bootstrap")) {
    const json& b = j.at("bootstrap");
    const std::string bd = doc + " bootstrap";
    m.bootstrap.n_boot = field_or<int>(b, "n_boot", bd, 1000);
    m.bootstrap.alpha = field_or<double>(b, "alpha", bd, 0.05);
    m.bootstrap.seed = field_or<std::uint64_t>(b, "seed", bd, kDefaultBootstrapSeed);
  }
  m.sweep_taus = field_or<std::vector<double>>(j, "sweep_taus", doc, {});
  if (j.contains("preregistration") && !j.at("preregistration").is_null()) {
    m.preregistration = field<std::string>(j, "preregistration", doc);
  }
  validate(m);
  m.config_hash = manifest_hash(m);
  return m;
}

// ---------------------------------------------------------------------------
// Run records
// ---------------------------------------------------------------------------

inline json to_json(const Meta& meta) {
  json j = json::object();
  for (const auto& [k, v] : meta) {
    std::visit([&](const auto& x) { j[k] = x; }, v);
  }
  return j;
}

inline Meta meta_from_json(const json& j) {
  Meta m;
  for (const auto& [k, v] : j.items()) {
    if (v.is_boolean()) {
      m[k] = v.get<bool>();
    } else if (v.is_number_integer()) {
      m[k] = v.get<std::int64_t>();
    } else if (v.is_number_float()) {
      m[k] = v.get<double>();
    } else if (v.is_string()) {
      m[k] = v.get<std::string>();
    } else {
      throw ConfigError("run record meta '" + k + "' must be a scalar or string");
    }
  }
  return m;
}

inline json to_json(const RunRecord& r) {
  return {{"solver", r.solver},     {"instance_id", r.instance_id}, {"quality", r.quality},
          {"time_s", r.time_s},     {"energy_j", r.energy_j},       {"cost_usd", r.cost_usd},
          {"meta", to_json(r.meta)}};
}

inline RunRecord record_from_json(const json& j) {
  const std::string doc = "run record";
  RunRecord r;
  r.solver = field<std::string>(j, "solver", doc);
  r.instance_id = field<std::int64_t>(j, "instance_id", doc);
  r.quality = field<double>(j, "quality", doc);
  r.time_s = field<double>(j, "time_s", doc);
  r.energy_j = field_or<double>(j, "energy_j", doc, 0.0);
  r.cost_usd = field_or<double>(j, "cost_usd", doc, 0.0);
  if (j.contains("meta")) r.meta = meta_from_json(j.at("meta"));
  if (!(r.quality >= 0.0 && r.quality <= 1.0)) {
    throw DomainError(doc + ": quality must lie in [0,1]");
  }
  if (!(r.time_s >= 0.0)) throw DomainError(doc + ": time_s must be nonnegative");
  return r;
}

inline std::string records_to_ndjson(std::span<const RunRecord> records) {
  std::vector<json> rows;
  rows.reserve(records.size());
  for (const auto& r : records) rows.push_back(to_json(r));
  return to_ndjson(rows);
}

inline std::vector<RunRecord> records_from_ndjson(const std::string& text,
                                                  const std::string& doc = "records") {
  std::vector<RunRecord> out;
  for (const auto& j : parse_ndjson(text, doc)) out.push_back(record_from_json(j));
  return out;
}

// ---------------------------------------------------------------------------
// QUBO instances
// ---------------------------------------------------------------------------

inline json to_json(const qubo::QuboInstance& q) {
  return {{"n", q.n}, {"density", q.density}, {"seed", q.seed}, {"values", q.values}};
}

inline qubo::QuboInstance instance_from_json(const json& j) {
  const std::string doc = "QUBO instance";
  qubo::QuboInstance q;
  q.n = field<int>(j, "n", doc);
  q.density = field<double>(j, "density", doc);
  q.seed = field<std::uint64_t>(j, "seed", doc);
  q.values = field<std::vector<double>>(j, "values", doc);
  qubo::validate(q);
  return q;
}

// ---------------------------------------------------------------------------
// Stage traces and audit reports
// ---------------------------------------------------------------------------

/// One run per line: {"run_id": ..., "stages_ms": {stage: milliseconds}}.
inline json to_json(const StageTrace& t) {
  json stages = json::object();
  for (const auto& [k, v] : t.durations) stages[k] = v * 1000.0;
  return {{"run_id", t.run_id}, {"stages_ms", stages}};
}

inline StageTrace trace_from_json(const json& j) {
  const std::string doc = "stage trace";
  StageTrace t;
  t.run_id = field_or<std::string>(j, "run_id", doc, "");
  const json& stages = member(j, "stages_ms", doc);
  if (!stages.is_object()) throw ConfigError(doc + ": 'stages_ms' must be an object");
  for (const auto& [k, v] : stages.items()) {
    const double ms = read_real(v, k);
    if (!(ms >= 0.0)) throw DomainError(doc + ": stage '" + k + "' has a negative duration");
    t.durations[k] = ms / 1000.0;
  }
  return t;
}

inline std::vector<StageTrace> traces_from_ndjson(const std::string& text,
                                                  const std::string& doc = "traces") {
  std::vector<StageTrace> out;
  for (const auto& j : parse_ndjson(text, doc)) out.push_back(trace_from_json(j));
  return out;
}

inline std::string traces_to_ndjson(std::span<const StageTrace> traces) {
  std::vector<json> rows;
  for (const auto& t : traces) rows.push_back(to_json(t));
  return to_ndjson(rows);
}

/// Drift samples: a JSON array of numbers, or {"drift_ppm": [...]}.
inline std::vector<double> drift_samples_from_json(const json& j) {
  const json& arr = j.is_object() ? member(j, "drift_ppm", "drift samples") : j;
  if (!arr.is_array()) throw ConfigError("drift samples: expected an array of numbers");
  std::vector<double> out;
  for (const auto& v : arr) out.push_back(read_real(v, "drift_ppm"));
  return out;
}

inline json optional_real(const std::optional<double>& v) {
  return v ? real(*v) : json(nullptr);
}

inline std::optional<double> read_optional_real(const json& j, const std::string& key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return read_real(j.at(key), key);
}

inline json to_json(const AuditReport& r) {
  json bottlenecks = json::array();
  for (const auto& [s, v] : r.bottlenecks) bottlenecks.push_back({{"stage", s}, {"mean_share", v}});
  return {{"mean_shares", r.mean_shares},
          {"bottlenecks", bottlenecks},
          {"drift_mean_ppm", optional_real(r.drift_mean_ppm)},
          {"drift_p95_ppm", optional_real(r.drift_p95_ppm)},
          {"replicate_count", r.replicate_count},
          {"skipped_runs", r.skipped_runs},
          {"degenerate", r.degenerate}};
}

inline AuditReport audit_report_from_json(const json& j) {
  const std::string doc = "audit report";
  AuditReport r;
  r.mean_shares = field<std::map<std::string, double>>(j, "mean_shares", doc);
  for (const auto& b : member(j, "bottlenecks", doc)) {
    r.bottlenecks.emplace_back(field<std::string>(b, "stage", doc), field<double>(b, "mean_share", doc));
  }
  r.drift_mean_ppm = read_optional_real(j, "drift_mean_ppm");
  r.drift_p95_ppm = read_optional_real(j, "drift_p95_ppm");
  r.replicate_count = field<int>(j, "replicate_count", doc);
  r.skipped_runs = field<int>(j, "skipped_runs", doc);
  r.degenerate = field<bool>(j, "degenerate", doc);
  return r;
}

// ---------------------------------------------------------------------------
// Statistics
// ---------------------------------------------------------------------------

inline json to_json(const SummaryTable& t) {
  json rows = json::array();
  for (const auto& s : t.rows) {
    rows.push_back({{"solver", s.solver},
                    {"count", s.count},
                    {"mean_quality", s.mean_quality},
                    {"mean_time_s", s.mean_time_s},
                    {"mean_energy_j", s.mean_energy_j},
                    {"mean_cost_usd", s.mean_cost_usd},
                    {"quality_p95", s.quality_p95},
                    {"time_p95", s.time_p95}});
  }
  return {{"solvers", rows}};
}

inline SummaryTable summary_from_json(const json& j) {
  const std::string doc = "summary";
  SummaryTable t;
  for (const auto& s : member(j, "solvers", doc)) {
    SolverSummary r;
    r.solver = field<std::string>(s, "solver", doc);
    r.count = field<int>(s, "count", doc);
    r.mean_quality = field<double>(s, "mean_quality", doc);
    r.mean_time_s = field<double>(s, "mean_time_s", doc);
    r.mean_energy_j = field<double>(s, "mean_energy_j", doc);
    r.mean_cost_usd = field<double>(s, "mean_cost_usd", doc);
    r.quality_p95 = field<double>(s, "quality_p95", doc);
    r.time_p95 = field<double>(s, "time_p95", doc);
    t.rows.push_back(std::move(r));
  }
  return t;
}

inline json to_json(const SpeedupOutcome& s) {
  return {{"tau", s.tau},
          {"value", optional_real(s.value)},
          {"unreachable", !s.reachable()},
          {"numerator_time", optional_real(s.numerator_time)},
          {"denominator_time", optional_real(s.denominator_time)}};
}

inline SpeedupOutcome speedup_from_json(const json& j) {
  SpeedupOutcome s;
  s.tau = field<double>(j, "tau", "speedup");
  s.value = read_optional_real(j, "value");
  s.numerator_time = read_optional_real(j, "numerator_time");
  s.denominator_time = read_optional_real(j, "denominator_time");
  return s;
}

/// The raw bootstrap distribution is exported separately.
inline json to_json(const ConfidenceInterval& ci) {
  return {{"lower", real(ci.lower)},
          {"upper", real(ci.upper)},
          {"alpha", ci.alpha},
          {"n_boot", ci.n_boot},
          {"n_unreachable_resamples", ci.n_unreachable_resamples},
          {"degenerate", ci.degenerate}};
}

inline ConfidenceInterval ci_from_json(const json& j) {
  const std::string doc = "confidence interval";
  ConfidenceInterval ci;
  ci.lower = field<double>(j, "lower", doc);
  ci.upper = field<double>(j, "upper", doc);
  ci.alpha = field<double>(j, "alpha", doc);
  ci.n_boot = field<int>(j, "n_boot", doc);
  ci.n_unreachable_resamples = field<int>(j, "n_unreachable_resamples", doc);
  ci.degenerate = field<bool>(j, "degenerate", doc);
  return ci;
}

// ---------------------------------------------------------------------------
// Governance
// ---------------------------------------------------------------------------

inline json to_json(const PreregistrationNote& p) {
  return {{"tau", p.tau ? json(*p.tau) : json(nullptr)},
          {"budget", to_json(p.budget)},
          {"instance_generator",
           {{"id", p.instance_generator_id}, {"params", p.instance_generator_params}}},
          {"solvers", p.solver_names},
          {"quality_policy", p.quality_policy},
          {"declared_metrics", p.declared_metrics},
          {"created_at", p.created_at},
          {"frozen", p.frozen}};
}

inline PreregistrationNote preregistration_from_json(const json& j) {
  const std::string doc = "preregistration";
  PreregistrationNote p;
  if (j.contains("tau") && !j.at("tau").is_null()) p.tau = field<double>(j, "tau", doc);
  p.budget = budget_from_json(member(j, "budget", doc));
  const json& gen = member(j, "instance_generator", doc);
  p.instance_generator_id = field<std::string>(gen, "id", doc);
  p.instance_generator_params = field_or<std::map<std::string, double>>(gen, "params", doc, {});
  p.solver_names = field<std::vector<std::string>>(j, "solvers", doc);
  p.quality_policy = field_or<std::string>(j, "quality_policy", doc, qubo::kPolicySharedBounds);
  p.declared_metrics = field_or<std::vector<std::string>>(j, "declared_metrics", doc, {});
  p.created_at = field_or<std::string>(j, "created_at", doc, "");
  p.frozen = field_or<bool>(j, "frozen", doc, false);
  return p;
}

inline json to_json(const AuditTrail& a) {
  json log = json::array();
  for (const auto& e : a.change_log) log.push_back({{"timestamp", e.timestamp}, {"note", e.note}});
  return {{"manifest_hash", a.manifest_hash},
          {"rubric_hash", a.rubric_hash},
          {"hash_algorithm", a.hash_algorithm},
          {"master_seed", a.master_seed},
          {"tool_version", a.tool_version},
          {"environment_fingerprint", a.environment_fingerprint},
          {"started_at", a.started_at},
          {"finished_at", a.finished_at},
          {"record_count", a.record_count},
          {"deviating", a.deviating},
          {"deviations", a.deviations},
          {"change_log", log}};
}

inline AuditTrail audit_trail_from_json(const json& j) {
  const std::string doc = "audit trail";
  AuditTrail a;
  a.manifest_hash = field<std::string>(j, "manifest_hash", doc);
  a.rubric_hash = field<std::string>(j, "rubric_hash", doc);
  a.hash_algorithm = field<std::string>(j, "hash_algorithm", doc);
  a.master_seed = field<std::uint64_t>(j, "master_seed", doc);
  a.tool_version = field<std::string>(j, "tool_version", doc);
  a.environment_fingerprint =
      field<std::map<std::string, std::string>>(j, "environment_fingerprint", doc);
  a.started_at = field<std::string>(j, "started_at", doc);
  a.finished_at = field<std::string>(j, "finished_at", doc);
  a.record_count = field<int>(j, "record_count", doc);
  a.deviating = field<bool>(j, "deviating", doc);
  a.deviations = field<std::vector<std::string>>(j, "deviations", doc);
  for (const auto& e : member(j, "change_log", doc)) {
    a.change_log.push_back({field<std::string>(e, "timestamp", doc), field<std::string>(e, "note", doc)});
  }
  return a;
}

}  // namespace qbench::io
