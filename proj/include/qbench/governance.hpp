#pragma once

// Governance artifacts written next to every benchmark: a preregistration
// note freezing the comparison setup and an audit trail tying the outputs to
// the exact configuration, rubric and environment that produced them.

#include <sys/utsname.h>

#include <chrono>
#include <ctime>
#include <map>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "qbench/budget.hpp"
#include "qbench/harness.hpp"

namespace qbench {

inline constexpr const char* kToolVersion = "0.3.0";
inline constexpr const char* kHashAlgorithm = "sha256";

inline std::string utc_timestamp(std::chrono::system_clock::time_point tp =
                                     std::chrono::system_clock::now()) {
  const std::time_t t = std::chrono::system_clock::to_time_t(tp);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

struct ChangeLogEntry {
  std::string timestamp;
  std::string note;

  friend bool operator==(const ChangeLogEntry&, const ChangeLogEntry&) = default;
};

struct AuditTrail {
  std::string manifest_hash;
  std::string rubric_hash;
  std::string hash_algorithm = kHashAlgorithm;
  std::uint64_t master_seed = 0;
  std::string tool_version = kToolVersion;
  std::map<std::string, std::string> environment_fingerprint;
  std::string started_at;
  std::string finished_at;
  int record_count = 0;
  bool deviating = false;
  std::vector<std::string> deviations;
  std::vector<ChangeLogEntry> change_log;

  friend bool operator==(const AuditTrail&, const AuditTrail&) = default;
};

inline std::map<std::string, std::string> environment_fingerprint() {
  std::map<std::string, std::string> env;
#if defined(__clang__)
  env["compiler"] = "clang " __clang_version__;
#elif defined(__GNUC__)
  env["compiler"] = "gcc " __VERSION__;
#else
  env["compiler"] = "unknown";
#endif
  env["cplusplus"] = std::to_string(__cplusplus);
#ifdef NDEBUG
  env["assertions"] = "off";
#else
  env["assertions"] = "on";
#endif
  utsname u{};
  if (uname(&u) == 0) {
    env["os"] = std::string(u.sysname) + " " + u.release;
    env["machine"] = u.machine;
  }
  env["hardware_concurrency"] = std::to_string(std::thread::hardware_concurrency());
  env["tool_version"] = kToolVersion;
  return env;
}

struct PreregistrationNote {
  std::optional<double> tau;
  Budget budget{};
  std::string instance_generator_id;
  std::map<std::string, double> instance_generator_params;
  std::vector<std::string> solver_names;
  std::string quality_policy;
  std::vector<std::string> declared_metrics;
  std::string created_at;
  bool frozen = false;

  friend bool operator==(const PreregistrationNote&, const PreregistrationNote&) = default;
};

inline std::vector<std::string> default_declared_metrics() {
  return {"mean_quality", "mean_time_s", "mean_energy_j", "mean_cost_usd",
          "quality_p95",  "time_p95",    "s_norm_ci"};
}

inline PreregistrationNote preregistration_from(const RunManifest& m, std::string created_at,
                                                bool frozen = true) {
  PreregistrationNote p;
  p.tau = m.target_quality;
  p.budget = m.budget;
  p.instance_generator_id = m.instance_generator_id;
  p.instance_generator_params = m.instance_generator_params;
  p.solver_names = m.solver_names;
  p.quality_policy = m.quality_policy;
  p.declared_metrics = default_declared_metrics();
  p.created_at = std::move(created_at);
  p.frozen = frozen;
  return p;
}

/// Names of the preregistered fields the manifest departs from. An unfrozen
/// note never reports deviations.
inline std::vector<std::string> deviations(const PreregistrationNote& note, const RunManifest& m) {
  std::vector<std::string> out;
  if (!note.frozen) return out;
  if (note.tau != m.target_quality) out.push_back("tau");
  if (note.budget != m.budget) out.push_back("budget");
  if (note.instance_generator_id != m.instance_generator_id) out.push_back("instance_generator_id");
  if (note.instance_generator_params != m.instance_generator_params) {
    out.push_back("instance_generator_params");
  }
  if (note.solver_names != m.solver_names) out.push_back("solver_names");
  if (note.quality_policy != m.quality_policy) out.push_back("quality_policy");
  return out;
}

}  // namespace qbench
