#pragma once

// Matched-budget benchmark orchestration.
//
// Every selected solver sees the same instance and the same Budget. Seeds are
// derived from (master seed, instance index, solver index) so they do not
// depend on execution order or on which other solvers are registered.

#include <cstdint>
#include <exception>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qbench/audit.hpp"
#include "qbench/budget.hpp"
#include "qbench/error.hpp"

namespace qbench {

using MetaValue = std::variant<bool, std::int64_t, double, std::string>;
using Meta = std::map<std::string, MetaValue>;

inline std::optional<double> meta_number(const Meta& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) return std::nullopt;
  if (const auto* d = std::get_if<double>(&it->second)) return *d;
  if (const auto* i = std::get_if<std::int64_t>(&it->second)) return static_cast<double>(*i);
  return std::nullopt;
}

inline bool meta_flag(const Meta& meta, const std::string& key) {
  const auto it = meta.find(key);
  if (it == meta.end()) return false;
  const auto* b = std::get_if<bool>(&it->second);
  return b != nullptr && *b;
}

struct RunRecord {
  std::string solver;
  std::int64_t instance_id = 0;
  double quality = 0.0;
  double time_s = 0.0;
  double energy_j = 0.0;  // solver-declared, not metered
  double cost_usd = 0.0;  // solver-declared, not metered
  Meta meta;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct SolveOutcome {
  double quality = 0.0;
  Meta meta;
};

template <class Instance>
struct SolverSpec {
  std::string name;
  std::function<SolveOutcome(const Instance&, const Budget&, std::uint64_t seed)> solve;
};

struct BootstrapSettings {
  int n_boot = 1000;
  double alpha = 0.05;
  std::uint64_t seed = 42;

  friend bool operator==(const BootstrapSettings&, const BootstrapSettings&) = default;
};

/// Preregistered run configuration. `config_hash` is filled in from the
/// canonical form of the source document and is not part of that form.
struct RunManifest {
  std::uint64_t master_seed = 7;
  int num_instances = 1;
  Budget budget{};
  std::optional<double> target_quality;
  std::vector<std::string> solver_names;
  std::string instance_generator_id = "qubo";
  std::map<std::string, double> instance_generator_params;
  std::string rubric_version;
  double overshoot_tolerance = 0.10;
  std::string quality_policy = "shared_bounds";
  BootstrapSettings bootstrap{};
  std::vector<double> sweep_taus;
  std::optional<std::string> preregistration;  // path, relative to the manifest
  std::string config_hash;

  friend bool operator==(const RunManifest&, const RunManifest&) = default;
};

inline void validate(const RunManifest& m) {
  validate(m.budget);
  if (m.num_instances < 1) throw ConfigError("num_instances must be at least 1");
  if (m.target_quality && !(*m.target_quality >= 0.0 && *m.target_quality <= 1.0)) {
    throw DomainError("target_quality must lie in [0,1]");
  }
  for (double t : m.sweep_taus) {
    if (!(t >= 0.0 && t <= 1.0)) throw DomainError("sweep taus must lie in [0,1]");
  }
  if (m.solver_names.empty()) throw ConfigError("manifest names no solvers");
  std::set<std::string> seen;
  for (const auto& n : m.solver_names) {
    if (!seen.insert(n).second) throw ConfigError("solver '" + n + "' listed twice");
  }
  if (!(m.overshoot_tolerance >= 0.0)) throw ConfigError("overshoot_tolerance must be >= 0");
  if (m.bootstrap.n_boot < 1) throw ConfigError("bootstrap n_boot must be positive");
  if (!(m.bootstrap.alpha > 0.0 && m.bootstrap.alpha <= 1.0)) {
    throw ConfigError("bootstrap alpha must lie in (0,1]");
  }
}

// ---------------------------------------------------------------------------
// Seeds
// ---------------------------------------------------------------------------

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Counter-mode hash of the triple, truncated to 63 bits.
inline constexpr std::uint64_t derive_seed(std::uint64_t master_seed, std::uint64_t instance_index,
                                           std::uint64_t solver_index) {
  const std::uint64_t h = splitmix64(splitmix64(splitmix64(master_seed) ^ instance_index) ^
                                     (solver_index + 0x632be59bd9b4e019ULL));
  return h & 0x7fffffffffffffffULL;
}

/// Stream index reserved for instance generation; solver indices stay below it.
inline constexpr std::uint64_t kInstanceSeedStream = 0xffffffffULL;

inline std::uint64_t instance_seed(std::uint64_t master_seed, std::uint64_t instance_index) {
  return derive_seed(master_seed, instance_index, kInstanceSeedStream);
}

// ---------------------------------------------------------------------------
// Runner
// ---------------------------------------------------------------------------

template <class Instance>
struct BenchmarkOptions {
  /// Called once per instance after all solvers ran, with that instance's
  /// records; may rewrite qualities against shared reference bounds.
  std::function<void(const Instance&, std::span<RunRecord>)> calibrate;
  /// Receives one StageTrace per instance (generate / solve:<name> / calibrate).
  std::vector<StageTrace>* stage_traces = nullptr;
};

namespace detail {

template <class Instance>
std::vector<const SolverSpec<Instance>*> resolve_solvers(const RunManifest& m,
                                                         std::span<const SolverSpec<Instance>> registry,
                                                         std::vector<std::uint64_t>& solver_index) {
  std::set<std::string> names;
  for (const auto& s : registry) {
    if (s.name.empty()) throw ConfigError("registry contains a solver with an empty name");
    if (!names.insert(s.name).second) {
      throw ConfigError("registry contains solver '" + s.name + "' twice");
    }
  }
  for (const auto& n : m.solver_names) {
    if (!names.count(n)) throw ConfigError("unknown solver '" + n + "'");
  }
  std::vector<const SolverSpec<Instance>*> out;
  for (const auto& s : registry) {
    for (std::size_t k = 0; k < m.solver_names.size(); ++k) {
      if (m.solver_names[k] == s.name) {
        out.push_back(&s);
        solver_index.push_back(k);
      }
    }
  }
  return out;
}

}  // namespace detail

/// Runs every selected solver on every generated instance, sequentially.
/// Records come out instance-major, solvers in registry order. A solver that
/// throws yields a quality-0 record tagged with "error"; a call whose measured
/// time exceeds the budget by more than the overshoot tolerance is tagged
/// "budget_violation". Neither stops the run.
template <class Instance, class Generator>
std::vector<RunRecord> run_benchmark(const RunManifest& manifest,
                                     std::span<const SolverSpec<Instance>> registry,
                                     Generator&& instance_generator,
                                     const BenchmarkOptions<Instance>& options = {}) {
  validate(manifest);
  std::vector<std::uint64_t> solver_index;
  const auto solvers = detail::resolve_solvers(manifest, registry, solver_index);

  std::vector<RunRecord> records;
  records.reserve(static_cast<std::size_t>(manifest.num_instances) * solvers.size());
  const double limit = manifest.budget.time_s * (1.0 + manifest.overshoot_tolerance);

  for (int i = 0; i < manifest.num_instances; ++i) {
    StageTrace trace;
    trace.run_id = "instance-" + std::to_string(i);
    const auto idx = static_cast<std::uint64_t>(i);

    std::optional<Instance> instance;
    {
      ScopedStageTimer t(trace, "generate");
      instance.emplace(instance_generator(idx, instance_seed(manifest.master_seed, idx)));
    }

    const std::size_t first = records.size();
    for (std::size_t k = 0; k < solvers.size(); ++k) {
      const auto& spec = *solvers[k];
      const std::uint64_t seed = derive_seed(manifest.master_seed, idx, solver_index[k]);
      RunRecord rec;
      rec.solver = spec.name;
      rec.instance_id = i;

      const auto start = MonotonicClock::now();
      try {
        SolveOutcome out = spec.solve(*instance, manifest.budget, seed);
        rec.time_s = seconds_since(start);
        rec.meta = std::move(out.meta);
        if (out.quality >= 0.0 && out.quality <= 1.0) {
          rec.quality = out.quality;
        } else {
          rec.quality = 0.0;
          rec.meta["error"] = std::string("solver returned quality outside [0,1]");
        }
      } catch (const std::exception& e) {
        rec.time_s = seconds_since(start);
        rec.quality = 0.0;
        rec.meta["error"] = std::string(e.what());
      } catch (...) {
        rec.time_s = seconds_since(start);
        rec.quality = 0.0;
        rec.meta["error"] = std::string("unknown exception");
      }
      add_stage(trace, "solve:" + spec.name, rec.time_s);

      rec.energy_j = meta_number(rec.meta, "energy_j").value_or(0.0);
      rec.cost_usd = meta_number(rec.meta, "cost_usd").value_or(0.0);
      rec.meta["seed"] = static_cast<std::int64_t>(seed);
      if (rec.time_s > limit) rec.meta["budget_violation"] = true;
      records.push_back(std::move(rec));
    }

    if (options.calibrate) {
      ScopedStageTimer t(trace, "calibrate");
      options.calibrate(*instance, std::span<RunRecord>(records.data() + first,
                                                        records.size() - first));
    }
    if (options.stage_traces) options.stage_traces->push_back(std::move(trace));
  }
  return records;
}

template <class Instance, class Generator>
std::vector<RunRecord> run_benchmark(const RunManifest& manifest,
                                     const std::vector<SolverSpec<Instance>>& registry,
                                     Generator&& instance_generator,
                                     const BenchmarkOptions<Instance>& options = {}) {
  return run_benchmark<Instance>(manifest, std::span<const SolverSpec<Instance>>(registry),
                                 std::forward<Generator>(instance_generator), options);
}

}  // namespace qbench
