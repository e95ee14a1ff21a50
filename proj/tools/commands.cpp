#include "commands.hpp"

#include <CLI11.hpp>

#include <iomanip>
#include <iostream>
#include <sstream>

#include "qbench/audit.hpp"
#include "qbench/governance.hpp"
#include "qbench/harness.hpp"
#include "qbench/io.hpp"
#include "qbench/metrics.hpp"
#include "qbench/qubo.hpp"
#include "qbench/stats.hpp"

namespace qbench::cli {

namespace fs = std::filesystem;
using io::json;

namespace {

std::string fmt_real(double v, int precision = 6) {
  std::ostringstream ss;
  ss << std::setprecision(precision) << v;
  return ss.str();
}

std::string fmt_outcome(const SpeedupOutcome& s) {
  return s.reachable() ? fmt_real(*s.value) : std::string("UNREACHABLE");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory '" + dir.string() + "'");
}

/// Runs `body`, mapping every failure to a diagnostic and exit code 1.
template <class F>
int guarded(const char* command, std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const std::exception& e) {
    err << "qbench " << command << ": error: " << e.what() << "\n";
    return 1;
  }
}

Rubric load_rubric(const std::optional<fs::path>& path) {
  return path ? io::rubric_from_json(io::read_json(*path)) : default_rubric();
}

qubo::QuboInstance make_instance(const RunManifest& m, std::uint64_t seed) {
  if (m.instance_generator_id != "qubo") {
    throw ConfigError("unknown instance generator '" + m.instance_generator_id + "'");
  }
  const auto param = [&](const std::string& k, double fallback) {
    const auto it = m.instance_generator_params.find(k);
    return it == m.instance_generator_params.end() ? fallback : it->second;
  };
  return qubo::generate_qubo(static_cast<int>(param("n", 24)), param("density", 0.25), seed);
}

json speedup_section(std::span<const RunRecord> records, const RunManifest& m,
                     std::vector<double>* distribution) {
  const std::string& a = m.solver_names[0];
  const std::string& b = m.solver_names[1];
  const double tau = *m.target_quality;
  const SpeedupOutcome point = speedup_from_records(records, a, b, tau);
  const ConfidenceInterval ci = paired_bootstrap_ci(records, a, b, tau, m.bootstrap.n_boot,
                                                    m.bootstrap.alpha, m.bootstrap.seed);
  *distribution = ci.distribution;
  return {{"solver_a", a},
          {"solver_b", b},
          {"tau", tau},
          {"outcome", io::to_json(point)},
          {"ci", io::to_json(ci)},
          {"bootstrap_seed", m.bootstrap.seed}};
}

}  // namespace

// ---------------------------------------------------------------------------
// score
// ---------------------------------------------------------------------------

int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("score", err, [&] {
    const Rubric rubric = load_rubric(args.rubric);
    const auto doc = io::assessment_from_json(io::read_json(args.assessment));
    const ReadinessAssessment a = io::bind(rubric, doc);
    const ReadinessResult r = readiness_score(a, rubric.drift_brackets);

    out << "rubric " << rubric.version << "\n";
    for (const auto& c : r.per_item_contribution) {
      out << "  " << std::left << std::setw(28) << c.name << fmt_real(c.points) << "\n";
    }
    out << "  " << std::left << std::setw(28) << "drift_bonus" << fmt_real(r.drift_bonus)
        << "  (drift " << fmt_real(a.drift_ppm) << " ppm)\n";
    out << "S=" << fmt_real(r.score) << " QRL=" << r.stage << "\n";

    if (args.out) {
      ensure_dir(*args.out);
      io::write_json(*args.out / "readiness.json", io::to_json(r, rubric.version));
    }
    return 0;
  });
}

// ---------------------------------------------------------------------------
// bench
// ---------------------------------------------------------------------------

int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("bench", err, [&] {
    AuditTrail trail;
    trail.started_at = utc_timestamp();
    trail.environment_fingerprint = environment_fingerprint();

    RunManifest m = io::manifest_from_json(io::read_json(args.manifest));
    if (args.seed) {
      m.master_seed = *args.seed;
      trail.change_log.push_back({trail.started_at, "master_seed overridden on the command line"});
    }
    if (args.iteration_budget) {
      m.budget.max_iterations = *args.iteration_budget;
      trail.change_log.push_back(
          {trail.started_at, "iteration budget overridden on the command line"});
    }
    validate(m);
    m.config_hash = io::manifest_hash(m);

    const Rubric rubric = load_rubric(args.rubric);
    if (!m.rubric_version.empty() && m.rubric_version != rubric.version) {
      trail.change_log.push_back({trail.started_at, "manifest names rubric '" + m.rubric_version +
                                                        "' but rubric '" + rubric.version +
                                                        "' was supplied"});
    }

    PreregistrationNote prereg;
    if (m.preregistration) {
      const fs::path p = args.manifest.parent_path() / *m.preregistration;
      prereg = io::preregistration_from_json(io::read_json(p));
    } else {
      prereg = preregistration_from(m, trail.started_at);
    }
    trail.deviations = deviations(prereg, m);
    trail.deviating = !trail.deviations.empty();
    if (trail.deviating) {
      err << "qbench bench: warning: run deviates from its preregistration in:";
      for (const auto& d : trail.deviations) err << " " << d;
      err << "\n";
    }

    const auto registry = qubo::bundled_solvers();
    for (const auto& name : m.solver_names) {
      bool found = false;
      for (const auto& s : registry) found = found || s.name == name;
      if (!found) throw ConfigError("unknown solver '" + name + "'");
    }

    std::vector<StageTrace> traces;
    std::vector<json> instance_docs;
    BenchmarkOptions<qubo::QuboInstance> opts;
    opts.calibrate = qubo::make_calibrator(m.quality_policy);
    opts.stage_traces = &traces;
    const auto records = run_benchmark<qubo::QuboInstance>(
        m, registry,
        [&](std::uint64_t, std::uint64_t seed) {
          auto q = make_instance(m, seed);
          instance_docs.push_back(io::to_json(q));
          return q;
        },
        opts);
    trail.finished_at = utc_timestamp();

    const SummaryTable summary = summarize(records);
    int violations = 0;
    int failures = 0;
    for (const auto& r : records) {
      violations += meta_flag(r.meta, "budget_violation") ? 1 : 0;
      failures += r.meta.count("error") ? 1 : 0;
    }

    json report = {{"manifest_hash", m.config_hash},
                   {"summary", io::to_json(summary)},
                   {"energy_cost_provenance", "solver-declared pass-through; not metered"},
                   {"budget_violations", violations},
                   {"solver_errors", failures},
                   {"deviating", trail.deviating}};
    std::vector<double> distribution;
    const bool compare = m.solver_names.size() >= 2;
    if (compare && m.target_quality) {
      report["speedup"] = speedup_section(records, m, &distribution);
    }
    if (compare && !m.sweep_taus.empty()) {
      json rows = json::array();
      for (const auto& [tau, s] : tau_sweep(series_for(records, m.solver_names[0]),
                                            series_for(records, m.solver_names[1]),
                                            m.sweep_taus)) {
        rows.push_back(io::to_json(s));
      }
      report["sweep"] = rows;
    }

    trail.manifest_hash = m.config_hash;
    trail.rubric_hash = io::canonical_hash(io::to_json(rubric));
    trail.master_seed = m.master_seed;
    trail.record_count = static_cast<int>(records.size());

    ensure_dir(args.out);
    io::write_atomic(args.out / "records.ndjson", io::records_to_ndjson(records));
    io::write_atomic(args.out / "traces.ndjson", io::traces_to_ndjson(traces));
    io::write_atomic(args.out / "instances.ndjson", io::to_ndjson(instance_docs));
    io::write_json(args.out / "manifest.json", io::to_json(m));
    io::write_json(args.out / "preregistration.json", io::to_json(prereg));
    io::write_json(args.out / "summary.json", report);
    if (!distribution.empty()) {
      json dist = json::array();
      for (double v : distribution) dist.push_back(io::real(v));
      io::write_json(args.out / "bootstrap_distribution.json", dist);
    }
    io::write_json(args.out / "audit_trail.json", io::to_json(trail));

    out << "records " << records.size() << " (" << m.num_instances << " instances x "
        << m.solver_names.size() << " solvers), budget " << fmt_real(m.budget.time_s) << " s";
    if (m.budget.max_iterations) out << ", " << *m.budget.max_iterations << " iterations";
    out << "\n";
    out << std::left << std::setw(12) << "solver" << std::setw(12) << "E[Q]" << std::setw(12)
        << "Q p95" << std::setw(12) << "E[T] s" << std::setw(12) << "T p95 s" << "count\n";
    for (const auto& r : summary.rows) {
      out << std::left << std::setw(12) << r.solver << std::setw(12) << fmt_real(r.mean_quality)
          << std::setw(12) << fmt_real(r.quality_p95) << std::setw(12) << fmt_real(r.mean_time_s)
          << std::setw(12) << fmt_real(r.time_p95) << r.count << "\n";
    }
    if (report.contains("speedup")) {
      const auto& sp = report["speedup"];
      const auto point = io::speedup_from_json(sp["outcome"]);
      const auto ci = io::ci_from_json(sp["ci"]);
      out << "S_norm(" << fmt_real(*m.target_quality) << ") " << m.solver_names[0] << "/"
          << m.solver_names[1] << " = " << fmt_outcome(point) << "  " << 100 * (1 - ci.alpha)
          << "% CI [" << fmt_real(ci.lower) << ", " << fmt_real(ci.upper) << "]";
      if (ci.n_unreachable_resamples) {
        out << " (" << ci.n_unreachable_resamples << " unreachable resamples)";
      }
      out << "\n";
    }
    if (violations) out << "budget violations: " << violations << "\n";
    if (failures) out << "solver errors: " << failures << "\n";
    out << "artifacts written to " << args.out.string() << "\n";
    return 0;
  });
}

// ---------------------------------------------------------------------------
// audit
// ---------------------------------------------------------------------------

int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("audit", err, [&] {
    const auto traces = io::traces_from_ndjson(io::read_text(args.traces), args.traces.string());
    if (traces.empty()) throw DomainError("traces file '" + args.traces.string() + "' is empty");
    std::vector<double> drift;
    if (args.drift) drift = io::drift_samples_from_json(io::read_json(*args.drift));
    const AuditReport rep =
        audit_bottlenecks(traces, args.top_k,
                          args.drift ? std::optional<std::span<const double>>(drift) : std::nullopt);

    out << "replicates " << rep.replicate_count;
    if (rep.skipped_runs) out << " (" << rep.skipped_runs << " with zero total time)";
    out << "\nmean shares\n";
    for (const auto& [s, v] : rep.mean_shares) {
      out << "  " << std::left << std::setw(24) << s << fmt_real(v, 12) << "\n";
    }
    if (rep.degenerate) {
      out << "bottlenecks: none (degenerate: every run has zero total time)\n";
    } else {
      out << "bottlenecks (top " << args.top_k << ")\n";
      for (const auto& [s, v] : rep.bottlenecks) {
        out << "  " << std::left << std::setw(24) << s << fmt_real(v, 12) << "\n";
      }
    }
    if (rep.drift_mean_ppm) {
      out << "drift mean " << fmt_real(*rep.drift_mean_ppm) << " ppm, p95 "
          << fmt_real(*rep.drift_p95_ppm) << " ppm\n";
    }
    if (args.out) {
      ensure_dir(*args.out);
      io::write_json(*args.out / "audit_report.json", io::to_json(rep));
    }
    return 0;
  });
}

// ---------------------------------------------------------------------------
// sweep
// ---------------------------------------------------------------------------

int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err) {
  return guarded("sweep", err, [&] {
    const auto records = io::records_from_ndjson(io::read_text(args.records), args.records.string());
    for (const auto* name : {&args.solver_a, &args.solver_b}) {
      bool found = false;
      for (const auto& r : records) found = found || r.solver == *name;
      if (!found) throw ConfigError("unknown solver '" + *name + "' (no records)");
    }
    const auto a = series_for(records, args.solver_a);
    const auto b = series_for(records, args.solver_b);
    const auto rows = tau_sweep(a, b, args.taus);

    out << "tau        S_norm(" << args.solver_a << " / " << args.solver_b << ")\n";
    json table = json::array();
    for (const auto& [tau, s] : rows) {
      out << std::left << std::setw(11) << fmt_real(tau) << fmt_outcome(s) << "\n";
      table.push_back(io::to_json(s));
    }
    if (args.out) {
      ensure_dir(*args.out);
      io::write_json(*args.out / "sweep.json",
                     {{"solver_a", args.solver_a}, {"solver_b", args.solver_b}, {"rows", table}});
    }
    return 0;
  });
}

// ---------------------------------------------------------------------------
// argv dispatch
// ---------------------------------------------------------------------------

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Matched-budget solver benchmarking, readiness scoring and stage audits"};
  app.require_subcommand(1);

  ScoreArgs score;
  std::string score_rubric, score_out;
  auto* sc = app.add_subcommand("score", "Score a readiness assessment against a rubric");
  sc->add_option("--assessment", score.assessment, "Assessment document (JSON)")->required();
  sc->add_option("--rubric", score_rubric, "Rubric document (JSON); built-in default if omitted");
  sc->add_option("--out", score_out, "Directory for readiness.json");

  BenchArgs bench;
  std::string bench_rubric;
  std::uint64_t bench_seed = 0, bench_iters = 0;
  auto* bc = app.add_subcommand("bench", "Run a matched-budget benchmark from a manifest");
  bc->add_option("--manifest", bench.manifest, "Run manifest (JSON)")->required();
  bc->add_option("--out", bench.out, "Output directory for the artifact set")->required();
  bc->add_option("--rubric", bench_rubric, "Rubric document to hash into the audit trail");
  auto* seed_opt = bc->add_option("--seed", bench_seed, "Override the manifest master seed");
  auto* iter_opt = bc->add_option("--iteration-budget", bench_iters,
                                  "Fixed iteration count per solver call (bit-reproducible)")
                       ->check(CLI::PositiveNumber);

  AuditArgs audit;
  std::string audit_drift, audit_out;
  auto* ac = app.add_subcommand("audit", "Attribute run time to pipeline stages");
  ac->add_option("--traces", audit.traces, "Stage traces (newline-delimited JSON)")->required();
  ac->add_option("--top-k", audit.top_k, "Number of bottleneck stages")->check(CLI::PositiveNumber);
  ac->add_option("--drift", audit_drift, "Drift samples in ppm (JSON array)");
  ac->add_option("--out", audit_out, "Directory for audit_report.json");

  SweepArgs sweep;
  std::string sweep_out;
  auto* wc = app.add_subcommand("sweep", "Normalized speedup over a list of target qualities");
  wc->add_option("--records", sweep.records, "Run records (newline-delimited JSON)")->required();
  wc->add_option("--solver-a", sweep.solver_a, "Numerator solver")->required();
  wc->add_option("--solver-b", sweep.solver_b, "Denominator solver")->required();
  wc->add_option("--tau", sweep.taus, "Target quality (repeatable)")
      ->check(CLI::Range(0.0, 1.0))
      ->take_all();
  wc->add_option("--out", sweep_out, "Directory for sweep.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  if (*sc) {
    if (!score_rubric.empty()) score.rubric = score_rubric;
    if (!score_out.empty()) score.out = score_out;
    return cmd_score(score, out, err);
  }
  if (*bc) {
    if (!bench_rubric.empty()) bench.rubric = bench_rubric;
    if (seed_opt->count()) bench.seed = bench_seed;
    if (iter_opt->count()) bench.iteration_budget = bench_iters;
    return cmd_bench(bench, out, err);
  }
  if (*ac) {
    if (!audit_drift.empty()) audit.drift = audit_drift;
    if (!audit_out.empty()) audit.out = audit_out;
    return cmd_audit(audit, out, err);
  }
  if (!sweep_out.empty()) sweep.out = sweep_out;
  return cmd_sweep(sweep, out, err);
}

}  // namespace qbench::cli
