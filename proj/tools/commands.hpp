#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace qbench::cli {

struct ScoreArgs {
  std::optional<std::filesystem::path> rubric;  // built-in default rubric when absent
  std::filesystem::path assessment;
  std::optional<std::filesystem::path> out;
};

struct BenchArgs {
  std::filesystem::path manifest;
  std::filesystem::path out;
  std::optional<std::filesystem::path> rubric;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> iteration_budget;
};

struct AuditArgs {
  std::filesystem::path traces;
  int top_k = 3;
  std::optional<std::filesystem::path> drift;
  std::optional<std::filesystem::path> out;
};

struct SweepArgs {
  std::filesystem::path records;
  std::string solver_a;
  std::string solver_b;
  std::vector<double> taus;
  std::optional<std::filesystem::path> out;
};

// Each command returns the process exit code: 0 when every output was
// written and nothing failed validation, 1 otherwise.
int cmd_score(const ScoreArgs& args, std::ostream& out, std::ostream& err);
int cmd_bench(const BenchArgs& args, std::ostream& out, std::ostream& err);
int cmd_audit(const AuditArgs& args, std::ostream& out, std::ostream& err);
int cmd_sweep(const SweepArgs& args, std::ostream& out, std::ostream& err);

/// Parses argv and dispatches; usage errors exit with 2.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qbench::cli
