#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "dtn/oracle.hpp"
#include "dtn/volterra.hpp"

namespace dtn::cli {

enum ExitCode : int {
  kOk = 0,
  kVerifyFail = 1,
  kRefused = 2,         // admissibility or parse refusal
  kSolverFailure = 3,
  kIoFailure = 4,
};

/// Raw `key = value` entries per `[section]`, with source line numbers.
struct RawConfig {
  struct Entry {
    std::string value;
    int line = 0;
  };
  std::string source;     // file name used in diagnostics
  std::string base_dir;   // relative table paths resolve against this
  std::map<std::string, std::map<std::string, Entry>> sections;

  void set(const std::string& section, const std::string& key, const std::string& value);
  const Entry* find(const std::string& section, const std::string& key) const;
  /// `[section]\nkey = value` lines in sorted order.
  std::string canonical() const;
};

RawConfig parse_config_text(const std::string& text, const std::string& source = "<config>",
                            const std::string& base_dir = ".");
RawConfig load_config_file(const std::string& path);

/// Command-line overrides applied on top of the file.
struct Overrides {
  std::optional<std::string> out_dir;
  std::optional<std::size_t> grid_n;
  std::optional<double> grid_gamma;
  std::optional<double> tolerance;
  std::optional<std::string> case_name;
  std::optional<std::string> lambda_set;
};

void apply_overrides(RawConfig& raw, const Overrides& o);

struct ProblemConfig {
  explicit ProblemConfig(ProblemSpec s) : spec(std::move(s)) {}

  RawConfig raw;
  std::uint64_t hash = 0;

  Equation equation = Equation::Heat;
  std::optional<std::string> case_name;
  std::optional<ManufacturedCase> manufactured;
  ProblemSpec spec;

  std::size_t grid_n = 256;
  double grid_gamma = 2.0;
  std::optional<double> t_solve;

  KernelControls kernel;
  double asymptotic_threshold = 400.0;

  std::string out_dir = ".";
  std::string trace_file = "trace.csv";
  std::string summary_file = "summary.json";
  std::string field_file;  // empty: no field output
  std::size_t field_nx = 16;
  std::size_t field_nt = 8;

  double verify_tolerance = 1e-3;
  std::optional<double> residual_tolerance;
  std::vector<double> lambda_set;
  std::optional<double> residual_t;
  std::size_t fd_nx = 0, fd_nt = 0;
  std::vector<std::size_t> convergence_n{64, 128, 256, 512};

  double solve_horizon(std::size_t n) const;
  TimeGrid grid(std::size_t n) const;
};

/// Typed view of a raw config; throws Error(Parse | Admissibility) with a
/// `source:line: [section] key: message` diagnostic.
ProblemConfig build_config(const RawConfig& raw);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(const std::string& text);
std::string hex(std::uint64_t v);

struct CommandResult {
  int exit_code = kOk;
  std::string message;
  nlohmann::json summary;
};

CommandResult run_solve(const ProblemConfig& config);
/// Compares against the manufactured solution or, failing that, the FD
/// oracle; `trace_path` replays a stored trace CSV instead of solving.
CommandResult run_verify(const ProblemConfig& config, const std::optional<std::string>& trace_path = {});
CommandResult run_convergence(const ProblemConfig& config, const std::vector<std::size_t>& n_list);
CommandResult run_validate(const ProblemConfig& config);

/// Runs `fn`, mapping library exceptions to exit codes.
template <class F>
CommandResult guarded(F&& fn);

int exit_code_for(ErrorKind kind);

/// CSV helpers (17 significant digits).
std::string format_trace_csv(const BoundaryTrace& trace);
BoundaryTrace read_trace_csv(const std::string& path);
std::string format_field_csv(const SolutionField& field);

/// Writes via a temporary file and rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// Least-squares slope of -log(error) against log(N).
double least_squares_order(const std::vector<std::size_t>& n, const std::vector<double>& errors);

template <class F>
CommandResult guarded(F&& fn) {
  try {
    return fn();
  } catch (const Error& e) {
    return {exit_code_for(e.kind()), std::string(to_string(e.kind())) + ": " + e.what(), {}};
  } catch (const std::exception& e) {
    return {kSolverFailure, std::string("error: ") + e.what(), {}};
  }
}

}  // namespace dtn::cli
