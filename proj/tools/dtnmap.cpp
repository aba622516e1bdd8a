#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "dtn/cli.hpp"

using namespace dtn::cli;

namespace {

struct Args {
  std::string config;
  std::string out;
  std::size_t grid_n = 0;
  double grid_gamma = 0.0;
  double tol = 0.0;
  std::string case_name;
  std::string lambda_set;
  std::string trace;
  std::vector<std::size_t> n_list;
};

void add_common(CLI::App* cmd, Args& a) {
  cmd->add_option("--config", a.config, "problem configuration file");
  cmd->add_option("--out", a.out, "output directory");
  cmd->add_option("--grid-n", a.grid_n, "number of time intervals")->check(CLI::PositiveNumber);
  cmd->add_option("--grid-gamma", a.grid_gamma, "grading exponent (>= 1)");
  cmd->add_option("--tol", a.tol, "verification tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--case", a.case_name, "manufactured case name");
}

RawConfig load(const Args& a, const CLI::App* cmd) {
  RawConfig raw;
  if (!a.config.empty()) {
    raw = load_config_file(a.config);
  } else {
    raw.source = "<command line>";
  }
  Overrides o;
  if (cmd->count("--out")) o.out_dir = a.out;
  if (cmd->count("--grid-n")) o.grid_n = a.grid_n;
  if (cmd->count("--grid-gamma")) o.grid_gamma = a.grid_gamma;
  if (cmd->count("--tol")) o.tolerance = a.tol;
  if (cmd->count("--case")) o.case_name = a.case_name;
  if (cmd->get_option_no_throw("--lambda-set") && cmd->count("--lambda-set")) o.lambda_set = a.lambda_set;
  apply_overrides(raw, o);
  return raw;
}

int report(const CommandResult& r) {
  (r.exit_code == kOk ? std::cout : std::cerr) << r.message << "\n";
  return r.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dirichlet-to-Neumann map on moving domains (heat and linear Schroedinger)"};
  app.require_subcommand(1);
  Args a;

  auto* solve = app.add_subcommand("solve", "compute the Neumann traces (and optionally the field)");
  add_common(solve, a);
  auto* verify = app.add_subcommand("verify", "check traces against an oracle and the global relation");
  add_common(verify, a);
  verify->add_option("--lambda-set", a.lambda_set, "comma-separated real lambda values");
  verify->add_option("--trace", a.trace, "replay a stored trace CSV instead of solving");
  auto* conv = app.add_subcommand("convergence", "error table over a sequence of grids");
  add_common(conv, a);
  conv->add_option("--n-list", a.n_list, "grid sizes (default from [verify] convergence_n)")->delimiter(',');
  auto* validate = app.add_subcommand("validate", "check curve admissibility only");
  add_common(validate, a);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kRefused;
  }

  CLI::App* cmd = app.get_subcommands().front();
  CommandResult result = guarded([&]() -> CommandResult {
    const ProblemConfig config = build_config(load(a, cmd));
    if (cmd == solve) return run_solve(config);
    if (cmd == verify) {
      std::optional<std::string> trace;
      if (!a.trace.empty()) trace = a.trace;
      return run_verify(config, trace);
    }
    if (cmd == conv) return run_convergence(config, a.n_list.empty() ? config.convergence_n : a.n_list);
    return run_validate(config);
  });
  return report(result);
}
