#include <filesystem>
#include <fstream>
#include <sstream>
#include <unistd.h>

#include "doctest.h"
#include "dtn/cli.hpp"

using namespace dtn;
using namespace dtn::cli;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    static int counter = 0;
    path = fs::temp_directory_path() / ("dtn_cli_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
    fs::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
  }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

std::string slurp(const std::string& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ProblemConfig config_for(const std::string& text, const std::string& out) {
  RawConfig raw = parse_config_text(text, "test.ini");
  raw.set("output", "dir", out);
  return build_config(raw);
}

const char* kHeatExpr = R"(
[problem]
equation = heat
horizon = 1
[curve.lower]
family = linear
slope = -1
[curve.upper]
family = linear
slope = 1
intercept = 1
[data]
q0 = exp(x)
f0 = 1
g0 = exp(1 + 2*t)
[grid]
n = 512
[verify]
fd_nx = 256
fd_nt = 256
)";

}  // namespace

TEST_CASE("config parsing diagnostics") {
  auto raw = parse_config_text("# c\n[problem]\nequation = heat # tail\ncase = heat-exp\n", "a.ini");
  REQUIRE(raw.find("problem", "equation"));
  CHECK(raw.find("problem", "equation")->value == "heat");
  CHECK(raw.find("problem", "case")->line == 4);

  auto expect_parse = [](const std::string& text, const std::string& fragment) {
    try {
      build_config(parse_config_text(text, "bad.ini"));
      FAIL("accepted: " << text);
    } catch (const Error& e) {
      CHECK(exit_code_for(e.kind()) == kRefused);
      CHECK_MESSAGE(std::string(e.what()).find(fragment) != std::string::npos, std::string(e.what()));
    }
  };
  expect_parse("[problem]\nequation = heat\n[grid]\nsize = 3\n", "bad.ini:4: [grid] unknown key 'size'");
  expect_parse("[problem]\ncase = heat-exp\n[grid]\nn = abc\n", "bad.ini:4: [grid] n: expected a number");
  expect_parse("[problem]\ncase = heat-exp\ncase = heat-quad\n", "duplicate");
  expect_parse("equation = heat\n", "outside");
  expect_parse("[nowhere]\n", "unknown section");
  expect_parse("[problem]\ncase = heat-exp\n[data]\nq0 = x\n", "implied by the manufactured case");
  expect_parse("[problem]\ncase = ls-plane\nequation = heat\n", "does not match");
  expect_parse("[problem]\nequation = heat\n[curve.lower]\nslope = 0\n[curve.upper]\nslope = 0\nintercept = 1\n[data]\nq0 = x +\nf0 = 0\ng0 = 1\n",
               "bad.ini:9: [data] q0");
  expect_parse("[problem]\nequation = heat\n[curve.lower]\nslope = 0\n[curve.upper]\nslope = 0\nintercept = 1\n[data]\nq0 = x + i\nf0 = 0\ng0 = 1\n",
               "real-valued");

  try {
    build_config(parse_config_text("[problem]\nequation = heat\n[curve.lower]\nslope = 0\n[curve.upper]\nslope = 0\nintercept = -1\n[data]\nq0 = 0\nf0 = 0\ng0 = 0\n", "x.ini"));
    FAIL("crossing curves accepted");
  } catch (const Error& e) {
    CHECK(exit_code_for(e.kind()) == kRefused);
  }
}

TEST_CASE("config hash and defaults") {
  auto a = build_config(parse_config_text("[problem]\ncase = heat-exp\n"));
  auto b = build_config(parse_config_text("[problem]\n  case=heat-exp  \n\n# x\n"));
  auto c = build_config(parse_config_text("[problem]\ncase = heat-exp\n[grid]\nn = 64\n"));
  CHECK(a.hash == b.hash);
  CHECK(a.hash != c.hash);
  CHECK(a.grid_n == 256);
  CHECK(a.verify_tolerance == 1e-3);
  CHECK(build_config(parse_config_text("[problem]\ncase = ls-plane\n")).verify_tolerance == 1e-2);
  CHECK(hex(fnv1a("")) == "cbf29ce484222325");
  CHECK(hex(fnv1a("a")) == "af63dc4c8601ec8c");
}

TEST_CASE("solve writes deterministic artifacts") {
  TempDir dir;
  auto cfg = config_for("[problem]\ncase = heat-exp\n[grid]\nn = 256\n[output]\nfield = field.csv\nfield_nx = 4\nfield_nt = 2\n", dir.path.string());
  auto r1 = run_solve(cfg);
  REQUIRE(r1.exit_code == kOk);
  const std::string first = slurp(dir / "trace.csv");
  auto r2 = run_solve(cfg);
  REQUIRE(r2.exit_code == kOk);
  CHECK(slurp(dir / "trace.csv") == first);
  CHECK(first.rfind("t,f1_re,f1_im,g1_re,g1_im\n", 0) == 0);

  auto trace = read_trace_csv(dir / "trace.csv");
  CHECK(trace.grid.nodes.size() == 257);
  for (const auto& f : trace.f1) CHECK(std::abs(f - 1.0) < 1e-3);

  auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["config_hash"] == hex(cfg.hash));
  CHECK(summary["admissibility"]["admissible"] == true);
  CHECK(summary.contains("timings"));
  CHECK(slurp(dir / "field.csv").rfind("x,t,q_re,q_im\n", 0) == 0);
}

TEST_CASE("refusals and exit codes") {
  TempDir dir;
  auto cfg = config_for(
      "[problem]\nequation = ls\n[curve.lower]\nslope = 1\n[curve.upper]\nslope = 1.5\nintercept = 1\n"
      "[data]\nq0 = 1\nf0 = 1\ng0 = 1\n",
      dir.path.string());
  auto r = run_solve(cfg);
  CHECK(r.exit_code == kRefused);
  CHECK(r.message.find("alpha") != std::string::npos);
  CHECK(r.summary["admissibility"]["admissible"] == false);
  CHECK(run_validate(cfg).exit_code == kRefused);

  auto ok = config_for("[problem]\ncase = heat-exp\n", "/proc/no/such/dir");
  CHECK(run_solve(ok).exit_code == kIoFailure);
  CHECK(exit_code_for(ErrorKind::StepFailure) == kSolverFailure);
  CHECK(exit_code_for(ErrorKind::Admissibility) == kRefused);
}

TEST_CASE("verify") {
  TempDir dir;
  auto lin = config_for("[problem]\ncase = heat-linear-x\n[grid]\nn = 128\n", dir.path.string());
  auto r = run_verify(lin);
  CHECK(r.exit_code == kOk);
  CHECK(r.summary["max_error_f1"].get<double>() <= 1e-6);
  CHECK(r.summary["max_error_g1"].get<double>() <= 1e-6);
  CHECK(r.summary["residuals"].size() == 9);

  auto pw = config_for("[problem]\ncase = ls-plane{k=1}\n[grid]\nn = 512\n", dir.path.string());
  CHECK(run_verify(pw).exit_code == kOk);

  auto fd = config_for(kHeatExpr, dir.path.string());
  auto rf = run_verify(fd);
  CHECK_MESSAGE(rf.exit_code == kOk, rf.message);

  // replay a corrupted trace
  auto exp = config_for("[problem]\ncase = heat-exp\n[grid]\nn = 64\n", dir.path.string());
  REQUIRE(run_solve(exp).exit_code == kOk);
  auto trace = read_trace_csv(dir / "trace.csv");
  for (auto& f : trace.f1) f += 0.1;
  write_file_atomic(dir / "bad.csv", format_trace_csv(trace));
  auto bad = run_verify(exp, dir / "bad.csv");
  CHECK(bad.exit_code == kVerifyFail);
  CHECK(bad.summary["max_normalized_residual"].get<double>() > bad.summary["residual_tolerance"].get<double>());
  CHECK(run_verify(exp, dir / "missing.csv").exit_code == kIoFailure);

  auto none = build_config(parse_config_text(
      "[problem]\nequation = heat\n[curve.lower]\nslope = 0\n[curve.upper]\nslope = 0\nintercept = 1\n[data]\nq0 = 0\nf0 = 0\ng0 = 0\n"));
  CHECK(run_verify(none).exit_code == kRefused);
}

TEST_CASE("convergence") {
  TempDir dir;
  auto exp = config_for("[problem]\ncase = heat-exp\n", dir.path.string());
  auto r = run_convergence(exp, {64, 128, 256, 512});
  REQUIRE(r.exit_code == kOk);
  const auto& rows = r.summary["rows"];
  for (std::size_t k = 1; k < rows.size(); ++k) {
    CHECK(rows[k]["max_error_g1"].get<double>() < rows[k - 1]["max_error_g1"].get<double>());
  }
  CHECK(rows.back()["empirical_order"].get<double>() >= 1.5);
  CHECK(slurp(dir / "convergence.csv").rfind("N,max_error_f1,max_error_g1,empirical_order\n", 0) == 0);
  CHECK(nlohmann::json::parse(slurp(dir / "convergence.json"))["config_hash"] == hex(exp.hash));

  auto flat = config_for("[problem]\ncase = heat-const\n", dir.path.string());
  auto rc = run_convergence(flat, {64, 128});
  for (const auto& row : rc.summary["rows"]) CHECK(row["max_error_f1"].get<double>() < 1e-12);

  CHECK(least_squares_order({10, 20, 40}, {1.0, 0.25, 0.0625}) == doctest::Approx(2.0));
}
