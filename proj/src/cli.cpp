#include "dtn/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <unistd.h>

namespace dtn::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(s);
  while (std::getline(is, cur, sep)) out.push_back(trim(cur));
  return out;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"problem", {"equation", "horizon", "case"}},
      {"curve.lower", {"family", "slope", "intercept", "coefficients", "file"}},
      {"curve.upper", {"family", "slope", "intercept", "coefficients", "file"}},
      {"data", {"q0", "f0", "g0", "q0_table", "f0_table", "g0_table"}},
      {"grid", {"n", "gamma", "t_solve"}},
      {"quadrature", {"abs_tol", "rel_tol", "max_subdivisions", "asymptotic_threshold"}},
      {"output", {"dir", "trace", "summary", "field", "field_nx", "field_nt"}},
      {"verify",
       {"tolerance", "residual_tolerance", "lambda_set", "residual_t", "fd_nx", "fd_nt",
        "convergence_n"}},
  };
  return s;
}

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

void RawConfig::set(const std::string& section, const std::string& key, const std::string& value) {
  sections[section][key] = Entry{value, 0};
}

const RawConfig::Entry* RawConfig::find(const std::string& section, const std::string& key) const {
  auto s = sections.find(section);
  if (s == sections.end()) return nullptr;
  auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

std::string RawConfig::canonical() const {
  std::ostringstream os;
  for (const auto& [name, entries] : sections) {
    os << "[" << name << "]\n";
    for (const auto& [k, e] : entries) os << k << " = " << e.value << "\n";
  }
  return os.str();
}

RawConfig parse_config_text(const std::string& text, const std::string& source,
                            const std::string& base_dir) {
  RawConfig raw;
  raw.source = source;
  raw.base_dir = base_dir;
  std::istringstream is(text);
  std::string line, section;
  int number = 0;
  auto error = [&](const std::string& msg) {
    fail(ErrorKind::Parse, source + ":" + std::to_string(number) + ": " + msg);
  };
  while (std::getline(is, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!schema().count(section)) error("unknown section [" + section + "]");
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) error("expected 'key = value'");
    if (section.empty()) error("key outside of any [section]");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!schema().at(section).count(key)) error("[" + section + "] unknown key '" + key + "'");
    if (value.empty()) error("[" + section + "] " + key + ": empty value");
    if (raw.sections[section].count(key)) error("[" + section + "] " + key + ": duplicate key");
    raw.sections[section][key] = RawConfig::Entry{value, number};
  }
  return raw;
}

RawConfig load_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const fs::path p(path);
  return parse_config_text(ss.str(), path, p.has_parent_path() ? p.parent_path().string() : ".");
}

void apply_overrides(RawConfig& raw, const Overrides& o) {
  if (o.out_dir) raw.set("output", "dir", *o.out_dir);
  if (o.grid_n) raw.set("grid", "n", std::to_string(*o.grid_n));
  if (o.grid_gamma) raw.set("grid", "gamma", fmt17(*o.grid_gamma));
  if (o.tolerance) raw.set("verify", "tolerance", fmt17(*o.tolerance));
  if (o.case_name) raw.set("problem", "case", *o.case_name);
  if (o.lambda_set) raw.set("verify", "lambda_set", *o.lambda_set);
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Parse:
    case ErrorKind::Admissibility:
    case ErrorKind::InvalidArgument:
      return kRefused;
    case ErrorKind::Io:
      return kIoFailure;
    default:
      return kSolverFailure;
  }
}

double ProblemConfig::solve_horizon(std::size_t n) const {
  return t_solve ? *t_solve : default_solve_horizon(spec.horizon(), n);
}

TimeGrid ProblemConfig::grid(std::size_t n) const {
  return TimeGrid::graded(solve_horizon(n), n, grid_gamma);
}

namespace {

class Reader {
 public:
  explicit Reader(const RawConfig& raw) : raw_(raw) {}

  [[noreturn]] void error(const std::string& section, const std::string& key,
                          const std::string& msg, ErrorKind kind = ErrorKind::Parse) const {
    const auto* e = raw_.find(section, key);
    std::string where = raw_.source;
    if (e && e->line > 0) where += ":" + std::to_string(e->line);
    fail(kind, where + ": [" + section + "] " + key + ": " + msg);
  }

  bool has(const std::string& section, const std::string& key) const {
    return raw_.find(section, key) != nullptr;
  }
  bool has_section(const std::string& section) const { return raw_.sections.count(section) > 0; }

  std::optional<std::string> str(const std::string& section, const std::string& key) const {
    const auto* e = raw_.find(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> num(const std::string& section, const std::string& key) const {
    const auto s = str(section, key);
    if (!s) return std::nullopt;
    try {
      std::size_t pos = 0;
      const double v = std::stod(*s, &pos);
      if (pos != s->size() || !std::isfinite(v)) throw std::invalid_argument("");
      return v;
    } catch (const std::exception&) {
      error(section, key, "expected a number, got '" + *s + "'");
    }
  }

  std::optional<std::size_t> count(const std::string& section, const std::string& key) const {
    const auto v = num(section, key);
    if (!v) return std::nullopt;
    if (*v < 0 || *v != std::floor(*v)) error(section, key, "expected a non-negative integer");
    return static_cast<std::size_t>(*v);
  }

  std::optional<std::vector<double>> list(const std::string& section, const std::string& key) const {
    const auto s = str(section, key);
    if (!s) return std::nullopt;
    std::vector<double> out;
    for (const auto& part : split(*s, ',')) {
      try {
        std::size_t pos = 0;
        out.push_back(std::stod(part, &pos));
        if (pos != part.size()) throw std::invalid_argument("");
      } catch (const std::exception&) {
        error(section, key, "expected a comma-separated list of numbers");
      }
    }
    return out;
  }

  std::string path(const std::string& section, const std::string& key) const {
    const fs::path p(*str(section, key));
    return p.is_absolute() ? p.string() : (fs::path(raw_.base_dir) / p).string();
  }

 private:
  const RawConfig& raw_;
};

std::vector<std::vector<double>> read_table(const std::string& path, std::size_t min_columns) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::Io, "cannot read table '" + path + "'");
  std::vector<std::vector<double>> rows;
  std::string line;
  int number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ';', ',');
    std::vector<double> row;
    bool numeric = true;
    for (const auto& part : split(line, ',')) {
      try {
        std::size_t pos = 0;
        row.push_back(std::stod(part, &pos));
        if (pos != part.size()) numeric = false;
      } catch (const std::exception&) {
        numeric = false;
      }
    }
    if (!numeric) {
      if (rows.empty()) continue;  // header
      fail(ErrorKind::Parse, path + ":" + std::to_string(number) + ": non-numeric row");
    }
    if (row.size() < min_columns) {
      fail(ErrorKind::Parse, path + ":" + std::to_string(number) + ": expected at least " +
                                 std::to_string(min_columns) + " columns");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

BoundaryCurve read_curve(const Reader& r, const std::string& section) {
  const std::string family = r.str(section, "family").value_or("linear");
  if (family == "linear") {
    if (!r.has(section, "slope")) r.error(section, "slope", "required for a linear curve");
    return BoundaryCurve::linear(*r.num(section, "slope"), r.num(section, "intercept").value_or(0.0));
  }
  if (family == "polynomial") {
    if (!r.has(section, "coefficients")) r.error(section, "coefficients", "required for a polynomial");
    return BoundaryCurve::polynomial(*r.list(section, "coefficients"));
  }
  if (family == "table") {
    if (!r.has(section, "file")) r.error(section, "file", "required for a tabulated curve");
    const auto rows = read_table(r.path(section, "file"), 2);
    std::vector<double> t, l;
    for (const auto& row : rows) {
      t.push_back(row[0]);
      l.push_back(row[1]);
    }
    try {
      return BoundaryCurve::tabulated(std::move(t), std::move(l));
    } catch (const Error& e) {
      r.error(section, "file", e.what());
    }
  }
  r.error(section, "family", "expected linear, polynomial or table, got '" + family + "'");
}

DataFunction read_data(const Reader& r, const std::string& name, const std::string& var) {
  const std::string table_key = name + "_table";
  if (r.has("data", name) && r.has("data", table_key)) {
    r.error("data", table_key, "give either " + name + " or " + table_key + ", not both");
  }
  if (r.has("data", table_key)) {
    const auto rows = read_table(r.path("data", table_key), 2);
    std::vector<double> knots;
    std::vector<Complex> values;
    for (const auto& row : rows) {
      knots.push_back(row[0]);
      values.emplace_back(row[1], row.size() > 2 ? row[2] : 0.0);
    }
    try {
      return DataFunction::from_table(std::move(knots), std::move(values));
    } catch (const Error& e) {
      r.error("data", table_key, e.what());
    }
  }
  if (!r.has("data", name)) r.error("data", name, "missing (expression in " + var + " or table)");
  try {
    return DataFunction::from_expression(*r.str("data", name), var);
  } catch (const Error& e) {
    r.error("data", name, e.what());
  }
}

Equation parse_equation(const Reader& r) {
  const std::string s = *r.str("problem", "equation");
  if (s == "heat") return Equation::Heat;
  if (s == "ls" || s == "LS" || s == "schroedinger") return Equation::LS;
  r.error("problem", "equation", "expected heat or ls, got '" + s + "'");
}

}  // namespace

ProblemConfig build_config(const RawConfig& raw) {
  Reader r(raw);
  const std::optional<std::string> case_name = r.str("problem", "case");
  Equation equation = Equation::Heat;
  std::optional<Equation> case_eq;
  if (case_name) {
    try {
      case_eq = manufactured_case(*case_name).equation();
    } catch (const Error& e) {
      r.error("problem", "case", e.what());
    }
  }
  if (r.has("problem", "equation")) {
    equation = parse_equation(r);
    if (case_eq && *case_eq != equation) {
      r.error("problem", "equation", "does not match the equation of case '" + *case_name + "'");
    }
  } else if (case_eq) {
    equation = *case_eq;
  } else {
    r.error("problem", "equation", "missing");
  }
  const double T = r.num("problem", "horizon").value_or(1.0);
  if (!(T > 0.0)) r.error("problem", "horizon", "must be positive");

  const bool has_lower = r.has_section("curve.lower"), has_upper = r.has_section("curve.upper");
  std::optional<CurvePair> pair;
  try {
    if (has_lower || has_upper) {
      if (!has_lower) r.error("curve.lower", "family", "section missing");
      if (!has_upper) r.error("curve.upper", "family", "section missing");
      pair.emplace(read_curve(r, "curve.lower"), read_curve(r, "curve.upper"), T);
    } else if (case_name) {
      const CurvePair d = default_pair(equation);
      pair.emplace(d.lower(), d.upper(), T);
    } else {
      r.error("curve.lower", "family", "section missing");
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::Parse) throw;
    fail(e.kind() == ErrorKind::Admissibility ? ErrorKind::Admissibility : ErrorKind::Parse,
         raw.source + ": curves: " + e.what());
  }

  std::optional<ManufacturedCase> manufactured;
  std::optional<ProblemSpec> spec;
  if (case_name) {
    for (const char* k : {"q0", "f0", "g0", "q0_table", "f0_table", "g0_table"}) {
      if (r.has("data", k)) r.error("data", k, "data are implied by the manufactured case");
    }
    manufactured.emplace(manufactured_case(*case_name, *pair));
    spec = manufactured->spec();
  } else {
    spec = ProblemSpec{equation, *pair, read_data(r, "q0", "x"), read_data(r, "f0", "t"),
                         read_data(r, "g0", "t")};
  }
  if (equation == Equation::Heat && !spec->real_data()) {
    r.error("data", "q0", "heat data must be real-valued (no 'i')");
  }

  ProblemConfig c(std::move(*spec));
  c.raw = raw;
  c.hash = fnv1a(raw.canonical());
  c.equation = equation;
  c.case_name = case_name;
  c.manufactured = std::move(manufactured);

  c.grid_n = r.count("grid", "n").value_or(256);
  if (c.grid_n < 8) r.error("grid", "n", "must be at least 8");
  c.grid_gamma = r.num("grid", "gamma").value_or(2.0);
  if (!(c.grid_gamma >= 1.0)) r.error("grid", "gamma", "must be >= 1");
  if (auto ts = r.num("grid", "t_solve")) {
    if (!(*ts > 0.0 && *ts <= T)) r.error("grid", "t_solve", "must lie in (0, horizon]");
    c.t_solve = *ts;
  }

  c.kernel.abs_tol = r.num("quadrature", "abs_tol").value_or(c.kernel.abs_tol);
  c.kernel.rel_tol = r.num("quadrature", "rel_tol").value_or(c.kernel.rel_tol);
  c.kernel.max_subdivisions = r.count("quadrature", "max_subdivisions").value_or(c.kernel.max_subdivisions);
  c.asymptotic_threshold = r.num("quadrature", "asymptotic_threshold").value_or(400.0);
  if (!(c.kernel.abs_tol > 0.0)) r.error("quadrature", "abs_tol", "must be positive");

  c.out_dir = r.str("output", "dir").value_or(".");
  c.trace_file = r.str("output", "trace").value_or("trace.csv");
  c.summary_file = r.str("output", "summary").value_or("summary.json");
  c.field_file = r.str("output", "field").value_or("");
  c.field_nx = r.count("output", "field_nx").value_or(16);
  c.field_nt = r.count("output", "field_nt").value_or(8);
  if (c.field_nx == 0 || c.field_nt == 0) r.error("output", "field_nx", "field sizes must be positive");

  c.verify_tolerance = r.num("verify", "tolerance").value_or(c.equation == Equation::Heat ? 1e-3 : 1e-2);
  c.residual_tolerance = r.num("verify", "residual_tolerance");
  c.lambda_set = r.list("verify", "lambda_set").value_or(default_lambda_set());
  c.residual_t = r.num("verify", "residual_t");
  c.fd_nx = r.count("verify", "fd_nx").value_or(0);
  c.fd_nt = r.count("verify", "fd_nt").value_or(0);
  if (auto l = r.list("verify", "convergence_n")) {
    c.convergence_n.clear();
    for (double v : *l) {
      if (v < 8 || v != std::floor(v)) r.error("verify", "convergence_n", "entries must be integers >= 8");
      c.convergence_n.push_back(static_cast<std::size_t>(v));
    }
  }
  return c;
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const fs::path target(path);
  std::error_code ec;
  if (target.has_parent_path()) fs::create_directories(target.parent_path(), ec);
  if (ec) fail(ErrorKind::Io, "cannot create directory for '" + path + "': " + ec.message());
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorKind::Io, "cannot write '" + tmp + "'");
    out << content;
    out.flush();
    if (!out) fail(ErrorKind::Io, "write failed for '" + tmp + "'");
  }
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorKind::Io, "cannot move output into place at '" + path + "'");
  }
}

std::string format_trace_csv(const BoundaryTrace& trace) {
  std::ostringstream os;
  os << "t,f1_re,f1_im,g1_re,g1_im\n";
  for (std::size_t k = 0; k < trace.grid.nodes.size(); ++k) {
    os << fmt17(trace.grid.nodes[k]) << ',' << fmt17(trace.f1[k].real()) << ','
       << fmt17(trace.f1[k].imag()) << ',' << fmt17(trace.g1[k].real()) << ','
       << fmt17(trace.g1[k].imag()) << '\n';
  }
  return os.str();
}

BoundaryTrace read_trace_csv(const std::string& path) {
  const auto rows = read_table(path, 5);
  if (rows.size() < 2) fail(ErrorKind::Parse, path + ": trace needs at least two rows");
  BoundaryTrace trace;
  for (const auto& row : rows) {
    trace.grid.nodes.push_back(row[0]);
    trace.f1.emplace_back(row[1], row[2]);
    trace.g1.emplace_back(row[3], row[4]);
  }
  if (trace.grid.nodes.front() != 0.0) fail(ErrorKind::Parse, path + ": trace must start at t = 0");
  for (std::size_t k = 1; k < trace.grid.nodes.size(); ++k) {
    if (!(trace.grid.nodes[k] > trace.grid.nodes[k - 1])) {
      fail(ErrorKind::Parse, path + ": trace times must increase");
    }
  }
  trace.scheme = "loaded from " + path;
  trace.compute_slopes();
  return trace;
}

std::string format_field_csv(const SolutionField& field) {
  std::ostringstream os;
  os << "x,t,q_re,q_im\n";
  for (std::size_t k = 0; k < field.points.size(); ++k) {
    os << fmt17(field.points[k].x) << ',' << fmt17(field.points[k].t) << ','
       << fmt17(field.values[k].real()) << ',' << fmt17(field.values[k].imag()) << '\n';
  }
  return os.str();
}

double least_squares_order(const std::vector<std::size_t>& n, const std::vector<double>& errors) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double m = static_cast<double>(n.size());
  for (std::size_t k = 0; k < n.size(); ++k) {
    const double x = std::log(static_cast<double>(n[k]));
    const double y = std::log(std::max(errors[k], 1e-300));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double den = m * sxx - sx * sx;
  if (!(den > 0.0)) return NAN;
  return -(m * sxy - sx * sy) / den;
}

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

json report_json(const AdmissibilityReport& rep) {
  json v = json::array();
  for (const auto& x : rep.violations) v.push_back({{"t", x.t}, {"s", x.s}, {"description", x.description}});
  return {{"equation", to_string(rep.equation)},
          {"admissible", rep.admissible()},
          {"pair_valid", rep.pair_valid},
          {"ls_convexity_condition", rep.ls_convexity_condition},
          {"ls_linear_boundaries", rep.ls_linear_boundaries},
          {"zero_initial_width", rep.zero_initial_width},
          {"h1_min_abs", rep.h1_min_abs},
          {"h2_min_abs", rep.h2_min_abs},
          {"violations", v}};
}

json base_summary(const ProblemConfig& c, const std::string& command) {
  return {{"command", command},
          {"config_source", c.raw.source},
          {"config_hash", hex(c.hash)},
          {"equation", to_string(c.equation)},
          {"case", c.case_name ? json(*c.case_name) : json(nullptr)},
          {"curves",
           {{"lower", c.spec.pair.lower().describe()}, {"upper", c.spec.pair.upper().describe()}}},
          {"horizon", c.spec.horizon()},
          {"initial_width", c.spec.initial_width()},
          {"tolerances",
           {{"abs_tol", c.kernel.abs_tol},
            {"rel_tol", c.kernel.rel_tol},
            {"max_subdivisions", c.kernel.max_subdivisions},
            {"asymptotic_threshold", c.asymptotic_threshold}}}};
}

std::string join(const std::string& dir, const std::string& file) {
  const fs::path p(file);
  return p.is_absolute() ? file : (fs::path(dir) / p).string();
}

void write_json(const std::string& path, const json& j) { write_file_atomic(path, j.dump(2) + "\n"); }

std::string violations_text(const AdmissibilityReport& rep) {
  std::string s;
  for (const auto& v : rep.violations) s += "\n  - " + v.description;
  return s;
}

// Solves the configured problem on an n-interval grid.
BoundaryTrace solve(const ProblemConfig& c, std::size_t n) {
  const TimeGrid grid = c.grid(n);
  if (c.equation == Equation::Heat) {
    HeatKernelSystem sys(c.spec, c.kernel);
    return solve_heat_system(sys, grid);
  }
  LsOptions o;
  o.kernel = c.kernel;
  o.asymptotic_threshold = c.asymptotic_threshold;
  LsKernelSystem sys(c.spec, o);
  return solve_ls_system(sys, grid);
}

std::optional<CommandResult> refuse_if_inadmissible(const ProblemConfig& c, json& summary) {
  const AdmissibilityReport rep = validate_admissibility(c.spec.pair, c.equation);
  summary["admissibility"] = report_json(rep);
  if (rep.admissible()) return std::nullopt;
  CommandResult r{kRefused, "refused: curve pair is not admissible for " +
                               std::string(to_string(c.equation)) + violations_text(rep),
                  summary};
  return r;
}

}  // namespace

CommandResult run_solve(const ProblemConfig& c) {
  return guarded([&]() -> CommandResult {
    json summary = base_summary(c, "solve");
    if (auto refused = refuse_if_inadmissible(c, summary)) {
      try {
        write_json(join(c.out_dir, c.summary_file), refused->summary);
      } catch (const Error&) {
      }
      return *refused;
    }
    const CompatibilityReport compat = check_corner_compatibility(c.spec);
    summary["compatibility"] = {{"lower_mismatch", compat.lower_mismatch},
                                {"upper_mismatch", compat.upper_mismatch},
                                {"compatible", compat.compatible()}};
    const auto t0 = Clock::now();
    const BoundaryTrace trace = solve(c, c.grid_n);
    const double solve_s = seconds_since(t0);
    const std::string trace_path = join(c.out_dir, c.trace_file);
    write_file_atomic(trace_path, format_trace_csv(trace));
    summary["grid"] = {{"n", c.grid_n},
                       {"gamma", c.grid_gamma},
                       {"t_solve", trace.grid.end()},
                       {"nodes", trace.grid.nodes.size()},
                       {"halvings", trace.halvings}};
    summary["scheme"] = trace.scheme;
    summary["files"] = {{"trace", trace_path}};
    summary["timings"] = {{"solve_s", solve_s}};

    if (!c.field_file.empty()) {
      const auto t1 = Clock::now();
      std::vector<SolutionPoint> pts;
      const double te = trace.grid.end();
      for (std::size_t k = 1; k <= c.field_nt; ++k) {
        const double t = te * static_cast<double>(k) / static_cast<double>(c.field_nt);
        const double a = c.spec.pair.lower()(t).value, b = c.spec.pair.upper()(t).value;
        for (std::size_t i = 1; i <= c.field_nx; ++i) {
          pts.push_back({a + (b - a) * static_cast<double>(i) / static_cast<double>(c.field_nx + 1), t});
        }
      }
      const TraceSource src = TraceSource::from_trace(trace);
      SolutionField field;
      if (c.equation == Equation::Heat) {
        field = reconstruct_field(HeatKernelSystem(c.spec, c.kernel), src, pts);
      } else {
        LsOptions o;
        o.kernel = c.kernel;
        o.asymptotic_threshold = c.asymptotic_threshold;
        field = reconstruct_field(LsKernelSystem(c.spec, o), src, pts);
      }
      const std::string field_path = join(c.out_dir, c.field_file);
      write_file_atomic(field_path, format_field_csv(field));
      summary["files"]["field"] = field_path;
      summary["field"] = {{"method", field.method}, {"points", pts.size()}};
      summary["timings"]["field_s"] = seconds_since(t1);
    }
    const std::string summary_path = join(c.out_dir, c.summary_file);
    write_json(summary_path, summary);
    return {kOk, "solved on " + std::to_string(trace.grid.nodes.size()) + " nodes; wrote " + trace_path,
            summary};
  });
}

CommandResult run_verify(const ProblemConfig& c, const std::optional<std::string>& trace_path) {
  return guarded([&]() -> CommandResult {
    json summary = base_summary(c, "verify");
    if (auto refused = refuse_if_inadmissible(c, summary)) return *refused;
    const bool fd = !c.manufactured;
    if (fd && (c.fd_nx == 0 || c.fd_nt == 0)) {
      fail(ErrorKind::InvalidArgument,
           "verify needs a manufactured case ([problem] case) or an FD budget ([verify] fd_nx, fd_nt)");
    }
    const auto t0 = Clock::now();
    const BoundaryTrace trace = trace_path ? read_trace_csv(*trace_path) : solve(c, c.grid_n);
    const double te = trace.grid.end();
    if (trace_path) summary["trace_file"] = *trace_path;
    summary["grid"] = {{"n", trace.grid.nodes.size() - 1}, {"t_solve", te}};

    double err_f = 0.0, err_g = 0.0;
    double t_res = c.residual_t ? *c.residual_t : std::min(0.5 * c.spec.horizon(), te);
    QHatSource q_hat;
    if (!fd) {
      const ManufacturedCase& mc = *c.manufactured;
      for (std::size_t k = 0; k < trace.grid.nodes.size(); ++k) {
        const double t = trace.grid.nodes[k];
        err_f = std::max(err_f, std::abs(trace.f1[k] - mc.f1(t)));
        err_g = std::max(err_g, std::abs(trace.g1[k] - mc.g1(t)));
      }
      q_hat = q_hat_from_function(mc.pair(), t_res, [&mc, t_res](double x) { return mc.q(x, t_res); });
      summary["oracle"] = "manufactured";
    } else {
      const FdSolution sol = fd_solve_mapped(c.spec, c.fd_nx, c.fd_nt);
      std::size_t k_res = 0;
      for (std::size_t k = 1; k < sol.t.size(); ++k) {
        if (sol.t[k] > te * (1.0 + 1e-12)) break;
        err_f = std::max(err_f, std::abs(trace.f1_at(sol.t[k]) - sol.f1[k]));
        err_g = std::max(err_g, std::abs(trace.g1_at(sol.t[k]) - sol.g1[k]));
        if (std::abs(sol.t[k] - t_res) < std::abs(sol.t[k_res] - t_res)) k_res = k;
      }
      if (k_res == 0) fail(ErrorKind::InvalidArgument, "FD levels do not overlap the trace");
      t_res = sol.t[k_res];
      std::vector<double> xs;
      for (std::size_t i = 0; i < sol.y.size(); ++i) xs.push_back(sol.x_at(i, k_res));
      q_hat = q_hat_from_samples(std::move(xs), sol.q[k_res]);
      summary["oracle"] = {{"fd_nx", c.fd_nx}, {"fd_nt", c.fd_nt}};
    }

    TraceSource src = TraceSource::from_trace(trace);
    const double res_tol = c.residual_tolerance.value_or(c.verify_tolerance);
    json residuals = json::array();
    double worst_res = 0.0;
    const bool heat = c.equation == Equation::Heat;
    for (double l : c.lambda_set) {
      const Complex r = global_relation_residual(c.spec, src, q_hat, l, t_res);
      const Complex omega = heat ? Complex(l * l) : kI * l * l;
      const double scale = std::max(1.0, std::abs(std::exp(omega * t_res) * q_hat(l)));
      const double normalized = std::abs(r) / scale;
      worst_res = std::max(worst_res, normalized);
      residuals.push_back({{"lambda", l},
                           {"t", t_res},
                           {"re", r.real()},
                           {"im", r.imag()},
                           {"abs", std::abs(r)},
                           {"normalized", normalized}});
    }
    const bool pass = std::max(err_f, err_g) <= c.verify_tolerance && worst_res <= res_tol;
    summary["max_error_f1"] = err_f;
    summary["max_error_g1"] = err_g;
    summary["tolerance"] = c.verify_tolerance;
    summary["residual_tolerance"] = res_tol;
    summary["residuals"] = residuals;
    summary["max_normalized_residual"] = worst_res;
    summary["pass"] = pass;
    summary["timings"] = {{"total_s", seconds_since(t0)}};
    write_json(join(c.out_dir, "verify.json"), summary);
    char buf[256];
    std::snprintf(buf, sizeof buf, "%s: max trace error f1 %.3e, g1 %.3e (tol %.1e); max residual %.3e (tol %.1e)",
                  pass ? "PASS" : "FAIL", err_f, err_g, c.verify_tolerance, worst_res, res_tol);
    return {pass ? kOk : kVerifyFail, buf, summary};
  });
}

CommandResult run_convergence(const ProblemConfig& c, const std::vector<std::size_t>& n_list) {
  return guarded([&]() -> CommandResult {
    json summary = base_summary(c, "convergence");
    if (!c.manufactured) fail(ErrorKind::InvalidArgument, "convergence needs a manufactured case");
    if (auto refused = refuse_if_inadmissible(c, summary)) return *refused;
    if (n_list.size() < 2) fail(ErrorKind::InvalidArgument, "convergence needs at least two N values");
    const ManufacturedCase& mc = *c.manufactured;
    std::ostringstream csv;
    csv << "N,max_error_f1,max_error_g1,empirical_order\n";
    std::vector<double> errors;
    json rows = json::array();
    for (std::size_t idx = 0; idx < n_list.size(); ++idx) {
      const std::size_t n = n_list[idx];
      const BoundaryTrace trace = solve(c, n);
      double ef = 0.0, eg = 0.0;
      for (std::size_t k = 0; k < trace.grid.nodes.size(); ++k) {
        const double t = trace.grid.nodes[k];
        ef = std::max(ef, std::abs(trace.f1[k] - mc.f1(t)));
        eg = std::max(eg, std::abs(trace.g1[k] - mc.g1(t)));
      }
      const double e = std::max(ef, eg);
      double order = NAN;
      if (idx > 0) {
        order = std::log(errors.back() / e) /
                std::log(static_cast<double>(n) / static_cast<double>(n_list[idx - 1]));
      }
      errors.push_back(e);
      csv << n << ',' << fmt17(ef) << ',' << fmt17(eg) << ',' << (idx ? fmt17(order) : "") << '\n';
      rows.push_back({{"n", n}, {"max_error_f1", ef}, {"max_error_g1", eg},
                      {"empirical_order", idx ? json(order) : json(nullptr)}});
    }
    const std::string csv_path = join(c.out_dir, "convergence.csv");
    write_file_atomic(csv_path, csv.str());
    const double ls = least_squares_order(n_list, errors);
    summary["rows"] = rows;
    summary["least_squares_order"] = ls;
    summary["files"] = {{"convergence", csv_path}};
    write_json(join(c.out_dir, "convergence.json"), summary);
    char buf[160];
    std::snprintf(buf, sizeof buf, "least-squares order %.3f, final error %.3e; wrote %s", ls,
                  errors.back(), csv_path.c_str());
    return {kOk, buf, summary};
  });
}

CommandResult run_validate(const ProblemConfig& c) {
  return guarded([&]() -> CommandResult {
    json summary = base_summary(c, "validate");
    const AdmissibilityReport rep = validate_admissibility(c.spec.pair, c.equation);
    summary["admissibility"] = report_json(rep);
    write_json(join(c.out_dir, "validate.json"), summary);
    if (rep.admissible()) return {kOk, "admissible for " + std::string(to_string(c.equation)), summary};
    return {kRefused, "not admissible for " + std::string(to_string(c.equation)) + violations_text(rep),
            summary};
  });
}

}  // namespace dtn::cli
