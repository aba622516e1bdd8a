#include "dtn/curves.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dtn {

BoundaryCurve BoundaryCurve::linear(double slope, double intercept) {
  return BoundaryCurve(Linear{slope, intercept});
}

BoundaryCurve BoundaryCurve::polynomial(std::vector<double> coefficients) {
  if (coefficients.empty()) coefficients.push_back(0.0);
  return BoundaryCurve(Polynomial{std::move(coefficients)});
}

BoundaryCurve BoundaryCurve::tabulated(std::vector<double> knots, std::vector<double> values) {
  return BoundaryCurve(Tabulated{CubicSpline<double>(std::move(knots), std::move(values))});
}

CurveSample BoundaryCurve::operator()(double t) const {
  if (std::isfinite(horizon_)) {
    const double slack = 1e-12 * std::max(1.0, horizon_);
    if (!(t >= -slack && t <= horizon_ + slack)) {
      fail(ErrorKind::OutOfDomain, "curve evaluated at t = " + std::to_string(t) +
                                       " outside [0, " + std::to_string(horizon_) + "]");
    }
    t = std::clamp(t, 0.0, horizon_);
  }
  CurveSample out;
  if (const auto* lin = std::get_if<Linear>(&family_)) {
    out = {lin->slope * t + lin->intercept, lin->slope, 0.0};
  } else if (const auto* poly = std::get_if<Polynomial>(&family_)) {
    // Horner for value and both derivatives
    const auto& c = poly->coefficients;
    double p = 0.0, dp = 0.0, ddp = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) {
      ddp = ddp * t + 2.0 * dp;
      dp = dp * t + p;
      p = p * t + c[k];
    }
    out = {p, dp, ddp};
  } else {
    const auto s = std::get<Tabulated>(family_).spline(t);
    out = {s.value, s.d1, s.d2};
  }
  if (!std::isfinite(out.value) || !std::isfinite(out.d1) || !std::isfinite(out.d2)) {
    fail(ErrorKind::Numeric, "non-finite curve value at t = " + std::to_string(t));
  }
  return out;
}

std::string BoundaryCurve::describe() const {
  std::ostringstream os;
  if (const auto* lin = std::get_if<Linear>(&family_)) {
    os << "linear(slope=" << lin->slope << ", intercept=" << lin->intercept << ")";
  } else if (const auto* poly = std::get_if<Polynomial>(&family_)) {
    os << "polynomial(";
    for (std::size_t k = 0; k < poly->coefficients.size(); ++k) {
      os << (k ? ", " : "") << poly->coefficients[k];
    }
    os << ")";
  } else {
    os << "tabulated(" << std::get<Tabulated>(family_).spline.knots().size() << " knots)";
  }
  return os.str();
}

CurvePair::CurvePair(BoundaryCurve lower, BoundaryCurve upper, double horizon)
    : lower_(std::move(lower)), upper_(std::move(upper)), horizon_(horizon) {
  if (!(horizon > 0.0) || !std::isfinite(horizon)) {
    fail(ErrorKind::InvalidArgument, "horizon T must be positive and finite");
  }
  lower_.set_horizon(horizon);
  upper_.set_horizon(horizon);
  const double l1 = lower_(0.0).value;
  const double l2 = upper_(0.0).value;
  const double scale = std::max({1.0, std::abs(l1), std::abs(l2)});
  if (std::abs(l1) > 1e-12 * scale) {
    fail(ErrorKind::Admissibility,
         "lower curve must start at the origin: l1(0) = " + std::to_string(l1));
  }
  if (l2 < -1e-12 * scale) {
    fail(ErrorKind::Admissibility, "upper curve starts below the lower one: l2(0) = " +
                                       std::to_string(l2) + " < l1(0) = 0");
  }
  width_ = std::max(0.0, l2);
  double extent = width_;
  for (int k = 0; k <= 64; ++k) {
    const double t = horizon * k / 64.0;
    extent = std::max({extent, std::abs(lower_(t).value), std::abs(upper_(t).value)});
  }
  length_scale_ = extent > 0.0 ? extent : 1.0;
}

const char* to_string(Equation eq) { return eq == Equation::Heat ? "heat" : "ls"; }

bool AdmissibilityReport::admissible() const {
  if (!pair_valid) return false;
  if (equation == Equation::Heat) return true;
  return ls_convexity_condition || ls_linear_boundaries;
}

HValues h_functions(const CurvePair& pair, double t, double s) {
  const CurveSample l1t = pair.lower()(t), l2t = pair.upper()(t);
  const CurveSample l1s = pair.lower()(s), l2s = pair.upper()(s);
  const double tau = t - s;
  return {l1t.value - l2s.value - 2.0 * l2s.d1 * tau, l2t.value - l1s.value - 2.0 * l1s.d1 * tau};
}

double difference_quotient(const BoundaryCurve& curve, double t, double s, double threshold) {
  const double tau = t - s;
  if (tau < threshold) return curve(0.5 * (t + s)).d1;
  return (curve(t).value - curve(s).value) / tau;
}

AdmissibilityReport validate_admissibility(const CurvePair& pair, Equation equation,
                                           const AdmissibilityOptions& options) {
  AdmissibilityReport report;
  report.equation = equation;
  report.zero_initial_width = pair.initial_width() == 0.0;
  const double T = pair.horizon();
  const std::size_t n = std::max<std::size_t>(options.samples, 2);
  auto note = [&](double t, double s, std::string what) {
    if (report.violations.size() < options.max_violations) {
      report.violations.push_back({t, s, std::move(what)});
    }
  };

  report.pair_valid = true;
  bool cond = true;
  bool separation_noted = false;
  bool cond_noted[4] = {false, false, false, false};
  for (std::size_t k = 0; k < n; ++k) {
    const double t = T * static_cast<double>(k) / static_cast<double>(n - 1);
    const CurveSample a = pair.lower()(t), b = pair.upper()(t);
    if (k > 0 && !(a.value < b.value)) {
      report.pair_valid = false;
      if (!separation_noted) {
        note(t, t, "curves touch or cross: l1(t) >= l2(t)");
        separation_noted = true;
      }
    }
    const bool checks[4] = {a.d1 < 0.0, a.d2 >= 0.0, b.d1 > 0.0, b.d2 <= 0.0};
    static const char* what[4] = {"l1'(t) < 0 fails", "l1''(t) >= 0 fails",
                                  "l2'(t) > 0 fails", "l2''(t) <= 0 fails"};
    for (int c = 0; c < 4; ++c) {
      if (!checks[c]) {
        cond = false;
        if (equation == Equation::LS && !cond_noted[c]) {
          note(t, t, what[c]);
          cond_noted[c] = true;
        }
      }
    }
  }
  if (report.zero_initial_width) note(0.0, 0.0, "zero initial width L = 0 (wedge at the origin)");
  report.ls_convexity_condition = cond && report.pair_valid;

  const auto* lin1 = std::get_if<BoundaryCurve::Linear>(&pair.lower().family());
  const auto* lin2 = std::get_if<BoundaryCurve::Linear>(&pair.upper().family());
  if (lin1 && lin2) {
    const double alpha = lin1->slope, beta = lin2->slope, L = lin2->intercept;
    report.ls_linear_boundaries =
        lin1->intercept == 0.0 && 0.0 < 2.0 * alpha && 2.0 * alpha < beta && L >= 0.0;
    if (equation == Equation::LS && !report.ls_linear_boundaries) {
      note(0.0, 0.0, "linear boundaries do not satisfy 0 < 2*alpha < beta (alpha = " +
                         std::to_string(alpha) + ", beta = " + std::to_string(beta) + ")");
    }
  } else if (equation == Equation::LS && !cond) {
    note(0.0, 0.0, "curves are not both linear, so the linear-boundary criterion does not apply");
  }

  // |H| minima over the triangle 0 <= s <= t <= T
  const std::size_t m = std::max<std::size_t>(options.triangle_samples, 2);
  double h1_min = std::numeric_limits<double>::infinity();
  double h2_min = std::numeric_limits<double>::infinity();
  bool h_noted = false;
  for (std::size_t i = 0; i < m; ++i) {
    const double t = T * static_cast<double>(i) / static_cast<double>(m - 1);
    for (std::size_t j = 0; j <= i; ++j) {
      const double s = T * static_cast<double>(j) / static_cast<double>(m - 1);
      const HValues h = h_functions(pair, t, s);
      h1_min = std::min(h1_min, std::abs(h.h1));
      h2_min = std::min(h2_min, std::abs(h.h2));
      if (equation == Equation::LS && !h_noted && !(h.h1 < 0.0 && h.h2 > 0.0)) {
        note(t, s, "H1 < 0 < H2 fails");
        h_noted = true;
      }
    }
  }
  report.h1_min_abs = h1_min;
  report.h2_min_abs = h2_min;
  return report;
}

}  // namespace dtn
