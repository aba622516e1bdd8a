#pragma once

#include <limits>
#include <string>
#include <variant>
#include <vector>

#include "dtn/spline.hpp"

namespace dtn {

struct CurveSample {
  double value = 0.0;
  double d1 = 0.0;  // l'(t)
  double d2 = 0.0;  // l''(t)
};

/// A boundary x = l(t) together with its first two derivatives.
class BoundaryCurve {
 public:
  struct Linear {
    double slope = 0.0;
    double intercept = 0.0;
  };
  struct Polynomial {
    std::vector<double> coefficients;  // ascending powers of t
  };
  struct Tabulated {
    CubicSpline<double> spline;
  };
  using Family = std::variant<Linear, Polynomial, Tabulated>;

  static BoundaryCurve linear(double slope, double intercept);
  static BoundaryCurve polynomial(std::vector<double> coefficients);
  static BoundaryCurve tabulated(std::vector<double> knots, std::vector<double> values);

  /// Evaluates l, l', l''. Outside [0, horizon] this is an out-of-domain error.
  CurveSample operator()(double t) const;

  const Family& family() const { return family_; }
  bool is_linear() const { return std::holds_alternative<Linear>(family_); }
  double horizon() const { return horizon_; }
  void set_horizon(double horizon) { horizon_ = horizon; }
  std::string describe() const;

 private:
  explicit BoundaryCurve(Family f) : family_(std::move(f)) {}

  Family family_;
  double horizon_ = std::numeric_limits<double>::infinity();
};

inline CurveSample eval_curve(const BoundaryCurve& curve, double t) { return curve(t); }

/// l1 (lower) and l2 (upper) on [0, T] with l1(0) = 0, l2(0) = L >= 0.
class CurvePair {
 public:
  CurvePair(BoundaryCurve lower, BoundaryCurve upper, double horizon);

  const BoundaryCurve& lower() const { return lower_; }
  const BoundaryCurve& upper() const { return upper_; }
  /// Curve by 1-based index as in l_1, l_2.
  const BoundaryCurve& curve(int index) const { return index == 1 ? lower_ : upper_; }
  double initial_width() const { return width_; }
  double horizon() const { return horizon_; }
  /// Typical length scale max(L, |l1|, |l2|) over [0, T].
  double length_scale() const { return length_scale_; }

 private:
  BoundaryCurve lower_;
  BoundaryCurve upper_;
  double horizon_;
  double width_;
  double length_scale_ = 1.0;
};

enum class Equation { Heat, LS };

const char* to_string(Equation eq);

struct Violation {
  double t = 0.0;
  double s = 0.0;
  std::string description;
};

struct AdmissibilityReport {
  Equation equation = Equation::Heat;
  bool pair_valid = false;
  bool ls_convexity_condition = false;  // l1' < 0, l1'' >= 0, l2' > 0, l2'' <= 0
  bool ls_linear_boundaries = false;    // l1 = a t, l2 = b t + L, 0 < 2a < b
  bool zero_initial_width = false;
  double h1_min_abs = 0.0;
  double h2_min_abs = 0.0;
  std::vector<Violation> violations;

  /// Heat: pair_valid. LS: pair_valid and one of the two LS conditions.
  bool admissible() const;
};

struct AdmissibilityOptions {
  std::size_t samples = 2048;           // uniform grid on [0, T]
  std::size_t triangle_samples = 256;   // per axis for H on 0 <= s <= t <= T
  std::size_t max_violations = 32;
};

AdmissibilityReport validate_admissibility(const CurvePair& pair, Equation equation,
                                           const AdmissibilityOptions& options = {});

struct HValues {
  double h1 = 0.0;
  double h2 = 0.0;
};

/// H1 = l1(t) - l2(s) - 2 l2'(s)(t - s),  H2 = l2(t) - l1(s) - 2 l1'(s)(t - s).
HValues h_functions(const CurvePair& pair, double t, double s);

/// Stable (l(t) - l(s)) / (t - s): switches to l'((t+s)/2) once t - s drops
/// below `threshold`.
double difference_quotient(const BoundaryCurve& curve, double t, double s, double threshold);

}  // namespace dtn
