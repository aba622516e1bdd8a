#pragma once

#include <map>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "dtn/complex.hpp"
#include "dtn/dual.hpp"
#include "dtn/error.hpp"

namespace dtn {

/// Minimal arithmetic grammar used by problem configs:
///   expr   := term (('+'|'-') term)*
///   term   := unary (('*'|'/') unary)*
///   unary  := ('+'|'-') unary | power
///   power  := primary ('^' unary)?
///   primary:= number | name | func '(' expr ')' | '(' expr ')'
/// Names are the bound variables plus the constants `pi` and `i`.
/// Functions: exp, log, sin, cos, sqrt, erf.
class Expression {
 public:
  enum class Op { Const, Var, Add, Sub, Mul, Div, Pow, Neg, Exp, Log, Sin, Cos, Sqrt, Erf };

  struct Node {
    Op op = Op::Const;
    Complex value{};
    int var = -1;
    std::unique_ptr<Node> lhs;
    std::unique_ptr<Node> rhs;
  };

  /// Parses `text` with the listed variable names (e.g. {"x", "t"}).
  static Expression parse(std::string_view text, std::vector<std::string> variables);

  Expression(const Expression& other);
  Expression& operator=(const Expression& other);
  Expression(Expression&&) noexcept = default;
  Expression& operator=(Expression&&) noexcept = default;
  ~Expression() = default;

  const std::string& text() const { return text_; }
  const std::vector<std::string>& variables() const { return variables_; }

  /// True when the expression mentions the imaginary unit.
  bool uses_imaginary_unit() const { return uses_i_; }

  template <class T>
  T evaluate(const std::vector<T>& args) const {
    if (args.size() != variables_.size()) {
      fail(ErrorKind::InvalidArgument, "expression '" + text_ + "': wrong number of arguments");
    }
    return eval_node<T>(*root_, args);
  }

  Complex operator()(double a) const { return evaluate<Complex>({Complex(a)}); }
  Complex operator()(double a, double b) const {
    return evaluate<Complex>({Complex(a), Complex(b)});
  }

 private:
  Expression() = default;

  template <class T>
  static T eval_node(const Node& n, const std::vector<T>& args);

  std::string text_;
  std::vector<std::string> variables_;
  std::unique_ptr<Node> root_;
  bool uses_i_ = false;
};

namespace detail {

template <class T>
T integer_power(T base, long n) {
  if (n < 0) return T(1.0) / integer_power(base, -n);
  T result(1.0);
  while (n > 0) {
    if (n & 1) result = result * base;
    base = base * base;
    n >>= 1;
  }
  return result;
}

}  // namespace detail

template <class T>
T Expression::eval_node(const Node& n, const std::vector<T>& args) {
  using std::cos;
  using std::exp;
  using std::log;
  using std::sin;
  using std::sqrt;
  using dtn::erf;
  switch (n.op) {
    case Op::Const: return T(n.value);
    case Op::Var: return args[static_cast<std::size_t>(n.var)];
    case Op::Add: return eval_node<T>(*n.lhs, args) + eval_node<T>(*n.rhs, args);
    case Op::Sub: return eval_node<T>(*n.lhs, args) - eval_node<T>(*n.rhs, args);
    case Op::Mul: return eval_node<T>(*n.lhs, args) * eval_node<T>(*n.rhs, args);
    case Op::Div: return eval_node<T>(*n.lhs, args) / eval_node<T>(*n.rhs, args);
    case Op::Neg: return -eval_node<T>(*n.lhs, args);
    case Op::Exp: return exp(eval_node<T>(*n.lhs, args));
    case Op::Log: return log(eval_node<T>(*n.lhs, args));
    case Op::Sin: return sin(eval_node<T>(*n.lhs, args));
    case Op::Cos: return cos(eval_node<T>(*n.lhs, args));
    case Op::Sqrt: return sqrt(eval_node<T>(*n.lhs, args));
    case Op::Erf: return erf(eval_node<T>(*n.lhs, args));
    case Op::Pow: {
      T base = eval_node<T>(*n.lhs, args);
      if (n.rhs->op == Op::Const && n.rhs->value.imag() == 0.0) {
        const double p = n.rhs->value.real();
        if (p == std::round(p) && std::abs(p) < 1e6) {
          return detail::integer_power(base, static_cast<long>(p));
        }
      }
      return exp(eval_node<T>(*n.rhs, args) * log(base));
    }
  }
  return T{};
}

}  // namespace dtn
