#include "dtn/expression.hpp"

#include <cctype>
#include <cstdlib>

namespace dtn {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::OutOfDomain: return "out-of-domain";
    case ErrorKind::Extrapolation: return "extrapolation";
    case ErrorKind::Ordering: return "ordering";
    case ErrorKind::Numeric: return "numeric";
    case ErrorKind::Accuracy: return "accuracy";
    case ErrorKind::Regularization: return "regularization-failure";
    case ErrorKind::StepFailure: return "step-failure";
    case ErrorKind::Divergence: return "divergence";
    case ErrorKind::Admissibility: return "admissibility";
    case ErrorKind::Parse: return "parse";
    case ErrorKind::Range: return "range";
    case ErrorKind::Io: return "io";
    case ErrorKind::InvalidArgument: return "invalid-argument";
  }
  return "unknown";
}

namespace {

using Node = Expression::Node;
using Op = Expression::Op;

std::unique_ptr<Node> make(Op op, std::unique_ptr<Node> lhs = nullptr,
                           std::unique_ptr<Node> rhs = nullptr) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->lhs = std::move(lhs);
  n->rhs = std::move(rhs);
  return n;
}

std::unique_ptr<Node> constant(Complex v) {
  auto n = make(Op::Const);
  n->value = v;
  return n;
}

std::unique_ptr<Node> clone(const Node* n) {
  if (n == nullptr) return nullptr;
  auto c = std::make_unique<Node>();
  c->op = n->op;
  c->value = n->value;
  c->var = n->var;
  c->lhs = clone(n->lhs.get());
  c->rhs = clone(n->rhs.get());
  return c;
}

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& vars)
      : text_(text), vars_(vars) {}

  std::unique_ptr<Node> parse_all() {
    auto root = parse_expr();
    skip_ws();
    if (pos_ != text_.size()) error("unexpected character '" + std::string(1, text_[pos_]) + "'");
    return root;
  }

  bool uses_i = false;

 private:
  [[noreturn]] void error(const std::string& msg) const {
    fail(ErrorKind::Parse, "expression '" + std::string(text_) + "' at column " +
                               std::to_string(pos_ + 1) + ": " + msg);
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::unique_ptr<Node> parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      if (accept('+')) lhs = make(Op::Add, std::move(lhs), parse_term());
      else if (accept('-')) lhs = make(Op::Sub, std::move(lhs), parse_term());
      else return lhs;
    }
  }

  std::unique_ptr<Node> parse_term() {
    auto lhs = parse_unary();
    for (;;) {
      if (accept('*')) lhs = make(Op::Mul, std::move(lhs), parse_unary());
      else if (accept('/')) lhs = make(Op::Div, std::move(lhs), parse_unary());
      else return lhs;
    }
  }

  std::unique_ptr<Node> parse_unary() {
    if (accept('-')) {
      auto operand = parse_unary();
      if (operand->op == Op::Const) {
        operand->value = -operand->value;
        return operand;
      }
      return make(Op::Neg, std::move(operand));
    }
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  std::unique_ptr<Node> parse_power() {
    auto base = parse_primary();
    if (accept('^')) return make(Op::Pow, std::move(base), parse_unary());
    return base;
  }

  std::unique_ptr<Node> parse_primary() {
    skip_ws();
    if (pos_ >= text_.size()) error("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      auto inner = parse_expr();
      if (!accept(')')) error("expected ')'");
      return inner;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return parse_name();
    error("unexpected character '" + std::string(1, c) + "'");
  }

  std::unique_ptr<Node> parse_number() {
    const std::string rest(text_.substr(pos_));
    char* end = nullptr;
    const double v = std::strtod(rest.c_str(), &end);
    if (end == rest.c_str()) error("malformed number");
    pos_ += static_cast<std::size_t>(end - rest.c_str());
    return constant(Complex(v, 0.0));
  }

  std::unique_ptr<Node> parse_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string name(text_.substr(start, pos_ - start));
    for (std::size_t k = 0; k < vars_.size(); ++k) {
      if (vars_[k] == name) {
        auto n = make(Op::Var);
        n->var = static_cast<int>(k);
        return n;
      }
    }
    if (name == "pi") return constant(Complex(kPi, 0.0));
    if (name == "i") {
      uses_i = true;
      return constant(kI);
    }
    static const std::pair<const char*, Op> functions[] = {
        {"exp", Op::Exp}, {"log", Op::Log},   {"sin", Op::Sin},
        {"cos", Op::Cos}, {"sqrt", Op::Sqrt}, {"erf", Op::Erf},
    };
    for (const auto& [fname, op] : functions) {
      if (name == fname) {
        if (!accept('(')) error("expected '(' after " + name);
        auto arg = parse_expr();
        if (!accept(')')) error("expected ')' closing " + name);
        return make(op, std::move(arg));
      }
    }
    pos_ = start;
    error("unknown name '" + name + "'");
  }

  std::string_view text_;
  const std::vector<std::string>& vars_;
  std::size_t pos_ = 0;
};

}  // namespace

Expression Expression::parse(std::string_view text, std::vector<std::string> variables) {
  Parser parser(text, variables);
  Expression e;
  e.root_ = parser.parse_all();
  e.text_ = std::string(text);
  e.variables_ = std::move(variables);
  e.uses_i_ = parser.uses_i;
  return e;
}

Expression::Expression(const Expression& other)
    : text_(other.text_),
      variables_(other.variables_),
      root_(clone(other.root_.get())),
      uses_i_(other.uses_i_) {}

Expression& Expression::operator=(const Expression& other) {
  if (this != &other) {
    text_ = other.text_;
    variables_ = other.variables_;
    root_ = clone(other.root_.get());
    uses_i_ = other.uses_i_;
  }
  return *this;
}

}  // namespace dtn
