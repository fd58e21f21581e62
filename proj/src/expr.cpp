#include "liouville/expr.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>
#include <variant>

namespace liouville {

struct Expr::Node {
  Kind kind = Kind::constant;
  double value = 0.0;
  std::string name;
  Func func = Func::neg;
  Op op = Op::add;
  std::vector<Expr> children;
};

namespace {

constexpr std::array<std::pair<std::string_view, Expr::Func>, 11> kFunctions{{
    {"neg", Expr::Func::neg},
    {"exp", Expr::Func::exp},
    {"log", Expr::Func::log},
    {"sin", Expr::Func::sin},
    {"cos", Expr::Func::cos},
    {"tan", Expr::Func::tan},
    {"sinh", Expr::Func::sinh},
    {"cosh", Expr::Func::cosh},
    {"tanh", Expr::Func::tanh},
    {"sqrt", Expr::Func::sqrt},
    {"abs", Expr::Func::abs},
}};

std::optional<Expr::Func> lookup_function(std::string_view name) {
  for (const auto& [fname, f] : kFunctions)
    if (fname == name) return f;
  return std::nullopt;
}

}  // namespace

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable() {
  auto n = std::make_shared<Node>();
  n->kind = Kind::variable;
  return Expr(std::move(n));
}

Expr Expr::parameter(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::parameter;
  n->name = std::move(name);
  return Expr(std::move(n));
}

Expr Expr::unary(Func f, Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::unary;
  n->func = f;
  n->children.push_back(std::move(operand));
  return Expr(std::move(n));
}

Expr Expr::binary(Op op, Expr lhs, Expr rhs) {
  auto n = std::make_shared<Node>();
  n->kind = Kind::binary;
  n->op = op;
  n->children.push_back(std::move(lhs));
  n->children.push_back(std::move(rhs));
  return Expr(std::move(n));
}

Expr::Kind Expr::kind() const noexcept { return node_->kind; }

double Expr::value() const {
  if (node_->kind != Kind::constant) throw InvalidArgument("Expr::value on a non-constant node");
  return node_->value;
}

const std::string& Expr::name() const {
  if (node_->kind != Kind::parameter) throw InvalidArgument("Expr::name on a non-parameter node");
  return node_->name;
}

Expr::Func Expr::func() const {
  if (node_->kind != Kind::unary) throw InvalidArgument("Expr::func on a non-unary node");
  return node_->func;
}

Expr::Op Expr::op() const {
  if (node_->kind != Kind::binary) throw InvalidArgument("Expr::op on a non-binary node");
  return node_->op;
}

const Expr& Expr::operand() const {
  if (node_->kind != Kind::unary) throw InvalidArgument("Expr::operand on a non-unary node");
  return node_->children[0];
}

const Expr& Expr::lhs() const {
  if (node_->kind != Kind::binary) throw InvalidArgument("Expr::lhs on a non-binary node");
  return node_->children[0];
}

const Expr& Expr::rhs() const {
  if (node_->kind != Kind::binary) throw InvalidArgument("Expr::rhs on a non-binary node");
  return node_->children[1];
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& na = *a.node_;
  const auto& nb = *b.node_;
  if (na.kind != nb.kind) return false;
  switch (na.kind) {
    case Expr::Kind::constant:
      return na.value == nb.value;
    case Expr::Kind::variable:
      return true;
    case Expr::Kind::parameter:
      return na.name == nb.name;
    case Expr::Kind::unary:
      return na.func == nb.func && na.children[0] == nb.children[0];
    case Expr::Kind::binary:
      return na.op == nb.op && na.children[0] == nb.children[0] && na.children[1] == nb.children[1];
  }
  return false;
}

Expr operator+(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::add, a, b); }
Expr operator-(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::sub, a, b); }
Expr operator*(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::mul, a, b); }
Expr operator/(const Expr& a, const Expr& b) { return Expr::binary(Expr::Op::div, a, b); }
Expr operator-(const Expr& a) { return Expr::unary(Expr::Func::neg, a); }

const std::vector<std::string>& function_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, f] : kFunctions) out.emplace_back(name);
    return out;
  }();
  return names;
}

std::string_view to_string(Expr::Func f) {
  for (const auto& [name, g] : kFunctions)
    if (g == f) return name;
  return "?";
}

std::optional<long> constant_integer(const Expr& e) {
  if (e.kind() == Expr::Kind::unary && e.func() == Expr::Func::neg) {
    auto inner = constant_integer(e.operand());
    if (inner) return -*inner;
    return std::nullopt;
  }
  if (e.kind() != Expr::Kind::constant) return std::nullopt;
  const double v = e.value();
  if (!std::isfinite(v) || std::trunc(v) != v || std::abs(v) > 1e9) return std::nullopt;
  return static_cast<long>(v);
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
 public:
  Parser(std::string_view text, const std::vector<std::string>& parameters, std::string_view variable)
      : text_(text), parameters_(parameters), variable_(variable) {}

  Expr run() {
    skip_space();
    if (pos_ == text_.size()) throw ParseError("empty expression", pos_, {"number", "identifier", "(", "-"});
    Expr e = sum();
    skip_space();
    if (pos_ != text_.size())
      throw ParseError(std::string("unexpected '") + text_[pos_] + "'", pos_,
                       {"+", "-", "*", "/", "^", "end of input"});
    return e;
  }

 private:
  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < text_.size() && text_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+'))
        e = Expr::binary(Expr::Op::add, e, product());
      else if (accept('-'))
        e = Expr::binary(Expr::Op::sub, e, product());
      else
        return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*'))
        e = Expr::binary(Expr::Op::mul, e, unary());
      else if (accept('/'))
        e = Expr::binary(Expr::Op::div, e, unary());
      else
        return e;
    }
  }

  Expr unary() {
    if (accept('-')) return Expr::unary(Expr::Func::neg, unary());
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) return Expr::binary(Expr::Op::pow, base, unary());
    return base;
  }

  Expr atom() {
    skip_space();
    if (pos_ == text_.size())
      throw ParseError("unexpected end of input", pos_, {"number", "identifier", "(", "-"});
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) throw ParseError("unbalanced parenthesis", pos_, {")"});
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(std::string("unexpected '") + c + "'", pos_, {"number", "identifier", "(", "-"});
  }

  Expr number() {
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
        ++n;
      }
      return n;
    };
    std::size_t mantissa = digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      mantissa += digits();
    }
    if (mantissa == 0) throw ParseError("malformed number", start, {"digit"});
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      ++pos_;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      if (digits() == 0) throw ParseError("malformed exponent", pos_, {"digit"});
    }
    double value = 0.0;
    const char* first = text_.data() + start;
    const char* last = text_.data() + pos_;
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) throw ParseError("number out of range", start, {});
    return Expr::constant(value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() &&
           (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '_'))
      ++pos_;
    const std::string_view name = text_.substr(start, pos_ - start);

    skip_space();
    const bool call = pos_ < text_.size() && text_[pos_] == '(';
    if (call) {
      auto f = lookup_function(name);
      if (!f) throw UnknownIdentifier(std::string(name), start, known_symbols());
      ++pos_;
      Expr arg = sum();
      if (!accept(')')) throw ParseError("unbalanced parenthesis in call", pos_, {")"});
      return Expr::unary(*f, arg);
    }
    if (name == variable_) return Expr::variable();
    if (std::find(parameters_.begin(), parameters_.end(), name) != parameters_.end())
      return Expr::parameter(std::string(name));
    if (lookup_function(name))
      throw ParseError("function '" + std::string(name) + "' needs an argument", pos_, {"("});
    throw UnknownIdentifier(std::string(name), start, known_symbols());
  }

  std::vector<std::string> known_symbols() const {
    std::vector<std::string> known{std::string(variable_)};
    known.insert(known.end(), parameters_.begin(), parameters_.end());
    for (const auto& f : function_names()) known.push_back(f + "()");
    return known;
  }

  std::string_view text_;
  const std::vector<std::string>& parameters_;
  std::string_view variable_;
  std::size_t pos_ = 0;
};

}  // namespace

Expr parse(std::string_view text, const std::vector<std::string>& parameters, std::string_view variable) {
  return Parser(text, parameters, variable).run();
}

// ---------------------------------------------------------------------------
// Evaluation

namespace {

double eval_node(const Expr& e, double x, const Params& params) {
  auto checked = [&](double v) {
    if (!std::isfinite(v)) throw DomainError(to_string(e), x);
    return v;
  };
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value();
    case Expr::Kind::variable:
      return x;
    case Expr::Kind::parameter: {
      auto it = params.find(e.name());
      if (it == params.end()) throw UnboundParameter(e.name());
      return it->second;
    }
    case Expr::Kind::unary: {
      const double a = eval_node(e.operand(), x, params);
      switch (e.func()) {
        case Expr::Func::neg: return -a;
        case Expr::Func::exp: return checked(std::exp(a));
        case Expr::Func::log:
          if (a <= 0.0) throw DomainError(to_string(e), x);
          return checked(std::log(a));
        case Expr::Func::sin: return std::sin(a);
        case Expr::Func::cos: return std::cos(a);
        case Expr::Func::tan: return checked(std::tan(a));
        case Expr::Func::sinh: return checked(std::sinh(a));
        case Expr::Func::cosh: return checked(std::cosh(a));
        case Expr::Func::tanh: return std::tanh(a);
        case Expr::Func::sqrt:
          if (a < 0.0) throw DomainError(to_string(e), x);
          return std::sqrt(a);
        case Expr::Func::abs: return std::abs(a);
      }
      break;
    }
    case Expr::Kind::binary: {
      const double a = eval_node(e.lhs(), x, params);
      if (e.op() == Expr::Op::pow) {
        if (auto n = constant_integer(e.rhs())) {
          if (a == 0.0 && *n < 0) throw DomainError(to_string(e), x);
          return checked(std::pow(a, static_cast<double>(*n)));
        }
        const double b = eval_node(e.rhs(), x, params);
        if (a <= 0.0) throw DomainError(to_string(e), x);
        return checked(std::pow(a, b));
      }
      const double b = eval_node(e.rhs(), x, params);
      switch (e.op()) {
        case Expr::Op::add: return checked(a + b);
        case Expr::Op::sub: return checked(a - b);
        case Expr::Op::mul: return checked(a * b);
        case Expr::Op::div:
          if (b == 0.0) throw DomainError(to_string(e), x);
          return checked(a / b);
        case Expr::Op::pow: break;
      }
      break;
    }
  }
  throw DomainError(to_string(e), x);
}

}  // namespace

double evaluate(const Expr& e, double x, const Params& params) {
  const double v = eval_node(e, x, params);
  if (!std::isfinite(v)) throw DomainError(to_string(e), x);
  return v;
}

// ---------------------------------------------------------------------------
// Differentiation. The local folding rules below only drop additive zeros and
// multiplicative ones so derivative trees do not grow with dead branches.

namespace {

bool is_const(const Expr& e, double v) { return e.kind() == Expr::Kind::constant && e.value() == v; }

Expr add(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return a + b;
}

Expr sub(const Expr& a, const Expr& b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return -b;
  return a - b;
}

Expr mul(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return Expr::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return a * b;
}

Expr div(const Expr& a, const Expr& b) {
  if (is_const(a, 0.0)) return Expr::constant(0.0);
  if (is_const(b, 1.0)) return a;
  return a / b;
}

Expr neg(const Expr& a) {
  if (is_const(a, 0.0)) return a;
  return -a;
}

Expr square(const Expr& a) { return Expr::binary(Expr::Op::pow, a, Expr::constant(2.0)); }

Expr fn(Expr::Func f, const Expr& a) { return Expr::unary(f, a); }

}  // namespace

Expr differentiate(const Expr& e) {
  using F = Expr::Func;
  switch (e.kind()) {
    case Expr::Kind::constant:
    case Expr::Kind::parameter:
      return Expr::constant(0.0);
    case Expr::Kind::variable:
      return Expr::constant(1.0);
    case Expr::Kind::unary: {
      const Expr& u = e.operand();
      if (e.func() == F::abs) throw NotDifferentiable("abs is not differentiable: " + to_string(e));
      const Expr du = differentiate(u);
      if (is_const(du, 0.0)) return Expr::constant(0.0);
      switch (e.func()) {
        case F::neg: return neg(du);
        case F::exp: return mul(e, du);
        case F::log: return div(du, u);
        case F::sin: return mul(fn(F::cos, u), du);
        case F::cos: return neg(mul(fn(F::sin, u), du));
        case F::tan: return div(du, square(fn(F::cos, u)));
        case F::sinh: return mul(fn(F::cosh, u), du);
        case F::cosh: return mul(fn(F::sinh, u), du);
        case F::tanh: return div(du, square(fn(F::cosh, u)));
        case F::sqrt: return div(du, mul(Expr::constant(2.0), e));
        case F::abs: break;
      }
      break;
    }
    case Expr::Kind::binary: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      switch (e.op()) {
        case Expr::Op::add: return add(differentiate(a), differentiate(b));
        case Expr::Op::sub: return sub(differentiate(a), differentiate(b));
        case Expr::Op::mul:
          return add(mul(differentiate(a), b), mul(a, differentiate(b)));
        case Expr::Op::div: {
          const Expr numerator = sub(mul(differentiate(a), b), mul(a, differentiate(b)));
          return div(numerator, square(b));
        }
        case Expr::Op::pow: {
          const Expr da = differentiate(a);
          if (auto n = constant_integer(b)) {
            if (*n == 0) return Expr::constant(0.0);
            const double m = static_cast<double>(*n);
            const Expr reduced = *n == 1 ? Expr::constant(1.0)
                                 : *n == 2 ? a
                                           : Expr::binary(Expr::Op::pow, a, Expr::constant(m - 1.0));
            return mul(mul(Expr::constant(m), reduced), da);
          }
          const Expr db = differentiate(b);
          const Expr rate = add(mul(db, fn(F::log, a)), mul(b, div(da, a)));
          return mul(e, rate);
        }
      }
      break;
    }
  }
  throw NotDifferentiable("unsupported node: " + to_string(e));
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Binding strength of the printed form: 1 sum, 2 product, 3 unary, 4 power, 5 atom.
int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::constant:
      return e.value() < 0.0 || std::signbit(e.value()) ? 3 : 5;
    case Expr::Kind::variable:
    case Expr::Kind::parameter:
      return 5;
    case Expr::Kind::unary:
      return e.func() == Expr::Func::neg ? 3 : 5;
    case Expr::Kind::binary:
      switch (e.op()) {
        case Expr::Op::add:
        case Expr::Op::sub: return 1;
        case Expr::Op::mul:
        case Expr::Op::div: return 2;
        case Expr::Op::pow: return 4;
      }
  }
  return 5;
}

std::string format_number(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), ptr);
}

void print(const Expr& e, int min_prec, std::string& out) {
  const bool parens = precedence(e) < min_prec;
  if (parens) out += '(';
  switch (e.kind()) {
    case Expr::Kind::constant:
      out += format_number(e.value());
      break;
    case Expr::Kind::variable:
      out += 'x';
      break;
    case Expr::Kind::parameter:
      out += e.name();
      break;
    case Expr::Kind::unary:
      if (e.func() == Expr::Func::neg) {
        out += '-';
        print(e.operand(), 3, out);
      } else {
        out += to_string(e.func());
        out += '(';
        print(e.operand(), 1, out);
        out += ')';
      }
      break;
    case Expr::Kind::binary: {
      static constexpr std::array<const char*, 5> symbol{" + ", " - ", "*", "/", "^"};
      const auto op = e.op();
      int lhs_prec = 1;
      int rhs_prec = 2;
      if (op == Expr::Op::mul || op == Expr::Op::div) {
        lhs_prec = 2;
        rhs_prec = 3;
      } else if (op == Expr::Op::pow) {
        lhs_prec = 5;
        rhs_prec = 3;
      }
      print(e.lhs(), lhs_prec, out);
      out += symbol[static_cast<std::size_t>(op)];
      print(e.rhs(), rhs_prec, out);
      break;
    }
  }
  if (parens) out += ')';
}

void collect_parameters(const Expr& e, std::set<std::string>& out) {
  switch (e.kind()) {
    case Expr::Kind::parameter:
      out.insert(e.name());
      break;
    case Expr::Kind::unary:
      collect_parameters(e.operand(), out);
      break;
    case Expr::Kind::binary:
      collect_parameters(e.lhs(), out);
      collect_parameters(e.rhs(), out);
      break;
    default:
      break;
  }
}

}  // namespace

std::string to_string(const Expr& e) {
  std::string out;
  print(e, 1, out);
  return out;
}

std::vector<std::string> parameters_of(const Expr& e) {
  std::set<std::string> names;
  collect_parameters(e, names);
  return {names.begin(), names.end()};
}

}  // namespace liouville
