#include "wsvie/expr.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>

namespace wsvie::expr {

namespace {

constexpr std::size_t kMaxDepth = 200;

struct FuncName {
  std::string_view name;
  Func func;
};

constexpr std::array<FuncName, 7> kFunctions{{{"sin", Func::sin},
                                              {"cos", Func::cos},
                                              {"exp", Func::exp},
                                              {"ln", Func::ln},
                                              {"sqrt", Func::sqrt},
                                              {"B", Func::brownian},
                                              {"ito", Func::ito}}};

std::string_view func_name(Func f) {
  for (const auto& entry : kFunctions)
    if (entry.func == f) return entry.name;
  return "?";
}

bool is_ident_start(char c) { return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || (c >= '0' && c <= '9'); }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

std::string describe(std::string_view src, std::size_t pos) {
  if (pos >= src.size()) return "end of input";
  const auto c = static_cast<unsigned char>(src[pos]);
  if (c >= 0x20 && c < 0x7f) return std::string("'") + src[pos] + "'";
  char buf[8];
  std::snprintf(buf, sizeof buf, "0x%02x", c);
  return std::string("byte ") + buf;
}

std::unique_ptr<Node> make(Op op, std::size_t pos) {
  auto n = std::make_unique<Node>();
  n->op = op;
  n->pos = pos;
  return n;
}

class Parser {
public:
  explicit Parser(std::string_view src) : src_(src) {}

  std::unique_ptr<Node> parse_all() {
    if (src_.empty()) fail({"expression"});
    auto root = sum();
    skip_space();
    if (pos_ < src_.size()) fail({"operator", "end of input"});
    return root;
  }

private:
  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t depth_ = 0;

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    std::string msg = "syntax error at offset " + std::to_string(pos_) + ": expected ";
    for (std::size_t i = 0; i < expected.size(); ++i) {
      if (i) msg += i + 1 == expected.size() ? " or " : ", ";
      msg += expected[i];
    }
    msg += ", found " + describe(src_, pos_);
    throw SyntaxError(pos_, std::move(expected), msg);
  }

  void skip_space() {
    while (pos_ < src_.size() &&
           (src_[pos_] == ' ' || src_[pos_] == '\t' || src_[pos_] == '\r' || src_[pos_] == '\n'))
      ++pos_;
  }

  bool accept(char c) {
    skip_space();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  struct DepthGuard {
    Parser& p;
    explicit DepthGuard(Parser& parser) : p(parser) {
      if (++p.depth_ > kMaxDepth) {
        --p.depth_;
        throw SyntaxError(p.pos_, {}, "syntax error at offset " + std::to_string(p.pos_) +
                                          ": expression nested too deeply");
      }
    }
    ~DepthGuard() { --p.depth_; }
  };

  std::unique_ptr<Node> sum() {
    DepthGuard guard(*this);
    auto lhs = product();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      Op op;
      if (accept('+')) op = Op::add;
      else if (accept('-')) op = Op::sub;
      else return lhs;
      auto n = make(op, at);
      n->lhs = std::move(lhs);
      n->rhs = product();
      lhs = std::move(n);
    }
  }

  std::unique_ptr<Node> product() {
    auto lhs = unary();
    for (;;) {
      skip_space();
      const std::size_t at = pos_;
      Op op;
      if (accept('*')) op = Op::mul;
      else if (accept('/')) op = Op::div;
      else return lhs;
      auto n = make(op, at);
      n->lhs = std::move(lhs);
      n->rhs = unary();
      lhs = std::move(n);
    }
  }

  std::unique_ptr<Node> unary() {
    DepthGuard guard(*this);
    skip_space();
    const std::size_t at = pos_;
    if (accept('-')) {
      auto n = make(Op::neg, at);
      n->lhs = unary();
      return n;
    }
    return power();
  }

  std::unique_ptr<Node> power() {
    auto base = primary();
    skip_space();
    const std::size_t at = pos_;
    if (!accept('^')) return base;
    auto n = make(Op::pow, at);
    n->lhs = std::move(base);
    n->rhs = unary();
    return n;
  }

  std::unique_ptr<Node> primary() {
    DepthGuard guard(*this);
    skip_space();
    const std::size_t at = pos_;
    if (pos_ >= src_.size()) fail({"number", "identifier", "'('", "'-'"});
    const char c = src_[pos_];
    if (is_digit(c) || c == '.') return number();
    if (c == '(') {
      ++pos_;
      auto inner = sum();
      if (!accept(')')) fail({"')'"});
      return inner;
    }
    if (is_ident_start(c)) {
      while (pos_ < src_.size() && is_ident_char(src_[pos_])) ++pos_;
      const std::string_view name = src_.substr(at, pos_ - at);
      if (name == "t") return make(Op::var_t, at);
      if (name == "s") return make(Op::var_s, at);
      for (const auto& entry : kFunctions) {
        if (entry.name != name) continue;
        if (!accept('(')) fail({"'('"});
        auto n = make(Op::call, at);
        n->func = entry.func;
        n->lhs = sum();
        if (!accept(')')) fail({"')'"});
        return n;
      }
      throw UnknownIdentifierError(at, std::string(name));
    }
    fail({"number", "identifier", "'('", "'-'"});
  }

  std::unique_ptr<Node> number() {
    const std::size_t at = pos_;
    std::size_t end = pos_;
    bool digits = false;
    while (end < src_.size() && is_digit(src_[end])) ++end, digits = true;
    if (end < src_.size() && src_[end] == '.') {
      ++end;
      while (end < src_.size() && is_digit(src_[end])) ++end, digits = true;
    }
    if (!digits) fail({"digit"});
    if (end < src_.size() && (src_[end] == 'e' || src_[end] == 'E')) {
      std::size_t e = end + 1;
      if (e < src_.size() && (src_[e] == '+' || src_[e] == '-')) ++e;
      if (e < src_.size() && is_digit(src_[e])) {
        while (e < src_.size() && is_digit(src_[e])) ++e;
        end = e;
      }
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(src_.data() + at, src_.data() + end, value);
    if (ec != std::errc{} || ptr != src_.data() + end || !std::isfinite(value)) {
      throw SyntaxError(at, {"number"}, "syntax error at offset " + std::to_string(at) +
                                            ": numeric literal out of range");
    }
    pos_ = end;
    auto n = make(Op::number, at);
    n->value = value;
    return n;
  }
};

double int_power(double base, long exponent, std::size_t pos) {
  double acc = 1.0;
  for (long i = 0; i < std::labs(exponent); ++i) acc *= base;
  if (exponent < 0) {
    if (acc == 0.0) throw EvalError(pos, "division by zero in negative power");
    acc = 1.0 / acc;
  }
  return acc;
}

double power(double base, double exponent, std::size_t pos) {
  if (exponent == std::floor(exponent) && std::abs(exponent) <= 8.0) {
    return int_power(base, static_cast<long>(exponent), pos);
  }
  if (exponent == std::floor(exponent)) {
    if (base == 0.0 && exponent < 0.0) throw EvalError(pos, "division by zero in negative power");
    return std::pow(base, exponent);
  }
  if (base > 0.0) return std::exp(exponent * std::log(base));
  if (base == 0.0 && exponent > 0.0) return 0.0;
  throw EvalError(pos, "non-integer power of a non-positive base");
}

double eval(const Node& n, const EvalEnv& env) {
  switch (n.op) {
    case Op::number: return n.value;
    case Op::var_t: return env.t;
    case Op::var_s:
      if (!env.s) throw EvalError(n.pos, "variable s is not bound");
      return *env.s;
    case Op::neg: return -eval(*n.lhs, env);
    case Op::add: return eval(*n.lhs, env) + eval(*n.rhs, env);
    case Op::sub: return eval(*n.lhs, env) - eval(*n.rhs, env);
    case Op::mul: return eval(*n.lhs, env) * eval(*n.rhs, env);
    case Op::div: {
      const double num = eval(*n.lhs, env);
      const double den = eval(*n.rhs, env);
      if (den == 0.0) throw EvalError(n.pos, "division by zero");
      return num / den;
    }
    case Op::pow: return power(eval(*n.lhs, env), eval(*n.rhs, env), n.pos);
    case Op::call: break;
  }

  if (n.func == Func::ito) {
    if (!env.path) throw EvalError(n.pos, "ito(...) needs a Brownian path");
    const Node& integrand = *n.lhs;
    try {
      return ito_integral_at(
          *env.path,
          [&](double s) {
            EvalEnv inner{env.t, s, env.path};
            return eval(integrand, inner);
          },
          env.t);
    } catch (const DomainError& e) {
      throw EvalError(n.pos, e.what());
    }
  }

  const double x = eval(*n.lhs, env);
  switch (n.func) {
    case Func::sin: return std::sin(x);
    case Func::cos: return std::cos(x);
    case Func::exp: return std::exp(x);
    case Func::ln:
      if (!(x > 0.0)) throw EvalError(n.pos, "ln of non-positive argument");
      return std::log(x);
    case Func::sqrt:
      if (!(x >= 0.0)) throw EvalError(n.pos, "sqrt of negative argument");
      return std::sqrt(x);
    case Func::brownian:
      if (!env.path) throw EvalError(n.pos, "B(...) needs a Brownian path");
      try {
        return env.path->value_at(x);
      } catch (const DomainError& e) {
        throw EvalError(n.pos, e.what());
      }
    case Func::ito: break;
  }
  return 0.0;
}

void render(const Node& n, std::string& out) {
  auto binary = [&](const char* op) {
    out += '(';
    render(*n.lhs, out);
    out += op;
    render(*n.rhs, out);
    out += ')';
  };
  switch (n.op) {
    case Op::number: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.17g", n.value);
      out += buf;
      return;
    }
    case Op::var_t: out += 't'; return;
    case Op::var_s: out += 's'; return;
    case Op::neg:
      out += "(-";
      render(*n.lhs, out);
      out += ')';
      return;
    case Op::add: binary(" + "); return;
    case Op::sub: binary(" - "); return;
    case Op::mul: binary(" * "); return;
    case Op::div: binary(" / "); return;
    case Op::pow: binary("^"); return;
    case Op::call:
      out += func_name(n.func);
      out += '(';
      render(*n.lhs, out);
      out += ')';
      return;
  }
}

// s inside ito(...) is the integration variable and does not count as a free use.
void collect(const Node& n, Usage& u, bool inside_ito) {
  if (n.op == Op::var_t) u.t = true;
  if (n.op == Op::var_s && !inside_ito) u.s = true;
  const bool ito = n.op == Op::call && n.func == Func::ito;
  if (n.op == Op::call && (n.func == Func::brownian || ito)) u.brownian = true;
  if (n.lhs) collect(*n.lhs, u, inside_ito || ito);
  if (n.rhs) collect(*n.rhs, u, inside_ito);
}

} // namespace

UnknownIdentifierError::UnknownIdentifierError(std::size_t offset, std::string name)
    : SyntaxError(offset, {"t", "s", "sin", "cos", "exp", "ln", "sqrt", "B", "ito"},
                  "unknown identifier '" + name + "' at offset " + std::to_string(offset)),
      name_(std::move(name)) {}

Expr parse(std::string_view src) {
  Expr e;
  e.root_ = Parser(src).parse_all();
  e.source_ = std::make_shared<const std::string>(src);
  return e;
}

double Expr::evaluate(const EvalEnv& env) const { return eval(*root_, env); }

std::string Expr::to_string() const {
  std::string out;
  render(*root_, out);
  return out;
}

Usage Expr::usage() const {
  Usage u;
  collect(*root_, u, false);
  return u;
}

bool same_structure(const Node& a, const Node& b) {
  if (a.op != b.op) return false;
  if (a.op == Op::number && a.value != b.value) return false;
  if (a.op == Op::call && a.func != b.func) return false;
  if (static_cast<bool>(a.lhs) != static_cast<bool>(b.lhs)) return false;
  if (static_cast<bool>(a.rhs) != static_cast<bool>(b.rhs)) return false;
  if (a.lhs && !same_structure(*a.lhs, *b.lhs)) return false;
  if (a.rhs && !same_structure(*a.rhs, *b.rhs)) return false;
  return true;
}

} // namespace wsvie::expr
