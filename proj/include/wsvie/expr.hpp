#pragma once

#include <cstddef>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "wsvie/brownian_path.hpp"
#include "wsvie/error.hpp"

namespace wsvie::expr {

// Grammar (lowest to highest precedence):
//   sum     := product (('+' | '-') product)*
//   product := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?          right-associative
//   primary := number | 't' | 's' | call | '(' sum ')'
//   call    := name '(' sum ')'   name in {sin, cos, exp, ln, sqrt, B, ito}
//
// B(u) reads the bound Brownian path at u. ito(g) is the left-point Ito
// integral of g(s) from 0 to t on the bound path. There are no named
// constants; write exp(1) for e.

enum class Op { number, var_t, var_s, neg, add, sub, mul, div, pow, call };
enum class Func { sin, cos, exp, ln, sqrt, brownian, ito };

struct Node {
  Op op = Op::number;
  Func func = Func::sin;
  double value = 0.0;
  std::size_t pos = 0;
  std::unique_ptr<Node> lhs;
  std::unique_ptr<Node> rhs;
};

class SyntaxError : public Error {
public:
  SyntaxError(std::size_t offset, std::vector<std::string> expected, const std::string& what)
      : Error(what), offset_(offset), expected_(std::move(expected)) {}
  std::size_t offset() const noexcept { return offset_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifierError : public SyntaxError {
public:
  UnknownIdentifierError(std::size_t offset, std::string name);
  const std::string& name() const noexcept { return name_; }

private:
  std::string name_;
};

// Evaluation failure (domain error, missing binding) at a source offset.
class EvalError : public Error {
public:
  EvalError(std::size_t offset, const std::string& what)
      : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

private:
  std::size_t offset_;
};

struct EvalEnv {
  double t = 0.0;
  std::optional<double> s;
  const BrownianPath* path = nullptr;
};

struct Usage {
  bool t = false;
  bool s = false;  // free uses only; s inside ito(...) is bound
  bool brownian = false;  // B(...) or ito(...)
};

// Immutable parsed expression; cheap to copy and share across threads.
class Expr {
public:
  const Node& root() const noexcept { return *root_; }
  const std::string& source() const noexcept { return *source_; }
  Usage usage() const;

  double evaluate(const EvalEnv& env) const;

  // Fully parenthesized rendering that parses back to the same tree.
  std::string to_string() const;

private:
  friend Expr parse(std::string_view src);
  std::shared_ptr<const Node> root_;
  std::shared_ptr<const std::string> source_;
};

Expr parse(std::string_view src);

inline double evaluate(const Expr& e, const EvalEnv& env) { return e.evaluate(env); }

bool same_structure(const Node& a, const Node& b);

} // namespace wsvie::expr
