#pragma once

// Functional DSL.
//
//   input    := expr EOF
//   expr     := term (('+' | '-') term)*
//   term     := unary ('*' unary)*
//   unary    := '-' unary | primary
//   primary  := NUMBER | VAR | HERMITE '(' VAR ')' | '(' expr ')'
//             | '[' expr (',' expr)* ']'
//   NUMBER   := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]
//   VAR      := 'x' digits          eta_i
//   HERMITE  := 'h' digits          He_k
//
// Vector literals are only allowed as the whole input. Whitespace, including
// newlines, is insignificant.

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "wienerlab/errors.hpp"
#include "wienerlab/malliavin.hpp"

namespace wienerlab::dsl {

struct Span {
  unsigned line = 1;
  unsigned column = 1;  // 1-based
  unsigned length = 0;
};

class ParseError : public Error {
 public:
  ParseError(unsigned line, unsigned column, std::vector<std::string> expected,
             const std::string& found);

  unsigned line() const noexcept { return line_; }
  unsigned column() const noexcept { return column_; }
  const std::vector<std::string>& expected() const noexcept { return expected_; }

 private:
  unsigned line_;
  unsigned column_;
  std::vector<std::string> expected_;
};

class SemanticError : public Error {
 public:
  SemanticError(Span span, const std::string& what);
  const Span& span() const noexcept { return span_; }

 private:
  Span span_;
};

struct Expr {
  enum class Kind { kNumber, kVar, kHermite, kNeg, kAdd, kSub, kMul, kParen, kVector };

  Kind kind = Kind::kNumber;
  std::string lexeme;     // kNumber: source text
  unsigned index = 0;     // kVar, kHermite: coordinate
  unsigned order = 0;     // kHermite
  std::vector<Expr> children;
  Span span;
};

Expr parse(std::string_view text);
std::string print(const Expr& expr);

/// Result of lowering: a scalar functional or, for a vector literal, a VField.
using Lowered = std::variant<ChaosPoly, VField>;

Lowered lower(const Expr& expr, unsigned n, unsigned degree_cap = kDefaultDegreeCap);
/// Throws SemanticError on a vector literal.
ChaosPoly lower_scalar(const Expr& expr, unsigned n,
                       unsigned degree_cap = kDefaultDegreeCap);
/// Scalars become one-component fields.
VField lower_vector(const Expr& expr, unsigned n, unsigned degree_cap = kDefaultDegreeCap);

/// Inverse direction: a canonical DSL expression for p.
std::string to_dsl(const ChaosPoly& p);

}  // namespace wienerlab::dsl
