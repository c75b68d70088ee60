#include "wienerlab/harness/dsl.hpp"

#include <cctype>
#include <charconv>
#include <cmath>

namespace wienerlab::dsl {

namespace {

enum class Tok { kNumber, kVar, kHermite, kPlus, kMinus, kStar, kLParen, kRParen,
                 kLBracket, kRBracket, kComma, kEnd };

struct Token {
  Tok kind;
  std::string text;
  unsigned line;
  unsigned column;
  std::size_t offset;
};

std::string describe(const Token& t) {
  return t.kind == Tok::kEnd ? "end of input" : "'" + t.text + "'";
}

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i > 0) out += i + 1 == items.size() ? " or " : ", ";
    out += items[i];
  }
  return out;
}

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  unsigned line = 1, col = 1;
  std::size_t i = 0;
  auto digits = [&](std::size_t j) {
    while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
    return j;
  };
  while (i < src.size()) {
    const char c = src[i];
    if (c == '\n') {
      ++line;
      col = 1;
      ++i;
      continue;
    }
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++col;
      ++i;
      continue;
    }
    std::size_t end = i + 1;
    Tok kind;
    switch (c) {
      case '+': kind = Tok::kPlus; break;
      case '-': kind = Tok::kMinus; break;
      case '*': kind = Tok::kStar; break;
      case '(': kind = Tok::kLParen; break;
      case ')': kind = Tok::kRParen; break;
      case '[': kind = Tok::kLBracket; break;
      case ']': kind = Tok::kRBracket; break;
      case ',': kind = Tok::kComma; break;
      case 'x':
      case 'h':
        end = digits(i + 1);
        if (end == i + 1) {
          throw ParseError(line, col + 1, {"digits"},
                           i + 1 < src.size() ? "'" + std::string(1, src[i + 1]) + "'"
                                              : "end of input");
        }
        kind = c == 'x' ? Tok::kVar : Tok::kHermite;
        break;
      default:
        if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
          end = digits(i);
          if (end < src.size() && src[end] == '.') end = digits(end + 1);
          if (end < src.size() && (src[end] == 'e' || src[end] == 'E')) {
            std::size_t k = end + 1;
            if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
            const std::size_t e = digits(k);
            if (e == k) {
              throw ParseError(line, col + static_cast<unsigned>(k - i), {"exponent digits"},
                               k < src.size() ? "'" + std::string(1, src[k]) + "'"
                                              : "end of input");
            }
            end = e;
          }
          const std::string_view lexeme = src.substr(i, end - i);
          if (lexeme == "." || lexeme.find_first_of("0123456789") == std::string_view::npos) {
            throw ParseError(line, col, {"number"}, "'.'");
          }
          kind = Tok::kNumber;
        } else {
          throw ParseError(line, col, {"number", "variable", "hermite", "operator"},
                           "'" + std::string(1, c) + "'");
        }
    }
    out.push_back({kind, std::string(src.substr(i, end - i)), line, col, i});
    col += static_cast<unsigned>(end - i);
    i = end;
  }
  out.push_back({Tok::kEnd, "", line, col, src.size()});
  return out;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : tokens_(lex(src)) {}

  Expr parse_input() {
    Expr e = peek().kind == Tok::kLBracket ? parse_vector() : parse_expr();
    if (peek().kind != Tok::kEnd) fail({"'+'", "'-'", "'*'", "end of input"});
    return e;
  }

 private:
  const Token& peek() const { return tokens_[pos_]; }
  const Token& take() { return tokens_[pos_++]; }

  // At end of input the error points at the last consumed token, which is
  // where the text stops making sense.
  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = peek();
    if (t.kind == Tok::kEnd && pos_ > 0) {
      const Token& last = tokens_[pos_ - 1];
      throw ParseError(last.line, last.column, std::move(expected), describe(t));
    }
    throw ParseError(t.line, t.column, std::move(expected), describe(t));
  }

  const Token& expect(Tok kind, const char* what) {
    if (peek().kind != kind) fail({what});
    return take();
  }

  Span span_from(const Token& first) const {
    const Token& last = tokens_[pos_ - 1];
    return {first.line, first.column,
            static_cast<unsigned>(last.offset + last.text.size() - first.offset)};
  }

  Expr parse_vector() {
    const Token& open = take();
    Expr v{Expr::Kind::kVector, "", 0, 0, {}, {}};
    v.children.push_back(parse_expr());
    while (peek().kind == Tok::kComma) {
      take();
      v.children.push_back(parse_expr());
    }
    if (peek().kind != Tok::kRBracket) fail({"','", "']'", "'+'", "'-'", "'*'"});
    take();
    v.span = span_from(open);
    return v;
  }

  Expr parse_expr() {
    const Token& first = peek();
    Expr lhs = parse_term();
    while (peek().kind == Tok::kPlus || peek().kind == Tok::kMinus) {
      const Expr::Kind kind = take().kind == Tok::kPlus ? Expr::Kind::kAdd : Expr::Kind::kSub;
      Expr rhs = parse_term();
      Expr node{kind, "", 0, 0, {}, {}};
      node.children.push_back(std::move(lhs));
      node.children.push_back(std::move(rhs));
      node.span = span_from(first);
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_term() {
    const Token& first = peek();
    Expr lhs = parse_unary();
    while (peek().kind == Tok::kStar) {
      take();
      Expr rhs = parse_unary();
      Expr node{Expr::Kind::kMul, "", 0, 0, {}, {}};
      node.children.push_back(std::move(lhs));
      node.children.push_back(std::move(rhs));
      node.span = span_from(first);
      lhs = std::move(node);
    }
    return lhs;
  }

  Expr parse_unary() {
    if (peek().kind == Tok::kMinus) {
      const Token& op = take();
      Expr node{Expr::Kind::kNeg, "", 0, 0, {}, {}};
      node.children.push_back(parse_unary());
      node.span = span_from(op);
      return node;
    }
    return parse_primary();
  }

  static unsigned parse_index(const Token& t) {
    unsigned value = 0;
    const char* begin = t.text.data() + 1;
    const char* end = t.text.data() + t.text.size();
    const auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr != end) {
      throw SemanticError({t.line, t.column, static_cast<unsigned>(t.text.size())},
                          "index '" + t.text + "' is out of range");
    }
    return value;
  }

  Expr parse_primary() {
    const Token& t = peek();
    switch (t.kind) {
      case Tok::kNumber: {
        take();
        return {Expr::Kind::kNumber, t.text, 0, 0, {}, span_from(t)};
      }
      case Tok::kVar: {
        take();
        return {Expr::Kind::kVar, "", parse_index(t), 0, {}, span_from(t)};
      }
      case Tok::kHermite: {
        take();
        const unsigned order = parse_index(t);
        expect(Tok::kLParen, "'('");
        const Token& var = expect(Tok::kVar, "variable");
        expect(Tok::kRParen, "')'");
        return {Expr::Kind::kHermite, "", parse_index(var), order, {}, span_from(t)};
      }
      case Tok::kLParen: {
        take();
        Expr node{Expr::Kind::kParen, "", 0, 0, {}, {}};
        node.children.push_back(parse_expr());
        if (peek().kind != Tok::kRParen) fail({"')'", "'+'", "'-'", "'*'"});
        take();
        node.span = span_from(t);
        return node;
      }
      case Tok::kLBracket:
        return parse_vector();
      default:
        fail({"number", "variable", "hermite", "'('", "'['", "'-'"});
    }
  }

  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

void print_into(const Expr& e, std::string& out) {
  switch (e.kind) {
    case Expr::Kind::kNumber: out += e.lexeme; break;
    case Expr::Kind::kVar: out += "x" + std::to_string(e.index); break;
    case Expr::Kind::kHermite:
      out += "h" + std::to_string(e.order) + "(x" + std::to_string(e.index) + ")";
      break;
    case Expr::Kind::kNeg:
      out += "-";
      print_into(e.children[0], out);
      break;
    case Expr::Kind::kAdd:
    case Expr::Kind::kSub:
      print_into(e.children[0], out);
      out += e.kind == Expr::Kind::kAdd ? " + " : " - ";
      print_into(e.children[1], out);
      break;
    case Expr::Kind::kMul:
      print_into(e.children[0], out);
      out += "*";
      print_into(e.children[1], out);
      break;
    case Expr::Kind::kParen:
      out += "(";
      print_into(e.children[0], out);
      out += ")";
      break;
    case Expr::Kind::kVector:
      out += "[";
      for (std::size_t i = 0; i < e.children.size(); ++i) {
        if (i > 0) out += ", ";
        print_into(e.children[i], out);
      }
      out += "]";
      break;
  }
}

ChaosPoly lower_node(const Expr& e, unsigned n, unsigned cap) {
  auto check_index = [&](unsigned i) {
    if (i == 0 || i > n) {
      throw SemanticError(e.span, "variable x" + std::to_string(i) + " is outside x1..x" +
                                      std::to_string(n));
    }
  };
  switch (e.kind) {
    case Expr::Kind::kNumber: {
      double value = 0.0;
      const auto [ptr, ec] =
          std::from_chars(e.lexeme.data(), e.lexeme.data() + e.lexeme.size(), value);
      if (ec != std::errc() || !std::isfinite(value)) {
        throw SemanticError(e.span, "number '" + e.lexeme + "' is not representable");
      }
      return ChaosPoly::constant(n, value, cap);
    }
    case Expr::Kind::kVar:
      check_index(e.index);
      return ChaosPoly::coordinate(n, e.index, cap);
    case Expr::Kind::kHermite:
      check_index(e.index);
      if (e.order > cap) {
        throw SemanticError(e.span, "Hermite order " + std::to_string(e.order) +
                                        " exceeds the degree cap " + std::to_string(cap));
      }
      return ChaosPoly::hermite(n, e.index, e.order, cap);
    case Expr::Kind::kNeg: return -lower_node(e.children[0], n, cap);
    case Expr::Kind::kParen: return lower_node(e.children[0], n, cap);
    case Expr::Kind::kAdd:
      return lower_node(e.children[0], n, cap) + lower_node(e.children[1], n, cap);
    case Expr::Kind::kSub:
      return lower_node(e.children[0], n, cap) - lower_node(e.children[1], n, cap);
    case Expr::Kind::kMul: {
      const ChaosPoly a = lower_node(e.children[0], n, cap);
      const ChaosPoly b = lower_node(e.children[1], n, cap);
      try {
        return hermite_product(a, b);
      } catch (const DegreeCapExceeded& ex) {
        throw SemanticError(e.span, "product has degree " + std::to_string(ex.degree()) +
                                        " above the degree cap " + std::to_string(ex.cap()));
      }
    }
    case Expr::Kind::kVector:
      throw SemanticError(e.span, "vector literal is only allowed as the whole input");
  }
  throw SemanticError(e.span, "unknown node");
}

}  // namespace

ParseError::ParseError(unsigned line, unsigned column, std::vector<std::string> expected,
                       const std::string& found)
    : Error("syntax error at line " + std::to_string(line) + ", column " +
            std::to_string(column) + ": expected " + join(expected) + ", found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

SemanticError::SemanticError(Span span, const std::string& what)
    : Error("line " + std::to_string(span.line) + ", column " + std::to_string(span.column) +
            ": " + what),
      span_(span) {}

Expr parse(std::string_view text) { return Parser(text).parse_input(); }

std::string print(const Expr& expr) {
  std::string out;
  print_into(expr, out);
  return out;
}

Lowered lower(const Expr& expr, unsigned n, unsigned degree_cap) {
  if (n == 0 || n > kDimensionCap) {
    throw SemanticError(expr.span, "dimension n must be in 1.." + std::to_string(kDimensionCap));
  }
  if (expr.kind != Expr::Kind::kVector) return lower_node(expr, n, degree_cap);
  std::vector<ChaosPoly> comps;
  for (const auto& c : expr.children) comps.push_back(lower_node(c, n, degree_cap));
  return VField(n, std::move(comps));
}

ChaosPoly lower_scalar(const Expr& expr, unsigned n, unsigned degree_cap) {
  Lowered l = lower(expr, n, degree_cap);
  if (auto* p = std::get_if<ChaosPoly>(&l)) return std::move(*p);
  throw SemanticError(expr.span, "expected a scalar functional, found a vector literal");
}

VField lower_vector(const Expr& expr, unsigned n, unsigned degree_cap) {
  Lowered l = lower(expr, n, degree_cap);
  if (auto* v = std::get_if<VField>(&l)) return std::move(*v);
  return VField(n, {std::get<ChaosPoly>(std::move(l))});
}

std::string to_dsl(const ChaosPoly& p) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [index, coeff] : p.terms()) {
    const double mag = std::abs(coeff);
    if (first) {
      if (coeff < 0.0) out += "-";
    } else {
      out += coeff < 0.0 ? " - " : " + ";
    }
    first = false;
    std::string factors;
    for (const auto& [coord, order] : index.entries()) {
      if (!factors.empty()) factors += "*";
      factors += order == 1 ? "x" + std::to_string(coord)
                            : "h" + std::to_string(order) + "(x" + std::to_string(coord) + ")";
    }
    if (factors.empty()) {
      out += format_number(mag);
    } else if (mag == 1.0) {
      out += factors;
    } else {
      out += format_number(mag) + "*" + factors;
    }
  }
  return out;
}

}  // namespace wienerlab::dsl
