#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "wienerlab/harness/dsl.hpp"
#include "wienerlab/harness/instances.hpp"

using namespace wienerlab;
using namespace wienerlab::dsl;

namespace {

ChaosPoly x(unsigned n, unsigned i) { return ChaosPoly::coordinate(n, i); }

// Random source text in the printer's canonical layout.
class Corpus {
 public:
  explicit Corpus(std::uint64_t seed) : rng_(seed) {}

  std::string expr(int depth) {
    std::string s = term(depth);
    for (unsigned k = pick(3); k > 0; --k) s += (pick(2) ? " + " : " - ") + term(depth);
    return s;
  }

  std::string with_noise(const std::string& s) {
    std::string out;
    for (char c : s) {
      if (c == ' ') {
        out += pick(2) ? "  " : "\n ";
      } else {
        out += c;
        if (pick(4) == 0 && (c == '*' || c == '(' || c == '[' || c == ',')) out += '\t';
      }
    }
    return out;
  }

 private:
  unsigned pick(unsigned n) { return std::uniform_int_distribution<unsigned>(0, n - 1)(rng_); }

  std::string term(int depth) {
    std::string s = unary(depth);
    for (unsigned k = pick(3); k > 0; --k) s += "*" + unary(depth);
    return s;
  }

  std::string unary(int depth) { return pick(6) == 0 ? "-" + unary(depth) : primary(depth); }

  std::string primary(int depth) {
    switch (pick(depth > 0 ? 5 : 4)) {
      case 0: {
        static const char* nums[] = {"0", "1", "2.5", "0.125", "3e-2", "1.5E+1", "42"};
        return nums[pick(7)];
      }
      case 1: return "x" + std::to_string(1 + pick(4));
      case 2: return "h" + std::to_string(pick(4)) + "(x" + std::to_string(1 + pick(4)) + ")";
      case 3: return "x" + std::to_string(1 + pick(2));
      default: return "(" + expr(depth - 1) + ")";
    }
  }

  std::mt19937_64 rng_;
};

void expect_parse_error(const std::string& text, unsigned line, unsigned column) {
  try {
    parse(text);
    ADD_FAILURE() << "no error for '" << text << "'";
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), line) << text;
    EXPECT_EQ(e.column(), column) << text;
    EXPECT_FALSE(e.expected().empty());
  }
}

Span semantic_span(const std::string& text, unsigned n, unsigned cap = kDefaultDegreeCap) {
  try {
    lower(parse(text), n, cap);
  } catch (const SemanticError& e) {
    return e.span();
  }
  ADD_FAILURE() << "no semantic error for '" << text << "'";
  return {};
}

}  // namespace

TEST(Dsl, Examples) {
  EXPECT_EQ(lower_scalar(parse("x1*x2"), 2), x(2, 1) * x(2, 2));
  EXPECT_EQ(lower_scalar(parse("h2(x1) + 3"), 1),
            ChaosPoly::hermite(1, 1, 2) + ChaosPoly::constant(1, 3.0));
  EXPECT_EQ(lower_scalar(parse("x1*x1"), 1),
            ChaosPoly::hermite(1, 1, 2) + ChaosPoly::constant(1, 1.0));
  const VField v = lower_vector(parse("[x1*x2, h2(x1)]"), 2);
  ASSERT_EQ(v.target_dim(), 2u);
  EXPECT_EQ(v[1], ChaosPoly::hermite(2, 1, 2));
  EXPECT_EQ(lower_vector(parse("x1"), 1).target_dim(), 1u);
}

TEST(Dsl, PrecedenceAndAssociativity) {
  EXPECT_EQ(print(parse("1-2-3")), "1 - 2 - 3");
  const Expr e = parse("1 - 2 - 3");
  ASSERT_EQ(e.kind, Expr::Kind::kSub);
  EXPECT_EQ(e.children[0].kind, Expr::Kind::kSub);
  const Expr m = parse("x1 + x2*x3");
  ASSERT_EQ(m.kind, Expr::Kind::kAdd);
  EXPECT_EQ(m.children[1].kind, Expr::Kind::kMul);
  EXPECT_EQ(lower_scalar(parse("2 - 3 - 4"), 1), ChaosPoly::constant(1, -5.0));
  EXPECT_EQ(lower_scalar(parse("--x1"), 1), x(1, 1));
  EXPECT_EQ(lower_scalar(parse("-x1*x1"), 1),
            -(ChaosPoly::hermite(1, 1, 2) + ChaosPoly::constant(1, 1.0)));
}

TEST(Dsl, PrintParseRoundTrip) {
  Corpus corpus(2024);
  for (int t = 0; t < 100; ++t) {
    const std::string canonical = corpus.expr(2);
    const std::string noisy = corpus.with_noise(canonical);
    EXPECT_EQ(print(parse(noisy)), canonical) << noisy;
    EXPECT_EQ(print(parse(canonical)), canonical);
  }
  EXPECT_EQ(print(parse("[ x1 ,h2( x2 ) ]")), "[x1, h2(x2)]");
}

TEST(Dsl, LoweringMatchesEvaluation) {
  Corpus corpus(77);
  std::mt19937_64 rng(78);
  std::normal_distribution<double> g;
  int lowered = 0;
  for (int t = 0; t < 100; ++t) {
    const std::string text = corpus.expr(1);
    ChaosPoly p(4);
    try {
      p = lower_scalar(parse(text), 4);
    } catch (const SemanticError&) {
      continue;  // over the degree cap
    }
    ++lowered;
    // Re-lower the canonical form and compare structurally.
    EXPECT_LE(l2_norm(lower_scalar(parse(to_dsl(p)), 4) - p), 1e-12 * (1.0 + l2_norm(p)))
        << text << " -> " << to_dsl(p);
    std::vector<double> s(4);
    for (auto& e : s) e = g(rng);
    // Direct evaluation of the expression with ordinary arithmetic.
    const double via_algebra = evaluate(p, s);
    const double via_text = evaluate(lower_scalar(parse(print(parse(text))), 4), s);
    EXPECT_NEAR(via_algebra, via_text, 1e-9 * (1.0 + std::abs(via_algebra)));
  }
  EXPECT_GT(lowered, 50);
}

TEST(Dsl, ToDslRoundTrip) {
  harness::Rng rng(79);
  for (int t = 0; t < 50; ++t) {
    const ChaosPoly p = harness::random_poly(rng, {5, 4, 6, 8});
    EXPECT_EQ(lower_scalar(parse(to_dsl(p)), 5), p) << to_dsl(p);
  }
  EXPECT_EQ(to_dsl(ChaosPoly(3)), "0");
  EXPECT_EQ(to_dsl(ChaosPoly::hermite(2, 1, 2) - 2.0 * x(2, 2)), "-2*x2 + h2(x1)");
}

TEST(Dsl, SyntaxErrors) {
  expect_parse_error("x1*(", 1, 4);
  expect_parse_error("x1 +", 1, 4);
  expect_parse_error("x1 x2", 1, 4);
  expect_parse_error("h2 x1", 1, 4);
  expect_parse_error("x1\n  * )", 2, 5);
  expect_parse_error("(x1", 1, 2);
  expect_parse_error("[x1, x2", 1, 6);
  expect_parse_error("x1 $ 2", 1, 4);
  expect_parse_error("", 1, 1);
  try {
    parse("x1*(");
  } catch (const ParseError& e) {
    const std::string what = e.what();
    EXPECT_NE(what.find("line 1, column 4"), std::string::npos) << what;
    EXPECT_NE(what.find("expected"), std::string::npos) << what;
  }
}

TEST(Dsl, SemanticErrors) {
  const Span order = semantic_span("x1 + h9(x1)", 1);
  EXPECT_EQ(order.column, 6u);
  EXPECT_EQ(order.length, 6u);
  EXPECT_EQ(semantic_span("x3", 2).column, 1u);
  EXPECT_EQ(semantic_span("2*x0", 2).column, 3u);
  // Degree-cap overflow in a product points at the product.
  const Span prod = semantic_span("1 + h3(x1)*h2(x1)", 1, 4);
  EXPECT_EQ(prod.column, 5u);
  EXPECT_EQ(semantic_span("[x1, [x2]]", 2).column, 6u);
  EXPECT_THROW(lower_scalar(parse("[x1, x2]"), 2), SemanticError);
  EXPECT_THROW(lower(parse("x1"), 0), SemanticError);
}
