#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles/expr.hpp"
#include "tdho/errors.hpp"
#include "tdho/omega_expr.hpp"

using namespace tdho;

namespace {

// Random source text drawn from the grammar, with minimal parentheses so the
// parsers have to resolve precedence themselves.
std::string random_source(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 9);
  std::uniform_real_distribution<double> num(0.0, 3.0);
  static const char* kOps[] = {"+", "-", "*", "/", "^"};
  static const char* kFuncs[] = {"sin", "cos", "exp", "log", "sqrt", "tanh", "cosh", "sech", "abs"};
  switch (pick(rng)) {
    case 0: {
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.3g", num(rng));
      return buf;
    }
    case 1: return "t";
    case 2: return rng() % 2 ? "a" : "pi";
    case 3: return "-" + random_source(rng, depth - 1);
    case 4: return "(" + random_source(rng, depth - 1) + ")";
    case 5: return std::string(kFuncs[rng() % 9]) + "(" + random_source(rng, depth - 1) + ")";
    case 6: return "pow(" + random_source(rng, depth - 1) + ", " + random_source(rng, depth - 1) + ")";
    default:
      return random_source(rng, depth - 1) + " " + kOps[rng() % 5] + " " + random_source(rng, depth - 1);
  }
}

ExprNode random_ast(std::mt19937& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 6);
  std::uniform_real_distribution<double> num(0.0, 100.0);
  switch (pick(rng)) {
    case 0: return ExprNode::number(num(rng));
    case 1: return ExprNode::variable();
    case 2: return ExprNode::constant("w0", 1.25);
    case 3: return ExprNode::negate(random_ast(rng, depth - 1));
    case 4: {
      const Func f = static_cast<Func>(rng() % 9);
      return ExprNode::call(f, {random_ast(rng, depth - 1)});
    }
    case 5: return ExprNode::call(Func::Pow, {random_ast(rng, depth - 1), random_ast(rng, depth - 1)});
    default: {
      static const char kOps[] = {'+', '-', '*', '/', '^'};
      return ExprNode::binary(kOps[rng() % 5], random_ast(rng, depth - 1), random_ast(rng, depth - 1));
    }
  }
}

}  // namespace

TEST_CASE("exponential decay family parses to exp(-t)") {
  const ExprNode ast = parse_expression("w0^2*exp(-a*t)", {{"w0", 1.0}, {"a", 1.0}});
  for (double t : {-1.0, 0.0, 0.3, 2.0, 7.5}) CHECK(evaluate(ast, t) == doctest::Approx(std::exp(-t)).epsilon(1e-15));
  CHECK(ast.children[0].children[0].kind == ExprKind::Constant);
  CHECK(ast.children[0].children[0].value == 1.0);
}

TEST_CASE("single variable") {
  const ExprNode ast = parse_expression("t");
  CHECK(ast.kind == ExprKind::Variable);
  CHECK(ast.children.empty());
}

TEST_CASE("syntax errors carry byte offsets") {
  try {
    parse_expression("2*+");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position == 2);
    CHECK_FALSE(e.expected.empty());
  }
  CHECK_THROWS_AS(parse_expression(""), SyntaxError);
  CHECK_THROWS_AS(parse_expression("(t"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("t t"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("pow(t)"), SyntaxError);
  CHECK_THROWS_AS(parse_expression("sin(t, 2)"), SyntaxError);
  try {
    parse_expression("t + 1)");
    FAIL("expected SyntaxError");
  } catch (const SyntaxError& e) {
    CHECK(e.position == 5);
  }
}

TEST_CASE("unknown identifiers are rejected with their offset") {
  try {
    parse_expression("t + omega*t");
    FAIL("expected UnknownIdentifier");
  } catch (const UnknownIdentifier& e) {
    CHECK(e.name == "omega");
    CHECK(e.position == 4);
  }
  CHECK_NOTHROW(parse_expression("t + omega*t", {{"omega", 2.0}}));
}

TEST_CASE("unary minus binds looser than power") {
  const ExprNode ast = parse_expression("-t^2");
  REQUIRE(ast.kind == ExprKind::Negate);
  CHECK(ast.children[0].kind == ExprKind::Binary);
  CHECK(ast.children[0].op == '^');
  CHECK(evaluate(ast, 2.0) == -4.0);
  CHECK(evaluate(parse_expression("2^3^2"), 0.0) == 512.0);
  CHECK(evaluate(parse_expression("2^-1"), 0.0) == 0.5);
  CHECK(evaluate(parse_expression("8/4/2"), 0.0) == 1.0);
  CHECK(evaluate(parse_expression("1-2-3"), 0.0) == -4.0);
}

TEST_CASE("evaluation examples") {
  CHECK(evaluate(parse_expression("cosh(t)^-2"), 0.0) == 1.0);
  CHECK(evaluate(parse_expression("t^1.5"), 4.0) == 8.0);
  CHECK(evaluate(parse_expression("sech(t)"), 0.0) == 1.0);
  CHECK(evaluate(parse_expression("pow(t, 3)"), 2.0) == 8.0);
  CHECK(evaluate(parse_expression("abs(-t) + sqrt(4)"), 1.5) == 3.5);
  CHECK(evaluate(parse_expression("sin(t)^2 + 0.1"), 0.0) == doctest::Approx(0.1));
  CHECK(evaluate(parse_expression("1.5e2 + 2E-1"), 0.0) == 150.2);
}

TEST_CASE("non-finite results raise NonFinite") {
  try {
    evaluate(parse_expression("1/(t-1)"), 1.0);
    FAIL("expected NonFinite");
  } catch (const NonFinite& e) {
    CHECK(e.t == 1.0);
    CHECK(e.subexpression.find('/') != std::string::npos);
  }
  CHECK_THROWS_AS(evaluate(parse_expression("log(t)"), 0.0), NonFinite);
  CHECK_THROWS_AS(evaluate(parse_expression("log(t)"), -1.0), NonFinite);
  CHECK_THROWS_AS(evaluate(parse_expression("sqrt(t)"), -1.0), NonFinite);
  CHECK_THROWS_AS(evaluate(parse_expression("exp(t)"), 1000.0), NonFinite);
}

TEST_CASE("precedence agrees with a table-driven Pratt parser") {
  std::mt19937 rng(20240601);
  const ConstantTable constants{{"a", 0.75}};
  const std::map<std::string, double> oracle_constants{{"a", 0.75}};
  int compared = 0;
  while (compared < 200) {
    const std::string src = random_source(rng, 4);
    const auto expected = oracle::pratt_render(src, oracle_constants);
    REQUIRE_MESSAGE(expected.has_value(), src);
    const ExprNode ast = parse_expression(src, constants);
    CHECK_MESSAGE(to_string(ast) == *expected, src);
    ++compared;
  }
}

TEST_CASE("evaluation matches a shunting-yard evaluator bit for bit") {
  std::mt19937 rng(77);
  std::uniform_real_distribution<double> tdist(-3.0, 3.0);
  const ConstantTable constants{{"a", 0.75}};
  const std::map<std::string, double> oracle_constants{{"a", 0.75}};
  int finite = 0;
  for (int i = 0; i < 400; ++i) {
    const std::string src = random_source(rng, 4);
    const double t = tdist(rng);
    const auto reference = oracle::shunting_eval(src, t, oracle_constants);
    REQUIRE_MESSAGE(reference.has_value(), src);
    const ExprNode ast = parse_expression(src, constants);
    if (std::isfinite(*reference)) {
      CHECK_MESSAGE(evaluate(ast, t) == *reference, src);
      ++finite;
    } else {
      CHECK_THROWS_AS_MESSAGE(evaluate(ast, t), NonFinite, src);
    }
  }
  CHECK(finite > 200);
}

TEST_CASE("print then parse is the identity on random trees") {
  std::mt19937 rng(5);
  const ConstantTable constants{{"w0", 1.25}};
  for (int i = 0; i < 300; ++i) {
    const ExprNode ast = random_ast(rng, 5);
    const std::string text = to_string(ast);
    CHECK_MESSAGE(parse_expression(text, constants) == ast, text);
  }
}
