#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randset/errors.hpp"
#include "randset/model.hpp"
#include "randset/stream.hpp"

using namespace randset;

namespace {

double eval(const std::string& text, std::vector<double> x = {},
            std::vector<double> w = {}) {
  Expression e = parse_expression(text);
  Eigen::VectorXd xv = Eigen::Map<Eigen::VectorXd>(x.data(), x.size());
  Eigen::VectorXd wv = Eigen::Map<Eigen::VectorXd>(w.data(), w.size());
  return e.evaluate(xv, wv);
}

bool same_tree(const Expression::Node* a, const Expression::Node* b) {
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Expression::Node::Kind::constant: return a->value == b->value;
    case Expression::Node::Kind::variable:
      return a->var_kind == b->var_kind && a->var_index == b->var_index;
    case Expression::Node::Kind::unary_minus:
      return same_tree(a->a.get(), b->a.get());
    case Expression::Node::Kind::call:
      return a->func == b->func && same_tree(a->a.get(), b->a.get());
    default:
      return same_tree(a->a.get(), b->a.get()) && same_tree(a->b.get(), b->b.get());
  }
}

struct EvalCase {
  const char* text;
  double expected;
};

struct ErrorCase {
  const char* text;
};

}  // namespace

TEST_CASE("grammar suite: evaluation, precedence, associativity") {
  // exercised with x = (2, 3), w = (5,).
  const std::vector<double> x = {2.0, 3.0};
  const std::vector<double> w = {5.0};
  const EvalCase cases[] = {
      // Literals and variables.
      {"0", 0.0},
      {"42", 42.0},
      {"3.5", 3.5},
      {".25", 0.25},
      {"1e2", 100.0},
      {"2.5e-2", 0.025},
      {"1E+3", 1000.0},
      {"x1", 2.0},
      {"x2", 3.0},
      {"w1", 5.0},
      // Additive chains are left associative.
      {"1+2+3", 6.0},
      {"10-4-3", 3.0},
      {"10-4+2", 8.0},
      {"1+2-3+4", 4.0},
      // Multiplicative chains.
      {"2*3*4", 24.0},
      {"24/4/2", 3.0},
      {"24/4*2", 12.0},
      {"2*6/4", 3.0},
      // Precedence: * and / bind tighter than + and -.
      {"1+2*3", 7.0},
      {"2*3+1", 7.0},
      {"8-6/2", 5.0},
      {"6/2-1", 2.0},
      {"2+3*4-5", 9.0},
      {"2*x1+3", 7.0},
      {"x1+x2*w1", 17.0},
      // Parentheses override.
      {"(1+2)*3", 9.0},
      {"2*(3+1)", 8.0},
      {"(8-6)/2", 1.0},
      {"((((7))))", 7.0},
      {"(x1+x2)*(x1-x2)", -5.0},
      // Unary signs.
      {"-3", -3.0},
      {"+3", 3.0},
      {"--3", 3.0},
      {"-+-3", 3.0},
      {"-x1", -2.0},
      {"5--3", 8.0},
      {"5+-3", 2.0},
      {"-x1+x2", 1.0},
      {"-(x1+x2)", -5.0},
      {"-2*3", -6.0},
      {"2*-3", -6.0},
      // Power: right associative, binds tighter than unary minus.
      {"2^3", 8.0},
      {"2^3^2", 512.0},
      {"(2^3)^2", 64.0},
      {"-2^2", -4.0},
      {"(-2)^2", 4.0},
      {"2^-1", 0.5},
      {"2^-2", 0.25},
      {"4^0.5", 2.0},
      {"x1^3", 8.0},
      {"x2^0", 1.0},
      {"0^0", 1.0},
      {"(-2)^3", -8.0},
      {"2^2*3", 12.0},
      {"3*2^2", 12.0},
      {"2^(1+1)", 4.0},
      // Integer powers of negative bases run by repeated multiplication.
      {"(-x1)^2", 4.0},
      {"(-x1)^3", -8.0},
      // Function calls.
      {"sin(0)", 0.0},
      {"cos(0)", 1.0},
      {"exp(0)", 1.0},
      {"exp(1)", std::exp(1.0)},
      {"log(1)", 0.0},
      {"log(exp(2))", 2.0},
      {"log10(1000)", 3.0},
      {"abs(-4)", 4.0},
      {"abs(4)", 4.0},
      {"sin(x2 - 3)", 0.0},
      {"cos(x1 - 2)", 1.0},
      {"sin(0) + cos(0)", 1.0},
      {"exp(log(5))", 5.0},
      {"abs(x1 - x2)", 1.0},
      {"2*sin(0) + 3", 3.0},
      {"log(x1*x2 - 5)", 0.0},
      {"sin(cos(0) - 1)", 0.0},
      // Whitespace tolerance.
      {"  1 +\t2 ", 3.0},
      {"1\n+\n2", 3.0},
      // Mixed structures.
      {"x1*x2 - w1", 1.0},
      {"(x1 + 1)^2 - x2^2", 0.0},
      {"1/(1 + exp(-0))", 0.5},
      {"x1/x2 + x2/x1", 2.0 / 3.0 + 1.5},
      {"((x1+x2)^2 - x1^2 - x2^2)/2", 6.0},
  };
  int count = 0;
  for (const auto& c : cases) {
    CAPTURE(c.text);
    CHECK(eval(c.text, x, w) == doctest::Approx(c.expected).epsilon(1e-14));
    ++count;
  }
  CHECK(count >= 78);
}

TEST_CASE("grammar suite: hand-evaluated paper components") {
  CHECK(eval("sin(x2) + 3*cos(x2) + w1", {0, 0}, {0, 0}) == doctest::Approx(3.0));
  CHECK(eval("3*x1 - 20*log(1+x2) + w2", {0, 0}, {0, 0}) == doctest::Approx(0.0));
}

TEST_CASE("grammar suite: parse errors carry position and expectation") {
  const ErrorCase bad[] = {
      {"1+*2"},      {""},          {"(1+2"},     {"1+2)"},
      {"sin"},       {"sin 1"},     {"sin(1"},    {"x0"},
      {"y1"},        {"foo(1)"},    {"1 2"},      {"*3"},
      {"/3"},        {"x1 +"},      {"2^"},       {"()"},
      {"1..2"},      {"x1 x2"},     {"abs()"},    {"log(,)"},
  };
  int count = 0;
  for (const auto& c : bad) {
    CAPTURE(c.text);
    CHECK_THROWS_AS(parse_expression(c.text), ParseError);
    ++count;
  }
  CHECK(count == 20);
  // Position of the failing token.
  try {
    parse_expression("1+*2");
    FAIL("expected ParseError");
  } catch (const ParseError& e) {
    CHECK(e.line == 1);
    CHECK(e.column == 3);
    CHECK(!e.expected.empty());
  }
}

TEST_CASE("grammar suite: print/reparse round trip") {
  const char* texts[] = {
      "sin(x2) + 3*cos(x2) + w1",
      "3*x1 - 20*log(1+x2) + w2",
      "-0.7*x2 + 0.1*x2^2 + 0.1*x1*x2 + 0.1*exp(x1) + w1",
      "x1 + x2 - 0.1*x1^2 + 0.2*x1*x2 + w2",
      "2^-3 + abs(-x1)/(1+w1)",
      "log10(x1^2 + 1) - exp(-x2)",
      "-(-x1 + -x2)",
      "1 + 2*3 - 4/5 + 6^2",
  };
  for (const char* t : texts) {
    CAPTURE(t);
    Expression original = parse_expression(t);
    Expression reparsed = parse_expression(original.print());
    CHECK(same_tree(original.root().get(), reparsed.root().get()));
  }
}

TEST_CASE("domain errors name the subexpression") {
  CHECK_THROWS_AS(eval("log(x1 - 3)", {2, 0}, {}), DomainError);
  CHECK_THROWS_AS(eval("1/(x1 - 2)", {2, 0}, {}), DomainError);
  CHECK_THROWS_AS(eval("0^-1"), DomainError);
  try {
    eval("2 + log(x1 - 3)", {2, 0}, {});
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(std::string(e.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("builtin sysF matches the hand-coded closed form") {
  Model m = builtin_model("sysF");
  CHECK(m.state_dim() == 2);
  CHECK(m.noise_dim() == 2);
  CHECK_FALSE(m.has_measurement());

  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd at0 = m.eval_dynamics(zero2, zero2);
  CHECK(at0[0] == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(at0[1] == doctest::Approx(0.0).epsilon(1e-15));

  CounterRng rng(555, 0, 0, Purpose::generic);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(2), w(2);
    x << rng.uniform(0, 1), rng.uniform(0, 1);
    w << rng.uniform(-0.2, 0.2), rng.uniform(-0.2, 0.2);
    Eigen::VectorXd out = m.eval_dynamics(x, w);
    double f1 = std::sin(x[1]) + 3.0 * std::cos(x[1]) + w[0];
    double f2 = 3.0 * x[0] - 20.0 * std::log(1.0 + x[1]) + w[1];
    CHECK(out[0] == doctest::Approx(f1).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(f2).epsilon(1e-12));
  }

  // log singularity at x2 = -1.
  Eigen::VectorXd bad(2);
  bad << 0.0, -1.0;
  CHECK_THROWS_AS(m.eval_dynamics(bad, zero2), DomainError);
}

TEST_CASE("builtin abrc08 matches the hand-coded closed form") {
  Model m = builtin_model("abrc08");
  CHECK(m.meas_dim() == 1);
  Eigen::VectorXd zero2 = Eigen::VectorXd::Zero(2);
  Eigen::VectorXd at0 = m.eval_dynamics(zero2, zero2);
  CHECK(at0[0] == doctest::Approx(0.1).epsilon(1e-15));  // 0.1 e^0
  CHECK(at0[1] == doctest::Approx(0.0).epsilon(1e-15));

  Eigen::VectorXd x12(2);
  x12 << 1.0, 2.0;
  CHECK(m.eval_measurement(x12)[0] == doctest::Approx(3.0));
  CHECK(m.eval_measurement(zero2)[0] == doctest::Approx(0.0));

  CounterRng rng(556, 0, 0, Purpose::generic);
  for (int i = 0; i < 20; ++i) {
    Eigen::VectorXd x(2), w(2);
    x << rng.uniform(-3, 3), rng.uniform(-3, 3);
    w << rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1);
    Eigen::VectorXd out = m.eval_dynamics(x, w);
    double f1 = -0.7 * x[1] + 0.1 * x[1] * x[1] + 0.1 * x[0] * x[1] +
                0.1 * std::exp(x[0]) + w[0];
    double f2 = x[0] + x[1] - 0.1 * x[0] * x[0] + 0.2 * x[0] * x[1] + w[1];
    CHECK(out[0] == doctest::Approx(f1).epsilon(1e-12));
    CHECK(out[1] == doctest::Approx(f2).epsilon(1e-12));
    CHECK(m.eval_measurement(x)[0] == doctest::Approx(x[0] + x[1]).epsilon(1e-12));
  }

  // Domain boxes match the benchmark statement.
  CHECK(m.initial_box().lower()[0] == -3.0);
  CHECK(m.noise_box().upper()[0] == 0.1);
  CHECK(m.meas_noise_box().upper()[0] == 0.2);
}

TEST_CASE("custom scalar measurement") {
  std::vector<Expression> f = {parse_expression("x1 + w1")};
  std::vector<Expression> g = {parse_expression("x1^2")};
  Box x0(Eigen::VectorXd::Constant(1, -5.0), Eigen::VectorXd::Constant(1, 5.0));
  Box wbox(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  Box vbox(Eigen::VectorXd::Constant(1, -1.0), Eigen::VectorXd::Constant(1, 1.0));
  Model m(1, 1, 1, std::move(f), std::move(g), x0, wbox, vbox);
  Eigen::VectorXd x(1);
  x << 3.0;
  CHECK(m.eval_measurement(x)[0] == doctest::Approx(9.0));
}

TEST_CASE("model validation failures") {
  Box b1(Eigen::VectorXd::Constant(1, 0.0), Eigen::VectorXd::Constant(1, 1.0));
  // Dynamics referencing w2 with a 1-D noise box.
  std::vector<Expression> f = {parse_expression("x1 + w2")};
  CHECK_THROWS_AS(Model(1, 1, 0, std::move(f), {}, b1, b1,
                        Box(Eigen::VectorXd(0), Eigen::VectorXd(0))),
                  ConfigError);
  // Measurement using noise variables.
  std::vector<Expression> f2 = {parse_expression("x1")};
  std::vector<Expression> g2 = {parse_expression("x1 + w1")};
  CHECK_THROWS_AS(Model(1, 1, 1, std::move(f2), std::move(g2), b1, b1, b1),
                  ConfigError);
}
