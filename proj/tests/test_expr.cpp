#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "berwald/expr.hpp"

using namespace berwald;

namespace {

const std::vector<std::string> kCoords = {"u", "v", "x", "y"};
const std::vector<std::string> kParams = {"H0", "m"};

Expr parse4(std::string_view text) { return parse_expr(text, kCoords, kParams); }

// Independent derivative oracle: central finite difference of the evaluator.
double central_fd(const Expr& e, const std::string& coord, SymbolValues env, double h) {
  SymbolValues hi = env, lo = env;
  hi[coord] += h;
  lo[coord] -= h;
  return (evaluate(e, hi) - evaluate(e, lo)) / (2.0 * h);
}

// Random expression generator for property tests. Depth-limited; biased
// toward smooth operations so most samples evaluate cleanly.
struct ExprGen {
  std::mt19937_64 rng;
  explicit ExprGen(unsigned seed) : rng(seed) {}

  double rand_const() {
    std::uniform_real_distribution<double> d(-3.0, 3.0);
    return d(rng);
  }

  Expr gen(int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 11);
    switch (pick(rng)) {
      case 0:
        return Expr::number(rand_const());
      case 1: {
        std::uniform_int_distribution<int> s(0, 3);
        return Expr::symbol(kCoords[static_cast<std::size_t>(s(rng))]);
      }
      case 2:
        return gen(depth - 1) + gen(depth - 1);
      case 3:
        return gen(depth - 1) - gen(depth - 1);
      case 4:
        return gen(depth - 1) * gen(depth - 1);
      case 5:
        return gen(depth - 1) / gen(depth - 1);
      case 6:
        return -gen(depth - 1);
      case 7:
        return sin(gen(depth - 1));
      case 8:
        return cos(gen(depth - 1));
      case 9:
        return exp(gen(depth - 1));
      case 10: {
        std::uniform_int_distribution<int> p(-2, 3);
        return pow(gen(depth - 1), static_cast<double>(p(rng)));
      }
      default:
        return sqrt(abs(gen(depth - 1)));
    }
  }

  SymbolValues random_point() {
    std::uniform_real_distribution<double> d(-2.0, 2.0);
    SymbolValues env;
    for (const auto& c : kCoords) env[c] = d(rng);
    return env;
  }
};

// Skip points too close to an abs/sign kink or other domain boundary: any
// abs/sign/sqrt/div/ln/pow subexpression whose critical argument is tiny.
bool near_kink(const Expr& e, const SymbolValues& env, double margin) {
  try {
    switch (e.kind()) {
      case ExprKind::Abs:
      case ExprKind::Sign:
      case ExprKind::Sqrt:
        if (std::abs(evaluate(e.children()[0], env)) < margin) return true;
        break;
      case ExprKind::Div:
        if (std::abs(evaluate(e.children()[1], env)) < margin) return true;
        break;
      case ExprKind::Ln:
        if (evaluate(e.children()[0], env) < margin) return true;
        break;
      case ExprKind::Pow:
        if (std::abs(evaluate(e.children()[0], env)) < margin) return true;
        break;
      default:
        break;
    }
    for (const Expr& c : e.children())
      if (near_kink(c, env, margin)) return true;
    return false;
  } catch (const DomainError&) {
    return true;
  }
}

}  // namespace

TEST_CASE("parse basic grammar") {
  Expr e = parse4("-2*u*v");
  SymbolValues env{{"u", 3.0}, {"v", 5.0}, {"x", 0.0}, {"y", 0.0}};
  CHECK(evaluate(e, env) == doctest::Approx(-30.0));

  Expr p = parse4("H0*(x^2 - y^2)");
  SymbolValues coords{{"u", 0.0}, {"v", 0.0}, {"x", 2.0}, {"y", 1.0}};
  SymbolValues params{{"H0", 1.0}};
  CHECK(evaluate(p, coords, params) == doctest::Approx(3.0));

  CHECK(evaluate(parse4("2*x+1"), SymbolValues{{"x", 3.0}}) == doctest::Approx(7.0));
  CHECK(evaluate(parse4("sqrt(abs(-4))"), SymbolValues{}) == doctest::Approx(2.0));
}

TEST_CASE("parse errors") {
  CHECK_THROWS_AS(parse4("exp(2*psi(x))"), UndeclaredSymbolError);
  try {
    parse4("u + psi");
  } catch (const UndeclaredSymbolError& err) {
    CHECK(err.symbol() == "psi");
    CHECK(err.offset() == 4);
  }
  CHECK_THROWS_AS(parse4("u + "), ParseError);
  CHECK_THROWS_AS(parse4("u ++ v"), ParseError);
  CHECK_THROWS_AS(parse4("(u + v"), ParseError);
  CHECK_THROWS_AS(parse4("u v"), ParseError);
  // Only constant exponents are part of the grammar.
  CHECK_THROWS_AS(parse4("u^v"), ParseError);
}

TEST_CASE("differentiate elementary cases") {
  std::vector<std::string> coords{"t"};
  std::vector<std::string> params{"m"};
  Expr t2 = parse_expr("t^2", coords, params);
  Expr dt2 = differentiate(t2, "t");
  CHECK(evaluate(dt2, SymbolValues{{"t", 5.0}}) == doctest::Approx(10.0));

  Expr g = parse_expr("exp(2*m*t)", coords, params);
  Expr dg = differentiate(g, "t");
  CHECK(evaluate(dg, SymbolValues{{"t", 0.0}}, SymbolValues{{"m", 0.5}}) == doctest::Approx(1.0));

  Expr a = parse_expr("abs(t)", coords, params);
  Expr da = differentiate(a, "t");
  CHECK(evaluate(da, SymbolValues{{"t", -3.0}}) == doctest::Approx(-1.0));
}

TEST_CASE("evaluate domain errors") {
  Expr q = parse4("1/x");
  CHECK_THROWS_AS(evaluate(q, SymbolValues{{"x", 0.0}}), DomainError);
  Expr l = parse4("ln(x)");
  CHECK_THROWS_AS(evaluate(l, SymbolValues{{"x", -1.0}}), DomainError);
  Expr s = parse4("sqrt(x)");
  CHECK_THROWS_AS(evaluate(s, SymbolValues{{"x", -1.0}}), DomainError);
  Expr p = parse4("x^-2");
  CHECK_THROWS_AS(evaluate(p, SymbolValues{{"x", 0.0}}), DomainError);
  CHECK(evaluate(p, SymbolValues{{"x", 2.0}}) == doctest::Approx(0.25));
}

TEST_CASE("derivative agrees with central finite difference") {
  ExprGen gen(20240811u);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    Expr e = gen.gen(6);
    SymbolValues env = gen.random_point();
    const std::string coord = kCoords[static_cast<std::size_t>(i % 4)];
    if (near_kink(e, env, 1e-3)) continue;
    double value, fd, fd_half;
    try {
      value = evaluate(differentiate(e, coord), env);
      fd = central_fd(e, coord, env, 1e-5);
      fd_half = central_fd(e, coord, env, 5e-6);
    } catch (const DomainError&) {
      continue;
    }
    // The oracle vouches for itself: only step-size-converged samples count.
    if (!std::isfinite(fd) || std::abs(fd - fd_half) > 1e-7 * (1.0 + std::abs(fd_half))) continue;
    ++checked;
    CHECK(std::abs(value - fd) <= 1e-6 * (1.0 + std::abs(value)));
  }
  CHECK(checked > 400);
}

TEST_CASE("print/parse round trip preserves values") {
  ExprGen gen(7u);
  int checked = 0;
  for (int i = 0; i < 100; ++i) {
    Expr e = gen.gen(5);
    const std::string text = to_string(e);
    Expr back;
    try {
      back = parse_expr(text, kCoords, kParams);
    } catch (const ParseError&) {
      FAIL("printed form failed to parse: ", text);
      continue;
    }
    for (int j = 0; j < 5; ++j) {
      SymbolValues env = gen.random_point();
      double a, b;
      try {
        a = evaluate(e, env);
        b = evaluate(back, env);
      } catch (const DomainError&) {
        continue;
      }
      ++checked;
      CHECK(std::abs(a - b) <= 1e-12 * (1.0 + std::abs(a)));
    }
  }
  CHECK(checked > 100);
}

TEST_CASE("substitute composes expressions") {
  std::vector<std::string> coords{"t"};
  std::vector<std::string> coords2{"s"};
  Expr e = parse_expr("t^2 + ln(t)", coords, {});
  Expr t_of_s = parse_expr("exp(s)", coords2, {});
  Expr composed = substitute(e, {{"t", t_of_s}});
  // e(t = e^s) = e^{2s} + s
  CHECK(evaluate(composed, SymbolValues{{"s", 0.7}}) ==
        doctest::Approx(std::exp(1.4) + 0.7).epsilon(1e-12));
  CHECK(!depends_on(composed, "t"));
  CHECK(depends_on(composed, "s"));
}

TEST_CASE("tape evaluation matches tree evaluation") {
  ExprGen gen(99u);
  for (int i = 0; i < 50; ++i) {
    Expr e = gen.gen(5);
    Expr de = differentiate(e, "x");
    std::vector<Expr> roots{e, de};
    ExprTape tape = ExprTape::compile(roots, kCoords);
    for (int j = 0; j < 10; ++j) {
      SymbolValues env = gen.random_point();
      std::vector<double> in;
      for (const auto& c : kCoords) in.push_back(env[c]);
      std::vector<double> out(2);
      double expect_e, expect_de;
      bool tree_threw = false;
      try {
        expect_e = evaluate(e, env);
        expect_de = evaluate(de, env);
      } catch (const DomainError&) {
        tree_threw = true;
      }
      if (tree_threw) {
        CHECK_THROWS_AS(tape.evaluate(in, out), DomainError);
        continue;
      }
      tape.evaluate(in, out);
      CHECK(out[0] == doctest::Approx(expect_e).epsilon(1e-13));
      CHECK(out[1] == doctest::Approx(expect_de).epsilon(1e-13));
    }
  }
}
