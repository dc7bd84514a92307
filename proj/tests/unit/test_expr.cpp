#include <cmath>
#include <random>

#include "doctest.h"
#include "filippov/errors.hpp"
#include "filippov/expr.hpp"

using namespace filippov;

namespace {

std::string random_expr(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, depth <= 0 ? 2 : 11);
    std::uniform_real_distribution<double> c(-3.0, 3.0);
    char buf[32];
    switch (pick(rng)) {
        case 0: return "x";
        case 1: return "y";
        case 2: std::snprintf(buf, sizeof buf, "%.3f", c(rng)); return buf;
        case 3: return "(" + random_expr(rng, depth - 1) + "+" + random_expr(rng, depth - 1) + ")";
        case 4: return "(" + random_expr(rng, depth - 1) + "-" + random_expr(rng, depth - 1) + ")";
        case 5: return "(" + random_expr(rng, depth - 1) + "*" + random_expr(rng, depth - 1) + ")";
        case 6: return "(" + random_expr(rng, depth - 1) + ")/(2+cos(" + random_expr(rng, depth - 1) + "))";
        case 7: return "sin(" + random_expr(rng, depth - 1) + ")";
        case 8: return "(" + random_expr(rng, depth - 1) + ")^2";
        case 9: return "ln(1+(" + random_expr(rng, depth - 1) + ")^2)";
        case 10: return "sqrt(1+(" + random_expr(rng, depth - 1) + ")^2)";
        default: return "-(" + random_expr(rng, depth - 1) + ")^3";
    }
}

}  // namespace

TEST_CASE("parse evaluates with the usual precedence") {
    CHECK(parse("1+2*3").eval(0, 0) == doctest::Approx(7));
    CHECK(parse("-2^2").eval(0, 0) == doctest::Approx(-4));
    CHECK(parse("2^3^2").eval(0, 0) == doctest::Approx(512));
    CHECK(parse("(3/2)*x - 1/2").eval(1, 0) == doctest::Approx(1));
    CHECK(parse("x*y - x/y").eval(2, 4) == doctest::Approx(7.5));
    CHECK(parse("sign(x)*abs(x)").eval(-3, 0) == doctest::Approx(-3));
    CHECK(parse("exp(ln(x))").eval(2.5, 0) == doctest::Approx(2.5));
    CHECK(parse("log(x)").eval(std::exp(1.0), 0) == doctest::Approx(1));
}

TEST_CASE("malformed input raises ParseError with an offset") {
    try {
        (void)parse("x+*y");
        FAIL("no error");
    } catch (const ParseError& e) {
        CHECK(e.offset() == 2);
    }
    CHECK_THROWS_AS((void)parse("2x"), ParseError);
    CHECK_THROWS_AS((void)parse("x^y"), ParseError);
    CHECK_THROWS_AS((void)parse("(x+1"), ParseError);
    CHECK_THROWS_AS((void)parse("foo(x)"), ParseError);
    CHECK_THROWS_AS((void)parse("z"), ParseError);
    CHECK_THROWS_AS((void)parse(""), ParseError);
}

TEST_CASE("evaluation outside the domain raises DomainError") {
    CHECK_THROWS_AS((void)parse("1/x").eval(0, 0), DomainError);
    CHECK_THROWS_AS((void)parse("ln(x)").eval(-1, 0), DomainError);
    CHECK_THROWS_AS((void)parse("sqrt(y)").eval(0, -1), DomainError);
}

TEST_CASE("printing round-trips exactly") {
    std::mt19937_64 rng(7);
    for (int i = 0; i < 200; ++i) {
        const Expr e = parse(random_expr(rng, 4));
        const Expr again = parse(e.str());
        CHECK(again.str() == e.str());
        const double x = 0.3, y = -0.7;
        CHECK(again.eval(x, y) == e.eval(x, y));
    }
}

TEST_CASE("symbolic derivatives agree with central differences") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> p(-1.5, 1.5);
    for (int i = 0; i < 60; ++i) {
        const Expr e = parse(random_expr(rng, 3));
        for (const Var v : {Var::X, Var::Y}) {
            const Expr d = e.derivative(v);
            for (int k = 0; k < 5; ++k) {
                const double x = p(rng), y = p(rng), h = 1e-5;
                const double fd = v == Var::X ? (e.eval(x + h, y) - e.eval(x - h, y)) / (2 * h)
                                              : (e.eval(x, y + h) - e.eval(x, y - h)) / (2 * h);
                const double sym = d.eval(x, y);
                CHECK(std::fabs(sym - fd) <= 1e-6 * std::max(1.0, std::fabs(sym)));
            }
        }
    }
}

TEST_CASE("derivatives of the elementary functions") {
    CHECK(parse("x^3").derivative(Var::X).eval(2, 0) == doctest::Approx(12));
    CHECK(parse("sin(x*y)").derivative(Var::Y).eval(1, 0) == doctest::Approx(1));
    CHECK(parse("abs(x)").derivative(Var::X).eval(-2, 0) == doctest::Approx(-1));
    CHECK(parse("abs(x)").derivative(Var::X).eval(0, 0) == 0.0);
    CHECK(parse("x+y").derivative(Var::X).is_constant());
    CHECK(parse("x+y").depends_on(Var::X));
    CHECK_FALSE(parse("3*y").depends_on(Var::X));
}

TEST_CASE("substitution and polynomial normal form") {
    const Expr e = parse("x^2+y").substitute(Var::Y, parse("x"));
    CHECK(e.eval(3, 100) == doctest::Approx(12));
    const auto p = to_polynomial(parse("(x+1)^2 - y*(2-y)"));
    REQUIRE(p.has_value());
    const Polynomial expected{{{2, 0}, 1.0}, {{1, 0}, 2.0}, {{0, 0}, 1.0}, {{0, 1}, -2.0}, {{0, 2}, 1.0}};
    CHECK(polynomials_equal(*p, expected));
    CHECK_FALSE(to_polynomial(parse("sin(x)")).has_value());
    CHECK_FALSE(to_polynomial(parse("1/x")).has_value());
}
