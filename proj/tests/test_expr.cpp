/**
 * @file test_expr.cpp
 * @brief Parser, evaluator, and formatter tests.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsde/errors.hpp"
#include "bsde/expr.hpp"

#include <cmath>
#include <random>
#include <string>

using namespace bsde;
using namespace bsde::expr;

namespace {

Expression parse_tyz(const std::string& s) { return parse(s, VarSet::of("tyz")); }

Env env_yz(double y, double z) {
    Env env;
    env.y = y;
    env.z = z;
    return env;
}

/// Random AST over {t,y,z} with nonnegative literals (negative literals
/// print as Neg(c) and would change the tree, not the value).
NodePtr random_tree(std::mt19937_64& rng, int depth) {
    std::uniform_int_distribution<int> pick(0, 9);
    std::uniform_real_distribution<double> literal(0.0, 4.0);
    if (depth == 0 || pick(rng) < 3) {
        if (pick(rng) < 5) return number(literal(rng));
        const char vars[3] = {'t', 'y', 'z'};
        return variable(vars[pick(rng) % 3]);
    }
    switch (pick(rng)) {
        case 0: return unary(UnaryOp::neg, random_tree(rng, depth - 1));
        case 1: return unary(UnaryOp::abs, random_tree(rng, depth - 1));
        case 2: return unary(UnaryOp::sin, random_tree(rng, depth - 1));
        case 3: return unary(UnaryOp::exp, random_tree(rng, depth - 1));
        case 4:
            return binary(BinaryOp::add, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 5:
            return binary(BinaryOp::sub, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 6:
            return binary(BinaryOp::mul, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 7:
            return binary(BinaryOp::min, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        case 8:
            return binary(BinaryOp::max, random_tree(rng, depth - 1), random_tree(rng, depth - 1));
        default:
            return binary(BinaryOp::pow, random_tree(rng, depth - 1), number(2.0));
    }
}

} // namespace

TEST_CASE("parse: -5*abs(y+z) has the documented shape") {
    const auto parsed = parse_tyz("-5*abs(y+z)");
    const auto expected =
        binary(BinaryOp::mul, unary(UnaryOp::neg, number(5.0)),
               unary(UnaryOp::abs, binary(BinaryOp::add, variable('y'), variable('z'))));
    CHECK(same_structure(parsed.root(), expected));
}

TEST_CASE("parse: sin(abs(x))") {
    const auto parsed = parse("sin(abs(x))", VarSet::of("x"));
    const auto expected = unary(UnaryOp::sin, unary(UnaryOp::abs, variable('x')));
    CHECK(same_structure(parsed.root(), expected));
}

TEST_CASE("parse: unknown identifier is rejected with its name") {
    CHECK_THROWS_WITH_AS(parse_tyz("ry + z"), doctest::Contains("unknown identifier"),
                         ConfigError);
}

TEST_CASE("parse: out-of-set variable names the allowed set") {
    CHECK_THROWS_WITH_AS(parse_tyz("x + 1"), doctest::Contains("allowed"), ConfigError);
    CHECK_NOTHROW(parse("x", VarSet::of("x")));
}

TEST_CASE("parse: position information in errors") {
    CHECK_THROWS_WITH_AS(parse_tyz("y + + z"), doctest::Contains("position 5"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_tyz("(y + z"), doctest::Contains("position"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_tyz(""), doctest::Contains("empty"), ConfigError);
    CHECK_THROWS_WITH_AS(parse_tyz("y @ z"), doctest::Contains("position 3"), ConfigError);
}

TEST_CASE("parse: no implicit multiplication") {
    CHECK_THROWS_AS(parse_tyz("2 y"), ConfigError);
    CHECK_THROWS_AS(parse_tyz("(y)(z)"), ConfigError);
}

TEST_CASE("evaluate: documented examples") {
    CHECK(evaluate(parse_tyz("-5*abs(y+z)"), env_yz(1.0, 2.0)) == doctest::Approx(-15.0));
    CHECK(evaluate(parse_tyz("negpart(y - z)"), env_yz(1.0, 3.0)) == doctest::Approx(2.0));
    Env at_zero;
    CHECK(evaluate(parse("sin(abs(x))", VarSet::of("x")), at_zero) == doctest::Approx(0.0));
}

TEST_CASE("evaluate: pospart/negpart identity x = x+ - x-") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const auto plus = parse_tyz("pospart(y)");
    const auto minus = parse_tyz("negpart(y)");
    for (int i = 0; i < 200; ++i) {
        const double y = u(rng);
        const Env env = env_yz(y, 0.0);
        CHECK(plus(env) - minus(env) == doctest::Approx(y).epsilon(1e-14));
        CHECK(plus(env) >= 0.0);
        CHECK(minus(env) >= 0.0);
    }
}

TEST_CASE("evaluate: precedence and associativity") {
    Env env;
    CHECK(evaluate(parse_tyz("2 + 3*4"), env) == doctest::Approx(14.0));
    CHECK(evaluate(parse_tyz("2*3^2"), env) == doctest::Approx(18.0));
    CHECK(evaluate(parse_tyz("2^3^2"), env) == doctest::Approx(512.0));  // right-assoc
    CHECK(evaluate(parse_tyz("8 - 4 - 2"), env) == doctest::Approx(2.0));  // left-assoc
    CHECK(evaluate(parse_tyz("-2^2"), env) == doctest::Approx(-4.0));  // - binds below ^
    CHECK(evaluate(parse_tyz("(-2)^2"), env) == doctest::Approx(4.0));
    CHECK(evaluate(parse_tyz("min(1, 2)"), env) == doctest::Approx(1.0));
    CHECK(evaluate(parse_tyz("max(1, 2)"), env) == doctest::Approx(2.0));
}

TEST_CASE("evaluate: integer exponents on negative bases") {
    Env env;
    CHECK(evaluate(parse_tyz("(0 - 2)^3"), env) == doctest::Approx(-8.0));
    CHECK(evaluate(parse_tyz("(0 - 2)^(-2)"), env) == doctest::Approx(0.25));
}

TEST_CASE("evaluate: domain errors") {
    Env env;
    CHECK_THROWS_AS(evaluate(parse_tyz("ln(0)"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("ln(0 - 1)"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("sqrt(0 - 1)"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("1/0"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("0^(0 - 1)"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("(0 - 2)^0.5"), env), DomainError);
    CHECK_THROWS_AS(evaluate(parse_tyz("exp(1000)*exp(1000)"), env), DomainError);
}

TEST_CASE("format: documented examples") {
    CHECK(format(wrap(number(0.5), VarSet::of(""))) == "0.5");
    const auto needs_parens = wrap(
        binary(BinaryOp::mul, binary(BinaryOp::add, variable('y'), variable('z')), number(2.0)),
        VarSet::of("yz"));
    const std::string printed = format(needs_parens);
    CHECK(printed.find('(') != std::string::npos);
    CHECK(same_structure(parse(printed, VarSet::of("yz")), needs_parens));
}

TEST_CASE("format: y+z*2 round-trips") {
    const auto e = parse_tyz("y+z*2");
    CHECK(same_structure(parse(format(e), VarSet::of("tyz")), e));
}

TEST_CASE("format: round-trips random ASTs structurally") {
    std::mt19937_64 rng(20240811);
    for (int i = 0; i < 400; ++i) {
        const auto tree = wrap(random_tree(rng, 5), VarSet::of("tyz"));
        const std::string printed = format(tree);
        CAPTURE(printed);
        const auto reparsed = parse(printed, VarSet::of("tyz"));
        CHECK(same_structure(reparsed, tree));
    }
}

TEST_CASE("format: number printing is shortest round-trip") {
    CHECK(format(wrap(number(1.0), VarSet::of(""))) == "1");
    CHECK(format(wrap(number(0.1), VarSet::of(""))) == "0.1");
    const double awkward = 0.1 + 0.2;  // needs 17 digits
    const auto printed = format(wrap(number(awkward), VarSet::of("")));
    const auto reparsed = parse(printed, VarSet::of(""));
    Env env;
    CHECK(evaluate(reparsed, env) == awkward);
}

TEST_CASE("expression metadata") {
    const auto e = parse_tyz("y + z");
    CHECK(e.vars().allows('y'));
    CHECK(!e.vars().allows('x'));
    CHECK(!e.empty());
    CHECK(Expression().empty());
}
