/**
 * @file test_oracle.cpp
 * @brief Quadrature, Monte Carlo, closed forms, and the path-tree oracle.
 */

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "bsde/errors.hpp"
#include "bsde/expr.hpp"
#include "bsde/lattice.hpp"
#include "bsde/oracle.hpp"
#include "bsde/problem.hpp"
#include "bsde/reflected.hpp"
#include "bsde/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace bsde;
using namespace bsde::oracle;
using problem::Generator;
using problem::ProblemSpec;

namespace {

expr::Expression over_x(const std::string& s) { return expr::parse(s, expr::VarSet::of("x")); }

ProblemSpec spec_of(Generator g, const std::string& terminal) {
    ProblemSpec spec;
    spec.generator = std::move(g);
    spec.terminal = over_x(terminal);
    return spec;
}

} // namespace

TEST_CASE("gauss_expectation: documented examples") {
    CHECK(std::abs(gauss_expectation(over_x("x"), 1.0)) <= 1e-10);
    CHECK(std::abs(gauss_expectation(over_x("x"), 0.3)) <= 1e-10);
    CHECK(gauss_expectation(over_x("x^2"), 1.0) == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(gauss_expectation(over_x("x^2"), 4.0) == doctest::Approx(4.0).epsilon(1e-10));
    CHECK(gauss_expectation(over_x("exp(x)"), 1.0) ==
          doctest::Approx(std::exp(0.5)).epsilon(1e-10));
    // std::function overload
    CHECK(gauss_expectation([](double x) { return x * x * x * x; }, 1.0) ==
          doctest::Approx(3.0).epsilon(1e-9));
}

TEST_CASE("gauss_expectation: unresolvable oscillation fails loudly") {
    // sin(1/|x|) oscillates without bound near 0; panel doubling cannot
    // reach the relative tolerance before the evaluation cap.
    CHECK_THROWS_AS(gauss_expectation(over_x("sin(1/abs(x))"), 1.0), NumericalError);
}

TEST_CASE("monte carlo: documented examples") {
    const auto constant = monte_carlo_expectation(over_x("3.5"), 1.0, 1000, 42);
    CHECK(constant.value == doctest::Approx(3.5));
    CHECK(constant.standard_error == doctest::Approx(0.0));
    CHECK(constant.method == Method::monte_carlo);
    CHECK(constant.count == 1000);

    const auto zero_mean = monte_carlo_expectation(over_x("x"), 1.0, 1000000, 42);
    CHECK(std::abs(zero_mean.value) <= 4.0 * zero_mean.standard_error);

    CHECK_THROWS_AS(monte_carlo_expectation(over_x("x"), 1.0, 1, 42), ConfigError);
}

TEST_CASE("monte carlo matches quadrature within four standard errors") {
    const auto h = over_x("sin(abs(x))*exp(x)");
    const double reference = gauss_expectation(h, 1.0);
    const auto mc = monte_carlo_expectation(h, 1.0, 10000000, 777);
    CHECK(std::abs(mc.value - reference) <= 4.0 * mc.standard_error);
}

TEST_CASE("monte carlo is bit-reproducible for a fixed seed") {
    const auto h = over_x("sin(abs(x))*exp(x)");
    const auto a = monte_carlo_expectation(h, 1.0, 50000, 123);
    const auto b = monte_carlo_expectation(h, 1.0, 50000, 123);
    CHECK(a.value == b.value);
    CHECK(a.standard_error == b.standard_error);
    const auto c = monte_carlo_expectation(h, 1.0, 50000, 124);
    CHECK(a.value != c.value);
}

TEST_CASE("normal stream: deterministic and roughly standard") {
    NormalStream a(9001), b(9001);
    for (int i = 0; i < 100; ++i) CHECK(a.next() == b.next());
    NormalStream s(555);
    double sum = 0.0, sumsq = 0.0;
    const int count = 20000;
    for (int i = 0; i < count; ++i) {
        const double g = s.next();
        sum += g;
        sumsq += g * g;
    }
    const double mean = sum / count;
    const double var = sumsq / count - mean * mean;
    CHECK(std::abs(mean) <= 4.0 / std::sqrt((double)count));
    CHECK(var == doctest::Approx(1.0).epsilon(0.05));
}

TEST_CASE("sample_signs: deterministic +/-1 paths") {
    std::mt19937_64 rng(7), rng2(7);
    const auto a = sample_signs(rng, 50);
    const auto b = sample_signs(rng2, 50);
    REQUIRE(a.size() == 50);
    CHECK(a == b);
    for (int s : a) CHECK((s == 1 || s == -1));
    bool has_up = false, has_down = false;
    for (int s : a) (s > 0 ? has_up : has_down) = true;
    CHECK(has_up);
    CHECK(has_down);
}

TEST_CASE("closed form linear: deterministic terminal example") {
    const auto est = closed_form_linear(1.0, 0.0, 0.0, over_x("1"), 1.0);
    CHECK(est.value == doctest::Approx(std::exp(1.0)).epsilon(1e-12));
    CHECK(est.standard_error == 0.0);
    CHECK(est.method == Method::quadrature);
    CHECK(est.count > 0);
}

TEST_CASE("closed form linear: reference values") {
    // Y₀ = e^{(b−c²/2)T}·E[Φ(x)e^{cx}] + (r/b)(e^{bT}−1).
    const auto first = closed_form_linear(1.0, 1.0, 1.0, over_x("sin(abs(x))"), 1.0);
    CHECK(first.value == doctest::Approx(3.48536607).epsilon(1e-7));
    const auto second = closed_form_linear(1.0, 1.0, 0.0, over_x("abs(x)"), 1.0);
    CHECK(second.value == doctest::Approx(3.17123169).epsilon(1e-7));
    // b = 0 uses the r·T limit of the source term.
    const auto no_growth = closed_form_linear(0.0, 0.0, 2.0, over_x("1"), 1.0);
    CHECK(no_growth.value == doctest::Approx(3.0).epsilon(1e-12));
}

TEST_CASE("closed form linear: monte carlo agrees with quadrature") {
    const auto quad = closed_form_linear(1.0, 1.0, 1.0, over_x("sin(abs(x))"), 1.0);
    const auto mc = closed_form_linear(1.0, 1.0, 1.0, over_x("sin(abs(x))"), 1.0,
                                       Method::monte_carlo, 2000000, 4242);
    CHECK(mc.standard_error > 0.0);
    CHECK(std::abs(mc.value - quad.value) <= 4.0 * mc.standard_error);
}

TEST_CASE("closed form quadratic: documented examples") {
    CHECK(closed_form_quadratic(over_x("2"), 1.0).value == doctest::Approx(2.0).epsilon(1e-11));
    CHECK(closed_form_quadratic(over_x("x"), 1.0).value == doctest::Approx(0.5).epsilon(1e-10));
    CHECK(closed_form_quadratic(over_x("sin(abs(x))"), 1.0).value ==
          doctest::Approx(0.62548792).epsilon(1e-7));
}

TEST_CASE("path tree: documented reductions") {
    auto zero_walk = spec_of(Generator::linear(0.0, 0.0, 0.0), "x");
    CHECK(std::abs(solve_full_path_tree(zero_walk, "implicit", 5).root()) <= 1e-14);

    auto spec = spec_of(Generator::linear(1.0, 1.0, 1.0), "sin(abs(x))");
    const lattice::Lattice lat(10, 1.0);
    const double lattice_root = schemes::solve_implicit(spec, lat).root();
    const double tree_root = solve_full_path_tree(spec, "implicit", 10).root();
    CHECK(std::abs(tree_root - lattice_root) <= 1e-12);
}

TEST_CASE("path tree: depth cap") {
    auto spec = spec_of(Generator::linear(0.0, 0.0, 0.0), "x");
    CHECK_THROWS_AS(solve_full_path_tree(spec, "implicit", kPathTreeMaxSteps + 1),
                    ValidationError);
}

TEST_CASE("path tree: running-maximum terminal by hand enumeration") {
    PathProblem pp;
    pp.base = spec_of(Generator::linear(0.0, 0.0, 0.0), "x");
    pp.path_terminal = [](const std::vector<double>& walk) {
        return *std::max_element(walk.begin(), walk.end());
    };
    const double root = solve_full_path_tree(pp, "implicit", 3).root();
    CHECK(root == doctest::Approx(1.0 / std::sqrt(3.0)).epsilon(1e-14));
}

TEST_CASE("path tree: ito barrier matches the equivalent psi barrier") {
    ProblemSpec spec = spec_of(
        Generator::from_expression(expr::parse("-1*abs(y + z)", expr::VarSet::of("tyz")), 1.0),
        "2*sin(x)");
    spec.barrier =
        problem::Barrier{expr::parse("0.2*t - 0.5", expr::VarSet::of("tx"))};
    const double direct = solve_full_path_tree(spec, "reflected-implicit", 6).root();

    PathProblem pp;
    pp.base = spec;
    ItoBarrier ito;
    ito.L0 = -0.5;
    ito.l = expr::parse("0.2", expr::VarSet::of("t"));
    ito.sigma = expr::parse("0", expr::VarSet::of("t"));
    pp.ito_barrier = ito;
    const double via_ito = solve_full_path_tree(pp, "reflected-implicit", 6).root();
    CHECK(std::abs(via_ito - direct) <= 1e-12);

    // The lattice solver agrees too (Markovian barrier).
    const lattice::Lattice lat(6, 1.0);
    CHECK(std::abs(reflected::solve_reflected_implicit(spec, lat).root() - direct) <= 1e-12);
}

TEST_CASE("path tree: penalized and constrained schemes take p from the spec") {
    ProblemSpec spec = spec_of(
        Generator::from_expression(expr::parse("-1*abs(y + z)", expr::VarSet::of("tyz")), 1.0),
        "2*sin(x)");
    spec.barrier = problem::Barrier{
        expr::parse("sin(x + 1.5707963267948966) - 2", expr::VarSet::of("tx"))};
    CHECK_THROWS_AS(solve_full_path_tree(spec, "penalized-implicit", 6), ConfigError);
    spec.p = 5.0;
    const lattice::Lattice lat(6, 1.0);
    const double lattice_root = reflected::solve_penalized_implicit(spec, lat, 5.0).root();
    CHECK(std::abs(solve_full_path_tree(spec, "penalized-implicit", 6).root() - lattice_root) <=
          1e-12);
}
