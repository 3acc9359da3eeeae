/**
 * @file bench_solve.cpp
 * @brief Microbenchmarks for the solver hot paths.
 *
 * Covers the backward inductions (implicit, explicit, reflected,
 * penalized), expression evaluation, the Gaussian quadrature oracle,
 * the full path tree, and seeded Monte Carlo sampling.
 */

#include "bsde/expr.hpp"
#include "bsde/lattice.hpp"
#include "bsde/oracle.hpp"
#include "bsde/problem.hpp"
#include "bsde/reflected.hpp"
#include "bsde/schemes.hpp"

#include <benchmark/benchmark.h>

namespace {

using namespace bsde;

problem::ProblemSpec linear_spec() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::linear(1.0, 1.0, 1.0);
    spec.terminal = expr::parse("sin(abs(x))", expr::VarSet::of("x"));
    return spec;
}

problem::ProblemSpec expression_spec() {
    problem::ProblemSpec spec;
    spec.generator =
        problem::Generator::from_expression(expr::parse("-5*abs(y + z)", expr::VarSet::of("tyz")),
                                            5.0);
    spec.terminal = expr::parse("sin(abs(x))", expr::VarSet::of("x"));
    return spec;
}

problem::ProblemSpec barrier_spec() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::from_expression(
        expr::parse("-abs(y + z)", expr::VarSet::of("tyz")), 1.0);
    spec.terminal = expr::parse("2*sin(x)", expr::VarSet::of("x"));
    spec.barrier =
        problem::Barrier{expr::parse("sin(x + 1.5707963267948966) - 2", expr::VarSet::of("tx"))};
    return spec;
}

void BM_ImplicitLinear(benchmark::State& state) {
    const auto spec = linear_spec();
    const lattice::Lattice lat((int)state.range(0), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(schemes::solve_implicit(spec, lat).root());
}
BENCHMARK(BM_ImplicitLinear)->Arg(100)->Arg(400)->Arg(1000);

void BM_ImplicitExpression(benchmark::State& state) {
    const auto spec = expression_spec();
    const lattice::Lattice lat((int)state.range(0), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(schemes::solve_implicit(spec, lat).root());
}
BENCHMARK(BM_ImplicitExpression)->Arg(100)->Arg(400);

void BM_ExplicitPredictor(benchmark::State& state) {
    const auto spec = expression_spec();
    const lattice::Lattice lat((int)state.range(0), 1.0);
    for (auto _ : state) benchmark::DoNotOptimize(schemes::solve_explicit(spec, lat).root());
}
BENCHMARK(BM_ExplicitPredictor)->Arg(100)->Arg(400);

void BM_ReflectedImplicit(benchmark::State& state) {
    const auto spec = barrier_spec();
    const lattice::Lattice lat((int)state.range(0), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(reflected::solve_reflected_implicit(spec, lat).root());
}
BENCHMARK(BM_ReflectedImplicit)->Arg(400);

void BM_PenalizedExplicitImplicit(benchmark::State& state) {
    const auto spec = barrier_spec();
    const lattice::Lattice lat((int)state.range(0), 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(
            reflected::solve_penalized_explicit_implicit(spec, lat, 200.0).root());
}
BENCHMARK(BM_PenalizedExplicitImplicit)->Arg(400);

void BM_ExprEval(benchmark::State& state) {
    const auto body = expr::parse("-5*abs(y + z) + sin(t)*exp(z)", expr::VarSet::of("tyz"));
    expr::Env env;
    env.t = 0.5;
    env.y = 1.25;
    env.z = -0.75;
    for (auto _ : state) benchmark::DoNotOptimize(body(env));
}
BENCHMARK(BM_ExprEval);

void BM_Quadrature(benchmark::State& state) {
    const auto phi = expr::parse("sin(abs(x))", expr::VarSet::of("x"));
    for (auto _ : state) benchmark::DoNotOptimize(oracle::gauss_expectation(phi, 1.0));
}
BENCHMARK(BM_Quadrature);

void BM_PathTree(benchmark::State& state) {
    const auto spec = linear_spec();
    for (auto _ : state)
        benchmark::DoNotOptimize(
            oracle::solve_full_path_tree(spec, "implicit", (int)state.range(0)).root());
}
BENCHMARK(BM_PathTree)->Arg(10)->Arg(14);

void BM_MonteCarlo(benchmark::State& state) {
    const auto phi = expr::parse("sin(abs(x))", expr::VarSet::of("x"));
    for (auto _ : state)
        benchmark::DoNotOptimize(
            oracle::monte_carlo_expectation(phi, 1.0, state.range(0), 2024));
}
BENCHMARK(BM_MonteCarlo)->Arg(100000);

} // namespace

BENCHMARK_MAIN();
