/**
 * @file oracle.hpp
 * @brief Independent reference values for the lattice solvers.
 *
 * Three unrelated computational routes cross-check the schemes:
 *
 *  - closed forms for two special driver families, with the Gaussian
 *    expectation inside evaluated either by deterministic quadrature or
 *    by seeded Monte Carlo;
 *  - a brute-force solver over the full (non-recombining) tree of all
 *    ε-sequences, which also handles path-dependent terminal data and
 *    Itô-accumulated barriers that break lattice recombination;
 *  - reproducible normal sampling (Box–Muller over a seeded 64-bit
 *    generator) for Monte-Carlo estimates with standard errors.
 *
 * Closed forms: for g = b·y + c·z + r,
 *   Y₀ = e^{(b − c²/2)T}·E[Φ(B_T)·e^{c·B_T}] + (r/b)(e^{bT} − 1),
 * with the additive term degenerating to r·T when b = 0; and for
 * g = z²/2, Y₀ = ln E[e^{Φ(B_T)}].
 */

#pragma once

#include "bsde/expr.hpp"
#include "bsde/problem.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

namespace bsde::oracle {

/// How an OracleEstimate was produced.
enum class Method { quadrature, monte_carlo };

/// A reference value with its uncertainty (0 for quadrature).
struct OracleEstimate {
    double value = 0.0;
    double standard_error = 0.0;
    Method method = Method::quadrature;
    long long count = 0;  ///< MC samples, or quadrature function evaluations
};

/**
 * @brief Reproducible standard-normal stream.
 *
 * Box–Muller transform over std::mt19937_64: each normal consumes
 * exactly two generator words w₁, w₂ and returns
 * √(−2 ln u₁)·cos(2π u₂) with u₁ = (⌊w₁/2¹¹⌋ + 1)·2⁻⁵³ ∈ (0, 1] and
 * u₂ = ⌊w₂/2¹¹⌋·2⁻⁵³ ∈ [0, 1).  The sine companion is discarded, so the
 * stream position is a pure function of the draw count — bit-identical
 * across platforms and runs.
 */
class NormalStream {
public:
    explicit NormalStream(std::uint64_t seed) : rng_(seed) {}

    double next();

private:
    std::mt19937_64 rng_;
};

/// One ε-sequence of length n: one generator word per step, sign from
/// the top bit.
std::vector<int> sample_signs(std::mt19937_64& rng, int n);

// ----------------------------------------------------------- quadrature

/**
 * @brief Deterministic Gaussian expectation E[h(X)], X ~ N(0, T).
 *
 * The integral is split at 0 (integrands of interest are kinked there)
 * and each half-line is truncated at 15√T and covered by a composite
 * 16-point Gauss–Legendre rule with max(1, (order+31)/32) panels.  The
 * panel count doubles until two successive results agree to 1e-10
 * relative, capped at 2048 function evaluations.
 *
 * @throws NumericalError when the cap is reached without convergence.
 */
double gauss_expectation(const expr::Expression& h, double T, int order = 32);
double gauss_expectation(const std::function<double(double)>& h, double T, int order = 32);

/// Seeded Monte-Carlo estimate of E[h(X)], X ~ N(0, T), with a Welford
/// running variance for the standard error.  Requires samples ≥ 2.
OracleEstimate monte_carlo_expectation(const expr::Expression& h, double T, long long samples,
                                       std::uint64_t seed);
OracleEstimate monte_carlo_expectation(const std::function<double(double)>& h, double T,
                                       long long samples, std::uint64_t seed);

// ---------------------------------------------------------- closed forms

/// Closed form for the linear driver g = b·y + c·z + r.
OracleEstimate closed_form_linear(double b, double c, double r, const expr::Expression& phi,
                                  double T, Method method = Method::quadrature,
                                  long long mc_samples = 10000000, std::uint64_t seed = 12345);

/// Closed form for the quadratic driver g = z²/2: Y₀ = ln E[e^{Φ(B_T)}].
OracleEstimate closed_form_quadratic(const expr::Expression& phi, double T,
                                     Method method = Method::quadrature,
                                     long long mc_samples = 10000000,
                                     std::uint64_t seed = 12345);

// ----------------------------------------------------------- path tree

/**
 * @brief Barrier given by Itô coefficients instead of a ψ(t,x) formula:
 *        L_j = L₀ + δ·Σ_{i<j} l(t_i) + √δ·Σ_{i<j} σ(t_i)·ε_{i+1}.
 *
 * When σ varies, L depends on the whole ε-sequence, which breaks
 * lattice recombination — such barriers are accepted only here.
 */
struct ItoBarrier {
    double L0 = 0.0;
    expr::Expression l;      ///< drift coefficient, expression over {t}
    expr::Expression sigma;  ///< diffusion coefficient, expression over {t}
};

/**
 * @brief A (possibly path-dependent) problem for the full-path solver.
 *
 * path_terminal, when set, replaces base.terminal and receives the full
 * realized walk B₀..B_n (B₀ = 0 included).  ito_barrier, when set,
 * replaces base.barrier.
 */
struct PathProblem {
    problem::ProblemSpec base;
    std::function<double(const std::vector<double>&)> path_terminal;
    std::optional<ItoBarrier> ito_barrier;
};

/**
 * @brief Solution over the full binary tree of ε-sequences.
 *
 * Level j holds 2^j values indexed by a bit mask: bit i set means
 * ε_{i+1} = +1.  For Markovian inputs, entries sharing (j, popcount)
 * coincide with the lattice solution at that node.
 */
struct PathTreeSolution {
    int n = 0;
    std::vector<std::vector<double>> y;

    double root() const { return y.front().front(); }
};

/// Hard cap on the tree depth (2^22 ≈ 4.2M leaves).
inline constexpr int kPathTreeMaxSteps = 22;

/**
 * @brief Brute-force backward solve over every ε-sequence.
 *
 * Performs the identical per-node recursion as the lattice solvers
 * (same step functions, same arithmetic), with conditional expectations
 * taken over the two literal children of each path node.  Any scheme id
 * is accepted; penalization p is taken from the problem spec.
 */
PathTreeSolution solve_full_path_tree(const PathProblem& pp, const std::string& scheme_id,
                                      int n);
PathTreeSolution solve_full_path_tree(const problem::ProblemSpec& spec,
                                      const std::string& scheme_id, int n);

} // namespace bsde::oracle
