/**
 * @file schemes.hpp
 * @brief Backward-induction solvers for standard (unconstrained) BSDEs.
 *
 * All schemes walk the lattice from the terminal level down to the root.
 * At each node the two primitives are E = conditional expectation of the
 * next level and z = martingale coefficient; the schemes differ only in
 * how y is recovered from (E, z):
 *
 *   implicit   y = E + g(t, y, z)δ        (inner solve)
 *   explicit   y = E + g(t, ŷ, z)δ,  ŷ = E − g(t, E, z)δ   (predictor)
 *   split      y = E + g₁(t, y, z)δ + g₂(t, ŷ₂, z)δ  (g₁ implicit,
 *              g₂ in predictor form with ŷ₂ = E − g₂(t, E, z)δ)
 *
 * The explicit scheme evaluates the driver at the corrected predictor
 * ŷ rather than at E itself; with that one extra driver evaluation the
 * step error matches the reference tables, and the form degenerates to
 * the plain conditional-expectation update whenever g is independent
 * of y.
 */

#pragma once

#include "bsde/lattice.hpp"
#include "bsde/problem.hpp"

#include <string>
#include <vector>

namespace bsde::schemes {

/**
 * @brief Full solution surface: y on levels 0..n, z on levels 0..n−1.
 *
 * The reconstruction identity holds at every node by construction:
 * y[j+1](k+1) = E_k + √δ·z[j](k) and y[j+1](k) = E_k − √δ·z[j](k).
 */
struct SolutionSurface {
    std::vector<lattice::LevelFunction> y;
    std::vector<lattice::LevelFunction> z;
    std::string scheme_id;
    std::string fingerprint;

    /// y at (j=0, k=0), the approximation of Y₀.
    double root() const { return y.front().values.front(); }
};

/**
 * @brief Solve y = E + g(t, y, z)δ for y.
 *
 * Linear presets use the closed form y = (E + (c·z + r)δ)/(1 − bδ).
 * Everything else runs the fixed point y ← E + g(t,y,z)δ from y₀ = E
 * (contraction factor δμ < 1), capped at 200 iterations, with a
 * safeguarded bisection fallback for non-contractive drivers.
 *
 * @param tol absolute tolerance; 0 selects 1e-13·max(1, |target|).
 */
double implicit_step_solve(double target, double t, double z, const problem::Generator& g,
                           double delta, double tol = 0.0);

/// One explicit (predictor-form) step: E + g(t, E − g(t,E,z)δ, z)δ.
double explicit_step(const problem::Generator& g, double t, double target, double z,
                     double delta);

/// Backward induction with the implicit per-node solve.
SolutionSurface solve_implicit(const problem::ProblemSpec& spec, const lattice::Lattice& lat);

/// Backward induction with the explicit predictor step.
SolutionSurface solve_explicit(const problem::ProblemSpec& spec, const lattice::Lattice& lat);

/// Split scheme for g = g₁ + g₂: g₁ implicit, g₂ explicit.  The spec's
/// generator must be a split pair.
SolutionSurface solve_split(const problem::ProblemSpec& spec, const lattice::Lattice& lat);

/// Stable fingerprint of (problem, scheme, discretization) for outputs.
std::string surface_fingerprint(const problem::ProblemSpec& spec, const std::string& scheme_id,
                                const lattice::Lattice& lat);

/// Fingerprint variant that also folds in a penalization parameter.
std::string surface_fingerprint_p(const problem::ProblemSpec& spec, const std::string& scheme_id,
                                  const lattice::Lattice& lat, double p);

/// FNV-1a 64-bit hash rendered as 16 hex digits (exposed for reuse).
std::string fnv1a_hex(const std::string& text);

/// Throw NumericalError if any value in the level is non-finite or
/// exceeds the explosion threshold 1e12.
void check_level_finite(const lattice::LevelFunction& level, const std::string& scheme_id);

} // namespace bsde::schemes
