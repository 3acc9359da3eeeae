/**
 * @file reflected.hpp
 * @brief Solvers for BSDEs reflected on a lower barrier L_t = ψ(t, B_t).
 *
 * The reflected solution stays above the barrier; a nonnegative per-node
 * increment d pushes it up exactly on the contact set {y = L}
 * (complementarity (y − L)·d = 0).  Two exact schemes and two penalized
 * approximations are provided:
 *
 *   reflected-implicit     solve y = E + g(t,y,z)δ + d with the
 *                          two-branch rule: keep the unconstrained
 *                          implicit y* when y* ≥ L, else clamp y = L and
 *                          d = L − E − g(t,L,z)δ
 *   reflected-explicit     c = predictor step; y = max(c, L), d = (c−L)⁻
 *   penalized-implicit     y = E + g(t,y,z)δ + p(y−L)⁻δ (inner solve)
 *   penalized-ei           c = E + g(t,E,z)δ;
 *                          y = c + (pδ/(1+pδ))(c − L)⁻  (exact solution
 *                          of the linear penalty branch)
 *
 * The exact schemes adjust the terminal level to max(ξ, L_T) and store
 * the jump (L_T − ξ)⁺ as the d-entry at level n; the penalized schemes
 * keep the raw terminal ξ (the penalty itself generates the push-up).
 */

#pragma once

#include "bsde/lattice.hpp"
#include "bsde/problem.hpp"
#include "bsde/schemes.hpp"

#include <string>
#include <utility>
#include <vector>

namespace bsde::reflected {

/**
 * @brief Solution surface with the increasing-process increments.
 *
 * d has levels 0..n; the level-n entry is the terminal jump (zero for
 * penalized schemes).
 */
struct ReflectedSurface {
    std::vector<lattice::LevelFunction> y;
    std::vector<lattice::LevelFunction> z;
    std::vector<lattice::LevelFunction> d;
    std::string scheme_id;
    std::string fingerprint;
    double p = 0.0;  ///< penalization parameter; 0 for the exact schemes

    double root() const { return y.front().values.front(); }
};

/// Per-node output of a reflected step.
struct NodeResult {
    double y = 0.0;
    double d = 0.0;
};

// ------------------------------------------------ node-level steps
// These are shared with the full-path-tree oracle so that lattice and
// tree runs perform bit-identical arithmetic per node.

NodeResult reflected_implicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta);

NodeResult reflected_explicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta);

NodeResult penalized_implicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta, double p);

NodeResult penalized_ei_node(double E, double t, double z, double L,
                             const problem::Generator& g, double delta, double p);

/**
 * @brief Terminal adjustment: y_n = max(ξ, L_T), jump = (L_T − ξ)⁺.
 */
std::pair<lattice::LevelFunction, lattice::LevelFunction>
apply_terminal_jump(const lattice::LevelFunction& terminal,
                    const lattice::LevelFunction& barrier_at_T);

// ------------------------------------------------------------ solvers

ReflectedSurface solve_reflected_implicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat);

ReflectedSurface solve_reflected_explicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat);

ReflectedSurface solve_penalized_implicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat, double p);

ReflectedSurface solve_penalized_explicit_implicit(const problem::ProblemSpec& spec,
                                                   const lattice::Lattice& lat, double p);

/**
 * @brief Running sum of the d-increments along one realized ε-path.
 *
 * Returns K_0..K_n with K_j = Σ_{i≤j} d_i at the path's nodes; the
 * terminal jump enters at j = n.  Nondecreasing since d ≥ 0.
 */
std::vector<double> accumulate_K(const ReflectedSurface& surface, const std::vector<int>& path);

} // namespace bsde::reflected
