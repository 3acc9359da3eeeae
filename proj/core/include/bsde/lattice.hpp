/**
 * @file lattice.hpp
 * @brief Recombining binomial lattice of the scaled random walk.
 *
 * The driving noise is B_t = √δ · Σ ε_j with i.i.d. signs ε_j ∈ {−1, +1}
 * and step δ = T/n.  After j steps the walk sits on one of j+1 nodes
 * x(j,k) = (2k − j)√δ, where k counts up-moves.  Everything the solvers
 * need reduces to two per-node primitives on adjacent levels:
 *
 *   conditional expectation  E[v | level j] = (v[k+1] + v[k]) / 2
 *   martingale coefficient   z[k] = (v[k+1] − v[k]) / (2√δ)
 */

#pragma once

#include "bsde/expr.hpp"

#include <vector>

namespace bsde::lattice {

/**
 * @brief Discretization of the horizon [0, T] into n equal steps.
 */
struct Lattice {
    int n = 0;            ///< number of time steps (positive)
    double T = 1.0;       ///< horizon
    double delta = 0.0;   ///< step size T/n
    double sqrt_delta = 0.0;  ///< √δ, the spatial mesh half-width

    Lattice(int n_steps, double horizon);

    /// Left endpoint t_j = j·δ of step j.
    double time(int j) const { return delta * j; }
};

/**
 * @brief Values attached to the nodes of one lattice level.
 *
 * values[k] belongs to the node with k up-moves; level j has j+1 nodes.
 */
struct LevelFunction {
    int level = 0;
    std::vector<double> values;

    LevelFunction() = default;
    LevelFunction(int j, std::vector<double> v);
};

/// Node coordinate x(j,k) = (2k − j)√δ.  Throws ValidationError when the
/// indices are out of range.
double node_coordinate(const Lattice& lat, int j, int k);

/// One-step conditional expectation: maps a level-(j+1) function to the
/// level-j function (v[k+1] + v[k]) / 2.
LevelFunction conditional_expectation(const LevelFunction& next);

/// One-step martingale coefficient: maps a level-(j+1) function to the
/// level-j function (v[k+1] − v[k]) / (2√δ).
LevelFunction martingale_coefficient(const LevelFunction& next, const Lattice& lat);

/// Evaluate a terminal function Φ over {x} on level n: values[k] = Φ(x(n,k)).
LevelFunction terminal_level(const Lattice& lat, const expr::Expression& phi);

/// Expectation of a level-n function at the root, computed by iterating
/// conditional_expectation down to level 0.
double root_expectation(const Lattice& lat, const LevelFunction& terminal);

} // namespace bsde::lattice
