/**
 * @file runner.hpp
 * @brief Run orchestration: dispatch solves and write artifacts.
 *
 * The runner turns a RunConfig into solver calls and disk artifacts:
 * a solution-surface CSV (header `j,t,k,x,y,z,d`), a JSON summary, an
 * optional gnuplot script with data files, convergence and penalty
 * sweep tables, and sampled trajectories.
 */

#pragma once

#include "bsde/constrained.hpp"
#include "bsde/problem.hpp"
#include "bsde/reflected.hpp"
#include "bsde/runconfig.hpp"
#include "bsde/schemes.hpp"

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bsde::cli {

/// Any solver output.
using Solved = std::variant<schemes::SolutionSurface, reflected::ReflectedSurface,
                            constrained::ConstrainedSurface>;

/// Dispatch one solve by scheme id (no artifacts written).
Solved dispatch_solve(const problem::ProblemSpec& spec, const lattice::Lattice& lat,
                      const std::string& scheme_id);

/// Root value of any solver output.
double solved_root(const Solved& solved);

/// Result of run_solve(): the root plus run metadata.
struct SolveSummary {
    double root = 0.0;
    std::string scheme_id;
    std::string fingerprint;
    int n = 0;
    double T = 1.0;
    std::optional<double> p;
    problem::ValidationReport validation;
    double wall_ms = 0.0;
    std::vector<std::string> files;  ///< artifacts written, in order
};

/**
 * @brief Full single run: validate, solve, write configured artifacts.
 *
 * Surface CSV rows are `j,t,k,x,y,z,d` with 17 significant digits; z is
 * empty at j = n, and the d column appears only for reflected and
 * constrained runs (empty at j = n for constrained ones, terminal jump
 * for reflected ones).
 */
SolveSummary run_solve(const RunConfig& config);

/// One row of a convergence or penalty sweep.
struct ConvergenceRow {
    double parameter = 0.0;  ///< n or p
    double root = 0.0;
    double wall_ms = 0.0;
    std::optional<double> diff_prev;  ///< root − previous row's root
    std::optional<double> deviation;  ///< |root − reference|
    std::optional<double> z_beta_norm;  ///< Σ_j δ·E|z − z_ref|^β (penalty sweeps)
    std::string error;  ///< non-empty when this row failed
};

struct ConvergenceReport {
    std::vector<ConvergenceRow> rows;
    std::optional<double> reference;
    std::string reference_kind;  ///< e.g. "closed-form (quadrature)"
    double beta = 1.0;
    std::vector<std::string> files;
};

/**
 * @brief Solve once per n; when the driver admits a closed form (linear
 * preset or z²/2, unconstrained), include the oracle deviation column.
 * Per-row failures are recorded and the sweep continues.
 */
ConvergenceReport run_converge(const RunConfig& config, const std::vector<int>& ns);

/**
 * @brief Solve once per p at fixed n.  For barrier problems the
 * reflected-explicit root at the same n is included as the reference,
 * and the z-difference β-norm (β = 1) against it is reported per row.
 * Explosion rows are flagged and the sweep continues.
 */
ConvergenceReport run_penalty_sweep(const RunConfig& config, const std::vector<double>& ps);

/// One sampled trajectory (all vectors have n+1 entries; z/d/gap are
/// NaN where not applicable, e.g. at j = n).
struct SampledPath {
    std::vector<int> signs;      ///< ε_1..ε_n
    std::vector<double> t, B, y, z, d, K, gap;
};

/**
 * @brief Sample ε-paths from the solved surface and write a trajectory
 * CSV (+ gnuplot script when configured).  Bit-reproducible for a
 * fixed seed.
 */
std::vector<SampledPath> run_sample_paths(const RunConfig& config, int count,
                                          std::uint64_t seed,
                                          std::vector<std::string>* files_written = nullptr);

/// Re-read the root value (j=0, k=0 row) from a surface CSV; used for
/// the round-trip guarantee of the 17-digit format.
double surface_csv_root(const std::string& path);

} // namespace bsde::cli
