/**
 * @file runconfig.hpp
 * @brief Run configuration: INI-style config files and compatibility checks.
 *
 * A run is described by a flat sectioned key=value file:
 *
 *   [problem]
 *   T = 1.0                  # horizon (default 1)
 *   preset = linear          # linear | two-rates | quadratic-z
 *   b = 1.0                  # linear parameters
 *   c = 1.0
 *   r = 1.0
 *   rate_low = 0.01          # two-rates parameters
 *   rate_high = 0.06
 *   sigma_theta = 0.2
 *   generator = -5*abs(y+z)  # expression driver (alternative to preset)
 *   mu = 5.0                 # Lipschitz constant; estimated when absent
 *   g1_preset = ...          # split halves: g1_... and g2_... keys
 *   g2_generator = ...       # mirror the ones above (preset or expression + mu)
 *   terminal = sin(abs(x))   # required
 *   barrier = sin(x + 1.5707963267948966) - 2
 *   constraint_a = -0.5      # z-interval constraint
 *   constraint_b = 0.8
 *   phi = 1.25*z             # y >= phi(z) constraint
 *
 *   [scheme]
 *   scheme = implicit        # one of the eleven scheme ids
 *   n = 100
 *   p = 20                   # penalized/constrained schemes only
 *
 *   [output]
 *   surface_csv = surface.csv
 *   summary_json = summary.json
 *   gnuplot = plots          # base name for script + data files
 *   sample_paths = 2
 *   seed = 1
 *
 *   [flags]
 *   strict = false
 *
 * '#' and ';' start comments.  Unknown sections or keys, duplicates and
 * malformed values are config errors carrying the line number.
 */

#pragma once

#include "bsde/problem.hpp"

#include <cstdint>
#include <string>

namespace bsde::cli {

/// Output section: artifact names (relative to the output directory)
/// and sampling parameters.  Empty names skip the artifact.
struct OutputConfig {
    std::string dir = ".";
    std::string surface_csv;
    std::string summary_json;
    std::string gnuplot;
    int sample_paths = 0;
    std::uint64_t seed = 1;
};

/// A fully interpreted run configuration.
struct RunConfig {
    problem::ProblemSpec problem;
    std::string scheme_id;
    int n = 0;
    OutputConfig output;
    bool strict = false;
};

/// Parse configuration text.  Throws ConfigError with line numbers.
RunConfig parse_config_text(const std::string& text);

/// Read and parse a configuration file.
RunConfig load_config(const std::string& path);

/**
 * @brief Scheme/problem compatibility gate, run before any solve.
 *
 * Checks that barrier schemes have a barrier, constrained schemes have
 * the matching constraint form, p is present exactly for the schemes
 * that use it, and that no stray barrier/constraint/p is configured.
 * Throws ConfigError on mismatch.
 */
void check_compatibility(const RunConfig& config);

} // namespace bsde::cli
