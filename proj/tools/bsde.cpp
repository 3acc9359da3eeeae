/**
 * @file bsde.cpp
 * @brief Command-line front end for the lattice solver.
 *
 * Subcommands:
 *   solve         one backward induction, artifacts per config / flags
 *   converge      repeat a solve over a list of lattice sizes
 *   penalty-sweep repeat a penalized solve over a list of p values
 *   sample-paths  sample random-walk trajectories from a solved surface
 *   oracle        closed-form reference value (quadrature or Monte Carlo)
 *   validate      print the step-size validation report and exit
 *
 * Exit codes: 0 success, 2 configuration error, 3 validation error,
 * 4 numerical error.
 */

#include "bsde/errors.hpp"
#include "bsde/oracle.hpp"
#include "bsde/runner.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using bsde::cli::ConvergenceReport;
using bsde::cli::RunConfig;

std::string num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string num6(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.6g", v);
    return buf;
}

int exit_code(const bsde::Error& e) {
    if (dynamic_cast<const bsde::ConfigError*>(&e)) return 2;
    if (dynamic_cast<const bsde::ValidationError*>(&e)) return 3;
    if (dynamic_cast<const bsde::NumericalError*>(&e)) return 4;
    return 1;
}

/// Options shared by every subcommand.
struct CommonOptions {
    std::string config_path;
    std::string out_dir;
    bool strict = false;
};

void add_common(CLI::App* cmd, CommonOptions& opts) {
    cmd->add_option("--config", opts.config_path, "Problem configuration file (INI)")
        ->required();
    cmd->add_option("--out", opts.out_dir, "Output directory (overrides the config)");
    cmd->add_flag("--strict", opts.strict, "Escalate step-size warnings to errors");
}

RunConfig load_and_merge(const CommonOptions& opts) {
    RunConfig config = bsde::cli::load_config(opts.config_path);
    if (!opts.out_dir.empty()) config.output.dir = opts.out_dir;
    if (opts.strict) config.strict = true;
    return config;
}

std::vector<int> parse_int_list(const std::string& text, const char* what) {
    std::vector<int> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        int value = 0;
        try {
            value = std::stoi(token, &used);
        } catch (const std::exception&) {
            throw bsde::ConfigError(std::string("bad ") + what + " entry: '" + token + "'");
        }
        if (used != token.size())
            throw bsde::ConfigError(std::string("bad ") + what + " entry: '" + token + "'");
        values.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

std::vector<double> parse_double_list(const std::string& text, const char* what) {
    std::vector<double> values;
    std::size_t start = 0;
    while (start <= text.size()) {
        const std::size_t comma = text.find(',', start);
        const std::string token =
            text.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
        std::size_t used = 0;
        double value = 0.0;
        try {
            value = std::stod(token, &used);
        } catch (const std::exception&) {
            throw bsde::ConfigError(std::string("bad ") + what + " entry: '" + token + "'");
        }
        if (used != token.size())
            throw bsde::ConfigError(std::string("bad ") + what + " entry: '" + token + "'");
        values.push_back(value);
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    return values;
}

void print_validation(const bsde::problem::ValidationReport& report) {
    for (const auto& item : report.items) {
        const char* tag = !item.applicable ? "SKIP" : item.pass ? "PASS" : "FAIL";
        std::cout << tag << "  " << item.condition << "  [value " << num6(item.value) << "]\n";
    }
    for (const auto& warning : report.warnings) std::cout << "warning: " << warning << '\n';
}

void print_sweep(const ConvergenceReport& report, const char* parameter_name) {
    if (report.reference)
        std::cout << "reference: " << num(*report.reference) << "  (" << report.reference_kind
                  << ")\n";
    std::printf("%12s  %-22s %-12s %-12s %-12s %s\n", parameter_name, "root", "diff_prev",
                "deviation", "wall_ms", "error");
    for (const auto& row : report.rows) {
        std::printf("%12.6g  %-22s %-12s %-12s %-12s %s\n", row.parameter,
                    row.error.empty() ? num(row.root).c_str() : "-",
                    row.diff_prev ? num6(*row.diff_prev).c_str() : "-",
                    row.deviation ? num6(*row.deviation).c_str() : "-",
                    num6(row.wall_ms).c_str(), row.error.c_str());
    }
    for (const auto& file : report.files) std::cout << "wrote " << file << '\n';
}

bool all_rows_failed(const ConvergenceReport& report) {
    for (const auto& row : report.rows)
        if (row.error.empty()) return false;
    return true;
}

int cmd_solve(const CommonOptions& common, const std::string& surface_csv,
              const std::string& summary_json, const std::string& gnuplot) {
    RunConfig config = load_and_merge(common);
    if (!surface_csv.empty()) config.output.surface_csv = surface_csv;
    if (!summary_json.empty()) config.output.summary_json = summary_json;
    if (!gnuplot.empty()) config.output.gnuplot = gnuplot;

    const auto summary = bsde::cli::run_solve(config);
    std::cout << "scheme: " << summary.scheme_id << "\n"
              << "n: " << summary.n << "  T: " << num6(summary.T);
    if (summary.p) std::cout << "  p: " << num6(*summary.p);
    std::cout << "\nfingerprint: " << summary.fingerprint << "\n"
              << "root: " << num(summary.root) << "\n"
              << "wall_ms: " << num6(summary.wall_ms) << '\n';
    for (const auto& item : summary.validation.items)
        if (item.applicable && !item.pass)
            std::cout << "warning: step-size condition violated: " << item.condition
                      << " [value " << num6(item.value) << "]\n";
    for (const auto& warning : summary.validation.warnings)
        std::cout << "warning: " << warning << '\n';
    for (const auto& file : summary.files) std::cout << "wrote " << file << '\n';
    return 0;
}

int cmd_converge(const CommonOptions& common, const std::string& ns_text, int max_n) {
    const RunConfig config = load_and_merge(common);
    const auto ns = parse_int_list(ns_text, "--ns");
    for (int n : ns) {
        if (n < 1) throw bsde::ConfigError("lattice size must be >= 1, got " + std::to_string(n));
        if (n > max_n)
            throw bsde::ConfigError("lattice size " + std::to_string(n) +
                                    " exceeds --max-n limit " + std::to_string(max_n));
    }
    const auto report = bsde::cli::run_converge(config, ns);
    print_sweep(report, "n");
    if (all_rows_failed(report))
        throw bsde::NumericalError("every convergence row failed; see table above");
    return 0;
}

int cmd_penalty_sweep(const CommonOptions& common, const std::string& sweep_text) {
    const RunConfig config = load_and_merge(common);
    const auto ps = parse_double_list(sweep_text, "--sweep");
    const auto report = bsde::cli::run_penalty_sweep(config, ps);
    print_sweep(report, "p");
    if (all_rows_failed(report))
        throw bsde::NumericalError("every penalty row failed; see table above");
    return 0;
}

int cmd_sample_paths(const CommonOptions& common, std::optional<int> count,
                     std::optional<std::uint64_t> seed) {
    RunConfig config = load_and_merge(common);
    const int effective_count =
        count ? *count : (config.output.sample_paths > 0 ? config.output.sample_paths : 10);
    const std::uint64_t effective_seed = seed ? *seed : config.output.seed;
    std::vector<std::string> files;
    const auto paths =
        bsde::cli::run_sample_paths(config, effective_count, effective_seed, &files);
    std::cout << "sampled " << paths.size() << " paths (seed " << effective_seed << ")\n";
    for (const auto& file : files) std::cout << "wrote " << file << '\n';
    return 0;
}

int cmd_oracle(const CommonOptions& common, bool use_mc, long long samples,
               std::uint64_t seed) {
    const RunConfig config = load_and_merge(common);
    const auto& spec = config.problem;
    if (spec.barrier || spec.constraint)
        throw bsde::ConfigError("oracle values are defined for unconstrained problems only");

    const auto method =
        use_mc ? bsde::oracle::Method::monte_carlo : bsde::oracle::Method::quadrature;
    bsde::oracle::OracleEstimate est;
    if (const auto* lin = spec.generator.as_linear()) {
        est = bsde::oracle::closed_form_linear(lin->b, lin->c, lin->r, spec.terminal, spec.T,
                                               method, samples, seed);
    } else if (spec.generator.is_quadratic_z()) {
        est = bsde::oracle::closed_form_quadratic(spec.terminal, spec.T, method, samples, seed);
    } else {
        throw bsde::ConfigError(
            "no closed form for this driver; the oracle needs the linear preset or the "
            "quadratic z^2/2 preset");
    }
    std::cout << "oracle value: " << num(est.value) << '\n'
              << "method: " << (use_mc ? "monte-carlo" : "quadrature") << '\n'
              << "standard_error: " << num(est.standard_error) << '\n'
              << (use_mc ? "samples: " : "evaluations: ") << est.count << '\n';
    return 0;
}

int cmd_validate(const CommonOptions& common) {
    const RunConfig config = load_and_merge(common);
    const bsde::lattice::Lattice lat(config.n, config.problem.T);
    const auto report = bsde::problem::validate(config.problem, lat, config.scheme_id);
    print_validation(report);
    if (!report.all_pass())
        throw bsde::ValidationError("step-size conditions failed: " + report.failures());
    std::cout << "all applicable conditions pass\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Lattice solver for one-dimensional backward stochastic differential equations"};
    app.require_subcommand(1);

    CommonOptions solve_common, converge_common, sweep_common, paths_common, oracle_common,
        validate_common;

    auto* solve_cmd = app.add_subcommand("solve", "Run one backward induction");
    add_common(solve_cmd, solve_common);
    std::string opt_surface_csv, opt_summary_json, opt_gnuplot;
    solve_cmd->add_option("--surface-csv", opt_surface_csv, "Surface CSV file name");
    solve_cmd->add_option("--summary-json", opt_summary_json, "Summary JSON file name");
    solve_cmd->add_option("--gnuplot", opt_gnuplot, "Gnuplot script file name");

    auto* converge_cmd = app.add_subcommand("converge", "Solve over a list of lattice sizes");
    add_common(converge_cmd, converge_common);
    std::string opt_ns;
    int opt_max_n = 20000;
    converge_cmd->add_option("--ns", opt_ns, "Comma-separated lattice sizes, e.g. 100,500,1000")
        ->required();
    converge_cmd->add_option("--max-n", opt_max_n, "Refuse lattice sizes above this bound");

    auto* sweep_cmd = app.add_subcommand("penalty-sweep", "Solve over a list of p values");
    add_common(sweep_cmd, sweep_common);
    std::string opt_sweep;
    sweep_cmd->add_option("--sweep", opt_sweep, "Comma-separated p values, e.g. 20,200,2000")
        ->required();

    auto* paths_cmd = app.add_subcommand("sample-paths", "Sample trajectories from a solve");
    add_common(paths_cmd, paths_common);
    std::optional<int> opt_paths;
    std::optional<std::uint64_t> opt_path_seed;
    paths_cmd->add_option("--paths", opt_paths, "Number of sampled paths");
    paths_cmd->add_option("--seed", opt_path_seed, "Random seed for the sampled signs");

    auto* oracle_cmd = app.add_subcommand("oracle", "Closed-form reference value");
    add_common(oracle_cmd, oracle_common);
    bool opt_mc = false;
    long long opt_samples = 10000000;
    std::uint64_t opt_oracle_seed = 12345;
    oracle_cmd->add_flag("--mc", opt_mc, "Use Monte Carlo instead of quadrature");
    oracle_cmd->add_option("--samples", opt_samples, "Monte Carlo sample count");
    oracle_cmd->add_option("--seed", opt_oracle_seed, "Monte Carlo seed");

    auto* validate_cmd = app.add_subcommand("validate", "Print the validation report");
    add_common(validate_cmd, validate_common);

    try {
        app.parse(argc, argv);
        if (*solve_cmd)
            return cmd_solve(solve_common, opt_surface_csv, opt_summary_json, opt_gnuplot);
        if (*converge_cmd) return cmd_converge(converge_common, opt_ns, opt_max_n);
        if (*sweep_cmd) return cmd_penalty_sweep(sweep_common, opt_sweep);
        if (*paths_cmd) return cmd_sample_paths(paths_common, opt_paths, opt_path_seed);
        if (*oracle_cmd) return cmd_oracle(oracle_common, opt_mc, opt_samples, opt_oracle_seed);
        if (*validate_cmd) return cmd_validate(validate_common);
        return 0;
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const bsde::Error& e) {
        std::cerr << "error[" << e.category() << "]: " << e.what() << '\n';
        return exit_code(e);
    } catch (const std::exception& e) {
        std::cerr << "error[internal]: " << e.what() << '\n';
        return 1;
    }
}
