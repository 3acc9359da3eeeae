/**
 * @file runner.cpp
 * @brief Implementation of solve dispatch and artifact writers.
 */

#include "bsde/runner.hpp"

#include "bsde/errors.hpp"
#include "bsde/oracle.hpp"

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <sstream>
#include <system_error>

namespace bsde::cli {
namespace {

namespace fs = std::filesystem;
using json = nlohmann::json;

/// 17 significant digits: enough to round-trip any double exactly.
std::string format17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double now_ms_since(const std::chrono::steady_clock::time_point& t0) {
    const auto dt = std::chrono::steady_clock::now() - t0;
    return std::chrono::duration<double, std::milli>(dt).count();
}

/// Uniform read-only view over the three surface types.
struct SurfaceView {
    const std::vector<lattice::LevelFunction>* y = nullptr;
    const std::vector<lattice::LevelFunction>* z = nullptr;
    const std::vector<lattice::LevelFunction>* d = nullptr;  ///< d or a_incr
    const std::string* scheme_id = nullptr;
    const std::string* fingerprint = nullptr;
    std::optional<double> p;
    bool terminal_jump = false;  ///< d carries a terminal level
};

SurfaceView view_of(const Solved& solved) {
    SurfaceView v;
    if (const auto* s = std::get_if<schemes::SolutionSurface>(&solved)) {
        v.y = &s->y;
        v.z = &s->z;
        v.scheme_id = &s->scheme_id;
        v.fingerprint = &s->fingerprint;
    } else if (const auto* s = std::get_if<reflected::ReflectedSurface>(&solved)) {
        v.y = &s->y;
        v.z = &s->z;
        v.d = &s->d;
        v.scheme_id = &s->scheme_id;
        v.fingerprint = &s->fingerprint;
        if (s->p > 0.0) v.p = s->p;
        v.terminal_jump = s->scheme_id == "reflected-implicit" ||
                          s->scheme_id == "reflected-explicit";
    } else {
        const auto& c = std::get<constrained::ConstrainedSurface>(solved);
        v.y = &c.y;
        v.z = &c.z;
        v.d = &c.a_incr;
        v.scheme_id = &c.scheme_id;
        v.fingerprint = &c.fingerprint;
        v.p = c.p;
    }
    return v;
}

fs::path prepare_output_dir(const std::string& dir) {
    fs::path out = dir.empty() ? fs::path(".") : fs::path(dir);
    std::error_code ec;
    fs::create_directories(out, ec);
    if (ec) throw ConfigError("cannot create output directory '" + out.string() + "': " + ec.message());
    return out;
}

std::ofstream open_for_write(const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write file: " + path.string());
    return out;
}

/// Surface CSV: header `j,t,k,x,y,z[,d]`; z empty at j = n; d present
/// only when the surface carries one, and empty at j = n unless the
/// scheme produced a terminal jump level.
void write_surface_csv(const fs::path& path, const lattice::Lattice& lat, const SurfaceView& v) {
    auto out = open_for_write(path);
    out << "j,t,k,x,y,z";
    if (v.d) out << ",d";
    out << '\n';
    for (int j = 0; j <= lat.n; ++j) {
        const bool has_z = j < lat.n;
        const bool has_d = v.d && (j < lat.n || v.terminal_jump);
        for (int k = 0; k <= j; ++k) {
            out << j << ',' << format17(lat.time(j)) << ',' << k << ','
                << format17(lattice::node_coordinate(lat, j, k)) << ','
                << format17((*v.y)[j].values[k]) << ',';
            if (has_z) out << format17((*v.z)[j].values[k]);
            if (v.d) {
                out << ',';
                if (has_d) out << format17((*v.d)[j].values[k]);
            }
            out << '\n';
        }
    }
}

json validation_to_json(const problem::ValidationReport& report) {
    json items = json::array();
    for (const auto& item : report.items) {
        items.push_back({{"condition", item.condition},
                         {"value", item.value},
                         {"applicable", item.applicable},
                         {"pass", item.pass}});
    }
    return {{"items", items}, {"warnings", report.warnings}, {"all_pass", report.all_pass()}};
}

void write_summary_json(const fs::path& path, const RunConfig& config, const SolveSummary& s) {
    json doc = {{"root", s.root},
                {"scheme", s.scheme_id},
                {"fingerprint", s.fingerprint},
                {"n", s.n},
                {"T", s.T},
                {"p", s.p ? json(*s.p) : json(nullptr)},
                {"problem", config.problem.describe()},
                {"validation", validation_to_json(s.validation)},
                {"wall_ms", s.wall_ms}};
    auto out = open_for_write(path);
    out << doc.dump(2) << '\n';
}

/// Gnuplot surface script plus its data file (t x y blocks per level).
std::vector<std::string> write_surface_gnuplot(const fs::path& script_path,
                                               const lattice::Lattice& lat,
                                               const SurfaceView& v) {
    fs::path dat_path = script_path;
    dat_path.replace_extension(".dat");
    {
        auto dat = open_for_write(dat_path);
        for (int j = 0; j <= lat.n; ++j) {
            for (int k = 0; k <= j; ++k) {
                dat << format17(lat.time(j)) << ' '
                    << format17(lattice::node_coordinate(lat, j, k)) << ' '
                    << format17((*v.y)[j].values[k]) << '\n';
            }
            dat << '\n';
        }
    }
    auto out = open_for_write(script_path);
    out << "# Solution surface for scheme " << *v.scheme_id << "\n"
        << "set xlabel \"t\"\n"
        << "set ylabel \"x\"\n"
        << "set zlabel \"y\"\n"
        << "set hidden3d\n"
        << "splot \"" << dat_path.filename().string() << "\" using 1:2:3 with lines notitle\n";
    return {script_path.string(), dat_path.string()};
}

/// Binomial weight C(j, k) / 2^j evaluated in log space.
double binomial_weight(int j, int k) {
    return std::exp(std::lgamma(j + 1.0) - std::lgamma(k + 1.0) - std::lgamma(j - k + 1.0) -
                    j * std::log(2.0));
}

/// Σ_j δ · E|z_j − z_ref,j|  (β = 1 difference norm over the lattice).
double z_difference_norm(const std::vector<lattice::LevelFunction>& z,
                         const std::vector<lattice::LevelFunction>& z_ref, double delta) {
    double total = 0.0;
    const std::size_t levels = std::min(z.size(), z_ref.size());
    for (std::size_t j = 0; j < levels; ++j) {
        double level_mean = 0.0;
        for (int k = 0; k <= (int)j; ++k)
            level_mean += binomial_weight((int)j, k) * std::abs(z[j].values[k] - z_ref[j].values[k]);
        total += delta * level_mean;
    }
    return total;
}

std::string describe_error(const Error& e) {
    return std::string(e.category()) + ": " + e.what();
}

void write_sweep_csv(const fs::path& path, const std::string& parameter_name,
                     const ConvergenceReport& report) {
    auto out = open_for_write(path);
    out << parameter_name << ",root,diff_prev,deviation,z_l1,wall_ms,error\n";
    for (const auto& row : report.rows) {
        out << format17(row.parameter) << ',';
        if (row.error.empty()) out << format17(row.root);
        out << ',';
        if (row.diff_prev) out << format17(*row.diff_prev);
        out << ',';
        if (row.deviation) out << format17(*row.deviation);
        out << ',';
        if (row.z_beta_norm) out << format17(*row.z_beta_norm);
        out << ',' << format17(row.wall_ms) << ',' << row.error << '\n';
    }
}

/// Shared sampling core; assumes `solved` came from `config`.
std::vector<SampledPath> sample_paths_from(const Solved& solved, const RunConfig& config,
                                           int count, std::uint64_t seed,
                                           std::vector<std::string>* files_written) {
    const auto& spec = config.problem;
    const lattice::Lattice lat(config.n, spec.T);
    const SurfaceView v = view_of(solved);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    const auto* reflected_surface = std::get_if<reflected::ReflectedSurface>(&solved);
    const auto* constrained_surface = std::get_if<constrained::ConstrainedSurface>(&solved);
    const auto* phi = spec.constraint ? std::get_if<problem::PhiReflection>(&*spec.constraint)
                                      : nullptr;

    std::mt19937_64 rng(seed);
    std::vector<SampledPath> paths;
    paths.reserve((std::size_t)std::max(count, 0));
    for (int i = 0; i < count; ++i) {
        SampledPath path;
        path.signs = oracle::sample_signs(rng, lat.n);
        std::vector<double> acc;
        if (reflected_surface) acc = reflected::accumulate_K(*reflected_surface, path.signs);
        if (constrained_surface) acc = constrained::accumulate_A(*constrained_surface, path.signs);

        int k = 0;
        double walk = 0.0;
        for (int j = 0; j <= lat.n; ++j) {
            if (j > 0) {
                if (path.signs[j - 1] > 0) ++k;
                walk += path.signs[j - 1] * lat.sqrt_delta;
            }
            const double t = lat.time(j);
            const double y = (*v.y)[j].values[k];
            const double z = j < lat.n ? (*v.z)[j].values[k] : nan;
            double d = nan;
            if (v.d && (j < lat.n || v.terminal_jump)) d = (*v.d)[j].values[k];
            double gap = nan;
            if (spec.barrier) gap = y - (*spec.barrier)(t, walk);
            else if (phi && j < lat.n) gap = y - (*phi)(z);
            path.t.push_back(t);
            path.B.push_back(walk);
            path.y.push_back(y);
            path.z.push_back(z);
            path.d.push_back(d);
            path.K.push_back(acc.empty() ? nan : acc[j]);
            path.gap.push_back(gap);
        }
        paths.push_back(std::move(path));
    }

    if (files_written) {
        const fs::path dir = prepare_output_dir(config.output.dir);
        const fs::path csv_path = dir / "paths.csv";
        {
            auto out = open_for_write(csv_path);
            auto cell = [&out](double value) {
                if (std::isfinite(value)) out << format17(value);
            };
            out << "path,j,t,B,y,z,d,K_or_A,gap\n";
            for (int i = 0; i < (int)paths.size(); ++i) {
                const auto& p = paths[i];
                for (int j = 0; j < (int)p.t.size(); ++j) {
                    out << i << ',' << j << ',' << format17(p.t[j]) << ',' << format17(p.B[j])
                        << ',' << format17(p.y[j]) << ',';
                    cell(p.z[j]);
                    out << ',';
                    cell(p.d[j]);
                    out << ',';
                    cell(p.K[j]);
                    out << ',';
                    cell(p.gap[j]);
                    out << '\n';
                }
            }
        }
        files_written->push_back(csv_path.string());

        const fs::path dat_path = dir / "paths.dat";
        {
            auto dat = open_for_write(dat_path);
            for (const auto& p : paths) {
                for (int j = 0; j < (int)p.t.size(); ++j) {
                    dat << format17(p.t[j]) << ' ' << format17(p.B[j]) << ' '
                        << format17(p.y[j]);
                    if (std::isfinite(p.K[j])) dat << ' ' << format17(p.K[j]);
                    dat << '\n';
                }
                dat << '\n';
            }
        }
        files_written->push_back(dat_path.string());

        const fs::path script_path = dir / "paths.gnuplot";
        {
            auto out = open_for_write(script_path);
            out << "# Sampled trajectories for scheme " << *v.scheme_id << "\n"
                << "set xlabel \"t\"\n"
                << "set ylabel \"value\"\n"
                << "plot \"" << dat_path.filename().string()
                << "\" using 1:3 with lines title \"y\", \\\n     \""
                << dat_path.filename().string() << "\" using 1:2 with lines title \"B\"\n";
        }
        files_written->push_back(script_path.string());
    }
    return paths;
}

} // namespace

Solved dispatch_solve(const problem::ProblemSpec& spec, const lattice::Lattice& lat,
                      const std::string& scheme_id) {
    if (!problem::scheme_known(scheme_id)) throw ConfigError("unknown scheme id: " + scheme_id);
    if (problem::scheme_uses_p(scheme_id) && !spec.p)
        throw ConfigError("scheme '" + scheme_id + "' requires the penalization parameter p");

    if (scheme_id == "implicit") return schemes::solve_implicit(spec, lat);
    if (scheme_id == "explicit") return schemes::solve_explicit(spec, lat);
    if (scheme_id == "split") return schemes::solve_split(spec, lat);
    if (scheme_id == "reflected-implicit") return reflected::solve_reflected_implicit(spec, lat);
    if (scheme_id == "reflected-explicit") return reflected::solve_reflected_explicit(spec, lat);
    if (scheme_id == "penalized-implicit")
        return reflected::solve_penalized_implicit(spec, lat, *spec.p);
    if (scheme_id == "penalized-explicit-implicit")
        return reflected::solve_penalized_explicit_implicit(spec, lat, *spec.p);
    if (scheme_id == "z-constrained-implicit")
        return constrained::solve_z_constrained(spec, lat, *spec.p,
                                                constrained::ZConstrainedMode::implicit_step);
    if (scheme_id == "z-constrained-explicit")
        return constrained::solve_z_constrained(spec, lat, *spec.p,
                                                constrained::ZConstrainedMode::explicit_step);
    if (scheme_id == "phi-implicit")
        return constrained::solve_phi_reflected(spec, lat, *spec.p,
                                                constrained::PhiMode::implicit_step);
    return constrained::solve_phi_reflected(spec, lat, *spec.p,
                                            constrained::PhiMode::explicit_implicit);
}

double solved_root(const Solved& solved) {
    return std::visit([](const auto& surface) { return surface.root(); }, solved);
}

SolveSummary run_solve(const RunConfig& config) {
    const lattice::Lattice lat(config.n, config.problem.T);
    SolveSummary summary;
    summary.validation = problem::validate(config.problem, lat, config.scheme_id);
    problem::enforce(summary.validation, config.strict);

    const auto t0 = std::chrono::steady_clock::now();
    const Solved solved = dispatch_solve(config.problem, lat, config.scheme_id);
    summary.wall_ms = now_ms_since(t0);

    const SurfaceView v = view_of(solved);
    summary.root = solved_root(solved);
    summary.scheme_id = *v.scheme_id;
    summary.fingerprint = *v.fingerprint;
    summary.n = config.n;
    summary.T = config.problem.T;
    summary.p = v.p;

    const bool any_files = !config.output.surface_csv.empty() ||
                           !config.output.summary_json.empty() ||
                           !config.output.gnuplot.empty() || config.output.sample_paths > 0;
    if (!any_files) return summary;

    const fs::path dir = prepare_output_dir(config.output.dir);
    if (!config.output.surface_csv.empty()) {
        const fs::path path = dir / config.output.surface_csv;
        write_surface_csv(path, lat, v);
        summary.files.push_back(path.string());
    }
    if (!config.output.summary_json.empty()) {
        const fs::path path = dir / config.output.summary_json;
        write_summary_json(path, config, summary);
        summary.files.push_back(path.string());
    }
    if (!config.output.gnuplot.empty()) {
        auto written = write_surface_gnuplot(dir / config.output.gnuplot, lat, v);
        summary.files.insert(summary.files.end(), written.begin(), written.end());
    }
    if (config.output.sample_paths > 0)
        sample_paths_from(solved, config, config.output.sample_paths, config.output.seed,
                          &summary.files);
    return summary;
}

ConvergenceReport run_converge(const RunConfig& config, const std::vector<int>& ns) {
    if (ns.empty()) throw ConfigError("convergence run needs at least one lattice size");
    ConvergenceReport report;

    const bool unconstrained = !config.problem.barrier && !config.problem.constraint;
    if (unconstrained) {
        if (const auto* lin = config.problem.generator.as_linear()) {
            const auto est = oracle::closed_form_linear(lin->b, lin->c, lin->r,
                                                        config.problem.terminal, config.problem.T);
            report.reference = est.value;
            report.reference_kind = "closed form (quadrature)";
        } else if (config.problem.generator.is_quadratic_z()) {
            const auto est = oracle::closed_form_quadratic(config.problem.terminal,
                                                           config.problem.T);
            report.reference = est.value;
            report.reference_kind = "closed form (quadrature)";
        }
    }

    const ConvergenceRow* previous = nullptr;
    for (int n : ns) {
        ConvergenceRow row;
        row.parameter = n;
        try {
            const lattice::Lattice lat(n, config.problem.T);
            problem::enforce(problem::validate(config.problem, lat, config.scheme_id),
                             config.strict);
            const auto t0 = std::chrono::steady_clock::now();
            const Solved solved = dispatch_solve(config.problem, lat, config.scheme_id);
            row.wall_ms = now_ms_since(t0);
            row.root = solved_root(solved);
            if (previous) row.diff_prev = row.root - previous->root;
            if (report.reference) row.deviation = std::abs(row.root - *report.reference);
        } catch (const Error& e) {
            row.error = describe_error(e);
        }
        report.rows.push_back(row);
        previous = row.error.empty() ? &report.rows.back() : nullptr;
    }

    const fs::path path = prepare_output_dir(config.output.dir) / "converge.csv";
    write_sweep_csv(path, "n", report);
    report.files.push_back(path.string());
    return report;
}

ConvergenceReport run_penalty_sweep(const RunConfig& config, const std::vector<double>& ps) {
    if (ps.empty()) throw ConfigError("penalty sweep needs at least one value of p");
    if (!problem::scheme_uses_p(config.scheme_id))
        throw ConfigError("penalty sweep requires a penalization scheme, got '" +
                          config.scheme_id + "'");
    ConvergenceReport report;
    const lattice::Lattice lat(config.n, config.problem.T);

    // Barrier problems admit a penalty-free reference at the same n.
    std::optional<reflected::ReflectedSurface> reference_surface;
    if (config.problem.barrier && problem::scheme_uses_barrier(config.scheme_id)) {
        reference_surface = reflected::solve_reflected_explicit(config.problem, lat);
        report.reference = reference_surface->root();
        report.reference_kind = "reflected-explicit (n=" + std::to_string(config.n) + ")";
    }

    const ConvergenceRow* previous = nullptr;
    for (double p : ps) {
        ConvergenceRow row;
        row.parameter = p;
        try {
            if (!(p > 0.0)) throw ConfigError("penalty sweep values must satisfy p > 0");
            RunConfig current = config;
            current.problem.p = p;
            problem::enforce(problem::validate(current.problem, lat, current.scheme_id),
                             current.strict);
            const auto t0 = std::chrono::steady_clock::now();
            const Solved solved = dispatch_solve(current.problem, lat, current.scheme_id);
            row.wall_ms = now_ms_since(t0);
            row.root = solved_root(solved);
            if (previous) row.diff_prev = row.root - previous->root;
            if (report.reference) row.deviation = std::abs(row.root - *report.reference);
            if (reference_surface) {
                const SurfaceView v = view_of(solved);
                row.z_beta_norm = z_difference_norm(*v.z, reference_surface->z, lat.delta);
            }
        } catch (const Error& e) {
            row.error = describe_error(e);
        }
        report.rows.push_back(row);
        previous = row.error.empty() ? &report.rows.back() : nullptr;
    }

    const fs::path path = prepare_output_dir(config.output.dir) / "penalty_sweep.csv";
    write_sweep_csv(path, "p", report);
    report.files.push_back(path.string());
    return report;
}

std::vector<SampledPath> run_sample_paths(const RunConfig& config, int count, std::uint64_t seed,
                                          std::vector<std::string>* files_written) {
    if (count < 1) throw ConfigError("path sampling needs count >= 1");
    const lattice::Lattice lat(config.n, config.problem.T);
    problem::enforce(problem::validate(config.problem, lat, config.scheme_id), config.strict);
    const Solved solved = dispatch_solve(config.problem, lat, config.scheme_id);
    std::vector<std::string> local_files;
    auto paths = sample_paths_from(solved, config, count, seed,
                                   files_written ? files_written : &local_files);
    return paths;
}

double surface_csv_root(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open surface CSV: " + path);
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("empty surface CSV: " + path);
    while (std::getline(in, line)) {
        std::istringstream row(line);
        std::string j, t, k, x, y;
        if (!std::getline(row, j, ',') || !std::getline(row, t, ',') ||
            !std::getline(row, k, ',') || !std::getline(row, x, ',') ||
            !std::getline(row, y, ','))
            continue;
        if (j == "0" && k == "0") {
            char* end = nullptr;
            const double value = std::strtod(y.c_str(), &end);
            if (end == y.c_str()) throw ConfigError("malformed root row in " + path);
            return value;
        }
    }
    throw ConfigError("no root row (j=0, k=0) found in " + path);
}

} // namespace bsde::cli
