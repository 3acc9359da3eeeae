/**
 * @file oracle.cpp
 * @brief Quadrature, Monte Carlo, closed forms and the full-path tree.
 */

#include "bsde/oracle.hpp"
#include "bsde/constrained.hpp"
#include "bsde/errors.hpp"
#include "bsde/lattice.hpp"
#include "bsde/reflected.hpp"
#include "bsde/schemes.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <numbers>

namespace bsde::oracle {

namespace {

// ------------------------------------------------- Gauss–Legendre rule

struct GL16 {
    std::array<double, 16> x{};
    std::array<double, 16> w{};
};

/// Legendre P₁₆ and its derivative by the three-term recurrence.
void legendre16(double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= 16; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    p = p1;
    dp = 16.0 * (x * p1 - p0) / (x * x - 1.0);
}

/// Nodes via Newton iteration from the Chebyshev-like initial guesses.
const GL16& gl16() {
    static const GL16 rule = [] {
        GL16 r;
        for (int i = 0; i < 16; ++i) {
            double x = std::cos(std::numbers::pi * (i + 0.75) / 16.5);
            for (int it = 0; it < 100; ++it) {
                double p, dp;
                legendre16(x, p, dp);
                double step = p / dp;
                x -= step;
                if (std::abs(step) < 1e-15) break;
            }
            double p, dp;
            legendre16(x, p, dp);
            r.x[static_cast<std::size_t>(i)] = x;
            r.w[static_cast<std::size_t>(i)] = 2.0 / ((1.0 - x * x) * dp * dp);
        }
        return r;
    }();
    return rule;
}

/// ∫₀^{15√T} (h(x) + h(−x))·φ_T(x) dx over `panels` equal panels.
double half_line_integral(const std::function<double(double)>& h, double T, int panels) {
    const GL16& rule = gl16();
    const double upper = 15.0 * std::sqrt(T);
    const double width = upper / panels;
    const double norm = 1.0 / std::sqrt(2.0 * std::numbers::pi * T);
    double total = 0.0;
    for (int m = 0; m < panels; ++m) {
        const double mid = (m + 0.5) * width;
        const double half = 0.5 * width;
        double panel = 0.0;
        for (int i = 0; i < 16; ++i) {
            const std::size_t ii = static_cast<std::size_t>(i);
            double x = mid + half * rule.x[ii];
            double density = norm * std::exp(-x * x / (2.0 * T));
            panel += rule.w[ii] * (h(x) + h(-x)) * density;
        }
        total += panel * half;
    }
    return total;
}

std::function<double(double)> as_function(const expr::Expression& h) {
    return [h](double x) {
        expr::Env env;
        env.x = x;
        return h(env);
    };
}

/// Doubling loop shared by the public entry points; reports the number
/// of function evaluations of the accepted result when asked.
double gauss_core(const std::function<double(double)>& h, double T, int order,
                  long long* evals_out) {
    if (order < 2) throw ConfigError("quadrature order must be at least 2");
    if (!(T > 0.0)) throw ConfigError("quadrature horizon T must be positive");
    constexpr int kMaxEvals = 2048;
    int panels = std::max(1, (order + 31) / 32);
    double prev = half_line_integral(h, T, panels);
    while (2 * panels * 32 <= kMaxEvals) {
        panels *= 2;
        double cur = half_line_integral(h, T, panels);
        if (std::abs(cur - prev) <= 1e-10 * std::max(1.0, std::abs(cur))) {
            if (evals_out != nullptr) *evals_out = 32LL * panels;
            return cur;
        }
        prev = cur;
    }
    throw NumericalError(
        "gaussian quadrature did not converge within the 2048-evaluation cap");
}

// ------------------------------------------------------- path-tree glue

int popcount32(std::uint32_t v) { return std::popcount(v); }

} // namespace

// ---------------------------------------------------------- quadrature

double gauss_expectation(const std::function<double(double)>& h, double T, int order) {
    return gauss_core(h, T, order, nullptr);
}

double gauss_expectation(const expr::Expression& h, double T, int order) {
    return gauss_expectation(as_function(h), T, order);
}

// --------------------------------------------------------- Monte Carlo

double NormalStream::next() {
    const std::uint64_t w1 = rng_();
    const std::uint64_t w2 = rng_();
    const double u1 = (static_cast<double>(w1 >> 11) + 1.0) * 0x1.0p-53;
    const double u2 = static_cast<double>(w2 >> 11) * 0x1.0p-53;
    return std::sqrt(-2.0 * std::log(u1)) *
           std::cos(2.0 * std::numbers::pi * u2);
}

std::vector<int> sample_signs(std::mt19937_64& rng, int n) {
    std::vector<int> signs(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) signs[static_cast<std::size_t>(j)] = (rng() >> 63) ? 1 : -1;
    return signs;
}

OracleEstimate monte_carlo_expectation(const std::function<double(double)>& h, double T,
                                       long long samples, std::uint64_t seed) {
    if (samples < 2) throw ConfigError("Monte Carlo needs at least 2 samples");
    const double scale = std::sqrt(T);
    NormalStream normals(seed);
    // Welford running mean/variance.
    double mean = 0.0;
    double m2 = 0.0;
    for (long long i = 1; i <= samples; ++i) {
        double v = h(scale * normals.next());
        double delta = v - mean;
        mean += delta / static_cast<double>(i);
        m2 += delta * (v - mean);
    }
    OracleEstimate est;
    est.value = mean;
    est.standard_error =
        std::sqrt(m2 / (static_cast<double>(samples - 1) * static_cast<double>(samples)));
    est.method = Method::monte_carlo;
    est.count = samples;
    return est;
}

OracleEstimate monte_carlo_expectation(const expr::Expression& h, double T, long long samples,
                                       std::uint64_t seed) {
    return monte_carlo_expectation(as_function(h), T, samples, seed);
}

// -------------------------------------------------------- closed forms

OracleEstimate closed_form_linear(double b, double c, double r, const expr::Expression& phi,
                                  double T, Method method, long long mc_samples,
                                  std::uint64_t seed) {
    auto integrand = [phi, c](double x) {
        expr::Env env;
        env.x = x;
        return phi(env) * std::exp(c * x);
    };
    const double scale = std::exp((b - 0.5 * c * c) * T);
    // (r/b)(e^{bT} − 1) degenerates to rT in the b → 0 limit.
    const double additive = b != 0.0 ? (r / b) * (std::exp(b * T) - 1.0) : r * T;

    OracleEstimate est;
    if (method == Method::quadrature) {
        long long evals = 0;
        est.value = scale * gauss_core(integrand, T, 32, &evals) + additive;
        est.standard_error = 0.0;
        est.method = Method::quadrature;
        est.count = evals;
    } else {
        OracleEstimate inner = monte_carlo_expectation(integrand, T, mc_samples, seed);
        est.value = scale * inner.value + additive;
        est.standard_error = scale * inner.standard_error;
        est.method = Method::monte_carlo;
        est.count = inner.count;
    }
    return est;
}

OracleEstimate closed_form_quadratic(const expr::Expression& phi, double T, Method method,
                                     long long mc_samples, std::uint64_t seed) {
    auto integrand = [phi](double x) {
        expr::Env env;
        env.x = x;
        return std::exp(phi(env));
    };
    OracleEstimate est;
    if (method == Method::quadrature) {
        long long evals = 0;
        double mean = gauss_core(integrand, T, 32, &evals);
        if (!(mean > 0.0) || !std::isfinite(mean))
            throw NumericalError("closed form ln E[exp(phi)] is undefined: E[exp(phi)] "
                                 "overflowed or is non-positive");
        est.value = std::log(mean);
        est.standard_error = 0.0;
        est.method = Method::quadrature;
        est.count = evals;
    } else {
        OracleEstimate inner = monte_carlo_expectation(integrand, T, mc_samples, seed);
        if (!(inner.value > 0.0) || !std::isfinite(inner.value))
            throw NumericalError("closed form ln E[exp(phi)] is undefined: sample mean "
                                 "overflowed or is non-positive");
        est.value = std::log(inner.value);
        // First-order error propagation through ln.
        est.standard_error = inner.standard_error / inner.value;
        est.method = Method::monte_carlo;
        est.count = inner.count;
    }
    return est;
}

// ----------------------------------------------------------- path tree

namespace {

/// Per-node y-update selected by scheme id; mirrors the lattice solvers
/// expression for expression so tree and lattice agree bit for bit.
class TreeStepper {
public:
    TreeStepper(const problem::ProblemSpec& spec, const std::string& scheme_id, double delta)
        : spec_(spec), id_(scheme_id), delta_(delta) {
        if (problem::scheme_uses_p(id_)) {
            p_ = spec.p.value_or(0.0);
            if (id_ == "penalized-implicit" || id_ == "penalized-explicit-implicit") {
                if (!(p_ > 0.0))
                    throw ConfigError("scheme \"" + id_ +
                                      "\" requires a positive penalization p");
            }
        }
        if (problem::scheme_uses_z_constraint(id_)) {
            if (!spec.constraint ||
                !std::holds_alternative<problem::ZInterval>(*spec.constraint))
                throw ConfigError("z-constrained schemes require a z-interval constraint");
            zgamma_ = std::get<problem::ZInterval>(*spec.constraint);
        }
        if (problem::scheme_uses_phi_constraint(id_)) {
            if (!spec.constraint ||
                !std::holds_alternative<problem::PhiReflection>(*spec.constraint))
                throw ConfigError("phi schemes require a y >= phi(z) constraint");
            pgamma_ = std::get<problem::PhiReflection>(*spec.constraint);
        }
    }

    bool needs_barrier() const { return problem::scheme_uses_barrier(id_); }

    /// Terminal jump applies to the exact reflected schemes only.
    bool terminal_jump() const {
        return id_ == "reflected-implicit" || id_ == "reflected-explicit";
    }

    double operator()(double t, double E, double z, double L) const {
        const problem::Generator& g = spec_.generator;
        if (id_ == "implicit") return schemes::implicit_step_solve(E, t, z, g, delta_);
        if (id_ == "explicit") return schemes::explicit_step(g, t, E, z, delta_);
        if (id_ == "split") {
            const problem::Generator& g1 = g.g1();
            const problem::Generator& g2 = g.g2();
            double predictor = E - g2(t, E, z) * delta_;
            double target = E + g2(t, predictor, z) * delta_;
            return schemes::implicit_step_solve(target, t, z, g1, delta_);
        }
        if (id_ == "reflected-implicit")
            return reflected::reflected_implicit_node(E, t, z, L, g, delta_).y;
        if (id_ == "reflected-explicit")
            return reflected::reflected_explicit_node(E, t, z, L, g, delta_).y;
        if (id_ == "penalized-implicit")
            return reflected::penalized_implicit_node(E, t, z, L, g, delta_, p_).y;
        if (id_ == "penalized-explicit-implicit")
            return reflected::penalized_ei_node(E, t, z, L, g, delta_, p_).y;
        if (id_ == "z-constrained-implicit") {
            double a = p_ * problem::z_distance(*zgamma_, z) * delta_;
            return schemes::implicit_step_solve(E + a, t, z, g, delta_);
        }
        if (id_ == "z-constrained-explicit") {
            double a = p_ * problem::z_distance(*zgamma_, z) * delta_;
            return schemes::explicit_step(g, t, E, z, delta_) + a;
        }
        if (id_ == "phi-implicit") {
            double threshold = (*pgamma_)(z);
            return reflected::penalized_implicit_node(E, t, z, threshold, g, delta_, p_).y;
        }
        if (id_ == "phi-explicit-implicit") {
            double candidate = schemes::explicit_step(g, t, E, z, delta_);
            double weight = p_ * delta_ / (1.0 + p_ * delta_);
            return candidate + weight * problem::phi_distance(*pgamma_, candidate, z);
        }
        throw ConfigError("unknown scheme id \"" + id_ + "\"");
    }

private:
    const problem::ProblemSpec& spec_;
    std::string id_;
    double delta_;
    double p_ = 0.0;
    std::optional<problem::ZInterval> zgamma_;
    std::optional<problem::PhiReflection> pgamma_;
};

/// Barrier value at a path node: either ψ(t, x) or the Itô accumulation
/// over the realized ε-prefix.
double tree_barrier(const PathProblem& pp, const lattice::Lattice& lat, int j,
                    std::uint32_t mask, const std::vector<double>& ito_drift_prefix,
                    const std::vector<double>& ito_sigma) {
    if (pp.ito_barrier) {
        double stoch = 0.0;
        for (int i = 0; i < j; ++i) {
            double sign = (mask >> i) & 1u ? 1.0 : -1.0;
            stoch += ito_sigma[static_cast<std::size_t>(i)] * sign;
        }
        return pp.ito_barrier->L0 + ito_drift_prefix[static_cast<std::size_t>(j)] +
               lat.sqrt_delta * stoch;
    }
    int k = popcount32(mask);
    double x = (2.0 * k - j) * lat.sqrt_delta;
    return (*pp.base.barrier)(lat.time(j), x);
}

} // namespace

PathTreeSolution solve_full_path_tree(const PathProblem& pp, const std::string& scheme_id,
                                      int n) {
    if (n < 1 || n > kPathTreeMaxSteps)
        throw ValidationError("full path tree supports 1 <= n <= 22 steps");
    if (!problem::scheme_known(scheme_id))
        throw ConfigError("unknown scheme id \"" + scheme_id + "\"");

    const problem::ProblemSpec& spec = pp.base;
    lattice::Lattice lat(n, spec.T);
    TreeStepper step(spec, scheme_id, lat.delta);

    const bool barrier_needed = step.needs_barrier();
    if (barrier_needed && !spec.barrier && !pp.ito_barrier)
        throw ConfigError("scheme \"" + scheme_id + "\" requires a barrier");

    // Itô-barrier prefixes: deterministic drift per level and σ(t_i).
    std::vector<double> ito_drift_prefix;
    std::vector<double> ito_sigma;
    if (pp.ito_barrier) {
        ito_drift_prefix.resize(static_cast<std::size_t>(n) + 1, 0.0);
        ito_sigma.resize(static_cast<std::size_t>(n), 0.0);
        expr::Env env;
        double acc = 0.0;
        for (int i = 0; i < n; ++i) {
            env.t = lat.time(i);
            ito_drift_prefix[static_cast<std::size_t>(i)] = acc;
            acc += lat.delta * pp.ito_barrier->l(env);
            ito_sigma[static_cast<std::size_t>(i)] = pp.ito_barrier->sigma(env);
        }
        ito_drift_prefix[static_cast<std::size_t>(n)] = acc;
    }

    PathTreeSolution out;
    out.n = n;
    out.y.resize(static_cast<std::size_t>(n) + 1);

    // Terminal values per leaf mask.
    auto& terminal = out.y[static_cast<std::size_t>(n)];
    terminal.resize(std::size_t{1} << n);
    if (pp.path_terminal) {
        std::vector<double> walk(static_cast<std::size_t>(n) + 1, 0.0);
        for (std::uint32_t mask = 0; mask < terminal.size(); ++mask) {
            for (int i = 1; i <= n; ++i) {
                double sign = (mask >> (i - 1)) & 1u ? 1.0 : -1.0;
                walk[static_cast<std::size_t>(i)] =
                    walk[static_cast<std::size_t>(i) - 1] + sign * lat.sqrt_delta;
            }
            terminal[mask] = pp.path_terminal(walk);
        }
    } else {
        expr::Env env;
        for (std::uint32_t mask = 0; mask < terminal.size(); ++mask) {
            int k = popcount32(mask);
            env.x = (2.0 * k - n) * lat.sqrt_delta;
            terminal[mask] = spec.terminal(env);
        }
    }

    if (barrier_needed && step.terminal_jump()) {
        for (std::uint32_t mask = 0; mask < terminal.size(); ++mask) {
            double L = tree_barrier(pp, lat, n, mask, ito_drift_prefix, ito_sigma);
            terminal[mask] = std::max(terminal[mask], L);
        }
    }

    const double half_mesh = 2.0 * lat.sqrt_delta;
    for (int j = n - 1; j >= 0; --j) {
        auto& level = out.y[static_cast<std::size_t>(j)];
        const auto& next = out.y[static_cast<std::size_t>(j) + 1];
        level.resize(std::size_t{1} << j);
        const double t = lat.time(j);
        for (std::uint32_t mask = 0; mask < level.size(); ++mask) {
            double up = next[mask | (std::uint32_t{1} << j)];
            double down = next[mask];
            double E = 0.5 * (up + down);
            double z = (up - down) / half_mesh;
            double L = barrier_needed
                           ? tree_barrier(pp, lat, j, mask, ito_drift_prefix, ito_sigma)
                           : 0.0;
            level[mask] = step(t, E, z, L);
            if (!std::isfinite(level[mask]) || std::abs(level[mask]) > 1e12)
                throw NumericalError("full path tree solve exploded at level " +
                                     std::to_string(j));
        }
    }
    return out;
}

PathTreeSolution solve_full_path_tree(const problem::ProblemSpec& spec,
                                      const std::string& scheme_id, int n) {
    PathProblem pp;
    pp.base = spec;
    return solve_full_path_tree(pp, scheme_id, n);
}

} // namespace bsde::oracle
