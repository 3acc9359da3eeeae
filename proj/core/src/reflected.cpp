/**
 * @file reflected.cpp
 * @brief Reflected and penalized backward-induction solvers.
 */

#include "bsde/reflected.hpp"
#include "bsde/errors.hpp"

#include <cmath>
#include <sstream>

namespace bsde::reflected {

namespace {

constexpr int kMaxFixedPoint = 200;

double auto_tol(double target) { return 1e-13 * std::max(1.0, std::abs(target)); }

/// Solve the linear penalty branch y(1+pδ) = E + g(t,y,z)δ + pLδ.
/// Linear presets in closed form, otherwise a fixed point whose
/// contraction factor δμ/(1+pδ) improves on the unconstrained one.
double penalty_branch_solve(double E, double t, double z, double L,
                            const problem::Generator& g, double delta, double p,
                            double start) {
    if (const problem::Linear* lin = g.as_linear()) {
        double denom = 1.0 - lin->b * delta + p * delta;
        if (denom == 0.0)
            throw NumericalError("penalized step: singular linear solve");
        return (E + (lin->c * z + lin->r) * delta + p * L * delta) / denom;
    }
    const double tol = auto_tol(E);
    const double scale = 1.0 + p * delta;
    double y = start;
    for (int i = 0; i < kMaxFixedPoint; ++i) {
        double next = (E + g(t, y, z) * delta + p * L * delta) / scale;
        if (std::abs(next - y) <= tol) return next;
        y = next;
    }
    throw NumericalError("penalized step: fixed point did not converge");
}

} // namespace

NodeResult reflected_implicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta) {
    double unconstrained = schemes::implicit_step_solve(E, t, z, g, delta);
    if (unconstrained >= L) return {unconstrained, 0.0};
    // Clamp to the barrier; the increment restores y = E + gδ + d exactly
    // and is positive whenever the unconstrained solution is below L.
    double d = L - E - g(t, L, z) * delta;
    return {L, std::max(d, 0.0)};
}

NodeResult reflected_explicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta) {
    double candidate = schemes::explicit_step(g, t, E, z, delta);
    if (candidate >= L) return {candidate, 0.0};
    return {L, L - candidate};
}

NodeResult penalized_implicit_node(double E, double t, double z, double L,
                                   const problem::Generator& g, double delta, double p) {
    double unconstrained = schemes::implicit_step_solve(E, t, z, g, delta);
    // p = 0 (reachable through the constrained solvers) must reduce to
    // the unconstrained step bit for bit, so skip the branch solve.
    if (unconstrained >= L || p == 0.0) return {unconstrained, 0.0};
    double y = penalty_branch_solve(E, t, z, L, g, delta, p, unconstrained);
    double d = p * std::max(L - y, 0.0) * delta;
    return {y, d};
}

NodeResult penalized_ei_node(double E, double t, double z, double L,
                             const problem::Generator& g, double delta, double p) {
    double candidate = E + g(t, E, z) * delta;
    double weight = p * delta / (1.0 + p * delta);
    double y = candidate + weight * std::max(L - candidate, 0.0);
    double d = p * std::max(L - y, 0.0) * delta;
    return {y, d};
}

std::pair<lattice::LevelFunction, lattice::LevelFunction>
apply_terminal_jump(const lattice::LevelFunction& terminal,
                    const lattice::LevelFunction& barrier_at_T) {
    if (terminal.level != barrier_at_T.level)
        throw ValidationError("terminal and barrier levels must match");
    const std::size_t count = terminal.values.size();
    std::vector<double> adjusted(count);
    std::vector<double> jump(count);
    for (std::size_t k = 0; k < count; ++k) {
        double xi = terminal.values[k];
        double L = barrier_at_T.values[k];
        adjusted[k] = std::max(xi, L);
        jump[k] = std::max(L - xi, 0.0);
    }
    return {lattice::LevelFunction(terminal.level, std::move(adjusted)),
            lattice::LevelFunction(terminal.level, std::move(jump))};
}

namespace {

/// Barrier values ψ(t_j, x(j,k)) on one level.
lattice::LevelFunction barrier_level(const problem::Barrier& barrier,
                                     const lattice::Lattice& lat, int j) {
    std::vector<double> values(static_cast<std::size_t>(j) + 1);
    const double t = lat.time(j);
    for (int k = 0; k <= j; ++k)
        values[static_cast<std::size_t>(k)] = barrier(t, lattice::node_coordinate(lat, j, k));
    return lattice::LevelFunction(j, std::move(values));
}

/// Shared backward induction.  `step(t, E, z, L)` produces (y, d) per
/// node; `jump` selects the terminal adjustment of the exact schemes.
template <typename Step>
ReflectedSurface induct_reflected(const problem::ProblemSpec& spec, const lattice::Lattice& lat,
                                  const std::string& scheme_id, bool jump, double p,
                                  Step step) {
    if (!spec.barrier)
        throw ConfigError("scheme \"" + scheme_id + "\" requires a barrier");
    const problem::Barrier& barrier = *spec.barrier;

    ReflectedSurface out;
    out.scheme_id = scheme_id;
    out.fingerprint = p > 0.0 ? schemes::surface_fingerprint_p(spec, scheme_id, lat, p)
                              : schemes::surface_fingerprint(spec, scheme_id, lat);
    out.p = p;
    out.y.resize(static_cast<std::size_t>(lat.n) + 1);
    out.z.resize(static_cast<std::size_t>(lat.n));
    out.d.resize(static_cast<std::size_t>(lat.n) + 1);

    lattice::LevelFunction terminal = lattice::terminal_level(lat, spec.terminal);
    if (jump) {
        auto [adjusted, jump_level] = apply_terminal_jump(terminal, barrier_level(barrier, lat, lat.n));
        out.y[static_cast<std::size_t>(lat.n)] = std::move(adjusted);
        out.d[static_cast<std::size_t>(lat.n)] = std::move(jump_level);
    } else {
        out.y[static_cast<std::size_t>(lat.n)] = std::move(terminal);
        out.d[static_cast<std::size_t>(lat.n)] = lattice::LevelFunction(
            lat.n, std::vector<double>(static_cast<std::size_t>(lat.n) + 1, 0.0));
    }

    for (int j = lat.n - 1; j >= 0; --j) {
        const lattice::LevelFunction& next = out.y[static_cast<std::size_t>(j) + 1];
        lattice::LevelFunction expectation = lattice::conditional_expectation(next);
        lattice::LevelFunction zj = lattice::martingale_coefficient(next, lat);
        lattice::LevelFunction Lj = barrier_level(barrier, lat, j);
        const double t = lat.time(j);
        std::vector<double> yj(static_cast<std::size_t>(j) + 1);
        std::vector<double> dj(static_cast<std::size_t>(j) + 1);
        for (int k = 0; k <= j; ++k) {
            const std::size_t ki = static_cast<std::size_t>(k);
            NodeResult node = step(t, expectation.values[ki], zj.values[ki], Lj.values[ki]);
            yj[ki] = node.y;
            dj[ki] = node.d;
        }
        out.y[static_cast<std::size_t>(j)] = lattice::LevelFunction(j, std::move(yj));
        out.d[static_cast<std::size_t>(j)] = lattice::LevelFunction(j, std::move(dj));
        out.z[static_cast<std::size_t>(j)] = std::move(zj);
        schemes::check_level_finite(out.y[static_cast<std::size_t>(j)], scheme_id);
    }
    return out;
}

double require_p(double p, const std::string& scheme_id) {
    if (!(p > 0.0) || !std::isfinite(p))
        throw ConfigError("scheme \"" + scheme_id + "\" requires a positive penalization p");
    return p;
}

} // namespace

ReflectedSurface solve_reflected_implicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat) {
    const problem::Generator& g = spec.generator;
    return induct_reflected(spec, lat, "reflected-implicit", /*jump=*/true, 0.0,
                            [&](double t, double E, double z, double L) {
                                return reflected_implicit_node(E, t, z, L, g, lat.delta);
                            });
}

ReflectedSurface solve_reflected_explicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat) {
    const problem::Generator& g = spec.generator;
    return induct_reflected(spec, lat, "reflected-explicit", /*jump=*/true, 0.0,
                            [&](double t, double E, double z, double L) {
                                return reflected_explicit_node(E, t, z, L, g, lat.delta);
                            });
}

ReflectedSurface solve_penalized_implicit(const problem::ProblemSpec& spec,
                                          const lattice::Lattice& lat, double p) {
    require_p(p, "penalized-implicit");
    const problem::Generator& g = spec.generator;
    return induct_reflected(spec, lat, "penalized-implicit", /*jump=*/false, p,
                            [&](double t, double E, double z, double L) {
                                return penalized_implicit_node(E, t, z, L, g, lat.delta, p);
                            });
}

ReflectedSurface solve_penalized_explicit_implicit(const problem::ProblemSpec& spec,
                                                   const lattice::Lattice& lat, double p) {
    require_p(p, "penalized-explicit-implicit");
    const problem::Generator& g = spec.generator;
    return induct_reflected(spec, lat, "penalized-explicit-implicit", /*jump=*/false, p,
                            [&](double t, double E, double z, double L) {
                                return penalized_ei_node(E, t, z, L, g, lat.delta, p);
                            });
}

std::vector<double> accumulate_K(const ReflectedSurface& surface, const std::vector<int>& path) {
    const std::size_t n = surface.z.size();
    if (path.size() != n)
        throw ValidationError("path length must equal the number of lattice steps");
    std::vector<double> K(n + 1);
    std::size_t k = 0;
    K[0] = surface.d[0].values[0];
    for (std::size_t j = 1; j <= n; ++j) {
        if (path[j - 1] > 0) ++k;
        K[j] = K[j - 1] + surface.d[j].values[k];
    }
    return K;
}

} // namespace bsde::reflected
