/**
 * @file constrained.cpp
 * @brief Penalization solvers for z-interval and y ≥ φ(z) constraints.
 */

#include "bsde/constrained.hpp"
#include "bsde/errors.hpp"
#include "bsde/reflected.hpp"
#include "bsde/schemes.hpp"

#include <cmath>
#include <sstream>

namespace bsde::constrained {

namespace {

constexpr double kExplosionThreshold = 1e12;

void require_p(double p) {
    if (p < 0.0 || !std::isfinite(p))
        throw ConfigError("penalization p must be a nonnegative finite number");
}

/// Abort with a diagnostic tying the blow-up to the p√δ criterion.
void check_explosion(const lattice::LevelFunction& level, const std::string& scheme_id,
                     double p, const lattice::Lattice& lat) {
    for (double v : level.values) {
        if (!std::isfinite(v) || std::abs(v) > kExplosionThreshold) {
            std::ostringstream os;
            os.precision(6);
            os << scheme_id << " solve exploded at level " << level.level
               << " (|y| exceeded 1e12); p*sqrt(delta) = " << p * lat.sqrt_delta
               << " and stability requires p*sqrt(delta) < 1";
            throw NumericalError(os.str());
        }
    }
}

/// Shared backward induction.  `step(t, E, z)` returns (y, a_incr).
struct StepResult {
    double y = 0.0;
    double a = 0.0;
};

template <typename Step>
ConstrainedSurface induct_constrained(const problem::ProblemSpec& spec,
                                      const lattice::Lattice& lat,
                                      const std::string& scheme_id, double p, Step step) {
    ConstrainedSurface out;
    out.scheme_id = scheme_id;
    out.fingerprint = schemes::surface_fingerprint_p(spec, scheme_id, lat, p);
    out.p = p;
    out.y.resize(static_cast<std::size_t>(lat.n) + 1);
    out.z.resize(static_cast<std::size_t>(lat.n));
    out.a_incr.resize(static_cast<std::size_t>(lat.n));

    out.y[static_cast<std::size_t>(lat.n)] = lattice::terminal_level(lat, spec.terminal);
    for (int j = lat.n - 1; j >= 0; --j) {
        const lattice::LevelFunction& next = out.y[static_cast<std::size_t>(j) + 1];
        lattice::LevelFunction expectation = lattice::conditional_expectation(next);
        lattice::LevelFunction zj = lattice::martingale_coefficient(next, lat);
        const double t = lat.time(j);
        std::vector<double> yj(static_cast<std::size_t>(j) + 1);
        std::vector<double> aj(static_cast<std::size_t>(j) + 1);
        for (int k = 0; k <= j; ++k) {
            const std::size_t ki = static_cast<std::size_t>(k);
            StepResult node = step(t, expectation.values[ki], zj.values[ki]);
            yj[ki] = node.y;
            aj[ki] = node.a;
        }
        out.y[static_cast<std::size_t>(j)] = lattice::LevelFunction(j, std::move(yj));
        out.a_incr[static_cast<std::size_t>(j)] = lattice::LevelFunction(j, std::move(aj));
        out.z[static_cast<std::size_t>(j)] = std::move(zj);
        check_explosion(out.y[static_cast<std::size_t>(j)], scheme_id, p, lat);
    }
    return out;
}

} // namespace

ConstrainedSurface solve_z_constrained(const problem::ProblemSpec& spec,
                                       const lattice::Lattice& lat, double p,
                                       ZConstrainedMode mode) {
    require_p(p);
    if (!spec.constraint || !std::holds_alternative<problem::ZInterval>(*spec.constraint))
        throw ConfigError("z-constrained schemes require a z-interval constraint {a, b}");
    const problem::ZInterval gamma = std::get<problem::ZInterval>(*spec.constraint);
    const problem::Generator& g = spec.generator;
    const std::string scheme_id = mode == ZConstrainedMode::implicit_step
                                      ? "z-constrained-implicit"
                                      : "z-constrained-explicit";

    return induct_constrained(spec, lat, scheme_id, p, [&](double t, double E, double z) {
        StepResult node;
        node.a = p * problem::z_distance(gamma, z) * lat.delta;
        if (mode == ZConstrainedMode::implicit_step)
            node.y = schemes::implicit_step_solve(E + node.a, t, z, g, lat.delta);
        else
            node.y = schemes::explicit_step(g, t, E, z, lat.delta) + node.a;
        return node;
    });
}

ConstrainedSurface solve_phi_reflected(const problem::ProblemSpec& spec,
                                       const lattice::Lattice& lat, double p, PhiMode mode) {
    require_p(p);
    if (!spec.constraint || !std::holds_alternative<problem::PhiReflection>(*spec.constraint))
        throw ConfigError("phi schemes require a y >= phi(z) constraint");
    const problem::PhiReflection& gamma = std::get<problem::PhiReflection>(*spec.constraint);
    const problem::Generator& g = spec.generator;
    const std::string scheme_id =
        mode == PhiMode::implicit_step ? "phi-implicit" : "phi-explicit-implicit";

    return induct_constrained(spec, lat, scheme_id, p, [&](double t, double E, double z) {
        StepResult node;
        if (mode == PhiMode::implicit_step) {
            // Same per-node equation as the penalized barrier step with
            // the moving threshold L = φ(z).
            double threshold = gamma(z);
            reflected::NodeResult r =
                reflected::penalized_implicit_node(E, t, z, threshold, g, lat.delta, p);
            node.y = r.y;
        } else {
            double candidate = schemes::explicit_step(g, t, E, z, lat.delta);
            double weight = p * lat.delta / (1.0 + p * lat.delta);
            node.y = candidate + weight * problem::phi_distance(gamma, candidate, z);
        }
        node.a = p * problem::phi_distance(gamma, node.y, z) * lat.delta;
        return node;
    });
}

std::vector<double> accumulate_A(const ConstrainedSurface& surface,
                                 const std::vector<int>& path) {
    const std::size_t n = surface.z.size();
    if (path.size() != n)
        throw ValidationError("path length must equal the number of lattice steps");
    std::vector<double> A(n + 1);
    std::size_t k = 0;
    A[0] = surface.a_incr[0].values[0];
    for (std::size_t j = 1; j < n; ++j) {
        if (path[j - 1] > 0) ++k;
        A[j] = A[j - 1] + surface.a_incr[j].values[k];
    }
    A[n] = A[n - 1];  // no terminal increment
    return A;
}

GuardReport stability_guard(double p, const lattice::Lattice& lat) {
    GuardReport report;
    report.value = p * lat.sqrt_delta;
    if (std::abs(report.value - 1.0) <= 1e-12)
        report.status = GuardReport::Status::boundary;
    else if (report.value < 1.0)
        report.status = GuardReport::Status::ok;
    else
        report.status = GuardReport::Status::violated;
    return report;
}

} // namespace bsde::constrained
