/**
 * @file schemes.cpp
 * @brief Implicit, explicit and split backward-induction solvers.
 */

#include "bsde/schemes.hpp"
#include "bsde/errors.hpp"

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <sstream>

namespace bsde::schemes {

namespace {

constexpr int kMaxFixedPoint = 200;
constexpr int kMaxBisection = 200;
constexpr double kExplosionThreshold = 1e12;

double auto_tol(double target) { return 1e-13 * std::max(1.0, std::abs(target)); }

/// Residual of the implicit step equation F(y) = y − g(t,y,z)δ − target.
double residual(double y, double t, double z, const problem::Generator& g, double delta,
                double target) {
    return y - g(t, y, z) * delta - target;
}

/// Safeguarded bisection fallback used when the fixed point does not
/// settle (possible only for non-contractive drivers let through with a
/// warning).  Expands a bracket around the target, then bisects.
double bisection_solve(double target, double t, double z, const problem::Generator& g,
                       double delta, double tol) {
    double radius = std::max(1.0, std::abs(g(t, target, z)) * delta);
    double lo = target - radius;
    double hi = target + radius;
    double flo = residual(lo, t, z, g, delta, target);
    double fhi = residual(hi, t, z, g, delta, target);
    for (int i = 0; i < 60 && flo * fhi > 0.0; ++i) {
        radius *= 2.0;
        lo = target - radius;
        hi = target + radius;
        flo = residual(lo, t, z, g, delta, target);
        fhi = residual(hi, t, z, g, delta, target);
    }
    if (flo * fhi > 0.0)
        throw NumericalError("implicit step: no sign change found for the bisection fallback");
    for (int i = 0; i < kMaxBisection; ++i) {
        double mid = 0.5 * (lo + hi);
        double fmid = residual(mid, t, z, g, delta, target);
        if (std::abs(fmid) <= tol || 0.5 * (hi - lo) <= tol) return mid;
        if ((fmid < 0.0) == (flo < 0.0)) {
            lo = mid;
            flo = fmid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

} // namespace

double implicit_step_solve(double target, double t, double z, const problem::Generator& g,
                           double delta, double tol) {
    if (tol <= 0.0) tol = auto_tol(target);

    if (const problem::Linear* lin = g.as_linear()) {
        double denom = 1.0 - lin->b * delta;
        if (denom == 0.0)
            throw NumericalError("implicit step: singular linear solve (b*delta = 1)");
        return (target + (lin->c * z + lin->r) * delta) / denom;
    }

    double y = target;
    for (int i = 0; i < kMaxFixedPoint; ++i) {
        double next = target + g(t, y, z) * delta;
        if (!std::isfinite(next)) break;
        if (std::abs(next - y) <= tol) return next;
        y = next;
    }
    return bisection_solve(target, t, z, g, delta, tol);
}

double explicit_step(const problem::Generator& g, double t, double target, double z,
                     double delta) {
    double predictor = target - g(t, target, z) * delta;
    return target + g(t, predictor, z) * delta;
}

void check_level_finite(const lattice::LevelFunction& level, const std::string& scheme_id) {
    for (double v : level.values) {
        if (!std::isfinite(v) || std::abs(v) > kExplosionThreshold) {
            std::ostringstream os;
            os << scheme_id << " solve produced " << v << " at level " << level.level
               << "; solution exploded";
            throw NumericalError(os.str());
        }
    }
}

namespace {

/// Common backward-induction shell: computes (E, z) per node and calls
/// `step` to produce y.  `step(t, E, z, k)` returns the node value.
template <typename Step>
SolutionSurface induct(const problem::ProblemSpec& spec, const lattice::Lattice& lat,
                       const std::string& scheme_id, Step step) {
    SolutionSurface out;
    out.scheme_id = scheme_id;
    out.fingerprint = surface_fingerprint(spec, scheme_id, lat);
    out.y.resize(static_cast<std::size_t>(lat.n) + 1);
    out.z.resize(static_cast<std::size_t>(lat.n));

    out.y[static_cast<std::size_t>(lat.n)] = lattice::terminal_level(lat, spec.terminal);
    for (int j = lat.n - 1; j >= 0; --j) {
        const lattice::LevelFunction& next = out.y[static_cast<std::size_t>(j) + 1];
        lattice::LevelFunction expectation = lattice::conditional_expectation(next);
        lattice::LevelFunction zj = lattice::martingale_coefficient(next, lat);
        const double t = lat.time(j);
        std::vector<double> yj(static_cast<std::size_t>(j) + 1);
        for (int k = 0; k <= j; ++k) {
            const std::size_t ki = static_cast<std::size_t>(k);
            yj[ki] = step(t, expectation.values[ki], zj.values[ki], k);
        }
        out.y[static_cast<std::size_t>(j)] = lattice::LevelFunction(j, std::move(yj));
        out.z[static_cast<std::size_t>(j)] = std::move(zj);
        check_level_finite(out.y[static_cast<std::size_t>(j)], scheme_id);
    }
    return out;
}

} // namespace

SolutionSurface solve_implicit(const problem::ProblemSpec& spec, const lattice::Lattice& lat) {
    const problem::Generator& g = spec.generator;
    return induct(spec, lat, "implicit", [&](double t, double E, double z, int) {
        return implicit_step_solve(E, t, z, g, lat.delta);
    });
}

SolutionSurface solve_explicit(const problem::ProblemSpec& spec, const lattice::Lattice& lat) {
    const problem::Generator& g = spec.generator;
    return induct(spec, lat, "explicit", [&](double t, double E, double z, int) {
        return explicit_step(g, t, E, z, lat.delta);
    });
}

SolutionSurface solve_split(const problem::ProblemSpec& spec, const lattice::Lattice& lat) {
    if (!spec.generator.is_split())
        throw ConfigError("split scheme requires a split-pair driver (g1, g2)");
    const problem::Generator& g1 = spec.generator.g1();
    const problem::Generator& g2 = spec.generator.g2();
    return induct(spec, lat, "split", [&](double t, double E, double z, int) {
        // g₂ contributes in predictor form so that a vanishing g₁
        // reproduces the explicit scheme bit for bit.
        double predictor = E - g2(t, E, z) * lat.delta;
        double target = E + g2(t, predictor, z) * lat.delta;
        return implicit_step_solve(target, t, z, g1, lat.delta);
    });
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t hash = 1469598103934665603ull;
    for (unsigned char c : text) {
        hash ^= c;
        hash *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
    return buf;
}

std::string surface_fingerprint(const problem::ProblemSpec& spec, const std::string& scheme_id,
                                const lattice::Lattice& lat) {
    std::ostringstream os;
    os << spec.describe() << "|scheme=" << scheme_id << "|n=" << lat.n;
    return fnv1a_hex(os.str());
}

std::string surface_fingerprint_p(const problem::ProblemSpec& spec, const std::string& scheme_id,
                                  const lattice::Lattice& lat, double p) {
    std::ostringstream os;
    os << spec.describe() << "|scheme=" << scheme_id << "|n=" << lat.n << "|p=";
    os.precision(17);
    os << p;
    return fnv1a_hex(os.str());
}

} // namespace bsde::schemes
