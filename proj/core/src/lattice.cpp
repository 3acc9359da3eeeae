/**
 * @file lattice.cpp
 * @brief Lattice construction and the per-level primitives.
 */

#include "bsde/lattice.hpp"
#include "bsde/errors.hpp"

#include <cmath>
#include <sstream>

namespace bsde::lattice {

Lattice::Lattice(int n_steps, double horizon) : n(n_steps), T(horizon) {
    if (n_steps <= 0) throw ValidationError("lattice requires a positive number of steps");
    if (!(horizon > 0.0) || !std::isfinite(horizon))
        throw ValidationError("lattice requires a positive finite horizon T");
    delta = T / n;
    sqrt_delta = std::sqrt(delta);
}

LevelFunction::LevelFunction(int j, std::vector<double> v) : level(j), values(std::move(v)) {
    if (level < 0) throw ValidationError("level index must be nonnegative");
    if (values.size() != static_cast<std::size_t>(level) + 1) {
        std::ostringstream os;
        os << "level " << level << " needs " << level + 1 << " values, got " << values.size();
        throw ValidationError(os.str());
    }
}

double node_coordinate(const Lattice& lat, int j, int k) {
    if (j < 0 || j > lat.n || k < 0 || k > j) {
        std::ostringstream os;
        os << "node (j=" << j << ", k=" << k << ") out of range for n=" << lat.n;
        throw ValidationError(os.str());
    }
    return (2.0 * k - j) * lat.sqrt_delta;
}

LevelFunction conditional_expectation(const LevelFunction& next) {
    if (next.level < 1)
        throw ValidationError("conditional expectation needs a level of at least 1");
    std::vector<double> out(static_cast<std::size_t>(next.level));
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = 0.5 * (next.values[k + 1] + next.values[k]);
    return LevelFunction(next.level - 1, std::move(out));
}

LevelFunction martingale_coefficient(const LevelFunction& next, const Lattice& lat) {
    if (next.level < 1)
        throw ValidationError("martingale coefficient needs a level of at least 1");
    const double half_mesh = 2.0 * lat.sqrt_delta;
    std::vector<double> out(static_cast<std::size_t>(next.level));
    for (std::size_t k = 0; k < out.size(); ++k)
        out[k] = (next.values[k + 1] - next.values[k]) / half_mesh;
    return LevelFunction(next.level - 1, std::move(out));
}

LevelFunction terminal_level(const Lattice& lat, const expr::Expression& phi) {
    std::vector<double> out(static_cast<std::size_t>(lat.n) + 1);
    expr::Env env;
    for (int k = 0; k <= lat.n; ++k) {
        env.x = node_coordinate(lat, lat.n, k);
        out[static_cast<std::size_t>(k)] = phi(env);
    }
    return LevelFunction(lat.n, std::move(out));
}

double root_expectation(const Lattice& lat, const LevelFunction& terminal) {
    if (terminal.level != lat.n)
        throw ValidationError("root expectation needs a terminal-level function");
    LevelFunction cur = terminal;
    while (cur.level > 0) cur = conditional_expectation(cur);
    return cur.values[0];
}

} // namespace bsde::lattice
