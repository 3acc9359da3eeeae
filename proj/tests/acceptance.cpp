/**
 * @file acceptance.cpp
 * @brief Acceptance gate: every published reference result, one line each.
 *
 * Runs the ten acceptance criteria at their stated tolerances and prints
 * exactly one PASS/FAIL line per criterion with the measured values that
 * matter.  The process exit code is the number of failed criteria, so
 * `./acceptance && echo ok` is the whole gate.
 *
 * Reference problems:
 *   example 3:  g = y + z + 1,  ξ = sin|B₁|      (linear preset)
 *   example 4:  g = y + z,      ξ = |B₁|         (linear preset)
 *   example 5:  g = z²/2,       ξ = sin|B₁|      (quadratic preset)
 *   barrier:    g = −|y+z|, ξ = 2sin(B₁), L = sin(B_t + π/2) − 2
 *   z-interval: g = −2|y+z| − 1, ξ = |B₁|, z ∈ [−0.5, 0.8]
 *   phi:        g = −2|y+z| − 1, ξ = |B₁|, y ≥ 1.25·z
 */

#include "bsde/constrained.hpp"
#include "bsde/errors.hpp"
#include "bsde/expr.hpp"
#include "bsde/lattice.hpp"
#include "bsde/oracle.hpp"
#include "bsde/problem.hpp"
#include "bsde/reflected.hpp"
#include "bsde/runner.hpp"
#include "bsde/schemes.hpp"

#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

using namespace bsde;

namespace {

// ------------------------------------------------------------ utilities

struct Result {
    bool pass = true;
    std::string detail;
};

std::string num(double v, const char* fmt = "%.6f") {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

std::string sci(double v) { return num(v, "%.2e"); }

/// Accumulates per-entry deviations for one table comparison.
struct TableCheck {
    double tolerance;
    double max_dev = 0.0;
    int total = 0;
    std::vector<std::string> failures;

    explicit TableCheck(double tol) : tolerance(tol) {}

    void entry(const std::string& label, double computed, double expected) {
        ++total;
        const double dev = std::abs(computed - expected);
        max_dev = std::max(max_dev, dev);
        if (dev > tolerance)
            failures.push_back(label + " computed " + num(computed) + " vs " + num(expected, "%.4f") +
                               " (diff " + sci(dev) + ")");
    }

    bool pass() const { return failures.empty(); }

    std::string summary(const std::string& what) const {
        std::string out = what + ": " + std::to_string(total - (int)failures.size()) + "/" +
                          std::to_string(total) + " entries within +-" + sci(tolerance) +
                          " (max dev " + sci(max_dev) + ")";
        for (const auto& f : failures) out += "; " + f;
        return out;
    }
};

// ------------------------------------------------------- problem corpus

expr::Expression over(const std::string& text, const std::string& vars) {
    return expr::parse(text, expr::VarSet::of(vars));
}

problem::ProblemSpec example3() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::linear(1.0, 1.0, 1.0);
    spec.terminal = over("sin(abs(x))", "x");
    return spec;
}

problem::ProblemSpec example4() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::linear(1.0, 1.0, 0.0);
    spec.terminal = over("abs(x)", "x");
    return spec;
}

problem::ProblemSpec example5() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::quadratic_z();
    spec.terminal = over("sin(abs(x))", "x");
    return spec;
}

problem::ProblemSpec barrier_problem() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::from_expression(over("-1*abs(y + z)", "tyz"), 1.0);
    spec.terminal = over("2*sin(x)", "x");
    spec.barrier = problem::Barrier{over("sin(x + 1.5707963267948966) - 2", "tx")};
    return spec;
}

problem::ProblemSpec z_interval_problem() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::from_expression(over("-2*abs(y + z) - 1", "tyz"), 2.0);
    spec.terminal = over("abs(x)", "x");
    spec.constraint = problem::Constraint{problem::ZInterval(-0.5, 0.8)};
    return spec;
}

problem::ProblemSpec phi_problem() {
    problem::ProblemSpec spec;
    spec.generator = problem::Generator::from_expression(over("-2*abs(y + z) - 1", "tyz"), 2.0);
    spec.terminal = over("abs(x)", "x");
    spec.constraint = problem::Constraint{problem::PhiReflection{over("1.25*z", "z")}};
    return spec;
}

/// Root cache so table criteria and cross-checks share solves.
class Context {
public:
    double root(const std::string& key, const problem::ProblemSpec& spec,
                const std::string& scheme_id, int n) {
        const auto id = std::make_pair(key + "/" + scheme_id, n);
        auto it = roots_.find(id);
        if (it != roots_.end()) return it->second;
        const lattice::Lattice lat(n, spec.T);
        double value = 0.0;
        if (scheme_id == "implicit")
            value = schemes::solve_implicit(spec, lat).root();
        else if (scheme_id == "explicit")
            value = schemes::solve_explicit(spec, lat).root();
        else
            throw ConfigError("unexpected cached scheme " + scheme_id);
        roots_.emplace(id, value);
        return value;
    }

private:
    std::map<std::pair<std::string, int>, double> roots_;
};

// ------------------------------------------------------------- criteria

Result criterion1(Context& ctx) {
    // Implicit sweep on example 3 against the published table.
    const std::vector<std::pair<int, double>> table = {
        {100, 3.5106}, {500, 3.4916}, {1000, 3.4879}, {2000, 3.4866}, {5000, 3.4859}};
    TableCheck check(5e-4);
    for (const auto& [n, expected] : table)
        check.entry("n=" + std::to_string(n), ctx.root("ex3", example3(), "implicit", n),
                    expected);
    Result r{check.pass(), check.summary("example-3 implicit table")};
    if (!r.pass) {
        // The n=500 entry does not match any tolerance we can reach: the
        // computed value is stable under refinement, and the table value
        // is reproduced exactly at n=400 instead.
        const lattice::Lattice lat400(400, 1.0);
        const double at400 = schemes::solve_implicit(example3(), lat400).root();
        r.detail += "; note: the 3.4916 entry matches n=400 (computed " + num(at400) + ")";
    }
    return r;
}

Result criterion2(Context& ctx) {
    const std::vector<std::pair<int, double>> table = {
        {100, 3.4171}, {500, 3.4716}, {1000, 3.4785}, {2000, 3.4819}, {5000, 3.4840}};
    TableCheck check(5e-4);
    for (const auto& [n, expected] : table)
        check.entry("n=" + std::to_string(n), ctx.root("ex3", example3(), "explicit", n),
                    expected);
    return {check.pass(), check.summary("example-3 explicit table")};
}

Result criterion3(Context& ctx) {
    const std::vector<std::pair<int, double>> implicit_table = {
        {100, 3.1806}, {500, 3.1731}, {1000, 3.1722}, {2000, 3.1719}, {5000, 3.1714}};
    const std::vector<std::pair<int, double>> explicit_table = {
        {100, 3.0818}, {500, 3.1531}, {1000, 3.1621}, {2000, 3.1667}, {5000, 3.1694}};
    TableCheck check(5e-4);
    for (const auto& [n, expected] : implicit_table)
        check.entry("implicit n=" + std::to_string(n),
                    ctx.root("ex4", example4(), "implicit", n), expected);
    for (const auto& [n, expected] : explicit_table)
        check.entry("explicit n=" + std::to_string(n),
                    ctx.root("ex4", example4(), "explicit", n), expected);
    return {check.pass(), check.summary("example-4 tables")};
}

Result criterion4(Context& ctx) {
    const std::vector<std::pair<int, double>> table = {
        {100, 0.6249}, {400, 0.6253}, {800, 0.6254}, {1000, 0.6254}, {2000, 0.6255}};
    TableCheck check(5e-4);
    for (const auto& [n, expected] : table)
        check.entry("n=" + std::to_string(n), ctx.root("ex5", example5(), "implicit", n),
                    expected);

    // The driver is independent of y, so implicit and explicit coincide.
    const lattice::Lattice lat(400, 1.0);
    const auto implicit_surface = schemes::solve_implicit(example5(), lat);
    const auto explicit_surface = schemes::solve_explicit(example5(), lat);
    bool identical = true;
    for (std::size_t j = 0; j < implicit_surface.y.size() && identical; ++j)
        for (std::size_t k = 0; k < implicit_surface.y[j].values.size(); ++k)
            if (implicit_surface.y[j].values[k] != explicit_surface.y[j].values[k]) {
                identical = false;
                break;
            }
    Result r{check.pass() && identical, check.summary("example-5 table")};
    r.detail += identical ? "; implicit == explicit surfaces bit-exactly"
                          : "; implicit and explicit surfaces DIFFER";
    return r;
}

Result criterion5(Context& ctx) {
    const double oracle3 = oracle::closed_form_linear(1.0, 1.0, 1.0, over("sin(abs(x))", "x"), 1.0).value;
    const double oracle4 = oracle::closed_form_linear(1.0, 1.0, 0.0, over("abs(x)", "x"), 1.0).value;
    const double oracle5 = oracle::closed_form_quadratic(over("sin(abs(x))", "x"), 1.0).value;

    TableCheck against_mc(2e-3);
    against_mc.entry("linear(1,1,1) oracle", oracle3, 3.4850);
    against_mc.entry("linear(1,1,0) oracle", oracle4, 3.1710);
    TableCheck quad_mc(5e-4);
    quad_mc.entry("quadratic oracle", oracle5, 0.6255);

    const double gap3 = std::abs(ctx.root("ex3", example3(), "implicit", 5000) - oracle3);
    const double gap4 = std::abs(ctx.root("ex4", example4(), "implicit", 5000) - oracle4);
    const double gap5 = std::abs(ctx.root("ex5", example5(), "implicit", 5000) - oracle5);
    const bool gaps_ok = gap3 <= 5e-3 && gap4 <= 5e-3 && gap5 <= 5e-3;

    Result r;
    r.pass = against_mc.pass() && quad_mc.pass() && gaps_ok;
    r.detail = "oracles " + num(oracle3) + "/" + num(oracle4) + "/" + num(oracle5) +
               " vs 3.4850/3.1710/0.6255; lattice(5000) gaps " + sci(gap3) + "/" + sci(gap4) +
               "/" + sci(gap5) + " (<= 5e-3)";
    if (!against_mc.pass() || !quad_mc.pass()) r.detail += "; oracle outside tolerance";
    if (!gaps_ok) r.detail += "; lattice-vs-oracle gap too large";
    return r;
}

Result criterion6(Context&) {
    const auto spec = barrier_problem();
    TableCheck check(5e-4);
    const std::vector<std::pair<int, double>> reflected_table = {
        {400, -0.6430}, {1000, -0.6425}, {2000, -0.6424}};
    for (const auto& [n, expected] : reflected_table) {
        const lattice::Lattice lat(n, spec.T);
        check.entry("reflected n=" + std::to_string(n),
                    reflected::solve_reflected_explicit(spec, lat).root(), expected);
    }

    const std::vector<double> ps = {20.0, 200.0, 2000.0, 20000.0};
    const std::map<int, std::vector<double>> penalized_table = {
        {400, {-0.6553, -0.6444, -0.6431, -0.6430}},
        {1000, {-0.6550, -0.6441, -0.6427, -0.6425}},
        {2000, {-0.6549, -0.6439, -0.6426, -0.6424}}};
    for (const auto& [n, row] : penalized_table) {
        const lattice::Lattice lat(n, spec.T);
        for (std::size_t i = 0; i < ps.size(); ++i)
            check.entry("penalized n=" + std::to_string(n) + " p=" + num(ps[i], "%.0f"),
                        reflected::solve_penalized_explicit_implicit(spec, lat, ps[i]).root(),
                        row[i]);
    }
    return {check.pass(), check.summary("barrier tables (3 reflected + 12 penalized entries)")};
}

Result criterion7(Context&) {
    // Corpus covering every scheme id; lattice vs full path tree.
    struct Entry {
        std::string label;
        problem::ProblemSpec spec;
        std::string scheme;
    };
    std::vector<Entry> corpus;
    corpus.push_back({"ex3/implicit", example3(), "implicit"});
    corpus.push_back({"ex3/explicit", example3(), "explicit"});
    corpus.push_back({"ex5/implicit", example5(), "implicit"});

    problem::ProblemSpec steep;
    steep.generator = problem::Generator::from_expression(over("-5*abs(y + z)", "tyz"), 5.0);
    steep.terminal = over("sin(abs(x))", "x");
    corpus.push_back({"steep/implicit", steep, "implicit"});

    problem::ProblemSpec rates;
    rates.generator = problem::Generator::two_rates(0.01, 0.06, 0.2);
    rates.terminal = over("abs(x)", "x");
    corpus.push_back({"two-rates/implicit", rates, "implicit"});

    problem::ProblemSpec split_spec;
    split_spec.generator = problem::Generator::split(
        problem::Generator::linear(1.0, 0.0, 1.0),
        problem::Generator::from_expression(over("0 - abs(z)", "tyz"), 1.0));
    split_spec.terminal = over("sin(abs(x))", "x");
    corpus.push_back({"split/split", split_spec, "split"});

    corpus.push_back({"barrier/reflected-implicit", barrier_problem(), "reflected-implicit"});
    corpus.push_back({"barrier/reflected-explicit", barrier_problem(), "reflected-explicit"});
    auto barrier_p = barrier_problem();
    barrier_p.p = 5.0;
    corpus.push_back({"barrier/penalized-implicit", barrier_p, "penalized-implicit"});
    corpus.push_back(
        {"barrier/penalized-explicit-implicit", barrier_p, "penalized-explicit-implicit"});

    auto zcon = z_interval_problem();
    zcon.p = 5.0;
    corpus.push_back({"z-interval/z-constrained-implicit", zcon, "z-constrained-implicit"});
    corpus.push_back({"z-interval/z-constrained-explicit", zcon, "z-constrained-explicit"});

    auto phi = phi_problem();
    phi.p = 5.0;
    corpus.push_back({"phi/phi-implicit", phi, "phi-implicit"});
    corpus.push_back({"phi/phi-explicit-implicit", phi, "phi-explicit-implicit"});

    int checked = 0;
    double max_gap = 0.0;
    std::vector<std::string> failures;
    for (const Entry& entry : corpus) {
        for (int n : {6, 10, 12}) {
            const lattice::Lattice lat(n, entry.spec.T);
            const double lattice_root =
                cli::solved_root(cli::dispatch_solve(entry.spec, lat, entry.scheme));
            const double tree_root =
                oracle::solve_full_path_tree(entry.spec, entry.scheme, n).root();
            const double gap = std::abs(lattice_root - tree_root);
            max_gap = std::max(max_gap, gap);
            ++checked;
            if (!(gap <= 1e-12))
                failures.push_back(entry.label + " n=" + std::to_string(n) + " gap " + sci(gap));
        }
    }
    Result r;
    r.pass = failures.empty();
    r.detail = "lattice == path tree on " + std::to_string(checked) + " solves (" +
               std::to_string(corpus.size()) + " specs, all 11 schemes; max gap " + sci(max_gap) +
               " <= 1e-12)";
    for (const auto& f : failures) r.detail += "; " + f;
    return r;
}

Result criterion8(Context& ctx) {
    // Squared implicit/explicit root gap should shrink ~4x per doubling.
    const std::vector<int> ns = {250, 500, 1000, 2000};
    std::vector<double> gaps;
    for (int n : ns) {
        const double gap = ctx.root("ex3", example3(), "implicit", n) -
                           ctx.root("ex3", example3(), "explicit", n);
        gaps.push_back(gap * gap);
    }
    Result r;
    r.detail = "mean-square implicit/explicit gap ratios";
    for (std::size_t i = 0; i + 1 < gaps.size(); ++i) {
        const double ratio = gaps[i] / gaps[i + 1];
        r.detail += " " + num(ratio, "%.2f");
        if (!(ratio >= 2.5 && ratio <= 6.0)) r.pass = false;
    }
    r.detail += " (each must lie in [2.5, 6])";
    return r;
}

Result criterion9(Context&) {
    std::vector<std::string> failures;
    auto require = [&failures](bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
    };

    // (a) reconstruction identity: recomputing (E, z) from the stored y
    // levels reproduces the stored z within a few ulps.
    {
        const lattice::Lattice lat(64, 1.0);
        const auto surface = schemes::solve_implicit(example3(), lat);
        const double sqrt_delta = std::sqrt(lat.delta);
        double worst = 0.0;
        for (int j = 0; j < 64; ++j)
            for (int k = 0; k <= j; ++k) {
                const double up = surface.y[j + 1].values[k + 1];
                const double down = surface.y[j + 1].values[k];
                const double z = (up - down) / (2.0 * sqrt_delta);
                const double scale = std::max({1.0, std::abs(up), std::abs(down)});
                worst = std::max(worst, std::abs(z - surface.z[j].values[k]) / scale);
            }
        require(worst <= 4.0 * std::numeric_limits<double>::epsilon(),
                "reconstruction dev " + sci(worst));
    }

    // (b) barrier dominance + complementarity, both reflected schemes.
    {
        const auto spec = barrier_problem();
        const lattice::Lattice lat(200, spec.T);
        for (const bool implicit_mode : {true, false}) {
            const auto surface = implicit_mode ? reflected::solve_reflected_implicit(spec, lat)
                                               : reflected::solve_reflected_explicit(spec, lat);
            for (int j = 0; j <= 200; ++j)
                for (int k = 0; k <= j; ++k) {
                    const double x = lattice::node_coordinate(lat, j, k);
                    const double L = (*spec.barrier)(lat.delta * j, x);
                    const double y = surface.y[j].values[k];
                    const double d = surface.d[j].values[k];
                    const double tol = 1e-10 * (1.0 + std::abs(y) + std::abs(L));
                    require(y >= L - tol, "dominance violated");
                    require(d >= -tol, "negative d");
                    require((y - L) * d <= tol, "complementarity violated");
                }
        }
    }

    // (c) K and A nondecreasing along sampled paths.
    {
        const auto spec = barrier_problem();
        const lattice::Lattice lat(100, spec.T);
        const auto surface = reflected::solve_reflected_implicit(spec, lat);
        std::mt19937_64 rng(11);
        for (int path = 0; path < 200; ++path) {
            const auto signs = oracle::sample_signs(rng, 100);
            const auto K = reflected::accumulate_K(surface, signs);
            for (std::size_t j = 1; j < K.size(); ++j)
                require(K[j] >= K[j - 1] - 1e-15, "K decreases");
            require(K.front() >= -1e-15, "K starts negative");
        }

        auto zcon = z_interval_problem();
        const auto zsurface = constrained::solve_z_constrained(
            zcon, lat, 5.0, constrained::ZConstrainedMode::implicit_step);
        for (int path = 0; path < 200; ++path) {
            const auto signs = oracle::sample_signs(rng, 100);
            const auto A = constrained::accumulate_A(zsurface, signs);
            for (std::size_t j = 1; j < A.size(); ++j)
                require(A[j] >= A[j - 1] - 1e-15, "A decreases");
            require(A[100] == A[99], "A has a terminal increment");
        }
    }

    // (d) p-monotonicity of penalized roots.
    {
        const auto spec = barrier_problem();
        const lattice::Lattice lat(400, spec.T);
        double previous = -1e300;
        for (double p : {20.0, 200.0, 2000.0, 20000.0}) {
            const double root = reflected::solve_penalized_explicit_implicit(spec, lat, p).root();
            require(root >= previous - 1e-12, "penalized roots not monotone in p");
            previous = root;
        }
        previous = -1e300;
        for (double p : {1.0, 5.0, 10.0}) {
            const double root =
                constrained::solve_z_constrained(z_interval_problem(), lat, p,
                                                 constrained::ZConstrainedMode::implicit_step)
                    .root();
            require(root >= previous - 1e-12, "constrained roots not monotone in p");
            previous = root;
        }
    }

    // (e) p = 0 / inactive-constraint reductions, bit-identical.
    {
        const lattice::Lattice lat(48, 1.0);
        auto unconstrained = z_interval_problem();
        unconstrained.constraint.reset();
        const auto plain = schemes::solve_implicit(unconstrained, lat);
        const auto reduced = constrained::solve_z_constrained(
            z_interval_problem(), lat, 0.0, constrained::ZConstrainedMode::implicit_step);
        bool same = true;
        for (std::size_t j = 0; j < plain.y.size(); ++j)
            for (std::size_t k = 0; k < plain.y[j].values.size(); ++k)
                if (plain.y[j].values[k] != reduced.y[j].values[k]) same = false;
        require(same, "p=0 reduction differs from the unconstrained solve");

        auto wide = z_interval_problem();
        wide.constraint = problem::Constraint{problem::ZInterval(-1000.0, 1000.0)};
        const auto inactive = constrained::solve_z_constrained(
            wide, lat, 20.0, constrained::ZConstrainedMode::implicit_step);
        same = true;
        for (std::size_t j = 0; j < plain.y.size(); ++j)
            for (std::size_t k = 0; k < plain.y[j].values.size(); ++k)
                if (plain.y[j].values[k] != inactive.y[j].values[k]) same = false;
        require(same, "inactive-constraint solve differs from the unconstrained solve");
    }

    // (f) stability guard statuses on the three reference inputs.
    {
        const lattice::Lattice lat(400, 1.0);
        using Status = constrained::GuardReport::Status;
        require(constrained::stability_guard(10.0, lat).status == Status::ok,
                "guard(10, n=400) should be ok");
        require(constrained::stability_guard(20.0, lat).status == Status::boundary,
                "guard(20, n=400) should be boundary");
        require(constrained::stability_guard(100.0, lat).status == Status::violated,
                "guard(100, n=400) should be violated");
    }

    Result r;
    r.pass = failures.empty();
    if (r.pass) {
        r.detail =
            "reconstruction, dominance/complementarity, K/A monotone, p-monotonicity, "
            "p=0/inactive reductions bit-identical, stability guard statuses";
    } else {
        r.detail = "structural invariants failed:";
        std::vector<std::string> unique;
        for (const auto& f : failures)
            if (unique.empty() || unique.back() != f) unique.push_back(f);
        for (std::size_t i = 0; i < unique.size() && i < 6; ++i) r.detail += " " + unique[i] + ";";
    }
    return r;
}

Result criterion10(Context&) {
    Result r;
    const lattice::Lattice lat(400, 1.0);

    constrained::ConstrainedSurface zrun, phirun;
    try {
        zrun = constrained::solve_z_constrained(z_interval_problem(), lat, 20.0,
                                                constrained::ZConstrainedMode::implicit_step);
        phirun = constrained::solve_phi_reflected(phi_problem(), lat, 10.0,
                                                  constrained::PhiMode::implicit_step);
    } catch (const Error& e) {
        r.pass = false;
        r.detail = std::string("default constrained runs failed: ") + e.what();
        return r;
    }

    const problem::ZInterval gamma(-0.5, 0.8);
    const problem::PhiReflection reflection{over("1.25*z", "z")};

    std::mt19937_64 rng(2026);
    long long z_active = 0, phi_active = 0, visited = 0;
    std::vector<std::string> failures;
    for (int path = 0; path < 1000; ++path) {
        const auto signs = oracle::sample_signs(rng, 400);
        int k = 0;
        for (int j = 0; j < 400; ++j) {
            const bool za = zrun.a_incr[j].values[k] > 0.0;
            const bool zshould = problem::z_distance(gamma, zrun.z[j].values[k]) > 0.0;
            if (za != zshould) failures.push_back("z-activity mismatch at a node");
            z_active += za;

            const bool pa = phirun.a_incr[j].values[k] > 0.0;
            const bool pshould =
                problem::phi_distance(reflection, phirun.y[j].values[k],
                                      phirun.z[j].values[k]) > 0.0;
            if (pa != pshould) failures.push_back("phi-activity mismatch at a node");
            phi_active += pa;

            ++visited;
            if (signs[j] > 0) ++k;
        }
    }

    r.pass = failures.empty() && z_active > 0 && phi_active > 0;
    r.detail = "defaults (p=20, n=400) and (p=10, n=400) completed; on 1000 paths A increases "
               "exactly where z is outside [-0.5, 0.8] (" +
               std::to_string(z_active) + "/" + std::to_string(visited) +
               " steps) resp. where y < phi(z) (" + std::to_string(phi_active) + "/" +
               std::to_string(visited) + " steps)";
    if (!failures.empty()) r.detail += "; " + failures.front();
    if (z_active == 0 || phi_active == 0) r.detail += "; no activity observed (vacuous pattern)";
    return r;
}

} // namespace

int main() {
    Context ctx;
    const std::vector<std::function<Result(Context&)>> criteria = {
        criterion1, criterion2, criterion3, criterion4, criterion5,
        criterion6, criterion7, criterion8, criterion9, criterion10};

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Result result;
        try {
            result = criteria[i](ctx);
        } catch (const std::exception& e) {
            result.pass = false;
            result.detail = std::string("unexpected exception: ") + e.what();
        }
        std::printf("%s criterion %zu: %s\n", result.pass ? "PASS" : "FAIL", i + 1,
                    result.detail.c_str());
        std::fflush(stdout);
        if (!result.pass) ++failures;
    }
    std::printf("%d of %zu criteria failed\n", failures, criteria.size());
    return failures;
}
