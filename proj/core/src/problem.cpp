/**
 * @file problem.cpp
 * @brief Generator evaluation, scheme classification and validation.
 */

#include "bsde/problem.hpp"
#include "bsde/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

namespace bsde::problem {

namespace {

/// Uniform double in [0, 1) from one generator word; implementation-
/// independent so estimates are reproducible across platforms.
double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double uniform(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

std::string format_param(double v) {
    std::ostringstream os;
    os.precision(17);
    os << v;
    return os.str();
}

} // namespace

// ------------------------------------------------------------ Generator

Generator::Generator() : body_(Linear{}), mu_(0.0), mu_source_(MuSource::preset) {}

Generator::Generator(Body body, double mu, MuSource source)
    : body_(std::move(body)), mu_(mu), mu_source_(source) {}

Generator Generator::linear(double b, double c, double r) {
    return Generator(Linear{b, c, r}, std::max(std::abs(b), std::abs(c)), MuSource::preset);
}

Generator Generator::two_rates(double r, double R, double sigma_theta) {
    if (R < r) throw ConfigError("two-rates driver requires R >= r");
    // Union bound: |∂g/∂y| ≤ max(r, .) and the (y−z)⁻ term adds R−r to
    // both partials.
    double mu = std::max(r, std::abs(sigma_theta)) + (R - r);
    return Generator(TwoRates{r, R, sigma_theta}, mu, MuSource::preset);
}

Generator Generator::quadratic_z() {
    // z²/2 has no global Lipschitz constant; validation warns and the
    // nominal value only feeds the step-size report.
    return Generator(QuadraticZ{}, 1.0, MuSource::nominal);
}

Generator Generator::from_expression(expr::Expression body, double mu, MuSource source) {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ConfigError("expression driver requires a positive Lipschitz constant mu");
    return Generator(ExprBody{std::move(body)}, mu, source);
}

Generator Generator::from_expression(expr::Expression body) {
    Generator g(ExprBody{std::move(body)}, 1.0, MuSource::estimated);
    double mu = lipschitz_estimate(g, SampleBox{});
    g.mu_ = std::max(mu, 1e-12);
    return g;
}

Generator Generator::split(Generator g1, Generator g2) {
    if (g1.is_split() || g2.is_split())
        throw ConfigError("split drivers cannot nest");
    double mu = g1.mu() + g2.mu();
    SplitPair pair{std::make_shared<Generator>(std::move(g1)),
                   std::make_shared<Generator>(std::move(g2))};
    return Generator(std::move(pair), mu, MuSource::preset);
}

double Generator::operator()(double t, double y, double z) const {
    struct Eval {
        double t, y, z;
        double operator()(const Linear& g) const { return g.b * y + g.c * z + g.r; }
        double operator()(const TwoRates& g) const {
            return g.r * y + g.sigma_theta * z + (g.R - g.r) * std::max(z - y, 0.0);
        }
        double operator()(const QuadraticZ&) const { return 0.5 * z * z; }
        double operator()(const ExprBody& g) const {
            expr::Env env;
            env.t = t;
            env.y = y;
            env.z = z;
            return g.body(env);
        }
        double operator()(const SplitPair& g) const {
            return (*g.g1)(t, y, z) + (*g.g2)(t, y, z);
        }
    };
    return std::visit(Eval{t, y, z}, body_);
}

Generator Generator::with_mu(double mu, MuSource source) const {
    if (!(mu > 0.0) || !std::isfinite(mu))
        throw ConfigError("replacement Lipschitz constant must be positive");
    Generator copy = *this;
    copy.mu_ = mu;
    copy.mu_source_ = source;
    return copy;
}

const Linear* Generator::as_linear() const { return std::get_if<Linear>(&body_); }

bool Generator::is_quadratic_z() const { return std::holds_alternative<QuadraticZ>(body_); }

bool Generator::is_split() const { return std::holds_alternative<SplitPair>(body_); }

const Generator& Generator::g1() const {
    const auto* pair = std::get_if<SplitPair>(&body_);
    if (pair == nullptr) throw ConfigError("driver is not a split pair");
    return *pair->g1;
}

const Generator& Generator::g2() const {
    const auto* pair = std::get_if<SplitPair>(&body_);
    if (pair == nullptr) throw ConfigError("driver is not a split pair");
    return *pair->g2;
}

std::string Generator::describe() const {
    struct Describe {
        std::string operator()(const Linear& g) const {
            return "linear(b=" + format_param(g.b) + ",c=" + format_param(g.c) +
                   ",r=" + format_param(g.r) + ")";
        }
        std::string operator()(const TwoRates& g) const {
            return "two-rates(r=" + format_param(g.r) + ",R=" + format_param(g.R) +
                   ",sigma_theta=" + format_param(g.sigma_theta) + ")";
        }
        std::string operator()(const QuadraticZ&) const { return "quadratic-z"; }
        std::string operator()(const ExprBody& g) const { return "expr(" + g.body.text() + ")"; }
        std::string operator()(const SplitPair& g) const {
            return "split(" + g.g1->describe() + "; " + g.g2->describe() + ")";
        }
    };
    return std::visit(Describe{}, body_) + "[mu=" + format_param(mu_) + "]";
}

// --------------------------------------------- barrier and constraints

double Barrier::operator()(double t, double x) const {
    expr::Env env;
    env.t = t;
    env.x = x;
    return psi(env);
}

ZInterval::ZInterval(double a_lo, double b_hi) : a(a_lo), b(b_hi) {
    if (!(a <= 0.0 && 0.0 <= b))
        throw ConfigError("z-interval constraint requires a <= 0 <= b");
}

double PhiReflection::operator()(double z) const {
    expr::Env env;
    env.z = z;
    return phi(env);
}

double z_distance(const ZInterval& gamma, double z) {
    double below = z < gamma.a ? gamma.a - z : 0.0;  // (z − a)⁻
    double above = z > gamma.b ? z - gamma.b : 0.0;  // (z − b)⁺
    return below + above;
}

double phi_distance(const PhiReflection& gamma, double y, double z) {
    double gap = y - gamma(z);
    return gap < 0.0 ? -gap : 0.0;  // (y − φ(z))⁻
}

// ----------------------------------------------------------- spec text

std::string ProblemSpec::describe() const {
    std::ostringstream os;
    os << "T=" << format_param(T) << ";g=" << generator.describe()
       << ";terminal=" << terminal.text();
    if (barrier) os << ";barrier=" << barrier->psi.text();
    if (constraint) {
        if (const auto* zi = std::get_if<ZInterval>(&*constraint))
            os << ";z-interval=[" << format_param(zi->a) << "," << format_param(zi->b) << "]";
        else
            os << ";phi=" << std::get<PhiReflection>(*constraint).phi.text();
    }
    if (p) os << ";p=" << format_param(*p);
    return os.str();
}

// ----------------------------------------------------------- scheme ids

const std::vector<std::string>& all_scheme_ids() {
    static const std::vector<std::string> ids = {
        "implicit",
        "explicit",
        "split",
        "reflected-implicit",
        "reflected-explicit",
        "penalized-implicit",
        "penalized-explicit-implicit",
        "z-constrained-implicit",
        "z-constrained-explicit",
        "phi-implicit",
        "phi-explicit-implicit",
    };
    return ids;
}

bool scheme_known(const std::string& id) {
    const auto& ids = all_scheme_ids();
    return std::find(ids.begin(), ids.end(), id) != ids.end();
}

bool scheme_uses_barrier(const std::string& id) {
    return id == "reflected-implicit" || id == "reflected-explicit" ||
           id == "penalized-implicit" || id == "penalized-explicit-implicit";
}

bool scheme_uses_z_constraint(const std::string& id) {
    return id == "z-constrained-implicit" || id == "z-constrained-explicit";
}

bool scheme_uses_phi_constraint(const std::string& id) {
    return id == "phi-implicit" || id == "phi-explicit-implicit";
}

bool scheme_uses_p(const std::string& id) {
    return id == "penalized-implicit" || id == "penalized-explicit-implicit" ||
           scheme_uses_z_constraint(id) || scheme_uses_phi_constraint(id);
}

// ----------------------------------------------------------- validation

bool ValidationReport::all_pass() const {
    for (const auto& item : items)
        if (item.applicable && !item.pass) return false;
    return true;
}

std::string ValidationReport::failures() const {
    std::string out;
    for (const auto& item : items) {
        if (item.applicable && !item.pass) {
            if (!out.empty()) out += ", ";
            out += item.condition;
        }
    }
    return out;
}

ValidationReport validate(const ProblemSpec& spec, const lattice::Lattice& lat,
                          const std::string& scheme_id) {
    if (!scheme_known(scheme_id))
        throw ConfigError("unknown scheme id \"" + scheme_id + "\"");

    const double mu = spec.generator.mu();
    const double delta = lat.delta;
    const double p = spec.p.value_or(0.0);

    // Inner fixed-point solves appear in the implicit-family schemes and
    // in the g₁ half of the split scheme.
    const bool implicit_family =
        scheme_id == "implicit" || scheme_id == "split" || scheme_id == "reflected-implicit" ||
        scheme_id == "penalized-implicit" || scheme_id == "z-constrained-implicit" ||
        scheme_id == "phi-implicit";
    const bool explicit_family =
        scheme_id == "explicit" || scheme_id == "split" ||
        scheme_id == "penalized-explicit-implicit" || scheme_id == "z-constrained-explicit" ||
        scheme_id == "phi-explicit-implicit";
    const bool reflected_explicit = scheme_id == "reflected-explicit";
    const bool penalized = scheme_uses_p(scheme_id);

    ValidationReport report;
    report.items.push_back({"delta*mu < 1 (implicit solvability)", delta * mu, implicit_family,
                            delta * mu < 1.0});
    report.items.push_back({"(1+2*mu+2*mu^2)*delta < 1 (explicit stability)",
                            (1.0 + 2.0 * mu + 2.0 * mu * mu) * delta, explicit_family,
                            (1.0 + 2.0 * mu + 2.0 * mu * mu) * delta < 1.0});
    report.items.push_back({"(2+2*mu+6*mu^2)*delta < 1 (explicit reflected stability)",
                            (2.0 + 2.0 * mu + 6.0 * mu * mu) * delta, reflected_explicit,
                            (2.0 + 2.0 * mu + 6.0 * mu * mu) * delta < 1.0});
    report.items.push_back({"p*sqrt(delta) < 1 (penalization stability)", p * lat.sqrt_delta,
                            penalized, p * lat.sqrt_delta < 1.0});

    if (spec.generator.is_quadratic_z() ||
        (spec.generator.is_split() && (spec.generator.g1().is_quadratic_z() ||
                                       spec.generator.g2().is_quadratic_z()))) {
        report.warnings.push_back(
            "driver z^2/2 is not globally Lipschitz; step-size conditions use the "
            "nominal constant mu = 1");
    }
    if (scheme_id == "penalized-implicit" && (mu + p) * delta >= 1.0) {
        report.warnings.push_back(
            "combined fixed-point map is not a contraction ((mu+p)*delta >= 1); the "
            "inner solver falls back to the two-branch form");
    }
    return report;
}

void enforce(const ValidationReport& report, bool strict) {
    if (strict && !report.all_pass())
        throw ValidationError("step-size conditions violated: " + report.failures());
}

// -------------------------------------------------------- mu estimation

double lipschitz_estimate(const Generator& g, const SampleBox& box, int samples,
                          std::uint64_t seed) {
    if (samples < 1) throw ConfigError("lipschitz_estimate needs at least one sample");
    std::mt19937_64 rng(seed);
    double best = 0.0;
    for (int i = 0; i < samples; ++i) {
        double t = uniform(rng, box.t_lo, box.t_hi);
        double y1 = uniform(rng, box.y_lo, box.y_hi);
        double z1 = uniform(rng, box.z_lo, box.z_hi);
        double y2 = uniform(rng, box.y_lo, box.y_hi);
        double z2 = uniform(rng, box.z_lo, box.z_hi);
        double denom = std::abs(y1 - y2) + std::abs(z1 - z2);
        if (denom < 1e-12) continue;
        double ratio = std::abs(g(t, y1, z1) - g(t, y2, z2)) / denom;
        best = std::max(best, ratio);
    }
    return best;
}

} // namespace bsde::problem
