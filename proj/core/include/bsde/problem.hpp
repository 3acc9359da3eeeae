/**
 * @file problem.hpp
 * @brief Problem definition: driver, terminal condition, barrier, constraint.
 *
 * A problem couples a driver g(t,y,z) (Lipschitz with constant mu), a
 * terminal function ξ = Φ(B_T), and optionally either a lower barrier
 * L_t = ψ(t, B_t) or a constraint on (y,z).  validate() checks the
 * step-size conditions the solvers rely on and reports them without
 * throwing; strict callers escalate failures via enforce().
 */

#pragma once

#include "bsde/expr.hpp"
#include "bsde/lattice.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace bsde::problem {

// ------------------------------------------------------------- presets

/// g(t,y,z) = b·y + c·z + r.
struct Linear {
    double b = 0.0;
    double c = 0.0;
    double r = 0.0;
};

/// g(t,y,z) = r·y + σθ·z + (R − r)·(y − z)⁻, the two-interest-rates
/// driver; requires R ≥ r.
struct TwoRates {
    double r = 0.0;
    double R = 0.0;
    double sigma_theta = 0.0;
};

/// g(t,y,z) = z²/2.  Not globally Lipschitz; validation warns.
struct QuadraticZ {};

/// How the Lipschitz constant attached to a Generator was obtained.
enum class MuSource {
    preset,     ///< derived from preset parameters
    user,       ///< supplied explicitly
    estimated,  ///< sampled via lipschitz_estimate()
    nominal,    ///< placeholder for a non-Lipschitz driver (QuadraticZ)
};

/**
 * @brief The driver g(t,y,z): a preset, a parsed expression, or a
 *        split pair g = g₁ + g₂ handled half-implicitly.
 *
 * Immutable value type; evaluation is re-entrant.
 */
class Generator {
public:
    /// Defaults to the zero driver (Linear with b = c = r = 0).
    Generator();

    static Generator linear(double b, double c, double r);
    static Generator two_rates(double r, double R, double sigma_theta);
    static Generator quadratic_z();

    /// Expression driver with an explicit Lipschitz constant (mu > 0).
    static Generator from_expression(expr::Expression body, double mu,
                                     MuSource source = MuSource::user);

    /// Expression driver with mu estimated on the default sample box
    /// t ∈ [0,1], y,z ∈ [−10,10].
    static Generator from_expression(expr::Expression body);

    /// Split driver g = g₁ + g₂; mu is the sum of the halves' constants.
    static Generator split(Generator g1, Generator g2);

    /// Evaluate g(t, y, z).
    double operator()(double t, double y, double z) const;

    /// Lipschitz constant used by the step-size conditions.
    double mu() const { return mu_; }
    MuSource mu_source() const { return mu_source_; }

    /// Copy with a replaced Lipschitz constant (keeps the body).
    Generator with_mu(double mu, MuSource source) const;

    /// Non-null exactly for the Linear preset (closed-form step path).
    const Linear* as_linear() const;

    bool is_quadratic_z() const;
    bool is_split() const;

    /// Halves of a split driver; throws ConfigError otherwise.
    const Generator& g1() const;
    const Generator& g2() const;

    /// Human-readable body description (stable; feeds fingerprints).
    std::string describe() const;

private:
    struct ExprBody {
        expr::Expression body;
    };
    struct SplitPair {
        std::shared_ptr<const Generator> g1;
        std::shared_ptr<const Generator> g2;
    };
    using Body = std::variant<Linear, TwoRates, QuadraticZ, ExprBody, SplitPair>;

    Generator(Body body, double mu, MuSource source);

    Body body_;
    double mu_ = 0.0;
    MuSource mu_source_ = MuSource::preset;
};

// -------------------------------------------- barrier and constraints

/// Lower barrier L_t = ψ(t, B_t); psi is an expression over {t, x}.
struct Barrier {
    expr::Expression psi;

    /// Barrier value at time t, walk position x.
    double operator()(double t, double x) const;
};

/// Interval constraint a ≤ z ≤ b with a ≤ 0 ≤ b.
struct ZInterval {
    double a = 0.0;
    double b = 0.0;

    ZInterval(double a_lo, double b_hi);
};

/// Reflection constraint y ≥ φ(z); phi is an expression over {z}.
struct PhiReflection {
    expr::Expression phi;

    double operator()(double z) const;
};

using Constraint = std::variant<ZInterval, PhiReflection>;

/// d_Γ(z) = (z − a)⁻ + (z − b)⁺: distance of z from [a, b].
double z_distance(const ZInterval& gamma, double z);

/// d_Γ(y, z) = (y − φ(z))⁻: violation of y ≥ φ(z).
double phi_distance(const PhiReflection& gamma, double y, double z);

// ---------------------------------------------------------- the spec

/**
 * @brief A complete problem instance.
 *
 * At most one of barrier/constraint may be set; p is meaningful only
 * for penalized and constrained schemes.
 */
struct ProblemSpec {
    double T = 1.0;
    Generator generator;
    expr::Expression terminal;  ///< ξ = Φ(B_T), expression over {x}
    std::optional<Barrier> barrier;
    std::optional<Constraint> constraint;
    std::optional<double> p;  ///< penalization parameter

    /// Stable description of the whole problem (feeds fingerprints).
    std::string describe() const;
};

// ------------------------------------------------------- scheme ids

/// All scheme identifiers, in documentation order.
const std::vector<std::string>& all_scheme_ids();

bool scheme_known(const std::string& id);
/// Schemes that require a barrier (reflected-* and penalized-*).
bool scheme_uses_barrier(const std::string& id);
/// Schemes that require a ZInterval constraint (z-constrained-*).
bool scheme_uses_z_constraint(const std::string& id);
/// Schemes that require a PhiReflection constraint (phi-*).
bool scheme_uses_phi_constraint(const std::string& id);
/// Schemes that require the penalization parameter p.
bool scheme_uses_p(const std::string& id);

// ---------------------------------------------------------- validation

/// One step-size condition of the form `value < 1`.
struct ValidationItem {
    std::string condition;   ///< e.g. "delta*mu < 1 (implicit solvability)"
    double value = 0.0;      ///< the left-hand side
    bool applicable = true;  ///< whether the condition binds for this scheme
    bool pass = true;        ///< value < 1, when applicable
};

struct ValidationReport {
    std::vector<ValidationItem> items;
    std::vector<std::string> warnings;

    /// All applicable conditions hold.
    bool all_pass() const;
    /// Names of the failing applicable conditions, comma separated.
    std::string failures() const;
};

/**
 * @brief Check the step-size conditions of the requested scheme.
 *
 * Conditions: δμ < 1 (implicit solvability), (1+2μ+2μ²)δ < 1 (explicit
 * stability), (2+2μ+6μ²)δ < 1 (explicit reflected stability), and
 * p√δ < 1 (penalization stability).  Each is reported with an
 * applicability flag for the given scheme; violations never throw here.
 */
ValidationReport validate(const ProblemSpec& spec, const lattice::Lattice& lat,
                          const std::string& scheme_id);

/// Throw ValidationError when strict is set and the report has failures.
void enforce(const ValidationReport& report, bool strict);

// ------------------------------------------------------ mu estimation

/// Sampling box for lipschitz_estimate().
struct SampleBox {
    double t_lo = 0.0, t_hi = 1.0;
    double y_lo = -10.0, y_hi = 10.0;
    double z_lo = -10.0, z_hi = 10.0;
};

/**
 * @brief Sampled lower bound on the Lipschitz constant of g over a box.
 *
 * Draws `samples` pairs of points with a shared t and returns
 * max |Δg| / (|Δy| + |Δz|).  Deterministic for a fixed seed.
 */
double lipschitz_estimate(const Generator& g, const SampleBox& box,
                          int samples = 4000, std::uint64_t seed = 424242);

} // namespace bsde::problem
