/**
 * @file expr.hpp
 * @brief Parser and evaluator for the scalar expression language.
 *
 * Users supply drivers g(t,y,z), terminal functions Φ(x), barriers ψ(t,x)
 * and constraint functions φ(z) as plain text.  This module parses such
 * text into an immutable AST, evaluates it in IEEE double precision and
 * formats it back to text that reparses to the same tree.
 *
 * Grammar (infix, no implicit multiplication):
 *
 *   expr    := term (('+' | '-') term)*
 *   term    := factor (('*' | '/') factor)*
 *   factor  := power, with '-' as prefix binding between '*' and '^'
 *   power   := atom ('^' power)?                      -- right-associative
 *   atom    := number | variable | '(' expr ')' | name '(' args ')'
 *
 * Named unaries: abs, sin, cos, exp, ln, sqrt, pospart, negpart.
 * Named binaries (call syntax): min, max.
 */

#pragma once

#include <map>
#include <memory>
#include <string>

namespace bsde::expr {

/// Unary operator tags.  pospart(v) = max(v,0), negpart(v) = max(-v,0).
enum class UnaryOp { neg, abs, sin, cos, exp, ln, sqrt, pospart, negpart };

/// Binary operator tags.  min/max use call syntax, the rest are infix.
enum class BinaryOp { add, sub, mul, div, pow, min, max };

/**
 * @brief The set of variable letters an expression may reference.
 *
 * Each usage site declares its own set: terminals use {x}, drivers
 * {t,y,z}, barriers {t,x}, z-constraints {z}.
 */
struct VarSet {
    bool t = false;
    bool x = false;
    bool y = false;
    bool z = false;

    /// Build a set from its letters, e.g. of("tyz").
    static VarSet of(const std::string& letters);

    /// Whether the single-letter variable `v` belongs to the set.
    bool allows(char v) const;

    /// The letters of the set in fixed order "txyz" (for diagnostics).
    std::string letters() const;
};

/// Variable bindings for evaluation.  Unused slots may stay at 0.
struct Env {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    double get(char v) const;
};

/**
 * @brief One AST node.  Trees are immutable and shared by value.
 */
struct Node {
    enum class Kind { number, variable, unary, binary };

    Kind kind;
    double value = 0.0;            ///< kind == number
    char var = '\0';               ///< kind == variable, one of t/x/y/z
    UnaryOp uop = UnaryOp::neg;    ///< kind == unary
    BinaryOp bop = BinaryOp::add;  ///< kind == binary
    std::shared_ptr<const Node> lhs;  ///< unary operand or binary left
    std::shared_ptr<const Node> rhs;  ///< binary right
};

using NodePtr = std::shared_ptr<const Node>;

/**
 * @brief An immutable parsed expression.
 *
 * Callable on an Env; safe to evaluate concurrently from many threads.
 */
class Expression {
public:
    Expression() = default;
    Expression(NodePtr root, VarSet vars);

    /// Evaluate at the given bindings (see free function evaluate()).
    double operator()(const Env& env) const;

    /// The root of the AST; null only for a default-constructed value.
    const NodePtr& root() const { return root_; }

    /// The variable set the expression was parsed against.
    const VarSet& vars() const { return vars_; }

    /// Formatted text that reparses to a structurally identical AST.
    std::string text() const;

    bool empty() const { return root_ == nullptr; }

private:
    NodePtr root_;
    VarSet vars_;
};

/**
 * @brief Parse expression text over the given variable set.
 *
 * @throws ConfigError on syntax errors (with a 1-based character
 *         position), unknown identifiers, or variables outside
 *         `allowed`.
 */
Expression parse(const std::string& source, VarSet allowed);

/**
 * @brief Evaluate an expression in double precision.
 *
 * @throws DomainError when the evaluation leaves the mathematical
 *         domain: ln of a non-positive value, sqrt of a negative value,
 *         division by zero, 0^negative or a negative base raised to a
 *         non-integer power, or a non-finite final result.
 */
double evaluate(const Expression& e, const Env& env);

/**
 * @brief Render an expression as text.
 *
 * Parentheses are inserted exactly where precedence requires them, so
 * parse(format(e)) is structurally identical to e.
 */
std::string format(const Expression& e);

/// Structural equality of two ASTs (numeric literals compared exactly).
bool same_structure(const NodePtr& a, const NodePtr& b);
bool same_structure(const Expression& a, const Expression& b);

// --- Builders (used by tests and by preset definitions) ---------------

NodePtr number(double v);
NodePtr variable(char v);
NodePtr unary(UnaryOp op, NodePtr operand);
NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs);

/// Wrap a built tree as an Expression over the given variable set.
Expression wrap(NodePtr root, VarSet vars);

} // namespace bsde::expr
