/**
 * @file expr.cpp
 * @brief Pratt parser, evaluator and formatter for the expression language.
 */

#include "bsde/expr.hpp"
#include "bsde/errors.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <ostream>
#include <sstream>
#include <vector>

namespace bsde::expr {

namespace {

// ---------------------------------------------------------------- lexer

struct Token {
    enum class Kind { number, ident, op, end };
    Kind kind = Kind::end;
    double value = 0.0;   // Kind::number
    std::string text;     // Kind::ident
    char op = '\0';       // Kind::op, one of + - * / ^ ( ) ,
    std::size_t pos = 0;  // 1-based position in the source text
};

[[noreturn]] void fail(std::size_t pos, const std::string& what) {
    std::ostringstream os;
    os << "expression error at position " << pos << ": " << what;
    throw ConfigError(os.str());
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return is_ident_start(c) || std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> tokenize(const std::string& src) {
    std::vector<Token> out;
    std::size_t i = 0;
    while (i < src.size()) {
        char c = src[i];
        if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
            ++i;
            continue;
        }
        Token tok;
        tok.pos = i + 1;
        if (std::isdigit(static_cast<unsigned char>(c)) ||
            (c == '.' && i + 1 < src.size() && std::isdigit(static_cast<unsigned char>(src[i + 1])))) {
            const char* begin = src.c_str() + i;
            char* end = nullptr;
            tok.kind = Token::Kind::number;
            tok.value = std::strtod(begin, &end);
            i += static_cast<std::size_t>(end - begin);
        } else if (is_ident_start(c)) {
            std::size_t j = i;
            while (j < src.size() && is_ident_char(src[j])) ++j;
            tok.kind = Token::Kind::ident;
            tok.text = src.substr(i, j - i);
            i = j;
        } else if (c == '+' || c == '-' || c == '*' || c == '/' || c == '^' ||
                   c == '(' || c == ')' || c == ',') {
            tok.kind = Token::Kind::op;
            tok.op = c;
            ++i;
        } else {
            fail(i + 1, std::string("unexpected character \"") + c + "\"");
        }
        out.push_back(std::move(tok));
    }
    Token end;
    end.pos = src.size() + 1;
    out.push_back(end);
    return out;
}

// --------------------------------------------------------------- parser

/// Left binding powers of the infix operators; the parser loop continues
/// while the next operator binds strictly tighter than the current floor.
int left_bp(char op) {
    switch (op) {
        case '+':
        case '-': return 10;
        case '*':
        case '/': return 20;
        case '^': return 40;
        default: return 0;
    }
}

/// Binding-power floor for the right operand: equal to the operator's own
/// power for left-associative operators, one less for right-associative ^.
int right_floor(char op) { return op == '^' ? 39 : left_bp(op); }

/// Prefix minus binds between * / and ^: -x^2 = -(x^2), -x*y = (-x)*y.
constexpr int kNegFloor = 30;

struct FunctionInfo {
    const char* name;
    int arity;
    UnaryOp uop;
    BinaryOp bop;
};

const FunctionInfo kFunctions[] = {
    {"abs", 1, UnaryOp::abs, BinaryOp::add},
    {"sin", 1, UnaryOp::sin, BinaryOp::add},
    {"cos", 1, UnaryOp::cos, BinaryOp::add},
    {"exp", 1, UnaryOp::exp, BinaryOp::add},
    {"ln", 1, UnaryOp::ln, BinaryOp::add},
    {"sqrt", 1, UnaryOp::sqrt, BinaryOp::add},
    {"pospart", 1, UnaryOp::pospart, BinaryOp::add},
    {"negpart", 1, UnaryOp::negpart, BinaryOp::add},
    {"min", 2, UnaryOp::neg, BinaryOp::min},
    {"max", 2, UnaryOp::neg, BinaryOp::max},
};

const FunctionInfo* find_function(const std::string& name) {
    for (const auto& f : kFunctions)
        if (name == f.name) return &f;
    return nullptr;
}

class Parser {
public:
    Parser(const std::string& src, VarSet allowed)
        : tokens_(tokenize(src)), allowed_(allowed) {}

    NodePtr run() {
        NodePtr e = parse_expr(0);
        const Token& t = peek();
        if (t.kind != Token::Kind::end) fail(t.pos, "unexpected trailing input");
        return e;
    }

private:
    const Token& peek() const { return tokens_[idx_]; }
    const Token& advance() { return tokens_[idx_++]; }

    void expect_op(char op, const char* what) {
        const Token& t = peek();
        if (t.kind != Token::Kind::op || t.op != op)
            fail(t.pos, std::string("expected \"") + what + "\"");
        ++idx_;
    }

    NodePtr parse_expr(int min_bp) {
        NodePtr lhs = parse_prefix();
        for (;;) {
            const Token& t = peek();
            if (t.kind != Token::Kind::op) break;
            int bp = left_bp(t.op);
            if (bp == 0 || bp <= min_bp) break;
            char op = t.op;
            ++idx_;
            NodePtr rhs = parse_expr(right_floor(op));
            BinaryOp bop;
            switch (op) {
                case '+': bop = BinaryOp::add; break;
                case '-': bop = BinaryOp::sub; break;
                case '*': bop = BinaryOp::mul; break;
                case '/': bop = BinaryOp::div; break;
                default: bop = BinaryOp::pow; break;
            }
            lhs = binary(bop, std::move(lhs), std::move(rhs));
        }
        return lhs;
    }

    NodePtr parse_prefix() {
        const Token& t = advance();
        switch (t.kind) {
            case Token::Kind::number:
                return number(t.value);
            case Token::Kind::ident:
                return parse_name(t);
            case Token::Kind::op:
                if (t.op == '-') return unary(UnaryOp::neg, parse_expr(kNegFloor));
                if (t.op == '(') {
                    NodePtr inner = parse_expr(0);
                    expect_op(')', ")");
                    return inner;
                }
                fail(t.pos, std::string("unexpected \"") + t.op + "\"");
            case Token::Kind::end:
                fail(t.pos, "unexpected end of input");
        }
        fail(t.pos, "unexpected token");
    }

    NodePtr parse_name(const Token& t) {
        if (t.text.size() == 1 && std::string("txyz").find(t.text[0]) != std::string::npos) {
            if (!allowed_.allows(t.text[0]))
                fail(t.pos, "variable \"" + t.text + "\" is not allowed in this context (allowed: " +
                                allowed_.letters() + ")");
            return variable(t.text[0]);
        }
        const FunctionInfo* fn = find_function(t.text);
        if (fn == nullptr) fail(t.pos, "unknown identifier \"" + t.text + "\"");
        expect_op('(', "(");
        NodePtr first = parse_expr(0);
        if (fn->arity == 1) {
            expect_op(')', ")");
            return unary(fn->uop, std::move(first));
        }
        expect_op(',', ",");
        NodePtr second = parse_expr(0);
        expect_op(')', ")");
        return binary(fn->bop, std::move(first), std::move(second));
    }

    std::vector<Token> tokens_;
    std::size_t idx_ = 0;
    VarSet allowed_;
};

// ------------------------------------------------------------ evaluator

/// Extract an integer exponent from a literal (optionally negated) with
/// magnitude at most 64; such powers are computed by repeated
/// multiplication so that negative bases stay in the domain (z^2 at z<0).
bool small_integer_exponent(const NodePtr& e, long& out) {
    const Node* node = e.get();
    bool negate = false;
    if (node->kind == Node::Kind::unary && node->uop == UnaryOp::neg) {
        negate = true;
        node = node->lhs.get();
    }
    if (node->kind != Node::Kind::number) return false;
    double v = node->value;
    if (v != std::floor(v) || std::abs(v) > 64.0) return false;
    out = static_cast<long>(v);
    if (negate) out = -out;
    return true;
}

double powi(double base, long e) {
    if (e < 0) {
        if (base == 0.0) throw DomainError("0 raised to a negative power");
        return 1.0 / powi(base, -e);
    }
    double acc = 1.0;
    for (long i = 0; i < e; ++i) acc *= base;
    return acc;
}

double eval_node(const Node& node, const Env& env) {
    switch (node.kind) {
        case Node::Kind::number:
            return node.value;
        case Node::Kind::variable:
            return env.get(node.var);
        case Node::Kind::unary: {
            double v = eval_node(*node.lhs, env);
            switch (node.uop) {
                case UnaryOp::neg: return -v;
                case UnaryOp::abs: return std::abs(v);
                case UnaryOp::sin: return std::sin(v);
                case UnaryOp::cos: return std::cos(v);
                case UnaryOp::exp: return std::exp(v);
                case UnaryOp::ln:
                    if (v <= 0.0) throw DomainError("ln of a non-positive value");
                    return std::log(v);
                case UnaryOp::sqrt:
                    if (v < 0.0) throw DomainError("sqrt of a negative value");
                    return std::sqrt(v);
                case UnaryOp::pospart: return v > 0.0 ? v : 0.0;
                case UnaryOp::negpart: return v < 0.0 ? -v : 0.0;
            }
            break;
        }
        case Node::Kind::binary: {
            if (node.bop == BinaryOp::pow) {
                long e = 0;
                if (small_integer_exponent(node.rhs, e))
                    return powi(eval_node(*node.lhs, env), e);
                double base = eval_node(*node.lhs, env);
                double expo = eval_node(*node.rhs, env);
                if (base > 0.0) return std::pow(base, expo);
                if (base == 0.0) {
                    if (expo > 0.0) return 0.0;
                    if (expo == 0.0) return 1.0;
                    throw DomainError("0 raised to a negative power");
                }
                throw DomainError("negative base with a non-integer exponent");
            }
            double l = eval_node(*node.lhs, env);
            double r = eval_node(*node.rhs, env);
            switch (node.bop) {
                case BinaryOp::add: return l + r;
                case BinaryOp::sub: return l - r;
                case BinaryOp::mul: return l * r;
                case BinaryOp::div:
                    if (r == 0.0) throw DomainError("division by zero");
                    return l / r;
                case BinaryOp::min: return std::min(l, r);
                case BinaryOp::max: return std::max(l, r);
                case BinaryOp::pow: break;  // handled above
            }
            break;
        }
    }
    throw NumericalError("malformed expression node");
}

// ------------------------------------------------------------ formatter

/// Shortest decimal text that strtod maps back to exactly v.
std::string format_number(double v) {
    char buf[40];
    for (int prec = 1; prec <= 17; ++prec) {
        std::snprintf(buf, sizeof buf, "%.*g", prec, v);
        if (std::strtod(buf, nullptr) == v) return buf;
    }
    return buf;
}

/// Precedence used when deciding parentheses: atoms and calls never need
/// them, then ^ > prefix - > * / > + -.
int precedence(const Node& node) {
    switch (node.kind) {
        case Node::Kind::number:
        case Node::Kind::variable:
            return 100;
        case Node::Kind::unary:
            return node.uop == UnaryOp::neg ? 30 : 100;
        case Node::Kind::binary:
            switch (node.bop) {
                case BinaryOp::pow: return 40;
                case BinaryOp::mul:
                case BinaryOp::div: return 20;
                case BinaryOp::add:
                case BinaryOp::sub: return 10;
                case BinaryOp::min:
                case BinaryOp::max: return 100;
            }
    }
    return 100;
}

const char* unary_name(UnaryOp op) {
    switch (op) {
        case UnaryOp::neg: return "-";
        case UnaryOp::abs: return "abs";
        case UnaryOp::sin: return "sin";
        case UnaryOp::cos: return "cos";
        case UnaryOp::exp: return "exp";
        case UnaryOp::ln: return "ln";
        case UnaryOp::sqrt: return "sqrt";
        case UnaryOp::pospart: return "pospart";
        case UnaryOp::negpart: return "negpart";
    }
    return "?";
}

void format_node(const Node& node, std::ostream& os) {
    switch (node.kind) {
        case Node::Kind::number:
            os << format_number(node.value);
            return;
        case Node::Kind::variable:
            os << node.var;
            return;
        case Node::Kind::unary:
            if (node.uop == UnaryOp::neg) {
                os << '-';
                bool parens = precedence(*node.lhs) < 30;
                if (parens) os << '(';
                format_node(*node.lhs, os);
                if (parens) os << ')';
            } else {
                os << unary_name(node.uop) << '(';
                format_node(*node.lhs, os);
                os << ')';
            }
            return;
        case Node::Kind::binary: {
            if (node.bop == BinaryOp::min || node.bop == BinaryOp::max) {
                os << (node.bop == BinaryOp::min ? "min(" : "max(");
                format_node(*node.lhs, os);
                os << ", ";
                format_node(*node.rhs, os);
                os << ')';
                return;
            }
            int po = precedence(node);
            int pl = precedence(*node.lhs);
            int pr = precedence(*node.rhs);
            // ^ is right-associative: equal precedence on the left needs
            // parentheses, equal precedence on the right does for the rest.
            bool need_l = pl < po || (pl == po && node.bop == BinaryOp::pow);
            bool need_r = pr < po || (pr == po && node.bop != BinaryOp::pow);
            const char* sym = node.bop == BinaryOp::add   ? " + "
                              : node.bop == BinaryOp::sub ? " - "
                              : node.bop == BinaryOp::mul ? "*"
                              : node.bop == BinaryOp::div ? "/"
                                                          : "^";
            if (need_l) os << '(';
            format_node(*node.lhs, os);
            if (need_l) os << ')';
            os << sym;
            if (need_r) os << '(';
            format_node(*node.rhs, os);
            if (need_r) os << ')';
            return;
        }
    }
}

} // namespace

// --------------------------------------------------------------- VarSet

VarSet VarSet::of(const std::string& letters) {
    VarSet s;
    for (char c : letters) {
        switch (c) {
            case 't': s.t = true; break;
            case 'x': s.x = true; break;
            case 'y': s.y = true; break;
            case 'z': s.z = true; break;
            default: throw ConfigError(std::string("unknown variable letter \"") + c + "\"");
        }
    }
    return s;
}

bool VarSet::allows(char v) const {
    switch (v) {
        case 't': return t;
        case 'x': return x;
        case 'y': return y;
        case 'z': return z;
        default: return false;
    }
}

std::string VarSet::letters() const {
    std::string s;
    if (t) s += 't';
    if (x) s += 'x';
    if (y) s += 'y';
    if (z) s += 'z';
    return s;
}

double Env::get(char v) const {
    switch (v) {
        case 't': return t;
        case 'x': return x;
        case 'y': return y;
        case 'z': return z;
        default: throw NumericalError(std::string("unbound variable \"") + v + "\"");
    }
}

// ----------------------------------------------------------- Expression

Expression::Expression(NodePtr root, VarSet vars)
    : root_(std::move(root)), vars_(vars) {}

double Expression::operator()(const Env& env) const { return evaluate(*this, env); }

std::string Expression::text() const { return format(*this); }

Expression parse(const std::string& source, VarSet allowed) {
    if (source.empty()) throw ConfigError("empty expression");
    Parser p(source, allowed);
    return Expression(p.run(), allowed);
}

double evaluate(const Expression& e, const Env& env) {
    if (e.empty()) throw NumericalError("evaluating an empty expression");
    double v = eval_node(*e.root(), env);
    if (!std::isfinite(v)) throw DomainError("expression evaluated to a non-finite value");
    return v;
}

std::string format(const Expression& e) {
    if (e.empty()) return "";
    std::ostringstream os;
    format_node(*e.root(), os);
    return os.str();
}

bool same_structure(const NodePtr& a, const NodePtr& b) {
    if (a == b) return true;
    if (!a || !b) return false;
    if (a->kind != b->kind) return false;
    switch (a->kind) {
        case Node::Kind::number: return a->value == b->value;
        case Node::Kind::variable: return a->var == b->var;
        case Node::Kind::unary:
            return a->uop == b->uop && same_structure(a->lhs, b->lhs);
        case Node::Kind::binary:
            return a->bop == b->bop && same_structure(a->lhs, b->lhs) &&
                   same_structure(a->rhs, b->rhs);
    }
    return false;
}

bool same_structure(const Expression& a, const Expression& b) {
    return same_structure(a.root(), b.root());
}

// --------------------------------------------------------------- builders

NodePtr number(double v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::number;
    n->value = v;
    return n;
}

NodePtr variable(char v) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::variable;
    n->var = v;
    return n;
}

NodePtr unary(UnaryOp op, NodePtr operand) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::unary;
    n->uop = op;
    n->lhs = std::move(operand);
    return n;
}

NodePtr binary(BinaryOp op, NodePtr lhs, NodePtr rhs) {
    auto n = std::make_shared<Node>();
    n->kind = Node::Kind::binary;
    n->bop = op;
    n->lhs = std::move(lhs);
    n->rhs = std::move(rhs);
    return n;
}

Expression wrap(NodePtr root, VarSet vars) { return Expression(std::move(root), vars); }

} // namespace bsde::expr
