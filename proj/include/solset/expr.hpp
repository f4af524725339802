#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "solset/rational.hpp"

namespace solset {

enum class ExprKind : uint8_t {
    RationalLit,
    Var,
    ConstE,
    ConstPi,
    Neg,
    Add,
    Sub,
    Mul,
    Div,
    IntPow,   // integer exponent, possibly negative
    Root,     // index n >= 2; odd index accepts negative arguments
    Exp,
    Ln,
    Sin,
    Cos,
    LambertW  // branch 0 or -1
};

struct DomainViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct UnsupportedNode : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Immutable expression tree over the single variable x. Copies share
/// structure; no operation ever mutates a node.
class Expr {
    struct Node;
    using NodePtr = std::shared_ptr<const Node>;

    struct Node {
        ExprKind kind;
        Rational lit;      // RationalLit
        long long aux = 0; // IntPow exponent, Root index, LambertW branch
        NodePtr a, b;
    };

    NodePtr n_;
    explicit Expr(NodePtr n) : n_(std::move(n)) {}

    static Expr make(ExprKind k, NodePtr a = nullptr, NodePtr b = nullptr, long long aux = 0) {
        auto n = std::make_shared<Node>();
        n->kind = k;
        n->aux = aux;
        n->a = std::move(a);
        n->b = std::move(b);
        return Expr(std::move(n));
    }

public:
    Expr() : Expr(rational(Rational(0))) {}

    static Expr rational(const Rational& q) {
        auto n = std::make_shared<Node>();
        n->kind = ExprKind::RationalLit;
        n->lit = q;
        n->lit.canonicalize();
        return Expr(std::move(n));
    }
    static Expr integer(long v) { return rational(Rational(v)); }
    static Expr var() { return make(ExprKind::Var); }
    static Expr const_e() { return make(ExprKind::ConstE); }
    static Expr const_pi() { return make(ExprKind::ConstPi); }
    static Expr neg(const Expr& a) { return make(ExprKind::Neg, a.n_); }
    static Expr add(const Expr& a, const Expr& b) { return make(ExprKind::Add, a.n_, b.n_); }
    static Expr sub(const Expr& a, const Expr& b) { return make(ExprKind::Sub, a.n_, b.n_); }
    static Expr mul(const Expr& a, const Expr& b) { return make(ExprKind::Mul, a.n_, b.n_); }
    static Expr div(const Expr& a, const Expr& b) { return make(ExprKind::Div, a.n_, b.n_); }
    static Expr intpow(const Expr& a, long long e) { return make(ExprKind::IntPow, a.n_, nullptr, e); }
    static Expr root(long long index, const Expr& a) {
        if (index < 2) throw std::invalid_argument("root index must be >= 2");
        return make(ExprKind::Root, a.n_, nullptr, index);
    }
    static Expr sqrt(const Expr& a) { return root(2, a); }
    static Expr exp(const Expr& a) { return make(ExprKind::Exp, a.n_); }
    static Expr ln(const Expr& a) { return make(ExprKind::Ln, a.n_); }
    static Expr sin(const Expr& a) { return make(ExprKind::Sin, a.n_); }
    static Expr cos(const Expr& a) { return make(ExprKind::Cos, a.n_); }
    static Expr lambert_w(int branch, const Expr& a) {
        if (branch != 0 && branch != -1) throw std::invalid_argument("Lambert W branch must be 0 or -1");
        return make(ExprKind::LambertW, a.n_, nullptr, branch);
    }

    ExprKind kind() const { return n_->kind; }
    const Rational& rational_value() const { return n_->lit; }
    long long ipow_exponent() const { return n_->aux; }
    long long root_index() const { return n_->aux; }
    int w_branch() const { return static_cast<int>(n_->aux); }
    Expr child(int i = 0) const { return Expr(i == 0 ? n_->a : n_->b); }
    bool binary() const {
        switch (n_->kind) {
            case ExprKind::Add:
            case ExprKind::Sub:
            case ExprKind::Mul:
            case ExprKind::Div:
                return true;
            default:
                return false;
        }
    }
    bool leaf() const {
        switch (n_->kind) {
            case ExprKind::RationalLit:
            case ExprKind::Var:
            case ExprKind::ConstE:
            case ExprKind::ConstPi:
                return true;
            default:
                return false;
        }
    }

    bool is_rational() const { return n_->kind == ExprKind::RationalLit; }
    bool is_zero() const { return is_rational() && sgn(n_->lit) == 0; }
    bool is_one() const { return is_rational() && n_->lit == 1; }

    friend bool operator==(const Expr& x, const Expr& y) {
        if (x.n_ == y.n_) return true;
        if (x.n_->kind != y.n_->kind) return false;
        switch (x.n_->kind) {
            case ExprKind::RationalLit:
                return x.n_->lit == y.n_->lit;
            case ExprKind::Var:
            case ExprKind::ConstE:
            case ExprKind::ConstPi:
                return true;
            case ExprKind::IntPow:
            case ExprKind::Root:
            case ExprKind::LambertW:
                if (x.n_->aux != y.n_->aux) return false;
                return Expr(x.n_->a) == Expr(y.n_->a);
            default:
                if (static_cast<bool>(x.n_->b) != static_cast<bool>(y.n_->b)) return false;
                if (!(Expr(x.n_->a) == Expr(y.n_->a))) return false;
                return !x.n_->b || Expr(x.n_->b) == Expr(y.n_->b);
        }
    }
    friend bool operator!=(const Expr& x, const Expr& y) { return !(x == y); }
};

inline bool contains_var(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::Var:
            return true;
        case ExprKind::RationalLit:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return false;
        default:
            if (contains_var(e.child(0))) return true;
            return e.binary() && contains_var(e.child(1));
    }
}

inline bool is_constant(const Expr& e) { return !contains_var(e); }

namespace detail {
// Positivity of a constant expression decidable by structure alone.
inline bool structurally_positive_const(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return sgn(e.rational_value()) > 0;
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return true;
        case ExprKind::Exp:
            return is_constant(e.child(0));
        case ExprKind::Add:
        case ExprKind::Mul:
            return structurally_positive_const(e.child(0)) && structurally_positive_const(e.child(1));
        case ExprKind::Root:
            return structurally_positive_const(e.child(0));
        default:
            return false;
    }
}

// True when the node is total on all of R, so that absorbing it (0 * e -> 0)
// cannot enlarge the natural domain.
inline bool total_on_reals(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::Var:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return true;
        case ExprKind::Neg:
        case ExprKind::Exp:
        case ExprKind::Sin:
        case ExprKind::Cos:
            return total_on_reals(e.child(0));
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
            return total_on_reals(e.child(0)) && total_on_reals(e.child(1));
        case ExprKind::IntPow:
            return e.ipow_exponent() >= 0 && total_on_reals(e.child(0));
        case ExprKind::Root:
            return e.root_index() % 2 == 1 && total_on_reals(e.child(0));
        default:
            return false;
    }
}
}  // namespace detail

/// Constant folding: exact rational arithmetic plus the handful of special
/// values (exp(0), ln(1), sin(0), cos(0), W(0,0), exp(ln(c)) for constant
/// c certified positive). Nothing else is simplified.
inline Expr fold(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::Var:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return e;
        case ExprKind::Neg: {
            Expr a = fold(e.child(0));
            if (a.is_rational()) return Expr::rational(-a.rational_value());
            if (a.kind() == ExprKind::Neg) return a.child(0);
            return Expr::neg(a);
        }
        case ExprKind::Add: {
            Expr a = fold(e.child(0)), b = fold(e.child(1));
            if (a.is_rational() && b.is_rational())
                return Expr::rational(a.rational_value() + b.rational_value());
            if (a.is_zero()) return b;
            if (b.is_zero()) return a;
            return Expr::add(a, b);
        }
        case ExprKind::Sub: {
            Expr a = fold(e.child(0)), b = fold(e.child(1));
            if (a.is_rational() && b.is_rational())
                return Expr::rational(a.rational_value() - b.rational_value());
            if (b.is_zero()) return a;
            if (a.is_zero()) return fold(Expr::neg(b));
            if (a == b && detail::total_on_reals(a)) return Expr::rational(Rational(0));
            return Expr::sub(a, b);
        }
        case ExprKind::Mul: {
            Expr a = fold(e.child(0)), b = fold(e.child(1));
            if (a.is_rational() && b.is_rational())
                return Expr::rational(a.rational_value() * b.rational_value());
            if (a.is_zero() && detail::total_on_reals(b)) return Expr::rational(Rational(0));
            if (b.is_zero() && detail::total_on_reals(a)) return Expr::rational(Rational(0));
            if (a.is_one()) return b;
            if (b.is_one()) return a;
            return Expr::mul(a, b);
        }
        case ExprKind::Div: {
            Expr a = fold(e.child(0)), b = fold(e.child(1));
            if (a.is_rational() && b.is_rational() && !b.is_zero())
                return Expr::rational(a.rational_value() / b.rational_value());
            if (b.is_one()) return a;
            return Expr::div(a, b);
        }
        case ExprKind::IntPow: {
            Expr a = fold(e.child(0));
            long long k = e.ipow_exponent();
            if (k == 1) return a;
            if (a.is_rational() && !(a.is_zero() && k < 0))
                return Expr::rational(rational_pow(a.rational_value(), k));
            if (k == 0 && detail::total_on_reals(a)) return Expr::rational(Rational(1));
            return Expr::intpow(a, k);
        }
        case ExprKind::Root: {
            Expr a = fold(e.child(0));
            if (a.is_rational()) {
                if (auto r = rational_nth_root(a.rational_value(),
                                               static_cast<unsigned long>(e.root_index())))
                    return Expr::rational(*r);
            }
            return Expr::root(e.root_index(), a);
        }
        case ExprKind::Exp: {
            Expr a = fold(e.child(0));
            if (a.is_zero()) return Expr::rational(Rational(1));
            if (a.kind() == ExprKind::Ln && is_constant(a.child(0)) &&
                detail::structurally_positive_const(a.child(0)))
                return a.child(0);
            return Expr::exp(a);
        }
        case ExprKind::Ln: {
            Expr a = fold(e.child(0));
            if (a.is_one()) return Expr::rational(Rational(0));
            return Expr::ln(a);
        }
        case ExprKind::Sin: {
            Expr a = fold(e.child(0));
            if (a.is_zero()) return Expr::rational(Rational(0));
            return Expr::sin(a);
        }
        case ExprKind::Cos: {
            Expr a = fold(e.child(0));
            if (a.is_zero()) return Expr::rational(Rational(1));
            return Expr::cos(a);
        }
        case ExprKind::LambertW: {
            Expr a = fold(e.child(0));
            if (a.is_zero() && e.w_branch() == 0) return Expr::rational(Rational(0));
            return Expr::lambert_w(e.w_branch(), a);
        }
    }
    return e;
}

/// Substitutes `value` for the variable and folds.
inline Expr substitute(const Expr& e, const Expr& value) {
    switch (e.kind()) {
        case ExprKind::Var:
            return value;
        case ExprKind::RationalLit:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return e;
        case ExprKind::Neg:
            return Expr::neg(substitute(e.child(0), value));
        case ExprKind::Add:
            return Expr::add(substitute(e.child(0), value), substitute(e.child(1), value));
        case ExprKind::Sub:
            return Expr::sub(substitute(e.child(0), value), substitute(e.child(1), value));
        case ExprKind::Mul:
            return Expr::mul(substitute(e.child(0), value), substitute(e.child(1), value));
        case ExprKind::Div:
            return Expr::div(substitute(e.child(0), value), substitute(e.child(1), value));
        case ExprKind::IntPow:
            return Expr::intpow(substitute(e.child(0), value), e.ipow_exponent());
        case ExprKind::Root:
            return Expr::root(e.root_index(), substitute(e.child(0), value));
        case ExprKind::Exp:
            return Expr::exp(substitute(e.child(0), value));
        case ExprKind::Ln:
            return Expr::ln(substitute(e.child(0), value));
        case ExprKind::Sin:
            return Expr::sin(substitute(e.child(0), value));
        case ExprKind::Cos:
            return Expr::cos(substitute(e.child(0), value));
        case ExprKind::LambertW:
            return Expr::lambert_w(e.w_branch(), substitute(e.child(0), value));
    }
    return e;
}

/// Symbolic derivative with respect to x, folded but not simplified further.
inline Expr differentiate(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return Expr::rational(Rational(0));
        case ExprKind::Var:
            return Expr::rational(Rational(1));
        case ExprKind::Neg:
            return fold(Expr::neg(differentiate(e.child(0))));
        case ExprKind::Add:
            return fold(Expr::add(differentiate(e.child(0)), differentiate(e.child(1))));
        case ExprKind::Sub:
            return fold(Expr::sub(differentiate(e.child(0)), differentiate(e.child(1))));
        case ExprKind::Mul: {
            Expr u = e.child(0), v = e.child(1);
            return fold(Expr::add(Expr::mul(differentiate(u), v), Expr::mul(u, differentiate(v))));
        }
        case ExprKind::Div: {
            Expr u = e.child(0), v = e.child(1);
            Expr numer = Expr::sub(Expr::mul(differentiate(u), v), Expr::mul(u, differentiate(v)));
            return fold(Expr::div(numer, Expr::intpow(v, 2)));
        }
        case ExprKind::IntPow: {
            long long k = e.ipow_exponent();
            if (k == 0) return Expr::rational(Rational(0));
            Expr u = e.child(0);
            return fold(Expr::mul(Expr::mul(Expr::integer(static_cast<long>(k)), Expr::intpow(u, k - 1)),
                                  differentiate(u)));
        }
        case ExprKind::Root: {
            // d/dx u^{1/n} = u' / (n * root(n,u)^{n-1})
            long long n = e.root_index();
            Expr u = e.child(0);
            Expr denom = Expr::mul(Expr::integer(static_cast<long>(n)), Expr::intpow(e, n - 1));
            return fold(Expr::div(differentiate(u), denom));
        }
        case ExprKind::Exp:
            return fold(Expr::mul(e, differentiate(e.child(0))));
        case ExprKind::Ln:
            return fold(Expr::div(differentiate(e.child(0)), e.child(0)));
        case ExprKind::Sin:
            return fold(Expr::mul(Expr::cos(e.child(0)), differentiate(e.child(0))));
        case ExprKind::Cos:
            return fold(Expr::neg(Expr::mul(Expr::sin(e.child(0)), differentiate(e.child(0)))));
        case ExprKind::LambertW: {
            // W'(z) = W(z) / (z (1 + W(z)))
            Expr z = e.child(0);
            Expr denom = Expr::mul(z, Expr::add(Expr::integer(1), e));
            return fold(Expr::mul(Expr::div(e, denom), differentiate(z)));
        }
    }
    throw UnsupportedNode("no derivative rule");
}

/// Exact rational evaluation at x0. nullopt means some subterm takes an
/// irrational value. Throws DomainViolation on division by zero, even roots
/// of negatives, logs of non-positives, and W arguments certainly outside
/// the branch domain.
inline std::optional<Rational> evaluate_exact(const Expr& e, const Rational& x0) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return e.rational_value();
        case ExprKind::Var:
            return x0;
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return std::nullopt;
        case ExprKind::Neg: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            return Rational(-*a);
        }
        case ExprKind::Add: {
            auto a = evaluate_exact(e.child(0), x0), b = evaluate_exact(e.child(1), x0);
            if (!a || !b) return std::nullopt;
            return Rational(*a + *b);
        }
        case ExprKind::Sub: {
            auto a = evaluate_exact(e.child(0), x0), b = evaluate_exact(e.child(1), x0);
            if (!a || !b) return std::nullopt;
            return Rational(*a - *b);
        }
        case ExprKind::Mul: {
            auto a = evaluate_exact(e.child(0), x0), b = evaluate_exact(e.child(1), x0);
            if (!a || !b) return std::nullopt;
            return Rational(*a * *b);
        }
        case ExprKind::Div: {
            auto a = evaluate_exact(e.child(0), x0), b = evaluate_exact(e.child(1), x0);
            if (b && sgn(*b) == 0) throw DomainViolation("division by zero");
            if (!a || !b) return std::nullopt;
            return Rational(*a / *b);
        }
        case ExprKind::IntPow: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            if (sgn(*a) == 0 && e.ipow_exponent() < 0) throw DomainViolation("zero to negative power");
            return rational_pow(*a, e.ipow_exponent());
        }
        case ExprKind::Root: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            if (e.root_index() % 2 == 0 && sgn(*a) < 0)
                throw DomainViolation("even root of negative value");
            return rational_nth_root(*a, static_cast<unsigned long>(e.root_index()));
        }
        case ExprKind::Exp: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            if (sgn(*a) == 0) return Rational(1);
            return std::nullopt;
        }
        case ExprKind::Ln: {
            auto a = evaluate_exact(e.child(0), x0);
            if (a && sgn(*a) <= 0) throw DomainViolation("log of non-positive value");
            if (!a) return std::nullopt;
            if (*a == 1) return Rational(0);
            return std::nullopt;
        }
        case ExprKind::Sin: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            if (sgn(*a) == 0) return Rational(0);
            return std::nullopt;  // sin of a nonzero rational is irrational
        }
        case ExprKind::Cos: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            if (sgn(*a) == 0) return Rational(1);
            return std::nullopt;
        }
        case ExprKind::LambertW: {
            auto a = evaluate_exact(e.child(0), x0);
            if (!a) return std::nullopt;
            // Rational arguments strictly between the -1/e brackets stay
            // undecided here; interval evaluation settles those.
            if (*a < neg_inv_e_below())
                throw DomainViolation("Lambert W argument below -1/e");
            if (e.w_branch() == 0) {
                if (sgn(*a) == 0) return Rational(0);
                return std::nullopt;
            }
            if (sgn(*a) >= 0) throw DomainViolation("W(-1, z) requires z < 0");
            return std::nullopt;
        }
    }
    return std::nullopt;
}

// ---- rendering ----------------------------------------------------------

namespace detail {
// Grammar levels: sum = 1, product = 2, unary minus = 3, power = 4, atom = 5.
// A node rendered into a context demanding a higher level gets parentheses;
// the context values below mirror the parser's shape exactly, so rendering
// then parsing reproduces the tree.
inline int precedence(ExprKind k) {
    switch (k) {
        case ExprKind::Add:
        case ExprKind::Sub:
            return 1;
        case ExprKind::Mul:
        case ExprKind::Div:
            return 2;
        case ExprKind::Neg:
            return 3;
        case ExprKind::IntPow:
            return 4;
        default:
            return 5;
    }
}

inline void render(const Expr& e, std::string& out, int ctx) {
    int prec = precedence(e.kind());
    bool parens = prec < ctx;
    switch (e.kind()) {
        case ExprKind::RationalLit: {
            const Rational& q = e.rational_value();
            // A sign or fraction bar would reparse as Neg/Div, so any
            // context tighter than a sum wraps non-atom literals. At the
            // head of a product the parser folds a leading minus back
            // into the literal, so a negative integer stays bare there.
            bool atom_like = sgn(q) >= 0 && is_integer(q);
            bool signed_atom = sgn(q) < 0 && is_integer(q) && ctx <= 2;
            if (!atom_like && !signed_atom && ctx > 1) {
                out += "(" + to_string(q) + ")";
            } else {
                out += to_string(q);
            }
            return;
        }
        case ExprKind::Var:
            out += "x";
            return;
        case ExprKind::ConstE:
            out += "e";
            return;
        case ExprKind::ConstPi:
            out += "pi";
            return;
        case ExprKind::Neg:
            if (parens) out += "(";
            out += "-";
            render(e.child(0), out, 4);
            if (parens) out += ")";
            return;
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
        case ExprKind::Div: {
            if (parens) out += "(";
            bool sum = prec == 1;
            const char* op = e.kind() == ExprKind::Add   ? " + "
                             : e.kind() == ExprKind::Sub ? " - "
                             : e.kind() == ExprKind::Mul ? "*"
                                                         : "/";
            render(e.child(0), out, prec);
            out += op;
            render(e.child(1), out, sum ? 2 : 4);
            if (parens) out += ")";
            return;
        }
        case ExprKind::IntPow: {
            if (parens) out += "(";
            render(e.child(0), out, 5);
            out += "^";
            out += std::to_string(e.ipow_exponent());
            if (parens) out += ")";
            return;
        }
        case ExprKind::Root:
            if (e.root_index() == 2) {
                out += "sqrt(";
            } else {
                out += "root(" + std::to_string(e.root_index()) + ", ";
            }
            render(e.child(0), out, 0);
            out += ")";
            return;
        case ExprKind::Exp:
        case ExprKind::Ln:
        case ExprKind::Sin:
        case ExprKind::Cos: {
            out += e.kind() == ExprKind::Exp  ? "exp("
                   : e.kind() == ExprKind::Ln ? "ln("
                   : e.kind() == ExprKind::Sin ? "sin("
                                               : "cos(";
            render(e.child(0), out, 0);
            out += ")";
            return;
        }
        case ExprKind::LambertW:
            out += "W(" + std::to_string(e.w_branch()) + ", ";
            render(e.child(0), out, 0);
            out += ")";
            return;
    }
}
}  // namespace detail

inline std::string to_string(const Expr& e) {
    std::string out;
    detail::render(e, out, 0);
    return out;
}

}  // namespace solset
