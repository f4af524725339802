#pragma once

#include <optional>

#include "solset/interval.hpp"
#include "solset/poly.hpp"

namespace solset {

struct IncompatibleField : std::domain_error {
    IncompatibleField() : std::domain_error("values lie in different quadratic fields") {}
};

/// sqrt of a nonnegative rational, exact or nothing.
inline std::optional<Rational> exact_rational_sqrt(const Rational& q) {
    if (sgn(q) < 0) return std::nullopt;
    Int n = num(q), d = den(q);
    if (mpz_perfect_square_p(n.get_mpz_t()) == 0) return std::nullopt;
    if (mpz_perfect_square_p(d.get_mpz_t()) == 0) return std::nullopt;
    Int rn, rd;
    mpz_sqrt(rn.get_mpz_t(), n.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), d.get_mpz_t());
    return make_rational(rn, rd);
}

/// Element a + b*sqrt(d) of a real quadratic field; d squarefree, d == 1
/// exactly for plain rationals (then b == 0). Arithmetic between two
/// irrational values from different fields throws IncompatibleField.
class QuadExt {
    Rational a_, b_;
    Int d_;

    void normalize() {
        if (sgn(b_) == 0) d_ = 1;
    }

public:
    QuadExt() : a_(0), b_(0), d_(1) {}
    QuadExt(const Rational& a) : a_(a), b_(0), d_(1) {}
    QuadExt(const Rational& a, const Rational& b, const Int& d) : a_(a), b_(b), d_(d) {
        normalize();
    }
    explicit QuadExt(const SurdValue& s) : a_(s.a), b_(s.b), d_(s.d) { normalize(); }

    const Rational& rational_part() const { return a_; }
    const Rational& surd_coeff() const { return b_; }
    const Int& surd_base() const { return d_; }
    bool is_rational() const { return d_ == 1; }

    SurdValue to_surd() const { return SurdValue{a_, b_, d_}; }

    friend bool operator==(const QuadExt& x, const QuadExt& y) {
        return x.a_ == y.a_ && x.b_ == y.b_ && x.d_ == y.d_;
    }

    /// Exact sign: a and b*sqrt(d) compared by squaring when signs oppose.
    int sign() const {
        if (is_rational()) return sgn(a_);
        int sa = sgn(a_), sb = sgn(b_);
        if (sa == 0) return sb;
        if (sa == sb) return sa;
        int mag = sgn(a_ * a_ - b_ * b_ * Rational(d_));
        return sa > 0 ? mag : -mag;
    }

    bool is_zero() const { return sgn(a_) == 0 && sgn(b_) == 0; }

    // Common field for mixed arithmetic; rationals live in every field.
    static Int join(const QuadExt& x, const QuadExt& y) {
        if (x.d_ == 1) return y.d_;
        if (y.d_ == 1) return x.d_;
        if (x.d_ != y.d_) throw IncompatibleField();
        return x.d_;
    }

    friend QuadExt operator-(const QuadExt& x) { return QuadExt(-x.a_, -x.b_, x.d_); }
    friend QuadExt operator+(const QuadExt& x, const QuadExt& y) {
        Int d = join(x, y);
        return QuadExt(x.a_ + y.a_, x.b_ + y.b_, d);
    }
    friend QuadExt operator-(const QuadExt& x, const QuadExt& y) { return x + (-y); }
    friend QuadExt operator*(const QuadExt& x, const QuadExt& y) {
        Int d = join(x, y);
        return QuadExt(x.a_ * y.a_ + x.b_ * y.b_ * Rational(d), x.a_ * y.b_ + x.b_ * y.a_, d);
    }

    /// 1/(a+b*sqrt(d)) = (a-b*sqrt(d))/(a^2-b^2 d); the norm vanishes only
    /// at 0 because d is squarefree.
    QuadExt reciprocal() const {
        if (is_zero()) throw DomainViolation("division by zero");
        Rational norm = a_ * a_ - b_ * b_ * Rational(d_);
        return QuadExt(a_ / norm, -b_ / norm, d_);
    }
    friend QuadExt operator/(const QuadExt& x, const QuadExt& y) { return x * y.reciprocal(); }

    QuadExt pow(long long k) const {
        if (k < 0) return reciprocal().pow(-k);
        QuadExt acc(Rational(1));
        QuadExt base = *this;
        unsigned long long n = static_cast<unsigned long long>(k);
        while (n) {
            if (n & 1) acc = acc * base;
            base = base * base;
            n >>= 1;
        }
        return acc;
    }

    DyadicInterval enclosure(mpfr_prec_t prec) const {
        DyadicInterval av = DyadicInterval::from_rational(a_, prec);
        if (is_rational()) return av;
        DyadicInterval rd = nth_root(DyadicInterval::from_rational(Rational(d_), prec), 2);
        return av + DyadicInterval::from_rational(b_, prec) * rd;
    }
};

/// Positive square root within the same field when it denests:
/// sqrt(a + b*sqrt(d)) = u + v*sqrt(d) iff a^2 - b^2 d is a rational square
/// and (a +- that root)/2 is one too.
inline std::optional<QuadExt> quad_sqrt(const QuadExt& v) {
    int s = v.sign();
    if (s < 0) throw DomainViolation("square root of a negative value");
    if (s == 0) return QuadExt();
    if (v.is_rational()) {
        const Rational& q = v.rational_part();
        if (auto r = exact_rational_sqrt(q)) return QuadExt(*r);
        Int nm = num(q) * den(q);
        auto [sq, d] = squarefree_decompose(nm);
        return QuadExt(Rational(0), make_rational(sq, den(q)), d);
    }
    Rational normv = v.rational_part() * v.rational_part() -
                     v.surd_coeff() * v.surd_coeff() * Rational(v.surd_base());
    auto r = exact_rational_sqrt(normv);
    if (!r) return std::nullopt;
    for (int pick = 0; pick < 2; ++pick) {
        Rational t = (v.rational_part() + (pick == 0 ? *r : Rational(-*r))) / 2;
        auto u = exact_rational_sqrt(t);
        if (!u || sgn(*u) == 0) continue;
        Rational w = v.surd_coeff() / (2 * *u);
        QuadExt cand(*u, w, v.surd_base());
        if (cand * cand == v) return cand.sign() > 0 ? cand : -cand;
    }
    return std::nullopt;
}

/// Exact evaluation of e at x in Q(sqrt(d)). nullopt when the value leaves
/// the field; DomainViolation when e is undefined at x.
inline std::optional<QuadExt> evaluate_quad(const Expr& e, const QuadExt& x) {
    auto eval = [&x](const Expr& sub) { return evaluate_quad(sub, x); };
    try {
        switch (e.kind()) {
            case ExprKind::RationalLit:
                return QuadExt(e.rational_value());
            case ExprKind::Var:
                return x;
            case ExprKind::ConstE:
            case ExprKind::ConstPi:
                return std::nullopt;
            case ExprKind::Neg: {
                auto a = eval(e.child(0));
                return a ? std::optional<QuadExt>(-*a) : std::nullopt;
            }
            case ExprKind::Add:
            case ExprKind::Sub:
            case ExprKind::Mul:
            case ExprKind::Div: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                auto b = eval(e.child(1));
                if (!b) return std::nullopt;
                switch (e.kind()) {
                    case ExprKind::Add: return *a + *b;
                    case ExprKind::Sub: return *a - *b;
                    case ExprKind::Mul: return *a * *b;
                    default:
                        if (b->is_zero()) throw DomainViolation("division by zero");
                        return *a / *b;
                }
            }
            case ExprKind::IntPow: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                if (e.ipow_exponent() < 0 && a->is_zero())
                    throw DomainViolation("zero to a negative power");
                return a->pow(e.ipow_exponent());
            }
            case ExprKind::Root: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                long long n = e.root_index();
                if (n % 2 == 0 && a->sign() < 0)
                    throw DomainViolation("even root of a negative value");
                if (n == 2) return quad_sqrt(*a);
                if (!a->is_rational()) return std::nullopt;
                if (auto r = rational_nth_root(a->rational_part(), n))
                    return QuadExt(*r);
                return std::nullopt;
            }
            case ExprKind::Exp: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                if (a->is_zero()) return QuadExt(Rational(1));
                return std::nullopt;
            }
            case ExprKind::Ln: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                if (a->sign() <= 0) throw DomainViolation("log of a non-positive value");
                if (*a == QuadExt(Rational(1))) return QuadExt();
                return std::nullopt;
            }
            case ExprKind::Sin:
            case ExprKind::Cos: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                if (!a->is_zero()) return std::nullopt;
                return QuadExt(Rational(e.kind() == ExprKind::Cos ? 1 : 0));
            }
            case ExprKind::LambertW: {
                auto a = eval(e.child(0));
                if (!a) return std::nullopt;
                // Exact branch-domain checks against rational brackets of -1/e.
                if (a->is_rational()) {
                    const Rational& q = a->rational_part();
                    if (q < neg_inv_e_below())
                        throw DomainViolation("value below the Lambert branch point");
                    if (e.w_branch() == -1 && sgn(q) >= 0)
                        throw DomainViolation("branch -1 needs a negative argument");
                    if (e.w_branch() == 0 && sgn(q) == 0) return QuadExt();
                }
                return std::nullopt;
            }
        }
    } catch (const IncompatibleField&) {
        return std::nullopt;
    }
    return std::nullopt;
}

}  // namespace solset
