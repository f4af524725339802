#pragma once

#include <optional>
#include <stdexcept>
#include <utility>

#include "solset/equation.hpp"
#include "solset/interval_eval.hpp"
#include "solset/poly.hpp"

namespace solset {

enum class Monotonicity { StrictlyIncreasing, StrictlyDecreasing, Unknown };

struct MultiIntervalDomain : std::invalid_argument {
    MultiIntervalDomain() : std::invalid_argument("monotonicity needs a single interval") {}
};
struct TargetOutsideRange : std::domain_error {
    TargetOutsideRange() : std::domain_error("target is outside the certified range") {}
};

namespace detail {

enum class Shape { Inc, Dec, Const, Unk };

inline Shape flip_shape(Shape s) {
    if (s == Shape::Inc) return Shape::Dec;
    if (s == Shape::Dec) return Shape::Inc;
    return s;
}

/// Certified sign of an x-free expression, or 9 when undecided/undefined.
inline int const_sign(const Expr& e) {
    Expr f = fold(e);
    if (f.is_rational()) return sgn(f.rational_value());
    try {
        switch (certified_sign(f, DyadicInterval::zero(64), 1024)) {
            case CertifiedSign::Positive: return 1;
            case CertifiedSign::Negative: return -1;
            default: return 9;
        }
    } catch (const EmptyIntersection&) {
        return 9;
    }
}

inline Shape combine_sum(Shape a, Shape b) {
    if (a == Shape::Const) return b;
    if (b == Shape::Const) return a;
    if (a == b) return a;
    return Shape::Unk;
}

/// Structural monotonicity over the whole natural domain; composition with
/// the increasing primitives (roots, exp, ln, odd powers, W branches)
/// preserves or flips the argument's shape.
inline Shape structural_shape(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return Shape::Const;
        case ExprKind::Var:
            return Shape::Inc;
        case ExprKind::Neg:
            return flip_shape(structural_shape(e.child(0)));
        case ExprKind::Add:
            return combine_sum(structural_shape(e.child(0)), structural_shape(e.child(1)));
        case ExprKind::Sub:
            return combine_sum(structural_shape(e.child(0)),
                               flip_shape(structural_shape(e.child(1))));
        case ExprKind::Mul: {
            for (int side = 0; side < 2; ++side) {
                const Expr& c = e.child(side);
                const Expr& other = e.child(1 - side);
                if (contains_var(c)) continue;
                int s = const_sign(c);
                if (s == 0) return Shape::Const;
                if (s == 9) return Shape::Unk;
                Shape o = structural_shape(other);
                return s > 0 ? o : flip_shape(o);
            }
            return Shape::Unk;
        }
        case ExprKind::Div: {
            if (!contains_var(e.child(1))) {
                int s = const_sign(e.child(1));
                if (s == 9 || s == 0) return Shape::Unk;
                Shape o = structural_shape(e.child(0));
                return s > 0 ? o : flip_shape(o);
            }
            return Shape::Unk;
        }
        case ExprKind::IntPow: {
            long long k = e.ipow_exponent();
            if (k == 0) return Shape::Const;
            if (k > 0 && k % 2 == 1) return structural_shape(e.child(0));
            return Shape::Unk;
        }
        case ExprKind::Root:
        case ExprKind::Exp:
        case ExprKind::Ln:
            return structural_shape(e.child(0));
        case ExprKind::Sin:
        case ExprKind::Cos:
            return contains_var(e.child(0)) ? Shape::Unk : Shape::Const;
        case ExprKind::LambertW: {
            Shape s = structural_shape(e.child(0));
            return e.w_branch() == 0 ? s : flip_shape(s);
        }
    }
    return Shape::Unk;
}

}  // namespace detail

/// Strict monotonicity of e on the single-interval domain d: structural
/// composition rules first, then the certified sign of the derivative over
/// an adaptive decomposition of d.
inline Monotonicity prove_monotone(const Expr& e, const Domain& d) {
    if (d.parts().size() != 1) throw MultiIntervalDomain();
    switch (detail::structural_shape(e)) {
        case detail::Shape::Inc: return Monotonicity::StrictlyIncreasing;
        case detail::Shape::Dec: return Monotonicity::StrictlyDecreasing;
        default: break;
    }
    const RealInterval& iv = d.parts()[0];
    try {
        switch (certified_sign_adaptive(differentiate(e), iv.lo, iv.hi, 12)) {
            case CertifiedSign::Positive: return Monotonicity::StrictlyIncreasing;
            case CertifiedSign::Negative: return Monotonicity::StrictlyDecreasing;
            default: return Monotonicity::Unknown;
        }
    } catch (const EmptyIntersection&) {
        return Monotonicity::Unknown;
    } catch (const UnsupportedNode&) {
        return Monotonicity::Unknown;
    }
}

/// A solution represented as "the value of the inverse of a certified
/// strictly monotone branch at a target". The target must be x-free.
class InverseFunctionValue {
    Expr function_;
    Domain branch_domain_;
    Expr target_;
    Monotonicity direction_;

public:
    InverseFunctionValue(Expr function, Domain branch_domain, Expr target)
        : function_(std::move(function)),
          branch_domain_(std::move(branch_domain)),
          target_(std::move(target)),
          direction_(prove_monotone(function_, branch_domain_)) {
        if (direction_ == Monotonicity::Unknown)
            throw std::invalid_argument("function is not certified monotone on the branch");
        if (contains_var(target_)) throw std::invalid_argument("target must be constant");
    }

    const Expr& function() const { return function_; }
    const Domain& branch_domain() const { return branch_domain_; }
    const Expr& target() const { return target_; }
    Monotonicity direction() const { return direction_; }
};

namespace detail {

struct PointSign {
    int sign = 9;  // 9 = undecided
    bool exact_zero = false;
};

inline PointSign sign_at_point(const Expr& diff, const Rational& q, mpfr_prec_t max_prec) {
    try {
        if (auto v = evaluate_exact(diff, q)) return {sgn(*v), sgn(*v) == 0};
    } catch (const DomainViolation&) {
        return {9, false};
    }
    try {
        switch (certified_sign(diff, DyadicInterval::from_rational(q, 128), max_prec)) {
            case CertifiedSign::Positive: return {1, false};
            case CertifiedSign::Negative: return {-1, false};
            default: return {9, false};
        }
    } catch (const EmptyIntersection&) {
        return {9, false};
    }
}

}  // namespace detail

/// Enclosure of the unique t in the branch domain with function(t) = target.
/// Bisection over exact rational brackets; monotonicity makes every certified
/// midpoint sign a proof that the bracket still contains t.
inline DyadicInterval inverse_value(const InverseFunctionValue& v, mpfr_prec_t precision) {
    const RealInterval& iv = v.branch_domain().parts()[0];
    bool increasing = v.direction() == Monotonicity::StrictlyIncreasing;
    Expr diff = Expr::sub(v.function(), v.target());
    mpfr_prec_t sign_prec = precision * 2 + 256;

    // want sign(diff) < 0 left of t and > 0 right of it
    auto oriented = [&](const Rational& q) {
        detail::PointSign s = detail::sign_at_point(diff, q, sign_prec);
        if (!increasing && s.sign != 9 && !s.exact_zero) s.sign = -s.sign;
        return s;
    };

    // exact attainment at a closed finite endpoint
    for (int side = 0; side < 2; ++side) {
        const std::optional<Rational>& ep = side == 0 ? iv.lo : iv.hi;
        bool closed = side == 0 ? iv.lo_closed : iv.hi_closed;
        if (!ep || !closed) continue;
        try {
            if (auto val = evaluate_exact(diff, *ep); val && *val == 0)
                return DyadicInterval::from_rational(*ep, precision);
        } catch (const DomainViolation&) {
        }
    }

    // a polynomial difference with a rational root in the domain is exact
    if (auto p = from_expr(fold(diff)); p && !p->is_zero() && p->degree() >= 1) {
        for (const Rational& r : rational_roots(*p))
            if (v.branch_domain().contains(r)) return DyadicInterval::from_rational(r, precision);
    }

    // bracket: finite domain endpoints bound t outright; infinite sides hunt
    // outward for a certified sign
    Rational A, B;
    bool haveA = false, haveB = false;
    if (iv.lo) {
        A = *iv.lo;
        haveA = true;
    } else {
        Rational probe(-1);
        for (int k = 0; k < 80 && !haveA; ++k, probe *= 2) {
            if (iv.hi && probe >= *iv.hi) {
                probe = *iv.hi - 1;
            }
            if (oriented(probe).sign < 0) {
                A = probe;
                haveA = true;
            }
        }
    }
    if (iv.hi) {
        B = *iv.hi;
        haveB = true;
    } else {
        Rational probe(1);
        for (int k = 0; k < 80 && !haveB; ++k, probe *= 2) {
            if (iv.lo && probe <= *iv.lo) {
                probe = *iv.lo + 1;
            }
            if (oriented(probe).sign > 0) {
                B = probe;
                haveB = true;
            }
        }
    }
    if (!haveA || !haveB) throw TargetOutsideRange();

    // both finite endpoints certified on the same strict side: no solution.
    // An exact zero at an excluded open endpoint is outside too, because
    // monotonicity puts the only zero of the closure there.
    detail::PointSign sa = oriented(A), sb = oriented(B);
    if (sa.exact_zero) {
        if (v.branch_domain().contains(A)) return DyadicInterval::from_rational(A, precision);
        throw TargetOutsideRange();
    }
    if (sb.exact_zero) {
        if (v.branch_domain().contains(B)) return DyadicInterval::from_rational(B, precision);
        throw TargetOutsideRange();
    }
    if (sa.sign != 9 && sa.sign == sb.sign) throw TargetOutsideRange();

    Rational width_target = make_rational(Int(1), Int(1) << static_cast<unsigned>(precision + 2));
    long maxit = static_cast<long>(precision) + 96;
    for (long it = 0; it < maxit && B - A > width_target; ++it) {
        Rational gap = B - A;
        bool moved = false;
        // perturbed midpoints rescue an undecidable center
        for (const auto& frac : {std::pair<long, long>{1, 2}, {13, 32}, {19, 32}, {7, 16}}) {
            Rational mid = A + gap * make_rational(frac.first, frac.second);
            detail::PointSign s = oriented(mid);
            if (s.exact_zero) return DyadicInterval::from_rational(mid, precision);
            if (s.sign == -1) {
                A = mid;
                moved = true;
                break;
            }
            if (s.sign == 1) {
                B = mid;
                moved = true;
                break;
            }
        }
        if (!moved) break;
    }

    Dyadic lo(precision), hi(precision);
    mpfr_set_q(lo.get(), A.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(hi.get(), B.get_mpq_t(), MPFR_RNDU);
    return DyadicInterval(std::move(lo), std::move(hi));
}

}  // namespace solset
