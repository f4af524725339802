#pragma once

#include <optional>
#include <vector>

#include "solset/expr.hpp"
#include "solset/interval.hpp"
#include "solset/lambert.hpp"

namespace solset {

/// Enclosure of the image of e over x intersected with e's natural domain.
/// Throws EmptyIntersection when that intersection is certainly empty.
inline DyadicInterval eval_interval(const Expr& e, const DyadicInterval& x, mpfr_prec_t prec) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return DyadicInterval::from_rational(e.rational_value(), prec);
        case ExprKind::Var:
            return x;
        case ExprKind::ConstE:
            return const_e(prec);
        case ExprKind::ConstPi:
            return const_pi(prec);
        case ExprKind::Neg:
            return -eval_interval(e.child(), x, prec);
        case ExprKind::Add:
            return eval_interval(e.child(0), x, prec) + eval_interval(e.child(1), x, prec);
        case ExprKind::Sub:
            return eval_interval(e.child(0), x, prec) - eval_interval(e.child(1), x, prec);
        case ExprKind::Mul:
            return eval_interval(e.child(0), x, prec) * eval_interval(e.child(1), x, prec);
        case ExprKind::Div:
            return eval_interval(e.child(0), x, prec) / eval_interval(e.child(1), x, prec);
        case ExprKind::IntPow:
            return pow_int(eval_interval(e.child(), x, prec),
                           static_cast<long>(e.ipow_exponent()));
        case ExprKind::Root:
            return nth_root(eval_interval(e.child(), x, prec),
                            static_cast<unsigned long>(e.root_index()));
        case ExprKind::Exp:
            return exp(eval_interval(e.child(), x, prec));
        case ExprKind::Ln:
            return ln(eval_interval(e.child(), x, prec));
        case ExprKind::Sin:
            return sin(eval_interval(e.child(), x, prec));
        case ExprKind::Cos:
            return cos(eval_interval(e.child(), x, prec));
        case ExprKind::LambertW:
            try {
                return lambert_w(e.w_branch(), eval_interval(e.child(), x, prec), prec);
            } catch (const OutOfBranchDomain&) {
                throw EmptyIntersection();
            }
    }
    throw UnsupportedNode("unhandled expression node");
}

inline DyadicInterval eval_interval_at(const Expr& e, const Rational& x0, mpfr_prec_t prec) {
    return eval_interval(e, DyadicInterval::from_rational(x0, prec), prec);
}

enum class CertifiedSign { Positive, Negative, ContainsZero, Unknown };

/// Sign of e over the whole interval x. Positive and Negative hold for
/// every point of x (within e's domain); ContainsZero reports an exact
/// rational witness where e vanishes. Propagates EmptyIntersection when e
/// is defined nowhere on x.
inline CertifiedSign certified_sign(const Expr& e, const DyadicInterval& x,
                                    mpfr_prec_t max_prec = 4096) {
    std::vector<Rational> samples;
    if (x.lo().is_finite()) samples.push_back(x.lo_q());
    if (x.hi().is_finite()) samples.push_back(x.hi_q());
    if (x.is_finite()) samples.push_back(x.midpoint_q());
    if (x.contains_zero()) samples.push_back(Rational(0));
    for (const Rational& s : samples) {
        try {
            std::optional<Rational> v = evaluate_exact(e, s);
            if (v && *v == 0) return CertifiedSign::ContainsZero;
        } catch (const DomainViolation&) {
        }
    }
    for (mpfr_prec_t p = 64; p <= max_prec; p *= 2) {
        DyadicInterval enc = eval_interval(e, x, p);
        if (enc.strictly_positive()) return CertifiedSign::Positive;
        if (enc.strictly_negative()) return CertifiedSign::Negative;
    }
    return CertifiedSign::Unknown;
}

namespace detail {

inline DyadicInterval interval_box(const std::optional<Rational>& lo,
                                   const std::optional<Rational>& hi, mpfr_prec_t prec) {
    Dyadic l(prec), h(prec);
    if (lo) {
        mpfr_set_q(l.get(), lo->get_mpq_t(), MPFR_RNDD);
    } else {
        mpfr_set_inf(l.get(), -1);
    }
    if (hi) {
        mpfr_set_q(h.get(), hi->get_mpq_t(), MPFR_RNDU);
    } else {
        mpfr_set_inf(h.get(), 1);
    }
    return DyadicInterval(std::move(l), std::move(h));
}

}  // namespace detail

/// Sign of e over [lo, hi] (nullopt endpoints are infinite), splitting the
/// interval adaptively when one enclosure is too coarse. Positive/Negative
/// certify the sign on every piece; mixed or undecided pieces give Unknown,
/// and a vanishing witness anywhere gives ContainsZero.
inline CertifiedSign certified_sign_adaptive(const Expr& e, const std::optional<Rational>& lo,
                                             const std::optional<Rational>& hi, int depth,
                                             mpfr_prec_t max_prec = 1024) {
    CertifiedSign whole = CertifiedSign::Unknown;
    bool defined_somewhere = true;
    try {
        whole = certified_sign(e, detail::interval_box(lo, hi, 128), max_prec);
    } catch (const EmptyIntersection&) {
        defined_somewhere = false;
    }
    if (!defined_somewhere) throw EmptyIntersection();
    if (whole != CertifiedSign::Unknown || depth <= 0) return whole;
    if (lo && hi && *lo == *hi) return whole;

    Rational split;
    if (lo && hi) {
        split = (*lo + *hi) / 2;
    } else if (lo) {
        Rational step = abs(*lo);
        if (step < 1) step = 1;
        split = *lo + step;
    } else if (hi) {
        Rational step = abs(*hi);
        if (step < 1) step = 1;
        split = *hi - step;
    } else {
        split = 0;
    }

    // A sub-piece may be outside e's domain entirely; it constrains nothing.
    auto piece = [&](const std::optional<Rational>& a,
                     const std::optional<Rational>& b) -> std::optional<CertifiedSign> {
        try {
            return certified_sign_adaptive(e, a, b, depth - 1, max_prec);
        } catch (const EmptyIntersection&) {
            return std::nullopt;
        }
    };
    auto left = piece(lo, split);
    auto right = piece(split, hi);
    if (!left && !right) throw EmptyIntersection();
    if (!left) return *right;
    if (!right) return *left;
    if (*left == *right) return *left;
    if (*left == CertifiedSign::ContainsZero || *right == CertifiedSign::ContainsZero)
        return CertifiedSign::ContainsZero;
    return CertifiedSign::Unknown;
}

}  // namespace solset
