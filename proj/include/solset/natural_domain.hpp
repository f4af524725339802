#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "solset/domain.hpp"
#include "solset/expr.hpp"
#include "solset/interval_eval.hpp"
#include "solset/poly.hpp"

namespace solset {

namespace detail {

/// Exact rational-function form (numerator, denominator), with no
/// cancellation: shared zeros stay in both parts, which is what domain
/// analysis needs.
inline std::optional<std::pair<UniPoly, UniPoly>> ratfunc_extract(const Expr& e) {
    using P = std::pair<UniPoly, UniPoly>;
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return P{UniPoly::constant(e.rational_value()), UniPoly::constant(Rational(1))};
        case ExprKind::Var:
            return P{UniPoly::x(), UniPoly::constant(Rational(1))};
        case ExprKind::Neg: {
            auto a = ratfunc_extract(e.child(0));
            if (!a) return std::nullopt;
            return P{-a->first, a->second};
        }
        case ExprKind::Add:
        case ExprKind::Sub: {
            auto a = ratfunc_extract(e.child(0)), b = ratfunc_extract(e.child(1));
            if (!a || !b) return std::nullopt;
            UniPoly cross = b->first * a->second;
            UniPoly n = e.kind() == ExprKind::Add ? a->first * b->second + cross
                                                 : a->first * b->second - cross;
            return P{n, a->second * b->second};
        }
        case ExprKind::Mul: {
            auto a = ratfunc_extract(e.child(0)), b = ratfunc_extract(e.child(1));
            if (!a || !b) return std::nullopt;
            return P{a->first * b->first, a->second * b->second};
        }
        case ExprKind::Div: {
            auto a = ratfunc_extract(e.child(0)), b = ratfunc_extract(e.child(1));
            if (!a || !b) return std::nullopt;
            if (b->first.is_zero()) return std::nullopt;
            return P{a->first * b->second, a->second * b->first};
        }
        case ExprKind::IntPow: {
            auto a = ratfunc_extract(e.child(0));
            if (!a) return std::nullopt;
            long long k = e.ipow_exponent();
            if (k >= 0)
                return P{a->first.pow(static_cast<unsigned long>(k)),
                         a->second.pow(static_cast<unsigned long>(k))};
            if (a->first.is_zero()) return std::nullopt;
            return P{a->second.pow(static_cast<unsigned long>(-k)),
                     a->first.pow(static_cast<unsigned long>(-k))};
        }
        default:
            return std::nullopt;
    }
}

enum class SignTarget { Positive, NonNegative, NonZero };

/// Roots of w, split into exact rational values and isolating intervals of
/// the irrational rest, strictly separated and sorted.
struct RootBoundary {
    std::optional<Rational> exact;
    Rational lo, hi;  // equal to the exact value when present
};

inline std::vector<RootBoundary> root_boundaries(const UniPoly& w) {
    std::vector<Rational> rroots = rational_roots(w);
    UniPoly rest = w.primitive();
    for (const Rational& r : rroots) {
        UniPoly lin = UniPoly::x() - UniPoly::constant(r);
        for (;;) {
            auto [q, rem] = divmod(rest, lin);
            if (!rem.is_zero()) break;
            rest = q;
        }
    }
    std::vector<IsolatedRoot> irr;
    if (rest.degree() >= 1) irr = sturm_isolate(rest);
    Rational cap = make_rational(Int(1), Int(1024));
    for (auto& ir : irr) {
        ir.refine_below(cap);
        // force strict separation from every rational root
        for (const Rational& r : rroots)
            while (ir.lo <= r && r <= ir.hi) ir.refine_once();
    }
    std::vector<RootBoundary> out;
    for (const Rational& r : rroots) out.push_back({r, r, r});
    for (const auto& ir : irr) out.push_back({std::nullopt, ir.lo, ir.hi});
    std::sort(out.begin(), out.end(),
              [](const RootBoundary& a, const RootBoundary& b) { return a.lo < b.lo; });
    return out;
}

/// Subset of the reals where the polynomial w meets the target sign
/// condition. Exact when every relevant boundary root is rational;
/// otherwise shrinks conservatively and sets the approximate flag.
inline Domain poly_sign_set(const UniPoly& w, SignTarget target) {
    if (w.is_zero()) {
        return target == SignTarget::NonNegative ? Domain::all() : Domain::empty();
    }
    if (w.degree() == 0) {
        int s = sgn(w.coeff(0));
        bool ok = target == SignTarget::NonZero ? s != 0
                  : target == SignTarget::Positive ? s > 0
                                                   : s >= 0;
        return ok ? Domain::all() : Domain::empty();
    }
    std::vector<RootBoundary> roots = root_boundaries(w);
    bool approx = false;

    if (target == SignTarget::NonZero) {
        Domain d = Domain::all();
        for (const auto& r : roots) {
            if (r.exact) {
                d = d.without_point(*r.exact);
            } else {
                // interval endpoints are never roots, so the open interior
                // is a superset of the root
                d = d.without_open_interval(r.lo, r.hi);
                approx = true;
            }
        }
        if (approx) d.set_approximate(true);
        return d;
    }

    // Gaps between consecutive boundaries are root-free, so one sample
    // decides each region's sign.
    std::vector<RealInterval> kept;
    size_t n = roots.size();
    for (size_t i = 0; i <= n; ++i) {
        Rational sample;
        if (n == 0) {
            sample = 0;
        } else if (i == 0) {
            sample = roots[0].lo - 1;
        } else if (i == n) {
            sample = roots[n - 1].hi + 1;
        } else {
            sample = (roots[i - 1].hi + roots[i].lo) / 2;
        }
        if (w.eval(sample) <= 0) continue;
        RealInterval part = RealInterval::all();
        if (i > 0) {
            part.lo = roots[i - 1].exact ? *roots[i - 1].exact : roots[i - 1].hi;
            part.lo_closed = !roots[i - 1].exact;
            if (!roots[i - 1].exact) approx = true;
        }
        if (i < n) {
            part.hi = roots[i].exact ? *roots[i].exact : roots[i].lo;
            part.hi_closed = !roots[i].exact;
            if (!roots[i].exact) approx = true;
        }
        kept.push_back(part);
    }
    Domain d(std::move(kept), false);
    if (target == SignTarget::NonNegative) {
        for (const auto& r : roots) {
            if (r.exact) {
                d = unite(d, Domain(RealInterval::point(*r.exact)));
            } else {
                approx = true;  // an irrational zero belongs to the true set
            }
        }
    }
    if (approx) d.set_approximate(true);
    return d;
}

/// Where the expression u satisfies the sign target, as a conservative
/// subset. Falls back to an empty approximate domain when u is outside
/// the exactly analyzable fragment.
inline Domain expr_sign_set(const Expr& u, SignTarget target) {
    if (!contains_var(u)) {
        Expr folded = fold(u);
        if (folded.kind() == ExprKind::RationalLit) {
            int s = sgn(folded.rational_value());
            bool ok = target == SignTarget::NonZero ? s != 0
                      : target == SignTarget::Positive ? s > 0
                                                       : s >= 0;
            return ok ? Domain::all() : Domain::empty();
        }
        try {
            CertifiedSign s = certified_sign(u, DyadicInterval::zero(64), 1024);
            if (s == CertifiedSign::Positive) return Domain::all();
            if (s == CertifiedSign::Negative) return Domain::empty();
            if (s == CertifiedSign::ContainsZero)
                return target == SignTarget::NonNegative ? Domain::all() : Domain::empty();
        } catch (const EmptyIntersection&) {
            // undefined constant; the enclosing node's own domain rules
            // already exclude it
        }
        Domain d = Domain::empty();
        d.set_approximate(true);
        return d;
    }
    auto rf = detail::ratfunc_extract(u);
    if (!rf) {
        Domain d = Domain::empty();
        d.set_approximate(true);
        return d;
    }
    const UniPoly &num = rf->first, &den = rf->second;
    if (num.is_zero()) {
        // u is identically zero wherever defined
        return target == SignTarget::NonNegative ? Domain::all() : Domain::empty();
    }
    if (target == SignTarget::NonZero) return poly_sign_set(num, SignTarget::NonZero);
    UniPoly w = num * den;
    Domain d = poly_sign_set(w, SignTarget::Positive);
    if (target == SignTarget::Positive) return d;
    // {u >= 0} also holds where the numerator vanishes and the denominator
    // does not.
    bool approx = d.approximate();
    if (num.degree() >= 1) {
        for (const RootBoundary& r : root_boundaries(num)) {
            if (!r.exact) {
                approx = true;  // an irrational zero of u belongs to the true set
            } else if (den.eval(*r.exact) != 0) {
                d = unite(d, Domain(RealInterval::point(*r.exact)));
            }
        }
    }
    if (approx) d.set_approximate(true);
    return d;
}

}  // namespace detail

/// Largest set on which every node of e is defined, or a conservative
/// approximate subset when a boundary is irrational. Worst case is the
/// empty domain with the approximate flag set.
inline Domain natural_domain(const Expr& e) {
    using detail::expr_sign_set;
    using detail::SignTarget;
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::Var:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return Domain::all();
        case ExprKind::Neg:
        case ExprKind::Exp:
        case ExprKind::Sin:
        case ExprKind::Cos:
            return natural_domain(e.child(0));
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul:
            return intersect(natural_domain(e.child(0)), natural_domain(e.child(1)));
        case ExprKind::Div:
            return intersect(intersect(natural_domain(e.child(0)), natural_domain(e.child(1))),
                             expr_sign_set(e.child(1), SignTarget::NonZero));
        case ExprKind::IntPow: {
            Domain d = natural_domain(e.child(0));
            if (e.ipow_exponent() < 0) d = intersect(d, expr_sign_set(e.child(0), SignTarget::NonZero));
            return d;
        }
        case ExprKind::Root: {
            Domain d = natural_domain(e.child(0));
            if (e.root_index() % 2 == 0) d = intersect(d, expr_sign_set(e.child(0), SignTarget::NonNegative));
            return d;
        }
        case ExprKind::Ln:
            return intersect(natural_domain(e.child(0)), expr_sign_set(e.child(0), SignTarget::Positive));
        case ExprKind::LambertW: {
            // Branch constraints have the irrational boundary -1/e; shift to
            // a rational bound just inside and flag the approximation.
            Domain d = natural_domain(e.child(0));
            Expr shifted = Expr::sub(e.child(0), Expr::rational(neg_inv_e_above()));
            Domain ge = expr_sign_set(shifted, SignTarget::NonNegative);
            ge.set_approximate(true);
            d = intersect(d, ge);
            if (e.w_branch() == -1)
                d = intersect(d, expr_sign_set(Expr::neg(e.child(0)), SignTarget::Positive));
            return d;
        }
    }
    throw UnsupportedNode("unhandled expression node");
}

}  // namespace solset
