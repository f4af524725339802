#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solset/equation.hpp"
#include "solset/expr.hpp"
#include "solset/interval_eval.hpp"
#include "solset/natural_domain.hpp"
#include "solset/poly.hpp"

namespace solset {

struct RuleNotApplicable : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct DomainMismatch : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};
struct BrokenChain : std::logic_error {
    using std::logic_error::logic_error;
};

/// How a transformed equation's solution set relates to the input's.
enum class SolutionRelation { Equivalent, Superset, Subset, Unknown };

inline const char* to_string(SolutionRelation r) {
    switch (r) {
        case SolutionRelation::Equivalent: return "equivalent";
        case SolutionRelation::Superset: return "superset";
        case SolutionRelation::Subset: return "subset";
        case SolutionRelation::Unknown: return "unknown";
    }
    return "unknown";
}

/// Relation of a two-step chain. Equivalent is the identity; inclusions
/// of the same direction compose to themselves, mixed or unknown ones
/// compose to Unknown.
inline SolutionRelation compose(SolutionRelation a, SolutionRelation b) {
    if (a == SolutionRelation::Equivalent) return b;
    if (b == SolutionRelation::Equivalent) return a;
    if (a == b) return a;
    return SolutionRelation::Unknown;
}

enum class SignPredicate { NonNegative, NonPositive, NonZero, Positive, Negative };

inline const char* to_string(SignPredicate p) {
    switch (p) {
        case SignPredicate::NonNegative: return ">= 0";
        case SignPredicate::NonPositive: return "<= 0";
        case SignPredicate::NonZero: return "!= 0";
        case SignPredicate::Positive: return "> 0";
        case SignPredicate::Negative: return "< 0";
    }
    return "";
}

/// A predicate on one expression. Where it holds, the owning step's
/// relation upgrades to Equivalent.
struct SideCondition {
    Expr subject;
    SignPredicate predicate;
};

inline std::string to_string(const SideCondition& c) {
    return to_string(c.subject) + " " + to_string(c.predicate);
}

enum class RuleId {
    AddBoth,
    SubBoth,
    MulBoth,
    DivBoth,
    SquareBoth,
    ApplyInjective,
    Substitute,
    IsolateRadical
};

inline const char* to_string(RuleId r) {
    switch (r) {
        case RuleId::AddBoth: return "AddBoth";
        case RuleId::SubBoth: return "SubBoth";
        case RuleId::MulBoth: return "MulBoth";
        case RuleId::DivBoth: return "DivBoth";
        case RuleId::SquareBoth: return "SquareBoth";
        case RuleId::ApplyInjective: return "ApplyInjective";
        case RuleId::Substitute: return "Substitute";
        case RuleId::IsolateRadical: return "IsolateRadical";
    }
    return "";
}

/// One transformation, tagged with the relation it certifies between the
/// output's and input's solution sets. A Subset relation is never implied
/// silently: such steps carry lossy = true, set only on explicit request.
struct Step {
    RuleId rule;
    Equation input;
    Equation output;
    SolutionRelation relation = SolutionRelation::Equivalent;
    std::vector<SideCondition> side_conditions;
    bool lossy = false;
    std::optional<Expr> operand;
    std::optional<long long> substitution_exponent;
};

inline std::string describe(const Step& s) {
    std::string name = to_string(s.rule);
    if (s.operand) return name + "(" + to_string(*s.operand) + ")";
    if (s.substitution_exponent)
        return name + "(y = x^" + std::to_string(*s.substitution_exponent) + ")";
    return name;
}

/// An ordered chain of steps. append enforces that each input equals the
/// previous output, so the overall relation is always the composition
/// table folded over the chain.
class Trace {
    std::vector<Step> steps_;
    SolutionRelation overall_ = SolutionRelation::Equivalent;

public:
    void append(Step s) {
        if (s.relation == SolutionRelation::Subset && !s.lossy)
            throw std::invalid_argument("Subset step without the lossy marker");
        if (!steps_.empty() && !(steps_.back().output == s.input))
            throw BrokenChain("step input does not match the previous output");
        overall_ = compose(overall_, s.relation);
        steps_.push_back(std::move(s));
    }

    const std::vector<Step>& steps() const { return steps_; }
    bool empty() const { return steps_.empty(); }
    size_t size() const { return steps_.size(); }
    const Step& operator[](size_t i) const { return steps_[i]; }
    const Step& back() const { return steps_.back(); }
    SolutionRelation overall() const { return overall_; }
};

/// Folds the composition table over a chain, checking the chaining
/// invariant first.
inline SolutionRelation compose(const std::vector<Step>& steps) {
    SolutionRelation r = SolutionRelation::Equivalent;
    for (size_t i = 0; i < steps.size(); ++i) {
        if (i && !(steps[i - 1].output == steps[i].input))
            throw BrokenChain("step input does not match the previous output");
        r = compose(r, steps[i].relation);
    }
    return r;
}

inline SolutionRelation compose(const Trace& t) { return t.overall(); }

namespace detail {

/// Sign of an expression's value over the points of a domain where the
/// expression is defined. Weak variants admit zero; NonZero admits both
/// strict signs.
enum class Sign { Zero, Positive, Negative, NonNegative, NonPositive, NonZero, Unknown };

inline bool sign_nonneg(Sign s) {
    return s == Sign::Zero || s == Sign::Positive || s == Sign::NonNegative;
}
inline bool sign_nonpos(Sign s) {
    return s == Sign::Zero || s == Sign::Negative || s == Sign::NonPositive;
}
inline bool sign_nonzero(Sign s) {
    return s == Sign::Positive || s == Sign::Negative || s == Sign::NonZero;
}

inline Sign sign_negate(Sign s) {
    switch (s) {
        case Sign::Positive: return Sign::Negative;
        case Sign::Negative: return Sign::Positive;
        case Sign::NonNegative: return Sign::NonPositive;
        case Sign::NonPositive: return Sign::NonNegative;
        default: return s;
    }
}

inline Sign sign_add(Sign a, Sign b) {
    if (a == Sign::Zero) return b;
    if (b == Sign::Zero) return a;
    if (sign_nonneg(a) && sign_nonneg(b))
        return (a == Sign::Positive || b == Sign::Positive) ? Sign::Positive : Sign::NonNegative;
    if (sign_nonpos(a) && sign_nonpos(b))
        return (a == Sign::Negative || b == Sign::Negative) ? Sign::Negative : Sign::NonPositive;
    return Sign::Unknown;
}

inline Sign sign_mul(Sign a, Sign b) {
    if (a == Sign::Zero || b == Sign::Zero) return Sign::Zero;
    if (a == Sign::Unknown || b == Sign::Unknown) return Sign::Unknown;
    if (a == Sign::NonZero || b == Sign::NonZero) {
        Sign o = a == Sign::NonZero ? b : a;
        return sign_nonzero(o) ? Sign::NonZero : Sign::Unknown;
    }
    bool strict = (a == Sign::Positive || a == Sign::Negative) &&
                  (b == Sign::Positive || b == Sign::Negative);
    bool neg = (a == Sign::Negative || a == Sign::NonPositive) !=
               (b == Sign::Negative || b == Sign::NonPositive);
    if (strict) return neg ? Sign::Negative : Sign::Positive;
    return neg ? Sign::NonPositive : Sign::NonNegative;
}

/// Least upper bound: the weakest claim implied by both alternatives.
inline Sign sign_join(Sign a, Sign b) {
    if (a == b) return a;
    if (a == Sign::Unknown || b == Sign::Unknown) return Sign::Unknown;
    if (sign_nonneg(a) && sign_nonneg(b)) return Sign::NonNegative;
    if (sign_nonpos(a) && sign_nonpos(b)) return Sign::NonPositive;
    if (sign_nonzero(a) && sign_nonzero(b)) return Sign::NonZero;
    return Sign::Unknown;
}

inline Sign interval_sign(const RealInterval& p) {
    if (p.is_point()) {
        int s = sgn(*p.lo);
        return s > 0 ? Sign::Positive : s < 0 ? Sign::Negative : Sign::Zero;
    }
    if (p.lo && (*p.lo > 0 || (*p.lo == 0 && !p.lo_closed))) return Sign::Positive;
    if (p.lo && *p.lo == 0) return Sign::NonNegative;
    if (p.hi && (*p.hi < 0 || (*p.hi == 0 && !p.hi_closed))) return Sign::Negative;
    if (p.hi && *p.hi == 0) return Sign::NonPositive;
    return Sign::Unknown;
}

/// Sign decidable from the shape of the expression alone (sums and
/// products of terms with known sign, even roots and powers, exp).
inline Sign structural_sign(const Expr& e, const Domain& d) {
    switch (e.kind()) {
        case ExprKind::RationalLit: {
            int s = sgn(e.rational_value());
            return s > 0 ? Sign::Positive : s < 0 ? Sign::Negative : Sign::Zero;
        }
        case ExprKind::Var: {
            if (d.parts().empty()) return Sign::Unknown;
            Sign acc = interval_sign(d.parts()[0]);
            for (size_t i = 1; i < d.parts().size(); ++i)
                acc = sign_join(acc, interval_sign(d.parts()[i]));
            return acc;
        }
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return Sign::Positive;
        case ExprKind::Neg:
            return sign_negate(structural_sign(e.child(0), d));
        case ExprKind::Add:
            return sign_add(structural_sign(e.child(0), d), structural_sign(e.child(1), d));
        case ExprKind::Sub:
            return sign_add(structural_sign(e.child(0), d),
                            sign_negate(structural_sign(e.child(1), d)));
        case ExprKind::Mul:
            return sign_mul(structural_sign(e.child(0), d), structural_sign(e.child(1), d));
        case ExprKind::Div: {
            Sign b = structural_sign(e.child(1), d);
            // where the quotient is defined the denominator is nonzero
            if (b == Sign::NonNegative) b = Sign::Positive;
            if (b == Sign::NonPositive) b = Sign::Negative;
            if (b == Sign::Zero) return Sign::Unknown;
            if (b == Sign::Unknown) b = Sign::NonZero;
            return sign_mul(structural_sign(e.child(0), d), b);
        }
        case ExprKind::IntPow: {
            long long k = e.ipow_exponent();
            Sign b = structural_sign(e.child(0), d);
            if (k == 0) return Sign::Positive;
            if (k % 2 == 0) {
                if (k < 0) return Sign::Positive;
                if (b == Sign::Zero) return Sign::Zero;
                return sign_nonzero(b) ? Sign::Positive : Sign::NonNegative;
            }
            if (k > 0) return b;
            if (b == Sign::NonNegative) return Sign::Positive;
            if (b == Sign::NonPositive) return Sign::Negative;
            if (b == Sign::Zero || b == Sign::Unknown) return Sign::NonZero;
            return b;
        }
        case ExprKind::Root: {
            Sign b = structural_sign(e.child(0), d);
            if (e.root_index() % 2 == 1) return b;
            if (b == Sign::Zero) return Sign::Zero;
            if (b == Sign::Positive || b == Sign::NonZero) return Sign::Positive;
            return Sign::NonNegative;
        }
        case ExprKind::Exp:
            return Sign::Positive;
        case ExprKind::LambertW:
            if (e.w_branch() == -1) return Sign::Negative;
            return structural_sign(e.child(0), d);
        case ExprKind::Ln:
        case ExprKind::Sin:
        case ExprKind::Cos:
            return Sign::Unknown;
    }
    return Sign::Unknown;
}

/// Certified sign of e over d, where e is defined: structural rules
/// first, then exact sign sets on the rational-function fragment, then
/// adaptive interval refinement of each component.
inline Sign sign_on(const Expr& e, const Domain& d, int depth = 12,
                    mpfr_prec_t max_prec = 1024) {
    if (d.is_empty()) return Sign::Unknown;
    Sign s = structural_sign(e, d);
    if (s == Sign::Zero || s == Sign::Positive || s == Sign::Negative) return s;

    bool nn = s == Sign::NonNegative;
    bool np = s == Sign::NonPositive;
    bool nz = s == Sign::NonZero;
    if (ratfunc_extract(e)) {
        auto covered = [&](const Expr& u, SignTarget t) {
            // sign sets are conservative subsets, so coverage certifies
            return intersect(d, expr_sign_set(u, t)) == d;
        };
        nn = nn || covered(e, SignTarget::NonNegative);
        np = np || covered(fold(Expr::neg(e)), SignTarget::NonNegative);
        nz = nz || covered(e, SignTarget::NonZero);
    }
    bool decided = (nn && nz) || (np && nz) || (nn && np);
    if (!decided && depth > 0) {
        std::optional<Sign> a;
        bool any = false;
        for (const auto& p : d.parts()) {
            try {
                CertifiedSign c = certified_sign_adaptive(e, p.lo, p.hi, depth, max_prec);
                Sign ps = c == CertifiedSign::Positive   ? Sign::Positive
                          : c == CertifiedSign::Negative ? Sign::Negative
                                                         : Sign::Unknown;
                a = any ? sign_join(*a, ps) : ps;
                any = true;
                if (*a == Sign::Unknown) break;
            } catch (const EmptyIntersection&) {
                // e is undefined on this component; it constrains nothing
            }
        }
        if (any && *a != Sign::Unknown) {
            if (*a == Sign::Positive || *a == Sign::Negative) return *a;
            nz = true;
        }
    }
    if (nn && nz) return Sign::Positive;
    if (np && nz) return Sign::Negative;
    if (nn && np) return Sign::Zero;
    if (nn) return Sign::NonNegative;
    if (np) return Sign::NonPositive;
    if (nz) return Sign::NonZero;
    return Sign::Unknown;
}

/// True when e is certainly defined at every point of d.
inline bool defined_on(const Expr& e, const Domain& d) {
    if (total_on_reals(e)) return true;
    return intersect(d, natural_domain(e)) == d;
}

struct SignedTerm {
    int sign;  // +1 or -1
    Expr term;
};

inline void add_terms(const Expr& e, int sign, std::vector<SignedTerm>& out) {
    switch (e.kind()) {
        case ExprKind::Add:
            add_terms(e.child(0), sign, out);
            add_terms(e.child(1), sign, out);
            return;
        case ExprKind::Sub:
            add_terms(e.child(0), sign, out);
            add_terms(e.child(1), -sign, out);
            return;
        case ExprKind::Neg:
            add_terms(e.child(0), -sign, out);
            return;
        default:
            out.push_back({sign, e});
    }
}

/// Removes structurally equal terms of opposite sign. Only valid when
/// every term is defined on the equation's domain.
inline void cancel_opposites(std::vector<SignedTerm>& ts) {
    for (size_t i = 0; i < ts.size();) {
        bool erased = false;
        for (size_t j = i + 1; j < ts.size(); ++j) {
            if (ts[i].sign != ts[j].sign && ts[i].term == ts[j].term) {
                ts.erase(ts.begin() + j);
                ts.erase(ts.begin() + i);
                erased = true;
                break;
            }
        }
        if (!erased) ++i;
    }
}

/// Canonical sum: the polynomial part first in descending powers, then
/// the remaining terms in their given order.
inline Expr assemble_sum(UniPoly base, std::vector<SignedTerm> rest) {
    std::vector<SignedTerm> tail;
    for (auto& t : rest) {
        if (auto p = from_expr(t.term)) {
            base = t.sign > 0 ? base + *p : base - *p;
        } else {
            tail.push_back(std::move(t));
        }
    }
    Expr out = to_expr(base);
    bool first = base.is_zero() && !tail.empty();
    for (const auto& t : tail) {
        if (first) {
            out = t.sign > 0 ? t.term : fold(Expr::neg(t.term));
            first = false;
        } else {
            out = t.sign > 0 ? Expr::add(out, t.term) : Expr::sub(out, t.term);
        }
    }
    return out;
}

inline Expr rebuild_sum(std::vector<SignedTerm> terms) {
    return assemble_sum(UniPoly::zero(), std::move(terms));
}

/// Splits c*root(n, u) (or a bare root) into its polynomial coefficient
/// and the radical factor.
inline std::optional<std::pair<Expr, Expr>> split_radical_term(const Expr& t) {
    if (t.kind() == ExprKind::Root) return std::pair{Expr::integer(1), t};
    if (t.kind() == ExprKind::Mul) {
        Expr a = t.child(0), b = t.child(1);
        if (b.kind() == ExprKind::Root && from_expr(a)) return std::pair{a, b};
        if (a.kind() == ExprKind::Root && from_expr(b)) return std::pair{b, a};
    }
    return std::nullopt;
}

inline Expr product_expr(const Expr& a, const Expr& b) {
    auto pa = from_expr(a), pb = from_expr(b);
    if (pa && pb) return to_expr(*pa * *pb);
    return fold(Expr::mul(a, b));
}

/// Expanded square of a side: polynomial content is collected exactly,
/// same-index radicals combine as root(n,u)*root(n,v) = root(n,u*v), and
/// (c*sqrt(u))^2 loses its radical. All identities hold wherever the
/// original factors are defined, which the equation's domain guarantees.
inline Expr expand_square(const Expr& side) {
    std::vector<SignedTerm> ts;
    add_terms(side, 1, ts);

    UniPoly acc = UniPoly::zero();
    std::vector<SignedTerm> rest;

    auto radical_of = [](const Expr& t) -> std::optional<std::pair<UniPoly, Expr>> {
        auto sp = split_radical_term(t);
        if (!sp) return std::nullopt;
        return std::pair{*from_expr(sp->first), sp->second};
    };

    for (size_t i = 0; i < ts.size(); ++i) {
        for (size_t j = i; j < ts.size(); ++j) {
            Rational factor = Rational(i == j ? 1 : 2) * ts[i].sign * ts[j].sign;
            auto pi = from_expr(ts[i].term), pj = from_expr(ts[j].term);
            if (pi && pj) {
                acc = acc + UniPoly::constant(factor) * *pi * *pj;
                continue;
            }
            if (pi || pj) {
                const UniPoly& p = pi ? *pi : *pj;
                const Expr& other = pi ? ts[j].term : ts[i].term;
                if (auto r = radical_of(other)) {
                    Expr coeff = to_expr(UniPoly::constant(factor) * p * r->first);
                    rest.push_back({1, fold(Expr::mul(coeff, r->second))});
                } else {
                    Expr coeff = to_expr(UniPoly::constant(factor) * p);
                    rest.push_back({1, fold(Expr::mul(coeff, other))});
                }
                continue;
            }
            auto ri = radical_of(ts[i].term), rj = radical_of(ts[j].term);
            if (i == j && ri && ri->second.root_index() % 2 == 0) {
                // (c*root(2k, u))^2 = c^2 * root(k, u)
                long long n = ri->second.root_index();
                Expr u = ri->second.child(0);
                Expr body = n == 2 ? u : Expr::root(n / 2, u);
                if (auto pu = n == 2 ? from_expr(u) : std::nullopt) {
                    acc = acc + UniPoly::constant(factor) * ri->first * ri->first * *pu;
                } else {
                    Expr coeff = to_expr(UniPoly::constant(factor) * ri->first * ri->first);
                    rest.push_back({1, fold(Expr::mul(coeff, body))});
                }
                continue;
            }
            if (ri && rj && ri->second.root_index() == rj->second.root_index()) {
                Expr u = ri->second.child(0), v = rj->second.child(0);
                Expr coeff = to_expr(UniPoly::constant(factor) * ri->first * rj->first);
                Expr body = Expr::root(ri->second.root_index(), product_expr(u, v));
                rest.push_back({1, fold(Expr::mul(coeff, body))});
                continue;
            }
            Expr prod = i == j ? Expr::intpow(ts[i].term, 2)
                               : Expr::mul(ts[i].term, ts[j].term);
            rest.push_back({1, fold(Expr::mul(Expr::rational(factor), prod))});
        }
    }
    return assemble_sum(std::move(acc), std::move(rest));
}

}  // namespace detail

/// Analysis limits for the sign certification a rule may need.
struct StepOptions {
    int sign_depth = 12;
    mpfr_prec_t sign_prec = 1024;
    bool acknowledge_lossy = false;  // DivBoth by a possibly-zero divisor
};

namespace detail {

/// Output equation over the unchanged domain; a rule that cannot keep the
/// whole domain must not pretend otherwise.
inline Equation same_domain_output(const Equation& in, Expr lhs, Expr rhs) {
    Equation out(std::move(lhs), std::move(rhs), in.domain());
    if (!(out.domain() == in.domain()))
        throw DomainMismatch("transformed sides are not defined on the whole domain");
    return out;
}

inline Step shift_rule(const Equation& eq, const Expr& raw, bool subtract,
                       const StepOptions&) {
    Expr t = fold(raw);
    if (!defined_on(t, eq.domain()))
        throw DomainMismatch("operand is not defined on the whole domain");
    int sign = subtract ? -1 : 1;
    std::vector<SignedTerm> l, r;
    add_terms(eq.lhs(), 1, l);
    add_terms(t, sign, l);
    add_terms(eq.rhs(), 1, r);
    add_terms(t, sign, r);
    cancel_opposites(l);
    cancel_opposites(r);
    Equation out = same_domain_output(eq, rebuild_sum(std::move(l)), rebuild_sum(std::move(r)));
    return Step{subtract ? RuleId::SubBoth : RuleId::AddBoth,
                eq,
                std::move(out),
                SolutionRelation::Equivalent,
                {},
                false,
                t,
                std::nullopt};
}

}  // namespace detail

/// lhs + t = rhs + t over the same domain. The operand must be defined
/// everywhere on it; equal terms of opposite sign cancel.
inline Step add_both(const Equation& eq, const Expr& t, const StepOptions& opt = {}) {
    return detail::shift_rule(eq, t, false, opt);
}

inline Step sub_both(const Equation& eq, const Expr& t, const StepOptions& opt = {}) {
    return detail::shift_rule(eq, t, true, opt);
}

/// lhs*t = rhs*t. Equivalent when t is certified nonzero on the domain;
/// otherwise Superset (zeros of t join the solution set) with the side
/// condition t != 0. Never Subset.
inline Step mul_both(const Equation& eq, const Expr& raw, const StepOptions& opt = {}) {
    Expr t = fold(raw);
    if (!detail::defined_on(t, eq.domain()))
        throw DomainMismatch("operand is not defined on the whole domain");
    Equation out = detail::same_domain_output(eq, detail::product_expr(eq.lhs(), t),
                                              detail::product_expr(eq.rhs(), t));
    detail::Sign s = detail::sign_on(t, eq.domain(), opt.sign_depth, opt.sign_prec);
    if (detail::sign_nonzero(s))
        return Step{RuleId::MulBoth, eq,     std::move(out), SolutionRelation::Equivalent,
                    {},              false,  t,              std::nullopt};
    return Step{RuleId::MulBoth,
                eq,
                std::move(out),
                SolutionRelation::Superset,
                {SideCondition{t, SignPredicate::NonZero}},
                false,
                t,
                std::nullopt};
}

/// lhs/t = rhs/t. Equivalent when t is certified nonzero (and defined) on
/// the whole domain. Otherwise the step removes zeros of t from the
/// domain, i.e. it may lose solutions: that Subset step is only produced
/// when the caller acknowledges the loss.
inline Step div_both(const Equation& eq, const Expr& raw, const StepOptions& opt = {}) {
    Expr t = fold(raw);
    if (t.is_zero()) throw RuleNotApplicable("division by zero");
    Equation out(fold(Expr::div(eq.lhs(), t)), fold(Expr::div(eq.rhs(), t)), eq.domain());
    bool clean = detail::defined_on(t, eq.domain()) &&
                 detail::sign_nonzero(detail::sign_on(t, eq.domain(), opt.sign_depth, opt.sign_prec)) &&
                 out.domain() == eq.domain();
    if (clean)
        return Step{RuleId::DivBoth, eq,    std::move(out), SolutionRelation::Equivalent,
                    {},              false, t,              std::nullopt};
    if (!opt.acknowledge_lossy)
        throw RuleNotApplicable(
            "divisor may vanish on the domain; acknowledge the lossy step to proceed");
    return Step{RuleId::DivBoth,
                eq,
                std::move(out),
                SolutionRelation::Subset,
                {SideCondition{t, SignPredicate::NonZero}},
                true,
                t,
                std::nullopt};
}

/// lhs^2 = rhs^2 with the square expanded. Equivalent when both sides are
/// certified to share a weak sign on the domain; otherwise Superset, and
/// the side condition pins where the signs agree.
inline Step square_both(const Equation& eq, const StepOptions& opt = {}) {
    using detail::Sign;
    Equation out = detail::same_domain_output(eq, detail::expand_square(eq.lhs()),
                                              detail::expand_square(eq.rhs()));
    Sign sl = detail::sign_on(eq.lhs(), eq.domain(), opt.sign_depth, opt.sign_prec);
    Sign sr = detail::sign_on(eq.rhs(), eq.domain(), opt.sign_depth, opt.sign_prec);
    bool l_nn = detail::sign_nonneg(sl), l_np = detail::sign_nonpos(sl);
    bool r_nn = detail::sign_nonneg(sr), r_np = detail::sign_nonpos(sr);
    if ((l_nn && r_nn) || (l_np && r_np))
        return Step{RuleId::SquareBoth, eq,    std::move(out), SolutionRelation::Equivalent,
                    {},                 false, std::nullopt,   std::nullopt};
    SideCondition cond = r_nn   ? SideCondition{eq.lhs(), SignPredicate::NonNegative}
                         : r_np ? SideCondition{eq.lhs(), SignPredicate::NonPositive}
                         : l_nn ? SideCondition{eq.rhs(), SignPredicate::NonNegative}
                         : l_np ? SideCondition{eq.rhs(), SignPredicate::NonPositive}
                                : SideCondition{detail::product_expr(eq.lhs(), eq.rhs()),
                                                SignPredicate::NonNegative};
    return Step{RuleId::SquareBoth,
                eq,
                std::move(out),
                SolutionRelation::Superset,
                {std::move(cond)},
                false,
                std::nullopt,
                std::nullopt};
}

/// Which injective map to apply to both sides.
struct Injection {
    enum class Kind { Exp, Ln, OddPower, Monotone } kind;
    long long exponent = 0;        // OddPower
    std::optional<Expr> function;  // Monotone: an expression in x

    static Injection exp_map() { return {Kind::Exp, 0, std::nullopt}; }
    static Injection ln_map() { return {Kind::Ln, 0, std::nullopt}; }
    static Injection odd_power(long long k) { return {Kind::OddPower, k, std::nullopt}; }
    static Injection monotone(Expr g) { return {Kind::Monotone, 0, std::move(g)}; }
};

namespace detail {

inline Expr strip_inverse_pair(const Expr& e) {
    if (e.kind() == ExprKind::Ln && e.child(0).kind() == ExprKind::Exp)
        return e.child(0).child(0);
    // exp(ln(u)) = u needs u > 0, which holds wherever ln(u) is defined;
    // the input equation's domain already lies inside that set.
    if (e.kind() == ExprKind::Exp && e.child(0).kind() == ExprKind::Ln)
        return e.child(0).child(0);
    return e;
}

inline std::optional<RealInterval> range_hull(const Expr& e, const Domain& d,
                                              mpfr_prec_t prec) {
    std::optional<Rational> lo, hi;
    for (const auto& p : d.parts()) {
        try {
            DyadicInterval img = eval_interval(e, interval_box(p.lo, p.hi, prec), prec);
            if (!img.is_finite()) return std::nullopt;
            Rational l = img.lo_q(), h = img.hi_q();
            if (!lo || l < *lo) lo = l;
            if (!hi || h > *hi) hi = h;
        } catch (const EmptyIntersection&) {
            continue;
        }
    }
    if (!lo) return std::nullopt;
    return RealInterval::between(*lo, *hi);
}

}  // namespace detail

/// Applies an injective function to both sides: Equivalent, since equal
/// values stay equal and distinct values stay distinct on the relevant
/// range. Ln requires both sides certified positive; negative odd powers
/// require both sides certified nonzero; a general monotone expression is
/// certified by the sign of its derivative over an enclosure of both
/// sides' ranges.
inline Step apply_injective(const Equation& eq, const Injection& inj,
                            const StepOptions& opt = {}) {
    using detail::Sign;
    Expr l = eq.lhs(), r = eq.rhs();
    Expr ol = l, orr = r;
    switch (inj.kind) {
        case Injection::Kind::Exp:
            ol = fold(detail::strip_inverse_pair(Expr::exp(l)));
            orr = fold(detail::strip_inverse_pair(Expr::exp(r)));
            break;
        case Injection::Kind::Ln: {
            Sign sl = detail::sign_on(l, eq.domain(), opt.sign_depth, opt.sign_prec);
            Sign sr = detail::sign_on(r, eq.domain(), opt.sign_depth, opt.sign_prec);
            if (sl != Sign::Positive || sr != Sign::Positive)
                throw RuleNotApplicable("ln needs both sides certified positive");
            ol = fold(detail::strip_inverse_pair(Expr::ln(l)));
            orr = fold(detail::strip_inverse_pair(Expr::ln(r)));
            break;
        }
        case Injection::Kind::OddPower: {
            long long k = inj.exponent;
            if (k % 2 == 0) throw RuleNotApplicable("even powers are SquareBoth territory");
            if (k < 0) {
                Sign sl = detail::sign_on(l, eq.domain(), opt.sign_depth, opt.sign_prec);
                Sign sr = detail::sign_on(r, eq.domain(), opt.sign_depth, opt.sign_prec);
                if (!detail::sign_nonzero(sl) || !detail::sign_nonzero(sr))
                    throw RuleNotApplicable(
                        "negative powers need both sides certified nonzero");
            }
            auto powered = [&](const Expr& s) {
                auto p = from_expr(s);
                if (p && k > 0) return to_expr(p->pow(static_cast<unsigned long>(k)));
                return fold(Expr::intpow(s, k));
            };
            ol = powered(l);
            orr = powered(r);
            break;
        }
        case Injection::Kind::Monotone: {
            if (!inj.function || !contains_var(*inj.function))
                throw RuleNotApplicable("monotone map must mention the variable");
            Expr g = *inj.function;
            auto hl = detail::range_hull(l, eq.domain(), opt.sign_prec);
            auto hr = detail::range_hull(r, eq.domain(), opt.sign_prec);
            if (!hl || !hr)
                throw RuleNotApplicable("side ranges are not certified bounded");
            RealInterval joint = *hl;
            if (*hr->lo < *joint.lo) joint.lo = hr->lo;
            if (*hr->hi > *joint.hi) joint.hi = hr->hi;
            Domain range(joint);
            if (!detail::defined_on(g, range))
                throw RuleNotApplicable("map is not certified defined on the side ranges");
            Sign ds = detail::sign_on(differentiate(g), range, opt.sign_depth, opt.sign_prec);
            if (ds != Sign::Positive && ds != Sign::Negative)
                throw RuleNotApplicable("map is not certified strictly monotone");
            ol = fold(substitute(g, l));
            orr = fold(substitute(g, r));
            break;
        }
    }
    Equation out = detail::same_domain_output(eq, std::move(ol), std::move(orr));
    return Step{RuleId::ApplyInjective, eq,    std::move(out), SolutionRelation::Equivalent,
                {},                     false, std::nullopt,   std::nullopt};
}

namespace detail {

/// Image of d under x -> x^k, exactly (rational endpoints power to
/// rational endpoints).
inline Domain power_image(const Domain& d, long long k) {
    std::vector<RealInterval> parts;
    auto powq = [&](const Rational& v) { return rational_pow(v, k); };
    for (const auto& p : d.parts()) {
        if (k % 2 == 1) {
            RealInterval out;
            out.lo = p.lo ? std::optional<Rational>(powq(*p.lo)) : std::nullopt;
            out.hi = p.hi ? std::optional<Rational>(powq(*p.hi)) : std::nullopt;
            out.lo_closed = p.lo && p.lo_closed;
            out.hi_closed = p.hi && p.hi_closed;
            parts.push_back(out);
            continue;
        }
        bool nonneg = p.lo && *p.lo >= 0;
        bool nonpos = p.hi && *p.hi <= 0;
        RealInterval out;
        if (nonneg) {
            out.lo = powq(*p.lo);
            out.lo_closed = p.lo_closed;
            out.hi = p.hi ? std::optional<Rational>(powq(*p.hi)) : std::nullopt;
            out.hi_closed = p.hi && p.hi_closed;
        } else if (nonpos) {
            out.lo = powq(*p.hi);
            out.lo_closed = p.hi_closed;
            out.hi = p.lo ? std::optional<Rational>(powq(*p.lo)) : std::nullopt;
            out.hi_closed = p.lo && p.lo_closed;
        } else {
            // the part straddles zero, so the image starts at 0
            out.lo = Rational(0);
            out.lo_closed = true;
            if (p.lo && p.hi) {
                Rational a = powq(*p.lo), b = powq(*p.hi);
                if (a > b) {
                    out.hi = a;
                    out.hi_closed = p.lo_closed;
                } else if (b > a) {
                    out.hi = b;
                    out.hi_closed = p.hi_closed;
                } else {
                    out.hi = a;
                    out.hi_closed = p.lo_closed || p.hi_closed;
                }
            }
        }
        parts.push_back(out);
    }
    return Domain(std::move(parts), d.approximate());
}

}  // namespace detail

/// Rewrites a polynomial equation whose exponents are all multiples of k
/// as an equation in y = x^k over the image domain. Solutions correspond
/// exactly under real k-th roots, so the pair of reduction and
/// back-substitution is Equivalent.
inline Step substitute_power(const Equation& eq, long long k, const StepOptions& = {}) {
    if (k < 2) throw RuleNotApplicable("substitution exponent must be at least 2");
    auto p = from_expr(fold(Expr::sub(eq.lhs(), eq.rhs())));
    if (!p) throw RuleNotApplicable("sides are not polynomial");
    if (p->is_zero()) throw RuleNotApplicable("equation is identically zero");
    if (p->degree() < k) throw RuleNotApplicable("degree is below the substitution exponent");
    std::vector<Rational> reduced(static_cast<size_t>(p->degree() / k) + 1, Rational(0));
    for (long i = 0; i <= p->degree(); ++i) {
        Rational c = p->coeff(static_cast<size_t>(i));
        if (sgn(c) == 0) continue;
        if (i % k != 0)
            throw RuleNotApplicable("exponents are not all multiples of the substitution power");
        reduced[static_cast<size_t>(i / k)] = c;
    }
    Domain image = detail::power_image(eq.domain(), k);
    Equation out(to_expr(UniPoly(std::move(reduced))), Expr::integer(0), image);
    if (!(out.domain() == image))
        throw DomainMismatch("image domain was not preserved");
    return Step{RuleId::Substitute, eq,    std::move(out), SolutionRelation::Equivalent,
                {},                 false, std::nullopt,   k};
}

/// Moves every non-radical term across, leaving the first radical term
/// alone on the right-hand side: a pure rearrangement, so Equivalent.
inline Step isolate_radical(const Equation& eq, const StepOptions& = {}) {
    std::vector<detail::SignedTerm> ts;
    detail::add_terms(eq.lhs(), 1, ts);
    detail::add_terms(eq.rhs(), -1, ts);
    size_t pick = ts.size();
    for (size_t i = 0; i < ts.size(); ++i) {
        if (detail::split_radical_term(ts[i].term)) {
            pick = i;
            break;
        }
    }
    if (pick == ts.size()) throw RuleNotApplicable("no isolatable radical term");
    detail::SignedTerm chosen = ts[pick];
    ts.erase(ts.begin() + static_cast<long>(pick));
    Expr lhs = detail::rebuild_sum(std::move(ts));
    Expr rhs = chosen.term;
    if (chosen.sign > 0) {
        // negate through the coefficient so the radical stays the tail factor
        auto sp = detail::split_radical_term(chosen.term);
        UniPoly negc = UniPoly::constant(Rational(-1)) * *from_expr(sp->first);
        if (negc.degree() == 0 && negc.coeff(0) == Rational(-1)) {
            rhs = Expr::neg(sp->second);
        } else {
            rhs = Expr::mul(to_expr(negc), sp->second);
        }
    }
    Equation out = detail::same_domain_output(eq, std::move(lhs), std::move(rhs));
    return Step{RuleId::IsolateRadical, eq,    std::move(out), SolutionRelation::Equivalent,
                {},                     false, std::nullopt,   std::nullopt};
}

/// Parameters for apply_step; each rule reads the fields it needs.
struct StepParams {
    std::optional<Expr> operand;          // AddBoth, SubBoth, MulBoth, DivBoth
    std::optional<Injection> injection;   // ApplyInjective
    std::optional<long long> exponent;    // Substitute
    StepOptions options;
};

inline Step apply_step(const Equation& eq, RuleId rule, const StepParams& p = {}) {
    auto need_operand = [&]() -> const Expr& {
        if (!p.operand) throw RuleNotApplicable("rule needs an operand expression");
        return *p.operand;
    };
    switch (rule) {
        case RuleId::AddBoth:
            return add_both(eq, need_operand(), p.options);
        case RuleId::SubBoth:
            return sub_both(eq, need_operand(), p.options);
        case RuleId::MulBoth:
            return mul_both(eq, need_operand(), p.options);
        case RuleId::DivBoth:
            return div_both(eq, need_operand(), p.options);
        case RuleId::SquareBoth:
            return square_both(eq, p.options);
        case RuleId::ApplyInjective:
            if (!p.injection) throw RuleNotApplicable("rule needs an injection");
            return apply_injective(eq, *p.injection, p.options);
        case RuleId::Substitute:
            if (!p.exponent) throw RuleNotApplicable("rule needs an exponent");
            return substitute_power(eq, *p.exponent, p.options);
        case RuleId::IsolateRadical:
            return isolate_radical(eq, p.options);
    }
    throw RuleNotApplicable("unknown rule");
}

}  // namespace solset
