#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "solset/equation.hpp"
#include "solset/expr.hpp"
#include "solset/interval.hpp"
#include "solset/interval_eval.hpp"
#include "solset/natural_domain.hpp"
#include "solset/poly.hpp"
#include "solset/quadfield.hpp"
#include "solset/rewrite.hpp"
#include "solset/special.hpp"

namespace solset {

struct PreconditionViolated : std::logic_error {
    using std::logic_error::logic_error;
};

/// Display form of a + b*sqrt(d); collapses to the rational part when the
/// radical is absent.
inline Expr surd_to_expr(const SurdValue& s) {
    if (s.d == 1 || sgn(s.b) == 0) return Expr::rational(s.a);
    Expr rad = Expr::sqrt(Expr::rational(Rational(s.d)));
    Rational mag = abs(s.b);
    Expr term = mag == 1 ? rad : Expr::mul(Expr::rational(mag), rad);
    if (sgn(s.a) == 0) return sgn(s.b) < 0 ? Expr::neg(term) : term;
    return sgn(s.b) < 0 ? Expr::sub(Expr::rational(s.a), term)
                        : Expr::add(Expr::rational(s.a), term);
}

/// One solution value. The exact kinds carry field elements; the certified
/// kinds carry machinery that narrows an enclosure on demand, so any kind
/// can produce an interval of arbitrary width.
class SolutionRep {
public:
    enum class Kind { ExactRational, QuadraticSurd, ClosedForm, CertifiedRoot };

    static SolutionRep exact(Rational v) { return SolutionRep(Storage(std::move(v))); }
    static SolutionRep surd(const SurdValue& v) {
        if (v.is_rational() || sgn(v.b) == 0) return exact(v.a);
        return SolutionRep(Storage(v));
    }
    static SolutionRep closed_form(Expr e) { return SolutionRep(Storage(std::move(e))); }
    static SolutionRep isolated(IsolatedRoot r) { return SolutionRep(Storage(std::move(r))); }
    static SolutionRep inverse(InverseFunctionValue v) { return SolutionRep(Storage(std::move(v))); }

    Kind kind() const {
        switch (v_.index()) {
            case 0: return Kind::ExactRational;
            case 1: return Kind::QuadraticSurd;
            case 2: return Kind::ClosedForm;
            default: return Kind::CertifiedRoot;
        }
    }

    const Rational& rational_value() const { return std::get<Rational>(v_); }
    const SurdValue& surd_value() const { return std::get<SurdValue>(v_); }
    const Expr& closed_form_expr() const { return std::get<Expr>(v_); }
    const IsolatedRoot* isolated_root() const { return std::get_if<IsolatedRoot>(&v_); }
    const InverseFunctionValue* inverse_function() const {
        return std::get_if<InverseFunctionValue>(&v_);
    }

    /// Exact value as a quadratic field element, for the two exact kinds.
    std::optional<QuadExt> exact_value() const {
        if (const Rational* r = std::get_if<Rational>(&v_)) return QuadExt(*r);
        if (const SurdValue* s = std::get_if<SurdValue>(&v_)) return QuadExt(*s);
        return std::nullopt;
    }

    /// Interval guaranteed to contain the value; grows no wider than
    /// 2^-precision up to outward rounding.
    DyadicInterval enclosure(mpfr_prec_t precision) const {
        if (const Rational* r = std::get_if<Rational>(&v_))
            return DyadicInterval::from_rational(*r, precision);
        if (const SurdValue* s = std::get_if<SurdValue>(&v_))
            return QuadExt(*s).enclosure(precision);
        if (const Expr* e = std::get_if<Expr>(&v_))
            return eval_interval_at(*e, Rational(0), precision);
        if (const IsolatedRoot* ir = std::get_if<IsolatedRoot>(&v_)) {
            if (ir->exact) return DyadicInterval::from_rational(*ir->exact, precision);
            IsolatedRoot copy = *ir;
            copy.refine_below(
                make_rational(Int(1), Int(1) << static_cast<unsigned long>(precision + 2)));
            return detail::interval_box(copy.lo, copy.hi, precision);
        }
        return inverse_value(std::get<InverseFunctionValue>(v_), precision);
    }

    /// Symbolic form, when one exists.
    std::optional<Expr> as_expr() const {
        switch (kind()) {
            case Kind::ExactRational: return Expr::rational(rational_value());
            case Kind::QuadraticSurd: return surd_to_expr(surd_value());
            case Kind::ClosedForm: return closed_form_expr();
            default: return std::nullopt;
        }
    }

private:
    using Storage = std::variant<Rational, SurdValue, Expr, IsolatedRoot, InverseFunctionValue>;
    explicit SolutionRep(Storage s) : v_(std::move(s)) {}
    Storage v_;
};

inline std::string to_string(const SolutionRep& r) {
    if (std::optional<Expr> e = r.as_expr()) return to_string(*e);
    if (const IsolatedRoot* ir = r.isolated_root())
        return "root of " + to_string(to_expr(ir->poly)) + " in (" + to_string(ir->lo) + ", " +
               to_string(ir->hi) + ")";
    const InverseFunctionValue* iv = r.inverse_function();
    return "inverse of " + to_string(iv->function()) + " at " + to_string(iv->target());
}

class SolutionSet {
public:
    enum class Kind { Finite, Empty, Identity, Unsolved };

    SolutionSet() = default;

    static SolutionSet finite(std::vector<SolutionRep> reps) {
        SolutionSet s;
        s.kind_ = reps.empty() ? Kind::Empty : Kind::Finite;
        s.solutions_ = std::move(reps);
        return s;
    }
    static SolutionSet empty() { return SolutionSet(); }
    static SolutionSet identity() {
        SolutionSet s;
        s.kind_ = Kind::Identity;
        return s;
    }
    static SolutionSet unsolved(std::string reason) {
        SolutionSet s;
        s.kind_ = Kind::Unsolved;
        s.reason_ = std::move(reason);
        return s;
    }

    Kind kind() const { return kind_; }
    const std::vector<SolutionRep>& solutions() const { return solutions_; }
    const std::string& reason() const { return reason_; }

private:
    Kind kind_ = Kind::Empty;
    std::vector<SolutionRep> solutions_;
    std::string reason_;
};

/// Knobs for solve(). Passed by value everywhere; nothing reads ambient
/// state, so equal inputs give byte-equal results.
struct SolverConfig {
    mpfr_prec_t precision_start = 256;
    mpfr_prec_t precision_max = 4096;
    int falsification_grid = 17;
    bool enable_polynomial = true;
    bool enable_rational = true;
    bool enable_radical = true;
    bool enable_lambert = true;
    bool enable_monotone = true;
    int max_steps = 64;
    int trace_verbosity = 1;
};

enum class VerifyOutcome { Verified, Rejected, Inconclusive };

inline std::string to_string(VerifyOutcome o) {
    switch (o) {
        case VerifyOutcome::Verified: return "verified";
        case VerifyOutcome::Rejected: return "rejected";
        default: return "inconclusive";
    }
}

struct VerifyReport {
    VerifyOutcome outcome;
    std::string detail;
};

/// Fate of one candidate produced under a widening chain.
struct CandidateReport {
    SolutionRep candidate;
    VerifyOutcome outcome;
    std::string detail;
};

struct SolveResult {
    SolutionSet set;
    Trace trace;
    std::vector<CandidateReport> candidates;
    std::vector<std::string> notes;
};

enum class IdentityStatus { Identity, NotIdentity, Unknown };

namespace detail {

/// A handful of probe points inside d, spread across every part.
inline std::vector<Rational> sample_points(const Domain& d, int budget) {
    std::vector<Rational> pts;
    auto push = [&](const Rational& q) {
        if (!d.contains(q)) return;
        for (const Rational& p : pts)
            if (p == q) return;
        pts.push_back(q);
    };
    long n = budget < 2 ? 2 : budget;
    for (const RealInterval& part : d.parts()) {
        if (part.lo && part.hi) {
            push(*part.lo);
            push(*part.hi);
            for (long k = 1; k < n; ++k)
                push(*part.lo + (*part.hi - *part.lo) * Rational(k) / Rational(n));
        } else if (part.lo) {
            push(*part.lo);
            for (long k = 0; k < n; ++k) push(*part.lo + Rational(1 + k * k));
        } else if (part.hi) {
            push(*part.hi);
            for (long k = 0; k < n; ++k) push(*part.hi - Rational(1 + k * k));
        } else {
            for (long k = 0; k <= n; ++k) {
                push(Rational(k));
                push(Rational(-k));
                push(make_rational(Int(2 * k + 1), Int(2)));
            }
        }
    }
    return pts;
}

}  // namespace detail

/// Identity when lhs - rhs provably vanishes on the whole domain,
/// NotIdentity when some domain point certifiably separates the sides.
inline IdentityStatus identity_check(const Equation& eq, int grid = 17) {
    if (fold(eq.lhs()) == fold(eq.rhs())) return IdentityStatus::Identity;
    Expr diff = fold(Expr::sub(eq.lhs(), eq.rhs()));
    if (auto rf = detail::ratfunc_extract(diff)) {
        if (rf->first.is_zero()) return IdentityStatus::Identity;
    }
    for (const Rational& pt : detail::sample_points(eq.domain(), grid)) {
        try {
            if (std::optional<Rational> v = evaluate_exact(diff, pt)) {
                if (*v != 0) return IdentityStatus::NotIdentity;
                continue;
            }
        } catch (const DomainViolation&) {
            continue;
        }
        try {
            DyadicInterval enc = eval_interval_at(diff, pt, 192);
            if (enc.strictly_positive() || enc.strictly_negative())
                return IdentityStatus::NotIdentity;
        } catch (const EmptyIntersection&) {
        }
    }
    return IdentityStatus::Unknown;
}

namespace detail {

/// Strict value order. Exact values compare in the field; otherwise the
/// enclosures refine until they separate, which distinct values always do.
inline bool rep_less(const SolutionRep& a, const SolutionRep& b) {
    std::optional<QuadExt> ea = a.exact_value(), eb = b.exact_value();
    if (ea && eb) {
        try {
            return (*ea - *eb).sign() < 0;
        } catch (const IncompatibleField&) {
        }
    }
    for (mpfr_prec_t prec = 64; prec <= (mpfr_prec_t(1) << 16); prec *= 2) {
        DyadicInterval ia = a.enclosure(prec), ib = b.enclosure(prec);
        if (ia.hi_q() < ib.lo_q()) return true;
        if (ib.hi_q() < ia.lo_q()) return false;
    }
    throw std::logic_error("solution values could not be separated");
}

inline bool quad_in_part(const QuadExt& v, const RealInterval& part) {
    if (part.lo) {
        int c = (v - QuadExt(*part.lo)).sign();
        if (c < 0 || (c == 0 && !part.lo_closed)) return false;
    }
    if (part.hi) {
        int c = (v - QuadExt(*part.hi)).sign();
        if (c > 0 || (c == 0 && !part.hi_closed)) return false;
    }
    return true;
}

inline bool quad_in_domain(const QuadExt& v, const Domain& d) {
    for (const RealInterval& p : d.parts())
        if (quad_in_part(v, p)) return true;
    return false;
}

/// Exact for field values; certified kinds refine until the enclosure
/// clears every boundary. nullopt when a boundary is still straddled at
/// max_prec.
inline std::optional<bool> rep_in_domain(const SolutionRep& r, const Domain& d,
                                         mpfr_prec_t max_prec) {
    if (std::optional<QuadExt> q = r.exact_value()) return quad_in_domain(*q, d);
    for (mpfr_prec_t prec = 64;; prec *= 2) {
        if (prec > max_prec) prec = max_prec;
        DyadicInterval enc = r.enclosure(prec);
        Rational lo = enc.lo_q(), hi = enc.hi_q();
        bool undecided = false;
        for (const RealInterval& p : d.parts()) {
            bool inside_lo = !p.lo || *p.lo < lo || (p.lo_closed && *p.lo <= lo);
            bool inside_hi = !p.hi || hi < *p.hi || (p.hi_closed && hi <= *p.hi);
            if (inside_lo && inside_hi) return true;
            bool outside = (p.lo && hi < *p.lo) || (p.hi && *p.hi < lo);
            if (!outside) undecided = true;
        }
        if (!undecided) return false;
        if (prec == max_prec) return std::nullopt;
    }
}

inline int radical_count(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::Var:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return 0;
        case ExprKind::Root:
            return 1 + radical_count(e.child(0));
        case ExprKind::Neg:
        case ExprKind::IntPow:
        case ExprKind::Exp:
        case ExprKind::Ln:
        case ExprKind::Sin:
        case ExprKind::Cos:
        case ExprKind::LambertW:
            return radical_count(e.child(0));
        default:
            return radical_count(e.child(0)) + radical_count(e.child(1));
    }
}

/// Roots of p that are not roots of q, as sets: common roots are stripped
/// with all their multiplicities.
inline UniPoly remove_common_roots(UniPoly p, const UniPoly& q) {
    if (q.is_zero()) return p;
    for (;;) {
        UniPoly g = gcd(p, q);
        if (g.degree() < 1) return p;
        p = divmod(p, g).first;
    }
}

/// Real k-th root of an exact value, exact when the result is rational.
inline SolutionRep kth_root_rep(const SurdValue& y, long k) {
    QuadExt v(y);
    if (v.is_rational()) {
        const Rational& q = v.rational_part();
        int s = sgn(q);
        if (s == 0) return SolutionRep::exact(Rational(0));
        Rational mag = abs(q);
        if (std::optional<Rational> r = rational_nth_root(mag, static_cast<unsigned long>(k)))
            return SolutionRep::exact(s < 0 ? Rational(-*r) : *r);
        if (k == 2 && s > 0) {
            // square roots stay in the quadratic field
            std::vector<SurdValue> roots = quadratic_solve(UniPoly({-q, Rational(0), Rational(1)}));
            for (const SurdValue& sv : roots)
                if (QuadExt(sv).sign() > 0) return SolutionRep::surd(sv);
        }
        return SolutionRep::closed_form(Expr::root(k, Expr::rational(q)));
    }
    return SolutionRep::closed_form(Expr::root(k, surd_to_expr(y)));
}

inline SolutionRep negate_rep(const SolutionRep& r) {
    if (r.kind() == SolutionRep::Kind::ExactRational)
        return SolutionRep::exact(-r.rational_value());
    if (r.kind() == SolutionRep::Kind::QuadraticSurd) {
        const SurdValue& s = r.surd_value();
        return SolutionRep::surd({-s.a, -s.b, s.d});
    }
    return SolutionRep::closed_form(Expr::neg(*r.as_expr()));
}

/// Inverse-function view of a simple isolated root: the isolating interval
/// is refined until the squarefree part is certified strictly monotone
/// across it, and the root becomes "value of the inverse at 0".
inline std::optional<InverseFunctionValue> inverse_view(const IsolatedRoot& root) {
    if (!root.simple || root.exact) return std::nullopt;
    Expr f = to_expr(root.sqf);
    IsolatedRoot work = root;
    for (int i = 0; i < 48; ++i) {
        Domain d(RealInterval::between(work.lo, work.hi, true, true));
        try {
            if (prove_monotone(f, d) != Monotonicity::Unknown)
                return InverseFunctionValue(f, d, Expr::integer(0));
        } catch (const std::exception&) {
            return std::nullopt;
        }
        work.refine_once();
    }
    return std::nullopt;
}

struct PolyRoots {
    std::vector<SolutionRep> reps;       // ascending by value
    std::optional<long> substitution_k;  // power substitution finished the tail
    bool isolated_used = false;          // some roots have no radical form
};

/// Every real root of p, each with the most exact representation the
/// root admits: rationals first, then quadratic surds, then closed k-th
/// roots of surds, then certified isolating intervals.
inline PolyRoots poly_real_roots(const UniPoly& p, bool prefer_inverse = false) {
    if (p.is_zero()) throw ZeroPolynomial();
    PolyRoots out;
    UniPoly work = p.primitive();
    if (work.degree() < 1) return out;
    std::vector<Rational> rat = rational_roots(work);
    UniPoly x1 = UniPoly::monomial(Rational(1), 1);
    for (const Rational& r : rat) {
        UniPoly lin = x1 - UniPoly::constant(r);
        while (work.degree() >= 1 && sgn(work.eval(r)) == 0) work = divmod(work, lin).first;
    }
    std::vector<SolutionRep> tail;
    if (work.degree() >= 1 && work.degree() <= 2) {
        for (const SurdValue& s : quadratic_solve(work)) tail.push_back(SolutionRep::surd(s));
    } else if (work.degree() > 2) {
        std::optional<std::pair<long, UniPoly>> red = substitution_reduce(work);
        if (red && red->second.degree() >= 1 && red->second.degree() <= 2) {
            long k = red->first;
            std::vector<SurdValue> ys = quadratic_solve(red->second);
            if (k % 2 == 1) {
                for (const SurdValue& y : ys) tail.push_back(kth_root_rep(y, k));
            } else {
                for (size_t i = ys.size(); i-- > 0;)
                    if (QuadExt(ys[i]).sign() > 0)
                        tail.push_back(negate_rep(kth_root_rep(ys[i], k)));
                for (const SurdValue& y : ys)
                    if (QuadExt(y).sign() > 0) tail.push_back(kth_root_rep(y, k));
            }
            if (rat.empty()) out.substitution_k = k;
        } else {
            for (IsolatedRoot& ir : sturm_isolate(work)) {
                std::optional<InverseFunctionValue> iv;
                if (prefer_inverse) iv = inverse_view(ir);
                if (iv)
                    tail.push_back(SolutionRep::inverse(std::move(*iv)));
                else
                    tail.push_back(SolutionRep::isolated(std::move(ir)));
            }
            out.isolated_used = true;
        }
    }
    std::vector<SolutionRep> heads;
    heads.reserve(rat.size());
    for (const Rational& r : rat) heads.push_back(SolutionRep::exact(r));
    out.reps.reserve(heads.size() + tail.size());
    size_t i = 0, j = 0;
    while (i < heads.size() && j < tail.size())
        out.reps.push_back(rep_less(heads[i], tail[j]) ? std::move(heads[i++])
                                                       : std::move(tail[j++]));
    while (i < heads.size()) out.reps.push_back(std::move(heads[i++]));
    while (j < tail.size()) out.reps.push_back(std::move(tail[j++]));
    return out;
}

enum class DivSign { PlusInf, MinusInf, None };

inline DivSign div_flip(DivSign d) {
    if (d == DivSign::PlusInf) return DivSign::MinusInf;
    if (d == DivSign::MinusInf) return DivSign::PlusInf;
    return DivSign::None;
}

/// Structural divergence of e as x runs to +inf (dir > 0) or -inf:
/// polynomial leading terms, exp and ln of divergent arguments, roots,
/// and sums of divergent and constant pieces. No limit heuristics.
inline DivSign diverges(const Expr& e, int dir) {
    if (std::optional<UniPoly> p = from_expr(e)) {
        if (p->degree() < 1) return DivSign::None;
        int ls = sgn(p->leading());
        if (dir < 0 && p->degree() % 2 == 1) ls = -ls;
        return ls > 0 ? DivSign::PlusInf : DivSign::MinusInf;
    }
    switch (e.kind()) {
        case ExprKind::Neg:
            return div_flip(diverges(e.child(0), dir));
        case ExprKind::Add: {
            DivSign a = diverges(e.child(0), dir), b = diverges(e.child(1), dir);
            if (a != DivSign::None && (a == b || is_constant(e.child(1)))) return a;
            if (b != DivSign::None && is_constant(e.child(0))) return b;
            return DivSign::None;
        }
        case ExprKind::Sub: {
            DivSign a = diverges(e.child(0), dir), b = div_flip(diverges(e.child(1), dir));
            if (a != DivSign::None && (a == b || is_constant(e.child(1)))) return a;
            if (b != DivSign::None && is_constant(e.child(0))) return b;
            return DivSign::None;
        }
        case ExprKind::Mul: {
            Expr cl = fold(e.child(0)), cr = fold(e.child(1));
            if (cl.kind() == ExprKind::RationalLit) {
                int s = sgn(cl.rational_value());
                if (s == 0) return DivSign::None;
                DivSign b = diverges(e.child(1), dir);
                return s > 0 ? b : div_flip(b);
            }
            if (cr.kind() == ExprKind::RationalLit) {
                int s = sgn(cr.rational_value());
                if (s == 0) return DivSign::None;
                DivSign a = diverges(e.child(0), dir);
                return s > 0 ? a : div_flip(a);
            }
            DivSign a = diverges(e.child(0), dir), b = diverges(e.child(1), dir);
            if (a == DivSign::None || b == DivSign::None) return DivSign::None;
            return a == b ? DivSign::PlusInf : DivSign::MinusInf;
        }
        case ExprKind::IntPow: {
            long long k = e.ipow_exponent();
            if (k <= 0) return DivSign::None;
            DivSign a = diverges(e.child(0), dir);
            if (a == DivSign::None) return DivSign::None;
            if (a == DivSign::PlusInf || k % 2 == 0) return DivSign::PlusInf;
            return DivSign::MinusInf;
        }
        case ExprKind::Root: {
            DivSign a = diverges(e.child(0), dir);
            if (a == DivSign::PlusInf) return DivSign::PlusInf;
            if (a == DivSign::MinusInf && e.root_index() % 2 == 1) return DivSign::MinusInf;
            return DivSign::None;
        }
        case ExprKind::Exp:
            return diverges(e.child(0), dir) == DivSign::PlusInf ? DivSign::PlusInf
                                                                 : DivSign::None;
        case ExprKind::Ln:
            return diverges(e.child(0), dir) == DivSign::PlusInf ? DivSign::PlusInf
                                                                 : DivSign::None;
        default:
            return DivSign::None;
    }
}

struct EndpointValue {
    bool undefined = false;
    std::optional<Rational> exact;
    std::optional<DyadicInterval> approx;
    DivSign divergence = DivSign::None;
};

inline EndpointValue value_near(const Expr& f, const std::optional<Rational>& endpoint, int dir,
                                mpfr_prec_t prec) {
    EndpointValue out;
    if (!endpoint) {
        out.divergence = diverges(f, dir);
        return out;
    }
    try {
        if (std::optional<Rational> v = evaluate_exact(f, *endpoint)) {
            out.exact = *v;
            return out;
        }
    } catch (const DomainViolation&) {
        out.undefined = true;
        return out;
    }
    try {
        out.approx = eval_interval_at(f, *endpoint, prec);
    } catch (const EmptyIntersection&) {
        out.undefined = true;
    }
    return out;
}

/// Trichotomy of the target constant against the value of f at a finite
/// endpoint: -1 below, 0 equal, +1 above; nullopt when the comparison will
/// not certify at max_prec. Equality is only ever claimed exactly.
inline std::optional<int> target_vs_endpoint(const std::optional<Rational>& target_exact,
                                             const Expr& target, const Expr& f,
                                             const Rational& at, const EndpointValue& v,
                                             mpfr_prec_t max_prec) {
    if (v.exact && target_exact) return sgn(*target_exact - *v.exact);
    for (mpfr_prec_t p = 128; p <= max_prec; p *= 2) {
        try {
            DyadicInterval fv = eval_interval_at(f, at, p);
            DyadicInterval tv = target_exact ? DyadicInterval::from_rational(*target_exact, p)
                                             : eval_interval_at(target, Rational(0), p);
            if (tv.lo_q() > fv.hi_q()) return 1;
            if (tv.hi_q() < fv.lo_q()) return -1;
        } catch (const EmptyIntersection&) {
            return std::nullopt;
        }
    }
    return std::nullopt;
}

}  // namespace detail

enum class MonotoneCount { ExactlyOne, None, Unknown };

struct MonotoneCountResult {
    MonotoneCount count = MonotoneCount::Unknown;
    std::optional<DyadicInterval> enclosure;          // ExactlyOne
    std::optional<InverseFunctionValue> witness;      // ExactlyOne, interior case
    std::optional<Rational> exact;                    // ExactlyOne at a closed endpoint
};

/// Counts solutions of f(x) = a for f certified strictly monotone on a
/// single-interval domain and a constant on the other side. The range of f
/// comes from endpoint values, exact where possible, plus structural
/// divergence at infinite endpoints; a closed endpoint whose value equals
/// the target counts as the solution.
inline MonotoneCountResult count_solutions_monotone(const Equation& eq,
                                                    mpfr_prec_t precision = 256,
                                                    mpfr_prec_t max_precision = 4096) {
    Expr f = eq.lhs(), target = eq.rhs();
    if (is_constant(f) && contains_var(target)) std::swap(f, target);
    if (contains_var(target) || !contains_var(f))
        throw PreconditionViolated("needs one variable side and one constant side");
    Monotonicity dir = prove_monotone(f, eq.domain());
    if (dir == Monotonicity::Unknown)
        throw PreconditionViolated("variable side is not certified monotone");
    Expr tf = fold(target);
    std::optional<Rational> texact;
    if (tf.kind() == ExprKind::RationalLit) texact = tf.rational_value();

    const RealInterval& part = eq.domain().parts().front();
    bool increasing = dir == Monotonicity::StrictlyIncreasing;
    const std::optional<Rational>& xinf = increasing ? part.lo : part.hi;
    const std::optional<Rational>& xsup = increasing ? part.hi : part.lo;
    bool inf_closed = increasing ? part.lo_closed : part.hi_closed;
    bool sup_closed = increasing ? part.hi_closed : part.lo_closed;
    int inf_dir = increasing ? -1 : 1;
    int sup_dir = -inf_dir;

    detail::EndpointValue vinf = detail::value_near(f, xinf, inf_dir, precision);
    detail::EndpointValue vsup = detail::value_near(f, xsup, sup_dir, precision);

    MonotoneCountResult out;
    auto endpoint_hit = [&](const Rational& x) {
        out.count = MonotoneCount::ExactlyOne;
        out.exact = x;
        out.enclosure = DyadicInterval::from_rational(x, precision);
        return out;
    };

    // side toward the infimum of the range
    std::optional<bool> above_inf;
    if (!xinf) {
        if (vinf.divergence == detail::DivSign::MinusInf) above_inf = true;
    } else if (!vinf.undefined) {
        std::optional<int> c =
            detail::target_vs_endpoint(texact, tf, f, *xinf, vinf, max_precision);
        if (c) {
            if (*c < 0) {
                out.count = MonotoneCount::None;
                return out;
            }
            if (*c == 0) {
                if (inf_closed) return endpoint_hit(*xinf);
                out.count = MonotoneCount::None;
                return out;
            }
            above_inf = true;
        }
    }

    // side toward the supremum
    std::optional<bool> below_sup;
    if (!xsup) {
        if (vsup.divergence == detail::DivSign::PlusInf) below_sup = true;
    } else if (!vsup.undefined) {
        std::optional<int> c =
            detail::target_vs_endpoint(texact, tf, f, *xsup, vsup, max_precision);
        if (c) {
            if (*c > 0) {
                out.count = MonotoneCount::None;
                return out;
            }
            if (*c == 0) {
                if (sup_closed) return endpoint_hit(*xsup);
                out.count = MonotoneCount::None;
                return out;
            }
            below_sup = true;
        }
    }

    if (above_inf.value_or(false) && below_sup.value_or(false)) {
        try {
            InverseFunctionValue witness(f, eq.domain(), tf);
            out.enclosure = inverse_value(witness, precision);
            out.witness = std::move(witness);
            out.count = MonotoneCount::ExactlyOne;
        } catch (const std::exception&) {
            out.count = MonotoneCount::Unknown;
        }
    }
    return out;
}

namespace detail {

inline QuadExt poly_eval_quad(const UniPoly& p, const QuadExt& x) {
    QuadExt acc{Rational(0)};
    for (long i = p.degree(); i >= 0; --i)
        acc = acc * x + QuadExt(p.coeff(static_cast<size_t>(i)));
    return acc;
}

enum class ValueSign { Negative, Zero, Positive, Undefined, Unknown };

inline ValueSign subject_sign_at(const Expr& subject, const SolutionRep& c,
                                 mpfr_prec_t max_prec) {
    if (std::optional<QuadExt> q = c.exact_value()) {
        try {
            if (std::optional<QuadExt> v = evaluate_quad(subject, *q)) {
                int s = v->sign();
                return s < 0 ? ValueSign::Negative
                             : s > 0 ? ValueSign::Positive : ValueSign::Zero;
            }
        } catch (const DomainViolation&) {
            return ValueSign::Undefined;
        }
    }
    for (mpfr_prec_t p = 128; p <= max_prec; p *= 2) {
        try {
            DyadicInterval box = c.enclosure(p);
            DyadicInterval v = eval_interval(subject, box, p);
            if (v.strictly_positive()) return ValueSign::Positive;
            if (v.strictly_negative()) return ValueSign::Negative;
        } catch (const EmptyIntersection&) {
            return ValueSign::Undefined;
        }
    }
    return ValueSign::Unknown;
}

enum class CondState { Strict, Boundary, Violated, Unknown, Undefined };

inline CondState condition_state(SignPredicate pred, ValueSign s) {
    if (s == ValueSign::Undefined) return CondState::Undefined;
    if (s == ValueSign::Unknown) return CondState::Unknown;
    bool neg = s == ValueSign::Negative;
    bool zero = s == ValueSign::Zero;
    bool pos = s == ValueSign::Positive;
    switch (pred) {
        case SignPredicate::NonNegative:
            return pos ? CondState::Strict : zero ? CondState::Boundary : CondState::Violated;
        case SignPredicate::NonPositive:
            return neg ? CondState::Strict : zero ? CondState::Boundary : CondState::Violated;
        case SignPredicate::NonZero:
            return zero ? CondState::Violated : CondState::Strict;
        case SignPredicate::Positive:
            return pos ? CondState::Strict : CondState::Violated;
        default:
            return neg ? CondState::Strict : CondState::Violated;
    }
}

}  // namespace detail

/// Checks a candidate produced by a widening chain against the original
/// equation. Verified demands an exact certificate: the candidate exactly
/// satisfies the original equation or the chain's final polynomial stage,
/// with every side condition certified to hold strictly. Numeric agreement
/// alone never verifies; certified disagreement rejects.
inline VerifyReport verify_candidate(const Equation& original, const SolutionRep& candidate,
                                     const Trace& trace, mpfr_prec_t max_precision = 4096) {
    bool all_strict = true;
    for (size_t i = 0; i < trace.size(); ++i) {
        for (const SideCondition& cond : trace[i].side_conditions) {
            detail::ValueSign s =
                detail::subject_sign_at(cond.subject, candidate, max_precision);
            switch (detail::condition_state(cond.predicate, s)) {
                case detail::CondState::Violated:
                    return {VerifyOutcome::Rejected,
                            "side condition " + to_string(cond) + " violated"};
                case detail::CondState::Undefined:
                    return {VerifyOutcome::Rejected,
                            "side condition " + to_string(cond) + " undefined"};
                case detail::CondState::Boundary:
                case detail::CondState::Unknown:
                    all_strict = false;
                    break;
                default:
                    break;
            }
        }
    }

    std::optional<QuadExt> exact = candidate.exact_value();
    if (exact) {
        try {
            std::optional<QuadExt> lv = evaluate_quad(original.lhs(), *exact);
            std::optional<QuadExt> rv = evaluate_quad(original.rhs(), *exact);
            if (lv && rv) {
                QuadExt diffv = *lv - *rv;
                if (diffv.is_zero()) {
                    if (all_strict)
                        return {VerifyOutcome::Verified,
                                "satisfies the equation exactly; side conditions hold strictly"};
                    return {VerifyOutcome::Inconclusive,
                            "satisfies the equation exactly, but a side condition sits at its "
                            "boundary"};
                }
                return {VerifyOutcome::Rejected,
                        "lhs - rhs = " + to_string(surd_to_expr(diffv.to_surd()))};
            }
        } catch (const DomainViolation&) {
            return {VerifyOutcome::Rejected, "equation undefined at the candidate"};
        } catch (const IncompatibleField&) {
        }
    }

    Expr diff = Expr::sub(original.lhs(), original.rhs());
    bool agrees = false;
    for (mpfr_prec_t p = 128; p <= max_precision; p *= 2) {
        try {
            DyadicInterval box = candidate.enclosure(p);
            DyadicInterval v = eval_interval(diff, box, p);
            if (v.strictly_positive() || v.strictly_negative())
                return {VerifyOutcome::Rejected,
                        "enclosure of lhs - rhs excludes zero"};
            if (v.width_exact() < make_rational(Int(1), Int(1) << 50)) agrees = true;
        } catch (const EmptyIntersection&) {
            return {VerifyOutcome::Rejected, "equation undefined at the candidate"};
        }
    }

    const Equation& final_eq = trace.empty() ? original : trace[trace.size() - 1].output;
    std::optional<UniPoly> pfin = from_expr(fold(Expr::sub(final_eq.lhs(), final_eq.rhs())));
    if (pfin && !pfin->is_zero()) {
        bool exact_final = false;
        if (exact) {
            exact_final = detail::poly_eval_quad(*pfin, *exact).is_zero();
        } else if (const IsolatedRoot* ir = candidate.isolated_root()) {
            exact_final = divmod(*pfin, ir->sqf).second.is_zero();
        }
        if (exact_final && all_strict)
            return {VerifyOutcome::Verified,
                    "exact root of the final polynomial; side conditions hold strictly"};
        if (exact_final)
            return {VerifyOutcome::Inconclusive,
                    "exact root of the final polynomial, but a side condition is not settled "
                    "strictly"};
    }
    if (agrees)
        return {VerifyOutcome::Inconclusive,
                "agrees numerically at every precision tried; no exact certificate"};
    return {VerifyOutcome::Inconclusive, "undecided at maximum precision"};
}

namespace detail {

struct PipelineOutcome {
    SolutionSet set;
    std::vector<Step> steps;
    std::vector<CandidateReport> candidates;
    std::vector<std::string> notes;
};

/// Domain-filters roots and wraps them up; undecidable memberships are
/// reported, never silently kept or dropped.
inline void finalize_roots(const Equation& eq, const SolverConfig& cfg, PolyRoots roots,
                           PipelineOutcome& out) {
    if (roots.isolated_used) out.notes.push_back("no radical form produced");
    std::vector<SolutionRep> kept;
    for (SolutionRep& r : roots.reps) {
        std::optional<bool> in = rep_in_domain(r, eq.domain(), cfg.precision_max);
        if (in.value_or(false)) {
            kept.push_back(std::move(r));
        } else if (!in) {
            out.candidates.push_back({std::move(r), VerifyOutcome::Inconclusive,
                                      "domain membership undecided at maximum precision"});
        }
    }
    out.set = SolutionSet::finite(std::move(kept));
}

inline std::optional<PipelineOutcome> pipeline_polynomial(const Equation& eq,
                                                          const SolverConfig& cfg) {
    std::optional<UniPoly> p = from_expr(fold(Expr::sub(eq.lhs(), eq.rhs())));
    if (!p) return std::nullopt;
    PipelineOutcome out;
    if (p->is_zero()) {
        out.set = SolutionSet::identity();
        return out;
    }
    if (p->degree() == 0) {
        out.set = SolutionSet::empty();
        return out;
    }
    PolyRoots roots = poly_real_roots(*p, /*prefer_inverse=*/true);
    if (roots.substitution_k) {
        try {
            out.steps.push_back(substitute_power(eq, *roots.substitution_k));
        } catch (const std::exception&) {
            // the step is presentational; the roots stand on their own
        }
    }
    finalize_roots(eq, cfg, std::move(roots), out);
    return out;
}

inline std::optional<PipelineOutcome> pipeline_rational(const Equation& eq,
                                                        const SolverConfig& cfg) {
    Expr diffe = fold(Expr::sub(eq.lhs(), eq.rhs()));
    std::optional<std::pair<UniPoly, UniPoly>> rf = detail::ratfunc_extract(diffe);
    if (!rf) return std::nullopt;
    PipelineOutcome out;
    if (rf->first.is_zero()) {
        out.set = SolutionSet::identity();
        return out;
    }
    UniPoly pruned = remove_common_roots(rf->first, rf->second);
    if (pruned.degree() < 1) {
        out.set = SolutionSet::empty();
        return out;
    }
    finalize_roots(eq, cfg, poly_real_roots(pruned, /*prefer_inverse=*/true), out);
    return out;
}

inline std::optional<PipelineOutcome> pipeline_radical(const Equation& eq,
                                                       const SolverConfig& cfg) {
    int total = radical_count(eq.lhs()) + radical_count(eq.rhs());
    if (total == 0) return std::nullopt;
    if (total > cfg.max_steps) total = cfg.max_steps;
    StepOptions opt;
    std::vector<Step> steps;
    Equation cur = eq;
    for (int round = 0; round < total; ++round) {
        int before = radical_count(cur.lhs()) + radical_count(cur.rhs());
        if (before == 0) break;
        bool advanced = false;
        // squaring without isolation first, when it is both free and useful
        try {
            Step sq = square_both(cur, opt);
            if (sq.relation == SolutionRelation::Equivalent &&
                radical_count(sq.output.lhs()) + radical_count(sq.output.rhs()) < before) {
                cur = sq.output;
                steps.push_back(std::move(sq));
                advanced = true;
            }
        } catch (const std::exception&) {
        }
        if (!advanced) {
            try {
                Step iso = isolate_radical(cur);
                Step sq = square_both(iso.output, opt);
                if (radical_count(sq.output.lhs()) + radical_count(sq.output.rhs()) < before) {
                    if (!(iso.output == cur)) steps.push_back(iso);
                    cur = sq.output;
                    steps.push_back(std::move(sq));
                    advanced = true;
                }
            } catch (const std::exception&) {
            }
        }
        if (!advanced) return std::nullopt;
    }
    if (radical_count(cur.lhs()) + radical_count(cur.rhs()) != 0) return std::nullopt;

    Expr diffe = fold(Expr::sub(cur.lhs(), cur.rhs()));
    std::optional<std::pair<UniPoly, UniPoly>> rf = detail::ratfunc_extract(diffe);
    if (!rf) return std::nullopt;
    SolutionRelation overall = compose(steps);
    if (rf->first.is_zero()) {
        if (overall != SolutionRelation::Equivalent) return std::nullopt;
        PipelineOutcome out;
        out.steps = std::move(steps);
        out.set = SolutionSet::identity();
        return out;
    }
    UniPoly pruned = remove_common_roots(rf->first, rf->second);
    PipelineOutcome out;
    out.steps = steps;
    PolyRoots roots = pruned.degree() >= 1 ? poly_real_roots(pruned) : PolyRoots{};
    finalize_roots(cur, cfg, std::move(roots), out);
    if (overall == SolutionRelation::Equivalent) return out;

    // widening chain: every candidate answers to the original equation
    Trace chain;
    for (const Step& s : steps) chain.append(s);
    std::vector<SolutionRep> accepted;
    std::vector<CandidateReport> reports = std::move(out.candidates);
    for (const SolutionRep& cand : out.set.solutions()) {
        VerifyReport vr = verify_candidate(eq, cand, chain, cfg.precision_max);
        if (vr.outcome == VerifyOutcome::Verified) accepted.push_back(cand);
        reports.push_back({cand, vr.outcome, std::move(vr.detail)});
    }
    out.candidates = std::move(reports);
    out.set = SolutionSet::finite(std::move(accepted));
    return out;
}

/// exp/Lambert patterns: exp(u) = c with u linear, x*exp(x) = c, and
/// exp(x) = x + b through u = -(x + b), u*exp(u) = -exp(-b).
inline std::optional<PipelineOutcome> pipeline_lambert(const Equation& eq,
                                                       const SolverConfig& cfg) {
    StepOptions opt;
    Expr sides[2] = {fold(eq.lhs()), fold(eq.rhs())};
    for (int o = 0; o < 2; ++o) {
        const Expr& l = sides[o];
        const Expr& r = sides[1 - o];
        if (l.kind() != ExprKind::Exp) continue;

        // exp(x) = x + b
        if (l.child(0).kind() == ExprKind::Var) {
            if (std::optional<UniPoly> p = from_expr(r)) {
                if (p->degree() == 1 && p->coeff(1) == Rational(1)) {
                    Rational b = p->coeff(0);
                    PipelineOutcome out;
                    if (b < 1) {
                        out.set = SolutionSet::empty();
                        out.notes.push_back("exp(x) - x stays above " + to_string(b));
                        return out;
                    }
                    std::vector<SolutionRep> reps;
                    if (b == 1) {
                        reps.push_back(SolutionRep::exact(Rational(0)));
                    } else {
                        Expr arg = Expr::neg(Expr::exp(Expr::rational(-b)));
                        reps.push_back(SolutionRep::closed_form(Expr::sub(
                            Expr::neg(Expr::lambert_w(0, arg)), Expr::rational(b))));
                        reps.push_back(SolutionRep::closed_form(Expr::sub(
                            Expr::neg(Expr::lambert_w(-1, arg)), Expr::rational(b))));
                    }
                    PolyRoots wrap;
                    wrap.reps = std::move(reps);
                    finalize_roots(eq, cfg, std::move(wrap), out);
                    return out;
                }
            }
        }

        // exp(u) = c
        if (is_constant(r)) {
            int csign = 0;
            if (r.kind() == ExprKind::RationalLit) {
                csign = sgn(r.rational_value());
            } else {
                for (mpfr_prec_t p = 64; p <= cfg.precision_max && csign == 0; p *= 2) {
                    try {
                        DyadicInterval enc = eval_interval_at(r, Rational(0), p);
                        if (enc.strictly_positive()) csign = 1;
                        if (enc.strictly_negative()) csign = -1;
                    } catch (const EmptyIntersection&) {
                        break;
                    }
                }
                if (csign == 0) continue;
            }
            PipelineOutcome out;
            if (csign <= 0) {
                out.set = SolutionSet::empty();
                out.notes.push_back("exp takes only positive values");
                return out;
            }
            std::optional<UniPoly> up = from_expr(l.child(0));
            if (!up || up->degree() != 1) continue;
            Equation oriented(l, r, eq.domain());
            try {
                Step ln_step = apply_injective(oriented, Injection::ln_map(), opt);
                out.steps.push_back(ln_step);
                Equation cur = ln_step.output;
                Rational b0 = up->coeff(0), a1 = up->coeff(1);
                if (sgn(b0) != 0) {
                    Step st = sub_both(cur, Expr::rational(b0), opt);
                    cur = st.output;
                    out.steps.push_back(std::move(st));
                }
                if (a1 != 1) {
                    Step st = div_both(cur, Expr::rational(a1), opt);
                    cur = st.output;
                    out.steps.push_back(std::move(st));
                }
                Expr value = fold(cur.rhs());
                SolutionRep rep = value.kind() == ExprKind::RationalLit
                                      ? SolutionRep::exact(value.rational_value())
                                      : SolutionRep::closed_form(value);
                PolyRoots wrap;
                wrap.reps.push_back(std::move(rep));
                finalize_roots(eq, cfg, std::move(wrap), out);
                return out;
            } catch (const std::exception&) {
                continue;
            }
        }
    }

    // x*exp(x) = c
    for (int o = 0; o < 2; ++o) {
        const Expr& l = sides[o];
        const Expr& r = sides[1 - o];
        if (l.kind() != ExprKind::Mul || !is_constant(r)) continue;
        const Expr& a = l.child(0);
        const Expr& b = l.child(1);
        bool shape = (a.kind() == ExprKind::Var && b.kind() == ExprKind::Exp &&
                      b.child(0).kind() == ExprKind::Var) ||
                     (b.kind() == ExprKind::Var && a.kind() == ExprKind::Exp &&
                      a.child(0).kind() == ExprKind::Var);
        if (!shape) continue;
        Expr cf = fold(r);
        if (cf.kind() != ExprKind::RationalLit) continue;
        Rational c = cf.rational_value();
        PipelineOutcome out;
        std::vector<SolutionRep> reps;
        if (sgn(c) == 0) {
            reps.push_back(SolutionRep::exact(Rational(0)));
        } else if (sgn(c) > 0) {
            reps.push_back(SolutionRep::closed_form(Expr::lambert_w(0, Expr::rational(c))));
        } else {
            int cmp = 0;
            if (c <= neg_inv_e_below()) {
                cmp = -1;
            } else if (c >= neg_inv_e_above()) {
                cmp = 1;
            } else {
                Expr m = Expr::neg(Expr::exp(Expr::integer(-1)));
                for (mpfr_prec_t p = 64; cmp == 0 && p <= (mpfr_prec_t(1) << 16); p *= 2) {
                    DyadicInterval enc = eval_interval_at(m, Rational(0), p);
                    if (c < enc.lo_q()) cmp = -1;
                    if (c > enc.hi_q()) cmp = 1;
                }
            }
            if (cmp < 0) {
                out.set = SolutionSet::empty();
                out.notes.push_back("target below the minimum of x*exp(x)");
                return out;
            }
            reps.push_back(SolutionRep::closed_form(Expr::lambert_w(-1, Expr::rational(c))));
            reps.push_back(SolutionRep::closed_form(Expr::lambert_w(0, Expr::rational(c))));
        }
        PolyRoots wrap;
        wrap.reps = std::move(reps);
        finalize_roots(eq, cfg, std::move(wrap), out);
        return out;
    }
    return std::nullopt;
}

inline std::optional<PipelineOutcome> pipeline_monotone(const Equation& eq,
                                                        const SolverConfig& cfg) {
    auto attempt = [&](const Equation& e2,
                       std::vector<Step> steps) -> std::optional<PipelineOutcome> {
        try {
            MonotoneCountResult mc =
                count_solutions_monotone(e2, cfg.precision_start, cfg.precision_max);
            PipelineOutcome out;
            out.steps = std::move(steps);
            switch (mc.count) {
                case MonotoneCount::ExactlyOne: {
                    SolutionRep rep = mc.exact ? SolutionRep::exact(*mc.exact)
                                               : SolutionRep::inverse(std::move(*mc.witness));
                    out.set = SolutionSet::finite({std::move(rep)});
                    return out;
                }
                case MonotoneCount::None:
                    out.set = SolutionSet::empty();
                    return out;
                default:
                    return std::nullopt;
            }
        } catch (const PreconditionViolated&) {
            return std::nullopt;
        } catch (const MultiIntervalDomain&) {
            return std::nullopt;
        }
    };
    if (auto r = attempt(eq, {})) return r;
    if (contains_var(eq.lhs()) && contains_var(eq.rhs())) {
        try {
            Step st = sub_both(eq, eq.rhs());
            if (auto r = attempt(st.output, {st})) return r;
        } catch (const std::exception&) {
            Equation diffed(fold(Expr::sub(eq.lhs(), eq.rhs())), Expr::integer(0), eq.domain());
            if (auto r = attempt(diffed, {})) return r;
        }
    }
    return std::nullopt;
}

}  // namespace detail

/// Strategy order is fixed: identity check, polynomial, rational function,
/// radical isolation and squaring, exp/Lambert patterns, monotone
/// inversion. The first pipeline that accepts the equation decides; there
/// is no backtracking, and an unsolved outcome is a value, not an error.
inline SolveResult solve(const Equation& eq, const SolverConfig& config = {}) {
    SolveResult result;
    auto finish = [&](detail::PipelineOutcome&& po) -> SolveResult& {
        for (Step& s : po.steps) result.trace.append(std::move(s));
        result.candidates = std::move(po.candidates);
        for (std::string& n : po.notes) result.notes.push_back(std::move(n));
        result.set = std::move(po.set);
        return result;
    };
    if (eq.domain().is_empty()) {
        result.set = SolutionSet::empty();
        result.notes.push_back("empty domain");
        return result;
    }
    if (identity_check(eq, config.falsification_grid) == IdentityStatus::Identity) {
        result.set = SolutionSet::identity();
        return result;
    }
    if (config.enable_polynomial)
        if (auto po = detail::pipeline_polynomial(eq, config)) return finish(std::move(*po));
    if (config.enable_rational)
        if (auto po = detail::pipeline_rational(eq, config)) return finish(std::move(*po));
    if (config.enable_radical)
        if (auto po = detail::pipeline_radical(eq, config)) return finish(std::move(*po));
    if (config.enable_lambert)
        if (auto po = detail::pipeline_lambert(eq, config)) return finish(std::move(*po));
    if (config.enable_monotone)
        if (auto po = detail::pipeline_monotone(eq, config)) return finish(std::move(*po));
    result.set = SolutionSet::unsolved("no applicable strategy");
    return result;
}

}  // namespace solset
