#pragma once

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solset/domain.hpp"
#include "solset/equation.hpp"
#include "solset/expr.hpp"
#include "solset/interval_eval.hpp"
#include "solset/mpoly.hpp"
#include "solset/natural_domain.hpp"
#include "solset/poly.hpp"

namespace solset {

struct EmptyDomain : std::invalid_argument {
    EmptyDomain() : std::invalid_argument("classification needs a nonempty domain") {}
};

/// How transcendence was established. FlaggedConstant is the curated
/// constant set {e, pi} and its rational combinations; the others are
/// structural closure rules on function shape.
enum class TranscendenceRule { FlaggedConstant, R1, R2, R3, R4 };

inline const char* rule_tag(TranscendenceRule r) {
    switch (r) {
        case TranscendenceRule::FlaggedConstant: return "flagged-constant";
        case TranscendenceRule::R1: return "R1";
        case TranscendenceRule::R2: return "R2";
        case TranscendenceRule::R3: return "R3";
        case TranscendenceRule::R4: return "R4";
    }
    return "?";
}

struct Transcendence {
    TranscendenceRule rule;
    std::string premise;
};

class AlgebraicityCertificate {
    std::optional<BiPoly> annihilator_;
    std::optional<Transcendence> reason_;

public:
    static AlgebraicityCertificate algebraic(BiPoly p) {
        if (p.is_zero()) throw ZeroInput();
        AlgebraicityCertificate c;
        c.annihilator_ = std::move(p);
        return c;
    }
    static AlgebraicityCertificate transcendental(TranscendenceRule r, std::string premise) {
        AlgebraicityCertificate c;
        c.reason_ = Transcendence{r, std::move(premise)};
        return c;
    }
    static AlgebraicityCertificate unknown() { return {}; }

    bool is_algebraic() const { return annihilator_.has_value(); }
    bool is_transcendental() const { return reason_.has_value(); }
    bool is_unknown() const { return !annihilator_ && !reason_; }

    const BiPoly& annihilator() const {
        if (!annihilator_) throw std::logic_error("no annihilator on this certificate");
        return *annihilator_;
    }
    const Transcendence& reason() const {
        if (!reason_) throw std::logic_error("no transcendence reason on this certificate");
        return *reason_;
    }
};

/// The same annihilator viewed as a list of one-variable coefficient
/// polynomials: P(x, y) = sum coeffs[k](x) * y^k.
struct CoefficientForm {
    std::vector<UniPoly> coeffs;

    long top_index() const { return static_cast<long>(coeffs.size()) - 1; }
};

inline CoefficientForm to_coefficient_form(const BiPoly& p) {
    if (p.is_zero()) throw ZeroInput();
    long dy = p.degree_y();
    CoefficientForm f;
    for (long k = 0; k <= dy; ++k) {
        BiPoly row = p.coeff_y(static_cast<unsigned>(k));
        std::vector<Rational> c(static_cast<size_t>(std::max(row.degree_x(), 0l)) + 1, Rational(0));
        for (const auto& [e, v] : row.terms()) c[e.first] = Rational(v);
        f.coeffs.emplace_back(std::move(c));
    }
    while (f.coeffs.size() > 1 && f.coeffs.back().is_zero()) f.coeffs.pop_back();
    return f;
}

inline BiPoly from_coefficient_form(const CoefficientForm& f) {
    BiPoly p;
    Int lcm(1);
    for (const auto& row : f.coeffs)
        for (long i = 0; i <= row.degree(); ++i) {
            Int t;
            mpz_lcm(t.get_mpz_t(), lcm.get_mpz_t(),
                    row.coeff(static_cast<size_t>(i)).get_den().get_mpz_t());
            lcm = t;
        }
    for (size_t k = 0; k < f.coeffs.size(); ++k)
        for (long i = 0; i <= f.coeffs[k].degree(); ++i) {
            Rational c = f.coeffs[k].coeff(static_cast<size_t>(i)) * Rational(lcm);
            p = p + BiPoly::term(num(c), static_cast<unsigned>(i), static_cast<unsigned>(k));
        }
    if (p.is_zero()) throw ZeroInput();
    return p;
}

inline BiPoly inverse_annihilator(const BiPoly& p) {
    if (p.is_zero()) throw ZeroInput();
    return p.swap_vars();
}

namespace detail {

inline Int binomial(unsigned n, unsigned k) {
    Int r;
    mpz_bin_uiui(r.get_mpz_t(), n, k);
    return r;
}

/// Canonical annihilator orientation: primitive, with the top
/// y-coefficient's leading entry positive, so polynomials keep the
/// y - p(x) shape.
inline BiPoly normalize_annihilator(BiPoly p) {
    p = p.primitive();
    if (p.is_zero() || p.degree_y() < 0) return p;
    BiPoly top = p.coeff_y(static_cast<unsigned>(p.degree_y()));
    if (sgn(top.terms().rbegin()->second) < 0) p = -p;
    return p;
}

/// Eliminates t from A(x,t) = 0 and y = t + v, v annihilated by B:
/// Res_t(A(x,t), B(x, y-t)).
inline std::optional<BiPoly> annihilate_sum(const BiPoly& a, const BiPoly& b) {
    long m = a.degree_y(), n = b.degree_y();
    if (m < 1 || n < 1) return std::nullopt;
    std::vector<BiPoly> av, bv;
    for (long i = 0; i <= m; ++i) av.push_back(a.coeff_y(static_cast<unsigned>(i)));
    // B(x, y - t): the t^i coefficient collects (-1)^i C(k, i) r_k(x) y^(k-i)
    for (long i = 0; i <= n; ++i) {
        BiPoly ci;
        for (long k = i; k <= n; ++k) {
            Int c = binomial(static_cast<unsigned>(k), static_cast<unsigned>(i));
            if (i % 2) c = -c;
            BiPoly rk = b.coeff_y(static_cast<unsigned>(k));
            ci = ci + rk * BiPoly::term(c, 0, static_cast<unsigned>(k - i));
        }
        bv.push_back(ci);
    }
    BiPoly r = resultant_in_t(av, bv);
    if (r.is_zero() || r.degree_y() < 1) return std::nullopt;
    return normalize_annihilator(r);
}

/// Eliminates t from A(x,t) = 0 and y = t * v: Res_t(A(x,t), t^n B(x, y/t)).
inline std::optional<BiPoly> annihilate_product(const BiPoly& a, const BiPoly& b) {
    long m = a.degree_y(), n = b.degree_y();
    if (m < 1 || n < 1) return std::nullopt;
    std::vector<BiPoly> av, bv;
    for (long i = 0; i <= m; ++i) av.push_back(a.coeff_y(static_cast<unsigned>(i)));
    // t^n B(x, y/t): the t^i coefficient is r_(n-i)(x) y^(n-i)
    for (long i = 0; i <= n; ++i) {
        BiPoly rk = b.coeff_y(static_cast<unsigned>(n - i));
        bv.push_back(rk * BiPoly::term(Int(1), 0, static_cast<unsigned>(n - i)));
    }
    BiPoly r = resultant_in_t(av, bv);
    if (r.is_zero() || r.degree_y() < 1) return std::nullopt;
    return normalize_annihilator(r);
}

/// Eliminates t from A(x,t) = 0 and y = t^k: Res_t(A(x,t), y - t^k).
inline std::optional<BiPoly> annihilate_power(const BiPoly& a, unsigned k) {
    long m = a.degree_y();
    if (m < 1 || k < 1) return std::nullopt;
    std::vector<BiPoly> av, bv(k + 1);
    for (long i = 0; i <= m; ++i) av.push_back(a.coeff_y(static_cast<unsigned>(i)));
    bv[0] = BiPoly::y();
    bv[k] = BiPoly::constant(Int(-1));
    BiPoly r = resultant_in_t(av, bv);
    if (r.is_zero() || r.degree_y() < 1) return std::nullopt;
    return normalize_annihilator(r);
}

/// Annihilator of 1/v from an annihilator of v. Fails when the result
/// degenerates to a polynomial without y.
inline std::optional<BiPoly> annihilate_reciprocal(const BiPoly& b) {
    BiPoly r = b.reverse_y();
    if (r.is_zero() || r.degree_y() < 1) return std::nullopt;
    return normalize_annihilator(r);
}

/// Constructs an annihilator for expressions built from rationals, x,
/// field operations, integer powers, and roots. Polynomials take the
/// direct y - p(x) shape; everything else is assembled by elimination.
inline std::optional<BiPoly> build_annihilator(const Expr& e) {
    if (auto p = from_expr(e)) {
        Int lcm(1);
        for (long i = 0; i <= p->degree(); ++i) {
            Int t;
            mpz_lcm(t.get_mpz_t(), lcm.get_mpz_t(),
                    p->coeff(static_cast<size_t>(i)).get_den().get_mpz_t());
            lcm = t;
        }
        BiPoly a = BiPoly::term(lcm, 0, 1);
        for (long i = 0; i <= p->degree(); ++i) {
            Rational c = p->coeff(static_cast<size_t>(i)) * Rational(lcm);
            a = a - BiPoly::term(num(c), static_cast<unsigned>(i), 0);
        }
        return normalize_annihilator(a);
    }
    switch (e.kind()) {
        case ExprKind::RationalLit: {
            const Rational& q = e.rational_value();
            return normalize_annihilator(BiPoly::term(q.get_den(), 0, 1) -
                                         BiPoly::constant(q.get_num()));
        }
        case ExprKind::Var:
            return normalize_annihilator(BiPoly::y() - BiPoly::x());
        case ExprKind::Neg: {
            auto a = build_annihilator(e.child(0));
            if (!a) return std::nullopt;
            return normalize_annihilator(a->negate_y());
        }
        case ExprKind::Add: {
            auto a = build_annihilator(e.child(0)), b = build_annihilator(e.child(1));
            if (!a || !b) return std::nullopt;
            return annihilate_sum(*a, *b);
        }
        case ExprKind::Sub: {
            auto a = build_annihilator(e.child(0)), b = build_annihilator(e.child(1));
            if (!a || !b) return std::nullopt;
            return annihilate_sum(*a, b->negate_y());
        }
        case ExprKind::Mul: {
            auto a = build_annihilator(e.child(0)), b = build_annihilator(e.child(1));
            if (!a || !b) return std::nullopt;
            return annihilate_product(*a, *b);
        }
        case ExprKind::Div: {
            auto a = build_annihilator(e.child(0)), b = build_annihilator(e.child(1));
            if (!a || !b) return std::nullopt;
            auto rec = annihilate_reciprocal(*b);
            if (!rec) return std::nullopt;
            return annihilate_product(*a, *rec);
        }
        case ExprKind::IntPow: {
            auto a = build_annihilator(e.child(0));
            if (!a) return std::nullopt;
            long long k = e.ipow_exponent();
            if (k == 0) return normalize_annihilator(BiPoly::y() - BiPoly::constant(Int(1)));
            auto p = annihilate_power(*a, static_cast<unsigned>(k < 0 ? -k : k));
            if (!p || k > 0) return p;
            return annihilate_reciprocal(*p);
        }
        case ExprKind::Root: {
            auto a = build_annihilator(e.child(0));
            if (!a) return std::nullopt;
            BiPoly r = a->stretch_y(static_cast<unsigned>(e.root_index()));
            if (r.degree_y() < 1) return std::nullopt;
            return normalize_annihilator(r);
        }
        default:
            return std::nullopt;
    }
}

/// Interval enclosure of P(x0, Y) at a rational point and an enclosure of
/// the function value.
inline DyadicInterval bipoly_enclosure(const BiPoly& p, const Rational& x0,
                                       const DyadicInterval& y, mpfr_prec_t prec) {
    DyadicInterval acc = DyadicInterval::zero(prec);
    DyadicInterval xi = DyadicInterval::from_rational(x0, prec);
    for (const auto& [e, c] : p.terms()) {
        DyadicInterval t = DyadicInterval::from_rational(Rational(c), prec);
        if (e.first) t = t * pow_int(xi, static_cast<long>(e.first));
        if (e.second) t = t * pow_int(y, static_cast<long>(e.second));
        acc = acc + t;
    }
    return acc;
}

/// A few rational probe points inside d, spread across its parts.
inline std::vector<Rational> domain_samples(const Domain& d, size_t want) {
    std::vector<Rational> out;
    auto push = [&](const Rational& q) {
        if (out.size() >= want || !d.contains(q)) return;
        if (std::find(out.begin(), out.end(), q) == out.end()) out.push_back(q);
    };
    for (const RealInterval& iv : d.parts()) {
        if (out.size() >= want) break;
        if (iv.lo && iv.hi) {
            Rational span = *iv.hi - *iv.lo;
            if (sgn(span) == 0) {
                push(*iv.lo);
                continue;
            }
            size_t slots = want + 2;
            for (size_t j = 1; out.size() < want && j < slots; ++j)
                push(*iv.lo + span * make_rational(Int(static_cast<long>(j)),
                                                   Int(static_cast<long>(slots))));
            if (iv.lo_closed) push(*iv.lo);
            if (iv.hi_closed) push(*iv.hi);
        } else if (iv.lo) {
            for (size_t j = 0; out.size() < want && j <= want; ++j)
                push(*iv.lo + Rational(static_cast<long>(j)) + make_rational(Int(1), Int(3)));
            if (iv.lo_closed) push(*iv.lo);
        } else if (iv.hi) {
            for (size_t j = 0; out.size() < want && j <= want; ++j)
                push(*iv.hi - Rational(static_cast<long>(j)) - make_rational(Int(1), Int(3)));
            if (iv.hi_closed) push(*iv.hi);
        } else {
            push(Rational(0));
            for (long j = 1; out.size() < want; ++j) {
                push(Rational(j));
                push(Rational(-j));
            }
        }
    }
    return out;
}

/// True only when e provably takes two different values on d: either the
/// exact rational-function derivative is nonzero and d has interior, or
/// two sample enclosures separate.
inline bool certified_nonconstant(const Expr& e, const Domain& d, mpfr_prec_t prec = 256) {
    bool has_interior = false;
    for (const RealInterval& iv : d.parts())
        if (!iv.lo || !iv.hi || *iv.lo != *iv.hi) has_interior = true;
    if (has_interior) {
        if (auto rf = ratfunc_extract(e)) {
            UniPoly w = rf->first.derivative() * rf->second - rf->first * rf->second.derivative();
            return !w.is_zero();
        }
    }
    std::vector<Rational> pts = domain_samples(intersect(d, natural_domain(e)), 8);
    std::vector<DyadicInterval> vals;
    for (const Rational& p : pts) {
        try {
            vals.push_back(eval_interval_at(e, p, prec));
        } catch (const DomainViolation&) {
        } catch (const EmptyIntersection&) {
        }
    }
    for (size_t i = 0; i < vals.size(); ++i)
        for (size_t j = i + 1; j < vals.size(); ++j)
            if (vals[i].hi_q() < vals[j].lo_q() || vals[j].hi_q() < vals[i].lo_q()) return true;
    return false;
}

inline AlgebraicityCertificate constant_certificate(const Expr& e);

/// Rational-function-of-one-generator test: substitute the generator by
/// the variable and reuse the rational-function extractor.
inline Expr replace_generator(const Expr& e, ExprKind gen) {
    if (e.kind() == gen) return Expr::var();
    switch (e.kind()) {
        case ExprKind::RationalLit:
        case ExprKind::Var:
        case ExprKind::ConstE:
        case ExprKind::ConstPi:
            return e;
        case ExprKind::Neg:
            return Expr::neg(replace_generator(e.child(0), gen));
        case ExprKind::Add:
            return Expr::add(replace_generator(e.child(0), gen), replace_generator(e.child(1), gen));
        case ExprKind::Sub:
            return Expr::sub(replace_generator(e.child(0), gen), replace_generator(e.child(1), gen));
        case ExprKind::Mul:
            return Expr::mul(replace_generator(e.child(0), gen), replace_generator(e.child(1), gen));
        case ExprKind::Div:
            return Expr::div(replace_generator(e.child(0), gen), replace_generator(e.child(1), gen));
        case ExprKind::IntPow:
            return Expr::intpow(replace_generator(e.child(0), gen), e.ipow_exponent());
        case ExprKind::Root:
            return Expr::root(e.root_index(), replace_generator(e.child(0), gen));
        case ExprKind::Exp:
            return Expr::exp(replace_generator(e.child(0), gen));
        case ExprKind::Ln:
            return Expr::ln(replace_generator(e.child(0), gen));
        case ExprKind::Sin:
            return Expr::sin(replace_generator(e.child(0), gen));
        case ExprKind::Cos:
            return Expr::cos(replace_generator(e.child(0), gen));
        case ExprKind::LambertW:
            return Expr::lambert_w(e.w_branch(), replace_generator(e.child(0), gen));
    }
    return e;
}

inline void collect_generators(const Expr& e, bool& has_e, bool& has_pi) {
    switch (e.kind()) {
        case ExprKind::ConstE:
            has_e = true;
            return;
        case ExprKind::ConstPi:
            has_pi = true;
            return;
        case ExprKind::RationalLit:
        case ExprKind::Var:
            return;
        default:
            collect_generators(e.child(0), has_e, has_pi);
            if (e.binary()) collect_generators(e.child(1), has_e, has_pi);
    }
}

/// Certificate for a variable-free expression. Rational values and
/// radical towers over the rationals come out Algebraic with a
/// constructed annihilator; rational combinations of a single flagged
/// constant come out Transcendental; mixtures stay Unknown.
inline AlgebraicityCertificate constant_certificate(const Expr& e) {
    Expr folded = fold(e);
    if (folded.kind() == ExprKind::RationalLit) {
        if (auto a = build_annihilator(folded)) return AlgebraicityCertificate::algebraic(*a);
    }
    if (auto a = build_annihilator(e)) return AlgebraicityCertificate::algebraic(*a);

    bool has_e = false, has_pi = false;
    collect_generators(e, has_e, has_pi);
    if (has_e != has_pi) {
        ExprKind gen = has_e ? ExprKind::ConstE : ExprKind::ConstPi;
        const char* name = has_e ? "e" : "pi";
        if (auto rf = ratfunc_extract(replace_generator(e, gen))) {
            UniPoly n = rf->first, d = rf->second;
            UniPoly g = gcd(n, d);
            if (g.degree() >= 1) {
                n = divmod(n, g).first;
                d = divmod(d, g).first;
            }
            if (d.is_zero() || (d.degree() == 0 && sgn(d.coeff(0)) == 0))
                return AlgebraicityCertificate::unknown();
            if (n.degree() >= 1 || d.degree() >= 1)
                return AlgebraicityCertificate::transcendental(
                    TranscendenceRule::FlaggedConstant,
                    std::string("nonconstant rational combination of the flagged constant ") + name);
            Rational v = n.coeff(0) / d.coeff(0);
            return AlgebraicityCertificate::algebraic(detail::normalize_annihilator(
                BiPoly::term(v.get_den(), 0, 1) - BiPoly::constant(v.get_num())));
        }
    }
    // closure through value-preserving wrappers
    switch (e.kind()) {
        case ExprKind::Neg: {
            AlgebraicityCertificate c = constant_certificate(e.child(0));
            if (c.is_transcendental()) return c;
            return AlgebraicityCertificate::unknown();
        }
        case ExprKind::Root: {
            AlgebraicityCertificate c = constant_certificate(e.child(0));
            if (c.is_transcendental())
                return AlgebraicityCertificate::transcendental(
                    c.reason().rule, "root of a transcendental constant: " + c.reason().premise);
            return AlgebraicityCertificate::unknown();
        }
        case ExprKind::IntPow: {
            if (e.ipow_exponent() == 0) return AlgebraicityCertificate::unknown();
            AlgebraicityCertificate c = constant_certificate(e.child(0));
            if (c.is_transcendental())
                return AlgebraicityCertificate::transcendental(
                    c.reason().rule, "integer power of a transcendental constant: " + c.reason().premise);
            return AlgebraicityCertificate::unknown();
        }
        default:
            return AlgebraicityCertificate::unknown();
    }
}

}  // namespace detail

/// Decides algebraicity of e as a function on the given domain. Algebraic
/// answers carry a constructed annihilator; Transcendental answers carry
/// the closure rule that fired and its premise. Everything else is an
/// honest Unknown.
inline AlgebraicityCertificate classify(const Expr& raw, const Domain& domain) {
    if (domain.is_empty()) throw EmptyDomain();
    // folding is value-preserving, so the folded tree's certificate is the
    // original function's certificate
    Expr e = fold(raw);
    if (!contains_var(e)) return detail::constant_certificate(e);
    if (auto a = detail::build_annihilator(e))
        return AlgebraicityCertificate::algebraic(*a);

    // ln(x) is the inverse of exp, so the inverse-closure argument applies
    // before the generic composition rule.
    if (e.kind() == ExprKind::Ln && e.child(0).kind() == ExprKind::Var)
        return AlgebraicityCertificate::transcendental(
            TranscendenceRule::R3, "inverse of exp, which is transcendental by R1");

    if (e.kind() == ExprKind::Exp && e.child(0).kind() == ExprKind::Mul) {
        Expr f0 = e.child(0).child(0), f1 = e.child(0).child(1);
        for (int swap = 0; swap < 2; ++swap) {
            Expr lnpart = swap ? f1 : f0, varpart = swap ? f0 : f1;
            if (lnpart.kind() == ExprKind::Ln && varpart.kind() == ExprKind::Var &&
                !contains_var(lnpart.child(0))) {
                Expr base = lnpart.child(0);
                if (detail::constant_certificate(base).is_transcendental())
                    return AlgebraicityCertificate::transcendental(
                        TranscendenceRule::R2,
                        "base " + to_string(base) + " is a flagged transcendental constant");
            }
        }
    }

    if (e.kind() == ExprKind::Exp || e.kind() == ExprKind::Ln || e.kind() == ExprKind::Sin ||
        e.kind() == ExprKind::Cos) {
        Expr u = e.child(0);
        if (contains_var(u) && detail::build_annihilator(u) &&
            detail::certified_nonconstant(u, domain))
            return AlgebraicityCertificate::transcendental(
                TranscendenceRule::R1,
                std::string(e.kind() == ExprKind::Exp   ? "exp"
                            : e.kind() == ExprKind::Ln  ? "ln"
                            : e.kind() == ExprKind::Sin ? "sin"
                                                        : "cos") +
                    " of a nonconstant algebraic function");
    }

    if (e.kind() == ExprKind::LambertW) {
        Expr u = e.child(0);
        if (contains_var(u) && detail::build_annihilator(u) &&
            detail::certified_nonconstant(u, domain))
            return AlgebraicityCertificate::transcendental(
                TranscendenceRule::R4, "Lambert W of a nonconstant algebraic function");
    }

    return AlgebraicityCertificate::unknown();
}

// ---- exact verification through radical towers ----

namespace detail {

/// One adjoined radical: the value (radicand)^(1/n), where the radicand is
/// a polynomial over x and the radicals adjoined before this one.
struct Radical {
    unsigned long n;
    NPoly radicand;
};

/// Ordered list of adjoined radicals. Variable 0 is x; variable i+1 is
/// radical i.
class Tower {
    std::vector<Radical> rads_;

public:
    size_t size() const { return rads_.size(); }
    const Radical& rad(size_t i) const { return rads_[i]; }

    size_t add(unsigned long n, const NPoly& radicand) {
        for (size_t i = 0; i < rads_.size(); ++i) {
            if (rads_[i].n != n) continue;
            size_t w = std::max(rads_[i].radicand.nvars(), radicand.nvars());
            if (rads_[i].radicand.widened(w) == radicand.widened(w)) return i;
        }
        rads_.push_back({n, radicand});
        return rads_.size() - 1;
    }
};

/// Normal form under the rewrite rules r_i^(n_i) -> radicand_i. Every
/// radical exponent ends below its index. Terminates because each rewrite
/// lowers the exponent vector in the lexicographic order that ranks later
/// radicals first.
inline NPoly tower_reduce(const Tower& tw, NPoly p) {
    size_t width = 1 + tw.size();
    p = p.widened(width);
    for (;;) {
        bool changed = false;
        NPoly out(width);
        for (const auto& [e, c] : p.terms()) {
            size_t hit = width;
            for (size_t i = tw.size(); i-- > 0;) {
                if (e[i + 1] >= tw.rad(i).n) {
                    hit = i;
                    break;
                }
            }
            NPoly mono(width);
            std::vector<unsigned> ex = e;
            if (hit < width) {
                ex[hit + 1] -= static_cast<unsigned>(tw.rad(hit).n);
                changed = true;
            }
            mono = NPoly::constant(width, c);
            for (size_t v = 0; v < width; ++v)
                if (ex[v]) mono = mono * NPoly::variable(width, v).pow(ex[v]);
            if (hit < width) mono = mono * tw.rad(hit).radicand.widened(width);
            out = out + mono;
        }
        p = out;
        if (!changed) return p;
    }
}

/// Formal fraction over the tower ring.
struct TowerFraction {
    NPoly num, den;
};

inline std::pair<NPoly, NPoly> matched(const NPoly& a, const NPoly& b) {
    size_t w = std::max(a.nvars(), b.nvars());
    return {a.widened(w), b.widened(w)};
}

inline std::optional<TowerFraction> to_tower(const Expr& e, Tower& tw) {
    auto combine = [&](const TowerFraction& a, const TowerFraction& b, ExprKind k)
        -> TowerFraction {
        size_t w = std::max({a.num.nvars(), a.den.nvars(), b.num.nvars(), b.den.nvars()});
        NPoly an = a.num.widened(w), ad = a.den.widened(w);
        NPoly bn = b.num.widened(w), bd = b.den.widened(w);
        switch (k) {
            case ExprKind::Add:
                return {an * bd + bn * ad, ad * bd};
            case ExprKind::Sub:
                return {an * bd - bn * ad, ad * bd};
            case ExprKind::Mul:
                return {an * bn, ad * bd};
            default:
                return {an * bd, ad * bn};
        }
    };
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return TowerFraction{NPoly::constant(1, e.rational_value().get_num()),
                                 NPoly::constant(1, e.rational_value().get_den())};
        case ExprKind::Var:
            return TowerFraction{NPoly::variable(1, 0), NPoly::constant(1, Int(1))};
        case ExprKind::Neg: {
            auto a = to_tower(e.child(0), tw);
            if (!a) return std::nullopt;
            return TowerFraction{-a->num, a->den};
        }
        case ExprKind::Add:
        case ExprKind::Sub:
        case ExprKind::Mul: {
            auto a = to_tower(e.child(0), tw), b = to_tower(e.child(1), tw);
            if (!a || !b) return std::nullopt;
            return combine(*a, *b, e.kind());
        }
        case ExprKind::Div: {
            auto a = to_tower(e.child(0), tw), b = to_tower(e.child(1), tw);
            if (!a || !b) return std::nullopt;
            if (tower_reduce(tw, b->num).is_zero()) return std::nullopt;
            return combine(*a, *b, ExprKind::Div);
        }
        case ExprKind::IntPow: {
            auto a = to_tower(e.child(0), tw);
            if (!a) return std::nullopt;
            long long k = e.ipow_exponent();
            if (k == 0) return TowerFraction{NPoly::constant(1, Int(1)), NPoly::constant(1, Int(1))};
            if (k < 0) {
                if (tower_reduce(tw, a->num).is_zero()) return std::nullopt;
                std::swap(a->num, a->den);
                k = -k;
            }
            return TowerFraction{a->num.pow(static_cast<unsigned>(k)),
                                 a->den.pow(static_cast<unsigned>(k))};
        }
        case ExprKind::Root: {
            auto a = to_tower(e.child(0), tw);
            if (!a) return std::nullopt;
            unsigned long n = static_cast<unsigned long>(e.root_index());
            auto [an, ad] = matched(a->num, a->den);
            NPoly radicand = tower_reduce(tw, an * ad.pow(static_cast<unsigned>(n - 1)));
            if (radicand.is_zero())
                return TowerFraction{NPoly::constant(1, Int(0)), NPoly::constant(1, Int(1))};
            bool constant_radicand =
                radicand.terms().size() == 1 && radicand.terms().begin()->first ==
                    std::vector<unsigned>(radicand.nvars(), 0);
            bool constant_den = ad.terms().size() == 1 && ad.terms().begin()->first ==
                    std::vector<unsigned>(ad.nvars(), 0);
            if (constant_radicand && constant_den) {
                Rational q = make_rational(radicand.terms().begin()->second, Int(1)) /
                             rational_pow(Rational(ad.terms().begin()->second),
                                          static_cast<long>(n));
                if (auto r = rational_nth_root(q, n))
                    return TowerFraction{NPoly::constant(1, r->get_num()),
                                         NPoly::constant(1, r->get_den())};
                if (n == 2 && sgn(q) > 0) {
                    // sqrt(p/q) = s*sqrt(d)/q with s^2 d = p*q, d squarefree
                    Int pq = q.get_num() * q.get_den();
                    auto [s, d] = squarefree_decompose(pq);
                    size_t idx = tw.add(2, NPoly::constant(1, d));
                    return TowerFraction{
                        NPoly::constant(idx + 2, s) * NPoly::variable(idx + 2, idx + 1),
                        NPoly::constant(1, q.get_den())};
                }
            }
            // pull square content out of the radicand so that rational
            // multiples share one tower entry
            if (n == 2) {
                Int g = radicand.content();
                auto [s, d] = squarefree_decompose(g);
                if (s > 1) {
                    NPoly inner(radicand.nvars());
                    for (const auto& [ex, c] : radicand.terms())
                        inner = inner + NPoly::constant(radicand.nvars(), Int(c / (s * s)))
                                    .widened(radicand.nvars()) *
                                    [&] {
                                        NPoly m = NPoly::constant(radicand.nvars(), Int(1));
                                        for (size_t v = 0; v < radicand.nvars(); ++v)
                                            if (ex[v]) m = m * NPoly::variable(radicand.nvars(), v)
                                                               .pow(ex[v]);
                                        return m;
                                    }();
                    size_t idx = tw.add(2, inner);
                    auto [sn, dn] = matched(NPoly::constant(idx + 2, s) *
                                                NPoly::variable(idx + 2, idx + 1),
                                            ad);
                    return TowerFraction{sn, dn};
                }
            }
            size_t idx = tw.add(n, radicand);
            auto [rn, rd] = matched(NPoly::variable(idx + 2, idx + 1), ad);
            return TowerFraction{rn, rd};
        }
        default:
            return std::nullopt;
    }
}

inline NPoly bipoly_x_to_npoly(const BiPoly& row, size_t width) {
    NPoly out(width);
    for (const auto& [e, c] : row.terms())
        out = out + NPoly::constant(width, c) * NPoly::variable(width, 0).pow(e.first);
    return out;
}

}  // namespace detail

enum class VerifyResult { Verified, Refuted, Inconclusive };

/// Checks the defining identity P(x, e(x)) = 0. Sample enclosures that
/// exclude 0 refute it outright; a formal reduction to 0 over the radical
/// tower of e proves it. Anything in between stays Inconclusive.
inline VerifyResult annihilator_verify(const Expr& e, const BiPoly& p, int samples,
                                       mpfr_prec_t precision) {
    if (p.is_zero()) throw ZeroInput();
    Domain nd = natural_domain(e);
    std::vector<Rational> pts =
        detail::domain_samples(nd, static_cast<size_t>(std::max(samples, 0)));
    for (const Rational& x0 : pts) {
        try {
            DyadicInterval y = eval_interval_at(e, x0, precision);
            DyadicInterval v = detail::bipoly_enclosure(p, x0, y, precision);
            if (!v.contains_zero()) return VerifyResult::Refuted;
        } catch (const DomainViolation&) {
        } catch (const EmptyIntersection&) {
        }
    }
    detail::Tower tw;
    auto tf = detail::to_tower(e, tw);
    if (!tf) return VerifyResult::Inconclusive;
    size_t width = 1 + tw.size();
    NPoly numv = tf->num.widened(width), denv = tf->den.widened(width);
    long dy = p.degree_y();
    NPoly acc(width);
    NPoly numpow = NPoly::constant(width, Int(1));
    std::vector<NPoly> numpows;
    for (long j = 0; j <= dy; ++j) {
        numpows.push_back(numpow);
        numpow = detail::tower_reduce(tw, numpow * numv);
    }
    for (long j = 0; j <= dy; ++j) {
        NPoly row = detail::bipoly_x_to_npoly(p.coeff_y(static_cast<unsigned>(j)), width);
        if (row.is_zero()) continue;
        NPoly denpow = denv.pow(static_cast<unsigned>(dy - j));
        acc = acc + row * numpows[static_cast<size_t>(j)] * denpow;
    }
    if (detail::tower_reduce(tw, acc).is_zero()) return VerifyResult::Verified;
    return VerifyResult::Inconclusive;
}

enum class EquationClass { AlgebraicEq, TranscendentalEq, UnknownEq };

/// Transcendental when either side is certified transcendental; algebraic
/// when both sides carry annihilators; unknown otherwise.
inline EquationClass classify_equation(const Equation& eq) {
    if (eq.domain().is_empty()) return EquationClass::UnknownEq;
    AlgebraicityCertificate l = classify(eq.lhs(), eq.domain());
    AlgebraicityCertificate r = classify(eq.rhs(), eq.domain());
    if (l.is_transcendental() || r.is_transcendental()) return EquationClass::TranscendentalEq;
    if (l.is_algebraic() && r.is_algebraic()) return EquationClass::AlgebraicEq;
    return EquationClass::UnknownEq;
}

// ---- enumeration of the real algebraic numbers ----

namespace detail {

/// Equality test for two isolated roots: equal exactly when the gcd of
/// their defining polynomials has a root in the overlap of the isolating
/// intervals.
inline bool same_algebraic(const IsolatedRoot& a, const IsolatedRoot& b) {
    if (a.hi <= b.lo || b.hi <= a.lo) return false;
    UniPoly g = gcd(a.sqf, b.sqf);
    if (g.degree() < 1) return false;
    Rational lo = std::max(a.lo, b.lo), hi = std::min(a.hi, b.hi);
    return SturmChain(g).count_in(lo, hi) > 0;
}

}  // namespace detail

/// First `count` distinct real algebraic numbers, enumerating integer
/// polynomials by height (degree plus coefficient l1-norm), then degree,
/// then coefficient tuples with atoms ordered 0, 1, -1, 2, -2, ...
/// Each number is returned with the first polynomial that produced it.
inline std::vector<std::pair<UniPoly, IsolatedRoot>> enumerate_algebraic(long count) {
    std::vector<std::pair<UniPoly, IsolatedRoot>> out;
    if (count <= 0) return out;
    auto atom = [](long j) -> long { return j == 0 ? 0 : (j % 2 ? (j + 1) / 2 : -(j / 2)); };
    for (unsigned h = 2; static_cast<long>(out.size()) < count; ++h) {
        for (unsigned d = 1; d < h && static_cast<long>(out.size()) < count; ++d) {
            long budget = static_cast<long>(h - d);
            std::vector<long> c(d + 1, 0);
            auto emit = [&]() {
                std::vector<Rational> coeffs;
                coeffs.reserve(c.size());
                for (long v : c) coeffs.emplace_back(v);
                UniPoly p(std::move(coeffs));
                for (IsolatedRoot& r : sturm_isolate(p)) {
                    if (static_cast<long>(out.size()) >= count) return;
                    bool dup = false;
                    for (const auto& [q, kept] : out)
                        if (detail::same_algebraic(kept, r)) {
                            dup = true;
                            break;
                        }
                    if (!dup) out.emplace_back(p, r);
                }
            };
            auto rec = [&](auto&& self, unsigned i, long used) -> void {
                if (static_cast<long>(out.size()) >= count) return;
                if (i == d) {
                    c[d] = budget - used;  // positive by the pruning below
                    emit();
                    return;
                }
                for (long j = 0;; ++j) {
                    long v = atom(j);
                    long a = v < 0 ? -v : v;
                    if (a > budget - used - 1) break;  // atom sizes only grow
                    c[i] = v;
                    self(self, i + 1, used + a);
                    if (static_cast<long>(out.size()) >= count) return;
                }
            };
            rec(rec, 0, 0);
        }
    }
    return out;
}

}  // namespace solset
