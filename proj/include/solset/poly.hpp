#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "solset/expr.hpp"
#include "solset/rational.hpp"

namespace solset {

struct ZeroPolynomial : std::domain_error {
    ZeroPolynomial() : std::domain_error("zero polynomial") {}
};
struct DegreeOutOfRange : std::domain_error {
    using std::domain_error::domain_error;
};

/// Dense univariate polynomial over Rational; index = degree, trailing
/// zeros trimmed so degree() is honest. degree() of the zero polynomial
/// is -1.
class UniPoly {
    std::vector<Rational> c_;

    void trim() {
        while (!c_.empty() && sgn(c_.back()) == 0) c_.pop_back();
    }

public:
    UniPoly() = default;
    explicit UniPoly(std::vector<Rational> coeffs) : c_(std::move(coeffs)) { trim(); }

    static UniPoly zero() { return UniPoly(); }
    static UniPoly constant(const Rational& v) { return UniPoly({v}); }
    static UniPoly x() { return UniPoly({Rational(0), Rational(1)}); }
    /// c * x^k
    static UniPoly monomial(const Rational& c, size_t k) {
        std::vector<Rational> v(k + 1, Rational(0));
        v[k] = c;
        return UniPoly(std::move(v));
    }

    bool is_zero() const { return c_.empty(); }
    long degree() const { return static_cast<long>(c_.size()) - 1; }
    Rational coeff(size_t i) const { return i < c_.size() ? c_[i] : Rational(0); }
    const Rational& leading() const { return c_.back(); }
    const std::vector<Rational>& coeffs() const { return c_; }

    Rational eval(const Rational& t) const {
        Rational acc(0);
        for (size_t i = c_.size(); i-- > 0;) acc = acc * t + c_[i];
        return acc;
    }

    UniPoly derivative() const {
        if (c_.size() <= 1) return zero();
        std::vector<Rational> d(c_.size() - 1);
        for (size_t i = 1; i < c_.size(); ++i) d[i - 1] = c_[i] * Rational(static_cast<long>(i));
        return UniPoly(std::move(d));
    }

    friend UniPoly operator+(const UniPoly& a, const UniPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) + b.coeff(i);
        return UniPoly(std::move(r));
    }
    friend UniPoly operator-(const UniPoly& a, const UniPoly& b) {
        std::vector<Rational> r(std::max(a.c_.size(), b.c_.size()), Rational(0));
        for (size_t i = 0; i < r.size(); ++i) r[i] = a.coeff(i) - b.coeff(i);
        return UniPoly(std::move(r));
    }
    friend UniPoly operator-(const UniPoly& a) {
        std::vector<Rational> r(a.c_);
        for (auto& v : r) v = -v;
        return UniPoly(std::move(r));
    }
    friend UniPoly operator*(const UniPoly& a, const UniPoly& b) {
        if (a.is_zero() || b.is_zero()) return zero();
        std::vector<Rational> r(a.c_.size() + b.c_.size() - 1, Rational(0));
        for (size_t i = 0; i < a.c_.size(); ++i)
            for (size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
        return UniPoly(std::move(r));
    }
    friend UniPoly operator*(const Rational& s, const UniPoly& a) {
        std::vector<Rational> r(a.c_);
        for (auto& v : r) v *= s;
        return UniPoly(std::move(r));
    }
    friend bool operator==(const UniPoly& a, const UniPoly& b) { return a.c_ == b.c_; }

    UniPoly pow(unsigned long e) const {
        UniPoly acc = constant(Rational(1));
        UniPoly base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    /// Euclidean division; divisor must be nonzero.
    friend std::pair<UniPoly, UniPoly> divmod(const UniPoly& a, const UniPoly& b) {
        if (b.is_zero()) throw ZeroPolynomial();
        UniPoly r = a;
        std::vector<Rational> q(a.c_.size() > b.c_.size() ? a.c_.size() - b.c_.size() + 1 : 1,
                                Rational(0));
        while (!r.is_zero() && r.degree() >= b.degree()) {
            size_t shift = static_cast<size_t>(r.degree() - b.degree());
            Rational f = r.leading() / b.leading();
            q[shift] = f;
            r = r - monomial(f, shift) * b;
        }
        return {UniPoly(std::move(q)), r};
    }

    UniPoly monic() const {
        if (is_zero()) return *this;
        return Rational(Rational(1) / leading()) * *this;
    }

    /// Divides coefficients by their positive content so they become
    /// coprime integers; the sign of the leading coefficient is kept.
    UniPoly primitive() const {
        if (is_zero()) return *this;
        Int lcm_den(1), gcd_num(0);
        for (const auto& v : c_) {
            Int l;
            mpz_lcm(l.get_mpz_t(), lcm_den.get_mpz_t(), den(v).get_mpz_t());
            lcm_den = l;
        }
        for (const auto& v : c_) {
            Int scaled = num(v) * (lcm_den / den(v));
            Int g;
            mpz_gcd(g.get_mpz_t(), gcd_num.get_mpz_t(), scaled.get_mpz_t());
            gcd_num = g;
        }
        return make_rational(lcm_den, gcd_num) * *this;
    }
};

inline UniPoly gcd(const UniPoly& a, const UniPoly& b) {
    UniPoly x = a, y = b;
    while (!y.is_zero()) {
        UniPoly r = divmod(x, y).second;
        x = y;
        y = r.is_zero() ? r : r.primitive();
    }
    return x.is_zero() ? x : x.monic();
}

/// p with all repeated roots collapsed to simple ones: p / gcd(p, p').
inline UniPoly squarefree_part(const UniPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    if (p.degree() == 0) return UniPoly::constant(Rational(1));
    UniPoly g = gcd(p, p.derivative());
    if (g.degree() == 0) return p.primitive();
    return divmod(p, g).first.primitive();
}

/// All real roots r satisfy |r| < cauchy_bound(p); the bound is an integer.
inline Rational cauchy_bound(const UniPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    Rational m(0);
    for (long i = 0; i < p.degree(); ++i) {
        Rational q = abs(p.coeff(static_cast<size_t>(i)) / p.leading());
        if (q > m) m = q;
    }
    Rational b = m + 1;
    Int ceil_b = num(b) / den(b) + 1;
    return Rational(ceil_b);
}

/// Sturm chain of a squarefree polynomial; counts distinct real roots by
/// sign variations.
class SturmChain {
    std::vector<UniPoly> seq_;

    static int variations(const std::vector<int>& signs) {
        int v = 0, prev = 0;
        for (int s : signs) {
            if (s == 0) continue;
            if (prev != 0 && s != prev) ++v;
            prev = s;
        }
        return v;
    }

public:
    explicit SturmChain(const UniPoly& squarefree) {
        seq_.push_back(squarefree);
        if (squarefree.degree() >= 1) {
            seq_.push_back(squarefree.derivative().primitive());
            while (seq_.back().degree() >= 1) {
                UniPoly r = divmod(seq_[seq_.size() - 2], seq_.back()).second;
                if (r.is_zero()) break;
                seq_.push_back((-r).primitive());
            }
        }
    }

    const std::vector<UniPoly>& sequence() const { return seq_; }

    int variations_at(const Rational& t) const {
        std::vector<int> s;
        s.reserve(seq_.size());
        for (const auto& p : seq_) s.push_back(sgn(p.eval(t)));
        return variations(s);
    }
    int variations_at_pos_inf() const {
        std::vector<int> s;
        for (const auto& p : seq_) s.push_back(p.is_zero() ? 0 : sgn(p.leading()));
        return variations(s);
    }
    int variations_at_neg_inf() const {
        std::vector<int> s;
        for (const auto& p : seq_) {
            if (p.is_zero()) {
                s.push_back(0);
            } else {
                int lead = sgn(p.leading());
                s.push_back(p.degree() % 2 ? -lead : lead);
            }
        }
        return variations(s);
    }

    /// Number of distinct real roots in (lo, hi].
    long count_in(const Rational& lo, const Rational& hi) const {
        return variations_at(lo) - variations_at(hi);
    }
    long count_all() const { return variations_at_neg_inf() - variations_at_pos_inf(); }
};

/// One real root of poly, trapped in the open interval (lo, hi) whose
/// endpoints are dyadic rationals and provably not roots; sign(sqf(lo)) !=
/// sign(sqf(hi)). `simple` is false when the root is repeated in poly.
struct IsolatedRoot {
    UniPoly poly;
    UniPoly sqf;
    Rational lo, hi;
    bool simple = true;

    Rational width() const { return hi - lo; }
    Rational midpoint() const { return (lo + hi) / 2; }

    /// Exact root value when the root is rational and already pinned:
    /// detected during refinement when a bisection point evaluates to 0.
    std::optional<Rational> exact;

    void refine_once() {
        if (exact) {
            Rational w = (hi - lo) / 4;
            lo = *exact - w;
            hi = *exact + w;
            return;
        }
        Rational m = (lo + hi) / 2;
        int sm = sgn(sqf.eval(m));
        if (sm == 0) {
            exact = m;
            refine_once();
            return;
        }
        if (sm == sgn(sqf.eval(lo))) {
            lo = m;
        } else {
            hi = m;
        }
    }

    void refine_below(const Rational& target_width) {
        while (width() > target_width) refine_once();
    }

    bool contains(const Rational& t) const { return lo < t && t < hi; }
};

/// Distinct real roots of p as disjoint isolating intervals, ascending.
inline std::vector<IsolatedRoot> sturm_isolate(const UniPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    std::vector<IsolatedRoot> out;
    if (p.degree() == 0) return out;
    UniPoly sqf = squarefree_part(p);
    if (sqf.degree() == 0) return out;
    SturmChain chain(sqf);
    UniPoly mult = gcd(p, p.derivative());
    std::optional<SturmChain> mult_chain;
    if (mult.degree() >= 1) mult_chain.emplace(squarefree_part(mult));

    Rational bound = cauchy_bound(sqf);

    auto emit = [&](const Rational& lo, const Rational& hi) {
        IsolatedRoot r{p, sqf, lo, hi, true, std::nullopt};
        if (mult_chain && mult_chain->count_in(lo, hi) > 0) r.simple = false;
        out.push_back(std::move(r));
    };

    // Counts are over (lo, hi]; hi is never a root on any path below, so
    // count 1 means one root in the open interval.
    auto go = [&](auto&& self, const Rational& lo, const Rational& hi) -> void {
        long n = chain.count_in(lo, hi);
        if (n == 0) return;
        if (n == 1) {
            emit(lo, hi);
            return;
        }
        Rational m = (lo + hi) / 2;
        if (sgn(sqf.eval(m)) != 0) {
            self(self, lo, m);
            self(self, m, hi);
            return;
        }
        // m itself is a root: trap it symmetrically, then recurse outside.
        Rational eps = (hi - lo) / 4;
        while (sgn(sqf.eval(m - eps)) == 0 || sgn(sqf.eval(m + eps)) == 0 ||
               chain.count_in(m - eps, m + eps) != 1)
            eps /= 2;
        emit(m - eps, m + eps);
        self(self, lo, m - eps);
        self(self, m + eps, hi);
    };
    go(go, -bound, bound);
    std::sort(out.begin(), out.end(),
              [](const IsolatedRoot& a, const IsolatedRoot& b) { return a.lo < b.lo; });
    return out;
}

// ---- integer factoring, for rational roots and squarefree radicands ----

namespace detail {

inline Int pollard_rho(const Int& n) {
    // Brent's cycle variant; n must be composite, odd, > 1.
    for (unsigned long c = 1;; ++c) {
        Int x(2), y(2), d(1);
        Int diff, saved;
        while (d == 1) {
            x = (x * x + c) % n;
            y = (y * y + c) % n;
            y = (y * y + c) % n;
            diff = x > y ? x - y : y - x;
            if (diff == 0) break;
            mpz_gcd(d.get_mpz_t(), diff.get_mpz_t(), n.get_mpz_t());
        }
        if (d != 1 && d != n) return d;
    }
}

inline void factorize_into(Int n, std::map<Int, unsigned>& out) {
    if (n < 0) n = -n;
    if (n <= 1) return;
    for (unsigned long p : {2ul, 3ul, 5ul, 7ul, 11ul, 13ul}) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), p)) {
            ++out[Int(static_cast<long>(p))];
            n /= static_cast<long>(p);
        }
    }
    unsigned long d = 17;
    while (n > 1 && Int(d) * Int(d) <= n && d < 100000) {
        while (mpz_divisible_ui_p(n.get_mpz_t(), d)) {
            ++out[Int(static_cast<long>(d))];
            n /= static_cast<long>(d);
        }
        d += 2;
    }
    if (n == 1) return;
    if (mpz_probab_prime_p(n.get_mpz_t(), 40)) {
        ++out[n];
        return;
    }
    Int f = pollard_rho(n);
    factorize_into(f, out);
    factorize_into(n / f, out);
}

inline std::map<Int, unsigned> factorize(const Int& n) {
    std::map<Int, unsigned> out;
    factorize_into(n, out);
    return out;
}

inline std::vector<Int> divisors(const Int& n) {
    auto f = factorize(n);
    std::vector<Int> out{Int(1)};
    for (const auto& [p, e] : f) {
        size_t base = out.size();
        Int pk(1);
        for (unsigned k = 1; k <= e; ++k) {
            pk *= p;
            for (size_t i = 0; i < base; ++i) out.push_back(out[i] * pk);
        }
    }
    return out;
}

}  // namespace detail

/// n = s^2 * d with d squarefree; n must be positive.
inline std::pair<Int, Int> squarefree_decompose(const Int& n) {
    if (n <= 0) throw std::invalid_argument("squarefree_decompose needs n > 0");
    Int s(1), d(1);
    for (const auto& [p, e] : detail::factorize(n)) {
        for (unsigned k = 0; k + 1 < e; k += 2) s *= p;
        if (e % 2) d *= p;
    }
    return {s, d};
}

/// All rational roots of p, ascending, each certified by exact evaluation.
inline std::vector<Rational> rational_roots(const UniPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    std::vector<Rational> out;
    if (p.degree() == 0) return out;
    UniPoly q = p.primitive();
    // Strip x^k: 0 is a root when the constant term vanishes.
    size_t low = 0;
    while (sgn(q.coeff(low)) == 0) ++low;
    if (low > 0) {
        out.push_back(Rational(0));
        std::vector<Rational> shifted(q.coeffs().begin() + static_cast<long>(low),
                                      q.coeffs().end());
        q = UniPoly(std::move(shifted));
    }
    if (q.degree() >= 1) {
        Int a0 = num(q.coeff(0));
        Int an = num(q.leading());
        for (const Int& dn : detail::divisors(a0)) {
            for (const Int& dd : detail::divisors(an)) {
                Rational cand = make_rational(dn, dd);
                if (sgn(q.eval(cand)) == 0) out.push_back(cand);
                if (sgn(q.eval(-cand)) == 0) out.push_back(-cand);
            }
        }
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Largest k >= 2 with p(x) = reduced(x^k), or nothing.
inline std::optional<std::pair<long, UniPoly>> substitution_reduce(const UniPoly& p) {
    if (p.is_zero()) throw ZeroPolynomial();
    long g = 0;
    for (long i = 1; i <= p.degree(); ++i) {
        if (sgn(p.coeff(static_cast<size_t>(i))) == 0) continue;
        Int gg;
        mpz_gcd(gg.get_mpz_t(), Int(g).get_mpz_t(), Int(i).get_mpz_t());
        g = gg.get_si();
        if (g == 1) return std::nullopt;
    }
    if (g < 2) return std::nullopt;
    std::vector<Rational> reduced(static_cast<size_t>(p.degree() / g) + 1, Rational(0));
    for (size_t j = 0; j < reduced.size(); ++j) reduced[j] = p.coeff(j * static_cast<size_t>(g));
    return std::make_pair(g, UniPoly(std::move(reduced)));
}

/// a + b*sqrt(d) with d a squarefree positive integer; d == 1 forces b == 0
/// (the value is plain rational).
struct SurdValue {
    Rational a;
    Rational b;
    Int d;

    bool is_rational() const { return d == 1; }

    /// Exact comparison of a1 + b1*sqrt(d) with a2 + b2*sqrt(d), same d.
    static int compare(const SurdValue& x, const SurdValue& y) {
        Rational da = x.a - y.a;
        Rational db = x.b - y.b;
        // da + db*sqrt(d) vs 0
        if (sgn(db) == 0) return sgn(da);
        if (sgn(da) == 0) return sgn(db);
        if (sgn(da) > 0 && sgn(db) > 0) return 1;
        if (sgn(da) < 0 && sgn(db) < 0) return -1;
        // Opposite signs: compare da^2 with db^2 * d.
        int mag = sgn(da * da - db * db * Rational(x.d));
        return sgn(da) > 0 ? mag : -mag;
    }
};

/// Exact real roots of a degree-1 or degree-2 polynomial, ascending. A
/// negative discriminant yields the empty list.
inline std::vector<SurdValue> quadratic_solve(const UniPoly& p) {
    if (p.degree() < 1 || p.degree() > 2)
        throw DegreeOutOfRange("quadratic_solve needs degree 1 or 2");
    if (p.degree() == 1) return {SurdValue{-p.coeff(0) / p.coeff(1), Rational(0), Int(1)}};
    Rational A = p.coeff(2), B = p.coeff(1), C = p.coeff(0);
    Rational D = B * B - 4 * A * C;
    if (sgn(D) < 0) return {};
    Rational mid = -B / (2 * A);
    if (sgn(D) == 0) return {SurdValue{mid, Rational(0), Int(1)}};
    // sqrt(n/m) = sqrt(n*m)/m; pull the square part out of n*m.
    Int nm = num(D) * den(D);
    auto [s, d] = squarefree_decompose(nm);
    Rational radical_coeff = make_rational(s, den(D)) / abs(2 * A);
    if (d == 1) {
        // Perfect square: two rational roots.
        std::vector<SurdValue> out{SurdValue{mid - radical_coeff, Rational(0), Int(1)},
                                   SurdValue{mid + radical_coeff, Rational(0), Int(1)}};
        return out;
    }
    return {SurdValue{mid, -radical_coeff, d}, SurdValue{mid, radical_coeff, d}};
}

/// Expansion of e into a polynomial in x, when e uses only rationals, x,
/// negation, +, -, * and nonnegative integer powers.
inline std::optional<UniPoly> from_expr(const Expr& e) {
    switch (e.kind()) {
        case ExprKind::RationalLit:
            return UniPoly::constant(e.rational_value());
        case ExprKind::Var:
            return UniPoly::x();
        case ExprKind::Neg: {
            auto a = from_expr(e.child(0));
            if (!a) return std::nullopt;
            return -*a;
        }
        case ExprKind::Add: {
            auto a = from_expr(e.child(0)), b = from_expr(e.child(1));
            if (!a || !b) return std::nullopt;
            return *a + *b;
        }
        case ExprKind::Sub: {
            auto a = from_expr(e.child(0)), b = from_expr(e.child(1));
            if (!a || !b) return std::nullopt;
            return *a - *b;
        }
        case ExprKind::Mul: {
            auto a = from_expr(e.child(0)), b = from_expr(e.child(1));
            if (!a || !b) return std::nullopt;
            return *a * *b;
        }
        case ExprKind::IntPow: {
            if (e.ipow_exponent() < 0) return std::nullopt;
            auto a = from_expr(e.child(0));
            if (!a) return std::nullopt;
            return a->pow(static_cast<unsigned long>(e.ipow_exponent()));
        }
        default:
            return std::nullopt;
    }
}

/// Canonical expression form of a polynomial: descending powers joined
/// with + / -, coefficient 1 left implicit.
inline Expr to_expr(const UniPoly& p) {
    if (p.is_zero()) return Expr::integer(0);
    auto term = [](const Rational& c, long i) {
        Expr power = i == 0 ? Expr::integer(1) : i == 1 ? Expr::var() : Expr::intpow(Expr::var(), i);
        if (i == 0) return Expr::rational(c);
        if (c == 1) return power;
        return Expr::mul(Expr::rational(c), power);
    };
    Expr acc = Expr::integer(0);
    bool first = true;
    for (long i = p.degree(); i >= 0; --i) {
        Rational c = p.coeff(static_cast<size_t>(i));
        if (sgn(c) == 0) continue;
        if (first) {
            acc = sgn(c) < 0 ? Expr::neg(term(-c, i)) : term(c, i);
            first = false;
        } else {
            acc = sgn(c) < 0 ? Expr::sub(acc, term(-c, i)) : Expr::add(acc, term(c, i));
        }
    }
    return acc;
}

}  // namespace solset
