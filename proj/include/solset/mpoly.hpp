#pragma once

#include <algorithm>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "solset/rational.hpp"

namespace solset {

struct ZeroInput : std::domain_error {
    ZeroInput() : std::domain_error("zero polynomial input") {}
};
struct NoOccurrence : std::domain_error {
    NoOccurrence() : std::domain_error("eliminated variable does not occur") {}
};

/// Sparse bivariate polynomial over the integers in variables x and y.
/// Terms are kept in graded order (total degree, then y-degree) so the
/// last term is the leading one.
class BiPoly {
public:
    struct Cmp {
        bool operator()(const std::pair<unsigned, unsigned>& a,
                        const std::pair<unsigned, unsigned>& b) const {
            unsigned ta = a.first + a.second, tb = b.first + b.second;
            if (ta != tb) return ta < tb;
            if (a.second != b.second) return a.second < b.second;
            return a.first < b.first;
        }
    };
    using Terms = std::map<std::pair<unsigned, unsigned>, Int, Cmp>;

private:
    Terms t_;

    void add_term(unsigned dx, unsigned dy, const Int& c) {
        if (c == 0) return;
        auto key = std::make_pair(dx, dy);
        auto it = t_.find(key);
        if (it == t_.end()) {
            t_.emplace(key, c);
        } else {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

public:
    BiPoly() = default;

    static BiPoly constant(const Int& c) {
        BiPoly p;
        p.add_term(0, 0, c);
        return p;
    }
    static BiPoly term(const Int& c, unsigned dx, unsigned dy) {
        BiPoly p;
        p.add_term(dx, dy, c);
        return p;
    }
    static BiPoly x() { return term(Int(1), 1, 0); }
    static BiPoly y() { return term(Int(1), 0, 1); }

    bool is_zero() const { return t_.empty(); }
    const Terms& terms() const { return t_; }

    long degree_x() const {
        long d = -1;
        for (const auto& [e, c] : t_) d = std::max(d, static_cast<long>(e.first));
        return d;
    }
    long degree_y() const {
        long d = -1;
        for (const auto& [e, c] : t_) d = std::max(d, static_cast<long>(e.second));
        return d;
    }

    /// Coefficient of y^k: a polynomial in x alone.
    BiPoly coeff_y(unsigned k) const {
        BiPoly out;
        for (const auto& [e, c] : t_)
            if (e.second == k) out.add_term(e.first, 0, c);
        return out;
    }

    friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
        BiPoly out = a;
        for (const auto& [e, c] : b.t_) out.add_term(e.first, e.second, c);
        return out;
    }
    friend BiPoly operator-(const BiPoly& a, const BiPoly& b) {
        BiPoly out = a;
        for (const auto& [e, c] : b.t_) out.add_term(e.first, e.second, Int(-c));
        return out;
    }
    friend BiPoly operator-(const BiPoly& a) {
        BiPoly out;
        for (const auto& [e, c] : a.t_) out.add_term(e.first, e.second, Int(-c));
        return out;
    }
    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        BiPoly out;
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_)
                out.add_term(ea.first + eb.first, ea.second + eb.second, Int(ca * cb));
        return out;
    }
    friend bool operator==(const BiPoly& a, const BiPoly& b) { return a.t_ == b.t_; }

    BiPoly pow(unsigned e) const {
        BiPoly acc = constant(Int(1));
        BiPoly base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    Int content() const {
        Int g(0);
        for (const auto& [e, c] : t_) {
            Int r;
            mpz_gcd(r.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
            g = r;
        }
        return g;
    }

    /// Content removed and leading coefficient (graded order) positive.
    BiPoly primitive() const {
        if (is_zero()) return *this;
        Int g = content();
        if (sgn(t_.rbegin()->second) < 0) g = -g;
        BiPoly out;
        for (const auto& [e, c] : t_) out.add_term(e.first, e.second, Int(c / g));
        return out;
    }

    BiPoly swap_vars() const {
        BiPoly out;
        for (const auto& [e, c] : t_) out.add_term(e.second, e.first, c);
        return out;
    }

    /// P(x, -y)
    BiPoly negate_y() const {
        BiPoly out;
        for (const auto& [e, c] : t_)
            out.add_term(e.first, e.second, e.second % 2 ? Int(-c) : c);
        return out;
    }

    /// P(x, y^n)
    BiPoly stretch_y(unsigned n) const {
        BiPoly out;
        for (const auto& [e, c] : t_) out.add_term(e.first, e.second * n, c);
        return out;
    }

    /// y^deg * P(x, 1/y), with any leftover y^m factor stripped.
    BiPoly reverse_y() const {
        if (is_zero()) return *this;
        unsigned d = static_cast<unsigned>(degree_y());
        BiPoly out;
        for (const auto& [e, c] : t_) out.add_term(e.first, d - e.second, c);
        unsigned low = d;
        for (const auto& [e, c] : out.t_) low = std::min(low, e.second);
        if (low == 0) return out;
        BiPoly stripped;
        for (const auto& [e, c] : out.t_) stripped.add_term(e.first, e.second - low, c);
        return stripped;
    }

    Rational eval(const Rational& xv, const Rational& yv) const {
        Rational acc(0);
        for (const auto& [e, c] : t_)
            acc += Rational(c) * rational_pow(xv, static_cast<long>(e.first)) *
                   rational_pow(yv, static_cast<long>(e.second));
        return acc;
    }

    /// Exact division; throws when the quotient is not polynomial. Used by
    /// fraction-free elimination where exactness is guaranteed.
    friend BiPoly divexact(const BiPoly& a, const BiPoly& b) {
        if (b.is_zero()) throw ZeroInput();
        BiPoly rem = a, quot;
        auto blead = *b.t_.rbegin();
        while (!rem.is_zero()) {
            auto rlead = *rem.t_.rbegin();
            if (rlead.first.first < blead.first.first || rlead.first.second < blead.first.second)
                throw std::logic_error("inexact polynomial division");
            Int q = rlead.second / blead.second;
            if (q * blead.second != rlead.second)
                throw std::logic_error("inexact polynomial division");
            unsigned dx = rlead.first.first - blead.first.first;
            unsigned dy = rlead.first.second - blead.first.second;
            BiPoly t = term(q, dx, dy);
            quot = quot + t;
            rem = rem - t * b;
        }
        return quot;
    }
};

inline std::string to_string(const BiPoly& p, const char* xname = "x", const char* yname = "y") {
    if (p.is_zero()) return "0";
    // Render descending: y-degree first, then x-degree.
    std::vector<std::pair<std::pair<unsigned, unsigned>, Int>> terms(p.terms().begin(),
                                                                     p.terms().end());
    std::sort(terms.begin(), terms.end(), [](const auto& a, const auto& b) {
        if (a.first.second != b.first.second) return a.first.second > b.first.second;
        return a.first.first > b.first.first;
    });
    std::string out;
    bool first = true;
    for (const auto& [e, c] : terms) {
        Int a = c;
        if (first) {
            if (sgn(a) < 0) {
                out += "-";
                a = -a;
            }
        } else {
            out += sgn(a) < 0 ? " - " : " + ";
            if (sgn(a) < 0) a = -a;
        }
        first = false;
        std::string factors;
        if (e.first) {
            factors += xname;
            if (e.first > 1) factors += "^" + std::to_string(e.first);
        }
        if (e.second) {
            if (!factors.empty()) factors = std::string(yname) +
                                            (e.second > 1 ? "^" + std::to_string(e.second) : "") +
                                            "*" + factors;
            else {
                factors = yname;
                if (e.second > 1) factors += "^" + std::to_string(e.second);
            }
        }
        if (factors.empty()) {
            out += to_string(a);
        } else if (a == 1) {
            out += factors;
        } else {
            out += to_string(a) + "*" + factors;
        }
    }
    return out;
}

/// Determinant by fraction-free (Bareiss) elimination; entries stay
/// polynomial at every step.
inline BiPoly bareiss_determinant(std::vector<std::vector<BiPoly>> m) {
    size_t n = m.size();
    if (n == 0) return BiPoly::constant(Int(1));
    BiPoly prev = BiPoly::constant(Int(1));
    int sign = 1;
    for (size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k].is_zero()) {
            size_t r = k + 1;
            while (r < n && m[r][k].is_zero()) ++r;
            if (r == n) return BiPoly();
            std::swap(m[k], m[r]);
            sign = -sign;
        }
        for (size_t i = k + 1; i < n; ++i)
            for (size_t j = k + 1; j < n; ++j)
                m[i][j] = divexact(m[i][j] * m[k][k] - m[i][k] * m[k][j], prev);
        prev = m[k][k];
    }
    BiPoly det = m[n - 1][n - 1];
    return sign < 0 ? -det : det;
}

/// Resultant with respect to an auxiliary variable t of two polynomials
/// given densely in t with BiPoly coefficients.
inline BiPoly resultant_in_t(const std::vector<BiPoly>& a, const std::vector<BiPoly>& b) {
    auto deg = [](const std::vector<BiPoly>& p) {
        long d = static_cast<long>(p.size()) - 1;
        while (d >= 0 && p[static_cast<size_t>(d)].is_zero()) --d;
        return d;
    };
    long m = deg(a), n = deg(b);
    if (m < 0 || n < 0) throw ZeroInput();
    if (m == 0 && n == 0) return BiPoly::constant(Int(1));
    if (m == 0) return a[0].pow(static_cast<unsigned>(n));
    if (n == 0) return b[0].pow(static_cast<unsigned>(m));
    size_t size = static_cast<size_t>(m + n);
    std::vector<std::vector<BiPoly>> s(size, std::vector<BiPoly>(size));
    for (long r = 0; r < n; ++r)
        for (long i = 0; i <= m; ++i) s[static_cast<size_t>(r)][static_cast<size_t>(r + i)] =
            a[static_cast<size_t>(m - i)];
    for (long r = 0; r < m; ++r)
        for (long i = 0; i <= n; ++i)
            s[static_cast<size_t>(n + r)][static_cast<size_t>(r + i)] = b[static_cast<size_t>(n - i)];
    return bareiss_determinant(std::move(s));
}

/// Resultant of two bivariate polynomials eliminating one of their own
/// variables: eliminate_y = true removes y (result in x), false removes x.
inline BiPoly resultant(const BiPoly& p, const BiPoly& q, bool eliminate_y = true) {
    if (p.is_zero() || q.is_zero()) throw ZeroInput();
    const BiPoly pp = eliminate_y ? p : p.swap_vars();
    const BiPoly qq = eliminate_y ? q : q.swap_vars();
    long dp = pp.degree_y(), dq = qq.degree_y();
    if (dp < 1 && dq < 1) throw NoOccurrence();
    std::vector<BiPoly> a, b;
    for (long k = 0; k <= std::max(dp, 0l); ++k) a.push_back(pp.coeff_y(static_cast<unsigned>(k)));
    for (long k = 0; k <= std::max(dq, 0l); ++k) b.push_back(qq.coeff_y(static_cast<unsigned>(k)));
    BiPoly r = resultant_in_t(a, b);
    return eliminate_y ? r : r.swap_vars();
}

/// Sparse polynomial over the integers in any number of variables; just
/// enough ring arithmetic for tower reductions.
class NPoly {
public:
    struct Cmp {
        bool operator()(const std::vector<unsigned>& a, const std::vector<unsigned>& b) const {
            unsigned ta = 0, tb = 0;
            for (unsigned e : a) ta += e;
            for (unsigned e : b) tb += e;
            if (ta != tb) return ta < tb;
            return a < b;
        }
    };
    using Terms = std::map<std::vector<unsigned>, Int, Cmp>;

private:
    size_t nvars_ = 0;
    Terms t_;

    void add_term(const std::vector<unsigned>& e, const Int& c) {
        if (c == 0) return;
        auto it = t_.find(e);
        if (it == t_.end()) {
            t_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second == 0) t_.erase(it);
        }
    }

public:
    NPoly() = default;
    explicit NPoly(size_t nvars) : nvars_(nvars) {}

    static NPoly constant(size_t nvars, const Int& c) {
        NPoly p(nvars);
        p.add_term(std::vector<unsigned>(nvars, 0), c);
        return p;
    }
    static NPoly variable(size_t nvars, size_t i) {
        NPoly p(nvars);
        std::vector<unsigned> e(nvars, 0);
        e[i] = 1;
        p.add_term(e, Int(1));
        return p;
    }

    size_t nvars() const { return nvars_; }
    bool is_zero() const { return t_.empty(); }
    const Terms& terms() const { return t_; }

    /// Same polynomial viewed in a wider variable space.
    NPoly widened(size_t nvars) const {
        NPoly out(nvars);
        for (const auto& [e, c] : t_) {
            std::vector<unsigned> w = e;
            w.resize(nvars, 0);
            out.add_term(w, c);
        }
        return out;
    }

    unsigned degree_in(size_t var) const {
        unsigned d = 0;
        for (const auto& [e, c] : t_) d = std::max(d, e[var]);
        return d;
    }

    friend NPoly operator+(const NPoly& a, const NPoly& b) {
        NPoly out = a;
        for (const auto& [e, c] : b.t_) out.add_term(e, c);
        return out;
    }
    friend NPoly operator-(const NPoly& a, const NPoly& b) {
        NPoly out = a;
        for (const auto& [e, c] : b.t_) out.add_term(e, Int(-c));
        return out;
    }
    friend NPoly operator-(const NPoly& a) {
        NPoly out(a.nvars_);
        for (const auto& [e, c] : a.t_) out.add_term(e, Int(-c));
        return out;
    }
    friend NPoly operator*(const NPoly& a, const NPoly& b) {
        NPoly out(a.nvars_);
        std::vector<unsigned> e(a.nvars_);
        for (const auto& [ea, ca] : a.t_)
            for (const auto& [eb, cb] : b.t_) {
                for (size_t i = 0; i < a.nvars_; ++i) e[i] = ea[i] + eb[i];
                out.add_term(e, Int(ca * cb));
            }
        return out;
    }
    friend bool operator==(const NPoly& a, const NPoly& b) { return a.t_ == b.t_; }

    NPoly pow(unsigned e) const {
        NPoly acc = constant(nvars_, Int(1));
        NPoly base = *this;
        while (e) {
            if (e & 1) acc = acc * base;
            base = base * base;
            e >>= 1;
        }
        return acc;
    }

    Int content() const {
        Int g(0);
        for (const auto& [e, c] : t_) {
            Int r;
            mpz_gcd(r.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
            g = r;
        }
        return g;
    }

    NPoly primitive() const {
        if (is_zero()) return *this;
        Int g = content();
        if (sgn(t_.rbegin()->second) < 0) g = -g;
        NPoly out(nvars_);
        for (const auto& [e, c] : t_) out.add_term(e, Int(c / g));
        return out;
    }
};

}  // namespace solset
