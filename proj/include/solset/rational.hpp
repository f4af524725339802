#pragma once

#include <gmpxx.h>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace solset {

// Arbitrary-precision integers and rationals. mpq_class keeps the canonical
// form we rely on everywhere: positive denominator, gcd(num, den) = 1.
using Int = mpz_class;
using Rational = mpq_class;

inline Int num(const Rational& q) { return q.get_num(); }
inline Int den(const Rational& q) { return q.get_den(); }

inline bool is_integer(const Rational& q) { return q.get_den() == 1; }

inline Rational make_rational(const Int& n, const Int& d) {
    if (d == 0) throw std::invalid_argument("rational with zero denominator");
    Rational q(n, d);
    q.canonicalize();
    return q;
}

inline Rational rational_pow(const Rational& q, long e) {
    if (e == 0) return Rational(1);
    unsigned long a = e < 0 ? static_cast<unsigned long>(-(e + 1)) + 1 : static_cast<unsigned long>(e);
    Int n, d;
    mpz_pow_ui(n.get_mpz_t(), q.get_num().get_mpz_t(), a);
    mpz_pow_ui(d.get_mpz_t(), q.get_den().get_mpz_t(), a);
    if (e < 0) {
        if (n == 0) throw std::domain_error("0 raised to a negative power");
        return make_rational(d, n);
    }
    return make_rational(n, d);
}

// Exact n-th root of a rational, when one exists (num and den both perfect
// n-th powers). Negative input is accepted for odd n.
inline std::optional<Rational> rational_nth_root(const Rational& q, unsigned long n) {
    if (n == 0) throw std::invalid_argument("0th root");
    bool negate = false;
    Rational v = q;
    if (sgn(v) < 0) {
        if (n % 2 == 0) return std::nullopt;
        negate = true;
        v = -v;
    }
    Int rn, rd;
    int exact_n = mpz_root(rn.get_mpz_t(), v.get_num().get_mpz_t(), n);
    if (!exact_n) return std::nullopt;
    int exact_d = mpz_root(rd.get_mpz_t(), v.get_den().get_mpz_t(), n);
    if (!exact_d) return std::nullopt;
    Rational r = make_rational(rn, rd);
    return negate ? Rational(-r) : r;
}

// "123", "-4.25", ".5" -> exact rational. No exponent form: 'e' is a
// constant in the expression grammar.
inline std::optional<Rational> rational_from_decimal(std::string_view text) {
    if (text.empty()) return std::nullopt;
    size_t i = 0;
    bool neg = false;
    if (text[i] == '+' || text[i] == '-') {
        neg = text[i] == '-';
        ++i;
    }
    std::string int_part, frac_part;
    while (i < text.size() && text[i] >= '0' && text[i] <= '9') int_part += text[i++];
    if (i < text.size() && text[i] == '.') {
        ++i;
        while (i < text.size() && text[i] >= '0' && text[i] <= '9') frac_part += text[i++];
    }
    if (i != text.size()) return std::nullopt;
    if (int_part.empty() && frac_part.empty()) return std::nullopt;
    Int n(int_part.empty() ? "0" : int_part);
    if (!frac_part.empty()) {
        Int scale;
        mpz_ui_pow_ui(scale.get_mpz_t(), 10, frac_part.size());
        n = n * scale + Int(frac_part);
        Rational q = make_rational(n, scale);
        return neg ? Rational(-q) : q;
    }
    Rational q(n);
    return neg ? Rational(-q) : q;
}

// Rational bracket around -1/e = -0.36787944117144232159...:
// neg_inv_e_below() < -1/e < neg_inv_e_above().
inline const Rational& neg_inv_e_below() {
    static const Rational v = make_rational(Int("-367879441171442322"), Int("1000000000000000000"));
    return v;
}
inline const Rational& neg_inv_e_above() {
    static const Rational v = make_rational(Int("-367879441171442321"), Int("1000000000000000000"));
    return v;
}

inline std::string to_string(const Rational& q) {
    if (is_integer(q)) return q.get_num().get_str();
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline std::string to_string(const Int& n) { return n.get_str(); }

}  // namespace solset
