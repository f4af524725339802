#pragma once

#include <mpfr.h>

#include <algorithm>
#include <stdexcept>
#include <utility>

#include "solset/rational.hpp"

namespace solset {

struct EmptyIntersection : std::runtime_error {
    EmptyIntersection() : std::runtime_error("empty intersection") {}
};

/// A single binary floating-point number of explicit precision. Wraps
/// mpfr_t with value semantics; copies preserve the stored value exactly.
class Dyadic {
    mpfr_t v_;

public:
    explicit Dyadic(mpfr_prec_t prec = 64) {
        mpfr_init2(v_, prec);
        mpfr_set_zero(v_, 1);
    }
    Dyadic(const Dyadic& o) {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_set(v_, o.v_, MPFR_RNDN);
    }
    Dyadic(Dyadic&& o) noexcept {
        mpfr_init2(v_, mpfr_get_prec(o.v_));
        mpfr_swap(v_, o.v_);
    }
    Dyadic& operator=(const Dyadic& o) {
        if (this != &o) {
            mpfr_set_prec(v_, mpfr_get_prec(o.v_));
            mpfr_set(v_, o.v_, MPFR_RNDN);
        }
        return *this;
    }
    Dyadic& operator=(Dyadic&& o) noexcept {
        mpfr_swap(v_, o.v_);
        return *this;
    }
    ~Dyadic() { mpfr_clear(v_); }

    mpfr_ptr get() { return v_; }
    mpfr_srcptr get() const { return v_; }
    mpfr_prec_t prec() const { return mpfr_get_prec(v_); }

    bool is_finite() const { return mpfr_number_p(v_) != 0; }
    int sign() const { return mpfr_sgn(v_); }

    /// Exact: every finite dyadic is rational.
    Rational to_rational() const {
        Rational q;
        mpfr_get_q(q.get_mpq_t(), v_);
        return q;
    }
};

/// Closed interval with dyadic endpoints; either end may be infinite.
/// Every operation rounds the lower endpoint down and the upper endpoint
/// up, so the result encloses the exact image set.
class DyadicInterval {
    Dyadic lo_, hi_;

public:
    /// 0 * inf arises as a candidate endpoint product; the exact set value
    /// contributed by the zero factor is 0.
    static void fix_nan(mpfr_ptr x) {
        if (mpfr_nan_p(x)) mpfr_set_zero(x, 1);
    }

    DyadicInterval(Dyadic lo, Dyadic hi) : lo_(std::move(lo)), hi_(std::move(hi)) {}

    explicit DyadicInterval(mpfr_prec_t prec) : lo_(prec), hi_(prec) {}

    static DyadicInterval from_rational(const Rational& q, mpfr_prec_t prec) {
        DyadicInterval r(prec);
        mpfr_set_q(r.lo_.get(), q.get_mpq_t(), MPFR_RNDD);
        mpfr_set_q(r.hi_.get(), q.get_mpq_t(), MPFR_RNDU);
        return r;
    }
    static DyadicInterval entire(mpfr_prec_t prec) {
        DyadicInterval r(prec);
        mpfr_set_inf(r.lo_.get(), -1);
        mpfr_set_inf(r.hi_.get(), 1);
        return r;
    }
    static DyadicInterval zero(mpfr_prec_t prec) { return DyadicInterval(prec); }

    const Dyadic& lo() const { return lo_; }
    const Dyadic& hi() const { return hi_; }
    Dyadic& lo() { return lo_; }
    Dyadic& hi() { return hi_; }
    mpfr_prec_t prec() const { return std::max(lo_.prec(), hi_.prec()); }

    bool is_finite() const { return lo_.is_finite() && hi_.is_finite(); }
    bool is_point() const { return mpfr_equal_p(lo_.get(), hi_.get()) != 0; }

    bool contains_zero() const { return lo_.sign() <= 0 && hi_.sign() >= 0; }
    bool strictly_positive() const { return lo_.sign() > 0; }
    bool strictly_negative() const { return hi_.sign() < 0; }

    bool contains(const Rational& q) const {
        return mpfr_cmp_q(lo_.get(), q.get_mpq_t()) <= 0 &&
               mpfr_cmp_q(hi_.get(), q.get_mpq_t()) >= 0;
    }

    Rational lo_q() const { return lo_.to_rational(); }
    Rational hi_q() const { return hi_.to_rational(); }
    Rational width_exact() const { return hi_q() - lo_q(); }
    Rational midpoint_q() const { return (lo_q() + hi_q()) / 2; }
};

inline DyadicInterval operator-(const DyadicInterval& a) {
    DyadicInterval r(a.prec());
    mpfr_neg(r.lo().get(), a.hi().get(), MPFR_RNDD);
    mpfr_neg(r.hi().get(), a.lo().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval operator+(const DyadicInterval& a, const DyadicInterval& b) {
    DyadicInterval r(std::max(a.prec(), b.prec()));
    mpfr_add(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_add(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval operator-(const DyadicInterval& a, const DyadicInterval& b) {
    DyadicInterval r(std::max(a.prec(), b.prec()));
    mpfr_sub(r.lo().get(), a.lo().get(), b.hi().get(), MPFR_RNDD);
    mpfr_sub(r.hi().get(), a.hi().get(), b.lo().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval operator*(const DyadicInterval& a, const DyadicInterval& b) {
    mpfr_prec_t prec = std::max(a.prec(), b.prec());
    DyadicInterval r(prec);
    mpfr_srcptr as[2] = {a.lo().get(), a.hi().get()};
    mpfr_srcptr bs[2] = {b.lo().get(), b.hi().get()};
    Dyadic c(prec);
    bool first = true;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) {
            mpfr_mul(c.get(), as[i], bs[j], MPFR_RNDD);
            DyadicInterval::fix_nan(c.get());
            if (first || mpfr_cmp(c.get(), r.lo().get()) < 0) mpfr_set(r.lo().get(), c.get(), MPFR_RNDD);
            mpfr_mul(c.get(), as[i], bs[j], MPFR_RNDU);
            DyadicInterval::fix_nan(c.get());
            if (first || mpfr_cmp(c.get(), r.hi().get()) > 0) mpfr_set(r.hi().get(), c.get(), MPFR_RNDU);
            first = false;
        }
    return r;
}

/// 1/b. A denominator pinned to exactly zero has an empty image.
inline DyadicInterval reciprocal(const DyadicInterval& b) {
    mpfr_prec_t prec = b.prec();
    bool lz = b.lo().sign() == 0, hz = b.hi().sign() == 0;
    if (lz && hz) throw EmptyIntersection();
    if (b.lo().sign() < 0 && b.hi().sign() > 0) return DyadicInterval::entire(prec);
    DyadicInterval r(prec);
    if (lz) {
        mpfr_ui_div(r.lo().get(), 1, b.hi().get(), MPFR_RNDD);
        mpfr_set_inf(r.hi().get(), 1);
    } else if (hz) {
        mpfr_set_inf(r.lo().get(), -1);
        mpfr_ui_div(r.hi().get(), 1, b.lo().get(), MPFR_RNDU);
    } else {
        mpfr_ui_div(r.lo().get(), 1, b.hi().get(), MPFR_RNDD);
        mpfr_ui_div(r.hi().get(), 1, b.lo().get(), MPFR_RNDU);
    }
    return r;
}

inline DyadicInterval operator/(const DyadicInterval& a, const DyadicInterval& b) {
    return a * reciprocal(b);
}

inline DyadicInterval abs(const DyadicInterval& a) {
    mpfr_prec_t prec = a.prec();
    DyadicInterval r(prec);
    if (a.contains_zero()) {
        mpfr_set_zero(r.lo().get(), 1);
        mpfr_neg(r.hi().get(), a.lo().get(), MPFR_RNDU);
        if (mpfr_cmp(a.hi().get(), r.hi().get()) > 0) mpfr_set(r.hi().get(), a.hi().get(), MPFR_RNDU);
    } else if (a.strictly_positive()) {
        r = a;
    } else {
        r = -a;
    }
    return r;
}

inline DyadicInterval pow_int(const DyadicInterval& a, long k) {
    mpfr_prec_t prec = a.prec();
    if (k == 0) {
        DyadicInterval r(prec);
        mpfr_set_ui(r.lo().get(), 1, MPFR_RNDD);
        mpfr_set_ui(r.hi().get(), 1, MPFR_RNDU);
        return r;
    }
    if (k < 0) return reciprocal(pow_int(a, -k));
    DyadicInterval r(prec);
    if (k % 2 == 0 && a.contains_zero()) {
        DyadicInterval m = abs(a);
        mpfr_set_zero(r.lo().get(), 1);
        mpfr_pow_si(r.hi().get(), m.hi().get(), k, MPFR_RNDU);
        return r;
    }
    Dyadic c(prec);
    mpfr_srcptr ends[2] = {a.lo().get(), a.hi().get()};
    bool first = true;
    for (int i = 0; i < 2; ++i) {
        mpfr_pow_si(c.get(), ends[i], k, MPFR_RNDD);
        if (first || mpfr_cmp(c.get(), r.lo().get()) < 0) mpfr_set(r.lo().get(), c.get(), MPFR_RNDD);
        mpfr_pow_si(c.get(), ends[i], k, MPFR_RNDU);
        if (first || mpfr_cmp(c.get(), r.hi().get()) > 0) mpfr_set(r.hi().get(), c.get(), MPFR_RNDU);
        first = false;
    }
    return r;
}

/// n-th root, n >= 2. Even n clips the negative part of the input away;
/// an input entirely below zero has an empty image.
inline DyadicInterval nth_root(const DyadicInterval& a, unsigned long n) {
    mpfr_prec_t prec = a.prec();
    DyadicInterval in = a;
    if (n % 2 == 0) {
        if (in.hi().sign() < 0) throw EmptyIntersection();
        if (in.lo().sign() < 0) mpfr_set_zero(in.lo().get(), 1);
    }
    DyadicInterval r(prec);
    mpfr_rootn_ui(r.lo().get(), in.lo().get(), n, MPFR_RNDD);
    mpfr_rootn_ui(r.hi().get(), in.hi().get(), n, MPFR_RNDU);
    return r;
}

inline DyadicInterval exp(const DyadicInterval& a) {
    DyadicInterval r(a.prec());
    mpfr_exp(r.lo().get(), a.lo().get(), MPFR_RNDD);
    mpfr_exp(r.hi().get(), a.hi().get(), MPFR_RNDU);
    return r;
}

/// Natural log; clips to the positive axis, empty when nothing is left.
inline DyadicInterval ln(const DyadicInterval& a) {
    if (a.hi().sign() <= 0) throw EmptyIntersection();
    DyadicInterval r(a.prec());
    if (a.lo().sign() <= 0) {
        mpfr_set_inf(r.lo().get(), -1);
    } else {
        mpfr_log(r.lo().get(), a.lo().get(), MPFR_RNDD);
    }
    mpfr_log(r.hi().get(), a.hi().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval const_pi(mpfr_prec_t prec) {
    DyadicInterval r(prec);
    mpfr_const_pi(r.lo().get(), MPFR_RNDD);
    mpfr_const_pi(r.hi().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval const_e(mpfr_prec_t prec) {
    DyadicInterval r(prec);
    Dyadic one(prec);
    mpfr_set_ui(one.get(), 1, MPFR_RNDN);
    mpfr_exp(r.lo().get(), one.get(), MPFR_RNDD);
    mpfr_exp(r.hi().get(), one.get(), MPFR_RNDU);
    return r;
}

namespace detail {

/// Shared shape of sin/cos enclosures: directed endpoint values plus exact
/// -1/+1 whenever an extremum might lie inside. Extrema sit at
/// (offset/2 + k) * pi; a max needs k + parity even.
inline DyadicInterval trig_enclose(const DyadicInterval& a, bool is_sin) {
    mpfr_prec_t prec = a.prec();
    DyadicInterval full(prec);
    mpfr_set_si(full.lo().get(), -1, MPFR_RNDD);
    mpfr_set_si(full.hi().get(), 1, MPFR_RNDU);
    if (!a.is_finite()) return full;

    Rational width = a.width_exact();
    if (width >= 7) return full;  // wider than one period

    DyadicInterval r(prec);
    Dyadic c(prec);
    auto fn = is_sin ? mpfr_sin : mpfr_cos;
    bool first = true;
    mpfr_srcptr ends[2] = {a.lo().get(), a.hi().get()};
    for (int i = 0; i < 2; ++i) {
        fn(c.get(), ends[i], MPFR_RNDD);
        if (first || mpfr_cmp(c.get(), r.lo().get()) < 0) mpfr_set(r.lo().get(), c.get(), MPFR_RNDD);
        fn(c.get(), ends[i], MPFR_RNDU);
        if (first || mpfr_cmp(c.get(), r.hi().get()) > 0) mpfr_set(r.hi().get(), c.get(), MPFR_RNDU);
        first = false;
    }

    DyadicInterval pi = const_pi(prec + 8);
    double approx_lo = mpfr_get_d(a.lo().get(), MPFR_RNDD) / 3.14159265358979;
    double approx_hi = mpfr_get_d(a.hi().get(), MPFR_RNDU) / 3.14159265358979;
    if (approx_lo < -9e15 || approx_hi > 9e15) return full;
    long klo = static_cast<long>(approx_lo) - 2;
    long khi = static_cast<long>(approx_hi) + 2;
    for (long k = klo; k <= khi; ++k) {
        // sin peaks at pi/2 + k*pi, cos at k*pi
        Rational mult = is_sin ? Rational(2 * k + 1) / 2 : Rational(k);
        DyadicInterval xk = pi * DyadicInterval::from_rational(mult, prec + 8);
        if (mpfr_cmp(xk.hi().get(), a.lo().get()) < 0) continue;
        if (mpfr_cmp(xk.lo().get(), a.hi().get()) > 0) continue;
        bool is_max = (k % 2 == 0);
        if (is_max) {
            mpfr_set_si(r.hi().get(), 1, MPFR_RNDU);
        } else {
            mpfr_set_si(r.lo().get(), -1, MPFR_RNDD);
        }
    }
    return r;
}

}  // namespace detail

inline DyadicInterval sin(const DyadicInterval& a) { return detail::trig_enclose(a, true); }
inline DyadicInterval cos(const DyadicInterval& a) { return detail::trig_enclose(a, false); }

inline DyadicInterval hull(const DyadicInterval& a, const DyadicInterval& b) {
    DyadicInterval r(std::max(a.prec(), b.prec()));
    mpfr_min(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_max(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    return r;
}

inline DyadicInterval intersect(const DyadicInterval& a, const DyadicInterval& b) {
    DyadicInterval r(std::max(a.prec(), b.prec()));
    mpfr_max(r.lo().get(), a.lo().get(), b.lo().get(), MPFR_RNDD);
    mpfr_min(r.hi().get(), a.hi().get(), b.hi().get(), MPFR_RNDU);
    if (mpfr_cmp(r.lo().get(), r.hi().get()) > 0) throw EmptyIntersection();
    return r;
}

}  // namespace solset
