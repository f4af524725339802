#pragma once

#include <stdexcept>
#include <utility>

#include "solset/interval.hpp"

namespace solset {

struct OutOfBranchDomain : std::domain_error {
    OutOfBranchDomain() : std::domain_error("argument outside branch domain") {}
};

namespace detail {

/// Sign of w*e^w - q, certified by interval evaluation at escalating
/// precision; 0 when undecided (only possible when the value is zero).
inline int certified_phi_sign(const Rational& w, const Rational& q, mpfr_prec_t prec) {
    for (mpfr_prec_t p = prec; p <= prec * 16; p *= 2) {
        DyadicInterval iw = DyadicInterval::from_rational(w, p);
        DyadicInterval phi = iw * exp(iw) - DyadicInterval::from_rational(q, p);
        if (phi.strictly_positive()) return 1;
        if (phi.strictly_negative()) return -1;
    }
    return 0;
}

/// Enclosure of W(q) for q certainly interior to the branch domain.
/// Bisection only ever moves an endpoint on a certified sign, so the root
/// stays bracketed throughout.
inline DyadicInterval w_point(int branch, const Rational& q, mpfr_prec_t prec) {
    if (branch == 0 && q == 0) return DyadicInterval::zero(prec);
    mpfr_prec_t ip = prec + 16;
    Rational lo, hi;
    if (branch == 0) {
        if (q > 0) {
            lo = 0;
            hi = 1;
            int guard = 0;
            while (certified_phi_sign(hi, q, ip) <= 0) {
                hi *= 2;
                if (++guard > 400) {
                    DyadicInterval r(prec);
                    mpfr_set_q(r.lo().get(), lo.get_mpq_t(), MPFR_RNDD);
                    mpfr_set_inf(r.hi().get(), 1);
                    return r;
                }
            }
        } else {
            lo = -1;
            hi = 0;
        }
    } else {
        hi = -1;
        lo = -2;
        int guard = 0;
        while (certified_phi_sign(lo, q, ip) <= 0) {
            lo *= 2;
            if (++guard > 400) {
                DyadicInterval r(prec);
                mpfr_set_inf(r.lo().get(), -1);
                mpfr_set_q(r.hi().get(), hi.get_mpq_t(), MPFR_RNDU);
                return r;
            }
        }
    }
    Rational target = make_rational(Int(1), Int(Int(1) << (prec + 2)));
    long maxit = static_cast<long>(prec) + 96;
    for (long it = 0; it < maxit && hi - lo > target; ++it) {
        Rational mid = (lo + hi) / 2;
        int s = certified_phi_sign(mid, q, ip);
        if (s == 0) break;
        // w*e^w increases through the root on branch 0 and decreases on
        // branch -1.
        bool move_lo = branch == 0 ? s < 0 : s > 0;
        (move_lo ? lo : hi) = mid;
    }
    DyadicInterval r(prec);
    mpfr_set_q(r.lo().get(), lo.get_mpq_t(), MPFR_RNDD);
    mpfr_set_q(r.hi().get(), hi.get_mpq_t(), MPFR_RNDU);
    return r;
}

}  // namespace detail

/// Certified enclosure of the Lambert W branch over z, clipped to the
/// branch domain ([-1/e, inf) for branch 0, [-1/e, 0) for branch -1);
/// throws OutOfBranchDomain when the clipped set is certainly empty.
inline DyadicInterval lambert_w(int branch, const DyadicInterval& z, mpfr_prec_t prec) {
    if (branch != 0 && branch != -1) throw std::invalid_argument("lambert branch must be 0 or -1");
    if (mpfr_inf_p(z.hi().get()) && z.hi().sign() < 0) throw OutOfBranchDomain();

    // Dynamic bracket around -1/e, far tighter than the worst-case width of
    // z itself; endpoints inside it get padded bounds from the expansion
    // |W + 1| <= p + p^2, p = sqrt(2(e z + 1)).
    DyadicInterval branch_point = -reciprocal(const_e(prec + 64));
    Rational bp_lo = branch_point.lo_q(), bp_hi = branch_point.hi_q();
    Rational pad = make_rational(Int(1), Int(Int(1) << (prec / 2 + 20)));

    bool zl_inf = !z.lo().is_finite();
    bool zh_inf = !z.hi().is_finite();
    if (!zh_inf && z.hi_q() < bp_lo) throw OutOfBranchDomain();

    DyadicInterval r(prec);
    if (branch == 0) {
        if (zl_inf || z.lo_q() <= bp_hi) {
            mpfr_set_si(r.lo().get(), -1, MPFR_RNDD);
        } else {
            mpfr_set(r.lo().get(), detail::w_point(0, z.lo_q(), prec).lo().get(), MPFR_RNDD);
        }
        if (zh_inf) {
            mpfr_set_inf(r.hi().get(), 1);
        } else if (z.hi_q() <= bp_hi) {
            Rational ub = pad - 1;
            mpfr_set_q(r.hi().get(), ub.get_mpq_t(), MPFR_RNDU);
        } else {
            mpfr_set(r.hi().get(), detail::w_point(0, z.hi_q(), prec).hi().get(), MPFR_RNDU);
        }
        return r;
    }
    if (z.lo().sign() >= 0) throw OutOfBranchDomain();
    if (zl_inf || z.lo_q() <= bp_hi) {
        mpfr_set_si(r.hi().get(), -1, MPFR_RNDU);
    } else {
        mpfr_set(r.hi().get(), detail::w_point(-1, z.lo_q(), prec).hi().get(), MPFR_RNDU);
    }
    if (z.hi().sign() >= 0) {
        mpfr_set_inf(r.lo().get(), -1);
    } else if (z.hi_q() <= bp_hi) {
        Rational lb = -1 - pad;
        mpfr_set_q(r.lo().get(), lb.get_mpq_t(), MPFR_RNDD);
    } else {
        mpfr_set(r.lo().get(), detail::w_point(-1, z.hi_q(), prec).lo().get(), MPFR_RNDD);
    }
    return r;
}

}  // namespace solset
