#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "solset/interval_eval.hpp"

using namespace solset;

namespace {

DyadicInterval ivq(const Rational& q, mpfr_prec_t prec = 64) {
    return DyadicInterval::from_rational(q, prec);
}
DyadicInterval ivq(long a, long b, mpfr_prec_t prec = 64) {
    return hull(ivq(Rational(a), prec), ivq(Rational(b), prec));
}

// 30 significant digits on each side
const Rational e_lo = make_rational(Int("2718281828459045235360287471352"),
                                    Int("1000000000000000000000000000000"));
const Rational e_hi = make_rational(Int("2718281828459045235360287471353"),
                                    Int("1000000000000000000000000000000"));
const Rational pi_lo = make_rational(Int("3141592653589793238462643383279"),
                                     Int("1000000000000000000000000000000"));
const Rational pi_hi = make_rational(Int("3141592653589793238462643383280"),
                                     Int("1000000000000000000000000000000"));

Rational pow2_inv(unsigned long k) { return make_rational(Int(1), Int(Int(1) << k)); }

}  // namespace

TEST_CASE("interval construction and exact endpoints") {
    DyadicInterval a = ivq(make_rational(Int(3), Int(8)));
    CHECK(a.is_point());
    CHECK(a.lo_q() == make_rational(Int(3), Int(8)));

    DyadicInterval third = ivq(make_rational(Int(1), Int(3)));
    CHECK_FALSE(third.is_point());
    CHECK(third.contains(make_rational(Int(1), Int(3))));
    CHECK(third.width_exact() > 0);
    CHECK(third.width_exact() < pow2_inv(60));

    DyadicInterval whole = DyadicInterval::entire(64);
    CHECK_FALSE(whole.is_finite());
    CHECK(whole.contains_zero());
}

TEST_CASE("interval arithmetic on exactly representable values") {
    DyadicInterval a = ivq(-1, 2), b = ivq(-3, 5);
    DyadicInterval p = a * b;
    CHECK(p.lo_q() == -6);
    CHECK(p.hi_q() == 10);

    CHECK((a + b).lo_q() == -4);
    CHECK((a - b).hi_q() == 5);
    CHECK((-a).lo_q() == -2);

    DyadicInterval r = reciprocal(ivq(2, 4));
    CHECK(r.lo_q() == make_rational(Int(1), Int(4)));
    CHECK(r.hi_q() == make_rational(Int(1), Int(2)));

    CHECK_FALSE(reciprocal(ivq(-2, 3)).is_finite());
    CHECK_THROWS_AS(reciprocal(DyadicInterval::zero(64)), EmptyIntersection);

    DyadicInterval half_line = reciprocal(ivq(0, 2));
    CHECK(half_line.lo_q() == make_rational(Int(1), Int(2)));
    CHECK_FALSE(half_line.hi().is_finite());

    // zero times an unbounded interval stays zero
    DyadicInterval z = DyadicInterval::zero(64) * DyadicInterval::entire(64);
    CHECK(z.is_point());
    CHECK(z.contains_zero());
}

TEST_CASE("interval powers and roots") {
    CHECK(pow_int(ivq(-2, 3), 2).lo_q() == 0);
    CHECK(pow_int(ivq(-2, 3), 2).hi_q() == 9);
    CHECK(pow_int(ivq(-2, 3), 3).lo_q() == -8);
    CHECK(pow_int(ivq(-2, 3), 3).hi_q() == 27);
    CHECK(pow_int(ivq(-3, -2), 2).lo_q() == 4);
    CHECK(pow_int(ivq(-3, -2), 2).hi_q() == 9);
    CHECK(pow_int(ivq(2, 3), 0).lo_q() == 1);
    DyadicInterval inv = pow_int(ivq(2, 3), -1);
    CHECK(inv.contains(make_rational(Int(1), Int(3))));
    CHECK(inv.hi_q() == make_rational(Int(1), Int(2)));

    DyadicInterval inv_sq = pow_int(ivq(-1, 1), -2);
    CHECK(inv_sq.lo_q() == 1);
    CHECK_FALSE(inv_sq.hi().is_finite());

    CHECK(nth_root(ivq(4, 9), 2).lo_q() == 2);
    CHECK(nth_root(ivq(4, 9), 2).hi_q() == 3);
    CHECK(nth_root(ivq(-8, 27), 3).lo_q() == -2);
    CHECK(nth_root(ivq(-8, 27), 3).hi_q() == 3);
    CHECK(nth_root(ivq(-4, 9), 2).lo_q() == 0);
    CHECK_THROWS_AS(nth_root(ivq(-9, -4), 2), EmptyIntersection);
}

TEST_CASE("exp and ln enclosures") {
    DyadicInterval e1 = exp(ivq(1, 1));
    CHECK(e1.lo_q() < e_hi);
    CHECK(e1.hi_q() > e_lo);
    CHECK(e1.width_exact() < pow2_inv(60));

    DyadicInterval ec = const_e(128);
    CHECK(ec.lo_q() < e_hi);
    CHECK(ec.hi_q() > e_lo);
    CHECK(ln(ec).contains(Rational(1)));

    DyadicInterval pc = const_pi(128);
    CHECK(pc.lo_q() < pi_hi);
    CHECK(pc.hi_q() > pi_lo);

    DyadicInterval clipped = ln(ivq(-1, 1));
    CHECK_FALSE(clipped.lo().is_finite());
    CHECK(clipped.hi_q() >= 0);
    CHECK_THROWS_AS(ln(ivq(-2, -1)), EmptyIntersection);

    CHECK(exp(ln(ivq(5, 5))).contains(Rational(5)));
}

TEST_CASE("trig enclosures honor interior extrema") {
    DyadicInterval s0 = sin(DyadicInterval::zero(64));
    CHECK(s0.is_point());
    CHECK(s0.contains_zero());

    DyadicInterval s = sin(ivq(1, 2));  // pi/2 inside
    CHECK(s.hi_q() == 1);
    CHECK(s.lo_q() > make_rational(Int(8), Int(10)));

    DyadicInterval c = cos(ivq(3, 4));  // pi inside
    CHECK(c.lo_q() == -1);
    CHECK(c.hi_q() < 0);

    DyadicInterval wide = sin(ivq(0, 10));
    CHECK(wide.lo_q() == -1);
    CHECK(wide.hi_q() == 1);

    CHECK(cos(DyadicInterval::entire(64)).hi_q() == 1);

    DyadicInterval narrow = sin(ivq(1, 1));
    CHECK(narrow.width_exact() < pow2_inv(60));
}

TEST_CASE("hull and intersect") {
    DyadicInterval h = hull(ivq(0, 1), ivq(3, 4));
    CHECK(h.lo_q() == 0);
    CHECK(h.hi_q() == 4);
    DyadicInterval m = intersect(ivq(0, 2), ivq(1, 4));
    CHECK(m.lo_q() == 1);
    CHECK(m.hi_q() == 2);
    CHECK_THROWS_AS(intersect(ivq(0, 1), ivq(2, 3)), EmptyIntersection);
}

TEST_CASE("random containment of exact arithmetic") {
    std::mt19937 rng(20240817);
    std::uniform_int_distribution<long> numd(-50, 50), dend(1, 20);
    auto rq = [&] { return make_rational(Int(numd(rng)), Int(dend(rng))); };
    for (int iter = 0; iter < 60; ++iter) {
        Rational a1 = rq(), a2 = rq(), b1 = rq(), b2 = rq();
        if (a2 < a1) std::swap(a1, a2);
        if (b2 < b1) std::swap(b1, b2);
        DyadicInterval A = hull(ivq(a1), ivq(a2)), B = hull(ivq(b1), ivq(b2));
        Rational pa = (a1 + 2 * a2) / 3, pb = (2 * b1 + b2) / 3;
        CHECK((A + B).contains(pa + pb));
        CHECK((A - B).contains(pa - pb));
        CHECK((A * B).contains(pa * pb));
        if (b1 > 0 || b2 < 0) {
            CHECK((A / B).contains(pa / pb));
        }
        CHECK(pow_int(A, 3).contains(pa * pa * pa));
        CHECK(abs(A).contains(pa < 0 ? -pa : pa));
    }
}

TEST_CASE("lambert w at exactly solvable points") {
    DyadicInterval w0 = lambert_w(0, DyadicInterval::zero(128), 128);
    CHECK(w0.is_point());
    CHECK(w0.contains_zero());

    DyadicInterval w1 = lambert_w(0, ivq(1, 1, 128), 128);
    CHECK(w1.width_exact() < pow2_inv(100));
    DyadicInterval check = w1 * exp(w1);
    CHECK(check.contains(Rational(1)));
}

TEST_CASE("lambert w on both branches of -exp(-2)") {
    DyadicInterval z = -exp(ivq(-2, -2, 192));
    DyadicInterval a = lambert_w(0, z, 192);
    DyadicInterval b = lambert_w(-1, z, 192);
    // both satisfy w e^w = z
    CHECK_NOTHROW(intersect(a * exp(a), z));
    CHECK_NOTHROW(intersect(b * exp(b), z));
    CHECK(a.hi_q() < 0);
    CHECK(a.lo_q() > -1);
    CHECK(b.hi_q() < -3);
    auto oracle = rational_from_decimal("-3.146193220620583");
    REQUIRE(oracle.has_value());
    CHECK(b.lo_q() < *oracle + make_rational(Int(1), Int(1000000000)));
    CHECK(b.hi_q() > *oracle - make_rational(Int(1), Int(1000000000)));
}

TEST_CASE("lambert w at the branch point") {
    DyadicInterval z = -reciprocal(const_e(192));
    DyadicInterval a = lambert_w(0, z, 128);
    CHECK(a.contains(Rational(-1)));
    CHECK(a.width_exact() < make_rational(Int(1), Int("100000000000000000000")));
    DyadicInterval b = lambert_w(-1, z, 128);
    CHECK(b.contains(Rational(-1)));
    CHECK(b.width_exact() < make_rational(Int(1), Int("100000000000000000000")));
}

TEST_CASE("lambert w branch domain errors") {
    CHECK_THROWS_AS(lambert_w(0, ivq(-1, -1), 64), OutOfBranchDomain);
    CHECK_THROWS_AS(lambert_w(-1, ivq(1, 2), 64), OutOfBranchDomain);
    CHECK_THROWS_AS(lambert_w(-1, DyadicInterval::zero(64), 64), OutOfBranchDomain);
    CHECK_THROWS_AS(lambert_w(2, ivq(1, 1), 64), std::invalid_argument);
    CHECK_NOTHROW(lambert_w(-1, ivq(Rational(-1, 10)), 64));
}

TEST_CASE("lambert w inverts w exp(w) on sample grids") {
    mpfr_prec_t prec = 192;
    for (long num : {-9, -5, 3, 20, 100}) {
        Rational zq = make_rational(Int(num), Int(10));
        DyadicInterval z = ivq(zq, prec);
        DyadicInterval arg = z * exp(z);
        DyadicInterval w = lambert_w(0, arg, prec);
        CHECK(w.contains(zq));
        CHECK(w.width_exact() < make_rational(Int(1), Int("100000000000000")));
    }
    for (long num : {-10, -15, -20, -50}) {
        Rational zq = make_rational(Int(num), Int(10));
        DyadicInterval z = ivq(zq, prec);
        DyadicInterval arg = z * exp(z);
        DyadicInterval w = lambert_w(-1, arg, prec);
        CHECK(w.contains(zq));
        CHECK(w.width_exact() < make_rational(Int(1), Int("100000000000000")));
    }
}

TEST_CASE("interval evaluation of expressions") {
    Expr x = Expr::var();
    DyadicInterval e1 = eval_interval(Expr::exp(x), ivq(1, 1), 64);
    CHECK(e1.lo_q() < e_hi);
    CHECK(e1.hi_q() > e_lo);
    CHECK(e1.width_exact() < pow2_inv(60));

    // x^2 - 2 over [1,2] straddles its root
    Expr q = Expr::sub(Expr::intpow(x, 2), Expr::integer(2));
    CHECK(eval_interval(q, ivq(1, 2), 64).contains_zero());

    DyadicInterval pi_enc = eval_interval(Expr::const_pi(), ivq(0, 0), 128);
    CHECK(pi_enc.lo_q() < pi_hi);
    CHECK(pi_enc.hi_q() > pi_lo);

    CHECK_THROWS_AS(eval_interval(Expr::div(Expr::integer(1), x), DyadicInterval::zero(64), 64),
                    EmptyIntersection);
    CHECK_THROWS_AS(eval_interval(Expr::ln(x), ivq(-2, -1), 64), EmptyIntersection);
    // lambert domain misses map to an empty image
    CHECK_THROWS_AS(eval_interval(Expr::lambert_w(-1, x), ivq(1, 2), 64), EmptyIntersection);

    DyadicInterval wz = eval_interval(Expr::lambert_w(0, x), DyadicInterval::zero(64), 64);
    CHECK(wz.is_point());
    CHECK(wz.contains_zero());
}

TEST_CASE("certified sign over intervals") {
    Expr x = Expr::var();
    Expr poly = Expr::add(Expr::intpow(x, 2), Expr::integer(1));
    CHECK(certified_sign(poly, ivq(-5, 5)) == CertifiedSign::Positive);

    CHECK(certified_sign(Expr::neg(Expr::exp(x)), ivq(-2, 2)) == CertifiedSign::Negative);

    // exact witness: x - 1 vanishes at the endpoint
    CHECK(certified_sign(Expr::sub(x, Expr::integer(1)), ivq(1, 3)) ==
          CertifiedSign::ContainsZero);

    // irrational zero inside: no witness, no constant sign
    Expr q = Expr::sub(Expr::intpow(x, 2), Expr::integer(2));
    CHECK(certified_sign(q, ivq(1, 2), 512) == CertifiedSign::Unknown);

    CHECK_THROWS_AS(certified_sign(Expr::root(2, x), ivq(-4, -1)), EmptyIntersection);
}
