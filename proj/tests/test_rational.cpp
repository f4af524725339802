#include <catch2/catch_amalgamated.hpp>

#include "solset/rational.hpp"

using namespace solset;

TEST_CASE("rationals are kept canonical") {
    Rational q = make_rational(Int(4), Int(-6));
    CHECK(num(q) == -2);
    CHECK(den(q) == 3);
    CHECK(to_string(q) == "-2/3");
    CHECK(to_string(Rational(7)) == "7");
    CHECK_THROWS_AS(make_rational(Int(1), Int(0)), std::invalid_argument);
}

TEST_CASE("integer powers") {
    CHECK(rational_pow(Rational(2, 3), 3) == Rational(8, 27));
    CHECK(rational_pow(Rational(2, 3), -2) == Rational(9, 4));
    CHECK(rational_pow(Rational(5), 0) == 1);
    CHECK(rational_pow(Rational(-2), 3) == -8);
    CHECK_THROWS_AS(rational_pow(Rational(0), -1), std::domain_error);
}

TEST_CASE("exact nth roots") {
    CHECK(rational_nth_root(Rational(9, 4), 2) == Rational(3, 2));
    CHECK(rational_nth_root(Rational(-27), 3) == Rational(-3));
    CHECK_FALSE(rational_nth_root(Rational(2), 2).has_value());
    CHECK_FALSE(rational_nth_root(Rational(-4), 2).has_value());
    CHECK(rational_nth_root(Rational(1, 32), 5) == Rational(1, 2));
    CHECK(rational_nth_root(Rational(0), 7) == Rational(0));
}

TEST_CASE("decimal literals parse exactly") {
    CHECK(rational_from_decimal("123") == Rational(123));
    CHECK(rational_from_decimal("-4.25") == Rational(-17, 4));
    CHECK(rational_from_decimal(".5") == Rational(1, 2));
    CHECK(rational_from_decimal("0.1") == Rational(1, 10));
    CHECK_FALSE(rational_from_decimal("").has_value());
    CHECK_FALSE(rational_from_decimal("1e3").has_value());
    CHECK_FALSE(rational_from_decimal("1.2.3").has_value());
    CHECK_FALSE(rational_from_decimal(".").has_value());
}

TEST_CASE("bracket around -1/e") {
    CHECK(neg_inv_e_below() < neg_inv_e_above());
    // q < -1/e iff q*e < -1; certify with 30-digit bounds on e, much
    // tighter than the bracket itself.
    Rational e_lo(Int("2718281828459045235360287471352"), Int("1000000000000000000000000000000"));
    Rational e_hi(Int("2718281828459045235360287471353"), Int("1000000000000000000000000000000"));
    // neg_inv_e_below * e < neg_inv_e_below * e_lo (negative factor flips),
    // so the first check certifies neg_inv_e_below < -1/e; dually for the
    // second.
    CHECK(neg_inv_e_below() * e_lo < -1);
    CHECK(neg_inv_e_above() * e_hi > -1);
}
