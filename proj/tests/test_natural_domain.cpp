#include <catch2/catch_amalgamated.hpp>

#include "solset/equation.hpp"
#include "solset/natural_domain.hpp"

using namespace solset;

namespace {

Expr x() { return Expr::var(); }
Expr num(long v) { return Expr::integer(v); }

}  // namespace

TEST_CASE("domains of total expressions") {
    CHECK(natural_domain(x()).is_all());
    CHECK(natural_domain(Expr::exp(x())).is_all());
    CHECK(natural_domain(Expr::sin(Expr::cos(x()))).is_all());
    CHECK(natural_domain(Expr::intpow(x(), 5)).is_all());
    CHECK(natural_domain(Expr::root(3, x())).is_all());
    CHECK(natural_domain(Expr::const_pi()).is_all());
}

TEST_CASE("square root clips to the nonnegative set") {
    Domain d = natural_domain(Expr::sqrt(x()));
    CHECK(to_string(d) == "[0,inf)");
    CHECK_FALSE(d.approximate());

    Domain shifted = natural_domain(Expr::sqrt(Expr::add(Expr::mul(num(2), x()), num(1))));
    CHECK(to_string(shifted) == "[-1/2,inf)");
    CHECK_FALSE(shifted.approximate());

    Domain empty = natural_domain(Expr::sqrt(Expr::sub(num(-1), Expr::intpow(x(), 2))));
    CHECK(empty.is_empty());
    CHECK_FALSE(empty.approximate());
}

TEST_CASE("logarithm needs a positive argument") {
    CHECK(to_string(natural_domain(Expr::ln(x()))) == "(0,inf)");
    CHECK(natural_domain(Expr::ln(Expr::add(Expr::intpow(x(), 2), num(1)))).is_all());
}

TEST_CASE("division removes rational zeros exactly") {
    Domain d = natural_domain(Expr::div(num(1), x()));
    CHECK(to_string(d) == "(-inf,0) U (0,inf)");
    CHECK_FALSE(d.approximate());

    Expr denom = Expr::sub(Expr::intpow(x(), 2), num(1));
    Domain d2 = natural_domain(Expr::div(x(), denom));
    CHECK(d2.contains(Rational(0)));
    CHECK_FALSE(d2.contains(Rational(1)));
    CHECK_FALSE(d2.contains(Rational(-1)));
    CHECK_FALSE(d2.approximate());

    CHECK(to_string(natural_domain(Expr::intpow(x(), -2))) == "(-inf,0) U (0,inf)");
}

TEST_CASE("rational-function sign sets keep boundary points") {
    // sqrt(x/(x-1)): nonnegative on (-inf,0] and (1,inf)
    Expr u = Expr::div(x(), Expr::sub(x(), num(1)));
    Domain d = natural_domain(Expr::sqrt(u));
    CHECK(d.contains(Rational(0)));
    CHECK(d.contains(Rational(-5)));
    CHECK(d.contains(Rational(2)));
    CHECK_FALSE(d.contains(Rational(1, 2)));
    CHECK_FALSE(d.contains(Rational(1)));
    CHECK_FALSE(d.approximate());
}

TEST_CASE("irrational boundaries shrink conservatively and flag it") {
    Expr u = Expr::sub(Expr::intpow(x(), 2), num(2));
    Domain d = natural_domain(Expr::sqrt(u));
    CHECK(d.approximate());
    CHECK(d.contains(Rational(-2)));
    CHECK(d.contains(Rational(2)));
    CHECK(d.contains(Rational(3, 2)));
    CHECK_FALSE(d.contains(Rational(0)));
    CHECK_FALSE(d.contains(Rational(7, 5)));  // just below sqrt(2)

    // mixed: one rational root, one irrational pair
    Expr v = Expr::mul(x(), u);  // x(x^2-2) >= 0 on [-sqrt2, 0] and [sqrt2, inf)
    Domain dv = natural_domain(Expr::sqrt(v));
    CHECK(dv.approximate());
    CHECK(dv.contains(Rational(0)));
    CHECK(dv.contains(Rational(-1)));
    CHECK(dv.contains(Rational(2)));
    CHECK_FALSE(dv.contains(Rational(1)));
    CHECK_FALSE(dv.contains(Rational(-2)));
}

TEST_CASE("denominators with irrational zeros flag approximation") {
    Expr denom = Expr::sub(Expr::intpow(x(), 2), num(2));
    Domain d = natural_domain(Expr::div(num(1), denom));
    CHECK(d.approximate());
    CHECK(d.contains(Rational(0)));
    CHECK(d.contains(Rational(3)));
    CHECK(d.contains(Rational(-3)));
}

TEST_CASE("constant arguments resolve by certified sign") {
    CHECK(natural_domain(Expr::sqrt(Expr::sub(Expr::const_pi(), num(3)))).is_all());
    Domain neg = natural_domain(Expr::sqrt(Expr::sub(num(1), Expr::const_pi())));
    CHECK(neg.is_empty());
    // exactly zero constant: allowed under sqrt, not under ln
    Expr zero_const = Expr::sub(Expr::const_pi(), Expr::const_pi());
    CHECK(natural_domain(Expr::sqrt(zero_const)).is_all());
    CHECK(natural_domain(Expr::ln(zero_const)).is_empty());
}

TEST_CASE("analysis outside the rational fragment collapses to empty approximate") {
    Domain d = natural_domain(Expr::sqrt(Expr::ln(x())));
    CHECK(d.is_empty());
    CHECK(d.approximate());
}

TEST_CASE("lambert w argument constraints") {
    Domain d0 = natural_domain(Expr::lambert_w(0, x()));
    CHECK(d0.approximate());
    CHECK(d0.contains(Rational(0)));
    CHECK(d0.contains(Rational(10)));
    CHECK_FALSE(d0.contains(Rational(-1)));

    Domain dm = natural_domain(Expr::lambert_w(-1, x()));
    CHECK(dm.approximate());
    CHECK(dm.contains(Rational(-1, 10)));
    CHECK_FALSE(dm.contains(Rational(0)));
    CHECK_FALSE(dm.contains(Rational(1)));
    CHECK_FALSE(dm.contains(Rational(-1)));
}

TEST_CASE("equation construction intersects the requested domain") {
    Equation eq(Expr::sqrt(x()), num(3));
    CHECK(to_string(eq.domain()) == "[0,inf)");
    CHECK(to_string(eq) == "sqrt(x) = 3");

    Domain req(RealInterval::between(Rational(2), Rational(5)));
    Equation bounded(x(), x(), req);
    CHECK(to_string(bounded.domain()) == "[2,5]");

    // requested domain wider than the natural one shrinks
    Domain wide(RealInterval::at_least(Rational(-10)));
    Equation clipped(Expr::sqrt(x()), num(1), wide);
    CHECK(to_string(clipped.domain()) == "[0,inf)");

    Equation narrowed = clipped.restricted(Domain(RealInterval::between(Rational(1), Rational(4))));
    CHECK(to_string(narrowed.domain()) == "[1,4]");
}
