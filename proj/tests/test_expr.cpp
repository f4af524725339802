#include <catch2/catch_amalgamated.hpp>

#include "solset/expr.hpp"

using namespace solset;

namespace {
Expr x() { return Expr::var(); }
}

TEST_CASE("structural equality ignores sharing") {
    Expr a = Expr::add(x(), Expr::integer(1));
    Expr b = Expr::add(x(), Expr::integer(1));
    CHECK(a == b);
    CHECK(a != Expr::add(Expr::integer(1), x()));
    CHECK(Expr::intpow(x(), 2) != Expr::intpow(x(), 3));
    CHECK(Expr::lambert_w(0, x()) != Expr::lambert_w(-1, x()));
    CHECK(Expr::rational(Rational(1, 2)) == Expr::rational(Rational(2, 4)));
}

TEST_CASE("variable occurrence") {
    CHECK(contains_var(Expr::exp(Expr::mul(Expr::integer(2), x()))));
    CHECK_FALSE(contains_var(Expr::ln(Expr::add(Expr::const_e(), Expr::const_pi()))));
    CHECK(is_constant(Expr::sqrt(Expr::integer(5))));
}

TEST_CASE("folding does exact rational arithmetic") {
    Expr e = Expr::add(Expr::rational(Rational(1, 3)), Expr::rational(Rational(1, 6)));
    CHECK(fold(e) == Expr::rational(Rational(1, 2)));
    CHECK(fold(Expr::intpow(Expr::rational(Rational(2, 3)), -2)) == Expr::rational(Rational(9, 4)));
    CHECK(fold(Expr::sqrt(Expr::rational(Rational(9, 4)))) == Expr::rational(Rational(3, 2)));
    CHECK(fold(Expr::root(3, Expr::integer(-8))) == Expr::integer(-2));
    // No exact value: node survives.
    CHECK(fold(Expr::sqrt(Expr::integer(5))).kind() == ExprKind::Root);
    CHECK(fold(Expr::div(Expr::integer(1), Expr::integer(0))).kind() == ExprKind::Div);
}

TEST_CASE("folding knows the handful of special values") {
    CHECK(fold(Expr::exp(Expr::integer(0))).is_one());
    CHECK(fold(Expr::ln(Expr::integer(1))).is_zero());
    CHECK(fold(Expr::sin(Expr::integer(0))).is_zero());
    CHECK(fold(Expr::cos(Expr::integer(0))).is_one());
    CHECK(fold(Expr::lambert_w(0, Expr::integer(0))).is_zero());
    CHECK(fold(Expr::exp(Expr::ln(Expr::integer(7)))) == Expr::integer(7));
    // ln of a negative constant must not cancel.
    CHECK(fold(Expr::exp(Expr::ln(Expr::integer(-7)))).kind() == ExprKind::Exp);
}

TEST_CASE("folding never enlarges the natural domain") {
    // 0 * ln(x) is undefined for x <= 0, so the product must survive.
    Expr z = Expr::mul(Expr::integer(0), Expr::ln(x()));
    CHECK(fold(z).kind() == ExprKind::Mul);
    // 0 * x is identically zero.
    CHECK(fold(Expr::mul(Expr::integer(0), x())).is_zero());
    // ln(x)^0 keeps its constraint; x^0 folds.
    CHECK(fold(Expr::intpow(Expr::ln(x()), 0)).kind() == ExprKind::IntPow);
    CHECK(fold(Expr::intpow(x(), 0)).is_one());
}

TEST_CASE("substitution") {
    Expr e = Expr::add(Expr::intpow(x(), 2), x());
    CHECK(fold(substitute(e, Expr::integer(3))) == Expr::integer(12));
    Expr nested = substitute(Expr::exp(x()), Expr::mul(Expr::integer(2), x()));
    CHECK(nested == Expr::exp(Expr::mul(Expr::integer(2), x())));
}

TEST_CASE("derivatives") {
    CHECK(differentiate(Expr::intpow(x(), 2)) == Expr::mul(Expr::integer(2), x()));
    CHECK(differentiate(Expr::exp(x())) == Expr::exp(x()));
    CHECK(differentiate(Expr::const_pi()).is_zero());
    // d/dx ln(x) = 1/x
    CHECK(differentiate(Expr::ln(x())) == Expr::div(Expr::integer(1), x()));
    // d/dx sqrt(x) = 1/(2*sqrt(x))
    Expr ds = differentiate(Expr::sqrt(x()));
    CHECK(ds == Expr::div(Expr::integer(1), Expr::mul(Expr::integer(2), Expr::sqrt(x()))));
    // d/dx W(0, x) = W(0,x) / (x*(1 + W(0,x)))
    Expr w = Expr::lambert_w(0, x());
    CHECK(differentiate(w) ==
          Expr::div(w, Expr::mul(x(), Expr::add(Expr::integer(1), w))));
    // Chain rule through cos.
    CHECK(differentiate(Expr::cos(Expr::intpow(x(), 2))) ==
          Expr::neg(Expr::mul(Expr::sin(Expr::intpow(x(), 2)), Expr::mul(Expr::integer(2), x()))));
}

TEST_CASE("exact evaluation") {
    Expr e = Expr::div(Expr::add(x(), Expr::integer(1)), Expr::sub(x(), Expr::integer(2)));
    CHECK(evaluate_exact(e, Rational(4)) == Rational(5, 2));
    CHECK_THROWS_AS(evaluate_exact(e, Rational(2)), DomainViolation);

    CHECK(evaluate_exact(Expr::sqrt(x()), Rational(9, 4)) == Rational(3, 2));
    CHECK_FALSE(evaluate_exact(Expr::sqrt(x()), Rational(2)).has_value());
    CHECK_THROWS_AS(evaluate_exact(Expr::sqrt(x()), Rational(-1)), DomainViolation);
    CHECK(evaluate_exact(Expr::root(3, x()), Rational(-27)) == Rational(-3));

    CHECK(evaluate_exact(Expr::exp(x()), Rational(0)) == Rational(1));
    CHECK_FALSE(evaluate_exact(Expr::exp(x()), Rational(1)).has_value());
    CHECK(evaluate_exact(Expr::ln(x()), Rational(1)) == Rational(0));
    CHECK_THROWS_AS(evaluate_exact(Expr::ln(x()), Rational(0)), DomainViolation);
    CHECK_THROWS_AS(evaluate_exact(Expr::ln(x()), Rational(-3)), DomainViolation);

    CHECK(evaluate_exact(Expr::lambert_w(0, x()), Rational(0)) == Rational(0));
    CHECK_THROWS_AS(evaluate_exact(Expr::lambert_w(0, x()), Rational(-1)), DomainViolation);
    CHECK_THROWS_AS(evaluate_exact(Expr::lambert_w(-1, x()), Rational(1, 10)), DomainViolation);
    CHECK_FALSE(evaluate_exact(Expr::lambert_w(-1, x()), Rational(-1, 10)).has_value());

    CHECK_THROWS_AS(evaluate_exact(Expr::intpow(x(), -1), Rational(0)), DomainViolation);
    CHECK_FALSE(evaluate_exact(Expr::const_pi(), Rational(0)).has_value());
    // Undefinedness beats inexactness: ln(pi - pi) is a domain error only
    // once the argument is known; pi is inexact, so this stays nullopt.
    CHECK_FALSE(evaluate_exact(Expr::ln(Expr::sub(Expr::const_pi(), Expr::const_pi())), Rational(0))
                    .has_value());
}

TEST_CASE("rendering uses minimal grammar-shaped parentheses") {
    Expr p = Expr::sub(Expr::sub(Expr::intpow(x(), 5), x()), Expr::integer(1));
    CHECK(to_string(p) == "x^5 - x - 1");
    CHECK(to_string(Expr::add(Expr::sqrt(x()),
                              Expr::sqrt(Expr::add(Expr::mul(Expr::integer(2), x()),
                                                   Expr::integer(1))))) ==
          "sqrt(x) + sqrt(2*x + 1)");
    CHECK(to_string(Expr::root(3, Expr::mul(Expr::integer(2), x()))) == "root(3, 2*x)");
    CHECK(to_string(Expr::neg(Expr::intpow(x(), 2))) == "-x^2");
    CHECK(to_string(Expr::intpow(Expr::neg(x()), 2)) == "(-x)^2");
    CHECK(to_string(Expr::mul(Expr::neg(x()), x())) == "-x*x");
    CHECK(to_string(Expr::neg(Expr::mul(x(), x()))) == "-(x*x)");
    CHECK(to_string(Expr::mul(x(), Expr::neg(x()))) == "x*(-x)");
    CHECK(to_string(Expr::div(x(), Expr::mul(x(), x()))) == "x/(x*x)");
    CHECK(to_string(Expr::sub(x(), Expr::add(x(), x()))) == "x - (x + x)");
    CHECK(to_string(Expr::mul(Expr::add(x(), Expr::integer(1)), Expr::integer(2))) ==
          "(x + 1)*2");
    CHECK(to_string(Expr::rational(Rational(-1, 2))) == "-1/2");
    CHECK(to_string(Expr::mul(Expr::rational(Rational(1, 2)), x())) == "(1/2)*x");
    CHECK(to_string(Expr::intpow(Expr::rational(Rational(3, 2)), 2)) == "(3/2)^2");
    CHECK(to_string(Expr::lambert_w(-1, Expr::neg(Expr::exp(Expr::integer(-2))))) ==
          "W(-1, -exp(-2))");
    CHECK(to_string(Expr::ln(Expr::rational(Rational(1, 2)))) == "ln(1/2)");
    CHECK(to_string(Expr::intpow(x(), -2)) == "x^-2");
}
