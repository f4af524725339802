#include <catch2/catch_amalgamated.hpp>

#include "solset/mpoly.hpp"

using namespace solset;

namespace {

BiPoly bx() { return BiPoly::x(); }
BiPoly by() { return BiPoly::y(); }
BiPoly bc(long v) { return BiPoly::constant(Int(v)); }

}  // namespace

TEST_CASE("bipoly ring arithmetic") {
    BiPoly p = (bx() + by()) * (bx() - by());
    CHECK(p == bx() * bx() - by() * by());
    CHECK((bx() + by()).pow(2) == bx() * bx() + bc(2) * bx() * by() + by() * by());
    CHECK((p - p).is_zero());
    CHECK(p.degree_x() == 2);
    CHECK(p.degree_y() == 2);
    CHECK(BiPoly().degree_x() == -1);

    BiPoly q = bc(3) * by() * by() + bc(5) * bx() * by() + bc(7);
    CHECK(q.coeff_y(2) == bc(3));
    CHECK(q.coeff_y(1) == bc(5) * bx());
    CHECK(q.coeff_y(0) == bc(7));
    CHECK(q.coeff_y(3).is_zero());

    CHECK(q.eval(Rational(2), Rational(-1)) == Rational(3 - 10 + 7));
}

TEST_CASE("bipoly content and primitive part") {
    BiPoly p = bc(-6) * bx() * by() + bc(-9) * by();
    CHECK(p.content() == 3);
    BiPoly prim = p.primitive();
    CHECK(prim == bc(2) * bx() * by() + bc(3) * by());
    CHECK(BiPoly().primitive().is_zero());
    // Leading sign flips so the graded-leading coefficient ends up positive.
    CHECK((-prim).primitive() == prim);
}

TEST_CASE("bipoly structural maps") {
    BiPoly p = by() * by() * by() + bc(2) * bx() * by() + bc(5);
    CHECK(p.negate_y() == -(by() * by() * by()) - bc(2) * bx() * by() + bc(5));
    CHECK(p.negate_y().negate_y() == p);
    CHECK(p.stretch_y(2) == by().pow(6) + bc(2) * bx() * by() * by() + bc(5));
    CHECK(p.swap_vars() == bx() * bx() * bx() + bc(2) * bx() * by() + bc(5));

    // reverse: y^3 + 2xy + 5 -> 5y^3 + 2xy^2 + 1
    CHECK(p.reverse_y() == bc(5) * by().pow(3) + bc(2) * bx() * by() * by() + bc(1));
    // trailing zero coefficients strip: y^3 + y^2 reverses to 1 + y
    CHECK((by().pow(3) + by().pow(2)).reverse_y() == by() + bc(1));
}

TEST_CASE("bipoly exact division") {
    BiPoly a = (bx() + by()).pow(3);
    CHECK(divexact(a, bx() + by()) == (bx() + by()).pow(2));
    CHECK(divexact(a, a) == bc(1));
    CHECK_THROWS_AS(divexact(a, BiPoly()), ZeroInput);
    CHECK_THROWS_AS(divexact(bx() + bc(1), bx() + bc(2)), std::logic_error);
}

TEST_CASE("bareiss determinant") {
    auto det2 = [](long a, long b, long c, long d) {
        std::vector<std::vector<BiPoly>> m{{bc(a), bc(b)}, {bc(c), bc(d)}};
        return bareiss_determinant(m);
    };
    CHECK(det2(1, 2, 3, 4) == bc(-2));
    CHECK(det2(0, 1, 1, 0) == bc(-1));   // pivot swap
    CHECK(det2(0, 1, 0, 2).is_zero());   // no pivot in first column
    std::vector<std::vector<BiPoly>> m{{bx(), bc(1)}, {bc(1), bx()}};
    CHECK(bareiss_determinant(m) == bx() * bx() - bc(1));
}

TEST_CASE("resultants of bivariate polynomials") {
    // res_y(y^2 - x, y - 2) = 4 - x
    CHECK(resultant(by() * by() - bx(), by() - bc(2)) == bc(4) - bx());
    // res_y(y^2 - 2, y^2 - 3) = 1
    CHECK(resultant(by() * by() - bc(2), by() * by() - bc(3)) == bc(1));
    // shared root forces zero
    CHECK(resultant(by() - bx(), by() - bx()).is_zero());
    // eliminating x instead
    CHECK(resultant(bx() * bx() - by(), bx() - bc(3), false) == bc(9) - by());
    CHECK_THROWS_AS(resultant(BiPoly(), by()), ZeroInput);
    CHECK_THROWS_AS(resultant(bx() + bc(1), bx() - bc(1)), NoOccurrence);
}

TEST_CASE("resultant eliminates the auxiliary variable of a sum of radicals") {
    // sum of sqrt(x) and sqrt(2x+1): eliminate t from t^2 - x and (y-t)^2 - (2x+1)
    std::vector<BiPoly> a{-bx(), BiPoly(), bc(1)};  // t^2 - x
    // (y-t)^2 - (2x+1) = t^2 - 2y t + y^2 - 2x - 1
    std::vector<BiPoly> b{by() * by() - bc(2) * bx() - bc(1), bc(-2) * by(), bc(1)};
    BiPoly r = resultant_in_t(a, b);
    BiPoly expected = by().pow(4) - (bc(6) * bx() + bc(2)) * by() * by() +
                      (bx() + bc(1)) * (bx() + bc(1));
    CHECK(r == expected);
    // y = sqrt(x) + sqrt(2x+1) at x = 4 gives y = 5
    CHECK(r.eval(Rational(4), Rational(5)) == Rational(0));
}

TEST_CASE("resultant eliminates the auxiliary variable of a cube root plus sqrt") {
    // t^3 - 2x and (y-t)^2 - 5
    std::vector<BiPoly> a{bc(-2) * bx(), BiPoly(), BiPoly(), bc(1)};
    std::vector<BiPoly> b{by() * by() - bc(5), bc(-2) * by(), bc(1)};
    BiPoly r = resultant_in_t(a, b);
    BiPoly lhs = by().pow(3) + bc(15) * by() - bc(2) * bx();
    BiPoly rhs = bc(3) * by() * by() + bc(5);
    BiPoly expected = lhs * lhs - bc(5) * rhs * rhs;
    CHECK(r.primitive() == expected.primitive());
    // y = cbrt(2x) + sqrt(5) at x = 4: exact zero at (4, 2 + sqrt 5) means the
    // polynomial in y picked up (y - 2 - sqrt5) as a factor; spot-check a
    // rational point instead: x = 1/2 root y = 1 + sqrt 5 is irrational, so
    // check the expansion evaluates consistently with its factored form.
    Rational xv(7, 3), yv(-2, 5);
    CHECK(r.eval(xv, yv) * expected.eval(Rational(1), Rational(1)) ==
          expected.eval(xv, yv) * r.eval(Rational(1), Rational(1)));
}

TEST_CASE("degenerate resultant shapes") {
    // both constant in t
    std::vector<BiPoly> a{bx() + bc(1)};
    std::vector<BiPoly> b{by()};
    CHECK(resultant_in_t(a, b) == bc(1));
    // one constant: result is that constant to the other degree
    std::vector<BiPoly> c{bx(), bc(0), bc(1)};
    CHECK(resultant_in_t(b, c) == by() * by());
}

TEST_CASE("bipoly rendering") {
    BiPoly p = by().pow(4) - (bc(6) * bx() + bc(2)) * by() * by() +
               (bx() + bc(1)) * (bx() + bc(1));
    CHECK(to_string(p) == "y^4 - 6*y^2*x - 2*y^2 + x^2 + 2*x + 1");
    CHECK(to_string(BiPoly()) == "0");
    CHECK(to_string(bc(-3)) == "-3");
    CHECK(to_string(by() - bx()) == "y - x");
    CHECK(to_string(bc(2) * by(), "u", "v") == "2*v");
}

TEST_CASE("npoly arithmetic in three variables") {
    NPoly x = NPoly::variable(3, 0), r1 = NPoly::variable(3, 1), r2 = NPoly::variable(3, 2);
    NPoly one = NPoly::constant(3, Int(1));
    NPoly p = (x + r1) * (x - r1);
    CHECK(p == x * x - r1 * r1);
    CHECK((r1 * r2 + one).pow(2) == r1 * r1 * r2 * r2 + NPoly::constant(3, Int(2)) * r1 * r2 + one);
    CHECK((p - p).is_zero());
    CHECK(p.degree_in(0) == 2);
    CHECK(p.degree_in(2) == 0);

    NPoly narrow = NPoly::variable(1, 0);
    NPoly wide = narrow.widened(3);
    CHECK(wide == x);

    NPoly scaled = NPoly::constant(2, Int(-4)) * NPoly::variable(2, 1) -
                   NPoly::constant(2, Int(6)) * NPoly::variable(2, 0);
    CHECK(scaled.content() == 2);
    CHECK(scaled.primitive() ==
          NPoly::constant(2, Int(2)) * NPoly::variable(2, 1) +
              NPoly::constant(2, Int(3)) * NPoly::variable(2, 0));
}
