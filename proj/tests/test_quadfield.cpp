#include <catch2/catch_amalgamated.hpp>

#include "solset/parse.hpp"
#include "solset/quadfield.hpp"

using namespace solset;

namespace {
QuadExt surd(long a, long b, long d) {
    return QuadExt(Rational(a), Rational(b), Int(d));
}
}  // namespace

TEST_CASE("field arithmetic in Q(sqrt(5))") {
    QuadExt phi = QuadExt(make_rational(1, 2), make_rational(1, 2), Int(5));
    // golden ratio: phi^2 = phi + 1
    CHECK(phi * phi == phi + QuadExt(Rational(1)));
    CHECK(phi.pow(2) == phi + QuadExt(Rational(1)));
    // 1/phi = phi - 1
    CHECK(phi.reciprocal() == phi - QuadExt(Rational(1)));
    CHECK(phi * phi.reciprocal() == QuadExt(Rational(1)));
    CHECK((phi - phi).is_zero());
    CHECK(phi.pow(-2) == (phi * phi).reciprocal());

    CHECK_THROWS_AS(QuadExt().reciprocal(), DomainViolation);
    CHECK_THROWS_AS(surd(0, 1, 2) + surd(0, 1, 3), IncompatibleField);
    // rationals mix into any field
    CHECK(surd(0, 1, 2) + QuadExt(Rational(3)) == surd(3, 1, 2));
}

TEST_CASE("exact sign") {
    CHECK(surd(-3, 1, 17).sign() > 0);   // sqrt(17) > 3
    CHECK(surd(-5, 1, 17).sign() < 0);   // sqrt(17) < 5
    CHECK(surd(26, -6, 17).sign() > 0);  // 26 > 6*sqrt(17) since 676 > 612
    CHECK(surd(-26, 6, 17).sign() < 0);
    CHECK(surd(0, 0, 1).sign() == 0);
    CHECK(surd(0, -2, 3).sign() < 0);
    CHECK(QuadExt(make_rational(-1, 7)).sign() < 0);
}

TEST_CASE("rational square roots") {
    CHECK(*exact_rational_sqrt(make_rational(9, 4)) == make_rational(3, 2));
    CHECK(*exact_rational_sqrt(Rational(0)) == Rational(0));
    CHECK(!exact_rational_sqrt(Rational(2)).has_value());
    CHECK(!exact_rational_sqrt(make_rational(4, 3)).has_value());
    CHECK(!exact_rational_sqrt(Rational(-4)).has_value());
}

TEST_CASE("square roots denest or fail honestly") {
    // sqrt(26 - 6*sqrt(17)) = sqrt(17) - 3
    auto r = quad_sqrt(surd(26, -6, 17));
    REQUIRE(r);
    CHECK(*r == surd(-3, 1, 17));
    // sqrt(26 + 6*sqrt(17)) = sqrt(17) + 3
    auto r2 = quad_sqrt(surd(26, 6, 17));
    REQUIRE(r2);
    CHECK(*r2 == surd(3, 1, 17));
    // sqrt(53 - 12*sqrt(17)) = 6 - sqrt(17)
    auto r3 = quad_sqrt(surd(53, -12, 17));
    REQUIRE(r3);
    CHECK(*r3 == surd(6, -1, 17));
    // sqrt(9 + 4*sqrt(5)) = 2 + sqrt(5)
    auto r4 = quad_sqrt(surd(9, 4, 5));
    REQUIRE(r4);
    CHECK(*r4 == surd(2, 1, 5));
    // sqrt(2 + sqrt(3)) does not lie in Q(sqrt(3))
    CHECK(!quad_sqrt(surd(2, 1, 3)).has_value());

    // rational radicands
    CHECK(*quad_sqrt(QuadExt(Rational(4))) == QuadExt(Rational(2)));
    CHECK(*quad_sqrt(QuadExt(Rational(8))) == surd(0, 2, 2));
    CHECK(*quad_sqrt(QuadExt(make_rational(1, 2))) == QuadExt(Rational(0), make_rational(1, 2), Int(2)));
    CHECK(quad_sqrt(QuadExt(Rational(0)))->is_zero());
    CHECK_THROWS_AS(quad_sqrt(QuadExt(Rational(-1))), DomainViolation);

    // every denested value squares back exactly
    for (long a = 1; a < 20; ++a)
        for (long b = -4; b <= 4; ++b) {
            QuadExt v = surd(a, b, 17);
            if (v.sign() < 0) continue;
            if (auto s = quad_sqrt(v)) {
                CHECK(*s * *s == v);
                CHECK(s->sign() >= 0);
            }
        }
}

TEST_CASE("expression evaluation at a surd point") {
    Expr f = parse_expression("sqrt(x) + sqrt(2*x + 1)");
    QuadExt inner = surd(26, -6, 17);
    auto v = evaluate_quad(f, inner);
    REQUIRE(v);
    CHECK(*v == QuadExt(Rational(3)));  // the candidate satisfies the original equation

    QuadExt outer = surd(26, 6, 17);
    auto w = evaluate_quad(f, outer);
    REQUIRE(w);
    CHECK(*w == surd(9, 2, 17));  // exact witness that the extraneous root fails
    CHECK((*w - QuadExt(Rational(3))).sign() > 0);

    Expr side = parse_expression("3*x - 8");
    CHECK(evaluate_quad(side, inner)->sign() < 0);
    CHECK(evaluate_quad(side, outer)->sign() > 0);

    Expr quad = parse_expression("x^2 - 52*x + 64");
    CHECK(evaluate_quad(quad, inner)->is_zero());
    CHECK(evaluate_quad(quad, outer)->is_zero());
}

TEST_CASE("evaluation leaves the field or the domain") {
    QuadExt root2 = surd(0, 1, 2);
    CHECK(!evaluate_quad(parse_expression("sqrt(x)"), root2).has_value());
    CHECK(!evaluate_quad(parse_expression("e + x"), root2).has_value());
    CHECK(!evaluate_quad(parse_expression("exp(x)"), root2).has_value());
    CHECK(!evaluate_quad(parse_expression("ln(x)"), root2).has_value());
    CHECK(!evaluate_quad(parse_expression("sin(x)"), root2).has_value());
    // mixed fields inside one expression degrade to nothing, not an error
    CHECK(!evaluate_quad(parse_expression("sqrt(3) + x"), root2).has_value());

    CHECK(*evaluate_quad(parse_expression("exp(x - x)"), root2) == QuadExt(Rational(1)));
    CHECK(*evaluate_quad(parse_expression("cos(x - x)"), root2) == QuadExt(Rational(1)));
    CHECK(*evaluate_quad(parse_expression("root(3, x)"), QuadExt(Rational(8))) ==
          QuadExt(Rational(2)));
    CHECK(*evaluate_quad(parse_expression("root(3, x)"), QuadExt(Rational(-8))) ==
          QuadExt(Rational(-2)));

    CHECK_THROWS_AS(evaluate_quad(parse_expression("1/x"), QuadExt(Rational(0))),
                    DomainViolation);
    CHECK_THROWS_AS(evaluate_quad(parse_expression("sqrt(x)"), QuadExt(Rational(-1))),
                    DomainViolation);
    CHECK_THROWS_AS(evaluate_quad(parse_expression("sqrt(0 - x^2 - 1)"), root2),
                    DomainViolation);
    CHECK_THROWS_AS(evaluate_quad(parse_expression("ln(x - x)"), root2), DomainViolation);
    CHECK_THROWS_AS(evaluate_quad(parse_expression("W(0, x)"), QuadExt(Rational(-1))),
                    DomainViolation);
    CHECK_THROWS_AS(evaluate_quad(parse_expression("W(-1, x)"), QuadExt(Rational(1))),
                    DomainViolation);
    CHECK(evaluate_quad(parse_expression("W(0, x)"), QuadExt(Rational(0)))->is_zero());
}

TEST_CASE("enclosures contain the exact value") {
    QuadExt v = surd(26, -6, 17);
    DyadicInterval enc = v.enclosure(128);
    // 26 - 6*sqrt(17) = 1.2613662462940367...
    CHECK(enc.lo_q() > *rational_from_decimal("1.2613662462"));
    CHECK(enc.hi_q() < *rational_from_decimal("1.2613662463"));
    CHECK(v.enclosure(256).width_exact() < make_rational(1, Int(1) << 200));

    // v^2 = 1288 - 312*sqrt(17); the two enclosure routes must overlap
    DyadicInterval direct = (v * v).enclosure(128);
    DyadicInterval squared = enc * enc;
    CHECK(squared.hi_q() >= direct.lo_q());
    CHECK(direct.hi_q() >= squared.lo_q());

    // plain rational values enclose as points
    CHECK(QuadExt(make_rational(3, 8)).enclosure(64).is_point());
}
