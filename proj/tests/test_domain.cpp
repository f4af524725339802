#include <catch2/catch_amalgamated.hpp>

#include "solset/domain.hpp"

using namespace solset;

TEST_CASE("interval validity and membership") {
    CHECK(RealInterval::all().valid());
    CHECK(RealInterval::point(Rational(2)).is_point());
    CHECK_FALSE(RealInterval::between(Rational(3), Rational(1)).valid());
    CHECK_FALSE(RealInterval::between(Rational(1), Rational(1), true, false).valid());

    RealInterval half = RealInterval::at_least(Rational(0), false);
    CHECK_FALSE(half.contains(Rational(0)));
    CHECK(half.contains(Rational(1, 1000)));

    RealInterval seg = RealInterval::between(Rational(-1), Rational(2), true, false);
    CHECK(seg.contains(Rational(-1)));
    CHECK_FALSE(seg.contains(Rational(2)));
}

TEST_CASE("interval intersection tightens both ends") {
    auto r = intersect(RealInterval::at_least(Rational(0)), RealInterval::at_most(Rational(5)));
    REQUIRE(r.has_value());
    CHECK(*r->lo == 0);
    CHECK(*r->hi == 5);
    CHECK(r->lo_closed);
    CHECK(r->hi_closed);

    // Closedness at a shared endpoint is the conjunction.
    auto s = intersect(RealInterval::between(Rational(0), Rational(1), true, false),
                       RealInterval::between(Rational(0), Rational(1), false, true));
    REQUIRE(s.has_value());
    CHECK_FALSE(s->lo_closed);
    CHECK_FALSE(s->hi_closed);

    CHECK_FALSE(intersect(RealInterval::at_most(Rational(0), false),
                          RealInterval::at_least(Rational(0), false))
                    .has_value());
    CHECK_FALSE(intersect(RealInterval::between(Rational(0), Rational(1)),
                          RealInterval::between(Rational(2), Rational(3)))
                    .has_value());
}

TEST_CASE("domains normalize to sorted disjoint maximal parts") {
    Domain d({RealInterval::between(Rational(2), Rational(3)),
              RealInterval::between(Rational(0), Rational(1)),
              RealInterval::between(Rational(1), Rational(2), false, true)},
             false);
    // [0,1] and (1,2] and [2,3] chain into one part.
    CHECK(d.single_interval());
    CHECK(*d.parts()[0].lo == 0);
    CHECK(*d.parts()[0].hi == 3);

    Domain gap({RealInterval::between(Rational(0), Rational(1), true, false),
                RealInterval::between(Rational(1), Rational(2), false, true)},
               false);
    CHECK(gap.parts().size() == 2);
    CHECK_FALSE(gap.contains(Rational(1)));
}

TEST_CASE("domain set operations") {
    Domain positives(RealInterval::at_least(Rational(0), false));
    Domain unit(RealInterval::between(Rational(-1), Rational(1)));
    Domain both = intersect(positives, unit);
    CHECK(both.single_interval());
    CHECK_FALSE(both.contains(Rational(0)));
    CHECK(both.contains(Rational(1)));

    Domain u = unite(Domain(RealInterval::at_most(Rational(0))), positives);
    CHECK(u.is_all());

    Domain punctured = Domain::all().without_point(Rational(0));
    CHECK(punctured.parts().size() == 2);
    CHECK_FALSE(punctured.contains(Rational(0)));
    CHECK(punctured.contains(Rational(-7)));

    Domain ring = Domain(RealInterval::between(Rational(0), Rational(10)))
                      .without_open_interval(Rational(2), Rational(4));
    CHECK(ring.parts().size() == 2);
    CHECK(ring.contains(Rational(2)));
    CHECK(ring.contains(Rational(4)));
    CHECK_FALSE(ring.contains(Rational(3)));
}

TEST_CASE("approximate flag propagates") {
    Domain a(RealInterval::all(), true);
    CHECK(intersect(a, Domain::all()).approximate());
    CHECK(unite(Domain::empty(), a).approximate());
    CHECK_FALSE(intersect(Domain::all(), Domain::all()).approximate());
}

TEST_CASE("domain rendering") {
    CHECK(to_string(Domain::all()) == "(-inf,inf)");
    CHECK(to_string(Domain::empty()) == "{}");
    Domain two({RealInterval::between(Rational(0), Rational(1), true, false),
                RealInterval::at_least(Rational(2), false)},
               false);
    CHECK(to_string(two) == "[0,1) U (2,inf)");
}
