#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "solset/parse.hpp"
#include "solset/solver.hpp"

using namespace solset;

namespace {

// Plain double bisection on a bracketing interval. Converges to machine
// precision, which leaves three orders of magnitude of slack against the
// 1e-12 agreement bounds used below.
double bisect(const std::function<double(double)>& f, double lo, double hi) {
    double flo = f(lo);
    REQUIRE(flo * f(hi) < 0);
    for (int i = 0; i < 200; ++i) {
        double mid = (lo + hi) / 2;
        double fm = f(mid);
        if (fm == 0.0) return mid;
        if ((fm < 0) == (flo < 0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    return (lo + hi) / 2;
}

double approx(const SolutionRep& r) { return r.enclosure(96).midpoint_q().get_d(); }

bool has_note(const SolveResult& r, const std::string& text) {
    for (const std::string& n : r.notes)
        if (n.find(text) != std::string::npos) return true;
    return false;
}

// All real roots of a coefficient vector, by exact Horner sign changes on a
// fine grid plus bisection. Only used where roots are known simple.
Rational horner(const std::vector<Rational>& c, const Rational& x) {
    Rational acc(0);
    for (size_t i = c.size(); i-- > 0;) acc = acc * x + c[i];
    return acc;
}

}  // namespace

TEST_CASE("radical chain produces one surd and one rejected candidate") {
    Equation eq = parse_equation("sqrt(x) + sqrt(2*x + 1) = 3");
    SolveResult r = solve(eq);

    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    const SolutionRep& sol = r.set.solutions()[0];
    REQUIRE(sol.kind() == SolutionRep::Kind::QuadraticSurd);
    CHECK(sol.surd_value().a == Rational(26));
    CHECK(sol.surd_value().b == Rational(-6));
    CHECK(sol.surd_value().d == 17);
    CHECK(to_string(sol) == "26 - 6*sqrt(17)");

    // one widening step in the whole chain, carrying the sign condition
    // that separates the true root from the phantom one
    int supersets = 0;
    std::string cond;
    for (const Step& s : r.trace.steps())
        if (s.relation == SolutionRelation::Superset) {
            ++supersets;
            REQUIRE(s.side_conditions.size() == 1);
            cond = to_string(s.side_conditions[0]);
        }
    CHECK(supersets == 1);
    CHECK(cond == "3*x - 8 <= 0");
    CHECK(r.trace.overall() == SolutionRelation::Superset);

    REQUIRE(r.candidates.size() == 2);
    int rejected = 0;
    for (const CandidateReport& c : r.candidates) {
        if (c.outcome == VerifyOutcome::Rejected) {
            ++rejected;
            CHECK(to_string(c.candidate) == "26 + 6*sqrt(17)");
            CHECK(c.detail == "side condition 3*x - 8 <= 0 violated");
        } else {
            CHECK(c.outcome == VerifyOutcome::Verified);
            CHECK(to_string(c.candidate) == "26 - 6*sqrt(17)");
        }
    }
    CHECK(rejected == 1);

    double oracle = bisect([](double x) { return std::sqrt(x) + std::sqrt(2 * x + 1) - 3; }, 1, 2);
    CHECK(std::fabs(approx(sol) - oracle) < 1e-12);
}

TEST_CASE("radical verification is anchored to the original equation") {
    Equation eq = parse_equation("sqrt(x) + sqrt(2*x + 1) = 3");
    SolveResult r = solve(eq);

    VerifyReport good = verify_candidate(eq, SolutionRep::surd({26, -6, 17}), r.trace);
    CHECK(good.outcome == VerifyOutcome::Verified);
    CHECK(good.detail == "satisfies the equation exactly; side conditions hold strictly");

    VerifyReport bad = verify_candidate(eq, SolutionRep::surd({26, 6, 17}), r.trace);
    CHECK(bad.outcome == VerifyOutcome::Rejected);

    // without the trace the phantom root still fails, now on exact grounds
    Trace empty;
    VerifyReport direct = verify_candidate(eq, SolutionRep::surd({26, 6, 17}), empty);
    CHECK(direct.outcome == VerifyOutcome::Rejected);
}

TEST_CASE("squaring an already-isolated radical keeps domain filtering") {
    Equation eq = parse_equation("sqrt(2*x + 1) = x - 1");
    SolveResult r = solve(eq);

    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    CHECK(r.set.solutions()[0].kind() == SolutionRep::Kind::ExactRational);
    CHECK(r.set.solutions()[0].rational_value() == Rational(4));

    REQUIRE(r.candidates.size() == 2);
    int rejected = 0;
    for (const CandidateReport& c : r.candidates)
        if (c.outcome == VerifyOutcome::Rejected) {
            ++rejected;
            CHECK(to_string(c.candidate) == "0");
        }
    CHECK(rejected == 1);
}

TEST_CASE("radical equation with the variable outside the root") {
    Equation eq = parse_equation("x = sqrt(x) + 3");
    SolveResult r = solve(eq);

    REQUIRE(r.set.solutions().size() == 1);
    double oracle = bisect([](double x) { return x - std::sqrt(x) - 3; }, 3, 9);
    CHECK(std::fabs(approx(r.set.solutions()[0]) - oracle) < 1e-12);
    bool any_rejected = false;
    for (const CandidateReport& c : r.candidates)
        any_rejected |= c.outcome == VerifyOutcome::Rejected;
    CHECK(any_rejected);
}

TEST_CASE("exponential crossing a line solves on both branches") {
    struct Case {
        long b;
        size_t count;
    };
    for (Case c : {Case{0, 0}, Case{1, 1}, Case{2, 2}, Case{3, 2}}) {
        Equation eq(Expr::exp(Expr::var()), Expr::add(Expr::var(), Expr::integer(c.b)));
        SolveResult r = solve(eq);
        INFO("b = " << c.b);
        if (c.count == 0) {
            CHECK(r.set.kind() == SolutionSet::Kind::Empty);
            continue;
        }
        REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
        REQUIRE(r.set.solutions().size() == c.count);
        if (c.count == 1) {
            CHECK(r.set.solutions()[0].rational_value() == Rational(0));
            continue;
        }
        double b = static_cast<double>(c.b);
        auto f = [b](double x) { return std::exp(x) - x - b; };
        double left = bisect(f, -b - 1, -b + 1);
        double right = bisect(f, 0.5, 2.5);
        CHECK(std::fabs(approx(r.set.solutions()[0]) - left) < 1e-12);
        CHECK(std::fabs(approx(r.set.solutions()[1]) - right) < 1e-12);
        CHECK(r.set.solutions()[0].kind() == SolutionRep::Kind::ClosedForm);
        CHECK(r.set.solutions()[1].kind() == SolutionRep::Kind::ClosedForm);
    }
}

TEST_CASE("exponential equal to a constant becomes a logarithm") {
    SolveResult r = solve(parse_equation("exp(x) = 1/2"));
    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    const SolutionRep& sol = r.set.solutions()[0];
    REQUIRE(sol.kind() == SolutionRep::Kind::ClosedForm);
    CHECK(to_string(sol) == "ln(1/2)");
    CHECK(std::fabs(approx(sol) - std::log(0.5)) < 1e-12);

    bool injective_step = false;
    for (const Step& s : r.trace.steps())
        injective_step |= s.rule == RuleId::ApplyInjective;
    CHECK(injective_step);

    SolveResult inner = solve(parse_equation("exp(2*x + 1) = 5"));
    REQUIRE(inner.set.solutions().size() == 1);
    CHECK(std::fabs(approx(inner.set.solutions()[0]) - (std::log(5.0) - 1) / 2) < 1e-12);

    CHECK(solve(parse_equation("exp(x) = 0")).set.kind() == SolutionSet::Kind::Empty);
    CHECK(solve(parse_equation("exp(x) = -3")).set.kind() == SolutionSet::Kind::Empty);
}

TEST_CASE("product with its own exponential splits at the branch point") {
    SolveResult two = solve(parse_equation("x * exp(x) = -1/4"));
    REQUIRE(two.set.solutions().size() == 2);
    auto f = [](double x) { return x * std::exp(x) + 0.25; };
    CHECK(std::fabs(approx(two.set.solutions()[0]) - bisect(f, -8, -1)) < 1e-12);
    CHECK(std::fabs(approx(two.set.solutions()[1]) - bisect(f, -1, 0)) < 1e-12);

    SolveResult none = solve(parse_equation("x * exp(x) = -1/2"));
    CHECK(none.set.kind() == SolutionSet::Kind::Empty);
    CHECK(has_note(none, "below the minimum"));

    SolveResult zero = solve(parse_equation("x * exp(x) = 0"));
    REQUIRE(zero.set.solutions().size() == 1);
    CHECK(zero.set.solutions()[0].rational_value() == Rational(0));

    SolveResult one = solve(parse_equation("x * exp(x) = 2"));
    REQUIRE(one.set.solutions().size() == 1);
    auto g = [](double x) { return x * std::exp(x) - 2; };
    CHECK(std::fabs(approx(one.set.solutions()[0]) - bisect(g, 0, 2)) < 1e-12);
}

TEST_CASE("quintic root is certified through its inverse function") {
    SolveResult r = solve(parse_equation("x^5 - x - 1 = 0"));
    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    const SolutionRep& sol = r.set.solutions()[0];
    REQUIRE(sol.kind() == SolutionRep::Kind::CertifiedRoot);

    const InverseFunctionValue* iv = sol.inverse_function();
    REQUIRE(iv != nullptr);
    CHECK(to_string(iv->target()) == "0");
    CHECK(iv->branch_domain().parts().size() == 1);

    // no radical form is claimed anywhere
    CHECK(!sol.as_expr());
    CHECK(has_note(r, "no radical form produced"));

    double oracle = bisect([](double x) { return std::pow(x, 5) - x - 1; }, 1, 2);
    DyadicInterval enc = sol.enclosure(64);
    CHECK(std::fabs(enc.midpoint_q().get_d() - oracle) < 1e-12);
    CHECK(enc.width_exact() < Rational(1, 1000000000000));
    CHECK(enc.lo_q().get_d() <= oracle);
    CHECK(oracle <= enc.hi_q().get_d());
}

TEST_CASE("power substitution solves the sextic through cube roots") {
    SolveResult r = solve(parse_equation("x^6 - x^3 - 1 = 0"));
    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 2);
    CHECK(to_string(r.set.solutions()[0]) == "root(3, 1/2 - (1/2)*sqrt(5))");
    CHECK(to_string(r.set.solutions()[1]) == "root(3, 1/2 + (1/2)*sqrt(5))");

    bool substituted = false;
    for (const Step& s : r.trace.steps())
        if (s.rule == RuleId::Substitute) {
            substituted = true;
            CHECK(s.substitution_exponent == 3);
            CHECK(describe(s) == "Substitute(y = x^3)");
        }
    CHECK(substituted);

    // both values are cube roots of (1 +- sqrt(5))/2
    double golden = (1 + std::sqrt(5.0)) / 2;
    double conj = (1 - std::sqrt(5.0)) / 2;
    CHECK(std::fabs(approx(r.set.solutions()[1]) - std::cbrt(golden)) < 1e-12);
    CHECK(std::fabs(approx(r.set.solutions()[0]) - std::cbrt(conj)) < 1e-12);
}

TEST_CASE("even substitution spreads surd pairs symmetrically") {
    SolveResult r = solve(parse_equation("x^4 - 5*x^2 + 6 = 0"));
    REQUIRE(r.set.solutions().size() == 4);
    std::vector<double> want = {-std::sqrt(3.0), -std::sqrt(2.0), std::sqrt(2.0), std::sqrt(3.0)};
    for (size_t i = 0; i < 4; ++i) {
        CHECK(r.set.solutions()[i].kind() == SolutionRep::Kind::QuadraticSurd);
        CHECK(std::fabs(approx(r.set.solutions()[i]) - want[i]) < 1e-12);
    }
    CHECK(to_string(r.set.solutions()[2]) == "sqrt(2)");
}

TEST_CASE("rational equations drop poles from the solution set") {
    SolveResult r = solve(parse_equation("(x^2 - 1) / (x - 1) = 0"));
    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    CHECK(r.set.solutions()[0].rational_value() == Rational(-1));

    SolveResult both = solve(parse_equation("(x^2 - 4) / (x + 1) = 0"));
    REQUIRE(both.set.solutions().size() == 2);
    CHECK(both.set.solutions()[0].rational_value() == Rational(-2));
    CHECK(both.set.solutions()[1].rational_value() == Rational(2));

    // numerator root coinciding with a pole never survives
    std::mt19937 rng(20240811);
    std::uniform_int_distribution<int> small(-6, 6);
    for (int trial = 0; trial < 40; ++trial) {
        int a = small(rng), b = small(rng);
        if (a == b) continue;
        std::string text = "((x - " + std::to_string(a) + ") * (x - " + std::to_string(b) +
                           ")) / (x - " + std::to_string(a) + ") = 0";
        SolveResult one = solve(parse_equation(text));
        REQUIRE(one.set.solutions().size() == 1);
        CHECK(one.set.solutions()[0].rational_value() == Rational(b));
    }
}

TEST_CASE("identities and contradictions classify at once") {
    CHECK(solve(parse_equation("exp(x) = exp(x)")).set.kind() == SolutionSet::Kind::Identity);
    CHECK(solve(parse_equation("(x + 1)^2 = x^2 + 2*x + 1")).set.kind() ==
          SolutionSet::Kind::Identity);
    CHECK(solve(parse_equation("(x^2 - 1) / (x - 1) = x + 1")).set.kind() ==
          SolutionSet::Kind::Identity);
    CHECK(solve(parse_equation("x + 1 = x + 2")).set.kind() == SolutionSet::Kind::Empty);
    CHECK(solve(parse_equation("0 = 0")).set.kind() == SolutionSet::Kind::Identity);
    CHECK(solve(parse_equation("1 = 2")).set.kind() == SolutionSet::Kind::Empty);
}

TEST_CASE("empty domains solve to the empty set immediately") {
    Equation eq(Expr::var(), Expr::integer(1),
                Domain(RealInterval::between(Rational(2), Rational(1))));
    SolveResult r = solve(eq);
    CHECK(r.set.kind() == SolutionSet::Kind::Empty);
}

TEST_CASE("solution sets respect the requested domain") {
    SolveResult both = solve(parse_equation("x^2 = 4"));
    REQUIRE(both.set.solutions().size() == 2);
    CHECK(both.set.solutions()[0].rational_value() == Rational(-2));
    CHECK(both.set.solutions()[1].rational_value() == Rational(2));

    Equation on_ray(parse_expression("x^2"), Expr::integer(4),
                    Domain(RealInterval::at_least(Rational(0))));
    SolveResult pos = solve(on_ray);
    REQUIRE(pos.set.solutions().size() == 1);
    CHECK(pos.set.solutions()[0].rational_value() == Rational(2));

    Equation far(parse_expression("x^2"), Expr::integer(4),
                 Domain(RealInterval::at_least(Rational(3))));
    CHECK(solve(far).set.kind() == SolutionSet::Kind::Empty);

    Equation surd_ray(parse_expression("x^2"), Expr::integer(2),
                      Domain(RealInterval::at_least(Rational(0))));
    SolveResult sr = solve(surd_ray);
    REQUIRE(sr.set.solutions().size() == 1);
    CHECK(to_string(sr.set.solutions()[0]) == "sqrt(2)");
}

TEST_CASE("monotone counting decides attainment against the range") {
    Equation at3 = parse_equation("sqrt(x) + sqrt(2*x + 1) = 3");
    MonotoneCountResult hit = count_solutions_monotone(at3);
    REQUIRE(hit.count == MonotoneCount::ExactlyOne);
    REQUIRE(hit.enclosure);
    double oracle = bisect([](double x) { return std::sqrt(x) + std::sqrt(2 * x + 1) - 3; }, 1, 2);
    CHECK(std::fabs(hit.enclosure->midpoint_q().get_d() - oracle) < 1e-10);

    // the function's value at the closed left endpoint is attained exactly
    Equation at1 = parse_equation("sqrt(x) + sqrt(2*x + 1) = 1");
    MonotoneCountResult edge = count_solutions_monotone(at1);
    REQUIRE(edge.count == MonotoneCount::ExactlyOne);
    REQUIRE(edge.exact);
    CHECK(*edge.exact == Rational(0));

    CHECK(count_solutions_monotone(parse_equation("sqrt(x) + sqrt(2*x + 1) = 1/2")).count ==
          MonotoneCount::None);
    CHECK(count_solutions_monotone(parse_equation("sqrt(x) + sqrt(2*x + 1) = 0")).count ==
          MonotoneCount::None);

    Equation linear(parse_expression("2*x + 1"), Expr::integer(8),
                    Domain(RealInterval::at_least(Rational(0))));
    MonotoneCountResult lin = count_solutions_monotone(linear);
    REQUIRE(lin.count == MonotoneCount::ExactlyOne);
    REQUIRE(lin.enclosure);
    CHECK(lin.enclosure->contains(Rational(7, 2)));
}

TEST_CASE("monotone counting rejects unqualified equations") {
    CHECK_THROWS_AS(count_solutions_monotone(parse_equation("x^2 = 4")), PreconditionViolated);
    CHECK_THROWS_AS(count_solutions_monotone(parse_equation("sqrt(x) = x")),
                    PreconditionViolated);
}

TEST_CASE("equations outside every strategy report unsolved") {
    SolveResult r = solve(parse_equation("ln(x) = x - 3"));
    CHECK(r.set.kind() == SolutionSet::Kind::Unsolved);
    CHECK(!r.set.reason().empty());
}

TEST_CASE("pipelines can be disabled individually") {
    SolverConfig cfg;
    cfg.enable_radical = false;
    SolveResult r = solve(parse_equation("sqrt(x) + sqrt(2*x + 1) = 3"), cfg);
    // the monotone fallback still pins the root, without a closed form
    REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
    REQUIRE(r.set.solutions().size() == 1);
    CHECK(r.set.solutions()[0].kind() == SolutionRep::Kind::CertifiedRoot);

    cfg.enable_monotone = false;
    SolveResult none = solve(parse_equation("sqrt(x) + sqrt(2*x + 1) = 3"), cfg);
    CHECK(none.set.kind() == SolutionSet::Kind::Unsolved);
}

TEST_CASE("random polynomials solve completely against sturm counting") {
    std::mt19937 rng(96218);
    std::uniform_int_distribution<int> coeff(-9, 9);
    std::uniform_int_distribution<int> deg(1, 6);
    int done = 0;
    while (done < 40) {
        int d = deg(rng);
        std::vector<Rational> c(static_cast<size_t>(d) + 1);
        for (auto& v : c) v = Rational(coeff(rng));
        if (c.back() == 0) continue;
        ++done;

        Expr poly = Expr::rational(c[0]);
        for (int i = 1; i <= d; ++i)
            poly = Expr::add(poly, Expr::mul(Expr::rational(c[static_cast<size_t>(i)]),
                                             Expr::intpow(Expr::var(), i)));
        SolveResult r = solve(Equation(poly, Expr::integer(0)));
        INFO("degree " << d << " trial " << done);

        UniPoly up(c);
        size_t expected = sturm_isolate(up.primitive()).size();
        if (expected == 0) {
            CHECK(r.set.kind() == SolutionSet::Kind::Empty);
            continue;
        }
        REQUIRE(r.set.kind() == SolutionSet::Kind::Finite);
        REQUIRE(r.set.solutions().size() == expected);

        Rational prev_hi;
        bool first = true;
        for (const SolutionRep& rep : r.set.solutions()) {
            DyadicInterval enc = rep.enclosure(160);
            Rational flo = horner(c, enc.lo_q());
            Rational fhi = horner(c, enc.hi_q());
            // exact zero at an endpoint or a sign change across the enclosure
            CHECK((flo == 0 || fhi == 0 || sgn(flo) != sgn(fhi)));
            if (!first) CHECK(prev_hi < enc.lo_q());
            prev_hi = enc.hi_q();
            first = false;
        }
    }
}

TEST_CASE("trivial verification cases stay exact") {
    Equation sq = parse_equation("x^2 = 0");
    Trace empty;
    CHECK(verify_candidate(sq, SolutionRep::exact(Rational(0)), empty).outcome ==
          VerifyOutcome::Verified);
    VerifyReport off = verify_candidate(sq, SolutionRep::exact(Rational(1)), empty);
    CHECK(off.outcome == VerifyOutcome::Rejected);
    CHECK(off.detail.find("lhs - rhs") != std::string::npos);

    // candidates outside the equation's domain are rejected outright
    Equation dom(Expr::var(), Expr::integer(1), Domain(RealInterval::at_least(Rational(0))));
    CHECK(verify_candidate(dom, SolutionRep::exact(Rational(-1)), empty).outcome ==
          VerifyOutcome::Rejected);
}

TEST_CASE("linear and quadratic shapes keep exact arithmetic") {
    SolveResult lin = solve(parse_equation("3*x + 5 = 1"));
    REQUIRE(lin.set.solutions().size() == 1);
    CHECK(lin.set.solutions()[0].rational_value() == Rational(-4, 3));

    SolveResult dbl = solve(parse_equation("x^2 - 2*x + 1 = 0"));
    REQUIRE(dbl.set.solutions().size() == 1);
    CHECK(dbl.set.solutions()[0].rational_value() == Rational(1));

    SolveResult split = solve(parse_equation("x^2 - x - 1 = 0"));
    REQUIRE(split.set.solutions().size() == 2);
    CHECK(split.set.solutions()[0].kind() == SolutionRep::Kind::QuadraticSurd);
    double golden = (1 + std::sqrt(5.0)) / 2;
    CHECK(std::fabs(approx(split.set.solutions()[1]) - golden) < 1e-12);

    CHECK(solve(parse_equation("x^2 + 1 = 0")).set.kind() == SolutionSet::Kind::Empty);
}
