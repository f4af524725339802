#pragma once

#include <algorithm>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "solset/algclass.hpp"
#include "solset/parse.hpp"
#include "solset/render_json.hpp"
#include "solset/solver.hpp"

namespace solset {

/// One finished invocation: exit code plus the two output streams.
/// Identical argument vectors produce identical results.
struct CliResult {
    int code = 0;
    std::string out;
    std::string err;
};

namespace cli_detail {

/// Decimal rendering of an enclosure midpoint. The digit count is derived
/// from the width, capped at max_digits, so every printed digit is backed
/// by the enclosure.
inline std::string approx_digits(const DyadicInterval& enc, int max_digits) {
    Rational mid = enc.midpoint_q();
    Rational w = enc.width_exact();
    int digits = max_digits;
    if (sgn(w) > 0) {
        Rational m = abs(mid);
        if (m <= w) {
            digits = 1;
        } else {
            Rational ratio = m / w;
            int d = 0;
            while (ratio >= 10 && d < max_digits) {
                ratio = ratio / 10;
                ++d;
            }
            digits = std::max(1, d);
        }
    }
    mpfr_t v;
    mpfr_init2(v, 320);
    mpfr_set_q(v, mid.get_mpq_t(), MPFR_RNDN);
    char* s = nullptr;
    mpfr_asprintf(&s, "%.*Rg", digits, v);
    std::string text(s);
    mpfr_free_str(s);
    mpfr_clear(v);
    return text;
}

inline std::string rep_display(const SolutionRep& r, mpfr_prec_t prec, int max_digits) {
    if (r.kind() == SolutionRep::Kind::ExactRational) return to_string(r.rational_value());
    return to_string(r) + " ≈ " + approx_digits(r.enclosure(prec), max_digits) +
           "…(certified ±ulp)";
}

inline std::string trace_text(const Trace& t) {
    if (t.empty()) return {};
    std::string out = "trace:\n";
    out += "  start: " + to_string(t.steps().front().input) + "\n";
    for (const Step& s : t.steps()) {
        out += "  " + std::string(to_string(s.rule)) + " [" + to_string(s.relation);
        for (const SideCondition& c : s.side_conditions) out += "; side: " + to_string(c);
        out += "] -> " + to_string(s.output) + "\n";
    }
    out += "  overall: " + std::string(to_string(t.overall())) + "\n";
    return out;
}

inline std::string solve_text(const SolveResult& r, bool want_trace, mpfr_prec_t prec) {
    std::string out;
    if ((want_trace || r.set.kind() == SolutionSet::Kind::Unsolved) && !r.trace.empty())
        out += trace_text(r.trace);
    switch (r.set.kind()) {
        case SolutionSet::Kind::Identity:
            out += "identity: holds for every x in the domain\n";
            break;
        case SolutionSet::Kind::Empty:
            out += "no solutions\n";
            break;
        case SolutionSet::Kind::Unsolved:
            out += "unsolved: " + r.set.reason() + "\n";
            break;
        case SolutionSet::Kind::Finite: {
            size_t n = r.set.solutions().size();
            std::string line = std::to_string(n) + (n == 1 ? " solution: " : " solutions: ");
            for (size_t i = 0; i < n; ++i) {
                if (i) line += ", ";
                line += rep_display(r.set.solutions()[i], prec, 10);
            }
            std::vector<std::string> rejected, undecided;
            for (const CandidateReport& c : r.candidates) {
                if (c.outcome == VerifyOutcome::Rejected)
                    rejected.push_back(to_string(c.candidate) + " (" + c.detail + ")");
                else if (c.outcome == VerifyOutcome::Inconclusive)
                    undecided.push_back(to_string(c.candidate) + " (" + c.detail + ")");
            }
            if (!rejected.empty()) {
                line += rejected.size() == 1 ? "; rejected candidate: " : "; rejected candidates: ";
                for (size_t i = 0; i < rejected.size(); ++i)
                    line += (i ? ", " : "") + rejected[i];
            }
            if (!undecided.empty()) {
                line += undecided.size() == 1 ? "; inconclusive candidate: "
                                              : "; inconclusive candidates: ";
                for (size_t i = 0; i < undecided.size(); ++i)
                    line += (i ? ", " : "") + undecided[i];
            }
            out += line + "\n";
            break;
        }
    }
    for (const std::string& n : r.notes) out += "note: " + n + "\n";
    return out;
}

/// Exact display of an isolated root: the rational value when the root is
/// rational, otherwise an isolating interval narrowed for reading.
inline std::string root_display(IsolatedRoot r) {
    if (!r.exact && r.sqf.degree() == 1) r.exact = -r.sqf.coeff(0) / r.sqf.coeff(1);
    while (!r.exact && r.width() > Rational(1, 16)) r.refine_once();
    if (r.exact) return to_string(*r.exact);
    return "(" + to_string(r.lo) + ", " + to_string(r.hi) + ")";
}

inline std::string caret_diagnostic(const std::string& text, const SyntaxError& e) {
    std::string out = "error: " + std::string(e.what()) + "\n";
    out += "  " + text + "\n  ";
    size_t start = std::min(e.span().start, text.size());
    size_t end = std::max(e.span().end, start + 1);
    out += std::string(start, ' ');
    out += std::string(std::min(end, text.size() + 1) - start, '^');
    out += "\n";
    return out;
}

struct InputError : std::runtime_error {
    // input text is wrong for the subcommand even though it parses
    using std::runtime_error::runtime_error;
};

}  // namespace cli_detail

/// Front end entry point: argv without the program name. All computation
/// is deterministic; no global state is touched.
inline CliResult run(const std::vector<std::string>& args) {
    CLI::App app{"equation solving over explicit solution sets"};
    app.name("solset");
    app.require_subcommand(1);

    std::string eq_text, expr_text, domain_text, candidate_text;
    long precision = 256;
    long count = 0;
    long max_steps = 64;
    bool want_trace = false, want_json = false;

    CLI::App* c_solve = app.add_subcommand("solve", "solve an equation, reporting the trace");
    c_solve->add_option("equation", eq_text, "equation text, e.g. \"x^2 = 4\"")->required();
    c_solve->add_option("--domain", domain_text, "domain, e.g. \"[0,inf)\"");
    c_solve->add_option("--precision", precision, "working precision in bits")
        ->check(CLI::Range(8l, 1l << 20));
    c_solve->add_option("--max-steps", max_steps, "bound on rewrite rounds")
        ->check(CLI::Range(1l, 4096l));
    c_solve->add_flag("--trace", want_trace, "print the rewrite trace");
    c_solve->add_flag("--json", want_json, "machine-readable output");

    CLI::App* c_classify = app.add_subcommand("classify", "algebraic or transcendental");
    c_classify->add_option("expression", expr_text, "expression in x")->required();
    c_classify->add_option("--domain", domain_text, "domain restriction");

    CLI::App* c_isolate = app.add_subcommand("isolate", "isolate the real roots of a polynomial");
    c_isolate->add_option("polynomial", expr_text, "polynomial in x")->required();

    CLI::App* c_enum =
        app.add_subcommand("enumerate-algebraic", "list real algebraic numbers by height");
    c_enum->add_option("--count", count, "how many numbers")
        ->required()
        ->check(CLI::Range(1l, 100000l));

    CLI::App* c_check = app.add_subcommand("check", "verify one candidate against an equation");
    c_check->add_option("equation", eq_text, "equation text")->required();
    c_check->add_option("--candidate", candidate_text, "constant candidate value")->required();

    CliResult res;
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(std::move(reversed));
    } catch (const CLI::CallForHelp& e) {
        res.out = app.help();
        return res;
    } catch (const CLI::ParseError& e) {
        res.err = std::string("error: ") + e.what() + "\n";
        res.code = 3;
        return res;
    }

    const std::string* parsing = nullptr;
    try {
        if (app.got_subcommand(c_solve)) {
            parsing = &eq_text;
            Equation eq = parse_equation(
                eq_text, domain_text.empty() ? std::nullopt
                                             : std::optional<std::string_view>(domain_text));
            if (!domain_text.empty()) parsing = &domain_text;
            parsing = nullptr;
            SolverConfig cfg;
            cfg.precision_start = precision;
            cfg.precision_max = std::max<mpfr_prec_t>(4 * precision, 4096);
            cfg.max_steps = static_cast<int>(max_steps);
            SolveResult r = solve(eq, cfg);
            if (want_json) {
                res.out = render_json(r.set) + "\n";
                if (want_trace) res.out += render_json(r.trace) + "\n";
            } else {
                res.out = cli_detail::solve_text(r, want_trace, precision);
            }
        } else if (app.got_subcommand(c_classify)) {
            parsing = &expr_text;
            Expr e = parse_expression(expr_text);
            parsing = &domain_text;
            Domain d = domain_text.empty() ? natural_domain(e) : parse_domain(domain_text);
            parsing = nullptr;
            AlgebraicityCertificate cert = classify(e, d);
            if (cert.is_algebraic())
                res.out = "algebraic; annihilator: " + to_string(cert.annihilator()) + "\n";
            else if (cert.is_transcendental())
                res.out = std::string("transcendental; rule ") + rule_tag(cert.reason().rule) +
                          ": " + cert.reason().premise + "\n";
            else
                res.out = "unknown\n";
        } else if (app.got_subcommand(c_isolate)) {
            parsing = &expr_text;
            Expr e = parse_expression(expr_text);
            parsing = nullptr;
            std::optional<UniPoly> p = from_expr(e);
            if (!p || p->is_zero())
                throw cli_detail::InputError(
                    "input is not a nonzero polynomial with rational coefficients");
            std::vector<IsolatedRoot> roots = sturm_isolate(p->primitive());
            res.out = std::to_string(roots.size()) + " real root" +
                      (roots.size() == 1 ? "" : "s") + " of " + to_string(to_expr(*p)) + "\n";
            for (size_t i = 0; i < roots.size(); ++i)
                res.out += "  root " + std::to_string(i + 1) + ": " +
                           cli_detail::root_display(roots[i]) + "\n";
        } else if (app.got_subcommand(c_enum)) {
            for (const auto& [poly, root] : enumerate_algebraic(count))
                res.out += cli_detail::root_display(root) + "  [" + to_string(to_expr(poly)) +
                           "]\n";
        } else if (app.got_subcommand(c_check)) {
            parsing = &eq_text;
            Equation eq = parse_equation(eq_text);
            parsing = &candidate_text;
            Expr cand = parse_expression(candidate_text);
            parsing = nullptr;
            if (contains_var(cand))
                throw cli_detail::InputError("candidate must be a constant expression");
            Expr folded = fold(cand);
            SolutionRep rep = folded.is_rational()
                                  ? SolutionRep::exact(folded.rational_value())
                                  : SolutionRep::closed_form(folded);
            Trace none;
            VerifyReport vr = verify_candidate(eq, rep, none);
            res.out = std::string(to_string(vr.outcome)) + ": " + vr.detail + "\n";
        }
    } catch (const SyntaxError& e) {
        res.err = parsing ? cli_detail::caret_diagnostic(*parsing, e)
                          : "error: " + std::string(e.what()) + "\n";
        res.code = 2;
        return res;
    } catch (const cli_detail::InputError& e) {
        res.err = std::string("error: ") + e.what() + "\n";
        res.code = 2;
        return res;
    } catch (const std::exception& e) {
        res.err = std::string("error: ") + e.what() + "\n";
        res.code = 1;
        return res;
    }
    return res;
}

inline int run_main(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    CliResult r = run(args);
    if (!r.out.empty()) std::fputs(r.out.c_str(), stdout);
    if (!r.err.empty()) std::fputs(r.err.c_str(), stderr);
    return r.code;
}

}  // namespace solset
