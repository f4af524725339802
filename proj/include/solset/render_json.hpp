#pragma once

#include <string>

#include <json.hpp>

#include "solset/rewrite.hpp"
#include "solset/solver.hpp"

namespace solset {

namespace detail {

// Rationals always cross the boundary as exact decimal strings; numerator
// and denominator separately, never a float.
inline nlohmann::ordered_json json_rational(const Rational& q) {
    return {{"num", q.get_num().get_str()}, {"den", q.get_den().get_str()}};
}

inline nlohmann::ordered_json json_interval(const DyadicInterval& iv) {
    return {{"lo", json_rational(iv.lo_q())}, {"hi", json_rational(iv.hi_q())}};
}

inline nlohmann::ordered_json json_rep(const SolutionRep& r) {
    switch (r.kind()) {
        case SolutionRep::Kind::ExactRational:
            return {{"rep", "rational"}, {"value", json_rational(r.rational_value())}};
        case SolutionRep::Kind::QuadraticSurd: {
            const SurdValue& s = r.surd_value();
            return {{"rep", "quadratic_surd"},
                    {"expr", to_string(r)},
                    {"a", json_rational(s.a)},
                    {"b", json_rational(s.b)},
                    {"d", s.d.get_str()}};
        }
        case SolutionRep::Kind::ClosedForm:
            return {{"rep", "closed_form"}, {"expr", to_string(r.closed_form_expr())}};
        case SolutionRep::Kind::CertifiedRoot:
            return {{"rep", "certified_root"},
                    {"about", to_string(r)},
                    {"enclosure", json_interval(r.enclosure(256))}};
    }
    return {};
}

}  // namespace detail

inline std::string render_json(const SolutionSet& s) {
    nlohmann::ordered_json j;
    switch (s.kind()) {
        case SolutionSet::Kind::Empty:
            j["kind"] = "empty";
            j["solutions"] = nlohmann::ordered_json::array();
            break;
        case SolutionSet::Kind::Identity:
            j["kind"] = "identity";
            break;
        case SolutionSet::Kind::Unsolved:
            j["kind"] = "unsolved";
            j["reason"] = s.reason();
            break;
        case SolutionSet::Kind::Finite: {
            j["kind"] = "finite";
            auto arr = nlohmann::ordered_json::array();
            for (const SolutionRep& r : s.solutions()) arr.push_back(detail::json_rep(r));
            j["solutions"] = std::move(arr);
            break;
        }
    }
    return j.dump();
}

inline std::string render_json(const Trace& t) {
    nlohmann::ordered_json j;
    auto steps = nlohmann::ordered_json::array();
    for (const Step& s : t.steps()) {
        auto conds = nlohmann::ordered_json::array();
        for (const SideCondition& c : s.side_conditions) conds.push_back(to_string(c));
        steps.push_back({{"rule", to_string(s.rule)},
                         {"relation", to_string(s.relation)},
                         {"side_conditions", std::move(conds)},
                         {"equation", to_string(s.output)}});
    }
    j["steps"] = std::move(steps);
    j["overall_relation"] = to_string(t.overall());
    return j.dump();
}

}  // namespace solset
