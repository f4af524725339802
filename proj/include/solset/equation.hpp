#pragma once

#include <string>
#include <utility>

#include "solset/domain.hpp"
#include "solset/expr.hpp"
#include "solset/natural_domain.hpp"

namespace solset {

/// Two sides and the set of x the equation quantifies over. The stored
/// domain is always a subset of both sides' natural domains; construction
/// intersects the requested domain down to honor that.
class Equation {
    Expr lhs_, rhs_;
    Domain domain_;

public:
    Equation(Expr lhs, Expr rhs)
        : lhs_(std::move(lhs)),
          rhs_(std::move(rhs)),
          domain_(intersect(natural_domain(lhs_), natural_domain(rhs_))) {}

    Equation(Expr lhs, Expr rhs, const Domain& requested)
        : lhs_(std::move(lhs)), rhs_(std::move(rhs)) {
        domain_ = intersect(requested, intersect(natural_domain(lhs_), natural_domain(rhs_)));
    }

    const Expr& lhs() const { return lhs_; }
    const Expr& rhs() const { return rhs_; }
    const Domain& domain() const { return domain_; }

    /// Same sides over an explicitly narrowed domain.
    Equation restricted(const Domain& d) const { return Equation(lhs_, rhs_, d); }

    friend bool operator==(const Equation& a, const Equation& b) {
        return a.lhs_ == b.lhs_ && a.rhs_ == b.rhs_ && a.domain_ == b.domain_;
    }
};

inline std::string to_string(const Equation& eq) {
    return to_string(eq.lhs()) + " = " + to_string(eq.rhs());
}

}  // namespace solset
