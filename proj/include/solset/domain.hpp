#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include "solset/rational.hpp"

namespace solset {

/// One interval of the real line. An absent endpoint means -inf (lo) or
/// +inf (hi); infinite endpoints are always open.
struct RealInterval {
    std::optional<Rational> lo;
    std::optional<Rational> hi;
    bool lo_closed = false;
    bool hi_closed = false;

    static RealInterval all() { return {}; }
    static RealInterval point(const Rational& v) { return {v, v, true, true}; }
    static RealInterval at_least(const Rational& v, bool closed = true) {
        return {v, std::nullopt, closed, false};
    }
    static RealInterval at_most(const Rational& v, bool closed = true) {
        return {std::nullopt, v, false, closed};
    }
    static RealInterval between(const Rational& a, const Rational& b, bool a_closed = true,
                                bool b_closed = true) {
        return {a, b, a_closed, b_closed};
    }

    bool valid() const {
        if (lo && hi) {
            if (*lo > *hi) return false;
            if (*lo == *hi && !(lo_closed && hi_closed)) return false;
        }
        return true;
    }
    bool is_point() const { return lo && hi && *lo == *hi; }

    bool contains(const Rational& x) const {
        if (lo) {
            if (x < *lo) return false;
            if (x == *lo && !lo_closed) return false;
        }
        if (hi) {
            if (x > *hi) return false;
            if (x == *hi && !hi_closed) return false;
        }
        return true;
    }
};

inline std::optional<RealInterval> intersect(const RealInterval& a, const RealInterval& b) {
    RealInterval r;
    if (!a.lo) {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    } else if (!b.lo) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    } else if (*a.lo > *b.lo) {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed;
    } else if (*b.lo > *a.lo) {
        r.lo = b.lo;
        r.lo_closed = b.lo_closed;
    } else {
        r.lo = a.lo;
        r.lo_closed = a.lo_closed && b.lo_closed;
    }
    if (!a.hi) {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    } else if (!b.hi) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    } else if (*a.hi < *b.hi) {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed;
    } else if (*b.hi < *a.hi) {
        r.hi = b.hi;
        r.hi_closed = b.hi_closed;
    } else {
        r.hi = a.hi;
        r.hi_closed = a.hi_closed && b.hi_closed;
    }
    if (!r.valid()) return std::nullopt;
    return r;
}

/// A finite union of disjoint, sorted, maximally merged intervals.
/// `approximate` marks domains where some constraint could only be enclosed
/// conservatively (the stored set is then a subset of the true domain).
class Domain {
public:
    Domain() = default;
    explicit Domain(RealInterval iv, bool approx = false) : approximate_(approx) {
        if (iv.valid()) parts_.push_back(iv);
    }
    Domain(std::vector<RealInterval> parts, bool approx) : approximate_(approx) {
        normalize(parts);
        parts_ = std::move(parts);
    }

    static Domain all() { return Domain(RealInterval::all()); }
    static Domain empty() { return Domain(); }

    const std::vector<RealInterval>& parts() const { return parts_; }
    bool is_empty() const { return parts_.empty(); }
    bool is_all() const {
        return parts_.size() == 1 && !parts_[0].lo && !parts_[0].hi;
    }
    bool approximate() const { return approximate_; }
    void set_approximate(bool v = true) { approximate_ = v; }

    bool contains(const Rational& x) const {
        for (const auto& p : parts_)
            if (p.contains(x)) return true;
        return false;
    }

    bool single_interval() const { return parts_.size() == 1; }

    friend Domain intersect(const Domain& a, const Domain& b) {
        std::vector<RealInterval> out;
        for (const auto& p : a.parts_)
            for (const auto& q : b.parts_)
                if (auto r = intersect(p, q)) out.push_back(*r);
        return Domain(std::move(out), a.approximate_ || b.approximate_);
    }

    friend Domain unite(const Domain& a, const Domain& b) {
        std::vector<RealInterval> out = a.parts_;
        out.insert(out.end(), b.parts_.begin(), b.parts_.end());
        return Domain(std::move(out), a.approximate_ || b.approximate_);
    }

    /// Removes a single point, splitting the interval that contains it.
    Domain without_point(const Rational& x) const {
        std::vector<RealInterval> out;
        for (const auto& p : parts_) {
            if (!p.contains(x)) {
                out.push_back(p);
                continue;
            }
            RealInterval left{p.lo, x, p.lo_closed, false};
            RealInterval right{x, p.hi, false, p.hi_closed};
            if (left.valid()) out.push_back(left);
            if (right.valid()) out.push_back(right);
        }
        return Domain(std::move(out), approximate_);
    }

    /// Removes an open interval (a, b).
    Domain without_open_interval(const Rational& a, const Rational& b) const {
        std::vector<RealInterval> out;
        for (const auto& p : parts_) {
            RealInterval left{p.lo, a, p.lo_closed, true};
            RealInterval right{b, p.hi, true, p.hi_closed};
            if (auto l = intersect(p, left)) out.push_back(*l);
            if (auto r = intersect(p, right)) out.push_back(*r);
        }
        return Domain(std::move(out), approximate_);
    }

    bool operator==(const Domain& o) const {
        if (parts_.size() != o.parts_.size()) return false;
        for (size_t i = 0; i < parts_.size(); ++i) {
            const auto &a = parts_[i], &b = o.parts_[i];
            if (a.lo != b.lo || a.hi != b.hi) return false;
            if (a.lo && a.lo_closed != b.lo_closed) return false;
            if (a.hi && a.hi_closed != b.hi_closed) return false;
        }
        return true;
    }

private:
    static void normalize(std::vector<RealInterval>& parts) {
        std::erase_if(parts, [](const RealInterval& p) { return !p.valid(); });
        std::sort(parts.begin(), parts.end(), [](const RealInterval& a, const RealInterval& b) {
            if (!a.lo) return static_cast<bool>(b.lo);
            if (!b.lo) return false;
            if (*a.lo != *b.lo) return *a.lo < *b.lo;
            return a.lo_closed && !b.lo_closed;
        });
        std::vector<RealInterval> merged;
        for (auto& p : parts) {
            if (merged.empty()) {
                merged.push_back(p);
                continue;
            }
            RealInterval& last = merged.back();
            bool overlaps;
            if (!last.hi || !p.lo) {
                overlaps = true;
            } else if (*p.lo < *last.hi) {
                overlaps = true;
            } else if (*p.lo == *last.hi) {
                overlaps = last.hi_closed || p.lo_closed;
            } else {
                overlaps = false;
            }
            if (!overlaps) {
                merged.push_back(p);
                continue;
            }
            if (!p.hi) {
                last.hi = std::nullopt;
                last.hi_closed = false;
            } else if (last.hi) {
                if (*p.hi > *last.hi) {
                    last.hi = p.hi;
                    last.hi_closed = p.hi_closed;
                } else if (*p.hi == *last.hi) {
                    last.hi_closed = last.hi_closed || p.hi_closed;
                }
            }
        }
        parts = std::move(merged);
    }

    std::vector<RealInterval> parts_;
    bool approximate_ = false;
};

inline std::string to_string(const RealInterval& iv) {
    std::string s = iv.lo ? (iv.lo_closed ? "[" : "(") + to_string(*iv.lo) : std::string("(-inf");
    s += ",";
    s += iv.hi ? to_string(*iv.hi) + (iv.hi_closed ? "]" : ")") : std::string("inf)");
    return s;
}

inline std::string to_string(const Domain& d) {
    if (d.is_empty()) return "{}";
    std::string s;
    for (size_t i = 0; i < d.parts().size(); ++i) {
        if (i) s += " U ";
        s += to_string(d.parts()[i]);
    }
    return s;
}

}  // namespace solset
