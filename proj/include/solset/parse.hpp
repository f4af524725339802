#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "solset/equation.hpp"

namespace solset {

struct SourceSpan {
    size_t start = 0, end = 0;
};

class SyntaxError : public std::runtime_error {
    SourceSpan span_;

public:
    SyntaxError(const std::string& msg, SourceSpan sp)
        : std::runtime_error(msg + " at byte " + std::to_string(sp.start)), span_(sp) {}
    SourceSpan span() const { return span_; }
};

struct MultipleEquals : SyntaxError {
    explicit MultipleEquals(SourceSpan sp) : SyntaxError("more than one '=' in equation", sp) {}
};
struct EmptySide : SyntaxError {
    EmptySide(const char* which, SourceSpan sp)
        : SyntaxError(std::string("empty ") + which + "-hand side of equation", sp) {}
};

namespace detail {

enum class Tok {
    Number,
    Ident,
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    LBracket,
    RBracket,
    Comma,
    Equals,
    End
};

struct Token {
    Tok kind;
    std::string text;
    SourceSpan span;
};

inline const char* token_name(Tok t) {
    switch (t) {
        case Tok::Number: return "number";
        case Tok::Ident: return "name";
        case Tok::Plus: return "'+'";
        case Tok::Minus: return "'-'";
        case Tok::Star: return "'*'";
        case Tok::Slash: return "'/'";
        case Tok::Caret: return "'^'";
        case Tok::LParen: return "'('";
        case Tok::RParen: return "')'";
        case Tok::LBracket: return "'['";
        case Tok::RBracket: return "']'";
        case Tok::Comma: return "','";
        case Tok::Equals: return "'='";
        case Tok::End: return "end of input";
    }
    return "?";
}

inline std::vector<Token> lex(std::string_view src) {
    std::vector<Token> out;
    size_t pos = 0;
    auto is_space = [](char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r'; };
    while (pos < src.size()) {
        if (is_space(src[pos])) {
            ++pos;
            continue;
        }
        size_t start = pos;
        char c = src[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            if (pos + 1 < src.size() && src[pos] == '.' &&
                std::isdigit(static_cast<unsigned char>(src[pos + 1]))) {
                ++pos;
                while (pos < src.size() && std::isdigit(static_cast<unsigned char>(src[pos]))) ++pos;
            }
            out.push_back({Tok::Number, std::string(src.substr(start, pos - start)), {start, pos}});
            continue;
        }
        if (std::isalpha(static_cast<unsigned char>(c))) {
            while (pos < src.size() && std::isalpha(static_cast<unsigned char>(src[pos]))) ++pos;
            out.push_back({Tok::Ident, std::string(src.substr(start, pos - start)), {start, pos}});
            continue;
        }
        Tok k;
        switch (c) {
            case '+': k = Tok::Plus; break;
            case '-': k = Tok::Minus; break;
            case '*': k = Tok::Star; break;
            case '/': k = Tok::Slash; break;
            case '^': k = Tok::Caret; break;
            case '(': k = Tok::LParen; break;
            case ')': k = Tok::RParen; break;
            case '[': k = Tok::LBracket; break;
            case ']': k = Tok::RBracket; break;
            case ',': k = Tok::Comma; break;
            case '=': k = Tok::Equals; break;
            default:
                throw SyntaxError(std::string("unexpected character '") + c + "'",
                                  {start, start + 1});
        }
        ++pos;
        out.push_back({k, std::string(1, c), {start, pos}});
    }
    out.push_back({Tok::End, "", {src.size(), src.size()}});
    return out;
}

class ExprParser {
    std::vector<Token> toks_;
    size_t i_ = 0;

public:
    explicit ExprParser(std::string_view src) : toks_(lex(src)) {}

    const Token& peek() const { return toks_[i_]; }
    Token advance() { return toks_[i_++]; }
    bool at(Tok k) const { return peek().kind == k; }

    Token expect(Tok k, const char* what) {
        if (!at(k))
            throw SyntaxError(std::string("expected ") + what + ", found " +
                                  token_name(peek().kind),
                              peek().span);
        return advance();
    }

    void expect_end() {
        if (!at(Tok::End))
            throw SyntaxError(std::string("unexpected ") + token_name(peek().kind), peek().span);
    }

    long long signed_intlit(const char* what) {
        bool negate = false;
        if (at(Tok::Minus)) {
            advance();
            negate = true;
        }
        Token t = expect(Tok::Number, what);
        if (t.text.find('.') != std::string::npos)
            throw SyntaxError(std::string("expected ") + what + ", found decimal literal", t.span);
        try {
            long long v = std::stoll(t.text);
            return negate ? -v : v;
        } catch (const std::out_of_range&) {
            throw SyntaxError(std::string(what) + " out of range", t.span);
        }
    }

    Expr expression() {
        Expr lhs = term();
        while (at(Tok::Plus) || at(Tok::Minus)) {
            bool add = advance().kind == Tok::Plus;
            Expr rhs = term();
            lhs = add ? Expr::add(lhs, rhs) : Expr::sub(lhs, rhs);
        }
        return lhs;
    }

    Expr term() {
        Expr lhs = factor();
        while (at(Tok::Star) || at(Tok::Slash)) {
            bool mul = advance().kind == Tok::Star;
            Expr rhs = factor();
            if (mul) {
                lhs = Expr::mul(lhs, rhs);
            } else if (lhs.is_rational() && rhs.is_rational() && !rhs.is_zero()) {
                lhs = Expr::rational(lhs.rational_value() / rhs.rational_value());
            } else {
                lhs = Expr::div(lhs, rhs);
            }
        }
        return lhs;
    }

    // The exponent binds tighter than a leading minus: -x^2 negates x^2.
    Expr factor() {
        if (at(Tok::Minus)) {
            advance();
            Expr inner = factor();
            if (inner.is_rational()) return Expr::rational(-inner.rational_value());
            return Expr::neg(inner);
        }
        Expr base = atom();
        if (at(Tok::Caret)) {
            advance();
            long long k = signed_intlit("integer exponent");
            return Expr::intpow(base, k);
        }
        return base;
    }

    Expr atom() {
        const Token& t = peek();
        switch (t.kind) {
            case Tok::Number: {
                Token n = advance();
                if (n.text.find('.') != std::string::npos) {
                    auto q = rational_from_decimal(n.text);
                    if (!q) throw SyntaxError("malformed decimal literal", n.span);
                    return Expr::rational(*q);
                }
                return Expr::rational(Rational(Int(n.text)));
            }
            case Tok::LParen: {
                advance();
                Expr e = expression();
                expect(Tok::RParen, "')'");
                return e;
            }
            case Tok::Ident: {
                Token id = advance();
                const std::string& s = id.text;
                if (s == "x") return Expr::var();
                if (s == "e") return Expr::const_e();
                if (s == "pi") return Expr::const_pi();
                if (s == "sqrt" || s == "exp" || s == "ln" || s == "sin" || s == "cos") {
                    expect(Tok::LParen, "'('");
                    Expr arg = expression();
                    expect(Tok::RParen, "')'");
                    if (s == "sqrt") return Expr::sqrt(arg);
                    if (s == "exp") return Expr::exp(arg);
                    if (s == "ln") return Expr::ln(arg);
                    if (s == "sin") return Expr::sin(arg);
                    return Expr::cos(arg);
                }
                if (s == "root") {
                    expect(Tok::LParen, "'('");
                    SourceSpan nspan = peek().span;
                    long long n = signed_intlit("root index");
                    if (n < 2) throw SyntaxError("root index must be at least 2", nspan);
                    expect(Tok::Comma, "','");
                    Expr arg = expression();
                    expect(Tok::RParen, "')'");
                    return Expr::root(n, arg);
                }
                if (s == "W") {
                    expect(Tok::LParen, "'('");
                    SourceSpan bspan = peek().span;
                    long long b = signed_intlit("branch index");
                    if (b != 0 && b != -1)
                        throw SyntaxError("Lambert branch must be 0 or -1", bspan);
                    expect(Tok::Comma, "','");
                    Expr arg = expression();
                    expect(Tok::RParen, "')'");
                    return Expr::lambert_w(static_cast<int>(b), arg);
                }
                throw SyntaxError("unknown name '" + s + "'", id.span);
            }
            default:
                throw SyntaxError(std::string("expected expression, found ") +
                                      token_name(t.kind),
                                  t.span);
        }
    }

    /// Domain endpoint: optional minus, then `inf` or a rational literal
    /// (integer, decimal, or integer fraction).
    std::optional<Rational> domain_endpoint(bool low) {
        bool negate = false;
        if (at(Tok::Minus)) {
            advance();
            negate = true;
        }
        if (at(Tok::Ident) && peek().text == "inf") {
            if (low && !negate)
                throw SyntaxError("lower endpoint must be -inf or finite", peek().span);
            if (!low && negate)
                throw SyntaxError("upper endpoint must be inf or finite", peek().span);
            advance();
            return std::nullopt;
        }
        Token n = expect(Tok::Number, "domain endpoint");
        Rational v;
        if (n.text.find('.') != std::string::npos) {
            auto q = rational_from_decimal(n.text);
            if (!q) throw SyntaxError("malformed decimal literal", n.span);
            v = *q;
        } else {
            v = Rational(Int(n.text));
            if (at(Tok::Slash)) {
                advance();
                Token d = expect(Tok::Number, "denominator");
                if (d.text.find('.') != std::string::npos)
                    throw SyntaxError("expected integer denominator", d.span);
                Int den(d.text);
                if (den == 0) throw SyntaxError("zero denominator", d.span);
                v = make_rational(Int(n.text), den);
            }
        }
        return negate ? Rational(-v) : v;
    }

    RealInterval domain_interval() {
        bool lo_closed;
        SourceSpan open_span = peek().span;
        if (at(Tok::LBracket)) {
            lo_closed = true;
        } else if (at(Tok::LParen)) {
            lo_closed = false;
        } else {
            throw SyntaxError(std::string("expected '[' or '(', found ") +
                                  token_name(peek().kind),
                              peek().span);
        }
        advance();
        auto lo = domain_endpoint(true);
        expect(Tok::Comma, "','");
        auto hi = domain_endpoint(false);
        bool hi_closed;
        SourceSpan close_span = peek().span;
        if (at(Tok::RBracket)) {
            hi_closed = true;
        } else if (at(Tok::RParen)) {
            hi_closed = false;
        } else {
            throw SyntaxError(std::string("expected ']' or ')', found ") +
                                  token_name(peek().kind),
                              peek().span);
        }
        advance();
        if (!lo && lo_closed)
            throw SyntaxError("infinite endpoint must be open", open_span);
        if (!hi && hi_closed)
            throw SyntaxError("infinite endpoint must be open", close_span);
        RealInterval iv{lo, hi, lo_closed, hi_closed};
        if (!iv.valid()) throw SyntaxError("interval bounds describe an empty set", close_span);
        return iv;
    }
};

}  // namespace detail

inline Expr parse_expression(std::string_view text) {
    detail::ExprParser p(text);
    Expr e = p.expression();
    p.expect_end();
    return e;
}

inline Domain parse_domain(std::string_view text) {
    detail::ExprParser p(text);
    std::vector<RealInterval> parts;
    parts.push_back(p.domain_interval());
    while (p.at(detail::Tok::Ident) && p.peek().text == "U") {
        p.advance();
        parts.push_back(p.domain_interval());
    }
    p.expect_end();
    return Domain(std::move(parts), false);
}

inline Equation parse_equation(std::string_view text,
                               std::optional<std::string_view> domain_text = std::nullopt) {
    detail::ExprParser p(text);
    if (p.at(detail::Tok::Equals)) throw EmptySide("left", p.peek().span);
    Expr lhs = p.expression();
    p.expect(detail::Tok::Equals, "'='");
    if (p.at(detail::Tok::End)) throw EmptySide("right", p.peek().span);
    if (p.at(detail::Tok::Equals)) throw EmptySide("right", p.peek().span);
    Expr rhs = p.expression();
    if (p.at(detail::Tok::Equals)) throw MultipleEquals(p.peek().span);
    p.expect_end();
    if (domain_text) return Equation(lhs, rhs, parse_domain(*domain_text));
    return Equation(lhs, rhs);
}

}  // namespace solset
