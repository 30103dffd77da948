#pragma once

#include <cctype>
#include <cstdint>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "tubtilt/error.hpp"
#include "tubtilt/excalc.hpp"
#include "tubtilt/tilting.hpp"

namespace tubtilt {

/// Syntax error with a 1-based source position.
class ParseError : public Error {
public:
    ParseError(int line, int column, const std::string& what)
        : Error(ErrorCode::SyntaxError, std::to_string(line) + ":" + std::to_string(column) + ": " + what), line_(line), column_(column) {}

    int line() const noexcept { return line_; }
    int column() const noexcept { return column_; }

private:
    int line_;
    int column_;
};

/// One term of an L(p) expression; index −1 stands for c.
struct LTerm {
    std::int64_t coeff = 1;
    int index = -1;
};

struct ObjectExpr {
    enum class Kind { Line, Chart, Class, Tcan, Mu };
    Kind kind = Kind::Line;
    int line = 1, column = 1;
    std::vector<LTerm> terms; // Line, and Tcan when twisted
    bool twisted = false;
    Slope slope;
    int orbit = 0, socle = 0, len = 1;
    IVec cls;
    std::shared_ptr<ObjectExpr> inner; // Mu
    int index = 0;

    bool is_tilting() const noexcept { return kind == Kind::Tcan || kind == Kind::Mu; }
};

namespace detail {

struct Token {
    enum class Kind { Ident, Int, Punct, End };
    Kind kind;
    std::string text;
    int line, column;
    std::size_t offset;
};

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            skip_space();
            const int l = line_, c = col_;
            const std::size_t at = pos_;
            if (pos_ >= src_.size()) {
                out.push_back({Token::Kind::End, "", l, c, at});
                return out;
            }
            const char ch = src_[pos_];
            if (std::isalpha(static_cast<unsigned char>(ch))) {
                std::string s;
                while (pos_ < src_.size() && std::isalpha(static_cast<unsigned char>(src_[pos_]))) s += advance();
                out.push_back({Token::Kind::Ident, s, l, c, at});
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::string s;
                while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) s += advance();
                if (s.size() > 15) throw ParseError(l, c, "integer literal too large");
                out.push_back({Token::Kind::Int, s, l, c, at});
            } else if (std::string_view("()[],;=+-*/").find(ch) != std::string_view::npos) {
                out.push_back({Token::Kind::Punct, std::string(1, advance()), l, c, at});
            } else {
                throw ParseError(l, c, std::string("unexpected character '") + ch + "'");
            }
        }
    }

private:
    char advance() {
        const char ch = src_[pos_++];
        if (ch == '\n') {
            ++line_;
            col_ = 1;
        } else {
            ++col_;
        }
        return ch;
    }
    void skip_space() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) advance();
    }

    std::string_view src_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ObjectExpr parse_top() {
        ObjectExpr e = parse_expr();
        if (peek().kind != Token::Kind::End) error_at(peek(), "unexpected trailing input '" + peek().text + "'");
        return e;
    }

private:
    const Token& peek() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }
    bool at_punct(char c) const { return peek().kind == Token::Kind::Punct && peek().text[0] == c; }

    [[noreturn]] void error_at(const Token& t, const std::string& what) const { throw ParseError(t.line, t.column, what); }

    std::string describe(const Token& t) const { return t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'"; }

    const Token& expect_punct(char c) {
        if (!at_punct(c)) error_at(peek(), std::string("expected '") + c + "', found " + describe(peek()));
        return next();
    }

    void expect_ident(std::string_view name) {
        if (peek().kind != Token::Kind::Ident || peek().text != name) error_at(peek(), "expected '" + std::string(name) + "', found " + describe(peek()));
        next();
    }

    std::int64_t expect_int() {
        if (peek().kind != Token::Kind::Int) error_at(peek(), "expected an integer, found " + describe(peek()));
        return std::stoll(next().text);
    }

    std::int64_t signed_int() {
        const bool neg = at_punct('-');
        if (neg) next();
        const std::int64_t v = expect_int();
        return neg ? -v : v;
    }

    ObjectExpr parse_expr() {
        const Token& t = peek();
        if (t.kind != Token::Kind::Ident) error_at(t, "expected an expression, found " + describe(t));
        ObjectExpr e;
        e.line = t.line;
        e.column = t.column;
        if (t.text == "L") {
            next();
            e.kind = ObjectExpr::Kind::Line;
            expect_punct('(');
            e.terms = parse_lexpr();
            expect_punct(')');
        } else if (t.text == "E") {
            next();
            e.kind = ObjectExpr::Kind::Chart;
            expect_punct('(');
            e.slope = parse_slope();
            expect_punct(';');
            expect_ident("t");
            expect_punct('=');
            e.orbit = static_cast<int>(expect_int());
            expect_punct(';');
            expect_ident("s");
            expect_punct('=');
            e.socle = static_cast<int>(expect_int());
            expect_punct(';');
            expect_ident("l");
            expect_punct('=');
            e.len = static_cast<int>(expect_int());
            expect_punct(')');
        } else if (t.text == "K") {
            next();
            e.kind = ObjectExpr::Kind::Class;
            expect_punct('[');
            if (!at_punct(']')) {
                e.cls.push_back(signed_int());
                while (at_punct(',')) {
                    next();
                    e.cls.push_back(signed_int());
                }
            }
            expect_punct(']');
        } else if (t.text == "Tcan") {
            next();
            e.kind = ObjectExpr::Kind::Tcan;
            if (at_punct('(')) {
                next();
                e.twisted = true;
                e.terms = parse_lexpr();
                expect_punct(')');
            }
        } else if (t.text == "mu") {
            next();
            e.kind = ObjectExpr::Kind::Mu;
            expect_punct('(');
            const Token& inner_tok = peek();
            auto inner = std::make_shared<ObjectExpr>(parse_expr());
            if (!inner->is_tilting()) error_at(inner_tok, "mu expects a tilting expression");
            e.inner = std::move(inner);
            expect_punct(',');
            e.index = static_cast<int>(expect_int());
            expect_punct(')');
        } else {
            error_at(t, "unknown expression head '" + t.text + "'");
        }
        return e;
    }

    Slope parse_slope() {
        if (peek().kind == Token::Kind::Ident) {
            const Token& t = next();
            if (t.text == "inf" || t.text == "oo" || t.text == "infinity") return Slope::infinity();
            error_at(t, "expected a slope, found " + describe(t));
        }
        const std::int64_t num = signed_int();
        if (!at_punct('/')) return Slope(num);
        next();
        const Token& dt = peek();
        const std::int64_t den = expect_int();
        if (den == 0) error_at(dt, "zero denominator");
        return Slope(num, den);
    }

    std::vector<LTerm> parse_lexpr() {
        std::vector<LTerm> terms;
        bool neg = false;
        if (at_punct('-')) {
            const Token& op = next();
            neg = true;
            terms.push_back(parse_term(neg, &op));
        } else {
            terms.push_back(parse_term(false, nullptr));
        }
        while (at_punct('+') || at_punct('-')) {
            const Token& op = next();
            terms.push_back(parse_term(op.text == "-", &op));
        }
        return terms;
    }

    /// A missing term is reported at the dangling operator.
    LTerm parse_term(bool neg, const Token* op) {
        LTerm term;
        const Token& t = peek();
        if (t.kind == Token::Kind::Int) {
            term.coeff = std::stoll(next().text);
            if (!at_punct('*')) {
                if (term.coeff != 0) error_at(t, "a nonzero coefficient needs '*' and a generator");
                term.coeff = 0;
                term.index = -1;
                return term;
            }
            next();
            term.index = parse_atom();
        } else if (t.kind == Token::Kind::Ident) {
            term.index = parse_atom();
        } else if (op) {
            error_at(*op, "expected a term after '" + op->text + "'");
        } else {
            error_at(t, "expected a term, found " + describe(t));
        }
        if (neg) term.coeff = -term.coeff;
        return term;
    }

    int parse_atom() {
        const Token& t = peek();
        if (t.kind == Token::Kind::Ident && t.text == "c") {
            next();
            return -1;
        }
        if (t.kind == Token::Kind::Ident && t.text == "x") {
            next();
            const Token& it = peek();
            if (it.kind != Token::Kind::Int || it.offset != t.offset + 1) error_at(t, "expected an index directly after 'x'");
            const std::int64_t idx = expect_int();
            if (idx < 1 || idx > 64) error_at(it, "generator index out of range");
            return static_cast<int>(idx);
        }
        error_at(t, "expected 'x<i>' or 'c', found " + describe(t));
    }

    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

} // namespace detail

/// Syntax only; validation against a context happens in evaluate.
inline ObjectExpr parse_expr(std::string_view src) {
    detail::Parser p(detail::Lexer(src).run());
    return p.parse_top();
}

using ExprValue = std::variant<ExcObject, TiltingObject>;

namespace detail {

inline LElement eval_terms(const Workspace& ws, const ObjectExpr& e) {
    const WeightData& w = ws.weights();
    std::vector<std::int64_t> raw(w.t, 0);
    std::int64_t c = 0;
    for (const auto& t : e.terms) {
        if (t.coeff == 0) continue;
        if (t.index < 0) {
            c += t.coeff;
            continue;
        }
        require(t.index <= w.t, ErrorCode::ValidationError,
                std::to_string(e.line) + ":" + std::to_string(e.column) + ": x" + std::to_string(t.index) + " does not exist for weights " + w.str());
        raw[t.index - 1] += t.coeff;
    }
    return l_normalize(w, raw, c);
}

inline ExcObject eval_object(const Workspace& ws, const ObjectExpr& e) {
    const std::string where = std::to_string(e.line) + ":" + std::to_string(e.column) + ": ";
    try {
        switch (e.kind) {
        case ObjectExpr::Kind::Line: return ws.line_bundle(eval_terms(ws, e));
        case ObjectExpr::Kind::Chart: return ws.object_at(e.slope, e.orbit, e.socle, e.len);
        case ObjectExpr::Kind::Class:
            require(static_cast<int>(e.cls.size()) == ws.n(), ErrorCode::ValidationError, "class has length " + std::to_string(e.cls.size()) + ", expected " + std::to_string(ws.n()));
            return ws.object_of_class(e.cls);
        default: break;
        }
    } catch (const Error& err) {
        if (err.code() == ErrorCode::ValidationError || err.code() == ErrorCode::NotExceptionalHere || err.code() == ErrorCode::NotSheafLike)
            fail(ErrorCode::ValidationError, where + err.message());
        throw;
    }
    fail(ErrorCode::ValidationError, where + "expected an object, found a tilting expression");
}

inline TiltingObject eval_tilting(const Workspace& ws, const ObjectExpr& e) {
    if (e.kind == ObjectExpr::Kind::Tcan) return e.twisted ? canonical_tilting(ws, eval_terms(ws, e)) : canonical_tilting(ws);
    if (e.kind == ObjectExpr::Kind::Mu) {
        TiltingObject inner = eval_tilting(ws, *e.inner);
        require(e.index >= 0 && e.index < static_cast<int>(inner.size()), ErrorCode::ValidationError,
                std::to_string(e.line) + ":" + std::to_string(e.column) + ": mutation index " + std::to_string(e.index) + " out of range");
        return mutate(ws, inner, e.index).first;
    }
    fail(ErrorCode::ValidationError, std::to_string(e.line) + ":" + std::to_string(e.column) + ": expected a tilting expression, found an object");
}

} // namespace detail

inline ExprValue evaluate(const Workspace& ws, const ObjectExpr& e) {
    if (e.is_tilting()) return detail::eval_tilting(ws, e);
    return detail::eval_object(ws, e);
}

inline ExprValue parse_and_evaluate(const Workspace& ws, std::string_view src) { return evaluate(ws, parse_expr(src)); }

/// Canonical text forms; each parses back to the same value.
inline std::string chart_expr(const ExcObject& e) {
    return "E(" + e.slope.str() + "; t=" + std::to_string(e.orbit) + "; s=" + std::to_string(e.socle) + "; l=" + std::to_string(e.len) + ")";
}

inline std::string class_expr(const ExcObject& e) {
    std::string s = "K[";
    for (std::size_t i = 0; i < e.cls.size(); ++i) s += (i ? "," : "") + std::to_string(e.cls[i]);
    return s + "]";
}

inline std::string line_expr(const WeightData& w, const LElement& x) { return "L(" + l_str(l_normalize(w, x)) + ")"; }

} // namespace tubtilt
