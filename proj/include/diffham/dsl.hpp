// Text grammar for expressions, densities, operators and lambda brackets,
// with canonical round-trip printing.
//
//   atoms:      u[n], th[n], exp(<linear form>), log(u[n]) (densities only),
//               integers, fractions p/q, I, EPS, Z (= zeta_N)
//   operators:  + - * ^ with precedence ^ > * > +/-
//   shift:      S^n in operator files, L^n in bracket files
//
// A file consists of optional header lines (#kind ..., #field zeta N)
// followed by one definition.

#pragma once

#include <diffham/cyclotomic.hpp>
#include <diffham/expr.hpp>
#include <diffham/oper.hpp>

#include <cctype>
#include <cstddef>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace diffham {

struct SourceSpan {
    std::size_t start = 0;
    std::size_t end = 0;
};

class ParseError : public MathError {
public:
    ParseError(const std::string& msg, SourceSpan span)
        : MathError(msg + " (at bytes " + std::to_string(span.start) + ".." + std::to_string(span.end) + ")"),
          span_(span) {}
    SourceSpan span() const { return span_; }

private:
    SourceSpan span_;
};

enum class FileKind { Expression, Density, Operator, Bracket, Functional };

namespace dsl_detail {

enum class Tok { End, Int, Ident, LBracket, RBracket, LParen, RParen, Plus, Minus, Star, Caret, Slash };

struct Token {
    Tok kind = Tok::End;
    long value = 0;
    std::string text;
    SourceSpan span;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) : src_(src) { advance(); }

    const Token& peek() const { return cur_; }

    Token next() {
        Token t = cur_;
        advance();
        return t;
    }

private:
    void advance() {
        while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
        cur_ = Token{};
        cur_.span.start = pos_;
        if (pos_ >= src_.size()) {
            cur_.kind = Tok::End;
            cur_.span.end = pos_;
            return;
        }
        char c = src_[pos_];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            long v = 0;
            while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) {
                v = v * 10 + (src_[pos_] - '0');
                ++pos_;
            }
            cur_.kind = Tok::Int;
            cur_.value = v;
        } else if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::string id;
            while (pos_ < src_.size() &&
                   (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
                id += src_[pos_++];
            cur_.kind = Tok::Ident;
            cur_.text = id;
        } else {
            ++pos_;
            switch (c) {
                case '[': cur_.kind = Tok::LBracket; break;
                case ']': cur_.kind = Tok::RBracket; break;
                case '(': cur_.kind = Tok::LParen; break;
                case ')': cur_.kind = Tok::RParen; break;
                case '+': cur_.kind = Tok::Plus; break;
                case '-': cur_.kind = Tok::Minus; break;
                case '*': cur_.kind = Tok::Star; break;
                case '^': cur_.kind = Tok::Caret; break;
                case '/': cur_.kind = Tok::Slash; break;
                default:
                    cur_.span.end = pos_;
                    throw ParseError(std::string("unexpected character '") + c + "'", cur_.span);
            }
        }
        cur_.span.end = pos_;
    }

    const std::string& src_;
    std::size_t pos_ = 0;
    Token cur_;
};

// Intermediate value: Laurent polynomial in the shift/lambda symbol with
// density coefficients.
struct PVal {
    std::map<int, FunctionalDensity> parts;

    static PVal from_density(const FunctionalDensity& d) {
        PVal v;
        if (!d.is_zero()) v.parts.emplace(0, d);
        return v;
    }
    static PVal from_expr(const DiffExpr& e) { return from_density(FunctionalDensity(e)); }
};

class Parser {
public:
    Parser(const std::string& src, FileKind kind, unsigned order)
        : lex_(src), kind_(kind), order_(order) {}

    PVal parse() {
        PVal v = parse_sum();
        if (lex_.peek().kind != Tok::End)
            throw ParseError("unexpected trailing input", lex_.peek().span);
        return v;
    }

private:
    bool shift_allowed() const { return kind_ == FileKind::Operator || kind_ == FileKind::Bracket; }
    bool log_allowed() const { return kind_ == FileKind::Density || kind_ == FileKind::Functional; }
    const char* shift_symbol() const { return kind_ == FileKind::Bracket ? "L" : "S"; }

    PVal parse_sum() {
        bool neg = false;
        if (lex_.peek().kind == Tok::Minus) {
            lex_.next();
            neg = true;
        } else if (lex_.peek().kind == Tok::Plus) {
            lex_.next();
        }
        PVal acc = parse_product();
        if (neg) acc = negate(acc);
        while (lex_.peek().kind == Tok::Plus || lex_.peek().kind == Tok::Minus) {
            bool minus = lex_.next().kind == Tok::Minus;
            PVal t = parse_product();
            if (minus) t = negate(t);
            acc = add(acc, t);
        }
        return acc;
    }

    PVal parse_product() {
        PVal acc = parse_power();
        while (lex_.peek().kind == Tok::Star) {
            Token star = lex_.next();
            PVal t = parse_power();
            acc = mul(acc, t, star.span);
        }
        return acc;
    }

    PVal parse_power() {
        Token head = lex_.peek();
        PVal base = parse_atom();
        if (lex_.peek().kind != Tok::Caret) return base;
        Token caret = lex_.next();
        long e = parse_signed_int();
        // a bare shift monomial takes the exponent on the symbol
        if (shift_like_.count(key_of(head))) {
            PVal v;
            v.parts.emplace(static_cast<int>(e), FunctionalDensity(DiffExpr::one(order_)));
            shift_like_.erase(key_of(head));
            return v;
        }
        return power(base, static_cast<int>(e), caret.span);
    }

    static std::pair<std::size_t, std::size_t> key_of(const Token& t) {
        return {t.span.start, t.span.end};
    }

    PVal parse_atom() {
        Token t = lex_.next();
        switch (t.kind) {
            case Tok::Int: {
                Rational r(t.value);
                if (lex_.peek().kind == Tok::Slash) {
                    lex_.next();
                    Token den = lex_.next();
                    if (den.kind != Tok::Int) throw ParseError("expected integer denominator", den.span);
                    if (den.value == 0) throw ParseError("zero denominator", den.span);
                    r = Rational(t.value, den.value);
                }
                return PVal::from_expr(DiffExpr::scalar(CycloScalar(r, order_)));
            }
            case Tok::LParen: {
                PVal v = parse_sum();
                expect(Tok::RParen, "expected ')'");
                return v;
            }
            case Tok::Ident:
                return parse_ident(t);
            default:
                throw ParseError("unexpected token", t.span);
        }
    }

    PVal parse_ident(const Token& t) {
        const std::string& id = t.text;
        if (id == "u") {
            int n = parse_index();
            return PVal::from_expr(DiffExpr::u(n, 1, order_));
        }
        if (id == "th") {
            int n = parse_index();
            return PVal::from_expr(DiffExpr::theta(n, order_));
        }
        if (id == "I") return PVal::from_expr(DiffExpr::scalar(CycloScalar::i(order_)));
        if (id == "EPS") return PVal::from_expr(DiffExpr::scalar(CycloScalar::eps(order_)));
        if (id == "Z") return PVal::from_expr(DiffExpr::scalar(CycloScalar::zeta_pow(1, order_)));
        if (id == "exp") {
            expect(Tok::LParen, "expected '(' after exp");
            PVal arg = parse_sum();
            expect(Tok::RParen, "expected ')'");
            return PVal::from_expr(make_exp(arg, t.span));
        }
        if (id == "log") {
            if (!log_allowed()) throw ParseError("log is only allowed in density context", t.span);
            expect(Tok::LParen, "expected '(' after log");
            Token uu = lex_.next();
            if (uu.kind != Tok::Ident || uu.text != "u")
                throw ParseError("log argument must be u[n]", uu.span);
            int n = parse_index();
            expect(Tok::RParen, "expected ')'");
            return PVal::from_density(FunctionalDensity::log_u(n, CycloScalar::one(order_)));
        }
        if (id == shift_symbol()) {
            if (!shift_allowed())
                throw ParseError(std::string(shift_symbol()) + " is not allowed in this context", t.span);
            if (lex_.peek().kind == Tok::Caret) shift_like_.insert(key_of(t));
            PVal v;
            v.parts.emplace(1, FunctionalDensity(DiffExpr::one(order_)));
            return v;
        }
        throw ParseError("unknown identifier '" + id + "'", t.span);
    }

    int parse_index() {
        expect(Tok::LBracket, "expected '['");
        long n = parse_signed_int();
        expect(Tok::RBracket, "expected ']'");
        return static_cast<int>(n);
    }

    long parse_signed_int() {
        bool neg = false;
        if (lex_.peek().kind == Tok::Minus) {
            lex_.next();
            neg = true;
        }
        Token t = lex_.next();
        if (t.kind != Tok::Int) throw ParseError("expected integer", t.span);
        return neg ? -t.value : t.value;
    }

    void expect(Tok kind, const char* msg) {
        Token t = lex_.next();
        if (t.kind != kind) throw ParseError(msg, t.span);
    }

    DiffExpr make_exp(const PVal& arg, SourceSpan span) {
        if (arg.parts.empty()) return DiffExpr::one(order_);
        if (arg.parts.size() != 1 || arg.parts.begin()->first != 0)
            throw ParseError("exp argument must be shift-free", span);
        const FunctionalDensity& d = arg.parts.begin()->second;
        if (d.has_logs()) throw ParseError("exp argument cannot contain log", span);
        std::map<int, CycloScalar> form;
        for (const auto& [key, c] : d.main.terms()) {
            if (!key.thetas.empty() || !key.expf.empty() || key.upow.size() != 1 ||
                key.upow.begin()->second != 1)
                throw ParseError("exp argument must be a linear form in u[n]", span);
            form[key.upow.begin()->first] = c;
        }
        return DiffExpr::expu(form, order_);
    }

    static PVal negate(const PVal& v) {
        PVal r;
        for (const auto& [s, d] : v.parts) r.parts.emplace(s, -d);
        return r;
    }

    static PVal add(const PVal& a, const PVal& b) {
        PVal r = a;
        for (const auto& [s, d] : b.parts) {
            auto it = r.parts.find(s);
            if (it == r.parts.end()) {
                r.parts.emplace(s, d);
            } else {
                FunctionalDensity sum = it->second + d;
                if (sum.is_zero())
                    r.parts.erase(it);
                else
                    it->second = sum;
            }
        }
        return r;
    }

    FunctionalDensity density_mul(const FunctionalDensity& a, const FunctionalDensity& b,
                                  SourceSpan span) {
        auto scalar_of = [](const FunctionalDensity& d) -> const CycloScalar* {
            if (d.has_logs() || d.main.terms().size() != 1) return nullptr;
            const auto& [key, c] = *d.main.terms().begin();
            if (!key.thetas.empty() || !key.upow.empty() || !key.expf.empty()) return nullptr;
            return &c;
        };
        if (!a.has_logs() && !b.has_logs()) return FunctionalDensity(a.main * b.main);
        if (const CycloScalar* c = scalar_of(a)) return b.scaled(*c);
        if (const CycloScalar* c = scalar_of(b)) return a.scaled(*c);
        throw ParseError("log terms may only be multiplied by constants", span);
    }

    PVal mul(const PVal& a, const PVal& b, SourceSpan span) {
        PVal r;
        for (const auto& [s, da] : a.parts) {
            for (const auto& [t, db] : b.parts) {
                FunctionalDensity prod = density_mul(da, db.shifted(s), span);
                auto it = r.parts.find(s + t);
                if (it == r.parts.end()) {
                    if (!prod.is_zero()) r.parts.emplace(s + t, prod);
                } else {
                    FunctionalDensity sum = it->second + prod;
                    if (sum.is_zero())
                        r.parts.erase(it);
                    else
                        it->second = sum;
                }
            }
        }
        return r;
    }

    PVal power(const PVal& v, int e, SourceSpan span) {
        if (v.parts.empty()) {
            if (e <= 0) throw ParseError("zero to a non-positive power", span);
            return v;
        }
        if (v.parts.size() != 1 || v.parts.begin()->first != 0 || v.parts.begin()->second.has_logs())
            throw ParseError("exponent applies only to shift-free, log-free factors", span);
        try {
            return PVal::from_expr(detail::expr_int_pow(v.parts.begin()->second.main, e));
        } catch (const MathError& err) {
            throw ParseError(err.what(), span);
        }
    }

    Lexer lex_;
    FileKind kind_;
    unsigned order_;
    std::set<std::pair<std::size_t, std::size_t>> shift_like_;
};

inline FunctionalDensity as_density(const PVal& v, unsigned order) {
    if (v.parts.empty()) return FunctionalDensity(order);
    if (v.parts.size() != 1 || v.parts.begin()->first != 0)
        throw MathError("value contains shift powers; not a plain density");
    return v.parts.begin()->second;
}

inline DiffOperator as_operator(const PVal& v, unsigned order) {
    DiffOperator k(order);
    for (const auto& [s, d] : v.parts) {
        if (d.has_logs()) throw MathError("operator coefficients cannot contain log");
        k.set_coeff(s, d.main);
    }
    return k;
}

}  // namespace dsl_detail

inline DiffExpr parse_expr(const std::string& text, unsigned order = CycloScalar::kDefaultOrder) {
    dsl_detail::Parser p(text, FileKind::Expression, order);
    FunctionalDensity d = dsl_detail::as_density(p.parse(), order);
    if (d.has_logs()) throw MathError("log is only allowed in density context");
    return d.main;
}

inline FunctionalDensity parse_density(const std::string& text,
                                       unsigned order = CycloScalar::kDefaultOrder) {
    dsl_detail::Parser p(text, FileKind::Density, order);
    return dsl_detail::as_density(p.parse(), order);
}

inline DiffOperator parse_operator(const std::string& text,
                                   unsigned order = CycloScalar::kDefaultOrder) {
    dsl_detail::Parser p(text, FileKind::Operator, order);
    return dsl_detail::as_operator(p.parse(), order);
}

inline LambdaBracket parse_bracket(const std::string& text,
                                   unsigned order = CycloScalar::kDefaultOrder) {
    dsl_detail::Parser p(text, FileKind::Bracket, order);
    return dsl_detail::as_operator(p.parse(), order);
}

// ---------------------------------------------------------------------------
// Canonical printing
// ---------------------------------------------------------------------------

namespace dsl_detail {

// Render a scalar in the (1, I, EPS, I*EPS) basis for N = 12, the zeta basis
// otherwise.  Returns the list of (coefficient, basis-suffix) components.
inline std::vector<std::pair<Rational, std::string>> scalar_components(const CycloScalar& c) {
    std::vector<std::pair<Rational, std::string>> comps;
    if (c.order() == 12) {
        const auto& a = c.coeffs();
        // zeta = -I*EPS... in reverse: 1 = 1, zeta = -I*EPS (after reduction),
        // zeta^2 = 1 + EPS, zeta^3 = I.  So a0+a1 z+a2 z^2+a3 z^3 =
        // (a0+a2) + a3 I + a2 EPS + (-a1) I*EPS.
        Rational one_part = a[0] + a[2];
        if (one_part != 0) comps.push_back({one_part, ""});
        if (a[3] != 0) comps.push_back({a[3], "I"});
        if (a[2] != 0) comps.push_back({a[2], "EPS"});
        if (a[1] != 0) comps.push_back({-a[1], "I*EPS"});
    } else {
        const auto& a = c.coeffs();
        for (std::size_t j = 0; j < a.size(); ++j) {
            if (a[j] == 0) continue;
            std::string base = j == 0 ? "" : (j == 1 ? "Z" : "Z^" + std::to_string(j));
            comps.push_back({a[j], base});
        }
    }
    return comps;
}

inline std::string rational_str(const Rational& r) {
    std::ostringstream os;
    os << r;
    return os.str();
}

// Render without a leading sign; `negated` reports whether the leading
// component was negative (caller emits the sign).
inline std::string scalar_str(const CycloScalar& c, bool& negated, bool& compound) {
    auto comps = scalar_components(c);
    negated = false;
    compound = comps.size() > 1;
    if (comps.empty()) return "0";
    if (comps[0].first < 0) {
        negated = true;
        for (auto& [r, b] : comps) r = -r;
    }
    std::string out;
    for (std::size_t j = 0; j < comps.size(); ++j) {
        Rational r = comps[j].first;
        bool neg = r < 0;
        if (neg) r = -r;
        if (j > 0)
            out += neg ? " - " : " + ";
        else if (neg)
            out += "-";
        const std::string& base = comps[j].second;
        if (base.empty())
            out += rational_str(r);
        else if (r == 1)
            out += base;
        else
            out += rational_str(r) + "*" + base;
    }
    return out;
}

inline std::string exp_form_str(const std::map<int, CycloScalar>& form) {
    std::string out = "exp(";
    bool first = true;
    for (const auto& [n, c] : form) {
        bool neg = false, compound = false;
        std::string cs = scalar_str(c, neg, compound);
        std::string var = "u[" + std::to_string(n) + "]";
        std::string piece;
        if (cs == "1")
            piece = var;
        else
            piece = (compound ? "(" + cs + ")" : cs) + "*" + var;
        if (first) {
            out += (neg ? "-" : "") + piece;
            first = false;
        } else {
            out += (neg ? " - " : " + ") + piece;
        }
    }
    return out + ")";
}

// term body without the coefficient; empty if the term is a pure scalar
inline std::string term_body(const TermKey& key) {
    std::vector<std::string> factors;
    for (const auto& [n, p] : key.upow) {
        std::string f = "u[" + std::to_string(n) + "]";
        if (p != 1) f += "^" + std::to_string(p);
        factors.push_back(f);
    }
    if (!key.expf.empty()) factors.push_back(exp_form_str(key.expf));
    for (int j : key.thetas) factors.push_back("th[" + std::to_string(j) + "]");
    std::string out;
    for (std::size_t j = 0; j < factors.size(); ++j) {
        if (j) out += "*";
        out += factors[j];
    }
    return out;
}

// one rendered term: (sign, text)
inline std::pair<bool, std::string> term_str(const TermKey& key, const CycloScalar& c) {
    bool neg = false, compound = false;
    std::string cs = scalar_str(c, neg, compound);
    std::string body = term_body(key);
    if (body.empty()) return {neg, compound ? "(" + cs + ")" : cs};
    if (cs == "1") return {neg, body};
    return {neg, (compound ? "(" + cs + ")" : cs) + "*" + body};
}

inline std::string expr_str(const DiffExpr& e) {
    if (e.is_zero()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [key, c] : e.terms()) {
        auto [neg, text] = term_str(key, c);
        if (first) {
            out += (neg ? "-" : "") + text;
            first = false;
        } else {
            out += (neg ? " - " : " + ") + text;
        }
    }
    return out;
}

}  // namespace dsl_detail

inline std::string print_canonical(const DiffExpr& e) { return dsl_detail::expr_str(e); }

inline std::string print_canonical(const CycloScalar& c) {
    return dsl_detail::expr_str(DiffExpr::scalar(c));
}

inline std::string print_canonical(const FunctionalDensity& d) {
    std::string out = d.main.is_zero() && !d.logs.empty() ? "" : dsl_detail::expr_str(d.main);
    for (const auto& [n, c] : d.logs) {
        bool neg = false, compound = false;
        std::string cs = dsl_detail::scalar_str(c, neg, compound);
        std::string piece = "log(u[" + std::to_string(n) + "])";
        if (cs != "1") piece = (compound ? "(" + cs + ")" : cs) + "*" + piece;
        if (out.empty())
            out += (neg ? "-" : "") + piece;
        else
            out += (neg ? " - " : " + ") + piece;
    }
    return out.empty() ? "0" : out;
}

inline std::string print_canonical(const DiffOperator& k, const char* symbol = "S") {
    if (k.is_zero()) return "0";
    std::string out;
    bool first = true;
    // highest shift power first, matching the usual operator notation
    for (auto it = k.coeffs().rbegin(); it != k.coeffs().rend(); ++it) {
        const auto& [s, a] = *it;
        std::string coeff;
        bool neg = false;
        if (a.terms().size() == 1) {
            auto [n, text] = dsl_detail::term_str(a.terms().begin()->first, a.terms().begin()->second);
            neg = n;
            coeff = text;
        } else {
            // factor a common minus sign out of all-negative groups
            bool all_neg = true;
            for (const auto& [key, c] : a.terms()) {
                bool n = false, cmp = false;
                (void)dsl_detail::scalar_str(c, n, cmp);
                all_neg = all_neg && n;
            }
            neg = all_neg;
            coeff = "(" + dsl_detail::expr_str(all_neg ? -a : a) + ")";
        }
        std::string piece;
        if (s == 0)
            piece = coeff;
        else if (coeff == "1")
            piece = std::string(symbol) + "^" + std::to_string(s);
        else
            piece = coeff + "*" + symbol + "^" + std::to_string(s);
        if (first) {
            out += (neg ? "-" : "") + piece;
            first = false;
        } else {
            out += (neg ? " - " : " + ") + piece;
        }
    }
    return out;
}

inline std::string print_canonical_bracket(const LambdaBracket& b) { return print_canonical(b, "L"); }

// ---------------------------------------------------------------------------
// File format
// ---------------------------------------------------------------------------

struct ParsedFile {
    FileKind kind = FileKind::Expression;
    unsigned field_order = CycloScalar::kDefaultOrder;
    std::string body;
};

inline ParsedFile parse_file_header(const std::string& text) {
    ParsedFile f;
    std::istringstream in(text);
    std::string line;
    std::size_t offset = 0;
    bool kind_seen = false;
    while (std::getline(in, line)) {
        std::size_t line_start = offset;
        offset += line.size() + 1;
        std::size_t h = line.find_first_not_of(" \t");
        if (h == std::string::npos) continue;
        if (line[h] != '#') {
            f.body += line + "\n";
            continue;
        }
        std::istringstream ls(line.substr(h + 1));
        std::string word;
        ls >> word;
        if (word == "kind") {
            std::string k;
            ls >> k;
            if (k == "expression")
                f.kind = FileKind::Expression;
            else if (k == "density")
                f.kind = FileKind::Density;
            else if (k == "operator")
                f.kind = FileKind::Operator;
            else if (k == "bracket")
                f.kind = FileKind::Bracket;
            else if (k == "functional")
                f.kind = FileKind::Functional;
            else
                throw ParseError("unknown #kind '" + k + "'", {line_start, offset - 1});
            kind_seen = true;
        } else if (word == "field") {
            std::string zeta;
            unsigned n = 0;
            ls >> zeta >> n;
            if (zeta != "zeta" || n < 1)
                throw ParseError("malformed #field line", {line_start, offset - 1});
            f.field_order = n;
        } else {
            throw ParseError("unknown header directive '#" + word + "'", {line_start, offset - 1});
        }
    }
    if (!kind_seen && f.body.find('#') == std::string::npos && f.body.empty())
        throw ParseError("empty input", {0, text.size()});
    return f;
}

}  // namespace diffham
