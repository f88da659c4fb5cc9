#pragma once

#include "fqc/gf.hpp"
#include "fqc/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace fqc {

using VarId = int;

// ---------------------------------------------------------------------------
// Multivariate polynomial terms
// ---------------------------------------------------------------------------

struct Monomial {
    std::vector<std::pair<VarId, int>> powers;  // sorted by VarId, exponents >= 1

    int total_degree() const {
        int d = 0;
        for (const auto& [v, e] : powers) d += e;
        return d;
    }

    int degree_in(VarId v) const {
        for (const auto& [w, e] : powers)
            if (w == v) return e;
        return 0;
    }

    bool operator==(const Monomial&) const = default;

    // Canonical term order: total degree descending, then lexicographic.
    static bool canonical_less(const Monomial& a, const Monomial& b) {
        const int da = a.total_degree(), db = b.total_degree();
        if (da != db) return da > db;
        return a.powers < b.powers;
    }
};

struct IntegerOps {
    using Value = Integer;
    bool is_zero(const Value& v) const { return v.is_zero(); }
    Value add(const Value& a, const Value& b) const { return a + b; }
    Value mul(const Value& a, const Value& b) const { return a * b; }
    Value neg(const Value& a) const { return -a; }
    Value one() const { return Integer(1); }
};

struct FieldOps {
    const Field* F = nullptr;
    using Value = std::uint32_t;
    bool is_zero(Value v) const { return v == 0; }
    Value add(Value a, Value b) const { return F->add(a, b); }
    Value mul(Value a, Value b) const { return F->mul(a, b); }
    Value neg(Value a) const { return F->neg(a); }
    Value one() const { return 1; }
};

// Canonical multivariate polynomial: sorted monomials, no zero coefficients.
template <class V>
struct Poly {
    std::vector<std::pair<Monomial, V>> terms;

    bool is_zero() const { return terms.empty(); }
    bool operator==(const Poly&) const = default;

    int degree_in(VarId v) const {
        int d = 0;
        for (const auto& [m, c] : terms) d = std::max(d, m.degree_in(v));
        return d;
    }

    bool mentions(VarId v) const {
        for (const auto& [m, c] : terms)
            if (m.degree_in(v) > 0) return true;
        return false;
    }
};

namespace polyops {

template <class Ops>
Poly<typename Ops::Value> normalized(const Ops& R, std::vector<std::pair<Monomial, typename Ops::Value>> terms) {
    std::sort(terms.begin(), terms.end(),
              [](const auto& a, const auto& b) { return Monomial::canonical_less(a.first, b.first); });
    Poly<typename Ops::Value> out;
    for (auto& t : terms) {
        if (!out.terms.empty() && out.terms.back().first == t.first)
            out.terms.back().second = R.add(out.terms.back().second, t.second);
        else
            out.terms.push_back(std::move(t));
        if (!out.terms.empty() && R.is_zero(out.terms.back().second)) out.terms.pop_back();
    }
    return out;
}

template <class Ops>
Poly<typename Ops::Value> add(const Ops& R, const Poly<typename Ops::Value>& a, const Poly<typename Ops::Value>& b) {
    auto t = a.terms;
    t.insert(t.end(), b.terms.begin(), b.terms.end());
    return normalized(R, std::move(t));
}

template <class Ops>
Poly<typename Ops::Value> neg(const Ops& R, const Poly<typename Ops::Value>& a) {
    auto out = a;
    for (auto& [m, c] : out.terms) c = R.neg(c);
    return out;
}

template <class Ops>
Poly<typename Ops::Value> sub(const Ops& R, const Poly<typename Ops::Value>& a, const Poly<typename Ops::Value>& b) {
    return add(R, a, neg(R, b));
}

inline Monomial merge(const Monomial& a, const Monomial& b) {
    Monomial out;
    std::size_t i = 0, j = 0;
    while (i < a.powers.size() || j < b.powers.size()) {
        if (j == b.powers.size() || (i < a.powers.size() && a.powers[i].first < b.powers[j].first))
            out.powers.push_back(a.powers[i++]);
        else if (i == a.powers.size() || b.powers[j].first < a.powers[i].first)
            out.powers.push_back(b.powers[j++]);
        else {
            out.powers.emplace_back(a.powers[i].first, a.powers[i].second + b.powers[j].second);
            ++i;
            ++j;
        }
    }
    return out;
}

template <class Ops>
Poly<typename Ops::Value> mul(const Ops& R, const Poly<typename Ops::Value>& a, const Poly<typename Ops::Value>& b) {
    std::vector<std::pair<Monomial, typename Ops::Value>> t;
    t.reserve(a.terms.size() * b.terms.size());
    for (const auto& [ma, ca] : a.terms)
        for (const auto& [mb, cb] : b.terms) t.emplace_back(merge(ma, mb), R.mul(ca, cb));
    return normalized(R, std::move(t));
}

template <class Ops>
Poly<typename Ops::Value> pow(const Ops& R, Poly<typename Ops::Value> base, int e) {
    Poly<typename Ops::Value> r;
    r.terms.emplace_back(Monomial{}, R.one());
    while (e) {
        if (e & 1) r = mul(R, r, base);
        base = mul(R, base, base);
        e >>= 1;
    }
    return r;
}

template <class Ops>
Poly<typename Ops::Value> constant(const Ops& R, typename Ops::Value c) {
    Poly<typename Ops::Value> p;
    if (!R.is_zero(c)) p.terms.emplace_back(Monomial{}, std::move(c));
    return p;
}

template <class Ops>
Poly<typename Ops::Value> variable(const Ops& R, VarId v) {
    Poly<typename Ops::Value> p;
    Monomial m;
    m.powers.emplace_back(v, 1);
    p.terms.emplace_back(std::move(m), R.one());
    return p;
}

// Fold var := value into the coefficients (field coefficients).
inline Poly<std::uint32_t> substitute_var(const Field& F, const Poly<std::uint32_t>& p, VarId v, std::uint32_t value) {
    FieldOps R{&F};
    std::vector<std::pair<Monomial, std::uint32_t>> t;
    t.reserve(p.terms.size());
    for (const auto& [m, c] : p.terms) {
        Monomial rest;
        std::uint32_t coeff = c;
        for (const auto& [w, e] : m.powers) {
            if (w == v)
                coeff = F.mul(coeff, F.pow(value, static_cast<std::uint64_t>(e)));
            else
                rest.powers.emplace_back(w, e);
        }
        t.emplace_back(std::move(rest), coeff);
    }
    return normalized(R, std::move(t));
}

// Reduce integer coefficients into the prime subfield of F.
inline Poly<std::uint32_t> reduce(const Field& F, const Poly<Integer>& p) {
    FieldOps R{&F};
    std::vector<std::pair<Monomial, std::uint32_t>> t;
    t.reserve(p.terms.size());
    for (const auto& [m, c] : p.terms) t.emplace_back(m, F.from_integer(c));
    return normalized(R, std::move(t));
}

inline std::uint32_t eval(const Field& F, const Poly<std::uint32_t>& p, const std::vector<std::uint32_t>& assignment) {
    std::uint32_t acc = 0;
    for (const auto& [m, c] : p.terms) {
        std::uint32_t v = c;
        for (const auto& [w, e] : m.powers)
            v = F.mul(v, F.pow(assignment[static_cast<std::size_t>(w)], static_cast<std::uint64_t>(e)));
        acc = F.add(acc, v);
    }
    return acc;
}

}  // namespace polyops

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

enum class AtomOp { Eq, Neq };
enum class NodeKind { Atom, Not, And, Or };

template <class V>
struct Atom {
    Poly<V> poly;  // canonical form: poly OP 0
    AtomOp op = AtomOp::Eq;
    bool operator==(const Atom&) const = default;
};

struct Node {
    NodeKind kind = NodeKind::Atom;
    int a = -1;     // left child / unary child
    int b = -1;     // right child
    int atom = -1;  // index into atoms for NodeKind::Atom
    bool operator==(const Node&) const = default;
};

struct QuantBlock {
    bool universal = false;      // E = existential, A = universal
    std::vector<VarId> vars;     // nonempty
    std::uint32_t sort = 1;      // variables range over the fixed field of Fr^sort
    bool operator==(const QuantBlock&) const = default;
};

struct FreeVar {
    VarId var = -1;
    std::uint32_t sort = 1;
    bool operator==(const FreeVar&) const = default;
};

// Quantifier-prefixed boolean combination of polynomial (in)equalities.
// Immutable value type; the matrix is an arena of Nodes rooted at `root`.
template <class V>
struct BasicFormula {
    std::vector<std::string> names;  // VarId -> name
    std::vector<QuantBlock> prefix;  // outermost first
    std::vector<FreeVar> free;       // declaration order
    std::vector<Atom<V>> atoms;
    std::vector<Node> nodes;
    int root = -1;
    const Field* coeff_field = nullptr;  // set for field-coefficient formulas

    bool operator==(const BasicFormula&) const = default;

    bool is_closed() const { return free.empty(); }

    std::optional<VarId> var_by_name(const std::string& name) const {
        for (VarId i = 0; i < static_cast<VarId>(names.size()); ++i)
            if (names[static_cast<std::size_t>(i)] == name) return i;
        return std::nullopt;
    }

    std::optional<std::uint32_t> free_sort(VarId v) const {
        for (const auto& fv : free)
            if (fv.var == v) return fv.sort;
        return std::nullopt;
    }

    bool is_bound(VarId v) const {
        for (const auto& b : prefix)
            for (VarId w : b.vars)
                if (w == v) return true;
        return false;
    }
};

using Formula = BasicFormula<Integer>;
using FieldFormula = BasicFormula<std::uint32_t>;

// Free variables in declaration order.
template <class V>
std::vector<std::string> free_variables(const BasicFormula<V>& f) {
    std::vector<std::string> out;
    out.reserve(f.free.size());
    for (const auto& fv : f.free) out.push_back(f.names[static_cast<std::size_t>(fv.var)]);
    return out;
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

class ParseError : public Error {
public:
    ParseError(int line, int col, const std::string& msg)
        : Error("parse error at " + std::to_string(line) + ":" + std::to_string(col) + ": " + msg),
          line(line),
          col(col) {}
    int line;
    int col;
};

namespace detail {

struct Token {
    enum Kind { Ident, Int, Punct, End } kind = End;
    std::string text;
    Integer value;  // for Int
    int line = 1, col = 1;
};

class Lexer {
public:
    explicit Lexer(const std::string& src) {
        int line = 1, col = 1;
        std::size_t i = 0;
        while (i < src.size()) {
            const char ch = src[i];
            if (ch == '\n') {
                ++line;
                col = 1;
                ++i;
                continue;
            }
            if (ch == ' ' || ch == '\t' || ch == '\r') {
                ++col;
                ++i;
                continue;
            }
            if (ch == '#') {  // comment to end of line
                while (i < src.size() && src[i] != '\n') ++i;
                continue;
            }
            Token t;
            t.line = line;
            t.col = col;
            if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
                std::size_t j = i;
                while (j < src.size() &&
                       (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_'))
                    ++j;
                t.kind = Token::Ident;
                t.text = src.substr(i, j - i);
                col += static_cast<int>(j - i);
                i = j;
            } else if (std::isdigit(static_cast<unsigned char>(ch))) {
                std::size_t j = i;
                while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
                t.kind = Token::Int;
                t.text = src.substr(i, j - i);
                t.value = Integer(t.text);
                col += static_cast<int>(j - i);
                i = j;
            } else if (ch == '!' && i + 1 < src.size() && src[i + 1] == '=') {
                t.kind = Token::Punct;
                t.text = "!=";
                col += 2;
                i += 2;
            } else if (std::string(".,:()!=+-*^|&").find(ch) != std::string::npos) {
                t.kind = Token::Punct;
                t.text = std::string(1, ch);
                ++col;
                ++i;
            } else {
                throw ParseError(line, col, std::string("unexpected character '") + ch + "'");
            }
            tokens_.push_back(std::move(t));
        }
        Token end;
        end.kind = Token::End;
        end.line = line;
        end.col = col;
        tokens_.push_back(std::move(end));
    }

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = std::min(pos_ + ahead, tokens_.size() - 1);
        return tokens_[i];
    }
    const Token& next() { return tokens_[std::min(pos_++, tokens_.size() - 1)]; }
    std::size_t mark() const { return pos_; }
    void rewind(std::size_t m) { pos_ = m; }

private:
    std::vector<Token> tokens_;
    std::size_t pos_ = 0;
};

class Parser {
public:
    explicit Parser(const std::string& src) : lex_(src) {}

    Formula parse() {
        // leading "free" clauses
        while (lex_.peek().kind == Token::Ident && lex_.peek().text == "free") {
            lex_.next();
            parse_decl_list(/*free_clause=*/true, /*universal=*/false);
        }
        // quantifier blocks
        while (lex_.peek().kind == Token::Ident && (lex_.peek().text == "E" || lex_.peek().text == "A")) {
            const bool universal = lex_.peek().text == "A";
            lex_.next();
            parse_decl_list(/*free_clause=*/false, universal);
        }
        f_.root = parse_or();
        expect_end();
        bind_matrix_vars();
        renumber_canonical();
        return std::move(f_);
    }

private:
    [[noreturn]] void fail(const Token& t, const std::string& msg) { throw ParseError(t.line, t.col, msg); }

    void expect_punct(const std::string& p) {
        const Token& t = lex_.next();
        if (t.kind != Token::Punct || t.text != p) fail(t, "expected '" + p + "'");
    }

    void expect_end() {
        const Token& t = lex_.peek();
        if (t.kind != Token::End) fail(t, "unexpected trailing input '" + t.text + "'");
    }

    VarId declare(const Token& t, bool as_free, std::uint32_t sort, bool universal, std::size_t block_index) {
        if (t.kind != Token::Ident) fail(t, "expected variable name");
        if (t.text == "E" || t.text == "A" || t.text == "free" || t.text == "ext")
            fail(t, "'" + t.text + "' is reserved");
        if (f_.var_by_name(t.text)) fail(t, "duplicate binding of variable '" + t.text + "'");
        f_.names.push_back(t.text);
        const VarId id = static_cast<VarId>(f_.names.size()) - 1;
        if (as_free)
            f_.free.push_back({id, sort});
        else {
            if (block_index == f_.prefix.size()) f_.prefix.push_back({universal, {}, sort});
            f_.prefix[block_index].vars.push_back(id);
        }
        return id;
    }

    // var ("," var)* [":" "ext" INT] "."
    void parse_decl_list(bool free_clause, bool universal) {
        std::vector<Token> vars;
        vars.push_back(lex_.next());
        while (lex_.peek().kind == Token::Punct && lex_.peek().text == ",") {
            lex_.next();
            vars.push_back(lex_.next());
        }
        std::uint32_t sort = 1;
        if (lex_.peek().kind == Token::Punct && lex_.peek().text == ":") {
            lex_.next();
            const Token& kw = lex_.next();
            if (kw.kind != Token::Ident || kw.text != "ext") fail(kw, "expected 'ext'");
            const Token& num = lex_.next();
            if (num.kind != Token::Int) fail(num, "expected extension degree");
            if (num.value <= 0 || num.value > 1000000) fail(num, "sort must be a positive integer");
            sort = num.value.convert_to<std::uint32_t>();
            if (sort == 0) fail(num, "sort must be a positive integer");
        }
        expect_punct(".");
        const std::size_t block_index = f_.prefix.size();
        for (const Token& v : vars) declare(v, free_clause, sort, universal, block_index);
    }

    int add_node(Node n) {
        f_.nodes.push_back(n);
        return static_cast<int>(f_.nodes.size()) - 1;
    }

    int parse_or() {
        int left = parse_and();
        while (lex_.peek().kind == Token::Punct && lex_.peek().text == "|") {
            lex_.next();
            const int right = parse_and();
            left = add_node({NodeKind::Or, left, right, -1});
        }
        return left;
    }

    int parse_and() {
        int left = parse_unary();
        while (lex_.peek().kind == Token::Punct && lex_.peek().text == "&") {
            lex_.next();
            const int right = parse_unary();
            left = add_node({NodeKind::And, left, right, -1});
        }
        return left;
    }

    int parse_unary() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Punct && t.text == "!") {
            lex_.next();
            const int child = parse_unary();
            return add_node({NodeKind::Not, child, -1, -1});
        }
        if (t.kind == Token::Punct && t.text == "(") {
            // "(" may open a boolean group or a parenthesized polynomial;
            // try the atom reading first and fall back.
            const std::size_t m = lex_.mark();
            const Snapshot snap = save();
            try {
                return parse_atom();
            } catch (const ParseError&) {
                lex_.rewind(m);
                restore(snap);
            }
            lex_.next();  // "("
            const int inner = parse_or();
            expect_punct(")");
            return inner;
        }
        return parse_atom();
    }

    int parse_atom() {
        Poly<Integer> lhs = parse_poly();
        const Token& t = lex_.next();
        AtomOp op;
        if (t.kind == Token::Punct && t.text == "=")
            op = AtomOp::Eq;
        else if (t.kind == Token::Punct && t.text == "!=")
            op = AtomOp::Neq;
        else
            fail(t, "expected '=' or '!='");
        Poly<Integer> rhs = parse_poly();
        f_.atoms.push_back({polyops::sub(R_, lhs, rhs), op});
        return add_node({NodeKind::Atom, -1, -1, static_cast<int>(f_.atoms.size()) - 1});
    }

    Poly<Integer> parse_poly() {
        Poly<Integer> acc = parse_term();
        while (lex_.peek().kind == Token::Punct && (lex_.peek().text == "+" || lex_.peek().text == "-")) {
            const bool minus = lex_.next().text == "-";
            Poly<Integer> t = parse_term();
            acc = minus ? polyops::sub(R_, acc, t) : polyops::add(R_, acc, t);
        }
        return acc;
    }

    Poly<Integer> parse_term() {
        Poly<Integer> acc = parse_factor();
        while (lex_.peek().kind == Token::Punct && lex_.peek().text == "*") {
            lex_.next();
            acc = polyops::mul(R_, acc, parse_factor());
        }
        return acc;
    }

    Poly<Integer> parse_factor() {
        const Token& t = lex_.peek();
        if (t.kind == Token::Punct && t.text == "-") {
            lex_.next();
            return polyops::neg(R_, parse_factor());
        }
        Poly<Integer> base = parse_base();
        if (lex_.peek().kind == Token::Punct && lex_.peek().text == "^") {
            lex_.next();
            const Token& e = lex_.next();
            if (e.kind != Token::Int) fail(e, "expected integer exponent");
            if (e.value < 0 || e.value > 1000) fail(e, "exponent out of range");
            return polyops::pow(R_, std::move(base), e.value.convert_to<int>());
        }
        return base;
    }

    Poly<Integer> parse_base() {
        const Token& t = lex_.next();
        if (t.kind == Token::Int) return polyops::constant(R_, t.value);
        if (t.kind == Token::Ident) {
            if (t.text == "E" || t.text == "A" || t.text == "free" || t.text == "ext")
                fail(t, "'" + t.text + "' is reserved");
            VarId id;
            if (auto existing = f_.var_by_name(t.text))
                id = *existing;
            else {
                f_.names.push_back(t.text);
                id = static_cast<VarId>(f_.names.size()) - 1;
                matrix_introduced_.push_back(id);
            }
            return polyops::variable(R_, id);
        }
        if (t.kind == Token::Punct && t.text == "(") {
            Poly<Integer> inner = parse_poly();
            expect_punct(")");
            return inner;
        }
        fail(t, "expected polynomial");
    }

    struct Snapshot {
        std::size_t names, atoms, nodes, introduced;
    };

    Snapshot save() const {
        return {f_.names.size(), f_.atoms.size(), f_.nodes.size(), matrix_introduced_.size()};
    }

    void restore(const Snapshot& s) {
        f_.names.resize(s.names);
        f_.atoms.resize(s.atoms);
        f_.nodes.resize(s.nodes);
        matrix_introduced_.resize(s.introduced);
    }

    // Canonical VarId order: free variables in declaration order, then
    // bound variables block by block.  Keeps ids stable across
    // parse(print(f)) regardless of where a variable first occurred.
    void renumber_canonical() {
        std::vector<VarId> new_to_old;
        for (const auto& fv : f_.free) new_to_old.push_back(fv.var);
        for (const auto& b : f_.prefix)
            for (VarId v : b.vars) new_to_old.push_back(v);
        std::vector<VarId> old_to_new(f_.names.size(), -1);
        for (VarId n = 0; n < static_cast<VarId>(new_to_old.size()); ++n)
            old_to_new[static_cast<std::size_t>(new_to_old[static_cast<std::size_t>(n)])] = n;

        std::vector<std::string> names(f_.names.size());
        for (std::size_t old = 0; old < f_.names.size(); ++old)
            names[static_cast<std::size_t>(old_to_new[old])] = f_.names[old];
        f_.names = std::move(names);
        for (auto& fv : f_.free) fv.var = old_to_new[static_cast<std::size_t>(fv.var)];
        for (auto& b : f_.prefix)
            for (auto& v : b.vars) v = old_to_new[static_cast<std::size_t>(v)];
        for (auto& atom : f_.atoms) {
            std::vector<std::pair<Monomial, Integer>> terms;
            terms.reserve(atom.poly.terms.size());
            for (auto& [m, c] : atom.poly.terms) {
                Monomial nm;
                nm.powers.reserve(m.powers.size());
                for (const auto& [v, e] : m.powers) nm.powers.emplace_back(old_to_new[static_cast<std::size_t>(v)], e);
                std::sort(nm.powers.begin(), nm.powers.end());
                terms.emplace_back(std::move(nm), std::move(c));
            }
            atom.poly = polyops::normalized(R_, std::move(terms));
        }
    }

    // Variables first seen in the matrix: implicitly free of sort 1 when no
    // free clause was given, otherwise an error.
    void bind_matrix_vars() {
        if (matrix_introduced_.empty()) return;
        if (!f_.free.empty()) {
            const VarId v = matrix_introduced_.front();
            throw ParseError(1, 1, "unbound variable '" + f_.names[static_cast<std::size_t>(v)] +
                                       "' (not quantified and not in the free clause)");
        }
        for (VarId v : matrix_introduced_) f_.free.push_back({v, 1});
    }

    Lexer lex_;
    Formula f_;
    IntegerOps R_;
    std::vector<VarId> matrix_introduced_;
};

}  // namespace detail

inline Formula parse(const std::string& text) { return detail::Parser(text).parse(); }

// ---------------------------------------------------------------------------
// Printing (canonical text; parse(print(f)) == f structurally)
// ---------------------------------------------------------------------------

namespace detail {

inline std::string format_monomial(const std::vector<std::string>& names, const Monomial& m) {
    std::string s;
    for (std::size_t i = 0; i < m.powers.size(); ++i) {
        if (i) s += "*";
        s += names[static_cast<std::size_t>(m.powers[i].first)];
        if (m.powers[i].second > 1) s += "^" + std::to_string(m.powers[i].second);
    }
    return s;
}

inline bool coeff_is_one(const Integer& c) { return c == 1; }
inline bool coeff_is_neg(const Integer& c) { return c < 0; }
inline std::string coeff_abs_str(const Integer& c) { return Integer(boost::multiprecision::abs(c)).str(); }

inline std::string format_poly(const std::vector<std::string>& names, const Poly<Integer>& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const auto& [m, c] = p.terms[i];
        const bool neg = coeff_is_neg(c);
        if (i == 0)
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        const std::string mono = format_monomial(names, m);
        const std::string abs = coeff_abs_str(c);
        if (mono.empty())
            s += abs;
        else if (abs == "1")
            s += mono;
        else
            s += abs + "*" + mono;
    }
    return s;
}

// Field-coefficient polynomials print their coefficients as elements; for
// extension fields the coordinate-list form is display-only.
inline std::string format_poly(const Field& F, const std::vector<std::string>& names,
                               const Poly<std::uint32_t>& p) {
    if (p.is_zero()) return "0";
    std::string s;
    for (std::size_t i = 0; i < p.terms.size(); ++i) {
        const auto& [m, c] = p.terms[i];
        if (i) s += " + ";
        const std::string mono = format_monomial(names, m);
        if (mono.empty())
            s += F.format(c);
        else if (c == 1)
            s += mono;
        else
            s += F.format(c) + "*" + mono;
    }
    return s;
}

template <class V, class PolyFormatter>
std::string format_formula(const BasicFormula<V>& f, PolyFormatter&& fmt) {
    std::string s;
    for (const auto& fv : f.free) {
        s += "free " + f.names[static_cast<std::size_t>(fv.var)];
        if (fv.sort != 1) s += " : ext " + std::to_string(fv.sort);
        s += " . ";
    }
    for (const auto& b : f.prefix) {
        s += b.universal ? "A " : "E ";
        for (std::size_t i = 0; i < b.vars.size(); ++i) {
            if (i) s += ", ";
            s += f.names[static_cast<std::size_t>(b.vars[i])];
        }
        if (b.sort != 1) s += " : ext " + std::to_string(b.sort);
        s += " . ";
    }

    // precedence: atom > ! > & > |
    auto walk = [&](auto&& self, int node, int parent_level) -> std::string {
        const Node& n = f.nodes[static_cast<std::size_t>(node)];
        switch (n.kind) {
            case NodeKind::Atom: {
                const auto& at = f.atoms[static_cast<std::size_t>(n.atom)];
                return fmt(at.poly) + (at.op == AtomOp::Eq ? " = 0" : " != 0");
            }
            case NodeKind::Not:
                return "!(" + self(self, n.a, 0) + ")";
            case NodeKind::And: {
                std::string body = self(self, n.a, 2) + " & " + self(self, n.b, 2);
                return parent_level > 2 ? "(" + body + ")" : body;
            }
            case NodeKind::Or: {
                std::string body = self(self, n.a, 1) + " | " + self(self, n.b, 1);
                return parent_level > 1 ? "(" + body + ")" : body;
            }
        }
        throw Error("corrupt formula node");
    };
    s += walk(walk, f.root, 0);
    return s;
}

}  // namespace detail

inline std::string print(const Formula& f) {
    return detail::format_formula(f, [&](const Poly<Integer>& p) { return detail::format_poly(f.names, p); });
}

inline std::string print(const FieldFormula& f) {
    if (!f.coeff_field) throw Error("field formula without field");
    return detail::format_formula(
        f, [&](const Poly<std::uint32_t>& p) { return detail::format_poly(*f.coeff_field, f.names, p); });
}

// ---------------------------------------------------------------------------
// Reduction and substitution
// ---------------------------------------------------------------------------

// Map integer coefficients into the prime subfield of `ambient`.
inline FieldFormula reduce(const Formula& f, const Field& ambient) {
    FieldFormula out;
    out.names = f.names;
    out.prefix = f.prefix;
    out.free = f.free;
    out.nodes = f.nodes;
    out.root = f.root;
    out.coeff_field = &ambient;
    out.atoms.reserve(f.atoms.size());
    for (const auto& a : f.atoms) out.atoms.push_back({polyops::reduce(ambient, a.poly), a.op});
    return out;
}

// Fold bound values into atom coefficients; the free list shrinks by the
// bound names.  Values must lie in each variable's sort subfield.
inline FieldFormula substitute(const FieldFormula& f, const std::map<std::string, FieldElement>& binding) {
    if (binding.empty()) return f;
    const Field& F = *f.coeff_field;
    FieldFormula out = f;
    for (const auto& [name, value] : binding) {
        if (value.field != &F) throw Error("substitute: value for '" + name + "' lives in a different field");
        auto id = f.var_by_name(name);
        if (!id) throw Error("substitute: unknown variable '" + name + "'");
        if (f.is_bound(*id)) throw Error("substitute: variable '" + name + "' is quantified");
        const auto sort = f.free_sort(*id);
        if (!sort) throw Error("substitute: variable '" + name + "' is not free");
        if (F.degree() % *sort != 0 || !F.in_subfield(value.idx, *sort))
            throw Error("substitute: value for '" + name + "' is not in its sort-" + std::to_string(*sort) +
                        " subfield");
        for (auto& atom : out.atoms) atom.poly = polyops::substitute_var(F, atom.poly, *id, value.idx);
        std::erase_if(out.free, [&](const FreeVar& fv) { return fv.var == *id; });
    }
    return out;
}

inline FieldFormula substitute(const Formula& f, const std::map<std::string, FieldElement>& binding,
                               const Field& ambient) {
    return substitute(reduce(f, ambient), binding);
}

}  // namespace fqc
