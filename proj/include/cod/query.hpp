#pragma once

#include <memory>

#include "cod/nta.hpp"

namespace cod {

// Query text syntax mirrors the UPPAAL subset used for contract properties:
//   E<> expr      reachability
//   A[] expr      safety
//   p --> q       leads-to
// with atoms: Auto.node, clock comparisons, V[name], S[name], P[name],
// done[agent.action], booleans and connectives and/or/not.

enum class QueryKind { ExistsEventually, Always, LeadsTo };

struct QExpr;
using QExprPtr = std::shared_ptr<QExpr>;

struct QExpr {
    enum class Op {
        True,
        False,
        Location,   // name = "Auto.node"
        Clock,      // clock cmp bound
        SetMember,  // set_array in {V,S,P}, clause, expected
        Done,       // name = "agent.action"
        Not,
        And,
        Or,
    };
    Op op = Op::True;
    std::string name;
    char set_array = 'V';
    bool expected = true;
    Cmp cmp = Cmp::Le;
    int bound = 0;
    QExprPtr lhs, rhs;
};

struct Query {
    QueryKind kind = QueryKind::ExistsEventually;
    QExprPtr expr;   // E<> / A[]
    QExprPtr lhs;    // p of leads-to
    QExprPtr rhs;    // q of leads-to
    std::string text;
};

namespace qdetail {

struct Cursor {
    std::string s;
    size_t i = 0;

    void skip_ws() {
        while (i < s.size() && std::isspace(static_cast<unsigned char>(s[i]))) i++;
    }
    bool done() {
        skip_ws();
        return i >= s.size();
    }
    bool lit(const std::string& t) {
        skip_ws();
        if (s.compare(i, t.size(), t) == 0) {
            i += t.size();
            return true;
        }
        return false;
    }
    // word: keyword followed by a non-name character
    bool word(const std::string& t) {
        skip_ws();
        if (s.compare(i, t.size(), t) != 0) return false;
        size_t j = i + t.size();
        if (j < s.size() && (std::isalnum(static_cast<unsigned char>(s[j])) || s[j] == '_'))
            return false;
        i = j;
        return true;
    }
    static bool name_char(char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '~' ||
               c == '*';
    }
    std::string name() {
        skip_ws();
        size_t j = i;
        while (j < s.size() && name_char(s[j])) j++;
        if (j == i) throw Error("QuerySyntax", "expected a name at offset " + std::to_string(i));
        std::string out = s.substr(i, j - i);
        i = j;
        return out;
    }
    int nat() {
        skip_ws();
        size_t j = i;
        while (j < s.size() && std::isdigit(static_cast<unsigned char>(s[j]))) j++;
        if (j == i) throw Error("QuerySyntax", "expected a number at offset " + std::to_string(i));
        int v = std::stoi(s.substr(i, j - i));
        i = j;
        return v;
    }
    std::optional<Cmp> cmp_op() {
        skip_ws();
        if (lit("<=")) return Cmp::Le;
        if (lit(">=")) return Cmp::Ge;
        if (lit("==")) return Cmp::Eq;
        if (lit("<")) return Cmp::Lt;
        if (lit(">")) return Cmp::Gt;
        if (lit("=")) return Cmp::Eq;
        return std::nullopt;
    }
};

inline QExprPtr parse_or(Cursor& c);

inline QExprPtr parse_primary(Cursor& c) {
    auto e = std::make_shared<QExpr>();
    if (c.lit("(")) {
        e = parse_or(c);
        if (!c.lit(")")) throw Error("QuerySyntax", "missing ')'");
        return e;
    }
    if (c.word("true")) {
        e->op = QExpr::Op::True;
        return e;
    }
    if (c.word("false")) {
        e->op = QExpr::Op::False;
        return e;
    }
    if (c.word("not") || c.lit("!")) {
        e->op = QExpr::Op::Not;
        e->lhs = parse_primary(c);
        return e;
    }
    c.skip_ws();
    // V[...] / S[...] / P[...] / done[...]
    for (const char* arr : {"V", "S", "P"}) {
        size_t save = c.i;
        if (c.word(arr) && c.lit("[")) {
            e->op = QExpr::Op::SetMember;
            e->set_array = arr[0];
            e->name = c.name();
            if (!c.lit("]")) throw Error("QuerySyntax", "missing ']'");
            e->expected = true;
            size_t save2 = c.i;
            if (c.lit("==")) {
                if (c.word("true")) {
                    e->expected = true;
                } else if (c.word("false")) {
                    e->expected = false;
                } else {
                    c.i = save2;
                }
            }
            return e;
        }
        c.i = save;
    }
    {
        size_t save = c.i;
        if (c.word("done") && c.lit("[")) {
            e->op = QExpr::Op::Done;
            e->name = c.name();
            if (!c.lit("]")) throw Error("QuerySyntax", "missing ']'");
            return e;
        }
        c.i = save;
    }
    std::string n = c.name();
    if (auto op = c.cmp_op()) {
        e->op = QExpr::Op::Clock;
        e->name = n;
        e->cmp = *op;
        e->bound = c.nat();
        return e;
    }
    // a bare dotted name is a location predicate
    e->op = QExpr::Op::Location;
    e->name = n;
    return e;
}

inline QExprPtr parse_and(Cursor& c) {
    auto lhs = parse_primary(c);
    while (c.word("and") || c.lit("&&")) {
        auto e = std::make_shared<QExpr>();
        e->op = QExpr::Op::And;
        e->lhs = lhs;
        e->rhs = parse_primary(c);
        lhs = e;
    }
    return lhs;
}

inline QExprPtr parse_or(Cursor& c) {
    auto lhs = parse_and(c);
    while (c.word("or") || c.lit("||")) {
        auto e = std::make_shared<QExpr>();
        e->op = QExpr::Op::Or;
        e->lhs = lhs;
        e->rhs = parse_and(c);
        lhs = e;
    }
    return lhs;
}

inline QExprPtr parse_expr_text(const std::string& text) {
    Cursor c{text};
    auto e = parse_or(c);
    if (!c.done()) {
        throw Error("QuerySyntax", "trailing input at offset " + std::to_string(c.i));
    }
    return e;
}

}  // namespace qdetail

inline Query parse_query(const std::string& text) {
    Query q;
    q.text = text;
    // leads-to binds loosest
    if (auto pos = text.find("-->"); pos != std::string::npos) {
        q.kind = QueryKind::LeadsTo;
        q.lhs = qdetail::parse_expr_text(text.substr(0, pos));
        q.rhs = qdetail::parse_expr_text(text.substr(pos + 3));
        return q;
    }
    qdetail::Cursor c{text};
    if (c.lit("E<>")) {
        q.kind = QueryKind::ExistsEventually;
    } else if (c.lit("A[]")) {
        q.kind = QueryKind::Always;
    } else {
        throw Error("QuerySyntax", "query must start with E<>, A[] or contain -->");
    }
    q.expr = qdetail::parse_expr_text(text.substr(c.i));
    return q;
}

// Largest constant compared against a clock anywhere in the query; feeds the
// exploration ceiling so capped clocks never confuse query atoms.
inline int query_clock_ceiling(const QExpr& e) {
    int m = 0;
    if (e.op == QExpr::Op::Clock) m = e.bound;
    if (e.lhs) m = std::max(m, query_clock_ceiling(*e.lhs));
    if (e.rhs) m = std::max(m, query_clock_ceiling(*e.rhs));
    return m;
}

inline int query_clock_ceiling(const Query& q) {
    int m = 0;
    if (q.expr) m = std::max(m, query_clock_ceiling(*q.expr));
    if (q.lhs) m = std::max(m, query_clock_ceiling(*q.lhs));
    if (q.rhs) m = std::max(m, query_clock_ceiling(*q.rhs));
    return m;
}

}  // namespace cod
