#pragma once

#include <set>

#include "cod/ast.hpp"
#include "cod/lexer.hpp"

namespace cod {

struct ParseResult {
    std::optional<Contract> contract;
    Diagnostics diagnostics;

    bool ok() const { return contract.has_value() && diagnostics.empty(); }
};

namespace detail {

struct SyntaxBail {};

class Parser {
public:
    explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

    ParseResult run() {
        ParseResult res;
        try {
            Contract c = file();
            expect(Tok::Eof, "end of input");
            resolve(c);
            res.contract = std::move(c);
        } catch (SyntaxBail&) {
            // diagnostics already recorded
        }
        res.diagnostics = std::move(diags_);
        return res;
    }

private:
    std::vector<Token> toks_;
    size_t pos_ = 0;
    Diagnostics diags_;

    const Token& cur() const { return toks_[pos_]; }
    const Token& next() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

    [[noreturn]] void fail(const std::string& expected) {
        diags_.push_back({cur().pos, "SyntaxError",
                          "expected " + expected + ", found '" +
                              (cur().kind == Tok::Eof ? "<eof>" : cur().text) + "'"});
        throw SyntaxBail{};
    }

    bool at_kw(const char* kw) const {
        return cur().kind == Tok::Ident && cur().text == kw;
    }

    bool eat_kw(const char* kw) {
        if (!at_kw(kw)) return false;
        next();
        return true;
    }

    void expect_kw(const char* kw) {
        if (!eat_kw(kw)) fail(std::string("'") + kw + "'");
    }

    Token expect(Tok k, const std::string& what) {
        if (cur().kind != k) fail(what);
        return next();
    }

    std::string ident() {
        if (cur().kind != Tok::Ident) fail("identifier");
        return next().text;
    }

    int nat() {
        if (cur().kind != Tok::Nat) fail("natural number");
        return static_cast<int>(next().value);
    }

    std::optional<Cmp> peek_cmp() {
        switch (cur().kind) {
            case Tok::CmpLe: return Cmp::Le;
            case Tok::CmpLt: return Cmp::Lt;
            case Tok::CmpEq: return Cmp::Eq;
            case Tok::CmpGt: return Cmp::Gt;
            case Tok::CmpGe: return Cmp::Ge;
            default: return std::nullopt;
        }
    }

    Cmp cmp_op() {
        auto c = peek_cmp();
        if (!c) fail("comparison operator");
        next();
        return *c;
    }

    // file := header* contract
    Contract file() {
        Contract c;
        for (;;) {
            if (eat_kw("unit")) {
                c.unit = ident();
                expect(Tok::Semi, "';'");
            } else if (eat_kw("vars")) {
                expect(Tok::LBrace, "'{'");
                while (cur().kind != Tok::RBrace) {
                    SourcePos p = cur().pos;
                    std::string v = ident();
                    expect(Tok::CmpEq, "'='");
                    int n = nat();
                    expect(Tok::Semi, "';'");
                    if (!c.variables.emplace(v, n).second) {
                        diags_.push_back({p, "DuplicateName", "variable '" + v + "' declared twice"});
                    }
                }
                next();  // }
            } else {
                break;
            }
        }
        expect_kw("contract");
        c.name = ident();
        c.root = boxbody(c.name);
        return c;
    }

    // boxbody := "{" opts (norm | refine) "}"
    std::unique_ptr<Box> boxbody(const ClauseName& name) {
        auto box = std::make_unique<Box>();
        box->name = name;
        expect(Tok::LBrace, "'{'");
        if (eat_kw("when")) {
            box->guard = guard();
            expect(Tok::Semi, "';'");
        }
        if (eat_kw("within")) {
            box->trestr = trestr();
            expect(Tok::Semi, "';'");
        }
        if (at_kw("and") || at_kw("or") || at_kw("seq")) {
            refine(*box);
        } else {
            norm(*box);
        }
        expect(Tok::RBrace, "'}'");
        return box;
    }

    // norm := ("agent" IDENT)? deon acttree ("reparation" boxbody)? ";"
    void norm(Box& box) {
        if (eat_kw("agent")) box.agent = ident();
        DeonticBody d;
        if (eat_kw("obligation")) {
            d.op = DeonticKind::Obligation;
        } else if (eat_kw("permission")) {
            d.op = DeonticKind::Permission;
        } else if (eat_kw("prohibition")) {
            d.op = DeonticKind::Prohibition;
        } else {
            fail("deontic operator or refinement");
        }
        d.action = acttree("");
        box.body = std::move(d);
        if (at_kw("reparation")) {
            SourcePos p = cur().pos;
            next();
            if (box.deontic().op == DeonticKind::Permission) {
                diags_.push_back({p, "ReparationOnPermission",
                                  "clause '" + box.name + "': permission carries no reparation"});
            }
            box.reparation = boxbody(box.name + "_rep");
        }
        expect(Tok::Semi, "';'");
    }

    // acttree := "act" IDENT | ("and"|"or"|"seq") "{" named (","? named)+ "}"
    // named   := "clause" IDENT "{" acttree "}"
    std::unique_ptr<Box> acttree(const ClauseName& name) {
        auto box = std::make_unique<Box>();
        box->name = name;
        if (eat_kw("act")) {
            box->body = AtomicBody{ident()};
            return box;
        }
        RefinementBody r;
        r.kind = refine_kind();
        expect(Tok::LBrace, "'{'");
        do {
            expect_kw("clause");
            std::string nm = ident();
            expect(Tok::LBrace, "'{'");
            r.children.push_back(acttree(nm));
            expect(Tok::RBrace, "'}'");
            if (cur().kind == Tok::Comma) next();
        } while (at_kw("clause"));
        expect(Tok::RBrace, "'}'");
        if (r.children.size() < 2) fail("at least two clauses in a refinement");
        box->body = std::move(r);
        return box;
    }

    RefineKind refine_kind() {
        if (eat_kw("and")) return RefineKind::And;
        if (eat_kw("or")) return RefineKind::Or;
        if (eat_kw("seq")) return RefineKind::Seq;
        fail("'and', 'or' or 'seq'");
    }

    // refine := ("and"|"or"|"seq") "{" clause (","? clause)+ "}"
    void refine(Box& box) {
        RefinementBody r;
        r.kind = refine_kind();
        expect(Tok::LBrace, "'{'");
        do {
            expect_kw("clause");
            std::string nm = ident();
            r.children.push_back(boxbody(nm));
            if (cur().kind == Tok::Comma) next();
        } while (at_kw("clause"));
        expect(Tok::RBrace, "'}'");
        if (r.children.size() < 2) fail("at least two clauses in a refinement");
        box.body = std::move(r);
    }

    // guard := atom ("and" atom)*     atom := v ~ n | v - w ~ n
    Guard guard() {
        Guard g;
        do {
            VarAtom a;
            a.var = ident();
            if (cur().kind == Tok::Minus) {
                next();
                a.minus_var = ident();
            }
            a.op = cmp_op();
            a.bound = nat();
            g.conjuncts.push_back(std::move(a));
        } while (eat_kw("and"));
        return g;
    }

    // trestr := catom ("and" catom)*   catom := cref ("-" cref)? ~ n
    // cref := "T" | "after" "(" IDENT ")"
    ClockRef clock_ref() {
        if (eat_kw("after")) {
            expect(Tok::LParen, "'('");
            ClockRef r;
            r.absolute = false;
            r.reference = ident();
            expect(Tok::RParen, "')'");
            return r;
        }
        std::string id = ident();
        if (id != "T") fail("'T' or 'after(...)'");
        return ClockRef{};
    }

    TimeRestriction trestr() {
        TimeRestriction tr;
        do {
            ClockAtom a;
            a.clock = clock_ref();
            if (cur().kind == Tok::Minus) {
                next();
                a.minus_clock = clock_ref();
            }
            a.op = cmp_op();
            a.bound = nat();
            tr.conjuncts.push_back(std::move(a));
        } while (eat_kw("and"));
        return tr;
    }

    // Post-parse resolution: duplicate clause names, undeclared guard
    // variables, relative clocks naming nonexistent clauses.
    void resolve(const Contract& c) {
        std::set<ClauseName> names;
        for_each_box(*c.root, [&](const Box& b) {
            if (!b.name.empty() && !names.insert(b.name).second) {
                diags_.push_back(
                    {{0, 0}, "DuplicateName", "clause name '" + b.name + "' is not unique"});
            }
            for (const auto& a : b.guard.conjuncts) {
                if (!c.variables.count(a.var)) {
                    diags_.push_back({{0, 0}, "UndeclaredVariable",
                                      "guard variable '" + a.var + "' not declared in vars"});
                }
                if (a.minus_var && !c.variables.count(*a.minus_var)) {
                    diags_.push_back({{0, 0}, "UndeclaredVariable",
                                      "guard variable '" + *a.minus_var + "' not declared in vars"});
                }
            }
        });
        for_each_box(*c.root, [&](const Box& b) {
            auto check_ref = [&](const ClockRef& r) {
                if (!r.absolute && !names.count(r.reference)) {
                    diags_.push_back({{0, 0}, "UnknownClauseReference",
                                      "after(" + r.reference + ") names no clause in the contract"});
                }
            };
            for (const auto& a : b.trestr.conjuncts) {
                check_ref(a.clock);
                if (a.minus_clock) check_ref(*a.minus_clock);
            }
        });
    }
};

}  // namespace detail

inline ParseResult parse_contract(const std::string& text) {
    return detail::Parser(lex(text)).run();
}

}  // namespace cod
