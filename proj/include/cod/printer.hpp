#pragma once

#include <sstream>

#include "cod/ast.hpp"

namespace cod {

namespace detail {

inline void print_guard(std::ostream& os, const Guard& g) {
    for (size_t i = 0; i < g.conjuncts.size(); ++i) {
        const auto& a = g.conjuncts[i];
        if (i) os << " and ";
        os << a.var;
        if (a.minus_var) os << " - " << *a.minus_var;
        os << " " << cmp_text(a.op) << " " << a.bound;
    }
}

inline void print_clock_ref(std::ostream& os, const ClockRef& r) {
    if (r.absolute) {
        os << "T";
    } else {
        os << "after(" << r.reference << ")";
    }
}

inline void print_trestr(std::ostream& os, const TimeRestriction& tr) {
    for (size_t i = 0; i < tr.conjuncts.size(); ++i) {
        const auto& a = tr.conjuncts[i];
        if (i) os << " and ";
        print_clock_ref(os, a.clock);
        if (a.minus_clock) {
            os << " - ";
            print_clock_ref(os, *a.minus_clock);
        }
        os << " " << cmp_text(a.op) << " " << a.bound;
    }
}

inline void indent(std::ostream& os, int n) {
    for (int i = 0; i < n; ++i) os << "  ";
}

inline void print_acttree(std::ostream& os, const Box& t, int depth) {
    if (t.is_atomic()) {
        os << "act " << t.atomic().action;
        return;
    }
    os << refine_text(t.refinement().kind) << " {\n";
    for (const auto& c : t.refinement().children) {
        indent(os, depth + 1);
        os << "clause " << c->name << " { ";
        print_acttree(os, *c, depth + 1);
        os << " }\n";
    }
    indent(os, depth);
    os << "}";
}

inline void print_boxbody(std::ostream& os, const Box& b, int depth) {
    os << "{\n";
    if (!b.guard.empty()) {
        indent(os, depth + 1);
        os << "when ";
        print_guard(os, b.guard);
        os << ";\n";
    }
    if (!b.trestr.empty()) {
        indent(os, depth + 1);
        os << "within ";
        print_trestr(os, b.trestr);
        os << ";\n";
    }
    indent(os, depth + 1);
    if (b.is_deontic()) {
        if (b.agent) os << "agent " << *b.agent << " ";
        os << deontic_text(b.deontic().op) << " ";
        print_acttree(os, *b.deontic().action, depth + 1);
        if (b.reparation) {
            os << " reparation ";
            print_boxbody(os, *b.reparation, depth + 1);
        }
        os << ";\n";
    } else {
        os << refine_text(b.refinement().kind) << " {\n";
        for (const auto& c : b.refinement().children) {
            indent(os, depth + 2);
            os << "clause " << c->name << " ";
            print_boxbody(os, *c, depth + 2);
            os << "\n";
        }
        indent(os, depth + 1);
        os << "}\n";
    }
    indent(os, depth);
    os << "}";
}

}  // namespace detail

// Canonical text form; parse_contract(render_contract(c)) == c for valid c.
inline std::string render_contract(const Contract& c) {
    std::ostringstream os;
    if (!c.unit.empty()) os << "unit " << c.unit << ";\n";
    if (!c.variables.empty()) {
        os << "vars {\n";
        for (const auto& [v, n] : c.variables) os << "  " << v << " = " << n << ";\n";
        os << "}\n";
    }
    os << "contract " << c.name << " ";
    detail::print_boxbody(os, *c.root, 0);
    os << "\n";
    return os.str();
}

}  // namespace cod
