#pragma once

#include <limits>
#include <map>

#include "cod/ast.hpp"

namespace cod {

// Normalized (x >= t1) and (x <= t2) window of a time restriction.
// An absent upper bound means the restriction never expires.
struct ClockInterval {
    ClockId clock = kGlobalClock;
    int lower = 0;
    std::optional<int> upper;  // nullopt = unbounded

    bool unbounded() const { return !upper.has_value(); }
    bool trivial() const { return lower == 0 && unbounded(); }
    bool operator==(const ClockInterval&) const = default;
};

// Clocks of a compiled network: T plus one t_name per clause referenced by a
// relative restriction somewhere in the contract.
struct ClockTable {
    std::set<ClockId> entries = {kGlobalClock};

    bool contains(const ClockId& c) const { return entries.count(c) > 0; }
    void add(const ClockId& c) { entries.insert(c); }
};

// Tightest interval implied by the conjuncts of tr. The restriction must
// constrain a single clock; difference constraints are not supported.
inline ClockInterval normalize_restriction(const TimeRestriction& tr) {
    ClockInterval iv;
    if (tr.empty()) return iv;  // (T, 0, unbounded)

    std::optional<ClockId> clock;
    long long lo = 0;
    long long hi = std::numeric_limits<long long>::max();
    for (const auto& a : tr.conjuncts) {
        if (a.minus_clock) {
            throw Error("MixedClocks", "clock-difference constraints are not supported");
        }
        ClockId c = a.clock.clock_id();
        if (clock && *clock != c) {
            throw Error("MixedClocks", "time restriction constrains more than one clock");
        }
        clock = c;
        switch (a.op) {
            case Cmp::Le: hi = std::min<long long>(hi, a.bound); break;
            case Cmp::Lt: hi = std::min<long long>(hi, a.bound - 1); break;
            case Cmp::Eq:
                lo = std::max<long long>(lo, a.bound);
                hi = std::min<long long>(hi, a.bound);
                break;
            case Cmp::Gt: lo = std::max<long long>(lo, a.bound + 1); break;
            case Cmp::Ge: lo = std::max<long long>(lo, a.bound); break;
        }
    }
    if (lo > hi) {
        throw Error("ContradictoryRestriction", "time restriction implies t1 > t2");
    }
    iv.clock = *clock;
    iv.lower = static_cast<int>(lo);
    if (hi != std::numeric_limits<long long>::max()) iv.upper = static_cast<int>(hi);
    return iv;
}

// Intersection of two windows on the same clock.
inline ClockInterval intersect(const ClockInterval& a, const ClockInterval& b) {
    if (a.clock != b.clock) {
        throw Error("MixedClocks", "cannot intersect intervals over different clocks");
    }
    ClockInterval out;
    out.clock = a.clock;
    out.lower = std::max(a.lower, b.lower);
    if (a.upper && b.upper) {
        out.upper = std::min(*a.upper, *b.upper);
    } else if (a.upper) {
        out.upper = a.upper;
    } else {
        out.upper = b.upper;
    }
    if (out.upper && out.lower > *out.upper) {
        throw Error("ContradictoryRestriction", "interval intersection is empty");
    }
    return out;
}

// ── Guard evaluation and negation ───────────────────────────────────────────

using Valuation = std::map<std::string, int>;

inline bool eval_atom(const VarAtom& a, const Valuation& val) {
    auto it = val.find(a.var);
    if (it == val.end()) throw Error("MissingVariable", "variable '" + a.var + "' not in valuation");
    long long lhs = it->second;
    if (a.minus_var) {
        auto jt = val.find(*a.minus_var);
        if (jt == val.end())
            throw Error("MissingVariable", "variable '" + *a.minus_var + "' not in valuation");
        lhs -= jt->second;
    }
    return cmp_holds(lhs, a.op, a.bound);
}

// True iff every conjunct holds; the empty guard is true.
inline bool eval_guard(const Guard& g, const Valuation& val) {
    for (const auto& a : g.conjuncts) {
        if (!eval_atom(a, val)) return false;
    }
    return true;
}

// Integer complement of a conjunctive guard as a family of single-conjunct
// guards: a valuation satisfies some member iff it falsifies g. Atoms whose
// complement is unsatisfiable over the naturals are dropped.
inline std::vector<Guard> negate_guard(const Guard& g) {
    if (g.empty()) throw Error("EmptyGuard", "cannot negate the empty guard");
    std::vector<Guard> out;
    auto push = [&](const VarAtom& base, Cmp op, int bound) {
        // v >= 0 always holds for naturals, so v <= -1 is unsatisfiable.
        // Difference atoms can go negative and keep every complement.
        if (!base.minus_var && op == Cmp::Le && bound < 0) return;
        VarAtom a = base;
        a.op = op;
        a.bound = bound;
        out.push_back(Guard{{a}});
    };
    for (const auto& a : g.conjuncts) {
        switch (a.op) {
            case Cmp::Le: push(a, Cmp::Ge, a.bound + 1); break;
            case Cmp::Lt: push(a, Cmp::Ge, a.bound); break;
            case Cmp::Eq:
                push(a, Cmp::Le, a.bound - 1);
                push(a, Cmp::Ge, a.bound + 1);
                break;
            case Cmp::Gt: push(a, Cmp::Le, a.bound); break;
            case Cmp::Ge: push(a, Cmp::Le, a.bound - 1); break;
        }
    }
    return out;
}

}  // namespace cod
