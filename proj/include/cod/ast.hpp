#pragma once

#include <map>
#include <memory>
#include <variant>

#include "cod/basics.hpp"

namespace cod {

// ── Guards over integer variables ───────────────────────────────────────────
// Atomic constraint: v ~ n  or  v - w ~ n.

struct VarAtom {
    std::string var;
    std::optional<std::string> minus_var;  // set for difference constraints
    Cmp op = Cmp::Le;
    int bound = 0;

    bool operator==(const VarAtom&) const = default;
};

// Conjunction of atoms; an empty conjunct list is the absent guard (true).
struct Guard {
    std::vector<VarAtom> conjuncts;

    bool empty() const { return conjuncts.empty(); }
    bool operator==(const Guard&) const = default;
};

// ── Time restrictions over clocks ───────────────────────────────────────────

struct ClockRef {
    bool absolute = true;        // true: global clock T
    ClauseName reference;        // set when relative: after(reference)

    ClockId clock_id() const { return absolute ? kGlobalClock : relative_clock(reference); }
    bool operator==(const ClockRef&) const = default;
};

// Atomic constraint: x ~ n  or  x - y ~ n.
struct ClockAtom {
    ClockRef clock;
    std::optional<ClockRef> minus_clock;
    Cmp op = Cmp::Le;
    int bound = 0;

    bool operator==(const ClockAtom&) const = default;
};

struct TimeRestriction {
    std::vector<ClockAtom> conjuncts;

    bool empty() const { return conjuncts.empty(); }
    bool operator==(const TimeRestriction&) const = default;
};

// ── Contract tree ───────────────────────────────────────────────────────────

enum class DeonticKind { Obligation, Permission, Prohibition };

inline const char* deontic_text(DeonticKind k) {
    switch (k) {
        case DeonticKind::Obligation: return "obligation";
        case DeonticKind::Permission: return "permission";
        case DeonticKind::Prohibition: return "prohibition";
    }
    return "?";
}

enum class RefineKind { And, Or, Seq };

inline const char* refine_text(RefineKind k) {
    switch (k) {
        case RefineKind::And: return "and";
        case RefineKind::Or: return "or";
        case RefineKind::Seq: return "seq";
    }
    return "?";
}

struct Box;

// Leaf action.
struct AtomicBody {
    ActionId action;
};

// Deontic operator applied over an action subtree. The subtree is made of
// plain boxes: atomic actions or refinements, with no further decoration.
struct DeonticBody {
    DeonticKind op = DeonticKind::Obligation;
    std::unique_ptr<Box> action;
};

struct RefinementBody {
    RefineKind kind = RefineKind::And;
    std::vector<std::unique_ptr<Box>> children;
};

// The universal node of a contract tree. Boxes directly under a deontic
// operator are anonymous when they wrap a bare action (name empty).
struct Box {
    std::optional<AgentId> agent;
    ClauseName name;
    Guard guard;
    TimeRestriction trestr;
    std::variant<AtomicBody, DeonticBody, RefinementBody> body;
    std::unique_ptr<Box> reparation;

    bool is_atomic() const { return std::holds_alternative<AtomicBody>(body); }
    bool is_deontic() const { return std::holds_alternative<DeonticBody>(body); }
    bool is_refinement() const { return std::holds_alternative<RefinementBody>(body); }
    const AtomicBody& atomic() const { return std::get<AtomicBody>(body); }
    const DeonticBody& deontic() const { return std::get<DeonticBody>(body); }
    const RefinementBody& refinement() const { return std::get<RefinementBody>(body); }
};

struct Contract {
    std::string name;
    std::string unit;                          // informational base time unit
    std::map<std::string, int> variables;      // declared integer variables
    std::unique_ptr<Box> root;
};

// ── Deep copies (Box holds unique_ptrs) ─────────────────────────────────────

inline std::unique_ptr<Box> clone(const Box& b) {
    auto out = std::make_unique<Box>();
    out->agent = b.agent;
    out->name = b.name;
    out->guard = b.guard;
    out->trestr = b.trestr;
    if (b.is_atomic()) {
        out->body = AtomicBody{b.atomic().action};
    } else if (b.is_deontic()) {
        out->body = DeonticBody{b.deontic().op, clone(*b.deontic().action)};
    } else {
        RefinementBody r;
        r.kind = b.refinement().kind;
        for (const auto& c : b.refinement().children) r.children.push_back(clone(*c));
        out->body = std::move(r);
    }
    if (b.reparation) out->reparation = clone(*b.reparation);
    return out;
}

inline Contract clone(const Contract& c) {
    Contract out;
    out.name = c.name;
    out.unit = c.unit;
    out.variables = c.variables;
    out.root = c.root ? clone(*c.root) : nullptr;
    return out;
}

// ── Structural equality ─────────────────────────────────────────────────────

inline bool equal(const Box& a, const Box& b) {
    if (a.agent != b.agent || a.name != b.name) return false;
    if (!(a.guard == b.guard) || !(a.trestr == b.trestr)) return false;
    if (a.body.index() != b.body.index()) return false;
    if (a.is_atomic()) {
        if (a.atomic().action != b.atomic().action) return false;
    } else if (a.is_deontic()) {
        if (a.deontic().op != b.deontic().op) return false;
        if (!equal(*a.deontic().action, *b.deontic().action)) return false;
    } else {
        const auto& ra = a.refinement();
        const auto& rb = b.refinement();
        if (ra.kind != rb.kind || ra.children.size() != rb.children.size()) return false;
        for (size_t i = 0; i < ra.children.size(); ++i) {
            if (!equal(*ra.children[i], *rb.children[i])) return false;
        }
    }
    if (static_cast<bool>(a.reparation) != static_cast<bool>(b.reparation)) return false;
    if (a.reparation && !equal(*a.reparation, *b.reparation)) return false;
    return true;
}

inline bool equal(const Contract& a, const Contract& b) {
    if (a.name != b.name || a.unit != b.unit || a.variables != b.variables) return false;
    if (static_cast<bool>(a.root) != static_cast<bool>(b.root)) return false;
    return !a.root || equal(*a.root, *b.root);
}

// Walk every box in the tree, reparations and deontic action subtrees
// included.
template <typename F>
void for_each_box(const Box& box, F&& fn) {
    fn(box);
    if (box.is_deontic()) {
        for_each_box(*box.deontic().action, fn);
    } else if (box.is_refinement()) {
        for (const auto& c : box.refinement().children) for_each_box(*c, fn);
    }
    if (box.reparation) for_each_box(*box.reparation, fn);
}

}  // namespace cod
