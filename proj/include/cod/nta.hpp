#pragma once

#include <algorithm>
#include <map>

#include "cod/temporal.hpp"

namespace cod {

enum class NodeRole { Init, End, Time, Skip, Syn, Final, Plain };

inline const char* role_text(NodeRole r) {
    switch (r) {
        case NodeRole::Init: return "init";
        case NodeRole::End: return "end";
        case NodeRole::Time: return "time";
        case NodeRole::Skip: return "skip";
        case NodeRole::Syn: return "syn";
        case NodeRole::Final: return "final";
        case NodeRole::Plain: return "plain";
    }
    return "?";
}

struct Node {
    NodeId id;
    NodeRole role = NodeRole::Plain;
    // Static display annotations, drawn between braces next to the node.
    std::set<ClauseName> annot_v, annot_s, annot_p;
};

enum class EffectKind { AddViolation, AddSatisfaction, AddPermission, ClearViolation };

inline const char* effect_text(EffectKind k) {
    switch (k) {
        case EffectKind::AddViolation: return "V+";
        case EffectKind::AddSatisfaction: return "S+";
        case EffectKind::AddPermission: return "P+";
        case EffectKind::ClearViolation: return "V-";
    }
    return "?";
}

struct SetEffect {
    EffectKind kind = EffectKind::AddSatisfaction;
    ClauseName clause;

    bool operator==(const SetEffect&) const = default;
    auto operator<=>(const SetEffect&) const = default;
};

struct ActionLabel {
    ActionId action;
    AgentId agent;

    bool operator==(const ActionLabel&) const = default;
};

enum class SyncDir { Send, Receive };

struct SyncLabel {
    ChannelId channel;
    SyncDir dir = SyncDir::Send;

    bool operator==(const SyncLabel&) const = default;
};

// Point clock guard x == n (the timeout guard of a deontic window).
struct ClockPoint {
    ClockId clock;
    int value = 0;

    bool operator==(const ClockPoint&) const = default;
};

struct Edge {
    NodeId source;
    NodeId target;
    Guard guard;                            // variable guard (conjunction)
    std::vector<ClockInterval> windows;     // conjunction of clock windows
    std::optional<ClockPoint> point_guard;  // x == n
    std::optional<ActionLabel> action;
    std::optional<SyncLabel> sync;
    std::set<ClockId> resets;
    std::vector<SetEffect> effects;
    bool urgent = false;
};

// Invariant entry: conjunct x <= bound on a location.
struct InvariantAtom {
    ClockId clock;
    int bound = 0;

    bool operator==(const InvariantAtom&) const = default;
};

struct ExtTimedAutomaton {
    AutomatonId name;
    std::vector<Node> nodes;
    NodeId initial;
    std::vector<Edge> edges;
    std::map<NodeId, std::vector<InvariantAtom>> invariants;

    Node* find_node(const NodeId& id) {
        for (auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    const Node* find_node(const NodeId& id) const {
        for (const auto& n : nodes)
            if (n.id == id) return &n;
        return nullptr;
    }
    bool has_node(const NodeId& id) const { return find_node(id) != nullptr; }

    void add_invariant(const NodeId& node, const InvariantAtom& atom) {
        auto& list = invariants[node];
        if (std::find(list.begin(), list.end(), atom) == list.end()) list.push_back(atom);
    }
};

struct Channel {
    ChannelId id;
    bool urgent = true;
};

struct Nta {
    std::vector<ExtTimedAutomaton> automata;
    std::vector<Channel> channels;
    ClockTable clock_table;
    Valuation variables;
    std::map<ClauseName, DeonticKind> clause_index;
};

// ── Run-state sets ──────────────────────────────────────────────────────────

struct StateSets {
    std::set<ClauseName> violated;
    std::set<ClauseName> satisfied;
    std::set<ClauseName> permitted;

    bool operator==(const StateSets&) const = default;
    auto operator<=>(const StateSets&) const = default;
};

// Effects applied left to right; each is idempotent.
inline StateSets apply_effects(StateSets sets, const std::vector<SetEffect>& effects) {
    for (const auto& e : effects) {
        switch (e.kind) {
            case EffectKind::AddViolation: sets.violated.insert(e.clause); break;
            case EffectKind::AddSatisfaction: sets.satisfied.insert(e.clause); break;
            case EffectKind::AddPermission: sets.permitted.insert(e.clause); break;
            case EffectKind::ClearViolation: sets.violated.erase(e.clause); break;
        }
    }
    return sets;
}

// ── Orderings on nodes and edges ────────────────────────────────────────────

enum class Ordering { Better, Worse, Equal, Incomparable };

namespace detail {
inline bool proper_subset(const std::set<ClauseName>& a, const std::set<ClauseName>& b) {
    return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
}
}  // namespace detail

// n1 is better than n2 iff V1 is a proper subset of V2, or the violation sets
// are equal and S1 is a proper superset of S2. Permission sets play no part.
inline Ordering compare_nodes(const StateSets& s1, const StateSets& s2) {
    if (detail::proper_subset(s1.violated, s2.violated)) return Ordering::Better;
    if (detail::proper_subset(s2.violated, s1.violated)) return Ordering::Worse;
    if (s1.violated == s2.violated) {
        if (detail::proper_subset(s2.satisfied, s1.satisfied)) return Ordering::Better;
        if (detail::proper_subset(s1.satisfied, s2.satisfied)) return Ordering::Worse;
        if (s1.satisfied == s2.satisfied) return Ordering::Equal;
    }
    return Ordering::Incomparable;
}

// Edges compare only when they leave the same source node; then the targets'
// sets decide.
inline Ordering compare_edges(const NodeId& source1, const StateSets& target1,
                              const NodeId& source2, const StateSets& target2) {
    if (source1 != source2) return Ordering::Incomparable;
    return compare_nodes(target1, target2);
}

// ── Well-formedness ─────────────────────────────────────────────────────────

// Structural checks every compiled network must pass: unique node ids, edge
// endpoints present, one sender and one receiver side per channel, T never
// reset, clause_index covering every effect.
inline std::vector<std::string> well_formedness_issues(const Nta& nta) {
    std::vector<std::string> issues;
    std::map<ChannelId, int> senders, receivers;
    for (const auto& a : nta.automata) {
        std::set<NodeId> ids;
        for (const auto& n : a.nodes) {
            if (!ids.insert(n.id).second) {
                issues.push_back(a.name + ": duplicate node id " + n.id);
            }
        }
        if (!ids.count(a.initial)) {
            issues.push_back(a.name + ": initial node " + a.initial + " missing");
        }
        for (const auto& e : a.edges) {
            if (!ids.count(e.source)) issues.push_back(a.name + ": edge source " + e.source + " missing");
            if (!ids.count(e.target)) issues.push_back(a.name + ": edge target " + e.target + " missing");
            if (e.action && e.sync) {
                issues.push_back(a.name + ": edge " + e.source + "->" + e.target +
                                 " has both action and sync");
            }
            if (e.resets.count(kGlobalClock)) {
                issues.push_back(a.name + ": edge resets the global clock T");
            }
            for (const auto& r : e.resets) {
                if (!nta.clock_table.contains(r)) {
                    issues.push_back(a.name + ": reset of unknown clock " + r);
                }
            }
            if (e.sync) {
                (e.sync->dir == SyncDir::Send ? senders : receivers)[e.sync->channel]++;
            }
            for (const auto& eff : e.effects) {
                if (!nta.clause_index.count(eff.clause)) {
                    issues.push_back(a.name + ": effect on unindexed clause " + eff.clause);
                }
            }
        }
    }
    for (const auto& ch : nta.channels) {
        if (senders[ch.id] == 0 || receivers[ch.id] == 0) {
            issues.push_back("channel " + ch.id + " lacks a sender or a receiver");
        }
    }
    for (const auto& [ch, cnt] : senders) {
        bool known = false;
        for (const auto& c : nta.channels) known = known || c.id == ch;
        if (!known) issues.push_back("undeclared channel " + ch);
    }
    return issues;
}

}  // namespace cod
