#pragma once

#include "cod/nta.hpp"
#include "cod/validate.hpp"

namespace cod {

// ── Action-layer automata (rules for atomic and compound actions) ───────────

// An action automaton has a single designated ending node and carries no
// effects, no invariants and no synchronization.
struct ActionAutomaton {
    ExtTimedAutomaton ta;
    NodeId end;
};

namespace detail {

// Merge src's nodes, edges and invariants into dst, renaming on id collision
// (duplicate action atoms in one tree produce colliding ids). Returns the
// rename applied to src ids.
inline std::map<NodeId, NodeId> merge_into(ExtTimedAutomaton& dst, const ExtTimedAutomaton& src) {
    std::map<NodeId, NodeId> rename;
    for (const auto& n : src.nodes) {
        NodeId id = n.id;
        int k = 2;
        while (dst.has_node(id)) id = n.id + "~" + std::to_string(k++);
        rename[n.id] = id;
        Node copy = n;
        copy.id = id;
        dst.nodes.push_back(std::move(copy));
    }
    for (const auto& e : src.edges) {
        Edge copy = e;
        copy.source = rename.at(e.source);
        copy.target = rename.at(e.target);
        dst.edges.push_back(std::move(copy));
    }
    for (const auto& [node, atoms] : src.invariants) {
        for (const auto& a : atoms) dst.add_invariant(rename.at(node), a);
    }
    return rename;
}

}  // namespace detail

// Rule for an atomic action: two nodes and one edge performing the action.
inline ActionAutomaton compile_atomic(const ActionId& a, const std::string& prefix = "") {
    ActionAutomaton out;
    NodeId init = prefix + a + ".init";
    NodeId end = prefix + a + ".end";
    out.ta.nodes.push_back(Node{init, NodeRole::Init, {}, {}, {}});
    out.ta.nodes.push_back(Node{end, NodeRole::End, {}, {}, {}});
    out.ta.initial = init;
    Edge e;
    e.source = init;
    e.target = end;
    e.action = ActionLabel{a, ""};
    out.ta.edges.push_back(std::move(e));
    out.end = end;
    return out;
}

// AND over actions: cartesian product with interleaving semantics.
inline ActionAutomaton product_and(const std::vector<ActionAutomaton>& parts) {
    if (parts.size() < 2) throw Error("InvalidArity", "product needs at least two parts");
    for (const auto& p : parts) {
        for (const auto& e : p.ta.edges) {
            if (!e.effects.empty()) {
                throw Error("InvalidProduct", "action products compose effect-free automata only");
            }
        }
    }
    ActionAutomaton out;
    auto combo_id = [&](const std::vector<size_t>& idx) {
        std::string id;
        for (size_t i = 0; i < idx.size(); ++i) {
            if (i) id += "*";
            id += parts[i].ta.nodes[idx[i]].id;
        }
        return id;
    };
    // enumerate all node combinations
    std::vector<size_t> idx(parts.size(), 0);
    for (;;) {
        bool all_init = true, all_end = true;
        for (size_t i = 0; i < parts.size(); ++i) {
            const auto& n = parts[i].ta.nodes[idx[i]];
            all_init = all_init && n.id == parts[i].ta.initial;
            all_end = all_end && n.id == parts[i].end;
        }
        NodeRole role = all_init ? NodeRole::Init : (all_end ? NodeRole::End : NodeRole::Plain);
        out.ta.nodes.push_back(Node{combo_id(idx), role, {}, {}, {}});
        size_t i = 0;
        while (i < parts.size() && ++idx[i] == parts[i].ta.nodes.size()) idx[i++] = 0;
        if (i == parts.size()) break;
    }
    // one edge per component edge at each combination of the other nodes
    std::vector<size_t> others(parts.size(), 0);
    for (size_t comp = 0; comp < parts.size(); ++comp) {
        std::fill(others.begin(), others.end(), 0);
        for (;;) {
            for (const auto& e : parts[comp].ta.edges) {
                std::vector<size_t> src = others, tgt = others;
                auto node_index = [&](size_t part, const NodeId& id) {
                    for (size_t k = 0; k < parts[part].ta.nodes.size(); ++k) {
                        if (parts[part].ta.nodes[k].id == id) return k;
                    }
                    throw Error("Internal", "product edge endpoint missing");
                };
                src[comp] = node_index(comp, e.source);
                tgt[comp] = node_index(comp, e.target);
                Edge copy = e;
                copy.source = combo_id(src);
                copy.target = combo_id(tgt);
                out.ta.edges.push_back(std::move(copy));
            }
            size_t i = 0;
            while (i < parts.size() &&
                   (i == comp || ++others[i] == parts[i].ta.nodes.size())) {
                if (i != comp) others[i] = 0;
                i++;
            }
            if (i == parts.size()) break;
        }
    }
    std::vector<size_t> inits(parts.size()), ends(parts.size());
    for (size_t i = 0; i < parts.size(); ++i) {
        for (size_t k = 0; k < parts[i].ta.nodes.size(); ++k) {
            if (parts[i].ta.nodes[k].id == parts[i].ta.initial) inits[i] = k;
            if (parts[i].ta.nodes[k].id == parts[i].end) ends[i] = k;
        }
    }
    out.ta.initial = combo_id(inits);
    out.end = combo_id(ends);
    return out;
}

// OR over actions: fresh initial and ending nodes wired by urgent no-action
// edges to and from every alternative.
inline ActionAutomaton alt_or(const std::vector<ActionAutomaton>& parts,
                              const std::string& prefix) {
    if (parts.size() < 2) throw Error("InvalidArity", "alternative needs at least two parts");
    ActionAutomaton out;
    NodeId init = prefix + "or.init";
    NodeId end = prefix + "or.end";
    out.ta.nodes.push_back(Node{init, NodeRole::Init, {}, {}, {}});
    out.ta.initial = init;
    out.end = end;
    for (const auto& p : parts) {
        auto rename = detail::merge_into(out.ta, p.ta);
        Edge in;
        in.source = init;
        in.target = rename.at(p.ta.initial);
        in.urgent = true;
        out.ta.edges.push_back(std::move(in));
        Edge done;
        done.source = rename.at(p.end);
        done.target = end;
        done.urgent = true;
        out.ta.edges.push_back(std::move(done));
    }
    out.ta.nodes.push_back(Node{end, NodeRole::End, {}, {}, {}});
    return out;
}

// SEQ over actions: ending node of each part wired to the initial node of the
// next by an urgent no-action edge; no extra nodes.
inline ActionAutomaton seq_chain(const std::vector<ActionAutomaton>& parts) {
    if (parts.size() < 2) throw Error("InvalidArity", "sequence needs at least two parts");
    ActionAutomaton out;
    NodeId prev_end;
    for (size_t i = 0; i < parts.size(); ++i) {
        auto rename = detail::merge_into(out.ta, parts[i].ta);
        if (i == 0) {
            out.ta.initial = rename.at(parts[i].ta.initial);
        } else {
            Edge link;
            link.source = prev_end;
            link.target = rename.at(parts[i].ta.initial);
            link.urgent = true;
            out.ta.edges.push_back(std::move(link));
        }
        prev_end = rename.at(parts[i].end);
    }
    out.end = prev_end;
    return out;
}

// ── Deontic layer ───────────────────────────────────────────────────────────

// Everything the deontic rule needs to know about the clause being compiled.
struct CompileContext {
    ClauseName clause;
    AgentId agent;
    Guard guard;
    ClockInterval window;                     // g1 window; g2 is upper+1
    std::vector<ClockInterval> extra_windows; // inherited windows on other clocks
    std::optional<ClockId> tracked_clock;     // t_clause when referenced elsewhere
};

// Result of the deontic transformation: the automaton plus the distinguished
// nodes the later rules wire up.
struct DeonticAutomaton {
    ExtTimedAutomaton ta;
    DeonticKind kind = DeonticKind::Obligation;
    NodeId end;
    std::optional<NodeId> time_node;  // absent when the window never expires
    std::optional<NodeId> skip_node;  // present iff the clause has a guard
    ClauseName clause;
};

// Application of O/P/F over an action automaton: window guards and agent on
// action edges, the timeout node and edges when the window is bounded, the
// guarded skip node, set effects and relative-clock resets.
inline DeonticAutomaton apply_deontic(DeonticKind kind, const ActionAutomaton& action,
                                      const CompileContext& ctx) {
    if (ctx.agent.empty()) throw Error("MissingAgent", "deontic clause needs an agent");
    if (ctx.window.upper && ctx.window.lower > *ctx.window.upper) {
        throw Error("InvalidInterval", "window lower bound exceeds upper bound");
    }
    DeonticAutomaton out;
    out.ta = action.ta;
    out.ta.name = ctx.clause;
    out.kind = kind;
    out.end = action.end;
    out.clause = ctx.clause;
    const bool bounded = ctx.window.upper.has_value();
    const std::vector<Node> body_nodes = out.ta.nodes;  // N_A, before new nodes

    // window guard and agent attribution on every action edge
    for (auto& e : out.ta.edges) {
        if (!e.action) continue;
        e.action->agent = ctx.agent;
        if (!ctx.window.trivial()) e.windows.push_back(ctx.window);
        for (const auto& w : ctx.extra_windows) {
            if (!w.trivial()) e.windows.push_back(w);
        }
    }

    // effects and resets on edges entering the ending node
    for (auto& e : out.ta.edges) {
        if (e.target != out.end) continue;
        switch (kind) {
            case DeonticKind::Obligation:
                e.effects.push_back({EffectKind::AddSatisfaction, ctx.clause});
                break;
            case DeonticKind::Permission:
                e.effects.push_back({EffectKind::AddPermission, ctx.clause});
                break;
            case DeonticKind::Prohibition:
                e.effects.push_back({EffectKind::AddViolation, ctx.clause});
                break;
        }
        if (ctx.tracked_clock && kind != DeonticKind::Prohibition) {
            e.resets.insert(*ctx.tracked_clock);
        }
    }
    if (Node* endn = out.ta.find_node(out.end)) {
        switch (kind) {
            case DeonticKind::Obligation: endn->annot_s.insert(ctx.clause); break;
            case DeonticKind::Permission: endn->annot_p.insert(ctx.clause); break;
            case DeonticKind::Prohibition: endn->annot_v.insert(ctx.clause); break;
        }
    }

    if (bounded) {
        const int t2 = *ctx.window.upper;
        NodeId time_id = ctx.clause + ".time";
        Node time_node{time_id, NodeRole::Time, {}, {}, {}};
        switch (kind) {
            case DeonticKind::Obligation: time_node.annot_v.insert(ctx.clause); break;
            case DeonticKind::Prohibition: time_node.annot_s.insert(ctx.clause); break;
            case DeonticKind::Permission: break;
        }
        out.ta.nodes.push_back(std::move(time_node));
        out.time_node = time_id;
        for (const auto& n : body_nodes) {
            if (n.id == out.end) continue;
            out.ta.add_invariant(n.id, InvariantAtom{ctx.window.clock, t2 + 1});
            Edge timeout;
            timeout.source = n.id;
            timeout.target = time_id;
            timeout.point_guard = ClockPoint{ctx.window.clock, t2 + 1};
            switch (kind) {
                case DeonticKind::Obligation:
                    timeout.effects.push_back({EffectKind::AddViolation, ctx.clause});
                    break;
                case DeonticKind::Prohibition:
                    timeout.effects.push_back({EffectKind::AddSatisfaction, ctx.clause});
                    if (ctx.tracked_clock) timeout.resets.insert(*ctx.tracked_clock);
                    break;
                case DeonticKind::Permission:
                    break;
            }
            out.ta.edges.push_back(std::move(timeout));
        }
    }

    if (!ctx.guard.empty()) {
        // gate the norm on its guard: edges out of the initial node require g,
        // the skip edges below carry its complement
        for (auto& e : out.ta.edges) {
            if (e.source != out.ta.initial) continue;
            for (const auto& a : ctx.guard.conjuncts) e.guard.conjuncts.push_back(a);
        }
        NodeId skip_id = ctx.clause + ".skip";
        out.ta.nodes.push_back(Node{skip_id, NodeRole::Skip, {}, {}, {}});
        out.skip_node = skip_id;
        for (const auto& neg : negate_guard(ctx.guard)) {
            Edge skip;
            skip.source = out.ta.initial;
            skip.target = skip_id;
            skip.guard = neg;
            skip.urgent = true;
            out.ta.edges.push_back(std::move(skip));
        }
    }
    return out;
}

// ── Compiled contract fragments (deontic + composition layers) ──────────────

struct Compiled {
    ExtTimedAutomaton root;                // automaton holding initial and final
    NodeId final_node;                     // the unique ending node
    std::vector<ExtTimedAutomaton> aux;    // further automata of the network
    std::optional<NodeId> skip_node;       // in root, when the clause is guarded
};

// Reparation grafting: the reparation's initial node is identified with the
// violating node; edges entering the reparation's final node clear the
// violation.
inline void attach_reparation(DeonticAutomaton& da, Compiled rep, NodeId* rep_end_out,
                              std::vector<ExtTimedAutomaton>* aux_out) {
    if (da.kind == DeonticKind::Permission) {
        throw Error("ReparationOnPermission", "permissions carry no reparation");
    }
    if (da.kind == DeonticKind::Obligation && !da.time_node) {
        throw Error("InvalidContract",
                    "reparation on obligation " + da.clause + " needs a bounded window");
    }
    NodeId vio = (da.kind == DeonticKind::Obligation) ? da.time_node.value() : da.end;
    const NodeId rep_init = rep.root.initial;
    // invariant of the reparation's initial node moves onto the violation node
    if (auto it = rep.root.invariants.find(rep_init); it != rep.root.invariants.end()) {
        for (const auto& atom : it->second) da.ta.add_invariant(vio, atom);
        rep.root.invariants.erase(it);
    }
    std::map<NodeId, NodeId> rename;
    rename[rep_init] = vio;
    for (const auto& n : rep.root.nodes) {
        if (n.id == rep_init) {
            // display annotations carry over
            if (Node* v = da.ta.find_node(vio)) {
                v->annot_v.insert(n.annot_v.begin(), n.annot_v.end());
                v->annot_s.insert(n.annot_s.begin(), n.annot_s.end());
                v->annot_p.insert(n.annot_p.begin(), n.annot_p.end());
            }
            continue;
        }
        NodeId id = n.id;
        int k = 2;
        while (da.ta.has_node(id)) id = n.id + "~" + std::to_string(k++);
        rename[n.id] = id;
        Node copy = n;
        copy.id = id;
        da.ta.nodes.push_back(std::move(copy));
    }
    for (const auto& e : rep.root.edges) {
        Edge copy = e;
        copy.source = rename.at(e.source);
        copy.target = rename.at(e.target);
        if (e.target == rep.final_node) {
            copy.effects.push_back({EffectKind::ClearViolation, da.clause});
        }
        da.ta.edges.push_back(std::move(copy));
    }
    for (const auto& [node, atoms] : rep.root.invariants) {
        for (const auto& a : atoms) da.ta.add_invariant(rename.at(node), a);
    }
    NodeId rep_end = rename.at(rep.final_node);
    if (Node* rn = da.ta.find_node(rep_end)) rn->annot_v.erase(da.clause);
    *rep_end_out = rep_end;
    if (aux_out) {
        for (auto& a : rep.aux) aux_out->push_back(std::move(a));
    }
}

// Single-ending-node rule: a fresh final node collects the regular outcomes.
// Violation nodes without a reparation stay terminal.
inline Compiled finalize(DeonticAutomaton da, bool has_reparation,
                         const std::optional<NodeId>& rep_end,
                         std::vector<ExtTimedAutomaton> aux = {}) {
    Compiled out;
    NodeId final_id = da.clause + ".final";
    da.ta.nodes.push_back(Node{final_id, NodeRole::Final, {}, {}, {}});
    auto wire = [&](const NodeId& from) {
        Edge e;
        e.source = from;
        e.target = final_id;
        e.urgent = true;
        da.ta.edges.push_back(std::move(e));
    };
    if (da.skip_node) wire(*da.skip_node);
    switch (da.kind) {
        case DeonticKind::Obligation:
            wire(da.end);
            if (has_reparation) wire(rep_end.value());
            break;
        case DeonticKind::Permission:
            wire(da.end);
            if (da.time_node) wire(*da.time_node);
            break;
        case DeonticKind::Prohibition:
            if (da.time_node) wire(*da.time_node);
            if (has_reparation) wire(rep_end.value());
            break;
    }
    out.root = std::move(da.ta);
    out.final_node = final_id;
    out.skip_node = da.skip_node;
    out.aux = std::move(aux);
    return out;
}

// ── Composition of norms (network and merge rules) ──────────────────────────

namespace detail {

inline void gate_with(Edge& e, const Guard& g) {
    for (const auto& a : g.conjuncts) e.guard.conjuncts.push_back(a);
}

}  // namespace detail

// AND over norms: the parts run in parallel, synchronizing before and after
// their bodies over a chain of urgent channels. The first part's automaton
// gains the composite initial, final and (when guarded) skip nodes.
inline Compiled compose_and_norms(std::vector<Compiled> parts, const ClauseName& parent,
                                  const Guard& g, std::vector<Channel>* channels) {
    const size_t n = parts.size();
    if (n < 2) throw Error("InvalidArity", "AND composition needs at least two parts");
    std::vector<ChannelId> chan(n - 1);
    for (size_t i = 0; i + 1 < n; ++i) {
        chan[i] = parent + ".m" + std::to_string(i + 1);
        channels->push_back(Channel{chan[i], true});
    }
    Compiled out;
    // first automaton
    {
        ExtTimedAutomaton& ta = parts[0].root;
        NodeId init = parent + ".init";
        NodeId fin = parent + ".final";
        ta.nodes.push_back(Node{init, NodeRole::Init, {}, {}, {}});
        ta.nodes.push_back(Node{fin, NodeRole::Final, {}, {}, {}});
        Edge enter;
        enter.source = init;
        enter.target = ta.initial;
        enter.sync = SyncLabel{chan[0], SyncDir::Send};
        if (!g.empty()) detail::gate_with(enter, g);
        ta.edges.push_back(std::move(enter));
        Edge leave;
        leave.source = parts[0].final_node;
        leave.target = fin;
        leave.sync = SyncLabel{chan[0], SyncDir::Send};
        ta.edges.push_back(std::move(leave));
        if (!g.empty()) {
            NodeId skip = parent + ".skip";
            ta.nodes.push_back(Node{skip, NodeRole::Skip, {}, {}, {}});
            for (const auto& neg : negate_guard(g)) {
                Edge e;
                e.source = init;
                e.target = skip;
                e.guard = neg;
                e.urgent = true;
                ta.edges.push_back(std::move(e));
            }
            out.skip_node = skip;
        }
        ta.initial = init;
        out.final_node = fin;
    }
    // middle and last automata relay the barrier chain
    for (size_t i = 1; i < n; ++i) {
        ExtTimedAutomaton& ta = parts[i].root;
        NodeId syn_prev = parent + ".syn" + std::to_string(i);
        NodeId syn_prev_b = syn_prev + "b";
        ta.nodes.push_back(Node{syn_prev, NodeRole::Syn, {}, {}, {}});
        ta.nodes.push_back(Node{syn_prev_b, NodeRole::Syn, {}, {}, {}});
        if (i + 1 < n) {
            NodeId syn_next = parent + ".syn" + std::to_string(i + 1) + "pre";
            NodeId syn_next_b = syn_next + "b";
            ta.nodes.push_back(Node{syn_next, NodeRole::Syn, {}, {}, {}});
            ta.nodes.push_back(Node{syn_next_b, NodeRole::Syn, {}, {}, {}});
            Edge a;  // receive the barrier from the left
            a.source = syn_prev;
            a.target = syn_next;
            a.sync = SyncLabel{chan[i - 1], SyncDir::Receive};
            ta.edges.push_back(std::move(a));
            Edge b;  // pass it to the right, entering the body
            b.source = syn_next;
            b.target = ta.initial;
            b.sync = SyncLabel{chan[i], SyncDir::Send};
            ta.edges.push_back(std::move(b));
            Edge c;  // body done: close the right barrier
            c.source = parts[i].final_node;
            c.target = syn_next_b;
            c.sync = SyncLabel{chan[i], SyncDir::Send};
            ta.edges.push_back(std::move(c));
            Edge d;  // close the left barrier
            d.source = syn_next_b;
            d.target = syn_prev_b;
            d.sync = SyncLabel{chan[i - 1], SyncDir::Receive};
            ta.edges.push_back(std::move(d));
        } else {
            Edge a;
            a.source = syn_prev;
            a.target = ta.initial;
            a.sync = SyncLabel{chan[i - 1], SyncDir::Receive};
            ta.edges.push_back(std::move(a));
            Edge b;
            b.source = parts[i].final_node;
            b.target = syn_prev_b;
            b.sync = SyncLabel{chan[i - 1], SyncDir::Receive};
            ta.edges.push_back(std::move(b));
        }
        ta.initial = syn_prev;
    }
    out.root = std::move(parts[0].root);
    for (size_t i = 1; i < n; ++i) out.aux.push_back(std::move(parts[i].root));
    for (auto& p : parts) {
        for (auto& a : p.aux) out.aux.push_back(std::move(a));
    }
    // symbolic union of the parts' outcomes on the composite final node
    if (Node* fin = out.root.find_node(out.final_node)) {
        auto gather = [&](const ExtTimedAutomaton& ta) {
            for (const auto& nd : ta.nodes) {
                fin->annot_v.insert(nd.annot_v.begin(), nd.annot_v.end());
                fin->annot_s.insert(nd.annot_s.begin(), nd.annot_s.end());
                fin->annot_p.insert(nd.annot_p.begin(), nd.annot_p.end());
            }
        };
        gather(out.root);
        for (const auto& a : out.aux) gather(a);
    }
    return out;
}

// OR over norms: the alternatives merge into one automaton behind fresh
// initial and final nodes; entry edges are gated with the parent guard.
inline Compiled compose_or_norms(std::vector<Compiled> parts, const ClauseName& parent,
                                 const Guard& g) {
    if (parts.size() < 2) throw Error("InvalidArity", "OR composition needs at least two parts");
    Compiled out;
    ExtTimedAutomaton& ta = out.root;
    ta.name = parent;
    NodeId init = parent + ".init";
    NodeId fin = parent + ".final";
    ta.nodes.push_back(Node{init, NodeRole::Init, {}, {}, {}});
    ta.initial = init;
    for (auto& p : parts) {
        auto rename = detail::merge_into(ta, p.root);
        Edge enter;
        enter.source = init;
        enter.target = rename.at(p.root.initial);
        enter.urgent = true;
        if (!g.empty()) detail::gate_with(enter, g);
        ta.edges.push_back(std::move(enter));
        Edge leave;
        leave.source = rename.at(p.final_node);
        leave.target = fin;
        leave.urgent = true;
        ta.edges.push_back(std::move(leave));
        for (auto& a : p.aux) out.aux.push_back(std::move(a));
    }
    ta.nodes.push_back(Node{fin, NodeRole::Final, {}, {}, {}});
    out.final_node = fin;
    if (!g.empty()) {
        NodeId skip = parent + ".skip";
        ta.nodes.push_back(Node{skip, NodeRole::Skip, {}, {}, {}});
        for (const auto& neg : negate_guard(g)) {
            Edge e;
            e.source = init;
            e.target = skip;
            e.guard = neg;
            e.urgent = true;
            ta.edges.push_back(std::move(e));
        }
        out.skip_node = skip;
    }
    return out;
}

// SEQ over norms: finals chained to the next initials by urgent no-action
// edges; only a skip node is added when the parent clause is guarded.
inline Compiled compose_seq_norms(std::vector<Compiled> parts, const ClauseName& parent,
                                  const Guard& g) {
    if (parts.size() < 2) throw Error("InvalidArity", "SEQ composition needs at least two parts");
    Compiled out;
    ExtTimedAutomaton& ta = out.root;
    ta.name = parent;
    NodeId prev_final;
    NodeId first_init;
    for (size_t i = 0; i < parts.size(); ++i) {
        auto rename = detail::merge_into(ta, parts[i].root);
        if (i == 0) {
            first_init = rename.at(parts[i].root.initial);
            ta.initial = first_init;
        } else {
            Edge link;
            link.source = prev_final;
            link.target = rename.at(parts[i].root.initial);
            link.urgent = true;
            ta.edges.push_back(std::move(link));
        }
        prev_final = rename.at(parts[i].final_node);
        for (auto& a : parts[i].aux) out.aux.push_back(std::move(a));
    }
    out.final_node = prev_final;
    if (!g.empty()) {
        // the whole sequence applies only under g
        for (auto& e : ta.edges) {
            if (e.source == first_init) detail::gate_with(e, g);
        }
        NodeId skip = parent + ".skip";
        ta.nodes.push_back(Node{skip, NodeRole::Skip, {}, {}, {}});
        for (const auto& neg : negate_guard(g)) {
            Edge e;
            e.source = first_init;
            e.target = skip;
            e.guard = neg;
            e.urgent = true;
            ta.edges.push_back(std::move(e));
        }
        out.skip_node = skip;
    }
    return out;
}

// ── Driver ──────────────────────────────────────────────────────────────────

namespace detail {

class Compiler {
public:
    explicit Compiler(const Contract& c) : contract_(c) {}

    Nta run() {
        auto report = validate(contract_);
        if (!report.clean()) {
            throw Error("InvalidContract",
                        "contract fails validation (" + report.findings.front().rule + " on '" +
                            report.findings.front().clause + "')");
        }
        collect_referenced();
        Nta nta;
        nta.clock_table.add(kGlobalClock);
        for (const auto& r : referenced_) nta.clock_table.add(relative_clock(r));
        Compiled top = compile_box(*contract_.root, {});
        nta.automata.push_back(std::move(top.root));
        for (auto& a : top.aux) nta.automata.push_back(std::move(a));
        nta.channels = std::move(channels_);
        nta.variables = Valuation(contract_.variables.begin(), contract_.variables.end());
        nta.clause_index = std::move(clause_index_);
        return nta;
    }

private:
    const Contract& contract_;
    std::set<ClauseName> referenced_;
    std::vector<Channel> channels_;
    std::map<ClauseName, DeonticKind> clause_index_;

    void collect_referenced() {
        for_each_box(*contract_.root, [&](const Box& b) {
            for (const auto& a : b.trestr.conjuncts) {
                if (!a.clock.absolute) referenced_.insert(a.clock.reference);
                if (a.minus_clock && !a.minus_clock->absolute) {
                    referenced_.insert(a.minus_clock->reference);
                }
            }
        });
    }

    // Action automaton of the subtree below a deontic operator.
    ActionAutomaton compile_action(const Box& b, const std::string& prefix) {
        if (b.is_atomic()) return compile_atomic(b.atomic().action, prefix);
        std::string here = b.name.empty() ? prefix : b.name + ".";
        std::vector<ActionAutomaton> parts;
        for (const auto& c : b.refinement().children) parts.push_back(compile_action(*c, here));
        switch (b.refinement().kind) {
            case RefineKind::And: return product_and(parts);
            case RefineKind::Or: return alt_or(parts, here);
            case RefineKind::Seq: return seq_chain(parts);
        }
        throw Error("Internal", "unreachable");
    }

    // Merge the box's own restriction with the inherited chain: intervals on
    // the same clock intersect; the clause's primary clock is its own
    // restriction's clock when given, otherwise the first constrained clock.
    static void merged_windows(const ClockInterval& own, bool own_given,
                               const std::vector<ClockInterval>& inherited,
                               ClockInterval* primary, std::vector<ClockInterval>* extras) {
        std::vector<ClockInterval> merged;
        auto absorb = [&](const ClockInterval& iv) {
            for (auto& m : merged) {
                if (m.clock == iv.clock) {
                    m = intersect(m, iv);
                    return;
                }
            }
            merged.push_back(iv);
        };
        if (own_given) absorb(own);
        for (const auto& iv : inherited) absorb(iv);
        *primary = ClockInterval{};  // (T, 0, unbounded)
        extras->clear();
        bool primary_set = false;
        for (const auto& m : merged) {
            if (!primary_set && (own_given ? m.clock == own.clock : !m.trivial())) {
                *primary = m;
                primary_set = true;
            } else {
                extras->push_back(m);
            }
        }
    }

    Compiled compile_box(const Box& b, std::vector<ClockInterval> inherited) {
        if (b.is_deontic()) return compile_norm(b, inherited);
        // refinement of norms
        ClockInterval own;
        if (!b.trestr.empty()) {
            own = normalize_restriction(b.trestr);
            inherited.push_back(own);
        }
        std::vector<Compiled> parts;
        for (const auto& c : b.refinement().children) {
            parts.push_back(compile_box(*c, inherited));
        }
        Compiled out;
        switch (b.refinement().kind) {
            case RefineKind::And:
                out = compose_and_norms(std::move(parts), b.name, b.guard, &channels_);
                break;
            case RefineKind::Or:
                out = compose_or_norms(std::move(parts), b.name, b.guard);
                break;
            case RefineKind::Seq:
                out = compose_seq_norms(std::move(parts), b.name, b.guard);
                break;
        }
        add_reference_reset(out, b.name);
        return out;
    }

    Compiled compile_norm(const Box& b, const std::vector<ClockInterval>& inherited) {
        CompileContext ctx;
        ctx.clause = b.name;
        ctx.agent = b.agent.value_or("");
        ctx.guard = b.guard;
        ClockInterval own;
        bool own_given = !b.trestr.empty();
        if (own_given) own = normalize_restriction(b.trestr);
        merged_windows(own, own_given, inherited, &ctx.window, &ctx.extra_windows);
        if (referenced_.count(b.name)) ctx.tracked_clock = relative_clock(b.name);

        clause_index_[b.name] = b.deontic().op;

        ActionAutomaton action = compile_action(*b.deontic().action, b.name + ".");
        DeonticAutomaton da = apply_deontic(b.deontic().op, action, ctx);

        std::optional<NodeId> rep_end;
        std::vector<ExtTimedAutomaton> aux;
        if (b.reparation) {
            // reparations are contracts of their own; ancestors' expired
            // windows do not constrain them
            Compiled rep = compile_box(*b.reparation, {});
            NodeId re;
            attach_reparation(da, std::move(rep), &re, &aux);
            rep_end = re;
        }
        Compiled out = finalize(std::move(da), b.reparation != nullptr, rep_end, std::move(aux));
        out.root.name = b.name;
        return out;
    }

    // Relative restrictions elsewhere reference this clause: reset its clock
    // on every edge entering the composed final node.
    void add_reference_reset(Compiled& c, const ClauseName& name) {
        if (!referenced_.count(name)) return;
        ClockId clk = relative_clock(name);
        for (auto& e : c.root.edges) {
            if (e.target == c.final_node) e.resets.insert(clk);
        }
    }
};

}  // namespace detail

// Full transformation of a validated contract into a network.
inline Nta compile(const Contract& c) { return detail::Compiler(c).run(); }

}  // namespace cod
