#pragma once

#include <deque>
#include <unordered_map>

#include "cod/nta.hpp"
#include "cod/query.hpp"

namespace cod {

// Discrete unit-step semantics: time advances in whole steps, clocks are
// capped at ceiling+1 (values beyond the largest compared constant are
// indistinguishable), urgency blocks delay globally.

struct ExplorationState {
    std::vector<int> locs;    // node index per automaton
    std::vector<int> clocks;  // value per clock, capped
    StateSets sets;
    std::set<std::string> done;  // performed "agent.action" pairs

    bool operator==(const ExplorationState&) const = default;
    auto operator<=>(const ExplorationState&) const = default;
};

struct Step {
    enum class Kind { Delay, Internal, Sync };
    Kind kind = Step::Kind::Delay;
    int automaton = -1;      // Internal: acting automaton; Sync: sender
    int edge = -1;           // edge index within the automaton
    int peer_automaton = -1; // Sync: receiver
    int peer_edge = -1;
};

// Indexed view of an Nta for exploration.
class ExplorerModel {
public:
    explicit ExplorerModel(const Nta& nta, int extra_ceiling = 0) : nta_(&nta) {
        for (const auto& c : nta.clock_table.entries) {
            clock_index_[c] = static_cast<int>(clock_names_.size());
            clock_names_.push_back(c);
        }
        int ceiling = extra_ceiling;
        for (size_t ai = 0; ai < nta.automata.size(); ++ai) {
            const auto& a = nta.automata[ai];
            automaton_index_[a.name] = static_cast<int>(ai);
            NodeIndex ni;
            for (size_t k = 0; k < a.nodes.size(); ++k) ni[a.nodes[k].id] = static_cast<int>(k);
            node_index_.push_back(std::move(ni));
            for (const auto& e : a.edges) {
                for (const auto& w : e.windows) {
                    ceiling = std::max(ceiling, w.lower);
                    if (w.upper) ceiling = std::max(ceiling, *w.upper);
                }
                if (e.point_guard) ceiling = std::max(ceiling, e.point_guard->value);
            }
            for (const auto& [node, atoms] : a.invariants) {
                for (const auto& at : atoms) ceiling = std::max(ceiling, at.bound);
            }
        }
        cap_ = ceiling + 1;
        for (const auto& c : nta.channels) {
            if (c.urgent) urgent_channels_.insert(c.id);
        }
        vars_ = nta.variables;
    }

    const Nta& nta() const { return *nta_; }
    int cap() const { return cap_; }
    const Valuation& vars() const { return vars_; }
    const std::vector<ClockId>& clock_names() const { return clock_names_; }

    int clock_of(const ClockId& c) const {
        auto it = clock_index_.find(c);
        if (it == clock_index_.end()) throw Error("UnresolvedName", "unknown clock " + c);
        return it->second;
    }
    int automaton_of(const AutomatonId& a) const {
        auto it = automaton_index_.find(a);
        if (it == automaton_index_.end()) throw Error("UnresolvedName", "unknown automaton " + a);
        return it->second;
    }
    int node_of(int automaton, const NodeId& n) const {
        auto it = node_index_[automaton].find(n);
        if (it == node_index_[automaton].end()) {
            throw Error("UnresolvedName", "unknown node " + n);
        }
        return it->second;
    }
    bool urgent_channel(const ChannelId& c) const { return urgent_channels_.count(c) > 0; }

    ExplorationState initial_state() const {
        ExplorationState s;
        s.locs.resize(nta_->automata.size());
        for (size_t i = 0; i < nta_->automata.size(); ++i) {
            s.locs[i] = node_of(static_cast<int>(i), nta_->automata[i].initial);
        }
        s.clocks.assign(clock_names_.size(), 0);
        return s;
    }

    bool clock_guards_hold(const Edge& e, const ExplorationState& s) const {
        for (const auto& w : e.windows) {
            int v = s.clocks[clock_of(w.clock)];
            if (v < w.lower) return false;
            if (w.upper && v > *w.upper) return false;  // capped value exceeds any constant
        }
        if (e.point_guard) {
            if (s.clocks[clock_of(e.point_guard->clock)] != e.point_guard->value) return false;
        }
        return true;
    }

    bool edge_enabled(const Edge& e, const ExplorationState& s) const {
        return eval_guard(e.guard, vars_) && clock_guards_hold(e, s);
    }

    bool invariants_hold_after_delay(const ExplorationState& s) const {
        for (size_t ai = 0; ai < nta_->automata.size(); ++ai) {
            const auto& a = nta_->automata[ai];
            const NodeId& loc = a.nodes[s.locs[ai]].id;
            auto it = a.invariants.find(loc);
            if (it == a.invariants.end()) continue;
            for (const auto& atom : it->second) {
                int v = std::min(s.clocks[clock_of(atom.clock)] + 1, cap_);
                if (v > atom.bound) return false;
            }
        }
        return true;
    }

    void apply_edge(const Edge& e, int automaton, ExplorationState& s) const {
        s.locs[automaton] = node_of(automaton, e.target);
        for (const auto& r : e.resets) s.clocks[clock_of(r)] = 0;
        s.sets = apply_effects(std::move(s.sets), e.effects);
        if (e.action) s.done.insert(e.action->agent + "." + e.action->action);
    }

    ExplorationState apply_step(const Step& st, ExplorationState s) const {
        if (st.kind == Step::Kind::Delay) {
            for (auto& c : s.clocks) c = std::min(c + 1, cap_);
            return s;
        }
        apply_edge(nta_->automata[st.automaton].edges[st.edge], st.automaton, s);
        if (st.kind == Step::Kind::Sync) {
            apply_edge(nta_->automata[st.peer_automaton].edges[st.peer_edge], st.peer_automaton, s);
        }
        return s;
    }

    // All enabled steps from s: internal edges, channel handshakes, and the
    // unit delay when nothing urgent is enabled and every invariant survives.
    std::vector<Step> enabled_steps(const ExplorationState& s) const {
        std::vector<Step> steps;
        bool urgent_enabled = false;
        for (size_t ai = 0; ai < nta_->automata.size(); ++ai) {
            const auto& a = nta_->automata[ai];
            for (size_t ei = 0; ei < a.edges.size(); ++ei) {
                const Edge& e = a.edges[ei];
                if (a.nodes[s.locs[ai]].id != e.source) continue;
                if (e.sync) continue;
                if (!edge_enabled(e, s)) continue;
                steps.push_back(Step{Step::Kind::Internal, static_cast<int>(ai),
                                     static_cast<int>(ei), -1, -1});
                if (e.urgent) urgent_enabled = true;
            }
        }
        // channel handshakes: one sender and one receiver in distinct automata
        for (size_t ai = 0; ai < nta_->automata.size(); ++ai) {
            const auto& a = nta_->automata[ai];
            for (size_t ei = 0; ei < a.edges.size(); ++ei) {
                const Edge& e = a.edges[ei];
                if (!e.sync || e.sync->dir != SyncDir::Send) continue;
                if (a.nodes[s.locs[ai]].id != e.source) continue;
                if (!edge_enabled(e, s)) continue;
                for (size_t bi = 0; bi < nta_->automata.size(); ++bi) {
                    if (bi == ai) continue;
                    const auto& b = nta_->automata[bi];
                    for (size_t fi = 0; fi < b.edges.size(); ++fi) {
                        const Edge& f = b.edges[fi];
                        if (!f.sync || f.sync->dir != SyncDir::Receive) continue;
                        if (f.sync->channel != e.sync->channel) continue;
                        if (b.nodes[s.locs[bi]].id != f.source) continue;
                        if (!edge_enabled(f, s)) continue;
                        steps.push_back(Step{Step::Kind::Sync, static_cast<int>(ai),
                                             static_cast<int>(ei), static_cast<int>(bi),
                                             static_cast<int>(fi)});
                        if (urgent_channel(e.sync->channel)) urgent_enabled = true;
                    }
                }
            }
        }
        if (!urgent_enabled && invariants_hold_after_delay(s)) {
            steps.push_back(Step{Step::Kind::Delay, -1, -1, -1, -1});
        }
        return steps;
    }

private:
    using NodeIndex = std::map<NodeId, int>;

    const Nta* nta_;
    std::vector<ClockId> clock_names_;
    std::map<ClockId, int> clock_index_;
    std::map<AutomatonId, int> automaton_index_;
    std::vector<NodeIndex> node_index_;
    std::set<ChannelId> urgent_channels_;
    Valuation vars_;
    int cap_ = 1;
};

// ── Explored graph ──────────────────────────────────────────────────────────

struct StateGraph {
    std::vector<ExplorationState> states;  // index 0 is the initial state
    std::vector<std::vector<std::pair<Step, int>>> successors;
    std::vector<int> bfs_parent;           // -1 for the initial state
    std::vector<Step> bfs_step;            // step taken from the parent
    std::vector<int> terminals;            // no successors, or only the capped delay self-loop
    bool truncated = false;
};

inline ExplorationState initial_state(const Nta& nta) {
    return ExplorerModel(nta).initial_state();
}

inline std::vector<std::pair<Step, ExplorationState>> successors(const ExplorerModel& model,
                                                                 const ExplorationState& s) {
    std::vector<std::pair<Step, ExplorationState>> out;
    for (const auto& st : model.enabled_steps(s)) {
        out.emplace_back(st, model.apply_step(st, s));
    }
    return out;
}

inline std::vector<std::pair<Step, ExplorationState>> successors(const Nta& nta,
                                                                 const ExplorationState& s) {
    return successors(ExplorerModel(nta), s);
}

// BFS with full-state deduplication. Hits of the state budget set the
// truncated flag and return the partial graph.
inline StateGraph explore(const ExplorerModel& model, size_t state_budget = 1000000) {
    if (state_budget == 0) throw Error("BudgetExceeded", "state budget must be positive");
    StateGraph g;
    std::map<ExplorationState, int> seen;
    std::deque<int> frontier;
    auto add_state = [&](const ExplorationState& s) {
        auto it = seen.find(s);
        if (it != seen.end()) return std::pair<int, bool>{it->second, false};
        int id = static_cast<int>(g.states.size());
        seen.emplace(s, id);
        g.states.push_back(s);
        g.successors.emplace_back();
        g.bfs_parent.push_back(-1);
        g.bfs_step.push_back(Step{});
        return std::pair<int, bool>{id, true};
    };
    auto [root, fresh] = add_state(model.initial_state());
    frontier.push_back(root);
    while (!frontier.empty()) {
        int cur = frontier.front();
        frontier.pop_front();
        ExplorationState state = g.states[cur];
        auto succ = successors(model, state);
        bool terminal = true;
        for (const auto& [step, next] : succ) {
            if (!(next == state)) terminal = false;
            if (!seen.count(next) && g.states.size() >= state_budget) {
                g.truncated = true;
                continue;
            }
            auto [id, is_new] = add_state(next);
            g.successors[cur].emplace_back(step, id);
            if (is_new) {
                g.bfs_parent[id] = cur;
                g.bfs_step[id] = step;
                frontier.push_back(id);
            }
        }
        if (terminal) g.terminals.push_back(cur);
    }
    return g;
}

inline StateGraph explore(const Nta& nta, size_t state_budget = 1000000) {
    return explore(ExplorerModel(nta), state_budget);
}

// ── Query evaluation ────────────────────────────────────────────────────────

namespace detail {

// Resolve the query's names once against the model, then evaluate per state.
class ExprEval {
public:
    ExprEval(const ExplorerModel& model, const QExpr& e) : model_(model) { compile(e); }

    bool operator()(const ExplorationState& s) const { return eval(0, s); }

private:
    struct CNode {
        QExpr::Op op;
        int a = 0, b = 0;       // child slots
        int automaton = 0, node = 0;
        int clock = 0;
        Cmp cmp = Cmp::Le;
        int bound = 0;
        char set_array = 'V';
        bool expected = true;
        std::string name;
    };

    const ExplorerModel& model_;
    std::vector<CNode> nodes_;

    int compile(const QExpr& e) {
        int id = static_cast<int>(nodes_.size());
        nodes_.emplace_back();
        CNode n;
        n.op = e.op;
        switch (e.op) {
            case QExpr::Op::True:
            case QExpr::Op::False:
                break;
            case QExpr::Op::Location: {
                auto dot = e.name.find('.');
                if (dot == std::string::npos) {
                    throw Error("UnresolvedName", "location atom needs Automaton.node: " + e.name);
                }
                n.automaton = model_.automaton_of(e.name.substr(0, dot));
                n.node = model_.node_of(n.automaton, e.name.substr(dot + 1));
                break;
            }
            case QExpr::Op::Clock:
                n.clock = model_.clock_of(e.name);
                n.cmp = e.cmp;
                n.bound = e.bound;
                break;
            case QExpr::Op::SetMember:
                if (!model_.nta().clause_index.count(e.name)) {
                    throw Error("UnresolvedName", "unknown clause " + e.name);
                }
                n.set_array = e.set_array;
                n.expected = e.expected;
                n.name = e.name;
                break;
            case QExpr::Op::Done:
                n.name = e.name;
                break;
            case QExpr::Op::Not:
                n.a = compile(*e.lhs);
                break;
            case QExpr::Op::And:
            case QExpr::Op::Or:
                n.a = compile(*e.lhs);
                n.b = compile(*e.rhs);
                break;
        }
        nodes_[id] = std::move(n);
        return id;
    }

    bool eval(int id, const ExplorationState& s) const {
        const CNode& n = nodes_[id];
        switch (n.op) {
            case QExpr::Op::True: return true;
            case QExpr::Op::False: return false;
            case QExpr::Op::Location: return s.locs[n.automaton] == n.node;
            case QExpr::Op::Clock: return cmp_holds(s.clocks[n.clock], n.cmp, n.bound);
            case QExpr::Op::SetMember: {
                const auto& set = n.set_array == 'V'   ? s.sets.violated
                                  : n.set_array == 'S' ? s.sets.satisfied
                                                       : s.sets.permitted;
                return (set.count(n.name) > 0) == n.expected;
            }
            case QExpr::Op::Done: return s.done.count(n.name) > 0;
            case QExpr::Op::Not: return !eval(n.a, s);
            case QExpr::Op::And: return eval(n.a, s) && eval(n.b, s);
            case QExpr::Op::Or: return eval(n.a, s) || eval(n.b, s);
        }
        return false;
    }
};

inline std::vector<Step> path_from_root(const StateGraph& g, int target) {
    std::vector<Step> steps;
    for (int cur = target; g.bfs_parent[cur] >= 0; cur = g.bfs_parent[cur]) {
        steps.push_back(g.bfs_step[cur]);
    }
    std::reverse(steps.begin(), steps.end());
    return steps;
}

}  // namespace detail

struct Verdict {
    bool holds = false;
    std::vector<Step> trace;      // witness or counterexample, from the initial state
    bool trace_is_lasso = false;  // the trace's tail revisits an earlier state
    size_t states_explored = 0;
    std::string note;
};

inline Verdict check(const ExplorerModel& model, const Query& q, size_t state_budget = 1000000) {
    StateGraph g = explore(model, state_budget);
    if (g.truncated) {
        throw Error("BudgetExceeded", "state budget exhausted before the graph closed");
    }
    Verdict v;
    v.states_explored = g.states.size();
    switch (q.kind) {
        case QueryKind::ExistsEventually: {
            detail::ExprEval want(model, *q.expr);
            for (size_t i = 0; i < g.states.size(); ++i) {
                if (want(g.states[i])) {
                    v.holds = true;
                    v.trace = detail::path_from_root(g, static_cast<int>(i));
                    v.note = "witness reaches a matching state";
                    return v;
                }
            }
            v.holds = false;
            return v;
        }
        case QueryKind::Always: {
            detail::ExprEval want(model, *q.expr);
            for (size_t i = 0; i < g.states.size(); ++i) {
                if (!want(g.states[i])) {
                    v.holds = false;
                    v.trace = detail::path_from_root(g, static_cast<int>(i));
                    v.note = "counterexample reaches a violating state";
                    return v;
                }
            }
            v.holds = true;
            return v;
        }
        case QueryKind::LeadsTo: {
            detail::ExprEval is_p(model, *q.lhs);
            detail::ExprEval is_q(model, *q.rhs);
            const size_t n = g.states.size();
            std::vector<char> notq(n);
            for (size_t i = 0; i < n; ++i) notq[i] = !is_q(g.states[i]);
            // bad = a not-q state from which some maximal path stays in not-q:
            // it can reach, inside not-q, a deadlock or a not-q cycle.
            // Detect with a DFS coloring over the not-q subgraph.
            enum { White, Grey, Black };
            std::vector<char> color(n, White);
            std::vector<char> bad(n, 0);
            // iterative DFS
            for (size_t start = 0; start < n; ++start) {
                if (!notq[start] || color[start] != White) continue;
                std::vector<std::pair<int, size_t>> stack{{static_cast<int>(start), 0}};
                color[start] = Grey;
                while (!stack.empty()) {
                    auto& [cur, idx] = stack.back();
                    if (g.successors[cur].empty()) bad[cur] = 1;  // deadlock
                    if (idx < g.successors[cur].size()) {
                        int next = g.successors[cur][idx].second;
                        idx++;
                        if (!notq[next]) continue;
                        if (color[next] == Grey) {
                            bad[cur] = 1;  // cycle within not-q
                        } else if (color[next] == White) {
                            color[next] = Grey;
                            stack.emplace_back(next, 0);
                        } else if (bad[next]) {
                            bad[cur] = 1;
                        }
                    } else {
                        color[cur] = Black;
                        int finished = cur;
                        stack.pop_back();
                        if (bad[finished] && !stack.empty()) {
                            bad[stack.back().first] = 1;
                        }
                    }
                }
            }
            for (size_t i = 0; i < n; ++i) {
                if (is_p(g.states[i]) && notq[i] && bad[i]) {
                    v.holds = false;
                    v.trace = detail::path_from_root(g, static_cast<int>(i));
                    // extend the trace inside bad not-q states to show escape
                    // never happens
                    std::set<int> visited;
                    int cur = static_cast<int>(i);
                    while (visited.insert(cur).second) {
                        bool moved = false;
                        for (const auto& [step, next] : g.successors[cur]) {
                            if (notq[next] && bad[next]) {
                                v.trace.push_back(step);
                                cur = next;
                                moved = true;
                                break;
                            }
                        }
                        if (!moved) break;  // deadlock end
                        if (visited.count(cur)) v.trace_is_lasso = true;
                    }
                    v.note = "p-state with a path never reaching q";
                    return v;
                }
            }
            v.holds = true;
            return v;
        }
    }
    return v;
}

inline Verdict check(const Nta& nta, const Query& q, size_t state_budget = 1000000) {
    return check(ExplorerModel(nta, query_clock_ceiling(q)), q, state_budget);
}

inline Verdict check(const Nta& nta, const std::string& query_text,
                     size_t state_budget = 1000000) {
    return check(nta, parse_query(query_text), state_budget);
}

// Human-readable rendering of a trace for CLI output and trace files.
inline std::vector<std::string> render_trace(const Nta& nta, const std::vector<Step>& trace) {
    std::vector<std::string> out;
    for (const auto& st : trace) {
        switch (st.kind) {
            case Step::Kind::Delay:
                out.push_back("delay 1");
                break;
            case Step::Kind::Internal: {
                const auto& a = nta.automata[st.automaton];
                const auto& e = a.edges[st.edge];
                std::string line = a.name + ": " + e.source + " -> " + e.target;
                if (e.action) line += " [" + e.action->agent + "." + e.action->action + "]";
                out.push_back(std::move(line));
                break;
            }
            case Step::Kind::Sync: {
                const auto& a = nta.automata[st.automaton];
                const auto& e = a.edges[st.edge];
                const auto& b = nta.automata[st.peer_automaton];
                const auto& f = b.edges[st.peer_edge];
                out.push_back(a.name + ": " + e.source + " -> " + e.target + " [" +
                              e.sync->channel + "!] / " + b.name + ": " + f.source + " -> " +
                              f.target + " [" + f.sync->channel + "?]");
                break;
            }
        }
    }
    return out;
}

}  // namespace cod
