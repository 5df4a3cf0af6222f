#pragma once

#include <sstream>

#include "cod/nta.hpp"

namespace cod {

// Graphviz rendering for inspection: one cluster per automaton, urgent edges
// with open arrowheads, node annotations between braces.

namespace detail {

inline std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

inline std::string dot_node_label(const Node& n) {
    std::string label = n.id;
    auto join = [](const std::set<ClauseName>& s) {
        std::string out;
        for (const auto& x : s) {
            if (!out.empty()) out += ",";
            out += x;
        }
        return out;
    };
    std::string annot;
    if (!n.annot_v.empty()) annot += "V:" + join(n.annot_v);
    if (!n.annot_s.empty()) annot += (annot.empty() ? "" : " ") + ("S:" + join(n.annot_s));
    if (!n.annot_p.empty()) annot += (annot.empty() ? "" : " ") + ("P:" + join(n.annot_p));
    if (!annot.empty()) label += "\n{" + annot + "}";
    return label;
}

inline std::string dot_edge_label(const Edge& e) {
    std::vector<std::string> lines;
    for (const auto& a : e.guard.conjuncts) {
        std::string lhs = a.var;
        if (a.minus_var) lhs += "-" + *a.minus_var;
        lines.push_back(lhs + cmp_text(a.op) + std::to_string(a.bound));
    }
    for (const auto& w : e.windows) {
        std::string t;
        if (w.lower > 0) t += std::to_string(w.lower) + "<=";
        t += w.clock;
        if (w.upper) t += "<=" + std::to_string(*w.upper);
        if (w.lower > 0 || w.upper) lines.push_back(t);
    }
    if (e.point_guard) {
        lines.push_back(e.point_guard->clock + "==" + std::to_string(e.point_guard->value));
    }
    if (e.action) lines.push_back(e.action->agent + "." + e.action->action);
    if (e.sync) lines.push_back(e.sync->channel + (e.sync->dir == SyncDir::Send ? "!" : "?"));
    for (const auto& r : e.resets) lines.push_back(r + ":=0");
    for (const auto& eff : e.effects) {
        lines.push_back(std::string(effect_text(eff.kind)) + eff.clause);
    }
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) out += "\n";
        out += l;
    }
    return out;
}

}  // namespace detail

inline std::string to_dot(const Nta& nta) {
    std::ostringstream d;
    d << "digraph contract {\n";
    d << "  rankdir=LR;\n";
    d << "  node [shape=circle, fontsize=10];\n";
    for (size_t ai = 0; ai < nta.automata.size(); ++ai) {
        const auto& a = nta.automata[ai];
        d << "  subgraph cluster_" << ai << " {\n";
        d << "    label=" << detail::dot_quote(a.name) << ";\n";
        for (const auto& n : a.nodes) {
            d << "    " << detail::dot_quote(a.name + "/" + n.id)
              << " [label=" << detail::dot_quote(detail::dot_node_label(n));
            if (n.id == a.initial) d << ", penwidth=2";
            if (n.role == NodeRole::Final || n.role == NodeRole::End) d << ", shape=doublecircle";
            auto inv = a.invariants.find(n.id);
            if (inv != a.invariants.end() && !inv->second.empty()) {
                std::string text;
                for (const auto& at : inv->second) {
                    if (!text.empty()) text += " ";
                    text += at.clock + "<=" + std::to_string(at.bound);
                }
                d << ", xlabel=" << detail::dot_quote(text);
            }
            d << "];\n";
        }
        for (const auto& e : a.edges) {
            d << "    " << detail::dot_quote(a.name + "/" + e.source) << " -> "
              << detail::dot_quote(a.name + "/" + e.target);
            std::string label = detail::dot_edge_label(e);
            d << " [";
            bool first = true;
            if (!label.empty()) {
                d << "label=" << detail::dot_quote(label);
                first = false;
            }
            if (e.urgent) {
                if (!first) d << ", ";
                d << "arrowhead=empty";
                first = false;
            }
            d << "];\n";
        }
        d << "  }\n";
    }
    d << "}\n";
    return d.str();
}

}  // namespace cod
