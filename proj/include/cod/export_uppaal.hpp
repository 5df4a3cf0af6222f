#pragma once

#include <sstream>

#include "cod/nta.hpp"
#include "cod/query.hpp"

namespace cod {

// UPPAAL 4 flat-XML emission. Urgency uses the urgent-channel pattern: a
// helper automaton Urgent offers urg_edge? forever and every urgent plain
// edge sends urg_edge!. No committed locations, no functions; declarations
// use only clocks, channels, booleans, bool arrays and int constants.

struct UppaalDocuments {
    std::string xml;
    std::string queries;
};

namespace detail {

inline std::string sanitize_name(const std::string& raw) {
    std::string out;
    for (char c : raw) {
        if (std::isalnum(static_cast<unsigned char>(c)) || c == '_') {
            out.push_back(c);
        } else {
            out.push_back('_');
        }
    }
    if (out.empty() || std::isdigit(static_cast<unsigned char>(out[0]))) out.insert(0, "n_");
    return out;
}

// One scope's sanitizer; collisions between distinct raw names are an error.
class NameScope {
public:
    explicit NameScope(std::string what) : what_(std::move(what)) {}

    const std::string& get(const std::string& raw) {
        auto it = map_.find(raw);
        if (it != map_.end()) return it->second;
        std::string s = sanitize_name(raw);
        if (!used_.insert(s).second) {
            throw Error("NameCollisionAfterSanitize",
                        what_ + " name " + raw + " collides after sanitizing to " + s);
        }
        return map_.emplace(raw, std::move(s)).first->second;
    }

    void reserve(const std::string& s) { used_.insert(s); }

private:
    std::string what_;
    std::map<std::string, std::string> map_;
    std::set<std::string> used_;
};

inline std::string xml_escape(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            case '\'': out += "&apos;"; break;
            default: out.push_back(c);
        }
    }
    return out;
}

// Shared naming for the model and its query file.
struct UppaalNames {
    NameScope globals{"declaration"};       // clocks, channels, vars, flags, constants
    NameScope templates{"template"};        // automata
    std::map<AutomatonId, NameScope> locations;
    std::map<std::string, std::string> action_flags;  // "agent.action" -> flag

    std::map<ClauseName, int> vs_index;  // obligations and prohibitions
    std::map<ClauseName, int> p_index;   // permissions

    explicit UppaalNames(const Nta& nta) {
        globals.reserve("urg_edge");
        templates.reserve("Urgent");
        for (const auto& a : nta.automata) {
            templates.get(a.name);
            locations.emplace(a.name, NameScope{"location in " + a.name});
        }
        for (const auto& c : nta.clock_table.entries) globals.get(c);
        for (const auto& ch : nta.channels) globals.get(ch.id);
        for (const auto& [v, init] : nta.variables) globals.get(v);
        for (const auto& a : nta.automata) {
            for (const auto& e : a.edges) {
                if (!e.action) continue;
                std::string key = e.action->agent + "." + e.action->action;
                if (!action_flags.count(key)) {
                    action_flags[key] = globals.get(e.action->agent + "_" + e.action->action);
                }
            }
        }
        for (const auto& [name, kind] : nta.clause_index) {
            if (kind == DeonticKind::Permission) {
                p_index[name] = static_cast<int>(p_index.size());
            } else {
                vs_index[name] = static_cast<int>(vs_index.size());
            }
            globals.get(name);
        }
    }
};

inline std::string guard_expr(UppaalNames& n, const Edge& e) {
    std::vector<std::string> parts;
    for (const auto& a : e.guard.conjuncts) {
        std::string lhs = n.globals.get(a.var);
        if (a.minus_var) lhs += " - " + n.globals.get(*a.minus_var);
        parts.push_back(lhs + " " + cmp_text(a.op) + " " + std::to_string(a.bound));
    }
    for (const auto& w : e.windows) {
        const std::string& c = n.globals.get(w.clock);
        if (w.lower > 0) parts.push_back(c + " >= " + std::to_string(w.lower));
        if (w.upper) parts.push_back(c + " <= " + std::to_string(*w.upper));
    }
    if (e.point_guard) {
        parts.push_back(n.globals.get(e.point_guard->clock) + " == " +
                        std::to_string(e.point_guard->value));
    }
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += " && ";
        out += parts[i];
    }
    return out;
}

inline std::string assign_expr(UppaalNames& n, const Edge& e) {
    std::vector<std::string> parts;
    for (const auto& r : e.resets) parts.push_back(n.globals.get(r) + " = 0");
    for (const auto& eff : e.effects) {
        const std::string& c = n.globals.get(eff.clause);
        switch (eff.kind) {
            case EffectKind::AddViolation: parts.push_back("V[" + c + "] = true"); break;
            case EffectKind::AddSatisfaction: parts.push_back("S[" + c + "] = true"); break;
            case EffectKind::AddPermission: parts.push_back("P[" + c + "] = true"); break;
            case EffectKind::ClearViolation: parts.push_back("V[" + c + "] = false"); break;
        }
    }
    if (e.action) {
        parts.push_back(n.action_flags.at(e.action->agent + "." + e.action->action) + " = true");
    }
    std::string out;
    for (size_t i = 0; i < parts.size(); ++i) {
        if (i) out += ", ";
        out += parts[i];
    }
    return out;
}

inline std::string global_declarations(const Nta& nta, UppaalNames& names) {
    std::ostringstream d;
    d << "// generated model declarations\n";
    {
        d << "clock";
        bool first = true;
        for (const auto& c : nta.clock_table.entries) {
            d << (first ? " " : ", ") << names.globals.get(c);
            first = false;
        }
        d << ";\n";
    }
    d << "urgent chan urg_edge;\n";
    for (const auto& ch : nta.channels) {
        d << (ch.urgent ? "urgent chan " : "chan ") << names.globals.get(ch.id) << ";\n";
    }
    for (const auto& [v, init] : nta.variables) {
        d << "int " << names.globals.get(v) << " = " << init << ";\n";
    }
    for (const auto& [key, flag] : names.action_flags) {
        d << "bool " << flag << " = false;\n";
    }
    if (!names.vs_index.empty()) {
        d << "bool V[" << names.vs_index.size() << "];\n";
        d << "bool S[" << names.vs_index.size() << "];\n";
    }
    if (!names.p_index.empty()) {
        d << "bool P[" << names.p_index.size() << "];\n";
    }
    for (const auto& [name, idx] : names.vs_index) {
        d << "const int " << names.globals.get(name) << " = " << idx << ";\n";
    }
    for (const auto& [name, idx] : names.p_index) {
        d << "const int " << names.globals.get(name) << " = " << idx << ";\n";
    }
    return d.str();
}

inline std::string query_expr_text(const Nta& nta, UppaalNames& names, const QExpr& e) {
    switch (e.op) {
        case QExpr::Op::True: return "true";
        case QExpr::Op::False: return "false";
        case QExpr::Op::Location: {
            auto dot = e.name.find('.');
            if (dot == std::string::npos) {
                throw Error("QuerySyntax", "location atom needs Automaton.node: " + e.name);
            }
            std::string au = e.name.substr(0, dot);
            return names.templates.get(au) + "." + names.locations.at(au).get(e.name.substr(dot + 1));
        }
        case QExpr::Op::Clock:
            return names.globals.get(e.name) + " " + cmp_text(e.cmp) + " " +
                   std::to_string(e.bound);
        case QExpr::Op::SetMember: {
            std::string arr(1, e.set_array);
            return arr + "[" + names.globals.get(e.name) + "] == " +
                   (e.expected ? "true" : "false");
        }
        case QExpr::Op::Done:
            return names.action_flags.at(e.name) + " == true";
        case QExpr::Op::Not:
            return "!(" + query_expr_text(nta, names, *e.lhs) + ")";
        case QExpr::Op::And:
            return "(" + query_expr_text(nta, names, *e.lhs) + " && " +
                   query_expr_text(nta, names, *e.rhs) + ")";
        case QExpr::Op::Or:
            return "(" + query_expr_text(nta, names, *e.lhs) + " || " +
                   query_expr_text(nta, names, *e.rhs) + ")";
    }
    return "true";
}

}  // namespace detail

inline UppaalDocuments to_uppaal_xml(const Nta& nta, const std::vector<Query>& queries = {}) {
    detail::UppaalNames names(nta);
    std::ostringstream x;
    x << "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
    x << "<!DOCTYPE nta PUBLIC '-//Uppaal Team//DTD Flat System 1.1//EN' "
         "'http://www.it.uu.se/research/group/darts/uppaal/flat-1_1.dtd'>\n";
    x << "<nta>\n";
    x << "  <declaration>" << detail::xml_escape(detail::global_declarations(nta, names))
      << "</declaration>\n";

    std::vector<std::string> process_names;
    for (const auto& a : nta.automata) {
        const std::string& tname = names.templates.get(a.name);
        process_names.push_back(tname);
        auto& locs = names.locations.at(a.name);
        x << "  <template>\n";
        x << "    <name>" << detail::xml_escape(tname) << "</name>\n";
        std::map<NodeId, std::string> loc_id;
        for (size_t i = 0; i < a.nodes.size(); ++i) {
            loc_id[a.nodes[i].id] = tname + "_l" + std::to_string(i);
        }
        for (const auto& node : a.nodes) {
            x << "    <location id=\"" << loc_id[node.id] << "\">\n";
            x << "      <name>" << detail::xml_escape(locs.get(node.id)) << "</name>\n";
            auto inv = a.invariants.find(node.id);
            if (inv != a.invariants.end() && !inv->second.empty()) {
                std::string text;
                for (size_t i = 0; i < inv->second.size(); ++i) {
                    if (i) text += " && ";
                    text += names.globals.get(inv->second[i].clock) + " <= " +
                            std::to_string(inv->second[i].bound);
                }
                x << "      <label kind=\"invariant\">" << detail::xml_escape(text)
                  << "</label>\n";
            }
            x << "    </location>\n";
        }
        x << "    <init ref=\"" << loc_id[a.initial] << "\"/>\n";
        for (const auto& e : a.edges) {
            x << "    <transition>\n";
            x << "      <source ref=\"" << loc_id[e.source] << "\"/>\n";
            x << "      <target ref=\"" << loc_id[e.target] << "\"/>\n";
            std::string g = detail::guard_expr(names, e);
            if (!g.empty()) {
                x << "      <label kind=\"guard\">" << detail::xml_escape(g) << "</label>\n";
            }
            if (e.sync) {
                x << "      <label kind=\"synchronisation\">"
                  << detail::xml_escape(names.globals.get(e.sync->channel) +
                                        (e.sync->dir == SyncDir::Send ? "!" : "?"))
                  << "</label>\n";
            } else if (e.urgent) {
                x << "      <label kind=\"synchronisation\">urg_edge!</label>\n";
            }
            std::string asg = detail::assign_expr(names, e);
            if (!asg.empty()) {
                x << "      <label kind=\"assignment\">" << detail::xml_escape(asg)
                  << "</label>\n";
            }
            x << "    </transition>\n";
        }
        x << "  </template>\n";
    }

    // helper keeping urg_edge? always offered
    x << "  <template>\n";
    x << "    <name>Urgent</name>\n";
    x << "    <location id=\"Urgent_l0\">\n";
    x << "      <name>idle</name>\n";
    x << "    </location>\n";
    x << "    <init ref=\"Urgent_l0\"/>\n";
    x << "    <transition>\n";
    x << "      <source ref=\"Urgent_l0\"/>\n";
    x << "      <target ref=\"Urgent_l0\"/>\n";
    x << "      <label kind=\"synchronisation\">urg_edge?</label>\n";
    x << "    </transition>\n";
    x << "  </template>\n";

    x << "  <system>system";
    for (size_t i = 0; i < process_names.size(); ++i) {
        x << (i ? ", " : " ") << process_names[i];
    }
    x << (process_names.empty() ? " Urgent;" : ", Urgent;") << "</system>\n";
    x << "</nta>\n";

    std::ostringstream q;
    for (const auto& query : queries) {
        switch (query.kind) {
            case QueryKind::ExistsEventually:
                q << "E<> " << detail::query_expr_text(nta, names, *query.expr) << "\n";
                break;
            case QueryKind::Always:
                q << "A[] " << detail::query_expr_text(nta, names, *query.expr) << "\n";
                break;
            case QueryKind::LeadsTo:
                q << detail::query_expr_text(nta, names, *query.lhs) << " --> "
                  << detail::query_expr_text(nta, names, *query.rhs) << "\n";
                break;
        }
    }
    return UppaalDocuments{x.str(), q.str()};
}

}  // namespace cod
