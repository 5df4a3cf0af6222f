#pragma once

#include <json.hpp>

#include "cod/nta.hpp"

namespace cod {

// Canonical JSON form of a network: stable field order, construction order
// preserved for nodes and edges, maps sorted by key. This is the intermediate
// representation consumed by the explorer and the exporters.

using Json = nlohmann::ordered_json;

namespace detail {

inline Json to_json(const Guard& g) {
    Json arr = Json::array();
    for (const auto& a : g.conjuncts) {
        Json o;
        o["var"] = a.var;
        if (a.minus_var) o["minus"] = *a.minus_var;
        o["op"] = cmp_text(a.op);
        o["bound"] = a.bound;
        arr.push_back(std::move(o));
    }
    return arr;
}

inline Json to_json(const ClockInterval& iv) {
    Json o;
    o["clock"] = iv.clock;
    o["lower"] = iv.lower;
    if (iv.upper) o["upper"] = *iv.upper;
    return o;
}

inline Json to_json(const Edge& e) {
    Json o;
    o["source"] = e.source;
    o["target"] = e.target;
    if (!e.guard.empty()) o["guard"] = to_json(e.guard);
    if (!e.windows.empty()) {
        Json ws = Json::array();
        for (const auto& w : e.windows) ws.push_back(to_json(w));
        o["windows"] = std::move(ws);
    }
    if (e.point_guard) {
        o["point"] = Json{{"clock", e.point_guard->clock}, {"value", e.point_guard->value}};
    }
    if (e.action) o["action"] = Json{{"id", e.action->action}, {"agent", e.action->agent}};
    if (e.sync) {
        o["sync"] = Json{{"channel", e.sync->channel},
                         {"dir", e.sync->dir == SyncDir::Send ? "!" : "?"}};
    }
    if (!e.resets.empty()) o["resets"] = e.resets;
    if (!e.effects.empty()) {
        Json effs = Json::array();
        for (const auto& eff : e.effects) {
            effs.push_back(Json{{"kind", effect_text(eff.kind)}, {"clause", eff.clause}});
        }
        o["effects"] = std::move(effs);
    }
    if (e.urgent) o["urgent"] = true;
    return o;
}

}  // namespace detail

inline Json nta_to_json(const Nta& nta) {
    Json doc;
    Json autos = Json::array();
    for (const auto& a : nta.automata) {
        Json ja;
        ja["name"] = a.name;
        ja["initial"] = a.initial;
        Json nodes = Json::array();
        for (const auto& n : a.nodes) {
            Json jn;
            jn["id"] = n.id;
            jn["role"] = role_text(n.role);
            if (!n.annot_v.empty()) jn["V"] = n.annot_v;
            if (!n.annot_s.empty()) jn["S"] = n.annot_s;
            if (!n.annot_p.empty()) jn["P"] = n.annot_p;
            nodes.push_back(std::move(jn));
        }
        ja["nodes"] = std::move(nodes);
        Json edges = Json::array();
        for (const auto& e : a.edges) edges.push_back(detail::to_json(e));
        ja["edges"] = std::move(edges);
        Json invs = Json::object();
        // std::map keeps node ids sorted
        for (const auto& [node, atoms] : a.invariants) {
            if (atoms.empty()) continue;
            Json arr = Json::array();
            for (const auto& at : atoms) {
                arr.push_back(Json{{"clock", at.clock}, {"bound", at.bound}});
            }
            invs[node] = std::move(arr);
        }
        ja["invariants"] = std::move(invs);
        autos.push_back(std::move(ja));
    }
    doc["automata"] = std::move(autos);
    Json chans = Json::array();
    for (const auto& c : nta.channels) {
        chans.push_back(Json{{"id", c.id}, {"urgent", c.urgent}});
    }
    doc["channels"] = std::move(chans);
    doc["clocks"] = nta.clock_table.entries;
    doc["variables"] = nta.variables;
    Json idx = Json::object();
    for (const auto& [name, kind] : nta.clause_index) idx[name] = deontic_text(kind);
    doc["clause_index"] = std::move(idx);
    return doc;
}

inline std::string nta_to_json_text(const Nta& nta) { return nta_to_json(nta).dump(2) + "\n"; }

}  // namespace cod
