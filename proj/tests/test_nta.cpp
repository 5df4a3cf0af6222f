#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "helpers.hpp"

using namespace cod;
using codtest::Rng;

namespace {

StateSets random_sets(Rng& rng) {
    const std::vector<ClauseName> pool{"a", "b", "c", "d"};
    StateSets s;
    for (const auto& c : pool) {
        if (rng.coin(0.4)) s.violated.insert(c);
        if (rng.coin(0.4)) s.satisfied.insert(c);
        if (rng.coin(0.4)) s.permitted.insert(c);
    }
    return s;
}

Contract load(const std::string& name) {
    std::ifstream in(std::filesystem::path(COD_CORPUS_DIR) / name, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    ParseResult pr = parse_contract(buf.str());
    REQUIRE(pr.ok());
    return std::move(*pr.contract);
}

}  // namespace

TEST_CASE("apply_effects semantics") {
    StateSets s;
    s = apply_effects(s, {{EffectKind::AddViolation, "a"}, {EffectKind::AddSatisfaction, "b"}});
    CHECK(s.violated == std::set<ClauseName>{"a"});
    CHECK(s.satisfied == std::set<ClauseName>{"b"});

    SUBCASE("idempotent") {
        StateSets twice = apply_effects(s, {{EffectKind::AddViolation, "a"}});
        CHECK(twice == s);
    }
    SUBCASE("clear removes only its clause") {
        StateSets t = apply_effects(s, {{EffectKind::ClearViolation, "a"},
                                        {EffectKind::ClearViolation, "zz"}});
        CHECK(t.violated.empty());
        CHECK(t.satisfied == s.satisfied);
    }
    SUBCASE("left-to-right order") {
        StateSets t = apply_effects(s, {{EffectKind::ClearViolation, "a"},
                                        {EffectKind::AddViolation, "a"}});
        CHECK(t.violated == std::set<ClauseName>{"a"});
        StateSets u = apply_effects(s, {{EffectKind::AddViolation, "a"},
                                        {EffectKind::ClearViolation, "a"}});
        CHECK(u.violated.empty());
    }
    SUBCASE("permissions never interact with violations") {
        StateSets t = apply_effects({}, {{EffectKind::AddPermission, "p"}});
        CHECK(t.violated.empty());
        CHECK(t.permitted == std::set<ClauseName>{"p"});
    }
}

TEST_CASE("compare_nodes on fixed examples") {
    StateSets empty;
    StateSets v1{{"a"}, {}, {}};
    StateSets v12{{"a", "b"}, {}, {}};
    StateSets s1{{}, {"x"}, {}};

    CHECK(compare_nodes(empty, v1) == Ordering::Better);
    CHECK(compare_nodes(v1, empty) == Ordering::Worse);
    CHECK(compare_nodes(v1, v12) == Ordering::Better);
    CHECK(compare_nodes(s1, empty) == Ordering::Better);  // more satisfied, same violations
    CHECK(compare_nodes(empty, empty) == Ordering::Equal);
    // disjoint violation sets are incomparable
    StateSets va{{"a"}, {}, {}};
    StateSets vb{{"b"}, {}, {}};
    CHECK(compare_nodes(va, vb) == Ordering::Incomparable);
    // permissions are ignored
    StateSets p1{{}, {}, {"p"}};
    CHECK(compare_nodes(p1, empty) == Ordering::Equal);
}

TEST_CASE("compare_nodes is a strict partial order") {
    Rng rng(21);
    int better_seen = 0;
    for (int i = 0; i < 1000; ++i) {
        StateSets a = random_sets(rng);
        StateSets b = random_sets(rng);
        StateSets c = random_sets(rng);

        // irreflexivity: nothing is better than itself
        CHECK(compare_nodes(a, a) == Ordering::Equal);

        // asymmetry: Better and Worse are converse
        Ordering ab = compare_nodes(a, b);
        Ordering ba = compare_nodes(b, a);
        switch (ab) {
            case Ordering::Better: CHECK(ba == Ordering::Worse); break;
            case Ordering::Worse: CHECK(ba == Ordering::Better); break;
            case Ordering::Equal: CHECK(ba == Ordering::Equal); break;
            case Ordering::Incomparable: CHECK(ba == Ordering::Incomparable); break;
        }

        // transitivity of Better
        if (ab == Ordering::Better && compare_nodes(b, c) == Ordering::Better) {
            better_seen++;
            CHECK(compare_nodes(a, c) == Ordering::Better);
        }
        // Equal states differ at most in permissions
        if (ab == Ordering::Equal) {
            CHECK(a.violated == b.violated);
            CHECK(a.satisfied == b.satisfied);
        }
    }
    CHECK(better_seen > 0);  // the law was actually exercised
}

TEST_CASE("compare_edges requires a common source") {
    StateSets good;
    StateSets bad{{"a"}, {}, {}};
    CHECK(compare_edges("n1", good, "n1", bad) == Ordering::Better);
    CHECK(compare_edges("n1", good, "n2", bad) == Ordering::Incomparable);
    CHECK(compare_edges("n1", good, "n2", good) == Ordering::Incomparable);
}

TEST_CASE("well-formedness catches structural faults") {
    Nta nta;
    ExtTimedAutomaton ta;
    ta.name = "A";
    ta.nodes.push_back(Node{"n1", NodeRole::Init, {}, {}, {}});
    ta.nodes.push_back(Node{"n2", NodeRole::End, {}, {}, {}});
    ta.initial = "n1";
    Edge e;
    e.source = "n1";
    e.target = "n2";
    ta.edges.push_back(e);
    nta.automata.push_back(ta);
    CHECK(well_formedness_issues(nta).empty());

    SUBCASE("duplicate node id") {
        nta.automata[0].nodes.push_back(Node{"n1", NodeRole::Plain, {}, {}, {}});
        CHECK(!well_formedness_issues(nta).empty());
    }
    SUBCASE("dangling edge endpoint") {
        nta.automata[0].edges[0].target = "ghost";
        CHECK(!well_formedness_issues(nta).empty());
    }
    SUBCASE("global clock reset") {
        nta.automata[0].edges[0].resets.insert(kGlobalClock);
        CHECK(!well_formedness_issues(nta).empty());
    }
    SUBCASE("action and sync on one edge") {
        nta.automata[0].edges[0].action = ActionLabel{"a", "x"};
        nta.automata[0].edges[0].sync = SyncLabel{"m", SyncDir::Send};
        nta.channels.push_back(Channel{"m", true});
        CHECK(!well_formedness_issues(nta).empty());
    }
    SUBCASE("channel without a receiver") {
        nta.automata[0].edges[0].sync = SyncLabel{"m", SyncDir::Send};
        nta.channels.push_back(Channel{"m", true});
        CHECK(!well_formedness_issues(nta).empty());
    }
    SUBCASE("effect on an unindexed clause") {
        nta.automata[0].edges[0].effects.push_back({EffectKind::AddViolation, "mystery"});
        CHECK(!well_formedness_issues(nta).empty());
    }
}

TEST_CASE("compiled corpus networks are well-formed and serialize deterministically") {
    for (const char* name : {"auction.cod", "delivery.cod", "options.cod", "resale.cod"}) {
        CAPTURE(name);
        Contract c = load(name);
        Nta nta = compile(c);
        auto issues = well_formedness_issues(nta);
        for (const auto& i : issues) INFO(i);
        CHECK(issues.empty());

        Nta again = compile(load(name));
        CHECK(nta_to_json_text(nta) == nta_to_json_text(again));
        CHECK(nta_to_json(nta).dump(2) == nta_to_json(nta).dump(2));
    }
}
