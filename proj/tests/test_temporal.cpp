#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "helpers.hpp"

using namespace cod;
using codtest::Rng;

namespace {

TimeRestriction tr_of(std::initializer_list<ClockAtom> atoms) {
    TimeRestriction tr;
    for (const auto& a : atoms) tr.conjuncts.push_back(a);
    return tr;
}

ClockAtom abs_atom(Cmp op, int bound) { return ClockAtom{ClockRef{}, std::nullopt, op, bound}; }

ClockAtom rel_atom(const std::string& clause, Cmp op, int bound) {
    return ClockAtom{ClockRef{false, clause}, std::nullopt, op, bound};
}

}  // namespace

TEST_CASE("normalize_restriction produces the tightest window") {
    SUBCASE("empty restriction is the trivial window") {
        ClockInterval iv = normalize_restriction({});
        CHECK(iv.clock == kGlobalClock);
        CHECK(iv.lower == 0);
        CHECK(iv.unbounded());
        CHECK(iv.trivial());
    }
    SUBCASE("T >= 5 and T <= 10 gives (5,10)") {
        ClockInterval iv = normalize_restriction(tr_of({abs_atom(Cmp::Ge, 5), abs_atom(Cmp::Le, 10)}));
        CHECK(iv.lower == 5);
        CHECK(iv.upper == 10);
    }
    SUBCASE("strict bounds tighten by one") {
        ClockInterval iv = normalize_restriction(tr_of({abs_atom(Cmp::Gt, 2), abs_atom(Cmp::Lt, 9)}));
        CHECK(iv.lower == 3);
        CHECK(iv.upper == 8);
    }
    SUBCASE("equality pins both bounds") {
        ClockInterval iv = normalize_restriction(tr_of({abs_atom(Cmp::Eq, 4)}));
        CHECK(iv.lower == 4);
        CHECK(iv.upper == 4);
    }
    SUBCASE("redundant conjuncts collapse") {
        ClockInterval iv = normalize_restriction(
            tr_of({abs_atom(Cmp::Le, 7), abs_atom(Cmp::Le, 5), abs_atom(Cmp::Ge, 1)}));
        CHECK(iv.lower == 1);
        CHECK(iv.upper == 5);
    }
    SUBCASE("relative clocks normalize to t_name") {
        ClockInterval iv = normalize_restriction(tr_of({rel_atom("Pay", Cmp::Le, 3)}));
        CHECK(iv.clock == relative_clock("Pay"));
        CHECK(iv.upper == 3);
    }
    SUBCASE("mixed clocks are rejected") {
        CHECK_THROWS_WITH_AS(
            (void)normalize_restriction(tr_of({abs_atom(Cmp::Le, 3), rel_atom("P", Cmp::Ge, 1)})),
            doctest::Contains("clock"), Error);
    }
    SUBCASE("difference constraints are rejected") {
        ClockAtom a = abs_atom(Cmp::Le, 3);
        a.minus_clock = ClockRef{false, "P"};
        CHECK_THROWS_AS((void)normalize_restriction(tr_of({a})), Error);
    }
    SUBCASE("contradictions are rejected") {
        CHECK_THROWS_AS(
            (void)normalize_restriction(tr_of({abs_atom(Cmp::Ge, 6), abs_atom(Cmp::Le, 2)})),
            Error);
    }
}

TEST_CASE("intersect combines windows on one clock") {
    ClockInterval a{kGlobalClock, 2, 8};
    ClockInterval b{kGlobalClock, 4, std::nullopt};
    ClockInterval both = intersect(a, b);
    CHECK(both.lower == 4);
    CHECK(both.upper == 8);
    CHECK(intersect(b, b).unbounded());
    CHECK_THROWS_AS((void)intersect(a, ClockInterval{"t_X", 0, 1}), Error);
    CHECK_THROWS_AS((void)intersect(ClockInterval{kGlobalClock, 5, 6},
                                    ClockInterval{kGlobalClock, 0, 4}),
                    Error);
}

TEST_CASE("guard evaluation") {
    Valuation val{{"x", 3}, {"y", 5}};
    CHECK(eval_guard({}, val));
    CHECK(eval_atom(VarAtom{"x", std::nullopt, Cmp::Le, 3}, val));
    CHECK(!eval_atom(VarAtom{"x", std::nullopt, Cmp::Lt, 3}, val));
    CHECK(eval_atom(VarAtom{"y", "x", Cmp::Eq, 2}, val));
    CHECK(eval_atom(VarAtom{"x", "y", Cmp::Le, 0}, val));  // negative difference
    CHECK_THROWS_AS((void)eval_atom(VarAtom{"z", std::nullopt, Cmp::Le, 1}, val), Error);
}

// Complement law, checked exhaustively over small valuations: a valuation
// falsifies g iff it satisfies some member of negate_guard(g).
TEST_CASE("negate_guard is the exact complement") {
    Rng rng(11);
    const std::vector<std::string> vars{"x", "y"};
    for (int round = 0; round < 300; ++round) {
        Guard g;
        int n = rng.range(1, 3);
        for (int i = 0; i < n; ++i) {
            VarAtom a;
            a.var = vars[rng.below(2)];
            if (rng.coin(0.25)) a.minus_var = vars[rng.below(2)];
            a.op = static_cast<Cmp>(rng.below(5));
            a.bound = rng.range(0, 5);
            g.conjuncts.push_back(std::move(a));
        }
        auto family = negate_guard(g);
        for (int x = 0; x <= 6; ++x) {
            for (int y = 0; y <= 6; ++y) {
                Valuation val{{"x", x}, {"y", y}};
                bool holds = eval_guard(g, val);
                bool complement = false;
                for (const auto& m : family) complement = complement || eval_guard(m, val);
                CAPTURE(x);
                CAPTURE(y);
                CHECK(holds == !complement);
            }
        }
    }
}

TEST_CASE("negate_guard corner cases") {
    CHECK_THROWS_AS((void)negate_guard({}), Error);
    // v >= 0 has no satisfiable complement over the naturals
    Guard always{{VarAtom{"v", std::nullopt, Cmp::Ge, 0}}};
    CHECK(negate_guard(always).empty());
    // difference atoms keep their complement even when negative
    Guard diff{{VarAtom{"v", "w", Cmp::Ge, 0}}};
    auto family = negate_guard(diff);
    REQUIRE(family.size() == 1);
    CHECK(family[0].conjuncts[0].op == Cmp::Le);
    CHECK(family[0].conjuncts[0].bound == -1);
    // equality splits in two
    Guard eq{{VarAtom{"v", std::nullopt, Cmp::Eq, 3}}};
    CHECK(negate_guard(eq).size() == 2);
}
