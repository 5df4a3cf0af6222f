#pragma once

#include <set>

#include "cod/ast.hpp"

namespace cod {

struct Finding {
    std::string rule;     // e.g. DUPLICATE_NAME
    ClauseName clause;    // offending clause (may be empty for anonymous boxes)
    std::string message;
};

struct ValidationReport {
    std::vector<Finding> findings;

    bool clean() const { return findings.empty(); }
    bool has(const std::string& rule) const {
        for (const auto& f : findings)
            if (f.rule == rule) return true;
        return false;
    }
};

namespace detail {

class Validator {
public:
    explicit Validator(const Contract& c) : contract_(c) {}

    ValidationReport run() {
        collect_names();
        check_box(*contract_.root, /*below_deontic=*/false, /*deontic_seen=*/false);
        check_references();
        return std::move(report_);
    }

private:
    const Contract& contract_;
    ValidationReport report_;
    std::set<ClauseName> names_;

    void add(const std::string& rule, const ClauseName& clause, const std::string& msg) {
        report_.findings.push_back({rule, clause, msg});
    }

    void collect_names() {
        for_each_box(*contract_.root, [&](const Box& b) {
            if (b.name.empty()) return;
            if (!names_.insert(b.name).second) {
                add("DUPLICATE_NAME", b.name, "clause name used more than once");
            }
        });
    }

    // deontic_seen: a deontic operator already appeared on the path from the
    // contract (or reparation) root. Reparations restart the count.
    void check_box(const Box& b, bool below_deontic, bool deontic_seen) {
        if (below_deontic) {
            if (b.agent || !b.guard.empty() || !b.trestr.empty() || b.reparation) {
                add("DECORATED_BELOW_DEONTIC", b.name,
                    "boxes under a deontic operator carry no agent, guard, time "
                    "restriction or reparation");
            }
        } else {
            if (b.agent && !b.is_deontic()) {
                add("AGENT_ON_NONDEONTIC", b.name,
                    "agents appear only on boxes carrying a deontic operator");
            }
            if (b.is_deontic() && !b.agent) {
                add("MISSING_AGENT", b.name, "deontic box has no agent");
            }
        }
        if (b.is_deontic()) {
            if (deontic_seen || below_deontic) {
                add("NESTED_DEONTIC", b.name,
                    "deontic norms cannot be applied over other deontic norms");
            }
            if (b.reparation && b.deontic().op == DeonticKind::Permission) {
                add("REPARATION_ON_PERMISSION", b.name, "permissions carry no reparation");
            }
            check_box(*b.deontic().action, /*below_deontic=*/true, /*deontic_seen=*/true);
        } else if (b.is_refinement()) {
            if (b.reparation && !below_deontic) {
                add("REPARATION_ON_REFINEMENT", b.name,
                    "reparations appear only on obligation and prohibition boxes");
            }
            if (b.refinement().children.size() < 2) {
                add("REFINEMENT_ARITY", b.name, "refinements need at least two children");
            }
            for (const auto& c : b.refinement().children) {
                check_box(*c, below_deontic, deontic_seen);
            }
        } else {
            // atomic leaf: a deontic operator must appear above it
            if (!deontic_seen) {
                add("MISSING_DEONTIC", b.name,
                    "exactly one deontic norm must be specified in each branch");
            }
            if (b.reparation && !below_deontic) {
                add("REPARATION_ON_REFINEMENT", b.name,
                    "reparations appear only on obligation and prohibition boxes");
            }
        }
        if (b.reparation) {
            // a reparation is a contract of its own
            check_box(*b.reparation, /*below_deontic=*/false, /*deontic_seen=*/false);
        }
    }

    void check_references() {
        for_each_box(*contract_.root, [&](const Box& b) {
            for (const auto& a : b.guard.conjuncts) {
                if (!contract_.variables.count(a.var)) {
                    add("UNDECLARED_VARIABLE", b.name, "guard variable '" + a.var + "' not declared");
                }
                if (a.minus_var && !contract_.variables.count(*a.minus_var)) {
                    add("UNDECLARED_VARIABLE", b.name,
                        "guard variable '" + *a.minus_var + "' not declared");
                }
            }
            auto check_ref = [&](const ClockRef& r) {
                if (!r.absolute && !names_.count(r.reference)) {
                    add("UNKNOWN_CLAUSE_REFERENCE", b.name,
                        "after(" + r.reference + ") names no clause in the contract");
                }
            };
            for (const auto& a : b.trestr.conjuncts) {
                check_ref(a.clock);
                if (a.minus_clock) check_ref(*a.minus_clock);
            }
        });
    }
};

}  // namespace detail

inline ValidationReport validate(const Contract& c) {
    if (!c.root) {
        ValidationReport r;
        r.findings.push_back({"EMPTY_CONTRACT", "", "contract has no root box"});
        return r;
    }
    return detail::Validator(c).run();
}

}  // namespace cod
