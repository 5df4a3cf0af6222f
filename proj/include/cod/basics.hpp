#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace cod {

using ClauseName = std::string;
using ActionId = std::string;
using AgentId = std::string;
using ClockId = std::string;
using NodeId = std::string;
using AutomatonId = std::string;
using ChannelId = std::string;

// The absolute clock. Never reset.
inline const ClockId kGlobalClock = "T";

inline ClockId relative_clock(const ClauseName& name) { return "t_" + name; }

enum class Cmp { Le, Lt, Eq, Gt, Ge };

inline const char* cmp_text(Cmp c) {
    switch (c) {
        case Cmp::Le: return "<=";
        case Cmp::Lt: return "<";
        case Cmp::Eq: return "==";
        case Cmp::Gt: return ">";
        case Cmp::Ge: return ">=";
    }
    return "?";
}

inline bool cmp_holds(long long lhs, Cmp c, long long rhs) {
    switch (c) {
        case Cmp::Le: return lhs <= rhs;
        case Cmp::Lt: return lhs < rhs;
        case Cmp::Eq: return lhs == rhs;
        case Cmp::Gt: return lhs > rhs;
        case Cmp::Ge: return lhs >= rhs;
    }
    return false;
}

// Library errors carry a stable code usable in tests and CLI output.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& message)
        : std::runtime_error(code + ": " + message), code_(std::move(code)) {}

    const std::string& code() const { return code_; }

private:
    std::string code_;
};

}  // namespace cod
