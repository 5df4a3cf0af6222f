#pragma once

#include <sstream>
#include <string>
#include <vector>

namespace cod {

struct SourcePos {
    int line = 1;
    int col = 1;
};

struct Diagnostic {
    SourcePos pos;
    std::string code;     // e.g. SyntaxError, DuplicateName
    std::string message;

    std::string render(const std::string& file = "<input>") const {
        std::ostringstream os;
        os << file << ":" << pos.line << ":" << pos.col << ": " << code << ": " << message;
        return os.str();
    }
};

using Diagnostics = std::vector<Diagnostic>;

}  // namespace cod
