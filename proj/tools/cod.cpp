#include <CLI11.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "cod/cod.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitProperty = 1;  // validation findings or failed property
constexpr int kExitUsage = 2;     // usage, IO, parse errors

bool use_color() {
    if (std::getenv("COD_NO_COLOR") || std::getenv("NO_COLOR")) return false;
    return true;
}

std::string emph(const std::string& s) {
    if (!use_color()) return s;
    return "\033[1m" + s + "\033[0m";
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw cod::Error("IoError", "cannot read " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw cod::Error("IoError", "cannot write " + path.string());
    out << text;
}

cod::Contract parse_or_die(const std::string& path) {
    auto result = cod::parse_contract(read_file(path));
    if (!result.ok()) {
        for (const auto& d : result.diagnostics) {
            std::cerr << d.render(path) << "\n";
        }
        std::exit(kExitUsage);
    }
    return std::move(*result.contract);
}

int cmd_parse(const std::string& path) {
    cod::Contract c = parse_or_die(path);
    std::cout << cod::render_contract(c);
    return kExitOk;
}

int cmd_check(const std::string& path) {
    cod::Contract c = parse_or_die(path);
    cod::ValidationReport report = cod::validate(c);
    if (report.clean()) {
        std::cout << "clean\n";
        return kExitOk;
    }
    for (const auto& f : report.findings) {
        std::cout << emph(f.rule) << " " << f.clause << ": " << f.message << "\n";
    }
    return kExitProperty;
}

int cmd_compile(const std::string& path, const std::string& emit, const std::string& outdir) {
    cod::Contract c = parse_or_die(path);
    cod::Nta nta;
    try {
        nta = cod::compile(c);
    } catch (const cod::Error& e) {
        std::cerr << e.what() << "\n";
        return std::string(e.code()) == "InvalidContract" ? kExitProperty : kExitUsage;
    }
    std::string stem = std::filesystem::path(path).stem().string();
    if (emit == "json") {
        std::string text = cod::nta_to_json_text(nta);
        if (outdir.empty()) {
            std::cout << text;
        } else {
            write_file(std::filesystem::path(outdir) / (stem + ".json"), text);
        }
    } else if (emit == "dot") {
        std::string text = cod::to_dot(nta);
        if (outdir.empty()) {
            std::cout << text;
        } else {
            write_file(std::filesystem::path(outdir) / (stem + ".dot"), text);
        }
    } else {
        cod::UppaalDocuments docs = cod::to_uppaal_xml(nta);
        if (outdir.empty()) {
            std::cout << docs.xml;
        } else {
            write_file(std::filesystem::path(outdir) / (stem + ".xml"), docs.xml);
            write_file(std::filesystem::path(outdir) / (stem + ".q"), docs.queries);
        }
    }
    return kExitOk;
}

int cmd_verify(const std::string& path, std::string query_arg, size_t budget) {
    cod::Contract c = parse_or_die(path);
    if (!query_arg.empty() && query_arg[0] == '@') {
        query_arg = read_file(query_arg.substr(1));
        while (!query_arg.empty() && (query_arg.back() == '\n' || query_arg.back() == '\r')) {
            query_arg.pop_back();
        }
    }
    try {
        cod::Nta nta = cod::compile(c);
        cod::Query q = cod::parse_query(query_arg);
        cod::Verdict v = cod::check(nta, q, budget);
        std::cout << (v.holds ? emph("SATISFIED") : emph("NOT SATISFIED")) << "\n";
        std::cout << "states explored: " << v.states_explored << "\n";
        if (!v.trace.empty()) {
            std::cout << (v.holds ? "witness:" : "counterexample:") << "\n";
            for (const auto& line : cod::render_trace(nta, v.trace)) {
                std::cout << "  " << line << "\n";
            }
            if (v.trace_is_lasso) std::cout << "  (trace tail revisits an earlier state)\n";
        }
        return v.holds ? kExitOk : kExitProperty;
    } catch (const cod::Error& e) {
        std::cerr << e.what() << "\n";
        return std::string(e.code()) == "InvalidContract" ? kExitProperty : kExitUsage;
    }
}

std::string render_sets(const cod::StateSets& s) {
    auto join = [](const std::set<std::string>& xs) {
        std::string out;
        for (const auto& x : xs) {
            if (!out.empty()) out += ",";
            out += x;
        }
        return "{" + out + "}";
    };
    return "V=" + join(s.violated) + " S=" + join(s.satisfied) + " P=" + join(s.permitted);
}

int cmd_rank(const std::string& path, size_t budget) {
    cod::Contract c = parse_or_die(path);
    try {
        cod::Nta nta = cod::compile(c);
        cod::ExplorerModel model(nta);
        cod::StateGraph g = cod::explore(model, budget);
        if (g.truncated) throw cod::Error("BudgetExceeded", "state budget exhausted");
        std::vector<cod::StateSets> classes;
        for (int t : g.terminals) {
            const auto& sets = g.states[t].sets;
            bool known = false;
            for (const auto& s : classes) known = known || s == sets;
            if (!known) classes.push_back(sets);
        }
        std::sort(classes.begin(), classes.end());
        std::cout << "terminal classes: " << classes.size() << "\n";
        for (size_t i = 0; i < classes.size(); ++i) {
            bool maximal = true;
            for (size_t j = 0; j < classes.size(); ++j) {
                if (cod::compare_nodes(classes[j], classes[i]) == cod::Ordering::Better) {
                    maximal = false;
                }
            }
            std::cout << (maximal ? "best  " : "worse ") << render_sets(classes[i]) << "\n";
        }
        for (size_t i = 0; i < classes.size(); ++i) {
            for (size_t j = i + 1; j < classes.size(); ++j) {
                if (cod::compare_nodes(classes[i], classes[j]) == cod::Ordering::Incomparable) {
                    std::cout << "incomparable: " << render_sets(classes[i]) << " | "
                              << render_sets(classes[j]) << "\n";
                }
            }
        }
        return kExitOk;
    } catch (const cod::Error& e) {
        std::cerr << e.what() << "\n";
        return std::string(e.code()) == "InvalidContract" ? kExitProperty : kExitUsage;
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"C-O Diagram contract compiler and verifier"};
    app.require_subcommand(1);

    std::string file;
    std::string emit = "json";
    std::string outdir;
    std::string query;
    size_t budget = 1000000;
    int jobs = 1;
    bool terminals = false;

    auto* parse_cmd = app.add_subcommand("parse", "Parse a contract and dump the AST");
    parse_cmd->add_option("file", file, "contract file")->required();

    auto* check_cmd = app.add_subcommand("check", "Validate a contract");
    check_cmd->add_option("file", file, "contract file")->required();

    auto* compile_cmd = app.add_subcommand("compile", "Compile to an automaton network");
    compile_cmd->add_option("file", file, "contract file")->required();
    compile_cmd->add_option("--emit", emit, "output form")
        ->check(CLI::IsMember({"json", "dot", "uppaal"}));
    compile_cmd->add_option("-o,--output", outdir, "output directory");

    auto* verify_cmd = app.add_subcommand("verify", "Check a query against a contract");
    verify_cmd->add_option("file", file, "contract file")->required();
    verify_cmd->add_option("--query", query, "query text or @file")->required();
    verify_cmd->add_option("--budget", budget, "state budget");
    verify_cmd->add_option("--jobs", jobs, "worker count (exploration is deterministic)");

    auto* rank_cmd = app.add_subcommand("rank", "Order terminal states by the node ordering");
    rank_cmd->add_option("file", file, "contract file")->required();
    rank_cmd->add_flag("--terminals", terminals, "rank terminal states");
    rank_cmd->add_option("--budget", budget, "state budget");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (parse_cmd->parsed()) return cmd_parse(file);
        if (check_cmd->parsed()) return cmd_check(file);
        if (compile_cmd->parsed()) return cmd_compile(file, emit, outdir);
        if (verify_cmd->parsed()) return cmd_verify(file, query, budget);
        if (rank_cmd->parsed()) return cmd_rank(file, budget);
    } catch (const cod::Error& e) {
        std::cerr << e.what() << "\n";
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
    return kExitUsage;
}
