#include <filesystem>
#include <iomanip>
#include <iostream>

#include <CLI11.hpp>

#include "cdfg/harness.hpp"
#include "cdfg/io.hpp"
#include "cdfg/transform.hpp"

using namespace cdfg;

namespace {

enum Exit { ok = 0, mismatch = 1, inconclusive = 2, input_error = 3 };

struct Args {
    std::string file;
    std::string input;
    std::string out;
    std::string trace;
    std::string grammar;
    std::size_t max_steps = 1000;
    int max_len = 2;
    int max_depth = 25;
    int max_edges = 200;
    int max_copies = 2;
    bool all_components = false;
    bool tape_generator = false;
    bool with_cut = false;
};

bool is_json_file(const std::string& path) {
    return std::filesystem::path(path).extension() == ".json";
}

TuringMachine load_machine(const std::string& path) {
    auto text = read_file(path);
    if (is_json_file(path)) return machine_from_json(json::parse(text));
    return parse_tm(text);
}

void emit(const std::string& out, const std::string& text) {
    if (out.empty() || out == "-")
        std::cout << text;
    else
        write_file(out, text);
}

int cmd_simulate(const Args& a) {
    auto tm = load_machine(a.file);
    auto w = split_word(a.input);
    auto r = accepts(tm, w, a.max_steps);
    std::cout << to_string(r.verdict) << "\n";
    if (r.verdict == Verdict::accepted)
        for (const auto& c : r.run) std::cout << "  " << format_configuration(c) << "\n";
    return r.verdict == Verdict::bound_exceeded ? inconclusive : ok;
}

int cmd_transform(const Args& a) {
    Grammar g;
    if (a.tape_generator) {
        auto tm = load_machine(a.file);
        g = tape_generator_grammar(Encoding(tm), a.with_cut);
    } else {
        g = compile(load_machine(a.file));
    }
    std::size_t delta = 0, fuse = 0;
    for (const auto& r : g.rules) {
        if (r.name.rfind("Delta(", 0) == 0) ++delta;
        else if (r.name.rfind("fuse_", 0) == 0) ++fuse;
    }
    std::cout << "components " << connected_components(g.start).size() << "\n"
              << "rules " << g.rules.size() << " (Delta " << delta << ", fuse " << fuse << ")\n";
    for (const auto& r : g.rules)
        if (r.name.rfind("Delta(", 0) != 0 && r.name.rfind("fuse_", 0) != 0) std::cout << "  " << r.name << "\n";
    if (!a.out.empty()) write_file(a.out, to_json(g).dump(1) + "\n");
    return ok;
}

void print_members(const SearchResult& r) {
    for (const auto& m : r.members) {
        if (auto w = read_string_graph(m))
            std::cout << "  sg(" << join_word(*w) << ")\n";
        else
            std::cout << "  non-string member, " << m.edge_count() << " edges\n";
    }
}

int check_grammar(const Args& a) {
    auto g = grammar_from_json(json::parse(read_file(a.file)));
    SearchOptions so;
    so.max_depth = a.max_depth;
    so.max_edges = a.max_edges;
    so.max_copies = a.max_copies;
    auto r = bounded_search(g, so);
    std::cout << "members " << r.members.size() << " states " << r.states
              << (r.state_cap_hit ? " (state cap hit)" : "") << "\n";
    print_members(r);
    return r.state_cap_hit ? inconclusive : ok;
}

int cmd_check(const Args& a) {
    if (is_json_file(a.file)) return check_grammar(a);
    auto tm = load_machine(a.file);
    auto g = compile(tm);
    CheckOptions o;
    o.step_bound = a.max_steps;
    o.max_depth = a.max_depth;
    o.max_edges = a.max_edges;
    o.max_copies = a.max_copies;
    o.restricted = !a.all_components;
    if (!a.trace.empty()) std::filesystem::create_directories(a.trace);

    int mismatches = 0, unresolved = 0;
    std::cout << std::left << std::setw(8) << "word" << std::setw(16) << "oracle" << std::setw(14) << "result"
              << "detail\n";
    for (const auto& w : words_upto(tm.input, a.max_len)) {
        auto c = check_word(g, tm, w, o);
        std::cout << std::setw(8) << join_word(w) << std::setw(16) << to_string(c.oracle) << std::setw(14)
                  << to_string(c.status) << c.detail;
        if (c.oracle != Verdict::accepted) std::cout << " [" << c.states << " states]";
        std::cout << "\n";
        for (const auto& s : c.trace) std::cout << "    " << s << "\n";
        if (c.status == CheckStatus::mismatch) ++mismatches;
        if (c.status == CheckStatus::inconclusive) ++unresolved;
        if (!a.trace.empty() && c.oracle == Verdict::accepted)
            write_file(a.trace + "/" + join_word(w) + ".json", to_json(c.derivation).dump() + "\n");
    }
    std::cout << "mismatches " << mismatches << ", inconclusive " << unresolved << "\n";
    if (mismatches) return mismatch;
    return unresolved ? inconclusive : ok;
}

int cmd_export_dot(const Args& a) {
    auto j = json::parse(read_file(a.file));
    if (j.contains("vertices")) {
        emit(a.out, to_dot(graph_from_json(j)));
        return ok;
    }
    if (a.grammar.empty()) throw FormatError("a derivation trace needs --grammar");
    Grammar g = is_json_file(a.grammar) ? grammar_from_json(json::parse(read_file(a.grammar)))
                                         : compile(load_machine(a.grammar));
    auto states = replay_states(g, derivation_from_json(j));
    if (a.out.empty() || a.out == "-") {
        for (std::size_t i = 0; i < states.size(); ++i) std::cout << to_dot(states[i], "step" + std::to_string(i));
        return ok;
    }
    std::filesystem::create_directories(a.out);
    for (std::size_t i = 0; i < states.size(); ++i)
        write_file(a.out + "/step" + std::to_string(i) + ".dot", to_dot(states[i], "step" + std::to_string(i)));
    std::cout << states.size() << " snapshots\n";
    return ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"context-dependent fusion grammars for Turing machines"};
    app.require_subcommand(1);
    Args a;

    auto* sim = app.add_subcommand("simulate", "run the machine on a word");
    sim->add_option("file", a.file, "machine (.tm text or .json)")->required();
    sim->add_option("--input", a.input, "input word, one character per symbol or space separated");
    sim->add_option("--max-steps", a.max_steps, "configuration bound");

    auto* tr = app.add_subcommand("transform", "compile the machine to a grammar");
    tr->add_option("file", a.file)->required();
    tr->add_option("--out", a.out, "grammar JSON");
    tr->add_flag("--tape-generator", a.tape_generator, "emit the tape generator grammar instead");
    tr->add_flag("--with-cut", a.with_cut, "tape generator with the cut rule");

    auto* chk = app.add_subcommand("check", "compare grammar and machine on short words");
    chk->add_option("file", a.file, "machine, or grammar JSON for a plain member search")->required();
    chk->add_option("--max-len", a.max_len);
    chk->add_option("--max-steps", a.max_steps);
    chk->add_option("--max-depth", a.max_depth);
    chk->add_option("--max-edges", a.max_edges);
    chk->add_option("--max-copies", a.max_copies);
    chk->add_option("--trace", a.trace, "directory for derivation traces");
    chk->add_flag("--all-components", a.all_components, "search with every start component");

    auto* dot = app.add_subcommand("export-dot", "graph or derivation trace to DOT");
    dot->add_option("file", a.file, "graph JSON or derivation JSON")->required();
    dot->add_option("--out", a.out, "file for a graph, directory for a trace");
    dot->add_option("--grammar", a.grammar, "grammar JSON, or a machine to compile, for replaying a trace");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? ok : input_error;
    }
    try {
        if (*sim) return cmd_simulate(a);
        if (*tr) return cmd_transform(a);
        if (*chk) return cmd_check(a);
        return cmd_export_dot(a);
    } catch (const ParseError& e) {
        std::cerr << a.file << ": " << e.what() << "\n";
    } catch (const json::exception& e) {
        std::cerr << a.file << ": " << e.what() << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
    }
    return input_error;
}
