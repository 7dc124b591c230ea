#include "cdfg/harness.hpp"

#include "cdfg/transform.hpp"

namespace cdfg {

std::vector<std::vector<std::string>> words_upto(const std::vector<std::string>& sigma, int n) {
    std::vector<std::vector<std::string>> out{{}};
    std::size_t from = 0;
    for (int len = 1; len <= n; ++len) {
        std::size_t to = out.size();
        for (std::size_t i = from; i < to; ++i)
            for (const auto& x : sigma) {
                auto w = out[i];
                w.push_back(x);
                out.push_back(std::move(w));
            }
        from = to;
    }
    return out;
}

std::set<std::string> configuration_components(const Grammar& grammar) {
    std::set<std::string> out{"tape_|>", "tape_<|", "blank_bar", "Acc"};
    for (const auto& n : grammar.component_names)
        if (n.rfind("C(", 0) == 0) out.insert(n);
    return out;
}

std::string to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::pass: return "pass";
        case CheckStatus::mismatch: return "mismatch";
        case CheckStatus::inconclusive: return "inconclusive";
    }
    return "?";
}

std::string join_word(const std::vector<std::string>& w) {
    std::string s;
    for (const auto& x : w) s += x;
    return s.empty() ? "eps" : s;
}

WordCheck check_word(const Grammar& grammar, const TuringMachine& tm, const std::vector<std::string>& w,
                     const CheckOptions& options) {
    WordCheck out;
    out.word = w;
    auto oracle = accepts(tm, w, options.step_bound);
    out.oracle = oracle.verdict;
    const Hypergraph target = string_graph(w);

    if (oracle.verdict == Verdict::bound_exceeded) {
        out.detail = "oracle bound exceeded";
        return out;
    }
    if (oracle.verdict == Verdict::accepted) {
        try {
            out.derivation = acceptance_derivation(grammar, tm, w, oracle.run);
            auto members = generated_members(replay(grammar, out.derivation), grammar.alphabet);
            bool found = false;
            for (const auto& m : members) found = found || is_isomorphic(m, target);
            out.status = found ? CheckStatus::pass : CheckStatus::mismatch;
            out.detail = found ? "sg(w) derived" : "guided derivation missed sg(w)";
        } catch (const std::exception& e) {
            out.status = CheckStatus::mismatch;
            out.detail = std::string("guided derivation failed: ") + e.what();
        }
        return out;
    }

    SearchOptions so;
    so.max_depth = options.max_depth;
    so.max_edges = options.max_edges;
    so.max_copies = options.max_copies;
    so.initial = config_graph(tm, initial_permutation(tm), {}, w, w);
    if (options.restricted) so.components = configuration_components(grammar);
    auto r = bounded_search(grammar, so);
    out.states = r.states;
    out.exhausted = r.exhausted();
    for (std::size_t i = 0; i < r.members.size(); ++i) {
        if (!is_isomorphic(r.members[i], target)) continue;
        out.status = CheckStatus::mismatch;
        out.detail = "search derived sg(w) for a rejected word";
        out.trace = r.member_traces[i];
        return out;
    }
    if (r.exhausted()) {
        out.status = CheckStatus::pass;
        out.detail = "search exhausted without sg(w)";
    } else {
        out.detail = r.state_cap_hit ? "state cap hit" : "depth bound reached";
    }
    return out;
}

}  // namespace cdfg
