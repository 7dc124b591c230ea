#pragma once

#include <set>
#include <string>
#include <vector>

#include "cdfg/engine.hpp"
#include "cdfg/tm.hpp"

namespace cdfg {

// All words over sigma of length <= n, shortest first, then lexicographic.
std::vector<std::vector<std::string>> words_upto(const std::vector<std::string>& sigma, int n);

// Start components that can join a single configuration component:
// the step components, tape extensions, blank_bar and Acc.
std::set<std::string> configuration_components(const Grammar& grammar);

struct CheckOptions {
    std::size_t step_bound = 1000;
    int max_depth = 25;
    int max_edges = 200;
    int max_copies = 2;
    // false searches with every start component
    bool restricted = true;
};

enum class CheckStatus { pass, mismatch, inconclusive };
std::string to_string(CheckStatus s);

struct WordCheck {
    std::vector<std::string> word;
    Verdict oracle = Verdict::bound_exceeded;
    CheckStatus status = CheckStatus::inconclusive;
    std::string detail;
    // filled on the guided path
    Derivation derivation;
    // filled on the search path
    std::size_t states = 0;
    bool exhausted = false;
    std::vector<std::string> trace;
};

WordCheck check_word(const Grammar& grammar, const TuringMachine& tm, const std::vector<std::string>& w,
                     const CheckOptions& options = {});

std::string join_word(const std::vector<std::string>& w);

}  // namespace cdfg
