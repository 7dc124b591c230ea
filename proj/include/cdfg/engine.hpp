#pragma once

#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "cdfg/hypergraph.hpp"
#include "cdfg/matching.hpp"

namespace cdfg {

class RuleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Rule graph layout for type (k1,k2): vertices 0..k1-1 are s(e), k1..k1+k2-1 are t(e),
// then the same block again for e-bar. Edge 0 is e (label A), edge 1 is e-bar.
struct FusionRule {
    std::string label;
    std::string complement;
    FusionType type;
    Hypergraph graph;
    VertexPairs correspondence;
    static constexpr EdgeId e = 0;
    static constexpr EdgeId e_bar = 1;
};

FusionRule make_fusion_rule(const std::string& label, const Alphabet& alphabet);

struct ContextDependentFusionRule {
    std::string name;
    FusionRule core;
    std::vector<Context> positive;
    std::vector<Context> negative;
    // at least one positive context must hold instead of all of them
    bool positive_any = false;
};

ContextDependentFusionRule context_free_rule(const std::string& label, const Alphabet& alphabet);

struct Grammar {
    Hypergraph start;
    Alphabet alphabet;
    std::vector<ContextDependentFusionRule> rules;
    // one name per connected component of start, in component order (may be empty)
    std::vector<std::string> component_names;

    const ContextDependentFusionRule& rule(const std::string& name) const;
    std::optional<std::size_t> component_index(const std::string& name) const;
};

void validate_grammar(const Grammar& g);

// Match g of the rule graph determined by the images of e and e-bar.
std::optional<Morphism> match_from_edges(const FusionRule& rule, const Hypergraph& host, EdgeId e,
                                         EdgeId e_bar);

// Name of the first violated condition, or nullopt when g is a legal match.
std::optional<std::string> check_match(const ContextDependentFusionRule& rule, const Hypergraph& host,
                                       const Morphism& g);

Hypergraph apply_fusion(const FusionRule& rule, const Hypergraph& host, const Morphism& g);
Hypergraph apply_rule(const ContextDependentFusionRule& rule, const Hypergraph& host, const Morphism& g);

std::vector<Morphism> applicable(const ContextDependentFusionRule& rule, const Hypergraph& host);

struct MultiplyStep {
    std::vector<int> multiplicity;
    bool operator==(const MultiplyStep&) const = default;
};
struct ApplyStep {
    std::string rule;
    Morphism match;
    bool operator==(const ApplyStep&) const = default;
};
using Step = std::variant<MultiplyStep, ApplyStep>;

struct Derivation {
    Hypergraph start;
    std::vector<Step> steps;
    bool operator==(const Derivation&) const = default;
};

Hypergraph derive(const Grammar& grammar, const Hypergraph& h, const Step& step);
// All intermediate states, beginning with d.start.
std::vector<Hypergraph> replay_states(const Grammar& grammar, const Derivation& d);
Hypergraph replay(const Grammar& grammar, const Derivation& d);

bool is_member_component(const Hypergraph& component, const Alphabet& alphabet);
std::vector<Hypergraph> generated_members(const Hypergraph& h, const Alphabet& alphabet);

struct SearchOptions {
    int max_depth = 10;
    int max_edges = 30;
    int max_copies = 2;
    // drop components with neither marker nor fusion label from states
    bool pruned = false;
    // start from this graph and follow only the component carrying a marker
    std::optional<Hypergraph> initial;
    // when set, only these start components (by name) may be copied in
    std::optional<std::set<std::string>> components;
    std::size_t max_states = 2000000;
};

struct SearchResult {
    std::vector<Hypergraph> members;
    std::set<std::string> member_forms;
    // rule applications leading to each member, parallel to members
    std::vector<std::vector<std::string>> member_traces;
    std::size_t states = 0;
    int deepest = 0;
    bool depth_cut = false;
    bool state_cap_hit = false;
    bool exhausted() const { return !depth_cut && !state_cap_hit; }
};

// Every connected component of every context graph contains an anchored item.
// Under this condition contexts only see the components of the two fused edges.
bool contexts_are_local(const Grammar& grammar);

SearchResult bounded_search(const Grammar& grammar, const SearchOptions& options);

}  // namespace cdfg
