#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cdfg/hypergraph.hpp"

namespace cdfg {

// Total map between two hypergraphs; dom and cod are held by the caller.
struct Morphism {
    std::map<VertexId, VertexId> vmap;
    std::map<EdgeId, EdgeId> emap;
    bool operator==(const Morphism&) const = default;
};

bool is_morphism(const Morphism& f, const Hypergraph& dom, const Hypergraph& cod);

struct MatchOptions {
    bool injective_edges = false;
    std::size_t limit = 0;  // 0 = all
};

// Label and incidence lookup over a fixed host; reusable across many matches.
class HostIndex {
public:
    explicit HostIndex(const Hypergraph& host);
    const Hypergraph& host() const { return *host_; }
    const std::vector<std::size_t>& with_label(const std::string& label) const;
    const std::vector<std::size_t>& incident(VertexId v) const;

private:
    const Hypergraph* host_;
    std::unordered_map<std::string, std::vector<std::size_t>> by_label_;
    std::unordered_map<VertexId, std::vector<std::size_t>> incident_;
};

// All morphisms pattern -> host, sorted lexicographically by edge images
// (pattern edges in id order), then by images of unattached vertices.
std::vector<Morphism> find_morphisms(const Hypergraph& pattern, const Hypergraph& host);

// Extensions of a partial assignment (seed) to total morphisms.
std::vector<Morphism> extend_morphism(const Hypergraph& pattern, const Hypergraph& host,
                                      const Morphism& seed, const MatchOptions& options = {});
std::vector<Morphism> extend_morphism(const Hypergraph& pattern, const HostIndex& host, const Morphism& seed,
                                      const MatchOptions& options = {});

// c: rule graph -> context graph, named for diagnostics.
struct Context {
    std::string name;
    Hypergraph graph;
    Morphism anchor;
};

// Is there h: C -> host with h o c = g (and h injective on edges for positive)?
bool satisfies_positive(const Morphism& g, const Context& c, const Hypergraph& rule_graph,
                        const Hypergraph& host);
bool satisfies_negative(const Morphism& g, const Context& c, const Hypergraph& rule_graph,
                        const Hypergraph& host);
bool satisfies_positive(const Morphism& g, const Context& c, const HostIndex& host);
bool satisfies_negative(const Morphism& g, const Context& c, const HostIndex& host);

}  // namespace cdfg
