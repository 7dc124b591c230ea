#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace cdfg {

using VertexId = int;
using EdgeId = int;

class GraphError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class LabelKind { fusion, complement, marker, terminal };

struct FusionType {
    int k1 = 0;
    int k2 = 0;
    bool operator==(const FusionType&) const = default;
};

struct Label {
    std::string name;
    LabelKind kind = LabelKind::terminal;
    std::optional<std::string> partner;
};

// Labels are plain names; the alphabet assigns kinds, complements and types.
class Alphabet {
public:
    void add_fusion(const std::string& name, const std::string& complement, FusionType type);
    void add_marker(const std::string& name);
    void add_terminal(const std::string& name);

    bool contains(const std::string& name) const { return labels_.count(name) > 0; }
    Label label(const std::string& name) const;
    LabelKind kind(const std::string& name) const;
    bool is_fusion_kind(const std::string& name) const;
    std::string partner(const std::string& name) const;
    FusionType type(const std::string& name) const;

    // fusion-kind names only (not complements), in insertion order
    const std::vector<std::string>& fusion_names() const { return fusion_order_; }
    std::vector<std::string> names_of(LabelKind kind) const;

    bool operator==(const Alphabet& other) const;

private:
    struct Entry {
        LabelKind kind;
        std::string partner;
        FusionType type;
    };
    void insert(const std::string& name, Entry entry);

    std::map<std::string, Entry> labels_;
    std::vector<std::string> fusion_order_;
    std::vector<std::string> marker_order_;
    std::vector<std::string> terminal_order_;
};

struct Edge {
    EdgeId id = 0;
    std::string label;
    std::vector<VertexId> src;
    std::vector<VertexId> tgt;
    bool operator==(const Edge&) const = default;
};

class Hypergraph {
public:
    Hypergraph() = default;
    // Throws GraphError on duplicate ids or attachments to unknown vertices.
    Hypergraph(std::vector<VertexId> vertices, std::vector<Edge> edges);

    const std::vector<VertexId>& vertices() const { return vertices_; }
    const std::vector<Edge>& edges() const { return edges_; }
    std::size_t vertex_count() const { return vertices_.size(); }
    std::size_t edge_count() const { return edges_.size(); }
    bool empty() const { return vertices_.empty() && edges_.empty(); }

    bool has_vertex(VertexId v) const;
    bool has_edge(EdgeId e) const;
    const Edge& edge(EdgeId e) const;
    std::optional<std::size_t> edge_index(EdgeId e) const;

    VertexId next_vertex_id() const { return vertices_.empty() ? 0 : vertices_.back() + 1; }
    EdgeId next_edge_id() const { return edges_.empty() ? 0 : edges_.back().id + 1; }

    void validate(const Alphabet& alphabet) const;

    bool operator==(const Hypergraph&) const = default;

private:
    std::vector<VertexId> vertices_;
    std::vector<Edge> edges_;
};

// Where each item of a copied graph ended up.
struct CopyMap {
    std::map<VertexId, VertexId> vertices;
    std::map<EdgeId, EdgeId> edges;
};

// Incremental construction with sequential ids.
class GraphBuilder {
public:
    GraphBuilder() = default;
    explicit GraphBuilder(const Hypergraph& base);

    VertexId add_vertex();
    std::vector<VertexId> add_vertices(int n);
    EdgeId add_edge(const std::string& label, std::vector<VertexId> src, std::vector<VertexId> tgt);
    // Adds a renumbered copy of g.
    CopyMap add_graph(const Hypergraph& g);
    Hypergraph build() const;

private:
    std::vector<VertexId> vertices_;
    std::vector<Edge> edges_;
    VertexId next_vertex_ = 0;
    EdgeId next_edge_ = 0;
};

using VertexPairs = std::vector<std::pair<VertexId, VertexId>>;

Hypergraph quotient(const Hypergraph& h, const VertexPairs& pairs);
Hypergraph remove(const Hypergraph& h, const std::set<VertexId>& vs, const std::set<EdgeId>& es);
Hypergraph extend(const Hypergraph& h, const std::vector<VertexId>& new_vertices,
                  const std::vector<Edge>& new_edges, const Alphabet* alphabet = nullptr);

Hypergraph disjoint_union(const Hypergraph& a, const Hypergraph& b, CopyMap* b_map = nullptr);
Hypergraph disjoint_union(const std::vector<Hypergraph>& parts);

std::vector<Hypergraph> connected_components(const Hypergraph& h);

// m[i] copies of the i-th connected component, renumbered from 0.
// copies (optional) receives one map per produced copy, component-major.
struct ComponentCopy {
    std::size_t component = 0;
    int copy = 0;
    CopyMap map;
};
Hypergraph multiply(const Hypergraph& h, const std::vector<int>& m,
                    std::vector<ComponentCopy>* copies = nullptr);

Hypergraph string_graph(const std::vector<std::string>& word);
// The word spelled by h if h is a string graph.
std::optional<std::vector<std::string>> read_string_graph(const Hypergraph& h);

std::string canonical_form(const Hypergraph& h);
bool is_isomorphic(const Hypergraph& a, const Hypergraph& b);

std::map<std::string, int> label_counts(const Hypergraph& h);

}  // namespace cdfg
