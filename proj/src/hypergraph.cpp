#include "cdfg/hypergraph.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

namespace cdfg {

namespace {

class UnionFind {
public:
    explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }

    std::size_t find(std::size_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    // keeps the smaller index as root
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (b < a) std::swap(a, b);
        parent_[b] = a;
    }

private:
    std::vector<std::size_t> parent_;
};

std::size_t vertex_index(const std::vector<VertexId>& vs, VertexId v) {
    auto it = std::lower_bound(vs.begin(), vs.end(), v);
    if (it == vs.end() || *it != v) throw GraphError("unknown vertex id " + std::to_string(v));
    return static_cast<std::size_t>(it - vs.begin());
}

}  // namespace

void Alphabet::insert(const std::string& name, Entry entry) {
    if (name.empty()) throw GraphError("empty label name");
    if (labels_.count(name)) throw GraphError("label declared twice: " + name);
    labels_.emplace(name, std::move(entry));
}

void Alphabet::add_fusion(const std::string& name, const std::string& complement, FusionType type) {
    if (name == complement) throw GraphError("fusion label equals its complement: " + name);
    if (type.k1 < 0 || type.k2 < 0) throw GraphError("negative type for " + name);
    insert(name, {LabelKind::fusion, complement, type});
    insert(complement, {LabelKind::complement, name, type});
    fusion_order_.push_back(name);
}

void Alphabet::add_marker(const std::string& name) {
    insert(name, {LabelKind::marker, {}, {}});
    marker_order_.push_back(name);
}

void Alphabet::add_terminal(const std::string& name) {
    insert(name, {LabelKind::terminal, {}, {}});
    terminal_order_.push_back(name);
}

Label Alphabet::label(const std::string& name) const {
    auto it = labels_.find(name);
    if (it == labels_.end()) throw GraphError("unknown label " + name);
    Label l{name, it->second.kind, std::nullopt};
    if (!it->second.partner.empty()) l.partner = it->second.partner;
    return l;
}

LabelKind Alphabet::kind(const std::string& name) const { return label(name).kind; }

bool Alphabet::is_fusion_kind(const std::string& name) const {
    auto it = labels_.find(name);
    return it != labels_.end() &&
           (it->second.kind == LabelKind::fusion || it->second.kind == LabelKind::complement);
}

std::string Alphabet::partner(const std::string& name) const {
    auto l = label(name);
    if (!l.partner) throw GraphError("label has no complement: " + name);
    return *l.partner;
}

FusionType Alphabet::type(const std::string& name) const {
    if (!is_fusion_kind(name)) throw GraphError("label is not a fusion label: " + name);
    return labels_.at(name).type;
}

std::vector<std::string> Alphabet::names_of(LabelKind kind) const {
    switch (kind) {
        case LabelKind::fusion: return fusion_order_;
        case LabelKind::marker: return marker_order_;
        case LabelKind::terminal: return terminal_order_;
        case LabelKind::complement: {
            std::vector<std::string> out;
            for (const auto& f : fusion_order_) out.push_back(labels_.at(f).partner);
            return out;
        }
    }
    return {};
}

bool Alphabet::operator==(const Alphabet& other) const {
    if (fusion_order_ != other.fusion_order_ || marker_order_ != other.marker_order_ ||
        terminal_order_ != other.terminal_order_)
        return false;
    for (const auto& f : fusion_order_) {
        const auto& a = labels_.at(f);
        const auto& b = other.labels_.at(f);
        if (a.partner != b.partner || !(a.type == b.type)) return false;
    }
    return true;
}

Hypergraph::Hypergraph(std::vector<VertexId> vertices, std::vector<Edge> edges)
    : vertices_(std::move(vertices)), edges_(std::move(edges)) {
    std::sort(vertices_.begin(), vertices_.end());
    if (std::adjacent_find(vertices_.begin(), vertices_.end()) != vertices_.end())
        throw GraphError("duplicate vertex id");
    std::sort(edges_.begin(), edges_.end(), [](const Edge& a, const Edge& b) { return a.id < b.id; });
    for (std::size_t i = 1; i < edges_.size(); ++i)
        if (edges_[i].id == edges_[i - 1].id)
            throw GraphError("duplicate edge id " + std::to_string(edges_[i].id));
    for (const auto& e : edges_) {
        for (VertexId v : e.src) vertex_index(vertices_, v);
        for (VertexId v : e.tgt) vertex_index(vertices_, v);
    }
}

bool Hypergraph::has_vertex(VertexId v) const {
    return std::binary_search(vertices_.begin(), vertices_.end(), v);
}

std::optional<std::size_t> Hypergraph::edge_index(EdgeId e) const {
    auto it = std::lower_bound(edges_.begin(), edges_.end(), e,
                               [](const Edge& x, EdgeId id) { return x.id < id; });
    if (it == edges_.end() || it->id != e) return std::nullopt;
    return static_cast<std::size_t>(it - edges_.begin());
}

bool Hypergraph::has_edge(EdgeId e) const { return edge_index(e).has_value(); }

const Edge& Hypergraph::edge(EdgeId e) const {
    auto i = edge_index(e);
    if (!i) throw GraphError("unknown edge id " + std::to_string(e));
    return edges_[*i];
}

void Hypergraph::validate(const Alphabet& alphabet) const {
    for (const auto& e : edges_) {
        if (!alphabet.contains(e.label)) throw GraphError("label not in alphabet: " + e.label);
        if (alphabet.is_fusion_kind(e.label)) {
            auto t = alphabet.type(e.label);
            if (static_cast<int>(e.src.size()) != t.k1 || static_cast<int>(e.tgt.size()) != t.k2)
                throw GraphError("arity mismatch on edge " + std::to_string(e.id) + " labeled " +
                                 e.label);
        }
    }
}

GraphBuilder::GraphBuilder(const Hypergraph& base)
    : vertices_(base.vertices()),
      edges_(base.edges()),
      next_vertex_(base.next_vertex_id()),
      next_edge_(base.next_edge_id()) {}

VertexId GraphBuilder::add_vertex() {
    vertices_.push_back(next_vertex_);
    return next_vertex_++;
}

std::vector<VertexId> GraphBuilder::add_vertices(int n) {
    std::vector<VertexId> out;
    for (int i = 0; i < n; ++i) out.push_back(add_vertex());
    return out;
}

EdgeId GraphBuilder::add_edge(const std::string& label, std::vector<VertexId> src,
                              std::vector<VertexId> tgt) {
    edges_.push_back({next_edge_, label, std::move(src), std::move(tgt)});
    return next_edge_++;
}

CopyMap GraphBuilder::add_graph(const Hypergraph& g) {
    CopyMap map;
    for (VertexId v : g.vertices()) map.vertices[v] = add_vertex();
    for (const auto& e : g.edges()) {
        std::vector<VertexId> src, tgt;
        for (VertexId v : e.src) src.push_back(map.vertices.at(v));
        for (VertexId v : e.tgt) tgt.push_back(map.vertices.at(v));
        map.edges[e.id] = add_edge(e.label, std::move(src), std::move(tgt));
    }
    return map;
}

Hypergraph GraphBuilder::build() const { return Hypergraph(vertices_, edges_); }

Hypergraph quotient(const Hypergraph& h, const VertexPairs& pairs) {
    const auto& vs = h.vertices();
    UnionFind uf(vs.size());
    for (auto [a, b] : pairs) uf.unite(vertex_index(vs, a), vertex_index(vs, b));
    auto rep = [&](VertexId v) { return vs[uf.find(vertex_index(vs, v))]; };
    std::vector<VertexId> out_vs;
    for (std::size_t i = 0; i < vs.size(); ++i)
        if (uf.find(i) == i) out_vs.push_back(vs[i]);
    std::vector<Edge> out_es = h.edges();
    for (auto& e : out_es) {
        for (auto& v : e.src) v = rep(v);
        for (auto& v : e.tgt) v = rep(v);
    }
    return Hypergraph(std::move(out_vs), std::move(out_es));
}

Hypergraph remove(const Hypergraph& h, const std::set<VertexId>& vs, const std::set<EdgeId>& es) {
    for (VertexId v : vs)
        if (!h.has_vertex(v)) throw GraphError("unknown vertex id " + std::to_string(v));
    for (EdgeId e : es)
        if (!h.has_edge(e)) throw GraphError("unknown edge id " + std::to_string(e));
    std::vector<Edge> out_es;
    for (const auto& e : h.edges()) {
        if (es.count(e.id)) continue;
        auto dangling = [&](VertexId v) { return vs.count(v) > 0; };
        if (std::any_of(e.src.begin(), e.src.end(), dangling) ||
            std::any_of(e.tgt.begin(), e.tgt.end(), dangling))
            throw GraphError("dangling edge " + std::to_string(e.id) + " after removal");
        out_es.push_back(e);
    }
    std::vector<VertexId> out_vs;
    for (VertexId v : h.vertices())
        if (!vs.count(v)) out_vs.push_back(v);
    return Hypergraph(std::move(out_vs), std::move(out_es));
}

Hypergraph extend(const Hypergraph& h, const std::vector<VertexId>& new_vertices,
                  const std::vector<Edge>& new_edges, const Alphabet* alphabet) {
    std::vector<VertexId> vs = h.vertices();
    for (VertexId v : new_vertices) {
        if (h.has_vertex(v)) throw GraphError("vertex id clash " + std::to_string(v));
        vs.push_back(v);
    }
    std::vector<Edge> es = h.edges();
    for (const auto& e : new_edges) {
        if (h.has_edge(e.id)) throw GraphError("edge id clash " + std::to_string(e.id));
        es.push_back(e);
    }
    Hypergraph out(std::move(vs), std::move(es));
    if (alphabet) {
        std::vector<Edge> added(new_edges);
        Hypergraph probe(out.vertices(), added);
        probe.validate(*alphabet);
    }
    return out;
}

Hypergraph disjoint_union(const Hypergraph& a, const Hypergraph& b, CopyMap* b_map) {
    GraphBuilder builder(a);
    CopyMap map = builder.add_graph(b);
    if (b_map) *b_map = std::move(map);
    return builder.build();
}

Hypergraph disjoint_union(const std::vector<Hypergraph>& parts) {
    GraphBuilder builder;
    for (const auto& p : parts) builder.add_graph(p);
    return builder.build();
}

std::vector<Hypergraph> connected_components(const Hypergraph& h) {
    const auto& vs = h.vertices();
    UnionFind uf(vs.size());
    for (const auto& e : h.edges()) {
        std::vector<VertexId> att(e.src);
        att.insert(att.end(), e.tgt.begin(), e.tgt.end());
        for (std::size_t i = 1; i < att.size(); ++i)
            uf.unite(vertex_index(vs, att[0]), vertex_index(vs, att[i]));
    }
    // roots are minimum indices, so iterating roots in index order sorts by minimum vertex id
    std::map<std::size_t, std::size_t> slot;
    std::vector<std::vector<VertexId>> comp_vs;
    std::vector<std::vector<Edge>> comp_es;
    for (std::size_t i = 0; i < vs.size(); ++i) {
        std::size_t r = uf.find(i);
        if (!slot.count(r)) {
            slot[r] = comp_vs.size();
            comp_vs.emplace_back();
            comp_es.emplace_back();
        }
        comp_vs[slot[r]].push_back(vs[i]);
    }
    std::vector<Hypergraph> loose;
    for (const auto& e : h.edges()) {
        if (e.src.empty() && e.tgt.empty()) {
            loose.emplace_back(std::vector<VertexId>{}, std::vector<Edge>{e});
            continue;
        }
        VertexId anchor = e.src.empty() ? e.tgt.front() : e.src.front();
        comp_es[slot[uf.find(vertex_index(vs, anchor))]].push_back(e);
    }
    std::vector<Hypergraph> out;
    for (std::size_t i = 0; i < comp_vs.size(); ++i) out.emplace_back(comp_vs[i], comp_es[i]);
    for (auto& l : loose) out.push_back(std::move(l));
    return out;
}

Hypergraph multiply(const Hypergraph& h, const std::vector<int>& m, std::vector<ComponentCopy>* copies) {
    auto comps = connected_components(h);
    if (m.size() != comps.size())
        throw GraphError("multiplicity vector has " + std::to_string(m.size()) + " entries for " +
                         std::to_string(comps.size()) + " components");
    GraphBuilder builder;
    for (std::size_t i = 0; i < comps.size(); ++i) {
        if (m[i] < 0) throw GraphError("negative multiplicity");
        for (int c = 0; c < m[i]; ++c) {
            CopyMap map = builder.add_graph(comps[i]);
            if (copies) copies->push_back({i, c, std::move(map)});
        }
    }
    return builder.build();
}

Hypergraph string_graph(const std::vector<std::string>& word) {
    GraphBuilder b;
    auto vs = b.add_vertices(static_cast<int>(word.size()) + 1);
    for (std::size_t i = 0; i < word.size(); ++i) {
        if (word[i].empty()) throw GraphError("empty symbol in word");
        b.add_edge(word[i], {vs[i]}, {vs[i + 1]});
    }
    return b.build();
}

std::optional<std::vector<std::string>> read_string_graph(const Hypergraph& h) {
    if (h.vertex_count() != h.edge_count() + 1) return std::nullopt;
    std::map<VertexId, const Edge*> out_edge;
    std::map<VertexId, int> indeg;
    for (const auto& e : h.edges()) {
        if (e.src.size() != 1 || e.tgt.size() != 1) return std::nullopt;
        if (out_edge.count(e.src[0])) return std::nullopt;
        out_edge[e.src[0]] = &e;
        ++indeg[e.tgt[0]];
    }
    std::optional<VertexId> begin;
    for (VertexId v : h.vertices()) {
        if (indeg[v] > 1) return std::nullopt;
        if (indeg[v] == 0) {
            if (begin) return std::nullopt;
            begin = v;
        }
    }
    if (!begin) return std::nullopt;
    std::vector<std::string> word;
    VertexId cur = *begin;
    while (out_edge.count(cur)) {
        word.push_back(out_edge[cur]->label);
        cur = out_edge[cur]->tgt[0];
        if (word.size() > h.edge_count()) return std::nullopt;
    }
    if (word.size() != h.edge_count()) return std::nullopt;
    return word;
}

namespace {

// Certificate of one connected component: color refinement on the
// vertex/edge incidence structure, then individualization of the first
// non-trivial vertex cell, keeping the smallest leaf certificate.
class Canonizer {
public:
    explicit Canonizer(const Hypergraph& h) : h_(h) {
        n_ = h.vertex_count();
        m_ = h.edge_count();
        std::vector<std::string> labels;
        for (const auto& e : h.edges()) labels.push_back(e.label);
        std::sort(labels.begin(), labels.end());
        labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
        for (const auto& e : h.edges()) {
            Inc inc;
            inc.label = static_cast<int>(std::lower_bound(labels.begin(), labels.end(), e.label) -
                                         labels.begin());
            for (VertexId v : e.src) inc.src.push_back(static_cast<int>(vertex_index(h.vertices(), v)));
            for (VertexId v : e.tgt) inc.tgt.push_back(static_cast<int>(vertex_index(h.vertices(), v)));
            incs_.push_back(std::move(inc));
        }
        touching_.resize(n_);
        for (std::size_t k = 0; k < m_; ++k) {
            const auto& inc = incs_[k];
            for (std::size_t p = 0; p < inc.src.size(); ++p)
                touching_[inc.src[p]].push_back({static_cast<int>(2 * p), static_cast<int>(k)});
            for (std::size_t p = 0; p < inc.tgt.size(); ++p)
                touching_[inc.tgt[p]].push_back({static_cast<int>(2 * p + 1), static_cast<int>(k)});
        }
    }

    std::string run() {
        std::vector<std::vector<long>> sig(n_ + m_);
        for (std::size_t k = 0; k < m_; ++k)
            sig[n_ + k] = {1, incs_[k].label, static_cast<long>(incs_[k].src.size()),
                           static_cast<long>(incs_[k].tgt.size())};
        for (std::size_t v = 0; v < n_; ++v) sig[v] = {0};
        std::vector<int> color = rank(sig).first;
        search(color);
        return *best_;
    }

private:
    struct Inc {
        int label = 0;
        std::vector<int> src, tgt;
    };

    // colors are start indices of their cell in the sorted order
    static std::pair<std::vector<int>, std::size_t> rank(const std::vector<std::vector<long>>& sig) {
        std::vector<int> order(sig.size());
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return sig[a] < sig[b]; });
        std::vector<int> color(sig.size());
        std::size_t cells = 0;
        for (std::size_t i = 0; i < order.size(); ++i) {
            if (i == 0 || sig[order[i]] != sig[order[i - 1]]) {
                ++cells;
                color[order[i]] = static_cast<int>(i);
            } else {
                color[order[i]] = color[order[i - 1]];
            }
        }
        return {color, cells};
    }

    static std::size_t cell_count(const std::vector<int>& color) {
        std::vector<int> c(color);
        std::sort(c.begin(), c.end());
        return static_cast<std::size_t>(std::unique(c.begin(), c.end()) - c.begin());
    }

    void refine(std::vector<int>& color) const {
        std::size_t cells = cell_count(color);
        while (true) {
            std::vector<std::vector<long>> sig(n_ + m_);
            for (std::size_t v = 0; v < n_; ++v) {
                std::vector<std::pair<int, int>> nb;
                for (auto [code, k] : touching_[v]) nb.push_back({code, color[n_ + k]});
                std::sort(nb.begin(), nb.end());
                sig[v].push_back(color[v]);
                for (auto [a, b] : nb) {
                    sig[v].push_back(a);
                    sig[v].push_back(b);
                }
            }
            for (std::size_t k = 0; k < m_; ++k) {
                sig[n_ + k].push_back(color[n_ + k]);
                for (int v : incs_[k].src) sig[n_ + k].push_back(color[v]);
                sig[n_ + k].push_back(-1);
                for (int v : incs_[k].tgt) sig[n_ + k].push_back(color[v]);
            }
            auto [next, next_cells] = rank(sig);
            color = std::move(next);
            if (next_cells == cells) return;
            cells = next_cells;
        }
    }

    std::string certificate(const std::vector<int>& color) const {
        std::vector<std::string> rows;
        for (std::size_t k = 0; k < m_; ++k) {
            const auto& e = h_.edges()[k];
            std::ostringstream row;
            row << e.label.size() << ':' << e.label << '(';
            for (int v : incs_[k].src) row << color[v] << ',';
            row << ';';
            for (int v : incs_[k].tgt) row << color[v] << ',';
            row << ')';
            rows.push_back(row.str());
        }
        std::sort(rows.begin(), rows.end());
        std::string out = "V" + std::to_string(n_) + "[";
        for (const auto& r : rows) out += r;
        return out + "]";
    }

    void search(std::vector<int> color) {
        refine(color);
        int target = -1;
        std::map<int, int> sizes;
        for (std::size_t v = 0; v < n_; ++v) ++sizes[color[v]];
        for (auto [c, s] : sizes)
            if (s > 1) {
                target = c;
                break;
            }
        if (target < 0) {
            auto cert = certificate(color);
            if (!best_ || cert < *best_) best_ = std::move(cert);
            return;
        }
        for (std::size_t v = 0; v < n_; ++v) {
            if (color[v] != target) continue;
            std::vector<int> next(color);
            for (std::size_t u = 0; u < n_; ++u)
                if (u != v && color[u] == target) next[u] = target + 1;
            search(std::move(next));
        }
    }

    const Hypergraph& h_;
    std::size_t n_ = 0, m_ = 0;
    std::vector<Inc> incs_;
    std::vector<std::vector<std::pair<int, int>>> touching_;
    std::optional<std::string> best_;
};

}  // namespace

std::string canonical_form(const Hypergraph& h) {
    std::vector<std::string> parts;
    for (const auto& c : connected_components(h)) parts.push_back(Canonizer(c).run());
    std::sort(parts.begin(), parts.end());
    std::string out = std::to_string(parts.size()) + "{";
    for (const auto& p : parts) out += p;
    return out + "}";
}

bool is_isomorphic(const Hypergraph& a, const Hypergraph& b) {
    if (a.vertex_count() != b.vertex_count() || a.edge_count() != b.edge_count()) return false;
    if (label_counts(a) != label_counts(b)) return false;
    return canonical_form(a) == canonical_form(b);
}

std::map<std::string, int> label_counts(const Hypergraph& h) {
    std::map<std::string, int> out;
    for (const auto& e : h.edges()) ++out[e.label];
    return out;
}

}  // namespace cdfg
