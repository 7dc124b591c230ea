#include "cdfg/matching.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <unordered_map>

namespace cdfg {

bool is_morphism(const Morphism& f, const Hypergraph& dom, const Hypergraph& cod) {
    if (f.vmap.size() != dom.vertex_count() || f.emap.size() != dom.edge_count()) return false;
    for (VertexId v : dom.vertices()) {
        auto it = f.vmap.find(v);
        if (it == f.vmap.end() || !cod.has_vertex(it->second)) return false;
    }
    for (const auto& e : dom.edges()) {
        auto it = f.emap.find(e.id);
        if (it == f.emap.end() || !cod.has_edge(it->second)) return false;
        const auto& img = cod.edge(it->second);
        if (img.label != e.label || img.src.size() != e.src.size() || img.tgt.size() != e.tgt.size())
            return false;
        for (std::size_t i = 0; i < e.src.size(); ++i)
            if (f.vmap.at(e.src[i]) != img.src[i]) return false;
        for (std::size_t i = 0; i < e.tgt.size(); ++i)
            if (f.vmap.at(e.tgt[i]) != img.tgt[i]) return false;
    }
    return true;
}

HostIndex::HostIndex(const Hypergraph& host) : host_(&host) {
    for (std::size_t i = 0; i < host.edges().size(); ++i) {
        const Edge& e = host.edges()[i];
        by_label_[e.label].push_back(i);
        std::set<VertexId> seen;
        for (VertexId v : e.src)
            if (seen.insert(v).second) incident_[v].push_back(i);
        for (VertexId v : e.tgt)
            if (seen.insert(v).second) incident_[v].push_back(i);
    }
}

namespace {
const std::vector<std::size_t> kNoEdges;
}

const std::vector<std::size_t>& HostIndex::with_label(const std::string& label) const {
    auto it = by_label_.find(label);
    return it == by_label_.end() ? kNoEdges : it->second;
}

const std::vector<std::size_t>& HostIndex::incident(VertexId v) const {
    auto it = incident_.find(v);
    return it == incident_.end() ? kNoEdges : it->second;
}

namespace {

class Matcher {
public:
    Matcher(const Hypergraph& pattern, const HostIndex& index, const MatchOptions& options)
        : p_(pattern), h_(index.host()), idx_(index), opt_(options) {}

    std::vector<Morphism> run(const Morphism& seed) {
        for (auto [pv, hv] : seed.vmap) {
            if (!p_.has_vertex(pv) || !h_.has_vertex(hv)) return {};
            vmap_[pv] = hv;
        }
        for (auto [pe, he] : seed.emap) {
            if (!p_.has_edge(pe) || !h_.has_edge(he)) return {};
            if (!bind_edge(p_.edge(pe), h_.edge(he))) return {};
            if (opt_.injective_edges && used_.count(he)) return {};
            emap_[pe] = he;
            used_.insert(he);
        }
        order_edges();
        std::set<VertexId> attached;
        for (const auto& e : p_.edges()) {
            attached.insert(e.src.begin(), e.src.end());
            attached.insert(e.tgt.begin(), e.tgt.end());
        }
        for (VertexId v : p_.vertices())
            if (!attached.count(v) && !vmap_.count(v)) loose_.push_back(v);
        edge_step(0);
        return std::move(out_);
    }

private:
    void order_edges() {
        std::vector<const Edge*> rest;
        for (const auto& e : p_.edges())
            if (!emap_.count(e.id)) rest.push_back(&e);
        std::set<VertexId> bound;
        for (auto& [v, _] : vmap_) bound.insert(v);
        // greedy: prefer edges touching bound vertices, then rarer labels
        while (!rest.empty()) {
            std::size_t best = 0;
            long best_score = -1;
            for (std::size_t i = 0; i < rest.size(); ++i) {
                long touching = 0;
                for (VertexId v : rest[i]->src) touching += bound.count(v);
                for (VertexId v : rest[i]->tgt) touching += bound.count(v);
                long cands = static_cast<long>(idx_.with_label(rest[i]->label).size());
                long score = touching * 100000 + (100000 - std::min(cands, 99999L));
                if (score > best_score) {
                    best_score = score;
                    best = i;
                }
            }
            order_.push_back(rest[best]);
            bound.insert(rest[best]->src.begin(), rest[best]->src.end());
            bound.insert(rest[best]->tgt.begin(), rest[best]->tgt.end());
            rest.erase(rest.begin() + static_cast<long>(best));
        }
    }

    // binds pattern vertices of pe to those of he; records new bindings on the trail
    bool bind_edge(const Edge& pe, const Edge& he) {
        if (pe.label != he.label || pe.src.size() != he.src.size() || pe.tgt.size() != he.tgt.size())
            return false;
        auto bind = [&](VertexId pv, VertexId hv) {
            auto it = vmap_.find(pv);
            if (it != vmap_.end()) return it->second == hv;
            vmap_[pv] = hv;
            trail_.push_back(pv);
            return true;
        };
        for (std::size_t i = 0; i < pe.src.size(); ++i)
            if (!bind(pe.src[i], he.src[i])) return false;
        for (std::size_t i = 0; i < pe.tgt.size(); ++i)
            if (!bind(pe.tgt[i], he.tgt[i])) return false;
        return true;
    }

    void undo(std::size_t mark) {
        while (trail_.size() > mark) {
            vmap_.erase(trail_.back());
            trail_.pop_back();
        }
    }

    bool done() const { return opt_.limit && out_.size() >= opt_.limit; }

    void edge_step(std::size_t k) {
        if (done()) return;
        if (k == order_.size()) {
            loose_step(0);
            return;
        }
        const Edge& pe = *order_[k];
        const std::vector<std::size_t>* cands = &idx_.with_label(pe.label);
        for (const auto* side : {&pe.src, &pe.tgt})
            for (VertexId v : *side)
                if (auto it = vmap_.find(v); it != vmap_.end()) {
                    const auto& inc = idx_.incident(it->second);
                    if (inc.size() < cands->size()) cands = &inc;
                }
        for (std::size_t hi : *cands) {
            const Edge& he = h_.edges()[hi];
            if (opt_.injective_edges && used_.count(he.id)) continue;
            std::size_t mark = trail_.size();
            if (bind_edge(pe, he)) {
                emap_[pe.id] = he.id;
                used_.insert(he.id);
                edge_step(k + 1);
                used_.erase(he.id);
                emap_.erase(pe.id);
            }
            undo(mark);
            if (done()) return;
        }
    }

    void loose_step(std::size_t k) {
        if (done()) return;
        if (k == loose_.size()) {
            out_.push_back({vmap_, emap_});
            return;
        }
        for (VertexId hv : h_.vertices()) {
            vmap_[loose_[k]] = hv;
            loose_step(k + 1);
            vmap_.erase(loose_[k]);
            if (done()) return;
        }
    }

    const Hypergraph& p_;
    const Hypergraph& h_;
    const HostIndex& idx_;
    MatchOptions opt_;
    std::map<VertexId, VertexId> vmap_;
    std::map<EdgeId, EdgeId> emap_;
    std::set<EdgeId> used_;
    std::vector<VertexId> trail_;
    std::vector<const Edge*> order_;
    std::vector<VertexId> loose_;
    std::vector<Morphism> out_;
};

std::vector<std::pair<std::vector<EdgeId>, std::vector<VertexId>>> sort_keys(
    const Hypergraph& pattern, const std::vector<Morphism>& ms) {
    std::vector<std::pair<std::vector<EdgeId>, std::vector<VertexId>>> keys;
    for (const auto& m : ms) {
        std::vector<EdgeId> ek;
        for (const auto& e : pattern.edges()) ek.push_back(m.emap.at(e.id));
        std::vector<VertexId> vk;
        for (VertexId v : pattern.vertices()) vk.push_back(m.vmap.at(v));
        keys.emplace_back(std::move(ek), std::move(vk));
    }
    return keys;
}

// The seed h must satisfy for every rule item x: h(c(x)) = g(x).
std::optional<Morphism> anchored_seed(const Morphism& g, const Context& c) {
    Morphism seed;
    for (auto [rv, cv] : c.anchor.vmap) {
        VertexId target = g.vmap.at(rv);
        auto [it, fresh] = seed.vmap.emplace(cv, target);
        if (!fresh && it->second != target) return std::nullopt;
    }
    for (auto [re, ce] : c.anchor.emap) {
        EdgeId target = g.emap.at(re);
        auto [it, fresh] = seed.emap.emplace(ce, target);
        if (!fresh && it->second != target) return std::nullopt;
    }
    return seed;
}

bool context_exists(const Morphism& g, const Context& c, const HostIndex& host, bool injective) {
    auto seed = anchored_seed(g, c);
    if (!seed) return false;
    MatchOptions opt;
    opt.injective_edges = injective;
    opt.limit = 1;
    return !extend_morphism(c.graph, host, *seed, opt).empty();
}

}  // namespace

std::vector<Morphism> extend_morphism(const Hypergraph& pattern, const Hypergraph& host,
                                      const Morphism& seed, const MatchOptions& options) {
    return extend_morphism(pattern, HostIndex(host), seed, options);
}

std::vector<Morphism> extend_morphism(const Hypergraph& pattern, const HostIndex& host, const Morphism& seed,
                                      const MatchOptions& options) {
    Matcher m(pattern, host, options);
    auto out = m.run(seed);
    if (options.limit != 1 && out.size() > 1) {
        auto keys = sort_keys(pattern, out);
        std::vector<std::size_t> idx(out.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return keys[a] < keys[b]; });
        std::vector<Morphism> sorted;
        for (std::size_t i : idx) sorted.push_back(std::move(out[i]));
        out = std::move(sorted);
    }
    return out;
}

std::vector<Morphism> find_morphisms(const Hypergraph& pattern, const Hypergraph& host) {
    return extend_morphism(pattern, host, Morphism{});
}

bool satisfies_positive(const Morphism& g, const Context& c, const Hypergraph& rule_graph,
                        const Hypergraph& host) {
    (void)rule_graph;
    return context_exists(g, c, HostIndex(host), true);
}

bool satisfies_negative(const Morphism& g, const Context& c, const Hypergraph& rule_graph,
                        const Hypergraph& host) {
    (void)rule_graph;
    return !context_exists(g, c, HostIndex(host), false);
}

bool satisfies_positive(const Morphism& g, const Context& c, const HostIndex& host) {
    return context_exists(g, c, host, true);
}

bool satisfies_negative(const Morphism& g, const Context& c, const HostIndex& host) {
    return !context_exists(g, c, host, false);
}

}  // namespace cdfg
