#include "cdfg/engine.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <memory>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

namespace cdfg {

FusionRule make_fusion_rule(const std::string& label, const Alphabet& alphabet) {
    if (!alphabet.contains(label) || alphabet.kind(label) != LabelKind::fusion)
        throw RuleError("fr(" + label + "): not a fusion label");
    FusionRule r;
    r.label = label;
    r.complement = alphabet.partner(label);
    r.type = alphabet.type(label);
    const int k = r.type.k1 + r.type.k2;
    GraphBuilder b;
    auto vs = b.add_vertices(2 * k);
    auto block = [&](int base, int from, int n) {
        return std::vector<VertexId>(vs.begin() + base + from, vs.begin() + base + from + n);
    };
    b.add_edge(r.label, block(0, 0, r.type.k1), block(0, r.type.k1, r.type.k2));
    b.add_edge(r.complement, block(k, 0, r.type.k1), block(k, r.type.k1, r.type.k2));
    r.graph = b.build();
    for (int i = 0; i < k; ++i) r.correspondence.emplace_back(i, i + k);
    return r;
}

ContextDependentFusionRule context_free_rule(const std::string& label, const Alphabet& alphabet) {
    ContextDependentFusionRule r;
    r.name = "fr(" + label + ")";
    r.core = make_fusion_rule(label, alphabet);
    return r;
}

const ContextDependentFusionRule& Grammar::rule(const std::string& name) const {
    for (const auto& r : rules)
        if (r.name == name) return r;
    throw RuleError("unknown rule " + name);
}

std::optional<std::size_t> Grammar::component_index(const std::string& name) const {
    for (std::size_t i = 0; i < component_names.size(); ++i)
        if (component_names[i] == name) return i;
    return std::nullopt;
}

void validate_grammar(const Grammar& g) {
    g.start.validate(g.alphabet);
    std::set<std::string> names;
    for (const auto& r : g.rules) {
        if (!names.insert(r.name).second) throw RuleError("duplicate rule name " + r.name);
        for (const auto* list : {&r.positive, &r.negative})
            for (const auto& c : *list) {
                c.graph.validate(g.alphabet);
                if (!is_morphism(c.anchor, r.core.graph, c.graph))
                    throw RuleError(r.name + ": context " + c.name + " is not anchored by a morphism");
            }
    }
    if (!g.component_names.empty() && g.component_names.size() != connected_components(g.start).size())
        throw RuleError("component name count does not match the start graph");
}

std::optional<Morphism> match_from_edges(const FusionRule& rule, const Hypergraph& host, EdgeId e,
                                         EdgeId e_bar) {
    if (!host.has_edge(e) || !host.has_edge(e_bar) || e == e_bar) return std::nullopt;
    const Edge& he = host.edge(e);
    const Edge& hb = host.edge(e_bar);
    if (he.label != rule.label || hb.label != rule.complement) return std::nullopt;
    const auto k1 = static_cast<std::size_t>(rule.type.k1);
    const auto k2 = static_cast<std::size_t>(rule.type.k2);
    if (he.src.size() != k1 || he.tgt.size() != k2 || hb.src.size() != k1 || hb.tgt.size() != k2)
        return std::nullopt;
    Morphism g;
    const int k = static_cast<int>(k1 + k2);
    for (std::size_t i = 0; i < k1; ++i) {
        g.vmap[static_cast<int>(i)] = he.src[i];
        g.vmap[static_cast<int>(i) + k] = hb.src[i];
    }
    for (std::size_t j = 0; j < k2; ++j) {
        g.vmap[static_cast<int>(k1 + j)] = he.tgt[j];
        g.vmap[static_cast<int>(k1 + j) + k] = hb.tgt[j];
    }
    g.emap[FusionRule::e] = e;
    g.emap[FusionRule::e_bar] = e_bar;
    return g;
}

namespace {

using Counts = std::map<std::string, int>;

bool counts_cover(const Counts& host, const Counts& need) {
    for (const auto& [label, n] : need) {
        auto it = host.find(label);
        if (it == host.end() || it->second < n) return false;
    }
    return true;
}

bool labels_present(const Counts& host, const Counts& need) {
    for (const auto& [label, n] : need)
        if (!host.count(label)) return false;
    return true;
}

struct RuleCounts {
    std::vector<Counts> positive;
    std::vector<Counts> negative;
};

RuleCounts rule_counts(const ContextDependentFusionRule& rule) {
    RuleCounts rc;
    for (const auto& c : rule.positive) rc.positive.push_back(label_counts(c.graph));
    for (const auto& c : rule.negative) rc.negative.push_back(label_counts(c.graph));
    return rc;
}

std::optional<std::string> check_contexts(const ContextDependentFusionRule& rule, const Hypergraph& host_graph,
                                          const Morphism& g, const Counts& host_counts,
                                          const RuleCounts& rc) {
    std::optional<HostIndex> index;
    auto host = [&]() -> const HostIndex& {
        if (!index) index.emplace(host_graph);
        return *index;
    };
    if (!rule.positive.empty()) {
        bool any = false;
        for (std::size_t i = 0; i < rule.positive.size(); ++i) {
            const auto& c = rule.positive[i];
            bool ok = counts_cover(host_counts, rc.positive[i]) &&
                      satisfies_positive(g, c, host());
            if (ok) {
                any = true;
                if (rule.positive_any) break;
            } else if (!rule.positive_any) {
                return "positive context " + c.name;
            }
        }
        if (rule.positive_any && !any) return "positive contexts (none of " + std::to_string(rule.positive.size()) + " holds)";
    }
    for (std::size_t i = 0; i < rule.negative.size(); ++i) {
        const auto& c = rule.negative[i];
        if (!labels_present(host_counts, rc.negative[i])) continue;
        if (!satisfies_negative(g, c, host())) return "negative context " + c.name;
    }
    return std::nullopt;
}

}  // namespace

std::optional<std::string> check_match(const ContextDependentFusionRule& rule, const Hypergraph& host,
                                       const Morphism& g) {
    if (!is_morphism(g, rule.core.graph, host)) return std::string("match is not a morphism");
    return check_contexts(rule, host, g, label_counts(host), rule_counts(rule));
}

Hypergraph apply_fusion(const FusionRule& rule, const Hypergraph& host, const Morphism& g) {
    Hypergraph removed = remove(host, {}, {g.emap.at(FusionRule::e), g.emap.at(FusionRule::e_bar)});
    VertexPairs pairs;
    for (auto [a, b] : rule.correspondence) pairs.emplace_back(g.vmap.at(a), g.vmap.at(b));
    return quotient(removed, pairs);
}

Hypergraph apply_rule(const ContextDependentFusionRule& rule, const Hypergraph& host, const Morphism& g) {
    if (auto failure = check_match(rule, host, g)) throw RuleError(rule.name + ": " + *failure);
    return apply_fusion(rule.core, host, g);
}

std::vector<Morphism> applicable(const ContextDependentFusionRule& rule, const Hypergraph& host) {
    std::vector<Morphism> out;
    auto counts = label_counts(host);
    if (!counts.count(rule.core.label) || !counts.count(rule.core.complement)) return out;
    auto rc = rule_counts(rule);
    for (const auto& a : host.edges()) {
        if (a.label != rule.core.label) continue;
        for (const auto& b : host.edges()) {
            if (b.label != rule.core.complement) continue;
            auto g = match_from_edges(rule.core, host, a.id, b.id);
            if (g && !check_contexts(rule, host, *g, counts, rc)) out.push_back(std::move(*g));
        }
    }
    return out;
}

Hypergraph derive(const Grammar& grammar, const Hypergraph& h, const Step& step) {
    if (const auto* m = std::get_if<MultiplyStep>(&step)) return multiply(h, m->multiplicity);
    const auto& a = std::get<ApplyStep>(step);
    return apply_rule(grammar.rule(a.rule), h, a.match);
}

std::vector<Hypergraph> replay_states(const Grammar& grammar, const Derivation& d) {
    std::vector<Hypergraph> states{d.start};
    for (const auto& s : d.steps) states.push_back(derive(grammar, states.back(), s));
    return states;
}

Hypergraph replay(const Grammar& grammar, const Derivation& d) {
    Hypergraph h = d.start;
    for (const auto& s : d.steps) h = derive(grammar, h, s);
    return h;
}

bool is_member_component(const Hypergraph& component, const Alphabet& alphabet) {
    bool marked = false;
    for (const auto& e : component.edges()) {
        if (!alphabet.contains(e.label)) return false;
        switch (alphabet.kind(e.label)) {
            case LabelKind::marker: marked = true; break;
            case LabelKind::terminal: break;
            default: return false;
        }
    }
    return marked;
}

namespace {

Hypergraph remove_markers(const Hypergraph& h, const Alphabet& alphabet) {
    std::set<EdgeId> markers;
    for (const auto& e : h.edges())
        if (alphabet.kind(e.label) == LabelKind::marker) markers.insert(e.id);
    return remove(h, {}, markers);
}

}  // namespace

std::vector<Hypergraph> generated_members(const Hypergraph& h, const Alphabet& alphabet) {
    std::vector<Hypergraph> out;
    for (const auto& c : connected_components(h))
        if (is_member_component(c, alphabet)) out.push_back(remove_markers(c, alphabet));
    return out;
}

bool contexts_are_local(const Grammar& grammar) {
    for (const auto& r : grammar.rules)
        for (const auto* list : {&r.positive, &r.negative})
            for (const auto& c : *list) {
                std::set<VertexId> anchored;
                for (auto [_, v] : c.anchor.vmap) anchored.insert(v);
                for (const auto& comp : connected_components(c.graph)) {
                    bool hit = false;
                    for (VertexId v : comp.vertices()) hit = hit || anchored.count(v);
                    if (!hit) return false;
                }
            }
    return true;
}

namespace {

struct Piece {
    Hypergraph graph;
    std::string form;
    bool marked = false;
    bool fusion = false;
    std::set<std::string> labels;
    std::vector<char> mask;  // indexed by interned label id
    bool has(int id) const { return id < static_cast<int>(mask.size()) && mask[static_cast<std::size_t>(id)]; }
};

Piece make_piece(Hypergraph g, const Alphabet& alphabet) {
    Piece p;
    p.form = canonical_form(g);
    for (const auto& e : g.edges()) {
        p.labels.insert(e.label);
        auto k = alphabet.kind(e.label);
        if (k == LabelKind::marker) p.marked = true;
        if (k == LabelKind::fusion || k == LabelKind::complement) p.fusion = true;
    }
    p.graph = std::move(g);
    return p;
}

// Labels every admissible host must carry.
std::set<std::string> required_labels(const ContextDependentFusionRule& r) {
    std::set<std::string> need{r.core.label, r.core.complement};
    if (r.positive.empty()) return need;
    std::vector<std::set<std::string>> per;
    for (const auto& c : r.positive) {
        std::set<std::string> ls;
        for (const auto& e : c.graph.edges()) ls.insert(e.label);
        per.push_back(std::move(ls));
    }
    std::set<std::string> common = per.front();
    for (const auto& ls : per) {
        if (r.positive_any) {
            std::set<std::string> keep;
            for (const auto& l : common)
                if (ls.count(l)) keep.insert(l);
            common = std::move(keep);
        } else {
            common.insert(ls.begin(), ls.end());
        }
    }
    need.insert(common.begin(), common.end());
    return need;
}

struct TraceNode {
    std::shared_ptr<const TraceNode> parent;
    std::string step;
};

std::vector<std::string> unwind(const std::shared_ptr<const TraceNode>& node) {
    std::vector<std::string> out;
    for (auto n = node; n; n = n->parent) out.push_back(n->step);
    std::reverse(out.begin(), out.end());
    return out;
}

struct State {
    std::vector<std::shared_ptr<const Piece>> pieces;  // sorted by form
    std::vector<int> used;
    int depth = 0;
    std::shared_ptr<const TraceNode> trace;
};

std::string state_key(const State& s) {
    std::string key;
    for (int u : s.used) key += std::to_string(u) + ",";
    key += "|";
    for (const auto& p : s.pieces) {
        key += p->form;
        key += "#";
    }
    return key;
}

class Search {
public:
    Search(const Grammar& grammar, const SearchOptions& options) : g_(grammar), opt_(options) {
        for (auto& c : connected_components(grammar.start))
            catalog_.push_back(std::make_shared<const Piece>(piece(std::move(c))));
        for (const auto& r : grammar.rules) {
            by_label_[r.core.label].push_back(&r);
            counts_[&r] = rule_counts(r);
            for (const auto& l : required_labels(r)) required_[&r].push_back(intern(l));
            // a connected positive context holds e and e-bar in one component
            bool joined = !r.positive.empty();
            for (const auto& c : r.positive) joined = joined && connected_components(c.graph).size() == 1;
            joined_[&r] = joined;
        }
        allowed_.assign(catalog_.size(), true);
        if (options.components) {
            if (grammar.component_names.size() != catalog_.size())
                throw RuleError("component filter needs named start components");
            for (std::size_t t = 0; t < catalog_.size(); ++t)
                allowed_[t] = options.components->count(grammar.component_names[t]) > 0;
        }
    }

    SearchResult run() {
        State init;
        init.used.assign(catalog_.size(), 0);
        if (opt_.initial) {
            restricted_ = true;
            base_edges_ = static_cast<int>(opt_.initial->edge_count());
            for (auto& c : connected_components(*opt_.initial)) {
                auto p = piece(std::move(c));
                record(p);
                if (p.marked) init.pieces.push_back(std::make_shared<const Piece>(std::move(p)));
            }
            if (init.pieces.size() > 1) init.pieces.resize(1);
        } else {
            for (std::size_t t = 0; t < catalog_.size(); ++t)
                if (allowed_[t] && catalog_[t]->marked && !catalog_[t]->fusion &&
                    static_cast<int>(catalog_[t]->graph.edge_count()) <= opt_.max_edges && opt_.max_copies > 0)
                    record(*catalog_[t]);
        }
        visited_.insert(state_key(init));
        std::deque<State> queue{init};
        while (!queue.empty()) {
            State s = std::move(queue.front());
            queue.pop_front();
            result_.deepest = std::max(result_.deepest, s.depth);
            if (s.depth >= opt_.max_depth) {
                if (!result_.depth_cut && expand(s, nullptr)) result_.depth_cut = true;
                continue;
            }
            expand(s, &queue);
            if (result_.state_cap_hit) break;
        }
        result_.states = visited_.size();
        return std::move(result_);
    }

private:
    int intern(const std::string& label) {
        return label_ids_.emplace(label, static_cast<int>(label_ids_.size())).first->second;
    }

    Piece piece(Hypergraph g) {
        Piece p = make_piece(std::move(g), g_.alphabet);
        std::vector<int> ids;
        for (const auto& l : p.labels) ids.push_back(intern(l));
        p.mask.assign(label_ids_.size(), 0);
        for (int id : ids) p.mask[static_cast<std::size_t>(id)] = 1;
        return p;
    }

    void record(const Piece& p, const std::shared_ptr<const TraceNode>& trace = nullptr) {
        if (!p.marked || p.fusion) return;
        auto rem = remove_markers(p.graph, g_.alphabet);
        auto form = canonical_form(rem);
        if (result_.member_forms.insert(form).second) {
            result_.members.push_back(std::move(rem));
            result_.member_traces.push_back(unwind(trace));
        }
    }


    int budget_edges(const std::vector<int>& used) const {
        int total = base_edges_;
        for (std::size_t t = 0; t < used.size(); ++t)
            total += used[t] * static_cast<int>(catalog_[t]->graph.edge_count());
        return total;
    }

    struct Source {
        std::shared_ptr<const Piece> piece;
        int state_index = -1;  // -1: fresh catalog copy
        int catalog_index = -1;
    };

    std::string describe(const Source& src) const {
        if (src.catalog_index >= 0) {
            auto t = static_cast<std::size_t>(src.catalog_index);
            return t < g_.component_names.size() ? g_.component_names[t] : "component " + std::to_string(t);
        }
        return "piece " + std::to_string(src.state_index);
    }

    // Returns true if some successor exists; pushes successors when queue is given.
    bool expand(const State& s, std::deque<State>* queue) {
        std::vector<Source> sources;
        for (std::size_t i = 0; i < s.pieces.size(); ++i) {
            if (i > 0 && s.pieces[i]->form == s.pieces[i - 1]->form) continue;
            sources.push_back({s.pieces[i], static_cast<int>(i), -1});
        }
        const int budget = budget_edges(s.used);
        for (std::size_t t = 0; t < catalog_.size(); ++t) {
            if (!allowed_[t]) continue;
            if (s.used[t] >= opt_.max_copies) continue;
            if (budget + static_cast<int>(catalog_[t]->graph.edge_count()) > opt_.max_edges) continue;
            sources.push_back({catalog_[t], -1, static_cast<int>(t)});
        }
        std::map<std::string, std::vector<std::size_t>> carrying;
        for (std::size_t i = 0; i < sources.size(); ++i)
            for (const auto& l : sources[i].piece->labels) carrying[l].push_back(i);
        static const std::vector<std::size_t> none;
        auto with = [&](const std::string& l) -> const std::vector<std::size_t>& {
            auto it = carrying.find(l);
            return it == carrying.end() ? none : it->second;
        };
        bool found = false;
        for (const auto& [label, rules] : by_label_) {
            const std::string& comp = rules.front()->core.complement;
            for (std::size_t a : with(label)) {
                for (std::size_t b : with(comp)) {
                    if (!pair_allowed(s, sources[a], sources[b], a == b)) continue;
                    if (try_pair(s, sources[a], sources[b], a == b, rules, queue)) {
                        found = true;
                        if (!queue) return true;
                    }
                    if (result_.state_cap_hit) return found;
                }
            }
        }
        return found;
    }

    bool pair_allowed(const State& s, const Source& x, const Source& y, bool same) const {
        if (restricted_ && x.state_index < 0 && y.state_index < 0) return false;
        if (same) return true;
        // two distinct items sharing a form need two instances
        if (x.state_index >= 0 && y.state_index >= 0 && x.piece->form == y.piece->form) return false;
        if (x.catalog_index >= 0 && x.catalog_index == y.catalog_index) {
            int t = x.catalog_index;
            if (s.used[static_cast<std::size_t>(t)] + 2 > opt_.max_copies) return false;
            if (budget_edges(s.used) + 2 * static_cast<int>(catalog_[static_cast<std::size_t>(t)]->graph.edge_count()) >
                opt_.max_edges)
                return false;
        }
        if (x.catalog_index >= 0 && y.catalog_index >= 0 && x.catalog_index != y.catalog_index) {
            if (budget_edges(s.used) + static_cast<int>(x.piece->graph.edge_count() + y.piece->graph.edge_count()) >
                opt_.max_edges)
                return false;
        }
        return true;
    }

    struct Outcome {
        std::string step;
        std::vector<std::shared_ptr<const Piece>> fresh;
    };

    int form_id(const std::string& form) {
        return form_ids_.emplace(form, static_cast<int>(form_ids_.size())).first->second;
    }

    // Results of fusing x with y depend on the pair only up to isomorphism.
    const std::vector<Outcome>& outcomes(const Source& x, const Source& y, bool same,
                                         const std::vector<const ContextDependentFusionRule*>& rules,
                                         const std::shared_ptr<const TraceNode>& trace) {
        const auto& label = rules.front()->core.label;
        std::tuple<int, int, int> key{form_id(x.piece->form), same ? -1 : form_id(y.piece->form), intern(label)};
        if (auto it = memo_.find(key); it != memo_.end()) return it->second;
        auto& out = memo_[key];
        std::vector<const ContextDependentFusionRule*> live;
        for (const auto* r : rules) {
            if (!same && joined_.at(r)) continue;
            bool ok = true;
            for (int l : required_.at(r))
                if (!x.piece->has(l) && !y.piece->has(l)) {
                    ok = false;
                    break;
                }
            if (ok) live.push_back(r);
        }
        if (live.empty()) return out;
        Hypergraph host = x.piece->graph;
        CopyMap ymap;
        if (!same) host = disjoint_union(host, y.piece->graph, &ymap);
        const auto counts = label_counts(host);
        const auto& comp = rules.front()->core.complement;
        std::vector<EdgeId> es, bs;
        for (const auto& e : x.piece->graph.edges())
            if (e.label == label) es.push_back(e.id);
        for (const auto& e : y.piece->graph.edges())
            if (e.label == comp) bs.push_back(same ? e.id : ymap.edges.at(e.id));
        for (EdgeId e : es)
            for (EdgeId b : bs)
                for (const auto* r : live) {
                    auto g = match_from_edges(r->core, host, e, b);
                    if (!g) continue;
                    if (check_contexts(*r, host, *g, counts, counts_.at(r))) continue;
                    Outcome o;
                    o.step = r->name + " [" + describe(x) + (same ? "" : " + " + describe(y)) + "] e=" +
                             std::to_string(e) + " ebar=" + std::to_string(b);
                    auto node = std::make_shared<const TraceNode>(TraceNode{trace, o.step});
                    for (auto& c : connected_components(apply_fusion(r->core, host, *g))) {
                        auto p = piece(std::move(c));
                        record(p, node);
                        if (restricted_ && !p.marked) continue;
                        if (opt_.pruned && !p.marked && !p.fusion) continue;
                        o.fresh.push_back(std::make_shared<const Piece>(std::move(p)));
                    }
                    if (restricted_ && o.fresh.size() > 1) o.fresh.resize(1);
                    out.push_back(std::move(o));
                }
        return out;
    }

    bool try_pair(const State& s, const Source& x, const Source& y, bool same,
                  const std::vector<const ContextDependentFusionRule*>& rules, std::deque<State>* queue) {
        const auto& outs = outcomes(x, y, same, rules, s.trace);
        if (!queue) return !outs.empty();
        for (const auto& o : outs) {
            successor(s, x, y, same, o, *queue);
            if (result_.state_cap_hit) break;
        }
        return !outs.empty();
    }

    void successor(const State& s, const Source& x, const Source& y, bool same, const Outcome& o,
                   std::deque<State>& queue) {
        State next;
        next.trace = std::make_shared<const TraceNode>(TraceNode{s.trace, o.step});
        next.used = s.used;
        next.depth = s.depth + 1;
        std::vector<int> drop;
        for (const Source* src : {&x, &y}) {
            if (src == &y && same) break;
            if (src->state_index >= 0) drop.push_back(src->state_index);
            else next.used[static_cast<std::size_t>(src->catalog_index)] += 1;
        }
        for (std::size_t i = 0; i < s.pieces.size(); ++i)
            if (std::find(drop.begin(), drop.end(), static_cast<int>(i)) == drop.end() && !restricted_)
                next.pieces.push_back(s.pieces[i]);
        for (const auto& p : o.fresh) next.pieces.push_back(p);
        std::sort(next.pieces.begin(), next.pieces.end(),
                  [](const auto& a, const auto& b) { return a->form < b->form; });
        if (!visited_.insert(state_key(next)).second) return;
        if (visited_.size() >= opt_.max_states) result_.state_cap_hit = true;
        queue.push_back(std::move(next));
    }

    const Grammar& g_;
    SearchOptions opt_;
    std::vector<std::shared_ptr<const Piece>> catalog_;
    std::map<std::string, std::vector<const ContextDependentFusionRule*>> by_label_;
    std::map<const ContextDependentFusionRule*, RuleCounts> counts_;
    std::map<const ContextDependentFusionRule*, std::vector<int>> required_;
    std::unordered_map<std::string, int> label_ids_;
    std::map<const ContextDependentFusionRule*, bool> joined_;
    std::unordered_map<std::string, int> form_ids_;
    std::map<std::tuple<int, int, int>, std::vector<Outcome>> memo_;
    std::unordered_set<std::string> visited_;
    SearchResult result_;
    std::vector<bool> allowed_;
    bool restricted_ = false;
    int base_edges_ = 0;
};

}  // namespace

SearchResult bounded_search(const Grammar& grammar, const SearchOptions& options) {
    if (options.max_depth < 0 || options.max_edges < 0 || options.max_copies < 0)
        throw RuleError("search bounds must be non-negative");
    return Search(grammar, options).run();
}

}  // namespace cdfg
