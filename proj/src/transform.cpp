#include "cdfg/transform.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <stdexcept>

namespace cdfg {

std::string complement_of(const std::string& label) { return "~" + label; }

namespace {

const std::string kDegree = "°";

bool has(const std::vector<std::string>& xs, const std::string& x) {
    return std::find(xs.begin(), xs.end(), x) != xs.end();
}

std::string move_name(Move d) { return to_string(d); }

}  // namespace

Encoding::Encoding(const TuringMachine& tm) : tm_(tm) {
    tm_.validate();
    static const std::set<std::string> reserved{names::head, names::gen,    names::cut,  names::tape, names::begin,
                                                names::end,  names::marker, names::term, names::acc};
    std::set<std::string> images;
    for (const auto& x : tm_.tape) {
        if (reserved.count(x)) throw std::invalid_argument("tape symbol " + x + " clashes with a reserved label");
        if (x.empty() || x[0] == '~' || x.find('/') != std::string::npos ||
            x.find_first_of(" \t,()") != std::string::npos)
            throw std::invalid_argument("tape symbol " + x + " contains a reserved character");
        if (x.size() >= kDegree.size() && x.compare(x.size() - kDegree.size(), kDegree.size(), kDegree) == 0)
            throw std::invalid_argument("tape symbol " + x + " ends with the encoding mark");
        images.insert(f(x));
    }
    for (const auto& x : tm_.input)
        if (images.count(x)) throw std::invalid_argument("input symbol " + x + " clashes with an encoded label");
}

std::string Encoding::f(const std::string& x) const {
    if (!has(tm_.tape, x)) throw std::invalid_argument("unknown tape symbol " + x);
    return has(tm_.input, x) ? x + kDegree : x;
}

std::optional<std::string> Encoding::decode(const std::string& label) const {
    for (const auto& x : tm_.tape)
        if (f(x) == label) return x;
    return std::nullopt;
}

std::vector<std::string> Encoding::f(const std::vector<std::string>& word) const {
    std::vector<std::string> out;
    for (const auto& x : word) out.push_back(f(x));
    return out;
}

std::string Encoding::lambda(const std::string& x, const std::string& y, Move d) {
    return x + "/" + y + "/" + move_name(d);
}

std::vector<std::string> Encoding::all_lambdas() const {
    std::vector<std::string> out;
    for (const auto& x : tm_.tape)
        for (const auto& y : tm_.tape)
            for (Move d : {Move::l, Move::n, Move::r}) out.push_back(lambda(x, y, d));
    return out;
}

namespace {

void add_pair(Alphabet& a, const std::string& name, FusionType t) { a.add_fusion(name, complement_of(name), t); }

void add_tape_labels(Alphabet& a, const Encoding& enc) {
    add_pair(a, names::tape, {1, 0});
    add_pair(a, names::gen, {1, 1});
    add_pair(a, names::cut, {1, 1});
    add_pair(a, names::begin, {0, 1});
    add_pair(a, names::end, {1, 0});
    for (const auto& x : enc.machine().tape) add_pair(a, enc.f(x), {1, 1});
    a.add_marker(names::marker);
    for (const auto& x : enc.machine().input) a.add_terminal(x);
}

}  // namespace

Alphabet tape_generator_alphabet(const Encoding& enc) {
    Alphabet a;
    add_tape_labels(a, enc);
    return a;
}

Alphabet machine_alphabet(const Encoding& enc) {
    Alphabet a;
    add_pair(a, names::head, {static_cast<int>(enc.machine().states.size()), 1});
    add_tape_labels(a, enc);
    a.add_terminal(names::term);
    a.add_terminal(names::acc);
    for (const auto& l : enc.all_lambdas()) a.add_terminal(l);
    return a;
}

std::vector<std::string> initial_permutation(const TuringMachine& tm) {
    std::vector<std::string> sigma{tm.start};
    for (const auto& q : tm.states)
        if (q != tm.start) sigma.push_back(q);
    return sigma;
}

Hypergraph hg_tm(const TuringMachine& tm, const std::vector<std::string>& sigma) {
    std::vector<std::string> sorted_sigma(sigma), sorted_states(tm.states);
    std::sort(sorted_sigma.begin(), sorted_sigma.end());
    std::sort(sorted_states.begin(), sorted_states.end());
    if (sorted_sigma != sorted_states) throw std::invalid_argument("sigma is not a permutation of the states");
    GraphBuilder b;
    std::map<std::string, VertexId> v;
    for (const auto& q : tm.states) v[q] = b.add_vertex();
    VertexId v_head = b.add_vertex();
    b.add_edge(names::acc, {v[tm.accept]}, {v[tm.accept]});
    std::vector<VertexId> src;
    for (const auto& q : sigma) src.push_back(v[q]);
    b.add_edge(names::head, src, {v_head});
    b.add_edge(complement_of(names::tape), {v_head}, {});
    for (const auto& t : tm.delta) b.add_edge(Encoding::lambda(t), {v[t.from]}, {v[t.to]});
    return b.build();
}

Hypergraph tape_graph(const Encoding& enc, const std::vector<std::string>& alpha,
                      const std::vector<std::string>& beta, const std::vector<std::string>& w) {
    std::vector<std::string> tape(alpha);
    tape.insert(tape.end(), beta.begin(), beta.end());
    GraphBuilder b;
    auto t = b.add_vertices(static_cast<int>(tape.size()) + 1);
    auto m = b.add_vertices(static_cast<int>(w.size()) + 1);
    b.add_edge(names::begin, {}, {t.front()});
    for (std::size_t k = 0; k < tape.size(); ++k) b.add_edge(enc.f(tape[k]), {t[k]}, {t[k + 1]});
    b.add_edge(names::end, {t.back()}, {});
    const VertexId here = t[alpha.size()];
    b.add_edge(names::cut, {here}, {m.front()});
    b.add_edge(names::tape, {here}, {});
    b.add_edge(names::marker, {m.front()}, {m.front()});
    for (std::size_t k = 0; k < w.size(); ++k) {
        if (!has(enc.machine().input, w[k])) throw std::invalid_argument("adjunct symbol " + w[k] + " is not input");
        b.add_edge(w[k], {m[k]}, {m[k + 1]});
    }
    return b.build();
}

namespace {

FusionRule tape_fusion_rule() {
    Alphabet a;
    add_pair(a, names::tape, {1, 0});
    return make_fusion_rule(names::tape, a);
}

std::optional<EdgeId> find_edge(const Hypergraph& h, const std::function<bool(const Edge&)>& pred) {
    for (const auto& e : h.edges())
        if (pred(e)) return e.id;
    return std::nullopt;
}

}  // namespace

Hypergraph config_graph(const TuringMachine& tm, const std::vector<std::string>& sigma,
                        const std::vector<std::string>& alpha, const std::vector<std::string>& beta,
                        const std::vector<std::string>& w) {
    Encoding enc(tm);
    Hypergraph hg = hg_tm(tm, sigma);
    CopyMap map;
    Hypergraph both = disjoint_union(hg, tape_graph(enc, alpha, beta, w), &map);
    auto rule = tape_fusion_rule();
    EdgeId tape_edge = *find_edge(both, [&](const Edge& e) { return e.label == names::tape; });
    EdgeId cotape = *find_edge(both, [&](const Edge& e) { return e.label == complement_of(names::tape); });
    return apply_fusion(rule, both, *match_from_edges(rule, both, tape_edge, cotape));
}

Hypergraph tape_start_component(const Encoding&) {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(names::tape, {v[0]}, {});
    b.add_edge(names::gen, {v[0]}, {v[1]});
    b.add_edge(names::cut, {v[0]}, {v[1]});
    b.add_edge(names::begin, {}, {v[0]});
    b.add_edge(names::marker, {v[1]}, {v[1]});
    return b.build();
}

Hypergraph tape_symbol_component(const Encoding& enc, const std::string& x) {
    if (!has(enc.machine().input, x)) throw std::invalid_argument(x + " is not an input symbol");
    GraphBuilder b;
    auto v = b.add_vertices(4);
    b.add_edge(enc.f(x), {v[0]}, {v[1]});
    b.add_edge(names::gen, {v[1]}, {v[3]});
    b.add_edge(complement_of(names::gen), {v[0]}, {v[2]});
    b.add_edge(x, {v[2]}, {v[3]});
    return b.build();
}

Hypergraph tape_end_component(const Encoding&) {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(complement_of(names::gen), {v[0]}, {v[1]});
    b.add_edge(names::end, {v[0]}, {});
    return b.build();
}

Hypergraph tape_begin_extension(const Encoding& enc) {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(enc.f(enc.machine().blank), {v[0]}, {v[1]});
    b.add_edge(names::begin, {}, {v[0]});
    b.add_edge(complement_of(names::begin), {}, {v[1]});
    return b.build();
}

Hypergraph tape_end_extension(const Encoding& enc) {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(enc.f(enc.machine().blank), {v[0]}, {v[1]});
    b.add_edge(names::end, {v[1]}, {});
    b.add_edge(complement_of(names::end), {v[0]}, {});
    return b.build();
}

Hypergraph cut_complement_component() {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(complement_of(names::cut), {v[0]}, {v[1]});
    return b.build();
}

Hypergraph blank_complement_component(const Encoding& enc) {
    GraphBuilder b;
    auto v = b.add_vertices(2);
    b.add_edge(complement_of(enc.f(enc.machine().blank)), {v[0]}, {v[1]});
    b.add_edge(names::begin, {}, {v[1]});
    return b.build();
}

Hypergraph acc_component(const TuringMachine& tm) {
    const int q = static_cast<int>(tm.states.size());
    GraphBuilder b;
    auto v = b.add_vertices(q + 2);
    std::vector<VertexId> src(v.begin(), v.begin() + q);
    b.add_edge(names::term, src, {v[static_cast<std::size_t>(q)]});
    b.add_edge(complement_of(names::head), src, {v[static_cast<std::size_t>(q)]});
    b.add_edge(complement_of(names::cut), {v[static_cast<std::size_t>(q)]}, {v[static_cast<std::size_t>(q) + 1]});
    return b.build();
}

Hypergraph step_component(const Encoding& enc, const std::string& u, const std::string& x,
                          const std::string& y, Move d, int i) {
    const int q = static_cast<int>(enc.machine().states.size());
    if (i < 1 || i > q) throw std::out_of_range("step component index " + std::to_string(i) + " outside 1.." +
                                                std::to_string(q));
    const std::string fu = enc.f(u), fx = enc.f(x), fy = enc.f(y);
    GraphBuilder b;
    auto v = b.add_vertices(d == Move::n ? q + 2 : q + 3);
    auto V = [&](int k) { return v[static_cast<std::size_t>(k - 1)]; };
    std::vector<VertexId> src, swapped;
    for (int k = 1; k <= q; ++k) src.push_back(V(k));
    swapped = src;
    std::swap(swapped[0], swapped[static_cast<std::size_t>(i - 1)]);
    const VertexId top = d == Move::r ? V(q + 2) : V(q + 1);
    b.add_edge(names::head, src, {top});
    b.add_edge(complement_of(names::head), swapped, {top});
    switch (d) {
        case Move::l:
            b.add_edge(complement_of(fu), {V(q + 1)}, {V(q + 1)});
            b.add_edge(fu, {V(q + 1)}, {V(q + 3)});
            b.add_edge(complement_of(fx), {V(q + 1)}, {V(q + 2)});
            b.add_edge(fy, {V(q + 3)}, {V(q + 2)});
            break;
        case Move::n:
            b.add_edge(complement_of(fx), {V(q + 1)}, {V(q + 2)});
            b.add_edge(fy, {V(q + 1)}, {V(q + 2)});
            break;
        case Move::r:
            b.add_edge(complement_of(fx), {V(q + 2)}, {V(q + 2)});
            b.add_edge(fu, {V(q + 1)}, {V(q + 3)});
            b.add_edge(complement_of(fu), {V(q + 1)}, {V(q + 2)});
            b.add_edge(fy, {V(q + 3)}, {V(q + 2)});
            break;
    }
    return b.build();
}

std::string step_component_name(const std::string& u, const std::string& lambda, int i) {
    return "C(" + u + "," + lambda + "," + std::to_string(i) + ")";
}

namespace {

const std::string kTapeBegin = "tape_" + names::begin;
const std::string kTapeEnd = "tape_" + names::end;
const std::string kBlankBar = "blank_bar";
const std::string kCutBar = "z_~cut";

void add_component(std::vector<Hypergraph>& parts, std::vector<std::string>& labels, const std::string& name,
                   Hypergraph g) {
    parts.push_back(std::move(g));
    labels.push_back(name);
}

void tape_generator_parts(const Encoding& enc, std::vector<Hypergraph>& parts, std::vector<std::string>& labels) {
    add_component(parts, labels, "tape_start", tape_start_component(enc));
    add_component(parts, labels, "tape_end", tape_end_component(enc));
    for (const auto& x : enc.machine().input) add_component(parts, labels, "tape_" + x, tape_symbol_component(enc, x));
    add_component(parts, labels, kTapeBegin, tape_begin_extension(enc));
    add_component(parts, labels, kTapeEnd, tape_end_extension(enc));
}

std::vector<ContextDependentFusionRule> tape_generator_rules(const Alphabet& a) {
    return {context_free_rule(names::gen, a), context_free_rule(names::begin, a), context_free_rule(names::end, a)};
}

// Context whose anchor sends e and e-bar to the given edges of g.
Context anchored(const std::string& name, const FusionRule& rule, Hypergraph g, EdgeId e_img, EdgeId ebar_img) {
    auto m = match_from_edges(rule, g, e_img, ebar_img);
    if (!m) throw std::logic_error("context " + name + " does not fit " + rule.label);
    return {name, std::move(g), std::move(*m)};
}

}  // namespace

Grammar tape_generator_grammar(const Encoding& enc, bool with_cut) {
    Grammar g;
    g.alphabet = tape_generator_alphabet(enc);
    std::vector<Hypergraph> parts;
    tape_generator_parts(enc, parts, g.component_names);
    if (with_cut) add_component(parts, g.component_names, kCutBar, cut_complement_component());
    g.start = disjoint_union(parts);
    g.rules = tape_generator_rules(g.alphabet);
    if (with_cut) g.rules.push_back(context_free_rule(names::cut, g.alphabet));
    return g;
}

namespace {

struct ContextKit {
    const Encoding& enc;
    int q;

    // head with q fresh sources and a fresh target; returns edge id, target in *top
    EdgeId free_head(GraphBuilder& b, const std::string& label, VertexId top) const {
        return b.add_edge(label, b.add_vertices(q), {top});
    }

    Hypergraph hbullet_only(GraphBuilder& b, EdgeId* id) const {
        *id = free_head(b, complement_of(names::head), b.add_vertex());
        return b.build();
    }

    // twoin / twoout around a head target; with_cohead adds ~head sharing all attachments
    Context two(const FusionRule& rule, const std::string& x, bool in, bool with_cohead, bool hbullet,
                const std::string& name) const {
        GraphBuilder b;
        VertexId top0 = b.add_vertex(), top1 = b.add_vertex(), top2 = b.add_vertex();
        auto s = b.add_vertices(q);
        EdgeId h = b.add_edge(names::head, s, {top0});
        if (with_cohead) b.add_edge(complement_of(names::head), s, {top0});
        const std::string fx = enc.f(x);
        EdgeId ex = in ? b.add_edge(fx, {top2}, {top0}) : b.add_edge(fx, {top0}, {top2});
        EdgeId ebar = in ? b.add_edge(complement_of(fx), {top1}, {top0}) : b.add_edge(complement_of(fx), {top0}, {top1});
        if (hbullet) {
            EdgeId hb = free_head(b, complement_of(names::head), b.add_vertex());
            return anchored(name, rule, b.build(), h, hb);
        }
        return anchored(name, rule, b.build(), ex, ebar);
    }
};

}  // namespace

std::vector<ContextDependentFusionRule> delta_rules(const Encoding& enc) {
    const auto& tm = enc.machine();
    const int q = static_cast<int>(tm.states.size());
    Alphabet alphabet = machine_alphabet(enc);
    ContextKit kit{enc, q};
    std::vector<ContextDependentFusionRule> out;

    FusionRule head_rule = make_fusion_rule(names::head, alphabet);
    std::vector<Context> delta_nc;
    for (const auto& v : tm.tape) delta_nc.push_back(kit.two(head_rule, v, true, false, true, "twoin(" + v + ")+hbullet"));
    for (const auto& v : tm.tape)
        delta_nc.push_back(kit.two(head_rule, v, false, false, true, "twoout(" + v + ")+hbullet"));

    for (const auto& u : tm.tape)
        for (const auto& x : tm.tape)
            for (const auto& y : tm.tape)
                for (Move d : {Move::l, Move::n, Move::r}) {
                    const std::string lam = Encoding::lambda(x, y, d);
                    ContextDependentFusionRule r;
                    r.name = "Delta(" + u + "," + lam + ")";
                    r.core = head_rule;
                    r.positive_any = true;
                    for (int j = 1; j <= q; ++j) {
                        GraphBuilder b;
                        VertexId top0 = b.add_vertex(), top1 = b.add_vertex(), top2 = b.add_vertex();
                        auto s = b.add_vertices(q);
                        EdgeId h = b.add_edge(names::head, s, {top0});
                        b.add_edge(lam, {s[0]}, {s[static_cast<std::size_t>(j - 1)]});
                        b.add_edge(enc.f(x), {top0}, {top1});
                        b.add_edge(enc.f(u), {top2}, {top0});
                        CopyMap cmap = b.add_graph(step_component(enc, u, x, y, d, j));
                        EdgeId cohead = cmap.edges.at(1);
                        r.positive.push_back(anchored("PC(" + u + "," + lam + "," + std::to_string(j) + ")+" +
                                                          step_component_name(u, lam, j),
                                                      head_rule, b.build(), h, cohead));
                    }
                    r.negative = delta_nc;
                    out.push_back(std::move(r));
                }

    for (const auto& x : tm.tape) {
        const std::string fx = enc.f(x), cx = complement_of(enc.f(x));
        FusionRule rule = make_fusion_rule(fx, alphabet);
        for (bool in : {true, false}) {
            const std::string dir = in ? "in" : "out";
            ContextDependentFusionRule r;
            r.name = "fuse_2" + dir + "(" + x + ")";
            r.core = rule;
            r.positive.push_back(kit.two(rule, x, in, false, false, "two" + dir + "(" + x + ")"));
            r.negative.push_back(kit.two(rule, x, in, true, false, "two" + dir + "2h(" + x + ")"));
            {
                GraphBuilder b;
                auto n = b.add_vertices(2);
                EdgeId loop = b.add_edge(cx, {n[0]}, {n[0]});
                EdgeId e = in ? b.add_edge(fx, {n[1]}, {n[0]}) : b.add_edge(fx, {n[0]}, {n[1]});
                r.negative.push_back(anchored("loop/" + dir + "(" + x + ")", rule, b.build(), e, loop));
            }
            {
                GraphBuilder b;
                auto v = b.add_vertices(3);
                EdgeId bar = b.add_edge(cx, {v[0]}, {v[2]});
                EdgeId in_edge = b.add_edge(fx, {v[1]}, {v[2]});
                EdgeId out_edge = b.add_edge(fx, {v[0]}, {v[1]});
                r.negative.push_back(anchored("tri(" + x + ")", rule, b.build(), in ? in_edge : out_edge, bar));
            }
            for (const auto& z : tm.tape) {
                GraphBuilder b;
                auto n = b.add_vertices(3);
                b.add_edge(complement_of(enc.f(z)), {n[0]}, {n[0]});
                EdgeId bar = in ? b.add_edge(cx, {n[2]}, {n[0]}) : b.add_edge(cx, {n[0]}, {n[2]});
                EdgeId e = in ? b.add_edge(fx, {n[1]}, {n[0]}) : b.add_edge(fx, {n[0]}, {n[1]});
                r.negative.push_back(anchored("two" + dir + "extraloop(" + x + "," + z + ")", rule, b.build(), e, bar));
            }
            out.push_back(std::move(r));
        }
        for (bool in : {true, false}) {
            const std::string dir = in ? "in" : "out";
            ContextDependentFusionRule r;
            r.name = "fuse_loop_" + dir + "(" + x + ")";
            r.core = rule;
            r.positive_any = true;
            for (const auto& y : tm.tape)
                for (const auto& z : tm.tape) {
                    const std::string fy = enc.f(y), fz = enc.f(z), cz = complement_of(enc.f(z));
                    GraphBuilder b;
                    VertexId v = b.add_vertex();
                    auto n = b.add_vertices(4);  // n1..n4
                    auto N = [&](int k) { return n[static_cast<std::size_t>(k - 1)]; };
                    EdgeId e, loop;
                    if (in) {
                        e = b.add_edge(fx, {N(3)}, {v});
                        loop = b.add_edge(cx, {v}, {v});
                        b.add_edge(cz, {v}, {N(2)});
                        b.add_edge(fz, {v}, {N(4)});
                        b.add_edge(fy, {N(1)}, {N(2)});
                        b.add_edge(fx, {v}, {N(1)});
                    } else {
                        loop = b.add_edge(cx, {v}, {v});
                        b.add_edge(cz, {N(2)}, {v});
                        b.add_edge(fz, {N(3)}, {v});
                        b.add_edge(fy, {N(1)}, {v});
                        b.add_edge(fz, {N(2)}, {N(1)});
                        e = b.add_edge(fx, {v}, {N(4)});
                    }
                    r.positive.push_back(
                        anchored("PCloop" + dir + "(" + x + ";" + y + "," + z + ")", rule, b.build(), e, loop));
                }
            out.push_back(std::move(r));
        }
    }
    return out;
}

ContextDependentFusionRule accept_rule(const Encoding& enc) {
    const auto& tm = enc.machine();
    const int q = static_cast<int>(tm.states.size());
    Alphabet alphabet = machine_alphabet(enc);
    ContextDependentFusionRule r;
    r.name = "accept";
    r.core = make_fusion_rule(names::head, alphabet);
    GraphBuilder b;
    auto p = b.add_vertices(q);
    VertexId v_tape = b.add_vertex();
    EdgeId h = b.add_edge(names::head, p, {v_tape});
    b.add_edge(names::acc, {p[0]}, {p[0]});
    CopyMap acc = b.add_graph(acc_component(tm));
    r.positive.push_back(anchored("PC_acc+Acc", r.core, b.build(), h, acc.edges.at(1)));
    return r;
}

ContextDependentFusionRule cut_rule(const Encoding& enc) {
    Alphabet alphabet = tape_generator_alphabet(enc);
    ContextDependentFusionRule r;
    r.name = "cut";
    r.core = make_fusion_rule(names::cut, alphabet);
    GraphBuilder b;
    auto v = b.add_vertices(3);
    EdgeId c = b.add_edge(names::cut, {v[0]}, {v[1]});
    EdgeId cb = b.add_edge(complement_of(names::cut), {v[0]}, {v[2]});
    r.positive.push_back(anchored("shared_source", r.core, b.build(), c, cb));
    return r;
}

ContextDependentFusionRule shrink_rule(const Encoding& enc) {
    Alphabet alphabet = tape_generator_alphabet(enc);
    const std::string blank = enc.f(enc.machine().blank);
    ContextDependentFusionRule r;
    r.name = "shrink";
    r.core = make_fusion_rule(blank, alphabet);
    GraphBuilder b;
    auto v = b.add_vertices(4);
    b.add_edge(names::begin, {}, {v[0]});
    EdgeId e = b.add_edge(blank, {v[0]}, {v[1]});
    EdgeId eb = b.add_edge(complement_of(blank), {v[2]}, {v[3]});
    b.add_edge(names::begin, {}, {v[3]});
    r.positive.push_back(anchored("leading_blank+blank_bar", r.core, b.build(), e, eb));
    return r;
}

Grammar compile(const TuringMachine& tm) {
    Encoding enc(tm);
    Grammar g;
    g.alphabet = machine_alphabet(enc);
    std::vector<Hypergraph> parts;
    tape_generator_parts(enc, parts, g.component_names);
    add_component(parts, g.component_names, "hg_init", hg_tm(tm, initial_permutation(tm)));
    add_component(parts, g.component_names, "Acc", acc_component(tm));
    add_component(parts, g.component_names, kBlankBar, blank_complement_component(enc));
    const int q = static_cast<int>(tm.states.size());
    for (const auto& u : tm.tape)
        for (const auto& x : tm.tape)
            for (const auto& y : tm.tape)
                for (Move d : {Move::l, Move::n, Move::r})
                    for (int i = 1; i <= q; ++i)
                        add_component(parts, g.component_names,
                                      step_component_name(u, Encoding::lambda(x, y, d), i),
                                      step_component(enc, u, x, y, d, i));
    g.start = disjoint_union(parts);
    g.rules = tape_generator_rules(g.alphabet);
    for (auto& r : delta_rules(enc)) g.rules.push_back(std::move(r));
    g.rules.push_back(context_free_rule(names::tape, g.alphabet));
    g.rules.push_back(accept_rule(enc));
    g.rules.push_back(cut_rule(enc));
    g.rules.push_back(shrink_rule(enc));
    return g;
}

Hypergraph configuration_component(const Hypergraph& h) {
    for (const auto& c : connected_components(h)) {
        std::set<VertexId> cut_sources;
        for (const auto& e : c.edges())
            if (e.label == names::cut && e.src.size() == 1) cut_sources.insert(e.src[0]);
        for (const auto& e : c.edges())
            if (e.label == names::head && e.tgt.size() == 1 && cut_sources.count(e.tgt[0])) return c;
    }
    return {};
}

std::optional<DecodedConfiguration> decode(const TuringMachine& tm, const Hypergraph& h) {
    Encoding enc(tm);
    const Edge* head = nullptr;
    for (const auto& e : h.edges())
        if (e.label == names::head) {
            if (head) return std::nullopt;
            head = &e;
        }
    const std::size_t q = tm.states.size();
    if (!head || head->src.size() != q || head->tgt.size() != 1) return std::nullopt;
    if (std::set<VertexId>(head->src.begin(), head->src.end()).size() != q) return std::nullopt;
    const VertexId v_tape = head->tgt[0];

    auto find_unique = [&](const std::function<bool(const Edge&)>& pred) -> std::optional<const Edge*> {
        const Edge* found = nullptr;
        for (const auto& e : h.edges())
            if (pred(e)) {
                if (found) return std::nullopt;
                found = &e;
            }
        return found;
    };
    auto is_cell = [&](const Edge& e) { return e.src.size() == 1 && e.tgt.size() == 1 && enc.decode(e.label); };

    DecodedConfiguration out;
    // left part
    VertexId v = v_tape;
    for (std::size_t guard = 0;; ++guard) {
        if (guard > h.edge_count()) return std::nullopt;
        auto begin = find_unique([&](const Edge& e) { return e.label == names::begin && e.tgt == std::vector{v}; });
        if (!begin) return std::nullopt;
        if (*begin) break;
        auto cell = find_unique([&](const Edge& e) { return is_cell(e) && e.tgt[0] == v; });
        if (!cell || !*cell) return std::nullopt;
        out.configuration.left.insert(out.configuration.left.begin(), *enc.decode((*cell)->label));
        v = (*cell)->src[0];
    }
    v = v_tape;
    for (std::size_t guard = 0;; ++guard) {
        if (guard > h.edge_count()) return std::nullopt;
        auto end = find_unique([&](const Edge& e) { return e.label == names::end && e.src == std::vector{v}; });
        if (!end) return std::nullopt;
        if (*end) break;
        auto cell = find_unique([&](const Edge& e) { return is_cell(e) && e.src[0] == v; });
        if (!cell || !*cell) return std::nullopt;
        out.configuration.right.push_back(*enc.decode((*cell)->label));
        v = (*cell)->tgt[0];
    }
    auto cut = find_unique([&](const Edge& e) { return e.label == names::cut; });
    if (!cut || !*cut || (*cut)->src != std::vector{v_tape} || (*cut)->tgt.size() != 1) return std::nullopt;
    v = (*cut)->tgt[0];
    for (std::size_t guard = 0;; ++guard) {
        if (guard > h.edge_count()) return std::nullopt;
        auto cell = find_unique([&](const Edge& e) {
            return has(tm.input, e.label) && e.src == std::vector{v} && e.tgt.size() == 1;
        });
        if (!cell) return std::nullopt;
        if (!*cell) break;
        out.adjunct.push_back((*cell)->label);
        v = (*cell)->tgt[0];
    }

    // states: try assignments of the head sources consistent with the acc loop and the transitions
    std::multiset<std::tuple<VertexId, VertexId, std::string>> lambda_edges;
    for (const auto& e : h.edges())
        if (e.label.find('/') != std::string::npos && e.src.size() == 1 && e.tgt.size() == 1)
            lambda_edges.insert({e.src[0], e.tgt[0], e.label});
    std::vector<std::size_t> perm(q);
    for (std::size_t k = 0; k < q; ++k) perm[k] = k;
    do {
        // state tm.states[k] sits at head source perm[k]
        std::map<std::string, VertexId> at;
        for (std::size_t k = 0; k < q; ++k) at[tm.states[k]] = head->src[perm[k]];
        std::multiset<std::tuple<VertexId, VertexId, std::string>> expected;
        for (const auto& t : tm.delta) expected.insert({at[t.from], at[t.to], Encoding::lambda(t)});
        if (expected != lambda_edges) continue;
        auto acc = find_unique([&](const Edge& e) { return e.label == names::acc; });
        if (!acc || !*acc || (*acc)->src != std::vector{at[tm.accept]} || (*acc)->tgt != std::vector{at[tm.accept]})
            continue;
        std::vector<std::string> sigma(q);
        for (std::size_t k = 0; k < q; ++k) sigma[perm[k]] = tm.states[k];
        Hypergraph expect;
        try {
            expect = config_graph(tm, sigma, out.configuration.left, out.configuration.right, out.adjunct);
        } catch (const std::exception&) {
            return std::nullopt;
        }
        if (!is_isomorphic(expect, h)) continue;
        out.sigma = sigma;
        out.configuration.state = sigma[0];
        return out;
    } while (std::next_permutation(perm.begin(), perm.end()));
    return std::nullopt;
}

FreshComponents::FreshComponents(const Grammar& grammar)
    : catalog_(connected_components(grammar.start)), grammar_(grammar) {}

std::vector<EdgeId> FreshComponents::take(Hypergraph& work, const std::string& name) {
    auto idx = grammar_.component_index(name);
    if (!idx) throw RuleError("no start component named " + name);
    CopyMap map;
    work = disjoint_union(work, catalog_[*idx], &map);
    requests_.push_back(name);
    std::vector<EdgeId> ids;
    for (const auto& e : catalog_[*idx].edges()) ids.push_back(map.edges.at(e.id));
    return ids;
}

namespace {

// Hands out the copies produced by one multiplication, in order per component.
class MultipliedComponents : public ComponentSource {
public:
    MultipliedComponents(const Grammar& grammar, std::vector<ComponentCopy> copies)
        : catalog_(connected_components(grammar.start)), grammar_(grammar) {
        for (auto& c : copies) pending_[c.component].push_back(std::move(c.map));
    }

    std::vector<EdgeId> take(Hypergraph&, const std::string& name) override {
        auto idx = grammar_.component_index(name);
        if (!idx) throw RuleError("no start component named " + name);
        auto& queue = pending_[*idx];
        if (next_[*idx] >= queue.size()) throw RuleError("multiplication supplied too few copies of " + name);
        const CopyMap& map = queue[next_[*idx]++];
        std::vector<EdgeId> ids;
        for (const auto& e : catalog_[*idx].edges()) ids.push_back(map.edges.at(e.id));
        return ids;
    }

private:
    std::vector<Hypergraph> catalog_;
    const Grammar& grammar_;
    std::map<std::size_t, std::vector<CopyMap>> pending_;
    std::map<std::size_t, std::size_t> next_;
};

std::vector<int> multiplicity_for(const Grammar& grammar, const std::vector<std::string>& requests) {
    std::vector<int> m(grammar.component_names.size(), 0);
    for (const auto& r : requests) m.at(*grammar.component_index(r)) += 1;
    return m;
}

}  // namespace

GuidedExecutor::GuidedExecutor(const Grammar& grammar, const TuringMachine& tm, Hypergraph work,
                               ComponentSource& source)
    : grammar_(grammar), tm_(tm), enc_(tm), work_(std::move(work)), source_(source) {}

void GuidedExecutor::apply(const std::string& rule, EdgeId e, EdgeId e_bar) {
    const auto& r = grammar_.rule(rule);
    auto g = match_from_edges(r.core, work_, e, e_bar);
    if (!g) throw RuleError(rule + ": edges " + std::to_string(e) + "," + std::to_string(e_bar) + " do not match");
    work_ = apply_rule(r, work_, *g);
    steps_.push_back(ApplyStep{rule, std::move(*g)});
}

EdgeId GuidedExecutor::config_head() const {
    Hypergraph c = configuration_component(work_);
    for (const auto& e : c.edges())
        if (e.label == names::head) return e.id;
    throw RuleError("no configuration in the working graph");
}

void GuidedExecutor::step(const Transition& t) {
    Hypergraph comp = configuration_component(work_);
    auto dec = decode(tm_, comp);
    if (!dec) throw RuleError("working graph holds no decodable configuration");
    const auto& c = dec->configuration;
    const std::string read = c.right.empty() ? tm_.blank : c.right.front();
    if (c.state != t.from || read != t.read)
        throw RuleError("transition " + t.from + " " + t.read + " not enabled in " + format_configuration(c));
    auto pos = std::find(dec->sigma.begin(), dec->sigma.end(), t.to);
    const int i = static_cast<int>(pos - dec->sigma.begin()) + 1;

    const EdgeId head = config_head();
    auto v_tape = [&]() { return work_.edge(head).tgt[0]; };
    auto edge_at = [&](const std::function<bool(const Edge&)>& pred) {
        auto id = find_edge(configuration_component(work_), pred);
        if (!id) throw RuleError("configuration lacks an expected edge");
        return *id;
    };
    auto is_cell = [&](const Edge& e) { return e.src.size() == 1 && e.tgt.size() == 1 && enc_.decode(e.label); };

    const bool left_empty = c.left.empty();
    const bool right_empty = c.right.empty();
    EdgeId left = -1, right = -1;
    std::vector<EdgeId> begin_ext;
    std::string u = tm_.blank;
    if (left_empty) {
        begin_ext = take(kTapeBegin);
        EdgeId b = edge_at([&](const Edge& e) { return e.label == names::begin && e.tgt == std::vector{v_tape()}; });
        apply("fr(" + names::begin + ")", b, begin_ext[2]);
        left = begin_ext[0];
    } else {
        u = c.left.back();
        left = edge_at([&](const Edge& e) { return is_cell(e) && e.tgt[0] == v_tape(); });
    }
    if (right_empty) {
        auto end_ext = take(kTapeEnd);
        EdgeId b = edge_at([&](const Edge& e) { return e.label == names::end && e.src == std::vector{v_tape()}; });
        apply("fr(" + names::end + ")", b, end_ext[2]);
        right = end_ext[0];
    } else {
        right = edge_at([&](const Edge& e) { return is_cell(e) && e.src[0] == v_tape(); });
    }
    const std::string lam = Encoding::lambda(t);
    auto C = take(step_component_name(u, lam, i));
    apply("Delta(" + u + "," + lam + ")", head, C[1]);
    switch (t.move) {
        case Move::l:
            apply("fuse_loop_in(" + u + ")", left, C[2]);
            apply("fuse_2out(" + t.read + ")", right, C[4]);
            break;
        case Move::n:
            apply("fuse_2out(" + t.read + ")", right, C[2]);
            break;
        case Move::r:
            apply("fuse_loop_out(" + t.read + ")", right, C[2]);
            apply("fuse_2in(" + u + ")", left, C[4]);
            break;
    }
    if (left_empty && t.move != Move::l) {
        auto bar = take(kBlankBar);
        EdgeId lead = t.move == Move::r ? C[3] : begin_ext[0];
        apply("shrink", lead, bar[0]);
    }
}

void GuidedExecutor::accept() {
    auto dec = decode(tm_, configuration_component(work_));
    if (!dec) throw RuleError("working graph holds no decodable configuration");
    if (dec->configuration.state != tm_.accept)
        throw RuleError("accept: configuration is in state " + dec->configuration.state);
    const EdgeId head = config_head();
    auto acc = take("Acc");
    apply("accept", head, acc[1]);
    const VertexId v = work_.edge(acc[2]).src[0];
    auto cut = find_edge(work_, [&](const Edge& e) { return e.label == names::cut && e.src == std::vector{v}; });
    if (!cut) throw RuleError("accept: no cut edge at the head position");
    apply("cut", *cut, acc[2]);
}

namespace {

// Replays a guided run with every requested component present from the start,
// so the recorded matches refer to the ids of the derivation's start graph.
template <typename Run>
GuidedResult run_prepared(const Grammar& grammar, const TuringMachine& tm, const Hypergraph& config, Run run) {
    FreshComponents plan(grammar);
    {
        GuidedExecutor ex(grammar, tm, config, plan);
        run(ex);
    }
    auto catalog = connected_components(grammar.start);
    GraphBuilder b(config);
    std::vector<ComponentCopy> copies;
    for (const auto& name : plan.requests()) {
        std::size_t idx = *grammar.component_index(name);
        copies.push_back({idx, 0, b.add_graph(catalog[idx])});
    }
    GuidedResult r;
    r.derivation.start = b.build();
    MultipliedComponents source(grammar, std::move(copies));
    GuidedExecutor ex(grammar, tm, r.derivation.start, source);
    run(ex);
    r.derivation.steps = ex.steps();
    r.result = ex.graph();
    return r;
}

}  // namespace

GuidedResult guided_step(const Grammar& grammar, const TuringMachine& tm, const Hypergraph& config,
                         const Transition& t) {
    return run_prepared(grammar, tm, config, [&](GuidedExecutor& ex) { ex.step(t); });
}

GuidedResult guided_accept(const Grammar& grammar, const TuringMachine& tm, const Hypergraph& config) {
    return run_prepared(grammar, tm, config, [&](GuidedExecutor& ex) { ex.accept(); });
}

namespace {

void apply_into(const Grammar& grammar, Hypergraph& work, std::vector<Step>& steps, const std::string& rule,
                EdgeId e, EdgeId e_bar) {
    const auto& r = grammar.rule(rule);
    auto g = match_from_edges(r.core, work, e, e_bar);
    if (!g) throw RuleError(rule + ": edges do not match");
    work = apply_rule(r, work, *g);
    steps.push_back(ApplyStep{rule, std::move(*g)});
}

// tape_start, the symbol components and tape_end fused along gen: tg(eps, w, w)_tape.
// Returns the edge ids of tape_start.
std::vector<EdgeId> build_tape(const Grammar& grammar, Hypergraph& work, std::vector<Step>& steps,
                               ComponentSource& source, const std::vector<std::string>& w) {
    auto start = source.take(work, "tape_start");
    EdgeId gen = start[1];
    for (const auto& x : w) {
        auto cell = source.take(work, "tape_" + x);
        apply_into(grammar, work, steps, "fr(" + names::gen + ")", gen, cell[2]);
        gen = cell[1];
    }
    auto end = source.take(work, "tape_end");
    apply_into(grammar, work, steps, "fr(" + names::gen + ")", gen, end[0]);
    return start;
}

void tape_plan(const Grammar& grammar, Hypergraph& work, std::vector<Step>& steps, ComponentSource& source,
               const std::vector<std::string>& w, int i, int j) {
    auto start = build_tape(grammar, work, steps, source, w);
    EdgeId begin = start[3];
    for (int k = 0; k < i; ++k) {
        auto ext = source.take(work, kTapeBegin);
        apply_into(grammar, work, steps, "fr(" + names::begin + ")", begin, ext[2]);
        begin = ext[1];
    }
    auto end_edge = find_edge(work, [&](const Edge& e) { return e.label == names::end; });
    EdgeId end = *end_edge;
    for (int k = 0; k < j; ++k) {
        auto ext = source.take(work, kTapeEnd);
        apply_into(grammar, work, steps, "fr(" + names::end + ")", end, ext[2]);
        end = ext[1];
    }
}

}  // namespace

Derivation tape_derivation(const Grammar& tg_grammar, const Encoding& enc, const std::vector<std::string>& w,
                           int i, int j) {
    (void)enc;
    Hypergraph scratch;
    std::vector<Step> scratch_steps;
    FreshComponents plan(tg_grammar);
    tape_plan(tg_grammar, scratch, scratch_steps, plan, w, i, j);

    Derivation d;
    d.start = tg_grammar.start;
    auto m = multiplicity_for(tg_grammar, plan.requests());
    std::vector<ComponentCopy> copies;
    Hypergraph work = multiply(tg_grammar.start, m, &copies);
    d.steps.push_back(MultiplyStep{m});
    MultipliedComponents source(tg_grammar, std::move(copies));
    tape_plan(tg_grammar, work, d.steps, source, w, i, j);
    return d;
}

namespace {

void acceptance_plan(const Grammar& grammar, const TuringMachine& tm, Hypergraph& work, std::vector<Step>& steps,
                     ComponentSource& source, const std::vector<std::string>& w,
                     const std::vector<Transition>& transitions) {
    auto start = build_tape(grammar, work, steps, source, w);
    auto hg = source.take(work, "hg_init");
    apply_into(grammar, work, steps, "fr(" + names::tape + ")", start[0], hg[2]);
    GuidedExecutor ex(grammar, tm, work, source);
    for (const auto& t : transitions) ex.step(t);
    ex.accept();
    work = ex.graph();
    steps.insert(steps.end(), ex.steps().begin(), ex.steps().end());
}

}  // namespace

Derivation acceptance_derivation(const Grammar& grammar, const TuringMachine& tm, const std::vector<std::string>& w,
                                 const std::vector<Configuration>& run) {
    if (run.empty() || run.front() != Configuration{tm.start, {}, w})
        throw RuleError("run does not start in the initial configuration");
    if (run.back().state != tm.accept) throw RuleError("run does not end in the accept state");
    std::vector<Transition> transitions;
    for (std::size_t k = 0; k + 1 < run.size(); ++k) {
        bool found = false;
        for (const auto& t : enabled(tm, run[k]))
            if (apply_transition(tm, run[k], t) == run[k + 1]) {
                transitions.push_back(t);
                found = true;
                break;
            }
        if (!found) throw RuleError("run has no transition between step " + std::to_string(k) + " and the next");
    }

    Hypergraph scratch;
    std::vector<Step> scratch_steps;
    FreshComponents plan(grammar);
    acceptance_plan(grammar, tm, scratch, scratch_steps, plan, w, transitions);

    Derivation d;
    d.start = grammar.start;
    auto m = multiplicity_for(grammar, plan.requests());
    std::vector<ComponentCopy> copies;
    Hypergraph work = multiply(grammar.start, m, &copies);
    d.steps.push_back(MultiplyStep{m});
    MultipliedComponents source(grammar, std::move(copies));
    acceptance_plan(grammar, tm, work, d.steps, source, w, transitions);

    std::vector<int> keep;
    for (const auto& c : connected_components(work)) keep.push_back(is_member_component(c, grammar.alphabet) ? 1 : 0);
    d.steps.push_back(MultiplyStep{keep});
    return d;
}

}  // namespace cdfg
