#include <doctest.h>

#include <deque>
#include <unordered_set>

#include "oracles.hpp"

using namespace cdfg;

namespace {

Alphabet small_alphabet() {
    Alphabet a;
    a.add_fusion("A", "~A", {1, 1});
    a.add_fusion("B", "~B", {2, 0});
    a.add_terminal("t");
    a.add_marker("mu");
    return a;
}

Hypergraph random_host(std::mt19937& rng, int nv, int ne) {
    static const std::vector<std::string> labels{"A", "~A", "B", "~B", "t"};
    std::vector<VertexId> vs(nv);
    std::iota(vs.begin(), vs.end(), 0);
    std::vector<Edge> es;
    auto v = [&] { return static_cast<VertexId>(rng() % nv); };
    for (int i = 0; i < ne; ++i) {
        const auto& l = labels[rng() % labels.size()];
        if (l[l.size() - 1] == 'B') es.push_back({i, l, {v(), v()}, {}});
        else es.push_back({i, l, {v()}, {v()}});
    }
    return Hypergraph(vs, es);
}

// Whole graphs, every multiplicity vector up front.
std::set<std::string> naive_members(const Grammar& g, int depth, int copies, int max_edges) {
    auto comps = connected_components(g.start);
    std::set<std::string> members;
    std::vector<int> m(comps.size(), 0);
    for (;;) {
        int edges = 0;
        for (std::size_t i = 0; i < m.size(); ++i) edges += m[i] * static_cast<int>(comps[i].edge_count());
        if (edges <= max_edges) {
            std::unordered_set<std::string> seen;
            std::deque<std::pair<Hypergraph, int>> queue{{multiply(g.start, m), 0}};
            seen.insert(canonical_form(queue.front().first));
            while (!queue.empty()) {
                auto [h, d] = queue.front();
                queue.pop_front();
                for (const auto& x : generated_members(h, g.alphabet)) members.insert(canonical_form(x));
                if (d == depth) continue;
                for (const auto& r : g.rules)
                    for (const auto& match : applicable(r, h)) {
                        auto n = apply_rule(r, h, match);
                        if (seen.insert(canonical_form(n)).second) queue.emplace_back(n, d + 1);
                    }
            }
        }
        std::size_t i = 0;
        while (i < m.size() && ++m[i] > copies) m[i++] = 0;
        if (i == m.size()) break;
    }
    return members;
}

TuringMachine one_symbol_machine() {
    TuringMachine tm;
    tm.states = {"p", "acc"};
    tm.start = "p";
    tm.accept = "acc";
    tm.input = {"a"};
    tm.tape = {"a", "_"};
    return tm;
}

}  // namespace

TEST_CASE("fusion rule graph") {
    auto a = small_alphabet();
    auto r = make_fusion_rule("B", a);
    CHECK(r.complement == "~B");
    CHECK(r.graph.vertex_count() == 4);
    CHECK(r.graph.edge_count() == 2);
    CHECK(r.graph.edge(FusionRule::e).label == "B");
    CHECK(r.graph.edge(FusionRule::e_bar).label == "~B");
    CHECK(r.correspondence.size() == 2);
    CHECK_THROWS_AS(make_fusion_rule("~B", a), RuleError);
    CHECK_THROWS_AS(make_fusion_rule("t", a), RuleError);
}

TEST_CASE("fusion removes two edges and merges attachment classes") {
    auto a = small_alphabet();
    std::vector<FusionRule> rules{make_fusion_rule("A", a), make_fusion_rule("B", a)};
    std::mt19937 rng(7);
    int applied = 0;
    for (int it = 0; it < 300; ++it) {
        auto h = random_host(rng, 1 + static_cast<int>(rng() % 6), 2 + static_cast<int>(rng() % 6));
        for (const auto& r : rules)
            for (const auto& e : h.edges()) {
                if (e.label != r.label) continue;
                for (const auto& b : h.edges()) {
                    if (b.label != r.complement) continue;
                    auto m = match_from_edges(r, h, e.id, b.id);
                    REQUIRE(m.has_value());
                    CHECK(is_morphism(*m, r.graph, h));
                    auto out = apply_fusion(r, h, *m);
                    VertexPairs pairs;
                    for (auto [x, y] : r.correspondence) pairs.emplace_back(m->vmap.at(x), m->vmap.at(y));
                    CHECK(out.edge_count() == h.edge_count() - 2);
                    CHECK(out.vertex_count() == oracle::class_count(h.vertices(), pairs));
                    ++applied;
                }
            }
    }
    CHECK(applied > 100);
}

TEST_CASE("contexts") {
    auto a = small_alphabet();
    auto rule = context_free_rule("A", a);
    // positive: two t loops on the source of e
    Context pc;
    pc.name = "two_t";
    {
        GraphBuilder b;
        auto v = b.add_vertices(4);
        b.add_edge("A", {v[0]}, {v[1]});
        b.add_edge("~A", {v[2]}, {v[3]});
        b.add_edge("t", {v[0]}, {v[0]});
        b.add_edge("t", {v[0]}, {v[0]});
        pc.graph = b.build();
        pc.anchor = Morphism{{{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {{0, 0}, {1, 1}}};
    }
    GraphBuilder hb;
    auto v = hb.add_vertices(4);
    hb.add_edge("A", {v[0]}, {v[1]});
    hb.add_edge("~A", {v[2]}, {v[3]});
    hb.add_edge("t", {v[0]}, {v[0]});
    auto host = hb.build();
    auto g = match_from_edges(rule.core, host, 0, 1);
    REQUIRE(g.has_value());

    auto positive = rule;
    positive.name = "pos";
    positive.positive.push_back(pc);
    CHECK(check_match(positive, host, *g) == "positive context two_t");
    CHECK(applicable(positive, host).empty());
    auto two = extend(host, {}, {{3, "t", {v[0]}, {v[0]}}});
    CHECK_FALSE(check_match(positive, two, *g).has_value());
    CHECK(applicable(positive, two).size() == 1);

    auto negative = rule;
    negative.name = "neg";
    Context nc = pc;
    nc.name = "no_t";
    nc.graph = remove(pc.graph, {}, {3});
    negative.negative.push_back(nc);
    CHECK(check_match(negative, host, *g) == "negative context no_t");
    CHECK_THROWS_AS(apply_rule(negative, host, *g), RuleError);

    Grammar gr;
    gr.alphabet = a;
    gr.start = host;
    gr.rules = {positive, negative};
    CHECK_NOTHROW(validate_grammar(gr));
    CHECK(contexts_are_local(gr));
    gr.rules[0].positive[0].anchor.vmap[0] = 1;
    CHECK_THROWS_AS(validate_grammar(gr), RuleError);
}

TEST_CASE("generated members drop markers") {
    Alphabet a = small_alphabet();
    GraphBuilder b;
    auto v = b.add_vertices(3);
    b.add_edge("t", {v[0]}, {v[1]});
    b.add_edge("mu", {v[0]}, {v[1]});
    b.add_edge("t", {v[1]}, {v[2]});
    auto u = b.add_vertices(2);
    b.add_edge("t", {u[0]}, {u[1]});
    b.add_edge("A", {u[0]}, {u[1]});
    auto h = b.build();
    auto members = generated_members(h, a);
    REQUIRE(members.size() == 1);
    CHECK(is_isomorphic(members[0], string_graph({"t", "t"})));
    CHECK_FALSE(is_member_component(string_graph({"t"}), a));
}

TEST_CASE("replay and derivation steps") {
    auto tm = one_symbol_machine();
    auto g = tape_generator_grammar(Encoding(tm), true);
    std::mt19937 rng(2);
    Derivation d;
    d.start = g.start;
    d.steps.push_back(MultiplyStep{std::vector<int>(connected_components(g.start).size(), 1)});
    Hypergraph h = derive(g, d.start, d.steps[0]);
    for (int i = 0; i < 3; ++i) {
        auto f = oracle::random_fusion(rng, g, h);
        if (!f) break;
        const auto& r = g.rule(f->rule);
        auto m = *match_from_edges(r.core, h, f->e, f->e_bar);
        d.steps.push_back(ApplyStep{f->rule, m});
        h = apply_rule(r, h, m);
    }
    CHECK(replay(g, d) == h);
    CHECK(replay_states(g, d).size() == d.steps.size() + 1);
    CHECK_THROWS_AS(g.rule("nope"), RuleError);
}

TEST_CASE("context-free rearrangement, multiplications first") {
    TuringMachine tm = one_symbol_machine();
    tm.input = {"a", "b"};
    tm.tape = {"a", "b", "_"};
    auto g = tape_generator_grammar(Encoding(tm), true);
    for (const auto& r : g.rules) REQUIRE((r.positive.empty() && r.negative.empty()));
    std::mt19937 rng(17);
    int interleaved = 0, fusions = 0;
    for (int it = 0; it < 100; ++it) {
        auto r = oracle::rearrange(rng, g);
        CHECK(is_isomorphic(r.late, r.early));
        CHECK(is_isomorphic(replay(g, r.early_derivation), r.late));
        interleaved += r.interleaved;
        fusions += r.fusions;
    }
    CHECK(interleaved >= 10);
    CHECK(fusions >= 200);
    MESSAGE(interleaved << " interleaved derivations, " << fusions << " fusions");
}

TEST_CASE("bounded search against naive enumeration") {
    auto tm = one_symbol_machine();
    for (bool cut : {false, true}) {
        auto g = tape_generator_grammar(Encoding(tm), cut);
        SearchOptions o;
        o.max_depth = 4;
        o.max_copies = 1;
        o.max_edges = 30;
        auto r = bounded_search(g, o);
        CHECK(r.member_forms == naive_members(g, 4, 1, 30));
        CHECK(r.members.size() == r.member_traces.size());
        if (!cut) CHECK(r.members.empty());
        else CHECK(r.member_forms.count(canonical_form(string_graph({}))) == 1);
    }
    SearchOptions bad;
    bad.max_depth = -1;
    CHECK_THROWS_AS(bounded_search(tape_generator_grammar(Encoding(tm)), bad), RuleError);
}
