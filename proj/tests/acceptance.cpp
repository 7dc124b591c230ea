// One line per criterion: number, PASS/FAIL, elapsed time against its limit, detail.

#include <chrono>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cdfg/harness.hpp"
#include "oracles.hpp"

using namespace cdfg;

namespace {

struct Outcome {
    bool ok = false;
    std::string detail;
};

constexpr double kTrace7Limit = 1.0;
constexpr double kTrace8Limit = 1.0;
constexpr double kSixCasesLimit = 5.0;
constexpr double kTapeLimit = 10.0;
constexpr double kEmptyLimit = 60.0;
constexpr double kCutLimit = 60.0;
constexpr double kCheckLimit = 300.0;
constexpr double kInvariantLimit = 120.0;
constexpr double kCountsLimit = 1.0;

std::string words(const std::set<std::string>& ws) {
    std::string s;
    for (const auto& w : ws) s += (s.empty() ? "" : ",") + w;
    return "{" + s + "}";
}

std::vector<std::string> applied(const Derivation& d) {
    std::vector<std::string> out;
    for (const auto& s : d.steps)
        if (const auto* a = std::get_if<ApplyStep>(&s)) out.push_back(a->rule);
    return out;
}

Outcome trace7() {
    auto tm = oracle::fig2_machine(true);
    auto g = compile(tm);
    auto h = config_graph(tm, {"q_start", "q_aux", "q_accept"}, {"d"}, {"a", "b"}, {"a", "b"});
    auto r = guided_step(g, tm, h, {"q_start", "a", "c", Move::r, "q_accept"});
    auto want = config_graph(tm, {"q_accept", "q_aux", "q_start"}, {"d", "c"}, {"b"}, {"a", "b"});
    bool rules = applied(r.derivation) == std::vector<std::string>{"Delta(d,a/c/r)", "fuse_loop_out(a)", "fuse_2in(d)"};
    bool iso = is_isomorphic(configuration_component(r.result), want);
    return {rules && iso, std::string("rules ") + (rules ? "as expected" : "differ") + ", result " +
                              (iso ? "isomorphic" : "not isomorphic")};
}

Outcome trace8() {
    auto tm = oracle::fig2_machine(true);
    auto g = compile(tm);
    auto h = config_graph(tm, {"q_start", "q_aux", "q_accept"}, {"d"}, {"a", "b"}, {"a", "b"});
    auto step = guided_step(g, tm, h, {"q_start", "a", "c", Move::r, "q_accept"});
    auto r = guided_accept(g, tm, configuration_component(step.result));
    bool rules = applied(r.derivation) == std::vector<std::string>{"accept", "cut"};
    auto members = generated_members(r.result, g.alphabet);
    bool one = members.size() == 1 && is_isomorphic(members[0], string_graph({"a", "b"}));
    return {rules && one, std::to_string(members.size()) + " member(s)" + (one ? ", sg(ab)" : "")};
}

Outcome six_cases() {
    TuringMachine base;
    base.states = {"p", "q", "acc"};
    base.start = "p";
    base.accept = "acc";
    base.input = {"a", "b"};
    base.tape = {"a", "b", "_"};
    std::vector<std::pair<Transition, Configuration>> cases{
        {{"p", "a", "b", Move::l, "q"}, {"p", {"b", "a"}, {"a", "b"}}},
        {{"p", "a", "b", Move::l, "q"}, {"p", {}, {"a", "b"}}},
        {{"p", "_", "b", Move::l, "q"}, {"p", {"a"}, {}}},
        {{"p", "b", "a", Move::n, "q"}, {"p", {"a"}, {"b", "b"}}},
        {{"p", "a", "_", Move::r, "q"}, {"p", {"b"}, {"a"}}},
        {{"p", "_", "a", Move::r, "q"}, {"p", {"a", "b"}, {}}},
    };
    int ok = 0;
    std::string bad;
    for (std::size_t i = 0; i < cases.size(); ++i) {
        auto [t, c] = cases[i];
        auto tm = base;
        tm.delta = {t};
        auto g = compile(tm);
        auto r = guided_step(g, tm, config_graph(tm, {"p", "q", "acc"}, c.left, c.right, {"a"}), t);
        auto dec = decode(tm, configuration_component(r.result));
        auto want = step(tm, c);
        if (dec && want.size() == 1 && dec->configuration == want[0]) ++ok;
        else bad += " case " + std::to_string(i + 1);
    }
    return {ok == 6, std::to_string(ok) + "/6 cases decode to the oracle successor" + bad};
}

Outcome tape_graphs() {
    auto tm = oracle::fig2_machine();
    Encoding enc(tm);
    auto g = tape_generator_grammar(enc);
    int ok = 0, total = 0;
    for (const auto& w : std::vector<std::vector<std::string>>{{}, {"a"}, {"b"}, {"a", "b"}})
        for (int i = 0; i <= 2; ++i)
            for (int j = 0; j <= 2; ++j) {
                ++total;
                std::vector<std::string> alpha(i, "_"), beta = w;
                beta.insert(beta.end(), j, "_");
                auto want = tape_graph(enc, alpha, beta, w);
                auto got = replay(g, tape_derivation(g, enc, w, i, j));
                for (const auto& c : connected_components(got))
                    if (is_isomorphic(c, want)) {
                        ++ok;
                        break;
                    }
            }
    return {ok == total, std::to_string(ok) + "/" + std::to_string(total) + " derived and isomorphic"};
}

SearchOptions tg_bounds() {
    SearchOptions o;
    o.max_depth = 10;
    o.max_edges = 30;
    o.max_copies = 2;
    return o;
}

Outcome tg_empty() {
    auto g = tape_generator_grammar(Encoding(oracle::fig2_machine()));
    auto r = bounded_search(g, tg_bounds());
    std::ostringstream s;
    s << r.members.size() << " members, " << r.states << " states, state cap "
      << (r.state_cap_hit ? "hit" : "not hit") << (r.depth_cut ? ", depth bound reached" : "");
    return {r.members.empty() && !r.state_cap_hit, s.str()};
}

// Members up to two terminal edges must be all sg(w) with |w| <= 2. With two copies of each
// symbol component, the three-edge members are the words using no symbol three times.
Outcome tg_cut() {
    auto tm = oracle::fig2_machine();
    auto g = tape_generator_grammar(Encoding(tm), true);
    auto r = bounded_search(g, tg_bounds());
    std::set<std::string> small, three, odd;
    for (const auto& m : r.members) {
        auto w = read_string_graph(m);
        if (!w) {
            odd.insert("non-string");
            continue;
        }
        if (w->size() <= 2) small.insert(join_word(*w));
        else if (w->size() == 3) three.insert(join_word(*w));
    }
    std::set<std::string> want_small, want_three, all_three;
    for (const auto& w : words_upto(tm.input, 3)) {
        if (w.size() <= 2) want_small.insert(join_word(w));
        if (w.size() != 3) continue;
        all_three.insert(join_word(w));
        std::map<std::string, int> n;
        for (const auto& x : w) ++n[x];
        bool fits = true;
        for (auto [x, k] : n) fits = fits && k <= 2;
        if (fits) want_three.insert(join_word(w));
    }
    bool ok = small == want_small && three == want_three && odd.empty() && !r.state_cap_hit;
    std::ostringstream s;
    s << "|w|<=2 " << words(small) << (small == want_small ? " exact" : " differs") << "; |w|=3 " << words(three)
      << (three == want_three ? " = copy-bounded words" : " differs") << "; missing at 3 edges: ";
    std::set<std::string> missing;
    for (const auto& w : all_three)
        if (!three.count(w)) missing.insert(w);
    s << words(missing);
    if (!odd.empty()) s << "; non-string members present";
    return {ok, s.str()};
}

Outcome equivalence() {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    CheckOptions o;
    o.max_depth = 25;
    int pass = 0, mismatch = 0, open = 0;
    std::string acc, rej, bad;
    for (const auto& w : words_upto(tm.input, 3)) {
        auto c = check_word(g, tm, w, o);
        (c.oracle == Verdict::accepted ? acc : rej) += " " + join_word(w);
        if (c.status == CheckStatus::pass) ++pass;
        else if (c.status == CheckStatus::mismatch) ++mismatch, bad += " " + join_word(w) + ": " + c.detail;
        else ++open, bad += " " + join_word(w) + ": " + c.detail;
    }
    std::ostringstream s;
    s << pass << " pass, " << mismatch << " mismatch, " << open << " inconclusive; accepted" << acc << "; rejected"
      << rej << bad;
    return {mismatch == 0 && open == 0, s.str()};
}

Outcome invariants() {
    std::mt19937 rng(2024);
    int failures = 0, checks = 0;
    auto expect = [&](bool b) {
        ++checks;
        if (!b) ++failures;
    };

    Alphabet a;
    a.add_fusion("A", "~A", {1, 1});
    a.add_fusion("B", "~B", {2, 0});
    a.add_terminal("t");
    std::vector<FusionRule> rules{make_fusion_rule("A", a), make_fusion_rule("B", a)};
    for (int it = 0; it < 300; ++it) {
        int nv = 1 + static_cast<int>(rng() % 6);
        std::vector<VertexId> vs(nv);
        std::iota(vs.begin(), vs.end(), 0);
        std::vector<Edge> es;
        for (int i = 0; i < 6; ++i) {
            static const std::vector<std::string> ls{"A", "~A", "B", "~B", "t"};
            const auto& l = ls[rng() % ls.size()];
            VertexId x = static_cast<VertexId>(rng() % nv), y = static_cast<VertexId>(rng() % nv);
            if (l.back() == 'B') es.push_back({i, l, {x, y}, {}});
            else es.push_back({i, l, {x}, {y}});
        }
        Hypergraph h(vs, es);
        for (const auto& r : rules)
            for (const auto& e : h.edges())
                for (const auto& b : h.edges()) {
                    if (e.label != r.label || b.label != r.complement) continue;
                    auto m = match_from_edges(r, h, e.id, b.id);
                    auto out = apply_fusion(r, h, *m);
                    VertexPairs pairs;
                    for (auto [x, y] : r.correspondence) pairs.emplace_back(m->vmap.at(x), m->vmap.at(y));
                    expect(out.edge_count() + 2 == h.edge_count());
                    expect(out.vertex_count() == oracle::class_count(h.vertices(), pairs));
                }
    }

    TuringMachine tm = oracle::fig2_machine();
    auto tg = tape_generator_grammar(Encoding(tm), true);
    for (int it = 0; it < 100; ++it) {
        auto r = oracle::rearrange(rng, tg);
        expect(is_isomorphic(r.late, r.early));
        expect(is_isomorphic(replay(tg, r.early_derivation), r.late));
    }

    for (int it = 0; it < 300; ++it) {
        auto p = oracle::random_graph(rng, 1 + static_cast<int>(rng() % 4), static_cast<int>(rng() % 4), {"a", "b"}, 1);
        auto h = oracle::random_graph(rng, 1 + static_cast<int>(rng() % 6), static_cast<int>(rng() % 9), {"a", "b"}, 1);
        auto got = find_morphisms(p, h), want = oracle::brute_morphisms(p, h);
        std::sort(got.begin(), got.end(), oracle::morphism_less);
        std::sort(want.begin(), want.end(), oracle::morphism_less);
        expect(got == want);
    }

    for (int it = 0; it < 400; ++it) {
        auto x = oracle::random_graph(rng, static_cast<int>(rng() % 7), static_cast<int>(rng() % 6), {"a", "b"});
        auto y = oracle::scramble(rng, x);
        if (rng() % 2 && y.edge_count() > 0) {
            auto es = y.edges();
            auto& e = es[rng() % es.size()];
            e.label = e.label == "a" ? "b" : "a";
            y = Hypergraph(y.vertices(), es);
        }
        expect(is_isomorphic(x, y) == oracle::brute_isomorphic(x, y));
    }
    return {failures == 0, std::to_string(checks - failures) + "/" + std::to_string(checks) + " checks hold"};
}

Outcome counts() {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    const std::size_t q = tm.states.size(), gamma = tm.tape.size(), lambdas = gamma * gamma * 3;
    const std::size_t want_components = gamma * lambdas * q + tm.input.size() + 4 + 3;
    std::size_t delta = 0, fuse = 0;
    for (const auto& r : g.rules) {
        delta += r.name.rfind("Delta(", 0) == 0;
        fuse += r.name.rfind("fuse_", 0) == 0;
    }
    std::size_t comps = connected_components(g.start).size();
    bool ok = comps == 585 && comps == want_components && delta == 192 && delta == gamma * lambdas && fuse == 16 &&
              fuse == 4 * gamma;
    return {ok, std::to_string(comps) + " components, " + std::to_string(delta) + " Delta + " + std::to_string(fuse) +
                    " fuse rules"};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit;
        std::function<Outcome()> run;
    };
    std::vector<Criterion> all{
        {1, "example step trace", kTrace7Limit, trace7},
        {2, "example acceptance trace", kTrace8Limit, trace8},
        {3, "six step cases", kSixCasesLimit, six_cases},
        {4, "tape graphs derivable", kTapeLimit, tape_graphs},
        {5, "tape generator language empty", kEmptyLimit, tg_empty},
        {6, "tape generator with cut", kCutLimit, tg_cut},
        {7, "language equivalence |w|<=3", kCheckLimit, equivalence},
        {8, "engine invariants", kInvariantLimit, invariants},
        {9, "compiler counts", kCountsLimit, counts},
    };
    int failed = 0;
    for (const auto& c : all) {
        auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = c.run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        bool in_time = secs < c.limit;
        bool pass = o.ok && in_time;
        failed += !pass;
        std::cout << "criterion " << c.id << " " << (pass ? "PASS" : "FAIL") << "  " << c.name << "  [" << std::fixed
                  << std::setprecision(2) << secs << "s / " << std::setprecision(0) << c.limit << "s"
                  << (in_time ? "" : " exceeded") << "]  " << o.detail << std::endl;
    }
    return failed == 0 ? 0 : 1;
}
