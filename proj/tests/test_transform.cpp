#include <doctest.h>

#include "cdfg/harness.hpp"
#include "oracles.hpp"

using namespace cdfg;

namespace {

std::vector<std::string> rule_names(const Derivation& d) {
    std::vector<std::string> out;
    for (const auto& s : d.steps)
        if (const auto* a = std::get_if<ApplyStep>(&s)) out.push_back(a->rule);
    return out;
}

std::size_t count_prefix(const Grammar& g, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& r : g.rules) n += r.name.rfind(prefix, 0) == 0;
    return n;
}

TuringMachine single(const Transition& t) {
    TuringMachine tm;
    tm.states = {"p", "q", "acc"};
    tm.start = "p";
    tm.accept = "acc";
    tm.input = {"a", "b"};
    tm.tape = {"a", "b", "_"};
    tm.delta = {t};
    return tm;
}

}  // namespace

TEST_CASE("encoding") {
    Encoding enc(oracle::fig2_machine());
    CHECK(enc.f("a") != "a");
    CHECK(enc.decode(enc.f("a")) == "a");
    CHECK(enc.f("c") == "c");
    CHECK(enc.f("_") == "_");
    CHECK(Encoding::lambda("a", "c", Move::r) == "a/c/r");
    CHECK(enc.all_lambdas().size() == 4 * 4 * 3);
    CHECK(complement_of("gen") == "~gen");
}

TEST_CASE("compiler counts") {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    const std::size_t q = tm.states.size(), gamma = tm.tape.size(), omega = tm.input.size();
    const std::size_t lambdas = gamma * gamma * 3;
    // tape generator: start, end, one per input symbol, two extensions; then hg_init, Acc, blank_bar
    const std::size_t components = gamma * lambdas * q + (omega + 4) + 3;
    CHECK(components == 585);
    CHECK(connected_components(g.start).size() == components);
    CHECK(g.component_names.size() == components);
    CHECK(count_prefix(g, "Delta(") == gamma * lambdas);
    CHECK(count_prefix(g, "fuse_") == 4 * gamma);
    CHECK(g.rules.size() == gamma * lambdas + 4 * gamma + 7);
    for (auto n : {"fr(gen)", "fr(|>)", "fr(<|)", "fr(tape)", "accept", "cut", "shrink"}) CHECK_NOTHROW(g.rule(n));
    CHECK_NOTHROW(validate_grammar(g));
    CHECK(contexts_are_local(g));
}

TEST_CASE("compiler counts without transitions") {
    auto tm = oracle::fig2_machine();
    tm.delta.clear();
    auto g = compile(tm);
    CHECK(count_prefix(g, "Delta(") == 192);
    CHECK(count_prefix(g, "fuse_") == 16);
    CHECK(connected_components(g.start).size() == 585);
}

TEST_CASE("tape generator grammar") {
    Encoding enc(oracle::fig2_machine());
    auto g = tape_generator_grammar(enc);
    CHECK(connected_components(g.start).size() == 6);
    CHECK(g.rules.size() == 3);
    auto gc = tape_generator_grammar(enc, true);
    CHECK(connected_components(gc.start).size() == 7);
    CHECK(gc.rules.size() == 4);
}

TEST_CASE("hg of a machine") {
    auto tm = oracle::fig2_machine();
    auto h = hg_tm(tm, {"q_start", "q_aux", "q_accept"});
    CHECK(connected_components(h).size() == 1);
    auto c = label_counts(h);
    CHECK(c["head"] == 1);
    CHECK(c["b/_/r"] == 1);
    CHECK(c["b/b/n"] == 1);
    CHECK(c["a/c/r"] == 1);
    CHECK(h.vertex_count() == tm.states.size() + 1);
    CHECK(initial_permutation(tm).front() == "q_start");
}

TEST_CASE("step component shape") {
    Encoding enc(oracle::fig2_machine(true));
    auto c = step_component(enc, "d", "a", "c", Move::r, 3);
    std::vector<std::string> labels;
    for (const auto& e : c.edges()) labels.push_back(e.label);
    CHECK(labels == std::vector<std::string>{"head", "~head", "~" + enc.f("a"), "d", "~d", "c"});
    CHECK(connected_components(c).size() == 1);
    CHECK(step_component_name("d", "a/c/r", 3) == "C(d,a/c/r,3)");
    auto n = step_component(enc, "d", "a", "c", Move::n, 1);
    CHECK(n.edge_count() == 4);
}

TEST_CASE("configuration graphs decode") {
    auto tm = oracle::fig2_machine(true);
    std::vector<std::string> sigma{"q_aux", "q_start", "q_accept"};
    auto h = config_graph(tm, sigma, {"d", "c"}, {"b", "_"}, {"a", "b"});
    auto dec = decode(tm, h);
    REQUIRE(dec.has_value());
    CHECK(dec->configuration == Configuration{"q_aux", {"d", "c"}, {"b", "_"}});
    CHECK(dec->sigma == sigma);
    CHECK(dec->adjunct == std::vector<std::string>{"a", "b"});
    CHECK_FALSE(decode(tm, string_graph({"a"})).has_value());
    CHECK(is_isomorphic(configuration_component(h), h));
}

TEST_CASE("example step trace") {
    auto tm = oracle::fig2_machine(true);
    auto g = compile(tm);
    auto h = config_graph(tm, {"q_start", "q_aux", "q_accept"}, {"d"}, {"a", "b"}, {"a", "b"});
    auto r = guided_step(g, tm, h, {"q_start", "a", "c", Move::r, "q_accept"});
    CHECK(rule_names(r.derivation) == std::vector<std::string>{"Delta(d,a/c/r)", "fuse_loop_out(a)", "fuse_2in(d)"});
    auto want = config_graph(tm, {"q_accept", "q_aux", "q_start"}, {"d", "c"}, {"b"}, {"a", "b"});
    CHECK(is_isomorphic(configuration_component(r.result), want));
    CHECK(is_isomorphic(replay(g, r.derivation), r.result));

    auto acc = guided_accept(g, tm, want);
    CHECK(rule_names(acc.derivation) == std::vector<std::string>{"accept", "cut"});
    auto members = generated_members(acc.result, g.alphabet);
    REQUIRE(members.size() == 1);
    CHECK(is_isomorphic(members[0], string_graph({"a", "b"})));
}

TEST_CASE("disabled transitions are refused") {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    auto h = config_graph(tm, initial_permutation(tm), {}, {"b"}, {"b"});
    CHECK_THROWS_AS(guided_step(g, tm, h, {"q_start", "a", "c", Move::r, "q_accept"}), RuleError);
    CHECK_THROWS_AS(guided_accept(g, tm, h), RuleError);
}

TEST_CASE("the six step cases") {
    struct Case {
        const char* name;
        Transition t;
        Configuration c;
    };
    std::vector<Case> cases{
        {"left", {"p", "a", "b", Move::l, "q"}, {"p", {"b", "a"}, {"a", "b"}}},
        {"left at the left end", {"p", "a", "b", Move::l, "q"}, {"p", {}, {"a", "b"}}},
        {"left at the right end", {"p", "_", "b", Move::l, "q"}, {"p", {"a"}, {}}},
        {"stay", {"p", "b", "a", Move::n, "q"}, {"p", {"a"}, {"b", "b"}}},
        {"right", {"p", "a", "_", Move::r, "q"}, {"p", {"b"}, {"a"}}},
        {"right at the right end", {"p", "_", "a", Move::r, "q"}, {"p", {"a", "b"}, {}}},
    };
    for (const auto& k : cases) {
        CAPTURE(k.name);
        auto tm = single(k.t);
        auto g = compile(tm);
        auto h = config_graph(tm, {"p", "q", "acc"}, k.c.left, k.c.right, {"a"});
        auto r = guided_step(g, tm, h, k.t);
        auto dec = decode(tm, configuration_component(r.result));
        REQUIRE(dec.has_value());
        CHECK(dec->configuration == apply_transition(tm, k.c, k.t));
        CHECK(dec->configuration == oracle::tape_step(tm, k.c, k.t));
        CHECK(dec->adjunct == std::vector<std::string>{"a"});
        CHECK(is_isomorphic(replay(g, r.derivation), r.result));
    }
}

TEST_CASE("guided steps on random configurations") {
    TuringMachine tm = single({"p", "a", "a", Move::n, "q"});
    tm.delta.clear();
    for (auto f : {"p", "q"})
        for (auto x : {"a", "b", "_"})
            for (auto y : {"a", "b", "_"})
                for (Move d : {Move::l, Move::n, Move::r}) tm.delta.push_back({f, x, y, d, "q"});
    auto g = compile(tm);
    std::mt19937 rng(1);
    const std::vector<std::string> G{"a", "b", "_"};
    int runs = 0;
    for (int it = 0; it < 15; ++it) {
        std::vector<std::string> al, be;
        for (int k = static_cast<int>(rng() % 3); k > 0; --k) al.push_back(G[rng() % 3]);
        for (int k = static_cast<int>(rng() % 3); k > 0; --k) be.push_back(G[rng() % 3]);
        std::vector<std::string> sigma{"p", "q", "acc"};
        std::shuffle(sigma.begin(), sigma.end(), rng);
        if (sigma[0] == "acc") std::swap(sigma[0], sigma[1]);
        Configuration c{sigma[0], al, be};
        auto h = config_graph(tm, sigma, al, be, {"a"});
        auto ts = enabled(tm, c);
        for (std::size_t k = 0; k < ts.size(); k += 5) {
            auto r = guided_step(g, tm, h, ts[k]);
            auto dec = decode(tm, configuration_component(r.result));
            REQUIRE(dec.has_value());
            CHECK(dec->configuration == oracle::tape_step(tm, c, ts[k]));
            ++runs;
        }
    }
    CHECK(runs > 20);
}

TEST_CASE("tape derivations") {
    Encoding enc(oracle::fig2_machine());
    auto g = tape_generator_grammar(enc);
    for (const auto& w : std::vector<std::vector<std::string>>{{}, {"b", "a"}})
        for (int i : {0, 2})
            for (int j : {0, 1}) {
                auto d = tape_derivation(g, enc, w, i, j);
                std::vector<std::string> alpha(i, "_"), beta = w;
                beta.insert(beta.end(), j, "_");
                auto want = tape_graph(enc, alpha, beta, w);
                auto got = replay(g, d);
                auto comps = connected_components(got);
                bool found = false;
                for (const auto& c : comps) found = found || is_isomorphic(c, want);
                CHECK(found);
            }
}

TEST_CASE("acceptance derivations") {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    for (auto word : {"a", "ab", "abb"}) {
        auto w = split_word(word);
        auto run = accepts(tm, w, 100);
        REQUIRE(run.verdict == Verdict::accepted);
        auto d = acceptance_derivation(g, tm, w, run.run);
        CHECK(d.start == g.start);
        REQUIRE(std::holds_alternative<MultiplyStep>(d.steps.front()));
        auto members = generated_members(replay(g, d), g.alphabet);
        REQUIRE(members.size() == 1);
        CHECK(is_isomorphic(members[0], string_graph(w)));
    }
}

TEST_CASE("harness") {
    CHECK(words_upto({"a", "b"}, 2).size() == 7);
    CHECK(words_upto({"a"}, 0) == std::vector<std::vector<std::string>>{{}});
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    auto allowed = configuration_components(g);
    CHECK(allowed.size() == 576 + 4);
    CHECK(allowed.count("hg_init") == 0);
    auto c = check_word(g, tm, {"a", "b"});
    CHECK(c.status == CheckStatus::pass);
    CHECK(c.oracle == Verdict::accepted);
    auto r = check_word(g, tm, {"b"});
    CHECK(r.status == CheckStatus::pass);
    CHECK(r.exhausted);
}

// With every start component available, a second tape generator and a second
// machine copy can be fused into the dead configuration of a rejected word.
TEST_CASE("rejected word derivable from unrestricted components") {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    const std::vector<std::string> w{"b", "a"};
    REQUIRE(accepts(tm, w, 100).verdict == Verdict::rejected_halt);
    SearchOptions o;
    o.max_depth = 10;
    o.max_copies = 2;
    o.max_edges = 200;
    o.initial = config_graph(tm, initial_permutation(tm), {}, w, w);
    o.components = std::set<std::string>{"tape_|>", "blank_bar", "tape_start", "hg_init", "Acc",
                                         "C(_,b/_/r,2)", "C(_,a/c/r,3)"};
    auto r = bounded_search(g, o);
    bool spurious = false;
    for (const auto& m : r.members) spurious = spurious || is_isomorphic(m, string_graph(w));
    CHECK(spurious);

    o.components = configuration_components(g);
    o.max_depth = 25;
    auto ok = bounded_search(g, o);
    CHECK(ok.members.empty());
    CHECK(ok.exhausted());
}
