#include <doctest.h>

#include <filesystem>

#include "cdfg/io.hpp"
#include "cdfg/transform.hpp"
#include "oracles.hpp"

using namespace cdfg;

TEST_CASE("graph json round trip") {
    std::mt19937 rng(8);
    for (int it = 0; it < 50; ++it) {
        auto h = oracle::scramble(rng, oracle::random_graph(rng, 4, 5, {"a", "b"}));
        auto j = to_json(h);
        CHECK(graph_from_json(j) == h);
        CHECK(graph_from_json(json::parse(j.dump())) == h);
    }
    auto j = json::parse(R"({"vertices":[0,1],"edges":[{"id":0,"label":"a","src":[0],"tgt":[1]}]})");
    CHECK(graph_from_json(j) == string_graph({"a"}));
}

TEST_CASE("malformed json") {
    CHECK_THROWS_AS(graph_from_json(json::parse(R"({"vertices":[0]})")), FormatError);
    CHECK_THROWS_AS(graph_from_json(json::parse(R"({"vertices":[0],"edges":[{"id":0,"label":"a","src":[3],"tgt":[]}]})")),
                    FormatError);
    CHECK_THROWS_AS(graph_from_json(json::parse(R"({"vertices":"x","edges":[]})")), FormatError);
    CHECK_THROWS_AS(alphabet_from_json(json::parse(R"({"fusion":[{"name":"A","complement":"~A","type":[1]}],"markers":[],"terminals":[]})")),
                    FormatError);
    CHECK_THROWS_AS(read_file("/nonexistent/file"), FormatError);
}

TEST_CASE("alphabet json round trip") {
    Alphabet a = compile(oracle::fig2_machine()).alphabet;
    CHECK(alphabet_from_json(to_json(a)) == a);
}

TEST_CASE("grammar json round trip") {
    auto g = compile(oracle::fig2_machine());
    auto j = to_json(g);
    auto back = grammar_from_json(json::parse(j.dump()));
    CHECK(to_json(back) == j);
    CHECK(back.start == g.start);
    CHECK(back.component_names == g.component_names);
    REQUIRE(back.rules.size() == g.rules.size());
    for (std::size_t i = 0; i < g.rules.size(); ++i) {
        CHECK(back.rules[i].core.graph == g.rules[i].core.graph);
        CHECK(back.rules[i].positive_any == g.rules[i].positive_any);
        CHECK(back.rules[i].positive.size() == g.rules[i].positive.size());
    }
}

TEST_CASE("derivation json round trip") {
    auto tm = oracle::fig2_machine();
    auto g = compile(tm);
    auto run = accepts(tm, {"a"}, 100);
    auto d = acceptance_derivation(g, tm, {"a"}, run.run);
    auto back = derivation_from_json(json::parse(to_json(d).dump()));
    CHECK(back == d);
    CHECK(replay(g, back) == replay(g, d));
}

TEST_CASE("machine json round trip") {
    auto tm = oracle::fig2_machine();
    CHECK(machine_from_json(to_json(tm)) == tm);
    auto j = to_json(tm);
    j["delta"][0][3] = "up";
    CHECK_THROWS_AS(machine_from_json(j), FormatError);
}

TEST_CASE("dot export") {
    auto dot = to_dot(string_graph({"a", "b"}), "sg");
    auto count = [&](const std::string& s) {
        std::size_t n = 0;
        for (auto p = dot.find(s); p != std::string::npos; p = dot.find(s, p + 1)) ++n;
        return n;
    };
    CHECK(count("shape=point") == 3);
    CHECK(count("shape=box") == 2);
    CHECK(count("->") == 4);
    CHECK(to_dot(string_graph({"a", "b"}), "sg") == dot);

    // tentacles are numbered on hyperedges
    Hypergraph h({0, 1, 2}, {{0, "head", {0, 1}, {2}}});
    auto hd = to_dot(h);
    CHECK(hd.find("label=\"3\"") != std::string::npos);
    CHECK(to_dot(Hypergraph({}, {{0, "q\"x", {}, {}}})).find("q\\\"x") != std::string::npos);
}

TEST_CASE("file helpers") {
    auto path = (std::filesystem::temp_directory_path() / "cdfg_io_test.json").string();
    write_file(path, to_json(string_graph({"a"})).dump());
    CHECK(graph_from_json(json::parse(read_file(path))) == string_graph({"a"}));
    std::filesystem::remove(path);
}
