#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "cdfg/harness.hpp"
#include "cdfg/io.hpp"
#include "cdfg/transform.hpp"

namespace py = pybind11;
using namespace cdfg;

namespace {

Hypergraph graph_arg(const std::string& text) { return graph_from_json(json::parse(text)); }

py::tuple configuration(const Configuration& c) { return py::make_tuple(c.state, c.left, c.right); }

}  // namespace

PYBIND11_MODULE(_impl, m) {
    m.doc() = "context-dependent fusion grammars for Turing machines";

    py::class_<TuringMachine>(m, "TuringMachine")
        .def_readonly("states", &TuringMachine::states)
        .def_readonly("start", &TuringMachine::start)
        .def_readonly("accept", &TuringMachine::accept)
        .def_readonly("input", &TuringMachine::input)
        .def_readonly("tape", &TuringMachine::tape)
        .def("__str__", &format_tm);

    py::class_<Grammar>(m, "Grammar")
        .def_property_readonly("component_count", [](const Grammar& g) { return connected_components(g.start).size(); })
        .def_property_readonly("component_names", [](const Grammar& g) { return g.component_names; })
        .def_property_readonly("rule_names",
                               [](const Grammar& g) {
                                   std::vector<std::string> out;
                                   for (const auto& r : g.rules) out.push_back(r.name);
                                   return out;
                               })
        .def("to_json", [](const Grammar& g) { return to_json(g).dump(); });

    m.def("parse_tm", &parse_tm, py::arg("text"));
    m.def("load_grammar", [](const std::string& text) { return grammar_from_json(json::parse(text)); });
    m.def("compile", &compile, py::arg("tm"));
    m.def("tape_generator", [](const TuringMachine& tm, bool cut) { return tape_generator_grammar(Encoding(tm), cut); },
          py::arg("tm"), py::arg("with_cut") = false);

    m.def(
        "accepts",
        [](const TuringMachine& tm, const std::string& word, std::size_t bound) {
            auto r = accepts(tm, split_word(word), bound);
            py::list run;
            for (const auto& c : r.run) run.append(configuration(c));
            return py::make_tuple(to_string(r.verdict), run);
        },
        py::arg("tm"), py::arg("word"), py::arg("max_steps") = 1000);

    m.def(
        "check_word",
        [](const Grammar& g, const TuringMachine& tm, const std::string& word, int max_depth) {
            CheckOptions o;
            o.max_depth = max_depth;
            auto c = check_word(g, tm, split_word(word), o);
            py::dict d;
            d["oracle"] = to_string(c.oracle);
            d["status"] = to_string(c.status);
            d["detail"] = c.detail;
            d["states"] = c.states;
            return d;
        },
        py::arg("grammar"), py::arg("tm"), py::arg("word"), py::arg("max_depth") = 25);

    m.def(
        "search_members",
        [](const Grammar& g, int depth, int edges, int copies) {
            SearchOptions o;
            o.max_depth = depth;
            o.max_edges = edges;
            o.max_copies = copies;
            auto r = bounded_search(g, o);
            std::vector<std::string> out;
            for (const auto& x : r.members) out.push_back(to_json(x).dump());
            return py::make_tuple(out, r.exhausted(), r.state_cap_hit);
        },
        py::arg("grammar"), py::arg("max_depth") = 10, py::arg("max_edges") = 30, py::arg("max_copies") = 2);

    m.def("string_graph", [](const std::string& word) { return to_json(string_graph(split_word(word))).dump(); });
    m.def("read_string_graph", [](const std::string& g) -> std::optional<std::vector<std::string>> {
        return read_string_graph(graph_arg(g));
    });
    m.def("is_isomorphic", [](const std::string& a, const std::string& b) {
        return is_isomorphic(graph_arg(a), graph_arg(b));
    });
    m.def("to_dot", [](const std::string& g, const std::string& name) { return to_dot(graph_arg(g), name); },
          py::arg("graph"), py::arg("name") = "H");

    py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
    py::register_exception<FormatError>(m, "FormatError", PyExc_ValueError);
    py::register_exception<GraphError>(m, "GraphError", PyExc_ValueError);
    py::register_exception<RuleError>(m, "RuleError", PyExc_RuntimeError);
}
