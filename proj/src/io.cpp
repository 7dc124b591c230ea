#include "cdfg/io.hpp"

#include <fstream>
#include <sstream>

namespace cdfg {

namespace {

template <typename T>
T field(const json& j, const char* key) {
    if (!j.is_object() || !j.contains(key)) throw FormatError(std::string("missing field '") + key + "'");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw FormatError(std::string("field '") + key + "': " + e.what());
    }
}

std::string dot_quote(const std::string& s) {
    std::string out = "\"";
    for (char c : s) {
        if (c == '"' || c == '\\') out += '\\';
        out += c;
    }
    return out + "\"";
}

}  // namespace

json to_json(const Hypergraph& h) {
    json edges = json::array();
    for (const auto& e : h.edges()) edges.push_back({{"id", e.id}, {"label", e.label}, {"src", e.src}, {"tgt", e.tgt}});
    return {{"vertices", h.vertices()}, {"edges", edges}};
}

Hypergraph graph_from_json(const json& j) {
    auto vertices = field<std::vector<VertexId>>(j, "vertices");
    std::vector<Edge> edges;
    for (const auto& e : field<json>(j, "edges"))
        edges.push_back({field<EdgeId>(e, "id"), field<std::string>(e, "label"),
                         field<std::vector<VertexId>>(e, "src"), field<std::vector<VertexId>>(e, "tgt")});
    try {
        return Hypergraph(std::move(vertices), std::move(edges));
    } catch (const GraphError& e) {
        throw FormatError(e.what());
    }
}

json to_json(const Alphabet& a) {
    json fusion = json::array();
    for (const auto& n : a.fusion_names()) {
        auto t = a.type(n);
        fusion.push_back({{"name", n}, {"complement", a.partner(n)}, {"type", {t.k1, t.k2}}});
    }
    return {{"fusion", fusion}, {"markers", a.names_of(LabelKind::marker)},
            {"terminals", a.names_of(LabelKind::terminal)}};
}

Alphabet alphabet_from_json(const json& j) {
    Alphabet a;
    try {
        for (const auto& f : field<json>(j, "fusion")) {
            auto t = field<std::vector<int>>(f, "type");
            if (t.size() != 2) throw FormatError("fusion type must be [k1, k2]");
            a.add_fusion(field<std::string>(f, "name"), field<std::string>(f, "complement"), {t[0], t[1]});
        }
        for (const auto& m : field<std::vector<std::string>>(j, "markers")) a.add_marker(m);
        for (const auto& t : field<std::vector<std::string>>(j, "terminals")) a.add_terminal(t);
    } catch (const GraphError& e) {
        throw FormatError(e.what());
    }
    return a;
}

json to_json(const Morphism& m) {
    json vs = json::array(), es = json::array();
    for (auto [a, b] : m.vmap) vs.push_back({a, b});
    for (auto [a, b] : m.emap) es.push_back({a, b});
    return {{"vertices", vs}, {"edges", es}};
}

Morphism morphism_from_json(const json& j) {
    Morphism m;
    for (const auto& p : field<std::vector<std::pair<int, int>>>(j, "vertices")) m.vmap[p.first] = p.second;
    for (const auto& p : field<std::vector<std::pair<int, int>>>(j, "edges")) m.emap[p.first] = p.second;
    return m;
}

namespace {

json context_json(const Context& c) { return {{"name", c.name}, {"graph", to_json(c.graph)}, {"anchor", to_json(c.anchor)}}; }

Context context_from_json(const json& j) {
    return {field<std::string>(j, "name"), graph_from_json(field<json>(j, "graph")),
            morphism_from_json(field<json>(j, "anchor"))};
}

}  // namespace

json to_json(const Grammar& g) {
    json rules = json::array();
    for (const auto& r : g.rules) {
        json pos = json::array(), neg = json::array();
        for (const auto& c : r.positive) pos.push_back(context_json(c));
        for (const auto& c : r.negative) neg.push_back(context_json(c));
        rules.push_back({{"name", r.name}, {"label", r.core.label}, {"positive_any", r.positive_any},
                         {"positive", pos}, {"negative", neg}});
    }
    return {{"alphabet", to_json(g.alphabet)}, {"start", to_json(g.start)},
            {"component_names", g.component_names}, {"rules", rules}};
}

Grammar grammar_from_json(const json& j) {
    Grammar g;
    g.alphabet = alphabet_from_json(field<json>(j, "alphabet"));
    g.start = graph_from_json(field<json>(j, "start"));
    if (j.contains("component_names")) g.component_names = field<std::vector<std::string>>(j, "component_names");
    for (const auto& r : field<json>(j, "rules")) {
        ContextDependentFusionRule rule;
        rule.name = field<std::string>(r, "name");
        try {
            rule.core = make_fusion_rule(field<std::string>(r, "label"), g.alphabet);
        } catch (const RuleError& e) {
            throw FormatError(rule.name + ": " + e.what());
        }
        if (r.contains("positive_any")) rule.positive_any = field<bool>(r, "positive_any");
        for (const auto& c : field<json>(r, "positive")) rule.positive.push_back(context_from_json(c));
        for (const auto& c : field<json>(r, "negative")) rule.negative.push_back(context_from_json(c));
        g.rules.push_back(std::move(rule));
    }
    try {
        validate_grammar(g);
    } catch (const std::exception& e) {
        throw FormatError(e.what());
    }
    return g;
}

json to_json(const Derivation& d) {
    json steps = json::array();
    for (const auto& s : d.steps) {
        if (const auto* m = std::get_if<MultiplyStep>(&s))
            steps.push_back({{"multiply", m->multiplicity}});
        else {
            const auto& a = std::get<ApplyStep>(s);
            steps.push_back({{"rule", a.rule}, {"match", to_json(a.match)}});
        }
    }
    return {{"start", to_json(d.start)}, {"steps", steps}};
}

Derivation derivation_from_json(const json& j) {
    Derivation d;
    d.start = graph_from_json(field<json>(j, "start"));
    for (const auto& s : field<json>(j, "steps")) {
        if (s.contains("multiply"))
            d.steps.push_back(MultiplyStep{field<std::vector<int>>(s, "multiply")});
        else
            d.steps.push_back(ApplyStep{field<std::string>(s, "rule"), morphism_from_json(field<json>(s, "match"))});
    }
    return d;
}

json to_json(const TuringMachine& tm) {
    json delta = json::array();
    for (const auto& t : tm.delta) delta.push_back({t.from, t.read, t.write, to_string(t.move), t.to});
    return {{"states", tm.states}, {"start", tm.start}, {"accept", tm.accept}, {"input", tm.input},
            {"tape", tm.tape},     {"blank", tm.blank}, {"delta", delta}};
}

TuringMachine machine_from_json(const json& j) {
    TuringMachine tm;
    tm.states = field<std::vector<std::string>>(j, "states");
    tm.start = field<std::string>(j, "start");
    tm.accept = field<std::string>(j, "accept");
    tm.input = field<std::vector<std::string>>(j, "input");
    tm.tape = field<std::vector<std::string>>(j, "tape");
    if (j.contains("blank")) tm.blank = field<std::string>(j, "blank");
    for (const auto& t : field<std::vector<std::vector<std::string>>>(j, "delta")) {
        if (t.size() != 5) throw FormatError("transition needs five entries");
        Move m;
        if (t[3] == "l") m = Move::l;
        else if (t[3] == "n") m = Move::n;
        else if (t[3] == "r") m = Move::r;
        else throw FormatError("bad direction " + t[3]);
        tm.delta.push_back({t[0], t[1], t[2], m, t[4]});
    }
    try {
        tm.validate();
    } catch (const std::invalid_argument& e) {
        throw FormatError(e.what());
    }
    return tm;
}

std::string to_dot(const Hypergraph& h, const std::string& name) {
    std::ostringstream out;
    out << "digraph " << dot_quote(name) << " {\n  rankdir=LR;\n";
    for (VertexId v : h.vertices()) out << "  v" << v << " [shape=point, width=0.08];\n";
    for (const auto& e : h.edges()) {
        out << "  e" << e.id << " [shape=box, label=" << dot_quote(e.label) << "];\n";
        const bool numbered = e.src.size() + e.tgt.size() > 2;
        int k = 0;
        for (VertexId v : e.src) {
            out << "  v" << v << " -> e" << e.id << " [arrowhead=none";
            if (numbered) out << ", label=\"" << ++k << "\"";
            out << "];\n";
        }
        for (VertexId v : e.tgt) {
            out << "  e" << e.id << " -> v" << v;
            if (numbered) out << " [label=\"" << ++k << "\"]";
            out << ";\n";
        }
    }
    out << "}\n";
    return out.str();
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot read " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot write " + path);
    out << text;
}

}  // namespace cdfg
