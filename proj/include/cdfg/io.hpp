#pragma once

#include <stdexcept>
#include <string>

#include <json.hpp>

#include "cdfg/engine.hpp"
#include "cdfg/hypergraph.hpp"
#include "cdfg/tm.hpp"

namespace cdfg {

using json = nlohmann::json;

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

json to_json(const Hypergraph& h);
Hypergraph graph_from_json(const json& j);

json to_json(const Alphabet& a);
Alphabet alphabet_from_json(const json& j);

json to_json(const Morphism& m);
Morphism morphism_from_json(const json& j);

// Rule cores are rebuilt from the label and the alphabet on load.
json to_json(const Grammar& g);
Grammar grammar_from_json(const json& j);

json to_json(const Derivation& d);
Derivation derivation_from_json(const json& j);

json to_json(const TuringMachine& tm);
TuringMachine machine_from_json(const json& j);

// Vertices are points, edges are boxes; tentacles are numbered sources first.
std::string to_dot(const Hypergraph& h, const std::string& name = "H");

std::string read_file(const std::string& path);
void write_file(const std::string& path, const std::string& text);

}  // namespace cdfg
