#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "cdfg/engine.hpp"
#include "cdfg/hypergraph.hpp"
#include "cdfg/tm.hpp"

namespace cdfg {

namespace names {
inline const std::string head = "head";
inline const std::string gen = "gen";
inline const std::string cut = "cut";
inline const std::string tape = "tape";
inline const std::string begin = "|>";
inline const std::string end = "<|";
inline const std::string marker = "mu";
inline const std::string term = "term";
inline const std::string acc = "acc";
}  // namespace names

std::string complement_of(const std::string& label);

// x -> x° for input symbols, x itself for the other tape symbols.
class Encoding {
public:
    explicit Encoding(const TuringMachine& tm);

    const TuringMachine& machine() const { return tm_; }
    std::string f(const std::string& x) const;
    std::optional<std::string> decode(const std::string& label) const;
    std::vector<std::string> f(const std::vector<std::string>& word) const;
    static std::string lambda(const std::string& x, const std::string& y, Move d);
    static std::string lambda(const Transition& t) { return lambda(t.read, t.write, t.move); }
    // every x/y/d over the tape alphabet
    std::vector<std::string> all_lambdas() const;

private:
    TuringMachine tm_;
};

Alphabet tape_generator_alphabet(const Encoding& enc);
Alphabet machine_alphabet(const Encoding& enc);

Hypergraph hg_tm(const TuringMachine& tm, const std::vector<std::string>& sigma);
Hypergraph tape_graph(const Encoding& enc, const std::vector<std::string>& alpha,
                      const std::vector<std::string>& beta, const std::vector<std::string>& w);
// hg(TM, sigma) + tg(alpha, beta, w) fused along tape.
Hypergraph config_graph(const TuringMachine& tm, const std::vector<std::string>& sigma,
                        const std::vector<std::string>& alpha, const std::vector<std::string>& beta,
                        const std::vector<std::string>& w);
std::vector<std::string> initial_permutation(const TuringMachine& tm);

// Start components. Edge order is fixed and documented per builder.
Hypergraph tape_start_component(const Encoding& enc);        // tape, gen, cut, |>, mu
Hypergraph tape_symbol_component(const Encoding& enc, const std::string& x);  // x°, gen, ~gen, x
Hypergraph tape_end_component(const Encoding& enc);          // ~gen, <|
Hypergraph tape_begin_extension(const Encoding& enc);        // _, |>, ~|>
Hypergraph tape_end_extension(const Encoding& enc);          // _, <|, ~<|
Hypergraph cut_complement_component();                       // ~cut
Hypergraph blank_complement_component(const Encoding& enc);  // ~_, |>
Hypergraph acc_component(const TuringMachine& tm);           // term, ~head, ~cut
// C(u, x/y/d, i), i is 1-based. Edge order: head, ~head, then
// l: ~u, u, ~x, y   n: ~x, y   r: ~x, u, ~u, y
Hypergraph step_component(const Encoding& enc, const std::string& u, const std::string& x,
                          const std::string& y, Move d, int i);

Grammar tape_generator_grammar(const Encoding& enc, bool with_cut = false);

std::vector<ContextDependentFusionRule> delta_rules(const Encoding& enc);
ContextDependentFusionRule accept_rule(const Encoding& enc);
ContextDependentFusionRule cut_rule(const Encoding& enc);
ContextDependentFusionRule shrink_rule(const Encoding& enc);

Grammar compile(const TuringMachine& tm);

std::string step_component_name(const std::string& u, const std::string& lambda, int i);

struct DecodedConfiguration {
    Configuration configuration;
    std::vector<std::string> sigma;
    std::vector<std::string> adjunct;
};

// Inverse of config_graph on a single connected component; nullopt if h is not one.
std::optional<DecodedConfiguration> decode(const TuringMachine& tm, const Hypergraph& h);

// Supplies fresh copies of named start components to a working graph.
class ComponentSource {
public:
    virtual ~ComponentSource() = default;
    // Adds a copy of the named component; returns its edge ids in component edge order.
    virtual std::vector<EdgeId> take(Hypergraph& work, const std::string& name) = 0;
};

// Builds each requested component and unions it into the working graph.
class FreshComponents : public ComponentSource {
public:
    explicit FreshComponents(const Grammar& grammar);
    std::vector<EdgeId> take(Hypergraph& work, const std::string& name) override;
    const std::vector<std::string>& requests() const { return requests_; }

private:
    std::vector<Hypergraph> catalog_;
    const Grammar& grammar_;
    std::vector<std::string> requests_;
};

struct GuidedResult {
    Derivation derivation;
    Hypergraph result;
};

class GuidedExecutor {
public:
    GuidedExecutor(const Grammar& grammar, const TuringMachine& tm, Hypergraph work, ComponentSource& source);

    const Hypergraph& graph() const { return work_; }
    const std::vector<Step>& steps() const { return steps_; }

    EdgeId config_head() const;
    // One transition of the machine; throws RuleError if t is not enabled.
    void step(const Transition& t);
    void accept();
    void apply(const std::string& rule, EdgeId e, EdgeId e_bar);
    std::vector<EdgeId> take(const std::string& name) { return source_.take(work_, name); }

private:
    const Grammar& grammar_;
    TuringMachine tm_;
    Encoding enc_;
    Hypergraph work_;
    ComponentSource& source_;
    std::vector<Step> steps_;
};

// Runs one transition on a configuration graph plus freshly supplied components.
GuidedResult guided_step(const Grammar& grammar, const TuringMachine& tm, const Hypergraph& config,
                         const Transition& t);
GuidedResult guided_accept(const Grammar& grammar, const TuringMachine& tm, const Hypergraph& config);

// Derivation from the start graph of tape_generator_grammar: tg(blank^i, w blank^j, w)_tape.
Derivation tape_derivation(const Grammar& tg_grammar, const Encoding& enc, const std::vector<std::string>& w,
                           int i, int j);

// Complete derivation Z => m Z => ... => sg(w)_mu for an accepting run of the oracle.
Derivation acceptance_derivation(const Grammar& grammar, const TuringMachine& tm,
                                 const std::vector<std::string>& w, const std::vector<Configuration>& run);

// The component that carries the configuration head edge.
Hypergraph configuration_component(const Hypergraph& h);

}  // namespace cdfg
