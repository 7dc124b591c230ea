#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace cdfg {

class ParseError : public std::runtime_error {
public:
    ParseError(int line, const std::string& message);
    int line() const { return line_; }

private:
    int line_;
};

enum class Move { l, n, r };

struct Transition {
    std::string from;
    std::string read;
    std::string write;
    Move move = Move::n;
    std::string to;
    bool operator==(const Transition&) const = default;
};

struct TuringMachine {
    std::vector<std::string> states;
    std::string start;
    std::string accept;
    std::vector<std::string> input;
    std::vector<std::string> tape;  // includes the blank
    std::string blank = "_";
    std::vector<Transition> delta;

    // Throws std::invalid_argument describing the first violation.
    void validate() const;
    bool operator==(const TuringMachine&) const = default;
};

struct Configuration {
    std::string state;
    std::vector<std::string> left;
    std::vector<std::string> right;
    auto operator<=>(const Configuration&) const = default;
};

// literal: the six displayed step cases only. blank_extended: an empty right word
// reads as one blank for every direction, which is what the grammar simulates.
enum class Semantics { blank_extended, literal };

std::vector<Configuration> step(const TuringMachine& tm, const Configuration& c,
                                Semantics semantics = Semantics::blank_extended);
Configuration apply_transition(const TuringMachine& tm, const Configuration& c, const Transition& t,
                               Semantics semantics = Semantics::blank_extended);
// Transitions enabled in c, in declaration order.
std::vector<Transition> enabled(const TuringMachine& tm, const Configuration& c);

enum class Verdict { accepted, rejected_halt, bound_exceeded };
std::string to_string(Verdict v);

struct AcceptResult {
    Verdict verdict = Verdict::bound_exceeded;
    std::vector<Configuration> run;  // witness run when accepted
    std::size_t explored = 0;
};

AcceptResult accepts(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t step_bound,
                     Semantics semantics = Semantics::blank_extended);

TuringMachine parse_tm(const std::string& text);
std::string format_tm(const TuringMachine& tm);
std::string format_configuration(const Configuration& c);
std::string to_string(Move m);
std::vector<std::string> split_word(const std::string& text);

}  // namespace cdfg
