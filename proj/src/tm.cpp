#include "cdfg/tm.hpp"

#include <algorithm>
#include <deque>
#include <map>
#include <set>
#include <sstream>

namespace cdfg {

ParseError::ParseError(int line, const std::string& message)
    : std::runtime_error("line " + std::to_string(line) + ": " + message), line_(line) {}

std::string to_string(Move m) {
    switch (m) {
        case Move::l: return "l";
        case Move::n: return "n";
        case Move::r: return "r";
    }
    return "?";
}

std::string to_string(Verdict v) {
    switch (v) {
        case Verdict::accepted: return "accepted";
        case Verdict::rejected_halt: return "rejected_halt";
        case Verdict::bound_exceeded: return "bound_exceeded";
    }
    return "?";
}

void TuringMachine::validate() const {
    auto has = [](const std::vector<std::string>& xs, const std::string& x) {
        return std::find(xs.begin(), xs.end(), x) != xs.end();
    };
    auto unique = [](std::vector<std::string> xs) {
        std::sort(xs.begin(), xs.end());
        return std::adjacent_find(xs.begin(), xs.end()) == xs.end();
    };
    if (!unique(states)) throw std::invalid_argument("duplicate state");
    if (!unique(tape)) throw std::invalid_argument("duplicate tape symbol");
    if (!unique(input)) throw std::invalid_argument("duplicate input symbol");
    if (!has(states, start)) throw std::invalid_argument("start state " + start + " is not a state");
    if (!has(states, accept)) throw std::invalid_argument("accept state " + accept + " is not a state");
    if (start == accept) throw std::invalid_argument("start and accept state coincide");
    if (!has(tape, blank)) throw std::invalid_argument("blank is not a tape symbol");
    if (has(input, blank)) throw std::invalid_argument("blank is an input symbol");
    for (const auto& x : input)
        if (!has(tape, x)) throw std::invalid_argument("input symbol " + x + " is not a tape symbol");
    for (const auto& t : delta) {
        if (!has(states, t.from) || !has(states, t.to))
            throw std::invalid_argument("transition uses unknown state");
        if (t.from == accept) throw std::invalid_argument("transition leaves the accept state");
        if (!has(tape, t.read) || !has(tape, t.write))
            throw std::invalid_argument("transition uses unknown tape symbol");
    }
}

namespace {

const std::string& read_symbol(const TuringMachine& tm, const Configuration& c) {
    return c.right.empty() ? tm.blank : c.right.front();
}

}  // namespace

std::vector<Transition> enabled(const TuringMachine& tm, const Configuration& c) {
    std::vector<Transition> out;
    const auto& x = read_symbol(tm, c);
    for (const auto& t : tm.delta)
        if (t.from == c.state && t.read == x) out.push_back(t);
    return out;
}

Configuration apply_transition(const TuringMachine& tm, const Configuration& c, const Transition& t,
                               Semantics semantics) {
    Configuration next{t.to, c.left, c.right};
    const bool at_end = c.right.empty();
    if (at_end && t.read != tm.blank) throw std::invalid_argument("transition not enabled");
    if (!at_end && t.read != c.right.front()) throw std::invalid_argument("transition not enabled");
    std::vector<std::string> rest(c.right.begin() + (at_end ? 0 : 1), c.right.end());
    switch (t.move) {
        case Move::l:
            if (at_end && semantics == Semantics::literal) {
                next.right = {t.write};
                break;
            }
            next.right = {t.write};
            next.right.insert(next.right.end(), rest.begin(), rest.end());
            if (c.left.empty()) {
                next.right.insert(next.right.begin(), tm.blank);
            } else {
                next.right.insert(next.right.begin(), c.left.back());
                next.left.pop_back();
            }
            break;
        case Move::n:
            if (at_end && semantics == Semantics::literal) throw std::invalid_argument("transition not enabled");
            next.right = {t.write};
            next.right.insert(next.right.end(), rest.begin(), rest.end());
            break;
        case Move::r:
            next.left.push_back(t.write);
            next.right = rest;
            break;
    }
    return next;
}

std::vector<Configuration> step(const TuringMachine& tm, const Configuration& c, Semantics semantics) {
    std::vector<Configuration> out;
    for (const auto& t : enabled(tm, c)) {
        if (semantics == Semantics::literal && c.right.empty() && t.move == Move::n) continue;
        out.push_back(apply_transition(tm, c, t, semantics));
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

AcceptResult accepts(const TuringMachine& tm, const std::vector<std::string>& word, std::size_t step_bound,
                     Semantics semantics) {
    for (const auto& x : word)
        if (std::find(tm.input.begin(), tm.input.end(), x) == tm.input.end())
            throw std::invalid_argument("symbol " + x + " is not an input symbol");
    Configuration c0{tm.start, {}, word};
    std::map<Configuration, Configuration> parent;
    std::set<Configuration> seen{c0};
    std::deque<Configuration> queue{c0};
    AcceptResult result;
    auto witness = [&](Configuration c) {
        std::vector<Configuration> run{c};
        while (parent.count(c)) {
            c = parent.at(c);
            run.push_back(c);
        }
        std::reverse(run.begin(), run.end());
        return run;
    };
    if (c0.state == tm.accept) {
        result.verdict = Verdict::accepted;
        result.run = {c0};
        return result;
    }
    while (!queue.empty()) {
        if (result.explored >= step_bound) {
            result.verdict = Verdict::bound_exceeded;
            return result;
        }
        Configuration c = queue.front();
        queue.pop_front();
        ++result.explored;
        for (auto& n : step(tm, c, semantics)) {
            if (!seen.insert(n).second) continue;
            parent.emplace(n, c);
            if (n.state == tm.accept) {
                result.verdict = Verdict::accepted;
                result.run = witness(n);
                return result;
            }
            queue.push_back(std::move(n));
        }
    }
    result.verdict = Verdict::rejected_halt;
    return result;
}

std::vector<std::string> split_word(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string tok;
    bool spaced = text.find(' ') != std::string::npos;
    if (spaced) {
        while (in >> tok) out.push_back(tok);
    } else {
        for (char ch : text) out.emplace_back(1, ch);
    }
    return out;
}

TuringMachine parse_tm(const std::string& text) {
    TuringMachine tm;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    std::set<std::string> seen_keys;
    std::vector<std::pair<int, Transition>> pending;
    while (std::getline(in, line)) {
        ++lineno;
        if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        std::string key;
        if (!(ls >> key)) continue;
        if (key.back() != ':') throw ParseError(lineno, "expected 'key:' but found '" + key + "'");
        key.pop_back();
        std::vector<std::string> args;
        for (std::string a; ls >> a;) args.push_back(a);
        if (key != "delta" && !seen_keys.insert(key).second) throw ParseError(lineno, "duplicate key " + key);
        auto single = [&]() {
            if (args.size() != 1) throw ParseError(lineno, key + " expects exactly one name");
            return args.front();
        };
        if (key == "states") {
            tm.states = args;
        } else if (key == "start") {
            tm.start = single();
        } else if (key == "accept") {
            tm.accept = single();
        } else if (key == "input") {
            tm.input = args;
        } else if (key == "tape") {
            tm.tape = args;
        } else if (key == "blank") {
            tm.blank = single();
        } else if (key == "delta") {
            if (args.size() != 5) throw ParseError(lineno, "delta expects: from read write l|n|r to");
            Transition t{args[0], args[1], args[2], Move::n, args[4]};
            if (args[3] == "l") t.move = Move::l;
            else if (args[3] == "n") t.move = Move::n;
            else if (args[3] == "r") t.move = Move::r;
            else throw ParseError(lineno, "direction must be l, n or r, got " + args[3]);
            pending.emplace_back(lineno, t);
            tm.delta.push_back(t);
        } else {
            throw ParseError(lineno, "unknown key " + key);
        }
    }
    for (const char* k : {"states", "start", "accept", "input", "tape"})
        if (!seen_keys.count(k)) throw ParseError(lineno, std::string("missing key ") + k);
    TuringMachine bare = tm;
    bare.delta.clear();
    try {
        bare.validate();
    } catch (const std::invalid_argument& e) {
        throw ParseError(lineno, e.what());
    }
    for (const auto& [ln, t] : pending) {
        bare.delta = {t};
        try {
            bare.validate();
        } catch (const std::invalid_argument& e) {
            throw ParseError(ln, e.what());
        }
    }
    return tm;
}

std::string format_tm(const TuringMachine& tm) {
    std::ostringstream out;
    auto list = [&](const char* key, const std::vector<std::string>& xs) {
        out << key << ":";
        for (const auto& x : xs) out << ' ' << x;
        out << '\n';
    };
    list("states", tm.states);
    out << "start: " << tm.start << "\naccept: " << tm.accept << '\n';
    list("input", tm.input);
    list("tape", tm.tape);
    if (tm.blank != "_") out << "blank: " << tm.blank << '\n';
    for (const auto& t : tm.delta)
        out << "delta: " << t.from << ' ' << t.read << ' ' << t.write << ' ' << to_string(t.move) << ' ' << t.to
            << '\n';
    return out.str();
}

std::string format_configuration(const Configuration& c) {
    auto word = [](const std::vector<std::string>& w) {
        if (w.empty()) return std::string("eps");
        std::string s;
        for (std::size_t i = 0; i < w.size(); ++i) s += (i ? " " : "") + w[i];
        return s;
    };
    return "(" + c.state + ", " + word(c.left) + ", " + word(c.right) + ")";
}

}  // namespace cdfg
