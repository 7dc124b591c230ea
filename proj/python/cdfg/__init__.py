from ._impl import (
    FormatError,
    GraphError,
    Grammar,
    ParseError,
    RuleError,
    TuringMachine,
    accepts,
    check_word,
    compile,
    is_isomorphic,
    load_grammar,
    parse_tm,
    read_string_graph,
    search_members,
    string_graph,
    tape_generator,
    to_dot,
)
