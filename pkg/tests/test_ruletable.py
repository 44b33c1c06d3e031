import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cifly import causal
from cifly.errors import TableSyntaxError
from cifly.ruletable import (
    And,
    CasePattern,
    EdgeSignature,
    Literal,
    Membership,
    Not,
    Or,
    OrderedEdge,
    OutputSpec,
    Rule,
    RuleTable,
    StartSpec,
    UnorderedEdge,
    format_rule_table,
    parse_rule_table,
    validate_rule_table,
)

from malformed import MALFORMED_TABLES

ADMG_DSEP_TEXT = """\
EDGES  --> <--, <->
SETS   X, Z
START  <-- AT X
OUTPUT ...

-->, <-> | <--, <-> | current in Z
...      | ...      | current not in Z
"""


def test_parse_admg_dsep_structure():
    table = parse_rule_table(ADMG_DSEP_TEXT)
    assert table.signature == EdgeSignature(
        (OrderedEdge("-->", "<--"), UnorderedEdge("<->")))
    assert table.sets == ("X", "Z")
    assert table.colors is None
    assert table.starts[0].symbol == "X"
    assert table.starts[0].neighbor_types == ("<--",)
    assert table.outputs[0].neighbor_types is None
    assert len(table.rules) == 2
    first, second = table.rules
    assert first.current == CasePattern(("-->", "<->"))
    assert first.next == CasePattern(("<--", "<->"))
    assert first.expr == Membership("current", False, "Z")
    assert second.current == CasePattern(None)
    assert second.expr == Membership("current", True, "Z")


def test_parse_colored_optimal_iv_table():
    table = causal.table("iv_optimal")
    assert table.colors == ("p", "y")
    assert table.sets == ("S", "A", "B")
    assert len(table.rules) == 3
    start = table.starts[0]
    assert (start.neighbor_types, start.colors, start.symbol) == (("<--",), ("p",), "S")
    assert table.outputs[0].colors == ("y",)
    assert table.outputs[0].neighbor_types is None


def test_parse_color_wildcard_brackets():
    table = causal.table("iv_non_causal")
    # the first two rules use an explicit [...] color wildcard
    assert table.rules[0].current == CasePattern(("-->", "<->"), None)
    assert table.rules[0].next == CasePattern(("<--", "<->"), ("non-causal",))


@pytest.mark.parametrize("name", sorted(causal.TABLE_CATALOG))
def test_bundled_round_trip(name):
    table = causal.table(name)
    assert parse_rule_table(format_rule_table(table)) == table


@pytest.mark.parametrize("name", sorted(causal.TABLE_CATALOG))
def test_bundled_tables_clean(name):
    assert validate_rule_table(causal.table(name)) == []


def test_minimal_table_formats_to_five_lines():
    table = RuleTable(
        signature=EdgeSignature((UnorderedEdge("---"),)),
        colors=None,
        sets=("X",),
        starts=(StartSpec(("---",), None, "X"),),
        outputs=(OutputSpec(None, None),),
        rules=(Rule(CasePattern(None), CasePattern(None), Literal(True)),),
    )
    text = format_rule_table(table)
    # EDGES, SETS, START, OUTPUT, blank, one rule
    assert [line.split()[0] for line in text.splitlines() if line] == [
        "EDGES", "SETS", "START", "OUTPUT", "..."]
    assert parse_rule_table(text) == table


def test_compound_expression_round_trip():
    text = """\
EDGES  --> <--, <->
COLORS non-causal, causal-end
SETS   Z, X, W
START  <-- [non-causal] AT Z
OUTPUT ... [non-causal]

...  [non-causal] | --> [non-causal] | current not in W and current not in X
...  [non-causal] | --> [causal-end] | current in X or (true and not next in Z)
"""
    table = parse_rule_table(text)
    expr = table.rules[1].expr
    assert expr == Or(Membership("current", False, "X"),
                      And(Literal(True), Not(Membership("next", False, "Z"))))
    assert parse_rule_table(format_rule_table(table)) == table


def test_expression_precedence():
    text = ADMG_DSEP_TEXT.replace(
        "current not in Z",
        "current in X or current in Z and not next in X")
    expr = parse_rule_table(text).rules[1].expr
    assert expr == Or(Membership("current", False, "X"),
                      And(Membership("current", False, "Z"),
                          Not(Membership("next", False, "X"))))


def test_parse_is_deterministic():
    assert parse_rule_table(ADMG_DSEP_TEXT) == parse_rule_table(ADMG_DSEP_TEXT)


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_comment_and_blank_line_insensitivity(data):
    lines = ADMG_DSEP_TEXT.splitlines()
    expected = parse_rule_table(ADMG_DSEP_TEXT)
    inserts = data.draw(st.lists(
        st.tuples(st.integers(0, len(lines)),
                  st.sampled_from(["", "   ", "# a comment", "  # another"])),
        max_size=6))
    mutated = list(lines)
    for pos, text in sorted(inserts, reverse=True):
        mutated.insert(pos, text)
    suffix = data.draw(st.sampled_from(["", "  # trailing comment"]))
    mutated = [line + (suffix if line.strip() else "") for line in mutated]
    assert parse_rule_table("\n".join(mutated) + "\n") == expected


@pytest.mark.parametrize(
    "name,text,error,line",
    MALFORMED_TABLES,
    ids=[case[0] for case in MALFORMED_TABLES])
def test_malformed_tables(name, text, error, line):
    with pytest.raises(error) as excinfo:
        parse_rule_table(text)
    assert excinfo.value.line == line


def test_validate_reports_shadowed_rule():
    text = ADMG_DSEP_TEXT + "-->, <-> | <--, <-> | current not in Z\n"
    diagnostics = validate_rule_table(parse_rule_table(text))
    assert [d.kind for d in diagnostics] == ["ShadowedRule"]
    assert diagnostics[0].index == 2


def test_validate_reports_unproducible_color():
    text = """\
EDGES  --> <--
COLORS a, b
SETS   X
START  <-- [a] AT X
OUTPUT ... [a]

--> [a] | <-- [a] | true
"""
    diagnostics = validate_rule_table(parse_rule_table(text))
    assert [d.kind for d in diagnostics] == ["UnproducibleColor"]
    assert diagnostics[0].symbol == "b"


def test_validate_reports_unmatchable_output():
    text = """\
EDGES  --> <--
COLORS a, b
SETS   X
START  <-- [a] AT X
OUTPUT ... [b]

--> [a] | <-- [a] | true
"""
    diagnostics = validate_rule_table(parse_rule_table(text))
    kinds = {d.kind for d in diagnostics}
    assert "UnmatchableOutput" in kinds and "UnproducibleColor" in kinds


def test_multiple_start_and_output_lines_union():
    text = """\
EDGES  --> <--
SETS   X, Z
START  <-- AT X
START  --> AT Z
OUTPUT -->
OUTPUT <--

... | ... | true
"""
    table = parse_rule_table(text)
    assert len(table.starts) == 2
    assert len(table.outputs) == 2


def test_exotic_neighbor_type_tokens_round_trip():
    text = """\
EDGES  o(x) x)o, (=)
SETS   X
START  x)o AT X
OUTPUT (=)

o(x), (=) | x)o | current in X
"""
    table = parse_rule_table(text)
    assert table.signature == EdgeSignature(
        (OrderedEdge("o(x)", "x)o"), UnorderedEdge("(=)")))
    assert parse_rule_table(format_rule_table(table)) == table


def test_parenthesized_set_symbol_rejected():
    text = "EDGES --> <--\nSETS X(1)\nSTART <-- AT X(1)\nOUTPUT ...\n"
    with pytest.raises(TableSyntaxError):
        parse_rule_table(text)
