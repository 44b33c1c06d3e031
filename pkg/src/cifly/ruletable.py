"""Parsing, validation and printing of rule-table text files.

A rule table is a small text format with a header of directives followed
by transition rules::

    EDGES  --> <--, <->
    SETS   X, Z
    START  <-- AT X
    OUTPUT ...

    -->, <-> | <--, <-> | current in Z
    ...      | ...      | current not in Z

Directives declare the edge signature, the optional color palette, the
set symbols and the start/output specifications.  Each rule has two case
columns (current and next state patterns) and an expression column; the
first rule whose cases match a transition decides whether it exists.

``parse_rule_table`` is total over this grammar and raises a typed error
naming the offending line otherwise.  Parsed tables are immutable and
hashable, so downstream compilation caches can key on them directly.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Iterable, Optional, Union

from .errors import (
    ColorUsageError,
    DuplicateDirectiveError,
    MissingDirectiveError,
    TableSyntaxError,
    UnknownSymbolError,
)

__all__ = [
    "OrderedEdge",
    "UnorderedEdge",
    "EdgeSignature",
    "Membership",
    "Literal",
    "Not",
    "And",
    "Or",
    "CasePattern",
    "Rule",
    "StartSpec",
    "OutputSpec",
    "RuleTable",
    "Diagnostic",
    "parse_rule_table",
    "format_rule_table",
    "validate_rule_table",
]

_DIRECTIVES = ("EDGES", "COLORS", "SETS", "START", "OUTPUT")

# Words with a fixed meaning in expressions or directives; rejecting them
# as set/color names keeps the expression grammar unambiguous.
_RESERVED = frozenset(
    {"current", "next", "in", "not", "and", "or", "true", "false", "AT", *_DIRECTIVES}
)

# Neighbor-type tokens admit any glyphs outside the structural characters;
# identifiers (set symbols, colors) additionally exclude parentheses since
# set symbols appear inside expressions where parens delimit grouping.
_TOKEN_RE = re.compile(r"^[^\s,|\[\]#]+$")
_IDENT_RE = re.compile(r"^[^\s,|\[\]#()]+$")
_EXPR_TOKEN_RE = re.compile(r"\(|\)|[^\s()\[\],|#]+")


# ---------------------------------------------------------------------------
# Data model


@dataclass(frozen=True)
class OrderedEdge:
    """Ordered edge type with a forward and a backward neighbor-type token."""

    forward: str
    backward: str


@dataclass(frozen=True)
class UnorderedEdge:
    """Unordered edge type with a single neighbor-type token."""

    token: str


EdgeDecl = Union[OrderedEdge, UnorderedEdge]


@dataclass(frozen=True)
class EdgeSignature:
    """Declared edge types; all neighbor-type tokens are pairwise distinct."""

    decls: tuple[EdgeDecl, ...]

    def neighbor_types(self) -> tuple[str, ...]:
        """All neighbor-type tokens in declaration order."""
        out: list[str] = []
        for decl in self.decls:
            if isinstance(decl, OrderedEdge):
                out.extend((decl.forward, decl.backward))
            else:
                out.append(decl.token)
        return tuple(out)

    def key_tokens(self) -> tuple[str, ...]:
        """Tokens identifying each edge type in edge-list inputs."""
        return tuple(
            decl.forward if isinstance(decl, OrderedEdge) else decl.token
            for decl in self.decls
        )


@dataclass(frozen=True)
class Membership:
    """`current in S` / `next not in S` leaf."""

    subject: str  # "current" or "next"
    negated: bool
    symbol: str


@dataclass(frozen=True)
class Literal:
    value: bool


@dataclass(frozen=True)
class Not:
    operand: "Expression"


@dataclass(frozen=True)
class And:
    left: "Expression"
    right: "Expression"


@dataclass(frozen=True)
class Or:
    left: "Expression"
    right: "Expression"


Expression = Union[Membership, Literal, Not, And, Or]


@dataclass(frozen=True)
class CasePattern:
    """Neighbor-type / color pattern; ``None`` means wildcard."""

    neighbor_types: Optional[tuple[str, ...]]
    colors: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class Rule:
    current: CasePattern
    next: CasePattern
    expr: Expression


@dataclass(frozen=True)
class StartSpec:
    neighbor_types: Optional[tuple[str, ...]]
    colors: Optional[tuple[str, ...]]
    symbol: str


@dataclass(frozen=True)
class OutputSpec:
    neighbor_types: Optional[tuple[str, ...]]
    colors: Optional[tuple[str, ...]]


@dataclass(frozen=True)
class RuleTable:
    """Parsed rule table.

    ``colors`` is ``None`` when the table declares no COLORS line; the
    engine then runs with a single implicit color and bracket syntax is
    rejected by the parser.
    """

    signature: EdgeSignature
    colors: Optional[tuple[str, ...]]
    sets: tuple[str, ...]
    starts: tuple[StartSpec, ...]
    outputs: tuple[OutputSpec, ...]
    rules: tuple[Rule, ...]

    def num_colors(self) -> int:
        return len(self.colors) if self.colors is not None else 1

    def color_names(self) -> tuple[Optional[str], ...]:
        if self.colors is None:
            return (None,)
        return self.colors


@dataclass(frozen=True)
class Diagnostic:
    """validate_rule_table finding; never raised, only reported."""

    kind: str  # "ShadowedRule" | "UnproducibleColor" | "UnmatchableOutput"
    detail: str
    index: Optional[int] = None
    symbol: Optional[str] = None


# ---------------------------------------------------------------------------
# Parsing


class _LineParser:
    """Helper bound to one physical line; tracks columns for errors."""

    def __init__(self, text: str, line_no: int):
        self.text = text
        self.line_no = line_no

    def fail(self, message: str, column: int = 1) -> TableSyntaxError:
        return TableSyntaxError(message, line=self.line_no, column=column)

    def check_token(self, tok: str, what: str) -> str:
        if not _TOKEN_RE.match(tok):
            raise self.fail(f"invalid {what} token {tok!r}", self.text.find(tok) + 1)
        return tok

    def check_ident(self, tok: str, what: str) -> str:
        if not _IDENT_RE.match(tok):
            raise self.fail(f"invalid {what} {tok!r}", self.text.find(tok) + 1)
        if tok in _RESERVED or tok == "...":
            raise self.fail(f"reserved word {tok!r} cannot be used as a {what}",
                            self.text.find(tok) + 1)
        return tok

    def split_commas(self, text: str, what: str) -> list[str]:
        parts = [part.strip() for part in text.split(",")]
        if any(not part for part in parts):
            raise self.fail(f"empty item in {what} list")
        return parts

    def parse_case(self, text: str, what: str) -> tuple[Optional[tuple[str, ...]],
                                                        Optional[tuple[str, ...]], bool]:
        """Parse ``ntlist [colorlist]``.

        Returns (neighbor_types, colors, used_brackets); wildcards are None.
        """
        text = text.strip()
        colors: Optional[tuple[str, ...]] = None
        used_brackets = False
        bracket = re.search(r"\[", text)
        if bracket is not None:
            used_brackets = True
            match = re.match(r"^(.*?)\[([^\[\]]*)\]\s*$", text)
            if match is None:
                raise self.fail(f"malformed color brackets in {what}",
                                self.text.find("[") + 1)
            text = match.group(1).strip()
            inner = match.group(2).strip()
            if inner == "...":
                colors = None
            elif not inner:
                raise self.fail(f"empty color list in {what}", self.text.find("[") + 1)
            else:
                colors = tuple(self.check_token(tok, "color")
                               for tok in self.split_commas(inner, "color"))
        if "]" in text or "[" in text:
            raise self.fail(f"stray bracket in {what}",
                            self.text.find("]" if "]" in text else "[") + 1)
        if not text:
            raise self.fail(f"missing neighbor-type list in {what}")
        if text == "...":
            nts: Optional[tuple[str, ...]] = None
        else:
            nts = tuple(self.check_token(tok, "neighbor-type")
                        for tok in self.split_commas(text, "neighbor-type"))
        return nts, colors, used_brackets


class _ExpressionParser:
    """Recursive-descent parser for the rule expression column.

    Precedence: ``not`` binds tighter than ``and``, which binds tighter
    than ``or``; all binary operators are left-associative.
    """

    def __init__(self, text: str, line: _LineParser, col_offset: int):
        self.line = line
        self.col_offset = col_offset
        self.tokens = [(m.group(0), m.start()) for m in _EXPR_TOKEN_RE.finditer(text)]
        self.pos = 0

    def fail(self, message: str) -> TableSyntaxError:
        if self.pos < len(self.tokens):
            column = self.col_offset + self.tokens[self.pos][1] + 1
        else:
            column = self.col_offset + 1
        return self.line.fail(message, column)

    def peek(self) -> Optional[str]:
        if self.pos < len(self.tokens):
            return self.tokens[self.pos][0]
        return None

    def take(self) -> str:
        tok = self.peek()
        if tok is None:
            raise self.fail("unexpected end of expression")
        self.pos += 1
        return tok

    def parse(self) -> Expression:
        expr = self.parse_or()
        if self.peek() is not None:
            raise self.fail(f"unexpected token {self.peek()!r} after expression")
        return expr

    def parse_or(self) -> Expression:
        expr = self.parse_and()
        while self.peek() == "or":
            self.take()
            expr = Or(expr, self.parse_and())
        return expr

    def parse_and(self) -> Expression:
        expr = self.parse_unary()
        while self.peek() == "and":
            self.take()
            expr = And(expr, self.parse_unary())
        return expr

    def parse_unary(self) -> Expression:
        tok = self.peek()
        if tok == "not":
            self.take()
            return Not(self.parse_unary())
        if tok == "(":
            self.take()
            expr = self.parse_or()
            if self.peek() != ")":
                raise self.fail("expected ')'")
            self.take()
            return expr
        return self.parse_atom()

    def parse_atom(self) -> Expression:
        tok = self.take()
        if tok == "true":
            return Literal(True)
        if tok == "false":
            return Literal(False)
        if tok in ("current", "next"):
            op = self.take()
            negated = False
            if op == "not":
                if self.take() != "in":
                    raise self.fail("expected 'in' after 'not'")
                negated = True
            elif op != "in":
                raise self.fail(f"expected 'in' or 'not in', got {op!r}")
            symbol = self.take()
            if symbol in ("(", ")") or symbol in _RESERVED:
                raise self.fail(f"expected set symbol, got {symbol!r}")
            return Membership(tok, negated, symbol)
        raise self.fail(f"expected expression atom, got {tok!r}")


def _membership_symbols(expr: Expression) -> Iterable[str]:
    if isinstance(expr, Membership):
        yield expr.symbol
    elif isinstance(expr, Not):
        yield from _membership_symbols(expr.operand)
    elif isinstance(expr, (And, Or)):
        yield from _membership_symbols(expr.left)
        yield from _membership_symbols(expr.right)


def parse_rule_table(text: str) -> RuleTable:
    """Parse rule-table text into an immutable :class:`RuleTable`.

    Raises a :class:`~cifly.errors.RuleTableError` subclass naming the
    offending line when the input is malformed.
    """
    directives: dict[str, tuple[str, int]] = {}
    start_lines: list[tuple[str, int]] = []
    output_lines: list[tuple[str, int]] = []
    rule_lines: list[tuple[str, int]] = []
    num_lines = 0

    for line_no, raw in enumerate(text.splitlines(), start=1):
        num_lines = line_no
        content = raw.split("#", 1)[0].rstrip()
        if not content.strip():
            continue
        first = content.split()[0]
        if first in _DIRECTIVES:
            if rule_lines:
                raise TableSyntaxError(
                    f"directive {first} after the first rule", line=line_no,
                    column=content.find(first) + 1)
            rest = content.split(None, 1)[1] if len(content.split(None, 1)) > 1 else ""
            if first == "START":
                start_lines.append((rest, line_no))
            elif first == "OUTPUT":
                output_lines.append((rest, line_no))
            else:
                if first in directives:
                    raise DuplicateDirectiveError(
                        f"duplicate {first} directive", line=line_no)
                directives[first] = (rest, line_no)
        else:
            rule_lines.append((content, line_no))

    eof = max(1, num_lines)
    if "EDGES" not in directives:
        raise MissingDirectiveError("missing EDGES directive", line=eof)
    if "SETS" not in directives:
        raise MissingDirectiveError("missing SETS directive", line=eof)
    if not start_lines:
        raise MissingDirectiveError("missing START directive", line=eof)
    if not output_lines:
        raise MissingDirectiveError("missing OUTPUT directive", line=eof)

    # EDGES
    edges_text, edges_line = directives["EDGES"]
    lp = _LineParser(edges_text, edges_line)
    if not edges_text.strip():
        raise lp.fail("EDGES declares no edge types")
    decls: list[EdgeDecl] = []
    seen_tokens: set[str] = set()
    for part in lp.split_commas(edges_text, "edge declaration"):
        toks = part.split()
        if len(toks) == 1:
            decl: EdgeDecl = UnorderedEdge(lp.check_token(toks[0], "neighbor-type"))
            new = (toks[0],)
        elif len(toks) == 2:
            decl = OrderedEdge(lp.check_token(toks[0], "neighbor-type"),
                               lp.check_token(toks[1], "neighbor-type"))
            new = (toks[0], toks[1])
        else:
            raise lp.fail(f"edge declaration {part!r} must have one or two tokens")
        for tok in new:
            if tok in seen_tokens:
                raise lp.fail(f"duplicate neighbor-type token {tok!r}")
            seen_tokens.add(tok)
        decls.append(decl)
    signature = EdgeSignature(tuple(decls))
    neighbor_types = set(signature.neighbor_types())

    # COLORS (optional)
    colors: Optional[tuple[str, ...]] = None
    if "COLORS" in directives:
        colors_text, colors_line = directives["COLORS"]
        lp = _LineParser(colors_text, colors_line)
        if not colors_text.strip():
            raise lp.fail("COLORS declares no colors")
        names = [lp.check_ident(tok, "color") for tok in lp.split_commas(colors_text, "color")]
        if len(set(names)) != len(names):
            raise lp.fail("duplicate color name")
        colors = tuple(names)

    # SETS
    sets_text, sets_line = directives["SETS"]
    lp = _LineParser(sets_text, sets_line)
    if not sets_text.strip():
        raise lp.fail("SETS declares no set symbols")
    set_names = [lp.check_ident(tok, "set symbol") for tok in lp.split_commas(sets_text, "set")]
    if len(set(set_names)) != len(set_names):
        raise lp.fail("duplicate set symbol")
    sets = tuple(set_names)

    def check_case_symbols(lp: _LineParser, nts, case_colors, what: str) -> None:
        if nts is not None:
            for tok in nts:
                if tok not in neighbor_types:
                    raise UnknownSymbolError(
                        f"unknown neighbor-type {tok!r} in {what}", line=lp.line_no)
        if case_colors is not None:
            for tok in case_colors:
                if colors is None or tok not in colors:
                    raise UnknownSymbolError(
                        f"unknown color {tok!r} in {what}", line=lp.line_no)

    # START lines
    starts: list[StartSpec] = []
    for rest, line_no in start_lines:
        lp = _LineParser(rest, line_no)
        match = re.match(r"^(.*\S)\s+AT\s+(\S+)\s*$", rest)
        if match is None:
            raise lp.fail("START must have the form 'START <types> [colors] AT <set>'")
        nts, case_colors, used_brackets = lp.parse_case(match.group(1), "START")
        if used_brackets and colors is None:
            raise ColorUsageError(
                "color brackets used without a COLORS directive", line=line_no)
        check_case_symbols(lp, nts, case_colors, "START")
        symbol = match.group(2)
        lp.check_token(symbol, "set symbol")
        if symbol not in sets:
            raise UnknownSymbolError(f"unknown set symbol {symbol!r} in START",
                                     line=line_no)
        starts.append(StartSpec(nts, case_colors, symbol))

    # OUTPUT lines
    outputs: list[OutputSpec] = []
    for rest, line_no in output_lines:
        lp = _LineParser(rest, line_no)
        if not rest.strip():
            raise lp.fail("OUTPUT needs a neighbor-type list")
        nts, case_colors, used_brackets = lp.parse_case(rest, "OUTPUT")
        if used_brackets and colors is None:
            raise ColorUsageError(
                "color brackets used without a COLORS directive", line=line_no)
        check_case_symbols(lp, nts, case_colors, "OUTPUT")
        outputs.append(OutputSpec(nts, case_colors))

    # Rules
    rules: list[Rule] = []
    for content, line_no in rule_lines:
        lp = _LineParser(content, line_no)
        parts = content.split("|")
        if len(parts) != 3:
            raise lp.fail("a rule needs exactly three '|'-separated columns",
                          max(1, content.find("|") + 1))
        cases = []
        for part, what in ((parts[0], "current case"), (parts[1], "next case")):
            nts, case_colors, used_brackets = lp.parse_case(part, what)
            if used_brackets and colors is None:
                raise ColorUsageError(
                    "color brackets used without a COLORS directive", line=line_no)
            check_case_symbols(lp, nts, case_colors, what)
            cases.append(CasePattern(nts, case_colors))
        expr_offset = len(parts[0]) + len(parts[1]) + 2
        expr = _ExpressionParser(parts[2], lp, expr_offset).parse()
        for symbol in _membership_symbols(expr):
            if symbol not in sets:
                raise UnknownSymbolError(
                    f"unknown set symbol {symbol!r} in rule expression", line=line_no)
        rules.append(Rule(cases[0], cases[1], expr))

    return RuleTable(signature, colors, sets, tuple(starts), tuple(outputs), tuple(rules))


# ---------------------------------------------------------------------------
# Formatting


def _format_expr(expr: Expression, parent_prec: int = 0) -> str:
    # or=1, and=2, not=3, atoms=4
    if isinstance(expr, Literal):
        return "true" if expr.value else "false"
    if isinstance(expr, Membership):
        op = "not in" if expr.negated else "in"
        return f"{expr.subject} {op} {expr.symbol}"
    if isinstance(expr, Not):
        inner = _format_expr(expr.operand, 3)
        return f"not {inner}"
    if isinstance(expr, And):
        text = f"{_format_expr(expr.left, 2)} and {_format_expr(expr.right, 3)}"
        return f"({text})" if parent_prec > 2 else text
    if isinstance(expr, Or):
        text = f"{_format_expr(expr.left, 1)} or {_format_expr(expr.right, 2)}"
        return f"({text})" if parent_prec > 1 else text
    raise TypeError(f"unknown expression node {expr!r}")


def _format_case(nts: Optional[tuple[str, ...]], colors: Optional[tuple[str, ...]],
                 bracket_wildcard: bool = False) -> str:
    text = "..." if nts is None else ", ".join(nts)
    if colors is not None:
        text += " [" + ", ".join(colors) + "]"
    elif bracket_wildcard:
        text += " [...]"
    return text


def format_rule_table(table: RuleTable) -> str:
    """Emit canonical text; the result re-parses to an equal table."""
    lines: list[str] = []
    decls = []
    for decl in table.signature.decls:
        if isinstance(decl, OrderedEdge):
            decls.append(f"{decl.forward} {decl.backward}")
        else:
            decls.append(decl.token)
    lines.append("EDGES  " + ", ".join(decls))
    if table.colors is not None:
        lines.append("COLORS " + ", ".join(table.colors))
    lines.append("SETS   " + ", ".join(table.sets))
    for start in table.starts:
        lines.append("START  " + _format_case(start.neighbor_types, start.colors)
                     + f" AT {start.symbol}")
    for output in table.outputs:
        lines.append("OUTPUT " + _format_case(output.neighbor_types, output.colors))
    lines.append("")

    current_cases = [_format_case(r.current.neighbor_types, r.current.colors)
                     for r in table.rules]
    next_cases = [_format_case(r.next.neighbor_types, r.next.colors)
                  for r in table.rules]
    width1 = max((len(c) for c in current_cases), default=0)
    width2 = max((len(c) for c in next_cases), default=0)
    for cur, nxt, rule in zip(current_cases, next_cases, table.rules):
        lines.append(f"{cur.ljust(width1)} | {nxt.ljust(width2)} | "
                     f"{_format_expr(rule.expr)}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# Lint pass


def _resolved(items: Optional[tuple[str, ...]], universe: tuple[str, ...]) -> tuple[str, ...]:
    return universe if items is None else items


def validate_rule_table(table: RuleTable) -> list[Diagnostic]:
    """Report shadowed rules, unproducible colors and dead output specs.

    Diagnostics are advisory; a table with diagnostics still runs.
    """
    diagnostics: list[Diagnostic] = []
    nts = table.signature.neighbor_types()
    colors = table.color_names()

    # A rule is shadowed when every (n1, c1, n2, c2) combination it matches
    # is already claimed by an earlier rule.
    matched: set[int] = set()
    for n1 in nts:
        for c1 in colors:
            for n2 in nts:
                for c2 in colors:
                    for index, rule in enumerate(table.rules):
                        if (n1 in _resolved(rule.current.neighbor_types, nts)
                                and (rule.current.colors is None or c1 in rule.current.colors)
                                and n2 in _resolved(rule.next.neighbor_types, nts)
                                and (rule.next.colors is None or c2 in rule.next.colors)):
                            matched.add(index)
                            break
    for index in range(len(table.rules)):
        if index not in matched:
            diagnostics.append(Diagnostic(
                "ShadowedRule",
                f"rule {index + 1} is never the first match", index=index))

    # Colors that no start spec and no rule next-case can ever produce.
    producible: set[Optional[str]] = set()
    for start in table.starts:
        producible.update(start.colors if start.colors is not None else colors)
    for rule in table.rules:
        producible.update(rule.next.colors if rule.next.colors is not None else colors)
    for color in colors:
        if color is not None and color not in producible:
            diagnostics.append(Diagnostic(
                "UnproducibleColor", f"color {color!r} can never be produced",
                symbol=color))

    # Output specs that cannot match any producible (neighbor-type, color).
    producible_pairs: set[tuple[str, Optional[str]]] = set()
    for start in table.starts:
        for n in _resolved(start.neighbor_types, nts):
            for c in (start.colors if start.colors is not None else colors):
                producible_pairs.add((n, c))
    for rule in table.rules:
        for n in _resolved(rule.next.neighbor_types, nts):
            for c in (rule.next.colors if rule.next.colors is not None else colors):
                producible_pairs.add((n, c))
    for index, output in enumerate(table.outputs):
        feasible = any(
            (n, c) in producible_pairs
            for n in _resolved(output.neighbor_types, nts)
            for c in (output.colors if output.colors is not None else colors))
        if not feasible:
            diagnostics.append(Diagnostic(
                "UnmatchableOutput",
                f"output spec {index + 1} can never match a visited state",
                index=index))
    return diagnostics
