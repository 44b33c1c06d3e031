"""Exception taxonomy shared across the package.

Rule-table errors carry the 1-based line number of the offending input
line; syntax errors additionally carry a column.
"""

from __future__ import annotations

from typing import Optional


class CiflyError(Exception):
    """Base class for all package errors."""


class RuleTableError(CiflyError):
    """Base class for rule-table parse and validation errors."""

    def __init__(self, message: str, line: Optional[int] = None):
        super().__init__(message)
        self.message = message
        self.line = line

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}: {self.message}"
        return self.message


class TableSyntaxError(RuleTableError):
    """Malformed rule-table text (unparsable line, bad token, bad nesting)."""

    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        super().__init__(message, line)
        self.column = column

    def __str__(self) -> str:
        if self.line is not None and self.column is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return super().__str__()


class UnknownSymbolError(RuleTableError):
    """A color, set symbol or neighbor-type is used but never declared."""


class DuplicateDirectiveError(RuleTableError):
    """EDGES, SETS or COLORS appears more than once."""


class MissingDirectiveError(RuleTableError):
    """A mandatory directive (EDGES, SETS, START, OUTPUT) is absent."""


class ColorUsageError(RuleTableError):
    """Bracketed color syntax is used in a table without a COLORS line."""


class GraphError(CiflyError):
    """Base class for graph construction errors."""


class NodeOutOfRangeError(GraphError):
    """An edge or set references a node index outside 0..p-1."""


class UnknownEdgeTypeError(GraphError):
    """An edge-list key does not identify a declared edge type."""


class SignatureMismatchError(CiflyError):
    """Graph and rule table were built against different edge signatures."""


class SetMismatchError(CiflyError):
    """Provided set symbols do not exactly match the table's SETS line."""


class OverlappingSetsError(CiflyError):
    """Node sets required to be pairwise disjoint overlap."""


class EmptyZError(CiflyError):
    """An instrumental-set operation was called with an empty Z."""


class SizeMismatchError(CiflyError):
    """Two graphs expected to share a node count do not."""


class StartOutsideAError(CiflyError):
    """A closure computation was started from a node outside A."""


class CyclicInputError(CiflyError):
    """An operation requiring an acyclic directed part received a cycle."""


class DimensionMismatchError(CiflyError):
    """Boolean matrix operands have incompatible shapes."""


class TooLargeError(CiflyError):
    """A brute-force oracle was asked to run beyond its hard size cap."""


class UnknownAlgoError(CiflyError):
    """The benchmark harness does not know the requested algorithm."""
