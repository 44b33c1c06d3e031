"""Scripting-friendly wrapper around the cifly core.

The core works with typed ``Graph`` / ``SetAssignment`` / ``RuleTable``
objects; this package accepts plain mappings and scalars instead and
returns plain lists, booleans and dicts, so code reads the way the
algorithms are usually written down::

    import ciflypy as cifly

    R = cifly.reach(G, {"X": X, "Z": Z}, dsep_table_path)

Graphs are mappings in the canonical JSON shape
``{"p": p, "edges": {"-->": [[u, v], ...], ...}}`` (or a pre-parsed
:class:`Graph` handle, reusable across every table that declares the
same EDGES line).  Rule tables may be file paths, inline text, or
bundled catalog names; parsed tables are cached by content hash.  No
algorithm logic lives here, every call delegates to the core.
"""

from __future__ import annotations

import hashlib
import os
from pathlib import Path
from typing import Iterable, Mapping, Optional, Union

from cifly import causal as _causal
from cifly import engine as _engine
from cifly import graph as _graph
from cifly import ruletable as _ruletable
from cifly.errors import CiflyError

__all__ = [
    "CiflypyError",
    "Graph",
    "reach",
    "dsep",
    "adjustment",
    "parent_aid",
    "iv_verify_all",
    "iv_optimal",
    "iv_find",
]

__version__ = "0.1.0"

_table_cache: dict[str, _ruletable.RuleTable] = {}


class CiflypyError(Exception):
    """Binding-level error wrapping the core taxonomy."""


def _wrap(call, *args, **kwargs):
    try:
        return call(*args, **kwargs)
    except CiflyError as exc:
        raise CiflypyError(str(exc)) from exc


def _resolve_table(table) -> _ruletable.RuleTable:
    if isinstance(table, _ruletable.RuleTable):
        return table
    if not isinstance(table, (str, os.PathLike)):
        raise CiflypyError(f"cannot interpret {type(table).__name__} as a rule table")
    text: Optional[str] = None
    spec = str(table)
    if "\n" not in spec:
        path = Path(spec)
        if path.is_file():
            text = path.read_text(encoding="utf-8")
        else:
            root = os.environ.get("CIFLY_TABLE_PATH")
            if root and (Path(root) / spec).is_file():
                text = (Path(root) / spec).read_text(encoding="utf-8")
            elif spec in _causal.TABLE_CATALOG:
                text = _causal.table_text(spec)
    if text is None:
        if "EDGES" in spec:
            text = spec  # inline table text
        else:
            raise CiflypyError(f"cannot find rule table {spec!r}")
    digest = hashlib.sha256(text.encode()).hexdigest()
    cached = _table_cache.get(digest)
    if cached is None:
        cached = _table_cache[digest] = _wrap(_ruletable.parse_rule_table, text)
    return cached


def _as_node_set(value) -> list[int]:
    import numbers

    if isinstance(value, numbers.Integral) and not isinstance(value, bool):
        return [int(value)]
    if isinstance(value, Iterable):
        return [int(v) for v in value]
    raise CiflypyError(f"cannot interpret {value!r} as a node set")


class Graph:
    """Pre-parsed graph, valid for any table sharing its EDGES line."""

    def __init__(self, graph: Mapping, table, p: Optional[int] = None):
        signature = _resolve_table(table).signature
        if "edges" in graph:
            p = int(graph["p"])
            edges = graph["edges"]
        else:
            if p is None:
                raise CiflypyError(
                    "pass {'p': ..., 'edges': ...} or supply p= explicitly")
            edges = graph
        self._core = _wrap(_graph.build_graph, _graph.EdgeInput(p, edges), signature)

    @property
    def p(self) -> int:
        return self._core.p


GraphLike = Union[Graph, Mapping]


def _as_core_graph(graph: GraphLike, signature) -> _graph.Graph:
    if isinstance(graph, Graph):
        return graph._core
    if isinstance(graph, _graph.Graph):
        return graph
    return _wrap(_graph.build_graph,
                 _graph.EdgeInput(int(graph["p"]), graph.get("edges", {})),
                 signature)


def reach(graph: GraphLike, sets: Mapping, table) -> list[int]:
    """Run one rule-table reduction; returns the output nodes sorted."""
    parsed = _resolve_table(table)
    core = _as_core_graph(graph, parsed.signature)
    assignment = {symbol: _as_node_set(value) for symbol, value in sets.items()}
    return sorted(_wrap(_engine.reach, core, assignment, parsed))


def _admg(graph: GraphLike) -> _graph.Graph:
    return _as_core_graph(graph, _graph.ADMG_SIGNATURE)


def _cpdag(graph: GraphLike) -> _graph.Graph:
    return _as_core_graph(graph, _graph.CPDAG_SIGNATURE)


def dsep(graph: GraphLike, X, Y, Z=()) -> bool:
    """Whether X and Y are d-separated given Z in an ADMG."""
    return _wrap(_causal.test_dsep, _admg(graph), _as_node_set(X),
                 _as_node_set(Y), _as_node_set(Z))


def adjustment(graph: GraphLike, X, Y, W=()) -> bool:
    """Whether W is a valid adjustment set relative to (X, Y) in a CPDAG."""
    return _wrap(_causal.adjustment_check_cpdag, _cpdag(graph),
                 _as_node_set(X), _as_node_set(Y), _as_node_set(W))


def parent_aid(g_true: GraphLike, g_guess: GraphLike, threads: int = 1) -> int:
    """Parent adjustment distance between two CPDAGs."""
    return _wrap(_causal.parent_aid, _cpdag(g_true), _cpdag(g_guess),
                 threads=threads)


def iv_verify_all(graph: GraphLike, x: int, Z, W=()) -> list[int]:
    """All y for which (Z, W) is a valid conditional instrumental set
    relative to (x, y), sorted."""
    return sorted(_wrap(_causal.iv_verify_all, _admg(graph), int(x),
                        _as_node_set(Z), _as_node_set(W)))


def iv_optimal(graph: GraphLike, x: int, y: int) -> Optional[dict]:
    """The graphically optimal pair as ``{"Z", "W", "optimal"}``, or None."""
    result = _wrap(_causal.iv_optimal, _admg(graph), int(x), int(y))
    if result is None:
        return None
    return {"Z": sorted(result.Z), "W": sorted(result.W),
            "optimal": result.graphically_optimal}


def iv_find(graph: GraphLike, x: int, y: int,
            exhaustive: bool = False) -> list[dict]:
    """Conditional instruments for (x, y) as ``[{"z", "W"}, ...]``."""
    hits = _wrap(_causal.iv_find, _admg(graph), int(x), int(y),
                 exhaustive=exhaustive)
    return [{"z": z, "W": sorted(W)} for z, W in hits]
