"""Reachability over state-space graphs generated on the fly.

A state is a (node, neighbor-type, color) triple, encoded as
``(v * n_nt + n) * n_col + c``.  The traversal starts from the states
induced by the table's START specs and repeatedly expands a state
``(v1, n1, c1)`` along the graph adjacency: traversing an edge out of
``v1`` to ``v2`` determines the arrival neighbor-type ``n2`` (forward
token when an ordered edge is crossed source-to-target, backward token
the other way, the single token for unordered edges), and for every
color ``c2`` the first rule matching ``(n1, c1 | n2, c2)`` decides via
its expression whether the transition exists.  The visited states
matching an OUTPUT spec map back to graph nodes.

The traversal is an explicit-stack depth-first search; rule expressions
are compiled once per table into flat postfix programs over set
membership masks, and rule resolution is a precomputed
``(n1, c1, n2) -> first matching rule per c2`` lookup.  The kernel is
JIT-compiled with numba when available and falls back to the same pure
Python code otherwise.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Union

import numpy as np

from .errors import SetMismatchError, SignatureMismatchError, TableSyntaxError
from .graph import Graph, SetAssignment
from .ruletable import (
    And,
    CasePattern,
    Expression,
    Literal,
    Membership,
    Not,
    Or,
    RuleTable,
)

__all__ = [
    "State",
    "TransitionIndex",
    "ReachCounters",
    "build_transition_index",
    "reach",
    "reach_states",
    "reach_with_counters",
]

# Postfix opcodes.
_OP_CURRENT = 0  # push member[arg, v1]
_OP_NEXT = 1     # push member[arg, v2]
_OP_CONST = 2    # push arg
_OP_NOT = 3
_OP_AND = 4
_OP_OR = 5

_EVAL_STACK = 64


@dataclass(frozen=True)
class State:
    node: int
    neighbor_type: str
    color: Optional[str]


@dataclass(frozen=True)
class ReachCounters:
    """Work counters from one traversal, with their theoretical bounds."""

    visits: int
    evaluations: int
    visit_bound: int       # p * |N| * |C|
    evaluation_bound: int  # 2m * |N| * |C|^2


class TransitionIndex:
    """First-matching-rule lookup for every (n1, c1, n2, c2) combination."""

    def __init__(self, table: RuleTable):
        nts = table.signature.neighbor_types()
        colors = table.color_names()
        self.neighbor_types = nts
        self.colors = colors
        n_nt, n_col = len(nts), len(colors)
        flat = np.full(n_nt * n_col * n_nt * n_col, -1, dtype=np.int32)

        def matches(pattern: CasePattern, nt: str, color: Optional[str]) -> bool:
            if pattern.neighbor_types is not None and nt not in pattern.neighbor_types:
                return False
            if pattern.colors is not None and color not in pattern.colors:
                return False
            return True

        pos = 0
        for n1 in nts:
            for c1 in colors:
                for n2 in nts:
                    for c2 in colors:
                        for index, rule in enumerate(table.rules):
                            if matches(rule.current, n1, c1) and matches(rule.next, n2, c2):
                                flat[pos] = index
                                break
                        pos += 1
        self.flat = flat

    def rule_index(self, n1: str, c1: Optional[str], n2: str,
                   c2: Optional[str]) -> Optional[int]:
        """Index of the first rule matching the combination, or ``None``."""
        nt = {tok: i for i, tok in enumerate(self.neighbor_types)}
        col = {c: i for i, c in enumerate(self.colors)}
        n_nt, n_col = len(self.neighbor_types), len(self.colors)
        pos = ((nt[n1] * n_col + col[c1]) * n_nt + nt[n2]) * n_col + col[c2]
        value = int(self.flat[pos])
        return None if value < 0 else value


def build_transition_index(table: RuleTable) -> TransitionIndex:
    return TransitionIndex(table)


def _compile_expression(expr: Expression, set_index: Mapping[str, int],
                        ops: list[int], args: list[int]) -> int:
    """Emit postfix code; returns the stack depth the fragment needs."""
    if isinstance(expr, Literal):
        ops.append(_OP_CONST)
        args.append(1 if expr.value else 0)
        return 1
    if isinstance(expr, Membership):
        ops.append(_OP_CURRENT if expr.subject == "current" else _OP_NEXT)
        args.append(set_index[expr.symbol])
        depth = 1
        if expr.negated:
            ops.append(_OP_NOT)
            args.append(0)
        return depth
    if isinstance(expr, Not):
        depth = _compile_expression(expr.operand, set_index, ops, args)
        ops.append(_OP_NOT)
        args.append(0)
        return depth
    if isinstance(expr, (And, Or)):
        left = _compile_expression(expr.left, set_index, ops, args)
        right = _compile_expression(expr.right, set_index, ops, args)
        ops.append(_OP_AND if isinstance(expr, And) else _OP_OR)
        args.append(0)
        return max(left, 1 + right)
    raise TypeError(f"unknown expression node {expr!r}")


class _CompiledTable:
    """Arrays the kernel consumes, derived once per rule table."""

    def __init__(self, table: RuleTable):
        self.table = table
        self.neighbor_types = table.signature.neighbor_types()
        self.colors = table.color_names()
        self.n_nt = len(self.neighbor_types)
        self.n_col = len(self.colors)
        self.tindex = TransitionIndex(table).flat
        set_index = {symbol: i for i, symbol in enumerate(table.sets)}

        ops: list[int] = []
        args: list[int] = []
        lo: list[int] = []
        hi: list[int] = []
        for rule in table.rules:
            lo.append(len(ops))
            depth = _compile_expression(rule.expr, set_index, ops, args)
            hi.append(len(ops))
            if depth > _EVAL_STACK:
                raise TableSyntaxError("rule expression is too deeply nested")
        self.prog_ops = np.asarray(ops, dtype=np.int16)
        self.prog_args = np.asarray(args, dtype=np.int32)
        self.rule_lo = np.asarray(lo, dtype=np.int64)
        self.rule_hi = np.asarray(hi, dtype=np.int64)

        nt_pos = {tok: i for i, tok in enumerate(self.neighbor_types)}
        col_pos = {c: i for i, c in enumerate(self.colors)}
        self.starts = [
            (spec.symbol,
             tuple(nt_pos[t] for t in (spec.neighbor_types or self.neighbor_types)),
             tuple(col_pos[c] for c in (spec.colors or self.colors)))
            for spec in table.starts
        ]
        out_mask = np.zeros((self.n_nt, self.n_col), dtype=bool)
        for spec in table.outputs:
            for t in (spec.neighbor_types or self.neighbor_types):
                for c in (spec.colors or self.colors):
                    out_mask[nt_pos[t], col_pos[c]] = True
        self.out_mask = out_mask


@lru_cache(maxsize=128)
def _compiled(table: RuleTable) -> _CompiledTable:
    return _CompiledTable(table)


# ---------------------------------------------------------------------------
# Traversal kernel (numba-compiled when available)


def _traverse(indptr, indices, n_nt, n_col, tindex, prog_ops, prog_args,
              rule_lo, rule_hi, member, starts, visited, epoch, stack, ebuf):
    top = 0
    visits = 0
    evaluations = 0
    for i in range(starts.shape[0]):
        s = starts[i]
        if visited[s] != epoch:
            visited[s] = epoch
            stack[top] = s
            top += 1
    while top > 0:
        top -= 1
        s1 = stack[top]
        visits += 1
        c1 = s1 % n_col
        rest = s1 // n_col
        n1 = rest % n_nt
        v1 = rest // n_nt
        base = (n1 * n_col + c1) * n_nt
        for n2 in range(n_nt):
            row = v1 * n_nt + n2
            lo = indptr[row]
            hi = indptr[row + 1]
            if lo == hi:
                continue
            tbase = (base + n2) * n_col
            for e in range(lo, hi):
                v2 = indices[e]
                for c2 in range(n_col):
                    r = tindex[tbase + c2]
                    if r < 0:
                        continue
                    s2 = (v2 * n_nt + n2) * n_col + c2
                    if visited[s2] == epoch:
                        continue
                    evaluations += 1
                    sp = 0
                    for pc in range(rule_lo[r], rule_hi[r]):
                        op = prog_ops[pc]
                        if op == 0:
                            ebuf[sp] = member[prog_args[pc], v1]
                            sp += 1
                        elif op == 1:
                            ebuf[sp] = member[prog_args[pc], v2]
                            sp += 1
                        elif op == 2:
                            ebuf[sp] = prog_args[pc]
                            sp += 1
                        elif op == 3:
                            ebuf[sp - 1] = 1 - ebuf[sp - 1]
                        elif op == 4:
                            sp -= 1
                            ebuf[sp - 1] = ebuf[sp - 1] & ebuf[sp]
                        else:
                            sp -= 1
                            ebuf[sp - 1] = ebuf[sp - 1] | ebuf[sp]
                    if ebuf[0] != 0:
                        visited[s2] = epoch
                        stack[top] = s2
                        top += 1
    return visits, evaluations


try:  # pragma: no cover - exercised indirectly by every reach call
    from numba import njit

    _traverse_jit = njit(cache=True, nogil=True)(_traverse)
except Exception:  # pragma: no cover
    _traverse_jit = _traverse


_tls = threading.local()


def _workspace(n_states: int):
    """Thread-local epoch-stamped visited array and DFS stack."""
    spaces = getattr(_tls, "spaces", None)
    if spaces is None:
        spaces = _tls.spaces = {}
    entry = spaces.get(n_states)
    if entry is None:
        entry = spaces[n_states] = [
            np.zeros(n_states, dtype=np.int32),
            np.empty(n_states, dtype=np.int64),
            np.empty(_EVAL_STACK, dtype=np.uint8),
            0,
        ]
    entry[3] += 1
    if entry[3] >= np.iinfo(np.int32).max - 1:
        entry[0][:] = 0
        entry[3] = 1
    return entry[0], entry[1], entry[2], np.int32(entry[3])


def _as_assignment(graph: Graph, sets: Union[SetAssignment, Mapping]) -> SetAssignment:
    if isinstance(sets, SetAssignment):
        return sets
    return SetAssignment(graph.p, sets)


def _run(graph: Graph, sets: Union[SetAssignment, Mapping], table: RuleTable):
    if graph.signature != table.signature:
        raise SignatureMismatchError(
            "graph and rule table declare different edge signatures")
    assignment = _as_assignment(graph, sets)
    if assignment.symbols() != frozenset(table.sets):
        raise SetMismatchError(
            f"set symbols {sorted(assignment.symbols())} do not match "
            f"the table's SETS {list(table.sets)}")
    compiled = _compiled(table)
    n_nt, n_col = compiled.n_nt, compiled.n_col
    p = graph.p
    n_states = max(1, p * n_nt * n_col)

    member = np.empty((len(table.sets), p), dtype=np.uint8)
    for i, symbol in enumerate(table.sets):
        np.copyto(member[i], assignment.mask(symbol))

    start_parts = []
    for symbol, nt_ids, color_ids in compiled.starts:
        nodes = assignment.nodes(symbol)
        if nodes.size == 0:
            continue
        for n in nt_ids:
            for c in color_ids:
                start_parts.append((nodes * n_nt + n) * n_col + c)
    starts = (np.concatenate(start_parts) if start_parts
              else np.empty(0, dtype=np.int64))

    visited, stack, ebuf, epoch = _workspace(n_states)
    visits, evaluations = _traverse_jit(
        graph.indptr, graph.indices, n_nt, n_col, compiled.tindex,
        compiled.prog_ops, compiled.prog_args, compiled.rule_lo, compiled.rule_hi,
        member, starts, visited, epoch, stack, ebuf)
    counters = ReachCounters(
        visits=int(visits),
        evaluations=int(evaluations),
        visit_bound=p * n_nt * n_col,
        evaluation_bound=2 * graph.m * n_nt * n_col * n_col,
    )
    visited_states = (visited[:p * n_nt * n_col] == epoch).reshape(p, n_nt, n_col)
    return visited_states, compiled, counters


def reach(graph: Graph, sets: Union[SetAssignment, Mapping],
          table: RuleTable) -> set[int]:
    """Run the reduction and return the output node set.

    Start states count as visited, so start nodes matching an OUTPUT
    spec are part of the result.
    """
    visited_states, compiled, _ = _run(graph, sets, table)
    hit = np.logical_and(visited_states, compiled.out_mask[None, :, :]).any(axis=(1, 2))
    return set(np.nonzero(hit)[0].tolist())


def reach_with_counters(graph: Graph, sets: Union[SetAssignment, Mapping],
                        table: RuleTable) -> tuple[set[int], ReachCounters]:
    """Like :func:`reach` but also reports traversal work counters."""
    visited_states, compiled, counters = _run(graph, sets, table)
    hit = np.logical_and(visited_states, compiled.out_mask[None, :, :]).any(axis=(1, 2))
    return set(np.nonzero(hit)[0].tolist()), counters


def reach_states(graph: Graph, sets: Union[SetAssignment, Mapping],
                 table: RuleTable) -> set[State]:
    """Return the full visited state set, before output filtering."""
    visited_states, compiled, _ = _run(graph, sets, table)
    out: set[State] = set()
    for v, n, c in zip(*np.nonzero(visited_states)):
        out.add(State(int(v), compiled.neighbor_types[n], compiled.colors[c]))
    return out
