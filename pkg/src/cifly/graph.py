"""Typed edge lists and the adjacency structure the engine traverses.

Nodes are dense integers ``0..p-1``.  Edge lists are keyed by the
identifying token of each declared edge type (the forward token of an
ordered declaration, the sole token of an unordered one).  A pair
``(u, v)`` under an ordered key means the edge can be traversed from
``u`` to ``v`` arriving with the forward neighbor-type, and from ``v``
to ``u`` arriving with the backward one; unordered pairs traverse both
ways under their single token.

The adjacency is stored in CSR form with one row per (node,
neighbor-type) pair, which is what the traversal kernel consumes.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import NodeOutOfRangeError, UnknownEdgeTypeError
from .ruletable import EdgeSignature, OrderedEdge, UnorderedEdge

__all__ = [
    "DAG_SIGNATURE",
    "ADMG_SIGNATURE",
    "CPDAG_SIGNATURE",
    "UNDIRECTED_SIGNATURE",
    "EdgeInput",
    "Graph",
    "SetAssignment",
    "build_graph",
    "remove_directed_edges",
    "graph_from_json",
    "graph_to_json",
]

DAG_SIGNATURE = EdgeSignature((OrderedEdge("-->", "<--"),))
ADMG_SIGNATURE = EdgeSignature((OrderedEdge("-->", "<--"), UnorderedEdge("<->")))
CPDAG_SIGNATURE = EdgeSignature((OrderedEdge("-->", "<--"), UnorderedEdge("---")))
UNDIRECTED_SIGNATURE = EdgeSignature((UnorderedEdge("---"),))


@dataclass(frozen=True)
class EdgeInput:
    """Node count plus edge lists keyed by identifying token."""

    p: int
    edges: Mapping[str, Sequence[tuple[int, int]]]


def _as_pair_array(pairs, p: int, key: str) -> np.ndarray:
    arr = np.asarray(list(pairs) if not isinstance(pairs, np.ndarray) else pairs,
                     dtype=np.int64)
    if arr.size == 0:
        return arr.reshape(0, 2)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise UnknownEdgeTypeError(f"edge list for {key!r} is not a list of pairs")
    if arr.min() < 0 or arr.max() >= p:
        raise NodeOutOfRangeError(
            f"edge list for {key!r} references a node outside 0..{p - 1}")
    return arr


class Graph:
    """Immutable graph bound to an edge signature.

    Attributes:
        p: node count.
        signature: the :class:`EdgeSignature` the graph was built against.
        edges: normalized edge lists (token -> int64 array of shape (k, 2)).
        indptr/indices: CSR adjacency with row ``v * n_nt + n`` listing the
            neighbors reachable from ``v`` arriving with neighbor-type ``n``.
    """

    __slots__ = ("p", "signature", "edges", "indptr", "indices",
                 "neighbor_types", "_nt_index", "m")

    def __init__(self, p: int, signature: EdgeSignature,
                 edges: dict[str, np.ndarray],
                 indptr: np.ndarray, indices: np.ndarray):
        self.p = p
        self.signature = signature
        self.edges = edges
        self.indptr = indptr
        self.indices = indices
        self.neighbor_types = signature.neighbor_types()
        self._nt_index = {tok: i for i, tok in enumerate(self.neighbor_types)}
        self.m = sum(arr.shape[0] for arr in edges.values())

    def neighbors(self, v: int, neighbor_type: str) -> np.ndarray:
        row = v * len(self.neighbor_types) + self._nt_index[neighbor_type]
        return self.indices[self.indptr[row]:self.indptr[row + 1]]

    def edge_pairs(self, key: str) -> list[tuple[int, int]]:
        return [tuple(pair) for pair in self.edges.get(key, np.empty((0, 2), np.int64)).tolist()]


def build_graph(edge_input: EdgeInput, signature: EdgeSignature) -> Graph:
    """Build the CSR adjacency in O(p + m); duplicate pairs are kept."""
    p = edge_input.p
    if p < 0:
        raise NodeOutOfRangeError("node count must be nonnegative")
    keys = signature.key_tokens()
    nts = signature.neighbor_types()
    nt_index = {tok: i for i, tok in enumerate(nts)}
    for key in edge_input.edges:
        if key not in keys:
            raise UnknownEdgeTypeError(f"unknown edge-type key {key!r}")

    normalized: dict[str, np.ndarray] = {}
    rows_parts: list[np.ndarray] = []
    cols_parts: list[np.ndarray] = []
    n_nt = len(nts)
    for decl in signature.decls:
        if isinstance(decl, OrderedEdge):
            key, fwd, bwd = decl.forward, decl.forward, decl.backward
        else:
            key, fwd, bwd = decl.token, decl.token, decl.token
        arr = _as_pair_array(edge_input.edges.get(key, ()), p, key)
        normalized[key] = arr
        if arr.shape[0]:
            u, v = arr[:, 0], arr[:, 1]
            rows_parts.append(u * n_nt + nt_index[fwd])
            cols_parts.append(v)
            rows_parts.append(v * n_nt + nt_index[bwd])
            cols_parts.append(u)

    n_rows = p * n_nt
    if rows_parts:
        rows = np.concatenate(rows_parts)
        cols = np.concatenate(cols_parts)
        order = np.argsort(rows, kind="stable")
        counts = np.bincount(rows, minlength=n_rows)
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        indices = cols[order].astype(np.int32)
    else:
        indptr = np.zeros(n_rows + 1, dtype=np.int64)
        indices = np.empty(0, dtype=np.int32)
    return Graph(p, signature, normalized, indptr, indices)


def remove_directed_edges(graph: Graph, pairs: Iterable[tuple[int, int]],
                          type_key: str) -> Graph:
    """Return a new graph without the listed ordered pairs; O(p + m).

    Deleting a pair that is not present is a no-op; duplicates of a
    listed pair are all removed.
    """
    decl = None
    for d in graph.signature.decls:
        if isinstance(d, OrderedEdge) and d.forward == type_key:
            decl = d
            break
    if decl is None:
        raise UnknownEdgeTypeError(f"{type_key!r} does not identify an ordered edge type")
    drop = {(int(u), int(v)) for u, v in pairs}
    edges = {key: arr for key, arr in graph.edges.items()}
    arr = edges.get(type_key, np.empty((0, 2), np.int64))
    if arr.shape[0] and drop:
        keep = np.array([(int(u), int(v)) not in drop for u, v in arr], dtype=bool)
        edges[type_key] = arr[keep]
    return build_graph(EdgeInput(graph.p, edges), graph.signature)


class SetAssignment:
    """Mapping from set symbols to node sets plus per-symbol masks."""

    __slots__ = ("p", "sets", "_masks")

    def __init__(self, p: int, sets: Mapping[str, Iterable[int]]):
        self.p = p
        normalized: dict[str, np.ndarray] = {}
        for symbol, nodes in sets.items():
            arr = np.asarray(sorted({int(v) for v in nodes}), dtype=np.int64)
            if arr.size and (arr[0] < 0 or arr[-1] >= p):
                raise NodeOutOfRangeError(
                    f"set {symbol!r} references a node outside 0..{p - 1}")
            normalized[symbol] = arr
        self.sets = normalized
        self._masks: dict[str, np.ndarray] = {}

    def symbols(self) -> frozenset[str]:
        return frozenset(self.sets)

    def nodes(self, symbol: str) -> np.ndarray:
        return self.sets[symbol]

    def mask(self, symbol: str) -> np.ndarray:
        cached = self._masks.get(symbol)
        if cached is None:
            cached = np.zeros(self.p, dtype=np.uint8)
            cached[self.sets[symbol]] = 1
            self._masks[symbol] = cached
        return cached


# ---------------------------------------------------------------------------
# JSON boundary


def graph_from_json(obj: Mapping, signature: EdgeSignature) -> tuple[Graph, Optional[list[str]]]:
    """Read the canonical graph JSON object.

    Schema: ``{"p": int, "edges": {"-->": [[u, v], ...], ...}}`` with an
    optional ``"nodes"`` list of ``p`` labels.
    """
    p = int(obj["p"])
    edges = {key: [(int(u), int(v)) for u, v in pairs]
             for key, pairs in obj.get("edges", {}).items()}
    labels = obj.get("nodes")
    if labels is not None:
        labels = [str(x) for x in labels]
        if len(labels) != p:
            raise NodeOutOfRangeError("'nodes' must list exactly p labels")
    return build_graph(EdgeInput(p, edges), signature), labels


def graph_to_json(graph: Graph, labels: Optional[Sequence[str]] = None) -> dict:
    obj: dict = {
        "p": graph.p,
        "edges": {key: [[int(u), int(v)] for u, v in arr.tolist()]
                  for key, arr in graph.edges.items()},
    }
    if labels is not None:
        obj["nodes"] = list(labels)
    return obj
