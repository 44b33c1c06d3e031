"""Moralization, Boolean matrix multiplication, transitive closure and
latent projection, plus the executable reductions connecting them.

Boolean matrices are plain numpy bool arrays.  ``bmm_via_moralize``
computes a product by moralizing a tripartite DAG and reading entries
off the married-parent edges; ``tc_via_latent_projection`` computes a
transitive closure by projecting a three-layer construction over its
middle layer.  Both serve as executable forms of the equivalences, with
``bmm_naive`` and ``transitive_closure`` as the direct counterparts.
"""

from __future__ import annotations

from typing import Iterable, Mapping

import numpy as np

from .causal import table
from .engine import reach
from .errors import CyclicInputError, DimensionMismatchError
from .graph import (
    ADMG_SIGNATURE,
    DAG_SIGNATURE,
    UNDIRECTED_SIGNATURE,
    EdgeInput,
    Graph,
    build_graph,
)

__all__ = [
    "moralize",
    "bmm_naive",
    "bmm_via_moralize",
    "transitive_closure",
    "latent_projection",
    "tc_via_latent_projection",
    "matrix_from_json",
    "matrix_to_json",
]


def _check_acyclic(g: Graph) -> None:
    """Kahn's algorithm over the directed edge list; O(p + m)."""
    p = g.p
    out: list[list[int]] = [[] for _ in range(p)]
    indeg = [0] * p
    for u, v in g.edges.get("-->", ()):
        out[int(u)].append(int(v))
        indeg[int(v)] += 1
    queue = [v for v in range(p) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if seen != p:
        raise CyclicInputError("directed part of the input contains a cycle")


def moralize(g: Graph) -> Graph:
    """Undirected graph with the skeleton of g plus married parent pairs.

    Naive parent-pair loop, cubic in the worst case.
    """
    _check_acyclic(g)
    parents: list[list[int]] = [[] for _ in range(g.p)]
    edges: set[tuple[int, int]] = set()
    for u, v in g.edges.get("-->", ()):
        u, v = int(u), int(v)
        if u != v:
            edges.add((min(u, v), max(u, v)))
        parents[v].append(u)
    for pa in parents:
        for i in range(len(pa)):
            for j in range(i + 1, len(pa)):
                a, b = pa[i], pa[j]
                if a != b:
                    edges.add((min(a, b), max(a, b)))
    return build_graph(EdgeInput(g.p, {"---": sorted(edges)}), UNDIRECTED_SIGNATURE)


def _as_bool_matrix(m, name: str) -> np.ndarray:
    arr = np.asarray(m)
    if arr.ndim != 2:
        raise DimensionMismatchError(f"{name} must be two-dimensional")
    return arr.astype(bool)


def bmm_naive(X, Y) -> np.ndarray:
    """Boolean matrix product: entry (i, j) is OR_k (X[i,k] AND Y[k,j])."""
    X = _as_bool_matrix(X, "X")
    Y = _as_bool_matrix(Y, "Y")
    if X.shape[1] != Y.shape[0]:
        raise DimensionMismatchError(
            f"inner dimensions differ: {X.shape[1]} vs {Y.shape[0]}")
    return (X.astype(np.int32) @ Y.astype(np.int32)) > 0


def bmm_via_moralize(X, Y) -> np.ndarray:
    """Boolean matrix product computed through graph moralization.

    Builds the tripartite DAG with a_i -> b_k for X[i,k] and c_j -> b_k
    for Y[k,j]; the product's (i, j) entry is 1 exactly when the
    moralized graph marries a_i and c_j.
    """
    X = _as_bool_matrix(X, "X")
    Y = _as_bool_matrix(Y, "Y")
    if X.shape[1] != Y.shape[0]:
        raise DimensionMismatchError(
            f"inner dimensions differ: {X.shape[1]} vs {Y.shape[0]}")
    p1, p2 = X.shape
    p3 = Y.shape[1]
    a_of = lambda i: i
    b_of = lambda k: p1 + k
    c_of = lambda j: p1 + p2 + j
    pairs = [(a_of(i), b_of(k)) for i in range(p1) for k in range(p2) if X[i, k]]
    pairs += [(c_of(j), b_of(k)) for k in range(p2) for j in range(p3) if Y[k, j]]
    moral = moralize(build_graph(EdgeInput(p1 + p2 + p3, {"-->": pairs}),
                                 DAG_SIGNATURE))
    married = {(int(u), int(v)) for u, v in moral.edges.get("---", ())}
    out = np.zeros((p1, p3), dtype=bool)
    for i in range(p1):
        for j in range(p3):
            key = (min(a_of(i), c_of(j)), max(a_of(i), c_of(j)))
            out[i, j] = key in married
    return out


def transitive_closure(g: Graph) -> Graph:
    """Directed graph with an edge for every directed path of g.

    One reachability sweep per source; cycles are allowed and self-edges
    are never emitted.
    """
    p = g.p
    out: list[list[int]] = [[] for _ in range(p)]
    for u, v in g.edges.get("-->", ()):
        out[int(u)].append(int(v))
    closure_edges: list[tuple[int, int]] = []
    for source in range(p):
        seen = [False] * p
        stack = list(out[source])
        while stack:
            v = stack.pop()
            if seen[v]:
                continue
            seen[v] = True
            stack.extend(out[v])
        closure_edges.extend((source, v) for v in range(p) if seen[v] and v != source)
    return build_graph(EdgeInput(p, {"-->": closure_edges}), DAG_SIGNATURE)


def latent_projection(g: Graph, L: Iterable[int]) -> Graph:
    """Project a DAG over the latent set L onto an ADMG over V minus L.

    One reach call per observed source and table: directed edges follow
    directed paths through L, bidirected edges follow backward-then-
    forward paths through L.
    """
    _check_acyclic(g)
    latents = {int(v) for v in L}
    dir_table = table("latent_dir")
    bidir_table = table("latent_bidir")
    observed = [v for v in range(g.p) if v not in latents]
    directed: list[tuple[int, int]] = []
    bidirected: set[tuple[int, int]] = set()
    for v in observed:
        sets = {"X": {v}, "L": latents}
        directed.extend((v, w) for w in sorted(reach(g, sets, dir_table)) if w != v)
        for w in reach(g, sets, bidir_table):
            if w != v:
                bidirected.add((min(v, w), max(v, w)))
    return build_graph(
        EdgeInput(g.p, {"-->": directed, "<->": sorted(bidirected)}),
        ADMG_SIGNATURE)


def tc_via_latent_projection(g: Graph) -> Graph:
    """Transitive closure of a DAG computed through a latent projection.

    Builds the three-layer graph with source copies feeding the original
    nodes and the original nodes feeding target copies, projects over
    the middle layer, and reads closure edges off source-to-target pairs.
    """
    _check_acyclic(g)
    p = g.p
    # Layout: source copy of i at i, original i at p + i, target copy at 2p + i.
    pairs = [(i, p + i) for i in range(p)]
    pairs += [(p + i, 2 * p + i) for i in range(p)]
    pairs += [(p + int(u), p + int(v)) for u, v in g.edges.get("-->", ())]
    layered = build_graph(EdgeInput(3 * p, {"-->": pairs}), DAG_SIGNATURE)
    projected = latent_projection(layered, range(p, 2 * p))
    closure_edges = []
    for u, v in projected.edges.get("-->", ()):
        u, v = int(u), int(v)
        if u < p and v >= 2 * p and v - 2 * p != u:
            closure_edges.append((u, v - 2 * p))
    return build_graph(EdgeInput(p, {"-->": sorted(closure_edges)}), DAG_SIGNATURE)


# ---------------------------------------------------------------------------
# JSON boundary


def matrix_from_json(obj: Mapping) -> np.ndarray:
    rows, cols = int(obj["rows"]), int(obj["cols"])
    arr = np.asarray(obj["data"], dtype=np.int64)
    if arr.shape != (rows, cols):
        raise DimensionMismatchError(
            f"data has shape {arr.shape}, expected ({rows}, {cols})")
    return arr.astype(bool)


def matrix_to_json(arr: np.ndarray) -> dict:
    arr = _as_bool_matrix(arr, "matrix")
    return {
        "rows": int(arr.shape[0]),
        "cols": int(arr.shape[1]),
        "data": arr.astype(int).tolist(),
    }
