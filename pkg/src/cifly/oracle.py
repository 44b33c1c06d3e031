"""Brute-force reference implementations and random-instance generators.

Everything here exists to check the fast paths and is deliberately
definition-literal: state spaces are materialized in full, d-separation
enumerates simple paths, walk-quantified criteria enumerate walks whose
(node, arrival-mark) states are distinct (an open walk always shrinks to
one of that form, because two occurrences of a node with the same
arrival mark can be cut), and equivalence classes of DAGs are built by
trying every orientation.  Oracles hard-cap the instance size and raise
instead of silently running exponential searches.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Mapping, Optional, Union

import numpy as np

from .causal import admg, cpdag, dag
from .errors import (
    CyclicInputError,
    OverlappingSetsError,
    SignatureMismatchError,
    TooLargeError,
)
from .graph import Graph, SetAssignment
from .ruletable import (
    And,
    CasePattern,
    Expression,
    Literal,
    Membership,
    Not,
    Or,
    OrderedEdge,
    RuleTable,
)

__all__ = [
    "GenConfig",
    "StateSpace",
    "explicit_state_space",
    "reach_bruteforce",
    "dsep_bruteforce",
    "adjustment_oracle",
    "iv_valid_oracle",
    "latent_projection_oracle",
    "dis_plus",
    "optimal_iv_oracle",
    "parent_aid_bruteforce",
    "random_instance",
    "enumerate_cpdag",
    "dag_to_cpdag",
]

_MAX_ORACLE_P = 12

StateTriple = tuple[int, str, Optional[str]]


# ---------------------------------------------------------------------------
# Materialized state spaces


@dataclass
class StateSpace:
    """Fully constructed reachability instance for one reduction."""

    states: list[StateTriple]
    transitions: dict[StateTriple, list[StateTriple]]
    starts: set[StateTriple]


def _eval_expr(expr: Expression, members: Mapping[str, set[int]],
               v1: int, v2: int) -> bool:
    if isinstance(expr, Literal):
        return expr.value
    if isinstance(expr, Membership):
        node = v1 if expr.subject == "current" else v2
        inside = node in members[expr.symbol]
        return not inside if expr.negated else inside
    if isinstance(expr, Not):
        return not _eval_expr(expr.operand, members, v1, v2)
    if isinstance(expr, And):
        return (_eval_expr(expr.left, members, v1, v2)
                and _eval_expr(expr.right, members, v1, v2))
    if isinstance(expr, Or):
        return (_eval_expr(expr.left, members, v1, v2)
                or _eval_expr(expr.right, members, v1, v2))
    raise TypeError(f"unknown expression node {expr!r}")


def _matches(pattern: CasePattern, nt: str, color: Optional[str]) -> bool:
    if pattern.neighbor_types is not None and nt not in pattern.neighbor_types:
        return False
    if pattern.colors is not None and color not in pattern.colors:
        return False
    return True


def _set_mapping(graph: Graph, sets: Union[SetAssignment, Mapping]) -> dict[str, set[int]]:
    if isinstance(sets, SetAssignment):
        return {symbol: set(arr.tolist()) for symbol, arr in sets.sets.items()}
    return {symbol: {int(v) for v in values} for symbol, values in sets.items()}


def explicit_state_space(graph: Graph, sets: Union[SetAssignment, Mapping],
                         table: RuleTable) -> StateSpace:
    """Materialize every state and transition of the reduction."""
    if graph.signature != table.signature:
        raise SignatureMismatchError(
            "graph and rule table declare different edge signatures")
    members = _set_mapping(graph, sets)
    colors = table.color_names()
    nts = table.signature.neighbor_types()
    states: list[StateTriple] = [(v, n, c) for v in range(graph.p)
                                 for n in nts for c in colors]
    transitions: dict[StateTriple, list[StateTriple]] = {s: [] for s in states}

    traversals: list[tuple[int, int, str]] = []
    for decl in table.signature.decls:
        if isinstance(decl, OrderedEdge):
            for u, v in graph.edges.get(decl.forward, ()):
                traversals.append((int(u), int(v), decl.forward))
                traversals.append((int(v), int(u), decl.backward))
        else:
            for u, v in graph.edges.get(decl.token, ()):
                traversals.append((int(u), int(v), decl.token))
                traversals.append((int(v), int(u), decl.token))

    for v1, v2, n2 in traversals:
        for n1 in nts:
            for c1 in colors:
                for c2 in colors:
                    for rule in table.rules:
                        if _matches(rule.current, n1, c1) and _matches(rule.next, n2, c2):
                            if _eval_expr(rule.expr, members, v1, v2):
                                transitions[(v1, n1, c1)].append((v2, n2, c2))
                            break

    starts: set[StateTriple] = set()
    for spec in table.starts:
        for v in members[spec.symbol]:
            for n in (spec.neighbor_types or nts):
                for c in (spec.colors or colors):
                    starts.add((v, n, c))
    return StateSpace(states, transitions, starts)


def reach_bruteforce(graph: Graph, sets: Union[SetAssignment, Mapping],
                     table: RuleTable) -> set[int]:
    """Breadth-first reachability on the materialized state space."""
    space = explicit_state_space(graph, sets, table)
    visited = set(space.starts)
    frontier = list(space.starts)
    while frontier:
        state = frontier.pop()
        for nxt in space.transitions[state]:
            if nxt not in visited:
                visited.add(nxt)
                frontier.append(nxt)
    out: set[int] = set()
    for v, n, c in visited:
        for spec in table.outputs:
            if _matches(CasePattern(spec.neighbor_types, spec.colors), n, c):
                out.add(v)
                break
    return out


# ---------------------------------------------------------------------------
# Shared path helpers (edge-list level, independent of the engine)


def _check_size(p: int) -> None:
    if p > _MAX_ORACLE_P:
        raise TooLargeError(f"oracle capped at p <= {_MAX_ORACLE_P}, got {p}")


def _check_disjoint(**named: Iterable[int]) -> dict[str, set[int]]:
    out = {name: set(int(v) for v in vals) for name, vals in named.items()}
    names = list(out)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            if out[a] & out[b]:
                raise OverlappingSetsError(f"sets {a} and {b} overlap")
    return out


def _directed_reach(p: int, pairs, sources: Iterable[int],
                    blocked: Iterable[int] = ()) -> set[int]:
    """Nodes with a directed path from sources avoiding blocked nodes."""
    blocked = set(blocked)
    out: list[list[int]] = [[] for _ in range(p)]
    for u, v in pairs:
        out[int(u)].append(int(v))
    seen = {int(s) for s in sources if int(s) not in blocked}
    stack = list(seen)
    while stack:
        v = stack.pop()
        for w in out[v]:
            if w not in seen and w not in blocked:
                seen.add(w)
                stack.append(w)
    return seen


def _directed_coreach(p: int, pairs, targets: Iterable[int],
                      blocked: Iterable[int] = ()) -> set[int]:
    reversed_pairs = [(v, u) for u, v in pairs]
    return _directed_reach(p, reversed_pairs, targets, blocked)


def _mixed_reach(p: int, directed, undirected, sources: Iterable[int],
                 blocked: Iterable[int] = ()) -> set[int]:
    """Possibly-directed reachability: directed edges forward, undirected
    edges both ways, never entering a blocked node."""
    both = list(directed) + [(v, u) for u, v in undirected] + list(undirected)
    return _directed_reach(p, both, sources, blocked)


# ---------------------------------------------------------------------------
# d-separation in ADMGs (simple paths, colliders open through ancestors of Z)


def _admg_incidence(p: int, directed, bidirected):
    """incidence[v] lists (neighbor, head_at_v, head_at_neighbor)."""
    inc: list[list[tuple[int, bool, bool]]] = [[] for _ in range(p)]
    for u, v in directed:
        u, v = int(u), int(v)
        if u == v:
            continue
        inc[u].append((v, False, True))
        inc[v].append((u, True, False))
    for u, v in bidirected:
        u, v = int(u), int(v)
        if u == v:
            continue
        inc[u].append((v, True, True))
        inc[v].append((u, True, True))
    return inc


def _admg_dconnected(p: int, directed, bidirected, X: set[int], Y: set[int],
                     Z: set[int]) -> bool:
    """Path-based d-connection: a simple path is open when its colliders
    are ancestors of Z and its non-colliders avoid Z."""
    inc = _admg_incidence(p, directed, bidirected)
    an_z = _directed_coreach(p, [(int(u), int(v)) for u, v in directed], Z)

    def extend(node: int, head_in: Optional[bool], on_path: set[int]) -> bool:
        for nbr, head_here, head_nbr in inc[node]:
            if nbr in on_path:
                continue
            if head_in is not None:
                collider = head_in and head_here
                if collider and node not in an_z:
                    continue
                if not collider and node in Z:
                    continue
            if nbr in Y:
                return True
            if extend(nbr, head_nbr, on_path | {nbr}):
                return True
        return False

    if X & Y:
        return True
    return any(extend(x, None, {x}) for x in X)


def dsep_bruteforce(graph: Graph, X: Iterable[int], Y: Iterable[int],
                    Z: Iterable[int]) -> bool:
    """Whether X and Y are d-separated given Z, by path enumeration."""
    _check_size(graph.p)
    sets = _check_disjoint(X=X, Y=Y, Z=Z)
    return not _admg_dconnected(
        graph.p, graph.edge_pairs("-->"), graph.edge_pairs("<->"),
        sets["X"], sets["Y"], sets["Z"])


# ---------------------------------------------------------------------------
# CPDAG walk enumeration (definite-status walks over directed + undirected
# edges; marks are H = arrowhead at the node, T = tail, U = undirected)


def _cpdag_incidence(p: int, directed, undirected):
    inc: list[list[tuple[int, str, str]]] = [[] for _ in range(p)]
    for u, v in directed:
        u, v = int(u), int(v)
        inc[u].append((v, "T", "H"))
        inc[v].append((u, "H", "T"))
    for u, v in undirected:
        u, v = int(u), int(v)
        inc[u].append((v, "U", "U"))
        inc[v].append((u, "U", "U"))
    return inc


def _cpdag_open_walk_exists(p: int, directed, undirected, X: set[int],
                            Y: set[int], W: set[int]) -> bool:
    """Open almost-definite-status walk from X to Y given W.

    Walks are enumerated with distinct (node, arrival-mark) states; an
    open walk always contains one of that shape, since two occurrences
    of a node with equal arrival marks splice into a shorter open walk.
    """
    inc = _cpdag_incidence(p, directed, undirected)

    def extend(node: int, in_mark: Optional[str],
               used: frozenset[tuple[int, str]]) -> bool:
        for nbr, mark_here, mark_nbr in inc[node]:
            if in_mark is not None:
                if in_mark == "H" and mark_here == "U":
                    continue
                if in_mark == "U" and mark_here == "H":
                    continue
                collider = in_mark == "H" and mark_here == "H"
                if collider and node not in W:
                    continue
                if not collider and node in W:
                    continue
            if nbr in Y:
                return True
            state = (nbr, mark_nbr)
            if state in used:
                continue
            if extend(nbr, mark_nbr, used | {state}):
                return True
        return False

    if X & Y:
        return True
    return any(extend(x, None, frozenset()) for x in X)


def _cpdag_not_amenable_set(p: int, directed, undirected, X: set[int]) -> set[int]:
    """Nodes reached by a proper possibly directed walk from X starting
    with an undirected edge."""
    first: set[int] = set()
    for u, v in undirected:
        u, v = int(u), int(v)
        if u in X and v not in X:
            first.add(v)
        if v in X and u not in X:
            first.add(u)
    return _mixed_reach(p, directed, undirected, first, blocked=X) if first else set()


# ---------------------------------------------------------------------------
# Adjustment in CPDAGs


def _cpdag_causal_and_forbidden(p, directed, undirected, X: set[int], Y: set[int]):
    possde_x = _mixed_reach(p, directed, undirected, X)
    possan_y = _mixed_reach(p, [(v, u) for u, v in directed], undirected, Y,
                            blocked=X)
    causal = possde_x & possan_y
    forb = _mixed_reach(p, directed, undirected, causal) | X
    return causal, forb


def adjustment_oracle(graph: Graph, X: Iterable[int], Y: Iterable[int],
                      W: Iterable[int]) -> bool:
    """Adjustment validity relative to (X, Y) in a CPDAG, checked from
    the definitions: amenability, forbidden-set avoidance, and blocked
    walks in the graph with the causal edges out of X removed."""
    _check_size(graph.p)
    sets = _check_disjoint(X=X, Y=Y, W=W)
    X, Y, W = sets["X"], sets["Y"], sets["W"]
    p = graph.p
    directed = graph.edge_pairs("-->")
    undirected = graph.edge_pairs("---")

    if _cpdag_not_amenable_set(p, directed, undirected, X) & Y:
        return False
    causal, forb = _cpdag_causal_and_forbidden(p, directed, undirected, X, Y)
    if forb & W:
        return False
    deleted = [(u, v) for u, v in directed
               if not (int(u) in X and int(v) in causal)]
    return not _cpdag_open_walk_exists(p, deleted, undirected, X, Y, W)


def parent_aid_bruteforce(g_true: Graph, g_guess: Graph) -> int:
    """Parent adjustment distance by per-pair definitional checks."""
    _check_size(g_true.p)
    p = g_true.p
    dir_true = g_true.edge_pairs("-->")
    und_true = g_true.edge_pairs("---")
    dir_guess = g_guess.edge_pairs("-->")
    und_guess = g_guess.edge_pairs("---")
    parents: list[set[int]] = [set() for _ in range(p)]
    for u, v in dir_guess:
        parents[int(v)].add(int(u))
    mistakes = 0
    for x in range(p):
        pa = parents[x]
        nam_guess = _cpdag_not_amenable_set(p, dir_guess, und_guess, {x})
        nam_true = _cpdag_not_amenable_set(p, dir_true, und_true, {x})
        possde_true = _mixed_reach(p, dir_true, und_true, {x})
        for y in range(p):
            if y == x:
                continue
            if y in pa:
                if y in possde_true:
                    mistakes += 1
            elif y in nam_guess:
                if y not in nam_true:
                    mistakes += 1
            elif not adjustment_oracle(g_true, {x}, {y}, pa):
                mistakes += 1
    return mistakes


# ---------------------------------------------------------------------------
# Conditional instrumental sets


def _admg_causal_and_forbidden(p, directed, x: int, y: int):
    de_x = _directed_reach(p, directed, {x})
    an_y = _directed_coreach(p, directed, {y}, blocked={x})
    causal = de_x & an_y
    forb = _directed_reach(p, directed, causal) | {x}
    return causal, forb


def iv_valid_oracle(graph: Graph, x: int, y: int, Z: Iterable[int],
                    W: Iterable[int]) -> bool:
    """Conditional-instrument validity from the three-part criterion:
    Z and W avoid the forbidden nodes, Z is d-connected to x given W,
    and Z is d-separated from y given W once the causal edges out of x
    are removed."""
    _check_size(graph.p)
    sets = _check_disjoint(xy={x, y}, Z=Z, W=W)
    Z, W = sets["Z"], sets["W"]
    p = graph.p
    directed = graph.edge_pairs("-->")
    bidirected = graph.edge_pairs("<->")
    causal, forb = _admg_causal_and_forbidden(p, directed, x, y)
    if (Z | W) & forb:
        return False
    if not Z:
        return False
    if not _admg_dconnected(p, directed, bidirected, {x}, Z, W):
        return False
    deleted = [(u, v) for u, v in directed
               if not (int(u) == x and int(v) in causal)]
    return not _admg_dconnected(p, deleted, bidirected, {y}, Z, W)


def dis_plus(graph: Graph, W: Iterable[int], u: int) -> set[int]:
    """The district of u avoiding W, together with its parents, minus W."""
    _check_size(graph.p)
    W = {int(v) for v in W}
    nbrs: list[list[int]] = [[] for _ in range(graph.p)]
    for a, b in graph.edge_pairs("<->"):
        nbrs[int(a)].append(int(b))
        nbrs[int(b)].append(int(a))
    district = {int(u)} if int(u) not in W else set()
    stack = list(district)
    while stack:
        v = stack.pop()
        for w in nbrs[v]:
            if w not in district and w not in W:
                district.add(w)
                stack.append(w)
    parents = {int(a) for a, b in graph.edge_pairs("-->") if int(b) in district}
    return (district | parents) - W


def optimal_iv_oracle(graph: Graph, x: int,
                      y: int) -> Optional[tuple[set[int], set[int]]]:
    """The optimal pair computed the slow way: latent-project the ADMG
    over the descendants of x other than x and y, then apply the
    district formulas in the projected graph."""
    _check_size(graph.p)
    if x == y:
        raise OverlappingSetsError("x and y must differ")
    de_x = _directed_reach(graph.p, graph.edge_pairs("-->"), {x})
    if y not in de_x:
        return None
    projected = latent_projection_oracle(graph, de_x - {x, y})
    W_opt = dis_plus(projected, {x}, y) - {x, y}
    Z_opt = dis_plus(projected, {y}, x) - W_opt - {x, y}
    if not Z_opt:
        return None
    return Z_opt, W_opt


# ---------------------------------------------------------------------------
# Latent projection by path enumeration


def latent_projection_oracle(graph: Graph, L: Iterable[int]) -> Graph:
    """Latent projection over L from the path definitions.

    Directed edges follow directed paths with interior in L; bidirected
    edges follow simple paths whose end edges point at both endpoints
    and whose interior nodes are non-colliders in L.  Accepts DAG or
    ADMG inputs (bidirected input edges carry heads at both ends).
    """
    _check_size(graph.p)
    p = graph.p
    latents = {int(v) for v in L}
    directed = graph.edge_pairs("-->")
    bidirected = graph.edge_pairs("<->")
    observed = [v for v in range(p) if v not in latents]

    out: list[list[int]] = [[] for _ in range(p)]
    for u, v in directed:
        out[int(u)].append(int(v))
    proj_directed: list[tuple[int, int]] = []
    for a in observed:
        seen: set[int] = set()
        stack = list(out[a])
        hits: set[int] = set()
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            if v in latents:
                stack.extend(out[v])
            elif v != a:
                hits.add(v)
        proj_directed.extend((a, v) for v in sorted(hits))

    inc = _admg_incidence(p, directed, bidirected)
    proj_bidirected: set[tuple[int, int]] = set()

    def walk(node: int, head_in: bool, on_path: set[int], source: int) -> None:
        # node is latent here; continue over non-collider interiors.
        for nbr, head_here, head_nbr in inc[node]:
            if nbr in on_path:
                continue
            if head_in and head_here:
                continue  # collider at an interior node
            if nbr in latents:
                walk(nbr, head_nbr, on_path | {nbr}, source)
            elif head_nbr and nbr != source:
                proj_bidirected.add((min(source, nbr), max(source, nbr)))

    for a in observed:
        for nbr, head_a, head_nbr in inc[a]:
            if not head_a:
                continue  # first edge must point at the source endpoint
            if nbr in latents:
                walk(nbr, head_nbr, {a, nbr}, a)
            elif head_nbr and nbr != a:
                proj_bidirected.add((min(a, nbr), max(a, nbr)))

    return admg(p, sorted(proj_directed), sorted(proj_bidirected))


# ---------------------------------------------------------------------------
# Random instances and equivalence classes


@dataclass(frozen=True)
class GenConfig:
    """Recipe for one random instance."""

    p: int
    degree: float
    seed: int
    kind: str  # "dag" | "admg" | "cpdag"
    bidirected_degree: float = 1.0

    def __post_init__(self):
        if self.p < 1:
            raise ValueError("p must be at least 1")
        if self.degree < 0 or self.bidirected_degree < 0:
            raise ValueError("degrees must be nonnegative")


def _distinct_uniform(rng: np.random.Generator, total: int, count: int) -> np.ndarray:
    """Uniform random subset of size count from range(total)."""
    if count == 0:
        return np.empty(0, dtype=np.int64)
    if total <= 4_000_000:
        return rng.choice(total, size=count, replace=False).astype(np.int64)
    draws = np.empty(0, dtype=np.int64)
    while True:
        batch = rng.integers(0, total, size=max(count * 2, 1024), dtype=np.int64)
        draws = np.concatenate([draws, batch])
        _, first = np.unique(draws, return_index=True)
        if first.size >= count:
            ordered = draws[np.sort(first)]
            return ordered[:count]


def _er_undirected_pairs(rng: np.random.Generator, p: int,
                         degree: float) -> np.ndarray:
    """Erdos-Renyi undirected edge set with expected average degree."""
    if p < 2 or degree <= 0:
        return np.empty((0, 2), dtype=np.int64)
    total = p * (p - 1) // 2
    q = min(1.0, degree / (p - 1))
    count = int(rng.binomial(total, q))
    chosen = _distinct_uniform(rng, total, count)
    # Unrank lexicographic pair indices: row u covers s(u) .. s(u+1)-1.
    u_range = np.arange(p, dtype=np.int64)
    starts = u_range * (p - 1) - (u_range * (u_range - 1)) // 2
    u = np.searchsorted(starts, chosen, side="right") - 1
    v = chosen - starts[u] + u + 1
    return np.stack([u, v], axis=1)


def _orient_by_order(rng: np.random.Generator, p: int,
                     pairs: np.ndarray) -> np.ndarray:
    position = np.empty(p, dtype=np.int64)
    position[rng.permutation(p)] = np.arange(p)
    if pairs.shape[0] == 0:
        return pairs
    u, v = pairs[:, 0], pairs[:, 1]
    swap = position[u] > position[v]
    return np.stack([np.where(swap, v, u), np.where(swap, u, v)], axis=1)


def random_instance(cfg: GenConfig) -> Graph:
    """Reproducible random graph of the requested kind."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.kind == "dag":
        pairs = _er_undirected_pairs(rng, cfg.p, cfg.degree)
        return dag(cfg.p, _orient_by_order(rng, cfg.p, pairs))
    if cfg.kind == "admg":
        bidir = [tuple(map(int, pair))
                 for pair in _er_undirected_pairs(rng, cfg.p, cfg.bidirected_degree)]
        directed = _orient_by_order(
            rng, cfg.p, _er_undirected_pairs(rng, cfg.p, cfg.degree))
        return admg(cfg.p, directed, bidir)
    if cfg.kind == "cpdag":
        pairs = _er_undirected_pairs(rng, cfg.p, cfg.degree)
        base = dag(cfg.p, _orient_by_order(rng, cfg.p, pairs))
        return dag_to_cpdag(base)
    raise ValueError(f"unknown instance kind {cfg.kind!r}")


def _vstructures(p: int, pairs: list[tuple[int, int]]) -> frozenset:
    parents: list[set[int]] = [set() for _ in range(p)]
    adjacent: set[frozenset[int]] = set()
    for u, v in pairs:
        parents[v].add(u)
        adjacent.add(frozenset((u, v)))
    found = set()
    for c in range(p):
        pa = sorted(parents[c])
        for i in range(len(pa)):
            for j in range(i + 1, len(pa)):
                if frozenset((pa[i], pa[j])) not in adjacent:
                    found.add((pa[i], pa[j], c))
    return frozenset(found)


def _is_acyclic(p: int, pairs: list[tuple[int, int]]) -> bool:
    out: list[list[int]] = [[] for _ in range(p)]
    indeg = [0] * p
    for u, v in pairs:
        out[u].append(v)
        indeg[v] += 1
    queue = [v for v in range(p) if indeg[v] == 0]
    seen = 0
    while queue:
        v = queue.pop()
        seen += 1
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    return seen == p


def enumerate_cpdag(graph: Graph) -> Graph:
    """CPDAG of the input DAG's equivalence class by trying every
    orientation of the skeleton and keeping those with the same
    v-structures; the union of the survivors is the CPDAG."""
    p = graph.p
    if p > 7:
        raise TooLargeError("brute-force equivalence classes capped at p <= 7")
    pairs = [(int(u), int(v)) for u, v in graph.edge_pairs("-->")]
    if not _is_acyclic(p, pairs):
        raise CyclicInputError("input must be a DAG")
    skeleton = sorted({(min(u, v), max(u, v)) for u, v in pairs})
    target = _vstructures(p, pairs)
    m = len(skeleton)
    union: set[tuple[int, int]] = set()
    members = 0
    for mask in range(1 << m):
        candidate = [(u, v) if mask >> i & 1 else (v, u)
                     for i, (u, v) in enumerate(skeleton)]
        if not _is_acyclic(p, candidate):
            continue
        if _vstructures(p, candidate) != target:
            continue
        members += 1
        union.update(candidate)
    assert members >= 1, "the input DAG itself must survive"
    directed = sorted((u, v) for (u, v) in union if (v, u) not in union)
    undirected = sorted({(min(u, v), max(u, v))
                         for (u, v) in union if (v, u) in union})
    return cpdag(p, directed, undirected)


def dag_to_cpdag(graph: Graph) -> Graph:
    """Compelled-edge labeling of a DAG (order-based, any size).

    The brute-force enumeration is the source of truth; this labeling is
    for benchmarks and generators and is tested against it.
    """
    p = graph.p
    pairs = sorted({(int(u), int(v)) for u, v in graph.edge_pairs("-->")})
    if not _is_acyclic(p, pairs):
        raise CyclicInputError("input must be a DAG")
    out: list[list[int]] = [[] for _ in range(p)]
    indeg = [0] * p
    for u, v in pairs:
        out[u].append(v)
        indeg[v] += 1
    topo: list[int] = []
    queue = [v for v in range(p) if indeg[v] == 0]
    while queue:
        v = queue.pop()
        topo.append(v)
        for w in out[v]:
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    pos = {v: i for i, v in enumerate(topo)}

    ordered = sorted(pairs, key=lambda e: (pos[e[1]], -pos[e[0]]))
    label: dict[tuple[int, int], Optional[bool]] = {e: None for e in ordered}
    parents: list[set[int]] = [set() for _ in range(p)]
    for u, v in pairs:
        parents[v].add(u)

    for x, y in ordered:
        if label[(x, y)] is not None:
            continue
        done = False
        for w in sorted(parents[x]):
            if label[(w, x)] is True:
                if w not in parents[y]:
                    for z in parents[y]:
                        label[(z, y)] = True
                    done = True
                    break
                label[(w, y)] = True
        if done:
            continue
        if any(z != x and z not in parents[x] for z in parents[y]):
            value = True
        else:
            value = False
        for z in parents[y]:
            if label[(z, y)] is None:
                label[(z, y)] = value

    directed = sorted(e for e, compelled in label.items() if compelled)
    undirected = sorted({(min(u, v), max(u, v))
                         for (u, v), compelled in label.items() if not compelled})
    return cpdag(p, directed, undirected)
