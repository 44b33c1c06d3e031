"""Bundled rule tables and the composite causal algorithms built on them.

The catalog maps stable names to the table assets shipped under
``cifly/tables/<graph-class>/<name>.txt``.  The algorithms chain a small
number of reach calls with set algebra, mirroring their published
linear-time formulations: d-separation and adjustment verification,
the parent adjustment distance, and the conditional-instrument suite
(verify-all, graphically optimal pair, sound-and-complete finder).
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from importlib import resources
from typing import Iterable, Optional

from .engine import reach
from .errors import (
    EmptyZError,
    OverlappingSetsError,
    SizeMismatchError,
    StartOutsideAError,
)
from .graph import (
    ADMG_SIGNATURE,
    CPDAG_SIGNATURE,
    DAG_SIGNATURE,
    EdgeInput,
    Graph,
    build_graph,
    remove_directed_edges,
)
from .ruletable import RuleTable, parse_rule_table

__all__ = [
    "TABLE_CATALOG",
    "table",
    "table_text",
    "IvResult",
    "dag",
    "admg",
    "cpdag",
    "dconnected_admg",
    "test_dsep",
    "ancestors",
    "descendants",
    "possible_ancestors",
    "possible_descendants",
    "adjustment_check_cpdag",
    "parent_aid",
    "iv_verify_all",
    "iv_optimal",
    "closure",
    "nearest_separator",
    "iv_find",
]

TABLE_CATALOG = {
    "dag_dsep": "dag/dsep.txt",
    "admg_dsep": "admg/dsep.txt",
    "admg_anc": "admg/anc.txt",
    "admg_desc": "admg/desc.txt",
    "cpdag_not_amenable": "cpdag/not_amenable.txt",
    "cpdag_poss_anc": "cpdag/poss_anc.txt",
    "cpdag_poss_desc": "cpdag/poss_desc.txt",
    "cpdag_backdoor": "cpdag/backdoor.txt",
    "iv_causal_blocked": "admg/iv_causal_blocked.txt",
    "iv_non_causal": "admg/iv_non_causal.txt",
    "iv_optimal": "admg/iv_optimal.txt",
    "closure": "admg/closure.txt",
    "aid_forbidden": "cpdag/aid_forbidden.txt",
    "aid_non_causal": "cpdag/aid_non_causal.txt",
    "latent_dir": "dag/latent_dir.txt",
    "latent_bidir": "dag/latent_bidir.txt",
}


@lru_cache(maxsize=None)
def table_text(name: str) -> str:
    """Raw text of a bundled table asset."""
    rel = TABLE_CATALOG[name]
    return (resources.files(__package__) / "tables" / rel).read_text()


@lru_cache(maxsize=None)
def table(name: str) -> RuleTable:
    """Parsed bundled table, cached per name."""
    return parse_rule_table(table_text(name))


@dataclass(frozen=True)
class IvResult:
    """A conditional instrumental pair plus the graphical-optimality flag."""

    Z: frozenset[int]
    W: frozenset[int]
    graphically_optimal: bool


# ---------------------------------------------------------------------------
# Graph constructors


def dag(p: int, edges=()) -> Graph:
    """Directed graph over the DAG signature (acyclicity is not checked)."""
    return build_graph(EdgeInput(p, {"-->": edges}), DAG_SIGNATURE)


def admg(p: int, directed=(), bidirected=()) -> Graph:
    return build_graph(
        EdgeInput(p, {"-->": directed, "<->": bidirected}), ADMG_SIGNATURE)


def cpdag(p: int, directed=(), undirected=()) -> Graph:
    return build_graph(
        EdgeInput(p, {"-->": directed, "---": undirected}), CPDAG_SIGNATURE)


def _require_disjoint(**named_sets: Iterable[int]) -> dict[str, set[int]]:
    materialized = {name: set(values) for name, values in named_sets.items()}
    names = list(materialized)
    for i, a in enumerate(names):
        for b in names[i + 1:]:
            overlap = materialized[a] & materialized[b]
            if overlap:
                raise OverlappingSetsError(
                    f"sets {a} and {b} overlap on {sorted(overlap)}")
    return materialized


# ---------------------------------------------------------------------------
# d-separation


def dconnected_admg(g: Graph, X: Iterable[int], Z: Iterable[int]) -> set[int]:
    """All nodes d-connected to X given Z in an ADMG, including X."""
    sets = _require_disjoint(X=X, Z=Z)
    return reach(g, {"X": sets["X"], "Z": sets["Z"]}, table("admg_dsep"))


def test_dsep(g: Graph, X: Iterable[int], Y: Iterable[int],
              Z: Iterable[int]) -> bool:
    """Whether X and Y are d-separated given Z in an ADMG."""
    sets = _require_disjoint(X=X, Y=Y, Z=Z)
    return not (sets["Y"] & dconnected_admg(g, sets["X"], sets["Z"]))


# ---------------------------------------------------------------------------
# Ancestral relations


def ancestors(g: Graph, X: Iterable[int]) -> set[int]:
    """Ancestors of X (including X) in an ADMG."""
    return reach(g, {"X": set(X)}, table("admg_anc"))


def descendants(g: Graph, X: Iterable[int]) -> set[int]:
    """Descendants of X (including X) in an ADMG."""
    return reach(g, {"X": set(X)}, table("admg_desc"))


def possible_ancestors(g: Graph, X: Iterable[int],
                       W: Iterable[int] = ()) -> set[int]:
    """Nodes with a possibly directed path to X avoiding W, in a CPDAG."""
    sets = _require_disjoint(X=X, W=W)
    return reach(g, {"X": sets["X"], "W": sets["W"]}, table("cpdag_poss_anc"))


def possible_descendants(g: Graph, X: Iterable[int]) -> set[int]:
    """Nodes with a possibly directed path from X, in a CPDAG."""
    return reach(g, {"X": set(X), "W": ()}, table("cpdag_poss_desc"))


# ---------------------------------------------------------------------------
# Adjustment


def adjustment_check_cpdag(g: Graph, X: Iterable[int], Y: Iterable[int],
                           W: Iterable[int]) -> bool:
    """Whether W is a valid adjustment set relative to (X, Y) in a CPDAG.

    Five reach calls: the amenability violations, the causal nodes (as
    possible ancestors of Y intersected with possible descendants of X),
    the forbidden nodes, and the open-walk connectivity with the edges
    from X into the causal nodes ignored in place of deleting them.
    """
    sets = _require_disjoint(X=X, Y=Y, W=W)
    X, Y, W = sets["X"], sets["Y"], sets["W"]
    not_amenable = reach(g, {"X": X}, table("cpdag_not_amenable"))
    anc = reach(g, {"X": Y, "W": X}, table("cpdag_poss_anc"))
    des = reach(g, {"X": X, "W": ()}, table("cpdag_poss_desc"))
    causal = anc & des
    forb = reach(g, {"X": causal, "W": ()}, table("cpdag_poss_desc"))
    if forb & W:
        return False
    if not_amenable & Y:
        return False
    connected = reach(g, {"X": X, "W": W, "C": causal}, table("cpdag_backdoor"))
    return not (connected & Y)


def parent_aid(g_true: Graph, g_guess: Graph, threads: int = 1) -> int:
    """Parent adjustment distance between two CPDAGs.

    For every treatment x, the candidate adjustment set is the parent
    set of x in ``g_guess``; a target y counts as a mistake when the
    guess claims a zero effect that the true graph contradicts, claims
    amenability the true graph lacks, or proposes parents that are not
    a valid adjustment set in the true graph.
    """
    if g_true.p != g_guess.p:
        raise SizeMismatchError(
            f"graphs disagree on node count ({g_true.p} vs {g_guess.p})")
    p = g_true.p
    parents: list[list[int]] = [[] for _ in range(p)]
    for u, v in g_guess.edges.get("-->", ()):
        parents[int(v)].append(int(u))

    not_amenable_t = table("cpdag_not_amenable")
    poss_desc_t = table("cpdag_poss_desc")
    forbidden_t = table("aid_forbidden")
    non_causal_t = table("aid_non_causal")

    def mistakes_for(x: int) -> int:
        pa = set(parents[x])
        nam_guess = reach(g_guess, {"X": {x}}, not_amenable_t)
        desc_true = reach(g_true, {"X": {x}, "W": ()}, poss_desc_t)
        nam_true = reach(g_true, {"X": {x}}, not_amenable_t)
        nad_true = (nam_true
                    | reach(g_true, {"X": {x}, "W": pa}, forbidden_t)
                    | reach(g_true, {"X": {x}, "W": pa}, non_causal_t))
        count = 0
        for y in range(p):
            if y == x:
                continue
            if y in pa:
                if y in desc_true:
                    count += 1
            elif y in nam_guess:
                if y not in nam_true:
                    count += 1
            elif y in nad_true:
                count += 1
        return count

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return sum(pool.map(mistakes_for, range(p)))
    return sum(mistakes_for(x) for x in range(p))


# ---------------------------------------------------------------------------
# Conditional instrumental sets


def _causal_nodes(g: Graph, x: int, y: int) -> set[int]:
    """de(x) intersected with the ancestors of y avoiding x, in an ADMG."""
    de_x = descendants(g, {x})
    incident = ([(int(x), int(v)) for u, v in g.edges.get("-->", ()) if int(u) == x]
                + [(int(u), int(x)) for u, v in g.edges.get("-->", ()) if int(v) == x])
    stripped = remove_directed_edges(g, incident, "-->")
    an_y = ancestors(stripped, {y}) - {x}
    return de_x & an_y


def _forbidden(g: Graph, x: int, y: int) -> set[int]:
    return descendants(g, _causal_nodes(g, x, y)) | {x}


def _deleted_causal_graph(g: Graph, x: int, y: int) -> Graph:
    """g with the directed edges from x into the causal nodes removed."""
    causal = _causal_nodes(g, x, y)
    pairs = [(int(u), int(v)) for u, v in g.edges.get("-->", ())
             if int(u) == x and int(v) in causal]
    return remove_directed_edges(g, pairs, "-->")


def iv_verify_all(g: Graph, x: int, Z: Iterable[int],
                  W: Iterable[int]) -> set[int]:
    """All y such that (Z, W) is a valid conditional instrumental set
    relative to (x, y) in an ADMG.

    Empty when Z is d-separated from x given W; otherwise the complement
    of the two violation sets (causal paths through W, open non-causal
    walks from Z) with x, Z and W removed.
    """
    sets = _require_disjoint(x={x}, Z=Z, W=W)
    Z, W = sets["Z"], sets["W"]
    if not Z:
        raise EmptyZError("Z must be nonempty")
    if not (dconnected_admg(g, {x}, W) & Z):
        return set()
    blocked = reach(g, {"X": {x}, "W": W}, table("iv_causal_blocked"))
    non_causal = reach(g, {"Z": Z, "X": {x}, "W": W}, table("iv_non_causal"))
    return set(range(g.p)) - blocked - non_causal - W - Z - {x}


def iv_optimal(g: Graph, x: int, y: int) -> Optional[IvResult]:
    """The graphically optimal conditional instrumental pair for (x, y).

    Returns ``None`` when y is not a descendant of x or when the
    instrument half comes out empty.  The optimality flag records
    whether the instrument set meets a parent or sibling of x.
    """
    if x == y:
        raise OverlappingSetsError("x and y must differ")
    de_x = descendants(g, {x})
    A = set(range(g.p)) - de_x
    opt = table("iv_optimal")
    W_opt = reach(g, {"S": {y}, "A": A, "B": de_x - {x}}, opt)
    Z_opt = reach(g, {"S": {x}, "A": A, "B": ()}, opt) - W_opt
    if y not in de_x or not Z_opt:
        return None
    pa_sib = {int(u) for u, v in g.edges.get("-->", ()) if int(v) == x}
    for u, v in g.edges.get("<->", ()):
        if int(u) == x:
            pa_sib.add(int(v))
        elif int(v) == x:
            pa_sib.add(int(u))
    return IvResult(frozenset(Z_opt), frozenset(W_opt),
                    bool(Z_opt & pa_sib))


def closure(g: Graph, X: Iterable[int], Z: Iterable[int],
            A: Iterable[int]) -> set[int]:
    """Nodes reachable from X by a walk inside A with no non-collider in Z.

    Walk endpoints carry no collider status, so callers keep X and Z
    disjoint (as the nearest-separator construction does).
    """
    X, Z, A = set(X), set(Z), set(A)
    if not X <= A:
        raise StartOutsideAError(f"start nodes {sorted(X - A)} are outside A")
    return reach(g, {"X": X, "Z": Z, "A": A}, table("closure"))


def nearest_separator(g: Graph, x: int, y: int,
                      R: Iterable[int]) -> Optional[set[int]]:
    """Nearest separator between x and y within R, or ``None``.

    Candidates are the members of R that are ancestors of {x, y}; the
    closure of x given those candidates runs over the full ancestral
    set, since blocked walks may pass through ancestors outside R.
    Reaching y means x and y cannot be separated within R.
    """
    if x == y:
        raise OverlappingSetsError("x and y must differ")
    R = set(R)
    an_xy = ancestors(g, {x, y})
    Z0 = (R & an_xy) - {x, y}
    closed = closure(g, {x}, Z0, an_xy)
    if y in closed:
        return None
    return Z0 & closed


def iv_find(g: Graph, x: int, y: int,
            exhaustive: bool = False) -> list[tuple[int, set[int]]]:
    """Find conditional instruments (z, W) relative to (x, y) in an ADMG.

    Candidates z outside the forbidden set are tried in ascending order;
    for each, a nearest separator between y and z is computed on the
    graph with the causal edges out of x removed, and the pair is kept
    when z stays d-connected to x given the separator.  Returns the
    first hit, or all hits in exhaustive mode; an empty list means no
    valid conditional instrumental set exists.
    """
    if x == y:
        raise OverlappingSetsError("x and y must differ")
    forb = _forbidden(g, x, y)
    stripped = _deleted_causal_graph(g, x, y)
    R = set(range(g.p)) - forb
    found: list[tuple[int, set[int]]] = []
    for z in sorted(R - {y}):
        W = nearest_separator(stripped, y, z, R)
        if W is None:
            continue
        if z in dconnected_admg(g, {x}, W):
            found.append((z, W))
            if not exhaustive:
                break
    return found
