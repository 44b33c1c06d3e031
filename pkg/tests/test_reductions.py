import numpy as np
import pytest

from cifly import oracle
from cifly.causal import dag
from cifly.errors import CyclicInputError, DimensionMismatchError
from cifly.reductions import (
    bmm_naive,
    bmm_via_moralize,
    latent_projection,
    matrix_from_json,
    matrix_to_json,
    moralize,
    tc_via_latent_projection,
    transitive_closure,
)

from conftest import edges_sorted

BMM_X = [[1, 1], [0, 1], [0, 1]]
BMM_Y = [[1, 0, 1, 0], [0, 0, 0, 1]]
BMM_PRODUCT = [[1, 0, 1, 1], [0, 0, 0, 1], [0, 0, 0, 1]]


def test_moralize_tripartite_example():
    # a1, a2, a3 = 0..2; b1, b2 = 3, 4; c1..c4 = 5..8
    g = dag(9, [(0, 3), (0, 4), (1, 4), (2, 4), (5, 3), (7, 3), (8, 4)])
    moral = moralize(g)
    skeleton = {(0, 3), (0, 4), (1, 4), (2, 4), (3, 5), (3, 7), (4, 8)}
    married = {(0, 1), (0, 2), (1, 2), (5, 7), (0, 5), (0, 7), (0, 8), (1, 8), (2, 8)}
    assert set(edges_sorted(moral, "---")) == skeleton | married


def test_moralize_chain_is_skeleton():
    moral = moralize(dag(3, [(0, 1), (1, 2)]))
    assert edges_sorted(moral, "---") == [(0, 1), (1, 2)]


def test_moralize_collider_is_triangle():
    moral = moralize(dag(3, [(0, 1), (2, 1)]))
    assert edges_sorted(moral, "---") == [(0, 1), (0, 2), (1, 2)]


def test_moralize_rejects_cycles():
    with pytest.raises(CyclicInputError):
        moralize(dag(2, [(0, 1), (1, 0)]))


def test_moralize_collider_free_equals_skeleton(rng):
    for _ in range(40):
        p = int(rng.integers(1, 9))
        g = oracle.random_instance(
            oracle.GenConfig(p, 2.0, int(rng.integers(2**31)), "dag"))
        parents = [[] for _ in range(p)]
        for u, v in g.edge_pairs("-->"):
            parents[v].append(u)
        if any(len(pa) > 1 for pa in parents):
            continue
        skeleton = sorted({(min(u, v), max(u, v)) for u, v in g.edge_pairs("-->")})
        assert edges_sorted(moralize(g), "---") == skeleton


def test_bmm_naive_example():
    assert bmm_naive(BMM_X, BMM_Y).astype(int).tolist() == BMM_PRODUCT


def test_bmm_identity_and_zero():
    eye = np.eye(5, dtype=bool)
    assert (bmm_naive(eye, eye) == eye).all()
    zero = np.zeros((3, 4), dtype=bool)
    anym = np.ones((4, 2), dtype=bool)
    assert not bmm_naive(zero, anym).any()


def test_bmm_dimension_mismatch():
    with pytest.raises(DimensionMismatchError):
        bmm_naive(np.ones((2, 3)), np.ones((2, 3)))


def test_bmm_via_moralize_example():
    assert bmm_via_moralize(BMM_X, BMM_Y).astype(int).tolist() == BMM_PRODUCT
    eye = np.eye(4, dtype=bool)
    assert (bmm_via_moralize(eye, eye) == eye).all()


def test_bmm_via_moralize_matches_naive(rng):
    for _ in range(120):
        p1, p2, p3 = (int(v) for v in rng.integers(1, 7, size=3))
        X = rng.random((p1, p2)) < 0.4
        Y = rng.random((p2, p3)) < 0.4
        assert (bmm_via_moralize(X, Y) == bmm_naive(X, Y)).all()


def test_transitive_closure_adds_transitive_edge():
    tc = transitive_closure(dag(4, [(0, 1), (1, 2), (3, 2)]))
    assert edges_sorted(tc, "-->") == [(0, 1), (0, 2), (1, 2), (3, 2)]


def test_transitive_closure_edgeless_and_cycle():
    assert edges_sorted(transitive_closure(dag(3)), "-->") == []
    cycle = transitive_closure(dag(3, [(0, 1), (1, 2), (2, 0)]))
    assert edges_sorted(cycle, "-->") == [(0, 1), (0, 2), (1, 0), (1, 2),
                                          (2, 0), (2, 1)]


def test_transitive_closure_matches_matrix_power(rng):
    for _ in range(40):
        p = int(rng.integers(1, 9))
        pairs = [(int(u), int(v))
                 for u, v in rng.integers(0, p, size=(int(rng.integers(0, 2 * p + 1)), 2))
                 if u != v]
        g = dag(p, pairs)
        adj = np.zeros((p, p), dtype=bool)
        for u, v in pairs:
            adj[u, v] = True
        power = adj.copy()
        closure = adj.copy()
        for _ in range(p):
            power = bmm_naive(power, adj)
            closure |= power
        np.fill_diagonal(closure, False)
        expected = sorted((int(u), int(v)) for u, v in zip(*np.nonzero(closure)))
        assert edges_sorted(transitive_closure(g), "-->") == expected


def test_latent_projection_layered_example():
    # source copies 0..3, originals 4..7, target copies 8..11
    p = 4
    pairs = [(i, p + i) for i in range(p)]
    pairs += [(p + i, 2 * p + i) for i in range(p)]
    pairs += [(p + u, p + v) for u, v in [(0, 1), (1, 2), (3, 2)]]
    projected = latent_projection(dag(12, pairs), range(4, 8))
    assert edges_sorted(projected, "-->") == [
        (0, 8), (0, 9), (0, 10), (1, 9), (1, 10), (2, 10), (3, 10), (3, 11)]
    assert edges_sorted(projected, "<->") == [(8, 9), (8, 10), (9, 10), (10, 11)]


def test_latent_projection_identity_and_one_step():
    g = dag(3, [(0, 1), (1, 2)])
    unchanged = latent_projection(g, [])
    assert edges_sorted(unchanged, "-->") == [(0, 1), (1, 2)]
    assert edges_sorted(unchanged, "<->") == []
    chain = latent_projection(g, [1])
    assert edges_sorted(chain, "-->") == [(0, 2)]
    assert edges_sorted(chain, "<->") == []
    fork = latent_projection(dag(3, [(1, 0), (1, 2)]), [1])
    assert edges_sorted(fork, "-->") == []
    assert edges_sorted(fork, "<->") == [(0, 2)]


def test_latent_projection_rejects_cycles():
    with pytest.raises(CyclicInputError):
        latent_projection(dag(2, [(0, 1), (1, 0)]), [0])


def test_latent_projection_matches_oracle(rng):
    for _ in range(120):
        p = int(rng.integers(1, 10))
        g = oracle.random_instance(
            oracle.GenConfig(p, 2.5, int(rng.integers(2**31)), "dag"))
        L = [int(v) for v in
             rng.choice(p, size=int(rng.integers(0, p + 1)), replace=False)]
        fast = latent_projection(g, L)
        slow = oracle.latent_projection_oracle(g, L)
        assert edges_sorted(fast, "-->") == edges_sorted(slow, "-->")
        assert edges_sorted(fast, "<->") == edges_sorted(slow, "<->")


def test_tc_via_latent_projection_matches_direct(rng):
    for _ in range(60):
        p = int(rng.integers(1, 11))
        g = oracle.random_instance(
            oracle.GenConfig(p, 2.5, int(rng.integers(2**31)), "dag"))
        assert edges_sorted(tc_via_latent_projection(g), "-->") == \
            edges_sorted(transitive_closure(g), "-->")


def test_tc_via_latent_projection_edge_cases():
    assert edges_sorted(tc_via_latent_projection(dag(3)), "-->") == []
    g = dag(4, [(0, 1), (1, 2), (3, 2)])
    assert edges_sorted(tc_via_latent_projection(g), "-->") == \
        edges_sorted(transitive_closure(g), "-->")
    with pytest.raises(CyclicInputError):
        tc_via_latent_projection(dag(2, [(0, 1), (1, 0)]))


def test_matrix_json_round_trip():
    arr = np.asarray(BMM_PRODUCT, dtype=bool)
    obj = matrix_to_json(arr)
    assert obj == {"rows": 3, "cols": 4, "data": BMM_PRODUCT}
    assert (matrix_from_json(obj) == arr).all()
    with pytest.raises(DimensionMismatchError):
        matrix_from_json({"rows": 2, "cols": 2, "data": [[1, 0]]})
