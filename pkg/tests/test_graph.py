import json

import numpy as np
import pytest

from cifly.causal import admg, dag, table
from cifly.engine import reach
from cifly.errors import NodeOutOfRangeError, UnknownEdgeTypeError
from cifly.graph import (
    ADMG_SIGNATURE,
    DAG_SIGNATURE,
    EdgeInput,
    SetAssignment,
    build_graph,
    graph_from_json,
    graph_to_json,
    remove_directed_edges,
)

from conftest import graphs_equal, random_graph_for


def test_demo_dag_adjacency():
    g = dag(5, [(0, 1), (2, 1), (2, 3), (1, 4)])
    assert g.neighbors(0, "-->").tolist() == [1]
    assert g.neighbors(0, "<--").tolist() == []
    assert sorted(g.neighbors(1, "<--").tolist()) == [0, 2]
    assert g.neighbors(1, "-->").tolist() == [4]
    assert g.neighbors(4, "<--").tolist() == [1]


def test_symmetric_storage_invariant(rng):
    for _ in range(30):
        p = int(rng.integers(1, 12))
        g = random_graph_for(ADMG_SIGNATURE, p, rng)
        for v in range(p):
            for w in g.neighbors(v, "-->").tolist():
                assert v in g.neighbors(w, "<--").tolist()
            for w in g.neighbors(v, "<->").tolist():
                assert v in g.neighbors(w, "<->").tolist()
        total = sum(g.indptr[-1:]).item()
        assert total == 2 * g.m


def test_isolated_node():
    g = dag(1)
    assert g.neighbors(0, "-->").tolist() == []
    assert g.neighbors(0, "<--").tolist() == []


def test_node_out_of_range():
    with pytest.raises(NodeOutOfRangeError):
        dag(5, [(0, 7)])


def test_unknown_edge_type():
    with pytest.raises(UnknownEdgeTypeError):
        build_graph(EdgeInput(3, {"<=>": [(0, 1)]}), DAG_SIGNATURE)


def test_duplicate_edges_preserved():
    g = dag(3, [(0, 1), (0, 1)])
    assert g.neighbors(0, "-->").tolist() == [1, 1]
    assert g.m == 2


def test_remove_directed_edges():
    g = admg(5, [(0, 1), (1, 2), (3, 0)], [(0, 2)])
    stripped = remove_directed_edges(g, [(0, 1)], "-->")
    assert stripped.neighbors(0, "-->").tolist() == []
    assert stripped.neighbors(1, "<--").tolist() == []
    assert sorted(stripped.edge_pairs("-->")) == [(1, 2), (3, 0)]
    assert sorted(stripped.edge_pairs("<->")) == [(0, 2)]
    # original untouched
    assert sorted(g.edge_pairs("-->")) == [(0, 1), (1, 2), (3, 0)]


def test_remove_directed_edges_noop_and_missing():
    g = admg(4, [(0, 1)], [])
    assert graphs_equal(remove_directed_edges(g, [], "-->"), g)
    assert graphs_equal(remove_directed_edges(g, [(2, 3)], "-->"), g)


def test_remove_directed_edges_rejects_unordered():
    g = admg(3, [(0, 1)], [(1, 2)])
    with pytest.raises(UnknownEdgeTypeError):
        remove_directed_edges(g, [(1, 2)], "<->")


def test_edge_order_independence(rng):
    dsep = table("admg_dsep")
    for _ in range(25):
        p = int(rng.integers(2, 10))
        g = random_graph_for(ADMG_SIGNATURE, p, rng)
        shuffled = {key: arr[rng.permutation(arr.shape[0])]
                    for key, arr in g.edges.items()}
        g2 = build_graph(EdgeInput(p, shuffled), ADMG_SIGNATURE)
        sets = {"X": rng.integers(0, p, 2).tolist(),
                "Z": rng.integers(0, p, 2).tolist()}
        assert reach(g, sets, dsep) == reach(g2, sets, dsep)


def test_set_assignment_masks_and_bounds():
    assignment = SetAssignment(5, {"X": [0, 3, 3], "Z": []})
    assert assignment.nodes("X").tolist() == [0, 3]
    assert assignment.mask("X").tolist() == [1, 0, 0, 1, 0]
    assert assignment.mask("Z").tolist() == [0] * 5
    with pytest.raises(NodeOutOfRangeError):
        SetAssignment(5, {"X": [5]})


def test_graph_json_round_trip():
    obj = {"p": 4, "edges": {"-->": [[0, 1], [2, 3]], "<->": [[1, 3]]},
           "nodes": ["a", "b", "c", "d"]}
    g, labels = graph_from_json(obj, ADMG_SIGNATURE)
    assert labels == ["a", "b", "c", "d"]
    back = graph_to_json(g, labels)
    assert json.dumps(back, sort_keys=True) == json.dumps(obj, sort_keys=True)


def test_graph_json_label_length_checked():
    with pytest.raises(NodeOutOfRangeError):
        graph_from_json({"p": 2, "edges": {}, "nodes": ["a"]}, DAG_SIGNATURE)
