import numpy as np
import pytest

from cifly.graph import EdgeInput, Graph, build_graph


def edges_sorted(graph: Graph, key: str) -> list[tuple[int, int]]:
    return sorted(graph.edge_pairs(key))


def graphs_equal(a: Graph, b: Graph) -> bool:
    if a.p != b.p or a.signature != b.signature:
        return False
    keys = set(a.edges) | set(b.edges)
    return all(edges_sorted(a, key) == edges_sorted(b, key) for key in keys)


def random_graph_for(signature, p: int, rng: np.random.Generator,
                     max_edges_per_type=None) -> Graph:
    """Arbitrary typed edge lists (duplicates and self-loops included)."""
    cap = 3 * p + 1 if max_edges_per_type is None else max_edges_per_type + 1
    edges = {key: rng.integers(0, p, size=(int(rng.integers(0, cap)), 2))
             for key in signature.key_tokens()}
    return build_graph(EdgeInput(p, edges), signature)


def random_sets_for(table, p: int, rng: np.random.Generator) -> dict[str, list[int]]:
    return {symbol: rng.integers(0, p, size=int(rng.integers(0, p + 1))).tolist()
            for symbol in table.sets}


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)
