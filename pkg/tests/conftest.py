import numpy as np
import pytest

from swaysim.graph import WeightedGraph


def build_graph(n, edges, communities=None):
    return WeightedGraph.build(n, edges, communities=communities)


@pytest.fixture
def p3():
    """Path 0-1-2, unit weights."""
    return build_graph(3, [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def wp3():
    """Path 0-1-2 with w01=2, w12=1."""
    return build_graph(3, [(0, 1, 2.0), (1, 2, 1.0)])


@pytest.fixture
def triangle():
    return build_graph(3, [(0, 1, 1.0), (1, 2, 1.0), (0, 2, 1.0)])


@pytest.fixture
def star4():
    """Hub 0 with leaves 1..3."""
    return build_graph(4, [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])


def random_graph(rng, n, p_edge=0.5, unit_weights=False):
    """Connected-ish random weighted graph for oracle comparisons."""
    edges = []
    for u in range(n):
        for v in range(u + 1, n):
            if rng.random() < p_edge:
                w = 1.0 if unit_weights else float(rng.uniform(0.2, 5.0))
                edges.append((u, v, w))
    if not edges:
        edges = [(0, min(1, n - 1), 1.0)] if n > 1 else []
    # ensure no isolated nodes for simpler invariants
    touched = {u for u, v, _ in edges} | {v for u, v, _ in edges}
    for i in range(n):
        if i not in touched:
            j = (i + 1) % n
            w = 1.0 if unit_weights else float(rng.uniform(0.2, 5.0))
            edges.append((min(i, j), max(i, j), w))
            touched.add(i)
            touched.add(j)
    return build_graph(n, edges)


def random_tree(rng, n):
    edges = []
    for v in range(1, n):
        u = int(rng.integers(0, v))
        edges.append((u, v, float(rng.uniform(0.2, 5.0))))
    return build_graph(n, edges)
