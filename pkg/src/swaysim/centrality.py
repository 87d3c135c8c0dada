"""Node-ranking measures used to pick stubborn agents, plus the salience backbone.

Shortest-path measures (betweenness, salience) share one single-source engine
that records every co-optimal predecessor.  Two distance modes exist:
``"hop"`` (unit lengths) and ``"reciprocal"`` (length 1/w, so strong ties are
short).  Reciprocal is the default everywhere since the graphs are weighted.
"""

from __future__ import annotations

import heapq
from collections import deque
from dataclasses import dataclass

import numpy as np

from .graph import WeightedGraph

DISTANCE_MODES = ("hop", "reciprocal")

MEASURES = (
    "degree",
    "strength",
    "betweenness",
    "pagerank",
    "k_coreness",
    "s_coreness",
    "salience",
)

RANDOM_MEASURE = "random"


class CentralityError(RuntimeError):
    """Raised when an iterative measure fails to converge."""


@dataclass(frozen=True)
class NodeScores:
    """Per-node scores for one measure."""

    values: np.ndarray
    measure_name: str

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError(f"{self.measure_name}: non-finite score")


@dataclass(frozen=True)
class EdgeScores:
    """Per-edge scores in [0, 1], aligned with the graph's canonical edge order."""

    edge_u: np.ndarray
    edge_v: np.ndarray
    values: np.ndarray

    def value(self, u: int, v: int) -> float:
        a, b = (u, v) if u < v else (v, u)
        idx = self._index.get((a, b))
        if idx is None:
            raise KeyError(f"no edge ({u}, {v})")
        return float(self.values[idx])

    @property
    def _index(self) -> dict:
        cache = self.__dict__.get("_index_cache")
        if cache is None:
            cache = {
                (int(a), int(b)): i
                for i, (a, b) in enumerate(zip(self.edge_u, self.edge_v))
            }
            object.__setattr__(self, "_index_cache", cache)
        return cache


def _edge_lengths(g: WeightedGraph, distance_mode: str) -> list:
    """Adjacency with per-edge lengths for the requested mode."""
    if distance_mode not in DISTANCE_MODES:
        raise ValueError(f"unknown distance mode {distance_mode!r}")
    if distance_mode == "hop":
        return [[(j, 1.0) for j, _ in lst] for lst in g.adjacency]
    return [[(j, 1.0 / w) for j, w in lst] for lst in g.adjacency]


def shortest_path_dag(g: WeightedGraph, source: int, distance_mode: str = "reciprocal"):
    """Single-source shortest paths with all co-optimal predecessors.

    Returns ``(dist, sigma, preds, order)`` where ``sigma[v]`` counts shortest
    paths from the source to ``v``, ``preds[v]`` lists every predecessor on a
    shortest path, and ``order`` is the finalization order (nondecreasing
    distance).  Unreachable nodes keep ``dist = inf`` and ``sigma = 0``.
    """
    adj = _edge_lengths(g, distance_mode)
    return _sssp(adj, g.node_count, source, distance_mode == "hop")


def _sssp(adj: list, n: int, source: int, hop: bool):
    dist = [float("inf")] * n
    sigma = [0.0] * n
    preds: list[list[int]] = [[] for _ in range(n)]
    order: list[int] = []
    dist[source] = 0.0
    sigma[source] = 1.0
    if hop:
        queue = deque([source])
        order.append(source)
        while queue:
            v = queue.popleft()
            dv = dist[v]
            for w_node, _ in adj[v]:
                nd = dv + 1.0
                if dist[w_node] == float("inf"):
                    dist[w_node] = nd
                    queue.append(w_node)
                    order.append(w_node)
                if dist[w_node] == nd:
                    sigma[w_node] += sigma[v]
                    preds[w_node].append(v)
        return dist, sigma, preds, order
    done = [False] * n
    heap = [(0.0, source)]
    while heap:
        d, v = heapq.heappop(heap)
        if done[v] or d > dist[v]:
            continue
        done[v] = True
        order.append(v)
        for w_node, length in adj[v]:
            nd = d + length
            if nd < dist[w_node]:
                dist[w_node] = nd
                sigma[w_node] = sigma[v]
                preds[w_node] = [v]
                heapq.heappush(heap, (nd, w_node))
            elif nd == dist[w_node]:
                sigma[w_node] += sigma[v]
                preds[w_node].append(v)
    return dist, sigma, preds, order


def degree(g: WeightedGraph) -> NodeScores:
    return NodeScores(g.degrees.astype(np.float64), "degree")


def strength(g: WeightedGraph) -> NodeScores:
    return NodeScores(g.strengths.copy(), "strength")


def betweenness(g: WeightedGraph, distance_mode: str = "reciprocal") -> NodeScores:
    """Brandes accumulation over unordered pairs.

    ``b_i`` sums, over pairs {j, k} with j != i != k, the fraction of shortest
    j-k paths passing through i.  Pairs in different components contribute 0.
    """
    n = g.node_count
    adj = _edge_lengths(g, distance_mode)
    hop = distance_mode == "hop"
    bc = np.zeros(n, dtype=np.float64)
    for s in range(n):
        dist, sigma, preds, order = _sssp(adj, n, s, hop)
        delta = [0.0] * n
        for w_node in reversed(order):
            coeff = (1.0 + delta[w_node]) / sigma[w_node]
            for v in preds[w_node]:
                delta[v] += sigma[v] * coeff
            if w_node != s:
                bc[w_node] += delta[w_node]
    bc /= 2.0  # each unordered pair is visited from both endpoints
    return NodeScores(bc, "betweenness")


def pagerank(
    g: WeightedGraph,
    damping: float = 0.85,
    tol: float = 1e-10,
    max_iter: int = 200,
) -> NodeScores:
    """Strength-weighted PageRank by power iteration.

    Fixed point of ``pi_i = damping * sum_j pi_j w_ji / sigma_j + (1-damping)/N``.
    Isolated nodes have no outgoing weight; their mass teleports uniformly so
    the vector stays stochastic.
    """
    n = g.node_count
    src, dst, w = g.directed_edges
    sigma = g.strengths
    isolated = sigma == 0
    safe_sigma = np.where(isolated, 1.0, sigma)
    transition = w / safe_sigma[src]
    pi = np.full(n, 1.0 / n)
    residual = float("inf")
    for _ in range(max_iter):
        new = damping * np.bincount(dst, weights=pi[src] * transition, minlength=n)
        dangling = pi[isolated].sum()
        new += damping * dangling / n + (1.0 - damping) / n
        residual = float(np.abs(new - pi).sum())
        pi = new
        if residual < tol:
            return NodeScores(pi, "pagerank")
    raise CentralityError(
        f"pagerank did not converge in {max_iter} iterations (residual {residual:.3e})"
    )


def k_coreness(g: WeightedGraph) -> NodeScores:
    """Integer coreness by min-degree peeling."""
    n = g.node_count
    deg = g.degrees.astype(np.int64).copy()
    adj = g.adjacency
    removed = [False] * n
    core = np.zeros(n, dtype=np.float64)
    heap = [(int(deg[i]), i) for i in range(n)]
    heapq.heapify(heap)
    current = 0
    for _ in range(n):
        while True:
            d, v = heapq.heappop(heap)
            if not removed[v] and d == deg[v]:
                break
        current = max(current, int(deg[v]))
        core[v] = current
        removed[v] = True
        for u, _ in adj[v]:
            if not removed[u]:
                deg[u] -= 1
                heapq.heappush(heap, (int(deg[u]), u))
    return NodeScores(core, "k_coreness")


def s_coreness(g: WeightedGraph) -> NodeScores:
    """Continuous coreness by min-residual-strength peeling.

    A node's score is the running maximum of the minimum residual strength
    seen up to and including its removal; with unit weights this reduces
    exactly to k-coreness.
    """
    n = g.node_count
    s = g.strengths.copy()
    adj = g.adjacency
    removed = [False] * n
    core = np.zeros(n, dtype=np.float64)
    heap = [(float(s[i]), i) for i in range(n)]
    heapq.heapify(heap)
    current = 0.0
    for _ in range(n):
        while True:
            sv, v = heapq.heappop(heap)
            if not removed[v] and sv == s[v]:
                break
        current = max(current, float(s[v]))
        core[v] = current
        removed[v] = True
        for u, w in adj[v]:
            if not removed[u]:
                s[u] -= w
                heapq.heappush(heap, (float(s[u]), u))
    return NodeScores(core, "s_coreness")


def edge_salience(g: WeightedGraph, distance_mode: str = "reciprocal") -> EdgeScores:
    """Fraction of per-root shortest-path trees each edge participates in.

    For every root r, an edge is in T(r) when it lies on at least one shortest
    path from r; the salience of an edge is the average of that indicator over
    all roots.  Values live in [0, 1].
    """
    n = g.node_count
    adj = _edge_lengths(g, distance_mode)
    hop = distance_mode == "hop"
    index = g.edge_index
    counts = np.zeros(g.edge_count, dtype=np.float64)
    for r in range(n):
        _, _, preds, order = _sssp(adj, n, r, hop)
        for w_node in order:
            for v in preds[w_node]:
                key = (v, w_node) if v < w_node else (w_node, v)
                counts[index[key]] += 1.0
    return EdgeScores(g.edge_u, g.edge_v, counts / n)


def node_salience(g: WeightedGraph, distance_mode: str = "reciprocal") -> NodeScores:
    """Sum of incident edge saliences."""
    es = edge_salience(g, distance_mode)
    vals = np.bincount(g.edge_u, weights=es.values, minlength=g.node_count)
    vals += np.bincount(g.edge_v, weights=es.values, minlength=g.node_count)
    return NodeScores(vals, "salience")


def high_salience_skeleton(
    g: WeightedGraph,
    threshold: float = 0.9,
    distance_mode: str = "reciprocal",
    edge_scores: EdgeScores | None = None,
) -> WeightedGraph:
    """Subgraph of edges with salience >= threshold; isolated nodes dropped.

    Node ids are compacted; the original ids are kept as labels.
    """
    if not 0 < threshold <= 1:
        raise ValueError("threshold must be in (0, 1]")
    es = edge_scores if edge_scores is not None else edge_salience(g, distance_mode)
    keep = es.values >= threshold
    ku, kv, kw = g.edge_u[keep], g.edge_v[keep], g.edge_w[keep]
    nodes = np.unique(np.concatenate([ku, kv]))
    remap = {int(orig): new for new, orig in enumerate(nodes.tolist())}
    edges = [
        (remap[int(u)], remap[int(v)], float(w)) for u, v, w in zip(ku, kv, kw)
    ]
    if g.labels is not None:
        labels = tuple(g.labels[int(i)] for i in nodes)
    else:
        labels = tuple(str(int(i)) for i in nodes)
    communities = g.communities[nodes] if g.communities is not None else None
    return WeightedGraph.build(len(nodes), edges, communities=communities, labels=labels)


def compute_measure(
    g: WeightedGraph,
    measure: str,
    distance_mode: str = "reciprocal",
) -> NodeScores:
    """Dispatch a named centrality measure (excluding ``random``)."""
    if measure == "degree":
        return degree(g)
    if measure == "strength":
        return strength(g)
    if measure == "betweenness":
        return betweenness(g, distance_mode)
    if measure == "pagerank":
        return pagerank(g)
    if measure == "k_coreness":
        return k_coreness(g)
    if measure == "s_coreness":
        return s_coreness(g)
    if measure == "salience":
        return node_salience(g, distance_mode)
    raise ValueError(f"unknown measure {measure!r}")


def rank_top_fraction(
    scores: NodeScores,
    fraction: float,
    rng: np.random.Generator | None = None,
) -> frozenset:
    """Top max(1, round(fraction*N)) nodes; ties broken by ascending node id.

    When ``scores.measure_name`` is ``"random"``, the values are ignored and
    the set is drawn uniformly without replacement using ``rng``.
    """
    if not 0 < fraction <= 1:
        raise ValueError("fraction must be in (0, 1]")
    n = len(scores.values)
    m = max(1, round(fraction * n))
    if scores.measure_name == RANDOM_MEASURE:
        if rng is None:
            raise ValueError("random selection needs an rng")
        picked = rng.choice(n, size=m, replace=False)
        return frozenset(int(i) for i in picked)
    order = np.lexsort((np.arange(n), -scores.values))
    return frozenset(int(i) for i in order[:m])


def random_scores(n: int) -> NodeScores:
    """Placeholder scores for the random baseline (values unused)."""
    return NodeScores(np.zeros(n, dtype=np.float64), RANDOM_MEASURE)
