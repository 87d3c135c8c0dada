"""Weighted undirected graph container, edge-list I/O, and summary statistics.

The graph is the substrate shared by the generator, the centrality measures,
and the opinion dynamics.  It is immutable after construction: every mutation
(attaching communities, reweighting) returns a new instance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from pathlib import Path

import numpy as np


class GraphError(ValueError):
    """Invalid graph structure or unparseable graph file."""


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    """Simple undirected weighted graph with dense node ids 0..N-1.

    Edges are stored canonically with ``edge_u < edge_v``, sorted by
    ``(edge_u, edge_v)``.  ``communities`` (optional) maps each node to a
    community id.  ``labels`` keeps the original node names when the graph
    was read from a file whose ids were not already dense integers.
    """

    node_count: int
    edge_u: np.ndarray
    edge_v: np.ndarray
    edge_w: np.ndarray
    communities: np.ndarray | None = None
    labels: tuple[str, ...] | None = None

    @classmethod
    def build(
        cls,
        node_count: int,
        edges: "list[tuple[int, int, float]] | np.ndarray",
        communities=None,
        labels: tuple[str, ...] | None = None,
    ) -> "WeightedGraph":
        """Validate and canonicalize an edge list into a graph."""
        if node_count < 0:
            raise GraphError("node count must be nonnegative")
        if len(edges) == 0:
            u = np.empty(0, dtype=np.int64)
            v = np.empty(0, dtype=np.int64)
            w = np.empty(0, dtype=np.float64)
        else:
            arr = np.asarray([(e[0], e[1]) for e in edges], dtype=np.int64)
            w = np.asarray([e[2] for e in edges], dtype=np.float64)
            u = np.minimum(arr[:, 0], arr[:, 1])
            v = np.maximum(arr[:, 0], arr[:, 1])
            if np.any(arr[:, 0] < 0) or np.any(arr[:, 1] < 0) or np.any(v >= node_count):
                raise GraphError("edge endpoint outside 0..N-1")
            if np.any(arr[:, 0] == arr[:, 1]):
                bad = int(arr[np.argmax(arr[:, 0] == arr[:, 1]), 0])
                raise GraphError(f"self-loop at node {bad}")
            if not np.all(np.isfinite(w)) or np.any(w <= 0):
                raise GraphError("edge weights must be positive and finite")
            order = np.lexsort((v, u))
            u, v, w = u[order], v[order], w[order]
            dup = (u[1:] == u[:-1]) & (v[1:] == v[:-1])
            if np.any(dup):
                i = int(np.argmax(dup))
                raise GraphError(f"duplicate edge ({u[i]}, {v[i]})")
        comm = None
        if communities is not None:
            comm = np.asarray(communities, dtype=np.int64)
            if comm.shape != (node_count,):
                raise GraphError("communities must assign one id per node")
        if labels is not None and len(labels) != node_count:
            raise GraphError("labels must name every node")
        return cls(node_count, u, v, w, comm, labels)

    # -- derived views (cached; the instance is immutable) -------------------

    @property
    def edge_count(self) -> int:
        return len(self.edge_w)

    @cached_property
    def degrees(self) -> np.ndarray:
        d = np.bincount(self.edge_u, minlength=self.node_count)
        d += np.bincount(self.edge_v, minlength=self.node_count)
        return d

    @cached_property
    def strengths(self) -> np.ndarray:
        s = np.bincount(self.edge_u, weights=self.edge_w, minlength=self.node_count)
        s += np.bincount(self.edge_v, weights=self.edge_w, minlength=self.node_count)
        return s

    @cached_property
    def adjacency(self) -> tuple:
        """Per-node list of (neighbor, weight), neighbors ascending."""
        adj: list[list[tuple[int, float]]] = [[] for _ in range(self.node_count)]
        for u, v, w in zip(self.edge_u.tolist(), self.edge_v.tolist(), self.edge_w.tolist()):
            adj[u].append((v, w))
            adj[v].append((u, w))
        for lst in adj:
            lst.sort()
        return tuple(adj)

    @cached_property
    def directed_edges(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Both orientations of every edge as (src, dst, w), sorted by (dst, src).

        The sort fixes the accumulation order of weighted sums per target node,
        which keeps vectorized reductions reproducible.
        """
        src = np.concatenate([self.edge_u, self.edge_v])
        dst = np.concatenate([self.edge_v, self.edge_u])
        w = np.concatenate([self.edge_w, self.edge_w])
        order = np.lexsort((src, dst))
        return src[order], dst[order], w[order]

    @cached_property
    def edge_index(self) -> dict:
        """(u, v) with u < v -> position in the canonical edge arrays."""
        return {
            (int(u), int(v)): i
            for i, (u, v) in enumerate(zip(self.edge_u, self.edge_v))
        }

    def neighbors(self, i: int) -> list:
        return self.adjacency[i]

    def with_communities(self, communities) -> "WeightedGraph":
        comm = np.asarray(communities, dtype=np.int64)
        if comm.shape != (self.node_count,):
            raise GraphError("communities must assign one id per node")
        return replace(self, communities=comm)

    def with_weights(self, weights) -> "WeightedGraph":
        w = np.asarray(weights, dtype=np.float64)
        if w.shape != self.edge_w.shape:
            raise GraphError("weight vector must match edge count")
        if not np.all(np.isfinite(w)) or np.any(w <= 0):
            raise GraphError("edge weights must be positive and finite")
        return replace(self, edge_w=w)

    def same_structure(self, other: "WeightedGraph") -> bool:
        """Equal node count, edge set, and weights (exact)."""
        return (
            self.node_count == other.node_count
            and np.array_equal(self.edge_u, other.edge_u)
            and np.array_equal(self.edge_v, other.edge_v)
            and np.array_equal(self.edge_w, other.edge_w)
        )


@dataclass(frozen=True)
class NetworkStats:
    """Descriptive statistics of a network instance."""

    edge_count: int
    k_min: int
    k_max: int
    k_mean: float
    assortativity: float
    clustering: float
    alpha_k: float
    alpha_w: float


def _tokenize(line: str) -> list[str]:
    return line.replace(",", " ").split()


def _parse_floats(tokens: list[str]):
    try:
        return [float(t) for t in tokens]
    except ValueError:
        return None


def load_edge_list(path) -> WeightedGraph:
    """Read a `u v w` edge list (whitespace- or comma-separated, optional header).

    Node ids are compacted to 0..N-1 in order of first appearance; the
    original names are kept in ``labels``.
    """
    path = Path(path)
    ids: dict[str, int] = {}
    edges: list[tuple[int, int, float]] = []
    seen: set[tuple[int, int]] = set()
    with path.open() as fh:
        first_data_line = True
        for lineno, raw in enumerate(fh, start=1):
            tokens = _tokenize(raw)
            if not tokens:
                continue
            if len(tokens) != 3 or _parse_floats(tokens) is None:
                if first_data_line and len(tokens) >= 2:
                    # tolerated header row
                    first_data_line = False
                    continue
                raise GraphError(f"{path}:{lineno}: malformed edge record {raw.strip()!r}")
            first_data_line = False
            su, sv, sw = tokens
            try:
                w = float(sw)
            except ValueError:
                raise GraphError(f"{path}:{lineno}: bad weight {sw!r}") from None
            if not math.isfinite(w) or w <= 0:
                raise GraphError(f"{path}:{lineno}: non-positive weight {sw}")
            if su == sv:
                raise GraphError(f"{path}:{lineno}: self-loop at node {su}")
            for s in (su, sv):
                if s not in ids:
                    ids[s] = len(ids)
            u, v = ids[su], ids[sv]
            key = (min(u, v), max(u, v))
            if key in seen:
                raise GraphError(f"{path}:{lineno}: duplicate edge ({su}, {sv})")
            seen.add(key)
            edges.append((u, v, w))
    if not edges:
        raise GraphError(f"{path}: no edges found")
    labels = tuple(ids)  # insertion order == id order
    return WeightedGraph.build(len(ids), edges, labels=labels)


def load_communities(path, g: WeightedGraph) -> WeightedGraph:
    """Attach community ids from a `node community` file to an existing graph."""
    path = Path(path)
    if g.labels is not None:
        name_to_id = {name: i for i, name in enumerate(g.labels)}
    else:
        name_to_id = {str(i): i for i in range(g.node_count)}
    comm = np.zeros(g.node_count, dtype=np.int64)
    assigned = np.zeros(g.node_count, dtype=bool)
    with path.open() as fh:
        for lineno, raw in enumerate(fh, start=1):
            tokens = _tokenize(raw)
            if not tokens:
                continue
            if len(tokens) != 2:
                raise GraphError(f"{path}:{lineno}: malformed community record {raw.strip()!r}")
            name, sc = tokens
            node = name_to_id.get(name)
            if node is None:
                raise GraphError(f"{path}:{lineno}: unknown node {name}")
            try:
                c = int(sc)
            except ValueError:
                raise GraphError(f"{path}:{lineno}: bad community id {sc!r}") from None
            if assigned[node]:
                raise GraphError(f"{path}:{lineno}: node {name} listed twice")
            comm[node] = c
            assigned[node] = True
    missing = np.nonzero(~assigned)[0]
    if len(missing):
        names = [g.labels[i] if g.labels else str(i) for i in missing.tolist()]
        raise GraphError(
            "node" + ("s " if len(names) > 1 else " ") + ", ".join(names) + " ha"
            + ("ve" if len(names) > 1 else "s") + " no community"
        )
    return g.with_communities(comm)


def save_edge_list(g: WeightedGraph, path) -> None:
    """Write `u v w` lines, u < v, weights with 17 significant digits."""
    path = Path(path)
    try:
        with path.open("w") as fh:
            for u, v, w in zip(g.edge_u.tolist(), g.edge_v.tolist(), g.edge_w.tolist()):
                fh.write(f"{u} {v} {w:.17g}\n")
    except OSError as exc:
        raise GraphError(f"cannot write edge list {path}: {exc}") from exc


def save_communities(g: WeightedGraph, path) -> None:
    if g.communities is None:
        raise GraphError("graph has no community labels to save")
    path = Path(path)
    try:
        with path.open("w") as fh:
            for i, c in enumerate(g.communities.tolist()):
                fh.write(f"{i} {c}\n")
    except OSError as exc:
        raise GraphError(f"cannot write community file {path}: {exc}") from exc


def _discrete_powerlaw_mle(values: np.ndarray) -> float:
    """Clauset-Shalizi-Newman discrete MLE with x_min at the observed minimum."""
    x = np.asarray(values, dtype=np.float64)
    xmin = x.min()
    logs = np.log(x / (xmin - 0.5))
    total = logs.sum()
    if total <= 0:
        return math.inf
    return 1.0 + len(x) / total


def _continuous_powerlaw_mle(values: np.ndarray) -> float:
    x = np.asarray(values, dtype=np.float64)
    xmin = x.min()
    total = np.log(x / xmin).sum()
    if total <= 0:
        return math.inf
    return 1.0 + len(x) / total


def network_stats(g: WeightedGraph) -> NetworkStats:
    """Edge count, degree summary, assortativity, clustering, power-law fits.

    Assortativity is the Pearson correlation of end-point degrees over both
    orientations of every edge.  Clustering is the unweighted average local
    coefficient (nodes with degree < 2 contribute 0).  The power-law
    exponents use maximum likelihood with x_min fixed at the observed minimum
    (discrete fit for degrees, continuous fit for edge weights).
    """
    deg = g.degrees
    k_min = int(deg.min())
    k_max = int(deg.max())
    k_mean = float(deg.mean())

    if g.edge_count == 0:
        assort = 0.0
    else:
        du = deg[g.edge_u].astype(np.float64)
        dv = deg[g.edge_v].astype(np.float64)
        x = np.concatenate([du, dv])
        y = np.concatenate([dv, du])
        sx = x.std()
        if sx == 0:
            assort = 0.0
        else:
            assort = float(np.corrcoef(x, y)[0, 1])

    if g.node_count < 3:
        clustering = 0.0
    else:
        neighbor_sets = [set(j for j, _ in lst) for lst in g.adjacency]
        local = np.zeros(g.node_count)
        for i, nbrs in enumerate(neighbor_sets):
            k = len(nbrs)
            if k < 2:
                continue
            closed = sum(len(neighbor_sets[j] & nbrs) for j in nbrs)
            local[i] = closed / (k * (k - 1))
        clustering = float(local.mean())

    alpha_k = _discrete_powerlaw_mle(deg) if k_min >= 1 else math.inf
    alpha_w = _continuous_powerlaw_mle(g.edge_w) if g.edge_count else math.inf
    return NetworkStats(
        edge_count=g.edge_count,
        k_min=k_min,
        k_max=k_max,
        k_mean=k_mean,
        assortativity=assort,
        clustering=clustering,
        alpha_k=alpha_k,
        alpha_w=alpha_w,
    )
