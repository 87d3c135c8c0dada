"""Scalar and distributional observables of an opinion vector."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class OpinionSummary:
    mean: float
    fraction_near_target: float
    histogram: np.ndarray
    cluster_count: int


def mean_opinion(opinions) -> float:
    x = np.asarray(opinions, dtype=np.float64)
    if len(x) == 0:
        raise ValueError("empty opinion vector")
    return float(x.mean())


def fraction_near(opinions, target: float, tol: float = 0.05) -> float:
    """Share of agents with |x_i - target| strictly below tol."""
    if tol <= 0:
        raise ValueError("tol must be positive")
    x = np.asarray(opinions, dtype=np.float64)
    return float(np.mean(np.abs(x - target) < tol))


def histogram(opinions, bins: int = 50) -> np.ndarray:
    """Counts over uniform bins on [0, 1]; the last bin is right-closed."""
    if bins < 1:
        raise ValueError("bins must be >= 1")
    counts, _ = np.histogram(np.asarray(opinions, dtype=np.float64), bins=bins, range=(0.0, 1.0))
    return counts


def count_clusters(opinions, gap: float = 0.05, min_frac: float = 0.01) -> int:
    """Number of main opinion clusters.

    Sorted opinions are split wherever a consecutive gap exceeds ``gap``;
    clusters holding less than ``min_frac`` of the population do not count.
    """
    if gap <= 0:
        raise ValueError("gap must be positive")
    x = np.sort(np.asarray(opinions, dtype=np.float64))
    n = len(x)
    if n == 0:
        return 0
    breaks = np.nonzero(np.diff(x) > gap)[0]
    sizes = np.diff(np.concatenate([[0], breaks + 1, [n]]))
    return int(np.sum(sizes >= min_frac * n))


def density_matrix(snapshots, bins: int = 50) -> np.ndarray:
    """Row t = normalized opinion histogram of snapshot t (rows sum to 1)."""
    snaps = np.asarray(snapshots, dtype=np.float64)
    if snaps.ndim != 2 or len(snaps) == 0:
        raise ValueError("need a nonempty (time, nodes) snapshot array")
    rows = np.stack([histogram(row, bins) for row in snaps]).astype(np.float64)
    return rows / rows.sum(axis=1, keepdims=True)


def summarize(opinions, target: float = 1.0, tol: float = 0.05, bins: int = 50,
              gap: float = 0.05) -> OpinionSummary:
    return OpinionSummary(
        mean=mean_opinion(opinions),
        fraction_near_target=fraction_near(opinions, target, tol),
        histogram=histogram(opinions, bins),
        cluster_count=count_clusters(opinions, gap),
    )
