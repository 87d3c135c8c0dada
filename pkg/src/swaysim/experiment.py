"""Experiment grid: expansion into jobs, bounded-parallel execution, aggregation.

Every job's seed is a stable hash of the master seed and its grid
coordinates, so any sub-grid reproduces exactly the runs it would have
contributed to the full grid.  Records are sorted by grid coordinates, which
makes sweep output independent of parallelism and completion order.
"""

from __future__ import annotations

import csv
import hashlib
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import metrics
from .centrality import (
    MEASURES,
    RANDOM_MEASURE,
    NodeScores,
    compute_measure,
    random_scores,
    rank_top_fraction,
)
from .dynamics import InitSpec, Schedule, SimConfig, StubbornPlan, run_simulation
from .generator import LfrParams, generate_lfr
from .graph import WeightedGraph, load_communities, load_edge_list

log = logging.getLogger(__name__)


class SweepSpecError(ValueError):
    """Malformed sweep specification."""


@dataclass(frozen=True)
class NetworkSpec:
    """One network source: generator parameters or files on disk."""

    network_id: str
    params: LfrParams | None = None
    edge_file: str | None = None
    community_file: str | None = None

    def __post_init__(self):
        if (self.params is None) == (self.edge_file is None):
            raise SweepSpecError(
                f"network {self.network_id!r}: give exactly one of params or edge_file"
            )

    def load(self) -> WeightedGraph:
        if self.params is not None:
            return generate_lfr(self.params)
        g = load_edge_list(self.edge_file)
        if self.community_file:
            g = load_communities(self.community_file, g)
        return g


DEFAULT_FRACTIONS = (0.001, 0.002, 0.005, 0.01, 0.02)


@dataclass(frozen=True)
class SweepSpec:
    networks: tuple
    strategies: tuple = ("static",)
    measures: tuple = ("salience",)
    fractions: tuple = DEFAULT_FRACTIONS
    runs_per_cell: int = 50
    master_seed: int = 0
    sim: SimConfig = field(default_factory=SimConfig)
    init: InitSpec = field(default_factory=InitSpec)
    distance_mode: str = "reciprocal"
    save_snapshots: bool = False
    snapshot_bins: int = 50

    def __post_init__(self):
        if not self.networks or not self.strategies or not self.measures or not self.fractions:
            raise SweepSpecError("every sweep dimension must be nonempty")
        if self.runs_per_cell < 1:
            raise SweepSpecError("runs_per_cell must be >= 1")
        for f in self.fractions:
            if not 0 < f <= 1:
                raise SweepSpecError(f"fraction {f} outside (0, 1]")
        for s in self.strategies:
            Schedule(kind=s)  # validates the name
        for m in self.measures:
            if m not in MEASURES and m != RANDOM_MEASURE:
                raise SweepSpecError(f"unknown measure {m!r}")
        ids = [ns.network_id for ns in self.networks]
        if len(set(ids)) != len(ids):
            raise SweepSpecError("duplicate network ids")


def stable_seed(*parts) -> int:
    """Deterministic 63-bit seed from arbitrary coordinates."""
    text = "|".join(repr(p) for p in parts)
    digest = hashlib.sha256(text.encode()).digest()
    return int.from_bytes(digest[:8], "big") & (2**63 - 1)


@dataclass(frozen=True)
class Job:
    network_id: str
    strategy: str
    measure: str
    fraction: float
    run_index: int
    seed: int

    @property
    def job_id(self) -> str:
        return (
            f"{self.network_id}__{self.strategy}__{self.measure}"
            f"__f{self.fraction:g}__r{self.run_index:03d}"
        )

    @property
    def sort_key(self):
        return (self.network_id, self.strategy, self.measure, self.fraction, self.run_index)


@dataclass
class RunRecord:
    network_id: str
    strategy: str
    measure: str
    fraction: float
    run_index: int
    seed: int
    final_mean: float = math.nan
    fraction_near: float = math.nan
    converged_at: int | None = None
    steps: int = 0
    error: str | None = None
    extras: dict = field(default_factory=dict)
    snapshot_steps: np.ndarray | None = None
    snapshot_counts: np.ndarray | None = None

    @property
    def job_id(self) -> str:
        return (
            f"{self.network_id}__{self.strategy}__{self.measure}"
            f"__f{self.fraction:g}__r{self.run_index:03d}"
        )

    @property
    def sort_key(self):
        return (self.network_id, self.strategy, self.measure, self.fraction, self.run_index)


@dataclass(frozen=True)
class AggregateRow:
    strategy: str
    measure: str
    fraction: float
    mean_final_mean: float
    std_final_mean: float
    mean_fraction_near: float
    std_fraction_near: float
    n: int
    mean_converged_at: float | None = None


def expand_sweep(spec: SweepSpec) -> list:
    """Cartesian product of the grid; one job per (network, strategy, measure, fraction, run)."""
    jobs = []
    for ns in spec.networks:
        for strategy in spec.strategies:
            for measure in spec.measures:
                for fraction in spec.fractions:
                    for run_index in range(spec.runs_per_cell):
                        seed = stable_seed(
                            spec.master_seed, ns.network_id, strategy, measure,
                            fraction, run_index,
                        )
                        jobs.append(Job(ns.network_id, strategy, measure, fraction,
                                        run_index, seed))
    return jobs


def _select_stubborn(g, scores_by_measure, job, rng_sel):
    if job.measure == RANDOM_MEASURE:
        sc = random_scores(g.node_count)
    else:
        sc = scores_by_measure[job.measure]
    return rank_top_fraction(sc, job.fraction, rng_sel)


def _run_job(g, scores_by_measure, job, spec, record_extras) -> RunRecord:
    sel_ss, init_ss = np.random.SeedSequence(job.seed).spawn(2)
    nodes = _select_stubborn(g, scores_by_measure, job, np.random.default_rng(sel_ss))
    schedule = Schedule(kind=job.strategy)
    plan = StubbornPlan(job.measure, job.fraction, schedule, tuple(nodes))
    result = run_simulation(
        g, spec.init, plan, spec.sim, rng=np.random.default_rng(init_ss), seed=job.seed
    )
    record = RunRecord(
        network_id=job.network_id,
        strategy=job.strategy,
        measure=job.measure,
        fraction=job.fraction,
        run_index=job.run_index,
        seed=job.seed,
        final_mean=metrics.mean_opinion(result.final_opinions),
        fraction_near=metrics.fraction_near(result.final_opinions, schedule.final_value),
        converged_at=result.converged_at,
        steps=result.steps,
    )
    if record_extras is not None:
        record.extras = dict(record_extras(job, result))
    if spec.save_snapshots and len(result.snapshots):
        record.snapshot_steps = result.snapshot_steps
        record.snapshot_counts = np.stack(
            [metrics.histogram(row, spec.snapshot_bins) for row in result.snapshots]
        )
    return record


def _run_chunk(payload) -> list:
    g, scores_by_measure, jobs, spec, record_extras = payload
    out = []
    for job in jobs:
        try:
            out.append(_run_job(g, scores_by_measure, job, spec, record_extras))
        except Exception as exc:  # job failures must not kill the sweep
            log.error("job %s failed: %s", job.job_id, exc)
            out.append(RunRecord(
                network_id=job.network_id, strategy=job.strategy, measure=job.measure,
                fraction=job.fraction, run_index=job.run_index, seed=job.seed,
                error=str(exc),
            ))
    return out


def prepare_network(ns: NetworkSpec, measures, distance_mode: str):
    """Load one network and compute every non-random measure once."""
    g = ns.load()
    scores: dict[str, NodeScores] = {}
    for m in measures:
        if m != RANDOM_MEASURE:
            scores[m] = compute_measure(g, m, distance_mode)
    return g, scores


def run_sweep(spec: SweepSpec, parallelism: int = 1, record_extras=None) -> list:
    """Execute every job; the result is a pure function of the spec.

    ``record_extras(job, sim_result) -> dict`` may harvest extra per-run
    metrics into ``RunRecord.extras`` (must be a module-level function when
    ``parallelism > 1``).
    """
    jobs = expand_sweep(spec)
    by_network: dict[str, list] = {}
    for job in jobs:
        by_network.setdefault(job.network_id, []).append(job)

    payloads = []
    for ns in spec.networks:
        g, scores = prepare_network(ns, spec.measures, spec.distance_mode)
        net_jobs = by_network[ns.network_id]
        if parallelism > 1:
            chunk = max(1, math.ceil(len(net_jobs) / (parallelism * 4)))
        else:
            chunk = len(net_jobs)
        for i in range(0, len(net_jobs), chunk):
            payloads.append((g, scores, net_jobs[i:i + chunk], spec, record_extras))

    records: list[RunRecord] = []
    if parallelism > 1:
        with ProcessPoolExecutor(max_workers=parallelism) as pool:
            for chunk_records in pool.map(_run_chunk, payloads):
                records.extend(chunk_records)
    else:
        for payload in payloads:
            records.extend(_run_chunk(payload))
    records.sort(key=lambda r: r.sort_key)
    return records


def aggregate(records) -> list:
    """Group by (strategy, measure, fraction) across networks and runs."""
    if not records:
        raise SweepSpecError("no records to aggregate")
    groups: dict[tuple, list[RunRecord]] = {}
    for r in records:
        if r.error is not None:
            continue
        groups.setdefault((r.strategy, r.measure, r.fraction), []).append(r)
    rows = []
    for key in sorted(groups):
        # fixed reduction order keeps aggregate floats byte-stable no matter
        # how the records were produced or read back
        recs = sorted(groups[key], key=lambda r: r.sort_key)
        fm = np.asarray([r.final_mean for r in recs])
        fn = np.asarray([r.fraction_near for r in recs])
        conv = [r.converged_at for r in recs if r.converged_at is not None]
        std = (lambda a: float(a.std(ddof=1)) if len(a) > 1 else 0.0)
        rows.append(AggregateRow(
            strategy=key[0], measure=key[1], fraction=key[2],
            mean_final_mean=float(fm.mean()), std_final_mean=std(fm),
            mean_fraction_near=float(fn.mean()), std_fraction_near=std(fn),
            n=len(recs),
            mean_converged_at=float(np.mean(conv)) if conv else None,
        ))
    return rows


RUNS_COLUMNS = (
    "network_id", "strategy", "measure", "fraction", "run_index", "seed",
    "final_mean", "fraction_near", "converged_at", "steps",
)

AGGREGATES_COLUMNS = (
    "strategy", "measure", "fraction",
    "mean_final_mean", "std_final_mean",
    "mean_fraction_near", "std_fraction_near", "n",
)


def _fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def write_runs_csv(records, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(RUNS_COLUMNS)
        for r in sorted(records, key=lambda r: r.sort_key):
            if r.error is not None:
                writer.writerow([r.network_id, r.strategy, r.measure, _fmt(r.fraction),
                                 r.run_index, r.seed, "", "", "", ""])
            else:
                writer.writerow([r.network_id, r.strategy, r.measure, _fmt(r.fraction),
                                 r.run_index, r.seed, _fmt(r.final_mean),
                                 _fmt(r.fraction_near), _fmt(r.converged_at), r.steps])


def read_runs_csv(path) -> list:
    path = Path(path)
    records = []
    with path.open(newline="") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in RUNS_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise SweepSpecError(f"{path}: missing columns {missing}")
        for row in reader:
            if row["final_mean"] == "":
                records.append(RunRecord(
                    network_id=row["network_id"], strategy=row["strategy"],
                    measure=row["measure"], fraction=float(row["fraction"]),
                    run_index=int(row["run_index"]), seed=int(row["seed"]),
                    error="recorded failure",
                ))
                continue
            records.append(RunRecord(
                network_id=row["network_id"], strategy=row["strategy"],
                measure=row["measure"], fraction=float(row["fraction"]),
                run_index=int(row["run_index"]), seed=int(row["seed"]),
                final_mean=float(row["final_mean"]),
                fraction_near=float(row["fraction_near"]),
                converged_at=int(row["converged_at"]) if row["converged_at"] else None,
                steps=int(row["steps"]),
            ))
    return records


def write_aggregates_csv(rows, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(AGGREGATES_COLUMNS)
        for r in sorted(rows, key=lambda r: (r.strategy, r.measure, r.fraction)):
            writer.writerow([
                r.strategy, r.measure, _fmt(r.fraction),
                _fmt(r.mean_final_mean), _fmt(r.std_final_mean),
                _fmt(r.mean_fraction_near), _fmt(r.std_fraction_near), r.n,
            ])


def write_snapshot_csv(record: RunRecord, path) -> None:
    """Sidecar per run: one row per snapshot, `step, bin_0..bin_{B-1}` counts."""
    if record.snapshot_counts is None:
        raise SweepSpecError(f"record {record.job_id} holds no snapshots")
    path = Path(path)
    bins = record.snapshot_counts.shape[1]
    with path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step"] + [f"bin_{i}" for i in range(bins)])
        for step, counts in zip(record.snapshot_steps.tolist(), record.snapshot_counts.tolist()):
            writer.writerow([step] + counts)
