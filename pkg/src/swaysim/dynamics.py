"""Weighted bounded-confidence opinion dynamics with stubborn agents.

Opinions x_i(t) in [0, 1] update synchronously: each agent averages the
opinions of neighbors within its confidence bound eps_i, weighted by the
connecting edge weight.  Stubborn agents ignore the update and follow an
opinion schedule (fixed extreme, or stepping from moderate to extreme).
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .graph import WeightedGraph


@dataclass(frozen=True)
class InitSpec:
    """Initial conditions: opinions U[0,1], confidences U[eps_low, eps_high]."""

    eps_low: float = 0.05
    eps_high: float = 0.25

    def __post_init__(self):
        if not 0 <= self.eps_low <= self.eps_high <= 1:
            raise ValueError("need 0 <= eps_low <= eps_high <= 1")


@dataclass(frozen=True)
class Schedule:
    """Opinion schedule for stubborn agents.

    ``static`` holds ``final_value`` for the whole horizon.  ``dynamic``
    starts at ``start_value`` and increases by ``increment`` after each of
    ``periods`` equal periods, clamped at ``final_value``.
    """

    kind: str = "static"
    final_value: float = 1.0
    start_value: float = 0.5
    periods: int = 6
    increment: float = 0.1

    def __post_init__(self):
        if self.kind not in ("static", "dynamic"):
            raise ValueError(f"unknown schedule kind {self.kind!r}")
        if self.kind == "dynamic":
            if self.periods < 1 or self.increment <= 0:
                raise ValueError("dynamic schedule needs periods >= 1, increment > 0")
            reach = self.start_value + self.periods * self.increment
            if reach < self.final_value - 1e-12:
                raise ValueError(
                    "schedule cannot reach final value: "
                    f"{self.start_value} + {self.periods}*{self.increment} < {self.final_value}"
                )


def schedule_value(s: Schedule, t: int, max_steps: int) -> float:
    """Stubborn opinion at step t (0 <= t <= max_steps)."""
    if s.kind == "static":
        return s.final_value
    period_len = max_steps // s.periods
    if period_len <= 0:
        return s.final_value
    return min(s.start_value + s.increment * (t // period_len), s.final_value)


def schedule_reached_final(s: Schedule, t: int, max_steps: int) -> bool:
    return schedule_value(s, t, max_steps) >= s.final_value - 1e-12


@dataclass(frozen=True)
class StubbornPlan:
    """A resolved intervention: who is stubborn and what schedule they follow."""

    measure: str
    fraction: float
    schedule: Schedule
    nodes: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "nodes", tuple(sorted(int(i) for i in self.nodes)))


UNCONTROLLED = StubbornPlan(measure="none", fraction=0.0, schedule=Schedule("static"))


@dataclass(frozen=True)
class OpinionState:
    opinions: np.ndarray
    confidences: np.ndarray
    stubborn_mask: np.ndarray
    time: int = 0

    @property
    def stubborn(self) -> frozenset:
        return frozenset(np.nonzero(self.stubborn_mask)[0].tolist())


@dataclass(frozen=True)
class SimConfig:
    max_steps: int = 10000
    conv_tol: float = 1e-4
    snapshot_interval: int = 10


@dataclass(frozen=True)
class SimResult:
    """Everything observed during one simulation run."""

    final_opinions: np.ndarray
    converged_at: int | None
    mean_series: np.ndarray
    frac_near_series: np.ndarray
    snapshot_steps: np.ndarray
    snapshots: np.ndarray
    stubborn: tuple
    seed: int | None = None

    @property
    def steps(self) -> int:
        return len(self.mean_series) - 1

    def to_dict(self) -> dict:
        return {
            "seed": self.seed,
            "converged_at": self.converged_at,
            "steps": self.steps,
            "stubborn": list(self.stubborn),
            "final_opinions": self.final_opinions.tolist(),
            "series": {
                "mean_opinion": self.mean_series.tolist(),
                "fraction_near_target": self.frac_near_series.tolist(),
            },
            "snapshot_steps": self.snapshot_steps.tolist(),
        }


def init_state(
    g: WeightedGraph,
    spec: InitSpec,
    rng: np.random.Generator,
    stubborn=(),
) -> OpinionState:
    """Draw i.i.d. initial opinions, then confidences (order matters for replay)."""
    n = g.node_count
    opinions = rng.random(n)
    confidences = spec.eps_low + (spec.eps_high - spec.eps_low) * rng.random(n)
    mask = np.zeros(n, dtype=bool)
    idx = np.asarray(sorted(int(i) for i in stubborn), dtype=np.int64)
    if len(idx):
        mask[idx] = True
    return OpinionState(opinions, confidences, mask, time=0)


def interaction_set(
    g: WeightedGraph,
    state: OpinionState,
    i: int,
    include_self: bool = False,
) -> np.ndarray:
    """Neighbors of i whose opinion lies within i's confidence bound."""
    x = state.opinions
    eps = float(state.confidences[i])
    xi = float(x[i])
    members = [j for j, _ in g.adjacency[i] if abs(xi - x[j]) <= eps]
    if include_self:
        members = sorted(members + [i])
    return np.asarray(members, dtype=np.int64)


def hk_step(
    g: WeightedGraph,
    state: OpinionState,
    schedule_value_now: float,
    include_self: bool = True,
) -> OpinionState:
    """One synchronous update.

    Non-stubborn agents with a nonempty interaction set take the weighted
    average of those neighbors' opinions; an empty set leaves the opinion
    unchanged.  Stubborn agents are set to ``schedule_value_now``.

    ``include_self`` adds the agent itself with unit weight (the classical
    form; the default because pure neighbor averaging admits two-cycles that
    never meet the convergence criterion).  With ``include_self=False`` the
    update is the literal neighbors-only weighted average.
    """
    x = state.opinions
    eps = state.confidences
    src, dst, w = g.directed_edges
    n = g.node_count
    x_src = x[src]
    ok = np.abs(x[dst] - x_src) <= eps[dst]
    # full-length bincounts with zeroed-out excluded terms keep the per-node
    # accumulation order fixed (ascending source id), so results match a
    # direct per-node evaluation bit for bit
    num = np.bincount(dst, weights=np.where(ok, w * x_src, 0.0), minlength=n)
    den = np.bincount(dst, weights=np.where(ok, w, 0.0), minlength=n)
    if include_self:
        num = x + num
        den = 1.0 + den
    has_peers = den > 0
    new = np.where(has_peers, num / np.where(has_peers, den, 1.0), x)
    new[state.stubborn_mask] = schedule_value_now
    return replace(state, opinions=new, time=state.time + 1)


def run_simulation(
    g: WeightedGraph,
    init: InitSpec,
    plan: StubbornPlan,
    sim: SimConfig,
    rng: np.random.Generator | None = None,
    seed: int | None = None,
    include_self: bool = True,
) -> SimResult:
    """Iterate hk_step until convergence or ``sim.max_steps``.

    Convergence is total absolute one-step change below ``sim.conv_tol``; for
    dynamic schedules the check only becomes active once the schedule has
    reached its final value.  Stubborn opinions start at the schedule's t=0
    value.
    """
    if rng is None:
        rng = np.random.default_rng(seed)
    state = init_state(g, init, rng, stubborn=plan.nodes)
    if plan.nodes:
        x0 = state.opinions.copy()
        x0[state.stubborn_mask] = schedule_value(plan.schedule, 0, sim.max_steps)
        state = replace(state, opinions=x0)

    target = plan.schedule.final_value
    tol = 0.05
    snap_every = sim.snapshot_interval
    mean_series = [float(state.opinions.mean())]
    frac_series = [float(np.mean(np.abs(state.opinions - target) < tol))]
    snapshot_steps = [0] if snap_every > 0 else []
    snapshots = [state.opinions.copy()] if snap_every > 0 else []

    converged_at: int | None = None
    for t in range(sim.max_steps):
        value_next = schedule_value(plan.schedule, t + 1, sim.max_steps)
        new_state = hk_step(g, state, value_next, include_self=include_self)
        delta = float(np.abs(new_state.opinions - state.opinions).sum())
        state = new_state
        mean_series.append(float(state.opinions.mean()))
        frac_series.append(float(np.mean(np.abs(state.opinions - target) < tol)))
        if snap_every > 0 and (t + 1) % snap_every == 0:
            snapshot_steps.append(t + 1)
            snapshots.append(state.opinions.copy())
        if delta < sim.conv_tol and schedule_reached_final(plan.schedule, t + 1, sim.max_steps):
            converged_at = t + 1
            break

    snap_arr = (
        np.asarray(snapshots) if snapshots else np.empty((0, g.node_count))
    )
    return SimResult(
        final_opinions=state.opinions,
        converged_at=converged_at,
        mean_series=np.asarray(mean_series),
        frac_near_series=np.asarray(frac_series),
        snapshot_steps=np.asarray(snapshot_steps, dtype=np.int64),
        snapshots=snap_arr,
        stubborn=plan.nodes,
        seed=seed,
    )
