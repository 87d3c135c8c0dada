"""Command-line entry point: generate, centrality, simulate, sweep, report.

Configuration lives in one JSON document with per-command sections; flags
override file values.  Unknown keys are rejected so stale configs fail loudly.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import metrics
from .centrality import (
    MEASURES,
    RANDOM_MEASURE,
    compute_measure,
    edge_salience,
    high_salience_skeleton,
    random_scores,
    rank_top_fraction,
)
from .dynamics import InitSpec, Schedule, SimConfig, StubbornPlan, run_simulation
from .experiment import (
    NetworkSpec,
    RunRecord,
    SweepSpec,
    aggregate,
    read_runs_csv,
    run_sweep,
    stable_seed,
    write_aggregates_csv,
    write_runs_csv,
    write_snapshot_csv,
)
from .generator import LfrParams, generate_lfr
from .graph import load_communities, load_edge_list, network_stats, save_communities, save_edge_list


class ConfigError(ValueError):
    pass


_TOP_KEYS = {"output_dir", "parallelism", "generator", "init", "sim", "schedule", "sweep"}
_SWEEP_KEYS = {
    "networks", "strategies", "measures", "fractions", "runs_per_cell",
    "master_seed", "distance_mode", "save_snapshots", "snapshot_bins",
}
_NETWORK_KEYS = {"id", "generator", "edge_file", "community_file", "instances", "id_prefix"}


def _check_keys(data: dict, allowed: set, where: str) -> None:
    unknown = set(data) - allowed
    if unknown:
        raise ConfigError(f"unknown key {sorted(unknown)[0]!r} in {where}")


def _build_dataclass(cls, data: dict, where: str, overrides: dict | None = None):
    fields = {f.name for f in dataclasses.fields(cls)}
    _check_keys(data, fields, where)
    merged = dict(data)
    if overrides:
        merged.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**merged)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def load_config(path) -> dict:
    if path is None:
        return {}
    try:
        with open(path) as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(cfg, dict):
        raise ConfigError("config root must be an object")
    _check_keys(cfg, _TOP_KEYS, "config")
    return cfg


def _networks_from_config(entries, base_dir: Path) -> list:
    networks = []
    for i, entry in enumerate(entries):
        _check_keys(entry, _NETWORK_KEYS, f"sweep.networks[{i}]")
        if "generator" in entry:
            count = entry.get("instances", 1)
            prefix = entry.get("id_prefix") or entry.get("id") or "lfr"
            for j in range(count):
                params_dict = dict(entry["generator"])
                if count > 1:
                    params_dict["seed"] = stable_seed(params_dict.get("seed", 0), j)
                params = _build_dataclass(LfrParams, params_dict, "sweep.networks.generator")
                net_id = entry["id"] if ("id" in entry and count == 1) else f"{prefix}-{j:02d}"
                networks.append(NetworkSpec(network_id=net_id, params=params))
        elif "edge_file" in entry:
            if "id" not in entry:
                raise ConfigError(f"sweep.networks[{i}]: file networks need an id")
            networks.append(NetworkSpec(
                network_id=entry["id"],
                edge_file=str(base_dir / entry["edge_file"]),
                community_file=str(base_dir / entry["community_file"])
                if entry.get("community_file") else None,
            ))
        else:
            raise ConfigError(f"sweep.networks[{i}]: need generator or edge_file")
    return networks


def _sweep_spec(cfg: dict, base_dir: Path, master_seed: int | None) -> SweepSpec:
    sweep_cfg = cfg.get("sweep")
    if not sweep_cfg:
        raise ConfigError("config has no sweep section")
    _check_keys(sweep_cfg, _SWEEP_KEYS, "sweep")
    if "networks" not in sweep_cfg:
        raise ConfigError("sweep: networks is required")
    networks = _networks_from_config(sweep_cfg["networks"], base_dir)
    sim = _build_dataclass(SimConfig, cfg.get("sim", {}), "sim")
    init = _build_dataclass(InitSpec, cfg.get("init", {}), "init")
    return SweepSpec(
        networks=tuple(networks),
        strategies=tuple(sweep_cfg.get("strategies", ("static",))),
        measures=tuple(sweep_cfg.get("measures", ("salience",))),
        fractions=tuple(sweep_cfg.get("fractions", (0.001, 0.002, 0.005, 0.01, 0.02))),
        runs_per_cell=sweep_cfg.get("runs_per_cell", 50),
        master_seed=master_seed if master_seed is not None
        else sweep_cfg.get("master_seed", 0),
        sim=sim,
        init=init,
        distance_mode=sweep_cfg.get("distance_mode", "reciprocal"),
        save_snapshots=sweep_cfg.get("save_snapshots", False),
        snapshot_bins=sweep_cfg.get("snapshot_bins", 50),
    )


def _load_graph(edge_path, community_path):
    g = load_edge_list(edge_path)
    if community_path:
        g = load_communities(community_path, g)
    return g


def _out_dir(args, cfg) -> Path:
    out = Path(args.out_dir or cfg.get("output_dir") or "out")
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_generate(args) -> int:
    cfg = load_config(args.config)
    overrides = {
        "n": args.n, "k_mean": args.k_mean, "k_min": args.k_min, "k_max": args.k_max,
        "c_min": args.c_min, "c_max": args.c_max, "mu_topo": args.mu_topo,
        "mu_w": args.mu_w, "beta": args.beta, "seed": args.seed,
    }
    params = _build_dataclass(LfrParams, cfg.get("generator", {}), "generator", overrides)
    out = _out_dir(args, cfg)
    for i in range(args.instances):
        p = params if args.instances == 1 else dataclasses.replace(
            params, seed=stable_seed(params.seed, i)
        )
        g = generate_lfr(p)
        name = f"{args.prefix}-{i:02d}" if args.instances > 1 else args.prefix
        save_edge_list(g, out / f"{name}.edges")
        save_communities(g, out / f"{name}.communities")
        stats = network_stats(g)
        n_comm = len(np.unique(g.communities))
        print(
            f"{name}: N={g.node_count} |E|={stats.edge_count} k_mean={stats.k_mean:.2f} "
            f"communities={n_comm} assortativity={stats.assortativity:.3f} "
            f"clustering={stats.clustering:.3f}"
        )
    return 0


def cmd_centrality(args) -> int:
    g = _load_graph(args.graph, args.communities)
    measures = args.measures.split(",") if args.measures else list(MEASURES)
    for m in measures:
        if m not in MEASURES:
            raise ConfigError(f"unknown measure {m!r}")
    rows = []
    for m in measures:
        scores = compute_measure(g, m, args.distance_mode)
        rows.extend((i, m, float(v)) for i, v in enumerate(scores.values))
    out_path = Path(args.out)
    with out_path.open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["node", "measure", "value"])
        for node, m, v in rows:
            writer.writerow([node, m, repr(v)])
    print(f"wrote {out_path} ({len(measures)} measures x {g.node_count} nodes)")
    if args.hss_out:
        es = edge_salience(g, args.distance_mode)
        hss = high_salience_skeleton(g, args.hss_threshold, edge_scores=es)
        save_edge_list(hss, args.hss_out)
        print(
            f"wrote {args.hss_out} (HSS keeps {hss.node_count}/{g.node_count} nodes, "
            f"{hss.edge_count}/{g.edge_count} edges at threshold {args.hss_threshold})"
        )
    return 0


def cmd_simulate(args) -> int:
    cfg = load_config(args.config)
    g = _load_graph(args.graph, args.communities)
    init = _build_dataclass(InitSpec, cfg.get("init", {}), "init")
    sim = _build_dataclass(SimConfig, cfg.get("sim", {}), "sim")
    schedule = _build_dataclass(
        Schedule, cfg.get("schedule", {}), "schedule",
        {"kind": args.strategy},
    )
    seed = args.seed if args.seed is not None else 0

    sel_ss, init_ss = np.random.SeedSequence(seed).spawn(2)
    if args.measure == "none" or args.fraction == 0:
        plan = StubbornPlan("none", 0.0, schedule, ())
    else:
        if args.measure == RANDOM_MEASURE:
            scores = random_scores(g.node_count)
        elif args.measure in MEASURES:
            scores = compute_measure(g, args.measure, args.distance_mode)
        else:
            raise ConfigError(f"unknown measure {args.measure!r}")
        nodes = rank_top_fraction(scores, args.fraction, np.random.default_rng(sel_ss))
        plan = StubbornPlan(args.measure, args.fraction, schedule, tuple(nodes))
    result = run_simulation(g, init, plan, sim, rng=np.random.default_rng(init_ss), seed=seed)

    out = _out_dir(args, cfg)
    network_id = Path(args.graph).stem
    record = RunRecord(
        network_id=network_id, strategy=schedule.kind, measure=plan.measure,
        fraction=plan.fraction, run_index=0, seed=seed,
        final_mean=metrics.mean_opinion(result.final_opinions),
        fraction_near=metrics.fraction_near(result.final_opinions, schedule.final_value),
        converged_at=result.converged_at, steps=result.steps,
    )
    write_runs_csv([record], out / "runs.csv")
    with (out / "result.json").open("w") as fh:
        payload = result.to_dict()
        payload["network_id"] = network_id
        payload["measure"] = plan.measure
        payload["fraction"] = plan.fraction
        payload["strategy"] = schedule.kind
        json.dump(payload, fh, indent=1)
        fh.write("\n")
    with (out / "series.csv").open("w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["step", "mean_opinion", "fraction_near"])
        for t, (m, f) in enumerate(zip(result.mean_series, result.frac_near_series)):
            writer.writerow([t, repr(float(m)), repr(float(f))])
    if len(result.snapshots):
        record.snapshot_steps = result.snapshot_steps
        record.snapshot_counts = np.stack(
            [metrics.histogram(row, args.snapshot_bins) for row in result.snapshots]
        )
        write_snapshot_csv(record, out / "snapshots.csv")
    status = f"converged at step {result.converged_at}" if result.converged_at else "did not converge"
    print(
        f"{network_id}: final mean {record.final_mean:.4f}, "
        f"captured {record.fraction_near:.3f}, {status}"
    )
    return 0


def cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    base_dir = Path(args.config).parent if args.config else Path.cwd()
    spec = _sweep_spec(cfg, base_dir, args.seed)
    parallelism = args.jobs or cfg.get("parallelism", 1)
    records = run_sweep(spec, parallelism=parallelism)
    out = _out_dir(args, cfg)
    write_runs_csv(records, out / "runs.csv")
    write_aggregates_csv(aggregate(records), out / "aggregates.csv")
    if spec.save_snapshots:
        snap_dir = out / "snapshots"
        snap_dir.mkdir(exist_ok=True)
        for r in records:
            if r.snapshot_counts is not None:
                write_snapshot_csv(r, snap_dir / f"{r.job_id}.csv")
    failures = sum(1 for r in records if r.error is not None)
    print(f"wrote {out / 'runs.csv'} ({len(records)} runs, {failures} failures) and aggregates.csv")
    return 0 if failures == 0 else 1


def cmd_report(args) -> int:
    records = read_runs_csv(args.runs)
    rows = aggregate(records)
    write_aggregates_csv(rows, args.out)
    print(f"wrote {args.out} ({len(rows)} aggregate rows from {len(records)} runs)")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="swaysim",
        description="Stubborn-agent opinion dynamics on weighted community networks.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="generate benchmark network instances")
    p.add_argument("--config")
    p.add_argument("--out-dir")
    p.add_argument("--prefix", default="lfr")
    p.add_argument("--instances", type=int, default=1)
    p.add_argument("--n", type=int)
    p.add_argument("--k-mean", type=float)
    p.add_argument("--k-min", type=int)
    p.add_argument("--k-max", type=int)
    p.add_argument("--c-min", dest="c_min", type=int)
    p.add_argument("--c-max", dest="c_max", type=int)
    p.add_argument("--mu-topo", type=float)
    p.add_argument("--mu-w", type=float)
    p.add_argument("--beta", type=float)
    p.add_argument("--seed", type=int)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("centrality", help="compute per-node centrality tables")
    p.add_argument("--graph", required=True)
    p.add_argument("--communities")
    p.add_argument("--measures", help="comma-separated subset (default: all)")
    p.add_argument("--distance-mode", default="reciprocal", choices=["hop", "reciprocal"])
    p.add_argument("--out", required=True)
    p.add_argument("--hss-out")
    p.add_argument("--hss-threshold", type=float, default=0.9)
    p.set_defaults(func=cmd_centrality)

    p = sub.add_parser("simulate", help="run a single simulation")
    p.add_argument("--config")
    p.add_argument("--graph", required=True)
    p.add_argument("--communities")
    p.add_argument("--measure", default="none",
                   help="centrality, 'random', or 'none' for uncontrolled")
    p.add_argument("--fraction", type=float, default=0.0)
    p.add_argument("--strategy", default="static", choices=["static", "dynamic"])
    p.add_argument("--distance-mode", default="reciprocal", choices=["hop", "reciprocal"])
    p.add_argument("--snapshot-bins", type=int, default=50)
    p.add_argument("--seed", type=int)
    p.add_argument("--out-dir")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("sweep", help="run the full experiment grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out-dir")
    p.add_argument("--jobs", type=int, help="worker processes (default: config parallelism)")
    p.add_argument("--seed", type=int, help="override master seed")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("report", help="re-aggregate an existing runs.csv")
    p.add_argument("--runs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
