"""Stubborn-agent opinion dynamics on weighted community networks."""

from .graph import GraphError, NetworkStats, WeightedGraph, load_communities, load_edge_list, network_stats, save_communities, save_edge_list
from .generator import GenerationError, LfrParams, ParameterError, generate_lfr
from .centrality import EdgeScores, NodeScores, MEASURES, RANDOM_MEASURE, compute_measure, high_salience_skeleton, rank_top_fraction
from .dynamics import InitSpec, OpinionState, Schedule, SimConfig, SimResult, StubbornPlan, hk_step, init_state, run_simulation, schedule_value
from .experiment import AggregateRow, Job, NetworkSpec, RunRecord, SweepSpec, aggregate, expand_sweep, run_sweep
from . import metrics

__all__ = [
    "AggregateRow", "EdgeScores", "GenerationError", "GraphError", "InitSpec",
    "Job", "LfrParams", "MEASURES", "NetworkSpec", "NetworkStats", "NodeScores",
    "OpinionState", "ParameterError", "RANDOM_MEASURE", "RunRecord", "Schedule",
    "SimConfig", "SimResult", "StubbornPlan", "SweepSpec", "WeightedGraph",
    "aggregate", "compute_measure", "expand_sweep", "generate_lfr",
    "high_salience_skeleton", "hk_step", "init_state", "load_communities",
    "load_edge_list", "metrics", "network_stats", "rank_top_fraction",
    "run_simulation", "run_sweep", "save_communities", "save_edge_list",
    "schedule_value",
]

__version__ = "0.1.0"
