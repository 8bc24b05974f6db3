from .balanced import BalancedFamily, audit_family, greedy_build, is_good
from .containers import container_step, verify_containers
from .documents import dump_graph, load_family, load_graph
from .errors import SupersatError
from .hypergraph import HostGraph, ScaleParams, complete_host
from .patterns import PatternSpec, enumerate_copies, oracle_count
from .pipeline import brute_force_free_count, run_pipeline

__all__ = [
    "BalancedFamily",
    "HostGraph",
    "PatternSpec",
    "ScaleParams",
    "SupersatError",
    "audit_family",
    "brute_force_free_count",
    "complete_host",
    "container_step",
    "dump_graph",
    "enumerate_copies",
    "greedy_build",
    "is_good",
    "load_family",
    "load_graph",
    "oracle_count",
    "run_pipeline",
    "verify_containers",
]
