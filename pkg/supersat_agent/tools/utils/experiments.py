"""Seeded test hosts and the supersaturation trend table."""

import logging
import math
import random
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Literal, Optional

import networkx as nx

from .errors import BoundError, GuardExceededError, HostGraphError
from .hypergraph import HostGraph, complete_host
from .patterns import PatternSpec, enumerate_copies
from .pipeline import m_of_n

logger = logging.getLogger(__name__)

DEFAULT_TREND_MAX_VERTICES = 40


def random_host(n: int, m: Optional[int] = None, p: Optional[float] = None, r: int = 2, seed: int = 0) -> HostGraph:
    """Uniform r-graph with exactly ``m`` edges, or binomial with edge probability ``p``."""
    if (m is None) == (p is None):
        raise HostGraphError("pass exactly one of m or p")
    total = math.comb(n, r)
    if m is not None and not 0 <= m <= total:
        raise HostGraphError(f"cannot place {m} edges among {total} possible {r}-sets")
    if p is not None and not 0 <= p <= 1:
        raise HostGraphError(f"edge probability must lie in [0, 1], got {p}")

    if r == 2:
        if m is not None:
            graph = nx.gnm_random_graph(n, m, seed=seed)
        else:
            graph = nx.gnp_random_graph(n, p, seed=seed)
        return HostGraph(n, 2, graph.edges())

    rng = random.Random(seed)
    candidates = list(combinations(range(n), r))
    if m is not None:
        chosen = rng.sample(candidates, m)
    else:
        chosen = [edge for edge in candidates if rng.random() < p]
    return HostGraph(n, r, chosen)


@dataclass(frozen=True)
class TrendRow:
    n: int
    m: int
    count: int
    benchmark: float
    ratio: float
    below_threshold: bool

    def as_row(self) -> list:
        return [self.n, self.m, self.count, f"{self.benchmark:.12g}", f"{self.ratio:.12g}", int(self.below_threshold)]


TREND_COLUMNS = ["n", "m", "count", "benchmark", "ratio", "below_threshold"]


def trend_benchmark(pattern: PatternSpec, n: int, m: int) -> float:
    """m^e(H) n^(v(H) - r e(H)), the order of the supersaturated copy count."""
    e = pattern.edge_count
    return float(m) ** e * float(n) ** (pattern.vertex_count - pattern.uniformity * e)


def trend_hosts(
    pattern: PatternSpec,
    sizes: Iterable[int],
    hosts: Literal["complete", "random"] = "complete",
    density: float = 2.0,
    seed: int = 0,
) -> Iterable[HostGraph]:
    r = pattern.uniformity
    for n in sizes:
        if hosts == "complete":
            yield complete_host(n, r)
        else:
            edges = min(math.ceil(density * m_of_n(pattern, n)), math.comb(n, r))
            yield random_host(n, m=edges, r=r, seed=seed + n)


def supersat_trend(
    pattern: PatternSpec,
    hosts: Iterable[HostGraph],
    threshold_c: float = 1.0,
    max_vertices: int = DEFAULT_TREND_MAX_VERTICES,
    workers: int = 1,
) -> list[TrendRow]:
    """Exact copy counts against the supersaturation benchmark, one row per host."""
    if threshold_c < 0:
        raise BoundError(f"threshold constant must be non-negative, got {threshold_c}")
    rows = []
    for host in hosts:
        if host.n > max_vertices:
            raise GuardExceededError("trend host vertex", host.n, max_vertices)
        count = sum(1 for _ in enumerate_copies(host, pattern, workers))
        benchmark = trend_benchmark(pattern, host.n, host.m)
        ratio = count / benchmark if count and benchmark > 0 else 0.0
        below = host.m < threshold_c * m_of_n(pattern, host.n)
        rows.append(TrendRow(host.n, host.m, count, benchmark, ratio, below))
        logger.debug("trend n=%d m=%d count=%d ratio=%.6g", host.n, host.m, count, ratio)
    return rows


def parse_sizes(text: str) -> list[int]:
    """``"4..8"`` (inclusive) or ``"4,6,8"``."""
    text = text.strip()
    try:
        if ".." in text:
            low, high = (int(part) for part in text.split("..", 1))
            sizes = list(range(low, high + 1))
        else:
            sizes = [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise BoundError(f"cannot read sizes {text!r}: expected LOW..HIGH or a comma list") from exc
    if not sizes or min(sizes) < 1:
        raise BoundError(f"sizes must be a non-empty list of positive integers, got {text!r}")
    return sizes
