"""Iterated container steps on the complete r-graph and the resulting upper
bounds on the number of pattern-free r-graphs, together with the exact
brute-force count they are checked against.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .balanced import greedy_build
from .containers import DEFAULT_MAX_LEAVES, container_step
from .errors import BoundError, GuardExceededError, PipelineAbort, SupersatError
from .hypergraph import TOLERANCE, HostGraph, ScaleParams, bits_to_mask, complete_host, density_exponent, subgraph
from .patterns import PatternSpec, copy_edge_ids, enumerate_copies, has_copy, oracle_count

logger = logging.getLogger(__name__)

DEFAULT_FREE_COUNT_MAX_EDGES = 24
MAX_SCHEDULE_LENGTH = 100_000


def m_of_n(pattern: PatternSpec, n: int) -> float:
    """n^(1+1/b) for theta patterns, n^(r - 1/(a_1..a_{r-1})) for complete ones."""
    if n < 1:
        raise BoundError(f"n must be positive, got {n}")
    return n ** density_exponent(pattern.kind, pattern.shape)


@dataclass(frozen=True)
class Schedule:
    """Geometric densities k(1) > k(2) > ... > k(t), stopping at the first k(t) <= k0."""

    values: tuple[float, ...]
    ratio: float
    k0: float
    m: float

    @property
    def t(self) -> int:
        return len(self.values)

    def k(self, i: int) -> float:
        return self.values[i - 1]


def build_schedule(n: int, pattern: PatternSpec, eps: float, k0: float) -> Schedule:
    if not 0 < eps < 1:
        raise BoundError(f"eps must lie in (0, 1), got {eps}")
    if k0 <= 0:
        raise BoundError(f"k0 must be positive, got {k0}")
    m = m_of_n(pattern, n)
    values = [math.comb(n, pattern.uniformity) / m]
    while values[-1] > k0:
        if len(values) >= MAX_SCHEDULE_LENGTH:
            raise GuardExceededError("density schedule length", len(values), MAX_SCHEDULE_LENGTH)
        values.append(values[-1] * (1 - eps))
    return Schedule(tuple(values), 1 - eps, k0, m)


@dataclass(frozen=True)
class LevelStats:
    """Per-level counts.

    ``kept`` containers pass through unchanged: sparse ones and dense ones without a copy.
    """

    level: int
    k: float
    threshold: float
    size: int
    replaced: int
    kept: int
    max_edges: int
    bound: int
    min_shrinkage: Optional[float]


@dataclass
class ContainerTree:
    """Container families C_0, C_1, ... as sets of edge identifiers of K_n^(r)."""

    host: HostGraph
    levels: list[list[frozenset[int]]] = field(default_factory=list)
    stats: list[LevelStats] = field(default_factory=list)
    aborted: Optional[PipelineAbort] = None

    @property
    def final(self) -> list[frozenset[int]]:
        return self.levels[-1]


@dataclass(frozen=True)
class PipelineResult:
    tree: ContainerTree
    schedule: Schedule
    bound: int
    sparse_bound: int
    sparse_limit: int


def power_bound(containers: Iterable[frozenset[int]]) -> int:
    return sum(2 ** len(container) for container in containers)


def sparse_power_bound(containers: Iterable[frozenset[int]], limit: int) -> int:
    """sum over containers of sum_{i <= limit} C(e(G), i)."""
    total = 0
    for container in containers:
        size = len(container)
        total += sum(math.comb(size, i) for i in range(min(limit, size) + 1))
    return total


def _expand(
    root: HostGraph,
    container: frozenset[int],
    pattern: PatternSpec,
    eps: float,
    *,
    delta: float,
    family_k: Optional[float],
    alpha: Optional[float],
    tau: Optional[float],
    target: Optional[int],
    max_leaves: int,
) -> tuple[list[frozenset[int]], Optional[float]]:
    host, edge_map = subgraph(root, container)
    if not has_copy(host, pattern):
        return [container], None
    params = ScaleParams.for_host(pattern, host, k=family_k, delta=delta)
    built = greedy_build(host, params, target)
    if len(built.family) == 0:
        return [container], None
    k = host.m / m_of_n(pattern, host.n)
    step = container_step(host, built.family, eps, alpha, k, tau=tau, max_leaves=max_leaves)
    children = [frozenset(edge_map[e] for e in child) for child in step.containers]
    return list(dict.fromkeys(children)), step.eps_prime


def run_pipeline(
    n: int,
    pattern: PatternSpec,
    eps: float,
    k0: float,
    *,
    delta: float = 1.0,
    family_k: Optional[float] = None,
    alpha: Optional[float] = None,
    tau: Optional[float] = None,
    target: Optional[int] = None,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> PipelineResult:
    """Replace every dense container by its container-step children, level by level.

    A level that cannot be completed stops the run; the returned tree then
    ends with the processed children plus the untouched remainder of that
    level, so its bound still covers every pattern-free graph.
    """
    schedule = build_schedule(n, pattern, eps, k0)
    root = complete_host(n, pattern.uniformity)
    tree = ContainerTree(root, levels=[[frozenset(range(root.m))]])
    m = schedule.m

    for level in range(1, schedule.t + 1):
        threshold = schedule.k(level) * m
        current = tree.levels[-1]
        following: list[frozenset[int]] = []
        replaced = kept = 0
        shrinkage: list[float] = []
        for index, container in enumerate(current):
            if len(container) < threshold * (1 - TOLERANCE):
                following.append(container)
                kept += 1
                continue
            try:
                children, eps_prime = _expand(
                    root, container, pattern, eps,
                    delta=delta, family_k=family_k, alpha=alpha, tau=tau, target=target, max_leaves=max_leaves,
                )
            except SupersatError as exc:
                tree.aborted = PipelineAbort(level, index, str(exc), exc)
                logger.warning("pipeline stopped: %s", tree.aborted)
                following.extend(current[index:])
                break
            following.extend(children)
            if children == [container]:
                kept += 1
            else:
                replaced += 1
            if eps_prime is not None:
                shrinkage.append(eps_prime)
        following = list(dict.fromkeys(following))
        tree.levels.append(following)
        tree.stats.append(LevelStats(
            level=level,
            k=schedule.k(level),
            threshold=threshold,
            size=len(following),
            replaced=replaced,
            kept=kept,
            max_edges=max((len(c) for c in following), default=0),
            bound=power_bound(following),
            min_shrinkage=min(shrinkage) if shrinkage else None,
        ))
        logger.info("level %d: k=%.6g, %d containers (%d replaced)", level, schedule.k(level), len(following), replaced)
        if tree.aborted is not None:
            break

    cube = k0**3
    ratio = m / cube if cube > 0 else math.inf
    limit = min(math.floor(ratio), root.m) if math.isfinite(ratio) else root.m
    return PipelineResult(
        tree=tree,
        schedule=schedule,
        bound=power_bound(tree.final),
        sparse_bound=sparse_power_bound(tree.final, limit),
        sparse_limit=limit,
    )


def verify_coverage(
    containers: Iterable[frozenset[int]],
    n: int,
    pattern: PatternSpec,
    guard: int = DEFAULT_FREE_COUNT_MAX_EDGES,
) -> bool:
    """True iff every pattern-free graph on [n] lies inside some container."""
    root = complete_host(n, pattern.uniformity)
    if root.m > guard:
        raise GuardExceededError("coverage sweep edge", root.m, guard)
    copies = [bits_to_mask(copy_edge_ids(copy, root)) for copy in enumerate_copies(root, pattern)]
    masks = [bits_to_mask(container) for container in containers]
    for subset in range(1 << root.m):
        if any(copy & ~subset == 0 for copy in copies):
            continue
        if not any(subset & ~mask == 0 for mask in masks):
            return False
    return True


def brute_force_free_count(
    n: int,
    pattern: PatternSpec,
    max_edges: Optional[int] = None,
    guard: int = DEFAULT_FREE_COUNT_MAX_EDGES,
) -> int:
    """Labelled pattern-free r-graphs on [n], tested one by one with the oracle."""
    r = pattern.uniformity
    all_edges = list(complete_host(n, r).edges)
    if len(all_edges) > guard:
        raise GuardExceededError("free-count sweep edge", len(all_edges), guard)
    count = 0
    for subset in range(1 << len(all_edges)):
        size = subset.bit_count()
        if max_edges is not None and size > max_edges:
            continue
        chosen = [edge for i, edge in enumerate(all_edges) if subset >> i & 1]
        if size < pattern.edge_count or oracle_count(HostGraph(n, r, chosen), pattern) == 0:
            count += 1
    return count
