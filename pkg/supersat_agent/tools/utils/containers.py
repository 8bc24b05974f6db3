"""One container step over the supersaturation hypergraph of a family.

The hypergraph has the host's edges as ground set and one hyperedge per
family member (the member's host edges). Containers are produced by a
max-degree fingerprint walk: the ground element of largest weighted degree is
either put into the fingerprint or discarded, and the walk branches on that
choice until few enough hyperedges survive.
"""

import logging
import math
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations
from typing import Iterable, Optional

from .balanced import AuditRow, BalancedFamily, default_alpha
from .errors import (
    BoundError,
    CodegreeCheckError,
    ContainerError,
    DegenerateTauError,
    EmptyFamilyError,
    GuardExceededError,
)
from .hypergraph import HostGraph, bits_to_mask, conservative_ceil, density_exponent, iter_bits
from .patterns import PatternSpec, copy_edge_ids, enumerate_copies

logger = logging.getLogger(__name__)

DEFAULT_CONTAINER_MAX_EDGES = 18
DEFAULT_MAX_LEAVES = 1 << 16
SOUNDNESS_SAMPLE_LIMIT = 4096


@dataclass(frozen=True)
class SupersatHypergraph:
    """s-uniform hypergraph on ``range(ground_size)``, hyperedges may repeat."""

    ground_size: int
    uniformity: int
    hyperedges: tuple[frozenset[int], ...]

    def __post_init__(self):
        for hyperedge in self.hyperedges:
            if len(hyperedge) != self.uniformity:
                raise ContainerError(f"hyperedge {sorted(hyperedge)} does not have {self.uniformity} elements")
            if min(hyperedge) < 0 or max(hyperedge) >= self.ground_size:
                raise ContainerError(f"hyperedge {sorted(hyperedge)} leaves the ground set")

    @cached_property
    def masks(self) -> tuple[int, ...]:
        return tuple(bits_to_mask(hyperedge) for hyperedge in self.hyperedges)

    def degrees(self) -> Counter:
        counts: Counter = Counter()
        for hyperedge in self.hyperedges:
            counts.update(hyperedge)
        return counts

    def inside(self, allowed: int) -> int:
        """Number of hyperedges contained in the ground subset ``allowed``."""
        return sum(1 for mask in self.masks if mask & ~allowed == 0)


def build_supersat(g: HostGraph, fam: BalancedFamily) -> SupersatHypergraph:
    if len(fam) == 0:
        raise EmptyFamilyError("the supersaturation hypergraph needs at least one member")
    hyperedges = tuple(copy_edge_ids(member, g) for member in fam.members)
    sizes = {len(hyperedge) for hyperedge in hyperedges}
    if len(sizes) != 1:
        raise ContainerError(f"members have differing edge-set sizes {sorted(sizes)}")
    return SupersatHypergraph(g.m, sizes.pop(), hyperedges)


@dataclass(frozen=True)
class CodegreeProfile:
    deltas: tuple[int, ...]
    average_degree: float
    ground_size: int

    def delta(self, j: int) -> int:
        return self.deltas[j - 1]


def codegree_profile(h: SupersatHypergraph) -> CodegreeProfile:
    """Maximum j-degrees for j = 1..s and the average degree s|E|/N."""
    if h.ground_size == 0:
        raise ContainerError("empty ground set")
    deltas = []
    for j in range(1, h.uniformity + 1):
        counts: Counter = Counter()
        for hyperedge in h.hyperedges:
            counts.update(frozenset(c) for c in combinations(sorted(hyperedge), j))
        deltas.append(max(counts.values(), default=0))
    average = h.uniformity * len(h.hyperedges) / h.ground_size
    return CodegreeProfile(tuple(deltas), average, h.ground_size)


def codegree_fn(h: SupersatHypergraph, tau: float, profile: Optional[CodegreeProfile] = None) -> float:
    """(1/d) * sum_{j=2..s} Delta_j / tau^(j-1)."""
    if not h.hyperedges:
        raise ContainerError("the co-degree function needs at least one hyperedge")
    if tau <= 0:
        raise BoundError(f"tau must be positive, got {tau}")
    if tau >= 1:
        logger.warning("co-degree function evaluated at tau=%.6g >= 1", tau)
    profile = codegree_profile(h) if profile is None else profile
    total = sum(profile.delta(j) / tau ** (j - 1) for j in range(2, h.uniformity + 1))
    return total / profile.average_degree


class _FingerprintWalk:
    """State transitions of the fingerprint algorithm over bitmask states.

    A state is ``(fingerprint, survivors)``; the walk stops once at most
    ``eps * |E|`` hyperedges lie inside ``fingerprint | survivors``.
    """

    def __init__(self, h: SupersatHypergraph, eps: float):
        self.h = h
        self.limit = eps * len(h.hyperedges)
        # Any one hyperedge with a smaller residual outweighs all larger ones.
        self.base = len(h.hyperedges) + 1

    def settled(self, fingerprint: int, survivors: int) -> bool:
        return survivors == 0 or self.h.inside(fingerprint | survivors) <= self.limit

    def pick(self, fingerprint: int, survivors: int) -> int:
        allowed = fingerprint | survivors
        weights: dict[int, int] = {}
        for mask in self.h.masks:
            if mask & ~allowed:
                continue
            residual = mask & ~fingerprint
            weight = self.base ** (self.h.uniformity - residual.bit_count())
            for element in iter_bits(residual):
                weights[element] = weights.get(element, 0) + weight
        if not weights:
            return next(iter_bits(survivors))
        return min(weights, key=lambda element: (-weights[element], element))

    def take(self, fingerprint: int, survivors: int, element: int) -> tuple[int, int]:
        fingerprint |= 1 << element
        survivors &= ~(1 << element)
        allowed = fingerprint | survivors
        for mask in self.h.masks:
            if mask & ~allowed == 0:
                residual = mask & ~fingerprint
                if residual.bit_count() == 1:
                    survivors &= ~residual
        return fingerprint, survivors

    @staticmethod
    def skip(fingerprint: int, survivors: int, element: int) -> tuple[int, int]:
        return fingerprint, survivors & ~(1 << element)


def assign_container(h: SupersatHypergraph, independent_set: Iterable[int], eps: float) -> tuple[frozenset[int], tuple[int, ...]]:
    """Follow the fingerprint walk for one independent set; return (container, fingerprint)."""
    walk = _FingerprintWalk(h, eps)
    chosen = bits_to_mask(independent_set)
    fingerprint, survivors = 0, (1 << h.ground_size) - 1
    order: list[int] = []
    while not walk.settled(fingerprint, survivors):
        element = walk.pick(fingerprint, survivors)
        if chosen >> element & 1:
            fingerprint, survivors = walk.take(fingerprint, survivors, element)
            order.append(element)
        else:
            fingerprint, survivors = walk.skip(fingerprint, survivors, element)
    return frozenset(iter_bits(fingerprint | survivors)), tuple(order)


def enumerate_containers(h: SupersatHypergraph, eps: float, max_leaves: int = DEFAULT_MAX_LEAVES) -> list[tuple[tuple[int, ...], frozenset[int]]]:
    """Every leaf of the fingerprint tree as (fingerprint, container), sorted by fingerprint."""
    walk = _FingerprintWalk(h, eps)
    leaves = []
    stack = [((), 0, (1 << h.ground_size) - 1)]
    while stack:
        order, fingerprint, survivors = stack.pop()
        if walk.settled(fingerprint, survivors):
            leaves.append((order, frozenset(iter_bits(fingerprint | survivors))))
            if len(leaves) > max_leaves:
                raise GuardExceededError("container tree leaf", len(leaves), max_leaves)
            continue
        element = walk.pick(fingerprint, survivors)
        stack.append((order, *walk.skip(fingerprint, survivors, element)))
        stack.append((order + (element,), *walk.take(fingerprint, survivors, element)))
    leaves.sort(key=lambda leaf: leaf[0])
    return leaves


@dataclass(frozen=True)
class ContainerFamily:
    containers: tuple[frozenset[int], ...]
    fingerprints: tuple[tuple[int, ...], ...]
    eps: float
    tau: float
    codegree: float
    count_bound: float
    eps_prime: float
    ground_size: int
    hyperedges: tuple[frozenset[int], ...]

    def to_dict(self) -> dict:
        return {
            "eps": self.eps,
            "tau": self.tau,
            "codegree": self.codegree,
            "count_bound": self.count_bound,
            "eps_prime": self.eps_prime,
            "ground_size": self.ground_size,
            "members": len(self.hyperedges),
            "containers": [sorted(container) for container in self.containers],
            "fingerprints": [list(fingerprint) for fingerprint in self.fingerprints],
        }


def default_tau(eps: float, k: float, alpha: float) -> float:
    """1/tau = eps^2 k^(1+alpha)."""
    return 1.0 / (eps**2 * k ** (1 + alpha))


def container_step(
    g: HostGraph,
    fam: BalancedFamily,
    eps: float,
    alpha: Optional[float] = None,
    k: Optional[float] = None,
    *,
    tau: Optional[float] = None,
    max_leaves: int = DEFAULT_MAX_LEAVES,
) -> ContainerFamily:
    """Containers for the independent sets of the family's supersaturation hypergraph."""
    if g.m == 0:
        raise ContainerError("empty ground set")
    if eps <= 0:
        raise BoundError(f"eps must be positive, got {eps}")
    h = build_supersat(g, fam)
    if tau is None:
        alpha = default_alpha(fam.pattern) if alpha is None else alpha
        if k is None:
            k = g.m / g.n ** density_exponent(fam.pattern.kind, fam.pattern.shape)
        tau = default_tau(eps, k, alpha)
    if not 0 < tau < 1:
        raise DegenerateTauError(tau)

    value = codegree_fn(h, tau)
    if value > eps:
        raise CodegreeCheckError(value, eps, tau)

    leaves = enumerate_containers(h, eps, max_leaves)
    count_bound = math.exp(tau * math.log(1 / tau) * h.ground_size / eps)
    eps_prime = min((h.ground_size - len(container)) / h.ground_size for _, container in leaves)
    logger.info(
        "container step: %d members, delta(H,tau)=%.6g, %d containers (bound %.6g)",
        len(h.hyperedges), value, len(leaves), count_bound,
    )
    return ContainerFamily(
        containers=tuple(container for _, container in leaves),
        fingerprints=tuple(order for order, _ in leaves),
        eps=eps,
        tau=tau,
        codegree=value,
        count_bound=count_bound,
        eps_prime=eps_prime,
        ground_size=h.ground_size,
        hyperedges=h.hyperedges,
    )


@dataclass(frozen=True)
class ContainerReport:
    rows: tuple[AuditRow, ...]
    free_subgraphs: int

    @property
    def passed(self) -> bool:
        return all(row.status != "fail" for row in self.rows)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "free_subgraphs": self.free_subgraphs,
            "checks": [{"name": row.name, "status": row.status, "detail": row.detail} for row in self.rows],
        }


def pattern_free_masks(g: HostGraph, pattern: PatternSpec) -> list[int]:
    """Edge masks of every spanning subgraph of g with no copy of the pattern."""
    copies = [bits_to_mask(copy_edge_ids(copy, g)) for copy in enumerate_copies(g, pattern)]
    return [
        subset for subset in range(1 << g.m)
        if not any(copy & ~subset == 0 for copy in copies)
    ]


def verify_containers(
    cf: ContainerFamily,
    g: HostGraph,
    pattern: PatternSpec,
    guard: int = DEFAULT_CONTAINER_MAX_EDGES,
    soundness_limit: int = SOUNDNESS_SAMPLE_LIMIT,
) -> ContainerReport:
    """Exhaustively re-check the container properties over all pattern-free subgraphs."""
    if g.m > guard:
        raise GuardExceededError("container verification edge", g.m, guard)
    free = pattern_free_masks(g, pattern)
    containers = [bits_to_mask(container) for container in cf.containers]
    members = [bits_to_mask(hyperedge) for hyperedge in cf.hyperedges]
    ground = (1 << g.m) - 1

    uncovered = next((subset for subset in free if not any(subset & ~c == 0 for c in containers)), None)
    rows = [AuditRow(
        "property_1",
        "pass" if uncovered is None else "fail",
        f"{len(free)} pattern-free subgraphs covered" if uncovered is None
        else f"subgraph {sorted(iter_bits(uncovered))} is in no container",
    )]

    limit = cf.eps * len(members)
    worst = max((sum(1 for m in members if m & ~c == 0) for c in containers), default=0)
    rows.append(AuditRow(
        "property_2",
        "pass" if worst <= limit else "fail",
        f"max members inside a container {worst} vs eps*|E|={limit:.6g}",
    ))

    within = len(containers) <= conservative_ceil(cf.count_bound)
    rows.append(AuditRow(
        "count_bound",
        "pass" if within else "fail",
        f"{len(containers)} containers vs bound {cf.count_bound:.6g}",
    ))

    nested = all(
        bits_to_mask(fingerprint) & ~c == 0 and c & ~ground == 0
        for fingerprint, c in zip(cf.fingerprints, containers)
    ) and len(cf.fingerprints) == len(containers)
    rows.append(AuditRow("nesting", "pass" if nested else "fail", "fingerprint <= container <= E(G)"))

    rows.append(_soundness_row(cf, free, soundness_limit))
    return ContainerReport(tuple(rows), len(free))


def _soundness_row(cf: ContainerFamily, free: list[int], limit: int) -> AuditRow:
    if not cf.hyperedges:
        return AuditRow("fingerprint_soundness", "skip", "no members")
    h = SupersatHypergraph(cf.ground_size, len(cf.hyperedges[0]), cf.hyperedges)
    stride = max(1, -(-len(free) // limit))
    issued = set(cf.containers)
    checked = 0
    for subset in free[::stride]:
        elements = frozenset(iter_bits(subset))
        container, fingerprint = assign_container(h, elements, cf.eps)
        checked += 1
        if not (set(fingerprint) <= elements <= container and container in issued):
            return AuditRow("fingerprint_soundness", "fail", f"subgraph {sorted(elements)} mapped outside its container")
    detail = f"{checked} of {len(free)} subgraphs walked"
    return AuditRow("fingerprint_soundness", "pass", detail)
