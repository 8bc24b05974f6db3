"""Host graphs and hypergraphs with bitset indexes, forest tests, pruning passes
and the scale parameters every degree cap is evaluated against.

Edge identifiers are positions in the lexicographically sorted edge list, so
anything that iterates "in identifier order" is reproducible without any
canonical labelling.
"""

import logging
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations
from typing import TYPE_CHECKING, Iterable, Iterator, Optional, Sequence

import networkx as nx
from networkx.utils import UnionFind

from .errors import BoundError, HostGraphError

if TYPE_CHECKING:
    from .balanced import BalancedFamily

logger = logging.getLogger(__name__)

# Relative slack applied when a real-valued bound is compared with an integer.
TOLERANCE = 2.0**-40

EdgeSubset = frozenset  # frozenset[int] of edge identifiers


def iter_bits(mask: int) -> Iterator[int]:
    """Yield the positions of the set bits of ``mask`` in increasing order."""
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def bits_to_mask(positions: Iterable[int]) -> int:
    mask = 0
    for position in positions:
        mask |= 1 << position
    return mask


def conservative_floor(value: float) -> int:
    """Floor of a real bound after rounding it up by the comparison tolerance."""
    if math.isnan(value):
        raise BoundError("bound evaluated to NaN")
    if value <= 0:
        return 0
    if math.isinf(value):
        return sys.maxsize
    return math.floor(value * (1.0 + TOLERANCE))


def conservative_ceil(value: float) -> float:
    """A real bound rounded up by the comparison tolerance."""
    return value * (1.0 + TOLERANCE) if value > 0 else value


class HostGraph:
    """A simple graph (``r == 2``) or an r-uniform hypergraph on ``range(n)``.

    Instances are never mutated after construction and may be shared freely
    between threads. ``incident_mask(v)`` is the bitset of edge identifiers
    containing ``v``; ``link_mask(vs)`` is the bitset of vertices ``w`` such
    that ``vs + {w}`` is an edge.
    """

    __slots__ = ("n", "r", "edges", "_ids", "_incidence", "_links")

    def __init__(self, n: int, r: int, edges: Iterable[Sequence[int]] = ()):
        if r < 2:
            raise HostGraphError(f"uniformity must be at least 2, got {r}")
        if n < 0:
            raise HostGraphError(f"vertex count must be non-negative, got {n}")

        canonical = []
        for edge in edges:
            vertices = tuple(sorted(int(v) for v in edge))
            if len(vertices) != r or len(set(vertices)) != r:
                raise HostGraphError(f"edge {list(edge)} is not a set of {r} distinct vertices")
            if vertices[0] < 0 or vertices[-1] >= n:
                raise HostGraphError(f"edge {list(edge)} has a vertex outside [0, {n})")
            canonical.append(vertices)
        ordered = sorted(canonical)
        for first, second in zip(ordered, ordered[1:]):
            if first == second:
                raise HostGraphError(f"duplicate edge {list(first)}")

        incidence = [0] * n
        links: dict[tuple[int, ...], int] = {}
        for edge_id, vertices in enumerate(ordered):
            for position, vertex in enumerate(vertices):
                incidence[vertex] |= 1 << edge_id
                rest = vertices[:position] + vertices[position + 1 :]
                links[rest] = links.get(rest, 0) | (1 << vertex)

        self.n = n
        self.r = r
        self.edges: tuple[tuple[int, ...], ...] = tuple(ordered)
        self._ids = {vertices: edge_id for edge_id, vertices in enumerate(ordered)}
        self._incidence = tuple(incidence)
        self._links = links

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def all_edges_mask(self) -> int:
        return (1 << len(self.edges)) - 1

    def find_edge(self, vertices: Iterable[int]) -> Optional[int]:
        return self._ids.get(tuple(sorted(vertices)))

    def edge_id(self, vertices: Iterable[int]) -> int:
        vertices = tuple(vertices)
        edge_id = self.find_edge(vertices)
        if edge_id is None:
            raise HostGraphError(f"{list(vertices)} is not an edge of the host")
        return edge_id

    def has_edge(self, vertices: Iterable[int]) -> bool:
        return self.find_edge(vertices) is not None

    def incident_mask(self, vertex: int) -> int:
        return self._incidence[vertex]

    def degree(self, vertex: int) -> int:
        return self._incidence[vertex].bit_count()

    def link_mask(self, vertices: Iterable[int]) -> int:
        return self._links.get(tuple(sorted(vertices)), 0)

    def neighbor_mask(self, vertex: int) -> int:
        """Vertices sharing an edge with ``vertex`` (graph case)."""
        if self.r == 2:
            return self._links.get((vertex,), 0)
        mask = 0
        for edge_id in iter_bits(self._incidence[vertex]):
            mask |= bits_to_mask(self.edges[edge_id])
        return mask & ~(1 << vertex)

    def codegree_mask(self, vertices: Sequence[int]) -> int:
        mask = self.all_edges_mask
        for vertex in vertices:
            mask &= self._incidence[vertex]
        return mask

    def check_edge_ids(self, edge_ids: Iterable[int]) -> EdgeSubset:
        subset = frozenset(edge_ids)
        for edge_id in subset:
            if not 0 <= edge_id < len(self.edges):
                raise HostGraphError(f"edge identifier {edge_id} is not valid for a host with {self.m} edges")
        return subset

    def to_networkx(self) -> nx.Graph:
        if self.r != 2:
            raise HostGraphError("only graphs (r=2) convert to networkx")
        graph = nx.Graph()
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from(self.edges)
        return graph

    def __len__(self) -> int:
        return len(self.edges)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, HostGraph):
            return NotImplemented
        return (self.n, self.r, self.edges) == (other.n, other.r, other.edges)

    def __hash__(self) -> int:
        return hash((self.n, self.r, self.edges))

    def __repr__(self) -> str:
        return f"HostGraph(n={self.n}, r={self.r}, m={self.m})"


def complete_host(n: int, r: int = 2) -> HostGraph:
    """The complete r-graph on ``n`` vertices."""
    return HostGraph(n, r, combinations(range(n), r))


def subgraph(g: HostGraph, edge_ids: Iterable[int]) -> tuple[HostGraph, tuple[int, ...]]:
    """Spanning subgraph on the given edges, plus a map from new to old identifiers."""
    kept = sorted(g.check_edge_ids(edge_ids))
    host = HostGraph(g.n, g.r, (g.edges[edge_id] for edge_id in kept))
    # Edge order is preserved because both lists are sorted lexicographically.
    return host, tuple(kept)


def codegree(g: HostGraph, vs: Sequence[int]) -> int:
    """Number of edges containing every vertex in ``vs``."""
    vs = list(vs)
    if len(set(vs)) != len(vs):
        raise HostGraphError(f"duplicate vertices in {vs}")
    if len(vs) > g.r:
        raise HostGraphError(f"at most {g.r} vertices can share an edge, got {len(vs)}")
    for vertex in vs:
        if not 0 <= vertex < g.n:
            raise HostGraphError(f"vertex {vertex} outside [0, {g.n})")
    return g.codegree_mask(vs).bit_count()


def _require_graph(g: HostGraph, what: str) -> None:
    if g.r != 2:
        raise HostGraphError(f"{what} is only defined for graphs (r=2), host has r={g.r}")


def is_forest(sigma: Iterable[int], g: HostGraph) -> bool:
    _require_graph(g, "is_forest")
    components = UnionFind()
    for edge_id in sorted(g.check_edge_ids(sigma)):
        u, v = g.edges[edge_id]
        if components[u] == components[v]:
            return False
        components.union(u, v)
    return True


def maximal_forest(sigma: Iterable[int], g: HostGraph) -> EdgeSubset:
    """Spanning forest of ``sigma``; edges are kept greedily by identifier."""
    _require_graph(g, "maximal_forest")
    sigma = g.check_edge_ids(sigma)
    if not sigma:
        raise HostGraphError("maximal_forest needs a non-empty edge set")
    components = UnionFind()
    kept = []
    for edge_id in sorted(sigma):
        u, v = g.edges[edge_id]
        if components[u] != components[v]:
            components.union(u, v)
            kept.append(edge_id)
    return frozenset(kept)


@dataclass(frozen=True)
class PruneResult:
    """A pruned host together with the identifier remapping into the original.

    ``edge_map[new_id]`` is the identifier of the same edge in the input host.
    """

    host: HostGraph
    edge_map: tuple[int, ...]
    deleted_edges: int
    removed_vertices: tuple[int, ...] = ()


def prune_min_degree(g: HostGraph, threshold: float) -> PruneResult:
    """Delete vertices of degree below ``threshold`` until none remain.

    Deleted vertices keep their labels but lose every incident edge.
    """
    if threshold < 0:
        raise BoundError(f"threshold must be non-negative, got {threshold}")

    alive_edges = g.all_edges_mask
    removed: set[int] = set()
    pending = [v for v in range(g.n) if g.degree(v) < threshold]
    while pending:
        vertex = pending.pop()
        if vertex in removed:
            continue
        removed.add(vertex)
        dropped = alive_edges & g.incident_mask(vertex)
        alive_edges &= ~dropped
        touched = set()
        for edge_id in iter_bits(dropped):
            touched.update(g.edges[edge_id])
        for other in touched - removed:
            if (alive_edges & g.incident_mask(other)).bit_count() < threshold:
                pending.append(other)

    host, edge_map = subgraph(g, iter_bits(alive_edges))
    result = PruneResult(host, edge_map, g.m - host.m, tuple(sorted(removed)))
    logger.debug("min-degree pruning at %.6g removed %d vertices and %d edges", threshold, len(removed), result.deleted_edges)
    return result


def prune_overloaded_edges(g: HostGraph, family: "BalancedFamily", cap: float) -> PruneResult:
    """Delete every edge whose single-edge family degree meets or exceeds ``cap``.

    For complete r-partite families the single-edge degree is the largest
    singleton-tuple degree over the orderings of the edge.
    """
    if family.host != g:
        raise HostGraphError("family ledger does not refer to this host")
    degrees = family.single_edge_degrees()
    overloaded = {edge_id for edge_id, degree in degrees.items() if degree >= cap}
    host, edge_map = subgraph(g, (e for e in range(g.m) if e not in overloaded))
    logger.debug("overload pruning at cap %.6g deleted %d edges", cap, len(overloaded))
    return PruneResult(host, edge_map, len(overloaded))


@dataclass(frozen=True)
class DefaultConstants:
    """Default constants from the proofs, as exact fractions."""

    epsilons: tuple[Fraction, ...]
    big_k: Fraction
    delta: Fraction
    k0: Fraction


def default_theta_constants(a: int, b: int) -> DefaultConstants:
    """K = 5ab, eps(b) = 1/K^3, eps(t-1) = eps(t)^t, delta = eps(1)^(2ab+2)."""
    big_k = Fraction(5 * a * b)
    table = {b: 1 / big_k**3}
    for t in range(b, 1, -1):
        table[t - 1] = table[t] ** t
    delta = table[1] ** (2 * a * b + 2)
    return DefaultConstants(tuple(table[t] for t in range(1, b + 1)), big_k, delta, 1 / delta)


def default_complete_constants(profile: Sequence[int]) -> DefaultConstants:
    """eps(1) = 1/2, eps(i+1) = eps(i)^a_i / (2^(2a_i + a_1..a_i) a_i!), delta = eps(r+1)/2."""
    epsilons = [Fraction(1, 2)]
    running_product = 1
    for a_i in profile:
        running_product *= a_i
        scale = 2 ** (2 * a_i + running_product) * math.factorial(a_i)
        epsilons.append(epsilons[-1] ** a_i / scale)
    delta = epsilons[-1] / 2
    big_k = Fraction(math.prod(profile) * 2 ** (sum(profile) + 1))
    return DefaultConstants(tuple(epsilons), big_k, delta, 1 / delta)


def _safe_float(value: Fraction) -> float:
    try:
        return float(value)
    except OverflowError:
        return math.inf


def density_exponent(kind: str, shape: Sequence[int]) -> float:
    """Exponent of n in m(n): 1 + 1/b (theta) or r - 1/(a_1..a_{r-1}) (complete)."""
    if kind == "theta":
        return 1.0 + 1.0 / shape[1]
    return len(shape) - 1.0 / math.prod(shape[:-1])


@dataclass(frozen=True)
class ScaleParams:
    """Density and slack parameters a family is balanced against.

    ``shape`` is ``(a, b)`` for theta patterns and the profile
    ``(a_1, ..., a_r)`` for complete r-partite patterns. ``k`` is derived
    from the edge count unless ``k_override`` is set.
    """

    kind: str
    shape: tuple[int, ...]
    n: int
    k: float
    delta: float
    epsilons: tuple[Fraction, ...] = field(repr=False)
    big_k: Fraction
    k0: float
    k_override: bool = False

    def __post_init__(self):
        if self.kind not in ("theta", "complete"):
            raise BoundError(f"unknown pattern kind {self.kind!r}")
        if self.n < 1:
            raise BoundError(f"n must be positive, got {self.n}")
        if not (self.k > 0 or (self.k == 0 and not self.k_override)):
            # a derived k of 0 means an edgeless host
            raise BoundError(f"k must be positive, got {self.k}")
        if not self.delta > 0:
            raise BoundError(f"delta must be positive, got {self.delta}; the default delta underflows here, pass an explicit delta")

    @classmethod
    def for_theta(cls, a: int, b: int, n: int, edges: Optional[int] = None, *,
                  k: Optional[float] = None, delta: Optional[float] = None) -> "ScaleParams":
        return cls._build("theta", (a, b), default_theta_constants(a, b), n, edges, k, delta)

    @classmethod
    def for_complete(cls, profile: Sequence[int], n: int, edges: Optional[int] = None, *,
                     k: Optional[float] = None, delta: Optional[float] = None) -> "ScaleParams":
        profile = tuple(profile)
        return cls._build("complete", profile, default_complete_constants(profile), n, edges, k, delta)

    @classmethod
    def for_host(cls, pattern, g: HostGraph, *, k: Optional[float] = None,
                 delta: Optional[float] = None) -> "ScaleParams":
        """Parameters for ``pattern`` (a PatternSpec) on host ``g``."""
        if pattern.kind == "theta":
            return cls.for_theta(pattern.a, pattern.b, g.n, g.m, k=k, delta=delta)
        return cls.for_complete(pattern.shape, g.n, g.m, k=k, delta=delta)

    @classmethod
    def _build(cls, kind, shape, constants: DefaultConstants, n, edges, k, delta) -> "ScaleParams":
        if n < 1:
            raise BoundError(f"n must be positive, got {n}")
        overridden = k is not None
        if k is None:
            if edges is None:
                raise BoundError("either an edge count or an explicit k is required")
            k = edges / n ** density_exponent(kind, shape)
        if delta is None:
            delta_value = _safe_float(constants.delta)
            k0 = _safe_float(constants.k0)
        else:
            delta_value = float(delta)
            k0 = 1.0 / delta_value if delta_value > 0 else math.inf
        return cls(
            kind=kind,
            shape=tuple(shape),
            n=n,
            k=float(k),
            delta=delta_value,
            epsilons=constants.epsilons,
            big_k=constants.big_k,
            k0=k0,
            k_override=overridden,
        )

    @property
    def a(self) -> int:
        return self.shape[0]

    @property
    def b(self) -> int:
        if self.kind != "theta":
            raise BoundError("b is only defined for theta parameters")
        return self.shape[1]

    @property
    def profile(self) -> tuple[int, ...]:
        if self.kind != "complete":
            raise BoundError("profile is only defined for complete r-partite parameters")
        return self.shape

    def epsilon(self, t: int) -> Fraction:
        if not 1 <= t <= len(self.epsilons):
            raise BoundError(f"eps({t}) is outside the table 1..{len(self.epsilons)}")
        return self.epsilons[t - 1]

    def with_k(self, k: float) -> "ScaleParams":
        return ScaleParams(self.kind, self.shape, self.n, float(k), self.delta, self.epsilons,
                           self.big_k, self.k0, k_override=True)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "shape": list(self.shape),
            "n": self.n,
            "k": self.k,
            "delta": self.delta,
            "k0": self.k0,
            "big_k": str(self.big_k),
            "k_override": self.k_override,
        }


def overload_cap(p: ScaleParams) -> float:
    """eps(1)^(2ab+1) k^(ab-1) n^(1-1/b), the single-edge cap of the first pruning pass."""
    if p.kind != "theta":
        raise BoundError("overload_cap applies to theta parameters; use the singleton tuple cap otherwise")
    a, b = p.shape
    scale = _safe_float(p.epsilon(1) ** (2 * a * b + 1))
    return scale * p.k ** (a * b - 1) * p.n ** (1 - 1 / b)


def min_degree_threshold(p: ScaleParams) -> float:
    """K eps(b) k n^(1/b), the minimum degree kept by the second pruning pass."""
    if p.kind != "theta":
        raise BoundError("min_degree_threshold applies to theta parameters")
    b = p.shape[1]
    return _safe_float(p.big_k * p.epsilon(b)) * p.k * p.n ** (1 / b)
