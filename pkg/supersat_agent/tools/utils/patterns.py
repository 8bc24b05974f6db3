"""Copies of theta graphs and complete r-partite r-graphs inside a host.

Theta copies are unlabelled: a copy is identified by its edge set. Complete
r-partite copies are ordered tuples ``(A_1, ..., A_r)``, so the same vertex
partition in a different part order is a different copy.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations, permutations, product
from typing import Callable, Iterable, Iterator, Literal, Optional, Sequence, Union

import networkx as nx

from .errors import GuardExceededError, HostGraphError, PatternError
from .hypergraph import HostGraph, bits_to_mask, iter_bits

logger = logging.getLogger(__name__)

DEFAULT_ORACLE_MAX_VERTICES = 12


@dataclass(frozen=True)
class PatternSpec:
    """``theta:a,b`` or ``complete:a1,...,ar``."""

    kind: Literal["theta", "complete"]
    shape: tuple[int, ...]

    def __post_init__(self):
        if self.kind == "theta":
            if len(self.shape) != 2:
                raise PatternError(f"theta patterns take two parameters a,b; got {self.shape}")
            if min(self.shape) < 2:
                raise PatternError(f"theta patterns need a, b >= 2; got {self.shape}")
        elif self.kind == "complete":
            if len(self.shape) < 2:
                raise PatternError(f"complete patterns need at least two parts; got {self.shape}")
            if min(self.shape) < 2 or list(self.shape) != sorted(self.shape):
                raise PatternError(f"complete profiles need 2 <= a1 <= ... <= ar; got {self.shape}")
        else:
            raise PatternError(f"unknown pattern kind {self.kind!r}")

    @classmethod
    def parse(cls, text: str) -> "PatternSpec":
        kind, sep, numbers = text.strip().partition(":")
        if not sep:
            raise PatternError(f"pattern {text!r} is not of the form theta:a,b or complete:a1,...,ar")
        try:
            shape = tuple(int(part) for part in numbers.split(","))
        except ValueError:
            raise PatternError(f"pattern {text!r} has a non-integer parameter") from None
        return cls(kind.strip().lower(), shape)

    @classmethod
    def theta(cls, a: int, b: int) -> "PatternSpec":
        return cls("theta", (a, b))

    @classmethod
    def complete(cls, *profile: int) -> "PatternSpec":
        return cls("complete", tuple(profile))

    @property
    def a(self) -> int:
        return self.shape[0]

    @property
    def b(self) -> int:
        if self.kind != "theta":
            raise PatternError("b is only defined for theta patterns")
        return self.shape[1]

    @property
    def uniformity(self) -> int:
        return 2 if self.kind == "theta" else len(self.shape)

    @property
    def edge_count(self) -> int:
        return math.prod(self.shape)

    @property
    def vertex_count(self) -> int:
        if self.kind == "theta":
            return self.a * (self.b - 1) + 2
        return sum(self.shape)

    @property
    def label(self) -> str:
        return f"{self.kind}:{','.join(map(str, self.shape))}"

    def check_copy(self, copy: "PatternCopy") -> None:
        """Raise PatternError unless ``copy`` has this pattern's shape."""
        if self.kind == "theta":
            if not isinstance(copy, ThetaCopy):
                raise PatternError(f"{self.label} members are theta copies, got {type(copy).__name__}")
            if len(copy.paths) != self.a:
                raise PatternError(f"{self.label} needs {self.a} paths, got {len(copy.paths)}")
            for path in copy.paths:
                if len(path) != self.b + 1:
                    raise PatternError(f"{self.label} paths have {self.b} edges, got {list(path)}")
            if len(copy.edge_set) != self.edge_count:
                raise PatternError(f"{self.label} copies cover {self.edge_count} edges, got {len(copy.edge_set)}")
            return
        if not isinstance(copy, RPartiteCopy):
            raise PatternError(f"{self.label} members are r-partite copies, got {type(copy).__name__}")
        sizes = tuple(len(part) for part in copy.parts)
        if sizes != self.shape:
            raise PatternError(f"{self.label} needs part sizes {list(self.shape)}, got {list(sizes)}")
        if len(copy.vertices) != sum(sizes):
            raise PatternError(f"parts of a {self.label} copy must be disjoint, got {copy.to_dict()['parts']}")

    def __str__(self) -> str:
        return self.label


@dataclass(frozen=True)
class ThetaCopy:
    """Endpoints ``x < y`` joined by ``a`` internally disjoint paths of length ``b``.

    Paths run from ``x`` to ``y`` and are stored sorted.
    """

    x: int
    y: int
    paths: tuple[tuple[int, ...], ...]
    edge_set: frozenset[int]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for path in self.paths for v in path)

    @property
    def encoding(self) -> tuple:
        return (self.x, self.y, self.paths)

    def to_dict(self) -> dict:
        return {"x": self.x, "y": self.y, "paths": [list(path) for path in self.paths]}


@dataclass(frozen=True)
class RPartiteCopy:
    """Ordered tuple of disjoint sorted parts spanning a complete r-partite r-graph."""

    parts: tuple[tuple[int, ...], ...]

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for part in self.parts for v in part)

    @property
    def encoding(self) -> tuple:
        return self.parts

    def transversals(self) -> Iterator[tuple[int, ...]]:
        return product(*self.parts)

    def to_dict(self) -> dict:
        return {"parts": [list(part) for part in self.parts]}


PatternCopy = Union[ThetaCopy, RPartiteCopy]
TupleQuery = tuple[frozenset[int], ...]


def theta_copy_from_paths(
    g: HostGraph, paths: Iterable[Sequence[int]], pattern: Optional[PatternSpec] = None
) -> ThetaCopy:
    """Build a ThetaCopy from explicit paths, checking it against the host.

    With a ``pattern`` the path count and path lengths must match its shape.
    """
    paths = [tuple(path) for path in paths]
    if not paths:
        raise PatternError("a theta copy needs at least one path")
    x, y = paths[0][0], paths[0][-1]
    if x > y:
        x, y = y, x
    oriented = []
    for path in paths:
        if path[0] == y and path[-1] == x:
            path = path[::-1]
        if path[0] != x or path[-1] != y:
            raise PatternError(f"path {list(path)} does not join {x} and {y}")
        oriented.append(path)
    interiors = [set(path[1:-1]) for path in oriented]
    seen: set[int] = set()
    for interior in interiors:
        if interior & seen or x in interior or y in interior:
            raise PatternError("theta paths must be internally vertex-disjoint")
        seen |= interior
    edge_set = frozenset(
        g.edge_id((path[i], path[i + 1])) for path in oriented for i in range(len(path) - 1)
    )
    copy = ThetaCopy(x, y, tuple(sorted(oriented)), edge_set)
    if pattern is not None:
        pattern.check_copy(copy)
    return copy


def copy_edge_ids(copy: PatternCopy, g: HostGraph) -> frozenset[int]:
    """Host edge identifiers covered by a copy."""
    if isinstance(copy, ThetaCopy):
        return copy.edge_set
    return frozenset(g.edge_id(t) for t in copy.transversals())


def copy_contains(copy: PatternCopy, query) -> bool:
    """Edge-set containment for theta copies, componentwise containment for tuples."""
    if isinstance(copy, ThetaCopy):
        if isinstance(query, tuple) and query and not isinstance(query[0], int):
            raise PatternError("theta copies are queried with a set of edge identifiers")
        sigma = frozenset(query)
        if not sigma:
            raise PatternError("degrees are defined for non-empty queries only")
        return sigma <= copy.edge_set
    parts = tuple(frozenset(part) for part in query)
    if len(parts) != len(copy.parts):
        raise PatternError(f"query has {len(parts)} components, copy has {len(copy.parts)}")
    if not all(parts):
        raise PatternError("degrees are defined for tuples of non-empty sets only")
    return all(part <= set(own) for part, own in zip(parts, copy.parts))


def _ordered_map(func: Callable, items: list, workers: int) -> Iterator[list]:
    if workers > 1 and len(items) > 1:
        with ThreadPoolExecutor(max_workers=workers) as executor:
            yield from executor.map(func, items)
    else:
        for item in items:
            yield func(item)


def _simple_walks(g: HostGraph, start: int, length: int, avoid: int) -> list[tuple[int, ...]]:
    """All paths with ``length`` edges leaving ``start`` that avoid the ``avoid`` vertices."""
    walks = []
    stack = [((start,), (1 << start) | avoid)]
    while stack:
        walk, used = stack.pop()
        if len(walk) == length + 1:
            walks.append(walk)
            continue
        for nxt in iter_bits(g.neighbor_mask(walk[-1]) & ~used):
            stack.append((walk + (nxt,), used | (1 << nxt)))
    return walks


def _theta_paths(g: HostGraph, x: int, y: int, b: int) -> list[tuple[int, ...]]:
    """All x-y paths with ``b`` edges, split at position ``(b+1)//2``."""
    left_length = (b + 1) // 2
    right_by_middle: dict[int, list[tuple[int, ...]]] = {}
    for walk in _simple_walks(g, y, b - left_length, 1 << x):
        right_by_middle.setdefault(walk[-1], []).append(walk)

    paths = []
    for left in _simple_walks(g, x, left_length, 1 << y):
        middle = left[-1]
        left_mask = bits_to_mask(left)
        for right in right_by_middle.get(middle, ()):
            if left_mask & bits_to_mask(right) == 1 << middle:
                paths.append(left + right[-2::-1])
    paths.sort()
    return paths


def _disjoint_path_sets(paths: list[tuple[int, ...]], a: int) -> Iterator[tuple[tuple[int, ...], ...]]:
    interiors = [bits_to_mask(path[1:-1]) for path in paths]
    chosen: list[int] = []

    def extend(start: int, used: int):
        if len(chosen) == a:
            yield tuple(paths[i] for i in chosen)
            return
        for index in range(start, len(paths) - (a - len(chosen)) + 1):
            if interiors[index] & used:
                continue
            chosen.append(index)
            yield from extend(index + 1, used | interiors[index])
            chosen.pop()

    yield from extend(0, 0)


def enumerate_theta(g: HostGraph, a: int, b: int, workers: int = 1) -> Iterator[ThetaCopy]:
    """Yield every copy of theta(a, b) in ``g`` once, endpoint pair by endpoint pair."""
    if g.r != 2:
        raise HostGraphError(f"theta copies live in graphs, host has r={g.r}")
    PatternSpec.theta(a, b)
    endpoints = [v for v in range(g.n) if g.degree(v) >= a]

    def copies_between(pair: tuple[int, int]) -> list[ThetaCopy]:
        x, y = pair
        found = []
        for paths in _disjoint_path_sets(_theta_paths(g, x, y, b), a):
            # A cycle (a=2) is reached from each antipodal pair; keep the pair
            # whose smaller endpoint is the cycle's smallest vertex.
            if a == 2 and min(v for path in paths for v in path) != x:
                continue
            edge_set = frozenset(
                g.edge_id((path[i], path[i + 1])) for path in paths for i in range(b)
            )
            found.append(ThetaCopy(x, y, paths, edge_set))
        return found

    pairs = list(combinations(endpoints, 2))
    for batch in _ordered_map(copies_between, pairs, workers):
        yield from batch


def _validate_profile(g: HostGraph, profile: Sequence[int]) -> tuple[int, ...]:
    profile = tuple(profile)
    PatternSpec("complete", profile)
    if g.r != len(profile):
        raise HostGraphError(f"profile {profile} needs a {len(profile)}-graph, host has r={g.r}")
    return profile


def _part_candidates(g: HostGraph, profile: tuple[int, ...], parts: tuple, used: int) -> list[int]:
    index = len(parts)
    if index == len(profile) - 1:
        mask = ((1 << g.n) - 1) & ~used
        for transversal in product(*parts):
            mask &= g.link_mask(transversal)
            if not mask:
                break
        return list(iter_bits(mask))

    needed = math.prod(profile[index + 1 :])
    transversals = list(product(*parts))
    candidates = []
    for vertex in range(g.n):
        if used >> vertex & 1:
            continue
        if all(g.codegree_mask(t + (vertex,)).bit_count() >= needed for t in transversals):
            candidates.append(vertex)
    return candidates


def _extend_parts(g: HostGraph, profile: tuple[int, ...], parts: tuple, used: int) -> Iterator[RPartiteCopy]:
    if len(parts) == len(profile):
        yield RPartiteCopy(parts)
        return
    candidates = _part_candidates(g, profile, parts, used)
    for part in combinations(candidates, profile[len(parts)]):
        yield from _extend_parts(g, profile, parts + (part,), used | bits_to_mask(part))


def enumerate_rpartite(g: HostGraph, profile: Sequence[int], workers: int = 1) -> Iterator[RPartiteCopy]:
    """Yield every ordered copy ``(A_1, ..., A_r)`` of the complete r-partite pattern once."""
    profile = _validate_profile(g, profile)
    if sum(profile) > g.n:
        return
    roots = list(combinations(_part_candidates(g, profile, (), 0), profile[0]))

    def copies_from(root: tuple[int, ...]) -> list[RPartiteCopy]:
        return list(_extend_parts(g, profile, (root,), bits_to_mask(root)))

    for batch in _ordered_map(copies_from, roots, workers):
        yield from batch


def enumerate_copies(g: HostGraph, pattern: PatternSpec, workers: int = 1) -> Iterator[PatternCopy]:
    if pattern.kind == "theta":
        return enumerate_theta(g, pattern.a, pattern.b, workers)
    return enumerate_rpartite(g, pattern.shape, workers)


def has_copy(g: HostGraph, pattern: PatternSpec) -> bool:
    return next(iter(enumerate_copies(g, pattern)), None) is not None


def _theta_template(a: int, b: int) -> tuple[int, list[tuple[int, int]]]:
    """Vertex count and labelled edges of theta(a, b) with endpoints 0 and 1."""
    edges = []
    next_vertex = 2
    for _ in range(a):
        previous = 0
        for _ in range(b - 1):
            edges.append((previous, next_vertex))
            previous = next_vertex
            next_vertex += 1
        edges.append((previous, 1))
    return next_vertex, edges


def oracle_count(g: HostGraph, pattern: PatternSpec, guard: Optional[int] = None) -> int:
    """Count copies by trying every vertex assignment.

    Shares nothing with the fast enumerators; meant for hosts of a handful of
    vertices.
    """
    guard = DEFAULT_ORACLE_MAX_VERTICES if guard is None else guard
    if g.n > guard:
        raise GuardExceededError("oracle host vertex", g.n, guard)
    if g.r != pattern.uniformity:
        raise HostGraphError(f"pattern {pattern} needs r={pattern.uniformity}, host has r={g.r}")
    present = set(g.edges)

    if pattern.kind == "theta":
        order, template = _theta_template(pattern.a, pattern.b)
        images = set()
        for assignment in permutations(range(g.n), order):
            mapped = [tuple(sorted((assignment[u], assignment[v]))) for u, v in template]
            if all(edge in present for edge in mapped):
                images.add(frozenset(mapped))
        return len(images)

    profile = pattern.shape
    count = 0

    def place(index: int, used: frozenset, parts: list) -> None:
        nonlocal count
        if index == len(profile):
            if all(tuple(sorted(t)) in present for t in product(*parts)):
                count += 1
            return
        free = [v for v in range(g.n) if v not in used]
        for part in combinations(free, profile[index]):
            place(index + 1, used | frozenset(part), parts + [part])

    place(0, frozenset(), [])
    return count


def count_even_cycles(g: HostGraph, length: int) -> int:
    """Number of cycles with exactly ``length`` edges, counted with networkx."""
    if length < 3:
        raise PatternError(f"cycles have at least 3 edges, got {length}")
    graph = g.to_networkx()
    return sum(1 for cycle in nx.simple_cycles(graph, length_bound=length) if len(cycle) == length)
