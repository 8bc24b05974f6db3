"""Balanced families of copies: degree caps, the exact degree ledger, goodness,
saturated sets, and the greedy builders that grow a family while keeping it
good.

Theta families are balanced over forests of host edges; complete r-partite
families over sub-tuples ``(S_1, ..., S_r)`` of their ordered parts.
"""

import logging
import math
import random
import sys
from collections import Counter
from dataclasses import dataclass
from functools import cached_property
from itertools import combinations, permutations, product
from types import MappingProxyType
from typing import Callable, Iterable, Iterator, Literal, Mapping, Optional, Sequence, Union

from .errors import BoundError, EmptyFamilyError, HostGraphError, PatternError, VacuousParametersError
from .hypergraph import (
    HostGraph,
    ScaleParams,
    conservative_ceil,
    conservative_floor,
    is_forest,
    maximal_forest,
)
from .patterns import (
    PatternCopy,
    PatternSpec,
    RPartiteCopy,
    ThetaCopy,
    TupleQuery,
    copy_edge_ids,
    enumerate_rpartite,
    enumerate_theta,
)

logger = logging.getLogger(__name__)

Query = Union[frozenset, TupleQuery]


def query_key(query: Query) -> tuple:
    """Total order on queries: by size, then by sorted contents."""
    if isinstance(query, frozenset):
        return (len(query), tuple(sorted(query)))
    return (sum(len(part) for part in query), tuple(tuple(sorted(part)) for part in query))


def query_sizes(query: TupleQuery) -> tuple[int, ...]:
    return tuple(len(part) for part in query)


def _nonempty_subsets(items: Sequence[int]) -> list[frozenset]:
    items = sorted(items)
    return [frozenset(c) for size in range(1, len(items) + 1) for c in combinations(items, size)]


# --------------------------------------------------------------------------- #
# Degree caps
# --------------------------------------------------------------------------- #


def delta_bound(j: int, p: ScaleParams) -> float:
    """k^(ab-1) n^(1-1/b) / (delta k^(b/(b-1)))^(j-1), the cap on forests with j edges."""
    if p.kind != "theta":
        raise BoundError("delta_bound needs theta parameters")
    if j < 1:
        raise BoundError(f"forest size must be at least 1, got {j}")
    a, b = p.shape
    if p.k == 0:
        return 0.0
    top = p.k ** (a * b - 1) * p.n ** (1 - 1 / b)
    return top / (p.delta * p.k ** (b / (b - 1))) ** (j - 1)


def d_cap(bvec: Sequence[int], p: ScaleParams) -> float:
    """prod_i (delta k^(a_1..a_{i-1}) n^(1 - 1/(a_i..a_{r-1})))^(a_i - b_i)."""
    if p.kind != "complete":
        raise BoundError("d_cap needs complete r-partite parameters")
    profile = p.shape
    bvec = tuple(bvec)
    if len(bvec) != len(profile):
        raise BoundError(f"size vector {bvec} does not match profile {profile}")
    if any(not 1 <= b_i <= a_i for b_i, a_i in zip(bvec, profile)):
        raise BoundError(f"size vector {bvec} is outside 1 <= b_i <= a_i for {profile}")

    r = len(profile)
    value = 1.0
    for i in range(r):
        exponent = profile[i] - bvec[i]
        if exponent == 0:
            continue
        before = math.prod(profile[:i])
        after = math.prod(profile[i : r - 1])
        factor = p.delta * p.k**before * p.n ** (1 - 1 / after)
        value *= factor**exponent
    return value


def max_forest_size(pattern: PatternSpec) -> int:
    return pattern.vertex_count - 1


def theta_caps(p: ScaleParams) -> dict[int, int]:
    """Floored forest caps for every forest size a theta copy can contain."""
    pattern = PatternSpec("theta", p.shape)
    return {j: conservative_floor(delta_bound(j, p)) for j in range(1, max_forest_size(pattern) + 1)}


def complete_caps(p: ScaleParams) -> dict[tuple[int, ...], int]:
    """Floored tuple caps for every size vector of a sub-tuple."""
    ranges = [range(1, a_i + 1) for a_i in p.shape]
    return {bvec: conservative_floor(d_cap(bvec, p)) for bvec in product(*ranges)}


def caps_for(p: ScaleParams) -> dict:
    return theta_caps(p) if p.kind == "theta" else complete_caps(p)


def _require_non_vacuous(caps: Mapping) -> None:
    for index, cap in sorted(caps.items()):
        if cap == 0:
            raise VacuousParametersError(index, 0.0)


def default_target(p: ScaleParams) -> int:
    """ceil(delta k^(ab) n^2) for theta, ceil(delta k^(a_1..a_r) n^(a_1+..+a_{r-1})) otherwise."""
    if p.kind == "theta":
        a, b = p.shape
        value = p.delta * p.k ** (a * b) * p.n**2
    else:
        value = p.delta * p.k ** math.prod(p.shape) * p.n ** sum(p.shape[:-1])
    if math.isinf(value):
        return sys.maxsize
    return max(1, math.ceil(value))


def default_alpha(pattern: PatternSpec) -> float:
    """1/(ab-1) for theta, 1/(a_1..a_r - 1) for complete r-partite patterns."""
    return 1.0 / (pattern.edge_count - 1)


# --------------------------------------------------------------------------- #
# The family and its ledger
# --------------------------------------------------------------------------- #


class BalancedFamily:
    """A family of copies in a fixed host with an exact degree ledger.

    The ledger maps every non-empty sub-query of every member (edge subsets
    for theta copies, sub-tuples for ordered r-partite copies) to the number
    of members containing it. Queries outside every member are absent.
    """

    def __init__(self, host: HostGraph, pattern: PatternSpec):
        if host.r != pattern.uniformity:
            raise HostGraphError(f"pattern {pattern} needs r={pattern.uniformity}, host has r={host.r}")
        self.host = host
        self.pattern = pattern
        self._members: list[PatternCopy] = []
        self._ledger: Counter = Counter()
        self._forests: dict[frozenset, bool] = {}

    @classmethod
    def from_members(cls, host: HostGraph, pattern: PatternSpec, members: Iterable[PatternCopy]) -> "BalancedFamily":
        family = cls(host, pattern)
        for member in members:
            family.add(member)
        return family

    @property
    def members(self) -> tuple[PatternCopy, ...]:
        return tuple(self._members)

    @property
    def ledger(self) -> Mapping[Query, int]:
        return MappingProxyType(self._ledger)

    def __len__(self) -> int:
        return len(self._members)

    def __iter__(self) -> Iterator[PatternCopy]:
        return iter(self._members)

    def sub_queries(self, copy: PatternCopy) -> list[Query]:
        if self.pattern.kind == "theta":
            return _nonempty_subsets(copy.edge_set)
        return list(product(*(_nonempty_subsets(part) for part in copy.parts)))

    def add(self, copy: PatternCopy) -> None:
        self.pattern.check_copy(copy)
        self._members.append(copy)
        self._ledger.update(self.sub_queries(copy))

    def normalize_query(self, query) -> Query:
        if self.pattern.kind == "theta":
            if isinstance(query, tuple) and query and not isinstance(query[0], int):
                raise PatternError("theta families are queried with a set of edge identifiers")
            sigma = self.host.check_edge_ids(query)
            if not sigma:
                raise PatternError("degrees are defined for non-empty edge sets only")
            return sigma
        parts = tuple(frozenset(part) for part in query)
        if len(parts) != len(self.pattern.shape):
            raise PatternError(f"query has {len(parts)} components, pattern has {len(self.pattern.shape)}")
        if not all(parts):
            raise PatternError("degrees are defined for tuples of non-empty sets only")
        return parts

    def degree(self, query) -> int:
        return self._ledger.get(self.normalize_query(query), 0)

    def is_forest_query(self, sigma: frozenset) -> bool:
        cached = self._forests.get(sigma)
        if cached is None:
            cached = self._forests[sigma] = is_forest(sigma, self.host)
        return cached

    def single_edge_degrees(self) -> dict[int, int]:
        """Degree of every host edge; for tuples the maximum over orderings."""
        degrees: dict[int, int] = {}
        for query, degree in self._ledger.items():
            if self.pattern.kind == "theta":
                if len(query) == 1:
                    degrees[next(iter(query))] = degree
            elif all(len(part) == 1 for part in query):
                edge_id = self.host.edge_id(next(iter(part)) for part in query)
                degrees[edge_id] = max(degree, degrees.get(edge_id, 0))
        return degrees


def family_degree(fam: BalancedFamily, q) -> int:
    """Number of members containing the query ``q``."""
    return fam.degree(q)


def recount_ledger(fam: BalancedFamily) -> Counter:
    """Rebuild the degree ledger from the member list alone."""
    counts: Counter = Counter()
    for member in fam.members:
        if isinstance(member, ThetaCopy):
            edges = sorted(member.edge_set)
            for size in range(1, len(edges) + 1):
                for sigma in combinations(edges, size):
                    counts[frozenset(sigma)] += 1
        else:
            options = []
            for part in member.parts:
                options.append([frozenset(s) for size in range(1, len(part) + 1) for s in combinations(part, size)])
            for choice in product(*options):
                counts[choice] += 1
    return counts


# --------------------------------------------------------------------------- #
# Goodness and saturation
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class GoodnessReport:
    passed: bool
    checked: int
    violation: Optional[Query] = None
    degree: int = 0
    cap: int = 0
    degenerate: bool = False

    def describe(self) -> str:
        if self.passed:
            return f"{self.checked} queries within their caps"
        return f"query {format_query(self.violation)} has degree {self.degree} > cap {self.cap}"


def format_query(query: Optional[Query]) -> str:
    if query is None:
        return "-"
    if isinstance(query, frozenset):
        return "{" + ",".join(map(str, sorted(query))) + "}"
    return "(" + ",".join("{" + ",".join(map(str, sorted(part))) + "}" for part in query) + ")"


def is_good(fam: BalancedFamily, p: ScaleParams, ledger: Optional[Mapping[Query, int]] = None) -> GoodnessReport:
    """Check every forest (theta) or sub-tuple (complete) against its floored cap.

    ``ledger`` defaults to the family's own; audits pass an independent
    recount.
    """
    ledger = fam.ledger if ledger is None else ledger
    caps = caps_for(p)
    degenerate = any(cap == 0 for cap in caps.values())
    checked = 0
    for query in sorted(ledger, key=query_key):
        degree = ledger[query]
        if degree <= 0:
            continue
        if fam.pattern.kind == "theta":
            if not fam.is_forest_query(query):
                continue
            cap = caps[len(query)]
        else:
            cap = caps[query_sizes(query)]
        checked += 1
        if degree > cap:
            return GoodnessReport(False, checked, query, degree, cap, degenerate)
    return GoodnessReport(True, checked, degenerate=degenerate)


@dataclass(frozen=True)
class SaturatedLedger:
    """The saturated queries of a family under fixed parameters.

    Theta: forests whose degree has reached their floored cap. Complete:
    sub-tuples whose degree equals their floored cap.
    """

    family: BalancedFamily
    params: ScaleParams
    entries: frozenset
    degenerate: bool = False

    def __contains__(self, query) -> bool:
        return query in self.entries

    def __len__(self) -> int:
        return len(self.entries)

    def __iter__(self):
        return iter(sorted(self.entries, key=query_key))

    @cached_property
    def _by_element(self) -> dict[int, list]:
        """Entries indexed by edge identifier (theta) or by vertex (complete)."""
        index: dict[int, list] = {}
        for entry in sorted(self.entries, key=query_key):
            elements = entry if isinstance(entry, frozenset) else frozenset().union(*entry)
            for element in elements:
                index.setdefault(element, []).append(entry)
        return index

    def entries_touching(self, elements: Iterable[int]) -> list:
        seen = {}
        for element in elements:
            for entry in self._by_element.get(element, ()):
                seen[entry] = None
        return list(seen)


def saturated_ledger(fam: BalancedFamily, p: ScaleParams) -> SaturatedLedger:
    caps = caps_for(p)
    degenerate = any(cap == 0 for cap in caps.values())
    entries = set()
    for query, degree in fam.ledger.items():
        if fam.pattern.kind == "theta":
            cap = caps.get(len(query))
            if cap is not None and degree >= cap and fam.is_forest_query(query):
                entries.add(query)
        elif degree == caps[query_sizes(query)]:
            entries.add(query)
    if degenerate:
        logger.warning("saturated ledger built from degenerate caps (some floor is 0)")
    return SaturatedLedger(fam, p, frozenset(entries), degenerate)


def link(F: SaturatedLedger, S: Iterable[int], j: int) -> set[frozenset]:
    """j-sets of edges outside S completing a non-empty subset of S into a saturated set."""
    if F.family.pattern.kind != "theta":
        raise PatternError("links are defined for theta families")
    if j < 1:
        raise BoundError(f"link size must be at least 1, got {j}")
    S = frozenset(S)
    result = set()
    for entry in F.entries_touching(S):
        sigma = entry - S
        if len(sigma) == j:
            result.add(sigma)
    return result


def x_set(F: SaturatedLedger, tup: Sequence[Iterable[int]], i: int) -> frozenset[int]:
    """Vertices v outside the tuple such that adding v to part i of some sub-tuple is saturated."""
    profile = F.family.pattern.shape
    if F.family.pattern.kind != "complete":
        raise PatternError("X_i sets are defined for complete r-partite families")
    r = len(profile)
    if not 1 <= i <= r:
        raise BoundError(f"part index {i} is outside 1..{r}")
    parts = tuple(frozenset(part) for part in tup)
    if len(parts) != r:
        raise PatternError(f"tuple has {len(parts)} components, pattern has {r}")
    if any(len(part) > a_i for part, a_i in zip(parts, profile)):
        raise BoundError(f"tuple part sizes {query_sizes(parts)} exceed profile {profile}")

    own = i - 1
    anchor = 1 if own == 0 else 0
    union = frozenset().union(*parts)
    found = set()
    for entry in F.entries_touching(parts[anchor]):
        if any(not entry[t] <= parts[t] for t in range(r) if t != own):
            continue
        extra = entry[own] - parts[own]
        if len(extra) != 1 or not entry[own] & parts[own]:
            continue
        vertex = next(iter(extra))
        if vertex not in union:
            found.add(vertex)
    return frozenset(found)


def is_good_tuple(F: SaturatedLedger, tup: Sequence[Iterable[int]]) -> bool:
    """True iff no sub-tuple of ``tup`` is saturated."""
    parts = [sorted(part) for part in tup]
    for choice in product(*(_nonempty_subsets(part) for part in parts)):
        if choice in F.entries:
            return False
    return True


# --------------------------------------------------------------------------- #
# Greedy builders
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class BuildResult:
    family: BalancedFamily
    params: ScaleParams
    stop_reason: Literal["target", "exhausted"]
    target: int
    scanned: int
    audit: GoodnessReport


def _greedy(
    fam: BalancedFamily,
    p: ScaleParams,
    copies: Iterable[PatternCopy],
    addable: Callable[[PatternCopy], bool],
    target: Optional[int],
    shuffle_seed: Optional[int],
) -> BuildResult:
    target = default_target(p) if target is None else target
    if target < 0:
        raise BoundError(f"target must be non-negative, got {target}")
    candidates = list(copies)
    if shuffle_seed is not None:
        random.Random(shuffle_seed).shuffle(candidates)

    # Degrees only grow, so a copy rejected once stays rejected: one pass
    # over the candidates is the same as rescanning until nothing is addable.
    stop_reason = "target" if len(fam) >= target else "exhausted"
    scanned = 0
    if stop_reason == "exhausted":
        for copy in candidates:
            scanned += 1
            if addable(copy):
                fam.add(copy)
                if len(fam) >= target:
                    stop_reason = "target"
                    break

    audit = is_good(fam, p, ledger=recount_ledger(fam))
    logger.info(
        "built %s family of %d copies (target %d, stop: %s, scanned %d of %d)",
        fam.pattern, len(fam), target, stop_reason, scanned, len(candidates),
    )
    if not audit.passed:
        logger.error("post-build audit failed: %s", audit.describe())
    return BuildResult(fam, p, stop_reason, target, scanned, audit)


def greedy_build_theta(
    g: HostGraph,
    p: ScaleParams,
    target: Optional[int] = None,
    *,
    shuffle_seed: Optional[int] = None,
    workers: int = 1,
) -> BuildResult:
    """Add theta copies one at a time while every forest stays within its cap."""
    if g.r != 2:
        raise HostGraphError(f"theta families live in graphs, host has r={g.r}")
    if p.kind != "theta":
        raise BoundError("greedy_build_theta needs theta parameters")
    caps = theta_caps(p)
    if g.m:
        _require_non_vacuous(caps)
    fam = BalancedFamily(g, PatternSpec("theta", p.shape))

    def addable(copy: ThetaCopy) -> bool:
        for sigma in fam.sub_queries(copy):
            if len(sigma) in caps and fam.is_forest_query(sigma) and fam.degree(sigma) >= caps[len(sigma)]:
                return False
        return True

    return _greedy(fam, p, enumerate_theta(g, p.shape[0], p.shape[1], workers), addable, target, shuffle_seed)


def greedy_build_complete(
    g: HostGraph,
    p: ScaleParams,
    target: Optional[int] = None,
    *,
    shuffle_seed: Optional[int] = None,
    workers: int = 1,
) -> BuildResult:
    """Add ordered r-partite copies while no sub-tuple would exceed its floored cap."""
    if p.kind != "complete":
        raise BoundError("greedy_build_complete needs complete r-partite parameters")
    caps = complete_caps(p)
    if g.m:
        _require_non_vacuous(caps)
    fam = BalancedFamily(g, PatternSpec("complete", p.shape))

    def addable(copy: RPartiteCopy) -> bool:
        return all(fam.degree(q) < caps[query_sizes(q)] for q in fam.sub_queries(copy))

    return _greedy(fam, p, enumerate_rpartite(g, p.shape, workers), addable, target, shuffle_seed)


def greedy_build(g: HostGraph, p: ScaleParams, target: Optional[int] = None, **options) -> BuildResult:
    if p.kind == "theta":
        return greedy_build_theta(g, p, target, **options)
    return greedy_build_complete(g, p, target, **options)


def extend_good_tuple(
    g: HostGraph,
    F: SaturatedLedger,
    fixed: Sequence[int],
    partial: Sequence[Sequence[int]],
    i: int,
) -> Optional[tuple[int, ...]]:
    """Grow part i of ``(A_1, ..., A_{i-1}, A_i, {v_{i+1}}, ..., {v_r})`` one vertex at a time.

    Each new vertex comes from the pool of vertices that keep the tuple
    complete and good, and avoids the X_i set of the tuple built so far.
    Returns the sorted part, or None when the pool runs out.
    """
    profile = F.family.pattern.shape
    r = len(profile)
    if not 1 <= i <= r:
        raise BoundError(f"part index {i} is outside 1..{r}")
    if len(partial) != i - 1 or len(fixed) != r - i:
        raise PatternError(f"part {i} needs {i - 1} full parts and {r - i} fixed vertices")

    partial = tuple(tuple(sorted(part)) for part in partial)
    tail = tuple((v,) for v in fixed)
    used = {v for part in partial for v in part} | set(fixed)

    def extended(part: tuple[int, ...]) -> tuple:
        return partial + (part,) + tail

    pool = [
        v for v in range(g.n)
        if v not in used
        and all(g.has_edge(t) for t in product(*extended((v,))))
        and is_good_tuple(F, extended((v,)))
    ]

    chosen: list[int] = []
    for _ in range(profile[i - 1]):
        blocked = x_set(F, extended(tuple(chosen)), i) if chosen else frozenset()
        options = [v for v in pool if v not in chosen and v not in blocked]
        if not options:
            logger.debug("good-tuple extension of part %d failed after %d vertices", i, len(chosen))
            return None
        chosen.append(options[0])
    return tuple(sorted(chosen))


@dataclass(frozen=True)
class GoodTupleCount:
    good: int
    good_non_members: int


def count_good_tuples(g: HostGraph, F: SaturatedLedger) -> GoodTupleCount:
    """Copies of the complete pattern in g that are good with respect to F."""
    members = set(F.family.members)
    good = non_members = 0
    for copy in enumerate_rpartite(g, F.family.pattern.shape):
        if is_good_tuple(F, copy.parts):
            good += 1
            if copy not in members:
                non_members += 1
    return GoodTupleCount(good, non_members)


# --------------------------------------------------------------------------- #
# Audits
# --------------------------------------------------------------------------- #


@dataclass(frozen=True)
class ConditionReport:
    passed: bool
    smallest_c: float
    worst: Optional[frozenset]
    worst_degree: int
    checked: int
    alpha: float


def edge_subset_degrees(fam: BalancedFamily) -> Counter:
    """Degrees of every non-empty set of host edges inside some member."""
    counts: Counter = Counter()
    for member in fam.members:
        counts.update(_nonempty_subsets(copy_edge_ids(member, fam.host)))
    return counts


def audit_condition_ii(
    fam: BalancedFamily,
    g: HostGraph,
    p: ScaleParams,
    alpha: Optional[float] = None,
    c_bound: Optional[float] = None,
) -> ConditionReport:
    """Smallest C with d(sigma) <= C e(G)/|H| / k^((1+alpha)(|sigma|-1)) for all sigma."""
    if len(fam) == 0:
        raise EmptyFamilyError("condition (ii) needs a non-empty family")
    if fam.host != g:
        raise HostGraphError("family does not live in this host")
    alpha = default_alpha(fam.pattern) if alpha is None else alpha
    scale = g.m / len(fam)
    degrees = edge_subset_degrees(fam)

    best_c, worst, worst_degree = -1.0, None, 0
    for sigma in sorted(degrees, key=query_key):
        value = degrees[sigma] * p.k ** ((1 + alpha) * (len(sigma) - 1)) * scale
        if value > best_c:
            best_c, worst, worst_degree = value, sigma, degrees[sigma]
    passed = c_bound is None or best_c <= conservative_ceil(c_bound)
    return ConditionReport(passed, best_c, worst, worst_degree, len(degrees), alpha)


def forest_derivation_check(fam: BalancedFamily, p: ScaleParams, ledger: Optional[Mapping] = None) -> GoodnessReport:
    """For every sigma of positive degree with maximal forest sigma': d(sigma) <= d(sigma') <= cap(|sigma'|)."""
    if fam.pattern.kind != "theta":
        raise PatternError("the forest derivation applies to theta families")
    ledger = fam.ledger if ledger is None else ledger
    caps = theta_caps(p)
    checked = 0
    for sigma in sorted(ledger, key=query_key):
        degree = ledger[sigma]
        forest = maximal_forest(sigma, fam.host)
        forest_degree = ledger.get(forest, 0)
        checked += 1
        if not degree <= forest_degree <= caps[len(forest)]:
            return GoodnessReport(False, checked, sigma, degree, caps[len(forest)])
    return GoodnessReport(True, checked)


@dataclass(frozen=True)
class AuditRow:
    name: str
    status: Literal["pass", "fail", "skip", "info"]
    detail: str


@dataclass(frozen=True)
class AuditReport:
    rows: tuple[AuditRow, ...]
    condition: Optional[ConditionReport] = None

    @property
    def passed(self) -> bool:
        return all(row.status != "fail" for row in self.rows)


def _status(ok: bool) -> str:
    return "pass" if ok else "fail"


def _audited_edge_sets(fam: BalancedFamily, sample: int) -> list[frozenset]:
    """Edge sets S the link bound is checked on.

    For the first ``sample`` members: the member's edge set, each of its
    single edges, each set missing one edge, and the union with the next
    member.
    """
    members = fam.members[:sample]
    sets: dict[frozenset, None] = {}
    for member in members:
        edges = sorted(member.edge_set)
        sets[member.edge_set] = None
        sets.update(dict.fromkeys(frozenset({e}) for e in edges))
        sets.update(dict.fromkeys(member.edge_set - {e} for e in edges))
    sets.update(dict.fromkeys(a.edge_set | b.edge_set for a, b in zip(members, members[1:])))
    return list(sets)


def _link_bound_row(fam: BalancedFamily, F: SaturatedLedger, p: ScaleParams, sample: int) -> AuditRow:
    if F.degenerate:
        return AuditRow("link_bound", "skip", "degenerate caps (some floor is 0)")
    a, b = p.shape
    growth = p.delta * p.k ** (b / (b - 1))
    checked = 0
    for S in _audited_edge_sets(fam, sample):
        for j in range(1, a * b + 1):
            size = len(link(F, S, j))
            bound = 2 ** (a * b + len(S) + 1) * growth**j
            checked += 1
            if size > conservative_ceil(bound):
                return AuditRow("link_bound", "fail", f"|L^({j})(S)|={size} > {bound:.6g} for S={format_query(S)}")
    return AuditRow("link_bound", "pass", f"{checked} link sizes within bound")


def _audited_tuples(fam: BalancedFamily, sample: int) -> Iterator[tuple[TupleQuery, int]]:
    r = len(fam.pattern.shape)
    for member in fam.members[:sample]:
        parts = tuple(frozenset(part) for part in member.parts)
        for i in range(1, r + 1):
            yield parts, i
            trimmed = parts[: i - 1] + (frozenset(sorted(parts[i - 1])[:-1]),) + parts[i:]
            yield trimmed, i


def _x_set_row(fam: BalancedFamily, F: SaturatedLedger, p: ScaleParams, sample: int) -> AuditRow:
    if F.degenerate:
        return AuditRow("x_set_bound", "skip", "degenerate caps (some floor is 0)")
    profile = p.shape
    r = len(profile)
    big_k = float(p.big_k)
    checked = 0
    for tup, i in _audited_tuples(fam, sample):
        bound = big_k * p.delta * p.k ** math.prod(profile[: i - 1]) * p.n ** (1 - 1 / math.prod(profile[i - 1 : r - 1]))
        size = len(x_set(F, tup, i))
        checked += 1
        if size > conservative_ceil(bound):
            return AuditRow("x_set_bound", "fail", f"|X_{i}{format_query(tup)}|={size} > {bound:.6g}")
    return AuditRow("x_set_bound", "pass", f"{checked} X_i sets within bound")


def _handshake_row(fam: BalancedFamily) -> AuditRow:
    g = fam.host
    expected = fam.pattern.edge_count * len(fam)
    if fam.pattern.kind == "theta":
        total = sum(fam.degree({e}) for e in range(g.m))
    else:
        total = sum(
            fam.degree(tuple(frozenset((v,)) for v in ordering))
            for edge in g.edges
            for ordering in permutations(edge)
        )
    return AuditRow("handshake", _status(total == expected), f"sum={total} expected={expected}")


def _monotonicity_row(fam: BalancedFamily) -> AuditRow:
    checked = 0
    for query in sorted(fam.ledger, key=query_key):
        degree = fam.ledger[query]
        if isinstance(query, frozenset):
            smaller = [query - {e} for e in query if len(query) > 1]
        else:
            smaller = [
                query[:t] + (query[t] - {v},) + query[t + 1 :]
                for t in range(len(query)) if len(query[t]) > 1
                for v in query[t]
            ]
        for sub in smaller:
            checked += 1
            if fam.ledger.get(sub, 0) < degree:
                return AuditRow("monotonicity", "fail", f"d{format_query(sub)} < d{format_query(query)}")
    return AuditRow("monotonicity", "pass", f"{checked} nested pairs")


def audit_family(
    fam: BalancedFamily,
    p: ScaleParams,
    alpha: Optional[float] = None,
    c_bound: Optional[float] = None,
    sample: int = 25,
) -> AuditReport:
    """Re-check a family from scratch and report one row per invariant."""
    recount = recount_ledger(fam)
    goodness = is_good(fam, p, ledger=recount)
    rows = [
        AuditRow("goodness", _status(goodness.passed), goodness.describe()),
        AuditRow("ledger_recount", _status(dict(recount) == dict(fam.ledger)), f"{len(recount)} ledger entries"),
        _handshake_row(fam),
        _monotonicity_row(fam),
    ]

    F = saturated_ledger(fam, p)
    if fam.pattern.kind == "theta":
        rows.append(AuditRow("saturation_rule", "info", f"forests with degree >= floor(cap): {len(F)} saturated"))
        rows.append(_link_bound_row(fam, F, p, sample))
        derivation = forest_derivation_check(fam, p, recount)
        rows.append(AuditRow("forest_derivation", _status(derivation.passed), derivation.describe()))
    else:
        rows.append(AuditRow("saturation_rule", "info", f"sub-tuples with degree == floor(cap): {len(F)} saturated"))
        rows.append(_x_set_row(fam, F, p, sample))
        counted = count_good_tuples(fam.host, F)
        rows.append(AuditRow("good_tuples", "info", f"good={counted.good} good_non_members={counted.good_non_members}"))

    condition = None
    if len(fam):
        condition = audit_condition_ii(fam, fam.host, p, alpha, c_bound)
        rows.append(AuditRow(
            "condition_ii",
            _status(condition.passed),
            f"C={condition.smallest_c:.12g} alpha={condition.alpha:.12g} at {format_query(condition.worst)}",
        ))
    else:
        rows.append(AuditRow("condition_ii", "skip", "empty family"))
    return AuditReport(tuple(rows), condition)
