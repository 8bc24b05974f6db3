import math
import random
from itertools import combinations, permutations

import pytest
from hypothesis import given

from supersat_agent.tools.utils.balanced import (
    BalancedFamily,
    _audited_edge_sets,
    audit_condition_ii,
    audit_family,
    count_good_tuples,
    d_cap,
    default_alpha,
    default_target,
    delta_bound,
    extend_good_tuple,
    family_degree,
    forest_derivation_check,
    greedy_build,
    greedy_build_complete,
    greedy_build_theta,
    is_good,
    is_good_tuple,
    link,
    recount_ledger,
    saturated_ledger,
    theta_caps,
    x_set,
)
from supersat_agent.tools.utils.errors import BoundError, EmptyFamilyError, PatternError, VacuousParametersError
from supersat_agent.tools.utils.experiments import random_host
from supersat_agent.tools.utils.hypergraph import HostGraph, ScaleParams, complete_host, is_forest
from supersat_agent.tools.utils.patterns import (
    PatternSpec,
    RPartiteCopy,
    copy_contains,
    copy_edge_ids,
    enumerate_rpartite,
    enumerate_theta,
)

from .strategies import graphs

C4 = PatternSpec.theta(2, 2)


def _theta_family(g):
    return BalancedFamily.from_members(g, C4, enumerate_theta(g, 2, 2))


def test_delta_bound_values():
    params = ScaleParams.for_theta(2, 2, 16, k=4.0, delta=0.5)
    assert delta_bound(1, params) == pytest.approx(256)
    assert delta_bound(2, params) == pytest.approx(32)
    for j in range(1, 4):
        assert delta_bound(j, params) / delta_bound(j + 1, params) == pytest.approx(0.5 * 4**2)
    with pytest.raises(BoundError):
        delta_bound(0, params)


def test_d_cap_values():
    params = ScaleParams.for_complete((2, 2), 16, k=4.0, delta=0.5)
    assert d_cap((2, 2), params) == 1
    assert d_cap((1, 1), params) == pytest.approx(64)
    assert d_cap((2, 1), params) == pytest.approx(8)
    with pytest.raises(BoundError):
        d_cap((3, 1), params)
    with pytest.raises(BoundError):
        d_cap((1,), params)


def test_default_target_and_alpha():
    params = ScaleParams.for_theta(2, 2, 16, k=1.0, delta=0.25)
    assert default_target(params) == 64
    assert default_alpha(C4) == pytest.approx(1 / 3)
    assert default_alpha(PatternSpec.complete(2, 2, 2)) == pytest.approx(1 / 7)


def test_family_degree(k4):
    empty = BalancedFamily(k4, C4)
    assert family_degree(empty, {0}) == 0
    family = _theta_family(k4)
    assert len(family) == 3
    for e in range(k4.m):
        assert family_degree(family, {e}) == 2
    with pytest.raises(PatternError):
        family_degree(family, set())


def test_tuple_degree_rejects_empty_parts(c4):
    family = BalancedFamily.from_members(c4, PatternSpec.complete(2, 2), enumerate_rpartite(c4, (2, 2)))
    assert family.degree(({0}, {1})) == 1
    with pytest.raises(PatternError):
        family.degree(({0}, ()))


def test_is_good_on_k4_family(k4):
    family = _theta_family(k4)
    generous = ScaleParams.for_theta(2, 2, 4, k=1.5, delta=1 / 1.5**2)
    assert is_good(family, generous).passed
    tight = ScaleParams.for_theta(2, 2, 4, k=0.9, delta=1 / 0.81)
    report = is_good(family, tight)
    assert not report.passed
    assert report.violation == frozenset({0})
    assert (report.degree, report.cap) == (2, 1)
    assert is_good(BalancedFamily(k4, C4), tight).passed


def test_saturated_ledger_with_zero_floor(k4):
    family = _theta_family(k4)
    params = ScaleParams.for_theta(2, 2, 4, k=0.1, delta=1.0)
    F = saturated_ledger(family, params)
    assert F.degenerate
    assert all(frozenset({e}) in F for e in range(k4.m))
    assert len(saturated_ledger(BalancedFamily(k4, C4), ScaleParams.for_theta(2, 2, 4, k=1.5, delta=0.5))) == 0


def test_greedy_theta_generous_params_take_every_copy(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=10.0, delta=0.01)
    built = greedy_build_theta(k5, params)
    assert len(built.family) == 15
    assert built.stop_reason == "exhausted"
    assert built.audit.passed


def test_greedy_theta_respects_single_edge_cap(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    caps = theta_caps(params)
    assert caps == {1: 3, 2: 2, 3: 1}
    built = greedy_build_theta(k5, params)
    family = built.family
    assert built.stop_reason == "exhausted"
    assert built.audit.passed
    assert max(family.degree({e}) for e in range(k5.m)) <= 3
    # maximal: every other copy would push some forest past its cap
    for copy in enumerate_theta(k5, 2, 2):
        if copy in family.members:
            continue
        assert any(
            is_forest(sigma, k5) and family.degree(sigma) >= caps[len(sigma)]
            for sigma in family.sub_queries(copy) if len(sigma) in caps
        )


def test_greedy_theta_without_copies():
    g = HostGraph(6, 2, [(0, 1), (1, 2), (2, 3)])
    built = greedy_build_theta(g, ScaleParams.for_theta(2, 2, 6, k=2.0, delta=1.0))
    assert len(built.family) == 0
    assert built.stop_reason == "exhausted"


def test_greedy_theta_stops_at_target(k5):
    built = greedy_build_theta(k5, ScaleParams.for_theta(2, 2, 5, k=10.0, delta=0.01), target=4)
    assert len(built.family) == 4
    assert built.stop_reason == "target"


def test_vacuous_parameters_are_refused(k5):
    with pytest.raises(VacuousParametersError):
        greedy_build_theta(k5, ScaleParams.for_theta(2, 2, 5, k=0.1, delta=1.0))


@pytest.mark.parametrize(
    "host, pattern",
    [(HostGraph(5, 2, []), PatternSpec.theta(2, 2)), (HostGraph(6, 3, []), PatternSpec.complete(2, 2, 2))],
    ids=["theta", "complete"],
)
def test_edgeless_host_gives_an_empty_family(host, pattern):
    params = ScaleParams.for_host(pattern, host, delta=1.0)
    assert params.k == 0
    built = greedy_build(host, params)
    assert len(built.family) == 0
    assert built.stop_reason == "exhausted"
    assert built.target == 1
    assert built.audit.passed
    assert audit_family(built.family, params).passed


def test_shuffled_build_is_reproducible(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    first = greedy_build_theta(k5, params, shuffle_seed=3)
    second = greedy_build_theta(k5, params, shuffle_seed=3)
    assert first.family.members == second.family.members
    assert first.audit.passed


def test_greedy_complete_on_c4(c4):
    built = greedy_build_complete(c4, ScaleParams.for_complete((2, 2), 4, k=1.0, delta=1.0))
    assert [m.parts for m in built.family.members] == [((0, 2), (1, 3)), ((1, 3), (0, 2))]
    assert built.audit.passed


def test_greedy_complete_on_k4(k4):
    params = ScaleParams.for_complete((2, 2), 4, k=1.2, delta=1.0)
    assert math.floor(d_cap((1, 1), params)) == 3
    built = greedy_build_complete(k4, params)
    family = built.family
    assert built.audit.passed
    for u, v in permutations(range(4), 2):
        assert family.degree(({u}, {v})) <= 3


def test_greedy_build_dispatch(k5):
    built = greedy_build(k5, ScaleParams.for_theta(2, 2, 5, k=10.0, delta=0.01), target=2)
    assert len(built.family) == 2


def _brute_force_ledger(family, queries):
    return {q: sum(1 for m in family.members if copy_contains(m, q)) for q in queries}


def test_ledger_matches_brute_force(k5):
    family = greedy_build_theta(k5, ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)).family
    queries = [frozenset(c) for size in range(1, 5) for c in combinations(range(k5.m), size)]
    expected = {q: d for q, d in _brute_force_ledger(family, queries).items() if d}
    assert dict(family.ledger) == expected
    assert dict(recount_ledger(family)) == dict(family.ledger)


def test_link_matches_brute_force(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    family = greedy_build_theta(k5, params).family
    F = saturated_ledger(family, params)
    assert len(F) > 0
    assert link(F, set(), 1) == set()
    for S in [family.members[0].edge_set, frozenset({0, 9})]:
        for j in range(1, 5):
            outside = [e for e in range(k5.m) if e not in S]
            expected = {
                frozenset(sigma) for sigma in combinations(outside, j)
                if any(frozenset(sigma) | frozenset(tau) in F
                       for size in range(1, len(S) + 1) for tau in combinations(sorted(S), size))
            }
            assert link(F, S, j) == expected


def _k8_three_graph_family():
    g = complete_host(8, 3)
    params = ScaleParams.for_complete((2, 2, 2), 8, k=2.0, delta=1.0)
    family = BalancedFamily(g, PatternSpec.complete(2, 2, 2))
    for third in [(4, 5), (4, 6), (4, 7), (5, 6), (5, 7)]:
        family.add(RPartiteCopy(((0, 1), (2, 3), third)))
    return g, params, family


def test_x_set_matches_brute_force():
    g, params, family = _k8_three_graph_family()
    F = saturated_ledger(family, params)
    tup = (frozenset({0, 1}), frozenset({2, 3}), frozenset({4}))
    for i in (1, 2, 3):
        expected = set()
        for v in set(range(8)) - {0, 1, 2, 3, 4}:
            for choice in _sub_tuples(tup):
                grown = choice[: i - 1] + (choice[i - 1] | {v},) + choice[i:]
                if grown in F:
                    expected.add(v)
        assert x_set(F, tup, i) == expected
    assert x_set(F, tup, 3) == {5, 6, 7}
    with pytest.raises(BoundError):
        x_set(F, tup, 4)


def _sub_tuples(tup):
    options = [
        [frozenset(c) for size in range(1, len(part) + 1) for c in combinations(sorted(part), size)]
        for part in tup
    ]
    result = [()]
    for option in options:
        result = [prefix + (s,) for prefix in result for s in option]
    return result


def test_extend_good_tuple():
    g, params, family = _k8_three_graph_family()
    F = saturated_ledger(family, params)
    assert extend_good_tuple(g, F, (), ((0, 1), (2, 3)), 3) is None
    part = extend_good_tuple(g, F, (), ((0, 2), (1, 3)), 3)
    assert part == (4, 5)
    assert is_good_tuple(F, ((0, 2), (1, 3), part))
    assert not is_good_tuple(F, ((0, 1), (2, 3), (4, 5)))


def test_extend_good_tuple_with_empty_ledger():
    g = complete_host(8, 3)
    params = ScaleParams.for_complete((2, 2, 2), 8, k=2.0, delta=1.0)
    F = saturated_ledger(BalancedFamily(g, PatternSpec.complete(2, 2, 2)), params)
    assert extend_good_tuple(g, F, (6,), ((0, 1),), 2) == (2, 3)
    small = HostGraph(5, 3, [(0, 1, 2), (0, 1, 3)])
    F_small = saturated_ledger(BalancedFamily(small, PatternSpec.complete(2, 2, 2)), params)
    assert extend_good_tuple(small, F_small, (), ((0, 1), (2, 3)), 3) is None


def test_count_good_tuples():
    g, params, family = _k8_three_graph_family()
    counted = count_good_tuples(g, saturated_ledger(family, params))
    assert counted.good_non_members > 0
    assert counted.good <= 8 * 7 * 6 * 5 * 4 * 3 // 8


def test_condition_ii_matches_brute_force(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    family = greedy_build_theta(k5, params).family
    report = audit_condition_ii(family, k5, params)
    alpha = 1 / 3
    best = 0.0
    for size in range(1, 5):
        for sigma in combinations(range(k5.m), size):
            degree = sum(1 for m in family.members if set(sigma) <= copy_edge_ids(m, k5))
            if degree:
                best = max(best, degree * params.k ** ((1 + alpha) * (size - 1)) * k5.m / len(family))
    assert report.smallest_c == pytest.approx(best, rel=2**-40)
    doubled = BalancedFamily.from_members(k5, C4, family.members + family.members)
    assert audit_condition_ii(doubled, k5, params).smallest_c == pytest.approx(best, rel=2**-40)
    assert not audit_condition_ii(family, k5, params, c_bound=best / 2).passed


def test_condition_ii_single_edge(k4):
    family = BalancedFamily.from_members(k4, C4, list(enumerate_theta(k4, 2, 2))[:1])
    params = ScaleParams.for_theta(2, 2, 4, k=1.0, delta=1.0)
    report = audit_condition_ii(family, k4, params, alpha=1.0)
    # with k = 1 every sigma scores d * e(G) / |H|
    assert report.smallest_c == pytest.approx(6)
    with pytest.raises(EmptyFamilyError):
        audit_condition_ii(BalancedFamily(k4, C4), k4, params)


def test_forest_derivation(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    family = greedy_build_theta(k5, params).family
    assert forest_derivation_check(family, params).passed


def test_audit_family_theta(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    report = audit_family(greedy_build_theta(k5, params).family, params)
    names = [row.name for row in report.rows]
    assert names == [
        "goodness", "ledger_recount", "handshake", "monotonicity",
        "saturation_rule", "link_bound", "forest_derivation", "condition_ii",
    ]
    assert report.passed


def test_link_bound_covers_proper_subsets(k5):
    params = ScaleParams.for_theta(2, 2, 5, k=1.12, delta=1.0)
    family = greedy_build_theta(k5, params).family
    first = family.members[0]
    sets = _audited_edge_sets(family, 1)
    assert len(sets) == 9
    assert first.edge_set in sets
    assert all(frozenset({e}) in sets and first.edge_set - {e} in sets for e in first.edge_set)
    (row,) = [row for row in audit_family(family, params).rows if row.name == "link_bound"]
    assert row.status == "pass"


def test_audit_family_complete():
    g, params, family = _k8_three_graph_family()
    report = audit_family(family, params)
    assert [row.name for row in report.rows][-3:] == ["x_set_bound", "good_tuples", "condition_ii"]
    assert report.passed


def test_audit_of_empty_family(k4):
    report = audit_family(BalancedFamily(k4, C4), ScaleParams.for_theta(2, 2, 4, k=1.5, delta=0.5))
    assert report.rows[-1].status == "skip"
    assert report.passed


@given(graphs(min_n=4, max_n=7))
def test_handshake_on_random_families(g):
    params = ScaleParams.for_theta(2, 2, g.n, k=1.5, delta=0.5)
    family = greedy_build_theta(g, params).family
    assert sum(family.degree({e}) for e in range(g.m)) == 4 * len(family)
    for query, degree in family.ledger.items():
        for e in query:
            if len(query) > 1:
                assert family.ledger[query - {e}] >= degree


@pytest.mark.slow
@pytest.mark.parametrize("delta", [0.25, 0.5, 1.0], ids=lambda delta: f"k-override-2.0-delta-{delta}")
def test_random_theta_builds_pass_independent_audits(delta):
    rng = random.Random(11)
    for seed in range(50):
        n = rng.randint(10, 30)
        g = random_host(n, m=min(rng.randint(2 * n, 5 * n), math.comb(n, 2)), seed=seed)
        params = ScaleParams.for_host(C4, g, k=2.0, delta=delta)
        built = greedy_build_theta(g, params)
        family = built.family
        assert is_good(family, params, ledger=recount_ledger(family)).passed
        assert sum(family.degree({e}) for e in range(g.m)) == 4 * len(family)
        if len(family):
            report = audit_family(family, params)
            assert report.passed, [row for row in report.rows if row.status == "fail"]
            best = max(
                sum(1 for m in family.members if copy_contains(m, sigma))
                * params.k ** ((1 + 1 / 3) * (len(sigma) - 1)) * g.m / len(family)
                for member in family.members
                for size in range(1, 5)
                for sigma in combinations(sorted(member.edge_set), size)
            )
            assert report.condition.smallest_c == pytest.approx(best, rel=2**-40)
            doubled = BalancedFamily.from_members(g, C4, family.members * 2)
            assert audit_condition_ii(doubled, g, params).smallest_c == pytest.approx(best, rel=2**-40)


@pytest.mark.slow
def test_random_complete_builds_pass_independent_audits():
    pattern = PatternSpec.complete(2, 2, 2)
    for seed in range(20):
        g = random_host(8, m=40, r=3, seed=seed)
        params = ScaleParams.for_host(pattern, g, k=1.0, delta=1.0)
        family = greedy_build_complete(g, params).family
        assert is_good(family, params, ledger=recount_ledger(family)).passed
        total = sum(
            family.degree(tuple(frozenset((v,)) for v in ordering))
            for edge in g.edges for ordering in permutations(edge)
        )
        assert total == 8 * len(family)
        if len(family):
            assert audit_family(family, params).passed
