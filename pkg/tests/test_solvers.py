import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from divopt import (Family, GeneratorSpec, Instance, ObjectiveKind, Solution,
                    BudgetExceededError, SolveStatus, SolverBudget,
                    brute_force, build_threshold_graph,
                    default_subinterval_exponent, enumerate_maxmin_optima,
                    enumerate_optima, eval_maxmin, eval_maxsum,
                    feasible_subset, generate, max_packing, solve_bilevel,
                    solve_maxmin_improved, solve_maxmin_original,
                    solve_maxsum_bnb, solve_model, spectrum_stats)


def _edges(graph):
    out = set()
    for i in range(graph.n):
        row = graph.adj[i]
        j = 0
        while row:
            if row & 1 and i < j:
                out.add((i, j))
            row >>= 1
            j += 1
    return out


# ---------------------------------------------------------------------------
# threshold graph and decision problem
# ---------------------------------------------------------------------------

def test_threshold_graph_t4(t4):
    g = build_threshold_graph(t4, 4.0)
    # strictly-below-threshold pairs only: d01=1, d02=2, d03=3
    assert _edges(g) == {(0, 1), (0, 2), (0, 3)}
    assert g.edge_count == 3
    assert build_threshold_graph(t4, 1.0).edge_count == 0
    assert build_threshold_graph(t4, 7.0).edge_count == 6


def test_feasible_subset_probes_t4(t4):
    yes = feasible_subset(t4, 4.0, 3)
    assert yes.status is SolveStatus.FEASIBLE
    assert tuple(yes.solution) == (1, 2, 3)
    assert eval_maxmin(t4, yes.solution) >= 4.0
    no = feasible_subset(t4, 5.0, 3)
    assert no.status is SolveStatus.INFEASIBLE
    assert no.solution is None


def test_max_packing_sizes_t4(t4):
    # v(l) for l walking up the spectrum: 4,3,3,3,2,2,1
    sizes = [max_packing(t4, l).value for l in (1.0, 2.0, 3.0, 4.0, 5.0,
                                                6.0, 6.5)]
    assert sizes == [4.0, 3.0, 3.0, 3.0, 2.0, 2.0, 1.0]


def test_max_packing_witness_is_independent(t4):
    res = max_packing(t4, 4.0)
    assert res.status is SolveStatus.OPTIMAL
    nodes = list(res.solution)
    for i, j in itertools.combinations(nodes, 2):
        assert t4.distances[i, j] >= 4.0


def test_packing_monotone_in_threshold(t4):
    # raising the threshold only removes packing options
    values = sorted(spectrum_stats(t4).distinct_values)
    sizes = [max_packing(t4, l).value for l in values]
    assert sizes == sorted(sizes, reverse=True)


# ---------------------------------------------------------------------------
# MaxMin, both methods
# ---------------------------------------------------------------------------

def test_improved_t4(t4):
    res = solve_maxmin_improved(t4, 3)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == 4.0
    assert tuple(res.solution) == (1, 2, 3)
    distinct = spectrum_stats(t4).distinct_count
    assert res.stats.decision_solves <= math.ceil(math.log2(distinct)) + 1


def test_improved_m_equals_n(t4):
    res = solve_maxmin_improved(t4, 4)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == 1.0  # the whole node set, so d_min


def test_original_t4(t4):
    res = solve_maxmin_original(t4, 3)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == 4.0
    assert eval_maxmin(t4, res.solution) == 4.0
    assert res.stats.q_used == default_subinterval_exponent(t4)
    assert res.stats.decision_solves <= res.stats.q_used + 1


def test_original_flat_spectrum(flat3):
    res = solve_maxmin_original(flat3, 2)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == 2.5
    assert res.stats.decision_solves == 0


def test_original_unit_square_single_probe(unit_square):
    # spectrum {1, sqrt2}: one midpoint probe lands exactly on sqrt2
    res = solve_maxmin_original(unit_square, 2)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == math.sqrt(2.0)
    assert res.stats.decision_solves == 1


def test_original_q_cap_degrades_to_feasible():
    # spectrum gap of 1e-300 forces the uncapped exponent past the cap
    d = np.zeros((3, 3))
    d[0, 1] = d[1, 0] = 1e-300
    d[0, 2] = d[2, 0] = 2e-300
    d[1, 2] = d[2, 1] = 10.0
    inst = Instance(name="pathological", family=Family.CUSTOM, distances=d)
    res = solve_maxmin_original(inst, 3)
    assert res.status is SolveStatus.FEASIBLE
    assert res.stats.q_used == 60
    assert res.stats.decision_solves <= 61
    assert res.value == 1e-300  # incumbent still evaluates to the true optimum


def test_explicit_q_budget(t4):
    res = solve_maxmin_original(t4, 3, SolverBudget(q=2))
    # 2 halvings cannot isolate one value out of six, incumbent returned
    assert res.stats.q_used == 2
    assert res.stats.decision_solves <= 3
    assert res.status in (SolveStatus.OPTIMAL, SolveStatus.FEASIBLE)
    assert res.value is not None


def test_methods_agree(t4, unit_square):
    for inst, m in ((t4, 2), (t4, 3), (t4, 4), (unit_square, 2),
                    (unit_square, 3)):
        a = solve_maxmin_improved(inst, m)
        b = solve_maxmin_original(inst, m)
        assert a.status is SolveStatus.OPTIMAL
        assert a.value == b.value


def test_improved_budget_downgrade(t4):
    res = solve_maxmin_improved(t4, 3, SolverBudget(max_nodes=1))
    assert res.status in (SolveStatus.FEASIBLE, SolveStatus.BUDGET_EXCEEDED)
    assert res.status is not SolveStatus.OPTIMAL


def test_optimum_in_spectrum_randoms():
    for seed in range(10):
        inst = generate(GeneratorSpec(family=Family.MDG, n=10, m=3, seed=seed))
        res = solve_maxmin_improved(inst, 3)
        assert res.value in spectrum_stats(inst).distinct_values


# ---------------------------------------------------------------------------
# enumeration
# ---------------------------------------------------------------------------

def test_enumerate_maxmin_t4(t4):
    en = enumerate_maxmin_optima(t4, 3)
    assert en.value == 4.0
    assert not en.truncated
    assert [tuple(s) for s in en.solutions] == [(1, 2, 3)]


def test_enumerate_unit_square_two_diagonals(unit_square):
    en = enumerate_maxmin_optima(unit_square, 2)
    assert en.value == math.sqrt(2.0)
    assert [tuple(s) for s in en.solutions] == [(0, 3), (1, 2)]
    assert not en.truncated


def test_enumerate_cap_truncates(flat3):
    full = enumerate_maxmin_optima(flat3, 2)
    assert len(full) == 3 and not full.truncated
    capped = enumerate_maxmin_optima(flat3, 2, cap=2)
    assert len(capped) == 2 and capped.truncated
    # cap exactly met without a further optimum: not truncated
    exact = enumerate_maxmin_optima(flat3, 2, cap=3)
    assert len(exact) == 3 and not exact.truncated


def test_enumerate_lexicographic(flat3):
    en = enumerate_maxmin_optima(flat3, 2)
    assert [tuple(s) for s in en.solutions] == [(0, 1), (0, 2), (1, 2)]


def test_enumerate_all_solutions_hit_value(t4):
    for m in (2, 3):
        en = enumerate_maxmin_optima(t4, m)
        for s in en.solutions:
            assert eval_maxmin(t4, s) == en.value


def test_enumerate_optima_other_kinds(unit_square, t4):
    en = enumerate_optima(unit_square, 2, ObjectiveKind.MAXSUM)
    assert [tuple(s) for s in en.solutions] == [(0, 3), (1, 2)]
    en = enumerate_optima(t4, 3, ObjectiveKind.MINDIFF)
    assert [tuple(s) for s in en.solutions] == [(1, 2, 3)]
    en = enumerate_optima(t4, None, ObjectiveKind.MAXMEAN)
    assert [tuple(s) for s in en.solutions] == [(0, 1, 2, 3)]


def test_enumerate_budget_error(t4):
    with pytest.raises(BudgetExceededError):
        enumerate_maxmin_optima(t4, 3, budget=SolverBudget(max_nodes=1))


# ---------------------------------------------------------------------------
# brute force and MaxSum branch and bound
# ---------------------------------------------------------------------------

def test_brute_force_t4_all_kinds(t4):
    cases = [(ObjectiveKind.MAXSUM, 15.0, (1, 2, 3)),
             (ObjectiveKind.MAXMIN, 4.0, (1, 2, 3)),
             (ObjectiveKind.MAXMINSUM, 9.0, (1, 2, 3)),
             (ObjectiveKind.MINDIFF, 2.0, (1, 2, 3))]
    for kind, value, subset in cases:
        res = brute_force(t4, 3, kind)
        assert res.status is SolveStatus.OPTIMAL
        assert res.value == value
        assert tuple(res.solution) == subset


def test_brute_force_maxmean_free_size(t4):
    res = brute_force(t4, None, ObjectiveKind.MAXMEAN)
    assert res.value == 5.25
    assert tuple(res.solution) == (0, 1, 2, 3)


def test_brute_force_subset_budget(t4):
    res = brute_force(t4, 3, ObjectiveKind.MAXSUM,
                      SolverBudget(max_subsets=2))
    assert res.status is SolveStatus.BUDGET_EXCEEDED


def test_maxsum_bnb_t4(t4):
    res = solve_maxsum_bnb(t4, 3)
    assert res.status is SolveStatus.OPTIMAL
    assert res.value == 15.0
    assert tuple(res.solution) == (1, 2, 3)


def test_maxsum_bnb_node_budget(t4):
    res = solve_maxsum_bnb(t4, 3, SolverBudget(max_nodes=1))
    assert res.status in (SolveStatus.FEASIBLE, SolveStatus.BUDGET_EXCEEDED)


@given(seed=st.integers(0, 10_000), n=st.integers(5, 9), m=st.integers(2, 4))
@settings(max_examples=40, deadline=None)
def test_bnb_matches_brute(seed, n, m):
    inst = generate(GeneratorSpec(family=Family.MDG, n=n, m=min(m, n - 1),
                                  seed=seed))
    m = min(m, n - 1)
    a = solve_maxsum_bnb(inst, m)
    b = brute_force(inst, m, ObjectiveKind.MAXSUM)
    assert a.value == pytest.approx(b.value, rel=1e-12)
    assert tuple(a.solution) == tuple(b.solution)  # both lex-smallest


@given(seed=st.integers(0, 10_000), n=st.integers(5, 10), m=st.integers(2, 5))
@settings(max_examples=40, deadline=None)
def test_maxmin_matches_brute(seed, n, m):
    m = min(m, n - 1)
    inst = generate(GeneratorSpec(family=Family.SOM, n=n, m=m, seed=seed))
    fast = solve_maxmin_improved(inst, m)
    slow = brute_force(inst, m, ObjectiveKind.MAXMIN)
    assert fast.value == slow.value
    other = solve_maxmin_original(inst, m)
    assert other.value == slow.value


# ---------------------------------------------------------------------------
# bi-level
# ---------------------------------------------------------------------------

def test_bilevel_t4(t4):
    res = solve_bilevel(t4, 3, ObjectiveKind.MAXSUM)
    assert res.d_star == 4.0
    assert res.upper_value == 15.0
    assert tuple(res.chosen) == (1, 2, 3)
    assert res.optima_enumerated == 1
    assert not res.truncated


def test_bilevel_modes_agree(t4, unit_square):
    for inst, m in ((t4, 3), (unit_square, 2)):
        for upper in (ObjectiveKind.MAXSUM, ObjectiveKind.MAXMINSUM):
            a = solve_bilevel(inst, m, upper, mode="enumerate")
            b = solve_bilevel(inst, m, upper, mode="exact")
            assert a.d_star == b.d_star
            assert a.upper_value == pytest.approx(b.upper_value, rel=1e-12)
            assert tuple(a.chosen) == tuple(b.chosen)


def test_bilevel_sandwich(t4):
    res = solve_bilevel(t4, 3, ObjectiveKind.MAXSUM)
    assert eval_maxmin(t4, res.chosen) == res.d_star
    plain_maxmin = solve_maxmin_improved(t4, 3)
    plain_maxsum = solve_maxsum_bnb(t4, 3)
    assert eval_maxsum(t4, plain_maxmin.solution) <= res.upper_value + 1e-9
    assert res.upper_value <= plain_maxsum.value + 1e-9


def test_bilevel_rejects_bad_upper(t4):
    with pytest.raises(ValueError):
        solve_bilevel(t4, 3, ObjectiveKind.MAXMIN)
    with pytest.raises(ValueError):
        solve_bilevel(t4, 3, ObjectiveKind.MAXSUM, mode="nope")


@given(seed=st.integers(0, 5_000))
@settings(max_examples=20, deadline=None)
def test_bilevel_sandwich_random(seed):
    inst = generate(GeneratorSpec(family=Family.GKD_D, n=9, m=3, seed=seed))
    res = solve_bilevel(inst, 3, ObjectiveKind.MAXSUM)
    assert eval_maxmin(inst, res.chosen) == res.d_star
    best_sum = solve_maxsum_bnb(inst, 3).value
    assert res.upper_value <= best_sum + 1e-9


# ---------------------------------------------------------------------------
# dispatcher
# ---------------------------------------------------------------------------

def test_solve_model_dispatch(t4):
    assert solve_model(t4, 3, ObjectiveKind.MAXSUM).value == 15.0
    assert solve_model(t4, 3, ObjectiveKind.MAXMIN).value == 4.0
    assert solve_model(t4, 3, ObjectiveKind.MAXMIN,
                       maxmin_method="original").value == 4.0
    assert solve_model(t4, 3, ObjectiveKind.MAXMINSUM).value == 9.0
    assert solve_model(t4, 3, ObjectiveKind.MINDIFF).value == 2.0
    assert solve_model(t4, None, ObjectiveKind.MAXMEAN).value == 5.25
    with pytest.raises(ValueError):
        solve_model(t4, 3, ObjectiveKind.MAXMIN, maxmin_method="bogus")
