"""Exact solvers for the dispersion models.

The centerpiece is the MaxMin machinery built on threshold graphs: for a
level l, G(l) connects every pair closer than l, so an independent set of
size m in G(l) is exactly an m-subset whose min pairwise distance is >= l.
Two exact methods are provided:

* improved -- binary search over the sorted distinct distance values by
  index, one feasibility decision per probe,
* original -- real-interval bisection where each step solves a maximum
  node packing exactly and compares its size v(l) against m.

MaxSum gets a native branch-and-bound with an admissible completion bound,
and every model has a brute-force oracle.  The bi-level solver optimizes a
secondary objective (MaxSum or MaxMinSum) over the set of MaxMin-optimal
subsets, either by enumerating those optima up to a cap or by an exact
search over independent sets at the MaxMin optimum.

All searches are deterministic; ties break to the lexicographically
smallest index tuple.
"""

from __future__ import annotations

import time
from bisect import bisect_left
from dataclasses import dataclass, replace
from enum import Enum
from itertools import combinations
from math import ceil, comb, inf, log2
from typing import Iterator, Optional

import numpy as np

from .instances import Instance, spectrum_stats
from .objectives import (ObjectiveKind, Sense, Solution, eval_maxmin,
                         eval_maxsum, evaluate)

DEFAULT_OPTIMA_CAP = 100_000

# Subinterval exponent cap for the bisection method: spectra with a tiny
# minimum gap would otherwise demand an absurd number of steps.
MAX_SUBINTERVAL_EXPONENT = 60


class SolveStatus(Enum):
    OPTIMAL = "optimal"
    FEASIBLE = "feasible"
    INFEASIBLE = "infeasible"
    BUDGET_EXCEEDED = "budget_exceeded"


class BudgetExceededError(RuntimeError):
    """Raised by enumeration routines that have no status channel."""


@dataclass
class SearchStats:
    subsets_or_nodes_explored: int = 0
    decision_solves: int = 0
    wall_time: float = 0.0
    # Per-probe records for the MaxMin searches: (level, feasible) for the
    # index search, (level, packing_size, feasible) for the bisection.
    trace: tuple = ()
    q_used: Optional[int] = None


@dataclass(frozen=True)
class SolveResult:
    kind: ObjectiveKind
    status: SolveStatus
    solution: Optional[Solution]
    value: Optional[float]
    stats: SearchStats


@dataclass(frozen=True)
class SolverBudget:
    """Limits for one solver call; None means unlimited.

    ``max_subsets`` bounds the brute-force oracle, ``max_nodes`` the
    backtracking searches, ``q`` overrides the bisection method's
    subinterval exponent.
    """

    max_subsets: Optional[int] = None
    max_nodes: Optional[int] = None
    time_limit: Optional[float] = None
    q: Optional[int] = None

    def __post_init__(self) -> None:
        for name in ("max_subsets", "max_nodes", "time_limit", "q"):
            v = getattr(self, name)
            if v is not None and v <= 0:
                raise ValueError(f"budget field {name} must be positive, got {v}")

    def deadline(self, start: float) -> Optional[float]:
        return start + self.time_limit if self.time_limit is not None else None


_NO_BUDGET = SolverBudget()


@dataclass(frozen=True)
class ThresholdGraph:
    """G(l): vertices 0..n-1, edges exactly the pairs with d_ij < l."""

    n: int
    threshold: float
    adj: tuple[int, ...]
    edge_count: int


@dataclass(frozen=True)
class OptimaEnumeration:
    """Alternate optima in lexicographic order; truncated means more exist."""

    solutions: tuple[Solution, ...]
    truncated: bool
    value: float

    def __len__(self) -> int:
        return len(self.solutions)

    def __iter__(self) -> Iterator[Solution]:
        return iter(self.solutions)


@dataclass(frozen=True)
class BiLevelResult:
    d_star: float
    optima_enumerated: int
    cap: int
    truncated: bool
    upper_kind: ObjectiveKind
    chosen: Solution
    upper_value: float


def _validate_m(instance: Instance, m: int) -> None:
    if not (2 <= m <= instance.n):
        raise ValueError(f"require 2 <= m <= n, got m={m}, n={instance.n}")


def build_threshold_graph(instance: Instance, l: float) -> ThresholdGraph:
    closer = instance.distances < l
    np.fill_diagonal(closer, False)
    packed = np.packbits(closer, axis=1, bitorder="little")
    adj = tuple(int.from_bytes(row.tobytes(), "little") for row in packed)
    return ThresholdGraph(n=instance.n, threshold=float(l), adj=adj,
                          edge_count=int(closer.sum()) // 2)


def _bits_to_nodes(bits: int) -> tuple[int, ...]:
    out = []
    while bits:
        low = bits & -bits
        out.append(low.bit_length() - 1)
        bits ^= low
    return tuple(out)


def _lowest_bits(mask: int, k: int) -> int:
    out = 0
    for _ in range(k):
        low = mask & -mask
        out |= low
        mask ^= low
    return out


class _Exhausted(Exception):
    pass


def _check_limits(nodes: int, max_nodes: Optional[int],
                  deadline: Optional[float]) -> None:
    if max_nodes is not None and nodes > max_nodes:
        raise _Exhausted
    if deadline is not None and nodes & 255 == 0 and time.perf_counter() > deadline:
        raise _Exhausted


def _find_independent(adj: tuple[int, ...], n: int, m: int,
                      max_nodes: Optional[int], deadline: Optional[float],
                      ) -> tuple[Optional[int], int, bool]:
    """Search G for an independent set of size m.

    Returns (bits or None, nodes_explored, decided).  Branches on the
    candidate vertex of maximum degree within the candidate set, excluding
    it first; prunes when fewer candidates remain than are still needed.
    """
    full = (1 << n) - 1
    nodes = 0
    # stack entries: (candidates, chosen, still_needed); exclude branch is
    # pushed last so it pops first
    stack = [(full, 0, m)]
    try:
        while stack:
            cand, chosen, need = stack.pop()
            nodes += 1
            _check_limits(nodes, max_nodes, deadline)
            if need == 0:
                return chosen, nodes, True
            if cand.bit_count() < need:
                continue
            # a greedy clique cover of the candidates bounds the best
            # completion; decisive on the infeasible side of the threshold
            if _clique_cover_size(cand, adj) < need:
                continue
            pick, maxdeg = -1, -1
            scan = cand
            while scan:
                low = scan & -scan
                scan ^= low
                deg = (adj[low.bit_length() - 1] & cand).bit_count()
                if deg > maxdeg:
                    maxdeg = deg
                    pick = low.bit_length() - 1
            if maxdeg == 0:
                # conflict-free candidates: lowest-index fill completes
                return chosen | _lowest_bits(cand, need), nodes, True
            bit = 1 << pick
            stack.append((cand & ~(adj[pick] | bit), chosen | bit, need - 1))
            stack.append((cand & ~bit, chosen, need))
        return None, nodes, True
    except _Exhausted:
        return None, nodes, False


def feasible_subset(instance: Instance, l: float, m: int,
                    budget: Optional[SolverBudget] = None) -> SolveResult:
    """Decide whether some m-subset has all pairwise distances >= l.

    Equivalent to finding an independent set of size m in G(l).  Feasible
    results carry a witness; Infeasible means the search space was
    exhausted.
    """
    _validate_m(instance, m)
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    graph = build_threshold_graph(instance, l)
    bits, nodes, decided = _find_independent(
        graph.adj, graph.n, m, budget.max_nodes, budget.deadline(start))
    stats = SearchStats(subsets_or_nodes_explored=nodes, decision_solves=1,
                        wall_time=time.perf_counter() - start)
    if not decided:
        return SolveResult(ObjectiveKind.MAXMIN, SolveStatus.BUDGET_EXCEEDED,
                           None, None, stats)
    if bits is None:
        return SolveResult(ObjectiveKind.MAXMIN, SolveStatus.INFEASIBLE,
                           None, None, stats)
    witness = Solution(_bits_to_nodes(bits))
    return SolveResult(ObjectiveKind.MAXMIN, SolveStatus.FEASIBLE, witness,
                       eval_maxmin(instance, witness), stats)


def _components(cand: int, adj: tuple[int, ...]) -> list[int]:
    comps = []
    rest = cand
    while rest:
        comp = rest & -rest
        frontier = comp
        while frontier:
            grown = 0
            scan = frontier
            while scan:
                low = scan & -scan
                scan ^= low
                grown |= adj[low.bit_length() - 1] & rest & ~comp
            comp |= grown
            frontier = grown
        comps.append(comp)
        rest &= ~comp
    return comps


def _clique_cover_size(cand: int, adj: tuple[int, ...]) -> int:
    # greedy clique cover of the candidate subgraph; its size bounds the
    # independence number from above
    count = 0
    rest = cand
    while rest:
        v = (rest & -rest).bit_length() - 1
        clique = 1 << v
        common = adj[v] & rest
        while common:
            u = (common & -common).bit_length() - 1
            clique |= 1 << u
            common &= adj[u]
        rest &= ~clique
        count += 1
    return count


def _greedy_independent(cand: int, adj: tuple[int, ...]) -> int:
    sel = 0
    while cand:
        best_v, best_deg = -1, None
        scan = cand
        while scan:
            low = scan & -scan
            scan ^= low
            deg = (adj[low.bit_length() - 1] & cand).bit_count()
            if best_deg is None or deg < best_deg:
                best_deg = deg
                best_v = low.bit_length() - 1
                if deg == 0:
                    break
        sel |= 1 << best_v
        cand &= ~(adj[best_v] | (1 << best_v))
    return sel


def _reduce_forced(cand: int, adj: tuple[int, ...]) -> tuple[int, int]:
    """Strip degree-0 and degree-1 vertices; returns (forced picks, rest).

    Isolated candidates always join the packing; a degree-1 vertex can join
    in place of its sole neighbor without loss.
    """
    forced = 0
    changed = True
    while changed:
        changed = False
        zero = 0
        scan = cand
        while scan:
            low = scan & -scan
            scan ^= low
            v = low.bit_length() - 1
            nb = adj[v] & cand
            deg = nb.bit_count()
            if deg == 0:
                zero |= low
            elif deg == 1:
                forced |= low
                cand &= ~(nb | low)
                changed = True
                break
        if zero:
            # isolated vertices never conflict; removing them cannot create
            # new reductions, so no restart is needed for them alone
            forced |= zero
            cand &= ~zero
    return forced, cand


class _MisSearch:
    """Exact maximum independent set over bitset adjacency."""

    def __init__(self, adj: tuple[int, ...], max_nodes: Optional[int],
                 deadline: Optional[float]) -> None:
        self.adj = adj
        self.max_nodes = max_nodes
        self.deadline = deadline
        self.nodes = 0

    def _tick(self) -> None:
        self.nodes += 1
        _check_limits(self.nodes, self.max_nodes, self.deadline)

    def solve(self, cand: int) -> int:
        """Exact MIS bits of the subgraph induced by cand."""
        self._tick()
        forced, cand = _reduce_forced(cand, self.adj)
        if cand == 0:
            return forced
        comps = _components(cand, self.adj)
        if len(comps) > 1:
            out = forced
            for comp in comps:
                out |= self.solve(comp)
            return out
        return forced | self._component(comps[0])

    def _component(self, cand: int) -> int:
        adj = self.adj
        best_bits = _greedy_independent(cand, adj)
        best = best_bits.bit_count()

        def bb(cand: int, cur_bits: int, cur: int) -> None:
            nonlocal best, best_bits
            self._tick()
            forced, cand = _reduce_forced(cand, adj)
            if forced:
                cur_bits |= forced
                cur += forced.bit_count()
            if cand == 0:
                if cur > best:
                    best, best_bits = cur, cur_bits
                return
            while cand:
                if cur + _clique_cover_size(cand, adj) <= best:
                    return
                pick, maxdeg = -1, -1
                scan = cand
                while scan:
                    low = scan & -scan
                    scan ^= low
                    deg = (adj[low.bit_length() - 1] & cand).bit_count()
                    if deg > maxdeg:
                        maxdeg = deg
                        pick = low.bit_length() - 1
                bit = 1 << pick
                # include pick (recursive), then loop on as the exclude branch
                bb(cand & ~(adj[pick] | bit), cur_bits | bit, cur + 1)
                cand &= ~bit
                if cand and cand.bit_count() + cur <= best:
                    return
                if cand == 0:
                    if cur > best:
                        best, best_bits = cur, cur_bits
                    return

        bb(cand, 0, 0)
        return best_bits


def max_packing(instance: Instance, l: float,
                budget: Optional[SolverBudget] = None) -> SolveResult:
    """Maximum independent set in G(l): the most nodes with pairwise d >= l.

    The result's value is the packing size v(l); the witness solution
    attains it.  On budget exhaustion the greedy packing is returned as a
    Feasible lower bound.
    """
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    graph = build_threshold_graph(instance, l)
    search = _MisSearch(graph.adj, budget.max_nodes, budget.deadline(start))
    full = (1 << graph.n) - 1
    try:
        bits = search.solve(full)
        status = SolveStatus.OPTIMAL
    except _Exhausted:
        bits = _greedy_independent(full, graph.adj)
        status = SolveStatus.FEASIBLE
    stats = SearchStats(subsets_or_nodes_explored=search.nodes,
                        decision_solves=1,
                        wall_time=time.perf_counter() - start)
    witness = Solution(_bits_to_nodes(bits))
    return SolveResult(ObjectiveKind.MAXMIN, status, witness,
                       float(len(witness)), stats)


def _trivial_maxmin_result(instance: Instance, m: int, status: SolveStatus,
                           stats: SearchStats) -> SolveResult:
    # when the optimum is d_min, every m-subset attains it
    sol = Solution(range(m))
    return SolveResult(ObjectiveKind.MAXMIN, status, sol,
                       eval_maxmin(instance, sol), stats)


def solve_maxmin_improved(instance: Instance, m: int,
                          budget: Optional[SolverBudget] = None) -> SolveResult:
    """Exact MaxMin via binary search over the distinct distances by index.

    The optimum is always a stored distance, so probing median spectrum
    values needs no epsilon: the bracket [values[lo], values[hi]) keeps a
    feasible left end and an infeasible right end until one value remains.
    Decision count is at most ceil(log2(#distinct)) + 1.
    """
    _validate_m(instance, m)
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    values = spectrum_stats(instance).distinct_values
    lo, hi = 0, len(values)  # values[lo] feasible; index hi infeasible
    witness: Optional[Solution] = None
    solves = 0
    nodes = 0
    trace: list[tuple[float, bool]] = []
    exhausted = False
    while hi - lo > 1:
        mid = (lo + hi) // 2
        remaining = _remaining_budget(budget, start)
        if remaining is None:
            exhausted = True
            break
        probe = feasible_subset(instance, values[mid], m, remaining)
        solves += 1
        nodes += probe.stats.subsets_or_nodes_explored
        if probe.status == SolveStatus.BUDGET_EXCEEDED:
            exhausted = True
            break
        ok = probe.status == SolveStatus.FEASIBLE
        trace.append((values[mid], ok))
        if ok:
            lo = mid
            witness = probe.solution
        else:
            hi = mid
    stats = SearchStats(subsets_or_nodes_explored=nodes, decision_solves=solves,
                        wall_time=time.perf_counter() - start,
                        trace=tuple(trace))
    status = SolveStatus.FEASIBLE if exhausted else SolveStatus.OPTIMAL
    if witness is None:
        result = _trivial_maxmin_result(instance, m, status, stats)
    else:
        result = SolveResult(ObjectiveKind.MAXMIN, status, witness,
                             eval_maxmin(instance, witness), stats)
    stats.wall_time = time.perf_counter() - start
    return result


def _remaining_budget(budget: SolverBudget, start: float) -> Optional[SolverBudget]:
    """Budget left for the next inner call; None when time already ran out."""
    if budget.time_limit is None:
        return budget
    left = budget.time_limit - (time.perf_counter() - start)
    if left <= 0:
        return None
    return replace(budget, time_limit=left)


def default_subinterval_exponent(instance: Instance) -> Optional[int]:
    """ceil(log2(spread / smallest gap)), capped; None for flat spectra."""
    st = spectrum_stats(instance)
    if st.min_positive_gap is None:
        return None
    spread = st.d_max - st.d_min
    q = max(0, ceil(log2(spread / st.min_positive_gap)))
    return min(q, MAX_SUBINTERVAL_EXPONENT)


def solve_maxmin_original(instance: Instance, m: int,
                          budget: Optional[SolverBudget] = None) -> SolveResult:
    """Exact MaxMin via interval bisection with one packing solve per step.

    The bracket starts at [d_min, d_max + gap) and each step solves a
    maximum node packing at the midpoint, comparing its size v(l) to m.
    With q = ceil(log2(spread/gap)) subinterval halvings the bracket is
    guaranteed to isolate a single spectrum value, which is the optimum.
    If the capped q runs out first the incumbent is returned as Feasible.
    """
    _validate_m(instance, m)
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    st = spectrum_stats(instance)
    values = st.distinct_values
    gap = st.min_positive_gap
    if gap is None:
        # flat spectrum: every m-subset scores d_min
        stats = SearchStats(wall_time=time.perf_counter() - start, q_used=None)
        return _trivial_maxmin_result(instance, m, SolveStatus.OPTIMAL, stats)
    q = budget.q if budget.q is not None else default_subinterval_exponent(instance)
    q = min(q, MAX_SUBINTERVAL_EXPONENT)
    lo = st.d_min
    hi = st.d_max + gap  # strictly above the optimum by construction
    witness: Optional[Solution] = None
    solves = 0
    nodes = 0
    trace: list[tuple[float, int, bool]] = []
    exhausted = False

    def values_in_bracket() -> int:
        return bisect_left(values, hi) - bisect_left(values, lo)

    while values_in_bracket() > 1 and solves <= q:
        mid = (lo + hi) / 2.0
        remaining = _remaining_budget(budget, start)
        if remaining is None:
            exhausted = True
            break
        pack = max_packing(instance, mid, remaining)
        solves += 1
        nodes += pack.stats.subsets_or_nodes_explored
        size = int(pack.value)
        if pack.status != SolveStatus.OPTIMAL:
            if size >= m:
                # the lower-bound witness already proves feasibility at mid
                lo = mid
                witness = Solution(pack.solution.nodes[:m])
                trace.append((mid, size, True))
                continue
            exhausted = True
            break
        feasible = size >= m
        trace.append((mid, size, feasible))
        if feasible:
            lo = mid
            witness = Solution(pack.solution.nodes[:m])
        else:
            hi = mid
    stats = SearchStats(subsets_or_nodes_explored=nodes, decision_solves=solves,
                        wall_time=time.perf_counter() - start,
                        trace=tuple(trace), q_used=q)
    if exhausted or values_in_bracket() > 1:
        # could not isolate a single value: report the incumbent bound
        status = SolveStatus.FEASIBLE
        if witness is None:
            return _trivial_maxmin_result(instance, m, status, stats)
        return SolveResult(ObjectiveKind.MAXMIN, status, witness,
                           eval_maxmin(instance, witness), stats)
    if witness is None:
        return _trivial_maxmin_result(instance, m, SolveStatus.OPTIMAL, stats)
    result = SolveResult(ObjectiveKind.MAXMIN, SolveStatus.OPTIMAL, witness,
                         eval_maxmin(instance, witness), stats)
    # the isolated bracket pins the witness's min distance to the optimum
    assert result.value == values[bisect_left(values, lo)]
    return result


def enumerate_maxmin_optima(instance: Instance, m: int,
                            cap: int = DEFAULT_OPTIMA_CAP,
                            budget: Optional[SolverBudget] = None,
                            z_star: Optional[float] = None) -> OptimaEnumeration:
    """All m-subsets whose min pairwise distance equals the MaxMin optimum.

    They are exactly the size-m independent sets of G(z*), generated in
    lexicographic order.  ``truncated`` reports that more exist beyond the
    cap.  Raises BudgetExceededError when limits cut the search short.
    """
    if m is None:
        raise ValueError("maxmin enumeration requires a subset size m")
    _validate_m(instance, m)
    if cap < 1:
        raise ValueError(f"cap must be positive, got {cap}")
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    if z_star is None:
        base = solve_maxmin_improved(instance, m, budget)
        if base.status != SolveStatus.OPTIMAL:
            raise BudgetExceededError("MaxMin optimum not proven within budget")
        z_star = base.value
    graph = build_threshold_graph(instance, z_star)
    adj = graph.adj
    n = graph.n
    deadline = budget.deadline(start)
    max_nodes = budget.max_nodes
    found: list[Solution] = []
    truncated = False
    nodes = 0

    # lexicographic DFS: candidates are non-conflicting vertices above the
    # last chosen index
    def rec(cand: int, chosen: list[int], need: int) -> bool:
        nonlocal nodes, truncated
        nodes += 1
        _check_limits(nodes, max_nodes, deadline)
        if need == 0:
            if len(found) == cap:
                truncated = True
                return False
            found.append(Solution(chosen))
            return True
        if cand.bit_count() < need:
            return True
        scan = cand
        while scan:
            low = scan & -scan
            scan ^= low
            v = low.bit_length() - 1
            above = ~((low << 1) - 1)  # indices strictly greater than v
            chosen.append(v)
            keep = rec(cand & ~adj[v] & above, chosen, need - 1)
            chosen.pop()
            if not keep:
                return False
        return True

    try:
        rec((1 << n) - 1, [], m)
    except _Exhausted:
        raise BudgetExceededError(
            f"optima enumeration exceeded budget after {nodes} nodes") from None
    return OptimaEnumeration(solutions=tuple(found), truncated=truncated,
                             value=z_star)


def brute_force(instance: Instance, m: Optional[int], kind: ObjectiveKind,
                budget: Optional[SolverBudget] = None) -> SolveResult:
    """Exhaustive oracle: every m-subset (every subset for MaxMean).

    Refuses upfront (status BudgetExceeded) when the subset count exceeds
    the budget.  Ties go to the lexicographically smallest index tuple.
    """
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    n = instance.n
    if kind is ObjectiveKind.MAXMEAN:
        total = 2 ** n
    else:
        if m is None:
            raise ValueError(f"{kind.value} requires a subset size m")
        _validate_m(instance, m)
        total = comb(n, m)
    if budget.max_subsets is not None and total > budget.max_subsets:
        stats = SearchStats(wall_time=time.perf_counter() - start)
        return SolveResult(kind, SolveStatus.BUDGET_EXCEEDED, None, None, stats)

    D = instance.distances.tolist()
    sense_max = kind.sense is Sense.MAX
    best_val: Optional[float] = None
    best_combo: Optional[tuple[int, ...]] = None
    explored = 0
    deadline = budget.deadline(start)
    timed_out = False

    def better(val: float, combo: tuple[int, ...]) -> bool:
        if best_val is None:
            return True
        if val != best_val:
            return (val > best_val) if sense_max else (val < best_val)
        return combo < best_combo

    def scan_size(size: int) -> bool:
        nonlocal best_val, best_combo, explored, timed_out
        for combo in combinations(range(n), size):
            explored += 1
            if deadline is not None and explored & 4095 == 0 \
                    and time.perf_counter() > deadline:
                timed_out = True
                return False
            val = _score_plain(D, combo, kind)
            if better(val, combo):
                best_val, best_combo = val, combo
        return True

    if kind is ObjectiveKind.MAXMEAN:
        for size in range(1, n + 1):
            if not scan_size(size):
                break
    else:
        scan_size(m)

    stats = SearchStats(subsets_or_nodes_explored=explored,
                        wall_time=time.perf_counter() - start)
    status = SolveStatus.FEASIBLE if timed_out else SolveStatus.OPTIMAL
    sol = Solution(best_combo)
    return SolveResult(kind, status, sol, evaluate(kind, instance, sol), stats)


def _score_plain(D: list[list[float]], combo: tuple[int, ...],
                 kind: ObjectiveKind) -> float:
    k = len(combo)
    if kind is ObjectiveKind.MAXSUM or kind is ObjectiveKind.MAXMEAN:
        s = 0.0
        for a in range(k):
            row = D[combo[a]]
            for b in range(a + 1, k):
                s += row[combo[b]]
        return s / k if kind is ObjectiveKind.MAXMEAN else s
    if kind is ObjectiveKind.MAXMIN:
        best = inf
        for a in range(k):
            row = D[combo[a]]
            for b in range(a + 1, k):
                if row[combo[b]] < best:
                    best = row[combo[b]]
        return best
    contrib = [0.0] * k
    for a in range(k):
        row = D[combo[a]]
        for b in range(a + 1, k):
            d = row[combo[b]]
            contrib[a] += d
            contrib[b] += d
    if kind is ObjectiveKind.MAXMINSUM:
        return min(contrib)
    return max(contrib) - min(contrib)


def enumerate_optima(instance: Instance, m: Optional[int], kind: ObjectiveKind,
                     cap: int = DEFAULT_OPTIMA_CAP, tolerance: float = 1e-9,
                     budget: Optional[SolverBudget] = None) -> OptimaEnumeration:
    """All optimal subsets of one model, lexicographic, up to cap.

    Sum-type values match the optimum within relative tolerance; MaxMin
    matches exactly (delegated to the threshold enumeration, which scales
    past brute force).
    """
    if cap < 1:
        raise ValueError(f"cap must be positive, got {cap}")
    if kind is ObjectiveKind.MAXMIN:
        return enumerate_maxmin_optima(instance, m, cap=cap, budget=budget)
    budget = budget or _NO_BUDGET
    base = brute_force(instance, m, kind, budget)
    if base.status is SolveStatus.BUDGET_EXCEEDED:
        raise BudgetExceededError("enumeration bound exceeds budget")
    if base.status is not SolveStatus.OPTIMAL:
        raise BudgetExceededError("optimum not proven within time budget")
    opt = base.value
    tol = tolerance * max(1.0, abs(opt))
    D = instance.distances.tolist()
    n = instance.n
    found: list[Solution] = []
    truncated = False

    def consider(combo: tuple[int, ...]) -> bool:
        nonlocal truncated
        if abs(_score_plain(D, combo, kind) - opt) <= tol:
            if len(found) == cap:
                truncated = True
                return False
            found.append(Solution(combo))
        return True

    if kind is ObjectiveKind.MAXMEAN:
        sizes: list[int] = list(range(1, n + 1))
    else:
        sizes = [m]
    done = True
    for size in sizes:
        for combo in combinations(range(n), size):
            if not consider(combo):
                done = False
                break
        if not done:
            break
    return OptimaEnumeration(solutions=tuple(found), truncated=truncated,
                             value=opt)


def solve_maxsum_bnb(instance: Instance, m: int,
                     budget: Optional[SolverBudget] = None) -> SolveResult:
    """Exact MaxSum by depth-first branch and bound in index order.

    At a partial selection the bound adds, for each of the m-k best
    remaining candidates, its distance sum into the selection plus half its
    m-k-1 largest distances to other remaining candidates; no completion
    can exceed that.
    """
    _validate_m(instance, m)
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    deadline = budget.deadline(start)
    D = instance.distances.tolist()
    n = instance.n
    best_val = -inf
    best_combo: Optional[tuple[int, ...]] = None
    nodes = 0

    def rec(start_idx: int, chosen: list[int], cur: float) -> None:
        nonlocal best_val, best_combo, nodes
        nodes += 1
        _check_limits(nodes, budget.max_nodes, deadline)
        k = len(chosen)
        if k == m:
            if cur > best_val:
                best_val = cur
                best_combo = tuple(chosen)
            return
        need = m - k
        remaining = range(start_idx, n)
        if len(remaining) < need:
            return
        # admissible completion bound
        scores = []
        for v in remaining:
            row = D[v]
            to_chosen = 0.0
            for s in chosen:
                to_chosen += row[s]
            others = sorted((row[u] for u in remaining if u != v), reverse=True)
            scores.append(to_chosen + 0.5 * sum(others[:need - 1]))
        scores.sort(reverse=True)
        if cur + sum(scores[:need]) <= best_val:
            return
        for v in range(start_idx, n - need + 1):
            row = D[v]
            gain = 0.0
            for s in chosen:
                gain += row[s]
            chosen.append(v)
            rec(v + 1, chosen, cur + gain)
            chosen.pop()

    status = SolveStatus.OPTIMAL
    try:
        rec(0, [], 0.0)
    except _Exhausted:
        status = SolveStatus.FEASIBLE if best_combo is not None \
            else SolveStatus.BUDGET_EXCEEDED
    stats = SearchStats(subsets_or_nodes_explored=nodes,
                        wall_time=time.perf_counter() - start)
    if best_combo is None:
        return SolveResult(ObjectiveKind.MAXSUM, status, None, None, stats)
    sol = Solution(best_combo)
    return SolveResult(ObjectiveKind.MAXSUM, status, sol,
                       eval_maxsum(instance, sol), stats)


def solve_bilevel(instance: Instance, m: int, upper_kind: ObjectiveKind,
                  cap: int = DEFAULT_OPTIMA_CAP,
                  budget: Optional[SolverBudget] = None,
                  mode: str = "enumerate") -> BiLevelResult:
    """Optimize a secondary objective over the MaxMin-optimal subsets.

    mode="enumerate" collects MaxMin optima up to cap and picks the best
    under the upper objective (heuristic when truncated).  mode="exact"
    searches all independent sets of G(d*) directly with bound pruning, so
    the answer is exact no matter how many optima exist.
    """
    if upper_kind not in (ObjectiveKind.MAXSUM, ObjectiveKind.MAXMINSUM):
        raise ValueError(f"upper objective must be maxsum or maxminsum, "
                         f"got {upper_kind.value}")
    if mode not in ("enumerate", "exact"):
        raise ValueError(f"mode must be 'enumerate' or 'exact', got {mode!r}")
    _validate_m(instance, m)
    budget = budget or _NO_BUDGET
    start = time.perf_counter()
    base = solve_maxmin_improved(instance, m, budget)
    if base.status != SolveStatus.OPTIMAL:
        raise BudgetExceededError("lower-level MaxMin not solved within budget")
    d_star = base.value

    if mode == "enumerate":
        remaining = _remaining_budget(budget, start)
        if remaining is None:
            raise BudgetExceededError("time budget exhausted before enumeration")
        optima = enumerate_maxmin_optima(instance, m, cap=cap, budget=remaining,
                                         z_star=d_star)
        chosen = None
        upper_value = -inf
        for sol in optima:
            val = evaluate(upper_kind, instance, sol)
            if val > upper_value:
                upper_value = val
                chosen = sol
        return BiLevelResult(d_star=d_star, optima_enumerated=len(optima),
                             cap=cap, truncated=optima.truncated,
                             upper_kind=upper_kind, chosen=chosen,
                             upper_value=evaluate(upper_kind, instance, chosen))

    graph = build_threshold_graph(instance, d_star)
    adj = graph.adj
    n = graph.n
    D = instance.distances.tolist()
    deadline = budget.deadline(start)
    best_val = -inf
    best_combo: Optional[tuple[int, ...]] = None
    nodes = 0
    leaves = 0

    def rec(cand: int, chosen: list[int], cur: float) -> None:
        nonlocal best_val, best_combo, nodes, leaves
        nodes += 1
        _check_limits(nodes, budget.max_nodes, deadline)
        k = len(chosen)
        if k == m:
            leaves += 1
            val = cur if upper_kind is ObjectiveKind.MAXSUM \
                else _score_plain(D, tuple(chosen), ObjectiveKind.MAXMINSUM)
            if val > best_val:
                best_val = val
                best_combo = tuple(chosen)
            return
        need = m - k
        remaining = _bits_to_nodes(cand)
        if len(remaining) < need:
            return
        # MaxSum-style completion bound; MaxMinSum is capped by twice the
        # best possible sum divided by m (min <= mean of contributions)
        scores = []
        for v in remaining:
            row = D[v]
            to_chosen = 0.0
            for s in chosen:
                to_chosen += row[s]
            others = sorted((row[u] for u in remaining if u != v), reverse=True)
            scores.append(to_chosen + 0.5 * sum(others[:need - 1]))
        scores.sort(reverse=True)
        sum_bound = cur + sum(scores[:need])
        bound = sum_bound if upper_kind is ObjectiveKind.MAXSUM \
            else 2.0 * sum_bound / m
        if bound <= best_val:
            return
        for v in remaining:
            row = D[v]
            gain = 0.0
            for s in chosen:
                gain += row[s]
            above = ~((1 << (v + 1)) - 1)
            chosen.append(v)
            rec(cand & ~adj[v] & above, chosen, cur + gain)
            chosen.pop()

    try:
        rec((1 << n) - 1, [], 0.0)
    except _Exhausted:
        raise BudgetExceededError(
            f"exact bi-level search exceeded budget after {nodes} nodes") from None
    chosen_sol = Solution(best_combo)
    return BiLevelResult(d_star=d_star, optima_enumerated=leaves, cap=cap,
                         truncated=False, upper_kind=upper_kind,
                         chosen=chosen_sol,
                         upper_value=evaluate(upper_kind, instance, chosen_sol))


def solve_model(instance: Instance, m: Optional[int], kind: ObjectiveKind,
                budget: Optional[SolverBudget] = None,
                maxmin_method: str = "improved") -> SolveResult:
    """Front door used by the CLI: route each model to its exact solver."""
    if kind is ObjectiveKind.MAXSUM:
        return solve_maxsum_bnb(instance, m, budget)
    if kind is ObjectiveKind.MAXMIN:
        if maxmin_method == "improved":
            return solve_maxmin_improved(instance, m, budget)
        if maxmin_method == "original":
            return solve_maxmin_original(instance, m, budget)
        raise ValueError(f"unknown maxmin method {maxmin_method!r}")
    return brute_force(instance, m, kind, budget)
