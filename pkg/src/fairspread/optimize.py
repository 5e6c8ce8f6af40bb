"""Seed selection: lazy greedy, SATURATE-style baselines and exact search.

All selectors work on a fixed SketchSet, so their objectives are
deterministic monotone submodular set functions and the classic greedy
(1 - 1/e) guarantee applies.  Objective values are reported relative
to the empty-set baseline (for welfare: the all-floored vector); the
shift keeps marginal gains free of catastrophic cancellation at very
negative alpha and makes approximation ratios meaningful.

Marginal gains are always computed per community as g(u + d) - g(u),
never as a difference of two full objective values.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from .cascade import (
    SketchSet,
    UndirectedSketchSet,
    UtilityVector,
    estimate_utilities,
    exact_utilities,
    sample_sketches,
)
from .errors import EnumerationLimitError, GraphFormatError, InfeasibleError
from .graph import (
    CommunityPartition,
    Graph,
    SeedSet,
    induced_within_community_subgraph,
)
from .welfare import WelfareParams

EXHAUSTIVE_LIMIT = 2_000_000


@dataclass(frozen=True)
class SelectionTrace:
    chosen: tuple[int, ...]
    objective_after_each: tuple[float, ...]
    evaluations: int

    def __post_init__(self):
        if len(set(self.chosen)) != len(self.chosen):
            raise GraphFormatError("selection trace contains duplicate vertices")


@dataclass(frozen=True)
class DcBounds:
    """Per-community diversity-constraint lower bounds and budgets."""

    bounds: tuple[float, ...]
    budgets: tuple[int, ...]
    k: int

    def __post_init__(self):
        for b in self.bounds:
            if not (0 <= b <= 1):
                raise GraphFormatError(f"DC bound {b} outside [0, 1]")
        if sum(self.budgets) > self.k:
            raise GraphFormatError("proportional budgets exceed total budget")


# --- objectives on per-community influenced counts --------------------------


class _Objective:
    """Maps summed per-community influenced counts to an objective value."""

    def value(self, counts: np.ndarray) -> float:
        raise NotImplementedError

    def gain(self, counts: np.ndarray, delta: np.ndarray) -> float:
        raise NotImplementedError


class TotalObjective(_Objective):
    """Total expected spread sum_c n_c u_c on the sketches."""

    def __init__(self, R: int):
        self.R = R

    def value(self, counts):
        return float(counts.sum()) / self.R

    def gain(self, counts, delta):
        return float(delta.sum()) / self.R


class WelfareObjective(_Objective):
    """Baseline-shifted isoelastic welfare on sketch utilities."""

    def __init__(self, part: CommunityPartition, R: int, params: WelfareParams):
        self.sizes = np.array(part.sizes, dtype=np.float64)
        self.R = R
        self.alpha = params.alpha
        self.eps = params.epsilon

    def _gterms(self, u: np.ndarray) -> np.ndarray:
        x = np.maximum(u, self.eps)
        if self.alpha == 0:
            return np.log(x)
        return x**self.alpha / self.alpha

    def value(self, counts):
        u = counts / (self.R * self.sizes)
        base = self._gterms(np.zeros_like(u))
        return float(np.sum(self.sizes * (self._gterms(u) - base)))

    def gain(self, counts, delta):
        mask = delta > 0
        if not mask.any():
            return 0.0
        sizes = self.sizes[mask]
        u_old = counts[mask] / (self.R * sizes)
        u_new = (counts[mask] + delta[mask]) / (self.R * sizes)
        return float(np.sum(sizes * (self._gterms(u_new) - self._gterms(u_old))))


class TruncatedObjective(_Objective):
    """SATURATE inner objective sum_c min(u_c, gamma)."""

    def __init__(self, part: CommunityPartition, R: int, gamma: float):
        self.sizes = np.array(part.sizes, dtype=np.float64)
        self.R = R
        self.gamma = gamma

    def value(self, counts):
        u = counts / (self.R * self.sizes)
        return float(np.minimum(u, self.gamma).sum())

    def gain(self, counts, delta):
        mask = delta > 0
        if not mask.any():
            return 0.0
        sizes = self.sizes[mask]
        u_old = counts[mask] / (self.R * sizes)
        u_new = (counts[mask] + delta[mask]) / (self.R * sizes)
        return float(
            np.sum(np.minimum(u_new, self.gamma) - np.minimum(u_old, self.gamma))
        )


class DcSaturationObjective(_Objective):
    """Normalized saturation sum_c min(u_c / U_c, 1); U_c = 0 counts as met."""

    def __init__(self, part: CommunityPartition, R: int, bounds: DcBounds):
        self.sizes = np.array(part.sizes, dtype=np.float64)
        self.R = R
        self.U = np.array(bounds.bounds, dtype=np.float64)
        self.active = self.U > 0

    def value(self, counts):
        u = counts / (self.R * self.sizes)
        terms = np.where(self.active, np.minimum(u / np.where(self.active, self.U, 1.0), 1.0), 1.0)
        return float(terms.sum())

    def gain(self, counts, delta):
        mask = (delta > 0) & self.active
        if not mask.any():
            return 0.0
        sizes = self.sizes[mask]
        U = self.U[mask]
        u_old = counts[mask] / (self.R * sizes)
        u_new = (counts[mask] + delta[mask]) / (self.R * sizes)
        return float(
            np.sum(np.minimum(u_new / U, 1.0) - np.minimum(u_old / U, 1.0))
        )


# --- greedy core ------------------------------------------------------------


def _greedy_run(state, budget, objective, chosen, trace_vals, early_stop=None):
    """CELF lazy greedy continuing from an existing coverage state.

    Submodularity makes cached gains upper bounds, so an entry computed
    at the current step is safe to select.  Ties break on lowest vertex
    id; the selection sequence equals naive greedy's.
    """
    n = state.sk.graph.n if hasattr(state, "sk") else state.ev.sk.graph.n
    taken = set(chosen)
    evaluations = 0
    heap = []
    step = len(chosen)
    for v in range(n):
        if v in taken:
            continue
        g = objective.gain(state.counts, state.gain_counts(v))
        evaluations += 1
        heap.append((-g, v, step))
    heapq.heapify(heap)
    cur = trace_vals[-1] if trace_vals else 0.0
    while len(chosen) < budget and heap:
        if early_stop is not None and objective.value(state.counts) >= early_stop:
            break
        neg_g, v, stamp = heapq.heappop(heap)
        if stamp != step:
            g = objective.gain(state.counts, state.gain_counts(v))
            evaluations += 1
            heapq.heappush(heap, (-g, v, step))
            continue
        state.add(v)
        chosen.append(v)
        cur += -neg_g
        trace_vals.append(cur)
        step += 1
    return evaluations


def _lazy_greedy(sk: SketchSet, part: CommunityPartition, k: int, objective):
    if k < 1:
        raise InfeasibleError("budget must be >= 1")
    if k > sk.graph.n:
        raise InfeasibleError(f"budget {k} exceeds vertex count {sk.graph.n}")
    state = sk.coverage_state(part)
    chosen: list[int] = []
    trace_vals: list[float] = []
    evals = _greedy_run(state, k, objective, chosen, trace_vals)
    seeds = SeedSet(vertices=frozenset(chosen), k=k)
    trace = SelectionTrace(
        chosen=tuple(chosen),
        objective_after_each=tuple(trace_vals),
        evaluations=evals,
    )
    return seeds, trace, state


def naive_greedy(sk: SketchSet, part: CommunityPartition, k: int, objective):
    """Reference greedy evaluating every candidate at every step."""
    if k < 1 or k > sk.graph.n:
        raise InfeasibleError("invalid budget")
    state = sk.coverage_state(part)
    chosen: list[int] = []
    vals: list[float] = []
    cur = 0.0
    evals = 0
    remaining = list(range(sk.graph.n))
    for _ in range(k):
        best_g, best_v = None, None
        for v in remaining:
            g = objective.gain(state.counts, state.gain_counts(v))
            evals += 1
            if best_g is None or g > best_g:
                best_g, best_v = g, v
        state.add(best_v)
        remaining.remove(best_v)
        chosen.append(best_v)
        cur += best_g
        vals.append(cur)
    seeds = SeedSet(vertices=frozenset(chosen), k=k)
    return seeds, SelectionTrace(tuple(chosen), tuple(vals), evals)


def greedy_welfare(
    sk: SketchSet, part: CommunityPartition, k: int, params: WelfareParams
) -> tuple[SeedSet, SelectionTrace]:
    """Lazy greedy maximizing W_alpha over sketch-estimated utilities."""
    obj = WelfareObjective(part, sk.R, params)
    seeds, trace, _ = _lazy_greedy(sk, part, k, obj)
    return seeds, trace


def greedy_utilitarian(
    sk: SketchSet, part: CommunityPartition, k: int
) -> tuple[SeedSet, SelectionTrace]:
    """Lazy greedy maximizing total expected spread."""
    obj = TotalObjective(sk.R)
    seeds, trace, _ = _lazy_greedy(sk, part, k, obj)
    return seeds, trace


def saturate_maximin(
    sk: SketchSet, part: CommunityPartition, k: int, tol: float = 0.01
) -> tuple[SeedSet, float]:
    """Binary search on gamma with a truncated greedy inner loop.

    Returns the seed set for the largest gamma whose truncated
    objective reaches N_C * gamma within tol.
    """
    if tol <= 0:
        raise InfeasibleError("tolerance must be positive")
    C = part.num_communities
    lo, hi = 0.0, 1.0
    best: SeedSet | None = None
    for _ in range(64):
        if hi - lo <= tol:
            break
        mid = (lo + hi) / 2
        obj = TruncatedObjective(part, sk.R, mid)
        seeds, _, state = _lazy_greedy(sk, part, k, obj)
        if obj.value(state.counts) >= C * mid - tol:
            lo = mid
            best = seeds
        else:
            hi = mid
    if best is None:
        best, _ = greedy_utilitarian(sk, part, k)
    return best, lo


def dc_lower_bounds(
    g: Graph,
    part: CommunityPartition,
    k: int,
    R: int,
    master_seed,
) -> DcBounds:
    """Diversity-constraint bounds U_c from within-community greedy runs.

    Each community optimizes total spread inside its induced subgraph
    with its proportional budget floor(k * n_c / n) and fresh sketches
    keyed by (master_seed, c).
    """
    if k > g.n:
        raise InfeasibleError(f"budget {k} exceeds vertex count {g.n}")
    n = g.n
    key = master_seed if isinstance(master_seed, (tuple, list)) else (master_seed,)
    bounds = []
    budgets = []
    for c in range(part.num_communities):
        budget = (k * part.sizes[c]) // n
        budgets.append(budget)
        if budget == 0:
            bounds.append(0.0)
            continue
        sub, _members = induced_within_community_subgraph(g, part, c)
        sub_part = CommunityPartition(labels=(0,) * sub.n)
        sk_c = sample_sketches(sub, R, (*key, c))
        seeds, _ = greedy_utilitarian(sk_c, sub_part, budget)
        u = estimate_utilities(sk_c, seeds, sub_part)
        bounds.append(float(u.values[0]))
    return DcBounds(bounds=tuple(bounds), budgets=tuple(budgets), k=k)


def saturate_dc(
    sk: SketchSet,
    part: CommunityPartition,
    k: int,
    bounds: DcBounds,
    tol: float = 0.01,
) -> tuple[SeedSet, bool]:
    """Greedy saturation of the DC lower bounds, then spend leftovers.

    Once every bound is saturated on the evaluation sketches, remaining
    budget goes to total influence.  The feasibility flag reports
    whether all u_c >= U_c - tol at the end.
    """
    if bounds.k != k:
        raise InfeasibleError("bounds were computed for a different budget")
    if k < 1 or k > sk.graph.n:
        raise InfeasibleError("invalid budget")
    C = part.num_communities
    sat_obj = DcSaturationObjective(part, sk.R, bounds)
    state = sk.coverage_state(part)
    chosen: list[int] = []
    trace_vals: list[float] = []
    _greedy_run(state, k, sat_obj, chosen, trace_vals, early_stop=C - 1e-12)
    if len(chosen) < k:
        total_obj = TotalObjective(sk.R)
        trace_vals2: list[float] = [0.0]
        _greedy_run(state, k, total_obj, chosen, trace_vals2)
    u = state.counts / (sk.R * np.array(part.sizes, dtype=np.float64))
    feasible = bool(np.all(u >= np.array(bounds.bounds) - tol))
    return SeedSet(vertices=frozenset(chosen), k=k), feasible


# --- exhaustive oracle ------------------------------------------------------


def enumerate_seed_set_utilities(
    g: Graph,
    part: CommunityPartition,
    k: int,
    sketches: SketchSet | None = None,
    limit: int = EXHAUSTIVE_LIMIT,
):
    """Yield (seed tuple, UtilityVector) over all budget-k seed sets.

    Utilities come from the given sketches, or from the exact oracle
    (rational values) when sketches is None.
    """
    if math.comb(g.n, k) > limit:
        raise EnumerationLimitError(
            f"C({g.n}, {k}) exceeds the exhaustive limit {limit}"
        )
    if sketches is not None:
        if isinstance(sketches, UndirectedSketchSet):
            ev = sketches.evaluator(part)
            for combo in combinations(range(g.n), k):
                counts = ev.coverage_counts(combo)
                values = tuple(
                    int(c) / (sketches.R * n_c) for c, n_c in zip(counts, part.sizes)
                )
                yield combo, UtilityVector(values=values, sizes=part.sizes)
        else:
            for combo in combinations(range(g.n), k):
                seeds = SeedSet(vertices=frozenset(combo), k=max(k, 1))
                yield combo, estimate_utilities(sketches, seeds, part)
        return

    if g.p in (0.0, 1.0):
        for combo in combinations(range(g.n), k):
            seeds = SeedSet(vertices=frozenset(combo), k=max(k, 1))
            yield combo, exact_utilities(g, seeds, part)
        return

    # Enumerate coin subsets once; reuse singleton reachability per subset.
    m = len(g.edges)
    if m > 20:
        raise EnumerationLimitError(f"{m} coins exceed the exact enumeration limit")
    n = g.n
    comm_masks = [0] * part.num_communities
    for v, c in enumerate(part.labels):
        comm_masks[c] |= 1 << v
    sizes = part.sizes
    per_subset_reach: list[list[int]] = []
    for s in range(1 << m):
        adj: list[list[int]] = [[] for _ in range(n)]
        for a in range(m):
            if (s >> a) & 1:
                u, v = g.edges[a]
                adj[u].append(v)
                if not g.directed:
                    adj[v].append(u)
        reach = [0] * n
        for v0 in range(n):
            seen = 1 << v0
            stack = [v0]
            while stack:
                u = stack.pop()
                for w in adj[u]:
                    if not (seen >> w) & 1:
                        seen |= 1 << w
                        stack.append(w)
            reach[v0] = seen
        per_subset_reach.append(reach)
    popcounts = [bin(s).count("1") for s in range(1 << m)]
    p = Fraction(str(g.p))  # decimal-literal reading, matching the exact oracle
    weights = [p**j * (1 - p) ** (m - j) for j in range(m + 1)]
    C = part.num_communities
    for combo in combinations(range(g.n), k):
        counts_by_j = [[0] * C for _ in range(m + 1)]
        for s in range(1 << m):
            cover = 0
            reach = per_subset_reach[s]
            for v in combo:
                cover |= reach[v]
            row = counts_by_j[popcounts[s]]
            for c in range(C):
                row[c] += (cover & comm_masks[c]).bit_count()
        values = tuple(
            sum(weights[j] * counts_by_j[j][c] for j in range(m + 1)) / sizes[c]
            for c in range(C)
        )
        yield combo, UtilityVector(values=values, sizes=sizes)


def exhaustive_opt(
    g: Graph,
    part: CommunityPartition,
    k: int,
    objective: str,
    params: WelfareParams | None = None,
    sketches: SketchSet | None = None,
    limit: int = EXHAUSTIVE_LIMIT,
) -> tuple[SeedSet, float]:
    """Brute-force optimal budget-k seed set; ties broken lexicographically.

    objective is one of "total", "welfare" (requires params) or
    "maximin".  Welfare values are baseline-shifted (see module doc);
    with exact utilities and integer alpha the argmax is decided in
    rational arithmetic.
    """
    if objective == "welfare" and params is None:
        raise InfeasibleError("welfare objective requires WelfareParams")
    if k == 0:
        u = UtilityVector(values=(0.0,) * part.num_communities, sizes=part.sizes)
        return SeedSet(vertices=frozenset(), k=0), float(
            _objective_value(u, objective, params)
        )
    best_combo = None
    best_val = None
    for combo, u in enumerate_seed_set_utilities(g, part, k, sketches, limit):
        val = _objective_value(u, objective, params)
        if best_val is None or val > best_val:
            best_val = val
            best_combo = combo
    return SeedSet(vertices=frozenset(best_combo), k=k), float(best_val)


def _objective_value(u: UtilityVector, objective: str, params: WelfareParams | None):
    if objective == "total":
        return sum(n_c * x for x, n_c in zip(u.values, u.sizes))
    if objective == "maximin":
        return min(u.values)
    if objective == "welfare":
        alpha = params.alpha
        exact = all(isinstance(x, (Fraction, int)) for x in u.values) and float(
            alpha
        ).is_integer() and alpha != 0
        if exact:
            a = int(alpha)
            eps = Fraction(params.epsilon)
            return sum(
                n_c * (max(Fraction(x), eps) ** a - eps**a) / a
                for x, n_c in zip(u.values, u.sizes)
            )
        eps = params.epsilon
        if alpha == 0:
            return sum(
                n_c * (math.log(max(float(x), eps)) - math.log(eps))
                for x, n_c in zip(u.values, u.sizes)
            )
        return sum(
            n_c * (max(float(x), eps) ** alpha - eps**alpha) / alpha
            for x, n_c in zip(u.values, u.sizes)
        )
    raise InfeasibleError(f"unknown objective '{objective}'")
