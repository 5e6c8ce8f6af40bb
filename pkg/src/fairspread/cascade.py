"""Independent-cascade diffusion and live-edge sketch estimation.

Utilities are always per-community expected influenced fractions.  The
Monte Carlo estimator works on a fixed set of live-edge sketches so
that every objective built on top of it is a deterministic monotone
submodular set function.  For undirected graphs a sketch keeps each
edge with probability p and influence equals component membership; for
directed graphs each arc is kept independently.  (For a fixed seed set
both conventions have identical activation marginals, since the
cascade can traverse an edge in at most one consequential direction.)

An exact oracle enumerates live-edge realizations for small graphs and
returns rational utilities.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from .errors import EnumerationLimitError, GraphFormatError
from .graph import CommunityPartition, Graph, SeedSet

try:
    import numba

    _HAVE_NUMBA = True
except ImportError:  # pragma: no cover
    _HAVE_NUMBA = False

EXACT_COIN_LIMIT = 20


@dataclass(frozen=True)
class UtilityVector:
    """Per-community utilities u_c in [0, 1] with community sizes."""

    values: tuple
    sizes: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.sizes):
            raise GraphFormatError("utility/size length mismatch")
        for u in self.values:
            if not (0 <= u <= 1):
                raise GraphFormatError(f"utility {u} outside [0, 1]")
        object.__setattr__(self, "values", tuple(self.values))
        object.__setattr__(self, "sizes", tuple(int(s) for s in self.sizes))

    def as_floats(self) -> tuple[float, ...]:
        return tuple(float(u) for u in self.values)


def simulate_once(g: Graph, seeds: SeedSet, rng: np.random.Generator) -> set[int]:
    """One IC realization; returns the activated vertex set."""
    for v in seeds.vertices:
        if not (0 <= v < g.n):
            raise GraphFormatError(f"invalid seed id {v}")
    adj = g.out_neighbors()
    active = set(seeds.vertices)
    frontier = sorted(active)
    while frontier:
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v not in active and rng.random() < g.p:
                    active.add(v)
                    nxt.append(v)
        frontier = sorted(set(nxt))
    return active


def _sketch_masks(m: int, p: float, R: int, master_seed) -> np.ndarray:
    """(R, m) keep-masks; sketch i is keyed by (master_seed, i)."""
    key = master_seed if isinstance(master_seed, (tuple, list)) else (master_seed,)
    masks = np.empty((R, m), dtype=bool)
    for i in range(R):
        rng = np.random.default_rng((*key, i))
        masks[i] = rng.random(m) < p
    return masks


class UndirectedSketchSet:
    """Live-edge sketches of an undirected graph, stored as components.

    Component labels are globally unique across sketches so that
    coverage bookkeeping is a flat boolean array.
    """

    def __init__(self, graph: Graph, R: int, master_seed):
        if R < 1:
            raise GraphFormatError("sketch count must be >= 1")
        self.graph = graph
        self.R = R
        self.master_seed = master_seed
        m = len(graph.edges)
        self.edge_masks = _sketch_masks(m, graph.p, R, master_seed)
        n = graph.n
        if m:
            src = np.array([e[0] for e in graph.edges], dtype=np.int64)
            dst = np.array([e[1] for e in graph.edges], dtype=np.int64)
            offs = np.repeat(np.arange(R, dtype=np.int64) * n, m).reshape(R, m)
            keep = self.edge_masks
            rows = (src[None, :] + offs)[keep]
            cols = (dst[None, :] + offs)[keep]
            big = sp.coo_matrix(
                (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(R * n, R * n)
            )
            ncomp, labels = connected_components(big, directed=False)
        else:
            ncomp, labels = R * n, np.arange(R * n, dtype=np.int64)
        self.num_comps = int(ncomp)
        self.comp = labels.reshape(R, n).astype(np.int64)
        self._evaluators: dict[int, "_UndirectedEvaluator"] = {}

    def evaluator(self, part: CommunityPartition) -> "_UndirectedEvaluator":
        key = id(part)
        if key not in self._evaluators:
            self._evaluators[key] = _UndirectedEvaluator(self, part)
        return self._evaluators[key]

    def coverage_state(self, part: CommunityPartition) -> "UndirectedCoverageState":
        return UndirectedCoverageState(self.evaluator(part))


class _UndirectedEvaluator:
    def __init__(self, sk: UndirectedSketchSet, part: CommunityPartition):
        if len(part.labels) != sk.graph.n:
            raise GraphFormatError("community partition does not match sketch graph")
        self.sk = sk
        self.part = part
        labels = np.asarray(part.labels, dtype=np.int64)
        C = part.num_communities
        comp_comm = np.zeros((sk.num_comps, C), dtype=np.int64)
        flat = sk.comp.ravel()
        np.add.at(comp_comm, (flat, np.tile(labels, sk.R)), 1)
        self.comp_comm = comp_comm

    def coverage_counts(self, seeds) -> np.ndarray:
        """Influenced counts per community summed over all sketches."""
        seeds = sorted(seeds)
        if not seeds:
            return np.zeros(self.part.num_communities, dtype=np.int64)
        flags = np.zeros(self.sk.num_comps, dtype=bool)
        flags[self.sk.comp[:, seeds].ravel()] = True
        return self.comp_comm[flags].sum(axis=0)


class UndirectedCoverageState:
    """Incrementally tracked coverage of a growing seed set."""

    def __init__(self, ev: _UndirectedEvaluator):
        self.ev = ev
        self.covered = np.zeros(ev.sk.num_comps, dtype=bool)
        self.counts = np.zeros(ev.part.num_communities, dtype=np.int64)

    def gain_counts(self, v: int) -> np.ndarray:
        cols = self.ev.sk.comp[:, v]
        new = cols[~self.covered[cols]]
        return self.ev.comp_comm[new].sum(axis=0)

    def all_gain_counts(self) -> np.ndarray:
        comp = self.ev.sk.comp
        gains = self.ev.comp_comm[comp]  # (R, n, C)
        gains = np.where(self.covered[comp][..., None], 0, gains)
        return gains.sum(axis=0)

    def add(self, v: int) -> np.ndarray:
        cols = self.ev.sk.comp[:, v]
        new = cols[~self.covered[cols]]
        delta = self.ev.comp_comm[new].sum(axis=0)
        self.covered[cols] = True
        self.counts += delta
        return delta


class DirectedSketchSet:
    """Live-edge sketches of a directed graph with cached reachability."""

    def __init__(self, graph: Graph, R: int, master_seed):
        if R < 1:
            raise GraphFormatError("sketch count must be >= 1")
        self.graph = graph
        self.R = R
        self.master_seed = master_seed
        self.edge_masks = _sketch_masks(len(graph.edges), graph.p, R, master_seed)
        self._closure = None

    @property
    def closure(self) -> np.ndarray:
        """(R, n, n) boolean reachability per sketch (v reaches w)."""
        if self._closure is None:
            n = self.graph.n
            A = np.zeros((self.R, n, n), dtype=bool)
            for a, (u, v) in enumerate(self.graph.edges):
                A[self.edge_masks[:, a], u, v] = True
            idx = np.arange(n)
            A[:, idx, idx] = True
            steps = max(1, int(np.ceil(np.log2(max(n, 2)))))
            B = A
            for _ in range(steps):
                B = np.matmul(B.astype(np.uint8), B.astype(np.uint8)) > 0
            self._closure = B
        return self._closure

    def coverage_state(self, part: CommunityPartition) -> "DirectedCoverageState":
        return DirectedCoverageState(self, part)


class DirectedCoverageState:
    def __init__(self, sk: DirectedSketchSet, part: CommunityPartition):
        if len(part.labels) != sk.graph.n:
            raise GraphFormatError("community partition does not match sketch graph")
        self.sk = sk
        self.part = part
        labels = np.asarray(part.labels, dtype=np.int64)
        self.comm_cols = [np.flatnonzero(labels == c) for c in range(part.num_communities)]
        self.covered = np.zeros((sk.R, sk.graph.n), dtype=bool)
        self.counts = np.zeros(part.num_communities, dtype=np.int64)

    def _new_coverage(self, v: int) -> np.ndarray:
        return self.sk.closure[:, v, :] & ~self.covered

    def gain_counts(self, v: int) -> np.ndarray:
        new = self._new_coverage(v)
        return np.array([new[:, cols].sum() for cols in self.comm_cols], dtype=np.int64)

    def all_gain_counts(self) -> np.ndarray:
        return np.stack([self.gain_counts(v) for v in range(self.sk.graph.n)])

    def add(self, v: int) -> np.ndarray:
        new = self._new_coverage(v)
        delta = np.array([new[:, cols].sum() for cols in self.comm_cols], dtype=np.int64)
        self.covered |= self.sk.closure[:, v, :]
        self.counts += delta
        return delta


SketchSet = UndirectedSketchSet | DirectedSketchSet


def sample_sketches(g: Graph, R: int, master_seed) -> SketchSet:
    """Draw R live-edge sketches keyed by (master_seed, sketch index)."""
    if g.directed:
        return DirectedSketchSet(g, R, master_seed)
    return UndirectedSketchSet(g, R, master_seed)


def _directed_active_masks(sk: "DirectedSketchSet", seeds) -> np.ndarray:
    """(R, n) activation table by arc-wise frontier propagation.

    Avoids materializing the full reachability closure for one-off
    evaluations with large R.
    """
    active = np.zeros((sk.R, sk.graph.n), dtype=bool)
    active[:, sorted(seeds)] = True
    changed = True
    while changed:
        changed = False
        for a, (u, v) in enumerate(sk.graph.edges):
            upd = active[:, u] & sk.edge_masks[:, a] & ~active[:, v]
            if upd.any():
                active[:, v] |= upd
                changed = True
    return active


def estimate_utilities(sk: SketchSet, seeds: SeedSet, part: CommunityPartition) -> UtilityVector:
    """Sketch-averaged utilities; pure function of (sketches, seeds, part)."""
    for v in seeds.vertices:
        if not (0 <= v < sk.graph.n):
            raise GraphFormatError(f"invalid seed id {v}")
    if isinstance(sk, UndirectedSketchSet):
        counts = sk.evaluator(part).coverage_counts(seeds.vertices)
    else:
        if len(part.labels) != sk.graph.n:
            raise GraphFormatError("community partition does not match sketch graph")
        active = _directed_active_masks(sk, seeds.vertices)
        labels = np.asarray(part.labels, dtype=np.int64)
        counts = np.array(
            [int(active[:, labels == c].sum()) for c in range(part.num_communities)],
            dtype=np.int64,
        )
    values = tuple(
        int(c) / (sk.R * n_c) for c, n_c in zip(counts, part.sizes)
    )
    return UtilityVector(values=values, sizes=part.sizes)


# --- exact oracle -----------------------------------------------------------


def _reachable(adj: list[list[int]], seeds) -> set[int]:
    active = set(seeds)
    stack = list(seeds)
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in active:
                active.add(v)
                stack.append(v)
    return active


def exact_utilities(
    g: Graph,
    seeds: SeedSet,
    part: CommunityPartition,
    limit: int = EXACT_COIN_LIMIT,
) -> UtilityVector:
    """Exact rational utilities by live-edge enumeration.

    Each undirected edge is a single coin (both directions), each
    directed arc its own coin.  Requires at most ``limit`` coins unless
    p is 0 or 1, in which case plain reachability applies at any size.
    """
    for v in seeds.vertices:
        if not (0 <= v < g.n):
            raise GraphFormatError(f"invalid seed id {v}")
    if len(part.labels) != g.n:
        raise GraphFormatError("community partition does not match graph")
    sizes = part.sizes
    if g.p == 0.0 or g.p == 1.0:
        adj = g.out_neighbors() if g.p == 1.0 else [[] for _ in range(g.n)]
        active = _reachable(adj, seeds.vertices)
        counts = [0] * part.num_communities
        for v in active:
            counts[part.labels[v]] += 1
        values = tuple(Fraction(c, n_c) for c, n_c in zip(counts, sizes))
        return UtilityVector(values=values, sizes=sizes)

    m = len(g.edges)
    if m > limit:
        raise EnumerationLimitError(
            f"{m} coins exceed the enumeration limit {limit} with p not in {{0, 1}}"
        )

    # Condense to arc endpoints plus seeds; everything else stays inactive.
    touched = sorted({u for e in g.edges for u in e} | set(seeds.vertices))
    remap = {orig: i for i, orig in enumerate(touched)}
    nv = len(touched)
    src = np.array([remap[u] for u, _ in g.edges], dtype=np.int64)
    dst = np.array([remap[v] for _, v in g.edges], dtype=np.int64)
    bidir = np.zeros(m, dtype=np.bool_) if g.directed else np.ones(m, dtype=np.bool_)
    seed_mask = 0
    for v in seeds.vertices:
        seed_mask |= 1 << remap[v]
    comm = np.array([part.labels[v] for v in touched], dtype=np.int64)
    C = part.num_communities

    if _HAVE_NUMBA and nv <= 62:
        counts_by_k = _enum_counts_numba(src, dst, bidir, seed_mask, comm, nv, C)
    else:
        counts_by_k = _enum_counts_py(src, dst, bidir, seed_mask, comm, nv, C)

    # p originates from a decimal literal; interpret it exactly as such
    # (Fraction(0.35) would be the binary float's rational instead of 7/20).
    p = Fraction(str(g.p))
    values = []
    for c in range(C):
        acc = Fraction(0)
        for k in range(m + 1):
            cnt = int(counts_by_k[k][c])
            if cnt:
                acc += cnt * p**k * (1 - p) ** (m - k)
        values.append(acc / sizes[c])
    return UtilityVector(values=tuple(values), sizes=sizes)


def _enum_counts_py(src, dst, bidir, seed_mask, comm, nv, C):
    m = len(src)
    counts = [[0] * C for _ in range(m + 1)]
    for s in range(1 << m):
        reach = seed_mask
        changed = True
        while changed:
            changed = False
            for a in range(m):
                if (s >> a) & 1:
                    u, v = src[a], dst[a]
                    ru = (reach >> int(u)) & 1
                    rv = (reach >> int(v)) & 1
                    if ru and not rv:
                        reach |= 1 << int(v)
                        changed = True
                    elif bidir[a] and rv and not ru:
                        reach |= 1 << int(u)
                        changed = True
        k = bin(s).count("1")
        row = counts[k]
        for w in range(nv):
            if (reach >> w) & 1:
                row[comm[w]] += 1
    return counts


if _HAVE_NUMBA:

    @numba.njit(cache=True)
    def _enum_counts_numba_impl(src, dst, bidir, seed_mask, comm, nv, C):  # pragma: no cover
        m = src.size
        counts = np.zeros((m + 1, C), dtype=np.int64)
        for s in range(1 << m):
            reach = seed_mask
            changed = True
            while changed:
                changed = False
                for a in range(m):
                    if (s >> a) & 1:
                        u = src[a]
                        v = dst[a]
                        ru = (reach >> u) & 1
                        rv = (reach >> v) & 1
                        if ru == 1 and rv == 0:
                            reach |= 1 << v
                            changed = True
                        elif bidir[a] and rv == 1 and ru == 0:
                            reach |= 1 << u
                            changed = True
            k = 0
            t = s
            while t:
                t &= t - 1
                k += 1
            for w in range(nv):
                if (reach >> w) & 1:
                    counts[k, comm[w]] += 1
        return counts

    def _enum_counts_numba(src, dst, bidir, seed_mask, comm, nv, C):
        return _enum_counts_numba_impl(src, dst, bidir, np.int64(seed_mask), comm, nv, C)
