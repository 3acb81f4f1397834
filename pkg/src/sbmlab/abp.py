"""Acyclic belief propagation: linearized message passing with short-cycle
compensation and dominant-eigenvalue cancellation.

Messages live on directed edges in travel order: the value on u->w is the
belief arriving at w from u. ``abp_star`` is the simplified symmetric
variant (per-step mean subtraction over all directed edges, sign split of
the final vertex sums). ``abp_full`` is the general variant: an edge subset
is split off up front, propagation runs without mean subtraction, the
per-vertex history matrix is multiplied by powers of bidiagonal
cancellation matrices (one per large eigenvalue), scores flow back through
the split edges, are aggregated at an exact BFS depth, and vertices are
assigned with a linearly ramped randomized rule.

With the default order r = 2 there are no short cycles to index and the
propagation is plain nonbacktracking message passing. For r >= 3, every
simple cycle of length r' <= r through consecutive vertices (v''', v, v')
adds a correction on the edge v'->v: at step t it removes the walks that
sat at v at step t - r' and wound around the cycle (at t == r', the single
wrapped walk carries the initial value of the edge v->v''').

Each propagation step is a map over directed edges reading only earlier
steps, so steps could be parallelized internally with a barrier between
them; this implementation is single-threaded with fixed reduction orders,
so results are reproducible (see _kernels).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph
from .metrics import Partition
from .rng import make_rng, normals

__all__ = [
    "AbpConfig",
    "ShortCycleIndex",
    "NonFiniteMessageError",
    "find_short_cycles",
    "abp_star",
    "abp_star_vanilla",
    "abp_full",
    "compensate",
    "aggregate_depth",
    "default_num_iterations",
    "propagate_messages",
]


class NonFiniteMessageError(FloatingPointError):
    """Propagation produced a NaN/inf message; carries the iteration index."""

    def __init__(self, iteration: int):
        super().__init__(f"non-finite message value at iteration {iteration}")
        self.iteration = iteration


@dataclass
class AbpConfig:
    """Knobs shared by the ABP variants.

    `m` defaults to ceil(2 ln n / ln SNR) + 4 when an SNR is available
    (from `snr_hint` or, in abp_full, from the supplied eigenvalues) and
    to 2 ceil(ln n) + 4 otherwise. `gamma` defaults, in abp_full, to
    (1 - l1/l2^2) / 2.
    """

    m: int | None = None
    r: int = 2
    c: float = 1.0
    gamma: float | None = None
    seed: int = 0
    snr_hint: float | None = None

    def __post_init__(self):
        if self.m is not None and self.m < 2:
            raise ValueError("m must be >= 2")
        if self.r < 2:
            raise ValueError("r must be >= 2")
        if self.c <= 0:
            raise ValueError("c must be positive")
        if self.gamma is not None and not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")


def default_num_iterations(n: int, snr: float | None) -> int:
    if snr is not None and snr > 1.0:
        return math.ceil(2.0 * math.log(n) / math.log(snr)) + 4
    return 2 * math.ceil(math.log(max(n, 2))) + 4


# ---------------------------------------------------------------------------
# short cycles
# ---------------------------------------------------------------------------

@dataclass
class ShortCycleIndex:
    """Per-directed-edge cycle records driving the propagation corrections.

    Parallel arrays: record i corrects directed edge ``edge[i]`` (travel
    v'->v), for a cycle of length ``rprime[i]`` whose other neighbor of v
    is the tail of ``third[i]`` (the directed edge v'''->v); ``count[i]``
    is the number of such cycles, so edges on several short cycles get one
    correction per cycle.
    """

    r: int
    edge: np.ndarray
    rprime: np.ndarray
    third: np.ndarray
    count: np.ndarray
    multi_cycle: np.ndarray  # bool per undirected edge: lies on >= 2 short cycles

    def records_for(self, g: Graph, v: int, v_from: int) -> list[tuple[int, int]]:
        """(r', v''') records for the message into v from v_from."""
        e = g.directed_edge_index(v_from, v)
        out = []
        for i in np.flatnonzero(self.edge == e):
            out.append((int(self.rprime[i]), int(g.tails[self.third[i]])))
        return out

    @property
    def num_records(self) -> int:
        return len(self.edge)


def _empty_cycle_index(g: Graph, r: int) -> ShortCycleIndex:
    z = np.zeros(0, dtype=np.int64)
    return ShortCycleIndex(r, z, z, z.copy(), z.copy(),
                           np.zeros(g.num_edges, dtype=bool))


def find_short_cycles(g: Graph, r: int) -> ShortCycleIndex:
    """Index all simple cycles of length <= r.

    For r = 2 the index is empty by definition (simple graphs have no
    cycles of length <= 2).
    """
    if r < 2:
        raise ValueError("r must be >= 2")
    if r == 2:
        return _empty_cycle_index(g, r)
    cycles = _simple_cycles_upto(g, r)
    if not cycles:
        return _empty_cycle_index(g, r)
    records: dict[tuple[int, int, int], int] = {}
    edge_cycles = np.zeros(g.num_edges, dtype=np.int64)
    for cyc in cycles:
        rp = len(cyc)
        for i in range(rp):
            v = cyc[i]
            nxt = cyc[(i + 1) % rp]
            prv = cyc[(i - 1) % rp]
            e_from_next = g.directed_edge_index(nxt, v)
            e_from_prev = g.directed_edge_index(prv, v)
            for e, e3 in ((e_from_next, e_from_prev), (e_from_prev, e_from_next)):
                key = (e, rp, e3)
                records[key] = records.get(key, 0) + 1
            edge_cycles[g.undirected_id[e_from_next]] += 1
    keys = sorted(records)
    edge = np.array([k[0] for k in keys], dtype=np.int64)
    rprime = np.array([k[1] for k in keys], dtype=np.int64)
    third = np.array([k[2] for k in keys], dtype=np.int64)
    count = np.array([records[k] for k in keys], dtype=np.int64)
    multi = edge_cycles >= 2
    return ShortCycleIndex(r, edge, rprime, third, count, multi)


def _simple_cycles_upto(g: Graph, r: int) -> list[tuple[int, ...]]:
    """Canonical simple cycles of length 3..r: rooted at their minimum
    vertex, second vertex smaller than the last."""
    out: list[tuple[int, ...]] = []
    path: list[int] = []

    def dfs(v0: int):
        last = path[-1]
        if len(path) >= 3 and g.has_edge(last, v0) and path[1] < last:
            out.append(tuple(path))
        if len(path) == r:
            return
        for w in g.neighbors(last):
            if w > v0 and w not in path:
                path.append(int(w))
                dfs(v0)
                path.pop()

    for v0 in range(g.n):
        path[:] = [v0]
        dfs(v0)
    return out


# ---------------------------------------------------------------------------
# propagation wrappers
# ---------------------------------------------------------------------------

def propagate_messages(g: Graph, init: np.ndarray, m: int, *,
                       mean_subtract: bool, r: int = 2,
                       cycles: ShortCycleIndex | None = None,
                       store_stream: bool = False, backend=None):
    """Low-level propagation; returns (Y, stream) and raises on non-finite."""
    if g.num_directed_edges == 0:
        Y = np.zeros((g.n, m))
        return Y, np.zeros((m, 0))
    if cycles is None:
        cycles = find_short_cycles(g, r)
    corr = (cycles.edge, cycles.rprime, cycles.third, cycles.count)
    Y, stream, bad_t = _kernels.propagate(
        g, init, m, mean_subtract, corrections=corr, ring_depth=max(2, r),
        store_stream=store_stream, backend=backend)
    if bad_t >= 0:
        raise NonFiniteMessageError(bad_t)
    return Y, stream


def abp_star(g: Graph, cfg: AbpConfig, backend=None) -> Partition:
    """Simplified ABP: Gaussian edge init, mean-subtracted nonbacktracking
    propagation with cycle corrections, sign split of the final vertex sums.

    Ties (score exactly 0) go to the complement set.
    """
    m = cfg.m if cfg.m is not None else default_num_iterations(g.n, cfg.snr_hint)
    if g.num_directed_edges == 0:
        z = np.zeros(g.n)
        return Partition(side=np.zeros(g.n, dtype=np.int8), scores=z)
    rng = make_rng(cfg.seed)
    init = normals(rng, g.num_directed_edges)
    Y, _ = propagate_messages(g, init, m, mean_subtract=True, r=cfg.r,
                              backend=backend)
    scores = Y[:, m - 1]
    return Partition(side=(scores > 0).astype(np.int8), scores=scores)


def abp_star_vanilla(g: Graph, cfg: AbpConfig, lambda1: float,
                     m_prime: int | None = None, backend=None) -> Partition:
    """Retroactive-compensation variant: propagate with no mean subtraction,
    then cancel the dominant eigenvalue by m' bidiagonal applications.

    The default m' is ceil(m ln(l1^2/l2^2) / ln n) + 1, which needs an SNR
    hint (l2^2/l1) on the config; pass m_prime to bypass it.
    """
    m = cfg.m if cfg.m is not None else default_num_iterations(g.n, cfg.snr_hint)
    if m_prime is None:
        if cfg.snr_hint is None or not 0 < cfg.snr_hint:
            raise ValueError("m_prime not given and no snr_hint to derive it")
        # l1^2 / l2^2 = l1 / (snr) with snr = l2^2 / l1
        ratio = lambda1 / cfg.snr_hint
        m_prime = math.ceil(m * math.log(ratio) / math.log(max(g.n, 2))) + 1
    m_prime = max(0, min(int(m_prime), m - 1))
    if g.num_directed_edges == 0:
        z = np.zeros(g.n)
        return Partition(side=np.zeros(g.n, dtype=np.int8), scores=z)
    rng = make_rng(cfg.seed)
    init = normals(rng, g.num_directed_edges)
    Y, _ = propagate_messages(g, init, m, mean_subtract=False, r=cfg.r,
                              backend=backend)
    scores = compensate(Y, [lambda1], [m_prime])
    return Partition(side=(scores > 0).astype(np.int8), scores=scores)


def compensate(Y: np.ndarray, lambdas, exponents) -> np.ndarray:
    """Apply Y (prod_j M_j^{q_j}) e_m where M_j is the m x m bidiagonal
    matrix with unit diagonal and -lambdas[j] on the superdiagonal.

    The product vector is formed first (cost O(m sum q)), then one pass
    over Y. A single lambda with exponent q is the q-fold finite difference
    y_t -> y_t - lambda y_{t-1} applied to the trailing columns.
    """
    Y = np.asarray(Y, dtype=np.float64)
    m = Y.shape[1]
    exponents = [int(q) for q in exponents]
    if any(q < 0 for q in exponents):
        raise ValueError("exponents must be >= 0")
    if sum(exponents) >= m:
        raise ValueError("exponents exceed available columns")
    w = np.zeros(m)
    w[m - 1] = 1.0
    for lam, q in zip(lambdas, exponents, strict=True):
        for _ in range(q):
            w[:-1] -= lam * w[1:]
    return Y @ w


def aggregate_depth(g: Graph, y_prime: np.ndarray, depth: int,
                    backend=None) -> np.ndarray:
    """out[v] = sum of y_prime over vertices at BFS distance exactly `depth`."""
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return _kernels.exact_depth_sums(g, y_prime, depth, backend=backend)


# ---------------------------------------------------------------------------
# full ABP
# ---------------------------------------------------------------------------

def _aggregation_depth(n: int) -> int:
    if n < 16:
        return 1
    return max(1, int(math.sqrt(math.log(math.log(n)))))


def abp_full(g: Graph, cfg: AbpConfig, distinct_eigs,
             return_details: bool = False, backend=None):
    """General ABP driven by the distinct PQ eigenvalues (nonincreasing
    magnitude). Returns a Partition; with return_details, also a dict of
    intermediates (gamma, exponents, y_m, y_prime, y_dprime).

    When the split set is empty (gamma 0 or no edge selected) the
    compensated vertex scores feed the assignment directly, matching the
    variant without an edge split.
    """
    eigs = np.asarray(distinct_eigs, dtype=np.float64)
    if eigs.ndim != 1 or len(eigs) < 2:
        raise ValueError("need at least two distinct eigenvalues")
    mags = np.abs(eigs)
    if np.any(mags[1:] > mags[:-1] + 1e-12):
        raise ValueError("eigenvalues must be ordered by nonincreasing magnitude")
    lam1, lam2 = eigs[0], eigs[1]
    h = len(eigs)
    s = 2
    if h > 2 and abs(mags[1] - mags[2]) <= 1e-9 * max(mags[0], 1.0):
        s = 3
    snr = lam2 ** 2 / lam1 if lam1 != 0 else 0.0
    if snr <= 1.0:
        warnings.warn("lambda_2^2 <= lambda_1: below threshold, output is "
                      "likely uninformative", RuntimeWarning, stacklevel=2)
    gamma = cfg.gamma
    if gamma is None:
        gamma = (1.0 - lam1 / lam2 ** 2) / 2.0 if lam2 != 0 else 0.0
        gamma = min(max(gamma, 0.0), 0.5)
    r = cfg.r
    arg2 = 2.0 * (2 * r + 1) * (s - 1)
    base = (1.0 - gamma) * abs(eigs[s - 1])
    if base > 1.0:
        ell = max((s - 1) / math.log(base) + (s - 1), arg2)
    else:
        warnings.warn("(1-gamma) |lambda_s| <= 1: falling back to the "
                      "combinatorial lower bound for l", RuntimeWarning,
                      stacklevel=2)
        ell = arg2
    m = cfg.m if cfg.m is not None else default_num_iterations(g.n, cfg.snr_hint or snr)

    rng = make_rng(cfg.seed)
    edges = g.edge_array()
    in_split = rng.random(len(edges)) < gamma
    split_edges = edges[in_split]
    g_prop = Graph(g.n, edges[~in_split])

    x = normals(rng, g.n)
    if g_prop.num_directed_edges:
        init = x[g_prop.tails]
        Y, _ = propagate_messages(g_prop, init, m, mean_subtract=False, r=r,
                                  backend=backend)
        exponents = [max(0, math.ceil((m - r - (2 * r + 1) * sp) / ell))
                     for sp in range(1, s)]
        y_m = compensate(Y, (1.0 - gamma) * eigs[: s - 1], exponents)
    else:
        exponents = [0] * (s - 1)
        y_m = np.zeros(g.n)

    if len(split_edges):
        y_prime = np.zeros(g.n)
        np.add.at(y_prime, split_edges[:, 0], y_m[split_edges[:, 1]])
        np.add.at(y_prime, split_edges[:, 1], y_m[split_edges[:, 0]])
    else:
        y_prime = y_m.copy()

    depth = _aggregation_depth(g.n)
    y_dprime = aggregate_depth(g_prop, y_prime, depth, backend=backend)

    rms = math.sqrt(float(np.mean(y_dprime ** 2)))
    c_prime = cfg.c * rms
    if c_prime > 0:
        prob_s2 = np.clip(0.5 + y_dprime / (2.0 * c_prime), 0.0, 1.0)
    else:
        prob_s2 = np.full(g.n, 0.5)
    side = (rng.random(g.n) < prob_s2).astype(np.int8)
    part = Partition(side=side, scores=y_dprime)
    if return_details:
        return part, {
            "s": s,
            "gamma": gamma,
            "l": ell,
            "m": m,
            "exponents": exponents,
            "split_edges": split_edges,
            "y_m": y_m,
            "y_prime": y_prime,
            "y_dprime": y_dprime,
            "depth": depth,
        }
    return part
