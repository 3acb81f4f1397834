"""Generalized nonbacktracking walk machinery.

An r-nonbacktracking walk is a vertex sequence in which no vertex repeats
within any window of r steps (r = 2 is the classical Hashimoto condition).
This module provides a brute-force walk counter (the oracle for
everything else), the walk operator of order r acting on directed
(r-1)-step paths with an implicit matvec, a power-iteration detector, and
the dense n x n recursion for classical nonbacktracking walk counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from . import _kernels
from .graph import Graph
from .metrics import Partition
from .rng import make_rng, normals

__all__ = [
    "PathBasis",
    "build_path_basis",
    "nb_walk_count",
    "w_r_apply",
    "vertex_scores",
    "power_iteration_detect",
    "sigma_t",
    "closed_walk_profile",
    "tailless_closed_walk_profile",
    "hashimoto_matrix",
]


def nb_walk_count(g: Graph, r: int, m: int, v: int, v_prime: int) -> int:
    """Number of r-nonbacktracking walks of length m from v to v_prime.

    Brute-force DFS; intended for small graphs (|E| <= 1e3, m <= 12).
    """
    if m < 0:
        raise ValueError("m must be >= 0")
    if m == 0:
        return 1 if v == v_prime else 0

    def rec(window: tuple, pos: int, cur: int) -> int:
        if pos == m:
            return 1 if cur == v_prime else 0
        total = 0
        for w in g.neighbors(cur):
            if w not in window:
                total += rec((window + (int(w),))[-r:], pos + 1, int(w))
        return total

    return rec((v,)[-r:], 0, v)


@dataclass
class PathBasis:
    """All directed paths of length r-1 (r distinct, consecutively adjacent
    vertices), enumerated lexicographically; for r = 2 this is the directed
    edge set. `succ_ptr`/`succ_idx` give, per path, the basis indices it
    feeds under the advance-by-one-step operator."""

    r: int
    paths: np.ndarray  # (P, r) int64
    succ_ptr: np.ndarray
    succ_idx: np.ndarray

    @property
    def size(self) -> int:
        return len(self.paths)

    def index_map(self) -> dict[tuple, int]:
        return {tuple(int(v) for v in p): i for i, p in enumerate(self.paths)}


def build_path_basis(g: Graph, r: int) -> PathBasis:
    if r < 2:
        raise ValueError("r must be >= 2")
    if r == 2:
        paths = np.column_stack([g.tails, g.indices])
    else:
        acc: list[tuple] = []
        path: list[int] = []

        def extend():
            if len(path) == r:
                acc.append(tuple(path))
                return
            for w in g.neighbors(path[-1]):
                if w not in path:
                    path.append(int(w))
                    extend()
                    path.pop()

        for v0 in range(g.n):
            path[:] = [v0]
            extend()
        paths = (np.asarray(acc, dtype=np.int64).reshape(-1, r)
                 if acc else np.zeros((0, r), dtype=np.int64))
    index = {tuple(p): i for i, p in enumerate(paths)}
    ptr = np.zeros(len(paths) + 1, dtype=np.int64)
    succ: list[int] = []
    for i, p in enumerate(paths):
        tail = tuple(p[1:])
        pset = set(p.tolist())
        for w in g.neighbors(p[-1]):
            w = int(w)
            if w not in pset:
                succ.append(index[tail + (w,)])
        ptr[i + 1] = len(succ)
    return PathBasis(r=r, paths=paths, succ_ptr=ptr,
                     succ_idx=np.asarray(succ, dtype=np.int64))


def w_r_apply(g: Graph, basis: PathBasis, x: np.ndarray) -> np.ndarray:
    """One application of the order-r walk operator: each path's value is
    scattered to every path obtained by appending a vertex absent from it
    and dropping its first vertex. Never materializes the dense matrix."""
    x = np.asarray(x, dtype=np.float64)
    if len(x) != basis.size:
        raise ValueError("vector length does not match basis")
    if basis.size == 0:
        return x.copy()
    src = np.repeat(np.arange(basis.size), np.diff(basis.succ_ptr))
    return np.bincount(basis.succ_idx, weights=x[src], minlength=basis.size)


def vertex_scores(basis: PathBasis, x: np.ndarray, n: int) -> np.ndarray:
    """Sum path values into their final vertices."""
    if basis.size == 0:
        return np.zeros(n)
    return np.bincount(basis.paths[:, -1], weights=np.asarray(x, float),
                       minlength=n)


def power_iteration_detect(g: Graph, r: int, m: int, m_prime: int,
                           lambda1: float, seed: int) -> Partition:
    """Detection by power iteration: m-1 operator applications from a
    Gaussian start, the last m_prime of them with lambda1 subtracted off
    the diagonal; vertex scores are the incoming path sums, split by sign.

    The vector is rescaled by its norm after every application; scaling by
    positive constants does not change the final sign pattern. A graph with
    no length-(r-1) paths yields the trivial all-in-one-set partition.
    """
    if not m > m_prime >= 0:
        raise ValueError("need m > m_prime >= 0")
    basis = build_path_basis(g, r)
    n = g.n
    if basis.size == 0:
        return Partition(side=np.zeros(n, dtype=np.int8), scores=np.zeros(n))
    x = normals(make_rng(seed), basis.size)
    for step in range(m - 1):
        y = w_r_apply(g, basis, x)
        if step >= m - 1 - m_prime:
            y = y - lambda1 * x
        norm = np.linalg.norm(y)
        if norm == 0.0:
            x = y
            break
        x = y / norm
    scores = vertex_scores(basis, x, n)
    return Partition(side=(scores > 0).astype(np.int8), scores=scores)


def hashimoto_matrix(g: Graph) -> np.ndarray:
    """Dense 2|E| x 2|E| nonbacktracking matrix B[e, f] = 1 iff f feeds e
    (head of f is tail of e, and f is not e reversed). Test-scale helper."""
    nde = g.num_directed_edges
    B = np.zeros((nde, nde), dtype=np.int64)
    for f in range(nde):
        w = g.indices[f]
        for e in range(g.indptr[w], g.indptr[w + 1]):
            if e != g.twin[f]:
                B[e, f] = 1
    return B


def sigma_t(g: Graph, t: int) -> np.ndarray:
    """Dense matrix of classical nonbacktracking walk counts of length t.

    Base cases: identity at t = 0, adjacency at t = 1, and at t = 2 the
    common-neighbor counts with zero diagonal. For t > 2 the recursion
    multiplies by the adjacency and subtracts (degree - 1) times the count
    two steps back. Guarded to n <= 2000 (dense result).
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    if g.n > 2000:
        raise ValueError("sigma_t is dense; n must be <= 2000")
    eye = np.eye(g.n, dtype=np.int64)
    if t == 0:
        return eye
    A = g.adjacency_matrix().toarray().astype(np.int64)
    if t == 1:
        return A
    deg = g.degrees().astype(np.int64)
    prev2 = A
    prev1 = A @ A - np.diag(deg)
    for _ in range(3, t + 1):
        prev1, prev2 = A @ prev1 - (deg - 1)[:, None] * prev2, prev1
    return prev1


def closed_walk_profile(g: Graph, m_max: int, backend=None) -> np.ndarray:
    """Totals over vertices of closed nonbacktracking walks, lengths
    1..m_max (index t-1). Scales to large sparse graphs; agrees with the
    trace of sigma_t."""
    return _kernels.closed_walk_totals(g, m_max, backend=backend)


def tailless_closed_walk_profile(g: Graph, m_max: int, backend=None) -> np.ndarray:
    """Closed walks that are nonbacktracking at the base point as well
    (the trace of the m-th power of the directed-edge walk operator),
    lengths 1..m_max.

    Unlike `closed_walk_profile`, walks that leave along a path, wind a
    cycle, and retrace the path are excluded, so on a graph whose cycles
    are far apart the length-m total is exactly 2m cycles of length m plus
    the windings of cycles whose length divides m. Computed from the
    length-t trace series via

        N_1 = N_2 = 0,   N_m = N_{m-2} + tr(A Sigma^(m-1)) - 2 q_{m-2},

    where q_t is the (degree - 1)-weighted diagonal sum of Sigma^(t); the
    identity follows from the determinant factorization of the edge
    operator (the same one behind the Ihara zeta function).
    """
    m_max = int(m_max)
    if m_max < 1:
        return np.zeros(0, dtype=np.int64)
    _, s_tr, q_tr = _kernels.closed_walk_stats(g, m_max, backend=backend)
    out = np.zeros(m_max, dtype=np.int64)
    for m in range(3, m_max + 1):
        out[m - 1] = out[m - 3] + s_tr[m - 2] - 2 * q_tr[m - 3]
    return out
