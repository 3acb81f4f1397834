"""Sparse stochastic block model: parameters, sampling, and PQ spectrum.

SBM(n, p, Q/n) assigns each vertex a community i.i.d. from the prior `p`
and connects each unordered pair {u, v} independently with probability
Q[c_u, c_v] / n. The symmetric special case has uniform prior, intra rate
`a` and inter rate `b`.

Sampling cost is O(n + |E|): within each community block, present pairs
are drawn by geometric gap skipping rather than by scanning all pairs.
Eigenvalues of PQ are computed through the symmetric similarity
P^{1/2} Q P^{1/2}, so a symmetric solver suffices and they are real.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import categorical, make_rng

__all__ = [
    "SbmParams",
    "SymmetricSbm",
    "Spectrum",
    "DegenerateSpectrumError",
    "sample",
    "spectrum",
    "snr_symmetric",
]


class DegenerateSpectrumError(ValueError):
    """Raised when the leading PQ eigenvalue is zero."""


@dataclass(frozen=True)
class SbmParams:
    """Prior `p` (length k, positive, sums to 1) and symmetric nonnegative `Q`."""

    k: int
    p: np.ndarray
    Q: np.ndarray

    def __post_init__(self):
        p = np.ascontiguousarray(self.p, dtype=np.float64)
        Q = np.ascontiguousarray(self.Q, dtype=np.float64)
        object.__setattr__(self, "p", p)
        object.__setattr__(self, "Q", Q)
        if self.k < 2:
            raise ValueError("k must be >= 2")
        if p.shape != (self.k,) or Q.shape != (self.k, self.k):
            raise ValueError("p must be length k and Q k x k")
        if np.any(p <= 0) or abs(p.sum() - 1.0) > 1e-12:
            raise ValueError("p entries must be positive and sum to 1")
        if np.any(Q < 0) or np.abs(Q - Q.T).max() > 1e-12:
            raise ValueError("Q must be symmetric with nonnegative entries")


@dataclass(frozen=True)
class SymmetricSbm:
    """SBM(n, k, a, b): uniform prior, Q_ii = a, Q_ij = b."""

    n: int
    k: int
    a: float
    b: float

    def __post_init__(self):
        if self.k < 2 or self.n < 1:
            raise ValueError("need k >= 2 and n >= 1")
        if self.a < 0 or self.b < 0 or (self.a == 0 and self.b == 0):
            raise ValueError("rates must be nonnegative and not both zero")

    @property
    def d(self) -> float:
        """Expected degree (a + (k-1) b) / k."""
        return (self.a + (self.k - 1) * self.b) / self.k

    def to_params(self) -> SbmParams:
        Q = np.full((self.k, self.k), float(self.b))
        np.fill_diagonal(Q, float(self.a))
        return SbmParams(self.k, np.full(self.k, 1.0 / self.k), Q)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of PQ with distinct-by-value grouping.

    `distinct` holds one representative per eigenvalue group, ordered by
    nonincreasing magnitude (positive first on magnitude ties). `s` is 2
    unless more than two groups exist and |distinct[1]| == |distinct[2]|
    up to the grouping tolerance, in which case 3.
    """

    all_eigs: np.ndarray
    distinct: np.ndarray
    s: int
    snr: float


def sample(params: SbmParams, n: int, seed: int) -> tuple[np.ndarray, Graph]:
    """Draw (labels, graph) from SBM(n, p, Q/n); pure function of its arguments.

    Raises ValueError if any Q_ij / n exceeds 1.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if params.Q.max() > n:
        raise ValueError("Q entries must satisfy Q_ij / n <= 1")
    rng = make_rng(seed)
    sigma = categorical(rng, params.p, n)
    members = [np.flatnonzero(sigma == i) for i in range(params.k)]
    chunks = []
    for i in range(params.k):
        for j in range(i, params.k):
            q = params.Q[i, j] / n
            if q <= 0.0:
                continue
            si = len(members[i])
            if i == j:
                npairs = si * (si - 1) // 2
            else:
                npairs = si * len(members[j])
            if npairs == 0:
                continue
            pos = _bernoulli_positions(rng, npairs, q)
            if len(pos) == 0:
                continue
            if i == j:
                w = ((1.0 + np.sqrt(1.0 + 8.0 * pos)) // 2).astype(np.int64)
                w -= w * (w - 1) // 2 > pos
                w += (w + 1) * w // 2 <= pos
                u = pos - w * (w - 1) // 2
                chunks.append(np.column_stack([members[i][u], members[i][w]]))
            else:
                sj = len(members[j])
                chunks.append(np.column_stack([members[i][pos // sj],
                                               members[j][pos % sj]]))
    edges = np.concatenate(chunks) if chunks else np.zeros((0, 2), dtype=np.int64)
    return sigma, Graph(n, edges)


def _bernoulli_positions(rng, npairs: int, q: float) -> np.ndarray:
    """Positions of successes in `npairs` independent Bernoulli(q) trials.

    Geometric gap skipping: gaps G >= 1 with P(G = g) = q (1-q)^(g-1) are
    drawn in batches and cumulated until the index range is exhausted.
    """
    if q >= 1.0:
        return np.arange(npairs, dtype=np.int64)
    log1mq = math.log1p(-q)
    out = []
    cur = -1
    while cur < npairs:
        expect = (npairs - 1 - cur) * q
        batch = max(64, int(expect * 1.2) + 16)
        u = rng.random(batch)
        gaps = (np.log1p(-u) // log1mq).astype(np.int64) + 1
        steps = cur + np.cumsum(gaps)
        inside = steps < npairs
        out.append(steps[inside])
        if not inside.all():
            break
        cur = int(steps[-1])
    return np.concatenate(out) if out else np.zeros(0, dtype=np.int64)


def spectrum(params: SbmParams, magnitude_tol: float = 1e-9) -> Spectrum:
    """Eigenvalues of PQ, grouped into distinct values, plus SNR = l2^2 / l1.

    PQ is similar to the symmetric P^{1/2} Q P^{1/2}, so the eigenvalues
    are real. Values closer than magnitude_tol * max|eig| are merged into
    one distinct group.
    """
    if magnitude_tol <= 0:
        raise ValueError("magnitude_tol must be positive")
    root = np.sqrt(params.p)
    sym = root[:, None] * params.Q * root[None, :]
    eigs = np.linalg.eigvalsh(sym)
    order = np.lexsort((-eigs, -np.abs(eigs)))
    eigs = eigs[order]
    scale = np.abs(eigs[0])
    if scale == 0.0:
        raise DegenerateSpectrumError("leading eigenvalue of PQ is zero")
    tol = magnitude_tol * scale
    groups = [eigs[0]]
    for lam in eigs[1:]:
        if abs(lam - groups[-1]) > tol:
            groups.append(lam)
    distinct = np.asarray(groups)
    h = len(distinct)
    snr = float(distinct[1] ** 2 / distinct[0]) if h >= 2 else 0.0
    s = 2
    if h > 2 and abs(abs(distinct[1]) - abs(distinct[2])) <= tol:
        s = 3
    return Spectrum(all_eigs=eigs, distinct=distinct, s=s, snr=snr)


def snr_symmetric(k: int, a: float, b: float) -> float:
    """(a-b)^2 / (k (a + (k-1) b))."""
    denom = k * (a + (k - 1) * b)
    if denom == 0:
        raise ZeroDivisionError("a + (k-1) b must be positive")
    return (a - b) ** 2 / denom
