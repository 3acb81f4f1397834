"""Typical-set sampling and closed-form threshold quantities.

The typical set of a graph holds the balanced labelings whose intra- and
inter-community edge counts sit within a (1 +/- delta) band of their model
expectations. Sampling uniformly from it detects communities in a region
that extends below the efficient (spectral) threshold; this module
evaluates that region exactly and enumerates the set at tiny n.

Conventions: 0 ln 0 = 0 throughout, so the a = 0 and b = 0 formulas are
well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .graph import Graph
from .rng import make_rng

__all__ = [
    "TypicalityParams",
    "ThresholdReport",
    "EmptyTypicalSetError",
    "tau",
    "tau_series",
    "is_typical",
    "TypicalSet",
    "enumerate_typical",
    "sample_typical",
    "bad_atypicality_exponent",
    "union_bound_holds",
    "it_bound_holds",
    "threshold_report",
    "psi",
    "giant_bound_exponent",
    "binomial_exponent",
    "encode_labeling",
    "decode_labeling",
]

_MAX_ENUM = 2 ** 24


class EmptyTypicalSetError(ValueError):
    pass


def _xlnx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def tau(d: float, tol: float = 1e-12) -> float:
    """Unique root in (0, 1) of t e^{-t} = d e^{-d}, for d > 1, by bisection.

    t e^{-t} is increasing on (0, 1), so the residual is monotone; the
    returned value has |residual| < tol.
    """
    if d <= 1.0:
        raise ValueError("tau is defined for d > 1")
    target = d * math.exp(-d)
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        res = mid * math.exp(-mid) - target
        if abs(res) < tol:
            return mid
        if res < 0.0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def tau_series(d: float, terms: int = 200) -> float:
    """Series form sum_j j^{j-1}/j! (d e^{-d})^j, truncated."""
    if d <= 1.0:
        raise ValueError("tau is defined for d > 1")
    lx = math.log(d) - d
    total = 0.0
    for j in range(1, terms + 1):
        total += math.exp((j - 1) * math.log(j) - math.lgamma(j + 1) + j * lx)
    return total


@dataclass(frozen=True)
class TypicalityParams:
    """Slack delta plus the model rates; a < b flips the two edge-count
    inequalities (and swaps which side the slack loosens, so the planted
    labeling stays typical with high probability). `bal_tol` overrides the
    balance tolerance (default delta; ln(n)/sqrt(n) is the usual
    alternative)."""

    delta: float
    a: float
    b: float
    k: int
    bal_tol: float | None = None

    def __post_init__(self):
        if self.delta <= 0:
            raise ValueError("delta must be positive")
        if self.bal_tol is not None and self.bal_tol <= 0:
            raise ValueError("bal_tol must be positive")
        if self.k < 2:
            raise ValueError("k must be >= 2")

    def balance_tolerance(self) -> float:
        return self.delta if self.bal_tol is None else self.bal_tol


def _edge_counts(x: np.ndarray, g: Graph) -> tuple[int, int]:
    edges = g.edge_array()
    if len(edges) == 0:
        return 0, 0
    same = int(np.count_nonzero(x[edges[:, 0]] == x[edges[:, 1]]))
    return same, g.num_edges - same


def is_typical(x: np.ndarray, g: Graph, p: TypicalityParams) -> bool:
    x = np.asarray(x, dtype=np.int64)
    n = g.n
    counts = np.bincount(x, minlength=p.k)
    if len(counts) > p.k:
        raise ValueError("label out of range")
    bal = p.balance_tolerance()
    frac = counts / n
    if np.any(frac < 1.0 / p.k - bal - 1e-12):
        return False
    if np.any(frac > 1.0 / p.k + bal + 1e-12):
        return False
    intra, inter = _edge_counts(x, g)
    intra_base = p.a * n / (2.0 * p.k)
    inter_base = p.b * n * (p.k - 1) / (2.0 * p.k)
    if p.a >= p.b:
        return (intra >= intra_base * (1.0 - p.delta)
                and inter <= inter_base * (1.0 + p.delta))
    return (intra <= intra_base * (1.0 + p.delta)
            and inter >= inter_base * (1.0 - p.delta))


def encode_labeling(x: np.ndarray, k: int) -> int:
    """Base-k code with vertex 0 as the most significant digit, so numeric
    order on codes is lexicographic order on labelings."""
    code = 0
    for c in np.asarray(x).ravel():
        code = code * k + int(c)
    return code


def decode_labeling(code: int, n: int, k: int) -> np.ndarray:
    out = np.empty(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        out[i] = code % k
        code //= k
    return out


def _is_canonical(x: np.ndarray) -> bool:
    seen = -1
    for c in x:
        if c > seen + 1:
            return False
        seen = max(seen, int(c))
    return True


@dataclass
class TypicalSet:
    """Exact enumeration result: sorted codes of the typical labelings."""

    n: int
    k: int
    codes: np.ndarray

    @property
    def count(self) -> int:
        return len(self.codes)

    def __iter__(self):
        for code in self.codes:
            yield decode_labeling(int(code), self.n, self.k)

    def labeling(self, i: int) -> np.ndarray:
        return decode_labeling(int(self.codes[i]), self.n, self.k)


def enumerate_typical(g: Graph, p: TypicalityParams,
                      canonical: bool = False) -> TypicalSet:
    """Exhaustive scan of all k^n labelings (guarded to k^n <= 2^24),
    keeping the typical ones in lexicographic order. With `canonical`,
    labelings are quotiented by global label permutation (first
    occurrences must appear in increasing label order)."""
    n, k = g.n, p.k
    total = k ** n
    if total > _MAX_ENUM:
        raise ValueError(f"k^n = {total} exceeds enumeration guard {_MAX_ENUM}")
    edges = g.edge_array()
    num_edges = len(edges)
    powers = (k ** np.arange(n - 1, -1, -1, dtype=np.int64))
    bal = p.balance_tolerance()
    lo_frac = 1.0 / k - bal - 1e-12
    hi_frac = 1.0 / k + bal + 1e-12
    intra_base = p.a * n / (2.0 * k)
    inter_base = p.b * n * (k - 1) / (2.0 * k)
    keep: list[np.ndarray] = []
    chunk = 1 << 16
    for start in range(0, total, chunk):
        codes = np.arange(start, min(total, start + chunk), dtype=np.int64)
        digits = (codes[:, None] // powers[None, :]) % k
        ok = np.ones(len(codes), dtype=bool)
        for c in range(k):
            frac = np.count_nonzero(digits == c, axis=1) / n
            ok &= (frac >= lo_frac) & (frac <= hi_frac)
        if num_edges:
            intra = np.count_nonzero(
                digits[:, edges[:, 0]] == digits[:, edges[:, 1]], axis=1)
            inter = num_edges - intra
        else:
            intra = np.zeros(len(codes), dtype=np.int64)
            inter = intra
        if p.a >= p.b:
            ok &= (intra >= intra_base * (1.0 - p.delta))
            ok &= (inter <= inter_base * (1.0 + p.delta))
        else:
            ok &= (intra <= intra_base * (1.0 + p.delta))
            ok &= (inter >= inter_base * (1.0 - p.delta))
        keep.append(codes[ok])
    codes = np.concatenate(keep) if keep else np.zeros(0, dtype=np.int64)
    if canonical:
        mask = np.fromiter((_is_canonical(decode_labeling(int(c), n, k))
                            for c in codes), dtype=bool, count=len(codes))
        codes = codes[mask]
    return TypicalSet(n=n, k=k, codes=codes)


def sample_typical(g: Graph, p: TypicalityParams, seed: int) -> np.ndarray:
    """Uniform draw from the enumerated typical set; deterministic per seed."""
    ts = enumerate_typical(g, p)
    if ts.count == 0:
        raise EmptyTypicalSetError("typical set is empty")
    j = int(make_rng(seed).integers(ts.count))
    return ts.labeling(j)


# ---------------------------------------------------------------------------
# closed-form threshold quantities
# ---------------------------------------------------------------------------

def bad_atypicality_exponent(a: float, b: float, k: int) -> float:
    """Exponent A(0,0): P(bad clustering typical) ~ exp(-n A / k)."""
    kd = a + (k - 1) * b
    first = 0.0 if kd == 0 else (kd / 2.0) * math.log(k / kd)
    return first + 0.5 * _xlnx(a) + 0.5 * (k - 1) * _xlnx(b)


def _lhs(a: float, b: float, k: int) -> float:
    d = (a + (k - 1) * b) / k
    return (_xlnx(a) + (k - 1) * _xlnx(b)) / k - _xlnx(d)


def union_bound_holds(a: float, b: float, k: int) -> bool:
    """No bad clustering is typical whp: lhs/(2 ln k) > 1."""
    return _lhs(a, b, k) / (2.0 * math.log(k)) > 1.0


def giant_bound_exponent(a: float, b: float, k: int) -> float:
    """e^{-a/k} (1 - (1 - e^{-b/k})^{k-1}): rate of free vertices whose
    relabeling keeps typicality, hence a typical-set size lower bound."""
    return math.exp(-a / k) * (1.0 - (1.0 - math.exp(-b / k)) ** (k - 1))


def psi(a: float, b: float, k: int) -> float:
    """Typical-set size exponent (base k) from the tree topology bound."""
    d = (a + (k - 1) * b) / k
    if d <= 1.0:
        raise ValueError("psi is defined for d > 1")
    t = tau(d)
    kd = a + (k - 1) * b
    pa = a / kd
    pb = (k - 1) * b / kd
    bracket = 0.0
    if pa > 0:
        bracket += pa * math.log(kd / a)
    if pb > 0:
        bracket += pb * math.log(kd / b)
    trees = (t / d) * (1.0 - t / 2.0)
    mass = t * t / (2.0 * d) + (d - t) * math.exp(-(d - t))
    return trees + bracket * mass / math.log(k)


def binomial_exponent(s: float, t: float) -> float:
    """Rate s - t + t ln(t/s) of P(Bin(N^2, s/N) = floor(tN)) in N."""
    if s <= 0:
        raise ValueError("s must be positive")
    if t < 0:
        raise ValueError("t must be >= 0")
    if t == 0:
        return s
    return s - t + t * math.log(t / s)


@dataclass(frozen=True)
class ThresholdReport:
    """All threshold quantities for one (k, a, b); tau-dependent fields are
    None when d <= 1."""

    k: int
    a: float
    b: float
    d: float
    snr: float
    ks_holds: bool
    union_bound_holds: bool
    it_bound_holds: bool
    tau: float | None
    f: float | None
    lhs: float
    rhs_f_branch: float | None
    rhs_giant_branch: float
    psi: float | None
    giant_exponent: float
    a0: float


def threshold_report(k: int, a: float, b: float) -> ThresholdReport:
    d = (a + (k - 1) * b) / k
    snr = (a - b) ** 2 / (k * (a + (k - 1) * b)) if a + (k - 1) * b > 0 else math.inf
    lhs = _lhs(a, b, k)
    giant_exp = giant_bound_exponent(a, b, k)
    rhs_giant = 2.0 * math.log(k) - 2.0 * math.log(2.0) * giant_exp
    ub = union_bound_holds(a, b, k)
    if d > 1.0:
        t = tau(d)
        f = (1.0 - t) / (1.0 - t / d)
        rhs_f = f * 2.0 * math.log(k)
        it = lhs > min(rhs_f, rhs_giant)
        psi_val = psi(a, b, k)
    else:
        t = f = rhs_f = psi_val = None
        it = False
    return ThresholdReport(
        k=k, a=a, b=b, d=d, snr=snr, ks_holds=snr > 1.0,
        union_bound_holds=ub, it_bound_holds=it, tau=t, f=f, lhs=lhs,
        rhs_f_branch=rhs_f, rhs_giant_branch=rhs_giant, psi=psi_val,
        giant_exponent=giant_exp, a0=bad_atypicality_exponent(a, b, k))


def it_bound_holds(a: float, b: float, k: int) -> bool:
    """Whether the typical-set sampler provably detects at (k, a, b).

    Requires d > 1 (otherwise there is no giant and the bound is vacuous).
    """
    d = (a + (k - 1) * b) / k
    if d <= 1.0:
        raise ValueError("the bound requires d > 1")
    return threshold_report(k, a, b).it_bound_holds
