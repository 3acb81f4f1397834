"""Detection metrics: two-set margin, permutation agreement, bad clusterings.

All functions are pure. The permutation maximum is exhaustive for k <= 10
(k is a constant in this problem); pass ``greedy=True`` to accept a greedy
assignment beyond that.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import permutations

import numpy as np

__all__ = ["Partition", "detection_margin", "agreement", "bad_set_membership"]

_EXHAUSTIVE_K = 10


@dataclass(frozen=True)
class Partition:
    """Two-set split: side[v] = 1 means v is in S, 0 means S^c."""

    side: np.ndarray
    scores: np.ndarray | None = None


def detection_margin(labels: np.ndarray, part: Partition) -> float:
    """max over community pairs (i, j) of |O_i & S|/|O_i| - |O_j & S|/|O_j|.

    Raises ValueError if some community is empty.
    """
    labels = np.asarray(labels)
    side = np.asarray(part.side)
    if len(labels) != len(side):
        raise ValueError("labels and partition have different lengths")
    k = int(labels.max()) + 1 if len(labels) else 0
    sizes = np.bincount(labels, minlength=k)
    if np.any(sizes == 0):
        raise ValueError("empty community")
    hits = np.bincount(labels, weights=(side == 1).astype(np.float64), minlength=k)
    frac = hits / sizes
    return float(frac.max() - frac.min())


def _confusion(x: np.ndarray, y: np.ndarray, k: int) -> np.ndarray:
    conf = np.zeros((k, k), dtype=np.int64)
    np.add.at(conf, (x, y), 1)
    return conf


def _max_matches(conf: np.ndarray, greedy: bool) -> int:
    k = conf.shape[0]
    if k <= _EXHAUSTIVE_K:
        return max(sum(conf[pi[j], j] for j in range(k)) for pi in permutations(range(k)))
    if not greedy:
        raise ValueError(f"exhaustive permutation search limited to k <= {_EXHAUSTIVE_K}; "
                         "pass greedy=True")
    work = conf.astype(np.float64).copy()
    total = 0
    for _ in range(k):
        i, j = np.unravel_index(np.argmax(work), work.shape)
        total += int(conf[i, j])
        work[i, :] = -1
        work[:, j] = -1
    return total


def _infer_k(x: np.ndarray, y: np.ndarray, k: int | None) -> int:
    if k is None:
        k = max(int(max(x.max(), y.max())) + 1, 2)
    return k


def agreement(x: np.ndarray, y: np.ndarray, k: int | None = None,
              greedy: bool = False) -> float:
    """A(x, y) = max over label permutations of the fraction of matches."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    k = _infer_k(x, y, k)
    return _max_matches(_confusion(x, y, k), greedy) / len(x)


def bad_set_membership(x: np.ndarray, y: np.ndarray, eps: float,
                       k: int | None = None, greedy: bool = False) -> bool:
    """Whether y lies in the bad set of x: min-permutation Hamming distance
    exceeds (1 - 1/k - eps) n."""
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    if x.shape != y.shape:
        raise ValueError("length mismatch")
    n = len(x)
    k = _infer_k(x, y, k)
    d_star = n - _max_matches(_confusion(x, y, k), greedy)
    return d_star / n > 1.0 - 1.0 / k - eps
