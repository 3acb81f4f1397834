"""Tree / giant-component statistics of sampled graphs.

The asymptotic fractions follow from the conductance-free branching
structure of the sparse model: with tau the small root of t e^{-t} =
d e^{-d}, isolated-tree counts, their edges, the giant size, and the
edges of trees hanging off the giant concentrate on (tau/d)(1 - tau/2),
tau^2/(2d), 1 - tau/d, and (d - tau) e^{-(d - tau)}.

"Planted trees" are measured operationally by iteratively stripping
degree-1 vertices inside the giant; every stripped vertex removes exactly
one edge, so the stripped-edge count equals the hanging-tree edge count
(attachment edges included).
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import connected_components

from .graph import Graph
from .typicality import tau

__all__ = ["TreeStats", "PredictedFractions", "component_stats",
           "predicted_fractions", "tau_j"]


@dataclass(frozen=True)
class TreeStats:
    n: int
    T: int              # number of isolated trees (tree components)
    M: int              # edges inside isolated trees
    giant_size: int     # vertex count of the largest component
    F: int              # stripped edges of the giant (planted-tree edges)
    T_j: np.ndarray     # T_j[j] = isolated j-trees, j = 0..j_max


@dataclass(frozen=True)
class PredictedFractions:
    tree_frac: float          # T/n    -> (tau/d)(1 - tau/2)
    tree_edge_frac: float     # M/n    -> tau^2 / (2d)
    giant_frac: float         # giant size / n -> 1 - tau/d
    planted_edge_frac: float  # F/n    -> (d - tau) e^{-(d - tau)}


def component_stats(g: Graph, j_max: int = 10) -> TreeStats:
    if g.n == 0:
        return TreeStats(0, 0, 0, 0, 0, np.zeros(j_max + 1, dtype=np.int64))
    ncomp, labels = connected_components(g.adjacency_matrix(), directed=False)
    sizes = np.bincount(labels, minlength=ncomp)
    edges = g.edge_array()
    ecounts = np.bincount(labels[edges[:, 0]], minlength=ncomp) if len(edges) \
        else np.zeros(ncomp, dtype=np.int64)
    is_tree = ecounts == sizes - 1
    T = int(is_tree.sum())
    M = int((sizes[is_tree] - 1).sum())
    tree_sizes = sizes[is_tree]
    T_j = np.bincount(np.minimum(tree_sizes, j_max + 1), minlength=j_max + 2)[: j_max + 1]
    giant_label = int(np.argmax(sizes))
    giant_size = int(sizes[giant_label])
    if giant_size < 0.01 * g.n:
        warnings.warn("largest component below 1% of n: no-giant regime",
                      RuntimeWarning, stacklevel=2)
    F = _strip_giant(g, labels, giant_label)
    return TreeStats(n=g.n, T=T, M=M, giant_size=giant_size, F=F, T_j=T_j)


def _strip_giant(g: Graph, labels: np.ndarray, giant_label: int) -> int:
    deg = g.degrees().astype(np.int64)
    giant_verts = np.flatnonzero(labels == giant_label)
    removed = np.zeros(g.n, dtype=bool)
    stack = [int(v) for v in giant_verts if deg[v] == 1]
    stripped = 0
    while stack:
        v = stack.pop()
        if removed[v] or deg[v] != 1:
            continue
        removed[v] = True
        deg[v] = 0
        stripped += 1
        for w in g.neighbors(v):
            if not removed[w]:
                deg[w] -= 1
                if deg[w] == 1:
                    stack.append(int(w))
                break
    return stripped


def tau_j(j: int, d: float) -> float:
    """j^{j-2} (d e^{-d})^j / j!: the limiting isolated-j-tree count over n/d."""
    if j < 1:
        raise ValueError("j must be >= 1")
    lx = math.log(d) - d
    return math.exp((j - 2) * math.log(j) - math.lgamma(j + 1) + j * lx)


def predicted_fractions(a: float, b: float, k: int) -> PredictedFractions:
    d = (a + (k - 1) * b) / k
    if d <= 1.0:
        raise ValueError("predicted fractions require d > 1")
    t = tau(d)
    return PredictedFractions(
        tree_frac=(t / d) * (1.0 - t / 2.0),
        tree_edge_frac=t * t / (2.0 * d),
        giant_frac=1.0 - t / d,
        planted_edge_frac=(d - t) * math.exp(-(d - t)),
    )
