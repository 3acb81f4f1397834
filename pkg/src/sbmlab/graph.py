"""Immutable sparse undirected simple graph with directed-edge indexing.

The graph is stored in CSR form. Directed edge `e` runs from ``tails[e]``
to ``heads[e]``; edges are enumerated lexicographically by (tail, head),
which is the CSR order since neighbor lists are sorted. ``twin[e]`` is the
index of the reversed edge, and ``twin[twin[e]] == e``. The undirected edge
behind `e` is ``undirected_id[e] == undirected_id[twin[e]]``.

Instances are frozen after construction and safe for concurrent reads.
"""

from __future__ import annotations

import numpy as np

__all__ = [
    "Graph",
    "read_edgelist",
    "write_edgelist",
    "read_labels",
    "write_labels",
]


class Graph:
    __slots__ = ("n", "indptr", "indices", "tails", "twin", "undirected_id", "_frozen")

    def __init__(self, n: int, edges: np.ndarray):
        """Build from an (E, 2) array of undirected edges (any orientation).

        Rejects self-loops and parallel edges.
        """
        n = int(n)
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= n):
            raise ValueError("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise ValueError("self-loops are not allowed")
        u = np.minimum(edges[:, 0], edges[:, 1])
        v = np.maximum(edges[:, 0], edges[:, 1])
        key = u * n + v
        if len(np.unique(key)) != len(key):
            raise ValueError("parallel edges are not allowed")

        tails = np.concatenate([u, v])
        heads = np.concatenate([v, u])
        order = np.lexsort((heads, tails))
        tails = tails[order]
        heads = heads[order]
        self.n = n
        self.indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self.indptr, tails + 1, 1)
        np.cumsum(self.indptr, out=self.indptr)
        self.indices = heads
        self.tails = tails
        # twin lookup: position of (head, tail) among edges sorted by (tail, head)
        rev_key = heads * n + tails
        fwd_key = tails * n + heads
        self.twin = np.searchsorted(fwd_key, rev_key).astype(np.int64)
        first = np.minimum(np.arange(len(tails), dtype=np.int64), self.twin)
        self.undirected_id = np.searchsorted(np.unique(first), first).astype(np.int64)
        self._frozen = True

    def __setattr__(self, name, value):
        if getattr(self, "_frozen", False):
            raise AttributeError("Graph is immutable")
        object.__setattr__(self, name, value)

    @property
    def num_edges(self) -> int:
        return len(self.indices) // 2

    @property
    def num_directed_edges(self) -> int:
        return len(self.indices)

    def degrees(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def edge_array(self) -> np.ndarray:
        """(E, 2) array with u < v, sorted lexicographically."""
        mask = self.tails < self.indices
        return np.column_stack([self.tails[mask], self.indices[mask]])

    def directed_edge_index(self, u: int, w: int) -> int:
        """Index of directed edge u->w; raises KeyError if absent."""
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = lo + np.searchsorted(self.indices[lo:hi], w)
        if pos >= hi or self.indices[pos] != w:
            raise KeyError(f"no edge {u}->{w}")
        return int(pos)

    def has_edge(self, u: int, w: int) -> bool:
        lo, hi = self.indptr[u], self.indptr[u + 1]
        pos = np.searchsorted(self.indices[lo:hi], w)
        return pos < hi - lo and self.indices[lo + pos] == w

    def adjacency_matrix(self):
        """CSR scipy matrix (0/1)."""
        from scipy.sparse import csr_matrix

        data = np.ones(len(self.indices), dtype=np.int64)
        return csr_matrix((data, self.indices, self.indptr), shape=(self.n, self.n))

    def __repr__(self):
        return f"Graph(n={self.n}, edges={self.num_edges})"


def write_edgelist(g: Graph, path) -> None:
    """One "u v" pair per line, u < v, lexicographically sorted, LF endings."""
    edges = g.edge_array()
    with open(path, "w", newline="\n") as fh:
        for u, v in edges:
            fh.write(f"{u} {v}\n")


def read_edgelist(path, n: int | None = None) -> Graph:
    """Read the edge-list format written by `write_edgelist`.

    If `n` is not given, it is inferred as max vertex id + 1.
    """
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            a, b = line.split()
            rows.append((int(a), int(b)))
    edges = np.asarray(rows, dtype=np.int64).reshape(-1, 2)
    if n is None:
        n = int(edges.max()) + 1 if len(edges) else 0
    return Graph(n, edges)


def write_labels(labels: np.ndarray, path) -> None:
    """One decimal community id per line; line i is vertex i."""
    with open(path, "w", newline="\n") as fh:
        for c in np.asarray(labels).ravel():
            fh.write(f"{int(c)}\n")


def read_labels(path) -> np.ndarray:
    with open(path) as fh:
        vals = [int(line.strip()) for line in fh if line.strip()]
    return np.asarray(vals, dtype=np.int64)
