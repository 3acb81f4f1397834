"""Hot numeric kernels: numba-jitted loops with a pure-numpy fallback.

Backend selection: the environment variable ``SBMLAB_BACKEND`` may be set
to ``numba`` or ``numpy``; unset means numba when importable. Each public
dispatcher also takes a ``backend=`` override so benchmarks can compare
both in one process.

All kernels are single-threaded and use fixed summation orders (sequential
loops under numba, numpy's pairwise/bincount reductions otherwise), so a
given backend is bit-deterministic. The two backends agree to float
round-off; integer kernels agree exactly.

Kernels:
  - ``propagate``: directed-edge belief propagation with optional per-step
    mean subtraction and short-cycle corrections; returns the n x m matrix
    of per-vertex incoming sums and optionally the full message stream.
  - ``closed_walk_totals``: total closed nonbacktracking walk counts per
    length, via a depth-limited per-vertex edge DP.
  - ``exact_depth_sums``: per-vertex sum of a vector over vertices at an
    exact BFS distance.
"""

from __future__ import annotations

import os

import numpy as np

__all__ = [
    "HAVE_NUMBA",
    "active_backend",
    "propagate",
    "closed_walk_stats",
    "closed_walk_totals",
    "exact_depth_sums",
]

_ENV_BACKEND = os.environ.get("SBMLAB_BACKEND", "").strip().lower()
if _ENV_BACKEND not in ("", "numba", "numpy"):
    raise RuntimeError(f"SBMLAB_BACKEND must be 'numba' or 'numpy', got {_ENV_BACKEND!r}")

try:
    if _ENV_BACKEND == "numpy":
        raise ImportError  # skip the import cost when forced off
    from numba import njit

    HAVE_NUMBA = True
except ImportError:
    HAVE_NUMBA = False

    def njit(*args, **kwargs):  # no-op decorator so the loop sources stay importable
        def wrap(fn):
            return fn

        if args and callable(args[0]):
            return args[0]
        return wrap


def active_backend(override: str | None = None) -> str:
    if override is not None:
        if override not in ("numba", "numpy"):
            raise ValueError(f"backend must be 'numba' or 'numpy', got {override!r}")
        if override == "numba" and not HAVE_NUMBA:
            raise RuntimeError("numba backend requested but numba is unavailable")
        return override
    if _ENV_BACKEND == "numpy" or not HAVE_NUMBA:
        return "numpy"
    return "numba"


# ---------------------------------------------------------------------------
# message propagation
# ---------------------------------------------------------------------------

def _propagate_loop(indptr, indices, twin, tails, init, m, mean_subtract,
                    corr_edge, corr_rprime, corr_third, corr_count,
                    ring_depth, store_stream):
    nde = indices.shape[0]
    n = indptr.shape[0] - 1
    R = ring_depth
    y = init.copy()
    Y = np.zeros((n, m))
    for e in range(nde):
        Y[indices[e], 0] += y[e]
    if store_stream:
        stream = np.zeros((m, nde))
        stream[0] = y
    else:
        stream = np.zeros((1, 1))
    z_hist = np.zeros((R, nde))
    insum_hist = np.zeros((R, n))
    ncorr = corr_edge.shape[0]
    bad_t = -1
    for t in range(2, m + 1):
        if mean_subtract:
            mu = 0.0
            for e in range(nde):
                mu += y[e]
            mu /= nde
            z = y - mu
        else:
            z = y.copy()
        slot = (t - 2) % R
        insum = np.zeros(n)
        for e in range(nde):
            insum[tails[e]] += z[twin[e]]
        z_hist[slot] = z
        insum_hist[slot] = insum
        ynew = np.empty(nde)
        for e in range(nde):
            ynew[e] = insum[tails[e]] - z[twin[e]]
        for i in range(ncorr):
            rp = corr_rprime[i]
            if t == rp:
                e3 = corr_third[i]
                ynew[corr_edge[i]] -= corr_count[i] * z_hist[0, twin[e3]]
            elif t > rp:
                sl = (t - rp - 1) % R
                e = corr_edge[i]
                e3 = corr_third[i]
                v = indices[e]
                ynew[e] -= corr_count[i] * (insum_hist[sl, v] - z_hist[sl, e] - z_hist[sl, e3])
        y = ynew
        ok = True
        col = t - 1
        for e in range(nde):
            Y[indices[e], col] += y[e]
            if not np.isfinite(y[e]):
                ok = False
        if store_stream:
            stream[col] = y
        if not ok:
            bad_t = t
            break
    return Y, stream, bad_t


_propagate_numba = njit(cache=True)(_propagate_loop)


def _propagate_numpy(indptr, indices, twin, tails, init, m, mean_subtract,
                     corr_edge, corr_rprime, corr_third, corr_count,
                     ring_depth, store_stream):
    nde = indices.shape[0]
    n = indptr.shape[0] - 1
    R = ring_depth
    y = init.copy()
    Y = np.zeros((n, m))
    Y[:, 0] = np.bincount(indices, weights=y, minlength=n)
    stream = np.zeros((m, nde)) if store_stream else np.zeros((1, 1))
    if store_stream:
        stream[0] = y
    z_hist = np.zeros((R, nde))
    insum_hist = np.zeros((R, n))
    heads3 = indices[corr_edge] if len(corr_edge) else np.zeros(0, dtype=np.int64)
    twin3 = twin[corr_third] if len(corr_third) else np.zeros(0, dtype=np.int64)
    bad_t = -1
    for t in range(2, m + 1):
        z = y - y.sum() / nde if mean_subtract else y.copy()
        slot = (t - 2) % R
        z_in = z[twin]
        insum = np.bincount(tails, weights=z_in, minlength=n)
        z_hist[slot] = z
        insum_hist[slot] = insum
        ynew = insum[tails] - z_in
        if len(corr_edge):
            eq = corr_rprime == t
            if eq.any():
                np.subtract.at(ynew, corr_edge[eq], corr_count[eq] * z_hist[0, twin3[eq]])
            gt = corr_rprime < t
            if gt.any():
                sl = (t - corr_rprime[gt] - 1) % R
                term = (insum_hist[sl, heads3[gt]]
                        - z_hist[sl, corr_edge[gt]]
                        - z_hist[sl, corr_third[gt]])
                np.subtract.at(ynew, corr_edge[gt], corr_count[gt] * term)
        y = ynew
        Y[:, t - 1] = np.bincount(indices, weights=y, minlength=n)
        if store_stream:
            stream[t - 1] = y
        if not np.isfinite(y).all():
            bad_t = t
            break
    return Y, stream, bad_t


def propagate(graph, init, m, mean_subtract, corrections=None,
              ring_depth=1, store_stream=False, backend=None):
    """Run the edge message recursion for `m` steps from ``init`` (step 1).

    Messages live on directed edges in travel order: the value on edge
    u->w is the belief arriving at w from u. Each step sets

        new[u->w] = sum over x adjacent to u, x != w, of z[x->u]

    where z is the previous step's message vector, mean-subtracted over all
    directed edges when ``mean_subtract``. ``corrections`` is a 4-tuple of
    arrays (edge, r', third_edge, count) describing short-cycle terms: at
    step t > r' the record subtracts count * (sum of z at step t-r' into
    head(edge), excluding edge itself and third_edge); at t == r' it
    subtracts count * z at step 1 on twin(third_edge).

    Returns (Y, stream, bad_t): Y[v, t-1] is the sum of step-t messages
    into v; stream holds every message vector when requested; bad_t is the
    first step with a non-finite value, or -1.
    """
    if corrections is None:
        corr = (np.zeros(0, np.int64), np.zeros(0, np.int64),
                np.zeros(0, np.int64), np.zeros(0, np.int64))
    else:
        corr = tuple(np.ascontiguousarray(c, dtype=np.int64) for c in corrections)
    init = np.ascontiguousarray(init, dtype=np.float64)
    if len(init) != graph.num_directed_edges:
        raise ValueError("init length must equal the number of directed edges")
    args = (graph.indptr, graph.indices, graph.twin, graph.tails, init,
            int(m), bool(mean_subtract), *corr, max(1, int(ring_depth)),
            bool(store_stream))
    if active_backend(backend) == "numba":
        return _propagate_numba(*args)
    return _propagate_numpy(*args)


# ---------------------------------------------------------------------------
# closed nonbacktracking walk totals
# ---------------------------------------------------------------------------

def _closed_walk_loop(indptr, indices, m_max):
    # Returns (csigma, s, q):
    #   csigma[t-1] = sum_v (closed NB walks of length t at v) = tr Sigma^(t)
    #   s[t-1]      = tr(A Sigma^(t)),  exact for t <= m_max - 1
    #   q[t-1]      = sum_v (deg_v - 1) Sigma^(t)_{v,v}
    n = indptr.shape[0] - 1
    K = m_max // 2
    totals = np.zeros(m_max, dtype=np.int64)
    s_tr = np.zeros(m_max, dtype=np.int64)
    q_tr = np.zeros(m_max, dtype=np.int64)
    dist = np.full(n, -1, dtype=np.int64)
    local_id = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        if indptr[v + 1] == indptr[v]:
            continue
        qh = 0
        qt = 0
        queue[qt] = v
        qt += 1
        dist[v] = 0
        while qh < qt:
            u = queue[qh]
            qh += 1
            if dist[u] == K:
                continue
            for p in range(indptr[u], indptr[u + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        nv = qt
        ball = np.sort(queue[:nv].copy())
        for i in range(nv):
            local_id[ball[i]] = i
        lptr = np.zeros(nv + 1, dtype=np.int64)
        for i in range(nv):
            u = ball[i]
            c = 0
            for p in range(indptr[u], indptr[u + 1]):
                if dist[indices[p]] >= 0:
                    c += 1
            lptr[i + 1] = lptr[i] + c
        ne = lptr[nv]
        lidx = np.empty(ne, dtype=np.int64)
        ltail = np.empty(ne, dtype=np.int64)
        pos = 0
        for i in range(nv):
            u = ball[i]
            for p in range(indptr[u], indptr[u + 1]):
                w = indices[p]
                if dist[w] >= 0:
                    lidx[pos] = local_id[w]
                    ltail[pos] = i
                    pos += 1
        ltwin = np.empty(ne, dtype=np.int64)
        for e in range(ne):
            j = lidx[e]
            i = ltail[e]
            lo = lptr[j]
            hi = lptr[j + 1]
            while lo < hi:
                mid = (lo + hi) // 2
                if lidx[mid] < i:
                    lo = mid + 1
                else:
                    hi = mid
            ltwin[e] = lo
        lv = local_id[v]
        degv = indptr[v + 1] - indptr[v]
        f = np.zeros(ne, dtype=np.int64)
        for e in range(lptr[lv], lptr[lv + 1]):
            f[e] = 1
        for t in range(1, m_max + 1):
            if t > 1:
                insum = np.zeros(nv, dtype=np.int64)
                for e in range(ne):
                    insum[ltail[e]] += f[ltwin[e]]
                fnew = np.empty(ne, dtype=np.int64)
                for e in range(ne):
                    fnew[e] = insum[ltail[e]] - f[ltwin[e]]
                f = fnew
            c = 0
            sv = 0
            for e in range(lptr[lv], lptr[lv + 1]):
                c += f[ltwin[e]]
                x = lidx[e]
                for e2 in range(lptr[x], lptr[x + 1]):
                    sv += f[ltwin[e2]]
            totals[t - 1] += c
            q_tr[t - 1] += (degv - 1) * c
            s_tr[t - 1] += sv
        for i in range(nv):
            dist[ball[i]] = -1
            local_id[ball[i]] = -1
    return totals, s_tr, q_tr


_closed_walk_numba = njit(cache=True)(_closed_walk_loop)


def closed_walk_stats(graph, m_max, backend=None):
    """Per-length walk traces: (tr Sigma^(t), tr(A Sigma^(t)), weighted
    diagonal sums), each an int64 array indexed t-1 for t = 1..m_max.

    A closed walk of length t stays within distance floor(t/2) of its base
    vertex, so each vertex is processed on the induced ball of that radius;
    the tr(A Sigma^(t)) entry needs one extra hop and is exact only for
    t <= m_max - 1.
    """
    m_max = int(m_max)
    if m_max < 1:
        z = np.zeros(0, dtype=np.int64)
        return z, z.copy(), z.copy()
    args = (graph.indptr, graph.indices, m_max)
    if active_backend(backend) == "numba":
        return _closed_walk_numba(*args)
    return _closed_walk_loop(*args)


def closed_walk_totals(graph, m_max, backend=None):
    """Sum over vertices v of closed nonbacktracking walks of length t at v
    (the trace of the length-t walk-count matrix), t = 1..m_max."""
    return closed_walk_stats(graph, m_max, backend=backend)[0]


# ---------------------------------------------------------------------------
# exact-distance aggregation
# ---------------------------------------------------------------------------

def _depth_sum_loop(indptr, indices, y, depth):
    n = indptr.shape[0] - 1
    out = np.zeros(n)
    dist = np.full(n, -1, dtype=np.int64)
    queue = np.empty(n, dtype=np.int64)
    for v in range(n):
        qh = 0
        qt = 0
        queue[qt] = v
        qt += 1
        dist[v] = 0
        acc = 0.0
        while qh < qt:
            u = queue[qh]
            qh += 1
            if dist[u] == depth:
                acc += y[u]
                continue
            for p in range(indptr[u], indptr[u + 1]):
                w = indices[p]
                if dist[w] < 0:
                    dist[w] = dist[u] + 1
                    queue[qt] = w
                    qt += 1
        out[v] = acc
        for i in range(qt):
            dist[queue[i]] = -1
    return out


_depth_sum_numba = njit(cache=True)(_depth_sum_loop)


def exact_depth_sums(graph, y, depth, backend=None):
    """out[v] = sum of y over vertices at shortest-path distance exactly `depth`."""
    y = np.ascontiguousarray(y, dtype=np.float64)
    depth = int(depth)
    if depth == 0:
        return y.copy()
    if depth == 1:
        return np.bincount(graph.tails, weights=y[graph.indices], minlength=graph.n)
    args = (graph.indptr, graph.indices, y, depth)
    if active_backend(backend) == "numba":
        return _depth_sum_numba(*args)
    return _depth_sum_loop(*args)
