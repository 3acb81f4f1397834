"""Benchmark the hot kernels under the numba and pure-numpy backends.

Usage:
    python benchmarks/bench_kernels.py [--n 100000] [--d 3.0] [--m 24]

The same kernels run with backend="numba" and backend="numpy"; results are
checked to agree before timings are printed. Setting SBMLAB_BACKEND=numpy
disables numba globally instead (no comparison possible then).
"""

import argparse
import time

import numpy as np

from sbmlab import _kernels
from sbmlab.abp import propagate_messages
from sbmlab.model import SymmetricSbm, sample
from sbmlab.nonbacktracking import tailless_closed_walk_profile
from sbmlab.rng import make_rng, normals


def timed(fn, repeats=3):
    best = float("inf")
    out = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return out, best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=100000)
    ap.add_argument("--d", type=float, default=3.0)
    ap.add_argument("--m", type=int, default=24)
    ap.add_argument("--walk-m", type=int, default=8, dest="walk_m")
    args = ap.parse_args()

    backends = ["numpy"]
    if _kernels.HAVE_NUMBA:
        backends.insert(0, "numba")
    else:
        print("numba unavailable (or SBMLAB_BACKEND=numpy): timing numpy only")

    a = 2 * args.d - 1.0
    params = SymmetricSbm(args.n, 2, a, 1.0).to_params()
    print(f"sampling SBM(n={args.n}, k=2, a={a}, b=1) ...")
    _, g = sample(params, args.n, seed=0)
    init = normals(make_rng(1), g.num_directed_edges)
    print(f"graph: {g.num_edges} edges\n")

    rows = []
    results = {}
    for backend in backends:
        if backend == "numba":  # compile outside the timer
            propagate_messages(g, init, 2, mean_subtract=True, backend=backend)
            tailless_closed_walk_profile(g, 2, backend=backend)
            _kernels.exact_depth_sums(g, init[: g.n], 2, backend=backend)
        (Y, _), dt = timed(lambda: propagate_messages(
            g, init, args.m, mean_subtract=True, backend=backend))
        rows.append((f"propagate (m={args.m})", backend, dt))
        results.setdefault("propagate", []).append(Y)
        prof, dt = timed(lambda: tailless_closed_walk_profile(
            g, args.walk_m, backend=backend), repeats=1)
        rows.append((f"closed walks (m={args.walk_m})", backend, dt))
        results.setdefault("walks", []).append(prof)
        dsum, dt = timed(lambda: _kernels.exact_depth_sums(
            g, init[: g.n], 2, backend=backend), repeats=1)
        rows.append(("depth-2 sums", backend, dt))
        results.setdefault("depth", []).append(dsum)

    if len(backends) == 2:
        assert np.allclose(results["propagate"][0], results["propagate"][1],
                           rtol=1e-9, atol=1e-9)
        assert np.array_equal(results["walks"][0], results["walks"][1])
        assert np.allclose(results["depth"][0], results["depth"][1])
        print("backend outputs agree\n")

    width = max(len(r[0]) for r in rows)
    print(f"{'kernel':<{width}}  backend  seconds")
    for name, backend, dt in rows:
        print(f"{name:<{width}}  {backend:<7}  {dt:9.3f}")


if __name__ == "__main__":
    main()
