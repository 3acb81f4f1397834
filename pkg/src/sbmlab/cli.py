"""Command-line front end and deterministic experiment harness.

Subcommands: generate, detect, learn, stats, thresholds, sample-typical,
sweep, nb-count. Exit codes: 0 success, 1 usage error (usage on stderr),
2 runtime error. All randomness derives from --seed; sweep cells use
child seeds from numpy's SeedSequence(base, spawn_key=(point, replicate)),
so sweeps are stable under any --jobs value and rows are emitted in
canonical order regardless of completion order.
"""

from __future__ import annotations

import argparse
import math
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import abp, learner, metrics, model, nonbacktracking, topology, typicality
from .graph import read_edgelist, read_labels, write_edgelist, write_labels
from .rng import derive_seed

__all__ = ["main", "run_sweep", "SweepSpec"]

_SWEEP_SCHEMA = "# sbmlab-sweep-v1 n,k,a,b,snr,algo,m,r,seed,agreement,detection_margin,runtime_ms"


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise _UsageError(message)


def _fmt(x: float) -> str:
    return f"{x:.10g}"


# ---------------------------------------------------------------------------
# sweep harness
# ---------------------------------------------------------------------------

@dataclass
class SweepSpec:
    """One-parameter sweep at fixed k and n: `a` varies, with either the
    mean degree d or the inter rate b held fixed."""

    k: int
    n: int
    a_values: list[float]
    fixed_d: float | None = None
    fixed_b: float | None = None
    seeds: int = 1
    algo: str = "abp-star"
    m: int | None = None
    r: int = 2
    c: float = 1.0
    base_seed: int = 0
    out: str | None = None
    jobs: int = 1
    stamp_runtime: bool = True

    def __post_init__(self):
        if (self.fixed_d is None) == (self.fixed_b is None):
            raise ValueError("exactly one of fixed_d / fixed_b is required")
        if not self.a_values:
            raise ValueError("empty sweep range")
        if self.seeds < 1:
            raise ValueError("seeds must be >= 1")
        if self.algo not in ("abp-star", "abp-full", "nb-power"):
            raise ValueError(f"unknown algorithm {self.algo!r}")

    def point(self, i: int) -> tuple[float, float]:
        a = float(self.a_values[i])
        if self.fixed_d is not None:
            b = (self.k * self.fixed_d - a) / (self.k - 1)
        else:
            b = float(self.fixed_b)
        if b < 0:
            raise ValueError(f"a={a} gives negative b under fixed d")
        return a, b


def _sweep_cell(args):
    spec, point_idx, rep = args
    a, b = spec.point(point_idx)
    seed = derive_seed(spec.base_seed, point_idx, rep)
    sym = model.SymmetricSbm(n=spec.n, k=spec.k, a=a, b=b)
    snr = model.snr_symmetric(spec.k, a, b)
    labels, g = model.sample(sym.to_params(), spec.n, seed)
    cfg = abp.AbpConfig(m=spec.m, r=spec.r, c=spec.c, seed=seed, snr_hint=snr)
    m_used = cfg.m if cfg.m is not None else abp.default_num_iterations(spec.n, snr)
    t0 = time.perf_counter()
    if spec.algo == "abp-star":
        part = abp.abp_star(g, cfg)
    elif spec.algo == "abp-full":
        eigs = model.spectrum(sym.to_params()).distinct
        part = abp.abp_full(g, cfg, eigs)
    else:
        part = nonbacktracking.power_iteration_detect(
            g, spec.r, m_used, 1, sym.d, seed)
    runtime_ms = (time.perf_counter() - t0) * 1000.0
    agree = metrics.agreement(labels, part.side)
    margin = metrics.detection_margin(labels, part)
    return point_idx, rep, a, b, snr, m_used, seed, agree, margin, runtime_ms


def run_sweep(spec: SweepSpec) -> list[str]:
    """Run every (point, replicate) cell; returns the CSV lines and writes
    them to spec.out when set. Per point, replicate rows are followed by a
    summary row (seed column "mean") with mean agreement/margin/runtime."""
    tasks = [(spec, i, rep) for i in range(len(spec.a_values))
             for rep in range(spec.seeds)]
    if spec.jobs > 1:
        with ProcessPoolExecutor(max_workers=spec.jobs) as pool:
            cells = list(pool.map(_sweep_cell, tasks))
    else:
        cells = [_sweep_cell(t) for t in tasks]
    cells.sort(key=lambda c: (c[0], c[1]))
    lines = [_SWEEP_SCHEMA,
             "n,k,a,b,snr,algo,m,r,seed,agreement,detection_margin,runtime_ms"]
    for i in range(len(spec.a_values)):
        point = [c for c in cells if c[0] == i]
        for (_, _, a, b, snr, m_used, seed, agree, margin, ms) in point:
            ms_out = ms if spec.stamp_runtime else 0.0
            lines.append(",".join([
                str(spec.n), str(spec.k), _fmt(a), _fmt(b), _fmt(snr),
                spec.algo, str(m_used), str(spec.r), str(seed),
                f"{agree:.6f}", f"{margin:.6f}", f"{ms_out:.3f}"]))
        a, b = spec.point(i)
        snr = point[0][4]
        mean_ms = float(np.mean([c[9] for c in point])) if spec.stamp_runtime else 0.0
        lines.append(",".join([
            str(spec.n), str(spec.k), _fmt(a), _fmt(b), _fmt(snr),
            spec.algo, str(point[0][5]), str(spec.r), "mean",
            f"{float(np.mean([c[7] for c in point])):.6f}",
            f"{float(np.mean([c[8] for c in point])):.6f}",
            f"{mean_ms:.3f}"]))
    if spec.out:
        with open(spec.out, "w", newline="\n") as fh:
            fh.write("\n".join(lines) + "\n")
    return lines


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def _parse_eigs(text: str) -> np.ndarray:
    return np.asarray([float(x) for x in text.split(",") if x.strip() != ""])


def _cmd_generate(args) -> int:
    sym = model.SymmetricSbm(n=args.n, k=args.k, a=args.a, b=args.b)
    labels, g = model.sample(sym.to_params(), args.n, args.seed)
    write_edgelist(g, args.out)
    if args.labels:
        write_labels(labels, args.labels)
    print(f"n={g.n} edges={g.num_edges} d_hat={2 * g.num_edges / g.n:.4f}")
    return 0


def _cmd_detect(args) -> int:
    g = read_edgelist(args.graph)
    eigs = _parse_eigs(args.eigs) if args.eigs else None
    snr = None
    if eigs is not None and len(eigs) >= 2 and eigs[0] != 0:
        snr = float(eigs[1] ** 2 / eigs[0])
    cfg = abp.AbpConfig(m=args.m, r=args.r, c=args.c, gamma=args.gamma,
                        seed=args.seed, snr_hint=snr)
    if args.algo == "abp-star":
        part = abp.abp_star(g, cfg)
    elif args.algo == "abp-full":
        if eigs is None:
            raise ValueError("--algo abp-full requires --eigs")
        part = abp.abp_full(g, cfg, eigs)
    else:
        if eigs is None:
            raise ValueError("--algo nb-power requires --eigs (lambda1)")
        m = args.m if args.m is not None else abp.default_num_iterations(g.n, snr)
        m_prime = args.m_prime if args.m_prime is not None else 1
        part = nonbacktracking.power_iteration_detect(
            g, args.r, m, m_prime, float(eigs[0]), args.seed)
    out = open(args.out, "w", newline="\n") if args.out else sys.stdout
    try:
        for bit in part.side:
            out.write(f"{int(bit)}\n")
    finally:
        if args.out:
            out.close()
    if args.labels:
        labels = read_labels(args.labels)
        print(f"detection_margin={metrics.detection_margin(labels, part):.6f}")
        print(f"agreement={metrics.agreement(labels, part.side):.6f}")
    return 0


def _cmd_learn(args) -> int:
    g = read_edgelist(args.graph)
    res = learner.estimate_params(g, m_max=args.mmax, k_max=args.kmax)
    ks = sorted(res.residuals)
    print("# sbmlab-learn-v1")
    print("a_hat,b_hat,k_hat,mu_hat,d_hat,no_signal,"
          + ",".join(f"resid_k{k}" for k in ks))
    print(",".join([_fmt(res.a_hat), _fmt(res.b_hat), str(res.k_hat),
                    _fmt(res.mu_hat), _fmt(res.d_hat), str(res.no_signal)]
                   + [_fmt(res.residuals[k]) for k in ks]))
    return 0


def _cmd_stats(args) -> int:
    g = read_edgelist(args.graph)
    st = topology.component_stats(g, j_max=args.jmax)
    print(f"n={st.n} isolated_trees={st.T} tree_edges={st.M} "
          f"giant_size={st.giant_size} planted_tree_edges={st.F}")
    print("T_j: " + " ".join(f"{j}:{st.T_j[j]}" for j in range(1, args.jmax + 1)))
    if args.a is not None and args.b is not None and args.k is not None:
        pred = topology.predicted_fractions(args.a, args.b, args.k)
        rows = [
            ("isolated_trees/n", st.T / st.n, pred.tree_frac),
            ("tree_edges/n", st.M / st.n, pred.tree_edge_frac),
            ("giant_size/n", st.giant_size / st.n, pred.giant_frac),
            ("planted_edges/n", st.F / st.n, pred.planted_edge_frac),
        ]
        print("quantity,observed,predicted")
        for name, obs, pr in rows:
            print(f"{name},{obs:.6f},{pr:.6f}")
    return 0


def _cmd_thresholds(args) -> int:
    rep = typicality.threshold_report(args.k, args.a, args.b)
    cols = ["k", "a", "b", "d", "snr", "ks_holds", "union_bound_holds",
            "it_bound_holds", "tau", "f", "lhs", "rhs_f_branch",
            "rhs_giant_branch", "psi", "giant_exponent", "a0"]
    print("# sbmlab-thresholds-v1")
    print(",".join(cols))
    def fmt(v):
        if v is None:
            return "nan"
        if isinstance(v, bool):
            return str(v)
        if isinstance(v, (int, np.integer)):
            return str(v)
        return _fmt(float(v))
    print(",".join(fmt(getattr(rep, c)) for c in cols))
    return 0


def _cmd_sample_typical(args) -> int:
    g = read_edgelist(args.graph)
    bal = math.log(g.n) / math.sqrt(g.n) if args.bal_sqrt else None
    p = typicality.TypicalityParams(delta=args.delta, a=args.a, b=args.b,
                                    k=args.k, bal_tol=bal)
    x = typicality.sample_typical(g, p, args.seed)
    for c in x:
        print(int(c))
    if args.labels:
        labels = read_labels(args.labels)
        print(f"agreement={metrics.agreement(labels, x):.6f}")
    return 0


def _cmd_nb_count(args) -> int:
    g = read_edgelist(args.graph)
    print(nonbacktracking.nb_walk_count(g, args.r, args.m, args.v, args.v2))
    return 0


def _cmd_sweep(args) -> int:
    if (args.d is None) == (args.b is None):
        raise _UsageError("exactly one of --d / --b is required")
    a_values = list(np.arange(args.a_min, args.a_max + 1e-9, args.a_step))
    spec = SweepSpec(k=args.k, n=args.n, a_values=a_values, fixed_d=args.d,
                     fixed_b=args.b, seeds=args.seeds, algo=args.algo,
                     m=args.m, r=args.r, c=args.c, base_seed=args.seed,
                     out=args.out, jobs=args.jobs,
                     stamp_runtime=not args.no_runtime_stamp)
    lines = run_sweep(spec)
    if not args.out:
        print("\n".join(lines))
    return 0


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------

def _build_parser() -> _Parser:
    parser = _Parser(prog="sbmlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="sample a symmetric SBM graph")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="edge-list output path")
    p.add_argument("--labels", help="labels output path")
    p.set_defaults(func=_cmd_generate)

    p = sub.add_parser("detect", help="two-set community detection")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", help="true labels (prints metrics)")
    p.add_argument("--algo", choices=["abp-star", "abp-full", "nb-power"],
                   default="abp-star")
    p.add_argument("--m", type=int)
    p.add_argument("--m-prime", type=int, dest="m_prime")
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--gamma", type=float)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eigs", help="comma-separated distinct eigenvalues, "
                                  "nonincreasing magnitude")
    p.add_argument("--out", help="partition output path (default stdout)")
    p.set_defaults(func=_cmd_detect)

    p = sub.add_parser("learn", help="estimate (a, b, k) from cycle counts")
    p.add_argument("--graph", required=True)
    p.add_argument("--mmax", type=int, default=8)
    p.add_argument("--kmax", type=int, default=6)
    p.set_defaults(func=_cmd_learn)

    p = sub.add_parser("stats", help="tree/giant statistics of a graph")
    p.add_argument("--graph", required=True)
    p.add_argument("--jmax", type=int, default=10)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--k", type=int)
    p.set_defaults(func=_cmd_stats)

    p = sub.add_parser("thresholds", help="closed-form threshold report")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.set_defaults(func=_cmd_thresholds)

    p = sub.add_parser("sample-typical", help="uniform draw from the typical set")
    p.add_argument("--graph", required=True)
    p.add_argument("--labels", help="true labels (prints agreement)")
    p.add_argument("--delta", type=float, required=True)
    p.add_argument("--a", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--bal-sqrt", action="store_true", dest="bal_sqrt",
                   help="balance tolerance ln(n)/sqrt(n) instead of delta")
    p.set_defaults(func=_cmd_sample_typical)

    p = sub.add_parser("nb-count", help="brute-force r-nonbacktracking walk count")
    p.add_argument("--graph", required=True)
    p.add_argument("--r", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--v", type=int, required=True)
    p.add_argument("--v2", type=int, required=True)
    p.set_defaults(func=_cmd_nb_count)

    p = sub.add_parser("sweep", help="phase-transition sweep to CSV")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--d", type=float, help="hold mean degree fixed")
    p.add_argument("--b", type=float, help="hold inter rate fixed")
    p.add_argument("--a-min", type=float, required=True, dest="a_min")
    p.add_argument("--a-max", type=float, required=True, dest="a_max")
    p.add_argument("--a-step", type=float, required=True, dest="a_step")
    p.add_argument("--seeds", type=int, default=1)
    p.add_argument("--algo", choices=["abp-star", "abp-full", "nb-power"],
                   default="abp-star")
    p.add_argument("--m", type=int)
    p.add_argument("--r", type=int, default=2)
    p.add_argument("--c", type=float, default=1.0)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.add_argument("--jobs", type=int,
                   default=int(os.environ.get("SBMLAB_JOBS", "1")))
    p.add_argument("--no-runtime-stamp", action="store_true",
                   help="write 0 in runtime_ms for byte-stable output")
    p.set_defaults(func=_cmd_sweep)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError:
        return 1
    except SystemExit as exc:  # -h/--help
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _UsageError as exc:
        sys.stderr.write(f"sbmlab: error: {exc}\n")
        return 1
    except (ValueError, KeyError, OSError, FloatingPointError) as exc:
        sys.stderr.write(f"sbmlab: {type(exc).__name__}: {exc}\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
