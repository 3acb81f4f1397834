import numpy as np
import pytest

from sbmlab.cli import SweepSpec, main, run_sweep
from sbmlab.graph import Graph, read_labels, write_edgelist
from sbmlab.typicality import threshold_report


def test_generate_detect_pipeline(tmp_path, capsys):
    edges = tmp_path / "g.edges"
    labels = tmp_path / "g.labels"
    out = tmp_path / "part.txt"
    rc = main(["generate", "--n", "1000", "--k", "2", "--a", "5", "--b", "1",
               "--seed", "7", "--out", str(edges), "--labels", str(labels)])
    assert rc == 0
    assert edges.exists() and labels.exists()
    rc = main(["detect", "--graph", str(edges), "--labels", str(labels),
               "--algo", "abp-star", "--m", "12", "--seed", "7",
               "--out", str(out)])
    assert rc == 0
    printed = capsys.readouterr().out
    assert "detection_margin=" in printed and "agreement=" in printed
    side = read_labels(out)
    assert len(side) == 1000
    assert set(np.unique(side)) <= {0, 1}


def test_detect_nb_power_and_abp_full(tmp_path, capsys):
    edges = tmp_path / "g.edges"
    main(["generate", "--n", "500", "--k", "2", "--a", "6", "--b", "1",
          "--seed", "1", "--out", str(edges)])
    for algo in ("nb-power", "abp-full"):
        rc = main(["detect", "--graph", str(edges), "--algo", algo,
                   "--m", "8", "--seed", "3", "--eigs", "3.5,2.5",
                   "--out", str(tmp_path / "p.txt")])
        assert rc == 0
    rc = main(["detect", "--graph", str(edges), "--algo", "abp-full",
               "--m", "8", "--seed", "3"])
    assert rc == 2  # abp-full without --eigs is a runtime error
    assert "eigs" in capsys.readouterr().err


def test_usage_errors(tmp_path, capsys):
    assert main(["detect"]) == 1  # missing --graph
    err = capsys.readouterr().err
    assert "usage" in err
    assert main(["detect", "--graph", "x", "--bogus-flag"]) == 1
    assert main(["frobnicate"]) == 1


def test_runtime_error_exit_code(tmp_path, capsys):
    rc = main(["detect", "--graph", str(tmp_path / "missing.edges")])
    assert rc == 2


def test_thresholds_matches_module(capsys):
    rc = main(["thresholds", "--k", "4", "--a", "0", "--b", "12"])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0].startswith("#")
    header = out[1].split(",")
    values = out[2].split(",")
    row = dict(zip(header, values))
    rep = threshold_report(4, 0.0, 12.0)
    assert float(row["d"]) == pytest.approx(rep.d)
    assert float(row["tau"]) == pytest.approx(rep.tau, rel=1e-6)
    assert row["it_bound_holds"] == str(rep.it_bound_holds)
    assert float(row["psi"]) == pytest.approx(rep.psi, rel=1e-6)


def test_thresholds_low_degree_prints_nan(capsys):
    rc = main(["thresholds", "--k", "3", "--a", "0.5", "--b", "0.5"])
    assert rc == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert "nan" in out[2]


def test_nb_count(tmp_path, capsys):
    tri = Graph(3, [[0, 1], [1, 2], [0, 2]])
    path = tmp_path / "tri.edges"
    write_edgelist(tri, path)
    rc = main(["nb-count", "--graph", str(path), "--r", "2", "--m", "3",
               "--v", "0", "--v2", "0"])
    assert rc == 0
    assert capsys.readouterr().out.strip() == "2"


def test_sample_typical_cli(tmp_path, capsys):
    edges = tmp_path / "g.edges"
    labels = tmp_path / "g.labels"
    main(["generate", "--n", "12", "--k", "2", "--a", "8", "--b", "0",
          "--seed", "5", "--out", str(edges), "--labels", str(labels)])
    capsys.readouterr()
    rc = main(["sample-typical", "--graph", str(edges), "--labels", str(labels),
               "--delta", "0.5", "--a", "8", "--b", "0", "--k", "2",
               "--seed", "5"])
    assert rc == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert len(lines) == 13
    assert lines[-1].startswith("agreement=")
    rc = main(["sample-typical", "--graph", str(edges), "--delta", "0.5",
               "--a", "8", "--b", "0", "--k", "2", "--seed", "5",
               "--bal-sqrt"])
    assert rc == 0


def test_learn_cli(tmp_path, capsys):
    edges = tmp_path / "g.edges"
    main(["generate", "--n", "20000", "--k", "2", "--a", "5", "--b", "1",
          "--seed", "2", "--out", str(edges)])
    capsys.readouterr()
    rc = main(["learn", "--graph", str(edges), "--mmax", "8", "--kmax", "4"])
    assert rc == 0
    out = capsys.readouterr().out.splitlines()
    assert out[1].startswith("a_hat,b_hat,k_hat")
    values = out[2].split(",")
    assert float(values[4]) == pytest.approx(3.0, abs=0.1)  # d_hat


def test_stats_cli(tmp_path, capsys):
    edges = tmp_path / "g.edges"
    main(["generate", "--n", "5000", "--k", "2", "--a", "5", "--b", "1",
          "--seed", "3", "--out", str(edges)])
    capsys.readouterr()
    rc = main(["stats", "--graph", str(edges), "--a", "5", "--b", "1", "--k", "2"])
    assert rc == 0
    out = capsys.readouterr().out
    assert "giant_size=" in out
    assert "quantity,observed,predicted" in out


def test_sweep_rows_and_determinism(tmp_path):
    out1 = tmp_path / "s1.csv"
    out2 = tmp_path / "s2.csv"
    args = ["sweep", "--k", "2", "--n", "400", "--d", "3",
            "--a-min", "5", "--a-max", "5", "--a-step", "1",
            "--seeds", "1", "--m", "8", "--seed", "9",
            "--no-runtime-stamp"]
    assert main(args + ["--out", str(out1)]) == 0
    assert main(args + ["--out", str(out2)]) == 0
    b1, b2 = out1.read_bytes(), out2.read_bytes()
    assert b1 == b2
    lines = b1.decode().splitlines()
    assert lines[0].startswith("#")
    assert lines[1].startswith("n,k,a,b,snr")
    assert len(lines) == 4  # schema, header, one data row, one summary row
    assert lines[3].split(",")[8] == "mean"


def test_sweep_spec_validation():
    with pytest.raises(ValueError):
        SweepSpec(k=2, n=100, a_values=[3.0])
    with pytest.raises(ValueError):
        SweepSpec(k=2, n=100, a_values=[], fixed_d=3.0)
    with pytest.raises(ValueError):
        SweepSpec(k=2, n=100, a_values=[3.0], fixed_d=3.0, algo="magic")
    spec = SweepSpec(k=2, n=100, a_values=[7.0], fixed_d=3.0)
    with pytest.raises(ValueError):
        spec.point(0)  # b would be negative


def test_sweep_parallel_matches_serial(tmp_path):
    kwargs = dict(k=2, n=300, a_values=[4.0, 5.0], fixed_d=3.0, seeds=2,
                  m=6, base_seed=4, stamp_runtime=False)
    serial = run_sweep(SweepSpec(**kwargs, jobs=1))
    parallel = run_sweep(SweepSpec(**kwargs, jobs=2))
    assert serial == parallel


def test_jobs_env_default(monkeypatch):
    from sbmlab.cli import _build_parser
    monkeypatch.setenv("SBMLAB_JOBS", "2")
    args = _build_parser().parse_args(
        ["sweep", "--k", "2", "--n", "100", "--d", "3", "--a-min", "4",
         "--a-max", "4", "--a-step", "1"])
    assert args.jobs == 2
