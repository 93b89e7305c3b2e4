import csv

import numpy as np
import pytest

from mxspec.cli import main
from mxspec.core import load_network


def run(*argv):
    return main(list(argv))


def test_missing_input_exits_2_with_module_prefix(tmp_path, capsys):
    code = run("cluster", "--input", str(tmp_path / "missing.mpx"),
               "--model", "supra", "--out", str(tmp_path / "a.csv"))
    assert code == 2
    assert "error[multiplex-core]:" in capsys.readouterr().err


def test_usage_error_exits_1(capsys):
    assert run("cluster", "--model", "supra") == 1
    assert "error[cli]:" in capsys.readouterr().err
    assert run("frobnicate") == 1


def test_help_exits_zero_and_lists_flags(capsys):
    assert run("--help") == 0
    out = capsys.readouterr().out
    for sub in ("generate", "cluster", "cut", "experiment", "heatmap"):
        assert sub in out
    assert run("experiment", "--help") == 0
    out = capsys.readouterr().out
    for flag in ("--seed", "--instances", "--jobs", "--out", "--aggregate",
                 "--p-grid", "--q-grid", "--w-grid", "--k-grid", "--full",
                 "--model", "--n", "--intra", "--inter", "--supra-weight"):
        assert flag in out


def test_generate_deterministic(tmp_path):
    out1, out2 = tmp_path / "a.mpx", tmp_path / "b.mpx"
    argv = ["generate", "--type", "er", "--n", "10", "--k", "2",
            "--p", "0.5", "--seed", "7"]
    assert run(*argv, "--out", str(out1)) == 0
    assert run(*argv, "--out", str(out2)) == 0
    assert out1.read_bytes() == out2.read_bytes()
    net = load_network(out1)
    assert net.n == 10 and net.k == 2


def test_generate_planted_sidecars(tmp_path):
    out = tmp_path / "net.mpx"
    assert run("generate", "--type", "sbm-overlap", "--n", "8",
               "--seed", "3", "--out", str(out)) == 0
    planted1 = (tmp_path / "net.planted.csv").read_text().splitlines()
    planted2 = (tmp_path / "net.planted2.csv").read_text().splitlines()
    assert planted1[0] == "copy_index,cluster"
    assert len(planted1) == len(planted2) == 17  # header + 2n copies
    assert run("generate", "--type", "sbm-fixed", "--n", "8", "--k", "2",
               "--p", "0.2", "--seed", "3", "--out", str(tmp_path / "f.mpx")) == 0
    assert (tmp_path / "f.planted.csv").exists()


def test_env_seed_override(tmp_path, monkeypatch):
    out_env, out_default, out_flag = (tmp_path / n for n in ("e.mpx", "d.mpx", "f.mpx"))
    argv = ["generate", "--type", "er", "--n", "10", "--k", "2", "--p", "0.5"]
    monkeypatch.setenv("MXSPEC_SEED", "99")
    assert run(*argv, "--out", str(out_env)) == 0
    # explicit --seed wins over the environment
    assert run(*argv, "--seed", "99", "--out", str(out_flag)) == 0
    monkeypatch.delenv("MXSPEC_SEED")
    assert run(*argv, "--out", str(out_default)) == 0
    assert out_env.read_bytes() == out_flag.read_bytes()
    assert out_env.read_bytes() != out_default.read_bytes()


def test_cluster_and_cut_pipeline(tmp_path, capsys):
    net_path = tmp_path / "net.mpx"
    assert run("generate", "--type", "sbm-fixed", "--n", "10", "--k", "2",
               "--p", "0.1", "--seed", "4", "--out", str(net_path)) == 0
    assign = tmp_path / "assign.csv"
    assert run("cluster", "--input", str(net_path), "--model", "supra",
               "--supra-weight", "2.0", "--clusters", "2",
               "--seed", "4", "--out", str(assign)) == 0
    lines = [l for l in assign.read_text().splitlines() if not l.startswith("%")]
    assert lines[0] == "copy_index,layer,node,cluster"
    assert len(lines) == 21
    capsys.readouterr()
    assert run("cut", "--input", str(net_path), "--model", "supra",
               "--supra-weight", "2.0", "--partition", str(assign),
               "--decompose") == 0
    out = capsys.readouterr().out.splitlines()
    report = dict(csv.reader(out[1:]))
    assert float(report["total"]) == pytest.approx(float(report["quadratic_form"]), abs=1e-10)
    term_sum = sum(float(v) for k, v in report.items()
                   if k.startswith(("intra_", "coupling_")))
    assert term_sum == pytest.approx(2 * float(report["total"]), abs=1e-10)


def test_cluster_kway_and_aggregate_model(tmp_path):
    net_path = tmp_path / "net.mpx"
    assert run("generate", "--type", "er", "--n", "12", "--k", "2",
               "--p", "0.4", "--seed", "6", "--out", str(net_path)) == 0
    out = tmp_path / "k.csv"
    assert run("cluster", "--input", str(net_path), "--model", "dynamic",
               "--clusters", "3", "--seed", "6", "--out", str(out)) == 0
    rows = [l for l in out.read_text().splitlines() if not l.startswith("%")][1:]
    assert len(rows) == 24
    clusters = {int(r.split(",")[-1]) for r in rows}
    assert clusters == {0, 1, 2}
    agg = tmp_path / "agg.csv"
    assert run("cluster", "--input", str(net_path), "--model", "aggregate",
               "--seed", "6", "--out", str(agg)) == 0
    rows = [l for l in agg.read_text().splitlines() if not l.startswith("%")][1:]
    # aggregate clusters nodes, lifted to every copy
    by_copy = {int(r.split(",")[0]): int(r.split(",")[-1]) for r in rows}
    for node in range(12):
        assert by_copy[node] == by_copy[node + 12]


def test_experiment_row_count_contract(tmp_path):
    out = tmp_path / "r.csv"
    assert run("experiment", "fixed-sbm", "--seed", "1", "--instances", "5",
               "--n", "8", "--p-grid", "0.2", "--w-grid", "1.0",
               "--k-grid", "2", "--out", str(out)) == 0
    with open(out) as fh:
        rows = list(csv.DictReader(fh))
    # per grid point and metric: exactly 5 instance rows
    points = {}
    for row in rows:
        key = (row["param:model"], row["param:w"], row["metric"])
        points.setdefault(key, []).append(row["instance"])
    for key, instances in points.items():
        assert sorted(instances) == ["0", "1", "2", "3", "4"], key


def test_experiment_rerun_and_jobs_byte_identical(tmp_path):
    outs = [tmp_path / f"r{i}.csv" for i in range(3)]
    argv = ["experiment", "er", "--seed", "2", "--instances", "3", "--n", "10",
            "--p-grid", "0.3", "--k-grid", "2", "--model", "supra"]
    assert run(*argv, "--out", str(outs[0])) == 0
    assert run(*argv, "--out", str(outs[1])) == 0
    assert run(*argv, "--jobs", "2", "--out", str(outs[2])) == 0
    assert outs[0].read_bytes() == outs[1].read_bytes() == outs[2].read_bytes()


def test_heatmap_from_results(tmp_path, capsys):
    results = tmp_path / "r.csv"
    assert run("experiment", "overlap", "--seed", "3", "--instances", "2",
               "--n", "8", "--p-grid", "0.1,0.9", "--q-grid", "0.1",
               "--out", str(results)) == 0
    heat = tmp_path / "h.csv"
    assert run("heatmap", str(results), "--x", "p", "--y", "q",
               "--metric", "regime", "--out", str(heat)) == 0
    lines = heat.read_text().splitlines()
    assert lines[0] == "q\\p,0.1,0.9"
    assert len(lines) == 2
    capsys.readouterr()
    assert run("heatmap", str(results), "--x", "p", "--y", "q",
               "--metric", "degenerate") == 0
    assert "q\\p" in capsys.readouterr().out


def test_cluster_with_coupling_file(tmp_path):
    net_path = tmp_path / "net.mpx"
    run("generate", "--type", "er", "--n", "8", "--k", "2", "--p", "0.4",
        "--seed", "2", "--out", str(net_path))
    cpl = tmp_path / "c.cpl"
    cpl.write_text("0 1 0.0\n1 0 0.0\n")  # decoupled layers
    out = tmp_path / "a.csv"
    assert run("cluster", "--input", str(net_path), "--model", "dynamic",
               "--coupling", str(cpl), "--seed", "2", "--out", str(out)) == 0
    meta = out.read_text().splitlines()[0]
    assert "degenerate=1" in meta  # block-diagonal operator is disconnected


def test_cut_rejects_aggregate_model(tmp_path, capsys):
    net_path = tmp_path / "net.mpx"
    run("generate", "--type", "er", "--n", "6", "--k", "2", "--p", "0.5",
        "--seed", "1", "--out", str(net_path))
    code = run("cut", "--input", str(net_path), "--model", "aggregate",
               "--partition", str(net_path))
    assert code == 2
    assert "error[multiplex-core]:" in capsys.readouterr().err
