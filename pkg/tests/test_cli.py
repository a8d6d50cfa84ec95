import json
import os

import pytest

from discrete_radon.cli import run
from discrete_radon.grid import GridFunction
from discrete_radon.report import emit_plot, read_csv, read_json


def test_avg_kernel_example(tmp_path):
    src = tmp_path / "delta.grid"
    GridFunction.delta((0,)).save(src)
    assert run(["avg", "--map", "n^2", "--body", "ball", "--t", "3", "--input", str(src), "--out", str(tmp_path / "o")]) == 0
    g = GridFunction.load(tmp_path / "o" / "avg.grid")
    got = {g.lo[0] + i: v for i, v in enumerate(g.values) if v}
    assert got == pytest.approx({0: 0.2, 1: 0.4, 4: 0.4})


def test_avg_family(tmp_path):
    assert run(["avg", "--map", "n", "--grid", "dyadic:0..2", "--out", str(tmp_path)]) == 0
    assert sorted(os.listdir(tmp_path)) == ["avg-0.grid", "avg-1.grid", "avg-2.grid"]


def test_seminorm_values(tmp_path, capsys):
    assert run(["seminorm", "--kind", "jump:1", "--values", "0,0.6,-0.5,0.5", "--out", str(tmp_path)]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["count"] == 2 and out["seed"] == 0
    assert read_json(tmp_path / "seminorm.json") == out


def test_seminorm_family_needs_grid(capsys):
    assert run(["seminorm", "--kind", "sup", "--map", "n"]) == 1
    err = json.loads(capsys.readouterr().err)
    assert err["error"] == "validation"


def test_sigma_example(capsys):
    assert run(["sigma", "--N", "3", "--dim", "1", "--seed", "11"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert len(out["fractions"]) == 4 and out["seed"] == 11


@pytest.mark.parametrize(
    "mode,extra",
    [
        ("m", ["--freq", "list:0.1,0.2"]),
        ("phi", ["--freq", "uniform:2"]),
        ("gauss", ["--q", "5"]),
        ("gauss-fit", ["--N", "20"]),
        ("phi-decay", ["--map", "n", "--freq", "uniform:6", "--N", "4"]),
        ("approx", ["--numerators", "0,0", "--q", "1", "--n", "3..4"]),
        ("minor-arc", ["--n", "4..5"]),
    ],
)
def test_fourier_modes_round_trip(tmp_path, mode, extra):
    assert run(["fourier", "--mode", mode, "--out", str(tmp_path), "--seed", "4", *extra]) == 0
    rows = read_csv(tmp_path / f"fourier-{mode}.csv")
    assert rows and all(r["seed"] == 4 for r in rows)


def test_constants_outputs(tmp_path):
    cfg = tmp_path / "experiment.cfg"
    cfg.write_text("map=n\nbudget=20\nbox=4\nid=demo\n")
    assert run(["constants", "--config", str(cfg), "--out", str(tmp_path / "o"), "--seed", "2"]) == 0
    names = sorted(os.listdir(tmp_path / "o"))
    assert names == ["results.csv", "trace-demo.csv", "witness-demo.grid"]
    row = read_csv(tmp_path / "o" / "results.csv")[0]
    assert row["seed"] == 2 and row["budget"] == 20 and row["value"] > 0


def test_sweep_modes(tmp_path, capsys):
    assert run(["sweep", "--coeffs", "1..2", "--budget", "5", "--box", "3", "--out", str(tmp_path)]) == 0
    assert "max_min_ratio" in json.loads(capsys.readouterr().out)
    assert run(["sweep", "--schedule", "4,8", "--budget", "5", "--box", "3", "--out", str(tmp_path)]) == 0
    assert len(read_csv(tmp_path / "sweep.csv")) == 2
    assert run(["sweep", "--map", "n^2"]) == 1


def test_suite_exit_zero(tmp_path):
    assert run(["suite", "--trials", "300", "--seed", "7", "--out", str(tmp_path)]) == 0
    assert read_json(tmp_path / "suite.json")["seed"] == 7


def test_report_plots(tmp_path):
    assert run(["report", "--plot", "gauss", "--N", "15", "--out", str(tmp_path)]) == 0
    assert (tmp_path / "gauss.svg").read_text().lstrip().startswith("<?xml")
    csv = tmp_path / "arc.csv"
    csv.write_text("n,value\n4,0.9\n5,0.8\n")
    assert run(["report", "--plot", "minor-arc", "--input", str(csv), "--out", str(tmp_path)]) == 0
    assert (tmp_path / "minor-arc.svg").exists()


def test_report_empty_series(tmp_path):
    csv = tmp_path / "empty.csv"
    csv.write_text("q,value\n")
    assert run(["report", "--plot", "gauss", "--input", str(csv), "--out", str(tmp_path)]) == 1
    with pytest.raises(ValueError):
        emit_plot({}, tmp_path / "x.svg")


def test_svg_is_deterministic(tmp_path):
    a, b = tmp_path / "a.svg", tmp_path / "b.svg"
    for path in (a, b):
        emit_plot({"s": ([1, 2, 4], [1, 0.7, 0.5])}, path, references=[("ref", lambda x: x**-0.5)])
    assert a.read_bytes() == b.read_bytes()


@pytest.mark.parametrize(
    "argv",
    [
        ["bogus"],
        ["sigma", "--N", "3", "--frobnicate"],
        ["avg", "--map", "n+1", "--t", "2"],
        ["avg", "--map", "n", "--body", "disc"],
        ["seminorm", "--kind", "var:0.5", "--values", "1,2"],
    ],
)
def test_validation_errors(argv, capsys):
    assert run(argv) == 1
    assert json.loads(capsys.readouterr().err.strip().splitlines()[-1])["error"] == "validation"


def test_hard_failure_exit_code(tmp_path, monkeypatch, capsys):
    from discrete_radon import cli
    from discrete_radon.harness import SuiteReport

    def broken(trials, seed):
        return SuiteReport(trials, seed, {"x": 1}, {"x": 1}, [{"a": [1, 2]}])

    monkeypatch.setattr(cli, "seminorm_inequality_suite", broken)
    assert run(["suite", "--trials", "1", "--out", str(tmp_path)]) == 2
    assert "witness:" in capsys.readouterr().out
    assert (tmp_path / "suite-witness.json").exists()


def test_outputs_are_byte_identical(tmp_path):
    for tag in ("a", "b"):
        run(["constants", "--budget", "15", "--box", "4", "--seed", "9", "--out", str(tmp_path / tag)])
        run(["fourier", "--mode", "gauss-fit", "--N", "25", "--seed", "9", "--out", str(tmp_path / tag)])
    for name in os.listdir(tmp_path / "a"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
