import json
import subprocess
import sys

import pytest

from barabanov.cli import main
from barabanov.config import ConfigError, parse_config
from barabanov.outputs import read_json, read_sequence
from barabanov.polygon import load_polygon

RHO_EQM1 = 1.098668


def run_cli(*argv) -> int:
    return main([str(a) for a in argv])


def write_config(path, doc):
    path.write_text(json.dumps(doc))
    return path


def data_files(directory):
    return {p.name: p.read_bytes() for p in sorted(directory.iterdir()) if not p.name.endswith(".run.json")}


def test_norm_brackets_eq_m1(tmp_path, capsys):
    out = tmp_path / "m1"
    assert run_cli("norm", "--preset", "eqM1-mycase", "--tol", "1e-3", "--out", out) == 0
    bounds = read_json(out / "bounds.json")
    assert bounds["rho_lower"] <= RHO_EQM1 <= bounds["rho_upper"]
    assert bounds["rho_upper"] - bounds["rho_lower"] <= 1e-3
    assert {"polygon.json", "bounds.json", "iterations.csv", "sphere.csv", "sphere.svg", "norm.run.json"} <= {
        p.name for p in out.iterdir()
    }
    assert load_polygon(out / "polygon.json")
    log = (out / "iterations.csv").read_text().splitlines()
    assert log[0] == "k,lower,upper,vertices" and len(log) > 1
    assert "rho in [" in capsys.readouterr().out


def test_norm_of_equal_rotations_brackets_one(tmp_path):
    cfg = write_config(tmp_path / "rot.json", {"pair": {"family": "rotation", "theta0": 0.3, "theta1": 0.3, "lam": 1}})
    out = tmp_path / "rot"
    assert run_cli("norm", "--config", cfg, "--tol", "1e-3", "--out", out, "--no-figures") == 0
    bounds = read_json(out / "bounds.json")
    assert bounds["rho_lower"] <= 1.0 <= bounds["rho_upper"]
    assert not (out / "sphere.svg").exists()


@pytest.mark.parametrize(
    "doc",
    [
        {"pair": {"preset": "eqM1-mycase"}, "bogus": 1},
        {"pair": {"preset": "nope"}},
        {"pair": {"family": "rotation", "theta0": 0.3, "theta1": 0.3, "lam": -1}},
        {"pair": {"preset": "case1"}, "iteration": {"tol": -1}},
        {"pair": {"preset": "case1"}, "iteration": {"speed": 3}},
        {"pair": {"preset": "case1"}, "trajectory": {"steps": 0}},
        {"pair": {"family": "matrices", "a0": [[1, 2], [2, 4]], "a1": [[1, 0], [0, 1]]}},
    ],
)
def test_malformed_config_is_a_usage_error_and_writes_nothing(tmp_path, doc):
    out = tmp_path / "never"
    doc = {**doc, "out": str(out)}
    cfg = write_config(tmp_path / "bad.json", doc)
    assert run_cli("norm", "--config", cfg) == 2
    assert not out.exists()


def test_unreadable_config(tmp_path):
    (tmp_path / "broken.json").write_text("{not json")
    assert run_cli("norm", "--config", tmp_path / "broken.json", "--out", tmp_path / "x") == 2
    assert run_cli("norm", "--config", tmp_path / "missing.json", "--out", tmp_path / "x") == 2
    assert not (tmp_path / "x").exists()


@pytest.mark.parametrize(
    "argv",
    [
        ("norm",),
        ("norm", "--preset", "case1", "--config", "x.json"),
        ("norm", "--preset", "case1", "--tol", "-1"),
        ("generate", "sturmian"),
        ("generate", "sturmian", "--theta", "1.5"),
        ("bruteforce", "--preset", "case1", "-n", "40"),
        ("analyze", "does-not-exist.txt"),
        ("trajectory", "--preset", "case1", "--polygon", "does-not-exist.json"),
        ("trajectory", "--preset", "case1", "--steps", "5"),
    ],
)
def test_usage_errors(tmp_path, monkeypatch, argv):
    monkeypatch.chdir(tmp_path)
    assert run_cli(*argv) == 2
    assert not (tmp_path / "out").exists()


def test_argparse_errors_exit_with_usage_code():
    with pytest.raises(SystemExit) as info:
        run_cli("norm", "--preset", "no-such-preset")
    assert info.value.code == 2
    with pytest.raises(SystemExit) as info:
        run_cli("frobnicate")
    assert info.value.code == 2


def test_non_convergence_exit_code(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"pair": {"preset": "case1"}, "iteration": {"max_iter": 2}})
    out = tmp_path / "nc"
    assert run_cli("norm", "--config", cfg, "--out", out) == 3
    bounds = read_json(out / "bounds.json")
    assert bounds["converged"] is False and bounds["rho_lower"] <= bounds["rho_upper"]
    assert run_cli("trajectory", "--config", cfg, "--out", tmp_path / "nc2") == 3


def test_degenerate_ball_exit_code(tmp_path):
    doc = {
        "pair": {"family": "matrices", "a0": [[2, 0], [0, 1]], "a1": [[2, 0], [0, 0.5]]},
        "iteration": {"scheme": "power"},
    }
    cfg = write_config(tmp_path / "red.json", doc)
    assert run_cli("norm", "--config", cfg, "--out", tmp_path / "red") == 4


def test_trajectory_sequence_misses_00(tmp_path, capsys):
    out = tmp_path / "traj"
    assert run_cli("trajectory", "--preset", "eqM1-mycase", "--out", out) == 0
    s = read_sequence(out / "sequence.txt")
    assert len(s) == 10_000
    assert run_cli("analyze", out / "sequence.txt", "--out", tmp_path / "an") == 0
    stats = read_json(tmp_path / "an" / "stats.json")
    assert stats["missing_digram"] == "00"
    assert "missing digram 00" in capsys.readouterr().out
    # every figure comes with the table it was drawn from
    names = {p.name for p in out.iterdir()}
    for fig, data in (("trajectory.svg", "trajectory.csv"), ("sphere.svg", "sphere.csv")):
        if fig in names:
            assert data in names
    assert {"trajectory.svg", "trajectory.csv", "complexity.csv", "stats.json"} <= names


def test_analyze_rejects_short_sequences(tmp_path):
    (tmp_path / "s.txt").write_text("0101010101\n")
    assert run_cli("analyze", tmp_path / "s.txt", "--out", tmp_path / "o") == 2
    assert run_cli("analyze", tmp_path / "s.txt", "--n-max", "5", "--out", tmp_path / "o") == 0


def test_generate_and_compare(tmp_path, capsys):
    assert run_cli("generate", "sturmian", "--theta", "0.5", "-n", "12") == 0
    assert capsys.readouterr().out.strip() == "010101010101"
    left, right = tmp_path / "l.txt", tmp_path / "r.txt"
    assert run_cli("generate", "rotation", "--theta", "0.618034", "-n", "5000", "-o", left) == 0
    assert run_cli("generate", "double-rotation", "--theta1", "0.3", "--theta2", "0.6", "--theta", "0.4",
                   "-n", "5000", "-o", right) == 0
    assert run_cli("generate", "mismatched", "--theta", "0.3", "--theta0", "0.5", "-n", "50") == 0
    assert run_cli("compare", left, left, "--out", tmp_path / "same") == 0
    assert read_json(tmp_path / "same" / "compare.json")["max_gap"] == 0.0
    assert run_cli("compare", left, right, "--out", tmp_path / "diff") == 0
    assert read_json(tmp_path / "diff" / "compare.json")["max_gap"] > 0.0


def test_bruteforce_is_consistent_with_norm(tmp_path):
    out = tmp_path / "bf"
    assert run_cli("norm", "--preset", "eqM1-mycase", "--out", out, "--no-figures") == 0
    assert run_cli("bruteforce", "--preset", "eqM1-mycase", "-n", "12", "--bounds", out / "bounds.json",
                   "--out", out) == 0
    doc = read_json(out / "bruteforce.json")
    lo, hi = doc["certified"]
    assert doc["rho_bar_n"] <= doc["rho_n"]
    assert doc["rho_bar_n"] <= hi and lo <= doc["rho_n"]
    assert doc["consistent"] is True


def test_polygon_round_trip_gives_the_same_angular_profile(tmp_path):
    common = ("--preset", "case2", "--tol", "1e-6", "--no-figures")
    assert run_cli("norm", *common, "--out", tmp_path / "n") == 0
    assert run_cli("angular", *common, "--polygon", tmp_path / "n" / "polygon.json", "--out", tmp_path / "a") == 0
    assert run_cli("angular", *common, "--out", tmp_path / "b") == 0
    for name in ("angular.csv", "angular.json"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_polygon_of_another_pair_is_rejected(tmp_path):
    assert run_cli("norm", "--preset", "case2", "--tol", "1e-4", "--no-figures", "--out", tmp_path / "n") == 0
    assert run_cli("angular", "--preset", "case3", "--polygon", tmp_path / "n" / "polygon.json",
                   "--out", tmp_path / "a") == 2


def test_non_invariant_angular_arc_is_a_usage_error(tmp_path):
    cfg = write_config(tmp_path / "c.json", {"pair": {"preset": "case1"}, "angular": {"domain": [0, 1.5707963]}})
    assert run_cli("angular", "--config", cfg, "--tol", "1e-6", "--out", tmp_path / "o") == 2


def test_outputs_are_byte_identical(tmp_path):
    cfg = {"pair": {"preset": "case3"}, "iteration": {"tol": 1e-6}, "trajectory": {"steps": 2000},
           "angular": {"grid": 1024, "rotation_iterations": 2000}}
    path = write_config(tmp_path / "c.json", cfg)
    for sub in ("one", "two"):
        assert run_cli("trajectory", "--config", path, "--out", tmp_path / sub) == 0
        assert run_cli("angular", "--config", path, "--out", tmp_path / sub) == 0
    one, two = data_files(tmp_path / "one"), data_files(tmp_path / "two")
    assert one.keys() == two.keys() and "angular.svg" in one
    for name in one:
        assert one[name] == two[name], name


def test_config_round_trip():
    doc = {
        "pair": {"family": "affine", "alpha": 0.576, "beta": 0.8, "a": 0.9, "b": 1.1, "c": 1, "d": 0.9},
        "iteration": {"tol": 1e-6, "scheme": "power"},
        "trajectory": {"steps": 50, "tie_rule": "prefer-zero"},
        "angular": {"domain": "full"},
        "emit": {"figures": False},
    }
    cfg = parse_config(doc)
    assert parse_config(cfg.to_doc()) == cfg
    with pytest.raises(ConfigError):
        parse_config({"pair": {"preset": "case1"}, "emit": {"movies": True}})
    with pytest.raises(ConfigError):
        parse_config({})


def test_module_entry_point(tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "barabanov", "generate", "sturmian", "--theta", "0.5", "-n", "6"],
        capture_output=True, text=True, cwd=tmp_path, check=False,
    )
    assert proc.returncode == 0 and proc.stdout.strip() == "010101"
