"""Command line behavior: outputs, exit codes, and reproducibility."""

import json

import numpy as np
import pytest

from shiftpath.cli import main

GOLDEN_FLAT = {
    "k": 2,
    "matrix": [[1, 1], [1, 0]],
    "V": {"depth": 1, "values": {"1": 1.0, "2": 1.0}},
    "mu0": "auto",
}

FULL_HALF = {
    "k": 2,
    "matrix": [[1, 1], [1, 1]],
    "V": {"depth": 1, "values": {"1": 1.5, "2": 0.5}},
    "mu0": "auto",
    "filter": {
        "depth": 1,
        "values": {"1": [1.1180339887498949, 0.5], "2": 0.7071067811865476},
    },
}

FULL_MARKOV = {
    "k": 2,
    "matrix": [[1, 1], [1, 1]],
    "V": {
        "depth": 2,
        "values": {
            "11": 2.0 / 3.0,
            "12": 1.0,
            "21": 4.0 / 3.0,
            "22": 1.0,
        },
    },
    "mu0": "auto",
}

BLOCK_FLAT = {
    "k": 4,
    "matrix": [[1, 1, 0, 0], [1, 1, 0, 0], [0, 0, 1, 1], [0, 0, 1, 1]],
    "V": {"depth": 1, "values": {"1": 1.0, "2": 1.0, "3": 1.0, "4": 1.0}},
    "mu0": "auto",
}

DEGENERATE = {
    "k": 2,
    "matrix": [[1, 1], [1, 1]],
    "V": {"depth": 1, "values": {"1": 0.5, "2": 0.5}},
    "mu0": "auto",
}

CORRUPTED = {
    "k": 2,
    "matrix": [[1, 1], [1, 1]],
    "V": {"depth": 1, "values": {"1": 1.0, "2": 1.0}},
    "mu0": {"depth": 1, "values": {"1": 2.0, "2": 0.0}},
    "marginal_override": {
        "n": 1,
        "depth": 2,
        "masses": {"11": 0.25, "12": 0.25, "21": 0.25, "22": 0.25},
    },
}


def write_config(tmp_path, cfg, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(cfg))
    return str(path)


def run(args):
    return main(args)


def load(tmp_path, name):
    return json.loads((tmp_path / name).read_text())


def test_invariant_command(tmp_path):
    cfg = write_config(tmp_path, GOLDEN_FLAT)
    code = run(["invariant", "--config", cfg, "--depth", "3", "--out", str(tmp_path)])
    assert code == 0
    report = load(tmp_path, "invariant_report.json")
    assert report["passed"]
    assert report["unique"]
    assert abs(report["symbol_masses"][0] - 2.0 / 3.0) < 1e-12
    assert report["tool"] == "shiftpath"
    assert len(report["config_sha256"]) == 64
    csv = (tmp_path / "invariant_measure.csv").read_text().splitlines()
    assert csv[0] == "word,mass"
    assert len(csv) == 1 + 5  # five admissible depth-3 words


def test_invariant_non_unique_exit(tmp_path):
    cfg = write_config(tmp_path, BLOCK_FLAT)
    code = run(["invariant", "--config", cfg, "--out", str(tmp_path)])
    assert code == 3
    report = load(tmp_path, "invariant_report.json")
    assert not report["unique"]


def test_fixpoint_command(tmp_path):
    cfg = write_config(tmp_path, FULL_HALF)
    code = run(["fixpoint", "--config", cfg, "--out", str(tmp_path)])
    assert code == 0
    report = load(tmp_path, "fixpoint_report.json")
    assert report["status"] == "converged"
    assert report["residual"] <= 1e-10
    lines = (tmp_path / "fixed_function.csv").read_text().splitlines()
    assert lines[0] == "word,value"
    nu_lines = (tmp_path / "fixed_functional.csv").read_text().splitlines()
    assert nu_lines[1].startswith("1,0.75")


def test_fixpoint_degenerate_exit(tmp_path):
    cfg = write_config(tmp_path, DEGENERATE)
    code = run(["fixpoint", "--config", cfg, "--out", str(tmp_path)])
    assert code == 4
    report = load(tmp_path, "fixpoint_report.json")
    assert report["status"] == "degenerate"


def test_verify_command_clean(tmp_path):
    cfg = write_config(tmp_path, FULL_HALF)
    code = run(["verify", "--config", cfg, "--depth", "3", "--out", str(tmp_path)])
    assert code == 0
    report = load(tmp_path, "verify_report.json")
    assert report["passed"]
    for key in (
        "base_fixed_point",
        "strong_invariance",
        "marginal_consistency",
        "quasi_invariance",
        "mass_conservation",
        "weight_pushforward",
        "isometry",
    ):
        assert report["residuals"][key] <= 1e-12, key


def test_verify_corrupted_fixture(tmp_path):
    cfg = write_config(tmp_path, CORRUPTED)
    code = run(
        ["verify", "--config", cfg, "--depth", "1", "--steps", "2", "--out", str(tmp_path)]
    )
    assert code == 1
    report = load(tmp_path, "verify_report.json")
    assert not report["passed"]
    assert report["worst_residual"] >= 0.1


def test_sample_command(tmp_path):
    cfg = write_config(tmp_path, FULL_MARKOV)
    code = run(
        [
            "sample",
            "--config",
            cfg,
            "--depth",
            "2",
            "--steps",
            "2",
            "--samples",
            "2000",
            "--seed",
            "6",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 0
    report = load(tmp_path, "sample_report.json")
    assert report["passed"]
    lines = (tmp_path / "samples.csv").read_text().splitlines()
    assert lines[0] == "sample_id,base_word,prepends"
    assert len(lines) == 2001
    sid, base, prep = lines[1].split(",")
    assert sid == "0" and len(base) == 2 and len(prep) == 2


def test_sample_zero_mass_exit(tmp_path):
    cfg = write_config(tmp_path, CORRUPTED)
    code = run(
        [
            "sample",
            "--config",
            cfg,
            "--depth",
            "1",
            "--steps",
            "5",
            "--samples",
            "64",
            "--tol",
            "1.0",
            "--out",
            str(tmp_path),
        ]
    )
    assert code == 5


def test_sample_gate_rejects_bad_base(tmp_path):
    """Without a loose tolerance the corrupted base fails the gate first."""
    cfg = write_config(tmp_path, CORRUPTED)
    code = run(
        ["sample", "--config", cfg, "--depth", "1", "--steps", "2", "--out", str(tmp_path)]
    )
    assert code == 1


def test_ergodicity_command_extremal(tmp_path):
    cfg = write_config(tmp_path, FULL_HALF)
    code = run(["ergodicity", "--config", cfg, "--depth", "2", "--out", str(tmp_path)])
    assert code == 0
    report = load(tmp_path, "ergodicity_report.json")
    assert report["extremal"]
    assert report["solution_dim"] == 1
    assert report["decomposition"] is None


def test_ergodicity_command_decomposes(tmp_path):
    cfg = write_config(tmp_path, BLOCK_FLAT)
    code = run(["ergodicity", "--config", cfg, "--depth", "1", "--out", str(tmp_path)])
    assert code == 6
    report = load(tmp_path, "ergodicity_report.json")
    assert report["solution_dim"] == 2
    assert report["decomposition"]["lambda"] == pytest.approx(0.25, abs=1e-12)
    c1 = (tmp_path / "component_1.csv").read_text().splitlines()
    c2 = (tmp_path / "component_2.csv").read_text().splitlines()
    assert c1[0] == "word,mass" and len(c1) == 5 and len(c2) == 5
    word, mass = c1[1].split(",")
    assert word == "1"
    assert float(mass) == pytest.approx(0.5, abs=1e-12)


def test_config_errors_exit_two(tmp_path):
    bad = dict(GOLDEN_FLAT)
    bad["V"] = {"depth": 1, "values": {"1": 1.0}}  # missing word "2"
    cfg = write_config(tmp_path, bad)
    assert run(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 0
    assert run(["fixpoint", "--config", cfg, "--out", str(tmp_path)]) == 2

    inadmissible = dict(GOLDEN_FLAT)
    inadmissible["V"] = {"depth": 2, "values": {"11": 1, "12": 1, "21": 1, "22": 1}}
    cfg = write_config(tmp_path, inadmissible)
    assert run(["fixpoint", "--config", cfg, "--out", str(tmp_path)]) == 2

    assert run(["fixpoint", "--config", str(tmp_path / "missing.json"), "--out", str(tmp_path)]) == 2

    not_json = tmp_path / "broken.json"
    not_json.write_text("{not json")
    assert run(["fixpoint", "--config", str(not_json), "--out", str(tmp_path)]) == 2

    zero_col = dict(GOLDEN_FLAT)
    zero_col["matrix"] = [[1, 0], [1, 0]]
    cfg = write_config(tmp_path, zero_col)
    assert run(["invariant", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_filter_mismatch_exit_two(tmp_path):
    bad = json.loads(json.dumps(FULL_HALF))
    bad["filter"]["values"]["1"] = [1.0, 0.0]
    cfg = write_config(tmp_path, bad)
    assert run(["verify", "--config", cfg, "--out", str(tmp_path)]) == 2


def test_outputs_reproducible(tmp_path):
    cfg_a = write_config(tmp_path, FULL_MARKOV, "a.json")
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    args = [
        "sample",
        "--config",
        cfg_a,
        "--depth",
        "2",
        "--steps",
        "2",
        "--samples",
        "3000",
        "--seed",
        "42",
    ]
    assert run(args + ["--out", str(out1)]) == 0
    assert run(args + ["--workers", "4", "--out", str(out2)]) == 0
    for name in ("samples.csv", "sample_report.json"):
        assert (out1 / name).read_bytes() == (out2 / name).read_bytes()


def test_report_hash_tracks_config(tmp_path):
    cfg1 = write_config(tmp_path, GOLDEN_FLAT, "one.json")
    out1, out2 = tmp_path / "h1", tmp_path / "h2"
    run(["invariant", "--config", cfg1, "--out", str(out1)])
    changed = dict(GOLDEN_FLAT)
    changed["V"] = {"depth": 1, "values": {"1": 1.0, "2": 0.9}}
    cfg2 = write_config(tmp_path, changed, "two.json")
    run(["invariant", "--config", cfg2, "--out", str(out2)])
    h1 = json.loads((out1 / "invariant_report.json").read_text())["config_sha256"]
    h2 = json.loads((out2 / "invariant_report.json").read_text())["config_sha256"]
    assert h1 != h2
