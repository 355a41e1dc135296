import json
import math

import numpy as np
import pytest

from gbspec.cli import main

PROBLEM_1D = {
    "d": 1, "kappa": "1", "beta": "0", "gamma": "0",
    "family": "hyperbolic", "alpha": 10.0, "mode": "nonnested", "p": 3,
    "geometry": {"G": "x", "G1": None, "G2": None},
}

PROBLEM_2D = {
    "d": 2, "K": [["1", "0"], ["0", "1"]], "beta": ["0", "0"], "gamma": "0",
    "nu": [1, 1], "p": [2, 2], "family": ["polynomial", "polynomial"],
    "mode": "nested",
}


@pytest.fixture
def config_1d(tmp_path):
    path = tmp_path / "problem.json"
    path.write_text(json.dumps(PROBLEM_1D))
    return str(path)


@pytest.fixture
def config_2d(tmp_path):
    path = tmp_path / "problem2d.json"
    path.write_text(json.dumps(PROBLEM_2D))
    return str(path)


def run(capsys, *argv) -> tuple[int, str]:
    code = main(list(argv))
    return code, capsys.readouterr().out


class TestSymbolCommand:
    def test_row_count_contract(self, capsys):
        code, out = run(capsys, "symbol", "--kind", "f", "--p", "3",
                        "--family", "hyperbolic", "--alpha", "10",
                        "--grid", "512")
        assert code == 0
        lines = out.strip().splitlines()
        assert len(lines) == 513
        assert lines[0] == "theta,value"

    def test_deterministic_output(self, capsys):
        args = ("symbol", "--kind", "h", "--p", "4", "--family",
                "trigonometric", "--alpha", "1.2", "--grid", "64")
        _, first = run(capsys, *args)
        _, second = run(capsys, *args)
        assert first == second

    def test_missing_alpha(self, capsys):
        code, _ = run(capsys, "symbol", "--kind", "f", "--p", "3",
                      "--family", "hyperbolic")
        assert code == 1


class TestToeplitzCommand:
    def test_analytic_eigenvalues(self, capsys):
        code, out = run(capsys, "toeplitz", "--symbol", "f", "--p", "2",
                        "--family", "polynomial", "--m", "3", "--eig")
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        eigs = sorted(float(re) for re, _ in rows)
        ref = [2 - math.sqrt(2), 2.0, 2 + math.sqrt(2)]
        assert np.allclose(eigs, ref, atol=1e-9)


class TestCardinalAndBounds:
    def test_cardinal_values(self, capsys):
        code, out = run(capsys, "cardinal", "--family", "polynomial",
                        "--p", "2", "--grid", "7")
        assert code == 0
        rows = [line.split(",") for line in out.strip().splitlines()[1:]]
        ts = [float(a) for a, _ in rows]
        assert ts[0] == 0.0 and ts[-1] == 3.0

    def test_bounds_json(self, capsys):
        code, out = run(capsys, "bounds", "--p", "5", "--family",
                        "hyperbolic", "--alpha", "10", "--grid", "256")
        assert code == 0
        payload = json.loads(out)
        assert payload["lower_status"] == "PROVED"
        assert payload["upper_violations"] == 0

    def test_decay_table(self, capsys):
        code, out = run(capsys, "decay", "--family", "polynomial",
                        "--pmin", "2", "--pmax", "6")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 5


class TestAssembleAndEig:
    def test_matrix_shape(self, capsys, config_1d):
        code, out = run(capsys, "assemble", "--config", config_1d, "--n", "8")
        assert code == 0
        rows = out.strip().splitlines()[1:]
        assert len(rows) == 8 + 3 - 2

    def test_npy_roundtrip(self, capsys, config_1d, tmp_path):
        target = tmp_path / "matrix.npy"
        code, _ = run(capsys, "assemble", "--config", config_1d, "--n", "8",
                      "--format", "npy", "--out", str(target))
        assert code == 0
        mat = np.load(target)
        assert mat.shape == (9, 9)

    def test_split_parts(self, capsys, config_1d):
        parts = {}
        for part in ("full", "stiffness", "advection", "mass"):
            code, out = run(capsys, "assemble", "--config", config_1d,
                            "--n", "8", "--part", part)
            assert code == 0
            rows = out.strip().splitlines()[1:]
            parts[part] = np.array([[float(v) for v in r.split(",")]
                                    for r in rows])
        # kappa = 1, beta = gamma = 0, identity map: A = n^2 * stiffness
        assert np.allclose(64 * parts["stiffness"], parts["full"], atol=1e-9)
        assert parts["mass"].shape == parts["advection"].shape == (9, 9)

    def test_normalized_requires_full(self, capsys, config_1d):
        code, _ = run(capsys, "assemble", "--config", config_1d, "--n", "8",
                      "--part", "mass", "--normalized")
        assert code == 1

    def test_eig_rows(self, capsys, config_1d):
        code, out = run(capsys, "eig", "--config", config_1d, "--n", "8")
        assert code == 0
        assert len(out.strip().splitlines()) == 10


class TestDistributionCommands:
    def test_1d_report(self, capsys, config_1d):
        code, out = run(capsys, "distribution", "--config", config_1d,
                        "--n", "16,32", "--eps", "2.0")
        assert code == 0
        payload = json.loads(out)
        runs = payload["runs"]
        assert [r["n"] for r in runs] == [16, 32]
        assert runs[1]["mean_abs_discrepancy"] < runs[0]["mean_abs_discrepancy"]
        assert "2" in runs[0]["outliers"]

    def test_2d_report(self, capsys, config_2d):
        code, out = run(capsys, "distribution-md", "--config", config_2d,
                        "--n", "6")
        assert code == 0
        payload = json.loads(out)
        assert payload["runs"][0]["order"] == 36

    def test_invalid_config_exits_one(self, capsys, tmp_path):
        bad = tmp_path / "bad.json"
        bad.write_text(json.dumps({"d": 1, "kappa": "x-2"}))
        code, _ = run(capsys, "distribution", "--config", str(bad), "--n", "8")
        assert code == 1

    def test_infeasible_phase_exits_one(self, capsys, tmp_path):
        cfg = dict(PROBLEM_1D, family="trigonometric", alpha=4.0)
        path = tmp_path / "trig.json"
        path.write_text(json.dumps(cfg))
        code, _ = run(capsys, "distribution", "--config", str(path), "--n", "8")
        assert code == 1


def test_unknown_command_exits_one(capsys):
    assert main(["frobnicate"]) == 1


def test_thread_cap_env_var(capsys, config_1d, monkeypatch):
    args = ("distribution", "--config", config_1d, "--n", "8,16")
    monkeypatch.setenv("GBSPEC_THREADS", "1")
    code, serial = run(capsys, *args)
    assert code == 0
    monkeypatch.setenv("GBSPEC_THREADS", "4")
    _, parallel = run(capsys, *args)
    assert serial == parallel

    monkeypatch.setenv("GBSPEC_THREADS", "zebra")
    code, _ = run(capsys, *args)
    assert code == 1
