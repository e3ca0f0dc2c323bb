import json
import math
import os
import subprocess

import numpy as np
import pytest

import regopt


def test_normal_rows_are_unit():
    rng = np.random.default_rng(0)
    m = rng.standard_normal((4, 9))
    out = regopt.normal(m, "2")
    np.testing.assert_allclose(np.linalg.norm(out, axis=1), 1.0, rtol=1e-14)
    assert abs(regopt.rms(out) - regopt.rms_closed_form(4, 9)) < 1e-12


def test_racs_iterate_and_svd():
    out = regopt.racs_iterate(np.diag([2.0, 5.0]), "2", 3)
    np.testing.assert_allclose(out, np.eye(2), atol=1e-15)
    np.testing.assert_allclose(regopt.singular_values(np.ones((2, 2))), [2.0, 0.0], atol=1e-12)


def test_optimizer_step_hits_target_rms():
    opt = regopt.Optimizer(json.dumps({"name": "reg", "alpha": 1.0, "rho_target": 0.3}))
    w = np.zeros((3, 5))
    g = np.arange(15, dtype=float).reshape(3, 5) + 1.0
    w2 = opt.step(w, g)
    assert abs(regopt.rms(w - w2) - 0.3) < 1e-12


def test_run_returns_columns():
    out = regopt.run({"problem": {"name": "quadratic", "m": 2, "n": 4},
                      "optimizer": {"name": "adam", "alpha": 0.01}, "iterations": 20})
    assert out["status"] == "ok"
    assert len(out["f"]) == 20
    assert out["f"][-1] < out["f"][0]


def test_config_errors_raise_value_error():
    with pytest.raises(ValueError):
        regopt.run({"problem": {"name": "quadratic"}, "iterations": 0})
    with pytest.raises(ValueError):
        regopt.normal(np.ones(3))


def test_verify_rms_theorem():
    reports = regopt.verify("T2", 0)
    assert len(reports) == 1
    assert reports[0]["passed"] is True


@pytest.mark.skipif("REGOPT_CLI" not in os.environ, reason="CLI path not provided")
def test_cli_run_matches_header(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"problem": {"name": "quadratic"}, "iterations": 5}))
    subprocess.run([os.environ["REGOPT_CLI"], "run", "--config", str(cfg), "--out", str(tmp_path)],
                   check=True, capture_output=True)
    first = (tmp_path / "run.csv").read_text().splitlines()[0]
    assert first == regopt.CSV_HEADER
