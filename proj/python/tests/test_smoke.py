import math

import numpy as np
import pytest

import ffkyp


def test_published_delta_arithmetic():
    d2 = ffkyp.delta_squared(164.62, trace_w_p=0.4858, trace_w_dot_p=0.1017)
    assert d2 == pytest.approx(34.4624, rel=5e-3)
    cutoff = float(ffkyp.enlarge_range("low:1", 34.4624).split(":")[1])
    assert cutoff == pytest.approx(5.955, rel=1e-3)


def test_scalar_gramian():
    w = ffkyp.gramian(np.array([[-1.0]]), np.array([[1.0]]), "low:1")
    assert w.shape == (1, 1)
    assert w[0, 0] == pytest.approx(math.pi / 2, abs=1e-6)


def test_analyze_lti_dict():
    system = {
        "n": 1, "inputs": 1, "outputs": 1, "params": 0,
        "A0": [[-1.0]], "A": [], "B0": [[1.0]], "B": [], "C0": [[1.0]], "C": [],
        "D0": [[0.0]], "D": [], "p_lower": [], "p_upper": [], "rate_lower": [], "rate_upper": [],
    }
    r = ffkyp.analyze(system, range="low:1", mode="gkyp", tol=1e-6)
    assert r["gamma_star"] == pytest.approx(1.0, rel=1e-4)
    assert r["mode"] == "gkyp"


def test_unstable_system_raises():
    system = {
        "n": 1, "inputs": 1, "outputs": 1, "params": 0,
        "A0": [[1.0]], "A": [], "B0": [[1.0]], "B": [], "C0": [[1.0]], "C": [],
        "D0": [[0.0]], "D": [], "p_lower": [], "p_upper": [], "rate_lower": [], "rate_upper": [],
    }
    with pytest.raises(ffkyp.InfeasibleError):
        ffkyp.analyze(system, mode="lpv_ef")


def test_example_pipeline():
    assert ffkyp.gap_squared("example1", "low:1") == pytest.approx(163.6235, abs=1e-3)
    uas = ffkyp.certify_uas("example1", c3=7.4, c1=0.5, c2=0.6)
    assert uas["alpha"] == pytest.approx(1.2)
    sim = ffkyp.simulate("example1", t_end=20.0, ranges=["low:1", "low:5.955"])
    assert sim["iqc"]["low:1"] < 0.0
    assert sim["iqc"]["low:5.955"] > 0.0
    assert len(sim["t"]) == sim["x"].shape[0] == 20001


def test_cli_in_process(tmp_path):
    code, out, err = ffkyp.run_cli(["--out", str(tmp_path), "certify-uas", "--c1", "0.5", "--c2", "0.6"])
    assert code == 0, err
    assert "alpha = 1.2" in out
    assert (tmp_path / "uas.json").exists()
    code, _, _ = ffkyp.run_cli(["reproduce", "example9"])
    assert code == 1
