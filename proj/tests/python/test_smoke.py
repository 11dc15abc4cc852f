"""Smoke tests for the Python bindings.

In a dev build the extension directory is injected through PYTHONPATH and the
pure-python package directory through CVTEST_PY_PKG; an installed wheel needs
neither variable.
"""

import math
import os
import sys

_pkg_dir = os.environ.get("CVTEST_PY_PKG")
if _pkg_dir and _pkg_dir not in sys.path:
    sys.path.insert(0, _pkg_dir)

import pytest

import cvtest


def test_generate_shapes_and_determinism():
    a = cvtest.generate("s6", c=1.0, n=50, seed=7)
    b = cvtest.generate("s6", c=1.0, n=50, seed=7)
    assert len(a["x"]) == 50 and len(a["y"]) == 50
    assert a["x"] == b["x"] and a["y"] == b["y"]
    assert all(0.0 <= xi <= 1.0 for xi in a["x"])

    r = cvtest.generate("sta1", n=40, seed=3)
    assert len(r["x"]) == 40 and len(r["series"]) == 41
    assert r["x"] == r["series"][:-1] and r["y"] == r["series"][1:]


def test_fit_recovers_a_line():
    n = 200
    x = [i / (n - 1) for i in range(n)]
    y = [2.0 + 3.0 * xi for xi in x]
    out = cvtest.fit(x, y, h_mean=0.2, h_var=0.2)
    for xi, mi in zip(x, out["m_hat"]):
        assert abs(mi - (2.0 + 3.0 * xi)) < 1e-8
    assert all(abs(r) < 1e-8 for r in out["residuals"])


def test_run_test_reports_consistent_fields():
    data = cvtest.generate("s6", c=1.0, n=100, seed=11)
    out = cvtest.run_test(data["x"], data["y"], B=50, seed=5)
    assert out["t_n"] == pytest.approx(out["t_n"])  # finite
    assert 0.0 < out["p_value"] <= 1.0
    assert len(out["t_star"]) == 50
    assert set(out["rejections"]) == {0.025, 0.05, 0.10, 0.20}
    # Same call is bitwise reproducible.
    again = cvtest.run_test(data["x"], data["y"], B=50, seed=5)
    assert again["t_n"] == out["t_n"] and again["t_star"] == out["t_star"]
    # Monotone decisions: rejecting at a small level implies rejecting at a
    # larger one.
    levels = sorted(out["rejections"])
    for lo, hi in zip(levels, levels[1:]):
        assert (not out["rejections"][lo]) or out["rejections"][hi]


def test_input_validation_raises_value_error():
    with pytest.raises(ValueError):
        cvtest.run_test([0.1, 0.2, 0.3], [1.0, 2.0, 3.0])  # too short
    with pytest.raises(ValueError):
        cvtest.generate("nope")
    with pytest.raises(ValueError):
        cvtest.run_test([0.1] * 10, [math.nan] * 10)


def test_simulate_small_cell():
    rep = cvtest.simulate("s6", c=1.0, n=50, runs=4, B=20, seed=2, jobs=1)
    assert rep["model"] == "s6"
    assert rep["runs"] == 4 and rep["failures"] == 0
    assert len(rep["frequencies"]) == len(rep["alphas"])
    for f in rep["frequencies"]:
        assert 0.0 <= f <= 1.0
