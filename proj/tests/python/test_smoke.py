import math

import pytest

import curvkit


def test_round_sphere_curvature():
    c = curvkit.curvature("S4", [0.1, 0.2, -0.3, 0.05])
    assert c["scalar"] == pytest.approx(12.0, rel=1e-12)
    assert c["ric_norm2"] == pytest.approx(36.0, rel=1e-12)
    assert c["weyl_norm2"] == pytest.approx(0.0, abs=1e-12)


def test_hyperbolic_identity():
    c = curvkit.curvature("H4", [0.3, -0.1, 0.2, 0.4])
    assert -3 * c["rm_norm2"] + 8 * c["ric_norm2"] == pytest.approx(216.0, rel=1e-10)


def test_gbc4_sphere():
    b = curvkit.gbc4("S4", 12)
    assert b["total"] == pytest.approx(64 * math.pi**2, rel=1e-6)
    assert round(b["chi_estimate"]) == 2


def test_volumes():
    assert curvkit.atlas_volume("S4", 12) == pytest.approx(8 * math.pi**2 / 3, rel=1e-6)
    v, err = curvkit.ball_volume("E4", [0, 0, 0, 0], 1.0)
    assert v == pytest.approx(math.pi**2 / 2, rel=1e-12)
    g = curvkit.gray_coefficients("S4", [0, 0, 0, 0])
    assert g["c2"] == pytest.approx(-1 / 3, rel=1e-12)


def test_schottky():
    d = curvkit.schottky_exponent(6.0, 8)
    growth, knee = d["growth_fit"][0], d["series_knee"][0]
    assert 0 < growth < 1
    assert abs(growth - knee) < 0.05


def test_errors():
    with pytest.raises(ValueError):
        curvkit.ball_volume("S4", [0, 0, 0, 0], -1.0)
    with pytest.raises(Exception):
        curvkit.curvature("nosuch", [0.0])


def test_verify_report():
    report = curvkit.verify("kleinian", fast=True, checks=["delta/cyclic"])
    assert report["schema"] == "curvkit-report/1"
    checks = report["suites"][0]["checks"]
    assert {c["id"] for c in checks} == {"delta/cyclic", "delta/cyclic/elementary", "delta/cyclic/clusters"}
    assert all(c["pass"] for c in checks)
    assert "kleinian" in curvkit.suite_names()
