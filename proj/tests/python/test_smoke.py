import math
import os

import pytest

import filippov as fp

DATA = os.environ.get("FILIPPOV_TEST_DATA", os.path.join(os.path.dirname(__file__), "..", "data"))


def one_fold(mu):
    return fp.System(("x+y-1", "-x+y-1"), (f"-x^2+1.5*x-0.5-({mu!r})", "1"), "y")


def test_expression_round_trip():
    e = fp.Expr("x^2*sin(y)")
    assert fp.Expr(str(e))(0.3, 0.7) == e(0.3, 0.7)
    assert e.derivative("x")(2.0, 0.5) == pytest.approx(4.0 * math.sin(0.5))
    with pytest.raises(fp.FilippovError):
        fp.Expr("2x")


def test_direction_function_values():
    s = one_fold(0.0)
    assert fp.direction_function(s, 0.5) == pytest.approx(-0.2, abs=1e-12)
    assert fp.direction_function(s, 1.5) == pytest.approx(-3 / 14, abs=1e-12)
    assert fp.classify_point(s, -1.0, 0.0)["region"] == "FoldVisible"


def test_canard_kind_three():
    r = fp.detect_canard(one_fold(0.25))
    assert r["found"]
    assert r["kind"] == "III"
    assert r["conditions"]["theorem_a"] == r["conditions"]["corollary"]
    pes = fp.pseudo_equilibria(one_fold(-0.25), -0.99, 5.0)
    assert [p["kind"] for p in pes] == ["SigmaSaddle", "SigmaAttractor"]


def test_system_file_and_scan():
    s = fp.System.from_file(os.path.join(DATA, "loop_canard.sys"))
    assert fp.detect_canard(s)["found"]
    scan = fp.sigma_loop_scan(os.path.join(DATA, "loop_family.sys"), -0.5, 0.5, 11)
    assert abs(scan["bifurcation_mu"]) < 1e-6


def test_index_and_blowup():
    saddle = fp.System(("x", "-y"), ("x", "-y"), "y+5")
    assert fp.circle_winding(saddle, 0.0, 0.0, 1.0)["index"] == -1
    vertical_switch = fp.System(("x+y-1", "-x+y+1"), ("1", "2"), "x")
    assert fp.slow_manifold(vertical_switch, math.pi / 4) == pytest.approx([1.0], abs=1e-9)
    trace = fp.trace_slow_dynamics(vertical_switch, -50.0, 5.0)
    assert len(trace["branches"]) == 1


def test_errors_are_translated():
    with pytest.raises(fp.FilippovError):
        fp.detect_canard(fp.System(("3*y^2-y-2", "1"), ("-3*y^2-y+2", "-1"), "x"))
