import math

import pytest

import ssgap

def _oracle():
    """log E values frozen from mpmath in tests/unit/oracles.hpp."""
    import pathlib
    import re

    text = (pathlib.Path(__file__).parents[1] / "unit" / "oracles.hpp").read_text()
    body = re.search(r"kFredholmLogE\[\] = \{([^}]*)\}", text).group(1)
    return [float(v) for v in re.findall(r"[-+0-9.eE]+", body)]


def test_gap_matches_oracle():
    log_e = _oracle()[1]  # a = 0, x = 0.5
    for method in ssgap.METHODS:
        r = ssgap.gap(0.0, 0.5, method=method)
        assert abs(math.log(r["E"]) - log_e) < 1e-6


def test_gap_all_agrees():
    results, disc = ssgap.gap_all(1.0, 1.0)
    assert len(results) == 4
    assert disc < 1e-5


def test_gap_at_zero():
    assert ssgap.gap(0.25, 0.0)["E"] == 1.0


def test_tau_and_hard_edge():
    x = 1.5
    i0 = ssgap.tau_diag(1, x)
    assert ssgap.tau_diag(0, x) == 1.0
    assert abs(ssgap.hard_edge_gap(1.0, 4 * x) - math.exp(-x) * i0) < 1e-8


def test_backlund_s2():
    v1, v2, q, p, s, sh = ssgap.backlund_apply("s2", (0.3, 0.7, 0.5, 0.2, 1.5))
    assert (v1, v2, q, s) == (0.3, -0.7, -0.5, -1.5)
    assert p == pytest.approx(0.8)
    assert sh == pytest.approx(0.48 - 1.5)


def test_verify_classical():
    rep = ssgap.verify("classical")
    assert rep["suite"] == "classical"
    assert all(c["pass"] for c in rep["checks"])


def test_route_validity_error():
    with pytest.raises(ssgap.RouteValidityError):
        ssgap.gap(0.6, 1.0, method="cross", eps=-1)
    with pytest.raises(ValueError):
        ssgap.gap(-0.7, 1.0)
