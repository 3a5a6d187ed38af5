import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from travgraph.errors import DomainError
from travgraph.params import PolarPoint, from_polar, make_params, normalize_angle, polar_arrays, to_polar


def test_planar_case():
    p = make_params(math.pi / 2, 1.0, 3)
    assert p.c == 1.0 and p.cot_alpha == 0.0 and p.b == 0.0
    assert p.planar


def test_quarter_angle():
    p = make_params(math.pi / 4, 1.0, 3)
    assert p.c == pytest.approx(math.sqrt(2), rel=1e-15)
    assert p.cot_alpha == pytest.approx(1.0, rel=1e-15)
    assert p.b == pytest.approx(math.sqrt(2) / 2, rel=1e-15)


def test_sixth_angle():
    p = make_params(math.pi / 6, 2.0, 3)
    assert p.c == pytest.approx(4.0, rel=1e-15)
    assert p.cot_alpha == pytest.approx(math.sqrt(3), rel=1e-15)
    assert p.b == pytest.approx(math.sqrt(3), rel=1e-15)


@pytest.mark.parametrize("alpha,c0,N", [(0.0, 1.0, 3), (math.pi / 2 + 1e-9, 1.0, 3), (-1, 1.0, 3),
                                        (0.5, 0.0, 3), (0.5, -1.0, 3), (0.5, 1.0, 1), (0.5, 1.0, 2.5),
                                        (float("nan"), 1.0, 3)])
def test_rejects_bad_constants(alpha, c0, N):
    with pytest.raises(DomainError):
        make_params(alpha, c0, N)


def test_random_invariants():
    rng = np.random.default_rng(0)
    for _ in range(1000):
        a = rng.uniform(1e-3, math.pi / 2)
        c0 = math.exp(rng.uniform(-3, 3))
        p = make_params(a, c0)
        assert p.c * math.sin(a) == pytest.approx(c0, rel=1e-13)
        assert p.cot_alpha ** 2 == pytest.approx((p.c / c0) ** 2 - 1, rel=1e-13, abs=1e-13)
        assert p.c >= p.c0


def test_gamma_lambda_round_trip(p45):
    lam = np.array([0.1, 1.0, 7.0])
    assert np.allclose(p45.lambda_from_gamma(p45.gamma_from_lambda(lam)), lam, rtol=1e-14)


@pytest.mark.parametrize("x,r,theta", [((1, 0), 1, 0), ((0, -2), 2, 3 * math.pi / 2), ((0, 0), 0, 0)])
def test_polar_examples(x, r, theta):
    p = to_polar(x)
    assert p.r == pytest.approx(r, abs=1e-15)
    assert p.theta == pytest.approx(theta, abs=1e-15)


@settings(max_examples=300, deadline=None)
@given(st.floats(-1e6, 1e6), st.floats(-1e6, 1e6))
def test_polar_round_trip(a, b):
    x = np.array([a, b])
    p = to_polar(x)
    assert 0 <= p.theta < 2 * math.pi
    assert np.all(np.abs(from_polar(p) - x) <= 1e-12 * (1 + np.hypot(a, b)))


def test_polar_arrays_matches_scalar():
    rng = np.random.default_rng(3)
    X = rng.normal(size=(50, 2)) * 10
    r, th = polar_arrays(X)
    for x, ri, ti in zip(X, r, th):
        p = to_polar(x)
        assert ri == p.r and ti == pytest.approx(p.theta, abs=1e-15)


def test_normalize_angle_range():
    t = normalize_angle(np.array([-1e-18, -2 * math.pi, 7.0, 2 * math.pi]))
    assert np.all((t >= 0) & (t < 2 * math.pi))
    assert normalize_angle(-1e-18) == 0.0 or normalize_angle(-1e-18) < 2 * math.pi


def test_polar_point_value_type():
    assert PolarPoint(1.0, 0.5) == PolarPoint(1.0, 0.5)
