import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from polarwave.errors import DegenerateLeadingCoefficient, NoConvergence, NonFinite
from polarwave.numerics import (
    OdeState,
    RootKind,
    bisect_root,
    cubic_real_roots,
    damped_fixed_point,
    rk4_evolve,
    second_derivative,
)


def test_second_derivative_examples():
    for x0 in (-3.0, 0.0, 7.5):
        assert second_derivative(lambda x: x * x, x0, 1e-3) == pytest.approx(2.0, abs=1e-8)
    assert second_derivative(math.cos, 0.0, 1e-2) == pytest.approx(-1.0, abs=1e-8)


@given(st.floats(-1.0, 1.0))
def test_second_derivative_step_halving_on_quadratic(x0):
    # exact for quadratics, so only rounding (~eps |f| / h^2) separates the two results
    a = second_derivative(lambda x: x * x, x0, 1e-2)
    b = second_derivative(lambda x: x * x, x0, 5e-3)
    assert abs(a - b) < 1e-10


def test_second_derivative_fourth_order():
    errs = [abs(second_derivative(math.exp, 0.3, h) - math.exp(0.3)) for h in (0.1, 0.05)]
    assert errs[0] / errs[1] > 12


def test_second_derivative_nonfinite():
    with pytest.raises(NonFinite):
        second_derivative(lambda x: math.inf if x > 0.5 else x, 0.5, 0.1)


def test_cubic_examples():
    assert cubic_real_roots(1, 0, 0, -1).roots == pytest.approx((1.0,))
    r = cubic_real_roots(1, -6, 11, -6)
    assert r.discriminant_sign is RootKind.THREE_REAL
    assert r.roots == pytest.approx((1.0, 2.0, 3.0), rel=1e-12)
    # double root collapses to two distinct values
    assert cubic_real_roots(1, -4, 5, -2).roots == pytest.approx((1.0, 2.0), rel=1e-7)
    # complex pair a hair off the real axis is not reported as a real root
    assert cubic_real_roots(1.0, 3.0, 0.0, 1.7e-133).roots == pytest.approx((-3.0,))
    with pytest.raises(DegenerateLeadingCoefficient):
        cubic_real_roots(1e-40, 1, 1, 1)


def _check_residual(c, roots):
    for r in roots:
        val = c[0] * r**3 + c[1] * r**2 + c[2] * r + c[3]
        scale = max(abs(c[0] * r**3), abs(c[1] * r**2), abs(c[2] * r), abs(c[3]))
        assert abs(val) <= 1e-9 * scale


@given(st.lists(st.floats(-100, 100, allow_subnormal=False), min_size=3, max_size=3), st.floats(0.1, 10))
def test_cubic_from_factored(roots, lead):
    roots = sorted(roots)
    assume(min(np.diff(roots)) > 1e-3 * max(1.0, max(map(abs, roots))))
    c = lead * np.poly(roots)
    found = cubic_real_roots(*c)
    assert len(found) == 3
    assert found.roots == pytest.approx(tuple(roots), rel=1e-7, abs=1e-7)
    _check_residual(c, found.roots)


@given(st.lists(st.floats(-1e3, 1e3, allow_subnormal=False), min_size=4, max_size=4))
def test_cubic_residual_bound(c):
    assume(abs(c[0]) > 1e-3)
    found = cubic_real_roots(*c)
    assert 1 <= len(found) <= 3
    assert list(found.roots) == sorted(found.roots)
    _check_residual(c, found.roots)
    # numpy companion-matrix roots as an independent count check
    ref = np.roots(c)
    real = ref[np.abs(ref.imag) <= 1e-7 * np.maximum(1.0, np.abs(ref))]
    if len(real) in (1, 3) and len(found) in (1, 3):
        spread = np.min(np.abs(np.diff(np.sort(real.real)))) if len(real) > 1 else 1.0
        if spread > 1e-4:
            assert len(found) == len(real)


def test_rk4_exponential_and_order():
    def rhs(t, y):
        return -y

    errs = []
    for dt in (1e-3, 2e-2, 1e-2):
        y = rk4_evolve(rhs, OdeState(0.0, [1.0]), 1.0, dt).y[0]
        errs.append(abs(y - math.exp(-1)))
    assert errs[0] < 1e-8
    assert errs[1] / errs[2] >= 8


def test_rk4_rotation_preserves_norm():
    w = 2.0
    y = rk4_evolve(lambda t, y: 1j * w * y, OdeState(0.0, [1.0]), 5.0, 1e-3).y[0]
    assert abs(abs(y) - 1) < 1e-8
    assert y == pytest.approx(np.exp(1j * w * 5.0), abs=1e-8)


def test_rk4_lands_on_t_end():
    s = rk4_evolve(lambda t, y: np.ones_like(y), OdeState(0.0, [0.0]), 1.05, 0.1)
    assert s.t == 1.05
    assert s.y[0] == pytest.approx(1.05, rel=1e-12)


@pytest.mark.filterwarnings("ignore::RuntimeWarning")
def test_rk4_nonfinite_reports_time():
    with pytest.raises(NonFinite) as info:
        rk4_evolve(lambda t, y: y**2, OdeState(0.0, [1.0]), 2.0, 1e-3)
    assert info.value.where is not None and 0.9 < info.value.where < 2.0
    with pytest.raises(NonFinite):
        OdeState(0.0, [math.nan])


def test_fixed_point_examples():
    assert damped_fixed_point(np.cos, 1.0)[0] == pytest.approx(0.739085133, abs=1e-9)
    y0 = np.array([0.3, -2.0])
    assert np.array_equal(damped_fixed_point(lambda y: y, y0), y0)
    assert abs(damped_fixed_point(lambda y: y / 2, 5.0, tol=1e-12)[0]) < 1e-11


def test_fixed_point_resolves_tiny_scales():
    # the stopping test is relative, so a fixed point near 1e-38 is not mistaken for zero
    y = damped_fixed_point(lambda y: 0.5 * y + 1e-38, 0.0, tol=1e-14)
    assert y[0] == pytest.approx(2e-38, rel=1e-12)


def test_fixed_point_no_convergence():
    with pytest.raises(NoConvergence) as info:
        damped_fixed_point(lambda y: y + 1.0, 0.0, max_iter=50)
    assert info.value.residual == pytest.approx(1.0)


def test_bisect_root():
    assert bisect_root(lambda x: x * x - 2, 0.0, 2.0) == pytest.approx(math.sqrt(2), rel=1e-14)
    with pytest.raises(ValueError):
        bisect_root(lambda x: x * x + 1, -1.0, 1.0)
