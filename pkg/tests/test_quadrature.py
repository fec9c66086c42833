import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from halfline.errors import LimitDiverges, NoConvergence, NonFiniteIntegrand, ToleranceNotMet
from halfline.quadrature import (NODES, W_GAUSS, W_KRONROD, LimitSpec, QuadratureSpec, integrate,
                                 integrate_semi_infinite, limit_extrapolate, truncation_radius)


def test_kronrod_rule_is_exact_for_degree_22():
    x = NODES
    for deg in range(23):
        want = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert abs(np.dot(W_KRONROD, x**deg) - want) < 1e-14
    # embedded Gauss rule: exact to degree 13
    for deg in range(14):
        want = (1 - (-1) ** (deg + 1)) / (deg + 1)
        assert abs(np.dot(W_GAUSS, x**deg) - want) < 1e-14


@pytest.mark.parametrize("f, want", [
    (lambda r: np.exp(-r), 1.0),
    (lambda r: r**2 * np.exp(-r**2), math.sqrt(math.pi) / 4),
    (lambda r: r * np.exp(-r**2 / 2) * np.sin(r), math.sqrt(math.pi / 2) * math.exp(-0.5)),
])
def test_semi_infinite_examples(f, want):
    assert abs(integrate_semi_infinite(f) - want) < 1e-12


def test_finite_interval_with_kink_and_orientation():
    f = lambda x: np.abs(x - 0.3)  # noqa: E731
    want = 0.5 * 0.3**2 + 0.5 * 0.7**2
    assert abs(integrate(f, 0, 1, breakpoints=[0.3]) - want) < 1e-14
    assert abs(integrate(f, 1, 0, breakpoints=[0.3]) + want) < 1e-14
    assert integrate(f, 2.0, 2.0) == 0


def test_vector_valued_integrand():
    k = np.array([0.5, 1.0, 2.0])
    got = integrate(lambda x: np.cos(k[None, :] * x[:, None]), 0.0, math.pi)
    assert np.allclose(got, np.sin(k * math.pi) / k, atol=1e-13)


def test_endpoint_singularities():
    got, info = integrate(np.log, 0.0, 1.0, full_output=True)
    assert abs(got + 1.0) < 1e-12
    assert info.panels > 1
    # panels are not split below 64 ulp, which caps accuracy for x**-1/2
    assert abs(integrate(lambda x: 1 / np.sqrt(x), 0.0, 1.0) - 2.0) < 1e-7


def test_oscillatory_integral_matches_mpmath():
    f = lambda r: np.exp(-0.1 * r) * np.sin(5 * r)  # noqa: E731
    want = float(mp.quadosc(lambda r: mp.exp(-0.1 * r) * mp.sin(5 * r), [0, mp.inf], omega=5))
    assert abs(integrate_semi_infinite(f) - want) < 1e-11


def test_panel_budget_raises_tolerance_not_met():
    spec = QuadratureSpec(max_subdivisions=5)
    with pytest.raises(ToleranceNotMet) as exc:
        integrate(lambda x: np.sin(200 * x), 0.0, 10.0, spec)
    assert exc.value.value is not None


def test_non_finite_integrand_is_reported():
    with pytest.raises(NonFiniteIntegrand):
        truncation_radius(lambda r: np.full_like(r, np.nan), 1e-16)


def test_non_decaying_integrand_never_truncates():
    with pytest.raises(ToleranceNotMet):
        truncation_radius(lambda r: np.ones_like(r), 1e-16, max_radius=64)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(rel_tol=0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)
    with pytest.raises(ValueError):
        LimitSpec(ratio=1.0)
    assert QuadratureSpec().with_tol(rel_tol=1e-6).rel_tol == 1e-6


@given(st.floats(0.2, 5.0), st.integers(0, 4))
def test_gaussian_moments(w, p):
    want = 0.5 * math.gamma((p + 1) / 2) * (2 / w) ** ((p + 1) / 2)
    got = integrate_semi_infinite(lambda r: r**p * np.exp(-w * r * r / 2))
    assert abs(got - want) <= 1e-11 * want


def test_limit_of_linear_function():
    assert abs(limit_extrapolate(lambda e: 1 + e) - 1) < 1e-14


def test_limit_of_regularized_jump():
    # Lorentzian smoothing of 1/pi at E = 1 from the upper/lower boundary values
    def g(eps):
        lo = 1j / np.sqrt(1 - 1j * eps)
        hi = -1j / np.sqrt(1 + 1j * eps)
        return (lo - hi) / (2j * math.pi)
    assert abs(limit_extrapolate(g) - 1 / math.pi) < 1e-12


@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(-3, 3))
def test_limit_of_polynomial_is_constant_term(a, b, c):
    val = limit_extrapolate(lambda e: a + b * e + c * e * e)
    assert abs(val - a) < 1e-11 * max(1.0, abs(a), abs(b), abs(c))


def test_divergent_limit_raises():
    with pytest.raises(LimitDiverges):
        limit_extrapolate(lambda e: e**-0.5)


def test_non_finite_sample_raises():
    with pytest.raises(LimitDiverges):
        limit_extrapolate(lambda e: math.inf)


def test_bounded_oscillation_does_not_converge():
    with pytest.raises(NoConvergence):
        limit_extrapolate(lambda e: math.sin(1 / e), LimitSpec(max_steps=12))


def test_full_output_reports_steps():
    val, info = limit_extrapolate(lambda e: 2 + e**2, full_output=True)
    assert abs(val - 2) < 1e-14
    assert info.steps == len(info.samples) >= 2
