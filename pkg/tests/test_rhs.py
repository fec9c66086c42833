import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import family_members
from halfline.core import PhysicalScale
from halfline.errors import NonPositiveEnergy
from halfline.rhs import (N_MAX, check_norm_axioms, continuity_bound_check, continuity_constant,
                          eigen_residual, energy_delta_check, energy_inner, h0_continuity_check,
                          ket_action, l2_inner, norm_nm, norm_table, nuclear_spectral_check,
                          phi0_membership)
from halfline.testfunctions import TestFunction, h0_apply, random_test_function
from halfline.transform import sigma_eval

SQRT_PI = math.sqrt(math.pi)


def test_norm_examples(gauss):
    assert abs(norm_nm(gauss, 0, 0) - math.pi**0.25 / 2) < 1e-14
    assert abs(norm_nm(gauss, 1, 0) - math.sqrt(1 + 5 * SQRT_PI / 8)) < 1e-14
    assert abs(norm_nm(gauss, 1, 0) - 1.45182080740563) < 1e-13
    assert norm_nm(TestFunction(), 3, 3) == 0.0


def test_norm_with_operator_power(gauss):
    # (h0 + 1) phi = (4 r - r^3) exp(-r^2/2), and int r^(2j) exp(-r^2) = sqrt(pi)/2 * (2j-1)!!/2^j
    want2 = SQRT_PI / 2 * (16 * 0.5 - 8 * 0.75 + 15 / 8)
    assert abs(norm_nm(gauss, 0, 1) ** 2 - want2) < 1e-13


def test_norm_rejects_negative_indices(gauss):
    with pytest.raises(ValueError):
        norm_nm(gauss, -1, 0)


@given(family_members())
def test_norm_table_is_monotone_in_n(phi):
    tab = norm_table(phi, n_max=2)
    for m in range(3):
        for n in range(2):
            assert tab[n, m] <= tab[n + 1, m] * (1 + 1e-12)
    assert all(math.isfinite(v) and v > 0 for v in tab.values.values())


def test_norm_zero_equals_l2_and_parseval(gauss):
    phi = TestFunction([(1.0, 1, 1.0), (-0.3, 3, 2.0)])
    n00 = norm_nm(phi, 0, 0)
    assert abs(n00**2 - l2_inner(phi, phi).real) < 1e-13
    assert abs(n00**2 - energy_inner(phi, phi).real) < 1e-6 * n00**2


def test_norm_axioms_on_seeded_pairs():
    rng = np.random.default_rng(42)
    sample = [random_test_function(rng) for _ in range(11)] + [TestFunction()]
    for n, m in ((0, 0), (1, 2), (3, 3)):
        rep = check_norm_axioms(sample, n, m, max_pairs=50)
        assert rep.passed, [c.id for c in rep.failures()]
        ids = [c.id for c in rep.cases]
        assert sum(i.startswith("triangle") for i in ids) == 50
        assert any(i == f"definite[{len(sample) - 1}]" for i in ids)


def test_norm_axioms_need_a_sample():
    with pytest.raises(ValueError):
        check_norm_axioms([], 0, 0)


def test_explicit_pairs(gauss):
    rep = check_norm_axioms([gauss, 2 * gauss], 1, 1, pairs=[(0, 1)])
    assert [c.id for c in rep.cases if c.id.startswith("triangle")] == ["triangle[0,1]"]
    # colinear pair: the triangle inequality holds with equality
    tri = next(c for c in rep.cases if c.id == "triangle[0,1]")
    assert abs(tri.actual - tri.expected) < 1e-12 * tri.expected


@pytest.mark.parametrize("phi, ok", [
    (TestFunction([(1.0, 1, 1.0)]), True),
    (TestFunction([(1.0, 3, 2.0)]), True),
    (TestFunction.unchecked([(1.0, 2, 1.0)]), False),
])
def test_membership(phi, ok):
    rep = phi0_membership(phi)
    assert rep.verdict is ok
    assert rep.verdict == all(s for _, s in rep.checks)
    assert len(rep.checks) == 1 + N_MAX + (N_MAX + 1) ** 2


def test_membership_failure_is_the_h0_condition():
    rep = phi0_membership(TestFunction.unchecked([(1.0, 2, 1.0)]))
    failed = [name for name, s in rep.checks if not s]
    assert "(h0^1 phi)(0) = 0" in failed
    assert "phi(0) = 0" not in failed


def test_ket_examples(gauss):
    assert abs(ket_action(gauss, 1.0).value - 0.42888194248035344) < 1e-14
    assert ket_action(TestFunction(), 1.0).value == 0
    with pytest.raises(NonPositiveEnergy):
        ket_action(gauss, 0.0)


def test_ket_is_antilinear(gauss):
    psi = TestFunction([(0.5, 3, 1.5)])
    a, b = 1j, 2 - 1j
    lhs = ket_action(a * gauss + b * psi, 2.0).value
    rhs = np.conj(a) * ket_action(gauss, 2.0).value + np.conj(b) * ket_action(psi, 2.0).value
    assert abs(lhs - rhs) < 1e-14


def test_continuity_constant_is_sup_of_sigma():
    r = np.linspace(0, 20, 20001)
    for E in (0.5, 2.0):
        grid_sup = np.max(np.abs(sigma_eval(r, E)))
        assert grid_sup <= continuity_constant(E) + 1e-15
        assert grid_sup > continuity_constant(E) * (1 - 1e-6)


def test_continuity_bound_example(gauss):
    rep = continuity_bound_check(gauss, 1.0)
    (case,) = rep.cases
    assert case.passed
    assert abs(case.expected - 1 / SQRT_PI * 1.45182080740563) < 1e-12


@pytest.mark.parametrize("E, n, bound", [(1.0, 1, 1e-8), (2.0, 2, 1e-7)])
def test_eigen_residual_examples(gauss, E, n, bound):
    assert eigen_residual(gauss, E, n) <= bound
    assert eigen_residual(TestFunction(), E, n) == 0.0


@given(family_members(), st.sampled_from([0.5, 1.0, 2.0, 5.0]), st.sampled_from([1, 2]))
def test_eigen_residual_sweep(phi, E, n):
    assert eigen_residual(phi, E, n) <= 1e-7 * (1 + E**n) * norm_nm(phi, 1, 0)


@given(family_members(), st.sampled_from([0.5, 1.0, 2.0, 5.0]))
def test_continuity_bound_sweep(phi, E):
    assert continuity_bound_check(phi, E).passed


@given(family_members(), st.integers(0, 1), st.integers(0, 1))
def test_h0_continuity_sweep(phi, n, m):
    rep = h0_continuity_check(phi, n, m)
    assert rep.passed
    assert h0_continuity_check(TestFunction(), n, m).passed


@pytest.mark.parametrize("n, want", [(0, SQRT_PI / 4), (1, 3 * SQRT_PI / 8)])
def test_nuclear_self_cases(gauss, n, want):
    assert abs(energy_inner(gauss, gauss, n) - want) < 1e-6 * want
    assert nuclear_spectral_check(gauss, gauss, n).passed


def test_nuclear_check_on_orthogonal_pair(gauss):
    psi0 = TestFunction([(1.0, 3, 2.0)])
    proj = l2_inner(gauss, psi0) / l2_inner(gauss, gauss)
    psi = psi0 - proj.real * gauss
    assert abs(l2_inner(gauss, psi)) < 1e-14
    assert abs(energy_inner(gauss, psi)) < 1e-6
    assert nuclear_spectral_check(gauss, psi, 0).passed


@given(family_members(), family_members(), st.integers(0, 2))
def test_nuclear_spectral_theorem(phi, psi, n):
    rep = nuclear_spectral_check(phi, psi, n)
    assert rep.passed, [(c.id, c.abs_error, c.tolerance) for c in rep.failures()]


@pytest.mark.parametrize("E, want", [(1.0, 0.428882), (4.0, 0.135335)])
def test_energy_delta(gauss, E, want):
    (case,) = energy_delta_check(gauss, E).cases
    assert case.abs_error <= 1e-8
    assert abs(case.actual - want) < 1e-6
    assert energy_delta_check(TestFunction(), E).passed


def test_rhs_with_rescaled_units(gauss):
    sc = PhysicalScale(hbar=2.0, mass=1.0)
    assert eigen_residual(gauss, 1.5, 1, scale=sc) < 1e-9
    h = h0_apply(gauss, 1, sc)
    assert abs(l2_inner(gauss, h) - energy_inner(gauss, gauss, 1, scale=sc)) < 1e-9
