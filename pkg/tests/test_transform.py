import math
import warnings

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from numpy.polynomial import hermite_e

from conftest import family_members
from halfline.core import PhysicalScale
from halfline.errors import NonPositiveEnergy, SingularEndpoint, UnboundedSymbol
from halfline.quadrature import integrate, integrate_semi_infinite
from halfline.rhs import l2_inner
from halfline.testfunctions import TestFunction, h0_apply
from halfline.transform import (EnergyFunction, EnergyGrid, GridMapping, apply_borel_function,
                                band_indicator, energy_image, family_k_support,
                                forward_transform, forward_transform_rho, inverse_transform,
                                multiply_image, propagate, sigma_eval, spectral_projection)


def sine_oracle(p, w, k):
    """int_0^inf r**p exp(-w r^2/2) sin(k r) dr for odd p, via Hermite polynomials."""
    n = (p - 1) // 2
    x = np.asarray(k) / math.sqrt(w)
    he = hermite_e.hermeval(x, [0] * p + [1])
    return w ** (-(p + 1) / 2) * math.sqrt(math.pi / 2) * (-1) ** n * he * np.exp(-x * x / 2)


@pytest.mark.parametrize("p, w, k", [(1, 1.0, 1.0), (3, 1.0, 2.0), (5, 0.7, 1.3), (3, 2.5, 0.4)])
def test_sine_oracle_against_mpmath(p, w, k):
    want = mp.quad(lambda r: r**p * mp.exp(-w * r * r / 2) * mp.sin(k * r), [0, 40])
    assert abs(sine_oracle(p, w, k) - float(want)) < 1e-14


def image_oracle(phi, E, c=1.0):
    k = np.sqrt(c * np.asarray(E))
    rho = c / k / math.pi
    return np.sqrt(rho) * sum(a * sine_oracle(p, w, k) for a, p, w in phi.terms)


@pytest.mark.parametrize("r, E, want", [(math.pi / 2, 1.0, 1 / math.sqrt(math.pi)), (0.0, 3.0, 0.0),
                                        (math.pi / 4, 4.0, 1 / math.sqrt(2 * math.pi))])
def test_sigma_examples(r, E, want):
    assert abs(sigma_eval(r, E) - want) < 1e-15


def test_sigma_rejects_nonpositive_energy():
    with pytest.raises(NonPositiveEnergy):
        sigma_eval(1.0, 0.0)


def test_grids():
    g = EnergyGrid.linear_in_k(0.5, 2.0, 4)
    assert np.allclose(g.k(), [0.5, 1.0, 1.5, 2.0])
    assert g.mapping is GridMapping.LINEAR_IN_K
    assert len(EnergyGrid.linear_in_e(1, 2, 5)) == 5
    for bad in ([0.0, 1.0], [2.0, 1.0], []):
        with pytest.raises(ValueError):
            EnergyGrid(bad)


@pytest.mark.parametrize("E, want", [(1.0, 0.428882), (4.0, 0.135335)])
def test_forward_examples(gauss, E, want):
    got = forward_transform(gauss, EnergyGrid.at([E])).values[0]
    assert abs(got - image_oracle(gauss, E)) < 1e-14
    assert abs(got - want) < 1e-6


def test_forward_rho_example_and_consistency(gauss):
    rho_img = forward_transform_rho(gauss, EnergyGrid.at([1.0])).values[0]
    assert abs(rho_img - math.sqrt(math.pi / 2) * math.exp(-0.5)) < 1e-14
    assert abs(rho_img / math.sqrt(math.pi) - forward_transform(gauss, EnergyGrid.at([1.0])).values[0]) < 1e-15


def test_zero_function_transforms_to_zero():
    zero = TestFunction()
    assert np.all(forward_transform(zero, EnergyGrid.at([1.0, 2.0])).values == 0)
    assert np.all(inverse_transform(EnergyFunction(lambda E: 0 * E), [0.5, 1.0]) == 0)


@given(family_members())
def test_forward_matches_hermite_oracle(phi):
    grid = EnergyGrid.linear_in_k(0.05, 6.0, 25)
    got = forward_transform(phi, grid).values
    want = image_oracle(phi, grid.nodes)
    scale = max(1.0, float(np.max(np.abs(want))))
    assert np.max(np.abs(got - want)) < 1e-11 * scale


def test_forward_with_scale():
    sc = PhysicalScale.from_c(2.0)
    phi = TestFunction([(1.0, 3, 1.5)])
    E = np.array([0.3, 1.0, 2.2])
    got = forward_transform(phi, EnergyGrid.at(E), scale=sc).values
    assert np.allclose(got, image_oracle(phi, E, c=2.0), atol=1e-13)


def test_inverse_of_analytic_image(gauss):
    fhat = EnergyFunction(lambda E: np.sqrt(np.sqrt(E) / 2) * np.exp(-E / 2), k_support=12.0)
    assert abs(inverse_transform(fhat, [1.0])[0] - math.exp(-0.5)) < 1e-12


@given(family_members())
def test_round_trip(phi):
    image = forward_transform(phi, EnergyGrid.at([1.0]))
    r = np.linspace(0.0, 8.0, 33)
    back = inverse_transform(image, r)
    assert np.max(np.abs(back - phi(r))) < 1e-9 * max(1.0, np.max(np.abs(phi(r))))


def test_round_trip_through_samples(gauss):
    image = forward_transform(gauss, EnergyGrid.linear_in_k(1e-3, 12.0, 512))
    sampled = EnergyFunction(grid=image.grid, values=image.values)
    r = np.linspace(0.0, 6.0, 13)
    assert np.max(np.abs(inverse_transform(sampled, r) - gauss(r))) < 1e-6


def test_sampled_energy_function_behaviour():
    grid = EnergyGrid.at([1.0])
    single = EnergyFunction(grid=grid, values=np.array([2.0]))
    assert single(1.0) == 2.0
    with pytest.raises(ValueError):
        single(1.5)
    with pytest.raises(ValueError):
        EnergyFunction()
    with pytest.raises(ValueError):
        EnergyFunction(grid=EnergyGrid.at([1.0, 2.0]), values=np.array([1.0]))


def test_singular_endpoint_detected():
    with pytest.raises(SingularEndpoint):
        inverse_transform(EnergyFunction(lambda E: np.asarray(E) ** -0.75), [1.0])


def test_family_support_bounds_the_image():
    for phi in (TestFunction([(1.0, 1, 1.0)]), TestFunction([(1.0, 5, 0.6)]), TestFunction([(2.0, 3, 3.0)])):
        K = family_k_support(phi)
        peak = np.max(np.abs(image_oracle(phi, np.linspace(0.01, 9, 200))))
        assert abs(image_oracle(phi, K * K)) < 1e-15 * max(peak, 1.0)


def test_identity_symbol_reproduces_phi(gauss):
    r = np.linspace(0, 6, 13)
    assert np.max(np.abs(apply_borel_function(lambda E: np.ones_like(E), gauss, r) - gauss(r))) < 1e-6


def test_energy_symbol_matches_h0(gauss):
    r = np.array([0.5, 1.0, 2.0])
    got = apply_borel_function(lambda E: E, gauss, r, bound=math.inf)
    assert np.allclose(got, h0_apply(gauss, 1)(r), atol=1e-9)
    assert abs(got[1] - 1.213061) < 1e-6


def test_unbounded_symbol_rejected(gauss):
    with pytest.raises(UnboundedSymbol):
        multiply_image(lambda E: np.exp(E), gauss, bound=1e8)


def test_band_projection_mass(gauss):
    en = integrate(lambda k: energy_image(gauss, k * k) ** 2 * 2 * k, 1.0, 2.0)
    # int_1^2 k^2 exp(-k^2) dk by error functions
    exact = float(mp.quad(lambda k: k * k * mp.exp(-k * k), [1, 2]))
    assert abs(exact - 0.2332527106719843) < 1e-15
    assert abs(en - exact) < 1e-12
    pos = integrate_semi_infinite(lambda r: gauss(r) * spectral_projection(gauss, 1, 4, r)).real
    assert abs(pos - exact) < 1e-10


def test_band_indicator_edges():
    G = band_indicator(1.0, 4.0)
    assert list(G(np.array([0.5, 1.0, 2.0, 4.0, 5.0]))) == [0, 1, 1, 1, 0]


def test_projection_idempotent_in_energy_representation(gauss):
    once = multiply_image(band_indicator(1, 4), gauss)
    twice = multiply_image(band_indicator(1, 4), once)
    E = np.linspace(0.1, 6, 50)
    assert np.array_equal(once(E), twice(E))


def free_gaussian(r, t, c=1.0):
    a = 1 + 2j * t / c
    return r * a**-1.5 * np.exp(-r * r / (2 * a))


@pytest.mark.parametrize("t", [0.0, 0.5, 1.0, 2.0, -1.0])
def test_propagate_matches_free_evolution(gauss, t):
    r = np.linspace(0, 8, 41)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        psi, info = propagate(gauss, t, r, full_output=True)
    assert np.max(np.abs(psi - free_gaussian(r, t))) < 1e-10
    assert info.truncated_mass < 1e-20


def test_propagate_preserves_norm_and_energy(gauss):
    from halfline.core import fd_derivative
    norm2 = abs(l2_inner(gauss, gauss))
    energy = abs(l2_inner(gauss, h0_apply(gauss, 1)))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        for t in (0.5, 1.0, 2.0):
            n_t = integrate_semi_infinite(lambda r: np.abs(propagate(gauss, t, r)) ** 2)
            assert abs(n_t - norm2) < 1e-5 * norm2
    r = np.linspace(0, 12, 241)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", RuntimeWarning)
        d = fd_derivative(lambda y: propagate(gauss, 1.0, y), r, 1)
    e_t = np.trapezoid(np.abs(d) ** 2, r)
    assert abs(e_t - energy) < 1e-5 * energy


def test_propagate_warns_on_coarse_grid(gauss):
    with pytest.warns(RuntimeWarning, match="cannot resolve"):
        propagate(gauss, 1.0, np.linspace(0, 10, 5))
