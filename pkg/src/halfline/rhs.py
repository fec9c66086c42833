"""Test-space norms, Dirac kets and the rigged Hilbert space identities.

The test space is normed by
``||phi||_{n,m} = ( int_0^inf |(r + 1)**n (h0 + 1)**m phi(r)|**2 dr )**(1/2)``
and every energy ``E > 0`` defines the antilinear functional
``<phi|E> = int_0^inf conj(phi(r)) sigma(r; E) dr``.

Infinitely many conditions (all n, m, all powers of h0) are certified only
up to ``n_max``; for the polynomial-Gaussian family they hold analytically,
so the finite checks guard the numerics rather than prove membership.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .core import DEFAULT_SCALE, PhysicalScale
from .errors import NonPositiveEnergy
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate, integrate_semi_infinite
from .report import Case, SpectralReport
from .spectral import rho_density
from .testfunctions import GaussPoly, h0_apply, h0_plus_one_apply
from .transform import (EnergyGrid, energy_image, family_k_support, forward_transform,
                        inverse_transform, sigma_eval)

N_MAX = 3


def _weighted(phi: GaussPoly, n: int, m: int, scale: PhysicalScale) -> GaussPoly:
    weight = [math.comb(n, j) for j in range(n + 1)]  # (1 + r)**n, ascending
    return h0_plus_one_apply(phi, m, scale).mul_poly(weight)


def l2_inner(phi: GaussPoly, psi: GaussPoly, quad: QuadratureSpec = DEFAULT_QUAD) -> complex:
    """``(phi, psi) = int conj(phi) psi dr``, antilinear in the first slot."""
    if phi.is_zero() or psi.is_zero():
        return 0j
    scale_length = 1.0 / math.sqrt(max(min(phi.widths), min(psi.widths), 1e-300))
    return complex(integrate_semi_infinite(lambda r: np.conj(phi(r)) * psi(r), quad,
                                           scale_length=scale_length))


def norm_nm(phi: GaussPoly, n: int, m: int, quad: QuadratureSpec = DEFAULT_QUAD,
            scale: PhysicalScale = DEFAULT_SCALE) -> float:
    if n < 0 or m < 0:
        raise ValueError("n and m must be nonnegative")
    if phi.is_zero():
        return 0.0
    g = _weighted(phi, n, m, scale)
    val = integrate_semi_infinite(lambda r: np.abs(g(r)) ** 2, quad,
                                  scale_length=1.0 / math.sqrt(min(phi.widths)))
    return math.sqrt(float(val))


@dataclass(frozen=True)
class NormTable:
    values: dict
    n_max: int = N_MAX

    def __getitem__(self, nm):
        return self.values[nm]


def norm_table(phi: GaussPoly, n_max: int = N_MAX, quad: QuadratureSpec = DEFAULT_QUAD,
               scale: PhysicalScale = DEFAULT_SCALE) -> NormTable:
    vals = {(n, m): norm_nm(phi, n, m, quad, scale)
            for n in range(n_max + 1) for m in range(n_max + 1)}
    return NormTable(vals, n_max)


def check_norm_axioms(sample, n: int, m: int, quad: QuadratureSpec = DEFAULT_QUAD,
                      scale: PhysicalScale = DEFAULT_SCALE, max_pairs: int | None = None,
                      scalars=(2.0, -0.75, 1.5j), tolerance: float = 1e-10,
                      pairs=None) -> SpectralReport:
    """Triangle inequality, homogeneity, nonnegativity and definiteness of one norm.

    Triangle checks run over ``pairs`` (index pairs into ``sample``), by
    default every combination in order, capped at ``max_pairs``.
    Definiteness is decided on the coefficient vector: quadrature cannot
    tell 0 from 1e-300.
    """
    sample = list(sample)
    if not sample:
        raise ValueError("sample must be nonempty")
    rep = SpectralReport(f"norm_axioms[{n},{m}]")
    norms = [norm_nm(f, n, m, quad, scale) for f in sample]
    nm = {"n": n, "m": m}
    for i, (f, nf) in enumerate(zip(sample, norms, strict=True)):
        rep.add(Case.bound(f"nonneg[{i}]", -nf, 0.0, inputs=nm, ref="norm: nonnegativity"))
        zero_coeffs = not np.any(f.coefficient_vector())
        rep.add(Case.flag(f"definite[{i}]", (nf == 0.0) == zero_coeffs, inputs=nm,
                          ref="norm: definiteness"))
        for a in scalars:
            lhs = norm_nm(a * f, n, m, quad, scale)
            rep.add(Case.compare(f"homogeneous[{i}][{a}]", abs(a) * nf, lhs,
                                 tolerance * max(1.0, abs(a) * nf), inputs=nm,
                                 ref="norm: absolute homogeneity"))
    if pairs is None:
        pairs = itertools.combinations(range(len(sample)), 2)
    if max_pairs is not None:
        pairs = itertools.islice(pairs, max_pairs)
    for i, j in pairs:
        lhs = norm_nm(sample[i] + sample[j], n, m, quad, scale)
        rep.add(Case.bound(f"triangle[{i},{j}]", lhs, norms[i] + norms[j],
                           tolerance * (norms[i] + norms[j]), inputs=nm,
                           ref="norm: triangle inequality"))
    return rep


@dataclass(frozen=True)
class MembershipReport:
    candidate: GaussPoly
    checks: list = field(default_factory=list)
    verdict: bool = False


def phi0_membership(phi: GaussPoly, n_max: int = N_MAX, quad: QuadratureSpec = DEFAULT_QUAD,
                    scale: PhysicalScale = DEFAULT_SCALE) -> MembershipReport:
    """Run the finitely many certifiable test-space conditions on ``phi``."""
    checks = [("phi(0) = 0", bool(phi(0.0) == 0))]
    for n in range(1, n_max + 1):
        checks.append((f"(h0^{n} phi)(0) = 0", bool(h0_apply(phi, n, scale)(0.0) == 0)))
    widths_ok = all(w > 0 for w in phi.widths)
    for n in range(n_max + 1):
        for m in range(n_max + 1):
            ok = widths_ok and math.isfinite(norm_nm(phi, n, m, quad, scale))
            checks.append((f"||phi||_{n},{m} < inf", bool(ok)))
    return MembershipReport(phi, checks, all(ok for _, ok in checks))


@dataclass(frozen=True)
class KetAction:
    E: float
    value: complex


def ket_action(phi: GaussPoly, E: float, quad: QuadratureSpec = DEFAULT_QUAD,
               scale: PhysicalScale = DEFAULT_SCALE) -> KetAction:
    """``<phi|E> = int conj(phi(r)) sigma(r; E) dr``."""
    if not E > 0:
        raise NonPositiveEnergy("kets exist for E > 0 only")
    if phi.is_zero():
        return KetAction(E, 0j)
    pc = phi.conj()
    val = integrate_semi_infinite(lambda r: pc(r) * sigma_eval(r, E, scale), quad,
                                  scale_length=1.0 / math.sqrt(min(phi.widths)))
    return KetAction(float(E), complex(val))


def continuity_constant(E: float, scale: PhysicalScale = DEFAULT_SCALE) -> float:
    """``M(E) = sup_r |sigma(r; E)| = sqrt(rho(E))``."""
    return math.sqrt(rho_density(E, scale))


def eigen_residual(phi: GaussPoly, E: float, n: int = 1, quad: QuadratureSpec = DEFAULT_QUAD,
                   scale: PhysicalScale = DEFAULT_SCALE) -> float:
    """``|<h0^n phi|E> - E^n <phi|E>|``: defect of the generalized eigenvalue equation."""
    if phi.is_zero():
        return 0.0
    lhs = ket_action(h0_apply(phi, n, scale), E, quad, scale).value
    rhs = E**n * ket_action(phi, E, quad, scale).value
    return abs(lhs - rhs)


def continuity_bound_check(phi: GaussPoly, E: float, quad: QuadratureSpec = DEFAULT_QUAD,
                           scale: PhysicalScale = DEFAULT_SCALE, tolerance: float = 0.0) -> SpectralReport:
    ket = ket_action(phi, E, quad, scale).value
    bound = continuity_constant(E, scale) * norm_nm(phi, 1, 0, quad, scale)
    rep = SpectralReport("ket_continuity")
    rep.add(Case.bound(f"ket_bound[E={E}]", abs(ket), bound, tolerance, inputs={"E": E},
                       ref="ket continuity: |<phi|E>| <= M(E) ||phi||_1,0"))
    return rep


def h0_continuity_check(phi: GaussPoly, n: int, m: int, quad: QuadratureSpec = DEFAULT_QUAD,
                        scale: PhysicalScale = DEFAULT_SCALE, tolerance: float = 0.0) -> SpectralReport:
    lhs = norm_nm(h0_apply(phi, 1, scale), n, m, quad, scale)
    rhs = norm_nm(phi, n, m + 1, quad, scale) + norm_nm(phi, n, m, quad, scale)
    rep = SpectralReport("h0_continuity")
    rep.add(Case.bound(f"h0_bound[{n},{m}]", lhs, rhs, tolerance, inputs={"n": n, "m": m},
                       ref="H0 continuity: ||H0 phi||_n,m <= ||phi||_n,m+1 + ||phi||_n,m"))
    return rep


def energy_inner(phi: GaussPoly, psi: GaussPoly, n: int = 0, quad: QuadratureSpec = DEFAULT_QUAD,
                 scale: PhysicalScale = DEFAULT_SCALE) -> complex:
    """``int_0^inf E^n <phi|E><E|psi> dE``, integrated in ``k = sqrt(c E)``."""
    if phi.is_zero() or psi.is_zero():
        return 0j
    c = scale.c
    K = max(family_k_support(phi), family_k_support(psi))

    def integrand(k):
        E = k * k / c
        a = np.conj(energy_image(phi, E, quad, scale))
        b = energy_image(psi, E, quad, scale)
        return E**n * a * b * 2 * k / c

    bps = [K * 2.0**-j for j in range(1, 6)]
    return complex(integrate(integrand, 0.0, K, quad, breakpoints=bps))


def position_radius(phi: GaussPoly, floor: float = 1e-18) -> float:
    """Radius beyond which every Gaussian term of ``phi`` is below ``floor``."""
    if phi.is_zero():
        return 1.0
    return max(math.sqrt(-2 * math.log(floor) / w) + 2.0 * math.sqrt(p / w) for _, p, w in phi.terms)


def nuclear_spectral_check(phi: GaussPoly, psi: GaussPoly, n: int = 0,
                           quad: QuadratureSpec = DEFAULT_QUAD, scale: PhysicalScale = DEFAULT_SCALE,
                           tolerance: float = 1e-6, n_points: int = 10) -> SpectralReport:
    """``(phi, H0^n psi)`` in position space against the energy-side integral of kets.

    The tolerance is relative to ``||phi|| ||H0^n psi||`` (the Cauchy-Schwarz
    scale), so orthogonal pairs are judged on the same footing. Also checks the
    ket expansion ``psi(r) = int <r|E><E|psi> dE`` at ``n_points`` radii.
    """
    rep = SpectralReport("nuclear_spectral")
    hpsi = h0_apply(psi, n, scale)
    pos = l2_inner(phi, hpsi, quad)
    en = energy_inner(phi, psi, n, quad, scale)
    cs = math.sqrt(abs(l2_inner(phi, phi, quad)) * abs(l2_inner(hpsi, hpsi, quad)))
    rep.add(Case.compare(f"nst[n={n}]", pos, en, tolerance * max(cs, 1e-300), inputs={"n": n},
                         ref="nuclear spectral theorem"))
    R = position_radius(psi) if not psi.is_zero() else 1.0
    r = np.linspace(0.0, min(R, 10.0), n_points)
    image = forward_transform(psi, EnergyGrid.at([1.0]), quad, scale)
    rec = inverse_transform(image, r, quad, scale)
    exact = psi(r)
    scale_max = float(np.max(np.abs(exact))) if r.size else 0.0
    rep.add(Case("dirac_expansion", {"points": n_points}, 0.0,
                 float(np.max(np.abs(rec - exact))), float(np.max(np.abs(rec - exact))),
                 tolerance * max(scale_max, 1e-300), "Dirac basis expansion"))
    return rep


def energy_delta_check(phi: GaussPoly, E: float, quad: QuadratureSpec = DEFAULT_QUAD,
                       scale: PhysicalScale = DEFAULT_SCALE, tolerance: float = 1e-8) -> SpectralReport:
    """The energy-side ket acts by conjugated point evaluation of ``phi_hat``."""
    image = forward_transform(phi, EnergyGrid.at([E]), quad, scale)
    point = complex(np.conj(image.values[0]))
    ket = ket_action(phi, E, quad, scale).value
    rep = SpectralReport("energy_delta")
    rep.add(Case.compare(f"delta[E={E}]", ket, point, tolerance, inputs={"E": E},
                         ref="Schwartz delta in the energy representation"))
    return rep
