"""Resolvent kernel of H0 and its coefficient matrices in a solution basis.

For ``r < s`` the kernel is ``-(c/k_) chi_tilde(r) f_tilde(s) / 2`` when
Re E < 0 and ``-(c/k) chi(r) f_pm(s)`` when Re E >= 0, with ``f_plus`` in
the upper and ``f_minus`` in the lower half plane; it is symmetric in r, s.

The same kernel is expanded as ``sum_ij theta_ij(E) s_i(x; E) conj(s_j(y; conj E))``
in the basis ``(exp(k_ r), exp(-k_ r))`` on the negative side and
``(sin(k r), cos(k r))`` on the positive side. Only ``theta_11`` jumps across
the real axis, and that jump is the spectral density.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .core import DEFAULT_SCALE, ComplexEnergy, PhysicalScale, Region, branch_sqrt
from .errors import OnRealAxis, WrongRegion
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate, integrate_semi_infinite


class Ordering(enum.Enum):
    R_LESS_S = "r_less_s"
    R_GREATER_S = "r_greater_s"
    DIAGONAL = "diagonal"


@dataclass(frozen=True)
class GreenEvaluation:
    value: complex
    region: Region
    ordering: Ordering
    # True on the imaginary axis, where the half-plane formula is continued by continuity.
    extension: bool = False


_KERNEL_REGIONS = {Region.NEG_RE, Region.NEGATIVE_AXIS, Region.UPPER_HALF, Region.LOWER_HALF}


def _require_off_spectrum(E: ComplexEnergy):
    if E.region not in _KERNEL_REGIONS:
        raise OnRealAxis(f"E={E.value} lies on real axis at or above 0, inside the spectrum")


def green_kernel(r, s, E, scale: PhysicalScale = DEFAULT_SCALE):
    """Vectorized kernel ``G0(r, s; E)``; ``r`` and ``s`` broadcast together.

    Products such as ``sinh(q a) exp(-q b)`` are folded into differences of
    decaying exponentials so large radii cannot overflow.
    """
    E = ComplexEnergy.coerce(E)
    _require_off_spectrum(E)
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    lo = np.minimum(r, s)
    hi = np.maximum(r, s)
    c = scale.c
    if E.region in (Region.NEG_RE, Region.NEGATIVE_AXIS):
        q = E.k_minus(scale)
        return -(c / q) * 0.5 * (np.exp(-q * (hi - lo)) - np.exp(-q * (hi + lo)))
    k = E.k(scale)
    # sin(k lo) exp(+-i k hi) rewritten with exponentials that decay in the given half plane
    if E.region is Region.UPPER_HALF:
        prod = (np.exp(1j * k * (hi + lo)) - np.exp(1j * k * (hi - lo))) / 2j
    else:
        prod = (np.exp(-1j * k * (hi - lo)) - np.exp(-1j * k * (hi + lo))) / 2j
    return -(c / k) * prod


def green_eval(r: float, s: float, E, scale: PhysicalScale = DEFAULT_SCALE) -> GreenEvaluation:
    """Resolvent kernel at one point, tagged with region and ordering."""
    E = ComplexEnergy.coerce(E)
    if not (r > 0 and s > 0):
        raise ValueError("r and s must be positive")
    value = complex(green_kernel(r, s, E, scale))
    if r < s:
        order = Ordering.R_LESS_S
    elif r > s:
        order = Ordering.R_GREATER_S
    else:
        order = Ordering.DIAGONAL
    return GreenEvaluation(value, E.region, order, E.on_imaginary_axis)


def resolvent_apply(f, E, r_grid, quad: QuadratureSpec = DEFAULT_QUAD,
                    scale: PhysicalScale = DEFAULT_SCALE) -> np.ndarray:
    """``((E - H0)^{-1} f)(r)`` on ``r_grid`` by quadrature of the kernel.

    The integral is split at the kink ``s = r``: ``[0, r]`` is mapped to
    ``t in [0, 1]`` with ``s = r t`` and ``[r, inf)`` to ``u >= 0`` with
    ``s = r + u``, so every grid point shares one adaptive pass per piece.
    """
    E = ComplexEnergy.coerce(E)
    _require_off_spectrum(E)
    r = np.atleast_1d(np.asarray(r_grid, dtype=float))
    if np.any(r < 0):
        raise ValueError("r_grid must be nonnegative")
    if f.is_zero():
        return np.zeros(r.shape, dtype=complex)

    def inner(t):
        s = t[:, None] * r[None, :]
        return green_kernel(r[None, :], s, E, scale) * f(s) * r[None, :]

    def outer(u):
        s = r[None, :] + u[:, None]
        return green_kernel(r[None, :], s, E, scale) * f(s)

    return integrate(inner, 0.0, 1.0, quad) + integrate_semi_infinite(outer, quad)


class HalfPlane(enum.Enum):
    UPPER = "Upper"
    LOWER = "Lower"
    NEG_RE_UPPER = "NegReUpper"
    NEG_RE_LOWER = "NegReLower"


class Basis(enum.Enum):
    SIGMA_POSITIVE = "SigmaBasisPositive"
    SIGMA_NEGATIVE = "SigmaBasisNegative"


@dataclass(frozen=True)
class ThetaMatrix:
    entries: np.ndarray
    half_plane: HalfPlane
    basis: Basis

    def __getitem__(self, idx):
        return self.entries[idx]


def theta11(E, scale: PhysicalScale = DEFAULT_SCALE):
    """Vectorized ``theta_11`` over complex energies off the positive real axis."""
    E = np.asarray(E, dtype=complex)
    c = scale.c
    k = branch_sqrt(c * E)
    sign = np.where(E.imag > 0, -1.0, 1.0)
    out = np.where(E.real < 0, 0.0, sign * 1j * c / np.where(k == 0, 1.0, k))
    return out if out.ndim else complex(out)


def theta_minus(E, scale: PhysicalScale = DEFAULT_SCALE) -> ThetaMatrix:
    """Coefficients for Re E < 0 in the basis ``(exp(k_ r), exp(-k_ r))``.

    Also valid on the negative real axis, where the matrix is analytic.
    """
    E = ComplexEnergy.coerce(E)
    if E.region not in (Region.NEG_RE, Region.NEGATIVE_AXIS):
        raise WrongRegion(f"theta_minus needs Re E < 0, got E={E.value}")
    a = scale.c / E.k_minus(scale) / 2.0
    m = np.array([[0.0, -a], [0.0, a]], dtype=complex)
    hp = HalfPlane.NEG_RE_LOWER if E.value.imag < 0 else HalfPlane.NEG_RE_UPPER
    return ThetaMatrix(m, hp, Basis.SIGMA_NEGATIVE)


def theta_plus(E, scale: PhysicalScale = DEFAULT_SCALE) -> ThetaMatrix:
    """Coefficients for Re E >= 0, Im E != 0 in the basis ``(sin(k r), cos(k r))``."""
    E = ComplexEnergy.coerce(E)
    if E.region not in (Region.UPPER_HALF, Region.LOWER_HALF):
        raise WrongRegion(f"theta_plus needs Re E >= 0 and Im E != 0, got E={E.value}")
    a = scale.c / E.k(scale)
    if E.region is Region.UPPER_HALF:
        m = np.array([[-1j * a, -a], [0.0, 0.0]], dtype=complex)
        hp = HalfPlane.UPPER
    else:
        m = np.array([[1j * a, -a], [0.0, 0.0]], dtype=complex)
        hp = HalfPlane.LOWER
    return ThetaMatrix(m, hp, Basis.SIGMA_POSITIVE)


def basis_functions(basis: Basis, r, E, scale: PhysicalScale = DEFAULT_SCALE):
    """The two basis solutions ``(s_1(r; E), s_2(r; E))``."""
    E = ComplexEnergy.coerce(E)
    r = np.asarray(r, dtype=float)
    if basis is Basis.SIGMA_NEGATIVE:
        q = E.k_minus(scale)
        return np.exp(q * r), np.exp(-q * r)
    k = E.k(scale)
    return np.sin(k * r), np.cos(k * r)


def theta_matrix(E, scale: PhysicalScale = DEFAULT_SCALE) -> ThetaMatrix:
    E = ComplexEnergy.coerce(E)
    if E.region in (Region.NEG_RE, Region.NEGATIVE_AXIS):
        return theta_minus(E, scale)
    return theta_plus(E, scale)


def green_theta_expansion(r, s, E, scale: PhysicalScale = DEFAULT_SCALE, with_scale: bool = False):
    """Rebuild the kernel from theta and its basis.

    In both bases the first index sits at the smaller radius and the second
    at the larger one, ``G0 = sum_ij theta_ij s_i(min) conj(s_j(max; conj E))``;
    with that placement the second row (positive side) or the first column
    (negative side) of theta vanishes.

    With ``with_scale`` also returns ``sum_ij |theta_ij s_i s_j|``. The terms
    grow like ``exp(|Im k| max(r, s))`` while their sum decays, so rounding in
    the sum is relative to this scale, not to the kernel itself.
    """
    E = ComplexEnergy.coerce(E)
    th = theta_matrix(E, scale)
    r = np.asarray(r, dtype=float)
    s = np.asarray(s, dtype=float)
    lo, hi = np.minimum(r, s), np.maximum(r, s)
    left = basis_functions(th.basis, lo, E, scale)
    right = [np.conj(v) for v in basis_functions(th.basis, hi, E.conjugate(), scale)]
    terms = [th.entries[i, j] * left[i] * right[j] for i in range(2) for j in range(2)]
    value = sum(terms)
    if with_scale:
        return value, sum(np.abs(t) for t in terms)
    return value
