"""Physical scale, complex energies and the closed-form solutions of h0.

Every formula in the package depends on the masses and Planck's constant
only through the single coefficient ``c = 2 m / hbar**2``. With the default
scale (hbar = 1, m = 1/2) we have ``c = 1`` and energies are simply ``k**2``.

The two closed-form families are

* Re E < 0: ``chi_tilde = exp(k_ r) - exp(-k_ r)`` and ``f_tilde = exp(-k_ r)``
  with ``k_ = sqrt(-c E)``;
* Re E > 0: ``chi = sin(k r)``, ``f_plus = exp(i k r)``, ``f_minus = exp(-i k r)``
  and ``cos(k r)`` with ``k = sqrt(c E)``,

where ``sqrt`` is always :func:`branch_sqrt`.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.integrate import solve_ivp

from .errors import KindRegionMismatch, NonPositiveEnergy, StepSizeUnderflow

EPS = np.finfo(float).eps


@dataclass(frozen=True)
class PhysicalScale:
    """Units of the problem: ``hbar`` and ``mass`` enter only through ``c``."""

    hbar: float = 1.0
    mass: float = 0.5

    def __post_init__(self):
        if not (self.hbar > 0 and self.mass > 0):
            raise ValueError("hbar and mass must be positive")
        if not (math.isfinite(self.hbar) and math.isfinite(self.mass)):
            raise ValueError("hbar and mass must be finite")

    @property
    def c(self) -> float:
        return 2.0 * self.mass / self.hbar**2

    @classmethod
    def from_c(cls, c: float) -> "PhysicalScale":
        """Scale with hbar = 1 and the mass chosen so that ``2 m / hbar**2 == c``."""
        if not c > 0:
            raise ValueError("c must be positive")
        return cls(hbar=1.0, mass=c / 2.0)


DEFAULT_SCALE = PhysicalScale()


def branch_sqrt(E):
    """Square root with ``-pi < arg(E) <= pi`` mapped onto ``-pi/2 < arg <= pi/2``.

    A signed zero imaginary part is treated as +0, so every negative real
    number has argument pi and ``branch_sqrt(-1) == 1j``.
    """
    z = np.asarray(E, dtype=complex)
    w = np.empty_like(z)
    w.real = z.real
    w.imag = z.imag + 0.0  # -0.0 + 0.0 == +0.0
    out = np.sqrt(w)
    if out.ndim == 0:
        return complex(out)
    return out


class Region(enum.Enum):
    NEG_RE = "NegRe"
    UPPER_HALF = "UpperHalf"
    LOWER_HALF = "LowerHalf"
    POSITIVE_AXIS = "PositiveAxis"
    NEGATIVE_AXIS = "NegativeAxis"
    ORIGIN = "Origin"


NEGATIVE_REGIONS = frozenset({Region.NEG_RE, Region.NEGATIVE_AXIS})
POSITIVE_REGIONS = frozenset({Region.UPPER_HALF, Region.LOWER_HALF, Region.POSITIVE_AXIS})


def classify(E: complex) -> Region:
    E = complex(E)
    if E.imag == 0.0:
        if E.real > 0:
            return Region.POSITIVE_AXIS
        if E.real < 0:
            return Region.NEGATIVE_AXIS
        return Region.ORIGIN
    if E.real < 0:
        return Region.NEG_RE
    # Re E == 0 is assigned by the sign of Im E.
    return Region.UPPER_HALF if E.imag > 0 else Region.LOWER_HALF


@dataclass(frozen=True)
class ComplexEnergy:
    """A complex energy together with its region of the complex plane."""

    value: complex
    region: Region = field(init=False)

    def __post_init__(self):
        v = complex(self.value)
        if not (math.isfinite(v.real) and math.isfinite(v.imag)):
            raise ValueError(f"energy must be finite, got {v!r}")
        object.__setattr__(self, "value", v)
        object.__setattr__(self, "region", classify(v))

    @classmethod
    def coerce(cls, E) -> "ComplexEnergy":
        return E if isinstance(E, cls) else cls(E)

    @property
    def on_imaginary_axis(self) -> bool:
        """True when the kernel formulas are used by continuity rather than as stated."""
        return self.value.real == 0.0 and self.value.imag != 0.0

    def conjugate(self) -> "ComplexEnergy":
        return ComplexEnergy(self.value.conjugate())

    def k(self, scale: PhysicalScale = DEFAULT_SCALE) -> complex:
        """Wave number ``sqrt(c E)``."""
        return branch_sqrt(scale.c * self.value)

    def k_minus(self, scale: PhysicalScale = DEFAULT_SCALE) -> complex:
        """Decay rate ``sqrt(-c E)``."""
        return branch_sqrt(-scale.c * self.value)


class EigenfunctionKind(enum.Enum):
    CHI_TILDE = "ChiTilde"
    F_TILDE = "FTilde"
    CHI = "Chi"
    F_PLUS = "FPlus"
    F_MINUS = "FMinus"
    SIGMA2_COS = "Sigma2Cos"

    @property
    def regions(self) -> frozenset:
        if self in (EigenfunctionKind.CHI_TILDE, EigenfunctionKind.F_TILDE):
            return NEGATIVE_REGIONS
        return POSITIVE_REGIONS


def _check_kind(kind: EigenfunctionKind, E: ComplexEnergy):
    if E.region not in kind.regions:
        raise KindRegionMismatch(
            f"{kind.value} is not defined for E={E.value} (region {E.region.value})"
        )


def _exp_terms(kind: EigenfunctionKind, E: ComplexEnergy, scale: PhysicalScale):
    """Write the eigenfunction as ``sum(a * exp(b * r))``; returns [(a, b), ...]."""
    if kind is EigenfunctionKind.CHI_TILDE:
        q = E.k_minus(scale)
        return [(1.0, q), (-1.0, -q)]
    if kind is EigenfunctionKind.F_TILDE:
        return [(1.0, -E.k_minus(scale))]
    k = E.k(scale)
    if kind is EigenfunctionKind.CHI:
        return [(-0.5j, 1j * k), (0.5j, -1j * k)]
    if kind is EigenfunctionKind.F_PLUS:
        return [(1.0, 1j * k)]
    if kind is EigenfunctionKind.F_MINUS:
        return [(1.0, -1j * k)]
    return [(0.5, 1j * k), (0.5, -1j * k)]


def eigenfunction(kind: EigenfunctionKind, r, E, scale: PhysicalScale = DEFAULT_SCALE):
    """Evaluate one of the closed-form solutions of ``h0 u = E u`` at ``r``."""
    kind = EigenfunctionKind(kind)
    E = ComplexEnergy.coerce(E)
    _check_kind(kind, E)
    r = np.asarray(r, dtype=float)
    if kind is EigenfunctionKind.CHI_TILDE:
        out = 2.0 * np.sinh(E.k_minus(scale) * r)
    elif kind is EigenfunctionKind.F_TILDE:
        out = np.exp(-E.k_minus(scale) * r)
    elif kind is EigenfunctionKind.CHI:
        out = np.sin(E.k(scale) * r)
    elif kind is EigenfunctionKind.SIGMA2_COS:
        out = np.cos(E.k(scale) * r)
    elif kind is EigenfunctionKind.F_PLUS:
        out = np.exp(1j * E.k(scale) * r)
    else:
        out = np.exp(-1j * E.k(scale) * r)
    out = np.asarray(out, dtype=complex)
    return complex(out) if out.ndim == 0 else out


def eigenfunction_derivative(kind, r, E, order: int = 1, scale: PhysicalScale = DEFAULT_SCALE):
    """Exact ``order``-th derivative in ``r`` of :func:`eigenfunction`."""
    if order == 0:
        return eigenfunction(kind, r, E, scale)
    kind = EigenfunctionKind(kind)
    E = ComplexEnergy.coerce(E)
    _check_kind(kind, E)
    r = np.asarray(r, dtype=float)
    out = sum(a * b**order * np.exp(b * r) for a, b in _exp_terms(kind, E, scale))
    out = np.asarray(out, dtype=complex)
    return complex(out) if out.ndim == 0 else out


class WronskianPair(enum.Enum):
    CHI_TILDE_F_TILDE = "ChiTilde_FTilde"
    CHI_F_PLUS = "Chi_FPlus"
    CHI_F_MINUS = "Chi_FMinus"

    @property
    def kinds(self):
        K = EigenfunctionKind
        return {
            WronskianPair.CHI_TILDE_F_TILDE: (K.CHI_TILDE, K.F_TILDE),
            WronskianPair.CHI_F_PLUS: (K.CHI, K.F_PLUS),
            WronskianPair.CHI_F_MINUS: (K.CHI, K.F_MINUS),
        }[self]


def wronskian_closed(pair, E, scale: PhysicalScale = DEFAULT_SCALE) -> complex:
    pair = WronskianPair(pair)
    E = ComplexEnergy.coerce(E)
    _check_kind(pair.kinds[0], E)
    if pair is WronskianPair.CHI_TILDE_F_TILDE:
        return -2.0 * E.k_minus(scale)
    return -E.k(scale)


def fd_derivative(f: Callable, r, order: int = 1):
    """Five-point central difference of a (possibly vector-valued) function.

    First derivatives use ``h = eps**(1/3) * max(1, |r|)``. Second derivatives
    use ``h = eps**(1/6) * max(1, |r|)``, the balance point of the stencil's
    fourth-order truncation error against cancellation. An array ``r`` is
    handled in one call of ``f`` on the flattened stencil.
    """
    if order == 1:
        offsets = np.array([-2.0, -1.0, 1.0, 2.0])
        weights = np.array([1.0, -8.0, 8.0, -1.0]) / 12
        h_scale = EPS ** (1 / 3)
    elif order == 2:
        offsets = np.array([-2.0, -1.0, 0.0, 1.0, 2.0])
        weights = np.array([-1.0, 16.0, -30.0, 16.0, -1.0]) / 12
        h_scale = EPS ** (1 / 6)
    else:
        raise ValueError("only first and second derivatives are supported")
    r_arr = np.asarray(r, dtype=float)
    h = h_scale * np.maximum(1.0, np.abs(r_arr))
    if r_arr.ndim == 0:
        fx = np.asarray(f(r_arr + h * offsets))
        return np.tensordot(weights, fx, axes=(0, 0)) / h**order
    xs = r_arr[None, ...] + h[None, ...] * offsets.reshape((-1,) + (1,) * r_arr.ndim)
    fx = np.asarray(f(xs.ravel()))
    fx = fx.reshape(xs.shape + fx.shape[1:])
    hp = (h**order).reshape(h.shape + (1,) * (fx.ndim - xs.ndim))
    return np.tensordot(weights, fx, axes=(0, 0)) / hp


def wronskian_numeric(u: Callable, v: Callable, r: float, du: Callable | None = None,
                      dv: Callable | None = None) -> complex:
    """``u(r) v'(r) - u'(r) v(r)``, differentiating numerically where no derivative is given."""
    up = du(r) if du is not None else fd_derivative(u, r)
    vp = dv(r) if dv is not None else fd_derivative(v, r)
    return complex(u(r) * vp - up * v(r))


@dataclass(frozen=True)
class ChiSolution:
    """Numerical solution of the regular problem, sampled and densely interpolable."""

    energy: float
    r: np.ndarray
    u: np.ndarray
    du: np.ndarray
    _dense: Callable = field(repr=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        out = self._dense(np.ravel(r))[0]
        out = np.where(np.ravel(r) == 0.0, 0.0, out)
        return out.reshape(r.shape) if r.ndim else float(out[0])


def solve_chi_numeric(E: float, r_max: float, scale: PhysicalScale = DEFAULT_SCALE,
                      rtol: float = 1e-13, atol: float = 1e-15) -> ChiSolution:
    """Integrate ``-u'' = c E u`` from ``u(0) = 0``, ``u'(0) = sqrt(c E)`` with DOP853."""
    if not E > 0:
        raise NonPositiveEnergy(f"E must be positive, got {E}")
    if not r_max > 0:
        raise ValueError("r_max must be positive")
    cE = scale.c * E

    def rhs(_, y):
        return (y[1], -cE * y[0])

    sol = solve_ivp(rhs, (0.0, r_max), (0.0, math.sqrt(cE)), method="DOP853",
                    rtol=rtol, atol=atol, dense_output=True)
    if sol.status != 0:
        raise StepSizeUnderflow(f"integration failed at E={E}: {sol.message}")
    return ChiSolution(E, sol.t, sol.y[0], sol.y[1], sol.sol)
