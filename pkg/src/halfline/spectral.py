"""Spectral density of H0 and its recovery from the jump of theta_11.

The density is ``rho(E) = (1/pi) c / sqrt(c E)`` on ``E > 0``. Numerically it is
recovered as ``lim_{eps -> 0+} [theta_11(E - i eps) - theta_11(E + i eps)] / (2 pi i)``,
and interval masses as the nested limit over ``delta`` (outer) and ``eps``
(inner) of the integrated jump on ``[E1 + delta, E2 - delta]``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, replace

import numpy as np

from .core import DEFAULT_SCALE, PhysicalScale
from .errors import NonPositiveEnergy
from .green import theta11, theta_plus
from .quadrature import (DEFAULT_LIMIT, DEFAULT_QUAD, LimitSpec, QuadratureSpec, integrate,
                         limit_extrapolate)

# classification threshold, in units of sqrt(c)/pi
JUMP_THRESHOLD = 1e-6


def rho_density(E, scale: PhysicalScale = DEFAULT_SCALE):
    E_arr = np.asarray(E, dtype=float)
    if np.any(E_arr <= 0):
        raise NonPositiveEnergy("the spectral density is defined for E > 0 only")
    out = scale.c / np.sqrt(scale.c * E_arr) / math.pi
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class SpectralDensity:
    scale: PhysicalScale = DEFAULT_SCALE

    def __call__(self, E):
        return rho_density(E, self.scale)

    @property
    def sqrt_e_times_rho(self) -> float:
        """The constant ``rho(E) * sqrt(E) = sqrt(c) / pi``."""
        return math.sqrt(self.scale.c) / math.pi


def regularized_jump(E, eps, scale: PhysicalScale = DEFAULT_SCALE):
    """``[theta_11(E - i eps) - theta_11(E + i eps)] / (2 pi i)`` at ``eps > 0``."""
    E = np.asarray(E, dtype=float)
    out = (theta11(E - 1j * eps, scale) - theta11(E + 1j * eps, scale)) / (2j * math.pi)
    return out


def spectral_jump(E: float, spec: LimitSpec = DEFAULT_LIMIT,
                  scale: PhysicalScale = DEFAULT_SCALE, full_output: bool = False):
    """Boundary-value jump of ``theta_11`` across the real axis at ``E``.

    ``eps`` runs through ``|E| * start * ratio**j`` so the sequence is scale free.
    """
    E = float(E)
    if E == 0.0:
        raise NonPositiveEnergy("the jump is singular at E = 0")
    return limit_extrapolate(lambda x: complex(regularized_jump(E, abs(E) * x, scale)),
                             spec, full_output=full_output)


def theta_jump_matrix(E: float, eps: float, scale: PhysicalScale = DEFAULT_SCALE) -> np.ndarray:
    """Entrywise ``[theta(E - i eps) - theta(E + i eps)] / (2 pi i)`` for ``E > 0``."""
    lower = theta_plus(E - 1j * eps, scale).entries
    upper = theta_plus(E + 1j * eps, scale).entries
    return (lower - upper) / (2j * math.pi)


def _integrated_jump(a: float, b: float, eps: float, quad: QuadratureSpec,
                     scale: PhysicalScale) -> float:
    """Integral of the regularized jump over ``[a, b]``."""
    total = 0.0
    if a < 0:
        neg_hi = min(b, 0.0)
        total += integrate(lambda E: regularized_jump(E, eps, scale).real, a, neg_hi, quad)
    if b > 0:
        # E = u**2 removes the E**(-1/2) growth; u = sqrt(eps) marks the smoothing scale
        lo = math.sqrt(max(a, 0.0))
        hi = math.sqrt(b)
        bps = [math.sqrt(eps)] if lo < math.sqrt(eps) < hi else []
        total += integrate(lambda u: regularized_jump(u * u, eps, scale).real * 2 * u,
                           lo, hi, quad, breakpoints=bps)
    return total


def stieltjes_measure(E1: float, E2: float, spec: LimitSpec = DEFAULT_LIMIT,
                      quad: QuadratureSpec = DEFAULT_QUAD, scale: PhysicalScale = DEFAULT_SCALE,
                      full_output: bool = False):
    """Spectral mass of ``(E1, E2)`` by numerical Stieltjes inversion.

    For each ``delta`` the inner limit ``eps -> 0`` is extrapolated first, then
    the outer limit ``delta -> 0``. When the interval reaches the threshold
    ``E = 0`` the error terms come in half-integer powers, so the
    extrapolation runs in ``sqrt(eps)`` (and in ``sqrt(delta)`` if an endpoint
    sits exactly at zero).
    """
    E1 = float(E1)
    E2 = float(E2)
    if not E1 < E2:
        raise ValueError("need E1 < E2")
    L = E2 - E1
    nonzero_ends = [abs(e) for e in (E1, E2) if e != 0.0]
    delta0 = 0.25 * min([L] + nonzero_ends)
    p_delta = 2 if 0.0 in (E1, E2) else 1
    p_eps = 2 if E1 < E2 and E1 <= 0.0 < E2 else 1
    # Richardson cannot beat the quadrature noise it differentiates
    tol = max(spec.tol, 100 * quad.rel_tol)
    inner_spec = replace(spec, tol=tol)
    outer_spec = replace(spec, tol=10 * tol, start=1.0)

    def at_delta(x):
        delta = delta0 * x**p_delta
        a, b = E1 + delta, E2 - delta
        # eps is measured against the distance of the interval from the branch point
        eps0 = min(L, a) if a > 0 else L
        return limit_extrapolate(
            lambda y: _integrated_jump(a, b, eps0 * y**p_eps, quad, scale), inner_spec)

    value, info = limit_extrapolate(at_delta, outer_spec, full_output=True)
    value = float(value.real)
    return (value, info) if full_output else value


class Verdict(enum.Enum):
    RESOLVENT_SET = "ResolventSet"
    CONTINUOUS_SPECTRUM = "ContinuousSpectrum"
    SPECTRUM_BOUNDARY = "SpectrumBoundary"


@dataclass(frozen=True)
class SpectrumClassification:
    point: float
    verdict: Verdict
    jump_value: complex


def classify_point(E: float, spec: LimitSpec = DEFAULT_LIMIT,
                   scale: PhysicalScale = DEFAULT_SCALE) -> SpectrumClassification:
    E = float(E)
    if E == 0.0:
        return SpectrumClassification(E, Verdict.SPECTRUM_BOUNDARY, complex(math.nan, math.nan))
    jump = spectral_jump(E, spec, scale)
    threshold = JUMP_THRESHOLD * math.sqrt(scale.c) / math.pi
    verdict = Verdict.CONTINUOUS_SPECTRUM if abs(jump) > threshold else Verdict.RESOLVENT_SET
    return SpectrumClassification(E, verdict, jump)
