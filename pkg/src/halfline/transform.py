"""The delta-normalized eigenfunction transform and functions of H0.

``sigma(r; E) = sqrt(rho(E)) sin(sqrt(c E) r)``. The forward map is
``phi_hat(E) = int_0^inf phi(r) sigma(r; E) dr`` and the inverse is
``phi(r) = int_0^inf phi_hat(E) sigma(r; E) dE``. Every energy integral is
done in ``k = sqrt(c E)``, where ``dE sigma(r; E) = 2 sqrt(k / (pi c)) sin(k r) dk``
has no endpoint singularity.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy.interpolate import CubicSpline

from .core import DEFAULT_SCALE, PhysicalScale
from .errors import NonPositiveEnergy, SingularEndpoint, UnboundedSymbol
from .quadrature import (DEFAULT_QUAD, QuadratureSpec, integrate, integrate_semi_infinite,
                         truncation_radius)
from .spectral import rho_density
from .testfunctions import GaussPoly

DEFAULT_K_MIN = 1e-3
DEFAULT_K_MAX = 12.0
DEFAULT_GRID_N = 256
SYMBOL_BOUND = 1e8


def sigma_eval(r, E, scale: PhysicalScale = DEFAULT_SCALE):
    E_arr = np.asarray(E, dtype=float)
    if np.any(E_arr <= 0):
        raise NonPositiveEnergy("sigma(r; E) needs E > 0")
    out = np.sqrt(rho_density(E_arr, scale)) * np.sin(np.sqrt(scale.c * E_arr) * np.asarray(r, float))
    return float(out) if np.ndim(out) == 0 else out


class GridMapping(enum.Enum):
    LINEAR_IN_E = "LinearInE"
    LINEAR_IN_K = "LinearInK"


@dataclass(frozen=True)
class EnergyGrid:
    nodes: np.ndarray
    mapping: GridMapping = GridMapping.LINEAR_IN_K

    def __post_init__(self):
        nodes = np.asarray(self.nodes, dtype=float)
        if nodes.ndim != 1 or nodes.size < 1:
            raise ValueError("grid needs at least one node")
        if np.any(nodes <= 0) or np.any(np.diff(nodes) <= 0):
            raise ValueError("grid nodes must be positive and strictly increasing")
        object.__setattr__(self, "nodes", nodes)

    @classmethod
    def linear_in_k(cls, k_min: float = DEFAULT_K_MIN, k_max: float = DEFAULT_K_MAX,
                    n: int = DEFAULT_GRID_N, scale: PhysicalScale = DEFAULT_SCALE) -> "EnergyGrid":
        if n < 2:
            raise ValueError("grid needs at least two nodes")
        k = np.linspace(k_min, k_max, n)
        return cls(k * k / scale.c, GridMapping.LINEAR_IN_K)

    @classmethod
    def linear_in_e(cls, e_min: float, e_max: float, n: int) -> "EnergyGrid":
        if n < 2:
            raise ValueError("grid needs at least two nodes")
        return cls(np.linspace(e_min, e_max, n), GridMapping.LINEAR_IN_E)

    @classmethod
    def at(cls, energies) -> "EnergyGrid":
        """Grid made of explicitly listed energies."""
        return cls(np.atleast_1d(np.asarray(energies, dtype=float)), GridMapping.LINEAR_IN_E)

    def k(self, scale: PhysicalScale = DEFAULT_SCALE) -> np.ndarray:
        return np.sqrt(scale.c * self.nodes)

    def __len__(self):
        return self.nodes.size


@dataclass(frozen=True)
class EnergyFunction:
    """A function of E on (0, inf): a callable, samples on a grid, or both.

    When both are present the callable is authoritative and the samples are a
    cached view of it on ``grid``.
    """

    func: Callable | None = None
    grid: EnergyGrid | None = None
    values: np.ndarray | None = None
    # wave number beyond which the function is negligible, when known in advance
    k_support: float | None = None
    _spline: Callable | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if self.func is None and (self.grid is None or self.values is None):
            raise ValueError("need a callable or samples on a grid")
        if self.values is not None:
            vals = np.asarray(self.values)
            if self.grid is None or vals.shape != self.grid.nodes.shape:
                raise ValueError("values must match the grid nodes")
            object.__setattr__(self, "values", vals)
            if self.func is None and vals.size >= 2:
                # interpolate phi_hat / E**(1/4), which is smooth in sqrt(E) for the family
                u = np.sqrt(self.grid.nodes)
                object.__setattr__(self, "_spline", CubicSpline(u, vals / np.sqrt(u)))

    @property
    def sampled(self) -> bool:
        return self.func is None

    def __call__(self, E):
        E = np.asarray(E, dtype=float)
        if self.func is not None:
            return self.func(E)
        if self.values.size == 1:
            if np.all(E == self.grid.nodes[0]):
                return np.broadcast_to(self.values[0], E.shape).copy()
            raise ValueError("a single-node sample can only be evaluated at its node")
        u = np.sqrt(E)
        inside = (E >= self.grid.nodes[0]) & (E <= self.grid.nodes[-1])
        out = np.where(inside, self._spline(u) * np.sqrt(u), 0.0)
        return out

    def on_grid(self, grid: EnergyGrid) -> "EnergyFunction":
        return EnergyFunction(self.func, grid, np.asarray(self(grid.nodes)), self.k_support)


def family_k_support(phi: GaussPoly, floor: float = 1e-18) -> float:
    """Wave number past which the image of ``phi`` is below ``floor`` times its scale.

    The sine transform of ``r**p exp(-w r**2/2)`` is a degree-``p`` polynomial
    in ``k/sqrt(w)`` times ``exp(-k**2/(2w))``; the cut solves
    ``(1 + x)**p exp(-x**2/2) = floor`` with ``x = k/sqrt(w)`` for each term.
    """
    if phi.is_zero():
        return 1.0
    cut = 0.0
    log_floor = math.log(floor)
    for _, p, w in phi.terms:
        x = math.sqrt(-2 * log_floor)
        for _ in range(50):
            x = math.sqrt(2 * (p * math.log1p(x) - log_floor))
        cut = max(cut, x * math.sqrt(w))
    return cut


def _sine_transform(phi: GaussPoly, k: np.ndarray, quad: QuadratureSpec) -> np.ndarray:
    """``int_0^inf phi(r) sin(k r) dr`` for every ``k`` in one adaptive pass."""
    k = np.atleast_1d(np.asarray(k, dtype=float))
    if phi.is_zero():
        return np.zeros(k.shape)
    width = min(phi.widths)

    def integrand(r):
        return phi(r)[:, None] * np.sin(r[:, None] * k[None, :])

    return integrate_semi_infinite(integrand, quad, scale_length=1.0 / math.sqrt(width))


def energy_image(phi: GaussPoly, E, quad: QuadratureSpec = DEFAULT_QUAD,
                 scale: PhysicalScale = DEFAULT_SCALE):
    """``phi_hat(E)`` evaluated by quadrature at arbitrary energies."""
    E = np.asarray(E, dtype=float)
    flat = np.ravel(E)
    if np.any(flat <= 0):
        raise NonPositiveEnergy("energies must be positive")
    k = np.sqrt(scale.c * flat)
    out = np.sqrt(rho_density(flat, scale)) * _sine_transform(phi, k, quad)
    return out.reshape(E.shape)


def forward_transform(phi: GaussPoly, grid: EnergyGrid | None = None,
                      quad: QuadratureSpec = DEFAULT_QUAD,
                      scale: PhysicalScale = DEFAULT_SCALE) -> EnergyFunction:
    """Energy representation of ``phi``: samples on ``grid`` plus an exact callable."""
    grid = grid if grid is not None else EnergyGrid.linear_in_k(scale=scale)
    func = lambda E: energy_image(phi, E, quad, scale)  # noqa: E731
    return EnergyFunction(func, grid, func(grid.nodes), family_k_support(phi))


def forward_transform_rho(phi: GaussPoly, grid: EnergyGrid | None = None,
                          quad: QuadratureSpec = DEFAULT_QUAD,
                          scale: PhysicalScale = DEFAULT_SCALE) -> EnergyFunction:
    """``int phi(r) chi(r; E) dr`` (image square integrable against ``rho(E) dE``)."""
    grid = grid if grid is not None else EnergyGrid.linear_in_k(scale=scale)

    def func(E):
        E = np.asarray(E, dtype=float)
        return _sine_transform(phi, np.sqrt(scale.c * np.ravel(E)), quad).reshape(E.shape)

    return EnergyFunction(func, grid, func(grid.nodes), family_k_support(phi))


def _check_endpoint(fhat: EnergyFunction, scale: PhysicalScale):
    probes = np.array([1e-6, 1e-9, 1e-12]) / scale.c
    vals = np.abs(np.asarray(fhat(probes)))
    if vals[2] > vals[1] > vals[0] and vals[2] > 10 * max(vals[0], 1e-300):
        raise SingularEndpoint("the energy function grows as E -> 0+")


def inverse_transform(fhat: EnergyFunction, r_grid, quad: QuadratureSpec = DEFAULT_QUAD,
                      scale: PhysicalScale = DEFAULT_SCALE,
                      breakpoints: Sequence[float] = ()) -> np.ndarray:
    """``int_0^inf fhat(E) sigma(r; E) dE`` at each radius in ``r_grid``.

    ``breakpoints`` are energies where ``fhat`` is not smooth (band edges).
    Sampled functions are integrated through their spline over the grid span.
    """
    r = np.atleast_1d(np.asarray(r_grid, dtype=float))
    c = scale.c
    k_bps = [math.sqrt(c * e) for e in breakpoints if e > 0]

    def integrand(k):
        vals = np.asarray(fhat(k * k / c))
        w = vals * 2.0 * np.sqrt(k / (math.pi * c))
        return w[:, None] * np.sin(k[:, None] * r[None, :])

    if fhat.sampled:
        k_lo, k_hi = np.sqrt(c * fhat.grid.nodes[[0, -1]])
        return integrate(integrand, k_lo, k_hi, quad, breakpoints=k_bps)
    _check_endpoint(fhat, scale)
    if fhat.k_support is None:
        return integrate_semi_infinite(integrand, quad, breakpoints=k_bps)
    K = fhat.k_support
    octaves = [K * 2.0**-j for j in range(1, 6)]
    return integrate(integrand, 0.0, K, quad, breakpoints=sorted(set(octaves) | set(k_bps)))


def _image_of(phi, quad, scale) -> EnergyFunction:
    if isinstance(phi, EnergyFunction):
        return phi
    return EnergyFunction(lambda E: energy_image(phi, E, quad, scale),
                          k_support=family_k_support(phi))


def _check_symbol(G: Callable, bound: float, scale: PhysicalScale):
    probe = EnergyGrid.linear_in_k(scale=scale).nodes
    sup = float(np.max(np.abs(np.asarray(G(probe)))))
    if not sup <= bound:
        raise UnboundedSymbol(f"sup |G| = {sup:.3e} on the probe grid exceeds {bound:.3e}")


def multiply_image(G: Callable, phi, quad: QuadratureSpec = DEFAULT_QUAD,
                   scale: PhysicalScale = DEFAULT_SCALE, bound: float = SYMBOL_BOUND) -> EnergyFunction:
    """Energy representation of ``G(H0) phi``: the image of ``phi`` times ``G``."""
    _check_symbol(G, bound, scale)
    image = _image_of(phi, quad, scale)
    return EnergyFunction(lambda E: np.asarray(G(E)) * image(E), k_support=image.k_support)


def apply_borel_function(G: Callable, phi, r_grid, quad: QuadratureSpec = DEFAULT_QUAD,
                         scale: PhysicalScale = DEFAULT_SCALE, bound: float = SYMBOL_BOUND,
                         breakpoints: Sequence[float] = ()) -> np.ndarray:
    """``G(H0) phi`` on ``r_grid``, i.e. ``U^-1 [G U phi]``.

    ``phi`` is a family member or an :class:`EnergyFunction` already in the
    energy representation.
    """
    return inverse_transform(multiply_image(G, phi, quad, scale, bound), r_grid, quad, scale,
                             breakpoints)


def band_indicator(E1: float, E2: float) -> Callable:
    def G(E):
        E = np.asarray(E, dtype=float)
        return ((E >= E1) & (E <= E2)).astype(float)
    return G


def spectral_projection(phi, E1: float, E2: float, r_grid, quad: QuadratureSpec = DEFAULT_QUAD,
                        scale: PhysicalScale = DEFAULT_SCALE) -> np.ndarray:
    """Projection of ``phi`` onto the spectral subspace of ``[E1, E2]``."""
    return apply_borel_function(band_indicator(E1, E2), phi, r_grid, quad, scale,
                                breakpoints=(E1, E2))


@dataclass
class PropagationInfo:
    k_cutoff: float
    energy_cutoff: float
    truncated_mass: float


def propagate(phi: GaussPoly, t: float, r_grid, quad: QuadratureSpec = DEFAULT_QUAD,
              scale: PhysicalScale = DEFAULT_SCALE, full_output: bool = False):
    """``psi(r, t) = int exp(-i E t / hbar) phi_hat(E) sigma(r; E) dE``.

    The energy integral is truncated where ``phi_hat`` has decayed; the mass
    beyond the cut is reported in the info object.
    """
    r = np.atleast_1d(np.asarray(r_grid, dtype=float))
    c = scale.c
    image = _image_of(phi, quad, scale)
    G = lambda E: np.exp(-1j * np.asarray(E) * t / scale.hbar)  # noqa: E731
    psi = apply_borel_function(G, image, r, quad, scale)

    k_cut = image.k_support
    if k_cut is None:
        k_cut = truncation_radius(lambda k: image(k * k / c), quad.truncation_threshold)
    # |phi_hat|^2 dE in k over one octave past the cut bounds the discarded tail
    tail = float(integrate(lambda k: np.abs(image(k * k / c)) ** 2 * 2 * k / c,
                           k_cut, 2 * k_cut, quad.with_tol(abs_tol=1e-30)))
    if r.size > 1:
        dr = float(np.max(np.diff(np.sort(r))))
        if dr > math.pi / k_cut:
            warnings.warn(
                f"r grid spacing {dr:.3g} cannot resolve wavelength {2 * math.pi / k_cut:.3g} "
                "at the energy cutoff", RuntimeWarning, stacklevel=2)
    if full_output:
        return psi, PropagationInfo(k_cut, k_cut**2 / c, tail)
    return psi
