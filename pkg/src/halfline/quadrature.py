"""Adaptive Gauss-Kronrod quadrature on [0, inf) and Richardson limits.

Integrands are called with a 1-D array of abscissae and may return either an
array of the same length or an array of shape ``(n, ...)``; the trailing
axes are integrated together, which is how transforms on whole grids of
energies or radii are evaluated with a single adaptive pass.

Panels are refined with a local acceptance rule: a panel of length ``h`` on a
domain of length ``L`` is frozen once its Kronrod-minus-Gauss error is below
``tol * h / L``, so the accepted errors sum to at most ``tol``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import LimitDiverges, NoConvergence, NonFiniteIntegrand, ToleranceNotMet

# 15-point Kronrod nodes (positive half) and weights, with the embedded 7-point Gauss rule.
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
NODES = np.concatenate([-_XK[:-1], _XK[::-1]])
W_KRONROD = np.concatenate([_WK[:-1], _WK[::-1]])
W_GAUSS = np.zeros(15)
W_GAUSS[1:15:2] = np.concatenate([_WG[:-1], _WG[::-1]])
_ROUNDOFF = 50 * np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureSpec:
    rel_tol: float = 1e-12
    abs_tol: float = 1e-14
    truncation_threshold: float = 1e-16
    max_subdivisions: int = 4000

    def __post_init__(self):
        if not (self.rel_tol > 0 and self.abs_tol > 0 and self.truncation_threshold > 0):
            raise ValueError("tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")

    def with_tol(self, rel_tol=None, abs_tol=None) -> "QuadratureSpec":
        return QuadratureSpec(rel_tol if rel_tol is not None else self.rel_tol,
                              abs_tol if abs_tol is not None else self.abs_tol,
                              self.truncation_threshold, self.max_subdivisions)


DEFAULT_QUAD = QuadratureSpec()


@dataclass
class QuadratureInfo:
    error: np.ndarray | float
    panels: int
    evaluations: int
    upper: float = math.nan


def _eval_panels(f, a, b):
    mid = 0.5 * (a + b)
    half = 0.5 * (b - a)
    x = (mid[:, None] + half[:, None] * NODES[None, :]).ravel()
    fx = np.asarray(f(x))
    if fx.shape[:1] != x.shape:
        raise ValueError(f"integrand returned shape {fx.shape} for {x.size} abscissae")
    if not np.all(np.isfinite(fx)):
        raise NonFiniteIntegrand("integrand returned a non-finite value")
    fx = fx.reshape((a.size, 15) + fx.shape[1:])
    wk = W_KRONROD.reshape((1, 15) + (1,) * (fx.ndim - 2))
    wg = W_GAUSS.reshape(wk.shape)
    hk = half.reshape((-1,) + (1,) * (fx.ndim - 2))
    kron = hk * np.sum(wk * fx, axis=1)
    gauss = hk * np.sum(wg * fx, axis=1)
    resabs = np.abs(hk) * np.sum(wk * np.abs(fx), axis=1)
    return kron, np.abs(kron - gauss), resabs


def integrate(f: Callable, a: float, b: float, spec: QuadratureSpec = DEFAULT_QUAD,
              breakpoints: Sequence[float] = (), full_output: bool = False):
    """Integrate ``f`` over the finite interval ``[a, b]`` to ``spec``'s tolerances.

    ``breakpoints`` inside the interval start their own panels (kinks, jumps).
    For vector-valued ``f`` the relative tolerance applies to the largest
    component, so small components are resolved to the same absolute level.
    """
    a = float(a)
    b = float(b)
    if a == b:
        z = np.zeros(np.asarray(f(np.array([a]))).shape[1:])
        return (z, QuadratureInfo(z, 0, 1)) if full_output else z[()]
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    edges = np.unique(np.clip(np.concatenate([[a, b], np.asarray(breakpoints, float)]), a, b))
    lo, hi = edges[:-1], edges[1:]
    length = b - a

    acc_val = 0.0
    acc_err = 0.0
    nevals = 0
    npanels = 0
    while True:
        val, err, resabs = _eval_panels(f, lo, hi)
        nevals += 15 * lo.size
        npanels += lo.size
        total = acc_val + val.sum(axis=0)
        # vector integrands share one norm-wise tolerance (max over components)
        tol = max(spec.abs_tol, spec.rel_tol * float(np.max(np.abs(total))))
        width = hi - lo
        # a component whose estimate is at the roundoff level of sum |f| cannot improve
        scaled = np.where(err <= _ROUNDOFF * resabs, 0.0, err / tol)
        if scaled.ndim > 1:
            scaled = scaled.reshape(scaled.shape[0], -1).max(axis=1)
        ok = (scaled <= width / length) | (width <= 64 * np.finfo(float).eps * max(abs(a), abs(b), 1.0))
        acc_val = acc_val + val[ok].sum(axis=0)
        acc_err = acc_err + err[ok].sum(axis=0)
        if ok.all():
            break
        lo, hi = lo[~ok], hi[~ok]
        if npanels + 2 * lo.size > spec.max_subdivisions:
            est = acc_val + val[~ok].sum(axis=0)
            achieved = acc_err + err[~ok].sum(axis=0)
            raise ToleranceNotMet(
                f"quadrature on [{a}, {b}] stopped after {npanels} panels; "
                f"achieved error {np.max(achieved):.3e}",
                value=sign * est, error=achieved,
            )
        mid = 0.5 * (lo + hi)
        lo, hi = np.concatenate([lo, mid]), np.concatenate([mid, hi])
    out = sign * acc_val
    if full_output:
        return out, QuadratureInfo(acc_err, npanels, nevals, b)
    return out[()] if isinstance(out, np.ndarray) else out


def truncation_radius(f: Callable, threshold: float, start: float = 1.0, max_radius: float = 2.0**40):
    """Smallest ``R = start * 2**j`` beyond which probes of ``|f|`` stay below the threshold.

    The threshold is relative to the largest magnitude seen (floored at one),
    and five probes on ``[R, 2R]`` guard against zeros of oscillating integrands.
    """
    probe = np.array([1.0, 1.25, 1.5, 1.75, 2.0])
    peak = 1.0
    R = start
    while R <= max_radius:
        vals = np.abs(np.asarray(f(R * probe)))
        if not np.all(np.isfinite(vals)):
            raise NonFiniteIntegrand(f"integrand is not finite near r={R}")
        m = float(vals.max()) if vals.size else 0.0
        peak = max(peak, m)
        if m < threshold * peak:
            return R
        R *= 2.0
    raise ToleranceNotMet(f"integrand has not decayed below {threshold} by r={max_radius}")


def integrate_semi_infinite(f: Callable, spec: QuadratureSpec = DEFAULT_QUAD,
                            breakpoints: Sequence[float] = (), full_output: bool = False,
                            scale_length: float = 1.0):
    """Integrate ``f`` over ``[0, inf)``, cutting the tail where ``|f|`` has decayed.

    The cut ``R`` is found by probing at ``scale_length * 2**j``; ``[0, R]`` is then
    split at the powers of two below ``R`` so each decade gets its own panels.
    """
    R = truncation_radius(f, spec.truncation_threshold, start=scale_length)
    bps = [scale_length * 2.0**j for j in range(int(round(math.log2(R / scale_length))))]
    bps = sorted(set(bps) | {float(x) for x in breakpoints if 0 < x < R})
    out = integrate(f, 0.0, R, spec, breakpoints=bps, full_output=full_output)
    if full_output:
        out[1].upper = R
    return out


@dataclass(frozen=True)
class LimitSpec:
    """Geometric sequence ``start * ratio**j`` used to approach a limit at zero."""

    start: float = 0.5
    ratio: float = 0.5
    max_steps: int = 24
    extrapolation_order: int = 6
    tol: float = 1e-13

    def __post_init__(self):
        if not self.start > 0:
            raise ValueError("start must be positive")
        if not 0 < self.ratio < 1:
            raise ValueError("ratio must lie in (0, 1)")
        if self.max_steps < 1 or self.extrapolation_order < 0:
            raise ValueError("max_steps must be >= 1 and extrapolation_order >= 0")

    def sequence(self) -> np.ndarray:
        return self.start * self.ratio ** np.arange(self.max_steps)


DEFAULT_LIMIT = LimitSpec()


@dataclass
class LimitInfo:
    error: float
    steps: int
    samples: list = field(default_factory=list)


def limit_extrapolate(g: Callable[[float], complex], spec: LimitSpec = DEFAULT_LIMIT,
                      full_output: bool = False):
    """``lim_{x -> 0+} g(x)`` by Richardson extrapolation in integer powers of ``x``.

    Each new sample ``g(start * ratio**j)`` adds a row to the Richardson table;
    columns eliminate ``x, x**2, ...`` up to ``extrapolation_order``. The change
    of the best extrapolant between rows is the error estimate.
    """
    rows: list[list[complex]] = []
    xs = spec.sequence()
    best = None
    diffs: list[float] = []
    samples = []
    for j, x in enumerate(xs):
        gx = complex(g(float(x)))
        if not (math.isfinite(gx.real) and math.isfinite(gx.imag)):
            raise LimitDiverges(f"g({x:.3e}) is not finite")
        samples.append(gx)
        row = [gx]
        for i in range(1, min(j, spec.extrapolation_order) + 1):
            q = spec.ratio**i
            row.append((row[i - 1] - q * rows[j - 1][i - 1]) / (1.0 - q))
        rows.append(row)
        cur = row[-1]
        if best is not None:
            d = abs(cur - best)
            diffs.append(d)
            small = spec.tol * max(1.0, abs(cur))
            if d <= small and (len(diffs) < 2 or diffs[-2] <= 10 * small):
                info = LimitInfo(d, j + 1, samples)
                return (cur, info) if full_output else cur
            # divergence: both the corrections and |g| grow geometrically
            if (len(diffs) >= 4 and diffs[-1] > diffs[-2] > diffs[-3] > diffs[-4]
                    and all(abs(samples[-i]) > 1.1 * abs(samples[-i - 1]) for i in (1, 2, 3))):
                raise LimitDiverges(
                    f"extrapolants grow: last change {d:.3e} at x={x:.3e}, |g|={abs(gx):.3e}"
                )
        best = cur
    err = diffs[-1] if diffs else math.inf
    raise NoConvergence(f"no convergence after {spec.max_steps} steps (last change {err:.3e})",
                        value=best, error=err)
