"""Polynomial-times-Gaussian test functions with exact derivatives.

A member of the family is ``phi(r) = sum_i a_i r**p_i exp(-w_i r**2 / 2)``.
Internally the terms are grouped by width into ordinary polynomials, so
``d/dr [P(r) exp(-w r**2/2)] = (P'(r) - w r P(r)) exp(-w r**2/2)`` keeps every
derivative inside the representation.

:class:`GaussPoly` admits any powers; :class:`TestFunction` additionally
requires odd powers and positive widths, which is what puts it in the
domain where ``phi`` and all its ``h0`` images vanish at the origin.
"""
from __future__ import annotations

import math
from typing import Iterable

import numpy as np
from numpy.polynomial import polynomial as P

from .core import DEFAULT_SCALE, PhysicalScale


def _trim(c: np.ndarray) -> np.ndarray:
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else c[:0]


class GaussPoly:
    """Finite sum of ``a r**p exp(-w r**2 / 2)`` with exact calculus."""

    __slots__ = ("_parts",)

    def __init__(self, terms: Iterable[tuple] = ()):
        parts: dict[float, np.ndarray] = {}
        for coef, power, width in terms:
            power = int(power)
            if power < 0:
                raise ValueError("powers must be nonnegative")
            width = float(width)
            c = parts.get(width, np.zeros(0, dtype=complex))
            if c.size <= power:
                c = np.concatenate([c, np.zeros(power + 1 - c.size, dtype=complex)])
            c[power] += coef
            parts[width] = c
        self._parts = self._normalize(parts)

    @staticmethod
    def _normalize(parts):
        out = {}
        for w in sorted(parts):
            c = _trim(np.asarray(parts[w], dtype=complex))
            if c.size:
                out[w] = c
        return out

    @classmethod
    def _from_parts(cls, parts):
        obj = cls.__new__(cls)
        obj._parts = cls._normalize(parts)
        return obj

    def _like(self, parts):
        # Results of operations that preserve the family stay in the same class.
        return type(self)._from_parts(parts)

    @property
    def terms(self) -> tuple:
        """Canonical ``(coefficient, power, width)`` triples, zero terms dropped."""
        out = []
        for w, c in self._parts.items():
            for p, a in enumerate(c):
                if a != 0:
                    a = a.real if a.imag == 0 else complex(a)
                    out.append((a, p, w))
        return tuple(out)

    @property
    def widths(self) -> tuple:
        return tuple(self._parts)

    @property
    def is_real(self) -> bool:
        return all(not np.any(c.imag) for c in self._parts.values())

    def coefficient_vector(self) -> np.ndarray:
        return np.concatenate([c for c in self._parts.values()]) if self._parts else np.zeros(0)

    def is_zero(self) -> bool:
        return not self._parts

    def __call__(self, r, derivative_order: int = 0):
        f = self.derivative(derivative_order) if derivative_order else self
        r = np.asarray(r, dtype=float)
        out = np.zeros(r.shape, dtype=complex)
        for w, c in f._parts.items():
            out = out + P.polyval(r, c) * np.exp(-0.5 * w * r * r)
        if self.is_real:
            out = out.real
        return out if out.ndim else out[()]

    def derivative(self, order: int = 1) -> "GaussPoly":
        if order < 0:
            raise ValueError("derivative order must be nonnegative")
        parts = dict(self._parts)
        for _ in range(order):
            new = {}
            for w, c in parts.items():
                d = P.polyder(c) if c.size > 1 else np.zeros(1, dtype=complex)
                new[w] = P.polysub(d, w * P.polymulx(c))
            parts = new
        # Differentiation flips parity, so the result leaves TestFunction for odd orders.
        return GaussPoly._from_parts(parts) if order % 2 else self._like(parts)

    def conj(self) -> "GaussPoly":
        return self._like({w: np.conj(c) for w, c in self._parts.items()})

    def mul_poly(self, coeffs) -> "GaussPoly":
        """Multiply by the ordinary polynomial with ascending ``coeffs``."""
        coeffs = np.asarray(coeffs, dtype=complex)
        return GaussPoly._from_parts({w: P.polymul(c, coeffs) for w, c in self._parts.items()})

    def __add__(self, other):
        if not isinstance(other, GaussPoly):
            return NotImplemented
        parts = dict(self._parts)
        for w, c in other._parts.items():
            parts[w] = P.polyadd(parts[w], c) if w in parts else c
        cls = TestFunction if isinstance(self, TestFunction) and isinstance(other, TestFunction) else GaussPoly
        return cls._from_parts(parts)

    def __neg__(self):
        return self._like({w: -c for w, c in self._parts.items()})

    def __sub__(self, other):
        if not isinstance(other, GaussPoly):
            return NotImplemented
        return self + (-other)

    def __mul__(self, scalar):
        if isinstance(scalar, GaussPoly) or not np.isscalar(scalar):
            return NotImplemented
        return self._like({w: scalar * c for w, c in self._parts.items()})

    __rmul__ = __mul__

    def __truediv__(self, scalar):
        return self * (1.0 / scalar)

    def __eq__(self, other):
        if not isinstance(other, GaussPoly):
            return NotImplemented
        return self._parts.keys() == other._parts.keys() and all(
            np.array_equal(self._parts[w], other._parts[w]) for w in self._parts
        )

    def __hash__(self):
        return hash(self.terms)

    def __repr__(self):
        body = " + ".join(f"{a!r}*r^{p}*exp(-{w!r} r^2/2)" for a, p, w in self.terms) or "0"
        return f"{type(self).__name__}({body})"


class TestFunction(GaussPoly):
    """Family member with odd powers and positive widths.

    >>> phi = TestFunction([(1.0, 1, 1.0)])      # r exp(-r^2/2)
    >>> round(float(phi(1.0)), 6)
    0.606531
    """

    __test__ = False  # keep pytest from collecting the class
    __slots__ = ()

    def __init__(self, terms: Iterable[tuple] = ()):
        terms = list(terms)
        for _coef, power, width in terms:
            if int(power) != power or int(power) % 2 != 1:
                raise ValueError(
                    f"power {power} is not odd: family members must satisfy phi(0) = 0 "
                    "and (h0^n phi)(0) = 0 for every n"
                )
            if not float(width) > 0:
                raise ValueError(f"width {width} must be positive")
        super().__init__(terms)

    @classmethod
    def unchecked(cls, terms: Iterable[tuple]) -> GaussPoly:
        """Build a candidate that bypasses the family invariants (for certification tests)."""
        return GaussPoly(terms)


def testfn_eval(phi: GaussPoly, r, derivative_order: int = 0):
    return phi(r, derivative_order)


def h0_apply(phi: GaussPoly, n: int = 1, scale: PhysicalScale = DEFAULT_SCALE) -> GaussPoly:
    """``(h0)**n phi`` with ``h0 = -(1/c) d^2/dr^2``, exactly."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if n == 0:
        return phi
    return (-1.0 / scale.c) ** n * phi.derivative(2 * n)


def h0_plus_one_apply(phi: GaussPoly, m: int, scale: PhysicalScale = DEFAULT_SCALE) -> GaussPoly:
    """``(h0 + 1)**m phi`` expanded binomially."""
    out = phi * 0.0
    for j in range(m + 1):
        out = out + math.comb(m, j) * h0_apply(phi, j, scale)
    return out


def parse_test_function(text: str) -> TestFunction:
    """Parse ``"p,w,a;p,w,a;..."`` (power, width, coefficient) into a family member."""
    terms = []
    for chunk in filter(None, (s.strip() for s in text.split(";"))):
        fields = [s.strip() for s in chunk.split(",")]
        if len(fields) != 3:
            raise ValueError(f"term {chunk!r} must read 'power,width,coefficient'")
        p, w, a = fields
        try:
            power = int(p)
        except ValueError:
            raise ValueError(f"power {p!r} is not an integer") from None
        terms.append((float(a), power, float(w)))
    if not terms:
        raise ValueError("empty function specification")
    return TestFunction(terms)


def random_test_function(rng: np.random.Generator, max_terms: int = 3,
                         powers=(1, 3, 5), widths=(0.6, 2.0)) -> TestFunction:
    """Random family member with unit-scale coefficients; deterministic given ``rng``."""
    nterms = int(rng.integers(1, max_terms + 1))
    terms = [
        (float(rng.normal()), int(rng.choice(powers)), float(rng.uniform(*widths)))
        for _ in range(nterms)
    ]
    f = TestFunction(terms)
    return f if not f.is_zero() else TestFunction([(1.0, 1, 1.0)])
