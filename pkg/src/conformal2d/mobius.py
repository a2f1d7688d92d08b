"""Fractional linear maps of the plane and other conformal jet maps.

A map is represented by its complex third-order jet z -> (w, d1, d2, d3).
For an orientation-preserving map these are the derivatives of a holomorphic
function of z; for an orientation-reversing one (``conjugating=True``) they
are the derivatives of the generating holomorphic function evaluated at
conj(z), so that w = g(conj(z)).  Third derivatives are carried because exact
Hessians of log-Jacobian terms need them.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from numpy.polynomial import polynomial as npoly

from .errors import PoleError, DomainError
from .geometry import Vec2, Orthogonal2

POLE_GUARD = 1e-14
CRITICAL_GUARD = 1e-6


class MapJet(NamedTuple):
    value: complex
    d1: complex
    d2: complex
    d3: complex


class JacobianData(NamedTuple):
    matrix: np.ndarray
    det: float
    conformal_factor: float
    orthogonal: Orthogonal2


class AnalyticMap:
    """Base class for conformal maps with third-order jets."""

    conjugating: bool = False

    def jet(self, z: complex) -> MapJet:
        raise NotImplementedError

    def excluded(self, z: complex) -> bool:
        """Best-effort predicate for statically known excluded points."""
        return False

    def apply_complex(self, z: complex) -> complex:
        return self.jet(z).value

    def apply(self, p) -> Vec2:
        return Vec2.from_complex(self.jet(Vec2.of(p).to_complex()).value)

    def jacobian(self, p) -> JacobianData:
        """Real 2x2 Jacobian, its determinant, conformal factor |det|, and
        the orthogonal part o = conf^{-1/2} J."""
        j = self.jet(Vec2.of(p).to_complex())
        a, b = j.d1.real, j.d1.imag
        if self.conjugating:
            mat = np.array([[a, b], [b, -a]])
            det = -(a * a + b * b)
        else:
            mat = np.array([[a, -b], [b, a]])
            det = a * a + b * b
        conf = a * a + b * b
        if conf <= 0.0:
            raise DomainError("vanishing derivative: no conformal factor")
        orth = Orthogonal2.from_array(mat / math.sqrt(conf))
        return JacobianData(mat, det, conf, orth)


@dataclass(frozen=True)
class MobiusMap(AnalyticMap):
    """z -> (a z + b)/(c z + d), applied to conj(z) instead if conjugating.

    Coefficients are normalized to a d - b c = 1 at construction, so the
    pole guard |c z + d| < 1e-14 is scale free.
    """

    a: complex
    b: complex
    c: complex
    d: complex
    conjugating: bool = False

    def __post_init__(self) -> None:
        coeffs = (self.a, self.b, self.c, self.d)
        if not all(cmath.isfinite(w) for w in coeffs):
            raise ValueError("non-finite coefficient")
        det = self.a * self.d - self.b * self.c
        if abs(det) < 1e-30:
            raise ValueError("singular coefficient matrix")
        s = cmath.sqrt(det)
        for name, w in zip(("a", "b", "c", "d"), coeffs):
            object.__setattr__(self, name, complex(w) / s)

    # -- constructors -------------------------------------------------

    @classmethod
    def identity(cls) -> "MobiusMap":
        return cls(1, 0, 0, 1)

    @classmethod
    def translation(cls, t) -> "MobiusMap":
        return cls(1, Vec2.of(t).to_complex(), 0, 1)

    @classmethod
    def dilation(cls, lam: float) -> "MobiusMap":
        if lam == 0:
            raise ValueError("zero dilation")
        return cls(lam, 0, 0, 1)

    @classmethod
    def rotation(cls, theta: float) -> "MobiusMap":
        return cls(cmath.exp(1j * theta), 0, 0, 1)

    @classmethod
    def reflection(cls) -> "MobiusMap":
        """z -> conj(z)."""
        return cls(1, 0, 0, 1, conjugating=True)

    @classmethod
    def inversion(cls) -> "MobiusMap":
        """x -> x/|x|^2, i.e. z -> 1/conj(z)."""
        return cls(0, 1, 1, 0, conjugating=True)

    @classmethod
    def sphere_inversion(cls, center, radius: float) -> "MobiusMap":
        """Inversion in the circle of given center and radius.

        w -> x0 + radius^2 (w - x0)/|w - x0|^2; fixes the circle pointwise.
        """
        if radius <= 0:
            raise ValueError("radius must be positive")
        x0 = Vec2.of(center).to_complex()
        return cls(x0, radius**2 - abs(x0) ** 2, 1, -x0.conjugate(), conjugating=True)

    # -- evaluation ----------------------------------------------------

    @property
    def pole(self) -> complex | None:
        """Excluded point in the source plane, if any."""
        if self.c == 0:
            return None
        p = -self.d / self.c
        return p.conjugate() if self.conjugating else p

    def excluded(self, z: complex) -> bool:
        p = self.pole
        return p is not None and abs(z - p) < POLE_GUARD

    def jet(self, z: complex) -> MapJet:
        zz = z.conjugate() if self.conjugating else z
        den = self.c * zz + self.d
        if abs(den) < POLE_GUARD:
            raise PoleError(f"evaluation within {POLE_GUARD} of pole")
        value = (self.a * zz + self.b) / den
        d1 = 1.0 / (den * den)
        d2 = -2.0 * self.c * d1 / den
        d3 = 6.0 * self.c * self.c * d1 / (den * den)
        return MapJet(value, d1, d2, d3)

    # -- group structure -------------------------------------------------

    def inverse(self) -> "MobiusMap":
        a, b, c, d = self.d, -self.b, -self.c, self.a
        if self.conjugating:
            a, b, c, d = a.conjugate(), b.conjugate(), c.conjugate(), d.conjugate()
        return MobiusMap(a, b, c, d, self.conjugating)

    # -- serialization --------------------------------------------------

    def to_dict(self) -> dict:
        def pair(w: complex) -> list[float]:
            return [w.real, w.imag]

        return {
            "kind": "mobius",
            "a": pair(self.a),
            "b": pair(self.b),
            "c": pair(self.c),
            "d": pair(self.d),
            "conjugating": self.conjugating,
        }

    @classmethod
    def from_dict(cls, payload: dict) -> "MobiusMap":
        def num(v) -> complex:
            if isinstance(v, (int, float)):
                return complex(v)
            re, im = v
            return complex(re, im)

        return cls(
            num(payload["a"]),
            num(payload["b"]),
            num(payload["c"]),
            num(payload["d"]),
            bool(payload.get("conjugating", False)),
        )


def compose(m1: AnalyticMap, m2: AnalyticMap) -> AnalyticMap:
    """Map acting as m1 after m2: apply(compose(m1, m2), p) = apply(m1, apply(m2, p)).

    Two fractional linear maps compose exactly through their coefficient
    matrices; anything else returns a lazy jet composition.
    """
    if isinstance(m1, MobiusMap) and isinstance(m2, MobiusMap):
        a2, b2, c2, d2 = m2.a, m2.b, m2.c, m2.d
        if m1.conjugating:
            a2, b2, c2, d2 = (w.conjugate() for w in (a2, b2, c2, d2))
        a = m1.a * a2 + m1.b * c2
        b = m1.a * b2 + m1.b * d2
        c = m1.c * a2 + m1.d * c2
        d = m1.c * b2 + m1.d * d2
        return MobiusMap(a, b, c, d, m1.conjugating != m2.conjugating)
    return ComposedMap(m1, m2)


@dataclass(frozen=True)
class ComposedMap(AnalyticMap):
    """Jet-level composition outer(inner(z)) via the chain rule to order 3."""

    outer: AnalyticMap
    inner: AnalyticMap

    @property
    def conjugating(self) -> bool:  # type: ignore[override]
        return self.outer.conjugating != self.inner.conjugating

    def excluded(self, z: complex) -> bool:
        if self.inner.excluded(z):
            return True
        try:
            w = self.inner.jet(z).value
        except DomainError:
            return True
        return self.outer.excluded(w)

    def jet(self, z: complex) -> MapJet:
        ji = self.inner.jet(z)
        jo = self.outer.jet(ji.value)
        b1, b2, b3 = ji.d1, ji.d2, ji.d3
        if self.outer.conjugating:
            # outer differentiates in conj(w); inner jet enters conjugated
            b1, b2, b3 = b1.conjugate(), b2.conjugate(), b3.conjugate()
        d1 = jo.d1 * b1
        d2 = jo.d2 * b1 * b1 + jo.d1 * b2
        d3 = jo.d3 * b1**3 + 3.0 * jo.d2 * b1 * b2 + jo.d1 * b3
        return MapJet(jo.value, d1, d2, d3)


@dataclass(frozen=True)
class PolynomialMap(AnalyticMap):
    """Polynomial map sum_k coeffs[k] z^k; critical points are excluded
    with a guard radius of 1e-6."""

    coeffs: tuple

    def __init__(self, coeffs) -> None:
        object.__setattr__(self, "coeffs", tuple(complex(c) for c in coeffs))
        if len(self.coeffs) < 2 or all(c == 0 for c in self.coeffs[1:]):
            raise ValueError("constant polynomial has no conformal structure")

    def _critical_points(self) -> np.ndarray:
        dcoeffs = npoly.polyder(np.array(self.coeffs, dtype=complex))
        if len(dcoeffs) <= 1:
            return np.empty(0, dtype=complex)
        return npoly.polyroots(dcoeffs)

    def excluded(self, z: complex) -> bool:
        crit = self._critical_points()
        return bool(crit.size and np.abs(crit - z).min() < CRITICAL_GUARD)

    def jet(self, z: complex) -> MapJet:
        c = np.array(self.coeffs, dtype=complex)
        value = npoly.polyval(z, c)
        d1 = npoly.polyval(z, npoly.polyder(c, 1))
        d2 = npoly.polyval(z, npoly.polyder(c, 2))
        d3 = npoly.polyval(z, npoly.polyder(c, 3))
        if abs(d1) < CRITICAL_GUARD:
            raise DomainError("within guard radius of a critical point")
        return MapJet(complex(value), complex(d1), complex(d2), complex(d3))


@dataclass(frozen=True)
class ExpMap(AnalyticMap):
    """Entire map z -> e^z; every derivative equals the value."""

    def jet(self, z: complex) -> MapJet:
        w = cmath.exp(z)
        return MapJet(w, w, w, w)


MAP_KINDS = {"mobius", "polynomial", "exp"}


def map_from_dict(payload: dict) -> AnalyticMap:
    kind = payload.get("kind")
    if kind == "mobius":
        return MobiusMap.from_dict(payload)
    if kind == "polynomial":
        coeffs = [complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
                  for c in payload["coeffs"]]
        return PolynomialMap(coeffs)
    if kind == "exp":
        return ExpMap()
    raise ValueError(f"unknown map kind {kind!r}")


def map_to_dict(m: AnalyticMap) -> dict:
    if isinstance(m, MobiusMap):
        return m.to_dict()
    if isinstance(m, PolynomialMap):
        return {"kind": "polynomial", "coeffs": [[c.real, c.imag] for c in m.coeffs]}
    if isinstance(m, ExpMap):
        return {"kind": "exp"}
    raise ValueError(f"cannot serialize map of type {type(m).__name__}")
