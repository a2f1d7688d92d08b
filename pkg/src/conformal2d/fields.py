"""Scalar conformal-factor fields and their exact second-order jets.

Jets are produced in closed form for every built-in family.  The complex
(Wirtinger) view of a jet is the working representation for pullbacks:
with u_z = (u_x - i u_y)/2,

    u_zz    = (u_xx - u_yy - 2 i u_xy)/4,
    u_zzbar = (u_xx + u_yy)/4 = (Laplacian u)/4,

and conversely u_xx = 2 u_zzbar + 2 Re u_zz, u_yy = 2 u_zzbar - 2 Re u_zz,
u_xy = -2 Im u_zz.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline

from .errors import DomainError, PoleError, ConjugatingUnsupported
from .geometry import Vec2, Sym2
from .mobius import AnalyticMap, MobiusMap, ExpMap, map_from_dict, map_to_dict
from .radial import RadialProfile

LIOUVILLE_GUARD = 1e-6


@dataclass(frozen=True)
class Jet2:
    """Value, gradient, and Hessian of a scalar field at a point."""

    value: float
    grad: Vec2
    hess: Sym2

    @property
    def u_z(self) -> complex:
        return complex(0.5 * self.grad.x1, -0.5 * self.grad.x2)

    @property
    def u_zz(self) -> complex:
        h = self.hess
        return complex(0.25 * (h.a11 - h.a22), -0.5 * h.a12)

    @property
    def u_zzbar(self) -> float:
        return 0.25 * (self.hess.a11 + self.hess.a22)

    @property
    def laplacian(self) -> float:
        return self.hess.a11 + self.hess.a22

    @classmethod
    def from_wirtinger(cls, value: float, u_z: complex, u_zz: complex,
                       u_zzbar: float) -> "Jet2":
        grad = Vec2(2.0 * u_z.real, -2.0 * u_z.imag)
        hess = Sym2(
            2.0 * u_zzbar + 2.0 * u_zz.real,
            -2.0 * u_zz.imag,
            2.0 * u_zzbar - 2.0 * u_zz.real,
        )
        return cls(float(value), grad, hess)


class ScalarField:
    """Base class: a scalar field with an exact jet evaluator."""

    def jet(self, x) -> Jet2:
        raise NotImplementedError

    def value(self, x) -> float:
        return self.jet(x).value

    def excluded(self, x) -> bool:
        return False

    def __call__(self, x) -> float:
        return self.value(x)


@dataclass(frozen=True)
class ConstantField(ScalarField):
    c: float

    def jet(self, x) -> Jet2:
        Vec2.of(x)
        return Jet2(self.c, Vec2(0.0, 0.0), Sym2(0.0, 0.0, 0.0))

    def value(self, x) -> float:
        return self.c


@dataclass(frozen=True)
class QuadraticField(ScalarField):
    """u(x) = a x1^2."""

    a: float

    def jet(self, x) -> Jet2:
        p = Vec2.of(x)
        return Jet2(
            self.a * p.x1 * p.x1,
            Vec2(2.0 * self.a * p.x1, 0.0),
            Sym2(2.0 * self.a, 0.0, 0.0),
        )


@dataclass(frozen=True)
class Bubble(ScalarField):
    """u(x) = 2 ln(8 a) - 2 ln(8 |x - x0|^2 + b), a, b > 0.

    The conformal operator of any member of this family is a constant
    multiple kappa(a, b) of the identity; kappa scales as b / a^2.
    """

    a: float
    b: float
    x0: Vec2 = Vec2(0.0, 0.0)

    def __post_init__(self) -> None:
        if not (self.a > 0.0 and self.b > 0.0):
            raise ValueError("bubble parameters must be positive")
        object.__setattr__(self, "x0", Vec2.of(self.x0))

    def jet(self, x) -> Jet2:
        p = Vec2.of(x)
        dx = p - self.x0
        s = 8.0 * (dx.x1 * dx.x1 + dx.x2 * dx.x2) + self.b
        value = 2.0 * math.log(8.0 * self.a) - 2.0 * math.log(s)
        g = dx * (-32.0 / s)
        c = 512.0 / (s * s)
        hess = Sym2(
            -32.0 / s + c * dx.x1 * dx.x1,
            c * dx.x1 * dx.x2,
            -32.0 / s + c * dx.x2 * dx.x2,
        )
        return Jet2(value, g, hess)

    def value(self, x) -> float:
        dx = Vec2.of(x) - self.x0
        s = 8.0 * (dx.x1 * dx.x1 + dx.x2 * dx.x2) + self.b
        return 2.0 * math.log(8.0 * self.a) - 2.0 * math.log(s)

    def radial_value(self, r: float) -> float:
        return 2.0 * math.log(8.0 * self.a) - 2.0 * math.log(8.0 * r * r + self.b)


@dataclass(frozen=True)
class ChenLiBubble(ScalarField):
    """u(x) = 2 ln(8 a) - 2 ln(|x - x0|^2 + 8 a^2); total mass of e^u is 8 pi."""

    a: float
    x0: Vec2 = Vec2(0.0, 0.0)

    def __post_init__(self) -> None:
        if not self.a > 0.0:
            raise ValueError("scale must be positive")
        object.__setattr__(self, "x0", Vec2.of(self.x0))

    def as_bubble(self) -> Bubble:
        # identical field in the wider two-parameter family
        return Bubble(8.0 * self.a, 64.0 * self.a * self.a, self.x0)

    def jet(self, x) -> Jet2:
        p = Vec2.of(x)
        dx = p - self.x0
        t = dx.x1 * dx.x1 + dx.x2 * dx.x2 + 8.0 * self.a * self.a
        value = 2.0 * math.log(8.0 * self.a) - 2.0 * math.log(t)
        g = dx * (-4.0 / t)
        c = 8.0 / (t * t)
        hess = Sym2(
            -4.0 / t + c * dx.x1 * dx.x1,
            c * dx.x1 * dx.x2,
            -4.0 / t + c * dx.x2 * dx.x2,
        )
        return Jet2(value, g, hess)

    def value(self, x) -> float:
        dx = Vec2.of(x) - self.x0
        t = dx.x1 * dx.x1 + dx.x2 * dx.x2 + 8.0 * self.a * self.a
        return 2.0 * math.log(8.0 * self.a) - 2.0 * math.log(t)

    def tail_mass(self, radius: float) -> float:
        """Exact integral of e^u outside the disc of given radius about x0."""
        a2 = self.a * self.a
        return 64.0 * math.pi * a2 / (8.0 * a2 + radius * radius)


@dataclass(frozen=True)
class LiouvilleField(ScalarField):
    """u = ln( 8 |f'|^2 / (1 + |f|^2)^2 ) for a holomorphic f.

    Then -Laplacian(u) = e^u identically.  Points within 1e-6 of a zero of f'
    or a pole of f are excluded.
    """

    f: AnalyticMap

    def __post_init__(self) -> None:
        if self.f.conjugating:
            raise ConjugatingUnsupported("Liouville fields need a holomorphic f")

    def excluded(self, x) -> bool:
        return self.f.excluded(Vec2.of(x).to_complex())

    def jet(self, x) -> Jet2:
        z = Vec2.of(x).to_complex()
        try:
            fj = self.f.jet(z)
        except PoleError as exc:
            raise DomainError(str(exc)) from exc
        if abs(fj.d1) < LIOUVILLE_GUARD:
            raise DomainError("within guard radius of a critical point of f")
        w, d1, d2, d3 = fj
        m = 1.0 + (w * w.conjugate()).real
        wc = w.conjugate()
        q = d2 / d1
        value = math.log(8.0) + 2.0 * math.log(abs(d1)) - 2.0 * math.log(m)
        u_z = q - 2.0 * wc * d1 / m
        u_zz = (d3 / d1 - q * q) - 2.0 * wc * d2 / m + 2.0 * (wc * d1 / m) ** 2
        u_zzbar = -2.0 * (d1 * d1.conjugate()).real / (m * m)
        return Jet2.from_wirtinger(value, u_z, u_zz, u_zzbar)

    def value(self, x) -> float:
        z = Vec2.of(x).to_complex()
        try:
            fj = self.f.jet(z)
        except PoleError as exc:
            raise DomainError(str(exc)) from exc
        if abs(fj.d1) < LIOUVILLE_GUARD:
            raise DomainError("within guard radius of a critical point of f")
        m = 1.0 + abs(fj.value) ** 2
        return math.log(8.0) + 2.0 * math.log(abs(fj.d1)) - 2.0 * math.log(m)

    def schwarzian(self, x) -> complex:
        """S(f) = f'''/f' - (3/2)(f''/f')^2; controls the traceless part."""
        fj = self.f.jet(Vec2.of(x).to_complex())
        q = fj.d2 / fj.d1
        return fj.d3 / fj.d1 - 1.5 * q * q


def exp_example() -> LiouvilleField:
    """Liouville field of f = e^z: u = ln(8 e^{2 x1} / (1 + e^{2 x1})^2)."""
    return LiouvilleField(ExpMap())


@dataclass(frozen=True)
class RadialField(ScalarField):
    """Field built from sampled radial data by cubic spline interpolation.

    A profile starting at r = 0 is extended evenly across the origin, which
    pins S'(0) = 0; a profile starting at r > 0 is an annulus field and
    points outside [r_min, r_max] are excluded.
    """

    profile: RadialProfile
    center: Vec2 = Vec2(0.0, 0.0)

    def __post_init__(self) -> None:
        object.__setattr__(self, "center", Vec2.of(self.center))
        p = self.profile
        mirror = p.r[0] == 0.0

        def extend(col: np.ndarray, parity: float) -> np.ndarray:
            return np.concatenate([parity * col[:0:-1], col]) if mirror else col

        r = extend(p.r, -1.0)
        # each sampled column gets its own spline: differentiating a single
        # value spline would amplify sample roundoff by 1/h^2 in the Hessian
        sv = CubicSpline(r, extend(p.v, 1.0))
        sdv = None if p.dv is None else CubicSpline(r, extend(p.dv, -1.0))
        sddv = None if p.ddv is None else CubicSpline(r, extend(p.ddv, 1.0))
        object.__setattr__(self, "_sv", sv)
        object.__setattr__(self, "_sdv", sdv)
        object.__setattr__(self, "_sddv", sddv)

    @property
    def r_min(self) -> float:
        return float(self.profile.r[0])

    @property
    def r_max(self) -> float:
        return float(self.profile.r[-1])

    def excluded(self, x) -> bool:
        r = (Vec2.of(x) - self.center).norm()
        return r < self.r_min - 1e-12 or r > self.r_max + 1e-12

    def jet(self, x) -> Jet2:
        p = Vec2.of(x)
        dx = p - self.center
        r = dx.norm()
        if self.excluded(p):
            raise DomainError(f"radius {r:.6g} outside profile range")
        sv, sdv, sddv = self._sv, self._sdv, self._sddv
        v = float(sv(r))
        dv = float(sv(r, 1)) if sdv is None else float(sdv(r))
        if sddv is not None:
            ddv = float(sddv(r))
        elif sdv is not None:
            ddv = float(sdv(r, 1))
        else:
            ddv = float(sv(r, 2))
        if r < 1e-7:
            # radial/tangential split degenerates; both curvatures -> S''(0)
            return Jet2(v, Vec2(0.0, 0.0), Sym2(ddv, 0.0, ddv))
        cx, cy = dx.x1 / r, dx.x2 / r
        tang = dv / r
        hess = Sym2(
            ddv * cx * cx + tang * cy * cy,
            (ddv - tang) * cx * cy,
            ddv * cy * cy + tang * cx * cx,
        )
        return Jet2(v, Vec2(dv * cx, dv * cy), hess)

    def value(self, x) -> float:
        r = (Vec2.of(x) - self.center).norm()
        if self.excluded(x):
            raise DomainError(f"radius {r:.6g} outside profile range")
        return float(self._sv(r))


@dataclass(frozen=True)
class PullbackField(ScalarField):
    """u_psi = u(psi(x)) + ln |J_psi(x)|.

    The chain rule runs in Wirtinger form.  With q2 = psi''/psi' and
    q3 = psi'''/psi', for holomorphic psi

        v_z     = (u_w o psi) psi' + q2,
        v_zz    = (u_ww o psi) psi'^2 + (u_w o psi) psi'' + (q3 - q2^2),
        v_zzbar = (u_wwbar o psi) |psi'|^2,

    and for orientation-reversing psi the first two lines are conjugated
    (with the generating-function jet in place of psi derivatives).
    """

    base: ScalarField
    map: AnalyticMap

    def excluded(self, x) -> bool:
        z = Vec2.of(x).to_complex()
        if self.map.excluded(z):
            return True
        try:
            w = self.map.jet(z).value
        except DomainError:
            return True
        return self.base.excluded(Vec2.from_complex(w))

    def jet(self, x) -> Jet2:
        z = Vec2.of(x).to_complex()
        mj = self.map.jet(z)
        if abs(mj.d1) < 1e-300:
            raise DomainError("vanishing derivative in pullback")
        bj = self.base.jet(Vec2.from_complex(mj.value))
        uw, uww, uwwbar = bj.u_z, bj.u_zz, bj.u_zzbar
        q2 = mj.d2 / mj.d1
        q3 = mj.d3 / mj.d1
        v_z = uw * mj.d1 + q2
        v_zz = uww * mj.d1 * mj.d1 + uw * mj.d2 + (q3 - q2 * q2)
        if self.map.conjugating:
            v_z = v_z.conjugate()
            v_zz = v_zz.conjugate()
        v_zzbar = uwwbar * (mj.d1 * mj.d1.conjugate()).real
        value = bj.value + 2.0 * math.log(abs(mj.d1))
        return Jet2.from_wirtinger(value, v_z, v_zz, v_zzbar)

    def value(self, x) -> float:
        z = Vec2.of(x).to_complex()
        mj = self.map.jet(z)
        if abs(mj.d1) < 1e-300:
            raise DomainError("vanishing derivative in pullback")
        return self.base.value(Vec2.from_complex(mj.value)) + 2.0 * math.log(abs(mj.d1))


def pullback(u: ScalarField, psi: AnalyticMap) -> PullbackField:
    """Field x -> u(psi(x)) + ln |J_psi(x)|."""
    return PullbackField(u, psi)


def fd_jet(u: ScalarField, x, h: float | None = None, richardson: bool = False) -> Jet2:
    """Second-order central-difference jet of the value channel.

    Used as the independent oracle for analytic jets.  With richardson=True
    the h and h/2 stencils are combined, lifting accuracy to fourth order.
    The stencil spans a disc of radius 2h around x and raises DomainError
    where the field does.
    """
    p = Vec2.of(x)
    if h is None:
        h = 1e-4 * (1.0 + p.norm())

    def stencil(step: float) -> tuple[Vec2, Sym2]:
        def f(dx: float, dy: float) -> float:
            return u.value(Vec2(p.x1 + dx, p.x2 + dy))

        f00 = f(0.0, 0.0)
        fe, fw = f(step, 0.0), f(-step, 0.0)
        fn, fs = f(0.0, step), f(0.0, -step)
        gx = (fe - fw) / (2.0 * step)
        gy = (fn - fs) / (2.0 * step)
        hxx = (fe - 2.0 * f00 + fw) / (step * step)
        hyy = (fn - 2.0 * f00 + fs) / (step * step)
        hxy = (f(step, step) - f(step, -step) - f(-step, step) + f(-step, -step)) / (
            4.0 * step * step
        )
        return Vec2(gx, gy), Sym2(hxx, hxy, hyy)

    g1, h1 = stencil(h)
    if not richardson:
        return Jet2(u.value(p), g1, h1)
    g2, h2 = stencil(0.5 * h)
    grad = Vec2((4.0 * g2.x1 - g1.x1) / 3.0, (4.0 * g2.x2 - g1.x2) / 3.0)
    hess = Sym2(
        (4.0 * h2.a11 - h1.a11) / 3.0,
        (4.0 * h2.a12 - h1.a12) / 3.0,
        (4.0 * h2.a22 - h1.a22) / 3.0,
    )
    return Jet2(u.value(p), grad, hess)


# -- serialization -----------------------------------------------------------


def field_to_dict(u: ScalarField) -> dict:
    if isinstance(u, ConstantField):
        return {"family": "constant", "c": u.c}
    if isinstance(u, QuadraticField):
        return {"family": "quadratic", "a": u.a}
    if isinstance(u, Bubble):
        return {"family": "bubble", "a": u.a, "b": u.b, "x0": [u.x0.x1, u.x0.x2]}
    if isinstance(u, ChenLiBubble):
        return {"family": "chen_li", "a": u.a, "x0": [u.x0.x1, u.x0.x2]}
    if isinstance(u, LiouvilleField):
        return {"family": "liouville", "f": map_to_dict(u.f)}
    if isinstance(u, RadialField):
        out = {
            "family": "radial",
            "r": [float(t) for t in u.profile.r],
            "v": [float(t) for t in u.profile.v],
            "center": [u.center.x1, u.center.x2],
        }
        # derivative columns carry accuracy the value spline alone cannot
        if u.profile.dv is not None:
            out["dv"] = [float(t) for t in u.profile.dv]
        if u.profile.ddv is not None:
            out["ddv"] = [float(t) for t in u.profile.ddv]
        return out
    if isinstance(u, PullbackField):
        return {"family": "pullback", "base": field_to_dict(u.base), "map": map_to_dict(u.map)}
    raise ValueError(f"cannot serialize field of type {type(u).__name__}")


def field_from_dict(payload: dict) -> ScalarField:
    fam = payload.get("family")
    if fam == "constant":
        return ConstantField(float(payload["c"]))
    if fam == "quadratic":
        return QuadraticField(float(payload["a"]))
    if fam == "bubble":
        return Bubble(float(payload["a"]), float(payload["b"]),
                      Vec2.of(payload.get("x0", (0.0, 0.0))))
    if fam == "chen_li":
        return ChenLiBubble(float(payload["a"]), Vec2.of(payload.get("x0", (0.0, 0.0))))
    if fam == "liouville":
        return LiouvilleField(map_from_dict(payload["f"]))
    if fam == "exp_example":
        return exp_example()
    if fam == "radial":
        opt = {k: np.asarray(payload[k], dtype=float)
               for k in ("dv", "ddv") if payload.get(k) is not None}
        prof = RadialProfile(np.asarray(payload["r"], dtype=float),
                             np.asarray(payload["v"], dtype=float), **opt)
        return RadialField(prof, Vec2.of(payload.get("center", (0.0, 0.0))))
    if fam == "pullback":
        return PullbackField(field_from_dict(payload["base"]), map_from_dict(payload["map"]))
    raise ValueError(f"unknown field family {fam!r}")
