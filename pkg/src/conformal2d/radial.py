"""Radial-profile machinery: circle infima, lower envelopes, radial
eigenvalues, monotonicity diagnostics, and the shooting solver for
f(lambda(A)) = 1.

For a radial field v(r) the operator eigenvalues are

    lambda1 = e^{-v} ( -v'' + v'^2 / 4 )        (radial direction)
    lambda2 = e^{-v} ( -v'/r - v'^2 / 4 )       (tangential direction)

so prescribing f(lambda1, lambda2) = 1 and solving for lambda1 turns the
equation into a second-order ODE for v.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.optimize import brentq, minimize_scalar

from .errors import SeedError, StepFailure
from .geometry import Vec2
from .ops import ConeIndex, SymmetricFunction, cone_margin
from .report import CheckReport, worst_witnesses

_FMT = "%.17g"


def _fmt(x: float) -> str:
    return _FMT % x


@dataclass(frozen=True)
class RadialProfile:
    """Values v on a strictly increasing radius grid, optionally with
    sampled first/second derivatives."""

    r: np.ndarray
    v: np.ndarray
    dv: Optional[np.ndarray] = None
    ddv: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        r = np.asarray(self.r, dtype=float)
        v = np.asarray(self.v, dtype=float)
        object.__setattr__(self, "r", r)
        object.__setattr__(self, "v", v)
        if r.ndim != 1 or r.shape != v.shape:
            raise ValueError("r and v must be 1D arrays of equal length")
        if r.size < 2:
            raise ValueError("profile needs at least two nodes")
        if r[0] < 0.0:
            raise ValueError("radii must be nonnegative")
        if not np.all(np.diff(r) > 0.0):
            raise ValueError("radius grid must be strictly increasing")
        if not (np.all(np.isfinite(r)) and np.all(np.isfinite(v))):
            raise ValueError("profile contains non-finite entries")
        for name in ("dv", "ddv"):
            arr = getattr(self, name)
            if arr is not None:
                arr = np.asarray(arr, dtype=float)
                if arr.shape != r.shape or not np.all(np.isfinite(arr)):
                    raise ValueError(f"bad {name} column")
                object.__setattr__(self, name, arr)

    @classmethod
    def tabulate(cls, grid, fn: Callable[[float], float],
                 dfn: Callable[[float], float] | None = None,
                 ddfn: Callable[[float], float] | None = None) -> "RadialProfile":
        r = np.asarray(grid, dtype=float)
        v = np.array([fn(t) for t in r])
        dv = np.array([dfn(t) for t in r]) if dfn else None
        ddv = np.array([ddfn(t) for t in r]) if ddfn else None
        return cls(r, v, dv, ddv)

    def columns(self) -> list[str]:
        cols = ["r", "v"]
        if self.dv is not None:
            cols.append("dv")
        if self.ddv is not None:
            cols.append("ddv")
        return cols

    def to_csv(self, path) -> None:
        cols = self.columns()
        data = [getattr(self, c) for c in cols]
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(cols)
            for row in zip(*data):
                w.writerow([_fmt(x) for x in row])

    @classmethod
    def from_csv(cls, path) -> "RadialProfile":
        with open(path, newline="") as fh:
            rows = list(csv.reader(fh))
        header, body = rows[0], rows[1:]
        if header[:2] != ["r", "v"]:
            raise ValueError(f"unexpected profile header {header!r}")
        data = np.array([[float(x) for x in row] for row in body])
        kwargs = {}
        for j, name in enumerate(header):
            if name in ("dv", "ddv"):
                kwargs[name] = data[:, j]
        return cls(data[:, 0], data[:, 1], **kwargs)


def minimize_on_circles(u, center, radii, m: int = 64) -> RadialProfile:
    """v(r) = inf over the circle of radius r about center of u.

    Coarse pass over m equispaced angles, then one bounded 1D refinement
    around the best angle per circle.
    """
    c = Vec2.of(center)
    thetas = np.linspace(0.0, 2.0 * math.pi, m, endpoint=False)
    out = []
    for r in np.asarray(radii, dtype=float):
        if r == 0.0:
            out.append(u.value(c))
            continue

        def on_circle(theta: float, rr: float = r) -> float:
            return u.value(Vec2(c.x1 + rr * math.cos(theta), c.x2 + rr * math.sin(theta)))

        vals = [on_circle(t) for t in thetas]
        j = int(np.argmin(vals))
        width = 2.0 * math.pi / m
        res = minimize_scalar(on_circle, bounds=(thetas[j] - width, thetas[j] + width),
                              method="bounded", options={"xatol": 1e-12})
        out.append(min(vals[j], float(res.fun)))
    return RadialProfile(np.asarray(radii, dtype=float), np.array(out))


@dataclass(frozen=True)
class EnvelopeResult:
    """Lower envelope u_eps(r) = inf_rho { v(rho) + (rho - r)^2 / eps }.

    The envelope profile covers the full input grid; defect and distance
    statistics are taken on the interior subgrid (boundary strip of width
    sqrt(eps * osc v) trimmed) where the envelope is unaffected by the
    missing data outside the grid.
    """

    profile: RadialProfile
    epsilon: float
    semiconcavity_defect: float
    sup_distance_to_input: float
    interior: np.ndarray

    def interior_slice(self) -> tuple[np.ndarray, np.ndarray]:
        return self.profile.r[self.interior], self.profile.v[self.interior]


def inf_envelope(p: RadialProfile, eps: float) -> EnvelopeResult:
    """Brute-force O(n^2) inf-convolution of a radial profile.

    The 2D envelope of a radial function reduces to one dimension because
    min over the angle of |y - x|^2 is (rho - r)^2.
    """
    if eps <= 0.0:
        raise ValueError("eps must be positive")
    r, v = p.r, p.v
    cost = v[None, :] + (r[:, None] - r[None, :]) ** 2 / eps
    env = cost.min(axis=1)

    osc = float(v.max() - v.min())
    margin = math.sqrt(eps * osc)
    interior = (r >= r[0] + margin) & (r <= r[-1] - margin)
    if interior.sum() < 3:
        interior = np.ones_like(r, dtype=bool)

    # env - r^2/eps is a pointwise min of functions affine in r, hence
    # concave; any positive discrete second difference is defect.
    y = env - r * r / eps
    slope = np.diff(y) / np.diff(r)
    d2 = 2.0 * np.diff(slope) / (r[2:] - r[:-2])
    centers = interior[1:-1]
    defect = float(max(0.0, d2[centers].max())) if centers.any() else 0.0
    sup_dist = float((v - env)[interior].max())
    return EnvelopeResult(RadialProfile(r, env), float(eps), defect, sup_dist, interior)


@dataclass(frozen=True)
class RadialLambda:
    """Operator eigenvalues of a radial profile at one radius; lambda1 is
    the radial direction, lambda2 the tangential one (unsorted)."""

    lambda1: float
    lambda2: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.lambda1) and math.isfinite(self.lambda2)):
            raise ValueError("non-finite eigenvalue")

    def as_sorted(self) -> tuple[float, float]:
        return (max(self.lambda1, self.lambda2), min(self.lambda1, self.lambda2))


def radial_lambda(v: float, v1: float, v2: float, r: float) -> RadialLambda:
    """Eigenvalues from the value and first two radial derivatives at r.

    At r = 0 the tangential expression degenerates; regularity forces
    v1 = 0 there and both eigenvalues coincide.
    """
    if r < 0.0:
        raise ValueError("negative radius")
    e = math.exp(-v)
    if r == 0.0:
        if abs(v1) > 1e-12:
            raise ValueError("r = 0 requires v'(0) = 0")
        lam = e * (-v2)
        return RadialLambda(lam, lam)
    lam1 = e * (-v2 + 0.25 * v1 * v1)
    lam2 = e * (-v1 / r - 0.25 * v1 * v1)
    return RadialLambda(lam1, lam2)


def check_monotone_4log(p: RadialProfile, k0: float = 0.0,
                        slack: float = 1e-10) -> CheckReport:
    """Discrete nondecreasing check of w(r) = v(r) + 4 ln r for r > k0.

    The largest drop between consecutive grid points is the reported error;
    extras carry the empirical minimal K0 (smallest grid radius after which
    no drop exceeds the slack).
    """
    mask = p.r > max(k0, 0.0)
    r, v = p.r[mask], p.v[mask]
    if r.size < 2:
        raise ValueError("grid does not cover (k0, r_max)")
    w = v + 4.0 * np.log(r)
    drops = -np.diff(w)
    worst = float(max(0.0, drops.max()))
    violating = np.nonzero(drops > slack)[0]
    empirical_k0 = float(r[violating[-1]]) if violating.size else 0.0
    labels = [f"r={r[i]:.6g}" for i in violating[-3:]]
    return CheckReport.from_errors(
        "monotone-4log",
        [worst],
        slack,
        witnesses=worst_witnesses(zip(labels, drops[violating[-3:]])) if violating.size else (),
        extras={"empirical_k0": empirical_k0, "k0": float(k0)},
    )


# -- shooting solver ---------------------------------------------------------


@dataclass(frozen=True)
class SolveConfig:
    rtol: float = 1e-8
    atol: float = 1e-11
    n_out: int = 501
    r_series: float = 1e-3
    h_init: float = 1e-3
    h_max: float = 0.25
    root_residual_max: float = 1e-11


@dataclass(frozen=True)
class RadialSolveResult:
    """Solver output: profile with derivative column, eigenvalues, per-node
    equation residual, the diagonal seed mu, and the first cone-exit radius
    (None when the trajectory stays in the cone)."""

    profile: RadialProfile
    lambda1: np.ndarray
    lambda2: np.ndarray
    residual: np.ndarray
    mu: float
    cone_exit: Optional[float]

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["r", "v", "dv", "lambda1", "lambda2", "residual"])
            for row in zip(self.profile.r, self.profile.v, self.profile.dv,
                           self.lambda1, self.lambda2, self.residual):
                w.writerow([_fmt(x) for x in row])

    @property
    def max_residual(self) -> float:
        return float(self.residual.max()) if self.residual.size else 0.0


class _ConeExitSignal(Exception):
    def __init__(self, radius: float):
        super().__init__(f"cone exit at r = {radius:.6g}")
        self.radius = radius


def _diagonal_seed(f: SymmetricFunction) -> float:
    """Solve f(mu, mu) = 1 on the diagonal; ellipticity makes it monotone."""

    def fun(t: float) -> float:
        return f.raw(t, t) - 1.0

    lo = 1e-12
    if fun(lo) >= 0.0:
        raise SeedError("f exceeds 1 already at the diagonal origin")
    hi = 1.0
    while fun(hi) < 0.0:
        hi *= 2.0
        if hi > 1e12:
            raise SeedError("no diagonal root below 1e12")
    return float(brentq(fun, lo, hi, xtol=1e-15))


def _lambda1_section_min(lam2: float, cone: ConeIndex) -> Optional[float]:
    """Infimum of lambda1 over the cone section at fixed lambda2, or None
    when the section is empty."""
    s = cone.p - 2.0
    if cone.p == 2.0:
        if lam2 <= 0.0:
            return None
        return 0.0
    return max(s * lam2, lam2 / s)


def _solve_lambda1(f: SymmetricFunction, cone: ConeIndex, lam2: float,
                   r: float, cfg: SolveConfig) -> tuple[float, float]:
    """Solve f(lambda1, lam2) = 1 for lambda1 within the cone section.

    Raises _ConeExitSignal when no in-cone root exists (section empty or f
    already >= 1 on its lower edge) and StepFailure when the bracket cannot
    be expanded to a sign change.
    """
    lo = _lambda1_section_min(lam2, cone)
    if lo is None:
        raise _ConeExitSignal(r)

    def fun(t: float) -> float:
        return f.raw(t, lam2) - 1.0

    flo = fun(lo)
    if flo >= 0.0:
        raise _ConeExitSignal(r)
    hi = max(lam2 + 2.0 * max(1.0, abs(lam2)), lo + 1.0)
    tries = 0
    while fun(hi) <= 0.0:
        hi = lo + 2.0 * (hi - lo)
        tries += 1
        if tries > 200:
            raise StepFailure(f"lambda1 bracket expansion failed at r = {r:.6g}")
    lam1 = float(brentq(fun, lo, hi, xtol=1e-15))
    residual = abs(f.raw(lam1, lam2) - 1.0)
    if residual > cfg.root_residual_max:
        raise StepFailure(f"lambda1 residual {residual:.3e} at r = {r:.6g}")
    return lam1, residual


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B5 = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_B4 = (5179 / 57600, 0.0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40)


def _integrate_to_nodes(rhs, r0: float, y0: np.ndarray, nodes, cfg: SolveConfig,
                        collect) -> None:
    """Adaptive Dormand-Prince march hitting each node exactly.

    ``collect(r, y)`` is called at every node; exceptions from ``rhs``
    propagate so the caller can truncate.
    """
    r = r0
    y = np.asarray(y0, dtype=float)
    h = cfg.h_init
    for rt in nodes:
        while r < rt - 1e-14 * max(1.0, rt):
            h_try = min(h, cfg.h_max, rt - r)
            while True:
                k = np.empty((7, y.size))
                k[0] = rhs(r, y)
                for i in range(1, 7):
                    yi = y + h_try * sum(a * k[j] for j, a in enumerate(_DP_A[i]))
                    k[i] = rhs(r + _DP_C[i] * h_try, yi)
                y5 = y + h_try * sum(b * k[i] for i, b in enumerate(_DP_B5))
                y4 = y + h_try * sum(b * k[i] for i, b in enumerate(_DP_B4))
                sc = cfg.atol + cfg.rtol * np.maximum(np.abs(y), np.abs(y5))
                err = float(np.max(np.abs(y5 - y4) / sc))
                if err <= 1.0:
                    r += h_try
                    y = y5
                    h = h_try * min(5.0, max(0.2, 0.9 * (err + 1e-300) ** -0.2))
                    break
                h_try *= max(0.2, 0.9 * err**-0.2)
                if h_try < 1e-13:
                    raise StepFailure(f"step size underflow at r = {r:.6g}")
        collect(rt, y)


def ode_solve(f: SymmetricFunction, cone: ConeIndex | None = None, v0: float = 0.0,
              r_max: float = 5.0, cfg: SolveConfig | None = None) -> RadialSolveResult:
    """Shoot the radial equation f(lambda1, lambda2) = 1 from v(0) = v0.

    The center value fixes everything: v'(0) = 0 and v''(0) = -mu e^{v0}
    with the diagonal seed f(mu, mu) = 1, so that lambda(0) = (mu, mu).  A
    quadratic series carries the solution over r < r_series, after which
    each right-hand side evaluation solves for lambda1 inside the cone
    section.  Integration stops at the first node whose eigenvalues leave
    the open cone; that radius is reported as cone_exit.
    """
    cfg = cfg or SolveConfig()
    cone = cone or f.cone
    mu = _diagonal_seed(f)
    c2 = -mu * math.exp(v0)

    r_out = np.linspace(0.0, r_max, cfg.n_out)
    rows: list[tuple[float, float, float, float, float, float]] = []
    exit_radius: Optional[float] = None

    def node_lambda(rt: float, v: float, w: float) -> tuple[float, float, float]:
        if rt == 0.0:
            return mu, mu, abs(f.raw(mu, mu) - 1.0)
        lam2 = math.exp(-v) * (-w / rt - 0.25 * w * w)
        lam1, residual = _solve_lambda1(f, cone, lam2, rt, cfg)
        return lam1, lam2, residual

    def record(rt: float, v: float, w: float) -> bool:
        nonlocal exit_radius
        try:
            lam1, lam2, residual = node_lambda(rt, v, w)
        except _ConeExitSignal as sig:
            exit_radius = sig.radius
            return False
        if rt > 0.0 and cone_margin(lam1, lam2, cone) <= 0.0:
            exit_radius = rt
            return False
        rows.append((rt, v, w, lam1, lam2, residual))
        return True

    series_nodes = r_out[r_out <= cfg.r_series]
    main_nodes = r_out[r_out > cfg.r_series]
    ok = True
    for rt in series_nodes:
        if not record(rt, v0 + 0.5 * c2 * rt * rt, c2 * rt):
            ok = False
            break

    if ok and main_nodes.size:

        def rhs(r: float, y: np.ndarray) -> np.ndarray:
            v, w = float(y[0]), float(y[1])
            if abs(v) > 700.0:
                raise StepFailure(f"v overflow at r = {r:.6g}")
            lam2 = math.exp(-v) * (-w / r - 0.25 * w * w)
            lam1, _ = _solve_lambda1(f, cone, lam2, r, cfg)
            return np.array([w, 0.25 * w * w - lam1 * math.exp(v)])

        rs = cfg.r_series
        y_start = np.array([v0 + 0.5 * c2 * rs * rs, c2 * rs])

        stop = False

        def collect(rt: float, y: np.ndarray) -> None:
            nonlocal stop
            if stop:
                return
            if not record(rt, float(y[0]), float(y[1])):
                stop = True
                raise _ConeExitSignal(rt)

        try:
            _integrate_to_nodes(rhs, rs, y_start, main_nodes, cfg, collect)
        except _ConeExitSignal as sig:
            if exit_radius is None:
                exit_radius = sig.radius

    data = np.array(rows) if rows else np.empty((0, 6))
    if data.shape[0] < 2:
        raise StepFailure("trajectory left the cone before two output nodes")
    profile = RadialProfile(data[:, 0], data[:, 1], dv=data[:, 2])
    return RadialSolveResult(profile, data[:, 3], data[:, 4], data[:, 5], mu, exit_radius)


# -- boundary-cone trajectories (supersolution sampling) ---------------------


@dataclass(frozen=True)
class BoundaryResult:
    profile: RadialProfile
    lambda1: np.ndarray
    lambda2: np.ndarray


def boundary_solve(cone: ConeIndex, r0: float, v0: float, w0: float,
                   r_max: float, n_out: int = 201,
                   cfg: SolveConfig | None = None) -> BoundaryResult:
    """Integrate the cone-boundary equation lambda2 = (p-2) lambda1.

    This samples radial supersolutions sitting exactly on the boundary ray
    through (1, -(2-p)); it needs p < 2 so the ray determines lambda1 from
    lambda2.  Starting data (r0 > 0, v0, w0) is free.
    """
    if cone.p >= 2.0:
        raise ValueError("boundary equation needs p < 2")
    if r0 <= 0.0:
        raise ValueError("r0 must be positive")
    s = cone.p - 2.0
    cfg = cfg or SolveConfig()

    def rhs(r: float, y: np.ndarray) -> np.ndarray:
        # lambda1 e^v = (lambda2 / s) e^v loses its exponential exactly,
        # so the trajectory of (v, v') closes over (r, v') alone
        w = float(y[1])
        if not math.isfinite(w) or abs(w) > 1e12:
            raise StepFailure(f"boundary trajectory blow-up near r = {r:.6g}")
        return np.array([w, 0.25 * w * w - (-w / r - 0.25 * w * w) / s])

    nodes = np.linspace(r0, r_max, n_out)
    rows: list[tuple[float, float, float]] = []

    def collect(rt: float, y: np.ndarray) -> None:
        rows.append((rt, float(y[0]), float(y[1])))

    collect(r0, np.array([v0, w0]))
    _integrate_to_nodes(rhs, r0, np.array([v0, w0]), nodes[1:], cfg, collect)
    data = np.array(rows)
    # eigenvalues directly from the boundary relation
    lam2 = np.exp(-data[:, 1]) * (-data[:, 2] / data[:, 0] - 0.25 * data[:, 2] ** 2)
    lam1 = lam2 / s
    profile = RadialProfile(data[:, 0], data[:, 1], dv=data[:, 2])
    return BoundaryResult(profile, lam1, lam2)


def g_k_diagnostics(r: np.ndarray, dv: np.ndarray, cone: ConeIndex) -> tuple[np.ndarray, np.ndarray]:
    """g = 1/v' + r/4 and k = r^{-1/(2-p)} g on the set E~ = { v' < -4/r }.

    Outside E~ the returned values are mathematically meaningless; callers
    mask with e_tilde_mask first.
    """
    g = 1.0 / dv + r / 4.0
    k = r ** (-1.0 / cone.boundary_slope) * g
    return g, k


def e_tilde_mask(r: np.ndarray, dv: np.ndarray) -> np.ndarray:
    return dv < -4.0 / r
