"""Slow sinusoidal forcing experiments: regime dichotomy, hysteresis loops,
and the exponent threshold separating bistability from relaxation
oscillations.

The forcing is y(t) = alpha + (beta + eps^r) sin(eps t), whose range barely
overhangs the saddle-node values [lam1, lam2] by eps^r on both sides.  For
slow forcing the (input, state) loop of the attractive periodic solution
tracks the singular curve Gamma: the stable autonomous branches between lam1
and lam2 joined by vertical jumps at the two saddle-nodes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq

from . import dynamics
from .model import DomainError, diagnostics, g_eval, x1 as model_x1, x2 as model_x2
from .signals import TrigSum

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True)
class RelaxationSpec:
    c: float
    eps: float
    r: float

    def __post_init__(self):
        if self.c <= 4.0:
            raise DomainError(f"RelaxationSpec requires c > 4, got c = {self.c}")
        if not 0.0 < self.eps < 1.0:
            raise ValueError(f"eps must lie in (0, 1), got {self.eps}")
        if self.r <= 0.0:
            raise ValueError(f"r must be positive, got {self.r}")
        if diagnostics(self.c).lam1 - self.eps ** self.r < 0.0:
            raise ValueError("invalid spec: lam1(c) - eps^r < 0 (forcing range leaves [0, inf))")

    @property
    def period(self) -> float:
        return TWO_PI / self.eps

    @property
    def amplitude(self) -> float:
        diag = diagnostics(self.c)
        return diag.beta + self.eps ** self.r

    def signal(self) -> TrigSum:
        """The forcing as a cosine-form signal: sin(w t) = cos(w t - pi/2)."""
        diag = diagnostics(self.c)
        return TrigSum(diag.alpha, ((self.amplitude, self.eps, -math.pi / 2.0),))


@dataclass(frozen=True)
class GammaCurve:
    """Closed polyline (lambda, x): lower stable branch lam1 -> lam2, upward
    jump at lam2, upper stable branch lam2 -> lam1, downward jump at lam1."""

    polyline: np.ndarray  # shape (m, 2), first point == last point


@dataclass(frozen=True)
class LoopResult:
    loop: np.ndarray  # (y(t), x(t)) over one period, closed
    area: float
    hausdorff_to_gamma: float
    n_fixed_points: int
    regime: str  # "bistable" | "relaxation" | "boundary"
    solutions: tuple[dynamics.PeriodicSolution, ...]

    def to_dict(self) -> dict:
        return {
            "area": self.area,
            "hausdorff_to_gamma": self.hausdorff_to_gamma,
            "n_fixed_points": self.n_fixed_points,
            "regime": self.regime,
            "solutions": [s.to_dict() for s in self.solutions],
            "loop": self.loop.tolist(),
        }


@dataclass(frozen=True)
class ThresholdResult:
    r: float
    tol: float
    regime_below: str
    regime_above: str

    def to_dict(self) -> dict:
        return {
            "r": self.r,
            "tol": self.tol,
            "regime_below": self.regime_below,
            "regime_above": self.regime_above,
        }


def y_eps(spec: RelaxationSpec, t):
    """alpha + (beta + eps^r) sin(eps t); t scalar or array."""
    diag = diagnostics(spec.c)
    t = np.asarray(t, dtype=float)
    out = diag.alpha + spec.amplitude * np.sin(spec.eps * t)
    return out if out.ndim else float(out)


def crossing_times(spec: RelaxationSpec) -> tuple[float, float, float]:
    """(tbar_minus, t_minus, t_plus) in [0, 2*pi/eps]:

    tbar_minus is the first time the rising forcing reaches lam2; t_minus and
    t_plus are the two times the falling/rising forcing crosses lam1.  All
    from arcsine branches: tbar_minus in (0, pi/(2 eps)), t_minus in
    (pi/eps, 3 pi/(2 eps)), t_plus in (3 pi/(2 eps), 2 pi/eps).
    """
    diag = diagnostics(spec.c)
    s = diag.beta / spec.amplitude  # sin value where y hits lam2 (and -s for lam1)
    tbar_minus = math.asin(s) / spec.eps
    t_minus = (math.pi + math.asin(s)) / spec.eps
    t_plus = (TWO_PI - math.asin(s)) / spec.eps
    return tbar_minus, t_minus, t_plus


def _upper_root(c: float, lam: float) -> float:
    """Root of lam = -g(x) on [x2, inf); the bracket is widened by a hair so
    the branch endpoint lam = lam1 (root exactly at x2) stays inside."""
    lo = model_x2(c) * (1.0 - 1e-12)
    hi = max(2.0 * lo, 4.0)
    while -g_eval(c, hi) < lam:
        hi *= 2.0
    return float(brentq(lambda x: -g_eval(c, x) - lam, lo, hi, xtol=1e-13))


def _lower_root(c: float, lam: float) -> float:
    """Root of lam = -g(x) on [0, x1], bracket widened as above for lam = lam2."""
    return float(brentq(lambda x: -g_eval(c, x) - lam, 0.0, model_x1(c) * (1.0 + 1e-12), xtol=1e-13))


def gamma_curve(c: float, n_points: int = 2048) -> GammaCurve:
    """The singular hysteresis curve; every branch point satisfies
    |lam + g(x)| < 1e-9."""
    if c <= 4.0:
        raise DomainError(f"gamma_curve requires c > 4, got c = {c}")
    diag = diagnostics(c)
    lams = np.linspace(diag.lam1, diag.lam2, n_points)
    lower = np.array([[lam, _lower_root(c, lam)] for lam in lams])
    upper = np.array([[lam, _upper_root(c, lam)] for lam in lams[::-1]])
    # the vertical jumps are the segments joining the branch endpoints:
    # (lam2, x1) -> (lam2, upper root of lam2) and (lam1, x2) -> start point
    polyline = np.vstack([lower, upper, lower[:1]])
    return GammaCurve(polyline)


def loop_area(points: np.ndarray) -> float:
    """Shoelace absolute area of a closed polygon (signed-sum magnitude for
    self-intersecting input)."""
    p = np.asarray(points, dtype=float)
    x, y = p[:, 0], p[:, 1]
    return float(0.5 * abs(np.sum(x[:-1] * y[1:] - x[1:] * y[:-1])))


def _directed_hausdorff(a: np.ndarray, b: np.ndarray, chunk: int = 512) -> float:
    """max over points of a of the min distance to the polyline b."""
    p, q = b[:-1], b[1:]
    d = q - p
    dd = np.maximum(np.sum(d * d, axis=1), 1e-300)
    worst = 0.0
    for i in range(0, len(a), chunk):
        w = a[i : i + chunk, None, :] - p[None, :, :]
        t = np.clip(np.sum(w * d[None, :, :], axis=2) / dd[None, :], 0.0, 1.0)
        proj = p[None, :, :] + t[:, :, None] * d[None, :, :]
        dist = np.sqrt(np.sum((a[i : i + chunk, None, :] - proj) ** 2, axis=2))
        worst = max(worst, float(np.max(np.min(dist, axis=1))))
    return worst


def hausdorff_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Symmetric Hausdorff distance between two polylines."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValueError("polylines must be non-empty")
    return max(_directed_hausdorff(a, b), _directed_hausdorff(b, a))


def run_analysis(spec: RelaxationSpec, n_loop: int = 4096, gamma_points: int = 2048) -> LoopResult:
    """Census of periodic solutions plus the hysteresis loop of the top
    attractive one: its (forcing, state) polygon, area, and Hausdorff
    distance to the singular curve."""
    ode = dynamics.OdeSpec(spec.c, 0.0, spec.signal())
    sols = tuple(dynamics.find_periodic_solutions(ode, spec.period))
    n = len(sols)
    if n == 3 and all(s.kind != "non-hyperbolic" for s in sols):
        regime = "bistable"
    elif n == 1 and sols[0].kind == "attractive":
        regime = "relaxation"
    else:
        regime = "boundary"
    top = max((s for s in sols if s.kind == "attractive"), key=lambda s: s.fixed_point)
    traj = dynamics.integrate(ode, 0.0, top.fixed_point, spec.period, n_samples=n_loop + 1)
    loop = np.column_stack([y_eps(spec, traj.times), traj.values])
    loop[-1] = loop[0]  # close the polygon (|x(T) - x(0)| below fixed-point tol)
    gamma = gamma_curve(spec.c, gamma_points)
    return LoopResult(
        loop=loop,
        area=loop_area(loop),
        hausdorff_to_gamma=hausdorff_distance(loop, gamma.polyline),
        n_fixed_points=n,
        regime=regime,
        solutions=sols,
    )


def _census_count(c: float, eps: float, r: float) -> int:
    """Count-only regime probe: crossings of the period map on a scan grid,
    with one refinement retry when the count is ambiguous."""
    spec = RelaxationSpec(c, eps, r)
    ode = dynamics.OdeSpec(c, 0.0, spec.signal())
    count = 0
    for n in (512, 1024, 2048):
        count = len(dynamics._brackets(ode, spec.period, n))
        if count in (1, 3):
            return count
    return count


def r_threshold(
    c: float, eps: float, tol: float = 1e-4, r_lo: float = 0.5, r_hi: float = 2.0
) -> ThresholdResult:
    """Bisect the exponent r on the regime predicate (3 vs 1 periodic
    solutions) until the bracket is below tol; reports which regime was
    observed on each side rather than asserting it a priori."""
    counts = {}

    def bistable(r: float) -> bool:
        n = _census_count(c, eps, r)
        if n not in (1, 3):
            raise RuntimeError(f"ambiguous census ({n} crossings) at r = {r:.6g}")
        counts[r] = n
        return n == 3

    lo_b, hi_b = bistable(r_lo), bistable(r_hi)
    if lo_b == hi_b:
        raise RuntimeError(
            f"bracket [{r_lo}, {r_hi}] does not straddle the regime change at c={c}, eps={eps}"
        )
    lo, hi = r_lo, r_hi
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if bistable(mid) == hi_b:
            hi = mid
        else:
            lo = mid
    regime = {True: "bistable", False: "relaxation"}
    return ThresholdResult(
        r=0.5 * (lo + hi),
        tol=tol,
        regime_below=regime[lo_b],
        regime_above=regime[hi_b],
    )


def power_law_fit(eps_values, deviations) -> tuple[float, float]:
    """Fit deviation = C * eps^s by least squares in log-log coordinates;
    returns (C, s).  No reference values are asserted for the constants."""
    eps_values = np.asarray(eps_values, dtype=float)
    deviations = np.asarray(deviations, dtype=float)
    if np.any(eps_values <= 0.0) or np.any(deviations <= 0.0):
        raise ValueError("power_law_fit needs positive eps values and deviations")
    s, logc = np.polyfit(np.log(eps_values), np.log(deviations), 1)
    return float(math.exp(logc)), float(s)
