"""Direct numerical analysis of x' = lambda + y(t) + gbar(x).

Provides adaptive Runge-Kutta integration, the period-advance (Poincare) map
with its multiplier, a fixed-point census over a scan interval, and numeric
estimation of the bifurcation values of the concave-linear and linear-convex
comparison equations.

The multiplier of a periodic solution is exp of the integral of the state
derivative of the right-hand side along one period; it is integrated as an
augmented log state so that extremely attractive/repulsive orbits (long
periods) do not overflow.  Repulsive orbits are refined and measured through
the inverse map (backward-time integration), for which they are attractive:
a forward pass starting within roundoff of a strongly repulsive orbit still
falls off it long before the period ends, corrupting the multiplier integral.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

from . import signals as sig
from .model import (
    SQRT3,
    DomainError,
    cshift,
    dfrak,
    gbar_deriv,
    gbar_eval,
    lam1,
    lam2,
    mg_minus,
    mg_minus_deriv,
    mg_plus,
    mg_plus_deriv,
)

ABSTOL = 1e-10
RELTOL = 1e-8
ESCAPE_BOUND = 1e6
FP_TOL = 1e-9
DEDUP_TOL = 1e-6
NONHYP_TOL = 1e-4  # |multiplier - 1| below this => non-hyperbolic
SEPARATION_TOL = 1e-4  # state separation defining "two distinct solutions"

RHS_KINDS = ("full", "concave-linear", "linear-convex")


class FiniteEscapeError(RuntimeError):
    """A trajectory left |x| <= 1e6 in finite time."""


@dataclass(frozen=True)
class OdeSpec:
    c: float
    lam: float
    signal: sig.SignalSpec
    rhs_kind: str = "full"

    def __post_init__(self):
        if self.rhs_kind not in RHS_KINDS:
            raise ValueError(f"rhs_kind must be one of {RHS_KINDS}, got {self.rhs_kind!r}")
        if self.rhs_kind != "full" and self.c <= 4.0:
            raise DomainError(f"rhs_kind {self.rhs_kind!r} requires c > 4, got c = {self.c}")

    def rhs(self, t, x):
        """dx/dt; x may be an array of states advanced in parallel."""
        drive = self.lam + sig.eval(self.signal, t)
        if self.rhs_kind == "full":
            return drive + gbar_eval(self.c, x)
        halved = mg_minus if self.rhs_kind == "concave-linear" else mg_plus
        return drive - cshift(self.c) + dfrak(self.c) * x + halved(self.c, x)

    def rhs_state_deriv(self, x):
        """d(rhs)/dx, the multiplier integrand."""
        if self.rhs_kind == "full":
            return gbar_deriv(self.c, x)
        halved = mg_minus_deriv if self.rhs_kind == "concave-linear" else mg_plus_deriv
        return dfrak(self.c) + halved(self.c, x)


@dataclass(frozen=True)
class Trajectory:
    times: np.ndarray  # strictly increasing
    values: np.ndarray
    abstol: float
    reltol: float

    def to_csv_rows(self):
        yield "t,x"
        for t, x in zip(self.times, self.values):
            yield f"{t!r},{x!r}"

    def to_dict(self) -> dict:
        return {
            "abstol": self.abstol,
            "reltol": self.reltol,
            "samples": [[float(t), float(x)] for t, x in zip(self.times, self.values)],
        }


@dataclass(frozen=True)
class PeriodicSolution:
    period: float
    samples: Trajectory
    fixed_point: float  # value at t = 0
    multiplier: float  # exp(log_multiplier); inf when it overflows
    log_multiplier: float
    kind: str  # "attractive" | "repulsive" | "non-hyperbolic"

    def to_dict(self) -> dict:
        return {
            "period": self.period,
            "fixed_point": self.fixed_point,
            "multiplier": self.multiplier,
            "log_multiplier": self.log_multiplier,
            "kind": self.kind,
            "samples": self.samples.to_dict(),
        }


def _escape_event(t, y):
    return ESCAPE_BOUND - float(np.max(np.abs(y)))


_escape_event.terminal = True


def _solve(spec: OdeSpec, t0, y0, t1, abstol, reltol, rhs=None, dense=False, t_eval=None):
    sol = solve_ivp(
        rhs if rhs is not None else (lambda t, y: np.atleast_1d(spec.rhs(t, y))),
        (t0, t1),
        np.atleast_1d(np.asarray(y0, dtype=float)),
        method="RK45",
        atol=abstol,
        rtol=reltol,
        dense_output=dense,
        t_eval=t_eval,
        events=_escape_event,
        max_step=abs(t1 - t0) / 16.0,
    )
    if sol.status == 1:
        raise FiniteEscapeError(
            f"trajectory exceeded |x| = {ESCAPE_BOUND:g} at t = {sol.t_events[0][0]:.6g}"
        )
    if sol.status != 0:
        raise RuntimeError(f"integration failed: {sol.message}")
    return sol


def integrate(
    spec: OdeSpec,
    t0: float,
    x0: float,
    t1: float,
    abstol: float = ABSTOL,
    reltol: float = RELTOL,
    n_samples: int | None = None,
) -> Trajectory:
    """Trajectory from (t0, x0) to t1; t1 < t0 integrates backward.

    The returned times are always increasing (a backward run is reversed).
    """
    t_eval = np.linspace(t0, t1, n_samples) if n_samples else None
    sol = _solve(spec, t0, x0, t1, abstol, reltol, dense=t_eval is None, t_eval=t_eval)
    times, values = sol.t, sol.y[0]
    if t1 < t0:
        times, values = times[::-1], values[::-1]
    return Trajectory(np.asarray(times), np.asarray(values), abstol, reltol)


def _augmented_rhs(spec: OdeSpec):
    def rhs(t, y):
        x = y[: y.size // 2]
        return np.concatenate([np.atleast_1d(spec.rhs(t, x)), np.atleast_1d(spec.rhs_state_deriv(x))])

    return rhs


def poincare_map_log(spec: OdeSpec, T: float, x0: float, backward: bool = False) -> tuple[float, float]:
    """(x at the far end, log multiplier along the computed arc).

    Forward: returns (x(T; 0, x0), integral over [0, T] of the state
    derivative along that arc).  Backward: starts from x0 at t = T, returns
    x(0) and the same forward-oriented integral taken along the backward arc.
    """
    t0, t1 = (T, 0.0) if backward else (0.0, T)
    sol = _solve(spec, t0, [x0, 0.0], t1, ABSTOL, RELTOL, rhs=_augmented_rhs(spec))
    xT, L = float(sol.y[0, -1]), float(sol.y[1, -1])
    return xT, (-L if backward else L)


def poincare_map(spec: OdeSpec, T: float, x0: float) -> tuple[float, float]:
    """(x(T; 0, x0), multiplier exp(integral of the state derivative))."""
    xT, L = poincare_map_log(spec, T, x0)
    try:
        mult = math.exp(L)
    except OverflowError:
        mult = math.inf
    return xT, mult


def poincare_multiplier_fd(
    spec: OdeSpec, T: float, x0: float, h: float = 1e-5, backward_orbit: bool = False
) -> float:
    """Log multiplier at x0 by centered finite differences of the flow.

    The period is split into segments on which the log derivative of the flow
    map stays bounded (|increment| <= 2), each segment map is differenced at
    x +/- h around the orbit, and the segment logs are summed; for mildly
    hyperbolic orbits this reduces to the plain centered difference of the
    period map.  Differencing the full map directly is impossible for long
    periods: its derivative overflows double precision.

    backward_orbit computes the anchor orbit by backward integration from
    (T, x0) — required for strongly repulsive orbits, which a forward solve
    falls off before the period ends.
    """
    t0, t1 = (T, 0.0) if backward_orbit else (0.0, T)
    sol = _solve(spec, t0, [x0], t1, 1e-12, 1e-10, dense=True)
    ts = np.linspace(0.0, T, 4097)
    xs = sol.sol(ts)[0]
    fx = np.atleast_1d(spec.rhs_state_deriv(xs))
    Ls = np.concatenate([[0.0], np.cumsum(0.5 * (fx[1:] + fx[:-1]) * np.diff(ts))])
    cuts = [0]
    for i in range(1, ts.size):
        if abs(Ls[i] - Ls[cuts[-1]]) >= 2.0:
            cuts.append(i)
    if cuts[-1] != ts.size - 1:
        cuts.append(ts.size - 1)
    total = 0.0
    for i0, i1 in zip(cuts, cuts[1:]):
        ta, tb, xa = ts[i0], ts[i1], xs[i0]
        seg = _solve(spec, ta, [xa + h, xa - h], tb, 1e-12, 1e-10)
        diff = float(seg.y[0, -1] - seg.y[1, -1])
        if diff <= 0.0:
            raise RuntimeError(f"finite-difference segment [{ta:.4g}, {tb:.4g}] lost monotonicity")
        total += math.log(diff / (2.0 * h))
    return total


def _scan_interval(spec: OdeSpec) -> tuple[float, float]:
    """Scan interval for the fixed-point census.

    The ceiling rho satisfies gbar(rho) = -max(lam2, lam + sup y) - 1, so
    every bounded solution in the analyzed regimes lies below it; for the
    recentered comparison equations the interval is shifted by -sqrt(3).
    """
    target = -(spec.lam + sig.bounds(spec.signal).sup) - 1.0
    if spec.c > 4.0:
        target = min(target, -lam2(spec.c) - 1.0)
    # below: the smallest state the ceiling can exceed.  For c > 4 that is x2
    # (the decreasing tail of gbar starts there); for c <= 4 gbar decreases on
    # the whole half-line, so the root may sit anywhere above 0.
    lo_x = 0.0 if spec.c <= 4.0 else math.sqrt(spec.c - 1.0 + math.sqrt(spec.c * (spec.c - 4.0)))
    hi = max(lo_x + 1.0, 2.0)
    while gbar_eval(spec.c, hi) > target:
        hi *= 2.0
    rho = brentq(lambda x: gbar_eval(spec.c, x) - target, lo_x, hi, xtol=1e-12)
    if spec.rhs_kind == "full":
        return 0.0, float(rho)
    return -SQRT3, float(rho) - SQRT3


def _displacement_grid(spec: OdeSpec, T: float, xs: np.ndarray) -> np.ndarray:
    """T(x0) - x0 for all seeds at once (one vectorized solve)."""
    sol = _solve(spec, 0.0, xs, T, ABSTOL, RELTOL)
    return sol.y[:, -1] - xs


def _brackets(spec: OdeSpec, T: float, n: int) -> list[tuple[float, float, bool]]:
    """(xa, xb, attractive_crossing) for every sign change of the displacement."""
    lo, hi = _scan_interval(spec)
    xs = np.linspace(lo, hi, n)
    d = _displacement_grid(spec, T, xs)
    out = []
    for i in range(n - 1):
        da, db = d[i], d[i + 1]
        if da == 0.0:
            out.append((xs[max(i - 1, 0)], xs[i + 1], db < da))
        elif da * db < 0.0:
            out.append((xs[i], xs[i + 1], da > 0.0))
    return out


def _stable_brackets(spec: OdeSpec, T: float, n0: int = 512, n_max: int = 8192):
    """Grid scan doubled until the crossing count stabilizes twice in a row."""
    n, streak = n0, 0
    brk = _brackets(spec, T, n)
    while streak < 2 and n < n_max:
        n *= 2
        nxt = _brackets(spec, T, n)
        streak = streak + 1 if len(nxt) == len(brk) else 0
        brk = nxt
    return brk


def _refine_fixed_point(spec: OdeSpec, T: float, xa: float, xb: float, attractive: bool) -> float:
    """Fixed point of the period map inside [xa, xb].

    Attractive crossings iterate the forward map, repulsive ones the inverse
    (backward) map; both contract onto the orbit.  Root bracketing on the
    forward displacement is the fallback when the map contracts too slowly
    (multiplier near 1).
    """
    x = 0.5 * (xa + xb)
    for _ in range(60):
        nxt, _ = poincare_map_log(spec, T, x, backward=not attractive)
        if abs(nxt - x) < FP_TOL:
            return nxt
        x = nxt
    return float(brentq(lambda s: poincare_map_log(spec, T, s)[0] - s, xa, xb, xtol=FP_TOL))


def find_periodic_solutions(spec: OdeSpec, T: float, n_samples: int = 512) -> list[PeriodicSolution]:
    """All T-periodic solutions found by the census over the scan interval.

    Requires the input to be constant or T-periodic.  Each solution carries
    one period of samples, its multiplier, and its stability tag.
    """
    solutions = []
    for xa, xb, attractive in _stable_brackets(spec, T):
        x0 = _refine_fixed_point(spec, T, xa, xb, attractive)
        if any(abs(x0 - s.fixed_point) < DEDUP_TOL for s in solutions):
            continue
        # sample/measure repulsive orbits backward: forward integration falls
        # off them before one period when the multiplier is extreme
        sol = _solve(
            spec,
            0.0 if attractive else T,
            [x0, 0.0],
            T if attractive else 0.0,
            ABSTOL,
            RELTOL,
            rhs=_augmented_rhs(spec),
        )
        ts, xs, L = sol.t, sol.y[0], float(sol.y[1, -1])
        if not attractive:
            ts, xs, L = ts[::-1], xs[::-1], -L
        try:
            mult = math.exp(L)
        except OverflowError:
            mult = math.inf
        kind = "non-hyperbolic" if abs(L) < NONHYP_TOL else ("attractive" if L < 0.0 else "repulsive")
        solutions.append(
            PeriodicSolution(
                period=T,
                samples=Trajectory(np.asarray(ts), np.asarray(xs), ABSTOL, RELTOL),
                fixed_point=x0,
                multiplier=mult,
                log_multiplier=L,
                kind=kind,
            )
        )
    solutions.sort(key=lambda s: s.fixed_point)
    for a, b in zip(solutions, solutions[1:]):
        if b.fixed_point - a.fixed_point < 10.0 * FP_TOL:
            warnings.warn(
                f"fixed points {a.fixed_point:.9g} and {b.fixed_point:.9g} are closer than "
                f"{10.0 * FP_TOL:g}; possible non-hyperbolic pair near a saddle-node",
                stacklevel=2,
            )
    return solutions


def finite_time_exponent(spec: OdeSpec, traj: Trajectory) -> float:
    """Average of the state derivative of the rhs along the trajectory."""
    span = traj.times[-1] - traj.times[0]
    if span <= 0.0:
        raise ValueError("trajectory must span positive time")
    vals = np.atleast_1d(spec.rhs_state_deriv(traj.values))
    return float(np.sum(0.5 * (vals[1:] + vals[:-1]) * np.diff(traj.times)) / span)


def count_separated_solutions(spec: OdeSpec, T: float, n: int = 2048) -> int:
    """Number of pairwise separated (> SEPARATION_TOL) period-map crossings.

    Count-only fast path: no refinement or multipliers, one vectorized scan.
    """
    mids = sorted(0.5 * (xa + xb) for xa, xb, _ in _brackets(spec, T, n))
    count = 0
    last = None
    for m in mids:
        if last is None or m - last > SEPARATION_TOL:
            count += 1
        last = m
    return count


def _signal_period(signal: sig.SignalSpec) -> float:
    period = sig.fundamental_period(signal)
    if period is not None:
        return period
    if isinstance(signal, sig.Constant) or not sig.is_periodic_nonconstant(signal):
        b = sig.bounds(signal)
        if b.sup == b.inf:
            return 1.0  # autonomous: any section time works
    raise ValueError("signal must be constant or periodic")


def estimate_lambda_pm(
    c: float, signal: sig.SignalSpec, tol: float = 1e-5
) -> tuple[float, float, dict]:
    """Bifurcation values (lambda_minus, lambda_plus) of the comparison
    equations, by bisection on "the census finds >= 2 separated solutions".

    The concave-linear equation has two bounded solutions exactly above its
    bifurcation value and the linear-convex one exactly below; the seed
    brackets come from the closed-form sandwich around lam1 and lam2.  The
    returned metadata notes that for non-constant inputs the period-map
    predicate is a surrogate of the shift-family definition (equivalent for
    periodic inputs).
    """
    if c <= 4.0:
        raise DomainError(f"estimate_lambda_pm requires c > 4, got c = {c}")
    T = _signal_period(signal)
    b = sig.bounds(signal)
    h1 = lam2(c) - lam1(c)
    margin = max(h1, 10.0 * tol)

    def bisect(center: float, rhs_kind: str, two_above: bool) -> float:
        lo, hi = center - b.sup - margin, center - b.inf + margin
        spec_at = lambda lam: OdeSpec(c, lam, signal, rhs_kind)

        def predicate(lam: float) -> bool:
            try:
                return count_separated_solutions(spec_at(lam), T) >= 2
            except FiniteEscapeError:
                return False

        p_lo, p_hi = predicate(lo), predicate(hi)
        if p_lo == p_hi:
            raise RuntimeError(
                f"bracket [{lo:.6g}, {hi:.6g}] does not straddle the {rhs_kind} bifurcation"
            )
        # two_above: predicate False below the bifurcation value, True above
        while hi - lo > tol:
            mid = 0.5 * (lo + hi)
            if predicate(mid) == two_above:
                hi = mid
            else:
                lo = mid
        return 0.5 * (lo + hi)

    lam_minus = bisect(lam1(c), "concave-linear", two_above=True)
    lam_plus = bisect(lam2(c), "linear-convex", two_above=False)
    meta = {
        "tol": tol,
        "period": T,
        "note": "period-map predicate is a surrogate of the shift-family "
        "definition; exact for constant and periodic inputs",
    }
    return lam_minus, lam_plus, meta
