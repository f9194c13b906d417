"""Input signals y(t): representation, extremes, and Laplace-weighted extremes.

The weighted average of a signal is ``d * integral_0^inf exp(-d*s) y(r+s) ds``
(a convex combination of signal values, so it always lies between inf y and
sup y).  For trigonometric sums it has a per-term closed form; otherwise it is
computed by adaptive quadrature with an explicit exponential tail truncation.

Extremes are taken over time shifts r of y itself.  For periodic and
finite-trigonometric inputs this coincides with the extremes over the full
shift-closure of y; for more general almost-periodic inputs it is a
restriction (only finite truncations are representable here anyway).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence, Union

import numpy as np
from scipy.integrate import quad

TWO_PI = 2.0 * math.pi
_GOLDEN_XTOL = 1e-10
_GRID_PER_PERIOD = 4096
_QUAD_TAIL_TOL = 1e-12


@dataclass(frozen=True)
class Constant:
    a0: float


@dataclass(frozen=True)
class TrigSum:
    """a0 + sum_n a_n cos(theta_n t + phi_n); all theta_n > 0.

    rationally_independent is a caller-asserted flag (not decidable
    numerically); when set, the series-type extreme formulas are exact.
    """

    a0: float
    terms: tuple[tuple[float, float, float], ...]  # (amplitude, frequency, phase)
    rationally_independent: bool = False

    def __post_init__(self):
        object.__setattr__(self, "terms", tuple((float(a), float(th), float(ph)) for a, th, ph in self.terms))
        if any(th <= 0.0 for _, th, _ in self.terms):
            raise ValueError("TrigSum frequencies must be strictly positive")


@dataclass(frozen=True)
class FourierCesaro:
    """2*pi-periodic signal given by Fourier coefficients, evaluated as the
    N-th Cesaro mean (uniformly convergent for continuous y)."""

    a0: float
    a_coeffs: tuple[float, ...]
    b_coeffs: tuple[float, ...]
    n_terms: int

    def __post_init__(self):
        object.__setattr__(self, "a_coeffs", tuple(float(v) for v in self.a_coeffs))
        object.__setattr__(self, "b_coeffs", tuple(float(v) for v in self.b_coeffs))
        if self.n_terms < 2:
            raise ValueError("FourierCesaro needs n_terms >= 2")


@dataclass(frozen=True)
class SampledPeriodic:
    """Periodic signal from samples on [0, T), evaluated by periodic linear
    interpolation (an approximation without exactness guarantees)."""

    period: float
    times: tuple[float, ...]
    values: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "times", tuple(float(t) for t in self.times))
        object.__setattr__(self, "values", tuple(float(v) for v in self.values))
        if self.period <= 0.0:
            raise ValueError("period must be positive")
        if len(self.times) < 4 or len(self.times) != len(self.values):
            raise ValueError("need at least 4 (t, value) samples")
        if any(t1 >= t2 for t1, t2 in zip(self.times, self.times[1:])):
            raise ValueError("sample times must be strictly increasing")
        if self.times[0] < 0.0 or self.times[-1] >= self.period:
            raise ValueError("sample times must lie in [0, period)")


SignalSpec = Union[Constant, TrigSum, FourierCesaro, SampledPeriodic]


@dataclass(frozen=True)
class SignalBounds:
    sup: float
    inf: float
    exact: bool


@dataclass(frozen=True)
class WeightedBounds:
    sup_w: float
    inf_w: float
    dfrak: float
    exact: bool


def _cesaro_terms(sig: FourierCesaro) -> tuple[tuple[float, float, float], ...]:
    """Cesaro-mean weights turn the Fourier coefficients into a finite
    cosine sum: b*sin(nt) = b*cos(nt - pi/2)."""
    n_max = min(sig.n_terms - 1, max(len(sig.a_coeffs), len(sig.b_coeffs)))
    terms = []
    for n in range(1, n_max + 1):
        w = (sig.n_terms - n) / sig.n_terms
        a = sig.a_coeffs[n - 1] if n <= len(sig.a_coeffs) else 0.0
        b = sig.b_coeffs[n - 1] if n <= len(sig.b_coeffs) else 0.0
        if a:
            terms.append((w * a, float(n), 0.0))
        if b:
            terms.append((w * b, float(n), -math.pi / 2.0))
    return tuple(terms)


def _as_trig(signal: SignalSpec) -> tuple[float, tuple[tuple[float, float, float], ...]] | None:
    """(a0, terms) for signals with an exact finite-cosine representation."""
    if isinstance(signal, Constant):
        return signal.a0, ()
    if isinstance(signal, TrigSum):
        return signal.a0, signal.terms
    if isinstance(signal, FourierCesaro):
        return signal.a0, _cesaro_terms(signal)
    return None


def eval(signal: SignalSpec, t):
    """Value y(t); t may be a scalar or an array."""
    t = np.asarray(t, dtype=float)
    trig = _as_trig(signal)
    if trig is not None:
        a0, terms = trig
        out = np.full(t.shape, a0)
        for a, th, ph in terms:
            out = out + a * np.cos(th * t + ph)
        return out if out.ndim else float(out)
    assert isinstance(signal, SampledPeriodic)
    ts = np.asarray(signal.times + (signal.times[0] + signal.period,))
    vs = np.asarray(signal.values + (signal.values[0],))
    out = np.interp(np.mod(t, signal.period), ts, vs, period=signal.period)
    return out if out.ndim else float(out)


def fundamental_period(signal: SignalSpec, max_lcm: int = 100_000) -> float | None:
    """Common period of the signal, or None (constant or incommensurate)."""
    if isinstance(signal, SampledPeriodic):
        return signal.period
    if isinstance(signal, FourierCesaro):
        return TWO_PI if _cesaro_terms(signal) else None
    trig = _as_trig(signal)
    if trig is None:
        return None
    terms = [(a, th) for a, th, _ in trig[1] if a != 0.0]
    if not terms:
        return None
    th0 = terms[0][1]
    lcm = 1
    for _, th in terms:
        frac = Fraction(th / th0).limit_denominator(10_000)
        if abs(float(frac) - th / th0) > 1e-9 * max(1.0, th / th0):
            return None  # not commensurate at resolvable precision
        lcm = lcm * frac.denominator // math.gcd(lcm, frac.denominator)
        if lcm > max_lcm:
            return None
    # T*th_n/(2 pi) integral for all n  <=>  T = (2 pi / th0) * lcm(q_n)
    return TWO_PI / th0 * lcm


def is_periodic_nonconstant(signal: SignalSpec) -> bool:
    if isinstance(signal, Constant):
        return False
    if isinstance(signal, SampledPeriodic):
        return max(signal.values) > min(signal.values)
    trig = _as_trig(signal)
    if trig is None or not any(a != 0.0 for a, _, _ in trig[1]):
        return False
    return fundamental_period(signal) is not None


def _golden_max(f, lo: float, hi: float, xtol: float = _GOLDEN_XTOL) -> tuple[float, float]:
    """Golden-section maximization on [lo, hi]."""
    inv = (math.sqrt(5.0) - 1.0) / 2.0
    a, b = lo, hi
    x1 = b - inv * (b - a)
    x2 = a + inv * (b - a)
    f1, f2 = f(x1), f(x2)
    while b - a > xtol:
        if f1 < f2:
            a, x1, f1 = x1, x2, f2
            x2 = a + inv * (b - a)
            f2 = f(x2)
        else:
            b, x2, f2 = x2, x1, f1
            x1 = b - inv * (b - a)
            f1 = f(x1)
    xm = (a + b) / 2.0
    return xm, f(xm)


def _scan_extremes(f_vec, f_scalar, window: float, n: int) -> tuple[float, float]:
    """Grid scan of f on [0, window] with golden refinement at both extremes."""
    r = np.linspace(0.0, window, n, endpoint=False)
    v = f_vec(r)
    h = window / n
    imax = int(np.argmax(v))
    imin = int(np.argmin(v))
    _, vmax = _golden_max(f_scalar, r[imax] - h, r[imax] + h)
    _, vmin_neg = _golden_max(lambda x: -f_scalar(x), r[imin] - h, r[imin] + h)
    return float(vmax), float(-vmin_neg)


def bounds(signal: SignalSpec) -> SignalBounds:
    """sup and inf of y over all time."""
    trig = _as_trig(signal)
    if trig is not None:
        a0, terms = trig
        terms = tuple(t for t in terms if t[0] != 0.0)
        if not terms:
            return SignalBounds(a0, a0, True)
        total = sum(abs(a) for a, _, _ in terms)
        if len(terms) == 1:
            return SignalBounds(a0 + total, a0 - total, True)
        if isinstance(signal, TrigSum) and signal.rationally_independent:
            return SignalBounds(a0 + total, a0 - total, True)
    period = fundamental_period(signal)
    if period is None:
        # incommensurate without the independence flag: scan a long window
        assert trig is not None
        period = 64.0 * TWO_PI / min(th for _, th, _ in trig[1])
    sup, inf = _scan_extremes(
        lambda r: eval(signal, r), lambda r: eval(signal, float(r)), period, _GRID_PER_PERIOD
    )
    if isinstance(signal, SampledPeriodic):
        # linear interpolant attains extremes at sample nodes
        return SignalBounds(max(signal.values), min(signal.values), False)
    return SignalBounds(sup, inf, False)


def _weighted_closed_form(a0, terms, d: float, r):
    r = np.asarray(r, dtype=float)
    out = np.full(r.shape, a0)
    for a, th, ph in terms:
        arg = th * r + ph
        out = out + a * (d * d * np.cos(arg) - th * d * np.sin(arg)) / (d * d + th * th)
    return out if out.ndim else float(out)


def weighted_average(signal: SignalSpec, dfrak: float, r: float, method: str = "auto") -> float:
    """d * integral_0^inf exp(-d s) y(r+s) ds.

    method "closed" forces the trig closed form, "quad" forces quadrature,
    "auto" picks the closed form whenever it exists.
    """
    if dfrak <= 0.0:
        raise ValueError(f"weighted_average requires dfrak > 0, got {dfrak}")
    trig = _as_trig(signal)
    if method == "closed" and trig is None:
        raise ValueError("closed form only available for trigonometric signals")
    if trig is not None and method != "quad":
        return float(_weighted_closed_form(trig[0], trig[1], dfrak, float(r)))
    if isinstance(signal, SampledPeriodic) and method != "quad":
        return _weighted_sampled_exact(signal, dfrak, float(r))
    integrand = lambda s: dfrak * math.exp(-dfrak * s) * eval(signal, r + s)
    b = bounds(signal)
    scale = max(abs(b.sup), abs(b.inf), 1.0)
    s_max = math.log(scale / _QUAD_TAIL_TOL) / dfrak
    val, _ = quad(integrand, 0.0, s_max, limit=1000, epsabs=1e-10, epsrel=1e-10)
    return float(val)


def _weighted_sampled_exact(signal: SampledPeriodic, d: float, r: float) -> float:
    """Exact weighted average of the piecewise-linear interpolant: the tail is
    a geometric series over periods, and each linear segment integrates in
    closed form against the exponential weight."""
    T = signal.period
    # segment breakpoints of s in [0, T] where r + s crosses a sample node
    nodes = np.sort(np.unique(np.concatenate([(np.asarray(signal.times) - r) % T, [0.0, T]])))
    s0, s1 = nodes[:-1], nodes[1:]
    y0 = np.asarray(eval(signal, r + s0))
    slope = (np.asarray(eval(signal, r + s1)) - y0) / np.maximum(s1 - s0, 1e-300)
    delta = s1 - s0
    e0 = np.exp(-d * s0)
    # int_0^delta e^{-d u} du and int_0^delta u e^{-d u} du, scaled by e^{-d s0}
    i_const = e0 * (1.0 - np.exp(-d * delta)) / d
    i_lin = e0 * (1.0 - np.exp(-d * delta) * (1.0 + d * delta)) / (d * d)
    total = float(np.sum(y0 * i_const + slope * i_lin))
    return d * total / (1.0 - math.exp(-d * T))


def weighted_bounds(signal: SignalSpec, dfrak: float) -> WeightedBounds:
    """Extremes over r of the Laplace-weighted average."""
    if dfrak <= 0.0:
        raise ValueError(f"weighted_bounds requires dfrak > 0, got {dfrak}")
    trig = _as_trig(signal)
    if trig is not None:
        a0, terms = trig
        terms = tuple(t for t in terms if t[0] != 0.0)
        if not terms:
            return WeightedBounds(a0, a0, dfrak, True)
        amp = sum(abs(a) * dfrak / math.hypot(dfrak, th) for a, th, _ in terms)
        if len(terms) == 1 or (isinstance(signal, TrigSum) and signal.rationally_independent):
            return WeightedBounds(a0 + amp, a0 - amp, dfrak, True)
        period = fundamental_period(signal)
        if period is None:
            period = 64.0 * TWO_PI / min(th for _, th, _ in terms)
        sup_w, inf_w = _scan_extremes(
            lambda r: _weighted_closed_form(a0, terms, dfrak, r),
            lambda r: _weighted_closed_form(a0, terms, dfrak, float(r)),
            period,
            _GRID_PER_PERIOD,
        )
        return WeightedBounds(sup_w, inf_w, dfrak, False)
    # sampled signals: quadrature per grid point, coarser grid
    assert isinstance(signal, SampledPeriodic)
    f = lambda r: weighted_average(signal, dfrak, float(r))
    rs = np.linspace(0.0, signal.period, 256, endpoint=False)
    vals = np.array([f(r) for r in rs])
    h = signal.period / 256
    imax, imin = int(np.argmax(vals)), int(np.argmin(vals))
    _, sup_w = _golden_max(f, rs[imax] - h, rs[imax] + h, xtol=1e-8)
    _, neg = _golden_max(lambda r: -f(r), rs[imin] - h, rs[imin] + h, xtol=1e-8)
    return WeightedBounds(float(sup_w), float(-neg), dfrak, False)


def series_bound(terms: Sequence[tuple[float, float]], dfrak: float) -> float:
    """sum |a_n| (1 + d/sqrt(d^2 + theta_n^2)) over (amplitude, frequency)
    terms; equals the true weighted variation for rationally independent
    frequencies."""
    if dfrak <= 0.0:
        raise ValueError(f"series_bound requires dfrak > 0, got {dfrak}")
    return float(sum(abs(a) * (1.0 + dfrak / math.hypot(dfrak, th)) for a, th in terms))


def cesaro_bound(a_coeffs: Sequence[float], b_coeffs: Sequence[float], dfrak: float, n_terms: int) -> float:
    """N-th Cesaro bound (1/N) sum_{n=1}^{N-1} (N-n)(|a_n|+|b_n|)(1 + d/sqrt(d^2+n^2))."""
    if dfrak <= 0.0:
        raise ValueError(f"cesaro_bound requires dfrak > 0, got {dfrak}")
    if n_terms < 2:
        raise ValueError("cesaro_bound needs n_terms >= 2")
    total = 0.0
    for n in range(1, n_terms):
        a = abs(a_coeffs[n - 1]) if n <= len(a_coeffs) else 0.0
        b = abs(b_coeffs[n - 1]) if n <= len(b_coeffs) else 0.0
        total += (n_terms - n) * (a + b) * (1.0 + dfrak / math.hypot(dfrak, float(n)))
    return total / n_terms


def signal_to_json(signal: SignalSpec) -> dict:
    """JSON-serializable description (frequencies in rad per unit time)."""
    if isinstance(signal, Constant):
        return {"type": "constant", "a0": signal.a0}
    if isinstance(signal, TrigSum):
        return {
            "type": "trig",
            "a0": signal.a0,
            "terms": [list(t) for t in signal.terms],
            "rationally_independent": signal.rationally_independent,
        }
    if isinstance(signal, FourierCesaro):
        return {
            "type": "fourier_cesaro",
            "a0": signal.a0,
            "a": list(signal.a_coeffs),
            "b": list(signal.b_coeffs),
            "n_terms": signal.n_terms,
        }
    assert isinstance(signal, SampledPeriodic)
    return {
        "type": "sampled",
        "period": signal.period,
        "samples": [[t, v] for t, v in zip(signal.times, signal.values)],
    }


def signal_from_json(data: dict) -> SignalSpec:
    """Inverse of signal_to_json; raises ValueError on unknown/invalid input."""
    kind = data.get("type")
    if kind == "constant":
        return Constant(float(data["a0"]))
    if kind == "trig":
        return TrigSum(
            float(data.get("a0", 0.0)),
            tuple(tuple(term) for term in data["terms"]),
            bool(data.get("rationally_independent", False)),
        )
    if kind == "fourier_cesaro":
        return FourierCesaro(
            float(data.get("a0", 0.0)),
            tuple(data.get("a", ())),
            tuple(data.get("b", ())),
            int(data["n_terms"]),
        )
    if kind == "sampled":
        samples = sorted((float(t), float(v)) for t, v in data["samples"])
        return SampledPeriodic(
            float(data["period"]),
            tuple(t for t, _ in samples),
            tuple(v for _, v in samples),
        )
    raise ValueError(f"unknown signal type: {kind!r}")
