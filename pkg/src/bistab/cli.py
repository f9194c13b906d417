"""Command-line surface: serialize every analysis as JSON or CSV.

Exit codes: 0 success, 1 computational failure (bracket failure, finite
escape), 2 validation error (bad arguments, bad signal file, violated
preconditions).
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from . import __version__, criteria, dynamics, relaxation, signals
from .model import DomainError, diagnostics, gbar_deriv


class ValidationError(ValueError):
    pass


def _load_signal(path: str) -> signals.SignalSpec:
    try:
        with open(path) as fh:
            data = json.load(fh)
        return signals.signal_from_json(data)
    except (OSError, json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
        raise ValidationError(f"cannot load signal file {path!r}: {exc}") from exc


def _parse_grid(text: str) -> list[float]:
    """Either comma-separated values or "lo:hi:n" (n equally spaced points)."""
    if ":" in text:
        parts = text.split(":")
        if len(parts) != 3:
            raise ValidationError(f"grid must be 'lo:hi:n' or comma list, got {text!r}")
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
        if n < 1:
            raise ValidationError("grid point count must be >= 1")
        return [float(v) for v in np.linspace(lo, hi, n)]
    return [float(v) for v in text.split(",") if v.strip()]


def _emit(args, config: dict, rows: list[dict], fieldnames: list[str]) -> None:
    """Write the result as CSV rows or as JSON with a config echo."""
    out = open(args.out, "w", newline="") if args.out else sys.stdout
    try:
        if args.format == "csv":
            writer = csv.DictWriter(out, fieldnames=fieldnames)
            writer.writeheader()
            for row in rows:
                writer.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in fieldnames})
        else:
            json.dump(
                {"version": __version__, "config": config, "result": rows},
                out,
                indent=2,
                sort_keys=True,
            )
            out.write("\n")
    finally:
        if args.out:
            out.close()


def _signal_period_or_one(signal: signals.SignalSpec) -> float:
    period = signals.fundamental_period(signal)
    if period is not None:
        return period
    b = signals.bounds(signal)
    if b.sup == b.inf:
        return 1.0
    raise ValidationError("signal must be constant or periodic for this command")


def cmd_diagnostics(args) -> None:
    d = diagnostics(args.c).to_dict()
    _emit(args, {"command": "diagnostics", "c": args.c}, [d], list(d))


def cmd_classify(args) -> None:
    signal = _load_signal(args.signal)
    try:
        cert = criteria.classify(args.c, args.lam, signal, args.endpoints_excluded)
    except ValueError as exc:
        raise ValidationError(str(exc)) from exc
    row = cert.to_dict()
    row["intervals"] = json.dumps(row["intervals"], sort_keys=True)
    row["slacks"] = json.dumps(row["slacks"], sort_keys=True)
    _emit(
        args,
        {"command": "classify", "c": args.c, "lambda": args.lam, "signal": args.signal},
        [row],
        ["regime", "fired_rule", "intervals", "slacks", "notes"],
    )


def _autonomous_equilibria(c: float, lam: float) -> list[tuple[float, str]]:
    """Nonnegative roots of lam = -g(x): the cubic x^3 - lam x^2 + (1+2c)x - lam."""
    roots = np.roots([1.0, -lam, 1.0 + 2.0 * c, -lam])
    # a saddle-node double root splits into a conjugate pair with imaginary
    # part ~1e-8; treat those as one real root
    xs = sorted(float(z.real) for z in roots if abs(z.imag) < 1e-6 and z.real >= -1e-12)
    xs = [x for i, x in enumerate(xs) if i == 0 or x - xs[i - 1] > 1e-6]
    out = []
    for x in xs:
        slope = gbar_deriv(c, max(x, 0.0))
        if abs(slope) < 1e-6:
            tag = "non-hyperbolic"
        else:
            tag = "attractive" if slope < 0.0 else "repulsive"
        out.append((max(x, 0.0), tag))
    return out


def cmd_bifurcation(args) -> None:
    lams = _parse_grid(args.grid) if args.grid else [args.lam]
    if lams is None or any(v is None for v in lams):
        raise ValidationError("bifurcation requires --grid or --lambda")
    rows = [
        {"c": args.c, "lambda": lam, "x": x, "stability": tag}
        for lam in lams
        for x, tag in _autonomous_equilibria(args.c, lam)
    ]
    _emit(
        args,
        {"command": "bifurcation", "c": args.c, "grid": args.grid or str(args.lam)},
        rows,
        ["c", "lambda", "x", "stability"],
    )


def cmd_poincare(args) -> None:
    signal = _load_signal(args.signal)
    T = _signal_period_or_one(signal)
    spec = dynamics.OdeSpec(args.c, args.lam, signal)
    sols = dynamics.find_periodic_solutions(spec, T)
    rows = [
        {
            "fixed_point": s.fixed_point,
            "multiplier": s.multiplier,
            "log_multiplier": s.log_multiplier,
            "kind": s.kind,
            "period": s.period,
        }
        for s in sols
    ]
    _emit(
        args,
        {"command": "poincare", "c": args.c, "lambda": args.lam, "signal": args.signal},
        rows,
        ["fixed_point", "multiplier", "log_multiplier", "kind", "period"],
    )


def cmd_relaxation(args) -> None:
    spec = relaxation.RelaxationSpec(args.c, args.eps[0], args.r[0])
    res = relaxation.run_analysis(spec)
    row = {
        "c": args.c,
        "eps": spec.eps,
        "r": spec.r,
        "n_fixed_points": res.n_fixed_points,
        "regime": res.regime,
        "area": res.area,
        "hausdorff": res.hausdorff_to_gamma,
    }
    if args.format == "json":
        row["solutions"] = [
            {k: v for k, v in s.to_dict().items() if k != "samples"} for s in res.solutions
        ]
    _emit(
        args,
        {"command": "relaxation", "c": args.c, "eps": spec.eps, "r": spec.r},
        [row],
        ["c", "eps", "r", "n_fixed_points", "regime", "area", "hausdorff"],
    )


def cmd_threshold(args) -> None:
    rows = []
    for eps in args.eps:
        res = relaxation.r_threshold(args.c, eps, tol=args.tol)
        rows.append(
            {
                "c": args.c,
                "eps": eps,
                "r_threshold": res.r,
                "regime_below": res.regime_below,
                "regime_above": res.regime_above,
            }
        )
    _emit(
        args,
        {"command": "threshold", "c": args.c, "eps": args.eps, "tol": args.tol},
        rows,
        ["c", "eps", "r_threshold", "regime_below", "regime_above"],
    )


def cmd_laplace(args) -> None:
    signal = _load_signal(args.signal)
    b = signals.bounds(signal)
    w = signals.weighted_bounds(signal, args.dfrak)
    row = {
        "dfrak": args.dfrak,
        "sup": b.sup,
        "inf": b.inf,
        "sup_w": w.sup_w,
        "inf_w": w.inf_w,
        "sup_w_minus_inf": w.sup_w - b.inf,
        "sup_minus_inf_w": b.sup - w.inf_w,
        "exact": w.exact,
    }
    _emit(
        args,
        {"command": "laplace", "dfrak": args.dfrak, "signal": args.signal},
        [row],
        list(row),
    )


def _sweep_cell(task: tuple[float, float, float]) -> dict:
    c, eps, r = task
    res = relaxation.run_analysis(relaxation.RelaxationSpec(c, eps, r))
    return {
        "c": c,
        "eps": eps,
        "r": r,
        "n_fixed_points": res.n_fixed_points,
        "regime": res.regime,
        "area": res.area,
        "hausdorff": res.hausdorff_to_gamma,
    }


def cmd_sweep(args) -> None:
    if not args.r:
        raise ValidationError("sweep requires --r (value, comma list, or lo:hi:n)")
    tasks = [(args.c, eps, r) for eps in args.eps for r in args.r]
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_cell, tasks))  # map preserves grid order
    else:
        rows = [_sweep_cell(t) for t in tasks]
    _emit(
        args,
        {"command": "sweep", "c": args.c, "eps": args.eps, "r": args.r, "jobs": args.jobs},
        rows,
        ["c", "eps", "r", "n_fixed_points", "regime", "area", "hausdorff"],
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="bistab",
        description="Diagnostics, regime certificates and simulations for the "
        "driven saturable-absorber model x' = lambda + y(t) + gbar(x).",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, *, need_c=True):
        if need_c:
            p.add_argument("--c", type=float, required=True, help="material constant c > 0")
        p.add_argument("--format", choices=("json", "csv"), default="json")
        p.add_argument("--out", default=None, help="output file (default: stdout)")

    p = sub.add_parser("diagnostics", help="closed-form scalar diagnostics for c")
    common(p)
    p.set_defaults(func=cmd_diagnostics)

    p = sub.add_parser("classify", help="regime certificate for (c, lambda, signal)")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--signal", required=True, help="signal JSON file")
    p.add_argument(
        "--endpoints-excluded",
        dest="endpoints_excluded",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="assert the extreme constants are not shift limits of the signal",
    )
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("bifurcation", help="autonomous equilibria over a lambda grid")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--grid", default=None, help="lambda grid: 'lo:hi:n' or comma list")
    p.set_defaults(func=cmd_bifurcation, format="csv")

    p = sub.add_parser("poincare", help="periodic-solution census for a periodic signal")
    common(p)
    p.add_argument("--lambda", dest="lam", type=float, required=True)
    p.add_argument("--signal", required=True)
    p.set_defaults(func=cmd_poincare)

    p = sub.add_parser("relaxation", help="slow-forcing run: census, loop area, distance to the singular curve")
    common(p)
    p.add_argument("--eps", type=_parse_grid, required=True)
    p.add_argument("--r", type=_parse_grid, required=True)
    p.set_defaults(func=cmd_relaxation)

    p = sub.add_parser("threshold", help="regime-change exponent r for each eps")
    common(p)
    p.add_argument("--eps", type=_parse_grid, required=True, help="comma list of eps values")
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("laplace", help="signal extremes and Laplace-weighted extremes")
    common(p, need_c=False)
    p.add_argument("--signal", required=True)
    p.add_argument("--dfrak", type=float, required=True)
    p.set_defaults(func=cmd_laplace)

    p = sub.add_parser("sweep", help="run_analysis over an (eps, r) grid")
    common(p)
    p.add_argument("--eps", type=_parse_grid, required=True)
    p.add_argument("--r", type=_parse_grid, required=True)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep, format="csv")

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 2 if exc.code not in (0, None) else 0
    try:
        args.func(args)
        return 0
    except (ValidationError, DomainError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (dynamics.FiniteEscapeError, RuntimeError) as exc:
        print(f"computation failed: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
