"""Command-line front end: analyze, sweep, figure, converge."""

import argparse
import json
import os
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .assemblage import build_assemblage, fibonacci_directions, parse_measurement_spec
from .factory import t_state, unsteerable_mixture, werner
from .gmodel import HiddenGrid, gmodel_to_json_dict
from .lp import min_s
from .qubit import ValidationError, load_state

EXIT_UNSTEERABLE = 0
EXIT_USAGE = 1
EXIT_STEERABLE = 2
EXIT_INCONCLUSIVE = 3
EXIT_INTEGRITY = 4

MONOTONICITY_TOL = 1e-7


def _atomic_write(path, text):
    """Write via a sibling temp file and rename; no partial outputs."""
    d = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=d, prefix=".steerlp-")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _fmt(v):
    return f"{v:.12g}"


def _resolve_state(args):
    chosen = [
        args.state is not None,
        args.werner is not None,
        args.tstate is not None,
    ]
    if sum(chosen) != 1:
        raise ValidationError(
            "exactly one of --state, --werner, --tstate is required"
        )
    if args.state is not None:
        return load_state(args.state)
    if args.werner is not None:
        return werner(args.werner)
    t1, t2, t3 = (float(v) for v in args.tstate.split(","))
    return t_state(t1, t2, t3)


def _add_state_flags(p):
    p.add_argument("--state", help="state JSON file (g or density schema)")
    p.add_argument("--werner", type=float, help="Werner parameter p")
    p.add_argument("--tstate", help="Bell-diagonal correlations t1,t2,t3")


def cmd_analyze(args) -> int:
    state = _resolve_state(args)
    mset = parse_measurement_spec(args.measurements)
    grid = HiddenGrid.from_level(args.grid)
    report = min_s(build_assemblage(state, mset), grid)
    doc = report.to_json_dict()
    doc["measurement_spec"] = args.measurements
    if report.lhs_model is not None:
        doc["lhs_model"] = gmodel_to_json_dict(report.lhs_model)
    _atomic_write(args.out, json.dumps(doc, indent=1, sort_keys=True) + "\n")
    return {
        "unsteerable-for-set": EXIT_UNSTEERABLE,
        "steerable-for-set": EXIT_STEERABLE,
    }.get(report.verdict, EXIT_INCONCLUSIVE)


def _parse_range(spec):
    """"start:stop:step" inclusive of stop up to rounding; may be empty."""
    if spec.strip() == "":
        return []
    start, stop, step = (float(v) for v in spec.split(":"))
    if step <= 0.0:
        raise ValidationError("range step must be positive")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [start + i * step for i in range(max(count, 0))]


def _sweep_point(family, param, mspec, level):
    if family == "werner":
        state = werner(param)
    elif family.startswith("mixture:"):
        t1, t2, t3 = (float(v) for v in family[len("mixture:"):].split(","))
        state = unsteerable_mixture(param, t_state(t1, t2, t3))
    else:
        raise ValidationError(f"unknown family {family!r}")
    mset = parse_measurement_spec(mspec)
    report = min_s(build_assemblage(state, mset), HiddenGrid.from_level(level))
    residual = max(report.residuals.values()) if report.residuals else float("nan")
    s_val = float("nan") if report.s_value is None else report.s_value
    return param, s_val, report.verdict, residual


def cmd_sweep(args) -> int:
    params = _parse_range(args.range)
    if args.family != "werner" and not args.family.startswith("mixture:"):
        raise ValidationError(f"unknown family {args.family!r}")
    jobs = [(args.family, p, args.measurements, args.grid) for p in params]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as ex:
            results = list(ex.map(_sweep_point, *zip(*jobs)))
    else:
        results = [_sweep_point(*j) for j in jobs]
    lines = ["param,s_value,verdict,residual"]
    for param, s_val, verdict, residual in results:
        lines.append(f"{_fmt(param)},{_fmt(s_val)},{verdict},{_fmt(residual)}")
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_figure(args) -> int:
    state = _resolve_state(args)
    dirs = fibonacci_directions(max(args.samples, 1)).directions
    pts = 0.5 * state.b[None, :] + 0.5 * (dirs @ state.t)
    lines = ["x,y,z"]
    for p in pts:
        lines.append(",".join(_fmt(v) for v in p))
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def cmd_converge(args) -> int:
    state = _resolve_state(args)
    counts = [int(v) for v in args.measurement_counts.split(",")]
    levels = [int(v) for v in args.grid_levels.split(",")]
    # nested chain: each entry is the previous set plus the next lattice
    msets = []
    for n in counts:
        new = fibonacci_directions(n)
        msets.append(msets[-1].union(new) if msets else new)
    grids = {lv: HiddenGrid.from_level(lv) for lv in levels}

    table = np.empty((len(msets), len(levels)))
    for i, mset in enumerate(msets):
        for j, lv in enumerate(levels):
            rep = min_s(build_assemblage(state, mset), grids[lv])
            if rep.s_value is None:
                print(f"solver failure at M={counts[i]} level={lv}", file=sys.stderr)
                return EXIT_INCONCLUSIVE
            table[i, j] = rep.s_value

    # more measurements cannot lower the optimum; finer nested grids
    # cannot raise it
    if np.any(np.diff(table, axis=0) < -MONOTONICITY_TOL):
        print("monotonicity violated along measurement counts", file=sys.stderr)
        return EXIT_INTEGRITY
    if sorted(levels) == levels and np.any(np.diff(table, axis=1) > MONOTONICITY_TOL):
        print("monotonicity violated along grid levels", file=sys.stderr)
        return EXIT_INTEGRITY

    lines = ["measurements," + ",".join(f"level{lv}" for lv in levels)]
    for i, n in enumerate(counts):
        lines.append(
            ",".join([str(len(msets[i]))] + [_fmt(v) for v in table[i]])
        )
    _atomic_write(args.out, "\n".join(lines) + "\n")
    return 0


def build_parser():
    ap = argparse.ArgumentParser(
        prog="steerlp",
        description="Two-qubit steering detection via LP over hidden-state models",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="decide steerability of one state")
    _add_state_flags(p)
    p.add_argument("--measurements", default="fib:16")
    p.add_argument("--grid", type=int, default=3, help="icosphere level")
    p.add_argument("--out", required=True, help="report JSON path")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("sweep", help="sweep a state family parameter")
    p.add_argument("--family", required=True, help='"werner" or "mixture:t1,t2,t3"')
    p.add_argument("--range", required=True, help="start:stop:step (may be empty)")
    p.add_argument("--measurements", default="fib:16")
    p.add_argument("--grid", type=int, default=3)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("figure", help="emit steering-figure boundary points")
    _add_state_flags(p)
    p.add_argument("--samples", type=int, default=256)
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_figure)

    p = sub.add_parser("converge", help="s-value table over set sizes and grids")
    _add_state_flags(p)
    p.add_argument("--measurement-counts", default="4,8,16,32")
    p.add_argument("--grid-levels", default="1,2,3")
    p.add_argument("--out", required=True, help="CSV path")
    p.set_defaults(func=cmd_converge)

    for sp in sub.choices.values():
        sp.add_argument("--seed", type=int, default=0, help="reserved for reproducibility")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValidationError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
