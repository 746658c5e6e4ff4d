"""Command-line front end.

    rydpol --study NAME --config FILE --grid min:max:count[:log] [--grid ...]
           [--out FILE.csv] [--threads N] [--tol key=value ...]
    rydpol self-test
"""
from __future__ import annotations

import argparse
import json
import math
import os
import sys
import time

import numpy as np

from . import __version__, _accel
from .params import CONFIG_ENV, load_config
from .studies import STUDIES, TOL_DEFAULTS, Context, GridSpec, UsageError, run


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (complex, np.complexfloating)):
        if v.imag == 0:
            return _fmt(float(v.real))
        return f"{v.real:.12g}{v.imag:+.12g}j"
    if isinstance(v, (float, np.floating)):
        return f"{float(v) + 0.0:.12g}"  # no "-0"
    return str(v)


def render_csv(table, header_meta):
    lines = [f"# {k}: {v}" for k, v in header_meta.items()]
    lines.append(",".join(table.columns + ["status"]))
    for row, st in zip(table.rows, table.status):
        lines.append(",".join(_fmt(v) for v in row) + "," + st.replace(",", ";"))
    return "\n".join(lines) + "\n"


def _parse_tol(items):
    tol = dict(TOL_DEFAULTS)
    for it in items or []:
        if "=" not in it:
            raise UsageError(f"bad --tol {it!r}; expected key=value")
        k, v = (t.strip() for t in it.split("=", 1))
        if k not in TOL_DEFAULTS:
            raise UsageError(f"unknown tolerance key {k!r}; known: {', '.join(TOL_DEFAULTS)}")
        try:
            tol[k] = float(v)
        except ValueError:
            raise UsageError(f"tolerance {k!r} needs a number, got {v!r}") from None
    return tol


def _parse_floats(text, what, n=None):
    try:
        vals = tuple(float(t) for t in text.split(","))
    except ValueError:
        raise UsageError(f"bad {what} {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what} needs {n} comma-separated numbers")
    return vals


def build_parser():
    ap = argparse.ArgumentParser(prog="rydpol", description="Rydberg polariton two-body studies.")
    ap.add_argument("--study", required=True, choices=sorted(STUDIES))
    ap.add_argument("--config", help=f"key=value parameter file (default: ${CONFIG_ENV})")
    ap.add_argument("--grid", action="append", default=[], help="min:max:count[:log], repeatable")
    ap.add_argument("--out", help="CSV output path; a JSON manifest is written next to it")
    ap.add_argument("--threads", type=int, default=1)
    ap.add_argument("--tol", action="append", default=[], metavar="KEY=VALUE",
                    help=f"solver settings: {', '.join(TOL_DEFAULTS)}")
    ap.add_argument("--branch", default="attractive", choices=["attractive", "repulsive", "both"])
    ap.add_argument("--strength", help="xi/lambda_bar value(s), comma separated")
    ap.add_argument("--regime", default="auto",
                    choices=["auto", "exact", "low-energy", "far-detuned"])
    ap.add_argument("--point", default="0,0", help="reduced (kappa,x) evaluation point")
    ap.add_argument("--version", action="version", version=f"rydpol {__version__}")
    return ap


def run_study(args) -> int:
    params = load_config(args.config)
    if args.threads < 1:
        raise UsageError("--threads must be >= 1")
    ctx = Context(
        params=params,
        grids=[GridSpec.parse(g) for g in args.grid],
        tol=_parse_tol(args.tol),
        threads=args.threads,
        branch=args.branch,
        strengths=_parse_floats(args.strength, "--strength") if args.strength else None,
        regime=args.regime,
        point=_parse_floats(args.point, "--point", 2),
    )
    table = run(args.study, ctx)
    meta = {
        "tool": f"rydpol {__version__}",
        "study": args.study,
        "params": " ".join(f"{k}={v!r}" for k, v in params.as_config().items()),
        "grids": " ".join(str(g) for g in ctx.grids),
        "tol": " ".join(f"{k}={v!r}" for k, v in sorted(ctx.tol.items())),
        "options": f"branch={ctx.branch} strength={args.strength} regime={ctx.regime} point={args.point}",
    }
    text = render_csv(table, meta)
    frac = table.failure_fraction
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
        manifest = {
            "tool": "rydpol",
            "version": __version__,
            "backend": _accel.backend_name(),
            "study": args.study,
            "params": params.as_config(),
            "grids": [vars(g) for g in ctx.grids],
            "tol": ctx.tol,
            "options": {"branch": ctx.branch, "strength": ctx.strengths, "regime": ctx.regime,
                        "point": ctx.point},
            "columns": table.columns,
            "rows": len(table.rows),
            "converged": [s == "ok" for s in table.status],
            "status": table.status,
            "failure_fraction": frac,
            "extra": _clean(table.meta),
            "created": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
        }
        with open(os.path.splitext(args.out)[0] + ".json", "w") as fh:
            json.dump(manifest, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)
    if frac > 0.05:
        print(f"rydpol: {frac:.0%} of grid points failed", file=sys.stderr)
        return 3
    return 0


def _clean(obj):
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, (np.floating, float)):
        v = float(obj)
        return v if math.isfinite(v) else str(v)
    if isinstance(obj, np.integer):
        return int(obj)
    return obj


def main(argv=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    if argv and argv[0] == "self-test":
        from .selftest import main as selftest_main
        return selftest_main(argv[1:])
    # let grids and points start with a minus sign: "--grid -1:1:5"
    fixed = []
    i = 0
    while i < len(argv):
        if argv[i] in ("--grid", "--point") and i + 1 < len(argv) and argv[i + 1].startswith("-"):
            fixed.append(f"{argv[i]}={argv[i + 1]}")
            i += 2
        else:
            fixed.append(argv[i])
            i += 1
    args = build_parser().parse_args(fixed)
    try:
        return run_study(args)
    except (ValueError, OSError) as exc:
        print(f"rydpol: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
