"""Command-line front end.

    mixedspin eval --j 1 --b 0 --t 1
    mixedspin sweep --preset fig1 -o fig1.csv
    mixedspin tc --j 1 --b 0
    mixedspin spectrum --j 1 --b 0.5
"""

from __future__ import annotations

import argparse
import logging
import sys
from dataclasses import replace

import numpy as np

from . import __version__, sweep
from .errors import MixedSpinError
from .model import (
    FINITE_T,
    T0_LIMIT,
    BASIS,
    CLOSED_FORM_MIN_COUPLING,
    ModelParams,
    closed_form_spectrum,
    numeric_spectrum,
)

log = logging.getLogger("mixedspin")


def _params(args, require_t=True) -> ModelParams:
    T = 0.0 if getattr(args, "t0", False) or not require_t else args.t
    return ModelParams(args.j, args.b, T, allow_negative_field=args.allow_negative_field)


def cmd_eval(args) -> int:
    if not args.t0 and args.t is None:
        raise SystemExit("eval: --t is required unless --t0 is given")
    p = _params(args)
    report = sweep.eval_point(p, T0_LIMIT if args.t0 else FINITE_T)
    width = max(len(k) for k in report.as_dict())
    for key, value in report.as_dict().items():
        text = value if isinstance(value, str) else format(value, ".12g")
        print(f"{key:<{width}} = {text}")
    return 0


def _build_spec(args) -> sweep.SweepSpec:
    base = sweep.get_preset(args.preset) if args.preset else None
    if args.spec:
        spec = sweep.load_spec_file(args.spec, base)
    elif base is not None:
        spec = base
    else:
        raise SystemExit("sweep: give --preset and/or --spec")
    if args.x_steps is not None:
        spec = replace(spec, x_axis=replace(spec.x_axis, steps=args.x_steps))
    if args.y_steps is not None:
        spec = replace(spec, y_axis=replace(spec.y_axis, steps=args.y_steps))
    quantities = None
    if args.quantities:
        quantities = tuple(q.strip() for q in args.quantities.split(",") if q.strip())
    return sweep.with_overrides(
        spec,
        quantities=quantities,
        t0_row=True if args.t0_row else None,
        raw=True if args.raw else None,
    )


def cmd_sweep(args) -> int:
    spec = _build_spec(args)
    result = sweep.run_sweep(spec, workers=args.threads)
    log.info("swept %d points (%s)", len(result.rows), result.metadata)
    if args.output in (None, "-"):
        sweep.emit_csv(result, sys.stdout)
    else:
        sweep.emit_csv(result, args.output)
    return 0


def cmd_tc(args) -> int:
    tc = sweep.find_critical_temperature(args.j, args.b, args.t_lo, args.t_hi, args.tol)
    if tc is None:
        print(f"T_c = not found in [{args.t_lo}, {args.t_hi}]")
    else:
        print(f"T_c = {tc:.12g}")
    return 0


def _vector_text(v) -> str:
    parts = []
    for amp, (x, y) in zip(v, BASIS):
        if abs(amp) > 1e-12:
            z = complex(amp)
            coeff = f"{z.real:+.10f}" if abs(z.imag) < 1e-12 else f"({z.real:+.10f}{z.imag:+.10f}j)"
            parts.append(f"{coeff}|{x},{y}>")
    return " ".join(parts)


def cmd_spectrum(args) -> int:
    p = _params(args, require_t=False)
    if abs(p.J) >= CLOSED_FORM_MIN_COUPLING:
        print("closed form:")
        for level in sorted(closed_form_spectrum(p).levels, key=lambda lv: lv.energy):
            print(f"  {level.label:<6} E = {level.energy:+.12f}  {_vector_text(level.vector)}")
    else:
        print(f"closed form: unavailable for |J| < {CLOSED_FORM_MIN_COUPLING}")
    print("numeric:")
    es = numeric_spectrum(p)
    for k, energy in enumerate(es.values):
        v = es.vectors[:, k]
        # fix the global phase so the largest component is real positive
        z = v[np.argmax(np.abs(v))]
        print(f"  {k:<6} E = {energy:+.12f}  {_vector_text(v * abs(z) / z)}")
    return 0


def _add_point_args(parser, with_t=True):
    parser.add_argument("--j", type=float, required=True, help="coupling J")
    parser.add_argument("--b", type=float, required=True, help="field B on the spin-1/2 site")
    if with_t:
        parser.add_argument("--t", type=float, help="temperature (k_B = 1)")
        parser.add_argument("--t0", action="store_true", help="zero-temperature limit")
    parser.add_argument("--allow-negative-field", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mixedspin", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval", help="correlation report at one point")
    _add_point_args(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("sweep", help="2-D parameter sweep to CSV")
    p.add_argument("--preset", choices=sorted(sweep.PRESETS))
    p.add_argument("--spec", help="sweep file (key = value lines)")
    p.add_argument("--x-steps", type=int)
    p.add_argument("--y-steps", type=int)
    p.add_argument("--quantities", help="comma-separated, e.g. negativity,mid")
    p.add_argument("--t0-row", action="store_true", help="add T = 0 ground-state rows")
    p.add_argument("--raw", action="store_true", help="add unclamped *_raw columns")
    p.add_argument("--threads", type=int, help="worker processes (default: all CPUs)")
    p.add_argument("-o", "--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("tc", help="critical temperature of the negativity")
    p.add_argument("--j", type=float, required=True)
    p.add_argument("--b", type=float, required=True)
    p.add_argument("--t-lo", type=float, default=0.05)
    p.add_argument("--t-hi", type=float, default=5.0)
    p.add_argument("--tol", type=float, default=1e-6)
    p.set_defaults(func=cmd_tc)

    p = sub.add_parser("spectrum", help="labeled energies and eigenvectors")
    _add_point_args(p, with_t=False)
    p.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except BrokenPipeError:
        # downstream closed early (e.g. piped into head)
        sys.stderr.close()
        return 0
    except (MixedSpinError, ValueError) as exc:
        print(f"mixedspin {args.command}: error: {exc}", file=sys.stderr)
        return 1
