"""Command-line front end.

Subcommands: ``advise``, ``constants``, ``bound``, ``interpolate``, ``sweep``
and ``verify-bound``. Exit codes: 0 success, 2 usage, 3 coverage or domain
error, 4 numerical failure.

Every subcommand accepts ``--config FILE``, a flat JSON object whose keys are
the flag names (dashes or underscores). Flags given on the command line win.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import math
import sys
from typing import List, Optional

import numpy as np

from . import advisor, bounds, constants, experiments, interpolator
from .bandlimited import l2_norm, spectral_density
from .exceptions import DomainError, MQShapeError, NumericalError
from .kernel import validate_spec
from .numerics import LogScalar, PrecisionPolicy

EXIT_OK, EXIT_USAGE, EXIT_DOMAIN, EXIT_NUMERICAL = 0, 2, 3, 4

logger = logging.getLogger("mqshape")


class UsageError(Exception):
    pass


def _ls(v: LogScalar) -> dict:
    return {"ln": None if v.sign == 0 else v.ln_mag, "value": v.format()}


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError("missing required option(s): "
                         + ", ".join("--" + m.replace("_", "-") for m in missing))


def _emit(obj, args) -> None:
    if getattr(args, "format", "json") == "text":
        _emit_text(obj)
    else:
        json.dump(obj, sys.stdout, indent=2, default=_json_default)
        sys.stdout.write("\n")


def _json_default(o):
    if isinstance(o, LogScalar):
        return _ls(o)
    if isinstance(o, (np.floating, np.integer)):
        return o.item()
    raise TypeError(type(o).__name__)


def _emit_text(obj, indent: str = "") -> None:
    if isinstance(obj, dict):
        width = max((len(str(k)) for k in obj), default=0)
        for k, v in obj.items():
            if isinstance(v, (dict, list)):
                print(f"{indent}{k}:")
                _emit_text(v, indent + "  ")
            else:
                print(f"{indent}{str(k).ljust(width)}  {v}")
    elif isinstance(obj, list):
        for item in obj:
            if isinstance(item, dict) and "label" in item:
                print(f"{indent}{item['label']:<22} {item.get('value')}")
            else:
                _emit_text(item, indent + "- ")
    else:
        print(f"{indent}{obj}")


# --- subcommands -------------------------------------------------------------------

def cmd_advise(args) -> int:
    _need(args, "mode", "n", "beta", "sigma", "delta")
    inp = advisor.AdvisorInputs(args.n, args.beta, args.sigma, args.delta, args.b0,
                                args.delta_very_small, args.c_cap)
    _emit(advisor.advise(args.mode, inp).to_dict(), args)
    return EXIT_OK


def cmd_constants(args) -> int:
    _need(args, "n")
    n = args.n
    out = {"n": n, "gamma": {str(k): constants.gamma_seq(k) for k in range(1, n + 1)}}
    if args.beta is not None:
        rho, d0, s = constants.rho_delta0(n, args.beta)
        out.update(beta=args.beta, m=constants.cpd_order(args.beta), rho=rho,
                   Delta0=_ls(d0), s=s)
        if args.b0 is not None and args.c is not None:
            tc = constants.theorem_constants(n, args.beta, args.b0, args.c)
            out["theorem"] = {
                "b0": args.b0, "c": _ls(tc.c), "C": _ls(tc.C),
                "ln_lambda": tc.ln_lambda, "delta0": _ls(tc.delta0),
                "regime": tc.regime,
                "c0": _ls(constants.crossover_c(n, args.beta, args.b0)),
            }
    _emit(out, args)
    return EXIT_OK


def _target(args) -> experiments.TargetSpec:
    return experiments.TargetSpec(args.target or "sinc",
                                  1.0 if args.sigma is None else args.sigma,
                                  args.seed or 0, args.k or 3)


def cmd_bound(args) -> int:
    _need(args, "eq", "n", "beta", "c")
    eq = args.eq
    if eq in ("6", "9", "12"):
        _need(args, "b0", "delta")
    if eq != "6":
        _need(args, "sigma")
    b0 = args.b0 if args.b0 is not None else 1.0
    delta = args.delta if args.delta is not None else b0 * math.sqrt(args.n)
    sigma = args.sigma if args.sigma is not None else 1.0
    setting = bounds.ProblemSetting(args.n, b0, sigma, delta)
    spec = validate_spec(args.beta, args.c)
    if eq == "6":
        _need(args, "fh")
        bd = bounds.native_error_bound(setting, spec, args.fh)
    elif eq in ("7", "8"):
        l2 = _l2(args)
        fn = bounds.norm_bound_pos_beta if eq == "7" else bounds.norm_bound_neg_beta
        bd = bounds.BoundBreakdown([("total", fn(setting, spec, l2))])
    elif eq == "9":
        bd = bounds.bandlimited_error_bound(setting, spec, _l2(args))
    else:
        if args.A is not None or args.B is not None:
            A, B = args.A or 0.0, args.B or 0.0
        else:
            fn = _target(args).build(1)
            terms = bounds.special_norm_terms(args.c, sigma, spectral_density(fn))
            A, B = terms.A, terms.B
        bd = bounds.special_error_bound(setting, args.c, A, B, prefactor=args.prefactor)
    out = {"eq": eq, **bd.to_dict()}
    if eq == "9" and args.beta > 0:
        out["chained_ratio"] = bounds.chained_ratio(setting, spec, _l2(args))
    _emit(out, args)
    return EXIT_OK


def _l2(args) -> float:
    if args.l2 is not None:
        return args.l2
    return l2_norm(_target(args).build(args.n))


def _read_table(path: str):
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise UsageError(f"{path}: empty file")
    header = [h.strip() for h in rows[0]]
    data = np.array([[float(v) for v in r] for r in rows[1:] if r], dtype=float)
    return header, data


def cmd_interpolate(args) -> int:
    _need(args, "centers", "beta", "c")
    header, data = _read_table(args.centers)
    xcols = [i for i, h in enumerate(header) if h.startswith("x")]
    n = len(xcols)
    pts = data[:, xcols]
    if "f" in header:
        values = data[:, header.index("f")]
    else:
        values = np.asarray(_target(args).build(n)(pts), dtype=float).reshape(-1)
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    b0 = args.b0 if args.b0 is not None else float(max(hi - lo)) or 1.0
    corner = lo if args.corner is None else np.full(n, args.corner)
    centers = interpolator.CenterSet(pts, corner, b0)
    policy = _policy(args)
    model = interpolator.solve_interpolant(validate_spec(args.beta, args.c), centers,
                                           values, policy)
    doc = model.to_dict()
    if args.out_model:
        with open(args.out_model, "w") as fh:
            json.dump(doc, fh, indent=2)
    else:
        _emit(doc, args)
    if args.eval:
        _, epts = _read_table(args.eval)
        epts = epts[:, :n]
        vals = model(epts)
        fh = open(args.out_eval, "w", newline="") if args.out_eval else sys.stdout
        try:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow([f"x{i + 1}" for i in range(n)] + ["s"])
            for p, v in zip(epts, np.atleast_1d(vals)):
                w.writerow([f"{t:.17g}" for t in p] + [f"{v:.17g}"])
        finally:
            if fh is not sys.stdout:
                fh.close()
    return EXIT_OK


def _policy(args) -> PrecisionPolicy:
    if getattr(args, "precision", None) == "extended":
        return PrecisionPolicy.extended(args.bits)
    return PrecisionPolicy.machine()


def cmd_sweep(args) -> int:
    _need(args, "n", "beta", "b0", "c_min", "c_max", "count")
    centers = None
    if args.centers_file:
        header, data = _read_table(args.centers_file)
        centers = data[:, [i for i, h in enumerate(header) if h.startswith("x")]]
    cfg = experiments.SweepConfig(
        n=args.n, beta=args.beta, b0=args.b0, c_min=args.c_min, c_max=args.c_max,
        count=args.count, target=_target(args),
        points_per_axis=args.points_per_axis or 9, centers=centers,
        eval_points=args.eval_points or 200, precision=_policy(args), corner=args.corner,
    )
    rows = experiments.run_sweep(cfg, workers=args.workers)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            experiments.write_sweep_csv(rows, fh)
    else:
        experiments.write_sweep_csv(rows, sys.stdout)
    return EXIT_OK


def cmd_verify_bound(args) -> int:
    _need(args, "n", "beta", "b0", "sigma", "points_per_axis")
    rep = experiments.verify_bound(args.n, args.beta, args.b0, args.sigma,
                                   args.points_per_axis, c=args.c, bits=args.bits,
                                   eval_points=args.eval_points or 1000,
                                   corner=args.corner)
    _emit(rep.to_dict(), args)
    if rep.verdict == "PRECONDITION_VIOLATED":
        print(f"precondition violated: delta={rep.delta:.6g} > delta0={rep.delta0.format(6)}",
              file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK if rep.passed else 1


# --- parser ------------------------------------------------------------------------

def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", help="flat JSON file of flag values")
    p.add_argument("--format", choices=("json", "text"), default="json")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="mqshape",
                                     description="Shape-parameter advice and error bounds "
                                                 "for generalized multiquadrics.")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("advise", help="recommend a shape parameter c")
    _common(p)
    p.add_argument("--mode", choices=advisor.MODES)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--delta", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--delta-very-small", type=float)
    p.add_argument("--c-cap", type=float)
    p.set_defaults(func=cmd_advise)

    p = sub.add_parser("constants", help="show gamma_n, rho, Delta0 and theorem constants")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--c", type=float)
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("bound", help="evaluate an error or norm bound factor by factor")
    _common(p)
    p.add_argument("--eq", choices=("6", "7", "8", "9", "12"))
    p.add_argument("--n", type=int)
    for name in ("beta", "sigma", "c", "b0", "delta", "l2", "fh", "A", "B"):
        p.add_argument(f"--{name}", type=float)
    p.add_argument("--prefactor", choices=("printed", "recombined"), default="printed")
    _target_flags(p)
    p.set_defaults(func=cmd_bound)

    p = sub.add_parser("interpolate", help="fit an interpolant from a centers CSV")
    _common(p)
    p.add_argument("--centers", help="CSV with columns x1..xn[,f]")
    p.add_argument("--beta", type=float)
    p.add_argument("--c", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--corner", type=float)
    p.add_argument("--eval", help="CSV of evaluation points")
    p.add_argument("--out-model")
    p.add_argument("--out-eval")
    _precision_flags(p)
    _target_flags(p)
    p.set_defaults(func=cmd_interpolate)

    p = sub.add_parser("sweep", help="error, conditioning and bound over a c grid (CSV)")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--c-min", type=float)
    p.add_argument("--c-max", type=float)
    p.add_argument("--count", type=int)
    p.add_argument("--points-per-axis", type=int)
    p.add_argument("--centers-file")
    p.add_argument("--eval-points", type=int)
    p.add_argument("--corner", type=float)
    p.add_argument("--workers", type=int)
    p.add_argument("--out")
    _precision_flags(p)
    _target_flags(p)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("verify-bound", help="check max |f - s| <= bound in extended precision")
    _common(p)
    p.add_argument("--n", type=int)
    p.add_argument("--beta", type=float)
    p.add_argument("--b0", type=float)
    p.add_argument("--sigma", type=float)
    p.add_argument("--points-per-axis", type=int)
    p.add_argument("--c", type=float)
    p.add_argument("--bits", type=int)
    p.add_argument("--eval-points", type=int)
    p.add_argument("--corner", type=float)
    p.set_defaults(func=cmd_verify_bound)
    return parser


def _target_flags(p) -> None:
    p.add_argument("--target", choices=("sinc", "mixture"))
    if not any(a.dest == "sigma" for a in p._actions):
        p.add_argument("--sigma", type=float)
    p.add_argument("--seed", type=int)
    p.add_argument("--k", type=int)


def _precision_flags(p) -> None:
    p.add_argument("--precision", choices=("machine", "extended"), default="machine")
    p.add_argument("--bits", type=int)


def _apply_config(parser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    with open(args.config) as fh:
        cfg = json.load(fh)
    if not isinstance(cfg, dict):
        raise UsageError("config file must hold a flat JSON object")
    flags = set(argv)
    for key, value in cfg.items():
        dest = key.replace("-", "_")
        if not hasattr(args, dest):
            raise UsageError(f"unknown config key {key!r}")
        if "--" + dest.replace("_", "-") not in flags and not any(
                f.startswith("--" + dest.replace("_", "-") + "=") for f in flags):
            setattr(args, dest, value)
    return args


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, OSError, json.JSONDecodeError) as exc:
        print(f"mqshape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"mqshape {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"mqshape: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except DomainError as exc:
        print(f"mqshape: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (NumericalError, MQShapeError) as exc:
        print(f"mqshape: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
