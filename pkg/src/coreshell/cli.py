"""Command-line front end.

Subcommands: ``dn``, ``forward-fd``, ``invert``, ``camouflage``, ``sweep``,
``reproduce`` and the debugging helper ``specfun``.

Exit codes: 0 ok, 2 bad input, 3 inversion failure, 4 no camouflage root,
1 anything else. Errors go to stderr as a single ``error[<code>]: <message>``
line.
"""

import argparse
import json
import math
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor

from . import reference
from .camouflage import camouflage_record, find_sigma2_all, make_pair, verify_pair
from .dnmap import PotentialProfile, dn_multiplier, shell_coefficients
from .errors import (
    ConvergenceError,
    CoreShellError,
    DiscrepancyError,
    DomainError,
    NoRootError,
    ReconstructionError,
)
from .fdsolver import INTERFACE_SCHEMES, solve_fd
from .inverse import (
    DEFAULT_DR,
    TAU,
    ensemble_median_error,
    experiment_record,
    reconstruct,
    run_ensemble,
)
from .specfun import evaluate

EXIT_OK = 0
EXIT_BAD_INPUT = 2
EXIT_INVERSION = 3
EXIT_NO_ROOT = 4
MAX_SWEEP_POINTS = 10 ** 7


class UsageError(CoreShellError):
    code = "bad-input"


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _g(x):
    return f"{x:.6g}"


def _finite_or_none(obj):
    # strict JSON has no inf/nan; failed runs are already counted separately
    if isinstance(obj, float):
        return obj if math.isfinite(obj) else None
    if isinstance(obj, dict):
        return {k: _finite_or_none(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite_or_none(v) for v in obj]
    return obj


def _dump_json(obj):
    return json.dumps(_finite_or_none(obj), indent=2, allow_nan=False) + "\n"


def _csv(header, rows):
    lines = [",".join(header)]
    lines.extend(",".join(repr(v) if isinstance(v, float) else str(v) for v in row) for row in rows)
    return "\n".join(lines) + "\n"


def _table(header, rows):
    cells = [[str(h) for h in header]]
    cells += [[_g(v) if isinstance(v, float) else str(v) for v in row] for row in rows]
    widths = [max(len(r[k]) for r in cells) for k in range(len(header))]
    return "\n".join("  ".join(c.rjust(w) for c, w in zip(r, widths)) for r in cells) + "\n"


def _fmt(args):
    if getattr(args, "json", False):
        return "json"
    if getattr(args, "csv", False):
        return "csv"
    return args.format


def _profile(args, r="r1", s="sigma1"):
    for name in (r, s):
        if getattr(args, name, None) is None:
            raise DomainError(f"--{name} is required")
    return PotentialProfile(getattr(args, r), getattr(args, s))


def _n_from(args, *radii):
    if args.n is not None and args.dr is not None:
        raise DomainError("give either --n or --dr, not both")
    if args.n is not None:
        n = args.n
    elif args.dr is not None:
        if not args.dr > 0:
            raise DomainError(f"--dr must be > 0, got {args.dr}")
        n = round(1.0 / args.dr)
        if abs(n * args.dr - 1.0) > 1e-9:
            raise DomainError(f"1/dr must be an integer, got dr = {args.dr}")
    else:
        raise DomainError("one of --n or --dr is required")
    for r in radii:
        if abs(r * n - round(r * n)) > 1e-9:
            raise DomainError(f"r = {r} is not on the grid for N = {n} (r*N = {r * n!r})")
    return int(n)


def _int_list(text):
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _float_pair(text):
    try:
        lo, hi = (float(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected LO,HI, got {text!r}")
    return lo, hi


def _grid_spec(text):
    """``value`` or ``start:stop:count``."""
    parts = text.split(":")
    try:
        if len(parts) == 1:
            return (float(parts[0]), float(parts[0]), 1)
        if len(parts) == 3:
            return (float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected a number or START:STOP:COUNT, got {text!r}")


# --- subcommands -------------------------------------------------------------


def cmd_dn(args):
    p = _profile(args)
    lam = dn_multiplier(p).value
    c = shell_coefficients(args.f, p)
    rec = {"r1": p.r1, "sigma1": p.sigma1, "f": args.f, "lambda": lam,
           "g": lam * args.f, "rho": c.rho, "a0": c.a0, "a1": c.a1, "b1": c.b1}
    fmt = _fmt(args)
    if fmt == "json":
        return _dump_json(rec)
    if fmt == "csv":
        return _csv(list(rec), [list(rec.values())])
    return _table(["quantity", "value"], [[k, float(v)] for k, v in rec.items()])


def cmd_forward_fd(args):
    p = _profile(args)
    n = _n_from(args, p.r1)
    sol = solve_fd(args.f, p, n, pin_center=args.pin_center, interface=args.interface)
    fmt = _fmt(args)
    if fmt == "csv":
        return sol.to_csv()
    rec = {"r1": p.r1, "sigma1": p.sigma1, "f": args.f, "N": n, "dr": sol.grid.step,
           "g": sol.neumann, "psi0": float(sol.values[0]), "lambda_analytic": dn_multiplier(p).value}
    if fmt == "json":
        return _dump_json(rec)
    return _table(["quantity", "value"], [[k, v if isinstance(v, int) else float(v)] for k, v in rec.items()])


def _seed_list(args):
    k = args.seeds if args.seeds is not None else 1
    if k < 1:
        raise DomainError(f"--seeds must be >= 1, got {k}")
    if not 0 <= args.seed < 2 ** 64:
        raise DomainError(f"--seed must be an unsigned 64-bit integer, got {args.seed}")
    return list(range(args.seed, args.seed + k))


def _summary(records, delta):
    ok = [r for r in records if r.get("error") is None]
    med = lambda key: statistics.median(r[key] for r in ok) if ok else math.nan
    return {
        "delta": delta,
        "runs": len(records),
        "failures": len(records) - len(ok),
        "median_alpha": med("alpha"),
        "median_sigma_est": med("sigma_est"),
        "median_eps_abs": ensemble_median_error(records),
    }


def cmd_invert(args):
    p = _profile(args)
    if args.delta is None or not args.delta >= 0:
        raise DomainError(f"--delta must be >= 0, got {args.delta}")
    if args.tau < 1.0:
        raise DomainError(f"--tau must be >= 1, got {args.tau}")
    if args.alpha is not None and not args.alpha > 0:
        raise DomainError(f"--alpha must be > 0, got {args.alpha}")
    seeds = _seed_list(args)
    kwargs = {"dr": args.dr or DEFAULT_DR, "tau": args.tau, "alpha": args.alpha}
    fmt = _fmt(args)
    if len(seeds) == 1:
        result = reconstruct(p, args.f, args.delta, seeds[0], **kwargs)
        rec = experiment_record(p, args.delta, seeds[0], result=result)
        rec["gradient"] = result.gradient
        if fmt == "json":
            return _dump_json(rec)
        if fmt == "csv":
            return _csv(list(rec), [list(rec.values())])
        return _table(["delta", "alpha", "sigma_est", "eps_abs"],
                      [[float(args.delta), result.alpha, result.sigma_est, result.eps_abs]])
    records = run_ensemble(p, args.f, args.delta, seeds, jobs=args.jobs, **kwargs)
    summary = _summary(records, args.delta)
    if summary["failures"] == len(records):
        raise ReconstructionError("ensemble", records[0].get("error"))
    if fmt == "json":
        return _dump_json({"summary": summary, "records": records})
    if fmt == "csv":
        header = list(experiment_record(p, 0.0, 0)) + ["error"]
        return _csv(header, [[r.get(k, "") if r.get(k) is not None else "" for k in header] for r in records])
    return _table(["delta", "median_alpha", "median_sigma_est", "median_eps_abs", "failures"],
                  [[float(args.delta), summary["median_alpha"], summary["median_sigma_est"],
                    summary["median_eps_abs"], f"{summary['failures']}/{summary['runs']}"]])


def cmd_camouflage(args):
    p = _profile(args)
    if args.r2 is None:
        raise DomainError("--r2 is required")
    PotentialProfile(args.r2, 1.0)
    fd_n = args.fd_check or []
    for n in fd_n:
        _n_from(argparse.Namespace(n=n, dr=None), p.r1, args.r2)
    roots = find_sigma2_all(p.r1, p.sigma1, args.r2, bracket=args.bracket)
    reports = []
    for s2 in roots:
        pair = make_pair(p.r1, p.sigma1, args.r2, s2)
        _, fd = verify_pair(pair, args.f, fd_n)
        reports.append(camouflage_record(pair, dict(zip(fd_n, fd))))
    fmt = _fmt(args)
    if fmt == "json":
        return _dump_json(reports[0] if len(reports) == 1 else reports)
    rows = [[r["r1"], r["sigma1"], r["r2"], r["sigma2"], r["det_residual"], r["dn_residual"]] for r in reports]
    header = ["r1", "sigma1", "r2", "sigma2", "det_residual", "dn_residual"]
    if fmt == "csv":
        out = _csv(header, rows)
        if fd_n:
            out += _csv(["sigma2", "N", "eps_abs"],
                        [[r["sigma2"], n, r["fd_residuals_by_N"][str(n)]] for r in reports for n in fd_n])
        return out
    out = _table(header, rows)
    if fd_n:
        out += "\n" + _table(["sigma2", "N", "eps_abs_fd"],
                             [[r["sigma2"], n, r["fd_residuals_by_N"][str(n)]] for r in reports for n in fd_n])
    return out


def _axis(spec, name, log):
    import numpy as np

    start, stop, count = spec
    if count < 1:
        raise DomainError(f"{name} grid needs count >= 1, got {count}")
    if count == 1:
        return [start]
    if log:
        if start <= 0 or stop <= 0:
            raise DomainError(f"log-spaced {name} grid needs positive bounds")
        return np.logspace(math.log10(start), math.log10(stop), count).tolist()
    return np.linspace(start, stop, count).tolist()


def _sweep_row(point):
    r1, s1 = point
    return r1, s1, dn_multiplier(PotentialProfile(r1, s1)).value


def cmd_sweep(args):
    if args.r1 is None or args.sigma1 is None:
        raise DomainError("--r1 and --sigma1 grids are required")
    total = args.r1[2] * args.sigma1[2]
    if total > MAX_SWEEP_POINTS:
        raise DomainError(f"sweep grid has {total} points, limit is {MAX_SWEEP_POINTS}")
    r_axis = _axis(args.r1, "r1", False)
    s_axis = _axis(args.sigma1, "sigma1", args.log_sigma)
    points = [(r, s) for r in r_axis for s in s_axis]
    for r, s in (points[0], points[-1]):
        PotentialProfile(r, s)
    for r in r_axis:
        PotentialProfile(r, 1.0)
    for s in s_axis:
        PotentialProfile(0.5, s)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            rows = list(pool.map(_sweep_row, points, chunksize=max(1, len(points) // (4 * args.jobs))))
    else:
        rows = [_sweep_row(pt) for pt in points]
    if _fmt(args) == "json":
        return _dump_json([{"r1": r, "sigma1": s, "lambda": lam} for r, s, lam in rows])
    return _csv(["r1", "sigma1", "lambda"], rows)


def _reproduce_deterministic(table_id, args):
    t = reference.TABLES[table_id]
    r1, s1 = t["p"]
    roots = find_sigma2_all(r1, s1, t["r2"])
    s2 = min(roots, key=lambda s: abs(s - t["sigma2"]))
    p = PotentialProfile(r1, s1)
    q = PotentialProfile(t["r2"], s2)
    rows = []
    for n, ref_p, ref_q, ref_e in t["rows"]:
        gp = solve_fd(args.f, p, n).neumann
        gq = solve_fd(args.f, q, n).neumann
        rows.append([n, gp, gq, abs(gp - gq), ref_p, ref_q, ref_e])
    header = ["N", "Lambda_p", "Lambda_q", "eps_abs", "ref_Lambda_p", "ref_Lambda_q", "ref_eps_abs"]
    fmt = _fmt(args)
    if fmt == "json":
        return _dump_json({"table": table_id, "r1": r1, "sigma1": s1, "r2": t["r2"], "sigma2": s2,
                           "rows": [dict(zip(header, row)) for row in rows]})
    if fmt == "csv":
        return _csv(header, rows)
    head = f"# Table {table_id}: r1={_g(r1)} sigma1={_g(s1)}  r2={_g(t['r2'])} sigma2={_g(s2)}\n"
    return head + _table(header, rows)


def _reproduce_stochastic(table_id, args):
    t = reference.TABLES[table_id]
    p = PotentialProfile(*t["profile"])
    seeds = list(range(args.seed, args.seed + (args.seeds or 100)))
    rows = []
    summaries = []
    for delta, ref_alpha, ref_sigma, ref_eps in t["rows"]:
        records = run_ensemble(p, args.f, delta, seeds, jobs=args.jobs, dr=args.dr or DEFAULT_DR)
        s = _summary(records, delta)
        summaries.append(s)
        rows.append([delta, s["median_alpha"], s["median_sigma_est"], s["median_eps_abs"],
                     f"{s['failures']}/{s['runs']}", ref_alpha, ref_sigma, ref_eps])
    header = ["delta", "median_alpha", "median_sigma_est", "median_eps_abs", "failures",
              "ref_alpha", "ref_sigma_est", "ref_eps_abs"]
    fmt = _fmt(args)
    if fmt == "json":
        return _dump_json({"table": table_id, "r1": p.r1, "sigma_true": p.sigma1,
                           "seeds": [seeds[0], seeds[-1]], "rows": summaries})
    if fmt == "csv":
        return _csv(header, rows)
    head = (f"# Table {table_id}: r1={_g(p.r1)} sigma1={_g(p.sigma1)}, "
            f"{len(seeds)} seeds from {seeds[0]}\n")
    return head + _table(header, rows)


def cmd_reproduce(args):
    if args.table in (3, 4):
        return _reproduce_deterministic(args.table, args)
    return _reproduce_stochastic(args.table, args)


def cmd_specfun(args):
    out = []
    for x in args.x:
        e = evaluate(args.name, x)
        out.append(f"{args.name}({x!r}) = {e.value!r} +/- {e.estimated_abs_error:.2e}")
    return "\n".join(out) + "\n"


# --- parser ------------------------------------------------------------------


def _common(p, formats=("table", "json", "csv")):
    p.add_argument("--config", help="flat key = value file; flags override it")
    p.add_argument("--format", choices=formats, default="table")
    p.add_argument("--json", action="store_true", help="shorthand for --format json")
    if "csv" in formats:
        p.add_argument("--csv", action="store_true", help="shorthand for --format csv")
    p.add_argument("--out", help="write output to this file instead of stdout")
    p.add_argument("--f", type=float, default=1.0, help="boundary value (default 1)")


def build_parser():
    parser = _Parser(prog="coreshell", description=__doc__.split("\n\n")[0], allow_abbrev=False)
    sub = parser.add_subparsers(dest="command", metavar="COMMAND")
    sub.required = True

    p = sub.add_parser("dn", help="analytic DN multiplier and shell coefficients")
    _common(p)
    p.add_argument("--r1", type=float)
    p.add_argument("--sigma1", type=float)
    p.set_defaults(func=cmd_dn)

    p = sub.add_parser("forward-fd", help="finite-difference forward solve")
    _common(p)
    p.add_argument("--r1", type=float)
    p.add_argument("--sigma1", type=float)
    p.add_argument("--n", type=int)
    p.add_argument("--dr", type=float)
    p.add_argument("--pin-center", type=float, dest="pin_center",
                   help="fix psi(0) to this value instead of the regularity closure")
    p.add_argument("--interface", choices=INTERFACE_SCHEMES, default="one-sided")
    p.set_defaults(func=cmd_forward_fd)

    p = sub.add_parser("invert", help="Tikhonov reconstruction of sigma1")
    _common(p)
    p.add_argument("--r1", type=float)
    p.add_argument("--sigma1", type=float, help="true coefficient used to synthesise data")
    p.add_argument("--delta", type=float)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--seeds", type=int, help="run an ensemble of this many consecutive seeds")
    p.add_argument("--alpha", type=float, help="fixed alpha (default: discrepancy principle)")
    p.add_argument("--tau", type=float, default=TAU)
    p.add_argument("--dr", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_invert)

    p = sub.add_parser("camouflage", help="solve for sigma2 giving the same DN map")
    _common(p)
    p.add_argument("--r1", type=float)
    p.add_argument("--sigma1", type=float)
    p.add_argument("--r2", type=float)
    p.add_argument("--bracket", type=_float_pair, help="LO,HI search bracket for sigma2")
    p.add_argument("--fd-check", type=_int_list, dest="fd_check",
                   help="comma-separated N values for finite-difference comparison")
    p.set_defaults(func=cmd_camouflage)

    p = sub.add_parser("sweep", help="tabulate the DN multiplier over an (r1, sigma1) grid")
    _common(p, formats=("table", "json", "csv"))
    p.add_argument("--r1", type=_grid_spec, help="START:STOP:COUNT")
    p.add_argument("--sigma1", type=_grid_spec, help="START:STOP:COUNT")
    p.add_argument("--log-sigma", action="store_true", dest="log_sigma")
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("reproduce", help="regenerate one of the four published tables")
    _common(p)
    p.add_argument("table", type=int, choices=(1, 2, 3, 4))
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--seeds", type=int, default=100)
    p.add_argument("--dr", type=float)
    p.add_argument("--jobs", type=int, default=1)
    p.set_defaults(func=cmd_reproduce)

    p = sub.add_parser("specfun")
    p.add_argument("action", choices=("eval",))
    p.add_argument("name", choices=("i0", "i1", "k0", "k1"))
    p.add_argument("x", type=float, nargs="+")
    p.add_argument("--out")
    p.set_defaults(func=cmd_specfun, config=None)

    return parser


def read_config(path):
    """Parse a flat ``key = value`` file; ``#`` starts a comment."""
    values = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise DomainError(f"{path}:{lineno}: expected key = value")
            key, value = (s.strip() for s in line.split("=", 1))
            values[key.replace("-", "_")] = value
    return values


def _parse(argv):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "config", None):
        config = read_config(args.config)
        subparser = parser._subparsers._group_actions[0].choices[args.command]
        known = {a.dest: a for a in subparser._actions}
        unknown = sorted(set(config) - set(known))
        if unknown:
            raise DomainError(f"unknown config keys: {', '.join(unknown)}")
        defaults = {}
        for key, value in config.items():
            action = known[key]
            if action.nargs == 0:
                if value.lower() not in ("true", "false", "1", "0", "yes", "no"):
                    raise DomainError(f"config key {key} expects a boolean, got {value!r}")
                defaults[key] = value.lower() in ("true", "1", "yes")
            else:
                defaults[key] = value
        subparser.set_defaults(**defaults)
        args = parser.parse_args(argv)
    return args


def _exit_code(exc):
    if isinstance(exc, NoRootError):
        return EXIT_NO_ROOT
    if isinstance(exc, (ReconstructionError, ConvergenceError, DiscrepancyError)):
        return EXIT_INVERSION
    if isinstance(exc, (DomainError, UsageError, ValueError, OverflowError)):
        return EXIT_BAD_INPUT
    return 1


def main(argv=None):
    try:
        args = _parse(argv)
        text = args.func(args)
        if getattr(args, "out", None):
            with open(args.out, "w") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
        return EXIT_OK
    except CoreShellError as exc:
        msg = " ".join(str(exc).split())
        print(f"error[{exc.code}]: {msg}", file=sys.stderr)
        return _exit_code(exc)
    except OSError as exc:
        print(f"error[io]: {exc}", file=sys.stderr)
        return 1
    except Exception as exc:  # keep the one-line contract for anything unforeseen
        msg = " ".join(f"{type(exc).__name__}: {exc}".split())
        print(f"error[internal]: {msg}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
