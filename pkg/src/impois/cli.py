"""Command-line front end: ``impois bounds | sweep | exact | oracle-check``.

Output is CSV by default, JSON with ``--format json``.
Exit codes: 0 success, 1 verification failure, 2 usage error,
3 tolerance or grid-cap error.
"""

from __future__ import annotations

import argparse
import io
import json
import math
import sys
from decimal import ROUND_HALF_EVEN, Decimal
from pathlib import Path

from . import oracle
from .errors import ImpoisError, ToleranceError
from .functions import parse_function
from .generator import RateInterval
from .imprecise_api import SetKind, lower_expectation, upper_expectation
from .pois_exact import poisson_expectation, transition_probability

EXIT_OK, EXIT_VERIFY, EXIT_USAGE, EXIT_TOLERANCE = 0, 1, 2, 3
BOUNDS_HEADER = "t,s,x,set,lower,upper,error_bound,steps,truncation_top"
SWEEP_HEADER = "t,lower_consistent,upper_consistent,lower_poisson,upper_poisson"

# engine checked by oracle-check; tests swap it for a corrupted one
oracle_engine = None


class UsageError(Exception):
    pass


def fmt(value: float) -> str:
    """Fixed 12 decimal places, round-half-even, no negative zero."""
    q = Decimal(repr(float(value))).quantize(Decimal("1e-12"), rounding=ROUND_HALF_EVEN)
    if q == 0:
        q = abs(q)
    return f"{q:f}"


def _emit(rows, fmt_name: str, target, out):
    """Write header-first ``rows`` as CSV or as a JSON list of records."""
    if fmt_name == "json":
        header = rows[0].split(",")
        records = [dict(zip(header, r.split(","))) for r in rows[1:]]
        text = json.dumps(records, indent=2) + "\n"
    else:
        text = "\n".join(rows) + "\n"
    if target:
        Path(target).write_text(text)
    else:
        out.write(text)


def _sets(choice: str):
    if choice == "both":
        return [SetKind.POISSON, SetKind.CONSISTENT]
    return [SetKind(choice)]


def _interval(lo, hi) -> RateInterval:
    return RateInterval(lo, hi)


def cmd_bounds(args, out) -> int:
    interval = _interval(args.lo, args.hi)
    f = parse_function(args.f)
    rows = [BOUNDS_HEADER]
    for kind in _sets(args.set):
        lo = lower_expectation(kind, interval, args.t, args.s, args.x, f, args.eps)
        up = upper_expectation(kind, interval, args.t, args.s, args.x, f, args.eps)
        tops = [v for v in (lo.truncation_top, up.truncation_top) if v is not None]
        rows.append(
            ",".join([
                f"{args.t:g}", f"{args.s:g}", str(args.x), kind.value,
                fmt(lo.lower), fmt(up.upper), fmt(max(lo.error_bound, up.error_bound)),
                str(max(lo.steps, up.steps)), str(max(tops)) if tops else "",
            ])
        )
    _emit(rows, args.format, args.out, out)
    return EXIT_OK


def _read_config(path) -> dict:
    conf = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        conf[key.strip().replace("-", "_")] = value.strip()
    return conf


_SWEEP_KEYS = {
    "lo": float, "hi": float, "x": int, "f": str, "start": float, "stop": float,
    "step": float, "times": str, "eps": float, "sets": str, "out": str, "format": str,
}


def sweep_times(start: float, stop: float, step: float):
    if not (step > 0) or start < 0 or stop < start:
        raise UsageError("sweep needs step > 0 and 0 <= start <= stop")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return [start + k * step for k in range(count)]


def _sweep_config(args) -> dict:
    conf = {k: None for k in _SWEEP_KEYS}
    if args.config:
        for key, value in _read_config(args.config).items():
            if key not in _SWEEP_KEYS:
                raise UsageError(f"unknown config key {key!r}")
            try:
                conf[key] = _SWEEP_KEYS[key](value)
            except ValueError as exc:
                raise UsageError(f"config key {key}: {exc}") from None
    for key in _SWEEP_KEYS:
        if getattr(args, key, None) is not None:
            conf[key] = getattr(args, key)
    for key in ("lo", "hi", "f"):
        if conf[key] is None:
            raise UsageError(f"sweep needs {key}")
    conf["x"] = 0 if conf["x"] is None else conf["x"]
    conf["eps"] = 1e-4 if conf["eps"] is None else conf["eps"]
    conf["sets"] = conf["sets"] or "both"
    conf["format"] = conf["format"] or "csv"
    if conf["format"] not in ("csv", "json"):
        raise UsageError(f"bad format value {conf['format']!r}")
    if conf["sets"] not in ("poisson", "consistent", "both"):
        raise UsageError(f"bad sets value {conf['sets']!r}")
    if conf["times"]:
        try:
            times = [float(v) for v in conf["times"].split(",") if v.strip()]
        except ValueError:
            raise UsageError(f"bad times list {conf['times']!r}") from None
        if any(t < 0 for t in times):
            raise UsageError("times must be non-negative")
        conf["times"] = sorted(times)
    else:
        if conf["start"] is None or conf["stop"] is None or conf["step"] is None:
            raise UsageError("sweep needs either times or start/stop/step")
        conf["times"] = sweep_times(conf["start"], conf["stop"], conf["step"])
    return conf


def cmd_sweep(args, out) -> int:
    conf = _sweep_config(args)
    interval = _interval(conf["lo"], conf["hi"])
    f = parse_function(conf["f"])
    kinds = _sets(conf["sets"])
    rows = [SWEEP_HEADER]
    for t in conf["times"]:
        cells = {}
        try:
            for kind in kinds:
                lo = lower_expectation(kind, interval, 0.0, t, conf["x"], f, conf["eps"])
                up = upper_expectation(kind, interval, 0.0, t, conf["x"], f, conf["eps"])
                cells[kind] = (fmt(lo.lower), fmt(up.upper))
        except ToleranceError as exc:
            raise ToleranceError(f"t={t:g}: {exc}", exc.achievable_eps) from exc
        cons = cells.get(SetKind.CONSISTENT, ("", ""))
        pois = cells.get(SetKind.POISSON, ("", ""))
        rows.append(",".join([f"{t:g}", *cons, *pois]))
    _emit(rows, conf["format"], conf["out"], out)
    return EXIT_OK


def cmd_exact(args, out) -> int:
    if args.y is not None:
        if args.dt is None:
            raise UsageError("exact with --y needs --dt")
        value = transition_probability(args.rate, args.dt, args.x, args.y)
    elif args.f is not None:
        if args.t is None or args.s is None:
            raise UsageError("exact with --f needs --t and --s")
        value = poisson_expectation(args.rate, args.t, args.s, args.x, parse_function(args.f), args.tol)
    else:
        raise UsageError("exact needs either --dt/--y or --t/--s/--f")
    out.write(fmt(value) + "\n")
    return EXIT_OK


def cmd_oracle_check(args, out) -> int:
    if args.cases < 0:
        raise UsageError("--cases must be non-negative")
    failures = oracle.run_oracle_check(args.cases, args.seed, engine=oracle_engine)
    for fail in failures:
        iv, grid, g = fail["interval"], fail["grid"], fail["g"]
        out.write(
            f"FAIL case={fail['case']} lo={iv.lower!r} hi={iv.upper!r} t={grid.start!r} "
            f"s={grid.end!r} steps={grid.steps} base={g.base} g={g.values.tolist()} gap={fail['gap']:.3e}\n"
        )
    out.write(f"cases={args.cases} failures={len(failures)} seed={args.seed}\n")
    return EXIT_VERIFY if failures else EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="impois", description="Bounds on expectations under an imprecise Poisson process."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    b = sub.add_parser("bounds", help="lower/upper expectation of f(X_s) given X_t = x")
    b.add_argument("--lo", type=float, required=True)
    b.add_argument("--hi", type=float, required=True)
    b.add_argument("--t", type=float, default=0.0)
    b.add_argument("--s", type=float, required=True)
    b.add_argument("--x", type=int, default=0)
    b.add_argument("--f", required=True, help="ind:k | indge:k | indle:k | id | poly:a,b,p | file:PATH")
    b.add_argument("--eps", type=float, default=1e-4)
    b.add_argument("--set", choices=["poisson", "consistent", "both"], default="both")
    b.add_argument("--format", choices=["csv", "json"], default="csv")
    b.add_argument("--out")
    b.set_defaults(func=cmd_bounds)

    sw = sub.add_parser("sweep", help="bounds on f(X_t) given X_0 = x over a range of t")
    sw.add_argument("--config", help="flat key=value file; flags override it")
    sw.add_argument("--lo", type=float)
    sw.add_argument("--hi", type=float)
    sw.add_argument("--x", type=int)
    sw.add_argument("--f")
    sw.add_argument("--start", type=float)
    sw.add_argument("--stop", type=float)
    sw.add_argument("--step", type=float)
    sw.add_argument("--times", help="comma-separated list, overrides start/stop/step")
    sw.add_argument("--eps", type=float)
    sw.add_argument("--sets", choices=["poisson", "consistent", "both"])
    sw.add_argument("--format", choices=["csv", "json"])
    sw.add_argument("--out")
    sw.set_defaults(func=cmd_sweep)

    e = sub.add_parser("exact", help="precise Poisson transition probability or expectation")
    e.add_argument("--rate", type=float, required=True)
    e.add_argument("--dt", type=float)
    e.add_argument("--x", type=int, default=0)
    e.add_argument("--y", type=int)
    e.add_argument("--t", type=float)
    e.add_argument("--s", type=float)
    e.add_argument("--f")
    e.add_argument("--tol", type=float, default=1e-13)
    e.set_defaults(func=cmd_exact)

    o = sub.add_parser("oracle-check", help="recursion vs brute-force enumeration")
    o.add_argument("--cases", type=int, default=100)
    o.add_argument("--seed", type=int, default=0)
    o.set_defaults(func=cmd_oracle_check)
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    buf = io.StringIO()
    try:
        code = args.func(args, buf)
    except ToleranceError as exc:
        print(f"impois: {exc}", file=sys.stderr)
        return EXIT_TOLERANCE
    except (UsageError, ImpoisError) as exc:
        print(f"impois: {exc}", file=sys.stderr)
        return EXIT_USAGE
    out.write(buf.getvalue())
    return code


def entry_point():
    sys.exit(main())
