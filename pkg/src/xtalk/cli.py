"""``xtalk`` command line.

Exit codes: 0 ok, 2 bad input (parse error, bad grid, missing parameter),
3 singular capacitance matrix, 4 drive has zero weight on the target.
"""

from __future__ import annotations

import argparse
import sys
import warnings
from pathlib import Path

from .crosstalk import ZeroTargetWeight, log_grid, sweep, write_sweep_csv
from .netlist import (
    Coupling,
    NetlistError,
    build_direct_coupled,
    build_floating_bus,
    build_grounded_bus,
    parse,
    parse_value,
    render,
)
from .quantize import FloatingSubcircuitError, quantize
from .ratmat import RationalError
from .report import build_report, to_json, to_text
from .topology import TopologyMismatch

EXIT_OK, EXIT_INPUT, EXIT_SINGULAR, EXIT_ZERO_TARGET = 0, 2, 3, 4


class UsageError(Exception):
    pass


def _value(text: str):
    try:
        return parse_value(text)
    except (RationalError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact number: {text!r}") from None


def _analysis_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("json", "text"), default="text")
    p.add_argument("--target", help="coordinate label used as the ratio denominator")
    p.add_argument("--check-asymptotic", action="store_true",
                   help="compare C_r with the weak-coupling form for its topology")
    p.add_argument("--z-ratio", type=float, default=None,
                   help="Z_target/Z_victim for qubits with different L, C (adds corrected dB)")


def make_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="xtalk", description="Free-mode crosstalk in floating qubit circuits.")
    sub = ap.add_subparsers(dest="cmd", required=True)

    a = sub.add_parser("analyze", help="analyze a netlist file")
    a.add_argument("file")
    _analysis_flags(a)

    s = sub.add_parser("sweep", help="layout crosstalk versus capacitance ratio, as CSV")
    s.add_argument("--layout", choices=[c.value for c in Coupling], required=True)
    s.add_argument("--lambda", dest="lambdas", default="1",
                   help="comma-separated island asymmetry ratios (>= 1)")
    s.add_argument("--r-min", type=float, default=1e-3)
    s.add_argument("--r-max", type=float, default=10.0)
    s.add_argument("--points", type=int, default=200)
    s.add_argument("--out", default="-", help="CSV path, '-' for stdout")

    b = sub.add_parser("builtin", help="canonical circuits: emit or analyze")
    b.add_argument("name", choices=("direct", "grounded-bus", "floating-bus"))
    for flag in ("Cd", "Cq", "Cg", "Cc1", "Cc2", "Cc", "Ct", "Cb"):
        b.add_argument(f"--{flag}", type=_value, default=None, metavar="fF")
    b.add_argument("--lambda", dest="lam", type=_value, default=None,
                   help="island asymmetry: the second island of each qubit gets lambda*Cg")
    b.add_argument("--emit", metavar="PATH", help="write the netlist instead of analyzing it")
    _analysis_flags(b)
    return ap


def _need(args, *names):
    missing = [f"--{n}" for n in names if getattr(args, n) is None]
    if missing:
        raise UsageError(f"{args.name} requires {', '.join(missing)}")


def builtin_netlist(args):
    lam = args.lam if args.lam is not None else 1
    if lam <= 0:
        raise UsageError("--lambda must be positive")
    _need(args, "Cd", "Cq", "Cg")
    islands = {"C_g1": args.Cg, "C_g2": lam * args.Cg, "C_g3": args.Cg, "C_g4": lam * args.Cg}
    try:
        if args.name == "direct":
            if args.Cc1 is None and args.Cc2 is None:
                raise UsageError("direct requires --Cc1 and/or --Cc2")
            return build_direct_coupled(args.Cd, args.Cq, C_c1=args.Cc1 or 0, C_c2=args.Cc2 or 0, **islands)
        if args.name == "grounded-bus":
            _need(args, "Cc", "Ct")
            return build_grounded_bus(args.Cd, args.Cq, C_c1=args.Cc, C_t=args.Ct, **islands)
        _need(args, "Cc", "Ct", "Cb")
        return build_floating_bus(args.Cd, args.Cq, C_c1=args.Cc, C_t=args.Ct, C_b1=args.Cb, **islands)
    except NetlistError as exc:
        raise UsageError(str(exc)) from None


def analyze(netlist, args, source, out) -> int:
    rs = quantize(netlist)
    rep = build_report(netlist, rs, source=source, target=args.target,
                       check_asymptotic=args.check_asymptotic, z_ratio=args.z_ratio)
    out.write(to_json(rep) if args.format == "json" else to_text(rep))
    return EXIT_OK


def cmd_analyze(args, out) -> int:
    try:
        text = Path(args.file).read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {args.file}: {exc.strerror}") from None
    try:
        n = parse(text)
    except NetlistError as exc:
        if exc.line is not None:
            raise UsageError(f"{args.file}:{exc.line}:{exc.column}: {exc.message}") from None
        raise UsageError(f"{args.file}: {exc.message}") from None
    return analyze(n, args, args.file, out)


def cmd_builtin(args, out) -> int:
    n = builtin_netlist(args)
    if args.emit:
        Path(args.emit).write_text(render(n), encoding="utf-8")
        return EXIT_OK
    return analyze(n, args, None, out)


def cmd_sweep(args, out) -> int:
    try:
        lambdas = [parse_value(x.strip()) for x in args.lambdas.split(",") if x.strip()]
    except (RationalError, ZeroDivisionError):
        raise UsageError(f"bad --lambda list {args.lambdas!r}") from None
    if not lambdas or any(x < 1 for x in lambdas):
        raise UsageError("--lambda values must be >= 1")
    try:
        grid = log_grid(args.r_min, args.r_max, args.points)
    except ValueError as exc:
        raise UsageError(f"invalid grid: {exc}") from None
    try:
        rows = sweep(args.layout, lambdas, grid)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.out == "-":
        write_sweep_csv(rows, out)
    else:
        with open(args.out, "w", newline="", encoding="utf-8") as fh:
            write_sweep_csv(rows, fh)
    return EXIT_OK


def main(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = make_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    handler = {"analyze": cmd_analyze, "sweep": cmd_sweep, "builtin": cmd_builtin}[args.cmd]
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            code = handler(args, out)
        for w in caught:
            err.write(f"warning: {w.message}\n")
        return code
    except UsageError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_INPUT
    except FloatingSubcircuitError as exc:
        err.write(f"error: {exc}\n")
        return EXIT_SINGULAR
    except ZeroTargetWeight as exc:
        err.write(f"error: {exc}\n")
        return EXIT_ZERO_TARGET
    except (KeyError, TopologyMismatch, ValueError) as exc:
        msg = exc.args[0] if isinstance(exc, KeyError) and exc.args else exc
        err.write(f"error: {msg}\n")
        return EXIT_INPUT


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
