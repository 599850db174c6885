"""Command-line surface over the library.

Subcommands: allocate, solve, olos (solve|bounds|sweep|optimize), robust.
Results go to stdout as JSON (default) or CSV; diagnostics go to stderr.
JSON records carry a schema version, the resolved parameters, and wall
time, and print floats with their shortest round-trip representation.

Exit codes: 0 success, 2 usage or parse error, 3 degenerate input (all
bids zero), 4 convergence failure (best iterate still printed), 5 root
bracket failure.
"""

import argparse
import dataclasses
import json
import math
import os
import sys
import tempfile
import time

from .core import allocate
from .design import (
    RobustDomain,
    SweepSpec,
    optimize_p,
    robust_p,
    rows_to_csv,
    sweep,
)
from .equilibrium import revenue, solve_fixed_point, verify_nash
from .errors import AllZeroBids, BracketFailure, ConvergenceFailure, DomainError
from .olos import OlosInstance, foc_residuals, olos_equilibrium, revenue_bounds

SCHEMA_VERSION = 1

EXIT_USAGE = 2
EXIT_DEGENERATE = 3
EXIT_CONVERGENCE = 4
EXIT_BRACKET = 5


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    started = time.perf_counter()
    try:
        record = args.handler(args)
    except AllZeroBids as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except ConvergenceFailure as exc:
        if exc.best_bids is not None:
            record = _record(
                args,
                {
                    "bids": [float(b) for b in exc.best_bids],
                    "residual": exc.residual,
                    "iterations": exc.iterations,
                    "converged": False,
                },
                started,
            )
            _emit(record, args)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONVERGENCE
    except BracketFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BRACKET
    except (DomainError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if record is not None:
        record["timing_s"] = time.perf_counter() - started
        _emit(record, args)
    return 0


def _cmd_allocate(args):
    bids = _parse_floats(args.bids, "bids")
    shares = allocate(bids, args.p)
    return _record(
        args,
        {
            "allocations": [float(a) for a in shares],
            "revenue": revenue(bids, args.p),
        },
    )


def _cmd_solve(args):
    values = _parse_floats(args.values, "values")
    if len(values) < 2:
        raise DomainError("need at least two valuations")
    result = solve_fixed_point(
        values,
        args.p,
        tol=args.tol,
        max_iter=args.max_iter,
        damping=args.damping,
    )
    results = {
        "bids": [float(b) for b in result.bids],
        "revenue": result.revenue,
        "residual": result.residual,
        "iterations": result.iterations,
        "converged": True,
    }
    if args.verify:
        report = verify_nash(result.bids, values, args.p)
        results["nash"] = {
            "is_epsilon_nash": report.is_epsilon_nash,
            "epsilon": report.epsilon,
            "worst_deviator": report.worst_deviator,
            "worst_gain": report.worst_gain,
        }
    return _record(args, results)


def _cmd_olos_solve(args):
    inst = OlosInstance(args.n, args.alpha, args.p)
    eq = olos_equilibrium(inst)
    scale = args.scale
    foc1, foc2 = foc_residuals(eq, inst)
    return _record(
        args,
        {
            "z": eq.z,
            "b1": scale * eq.b1,
            "b2": scale * eq.b2,
            "w_aux": eq.w_aux,
            "revenue": scale * eq.revenue,
            "foc_residuals": [foc1, foc2],
        },
    )


def _cmd_olos_bounds(args):
    inst = OlosInstance(args.n, args.alpha, args.p)
    rb = revenue_bounds(inst)
    return _record(
        args,
        {"lower_bound": args.scale * rb.lower, "upper_bound": args.scale * rb.upper},
    )


def _cmd_olos_sweep(args):
    fixed = {"n": args.n, "alpha": args.alpha, "p": args.p}
    if fixed.get(args.vary) is not None:
        raise DomainError(f"--vary {args.vary} conflicts with a fixed --{args.vary}")
    fixed[args.vary] = None
    spec = SweepSpec(
        axis=args.vary,
        minimum=args.min,
        maximum=args.max,
        points=args.points,
        log=args.log,
        n=fixed["n"],
        alpha=fixed["alpha"],
        p=fixed["p"],
    )
    rows = sweep(spec)
    if args.scale != 1.0:
        rows = [_scale_row(row, args.scale) for row in rows]
    text = rows_to_csv(rows)
    if args.out:
        _atomic_write(args.out, text)
    else:
        sys.stdout.write(text)
    return None


def _scale_row(row, scale):
    if row.status != "ok":
        return row
    return dataclasses.replace(
        row,
        R=scale * row.R,
        b1=scale * row.b1,
        b2=scale * row.b2,
        lower_bound=scale * row.lower_bound,
        upper_bound=scale * row.upper_bound,
    )


def _cmd_olos_optimize(args):
    result = optimize_p(
        args.n,
        args.alpha,
        p_min=args.p_min,
        p_max=args.p_max,
        tol=args.tol,
        coarse_points=args.coarse_points,
    )
    results = {"p_star": result.p_star, "r_star": args.scale * result.r_star}
    if result.boundary is not None:
        results["boundary"] = result.boundary
    return _record(args, results)


def _cmd_robust(args):
    try:
        with open(args.domain, "r", encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise DomainError(f"domain file is not valid JSON: {exc}") from exc
    if args.p_min is not None:
        data.setdefault("p_grid", {})["min"] = args.p_min
    if args.p_max is not None:
        data.setdefault("p_grid", {})["max"] = args.p_max
    if args.points is not None:
        data.setdefault("p_grid", {})["points"] = args.points
    domain = RobustDomain.from_dict(data)
    result = robust_p(domain)
    return _record(
        args,
        {
            "p_tilde": result.p_tilde,
            "worst_case_R": result.worst_case_R,
            "argmin_instance": {"alpha": result.argmin_alpha, "n": result.argmin_n},
        },
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qprop",
        description="Winners-pay quasi-proportional auctions: equilibria, "
        "revenue bounds, and exponent design.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    alloc = sub.add_parser("allocate", help="allocation shares and revenue for a bid profile")
    alloc.add_argument("--bids", required=True, help="comma-separated bids")
    alloc.add_argument("--p", required=True, type=float, help="weight exponent")
    _add_format(alloc)
    alloc.set_defaults(handler=_cmd_allocate)

    solve = sub.add_parser("solve", help="equilibrium bids for a valuation profile")
    solve.add_argument("--values", required=True, help="comma-separated valuations")
    solve.add_argument("--p", required=True, type=float)
    solve.add_argument("--tol", type=float, default=1e-9)
    solve.add_argument("--max-iter", type=int, default=10_000)
    solve.add_argument("--damping", type=float, default=0.5)
    solve.add_argument("--verify", action="store_true", help="append a deviation-scan report")
    _add_format(solve)
    solve.set_defaults(handler=_cmd_solve)

    olos = sub.add_parser("olos", help="exact one-large-others-symmetric solver")
    olos_sub = olos.add_subparsers(dest="olos_command", required=True)

    osolve = olos_sub.add_parser("solve", help="bid ratio, bids, and revenue")
    _add_instance(osolve, with_p=True)
    _add_format(osolve)
    osolve.set_defaults(handler=_cmd_olos_solve)

    obounds = olos_sub.add_parser("bounds", help="revenue sandwich bounds")
    _add_instance(obounds, with_p=True)
    _add_format(obounds)
    obounds.set_defaults(handler=_cmd_olos_bounds)

    osweep = olos_sub.add_parser("sweep", help="CSV table over one varied parameter")
    osweep.add_argument("--vary", required=True, choices=("p", "alpha", "n"))
    osweep.add_argument("--n", type=int)
    osweep.add_argument("--alpha", type=float)
    osweep.add_argument("--p", type=float)
    osweep.add_argument("--min", required=True, type=float)
    osweep.add_argument("--max", required=True, type=float)
    osweep.add_argument("--points", required=True, type=int)
    osweep.add_argument("--log", action="store_true", help="log-spaced grid")
    osweep.add_argument("--out", help="write atomically to this path instead of stdout")
    osweep.add_argument("--scale", type=float, default=1.0,
                        help="multiply currency columns")
    osweep.set_defaults(handler=_cmd_olos_sweep)

    oopt = olos_sub.add_parser("optimize", help="revenue-maximizing exponent")
    _add_instance(oopt, with_p=False)
    oopt.add_argument("--p-min", type=float, default=0.05)
    oopt.add_argument("--p-max", type=float, default=50.0)
    oopt.add_argument("--tol", type=float, default=1e-6)
    oopt.add_argument("--coarse-points", type=int, default=64)
    _add_format(oopt)
    oopt.set_defaults(handler=_cmd_olos_optimize)

    robust = sub.add_parser("robust", help="maximin exponent over an uncertainty set")
    robust.add_argument("--domain", required=True, help="JSON file with alphas, ns, p_grid")
    robust.add_argument("--p-min", type=float)
    robust.add_argument("--p-max", type=float)
    robust.add_argument("--points", type=int)
    _add_format(robust)
    robust.set_defaults(handler=_cmd_robust)

    return parser


def _add_instance(sub, with_p: bool):
    sub.add_argument("--n", required=True, type=int, help="number of bidders")
    sub.add_argument("--alpha", required=True, type=float, help="large bidder's value")
    if with_p:
        sub.add_argument("--p", required=True, type=float, help="weight exponent")
    sub.add_argument(
        "--scale",
        type=float,
        default=1.0,
        help="multiply currency outputs (small-bidder value is normalized to 1)",
    )


def _add_format(sub):
    sub.add_argument("--format", choices=("json", "csv"), default="json")


def _record(args, results: dict, started=None) -> dict:
    skip = {"handler", "command", "olos_command", "format", "out"}
    params = {k: v for k, v in sorted(vars(args).items()) if k not in skip}
    command = args.command
    if getattr(args, "olos_command", None):
        command += " " + args.olos_command
    record = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": params,
        "results": results,
    }
    if started is not None:
        record["timing_s"] = time.perf_counter() - started
    return record


def _emit(record, args) -> None:
    if record is None:
        return
    _check_finite(record)
    if getattr(args, "format", "json") == "csv":
        for key, value in _flatten(record["results"]):
            print(f"{key},{value}")
    else:
        print(json.dumps(record))


def _flatten(results, prefix=""):
    for key, value in results.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            yield from _flatten(value, prefix=f"{name}.")
        elif isinstance(value, list):
            for i, item in enumerate(value):
                yield f"{name}_{i}", repr(float(item)) if isinstance(item, float) else item
        elif isinstance(value, float):
            yield name, repr(value)
        else:
            yield name, value


def _check_finite(node) -> None:
    if isinstance(node, dict):
        for value in node.values():
            _check_finite(value)
    elif isinstance(node, list):
        for value in node:
            _check_finite(value)
    elif isinstance(node, float) and not math.isfinite(node):
        raise DomainError("output contains a non-finite numeric field")


def _parse_floats(text: str, flag: str):
    try:
        return [float(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise DomainError(f"--{flag} must be a comma-separated list of reals") from exc


def _atomic_write(path: str, text: str) -> None:
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".qprop-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


if __name__ == "__main__":
    sys.exit(main())
