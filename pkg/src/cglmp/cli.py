"""Command-line entry point: ``cglmp <subcommand> [flags]``.

Every subcommand writes one artifact (to ``--out`` or standard output).
Floats are written in their shortest round-trip form, so identical inputs
and seeds give byte-identical files.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys

import numpy as np

from .degenerate import degenerate_min
from .eigensolver import default_tol, min_eig
from .exceptions import CGLMPError, ConvergenceError
from .inequality import DEFAULT_ENUMERATION_CAP, lr_min
from .kernel import kernel_matrix, maxent_value
from .quantum import make_schmidt_state, normalized_entropy
from .variational import optimize_full

logger = logging.getLogger("cglmp")

SLOW_D = 100_000
DEFAULT_GRID = list(range(2, 21)) + [50, 100, 500, 1_000, 10_000, 100_000, 1_000_000]


def fmt(value) -> str:
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(bool(value)).lower()
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    return str(value)


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _jsonable(obj.tolist())
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    return obj


def render_table(header, rows, fmt_name: str) -> str:
    if fmt_name == "json":
        records = [dict(zip(header, row)) for row in rows]
        return json.dumps(_jsonable(records), indent=2) + "\n"
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([fmt(x) for x in row])
    return buf.getvalue()


def render_record(record: dict, fmt_name: str) -> str:
    if fmt_name == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in record.items():
            cell = json.dumps(_jsonable(value)) if isinstance(value, (dict, list, tuple)) else fmt(value)
            writer.writerow([key, cell])
        return buf.getvalue()
    return json.dumps(_jsonable(record), indent=2) + "\n"


def emit(text: str, out: str | None) -> None:
    if out in (None, "-"):
        sys.stdout.write(text)
    else:
        with open(out, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def resolve_threads(threads: int | None) -> int:
    if threads is not None:
        return max(1, threads)
    env = os.environ.get("BKL_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parse_grid(text: str) -> list[int]:
    try:
        grid = [int(float(x)) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"bad grid {text!r}") from exc
    if not grid:
        raise argparse.ArgumentTypeError("empty grid")
    return grid


# --- subcommands -------------------------------------------------------------


def cmd_kernel(args):
    K = kernel_matrix(args.d)
    rows = [(k, float(t)) for k, t in enumerate(K.first_col)]
    emit(render_table(["k", "t_k"], rows, args.format or "csv"), args.out)


def _solve(d, method, tol, seed, max_iter=500):
    K = kernel_matrix(d)
    result = min_eig(K, method=method, tol=tol if tol is not None else default_tol(d), max_iter=max_iter, seed=seed)
    return result, normalized_entropy(make_schmidt_state(result.eigenvector))


def cmd_mineig(args):
    result, entropy = _solve(args.d, args.method, args.tol, args.seed, args.max_iter)
    record = {
        "d": args.d,
        "method": result.method,
        "eigenvalue": result.eigenvalue,
        "residual": result.residual,
        "iterations": result.iterations,
        "entropy_normalized": entropy,
    }
    if args.eigvec:
        rows = [(i, float(x)) for i, x in enumerate(result.eigenvector)]
        emit(render_table(["i", "lambda_i"], rows, "csv"), args.eigvec)
        record["eigenvector_path"] = args.eigvec
    emit(render_record(record, args.format or "json"), args.out)


def cmd_variational(args):
    result = optimize_full(
        args.d,
        restarts=args.restarts,
        seed=args.seed,
        tol=args.tol,
        max_iter=args.max_iter,
        threads=resolve_threads(args.threads),
    )
    emit(render_record(result.to_dict(include_trace=args.trace), args.format or "json"), args.out)


def cmd_degenerate(args):
    result = degenerate_min(
        args.d,
        args.bigd,
        mode=args.mode,
        samples=args.samples,
        seed=args.seed,
        regime=args.regime,
        refine_evals=args.refine_evals,
    )
    emit(render_record(result.to_dict(), args.format or "json"), args.out)


def cmd_lr_check(args):
    value, strategy = lr_min(args.d, cap=args.cap)
    n = args.d**4
    print(f"min={fmt(int(value) if value.is_integer() else value)} over {n} strategies; "
          f"first minimizer (a1,a2,b1,b2)={strategy.outcomes}")
    if args.out:
        record = {"d": args.d, "min_value": value, "n_strategies": n, "strategy": list(strategy.outcomes)}
        emit(render_record(record, args.format or "json"), args.out)


def cmd_scan(args):
    grid = args.grid if args.grid is not None else [d for d in DEFAULT_GRID if args.allow_slow or d <= SLOW_D]
    slow = [d for d in grid if d > SLOW_D]
    if slow and not args.allow_slow:
        raise CGLMPError(f"grid points {slow} exceed d={SLOW_D}; pass --allow-slow to run them")
    rows = []
    for d in grid:
        result, entropy = _solve(d, "auto", None, args.seed)
        maxent = maxent_value(d) if args.include_maxent else None
        logger.info("d=%d theta=%.12g", d, result.eigenvalue)
        rows.append((d, result.eigenvalue, maxent, entropy, result.residual, result.iterations))
    header = ["d", "min_eig", "maxent_value", "entropy_normalized", "residual", "iterations"]
    emit(render_table(header, rows, args.format or "csv"), args.out)


def cmd_optimal_state(args):
    result, _ = _solve(args.d, "auto", None, args.seed)
    rows = [(i, float(x)) for i, x in enumerate(result.eigenvector)]
    emit(render_table(["i", "lambda_i"], rows, args.format or "csv"), args.out)


def cmd_table1(args):
    threads = resolve_threads(args.threads)
    header = ["d", "min_value"] + [f"lambda_{i}" for i in range(args.dmax)]
    rows = []
    for d in range(2, args.dmax + 1):
        result = optimize_full(d, restarts=args.restarts, seed=args.seed, max_iter=args.max_iter, threads=threads)
        coeffs = [float(x) for x in result.state.coeffs]
        rows.append([d, result.value] + coeffs + [None] * (args.dmax - d))
    emit(render_table(header, rows, args.format or "csv"), args.out)


# --- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=42, help="random seed (default 42)")
    common.add_argument("--threads", type=int, default=None, help="worker threads (default: $BKL_THREADS or all cores)")
    common.add_argument("--out", default=None, help="output file (default: standard output)")
    common.add_argument("--format", choices=("csv", "json"), default=None, help="override the output format")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="cglmp", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("kernel", parents=[common], help="first column of the kernel matrix")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("mineig", parents=[common], help="minimal eigenpair of the kernel")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--method", choices=("auto", "dense", "lanczos"), default="auto")
    p.add_argument("--tol", type=float, default=None)
    p.add_argument("--max-iter", type=int, default=500)
    p.add_argument("--eigvec", default=None, help="also write the eigenvector as CSV i,lambda_i")
    p.set_defaults(func=cmd_mineig)

    p = sub.add_parser("variational", parents=[common], help="free optimization over states and measurements")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--max-iter", type=int, default=200_000)
    p.add_argument("--trace", action="store_true", help="include the convergence trace")
    p.set_defaults(func=cmd_variational)

    p = sub.add_parser("degenerate", parents=[common], help="degenerate measurements with d outcomes in dimension D")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--bigd", type=int, required=True)
    p.add_argument("--mode", choices=("exhaustive", "random"), default="exhaustive")
    p.add_argument("--samples", type=int, default=500)
    p.add_argument("--regime", choices=("contiguous", "general"), default="contiguous")
    p.add_argument("--refine-evals", type=int, default=2000)
    p.set_defaults(func=cmd_degenerate)

    p = sub.add_parser("lr-check", parents=[common], help="exhaustive local-realistic bound")
    p.add_argument("--d", type=int, required=True)
    p.add_argument("--cap", type=int, default=DEFAULT_ENUMERATION_CAP, help="largest d to enumerate")
    p.set_defaults(func=cmd_lr_check)

    p = sub.add_parser("scan", parents=[common], help="minimal eigenvalue and entropy over a grid of d")
    p.add_argument("--grid", type=parse_grid, default=None, help="comma-separated list of d")
    p.add_argument("--include-maxent", action="store_true")
    p.add_argument("--allow-slow", action="store_true", help=f"permit d > {SLOW_D}")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimal-state", parents=[common], help="Schmidt coefficients of the optimal state")
    p.add_argument("--d", type=int, required=True)
    p.set_defaults(func=cmd_optimal_state)

    p = sub.add_parser("table1", parents=[common], help="small-d optimum table by free optimization")
    p.add_argument("--dmax", type=int, default=5)
    p.add_argument("--restarts", type=int, default=8)
    p.add_argument("--max-iter", type=int, default=200_000)
    p.set_defaults(func=cmd_table1)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        args.func(args)
    except (CGLMPError, ConvergenceError, ValueError) as exc:
        print(f"cglmp {args.command}: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
