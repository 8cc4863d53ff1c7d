"""Command line: ``qham verify``, ``qham sweep`` and ``qham module``."""
from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ProcessPoolExecutor

from . import report as rpt
from .hamming import HammingSpace, InvalidInstanceError, full_bipartite
from .qnum import QuadArithmeticError, parse_scalar
from .spectral import e1_difference_seed, generate_submodule, primary_seed
from .terwilliger import build_context

DEFAULT_CAP = 1024
CAP_ENV = "QHAM_CAP"

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _default_cap() -> int:
    raw = os.environ.get(CAP_ENV)
    if raw is None:
        return DEFAULT_CAP
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{CAP_ENV}={raw!r} is not an integer") from None


def _check_instance(D: int, n: int, cap: int) -> None:
    if D < 1:
        raise UsageError(f"--d must be >= 1, got {D}")
    if n < 3:
        raise UsageError(f"--n must be >= 3, got {n}")
    size = n ** D
    if size > cap:
        raise UsageError(f"instance size {size} exceeds cap {cap} (raise it with --cap)")


def _emit(doc: dict, out: str | None) -> None:
    text = json.dumps(doc, indent=2, ensure_ascii=False) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if sys.stderr.isatty():
        if "checks" in doc:
            sys.stderr.write(rpt.render_table(doc))
        elif "instances" in doc:
            for s in doc["instances"]:
                sys.stderr.write(f"H({s['D']},{s['n']})  {s['verdict']}\n")


def cmd_verify(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap()
    _check_instance(args.d, args.n, cap)
    try:
        suites = rpt.parse_suites(args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = rpt.run_verification(args.d, args.n, suites, timing=args.timing)
    _emit(doc, args.out)
    return EXIT_OK if doc["verdict"] == "pass" else EXIT_FAIL


def _sweep_one(job):
    D, n, suites = job
    return rpt.summarize(rpt.run_verification(D, n, suites))


def cmd_sweep(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap()
    if args.d_max < 1 or args.n_max < 3:
        raise UsageError("need --d-max >= 1 and --n-max >= 3")
    try:
        suites = rpt.parse_suites(args.suite)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    grid = [(D, n) for D in range(1, args.d_max + 1) for n in range(3, args.n_max + 1)]
    too_big = [f"H({D},{n})={n ** D}" for D, n in grid if n ** D > cap]
    if too_big:
        raise UsageError(f"grid exceeds cap {cap}: {', '.join(too_big)}")
    jobs = [(D, n, suites) for D, n in grid]
    if args.jobs > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            summaries = list(pool.map(_sweep_one, jobs))
    else:
        summaries = [_sweep_one(j) for j in jobs]
    passed = sum(1 for s in summaries if s["verdict"] == "pass")
    doc = {
        "schema": rpt.SCHEMA,
        "grid": {"d_max": args.d_max, "n_max": args.n_max, "suites": suites},
        "verdict": "pass" if passed == len(summaries) else "fail",
        "passed": passed,
        "total": len(summaries),
        "first_failure": next(({"D": s["D"], "n": s["n"]} for s in summaries if s["verdict"] != "pass"), None),
        "instances": summaries,
    }
    _emit(doc, args.out)
    return EXIT_OK if doc["verdict"] == "pass" else EXIT_FAIL


def parse_seed(text: str, ctx) -> dict:
    """``primary``, ``e1-diff`` or a sparse vector ``idx:val,idx:val``."""
    if text == "primary":
        return primary_seed(ctx)
    if text == "e1-diff":
        return e1_difference_seed(ctx)
    out = {}
    for part in text.split(","):
        if not part.strip():
            continue
        idx, sep, val = part.partition(":")
        if not sep:
            raise UsageError(f"seed entry {part!r} is not of the form idx:val")
        try:
            k = int(idx)
            value = parse_scalar(val, ctx.radicand)
        except (ValueError, QuadArithmeticError) as exc:
            raise UsageError(f"bad seed entry {part!r}: {exc}") from None
        if not 0 <= k < ctx.order:
            raise UsageError(f"seed index {k} outside 0..{ctx.order - 1}")
        out[k] = out.get(k, 0) + value
    out = {k: v for k, v in out.items() if v}
    if not out:
        raise UsageError("seed vector is zero")
    return out


def cmd_module(args) -> int:
    cap = args.cap if args.cap is not None else _default_cap()
    _check_instance(args.d, args.n, cap)
    ctx = build_context(full_bipartite(HammingSpace(args.d, args.n)))
    seed = parse_seed(args.seed, ctx)
    sub = generate_submodule(ctx, seed)
    doc = {
        "schema": rpt.SCHEMA,
        "instance": {"D": args.d, "n": args.n, "order": ctx.order, "radicand": ctx.radicand,
                     "scale": ctx.scale},
        "seed": args.seed,
        "module": sub.as_dict(),
    }
    _emit(doc, args.out)
    ok = not sub.thin or (sub.basis_check is not None and sub.basis_check.passed)
    return EXIT_OK if ok else EXIT_FAIL


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qham", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--cap", type=int, default=None,
                       help=f"largest n^D to accept (default {DEFAULT_CAP}, or ${CAP_ENV}); "
                            "exact products cost O((n^D)^3)")
        p.add_argument("--out", default=None, help="write the JSON report here instead of stdout")

    v = sub.add_parser("verify", help="verify one instance H(D, n)")
    v.add_argument("--d", type=int, required=True)
    v.add_argument("--n", type=int, required=True)
    v.add_argument("--suite", default="all", help=f"comma list from: all, {', '.join(rpt.SUITES)}")
    v.add_argument("--timing", action="store_true", help="include per-check wall times (ms)")
    common(v)
    v.set_defaults(func=cmd_verify)

    s = sub.add_parser("sweep", help="verify every D <= d-max, 3 <= n <= n-max")
    s.add_argument("--d-max", type=int, required=True)
    s.add_argument("--n-max", type=int, required=True)
    s.add_argument("--suite", default="all")
    s.add_argument("--jobs", type=int, default=1)
    common(s)
    s.set_defaults(func=cmd_sweep)

    m = sub.add_parser("module", help="close a seed vector under the algebra and describe it")
    m.add_argument("--d", type=int, required=True)
    m.add_argument("--n", type=int, required=True)
    m.add_argument("--seed", default="primary", help="primary | e1-diff | idx:val,idx:val,...")
    common(m)
    m.set_defaults(func=cmd_module)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, InvalidInstanceError) as exc:
        print(f"qham: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
