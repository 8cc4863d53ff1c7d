"""Suite orchestration and the JSON report document."""
from __future__ import annotations

import time
from typing import Callable, Iterable

from . import hamming, spectral, terwilliger, tmodules
from .checks import CheckResult, IdentityViolation

SCHEMA = "qham-report/1"
SUITES = ("structure", "uniform", "tridiagonal", "entrywise", "spectrum", "qpoly", "modules", "audit")
PREREQUISITES = {
    "structure": (),
    "uniform": ("structure",),
    "tridiagonal": ("structure",),
    "entrywise": ("structure",),
    "spectrum": ("structure",),
    "qpoly": ("structure", "spectrum"),
    "modules": ("structure",),
    "audit": (),
}
# shape lengths beyond 3 get expensive on the larger instances
WALK_ORACLE_FULL_LENGTH_ORDER = 81

NOTES = [
    "eigenvalue multiplicity sums restrict r to admissible pairs (2r + d >= D), "
    "the only range on which mult(r, d) is defined",
    "odd-indexed eigenvalues sqrt(n-1)(D-i) are established for the full range 0 <= i <= 2D",
]


def parse_suites(text: str | Iterable[str]) -> list[str]:
    """Requested suites plus their prerequisites, in dependency order."""
    names = [s.strip() for s in text.split(",")] if isinstance(text, str) else list(text)
    names = [s for s in names if s]
    if not names or "all" in names:
        return list(SUITES)
    unknown = [s for s in names if s not in SUITES]
    if unknown:
        raise ValueError(f"unknown suite(s): {', '.join(unknown)}")
    wanted = set(names)
    for s in names:
        wanted.update(PREREQUISITES[s])
    return [s for s in SUITES if s in wanted]


class _Runner:
    def __init__(self, timing: bool) -> None:
        self.checks: list[dict] = []
        self.timing: dict[str, float] = {}
        self.want_timing = timing

    def run(self, suite: str, name: str, fn: Callable[[], CheckResult]) -> CheckResult:
        start = time.perf_counter()
        try:
            result = fn()
        except IdentityViolation as exc:
            result = CheckResult(name, False, {"identity": exc.identity, **exc.witness})
        except (ArithmeticError, ValueError) as exc:
            result = CheckResult(name, False, {"error": f"{type(exc).__name__}: {exc}"})
        if result.name != name:
            result = CheckResult(name, result.passed, result.witness, result.detail)
        self.timing[name] = round((time.perf_counter() - start) * 1000, 3)
        self.add(suite, result)
        return result

    def add(self, suite: str, result: CheckResult) -> None:
        entry = result.as_dict()
        entry["suite"] = suite
        self.checks.append(entry)

    def skip(self, suite: str, names: Iterable[str], reason: str) -> None:
        for name in names:
            self.checks.append({"name": name, "suite": suite, "verdict": "skipped",
                                "witness": None, "detail": {"reason": reason}})


SUITE_CHECKS = {
    "structure": ["hamming.distance_partition", "hamming.full_bipartite", "hamming.around_x",
                  "terwilliger.context", "terwilliger.dual_blocks"],
    "uniform": ["terwilliger.uniform"],
    "tridiagonal": ["terwilliger.tridiagonal"],
    "entrywise": ["terwilliger.entrywise", "terwilliger.walk_oracle"],
    "spectrum": ["spectral.distinct_eigenvalues", "spectral.idempotents_nonzero",
                 "spectral.orthogonal_idempotents", "spectral.resolution_of_identity",
                 "spectral.eigen_relation", "spectral.integral_traces", "spectral.multiplicity_total",
                 "spectral.symmetric_spectrum", "spectral.trace_moments", "spectral.float_oracle",
                 "spectral.multiplicity_sum"],
    "qpoly": ["spectral.scalar_factor", "spectral.zero_blocks", "spectral.ordering_even_first",
              "spectral.ordering_odd_first", "spectral.natural_order_control", "spectral.dual_generation"],
    "modules": ["tmodules.primary_module", "tmodules.krawtchouk", "tmodules.rep_spectrum"],
    "audit": ["tmodules.mult_forms", "tmodules.dimension_audit"],
}


def check_partition(space: hamming.HammingSpace) -> CheckResult:
    sizes = [len(c) for c in hamming.distance_partition(space)]
    ok = sizes == space.class_sizes() and sum(sizes) == space.order
    return CheckResult("hamming.distance_partition", ok, None if ok else {"sizes": sizes},
                       detail={"sizes": sizes})


def check_full_bipartite(g: hamming.FullBipartiteGraph) -> CheckResult:
    space = g.space
    D, n = space.D, space.n
    w = space.weights
    flat = sum(len(c) * i * (n - 2) for i, c in enumerate(hamming.distance_partition(space))) // 2
    total = space.order * D * (n - 1) // 2
    problems = {}
    if len(g.edges) != total - flat:
        problems["edges"] = [len(g.edges), total - flat]
    if any(abs(int(w[i]) - int(w[j])) != 1 for i, j in g.edges):
        problems["flat_or_long_edge"] = True
    if not g.is_connected():
        problems["connected"] = False
    if not g.is_bipartite():
        problems["bipartite"] = False
    if not (g.distances_from(space.base) == w).all():
        problems["geodesics"] = "graph distance from x differs from Hamming weight"
    if g.degree(space.base) != D * (n - 1):
        problems["base_degree"] = g.degree(space.base)
    return CheckResult("hamming.full_bipartite", not problems, problems or None,
                       detail={"edges": len(g.edges), "flat_removed": flat})


def check_around_x(g: hamming.FullBipartiteGraph) -> CheckResult:
    D, n = g.space.D, g.space.n
    res = hamming.intersection_numbers_around_x(g)
    if not res.ok:
        return CheckResult("hamming.around_x", False, res.witness)
    expected_b = tuple((D - i) * (n - 1) for i in range(D + 1))
    expected_c = tuple(range(D + 1))
    ok = res.a == (0,) * (D + 1) and res.b == expected_b and res.c == expected_c
    w = g.space.weights
    ok = ok and all(g.degree(y) == res.b[w[y]] + res.c[w[y]] for y in range(g.order))
    return CheckResult("hamming.around_x", ok, None if ok else {"a": res.a, "b": res.b, "c": res.c},
                       detail={"b": list(res.b), "c": list(res.c)})


def run_verification(D: int, n: int, suites: Iterable[str] = SUITES, timing: bool = False) -> dict:
    """Run the requested suites on H(D, n) and return the report document."""
    suites = parse_suites(list(suites))
    space = hamming.HammingSpace(D, n)
    scale, m = terwilliger.normalize_radicand(n - 1)
    runner = _Runner(timing)
    ctx = None
    sd = None
    blocks = None
    orderings = None
    failed_suites: set[str] = set()

    def blocked(suite: str) -> str | None:
        bad = [p for p in PREREQUISITES[suite] if p in failed_suites]
        return f"prerequisite suite failed: {', '.join(bad)}" if bad else None

    for suite in suites:
        reason = blocked(suite)
        if reason:
            runner.skip(suite, SUITE_CHECKS[suite], reason)
            failed_suites.add(suite)
            continue
        before = len(runner.checks)

        if suite == "structure":
            g = hamming.full_bipartite(space)
            runner.run(suite, "hamming.distance_partition", lambda: check_partition(space))
            runner.run(suite, "hamming.full_bipartite", lambda: check_full_bipartite(g))
            runner.run(suite, "hamming.around_x", lambda: check_around_x(g))
            holder = {}

            def build():
                holder["ctx"] = terwilliger.build_context(g)
                return CheckResult("terwilliger.context", True, detail={"order": g.order})

            res = runner.run(suite, "terwilliger.context", build)
            ctx = holder.get("ctx")
            if res:
                runner.run(suite, "terwilliger.dual_blocks", lambda: terwilliger.verify_dual_idempotent_block(ctx))
            else:
                runner.skip(suite, ["terwilliger.dual_blocks"], "context construction failed")

        elif suite == "uniform":
            runner.run(suite, "terwilliger.uniform", lambda: terwilliger.verify_uniform(ctx))

        elif suite == "tridiagonal":
            runner.run(suite, "terwilliger.tridiagonal", lambda: terwilliger.verify_tridiagonal(ctx))

        elif suite == "entrywise":
            length = 4 if ctx.order <= WALK_ORACLE_FULL_LENGTH_ORDER else 3
            runner.run(suite, "terwilliger.entrywise", lambda: terwilliger.verify_tridiagonal_entrywise(ctx))
            runner.run(suite, "terwilliger.walk_oracle",
                       lambda: terwilliger.verify_walk_oracle(ctx.graph, length, (ctx.L, ctx.F, ctx.R)))

        elif suite == "spectrum":
            start = time.perf_counter()
            sd = spectral.primitive_idempotents(ctx)
            elapsed = round((time.perf_counter() - start) * 1000, 3)
            for check in sd.checks:
                runner.add(suite, check)
                runner.timing[check.name] = elapsed
            runner.run(suite, "spectral.trace_moments", lambda: spectral.verify_trace_moments(ctx, sd))
            runner.run(suite, "spectral.float_oracle", lambda: spectral.float_spectrum_check(ctx, sd))

            def mult_sum():
                sums = tmodules.multiplicity_sums(D, n)
                ok = sums == sd.multiplicities
                return CheckResult("spectral.multiplicity_sum", ok,
                                   None if ok else {"sum_formula": sums, "trace": sd.multiplicities})

            runner.run(suite, "spectral.multiplicity_sum", mult_sum)

        elif suite == "qpoly":
            runner.run(suite, "spectral.scalar_factor", lambda: spectral.verify_scalar_factor(D, n))
            holder = {}

            def zero_blocks():
                holder["blocks"] = spectral.verify_zero_blocks(sd, ctx.Astar)
                return holder["blocks"].check

            runner.run(suite, "spectral.zero_blocks", zero_blocks)
            blocks = holder.get("blocks")
            orderings = spectral.verify_orderings(sd, ctx.Astar, blocks)
            runner.run(suite, "spectral.ordering_even_first", lambda: orderings["even_first"])
            runner.run(suite, "spectral.ordering_odd_first", lambda: orderings["odd_first"])
            runner.run(suite, "spectral.natural_order_control", lambda: orderings["natural"])
            runner.run(suite, "spectral.dual_generation", lambda: spectral.verify_dual_generation(ctx))

        elif suite == "modules":
            def primary():
                rep = spectral.generate_submodule(ctx, spectral.primary_seed(ctx))
                ok = (rep.thin and rep.endpoint == 0 and rep.diameter == D
                      and rep.basis_check is not None and rep.basis_check.passed)
                return CheckResult("tmodules.primary_module", ok, None if ok else rep.as_dict(),
                                   detail={"dimension": rep.dimension, "r": rep.endpoint, "d": rep.diameter})

            runner.run(suite, "tmodules.primary_module", primary)
            runner.run(suite, "tmodules.krawtchouk", lambda: tmodules.verify_krawtchouk(D, n))

            def rep_spectrum():
                for d in range(D + 1):
                    res = tmodules.rep_matrix_spectrum_check(d, n)
                    if not res:
                        return res
                return CheckResult("tmodules.rep_spectrum", True, detail={"d_max": D})

            runner.run(suite, "tmodules.rep_spectrum", rep_spectrum)

        elif suite == "audit":
            runner.run(suite, "tmodules.mult_forms", lambda: tmodules.verify_multiplicity_forms(D, n))
            runner.run(suite, "tmodules.dimension_audit", lambda: tmodules.dimension_audit(D, n))

        if any(c["verdict"] != "pass" for c in runner.checks[before:]):
            failed_suites.add(suite)

    verdict = "pass" if all(c["verdict"] == "pass" for c in runner.checks) else "fail"
    report = {
        "schema": SCHEMA,
        "instance": {"D": D, "n": n, "order": space.order, "radicand": m, "scale": scale},
        "suites": suites,
        "verdict": verdict,
        "checks": runner.checks,
    }
    if sd is not None:
        report["spectrum"] = spectrum_fragment(sd, blocks, orderings)
    if any(s in suites for s in ("spectrum", "modules", "audit")):
        try:
            report["modules"] = modules_fragment(D, n, scale, m, sd)
        except IdentityViolation as exc:
            report["modules"] = {"error": exc.identity, "witness": exc.witness}
    report["notes"] = NOTES
    if timing:
        report["timing"] = runner.timing
    return report


def spectrum_fragment(sd: spectral.SpectralData, blocks=None, orderings=None) -> dict:
    m = sd.radicand
    out = {
        "radicand": m,
        "eigenvalues": [{"c": c, "note": f"θ = {c}·√{m}"} for c in sd.coefficients],
        "multiplicities": sd.multiplicities,
    }
    if orderings is not None:
        verdicts = {k: v.verdict for k, v in orderings.items() if k != "natural"}
        # the natural order is a negative control: its check passes when A* is not tridiagonal on it
        verdicts["natural"] = "non-tridiagonal" if orderings["natural"].passed else "tridiagonal"
        out["orderings"] = verdicts
    if blocks is not None:
        out["zero_blocks"] = blocks.zero
    return out


def modules_fragment(D: int, n: int, scale: int, m: int, sd=None) -> dict:
    table = [{"r": p.r, "d": p.d, "mult": p.mult} for p in tmodules.module_table(D, n)]
    rows = []
    for i in range(2 * D + 1):
        msum = tmodules.eigenvalue_multiplicity_sum(i, D, n)
        mtrace = sd.multiplicities[i] if sd is not None else None
        rows.append({"i": i, "c": scale * (D - i), "note": f"θ = {scale * (D - i)}·√{m}",
                     "m_sum": msum, "m_trace": mtrace,
                     "agree": None if mtrace is None else msum == mtrace})
    return {"params": table, "eigenvalues": rows}


def summarize(report: dict) -> dict:
    inst = report["instance"]
    return {
        "D": inst["D"],
        "n": inst["n"],
        "order": inst["order"],
        "verdict": report["verdict"],
        "checks": len(report["checks"]),
        "failed": [c["name"] for c in report["checks"] if c["verdict"] == "fail"],
        "skipped": [c["name"] for c in report["checks"] if c["verdict"] == "skipped"],
    }


def render_table(report: dict) -> str:
    """Plain-text table of check verdicts."""
    inst = report.get("instance")
    lines = []
    if inst:
        lines.append(f"H({inst['D']},{inst['n']})  order {inst['order']}  verdict {report['verdict']}")
    width = max((len(c["name"]) for c in report.get("checks", [])), default=10)
    for c in report.get("checks", []):
        lines.append(f"  {c['name']:<{width}}  {c['verdict']}")
    return "\n".join(lines) + "\n"
