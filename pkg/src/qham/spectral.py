"""Primitive idempotents of A, the zero-block pattern of A*, and T-module closure."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .checks import CheckResult
from .matrix import ExactMatrix, stack_powers
from .qnum import QuadPolynomial, QuadScalar, format_scalar
from .terwilliger import TerwilligerContext


def eigenvalue(ctx: TerwilligerContext, i: int) -> QuadScalar:
    """theta_i = sqrt(n-1) (D - i) as an element of Q(sqrt(m))."""
    c = ctx.scale * (ctx.D - i)
    if ctx.radicand == 1:
        return QuadScalar(c, 0, 1)
    return QuadScalar(0, c, ctx.radicand)


def lagrange_basis(nodes: Sequence[QuadScalar], i: int) -> QuadPolynomial:
    """prod_{j != i} (t - nodes[j]) / (nodes[i] - nodes[j])."""
    out = QuadPolynomial([1])
    for j, node in enumerate(nodes):
        if j == i:
            continue
        out = out * QuadPolynomial([-node, 1]) * QuadPolynomial([(nodes[i] - node).inverse()])
    return out


def poly_of_matrix(p: QuadPolynomial, powers: Sequence[ExactMatrix]) -> ExactMatrix:
    if p.degree >= len(powers):
        raise ValueError(f"need powers up to {p.degree}, have {len(powers) - 1}")
    if p.is_zero():
        return ExactMatrix.zeros(powers[0].order, m=powers[0].m)
    return ExactMatrix.combination(list(p.coeffs), list(powers[: p.degree + 1]))


@dataclass(eq=False)
class SpectralData:
    eigenvalues: list[QuadScalar]
    idempotents: list[ExactMatrix]
    multiplicities: list[int]
    radicand: int
    coefficients: list[int]  # theta_i = coefficients[i] * sqrt(radicand)
    checks: list[CheckResult] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return all(self.checks)


def primitive_idempotents(ctx: TerwilligerContext) -> SpectralData:
    """Lagrange projectors E_i = prod_{j != i} (A - theta_j I)/(theta_i - theta_j).

    The idempotent identities are checked exactly and recorded on the result;
    a failure is a witness, not an exception.
    """
    D = ctx.D
    thetas = [eigenvalue(ctx, i) for i in range(2 * D + 1)]
    powers = stack_powers(ctx.A, 2 * D)
    idem = [poly_of_matrix(lagrange_basis(thetas, i), powers) for i in range(2 * D + 1)]
    zero = ExactMatrix.zeros(ctx.order, m=ctx.radicand)
    checks: list[CheckResult] = []

    distinct = len(set(thetas)) == len(thetas)
    checks.append(CheckResult("spectral.distinct_eigenvalues", distinct))

    nonzero = [i for i, E in enumerate(idem) if E.is_zero()]
    checks.append(CheckResult("spectral.idempotents_nonzero", not nonzero,
                              {"zero_idempotents": nonzero} if nonzero else None))

    witness = None
    for i, Ei in enumerate(idem):
        for j, Ej in enumerate(idem):
            if (Ei @ Ej) != (Ei if i == j else zero):
                witness = {"i": i, "j": j}
                break
        if witness:
            break
    checks.append(CheckResult("spectral.orthogonal_idempotents", witness is None, witness))

    total = idem[0]
    for E in idem[1:]:
        total = total + E
    checks.append(CheckResult("spectral.resolution_of_identity", total == ctx.identity))

    witness = None
    for i, (E, th) in enumerate(zip(idem, thetas)):
        AE = ctx.A @ E
        if AE != E.scale(th) or (E @ ctx.A) != AE or not ((ctx.A - ctx.identity.scale(th)) @ E).is_zero():
            witness = {"i": i, "theta": format_scalar(th)}
            break
    checks.append(CheckResult("spectral.eigen_relation", witness is None, witness))

    mults = []
    bad_trace = []
    for i, E in enumerate(idem):
        tr = E.trace()
        if not tr.is_rational() or tr.a.denominator != 1:
            bad_trace.append({"i": i, "trace": format_scalar(tr)})
            mults.append(-1)
        else:
            mults.append(int(tr.a))
    checks.append(CheckResult("spectral.integral_traces", not bad_trace,
                              {"traces": bad_trace} if bad_trace else None))
    checks.append(CheckResult("spectral.multiplicity_total", sum(mults) == ctx.order,
                              None if sum(mults) == ctx.order else {"sum": sum(mults), "order": ctx.order}))
    symmetric = all(mults[i] == mults[2 * D - i] for i in range(2 * D + 1))
    checks.append(CheckResult("spectral.symmetric_spectrum", symmetric,
                              None if symmetric else {"multiplicities": mults}))

    coeffs = [ctx.scale * (D - i) for i in range(2 * D + 1)]
    return SpectralData(thetas, idem, mults, ctx.radicand, coeffs, checks)


def verify_trace_moments(ctx: TerwilligerContext, sd: SpectralData) -> CheckResult:
    """sum theta_i m_i = tr A = 0 and sum theta_i^2 m_i = tr A^2 = 2|E_f|."""
    first = sum((th * mi for th, mi in zip(sd.eigenvalues, sd.multiplicities)), QuadScalar(0, 0, sd.radicand))
    second = sum((th * th * mi for th, mi in zip(sd.eigenvalues, sd.multiplicities)),
                 QuadScalar(0, 0, sd.radicand))
    tr_a = ctx.A.trace()
    tr_a2 = (ctx.A @ ctx.A).trace()
    edges = 2 * len(ctx.graph.edges)
    ok = first == tr_a == 0 and second == tr_a2 == edges
    return CheckResult("spectral.trace_moments", ok, None if ok else {
        "first": format_scalar(first), "second": format_scalar(second), "twice_edges": edges,
    })


def float_spectrum_check(ctx: TerwilligerContext, sd: SpectralData | None = None,
                         tol: float = 1e-9) -> CheckResult:
    """Numeric eigenvalues of A against sqrt(n-1)(D-i) with the exact multiplicities."""
    vals = np.sort(np.linalg.eigvalsh(ctx.A.to_float()))[::-1]
    root = np.sqrt(ctx.n - 1)
    if sd is None:
        # without exact data, match each numeric value to its nearest predicted eigenvalue
        predicted = root * np.arange(ctx.D, -ctx.D - 1, -1)
        err = float(np.max(np.min(np.abs(vals[:, None] - predicted[None, :]), axis=1)))
        counts = [int(np.sum(np.abs(vals - p) <= tol)) for p in predicted]
    else:
        expected = np.repeat(root * np.arange(ctx.D, -ctx.D - 1, -1), sd.multiplicities)
        err = float(np.max(np.abs(vals - expected))) if len(expected) == len(vals) else float("inf")
        counts = sd.multiplicities
    ok = err <= tol
    return CheckResult("spectral.float_oracle", ok, None if ok else {"max_error": err},
                       detail={"max_error": err, "multiplicities": list(counts)})


def scalar_factor(i: int, j: int, n: int, D: int) -> tuple[QuadScalar, QuadScalar]:
    """(theta_i - theta_j)((theta_i - theta_j)^2 - 4(n-1)) and its closed form.

    With theta_i - theta_j = sqrt(n-1)(j - i) the closed form is
    -sqrt(n-1)(n-1)(i-j)(i-j-2)(i-j+2).
    """
    root = QuadScalar.sqrt_of(n - 1)
    diff = root * (D - i) - root * (D - j)
    lhs = diff * (diff * diff - 4 * (n - 1))
    k = i - j
    closed = root * (-(n - 1) * k * (k - 2) * (k + 2))
    return lhs, closed


def verify_scalar_factor(D: int, n: int) -> CheckResult:
    """The scalar factor vanishes exactly when |i - j| is 0 or 2."""
    for i in range(2 * D + 1):
        for j in range(2 * D + 1):
            lhs, closed = scalar_factor(i, j, n, D)
            if lhs != closed or (not lhs) != (abs(i - j) in (0, 2)):
                return CheckResult("spectral.scalar_factor", False,
                                   {"i": i, "j": j, "lhs": format_scalar(lhs), "closed": format_scalar(closed)})
    return CheckResult("spectral.scalar_factor", True)


@dataclass
class ZeroBlocks:
    zero: list[list[bool]]  # zero[i][j]: E_i A* E_j == 0
    check: CheckResult


def verify_zero_blocks(sd: SpectralData, Astar: ExactMatrix) -> ZeroBlocks:
    """E_i A* E_j = 0 whenever |i - j| is not 0 or 2."""
    size = len(sd.idempotents)
    right = [Astar @ E for E in sd.idempotents]
    zero = [[(sd.idempotents[i] @ right[j]).is_zero() for j in range(size)] for i in range(size)]
    bad = [[i, j] for i in range(size) for j in range(size)
           if abs(i - j) not in (0, 2) and not zero[i][j]]
    nonzero_allowed = [[i, j] for i in range(size) for j in range(size)
                       if abs(i - j) in (0, 2) and not zero[i][j]]
    check = CheckResult("spectral.zero_blocks", not bad, {"forbidden_nonzero": bad} if bad else None,
                        detail={"nonzero_allowed_blocks": len(nonzero_allowed)})
    return ZeroBlocks(zero, check)


def even_first_order(D: int) -> list[int]:
    return list(range(0, 2 * D + 1, 2)) + list(range(1, 2 * D, 2))


def odd_first_order(D: int) -> list[int]:
    return list(range(1, 2 * D, 2)) + list(range(0, 2 * D + 1, 2))


def natural_order(D: int) -> list[int]:
    return list(range(2 * D + 1))


def ordering_violation(zero: list[list[bool]], order: Sequence[int]) -> tuple[int, int] | None:
    """First (k, l) with |k - l| > 1 and E_{order[k]} A* E_{order[l]} != 0."""
    for k, i in enumerate(order):
        for l, j in enumerate(order):
            if abs(k - l) > 1 and not zero[i][j]:
                return k, l
    return None


def verify_orderings(sd: SpectralData, Astar: ExactMatrix,
                     blocks: ZeroBlocks | None = None) -> dict[str, CheckResult]:
    """Block-tridiagonal action of A* along the even-first and odd-first orderings.

    The natural ordering is included as a negative control: its check passes
    when the ordering is found to be non-tridiagonal.
    """
    if blocks is None:
        blocks = verify_zero_blocks(sd, Astar)
    D = (len(sd.idempotents) - 1) // 2
    out = {}
    for key, order in (("even_first", even_first_order(D)), ("odd_first", odd_first_order(D))):
        bad = ordering_violation(blocks.zero, order)
        out[key] = CheckResult(f"spectral.ordering_{key}", bad is None,
                               None if bad is None else {"order": order, "k": bad[0], "l": bad[1]},
                               detail={"order": order})
    nat = natural_order(D)
    bad = ordering_violation(blocks.zero, nat)
    out["natural"] = CheckResult("spectral.natural_order_control", bad is not None,
                                 None if bad is not None else {"order": nat, "reason": "natural order tridiagonal"},
                                 detail={"order": nat, "first_violation": None if bad is None else list(bad)})
    return out


def verify_dual_generation(ctx: TerwilligerContext) -> CheckResult:
    """Each E*_i is recovered exactly as a polynomial in A*."""
    ts = [QuadScalar(t, 0, ctx.radicand) for t in ctx.theta_star]
    if len(set(ctx.theta_star)) != len(ts):
        return CheckResult("spectral.dual_generation", False, {"theta_star": list(ctx.theta_star)})
    powers = stack_powers(ctx.Astar, ctx.D)
    for i, target in enumerate(ctx.dual_idempotents):
        rebuilt = poly_of_matrix(lagrange_basis(ts, i), powers)
        if rebuilt != target:
            pos = rebuilt.first_difference(target)
            return CheckResult("spectral.dual_generation", False, {"i": i, "entry": list(pos)})
    return CheckResult("spectral.dual_generation", True, detail={"theta_star": list(ctx.theta_star)})


# T-module closure --------------------------------------------------------------


class _LevelSpace:
    """Row-reduced basis of a subspace, pivoting on the first nonzero column."""

    def __init__(self) -> None:
        self.rows: list[dict[int, QuadScalar]] = []
        self.pivots: list[int] = []

    def reduce(self, vec: dict[int, QuadScalar]) -> dict[int, QuadScalar]:
        v = dict(vec)
        for row, piv in zip(self.rows, self.pivots):
            c = v.get(piv)
            if c:
                for k, val in row.items():
                    nv = v.get(k, 0) - c * val
                    if nv:
                        v[k] = nv
                    else:
                        v.pop(k, None)
        return v

    def add(self, vec: dict[int, QuadScalar]) -> bool:
        v = self.reduce(vec)
        if not v:
            return False
        piv = min(v)
        inv = v[piv].inverse()
        v = {k: val * inv for k, val in v.items()}
        for idx, row in enumerate(self.rows):
            c = row.get(piv)
            if c:
                for k, val in v.items():
                    nv = row.get(k, 0) - c * val
                    if nv:
                        row[k] = nv
                    else:
                        row.pop(k, None)
        self.rows.append(v)
        self.pivots.append(piv)
        return True

    def __len__(self) -> int:
        return len(self.rows)

    def contains(self, vec: dict[int, QuadScalar]) -> bool:
        return not self.reduce(vec)


def _apply(nbrs: Sequence[Sequence[int]], vec: dict[int, QuadScalar]) -> dict[int, QuadScalar]:
    out: dict[int, QuadScalar] = {}
    for y, val in vec.items():
        for z in nbrs[y]:
            nv = out.get(z, 0) + val
            if nv:
                out[z] = nv
            else:
                out.pop(z, None)
    return out


def _step_lists(ctx: TerwilligerContext):
    w = ctx.space.weights
    adj = ctx.graph.adjacency
    down = [tuple(z for z in adj[y] if w[z] == w[y] - 1) for y in range(ctx.order)]
    up = [tuple(z for z in adj[y] if w[z] == w[y] + 1) for y in range(ctx.order)]
    return down, up


def _scale_vec(vec: dict[int, QuadScalar], c) -> dict[int, QuadScalar]:
    return {k: v * c for k, v in vec.items() if v * c}


@dataclass
class SubmoduleReport:
    dimension: int
    endpoint: int
    diameter: int
    thin: bool
    level_dimensions: list[int]
    basis_check: CheckResult | None
    coefficients: list[str] = field(default_factory=list)

    def as_dict(self) -> dict:
        return {
            "dimension": self.dimension,
            "r": self.endpoint,
            "d": self.diameter,
            "thin": self.thin,
            "level_dimensions": self.level_dimensions,
            "raising_coefficients": self.coefficients,
            "basis_check": None if self.basis_check is None else self.basis_check.as_dict(),
        }


def _as_sparse(seed, ctx: TerwilligerContext) -> dict[int, QuadScalar]:
    if isinstance(seed, dict):
        items = seed.items()
    else:
        items = enumerate(seed)
    out = {}
    for k, v in items:
        if not 0 <= int(k) < ctx.order:
            raise ValueError(f"seed index {k} outside 0..{ctx.order - 1}")
        s = v if isinstance(v, QuadScalar) else QuadScalar(Fraction(v), 0, ctx.radicand)
        if s:
            out[int(k)] = out.get(int(k), 0) + s
    return {k: v for k, v in out.items() if v}


def generate_submodule(ctx: TerwilligerContext, seed) -> SubmoduleReport:
    """Close span{seed} under L, R and every E*_i and describe the result.

    ``seed`` is a dense sequence or a sparse ``{index: value}`` mapping.
    When the module is thin, the basis w_r..w_{r+d} with L w_r = 0 and
    L w_{r+i} = w_{r+i-1} is rebuilt from the top vector down and the raising
    action R w_{r+i} = (i+1)(n-1)(d-i) w_{r+i+1} is checked exactly.
    """
    vec = _as_sparse(seed, ctx)
    if not vec:
        raise ValueError("seed vector is zero")
    w = ctx.space.weights
    D, n = ctx.D, ctx.n
    down, up = _step_lists(ctx)
    levels = [_LevelSpace() for _ in range(D + 1)]
    queue: list[tuple[int, dict]] = []

    def push(level: int, v: dict) -> None:
        if 0 <= level <= D and v:
            before = len(levels[level])
            if levels[level].add(v):
                queue.append((level, dict(levels[level].rows[before])))

    for i in range(D + 1):
        push(i, {k: v for k, v in vec.items() if w[k] == i})
    while queue:
        level, v = queue.pop()
        push(level - 1, _apply(down, v))
        push(level + 1, _apply(up, v))

    dims = [len(lv) for lv in levels]
    nonzero = [i for i, dv in enumerate(dims) if dv]
    r = nonzero[0]
    d = len(nonzero) - 1
    thin = all(dv <= 1 for dv in dims)
    report = SubmoduleReport(sum(dims), r, d, thin, dims, None)
    if thin:
        report.basis_check, report.coefficients = _thin_basis_check(levels, r, d, n, down, up)
    return report


def _thin_basis_check(levels, r, d, n, down, up) -> tuple[CheckResult, list[str]]:
    name = "spectral.thin_module_basis"
    if [i for i, lv in enumerate(levels) if len(lv)] != list(range(r, r + d + 1)):
        return CheckResult(name, False, {"reason": "nonvanishing levels not contiguous"}), []
    basis = {r + d: levels[r + d].rows[0]}
    for i in range(r + d, r, -1):
        basis[i - 1] = _apply(down, basis[i])
        if not basis[i - 1] or not levels[i - 1].contains(basis[i - 1]):
            return CheckResult(name, False, {"level": i - 1, "reason": "lowering left the module"}), []
    if _apply(down, basis[r]):
        return CheckResult(name, False, {"reason": "L w_r != 0"}), []
    coeffs = []
    for i in range(d + 1):
        raised = _apply(up, basis[r + i])
        if i == d:
            if raised:
                return CheckResult(name, False, {"reason": "R w_{r+d} != 0"}), coeffs
            break
        target = basis[r + i + 1]
        piv = min(target)
        c = raised.get(piv, QuadScalar(0, 0, target[piv].m)) / target[piv]
        x_next = (i + 1) * (n - 1) * (d - i)
        coeffs.append(format_scalar(c))
        if _scale_vec(target, c) != raised or c != x_next:
            return CheckResult(name, False, {"i": i, "coefficient": format_scalar(c), "expected": x_next}), coeffs
    return CheckResult(name, True), coeffs


def primary_seed(ctx: TerwilligerContext) -> dict[int, QuadScalar]:
    return {ctx.space.base: QuadScalar(1, 0, ctx.radicand)}


def e1_difference_seed(ctx: TerwilligerContext) -> dict[int, QuadScalar]:
    """hat(y) - hat(z) for y = (1,0,...,0), z = (2,0,...,0): both at distance 1, same coordinate."""
    space = ctx.space
    y = space.index((1,) + (0,) * (space.D - 1))
    z = space.index((2,) + (0,) * (space.D - 1))
    return {y: QuadScalar(1, 0, ctx.radicand), z: QuadScalar(-1, 0, ctx.radicand)}
