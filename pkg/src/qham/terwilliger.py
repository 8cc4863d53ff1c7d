"""Lowering/raising/dual matrices of the full bipartite graph and their identities."""
from __future__ import annotations

from collections import Counter, defaultdict
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import product
from typing import NamedTuple

import numpy as np

from .checks import CheckResult, IdentityViolation
from .hamming import FullBipartiteGraph, SpaceGraph
from .matrix import ExactMatrix
from .qnum import format_scalar, normalize_radicand

STEP_KINDS = ("l", "f", "r")


def dual_eigenvalue(D: int, n: int, i: int) -> int:
    """Diagonal entry of the dual adjacency matrix on the i-th distance class."""
    return D * (n - 1) - n * i


def adjacency_matrix(g: SpaceGraph, m: int = 1) -> ExactMatrix:
    adj = np.zeros((g.order, g.order), dtype=np.int64)
    for i, j in g.edges:
        adj[i, j] = adj[j, i] = 1
    return ExactMatrix.from_ints(adj, m)


def dual_idempotents(g: SpaceGraph, m: int = 1) -> list[ExactMatrix]:
    w = g.space.weights
    out = []
    for i in range(g.space.D + 1):
        out.append(ExactMatrix.from_ints(np.diag((w == i).astype(np.int64)), m))
    return out


def lowering_flat_raising(adj: ExactMatrix, estar: list[ExactMatrix]):
    """L = sum E*_{i-1} A E*_i, F = sum E*_i A E*_i, R = sum E*_{i+1} A E*_i."""
    zero = ExactMatrix.zeros(adj.order, m=adj.m)
    L, F, R = zero, zero, zero
    top = len(estar) - 1
    for i in range(top + 1):
        right = adj @ estar[i]
        F = F + estar[i] @ right
        if i >= 1:
            L = L + estar[i - 1] @ right
        if i < top:
            R = R + estar[i + 1] @ right
    return L, F, R


@dataclass(eq=False)
class TerwilligerContext:
    graph: FullBipartiteGraph
    A: ExactMatrix
    Astar: ExactMatrix
    L: ExactMatrix
    R: ExactMatrix
    F: ExactMatrix
    dual_idempotents: list[ExactMatrix]
    theta_star: tuple[int, ...]
    radicand: int
    scale: int

    @property
    def space(self):
        return self.graph.space

    @property
    def D(self) -> int:
        return self.graph.space.D

    @property
    def n(self) -> int:
        return self.graph.space.n

    @property
    def order(self) -> int:
        return self.graph.order

    @cached_property
    def identity(self) -> ExactMatrix:
        return ExactMatrix.identity(self.order, self.radicand)

    def step_matrix(self, kind: str) -> ExactMatrix:
        return {"l": self.L, "f": self.F, "r": self.R}[kind]


def build_context(g: SpaceGraph) -> TerwilligerContext:
    """Materialize A, A*, L, F, R and E*_i and check their defining identities.

    Any failure raises :class:`IdentityViolation` naming the identity.
    """
    space = g.space
    D, n = space.D, space.n
    scale, m = normalize_radicand(n - 1)
    if not g.is_connected():
        raise IdentityViolation("graph connected", {"D": D, "n": n})
    if not g.is_bipartite():
        raise IdentityViolation("graph bipartite with respect to distance parity", {"D": D, "n": n})

    A = adjacency_matrix(g, m)
    estar = dual_idempotents(g, m)
    I = ExactMatrix.identity(g.order, m)

    if not (A == A.T) or A.a.diagonal().any() or not np.isin(A.a, (0, 1)).all():
        raise IdentityViolation("A symmetric 0/1 with zero diagonal")

    total = estar[0]
    for E in estar[1:]:
        total = total + E
    if total != I:
        raise IdentityViolation("sum of E*_i equals I")
    for i, Ei in enumerate(estar):
        if Ei.T != Ei:
            raise IdentityViolation("E*_i symmetric", {"i": i})
        for j, Ej in enumerate(estar):
            prod = Ei @ Ej
            if prod != (Ei if i == j else ExactMatrix.zeros(g.order, m=m)):
                raise IdentityViolation("E*_i E*_j = delta_ij E*_i", {"i": i, "j": j})

    theta_star = tuple(dual_eigenvalue(D, n, i) for i in range(D + 1))
    if len(set(theta_star)) != len(theta_star):
        raise IdentityViolation("dual eigenvalues pairwise distinct", {"theta_star": theta_star})
    Astar = ExactMatrix.combination(list(theta_star), estar)
    if not Astar.is_diagonal():
        raise IdentityViolation("A* diagonal")

    L, F, R = lowering_flat_raising(A, estar)
    if not F.is_zero():
        pos = F.nonzero_positions()[0]
        raise IdentityViolation("F = 0", {"entry": [int(pos[0]), int(pos[1])]})
    if L + R != A:
        raise IdentityViolation("A = L + R", {"entry": list((L + R).first_difference(A))})
    if R != L.T:
        raise IdentityViolation("R = L^T", {"entry": list(R.first_difference(L.T))})

    return TerwilligerContext(g, A, Astar, L, R, F, estar, theta_star, m, scale)


def dual_block(ctx: TerwilligerContext, i: int, j: int) -> ExactMatrix:
    return ctx.dual_idempotents[i] @ ctx.A @ ctx.dual_idempotents[j]


def verify_dual_idempotent_block(ctx: TerwilligerContext) -> CheckResult:
    """E*_i A E*_j vanishes for |i - j| > 1 and, since F = 0, for i = j."""
    D = ctx.D
    for i in range(D + 1):
        left = ctx.dual_idempotents[i] @ ctx.A
        for j in range(D + 1):
            if abs(i - j) == 1:
                continue
            block = left @ ctx.dual_idempotents[j]
            if not block.is_zero():
                pos = block.nonzero_positions()[0]
                return CheckResult("terwilliger.dual_blocks", False,
                                   {"i": i, "j": j, "entry": [int(pos[0]), int(pos[1])]})
    return CheckResult("terwilliger.dual_blocks", True)


def _witness(name: str, lhs: ExactMatrix, rhs: ExactMatrix) -> CheckResult:
    pos = lhs.first_difference(rhs)
    if pos is None:
        return CheckResult(name, True)
    z, y = pos
    return CheckResult(name, False, {
        "entry": [z, y],
        "lhs": format_scalar(lhs.entry(z, y)),
        "rhs": format_scalar(rhs.entry(z, y)),
    })


def uniform_sides(ctx: TerwilligerContext) -> tuple[ExactMatrix, ExactMatrix]:
    L, R = ctx.L, ctx.R
    half = Fraction(1, 2)
    LL = L @ L
    lhs = (R @ LL).scale(-half) + L @ R @ L + (LL @ R).scale(-half)
    rhs = L.scale(ctx.n - 1)
    return lhs, rhs


def verify_uniform(ctx: TerwilligerContext) -> CheckResult:
    """-1/2 R L^2 + L R L - 1/2 L^2 R = (n-1) L."""
    return _witness("terwilliger.uniform", *uniform_sides(ctx))


def tridiagonal_sides(ctx: TerwilligerContext) -> tuple[ExactMatrix, ExactMatrix]:
    A, S = ctx.A, ctx.Astar
    A2 = A @ A
    A3 = A2 @ A
    lhs = (A3 @ S - S @ A3) + (A @ S @ A2 - A2 @ S @ A).scale(3)
    rhs = (A @ S - S @ A).scale(4 * (ctx.n - 1))
    return lhs, rhs


def verify_tridiagonal(ctx: TerwilligerContext) -> CheckResult:
    """A^3 A* - A* A^3 + 3(A A* A^2 - A^2 A* A) = 4(n-1)(A A* - A* A)."""
    return _witness("terwilliger.tridiagonal", *tridiagonal_sides(ctx))


# shaped walks ----------------------------------------------------------------
#
# A shape lists the steps of a walk in the order they are taken from its start
# y, e.g. "llr" = down, down, up. The walk count from y to z then equals the
# (z, y) entry of M_last @ ... @ M_first, so "llr" corresponds to R @ L @ L.


def _check_shape(shape: str) -> None:
    if not shape or any(ch not in STEP_KINDS for ch in shape):
        raise ValueError(f"shape must be a nonempty string over 'l', 'f', 'r', got {shape!r}")


def shape_matrix(ctx_or_lfr, shape: str) -> ExactMatrix:
    _check_shape(shape)
    if isinstance(ctx_or_lfr, TerwilligerContext):
        mats = {k: ctx_or_lfr.step_matrix(k) for k in STEP_KINDS}
    else:
        mats = dict(zip(STEP_KINDS, ctx_or_lfr))
    out = mats[shape[0]]
    for ch in shape[1:]:
        out = mats[ch] @ out
    return out


def _step_kind(dw: int) -> str:
    return {-1: "l", 0: "f", 1: "r"}[dw]


def enumerate_walks(g: SpaceGraph, start: int, length: int):
    """Yield every walk of exactly ``length`` steps from ``start`` as a vertex tuple."""
    path = [start]

    def rec():
        if len(path) == length + 1:
            yield tuple(path)
            return
        for v in g.adjacency[path[-1]]:
            path.append(v)
            yield from rec()
            path.pop()

    yield from rec()


def walk_shape(g: SpaceGraph, walk) -> str:
    w = g.space.weights
    return "".join(_step_kind(int(w[v]) - int(w[u])) for u, v in zip(walk, walk[1:]))


def count_shaped_walks(g: SpaceGraph, shape: str, y: int) -> Counter:
    """Brute-force count, per endpoint, of walks from y with the given shape."""
    _check_shape(shape)
    w = g.space.weights
    counts: Counter = Counter()

    def rec(u: int, depth: int):
        if depth == len(shape):
            counts[u] += 1
            return
        for v in g.adjacency[u]:
            if _step_kind(int(w[v]) - int(w[u])) == shape[depth]:
                rec(v, depth + 1)

    rec(y, 0)
    return counts


class WalkCount(NamedTuple):
    matrix: int
    enumerated: int


def shape_walk_count(ctx: TerwilligerContext, shape: str, y: int, z: int) -> WalkCount:
    """The (z, y) entry of the shape's matrix product and the enumerated count."""
    entry = shape_matrix(ctx, shape).entry(z, y)
    enumerated = count_shaped_walks(ctx.graph, shape, y)[z]
    if entry != enumerated:
        raise IdentityViolation("shaped walk count", {
            "shape": shape, "y": y, "z": z, "matrix": format_scalar(entry), "enumerated": enumerated,
        })
    return WalkCount(int(entry.a), enumerated)


def _all_walk_counts(g: SpaceGraph, y: int, max_length: int) -> dict[str, Counter]:
    w = g.space.weights
    counts: dict[str, Counter] = defaultdict(Counter)
    adj = g.adjacency

    def rec(u: int, shape: str):
        if shape:
            counts[shape][u] += 1
        if len(shape) == max_length:
            return
        wu = int(w[u])
        for v in adj[u]:
            rec(v, shape + _step_kind(int(w[v]) - wu))

    rec(y, "")
    return counts


def verify_walk_oracle(g: SpaceGraph, max_length: int = 4, lfr=None) -> CheckResult:
    """Every shape of length <= max_length: matrix entries equal enumerated walks.

    ``lfr`` defaults to the lowering/flat/raising matrices of ``g`` itself, so
    the check also runs on graphs with flat edges.
    """
    if lfr is None:
        _, m = normalize_radicand(g.space.n - 1)
        lfr = lowering_flat_raising(adjacency_matrix(g, m), dual_idempotents(g, m))
    shapes = ["".join(p) for k in range(1, max_length + 1) for p in product(STEP_KINDS, repeat=k)]
    mats = {}
    for shape in shapes:
        # reuse the prefix product
        prev = mats.get(shape[:-1])
        step = dict(zip(STEP_KINDS, lfr))[shape[-1]]
        mats[shape] = step if prev is None else step @ prev
    cols = {shape: mat.a for shape, mat in mats.items()}
    for shape, mat in mats.items():
        if mat.den != 1 or mat.b is not None:
            return CheckResult("terwilliger.walk_oracle", False, {"shape": shape, "reason": "non-integral"})
    for y in range(g.order):
        counts = _all_walk_counts(g, y, max_length)
        for shape in shapes:
            expected = np.zeros(g.order, dtype=np.int64)
            for z, c in counts.get(shape, {}).items():
                expected[z] = c
            col = np.asarray(cols[shape][:, y], dtype=np.int64)
            if not np.array_equal(col, expected):
                z = int(np.nonzero(col != expected)[0][0])
                return CheckResult("terwilliger.walk_oracle", False, {
                    "shape": shape, "y": y, "z": z, "matrix": int(col[z]), "enumerated": int(expected[z]),
                })
    return CheckResult("terwilliger.walk_oracle", True,
                       detail={"max_length": max_length, "shapes": len(shapes), "vertices": g.order})


def verify_tridiagonal_entrywise(ctx: TerwilligerContext, sides=None) -> CheckResult:
    """Rebuild every entry of the tridiagonal relation from enumerated 3-walks.

    For z one class below y the counts a = llr(y,z), b = lrl(y,z), c = rll(y,z)
    must satisfy -a/2 + b - c/2 = n - 1 when z ~ y and 0 otherwise, and the
    left side entry equals n(2a - 4b + 2c). Pairs three classes apart at
    distance 3 carry exactly 6 walks. Every entry rebuilt from walks is
    compared with the matrix entry; pairs without 3-walks must be zero on
    both sides.
    """
    name = "terwilliger.entrywise"
    g = ctx.graph
    n = ctx.n
    w = g.space.weights
    ts = ctx.theta_star
    lhs, rhs = sides if sides is not None else tridiagonal_sides(ctx)
    if lhs.den != 1 or rhs.den != 1 or lhs.b is not None or rhs.b is not None:
        return CheckResult(name, False, {"reason": "non-integral relation sides"})
    dist = g.all_distances
    RLL, LRL, LLR = (shape_matrix(ctx, s) for s in ("llr", "lrl", "rll"))
    pairs = {"adjacent": 0, "distance3": 0, "far": 0, "zero": 0}

    def theta(v: int) -> int:
        return ts[int(w[v])]

    for y in range(g.order):
        per_z: dict[int, list] = defaultdict(lambda: [0, 0, Counter()])
        for walk in enumerate_walks(g, y, 3):
            _, v, u, z = walk
            rec = per_z[z]
            rec[0] += 1
            rec[1] += theta(u) - theta(v)
            rec[2][walk_shape(g, walk)] += 1
        for z in range(g.order):
            gamma3, inner, shapes = per_z[z] if z in per_z else (0, 0, Counter())
            lhs_zy = int(lhs.a[z, y])
            rhs_zy = int(rhs.a[z, y])
            gap = int(w[y]) - int(w[z])
            adjacent = dist[z, y] == 1
            lhs_walks = gamma3 * (theta(y) - theta(z)) + 3 * inner
            rhs_walks = 4 * (n - 1) * (theta(y) - theta(z)) if adjacent else 0
            if lhs_walks != lhs_zy or rhs_walks != rhs_zy:
                return CheckResult(name, False, {
                    "z": z, "y": y, "lhs": [lhs_walks, lhs_zy], "rhs": [rhs_walks, rhs_zy],
                })
            if gap == 1:
                a, b, c = shapes["llr"], shapes["lrl"], shapes["rll"]
                if (a, b, c) != (int(RLL.a[z, y]), int(LRL.a[z, y]), int(LLR.a[z, y])):
                    return CheckResult(name, False, {"z": z, "y": y, "abc": [a, b, c],
                                                     "reason": "walk counts differ from L/R products"})
                if gamma3 != a + b + c:
                    return CheckResult(name, False, {"z": z, "y": y, "abc": [a, b, c],
                                                     "reason": "unexpected 3-walk shape"})
                combo = Fraction(-a, 2) + b - Fraction(c, 2)
                expect = n - 1 if adjacent else 0
                formula = n * (2 * a - 4 * b + 2 * c)
                if combo != expect or formula != lhs_zy or formula != (-4 * n * (n - 1) if adjacent else 0):
                    return CheckResult(name, False, {
                        "z": z, "y": y, "abc": [a, b, c], "combination": str(combo),
                        "expected": expect, "n(2a-4b+2c)": formula,
                    })
                pairs["adjacent" if adjacent else "distance3"] += 1
            elif gap == 3 and dist[z, y] == 3:
                if gamma3 != 6 or lhs_walks != 0 or 6 * (theta(y) - theta(z)) != -18 * n:
                    return CheckResult(name, False, {"z": z, "y": y, "gamma3": gamma3,
                                                     "reason": "expected exactly 6 geodesic 3-walks"})
                pairs["far"] += 1
            elif gamma3 == 0:
                if lhs_zy or rhs_zy:
                    return CheckResult(name, False, {"z": z, "y": y, "reason": "nonzero entry without 3-walks"})
                pairs["zero"] += 1
    return CheckResult(name, True, detail={"pairs": pairs})
