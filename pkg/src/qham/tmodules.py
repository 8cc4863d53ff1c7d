"""Irreducible-module bookkeeping: admissible (r, d), multiplicities, tridiagonal blocks."""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial

import numpy as np

from .checks import CheckResult, IdentityViolation
from .qnum import QuadPolynomial, QuadScalar, format_scalar, poly_from_roots, poly_shift_scale


def is_admissible(r: int, d: int, D: int) -> bool:
    return 0 <= r <= r + d <= D <= 2 * r + d


def admissible_params(D: int) -> list[tuple[int, int]]:
    """All (r, d) with 0 <= r <= r+d <= D <= 2r+d, by d descending then r ascending."""
    if D < 1:
        raise ValueError(f"D must be >= 1, got {D}")
    pairs = [(r, d) for d in range(D, -1, -1) for r in range(D + 1) if is_admissible(r, d, D)]
    return pairs


def falling_factorial(a: int, k: int) -> int:
    out = 1
    for j in range(k):
        out *= a - j
    return out


def multiplicity_falling_form(r: int, d: int, D: int, n: int) -> Fraction:
    num = falling_factorial(D + 1, r) * (n - 2) ** (2 * r + d - D) * (d + 1)
    den = factorial(D - r - d) * factorial(2 * r + d - D) * (D + 1)
    return Fraction(num, den)


def multiplicity_binomial_form(r: int, d: int, D: int, n: int) -> Fraction:
    return (Fraction(d + 1, D - r + 1) * comb(D, 2 * D - 2 * r - d)
            * comb(2 * D - 2 * r - d, D - r - d) * (n - 2) ** (2 * r + d - D))


def multiplicity(r: int, d: int, D: int, n: int) -> int:
    """Number of irreducible summands with endpoint r and diameter d.

    Both closed forms are evaluated; disagreement or a non-integer value
    raises :class:`IdentityViolation`.
    """
    if not is_admissible(r, d, D):
        raise ValueError(f"(r, d) = ({r}, {d}) is not admissible for D = {D}")
    if n < 3:
        raise ValueError(f"n must be >= 3, got {n}")
    first = multiplicity_falling_form(r, d, D, n)
    second = multiplicity_binomial_form(r, d, D, n)
    if first != second or first.denominator != 1 or first <= 0:
        raise IdentityViolation("multiplicity closed forms", {
            "r": r, "d": d, "D": D, "n": n, "falling": str(first), "binomial": str(second),
        })
    return int(first)


@dataclass(frozen=True)
class ModuleParams:
    r: int
    d: int
    mult: int


def module_table(D: int, n: int) -> list[ModuleParams]:
    return [ModuleParams(r, d, multiplicity(r, d, D, n)) for r, d in admissible_params(D)]


def verify_multiplicity_forms(D: int, n: int) -> CheckResult:
    for r, d in admissible_params(D):
        try:
            multiplicity(r, d, D, n)
        except IdentityViolation as exc:
            return CheckResult("tmodules.mult_forms", False, exc.witness)
    return CheckResult("tmodules.mult_forms", True)


def dimension_audit(D: int, n: int) -> CheckResult:
    """sum over admissible (r, d) of mult(r, d) (d + 1) equals n^D."""
    total = sum(p.mult * (p.d + 1) for p in module_table(D, n))
    ok = total == n ** D
    return CheckResult("tmodules.dimension_audit", ok,
                       None if ok else {"sum": total, "order": n ** D}, detail={"sum": total})


@dataclass(frozen=True)
class TridiagonalRep:
    """Action of A on a thin module of diameter d in its lowering-normalized basis."""

    d: int
    n: int

    @property
    def subdiagonal(self) -> list[int]:
        return [i * (self.n - 1) * (self.d - i + 1) for i in range(1, self.d + 1)]

    @property
    def superdiagonal(self) -> list[int]:
        return [1] * self.d

    def matrix(self) -> np.ndarray:
        size = self.d + 1
        mat = np.zeros((size, size), dtype=np.int64)
        for i, x in enumerate(self.subdiagonal, start=1):
            mat[i, i - 1] = x
            mat[i - 1, i] = 1
        return mat

    def char_poly(self, m: int = 1) -> QuadPolynomial:
        """Characteristic polynomial by the continuant recurrence on the matrix entries."""
        mat = self.matrix()
        t = QuadPolynomial([0, 1], m)
        prev, cur = QuadPolynomial([1], m), t - int(mat[0, 0])
        for i in range(1, self.d + 1):
            prev, cur = cur, (t - int(mat[i, i])) * cur - int(mat[i, i - 1] * mat[i - 1, i]) * prev
        return cur


def _radicand(n: int) -> int:
    return QuadScalar.sqrt_of(n - 1).m


def char_poly_recurrence(d: int, n: int) -> list[QuadPolynomial]:
    """f_0, ..., f_{d+1} with f_{i+1} = t f_i - i(n-1)(d-i+1) f_{i-1}."""
    if d < 0 or n < 3:
        raise ValueError(f"need d >= 0 and n >= 3, got d={d}, n={n}")
    m = _radicand(n)
    t = QuadPolynomial([0, 1], m)
    fs = [QuadPolynomial([1], m), t]
    for i in range(1, d + 1):
        fs.append(t * fs[i] - QuadPolynomial([i * (n - 1) * (d - i + 1)], m) * fs[i - 1])
    return fs


def krawtchouk_sequence(d: int, upto: int | None = None) -> list[QuadPolynomial]:
    """Normalized Krawtchouk polynomials at p = 1/2 from their three-term recurrence.

    P_0 = 1, P_1 = t - d/2 and t P_i = P_{i+1} + (d/2) P_i + (i/4)(d-i+1) P_{i-1}.
    """
    top = d + 1 if upto is None else upto
    half_d = Fraction(d, 2)
    t = QuadPolynomial([0, 1])
    ps = [QuadPolynomial([1]), QuadPolynomial([-half_d, 1])]
    for i in range(1, top):
        ps.append((t - half_d) * ps[i] - QuadPolynomial([Fraction(i, 4) * (d - i + 1)]) * ps[i - 1])
    return ps[: top + 1]


def _rescale(p: QuadPolynomial, d: int, n: int, degree: int) -> QuadPolynomial:
    """(2 sqrt(n-1))^degree * p(t / (2 sqrt(n-1)) + d/2)."""
    two_root = 2 * QuadScalar.sqrt_of(n - 1)
    shifted = poly_shift_scale(p, two_root.inverse(), Fraction(d, 2))
    return QuadPolynomial([two_root ** degree]) * shifted


def char_poly_krawtchouk(d: int, n: int) -> QuadPolynomial:
    """f_{d+1} as a rescaled P_{d+1}, cross-checked against two other representations.

    Raises :class:`IdentityViolation` when the recurrence-built f_{d+1}, the
    rescaled Krawtchouk polynomial and the rescaled product u(u-1)...(u-d)
    are not identical.
    """
    if d < 0 or n < 3:
        raise ValueError(f"need d >= 0 and n >= 3, got d={d}, n={n}")
    ps = krawtchouk_sequence(d)
    p_top = ps[d + 1]
    falling = poly_from_roots(range(d + 1))
    if p_top != falling:
        raise IdentityViolation("Krawtchouk factorization", {"d": d, "P": repr(p_top)})
    via_krawtchouk = _rescale(p_top, d, n, d + 1)
    via_roots = _rescale(falling, d, n, d + 1)
    via_recurrence = char_poly_recurrence(d, n)[d + 1]
    if not (via_krawtchouk == via_roots == via_recurrence):
        raise IdentityViolation("characteristic polynomial representations", {
            "d": d, "n": n, "recurrence": repr(via_recurrence), "krawtchouk": repr(via_krawtchouk),
        })
    return via_krawtchouk


def verify_krawtchouk(d_max: int, n: int) -> CheckResult:
    """Lower-degree members too: f_i equals the rescaled P_i for every 0 <= i <= d+1."""
    for d in range(d_max + 1):
        try:
            char_poly_krawtchouk(d, n)
        except IdentityViolation as exc:
            return CheckResult("tmodules.krawtchouk", False, exc.witness)
        fs = char_poly_recurrence(d, n)
        for i, p in enumerate(krawtchouk_sequence(d)):
            if _rescale(p, d, n, i) != fs[i]:
                return CheckResult("tmodules.krawtchouk", False, {"d": d, "n": n, "i": i})
    return CheckResult("tmodules.krawtchouk", True, detail={"d_max": d_max})


def claimed_roots(d: int, n: int) -> list[QuadScalar]:
    root = QuadScalar.sqrt_of(n - 1)
    return [root * (d - 2 * j) for j in range(d + 1)]


def rep_matrix_spectrum_check(d: int, n: int) -> CheckResult:
    """The (d+1)x(d+1) block is multiplicity-free with eigenvalues sqrt(n-1)(d-2j)."""
    name = "tmodules.rep_spectrum"
    rep = TridiagonalRep(d, n)
    roots = claimed_roots(d, n)
    f = rep.char_poly(roots[0].m)
    if f.degree != d + 1 or not f.is_monic():
        return CheckResult(name, False, {"d": d, "n": n, "degree": f.degree})
    for j, th in enumerate(roots):
        val = f(th)
        if val:
            return CheckResult(name, False, {"d": d, "n": n, "j": j, "value": format_scalar(val)})
    if len(set(roots)) != d + 1:
        return CheckResult(name, False, {"d": d, "n": n, "reason": "repeated root"})
    # d+1 distinct roots of a degree-(d+1) polynomial: all simple; numeric shadow as a sanity tie
    num = np.sort(np.linalg.eigvals(rep.matrix().astype(float)).real)
    err = float(np.max(np.abs(num - np.sort([float(x) for x in roots]))))
    if err > 1e-6 * max(1.0, float(abs(roots[0]))):
        return CheckResult(name, False, {"d": d, "n": n, "float_error": err})
    return CheckResult(name, True)


def eigenvalue_multiplicity_sum(i: int, D: int, n: int) -> int:
    """Sum of mult(r, d) over admissible (r, d) whose block has eigenvalue sqrt(n-1)(D-i).

    d runs over |D - i| <= d <= D with d - D + i even; r runs over the
    admissible range only, since the multiplicity formula is undefined for
    2r + d < D.
    """
    if not 0 <= i <= 2 * D:
        raise ValueError(f"eigenvalue index {i} outside 0..{2 * D}")
    total = 0
    for d in range(abs(D - i), D + 1):
        if (d - D + i) % 2:
            continue
        for r in range(0, D - d + 1):
            if is_admissible(r, d, D):
                total += multiplicity(r, d, D, n)
    return total


def multiplicity_sums(D: int, n: int) -> list[int]:
    return [eigenvalue_multiplicity_sum(i, D, n) for i in range(2 * D + 1)]
