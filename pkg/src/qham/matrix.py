"""Dense exact matrices over Q(sqrt(m)).

A matrix is stored as ``(a + b*sqrt(m)) / den`` where ``a`` and ``b`` are
integer arrays and ``den`` is a positive integer. Integer arrays are kept as
``int64`` while their magnitudes allow it and fall back to Python-int
``object`` arrays otherwise, so no operation ever rounds.

Products are computed with float64 BLAS on limbs small enough that every
partial sum is an exactly representable integer (below 2**53), then
recombined with integer shifts.
"""
from __future__ import annotations

import math
from fractions import Fraction
from functools import reduce
from typing import Iterable, Sequence

import numpy as np

from .qnum import QuadScalar, RadicandMismatchError, format_scalar, parse_scalar

_FLOAT_EXACT = 1 << 53
_INT64_SAFE = 1 << 62


def maxabs(x: np.ndarray) -> int:
    if x.size == 0:
        return 0
    if x.dtype == object:
        return max(abs(int(v)) for v in x.flat)
    return int(np.abs(x).max())


def as_int_array(x) -> np.ndarray:
    """Return an exact integer array, int64 when every entry fits."""
    arr = np.asarray(x)
    if arr.dtype == object:
        if maxabs(arr) < _INT64_SAFE:
            return arr.astype(np.int64)
        return arr
    if arr.dtype.kind == "b" or arr.dtype.kind in "iu":
        return arr.astype(np.int64)
    raise TypeError(f"expected an integer array, got dtype {arr.dtype}")


def _to_object(x: np.ndarray) -> np.ndarray:
    if x.dtype == object:
        return x
    out = np.empty(x.shape, dtype=object)
    out[...] = x.tolist() if x.ndim else int(x)
    return out


def int_scale(x: np.ndarray, c: int) -> np.ndarray:
    c = int(c)
    if c == 1:
        return x
    if x.dtype != object and maxabs(x) * abs(c) < _INT64_SAFE:
        return x * np.int64(c)
    return as_int_array(_to_object(x) * c)


def int_add(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if x.dtype != object and y.dtype != object and maxabs(x) + maxabs(y) < _INT64_SAFE:
        return x + y
    return as_int_array(_to_object(x) + _to_object(y))


def _limbs(x: np.ndarray, bits: int, count: int) -> list[np.ndarray]:
    """Signed base-2**bits digits of ``x``; each digit array has |entry| < 2**bits."""
    mask = (1 << bits) - 1
    if x.dtype == object:
        sign = np.vectorize(lambda v: -1 if v < 0 else 1, otypes=[np.int64])(x)
        mag = np.abs(x)
        out = []
        for p in range(count):
            digit = (mag >> (bits * p)) & mask
            out.append(digit.astype(np.int64) * sign)
        return out
    sign = np.where(x < 0, -1, 1).astype(np.int64)
    mag = np.abs(x)
    return [((mag >> (bits * p)) & mask) * sign for p in range(count)]


def int_matmul(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Exact integer matrix product."""
    inner = x.shape[1]
    bx, by = maxabs(x), maxabs(y)
    if bx == 0 or by == 0:
        return np.zeros((x.shape[0], y.shape[1]), dtype=np.int64)
    if bx * by * inner < _FLOAT_EXACT:
        prod = x.astype(np.float64) @ y.astype(np.float64)
        return np.rint(prod).astype(np.int64)
    bits = (52 - max(inner - 1, 1).bit_length()) // 2
    px = -(-bx.bit_length() // bits)
    py = -(-by.bit_length() // bits)
    xl = [limb.astype(np.float64) for limb in _limbs(x, bits, px)]
    yl = [limb.astype(np.float64) for limb in _limbs(y, bits, py)]
    total_bound = bx * by * inner
    wide = total_bound >= _INT64_SAFE
    acc = None
    for p in range(px):
        for q in range(py):
            part = np.rint(xl[p] @ yl[q]).astype(np.int64)
            shift = bits * (p + q)
            if wide:
                part = _to_object(part) * (1 << shift)
            else:
                part = part << shift
            acc = part if acc is None else acc + part
    return as_int_array(acc)


def _array_gcd(x: np.ndarray) -> int:
    if x.size == 0:
        return 0
    if x.dtype == object:
        return math.gcd(*(int(v) for v in x.flat))
    return int(np.gcd.reduce(x.ravel()))


class ExactMatrix:
    """Immutable square or rectangular matrix with entries in Q(sqrt(m))."""

    __slots__ = ("a", "b", "den", "m")

    def __init__(self, a, b=None, den: int = 1, m: int = 1, *, _normalized: bool = False) -> None:
        a = as_int_array(a)
        if b is not None:
            b = as_int_array(b)
            if b.shape != a.shape:
                raise ValueError("rational and irrational parts differ in shape")
        den = int(den)
        if den == 0:
            raise ZeroDivisionError("matrix denominator is zero")
        if m == 1 and b is not None:
            a, b = int_add(a, b), None
        if not _normalized:
            a, b, den = _normalize(a, b, den)
        self.a = a
        self.b = b
        self.den = den
        self.m = m

    # construction -------------------------------------------------------

    @classmethod
    def from_ints(cls, arr, m: int = 1) -> "ExactMatrix":
        return cls(arr, None, 1, m)

    @classmethod
    def identity(cls, order: int, m: int = 1) -> "ExactMatrix":
        return cls(np.eye(order, dtype=np.int64), None, 1, m, _normalized=True)

    @classmethod
    def zeros(cls, rows: int, cols: int | None = None, m: int = 1) -> "ExactMatrix":
        return cls(np.zeros((rows, rows if cols is None else cols), dtype=np.int64), None, 1, m,
                   _normalized=True)

    @classmethod
    def diagonal(cls, values: Sequence, m: int = 1) -> "ExactMatrix":
        n = len(values)
        scalars = [_scalar(v, m) for v in values]
        den = reduce(_lcm, (s.a.denominator for s in scalars), 1)
        den = reduce(_lcm, (s.b.denominator for s in scalars), den)
        a = np.zeros((n, n), dtype=object)
        b = np.zeros((n, n), dtype=object)
        for i, s in enumerate(scalars):
            a[i, i] = int(s.a * den)
            b[i, i] = int(s.b * den)
        return cls(a, b if m != 1 else None, den, m)

    @classmethod
    def from_scalars(cls, rows: Sequence[Sequence], m: int = 1) -> "ExactMatrix":
        scalars = [[_scalar(v, m) for v in row] for row in rows]
        den = 1
        for row in scalars:
            for s in row:
                den = _lcm(_lcm(den, s.a.denominator), s.b.denominator)
        a = np.array([[int(s.a * den) for s in row] for row in scalars], dtype=object)
        b = np.array([[int(s.b * den) for s in row] for row in scalars], dtype=object)
        if a.ndim != 2:
            a = a.reshape(len(scalars), -1)
            b = b.reshape(len(scalars), -1)
        return cls(a, b if m != 1 else None, den, m)

    @classmethod
    def combination(cls, coeffs: Sequence, mats: Sequence["ExactMatrix"]) -> "ExactMatrix":
        """Exact linear combination sum(c_k * M_k)."""
        if len(coeffs) != len(mats) or not mats:
            raise ValueError("need matching, nonempty coefficient and matrix lists")
        out = None
        for c, mat in zip(coeffs, mats):
            term = mat.scale(c)
            out = term if out is None else out + term
        return out

    # basic properties ---------------------------------------------------

    @property
    def shape(self) -> tuple[int, int]:
        return self.a.shape

    @property
    def order(self) -> int:
        return self.a.shape[0]

    def is_rational(self) -> bool:
        return self.b is None

    def is_zero(self) -> bool:
        return not self.a.any() and (self.b is None or not self.b.any())

    def nonzero_count(self) -> int:
        mask = self.a != 0
        if self.b is not None:
            mask = mask | (self.b != 0)
        return int(np.count_nonzero(mask))

    def nonzero_positions(self) -> np.ndarray:
        mask = self.a != 0
        if self.b is not None:
            mask = mask | (self.b != 0)
        return np.argwhere(mask)

    def entry(self, i: int, j: int) -> QuadScalar:
        a = Fraction(int(self.a[i, j]), self.den)
        b = Fraction(int(self.b[i, j]), self.den) if self.b is not None else 0
        return QuadScalar(a, b, self.m)

    def __getitem__(self, idx) -> QuadScalar:
        i, j = idx
        return self.entry(i, j)

    def trace(self) -> QuadScalar:
        a = sum(int(v) for v in np.diagonal(self.a))
        b = sum(int(v) for v in np.diagonal(self.b)) if self.b is not None else 0
        return QuadScalar(Fraction(a, self.den), Fraction(b, self.den), self.m)

    def diagonal_entries(self) -> list[QuadScalar]:
        return [self.entry(i, i) for i in range(min(self.shape))]

    def is_diagonal(self) -> bool:
        off = self.a.copy()
        np.fill_diagonal(off, 0)
        if off.any():
            return False
        if self.b is not None:
            off = self.b.copy()
            np.fill_diagonal(off, 0)
            return not off.any()
        return True

    def to_float(self) -> np.ndarray:
        out = self.a.astype(np.float64)
        if self.b is not None:
            out = out + self.b.astype(np.float64) * math.sqrt(self.m)
        return out / self.den

    # arithmetic ---------------------------------------------------------

    def _field(self, other: "ExactMatrix") -> int:
        if self.m == other.m:
            return self.m
        if self.b is None:
            return other.m
        if other.b is None:
            return self.m
        raise RadicandMismatchError(f"matrices over radicands {self.m} and {other.m}")

    def __add__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        m = self._field(other)
        den = _lcm(self.den, other.den)
        fs, fo = den // self.den, den // other.den
        a = int_add(int_scale(self.a, fs), int_scale(other.a, fo))
        b = _add_opt(_scale_opt(self.b, fs), _scale_opt(other.b, fo))
        return ExactMatrix(a, b, den, m)

    def __neg__(self) -> "ExactMatrix":
        return ExactMatrix(_neg(self.a), None if self.b is None else _neg(self.b), self.den, self.m,
                           _normalized=True)

    def __sub__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        return self + (-other)

    def scale(self, c) -> "ExactMatrix":
        """Multiply by a scalar in Q(sqrt(m))."""
        s = _scalar(c, self.m)
        if s.m != self.m and self.b is not None and not s.is_rational():
            raise RadicandMismatchError(f"scalar radicand {s.m} vs matrix radicand {self.m}")
        m = self.m if self.b is not None or s.is_rational() else s.m
        if not s:
            return ExactMatrix.zeros(*self.shape, m=m)
        sden = _lcm(s.a.denominator, s.b.denominator)
        sa, sb = int(s.a * sden), int(s.b * sden)
        # (a + b r)(sa + sb r) = a sa + m b sb + r (a sb + b sa)
        ra = int_scale(self.a, sa)
        rb = int_scale(self.a, sb) if sb else None
        if self.b is not None:
            if sb:
                ra = int_add(ra, int_scale(self.b, m * sb))
            rb = _add_opt(rb, int_scale(self.b, sa) if sa else None)
        return ExactMatrix(ra, rb, self.den * sden, m)

    def __mul__(self, c) -> "ExactMatrix":
        if isinstance(c, ExactMatrix):
            return NotImplemented
        return self.scale(c)

    __rmul__ = __mul__

    def __matmul__(self, other: "ExactMatrix") -> "ExactMatrix":
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape[1] != other.shape[0]:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        m = self._field(other)
        a = int_matmul(self.a, other.a)
        b = None
        if self.b is not None and other.b is not None:
            a = int_add(a, int_scale(int_matmul(self.b, other.b), m))
        if self.b is not None:
            b = int_matmul(self.b, other.a)
        if other.b is not None:
            b = _add_opt(b, int_matmul(self.a, other.b))
        return ExactMatrix(a, b, self.den * other.den, m)

    def __pow__(self, e: int) -> "ExactMatrix":
        if e < 0:
            raise ValueError("negative matrix powers are not supported")
        result = ExactMatrix.identity(self.order, self.m)
        for _ in range(e):
            result = result @ self
        return result

    @property
    def T(self) -> "ExactMatrix":
        return ExactMatrix(self.a.T.copy(), None if self.b is None else self.b.T.copy(), self.den,
                           self.m, _normalized=True)

    def __eq__(self, other) -> bool:
        if not isinstance(other, ExactMatrix):
            return NotImplemented
        if self.shape != other.shape:
            return False
        return (self - other).is_zero()

    __hash__ = None

    def first_difference(self, other: "ExactMatrix") -> tuple[int, int] | None:
        """Index of the first entry (row-major) where the two matrices differ."""
        diff = self - other
        pos = diff.nonzero_positions()
        if len(pos) == 0:
            return None
        return int(pos[0][0]), int(pos[0][1])

    def __repr__(self) -> str:
        return f"ExactMatrix(shape={self.shape}, den={self.den}, m={self.m})"


def _normalize(a: np.ndarray, b: np.ndarray | None, den: int):
    if b is not None and not b.any():
        b = None
    if den < 0:
        a = _neg(a)
        b = None if b is None else _neg(b)
        den = -den
    if den == 1:
        return a, b, den
    g = math.gcd(den, _array_gcd(a))
    if b is not None and g != 1:
        g = math.gcd(g, _array_gcd(b))
    if g > 1:
        a = _exact_div(a, g)
        b = None if b is None else _exact_div(b, g)
        den //= g
    return a, b, den


def _exact_div(x: np.ndarray, g: int) -> np.ndarray:
    if x.dtype == object:
        return as_int_array(x // g)
    return x // np.int64(g)


def _neg(x: np.ndarray) -> np.ndarray:
    return -x


def _scale_opt(x, c):
    return None if x is None else int_scale(x, c)


def _add_opt(x, y):
    if x is None:
        return y
    if y is None:
        return x
    return int_add(x, y)


def _lcm(x: int, y: int) -> int:
    return x * y // math.gcd(x, y)


def _scalar(v, m: int) -> QuadScalar:
    if isinstance(v, QuadScalar):
        return v
    return QuadScalar(Fraction(v), 0, m)


def dump_matrix(mat: ExactMatrix) -> str:
    """Text dump: header ``order <k>`` then one row per line of scalars."""
    lines = [f"order {mat.order}"]
    for i in range(mat.shape[0]):
        lines.append(" ".join(format_scalar(mat.entry(i, j)).replace(" ", "")
                              for j in range(mat.shape[1])))
    return "\n".join(lines) + "\n"


def load_matrix(text: str) -> ExactMatrix:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("order "):
        raise ValueError("matrix dump must start with 'order <k>'")
    order = int(lines[0].split()[1])
    rows = [[parse_scalar(tok.replace("+", " + ", 1)) for tok in ln.split()] for ln in lines[1:]]
    if len(rows) != order or any(len(r) != order for r in rows):
        raise ValueError(f"expected a {order}x{order} matrix")
    radicands = {s.m for r in rows for s in r if not s.is_rational()}
    if len(radicands) > 1:
        raise RadicandMismatchError(f"mixed radicands {sorted(radicands)} in dump")
    m = radicands.pop() if radicands else max((s.m for r in rows for s in r), default=1)
    return ExactMatrix.from_scalars(rows, m)


def stack_powers(base: ExactMatrix, top: int) -> list[ExactMatrix]:
    """[I, B, B^2, ..., B^top]."""
    out = [ExactMatrix.identity(base.order, base.m)]
    for _ in range(top):
        out.append(out[-1] @ base)
    return out


def all_zero(mats: Iterable[ExactMatrix]) -> bool:
    return all(mat.is_zero() for mat in mats)
