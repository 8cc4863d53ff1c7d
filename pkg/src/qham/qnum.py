"""Exact arithmetic in the quadratic field Q(sqrt(m)) and polynomials over it."""
from __future__ import annotations

import math
import re
from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Union[int, Fraction]


class QuadArithmeticError(ArithmeticError):
    """Base class for errors raised by exact quadratic-field arithmetic."""


class QuadZeroDivisionError(QuadArithmeticError, ZeroDivisionError):
    """Raised when inverting or dividing by the zero element."""


class RadicandMismatchError(QuadArithmeticError, ValueError):
    """Raised when operands live in fields with different radicands."""


def normalize_radicand(k: int) -> tuple[int, int]:
    """Split ``k`` as ``s**2 * m`` with ``m`` squarefree, so sqrt(k) = s*sqrt(m)."""
    if isinstance(k, bool) or not isinstance(k, int) or k < 1:
        raise ValueError(f"radicand must be a positive integer, got {k!r}")
    s, m = 1, 1
    rest = k
    p = 2
    while p * p <= rest:
        e = 0
        while rest % p == 0:
            rest //= p
            e += 1
        s *= p ** (e // 2)
        if e % 2:
            m *= p
        p += 1 if p == 2 else 2
    m *= rest
    return s, m


def is_squarefree(m: int) -> bool:
    return m >= 1 and normalize_radicand(m) == (1, m)


class QuadScalar:
    """Immutable element ``a + b*sqrt(m)`` with rational ``a`` and ``b``.

    ``m`` must be squarefree. For ``m == 1`` the value is folded into ``a``
    so that equality stays a plain field comparison.
    """

    __slots__ = ("_a", "_b", "_m")

    def __init__(self, a: Rational = 0, b: Rational = 0, m: int = 1) -> None:
        if not is_squarefree(m):
            raise ValueError(f"radicand {m} is not a squarefree positive integer")
        a = Fraction(a)
        b = Fraction(b)
        if m == 1:
            a, b = a + b, Fraction(0)
        object.__setattr__(self, "_a", a)
        object.__setattr__(self, "_b", b)
        object.__setattr__(self, "_m", m)

    def __setattr__(self, name, value):
        raise AttributeError("QuadScalar is immutable")

    @classmethod
    def _raw(cls, a: Fraction, b: Fraction, m: int) -> "QuadScalar":
        # trusted constructor: m already validated, m == 1 implies b == 0
        obj = object.__new__(cls)
        object.__setattr__(obj, "_a", a)
        object.__setattr__(obj, "_b", b)
        object.__setattr__(obj, "_m", m)
        return obj

    @classmethod
    def sqrt_of(cls, k: int) -> "QuadScalar":
        """Exact sqrt(k) for a positive integer ``k``."""
        s, m = normalize_radicand(k)
        if m == 1:
            return cls(s, 0, 1)
        return cls(0, s, m)

    @property
    def a(self) -> Fraction:
        return self._a

    @property
    def b(self) -> Fraction:
        return self._b

    @property
    def m(self) -> int:
        return self._m

    def is_rational(self) -> bool:
        return self._b == 0

    def conjugate(self) -> "QuadScalar":
        return QuadScalar._raw(self._a, -self._b, self._m)

    def norm(self) -> Fraction:
        return self._a * self._a - self._m * self._b * self._b

    def _coerce(self, other) -> "QuadScalar":
        if isinstance(other, QuadScalar):
            if other._m == self._m:
                return other
            if other._b == 0:
                return QuadScalar._raw(other._a, Fraction(0), self._m)
            if self._b == 0:
                return other
            raise RadicandMismatchError(
                f"cannot combine elements of Q(sqrt({self._m})) and Q(sqrt({other._m}))"
            )
        if isinstance(other, (int, Fraction)) and not isinstance(other, bool):
            return QuadScalar._raw(Fraction(other), Fraction(0), self._m)
        return NotImplemented

    def _common(self, other) -> tuple["QuadScalar", "QuadScalar"]:
        o = self._coerce(other)
        if o is NotImplemented:
            return self, o
        if o._m != self._m:
            # self is rational, o carries the radicand
            return QuadScalar._raw(self._a, Fraction(0), o._m), o
        return self, o

    def __add__(self, other):
        x, y = self._common(other)
        if y is NotImplemented:
            return NotImplemented
        return QuadScalar._raw(x._a + y._a, x._b + y._b, x._m)

    __radd__ = __add__

    def __neg__(self) -> "QuadScalar":
        return QuadScalar._raw(-self._a, -self._b, self._m)

    def __pos__(self) -> "QuadScalar":
        return self

    def __sub__(self, other):
        x, y = self._common(other)
        if y is NotImplemented:
            return NotImplemented
        return QuadScalar._raw(x._a - y._a, x._b - y._b, x._m)

    def __rsub__(self, other):
        return (-self).__add__(other)

    def __mul__(self, other):
        x, y = self._common(other)
        if y is NotImplemented:
            return NotImplemented
        return QuadScalar._raw(
            x._a * y._a + x._m * x._b * y._b, x._a * y._b + x._b * y._a, x._m
        )

    __rmul__ = __mul__

    def inverse(self) -> "QuadScalar":
        nrm = self.norm()
        if nrm == 0:
            raise QuadZeroDivisionError("inverse of zero in Q(sqrt(m))")
        return QuadScalar._raw(self._a / nrm, -self._b / nrm, self._m)

    def __truediv__(self, other):
        x, y = self._common(other)
        if y is NotImplemented:
            return NotImplemented
        return x * y.inverse()

    def __rtruediv__(self, other):
        x, y = self._common(other)
        if y is NotImplemented:
            return NotImplemented
        return y * x.inverse()

    def __pow__(self, e: int) -> "QuadScalar":
        if not isinstance(e, int):
            return NotImplemented
        if e < 0:
            return self.inverse() ** (-e)
        result = QuadScalar._raw(Fraction(1), Fraction(0), self._m)
        base = self
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def __eq__(self, other) -> bool:
        try:
            x, y = self._common(other)
        except RadicandMismatchError:
            return False
        if y is NotImplemented:
            return NotImplemented
        return x._a == y._a and x._b == y._b

    def __hash__(self) -> int:
        if self._b == 0:
            return hash(self._a)
        return hash((self._a, self._b, self._m))

    def __bool__(self) -> bool:
        return self._a != 0 or self._b != 0

    def __float__(self) -> float:
        return float(self._a) + float(self._b) * math.sqrt(self._m)

    def sign(self) -> int:
        """Exact sign of the real number a + b*sqrt(m)."""
        sa = (self._a > 0) - (self._a < 0)
        sb = (self._b > 0) - (self._b < 0)
        if sb == 0:
            return sa
        if sa == 0 or sa == sb:
            return sb
        # opposite signs: compare a^2 against m*b^2
        diff = self._a * self._a - self._m * self._b * self._b
        return sa if diff > 0 else sb

    def __abs__(self) -> "QuadScalar":
        return -self if self.sign() < 0 else self

    def __lt__(self, other) -> bool:
        return (self - other).sign() < 0

    def __le__(self, other) -> bool:
        return (self - other).sign() <= 0

    def __gt__(self, other) -> bool:
        return (self - other).sign() > 0

    def __ge__(self, other) -> bool:
        return (self - other).sign() >= 0

    def __repr__(self) -> str:
        return f"QuadScalar({self._a}, {self._b}, m={self._m})"

    def __str__(self) -> str:
        return format_scalar(self)


def quad_add(x: QuadScalar, y: QuadScalar) -> QuadScalar:
    _check_same_field(x, y)
    return x + y


def quad_mul(x: QuadScalar, y: QuadScalar) -> QuadScalar:
    _check_same_field(x, y)
    return x * y


def quad_inv(x: QuadScalar) -> QuadScalar:
    return x.inverse()


def quad_eq(x: QuadScalar, y: QuadScalar) -> bool:
    _check_same_field(x, y)
    return x == y


def _check_same_field(x: QuadScalar, y: QuadScalar) -> None:
    if x.m != y.m:
        raise RadicandMismatchError(f"operands use radicands {x.m} and {y.m}")


def format_scalar(x: QuadScalar) -> str:
    """Render as ``"a + b*sqrt(m)"`` with reduced rationals."""
    return f"{x.a} + {x.b}*sqrt({x.m})"


_RAT = r"[+-]?\d+(?:/\d+)?"
_SCALAR_RE = re.compile(
    rf"^\s*(?P<a>{_RAT})\s*\+\s*(?P<b>{_RAT})\s*\*\s*sqrt\(\s*(?P<m>\d+)\s*\)\s*$"
)
_RAT_RE = re.compile(rf"^\s*(?P<a>{_RAT})\s*$")


def parse_scalar(text: str, m: int | None = None) -> QuadScalar:
    """Inverse of :func:`format_scalar`; a bare rational ``"p/q"`` is also accepted.

    When ``m`` is given, the parsed value is placed in Q(sqrt(m)) and a
    conflicting explicit radicand raises :class:`RadicandMismatchError`.
    """
    match = _SCALAR_RE.match(text)
    if match:
        a = Fraction(match["a"])
        b = Fraction(match["b"])
        mm = int(match["m"])
        if not is_squarefree(mm):
            raise ValueError(f"radicand {mm} in {text!r} is not squarefree")
        value = QuadScalar(a, b, mm)
        if m is None or m == mm:
            return value
        if value.is_rational():
            return QuadScalar(value.a, 0, m)
        raise RadicandMismatchError(f"{text!r} does not lie in Q(sqrt({m}))")
    match = _RAT_RE.match(text)
    if match:
        return QuadScalar(Fraction(match["a"]), 0, 1 if m is None else m)
    raise ValueError(f"cannot parse scalar {text!r}")


class QuadPolynomial:
    """Dense univariate polynomial over Q(sqrt(m)), coefficients lowest degree first."""

    __slots__ = ("_coeffs", "_m")

    def __init__(self, coeffs: Iterable, m: int | None = None) -> None:
        raw = list(coeffs)
        if m is None:
            radicands = {c.m for c in raw if isinstance(c, QuadScalar) and not c.is_rational()}
            if len(radicands) > 1:
                raise RadicandMismatchError(f"mixed radicands {sorted(radicands)}")
            m = radicands.pop() if radicands else 1
        cs = [_as_scalar(c, m) for c in raw]
        while cs and not cs[-1]:
            cs.pop()
        self._coeffs = tuple(cs)
        self._m = m

    @classmethod
    def monomial(cls, degree: int, coeff=1, m: int = 1) -> "QuadPolynomial":
        return cls([0] * degree + [coeff], m)

    @classmethod
    def identity(cls, m: int = 1) -> "QuadPolynomial":
        return cls([0, 1], m)

    @property
    def coeffs(self) -> tuple[QuadScalar, ...]:
        return self._coeffs

    @property
    def m(self) -> int:
        return self._m

    @property
    def degree(self) -> int:
        """Degree, with -1 for the zero polynomial."""
        return len(self._coeffs) - 1

    def is_zero(self) -> bool:
        return not self._coeffs

    def leading(self) -> QuadScalar:
        if not self._coeffs:
            return QuadScalar(0, 0, self._m)
        return self._coeffs[-1]

    def is_monic(self) -> bool:
        return bool(self._coeffs) and self._coeffs[-1] == 1

    def _field(self, other: "QuadPolynomial") -> int:
        if self._m == other._m:
            return self._m
        if all(c.is_rational() for c in self._coeffs):
            return other._m
        if all(c.is_rational() for c in other._coeffs):
            return self._m
        raise RadicandMismatchError(f"polynomials over radicands {self._m} and {other._m}")

    def _lift(self, other) -> "QuadPolynomial":
        if isinstance(other, QuadPolynomial):
            return other
        return QuadPolynomial([other], self._m if not isinstance(other, QuadScalar) or other.is_rational() else other.m)

    def __add__(self, other):
        other = self._lift(other)
        m = self._field(other)
        n = max(len(self._coeffs), len(other._coeffs))
        zero = QuadScalar(0, 0, m)
        out = [
            (self._coeffs[i] if i < len(self._coeffs) else zero)
            + (other._coeffs[i] if i < len(other._coeffs) else zero)
            for i in range(n)
        ]
        return QuadPolynomial(out, m)

    __radd__ = __add__

    def __neg__(self) -> "QuadPolynomial":
        return QuadPolynomial([-c for c in self._coeffs], self._m)

    def __sub__(self, other):
        return self + (-self._lift(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._lift(other)
        m = self._field(other)
        if self.is_zero() or other.is_zero():
            return QuadPolynomial([], m)
        out = [QuadScalar(0, 0, m)] * (len(self._coeffs) + len(other._coeffs) - 1)
        for i, c in enumerate(self._coeffs):
            if not c:
                continue
            for j, d in enumerate(other._coeffs):
                out[i + j] = out[i + j] + c * d
        return QuadPolynomial(out, m)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "QuadPolynomial":
        result = QuadPolynomial([1], self._m)
        for _ in range(e):
            result = result * self
        return result

    def __call__(self, t) -> QuadScalar:
        return poly_eval(self, t)

    def __eq__(self, other) -> bool:
        if isinstance(other, QuadPolynomial):
            return self._coeffs == other._coeffs
        if isinstance(other, (int, Fraction, QuadScalar)):
            return self == self._lift(other)
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._coeffs)

    def divmod(self, divisor: "QuadPolynomial") -> tuple["QuadPolynomial", "QuadPolynomial"]:
        if divisor.is_zero():
            raise QuadZeroDivisionError("polynomial division by zero")
        m = self._field(divisor)
        rem = list(self._coeffs)
        lead_inv = divisor.leading().inverse()
        dd = divisor.degree
        quot = [QuadScalar(0, 0, m)] * max(len(rem) - dd, 0)
        for k in range(len(rem) - dd - 1, -1, -1):
            q = rem[k + dd] * lead_inv
            quot[k] = q
            if q:
                for j, c in enumerate(divisor._coeffs):
                    rem[k + j] = rem[k + j] - q * c
        return QuadPolynomial(quot, m), QuadPolynomial(rem[:dd], m)

    def __repr__(self) -> str:
        return f"QuadPolynomial([{', '.join(map(str, self._coeffs))}], m={self._m})"


def _as_scalar(c, m: int) -> QuadScalar:
    if isinstance(c, QuadScalar):
        if c.m == m:
            return c
        if c.is_rational():
            return QuadScalar._raw(c.a, Fraction(0), m)
        raise RadicandMismatchError(f"coefficient {c} is not in Q(sqrt({m}))")
    return QuadScalar(Fraction(c), 0, m)


def poly_eval(p: QuadPolynomial, t) -> QuadScalar:
    """Horner evaluation."""
    acc = QuadScalar(0, 0, p.m)
    for c in reversed(p.coeffs):
        acc = acc * t + c
    return acc


def poly_mul(p: QuadPolynomial, q: QuadPolynomial) -> QuadPolynomial:
    return p * q


def poly_sub(p: QuadPolynomial, q: QuadPolynomial) -> QuadPolynomial:
    return p - q


def poly_shift_scale(p: QuadPolynomial, alpha, beta) -> QuadPolynomial:
    """Return q with q(t) = p(alpha*t + beta)."""
    if not alpha:
        raise QuadZeroDivisionError("shift_scale requires a nonzero scale")
    inner = QuadPolynomial([beta, alpha])
    out = QuadPolynomial([], inner.m)
    for c in reversed(p.coeffs):
        out = out * inner + QuadPolynomial([c])
    return out


def poly_from_roots(roots: Sequence, leading=1) -> QuadPolynomial:
    out = QuadPolynomial([leading])
    for r in roots:
        out = out * QuadPolynomial([-r, 1])
    return out
