"""Scalar backends and small exact linear algebra.

Three scalar kinds flow through the package:

* exact rationals (``int`` / :class:`fractions.Fraction`),
* exact quadratic surds ``a + b*sqrt(d)`` (:class:`QuadraticSurd`),
* double precision ``float`` / ``complex``.

Functions elsewhere are written against ordinary arithmetic operators, so any
of the three kinds can be passed in.  Exact kinds compare exactly; floating
kinds use explicit tolerances.
"""

from __future__ import annotations

import cmath
import math
import re
from fractions import Fraction
from typing import Sequence

DEFAULT_TOL = 1e-9


class SingularMatrixError(ArithmeticError):
    pass


def _squarefree_split(n: int) -> tuple[int, int]:
    """Write ``n = s**2 * d`` with ``d`` squarefree; return ``(s, d)``."""
    sign = -1 if n < 0 else 1
    n = abs(n)
    s, d, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            s *= p
        if n % p == 0:
            n //= p
            d *= p
        p += 1
    return s, sign * d * n


class QuadraticSurd:
    """Exact element ``a + b*sqrt(d)`` of a quadratic field.

    ``d`` is a squarefree integer other than 0 and 1.  Arithmetic between two
    surds requires the same ``d``; rationals mix freely.
    """

    __slots__ = ("a", "b", "d")

    def __init__(self, a, b, d: int):
        if d in (0, 1) or _squarefree_split(d)[0] != 1:
            raise ValueError(f"d={d} is not a squarefree integer")
        self.a = Fraction(a)
        self.b = Fraction(b)
        self.d = int(d)

    @staticmethod
    def make(a, b, d):
        """Like the constructor but collapses to a Fraction when ``b == 0``."""
        if b == 0:
            return Fraction(a)
        return QuadraticSurd(a, b, d)

    def _coerce(self, other):
        if isinstance(other, QuadraticSurd):
            if other.d != self.d:
                raise TypeError(f"cannot mix sqrt({self.d}) and sqrt({other.d})")
            return other.a, other.b
        if isinstance(other, (int, Fraction)):
            return Fraction(other), Fraction(0)
        return None

    def __float__(self):
        if self.d < 0:
            raise TypeError("complex surd has no real value")
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def __complex__(self):
        return complex(self.a) + complex(self.b) * cmath.sqrt(self.d)

    def __add__(self, other):
        c = self._coerce(other)
        if c is None:
            return _to_float_like(self) + other
        return QuadraticSurd.make(self.a + c[0], self.b + c[1], self.d)

    __radd__ = __add__

    def __neg__(self):
        return QuadraticSurd(-self.a, -self.b, self.d)

    def __pos__(self):
        return self

    def __sub__(self, other):
        c = self._coerce(other)
        if c is None:
            return _to_float_like(self) - other
        return QuadraticSurd.make(self.a - c[0], self.b - c[1], self.d)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        c = self._coerce(other)
        if c is None:
            return _to_float_like(self) * other
        a, b = c
        return QuadraticSurd.make(
            self.a * a + self.b * b * self.d, self.a * b + self.b * a, self.d
        )

    __rmul__ = __mul__

    def conjugate(self):
        return QuadraticSurd(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.b * self.b * self.d

    def inverse(self):
        n = self.norm()
        if n == 0:
            raise ZeroDivisionError("surd division by zero")
        return QuadraticSurd.make(self.a / n, -self.b / n, self.d)

    def __truediv__(self, other):
        c = self._coerce(other)
        if c is None:
            return _to_float_like(self) / other
        a, b = c
        if b == 0:
            if a == 0:
                raise ZeroDivisionError("surd division by zero")
            return QuadraticSurd.make(self.a / a, self.b / a, self.d)
        return self * QuadraticSurd(a, b, self.d).inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return _to_float_like(self) ** k
        out = Fraction(1)
        base = self
        while k:
            if k & 1:
                out = base * out
            base = base * base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, QuadraticSurd):
            return (self.a, self.b, self.d) == (other.a, other.b, other.d)
        if isinstance(other, (int, Fraction)):
            return False  # b != 0 is guaranteed by make()
        if isinstance(other, (float, complex)):
            return complex(self) == other
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d))

    def sign(self) -> int:
        """Exact sign of a real surd."""
        if self.d < 0:
            raise TypeError("complex surd has no sign")
        sa = (self.a > 0) - (self.a < 0)
        sb = (self.b > 0) - (self.b < 0)
        if sa == sb or sb == 0:
            return sa
        if sa == 0:
            return sb
        # opposite signs: compare a**2 with b**2 * d
        return sa if self.norm() > 0 else -sa

    def _cmp(self, other) -> int:
        diff = self - other
        if isinstance(diff, QuadraticSurd):
            return diff.sign()
        return (diff > 0) - (diff < 0)

    def __lt__(self, other):
        return self._cmp(other) < 0

    def __le__(self, other):
        return self._cmp(other) <= 0

    def __gt__(self, other):
        return self._cmp(other) > 0

    def __ge__(self, other):
        return self._cmp(other) >= 0

    def __abs__(self):
        if self.d < 0:
            return abs(complex(self))
        return self if self.sign() >= 0 else -self

    def __repr__(self):
        return f"QuadraticSurd({self.a}, {self.b}, {self.d})"

    def __str__(self):
        return format_scalar(self)


def _to_float_like(x: QuadraticSurd):
    return complex(x) if x.d < 0 else float(x)


def is_exact(x) -> bool:
    return isinstance(x, (int, Fraction, QuadraticSurd)) and not isinstance(x, bool)


def exact_sqrt(r):
    """Exact square root of a rational as a Fraction or QuadraticSurd."""
    r = Fraction(r)
    if r == 0:
        return Fraction(0)
    p, q = r.numerator, r.denominator
    s, d = _squarefree_split(p * q)
    coef = Fraction(s, q)
    if d == 1:
        return coef
    return QuadraticSurd(0, coef, d)


def sqrt(x):
    """Square root preserving exactness when the radicand is rational."""
    if isinstance(x, (int, Fraction)):
        return exact_sqrt(x)
    if isinstance(x, QuadraticSurd):
        x = _to_float_like(x)
    if isinstance(x, complex) or x < 0:
        return cmath.sqrt(x)
    return math.sqrt(x)


def to_float(x) -> float:
    if isinstance(x, complex):
        if abs(x.imag) > 1e-12 * max(1.0, abs(x.real)):
            raise TypeError(f"{x} is not real")
        return x.real
    return float(x)


def is_real(x) -> bool:
    if isinstance(x, complex):
        return x.imag == 0
    if isinstance(x, QuadraticSurd):
        return x.d > 0
    return True


def is_zero(x, tol: float = DEFAULT_TOL) -> bool:
    if is_exact(x):
        return x == 0
    return abs(x) <= tol


def near(x, y, tol: float = DEFAULT_TOL) -> bool:
    """Exact equality when both sides are exact, ``|x-y| <= tol`` otherwise."""
    if is_exact(x) and is_exact(y):
        try:
            return x == y
        except TypeError:
            pass
    return abs(complex(x) - complex(y)) <= tol


def in_set(x, values, tol: float = DEFAULT_TOL) -> bool:
    return any(near(x, v, tol) for v in values)


def as_scalar(x):
    """Normalize ints to Fraction; leave other scalars untouched."""
    if isinstance(x, bool):
        raise TypeError("bool is not a scalar")
    if isinstance(x, int):
        return Fraction(x)
    return x


_SURD_RE = re.compile(
    r"""^\(?(?:(?P<a>[-+]?\d+(?:/\d+)?)(?=[-+]))?
        (?P<sign>[-+])?
        (?:(?P<b>\d+(?:/\d+)?)\*?)?
        sqrt\(?(?P<d>-?\d+)\)?\)?
        (?:/(?P<den>\d+))?$""",
    re.VERBOSE,
)


def parse_scalar(text: str, backend: str = "rational"):
    """Parse ``"7/2"``, ``"0.5"``, ``"(5+sqrt(5))/2"``, ``"3-sqrt3"``.

    With ``backend="float"`` the value is converted to float (or complex).
    """
    s = text.strip().replace(" ", "").replace("√", "sqrt")
    if "sqrt" in s:
        m = _SURD_RE.match(s)
        if not m or (m["sign"] is None and m["a"] is not None):
            raise ValueError(f"cannot parse scalar {text!r}")
        a = Fraction(m["a"] or 0)
        b = Fraction(m["b"] or 1)
        if m["sign"] == "-":
            b = -b
        value = (a + b * exact_sqrt(int(m["d"]))) / Fraction(m["den"] or 1)
    else:
        try:
            value = Fraction(s)
        except (ValueError, ZeroDivisionError):
            value = complex(s.replace("i", "j"))
    if backend == "float":
        c = complex(value)
        return c.real if c.imag == 0 else c
    return value


def format_scalar(x) -> str:
    if isinstance(x, QuadraticSurd):
        den = math.lcm(x.a.denominator, x.b.denominator)
        A, B = x.a * den, abs(x.b) * den
        sign = "-" if x.b < 0 else "+"
        bs = "" if B == 1 else f"{B}*"
        if A != 0:
            core = f"{A}{sign}{bs}sqrt({x.d})"
        else:
            core = f"{'-' if sign == '-' else ''}{bs}sqrt({x.d})"
        return f"({core})/{den}" if den != 1 else core
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, complex):
        return repr(x) if x.imag else repr(x.real)
    return repr(x)


# Gauss-Jordan elimination over Q, Q(sqrt d) or floats.


def _pivot_key(x):
    try:
        return abs(complex(x))
    except TypeError:
        return 0.0


def _row_reduce(rows: list[list], tol: float) -> list[int]:
    """In-place reduced row echelon form; returns the pivot columns."""
    nrows = len(rows)
    ncols = len(rows[0]) if rows else 0
    pivots = []
    r = 0
    for c in range(ncols):
        if r >= nrows:
            break
        cand = [i for i in range(r, nrows) if not is_zero(rows[i][c], tol)]
        if not cand:
            continue
        p = max(cand, key=lambda i: _pivot_key(rows[i][c]))
        rows[r], rows[p] = rows[p], rows[r]
        inv = 1 / rows[r][c]
        rows[r] = [v * inv for v in rows[r]]
        for i in range(nrows):
            if i != r and not is_zero(rows[i][c], 0.0):
                f = rows[i][c]
                rows[i] = [a - f * b for a, b in zip(rows[i], rows[r])]
        pivots.append(c)
        r += 1
    return pivots


def rank(matrix: Sequence[Sequence], tol: float = DEFAULT_TOL) -> int:
    rows = [list(map(as_scalar, row)) for row in matrix]
    if not rows:
        return 0
    return len(_row_reduce(rows, tol))


def solve(matrix: Sequence[Sequence], rhs: Sequence, tol: float = DEFAULT_TOL) -> list:
    """Solve a square system; exact when the entries are exact."""
    n = len(matrix)
    rows = [list(map(as_scalar, row)) + [as_scalar(b)] for row, b in zip(matrix, rhs)]
    pivots = _row_reduce(rows, tol)
    if len(pivots) < n or pivots[-1] >= n:
        raise SingularMatrixError("matrix is singular")
    return [rows[i][n] for i in range(n)]


def nullspace(matrix: Sequence[Sequence], tol: float = DEFAULT_TOL) -> list[list]:
    """Basis of the right null space."""
    rows = [list(map(as_scalar, row)) for row in matrix]
    ncols = len(rows[0])
    pivots = _row_reduce(rows, tol)
    basis = []
    for fcol in (c for c in range(ncols) if c not in pivots):
        vec = [Fraction(0)] * ncols
        vec[fcol] = Fraction(1)
        for i, pc in enumerate(pivots):
            vec[pc] = -rows[i][fcol]
        basis.append(vec)
    return basis
