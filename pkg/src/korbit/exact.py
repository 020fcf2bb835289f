"""Exact scalars and small dense linear algebra over Q and Q(i).

Everything here works on plain nested lists.  The elimination routines only
need ``+ - * /`` and comparison with zero, so they accept both
:class:`fractions.Fraction` entries and :class:`GaussianRational` entries.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational
from typing import Sequence, Union


class MalformedRationalError(ValueError):
    """A value could not be read as an exact rational."""


def to_fraction(value) -> Fraction:
    """Read ``value`` (int, Fraction, decimal float/str or ``"n/d"``) exactly.

    Floats are read through their shortest repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise MalformedRationalError(f"not a rational: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, Rational):
        return Fraction(value)
    if isinstance(value, float):
        if value != value or value in (float("inf"), float("-inf")):
            raise MalformedRationalError(f"not a finite rational: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise MalformedRationalError(f"malformed rational {value!r}") from exc
    raise MalformedRationalError(f"not a rational: {value!r}")


def fraction_str(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number ``re + i*im`` with rational parts."""

    re: Fraction = Fraction(0)
    im: Fraction = Fraction(0)

    def __post_init__(self):
        object.__setattr__(self, "re", to_fraction(self.re))
        object.__setattr__(self, "im", to_fraction(self.im))

    @classmethod
    def coerce(cls, value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        if isinstance(value, (tuple, list)) and len(value) == 2:
            return cls(to_fraction(value[0]), to_fraction(value[1]))
        if isinstance(value, complex):
            return cls(to_fraction(value.real), to_fraction(value.imag))
        return cls(to_fraction(value), Fraction(0))

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __sub__(self, other):
        return self + (-GaussianRational.coerce(other))

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im,
                                self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("Gaussian rational division by zero")
        num = self * o.conjugate()
        return GaussianRational(num.re / n, num.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except MalformedRationalError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({fraction_str(self.re)}, {fraction_str(self.im)})"


Scalar = Union[Fraction, GaussianRational]
Matrix = list  # list of rows


def zeros(rows: int, cols: int) -> Matrix:
    return [[Fraction(0)] * cols for _ in range(rows)]


def identity(n: int) -> Matrix:
    return [[Fraction(int(i == j)) for j in range(n)] for i in range(n)]


def rref(matrix: Sequence[Sequence[Scalar]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form and pivot columns (Gauss-Jordan)."""
    m = [list(row) for row in matrix]
    if not m:
        return m, []
    n_rows, n_cols = len(m), len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(n_cols):
        if r == n_rows:
            break
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = 1 / m[r][c]
        m[r] = [x * inv for x in m[r]]
        for i in range(n_rows):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    return m, pivots


def rank(matrix: Sequence[Sequence[Scalar]]) -> int:
    """Exact rank by forward elimination."""
    m = [list(row) for row in matrix]
    if not m or not m[0]:
        return 0
    n_rows, n_cols = len(m), len(m[0])
    r = 0
    for c in range(n_cols):
        piv = next((i for i in range(r, n_rows) if m[i][c] != 0), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        for i in range(r + 1, n_rows):
            if m[i][c] != 0:
                f = m[i][c] / m[r][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        r += 1
        if r == n_rows:
            break
    return r


def nullspace(matrix: Sequence[Sequence[Scalar]], n_cols: int | None = None) -> list[list[Scalar]]:
    """Basis of ``{x : M x = 0}``; one vector per free column, free entry 1."""
    if not matrix:
        if n_cols is None:
            raise ValueError("n_cols required for an empty matrix")
        return [[Fraction(int(i == j)) for i in range(n_cols)] for j in range(n_cols)]
    red, pivots = rref(matrix)
    n = len(red[0])
    zero = red[0][0] * 0
    basis = []
    for free in (c for c in range(n) if c not in pivots):
        v = [zero] * n
        v[free] = zero + 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[free]
        basis.append(v)
    return basis


def inverse(matrix: Sequence[Sequence[Scalar]]) -> Matrix:
    n = len(matrix)
    aug = [list(row) + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(matrix)]
    red, pivots = rref(aug)
    if pivots[:n] != list(range(n)):
        raise ZeroDivisionError("matrix is singular")
    return [row[n:] for row in red]


def det(matrix: Sequence[Sequence[Fraction]]) -> Fraction:
    m = [list(row) for row in matrix]
    n = len(m)
    d = Fraction(1)
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            d = -d
        d *= m[c][c]
        for i in range(c + 1, n):
            if m[i][c] != 0:
                f = m[i][c] / m[c][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[c])]
    return d


def solve_in_span(basis: Sequence[Sequence[Scalar]], target: Sequence[Scalar]):
    """Coefficients ``c`` with ``sum c_i basis_i == target``, or None.

    ``basis`` must be linearly independent.
    """
    k = len(basis)
    n = len(target)
    aug = [[basis[j][i] for j in range(k)] + [target[i]] for i in range(n)]
    red, pivots = rref(aug)
    if k in pivots:
        return None
    coeffs = [target[0] * 0] * k
    for row, pc in zip(red, pivots):
        coeffs[pc] = row[k]
    return coeffs


def independent_rows(vectors: Sequence[Sequence[Scalar]]) -> list[list[Scalar]]:
    """A reduced basis (RREF rows) of the span of ``vectors``."""
    if not vectors:
        return []
    red, pivots = rref(vectors)
    return [list(r) for r in red[: len(pivots)]]
