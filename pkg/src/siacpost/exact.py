"""Exact rational scalars, dense matrices, and polynomials.

All kernel construction runs on ``fractions.Fraction`` (arbitrary-precision
rationals).  The text form of a rational is ``str(Fraction)``, i.e. "p/q"
with "/q" omitted when q == 1, and ``Fraction("p/q")`` parses it back.
Floating point enters only at explicit ``to_float`` snapshots.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence, Union

Rational = Fraction
RationalLike = Union[Fraction, int, str]


class SingularMatrixError(ArithmeticError):
    """Elimination hit a zero determinant."""


def rat(value: RationalLike, den: int | None = None) -> Fraction:
    """Build an exact rational. Floats are rejected: pass "p/q" instead."""
    if den is not None:
        return Fraction(value, den)
    if isinstance(value, float):
        raise TypeError("floats are not exact; pass int, 'p/q' string, or Fraction")
    return Fraction(value)


class RatMatrix:
    """Dense rational matrix, entries stored row-major."""

    __slots__ = ("rows", "cols", "entries")

    def __init__(self, rows: int, cols: int, entries: Iterable[RationalLike]):
        self.rows = rows
        self.cols = cols
        self.entries = [rat(e) if not isinstance(e, Fraction) else e for e in entries]
        if len(self.entries) != rows * cols:
            raise ValueError(f"need {rows * cols} entries, got {len(self.entries)}")

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[RationalLike]]) -> "RatMatrix":
        nr = len(rows)
        nc = len(rows[0]) if nr else 0
        flat = [e for row in rows for e in row]
        return cls(nr, nc, flat)

    @classmethod
    def identity(cls, n: int) -> "RatMatrix":
        return cls(n, n, [Fraction(int(i == j)) for i in range(n) for j in range(n)])

    @classmethod
    def column(cls, values: Sequence[RationalLike]) -> "RatMatrix":
        return cls(len(values), 1, list(values))

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self.entries[i * self.cols + j]

    def __setitem__(self, ij: tuple[int, int], value: RationalLike) -> None:
        i, j = ij
        self.entries[i * self.cols + j] = rat(value) if not isinstance(value, Fraction) else value

    def row(self, i: int) -> list[Fraction]:
        return self.entries[i * self.cols:(i + 1) * self.cols]

    def col(self, j: int) -> list[Fraction]:
        return self.entries[j::self.cols]

    def to_rows(self) -> list[list[Fraction]]:
        return [self.row(i) for i in range(self.rows)]

    def transpose(self) -> "RatMatrix":
        return RatMatrix(self.cols, self.rows,
                         [self[i, j] for j in range(self.cols) for i in range(self.rows)])

    def __matmul__(self, other: "RatMatrix") -> "RatMatrix":
        if self.cols != other.rows:
            raise ValueError("dimension mismatch")
        out = []
        orows = other.to_rows()
        for i in range(self.rows):
            mine = self.row(i)
            acc = [Fraction(0)] * other.cols
            for k, a in enumerate(mine):
                if a:
                    ork = orows[k]
                    for j in range(other.cols):
                        acc[j] += a * ork[j]
            out.extend(acc)
        return RatMatrix(self.rows, other.cols, out)

    def __eq__(self, other: object) -> bool:
        return (isinstance(other, RatMatrix) and self.rows == other.rows
                and self.cols == other.cols and self.entries == other.entries)

    def __hash__(self):
        return hash((self.rows, self.cols, tuple(self.entries)))

    def to_float(self) -> list[list[float]]:
        return [[float(e) for e in self.row(i)] for i in range(self.rows)]

    def __repr__(self) -> str:
        body = "; ".join(" ".join(str(e) for e in self.row(i)) for i in range(self.rows))
        return f"RatMatrix({self.rows}x{self.cols}: {body})"


def det_exact(a: RatMatrix) -> Fraction:
    """Determinant by exact elimination (first-nonzero pivot per column)."""
    if a.rows != a.cols:
        raise ValueError("determinant needs a square matrix")
    n = a.rows
    m = a.to_rows()
    det = Fraction(1)
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
            det = -det
        det *= m[col][col]
        inv = 1 / m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] * inv
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def solve_exact(a: RatMatrix, b: RatMatrix | Sequence[RationalLike]) -> RatMatrix:
    """Solve A x = b exactly by Gaussian elimination over the rationals.

    Pivoting picks the first nonzero entry per column (exact arithmetic
    needs no magnitude-based pivoting; first-nonzero keeps the result
    deterministic).  Raises SingularMatrixError when det(A) = 0.
    """
    if not isinstance(b, RatMatrix):
        b = RatMatrix.column(list(b))
    if a.rows != a.cols:
        raise ValueError("matrix must be square")
    if b.rows != a.rows:
        raise ValueError("right-hand side has wrong length")
    n = a.rows
    m = [a.row(i) + b.row(i) for i in range(n)]
    width = n + b.cols
    for col in range(n):
        piv = next((r for r in range(col, n) if m[r][col] != 0), None)
        if piv is None:
            raise SingularMatrixError("matrix is singular")
        if piv != col:
            m[col], m[piv] = m[piv], m[col]
        inv = 1 / m[col][col]
        m[col] = [x * inv for x in m[col]]
        for r in range(col + 1, n):
            f = m[r][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    # back substitution
    for col in range(n - 1, -1, -1):
        for r in range(col):
            f = m[r][col]
            if f:
                m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    flat = [m[i][n + j] for i in range(n) for j in range(b.cols)]
    return RatMatrix(n, b.cols, flat)


def invert_exact(a: RatMatrix) -> RatMatrix:
    """Return A^-1 with A @ A^-1 = I exactly."""
    return solve_exact(a, RatMatrix.identity(a.rows))


class RatPoly:
    """Polynomial with rational coefficients, ascending powers of (x - center).

    Trailing zero coefficients are trimmed; the zero polynomial is [0].
    """

    __slots__ = ("coeffs", "center")

    def __init__(self, coeffs: Iterable[RationalLike], center: RationalLike = 0):
        cs = [rat(c) if not isinstance(c, Fraction) else c for c in coeffs]
        while len(cs) > 1 and cs[-1] == 0:
            cs.pop()
        if not cs:
            cs = [Fraction(0)]
        self.coeffs = tuple(cs)
        self.center = rat(center) if not isinstance(center, Fraction) else center

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def __call__(self, x):
        """Horner evaluation; works for Fraction, int, and float arguments."""
        acc = self.coeffs[-1]
        z = x - self.center
        for c in reversed(self.coeffs[:-1]):
            acc = acc * z + c
        return acc

    def recentered(self, new_center: RationalLike) -> "RatPoly":
        """Exact re-expansion about a different center."""
        nc = rat(new_center) if not isinstance(new_center, Fraction) else new_center
        shift = nc - self.center  # (x - c_old) = (x - c_new) + shift
        out = [Fraction(0)]
        for c in reversed(self.coeffs):
            out = _poly_mul_linear(out, shift)
            out[0] += c
        return RatPoly(out, nc)

    def compose_affine(self, scale: RationalLike, offset: RationalLike) -> "RatPoly":
        """Return q with q(x) = p(scale*x + offset), centered at 0."""
        s = rat(scale) if not isinstance(scale, Fraction) else scale
        t = rat(offset) if not isinstance(offset, Fraction) else offset
        # argument minus center as a linear poly in x
        lin = [t - self.center, s]
        out = [Fraction(0)]
        for c in reversed(self.coeffs):
            out = _poly_mul(out, lin)
            out[0] += c
        return RatPoly(out, 0)

    def _aligned(self, other: "RatPoly") -> "RatPoly":
        return other if other.center == self.center else other.recentered(self.center)

    def __add__(self, other):
        if not isinstance(other, RatPoly):
            other = RatPoly([other], self.center)
        o = self._aligned(other)
        n = max(len(self.coeffs), len(o.coeffs))
        a = list(self.coeffs) + [Fraction(0)] * (n - len(self.coeffs))
        b = list(o.coeffs) + [Fraction(0)] * (n - len(o.coeffs))
        return RatPoly([x + y for x, y in zip(a, b)], self.center)

    def __sub__(self, other):
        return self + (-other if isinstance(other, RatPoly) else RatPoly([-rat(other)], self.center))

    def __neg__(self):
        return RatPoly([-c for c in self.coeffs], self.center)

    def __mul__(self, other):
        if isinstance(other, RatPoly):
            o = self._aligned(other)
            return RatPoly(_poly_mul(list(self.coeffs), list(o.coeffs)), self.center)
        f = rat(other) if not isinstance(other, Fraction) else other
        return RatPoly([c * f for c in self.coeffs], self.center)

    __rmul__ = __mul__

    def derivative(self) -> "RatPoly":
        if len(self.coeffs) == 1:
            return RatPoly([0], self.center)
        return RatPoly([i * c for i, c in enumerate(self.coeffs)][1:], self.center)

    def antiderivative(self) -> "RatPoly":
        return RatPoly([Fraction(0)] + [c / (i + 1) for i, c in enumerate(self.coeffs)],
                       self.center)

    def integral(self, lo: RationalLike, hi: RationalLike) -> Fraction:
        f = self.antiderivative()
        return f(rat(hi)) - f(rat(lo))

    def monomial_coeffs(self) -> tuple[Fraction, ...]:
        """Coefficients about center 0."""
        return self.recentered(0).coeffs if self.center != 0 else self.coeffs

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RatPoly):
            return NotImplemented
        return self.monomial_coeffs() == other.monomial_coeffs()

    def __hash__(self):
        return hash(self.monomial_coeffs())

    def to_float(self) -> list[float]:
        return [float(c) for c in self.coeffs]

    def __repr__(self) -> str:
        var = "x" if self.center == 0 else f"(x-{self.center})"
        terms = " + ".join(f"{c}*{var}^{i}" for i, c in enumerate(self.coeffs) if c != 0)
        return f"RatPoly({terms or '0'})"


def _poly_mul(a: list[Fraction], b: list[Fraction]) -> list[Fraction]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_mul_linear(a: list[Fraction], shift: Fraction) -> list[Fraction]:
    # multiply by (x + shift)
    out = [Fraction(0)] * (len(a) + 1)
    for i, c in enumerate(a):
        out[i] += c * shift
        out[i + 1] += c
    return out
