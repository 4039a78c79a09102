"""Exact symmetric rational matrices and points of the Siegel upper half-space.

Everything in the first half of this module is exact: entries are
:class:`fractions.Fraction` and no floating point is ever used.
:class:`HalfSpacePoint` is the exception; it holds an mpmath matrix pair
because the symplectic action produces non-rational points.
"""

from __future__ import annotations

import json
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

Matrix = tuple[tuple[Fraction, ...], ...]


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        # floats are only accepted when they are exactly representable rationals
        return Fraction(x)
    return Fraction(x)


def as_matrix(rows: Iterable[Iterable]) -> Matrix:
    """Coerce a nested iterable into an immutable tuple-of-tuples of Fractions."""
    m = tuple(tuple(_frac(x) for x in row) for row in rows)
    if not m or any(len(row) != len(m) for row in m):
        raise ValueError("expected a non-empty square matrix")
    return m


def identity(n: int) -> Matrix:
    one, zero = Fraction(1), Fraction(0)
    return tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))


def transpose(a: Matrix) -> Matrix:
    return tuple(zip(*a))


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return tuple(tuple(sum((x * y for x, y in zip(row, col)), Fraction(0)) for col in bt) for row in a)


def mat_det(a: Matrix) -> Fraction:
    """Exact determinant by fraction Gaussian elimination with row pivoting."""
    n = len(a)
    rows = [[_frac(x) for x in r] for r in a]
    det = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if rows[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            rows[k], rows[piv] = rows[piv], rows[k]
            det = -det
        p = rows[k][k]
        det *= p
        for i in range(k + 1, n):
            f = rows[i][k] / p
            if f:
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[k])]
    return det


def mat_inv(a: Matrix) -> Matrix:
    """Exact inverse by Gauss-Jordan elimination; raises on singular input."""
    n = len(a)
    aug = [[_frac(x) for x in a[i]] + [Fraction(int(i == j)) for j in range(n)] for i in range(n)]
    for k in range(n):
        piv = next((i for i in range(k, n) if aug[i][k] != 0), None)
        if piv is None:
            raise ValueError("matrix is singular")
        aug[k], aug[piv] = aug[piv], aug[k]
        p = aug[k][k]
        aug[k] = [x / p for x in aug[k]]
        for i in range(n):
            if i != k and aug[i][k]:
                f = aug[i][k]
                aug[i] = [x - f * y for x, y in zip(aug[i], aug[k])]
    return tuple(tuple(row[n:]) for row in aug)


def leading_pivots(a: Matrix) -> list[Fraction]:
    """Pivots of unpivoted elimination: the ratios of consecutive leading minors.

    Stops early (returning the pivots so far, the last one being <= 0) as soon
    as a non-positive pivot appears.
    """
    n = len(a)
    rows = [[_frac(x) for x in r] for r in a]
    pivots = []
    for k in range(n):
        p = rows[k][k]
        pivots.append(p)
        if p <= 0:
            break
        for i in range(k + 1, n):
            f = rows[i][k] / p
            if f:
                for j in range(k, n):
                    rows[i][j] -= f * rows[k][j]
    return pivots


class SymMat:
    """An exact symmetric ``n x n`` matrix with rational entries.

    Instances are immutable and hashable, so they can key coefficient tables.
    """

    __slots__ = ("_rows", "_hash")

    def __init__(self, rows: Iterable[Iterable]):
        m = as_matrix(rows)
        n = len(m)
        for i in range(n):
            for j in range(i + 1, n):
                if m[i][j] != m[j][i]:
                    raise ValueError(f"matrix is not symmetric at ({i}, {j})")
        self._rows = m
        self._hash = hash(m)

    @classmethod
    def diag(cls, *d) -> "SymMat":
        n = len(d)
        return cls([[d[i] if i == j else 0 for j in range(n)] for i in range(n)])

    @classmethod
    def identity(cls, n: int) -> "SymMat":
        return cls(identity(n))

    @classmethod
    def from_upper(cls, n: int, upper: Sequence) -> "SymMat":
        """Build from the row-major upper triangle ``(t11, t12, ..., tnn)``."""
        rows = [[Fraction(0)] * n for _ in range(n)]
        it = iter(upper)
        for i in range(n):
            for j in range(i, n):
                rows[i][j] = rows[j][i] = _frac(next(it))
        return cls(rows)

    @property
    def n(self) -> int:
        return len(self._rows)

    @property
    def rows(self) -> Matrix:
        return self._rows

    def __getitem__(self, ij: tuple[int, int]) -> Fraction:
        i, j = ij
        return self._rows[i][j]

    def __eq__(self, other) -> bool:
        return isinstance(other, SymMat) and self._rows == other._rows

    def __hash__(self) -> int:
        return self._hash

    def __repr__(self) -> str:
        body = ", ".join("[" + ", ".join(str(x) for x in r) + "]" for r in self._rows)
        return f"SymMat([{body}])"

    def __add__(self, other: "SymMat") -> "SymMat":
        _check_dims(self, other)
        return SymMat([[x + y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __sub__(self, other: "SymMat") -> "SymMat":
        _check_dims(self, other)
        return SymMat([[x - y for x, y in zip(r, s)] for r, s in zip(self._rows, other._rows)])

    def __neg__(self) -> "SymMat":
        return SymMat([[-x for x in r] for r in self._rows])

    def scale(self, c) -> "SymMat":
        c = _frac(c)
        return SymMat([[c * x for x in r] for r in self._rows])

    def upper(self) -> tuple[Fraction, ...]:
        n = self.n
        return tuple(self._rows[i][j] for i in range(n) for j in range(i, n))

    def det(self) -> Fraction:
        return mat_det(self._rows)

    def trace(self) -> Fraction:
        return sum((self._rows[i][i] for i in range(self.n)), Fraction(0))

    def inverse(self) -> "SymMat":
        return SymMat(mat_inv(self._rows))

    def quad(self, v: Sequence[int]) -> Fraction:
        """The quadratic form ``v^t T v``."""
        n = self.n
        r = self._rows
        return sum((r[i][j] * v[i] * v[j] for i in range(n) for j in range(n)), Fraction(0))

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in r] for r in self._rows]

    @classmethod
    def from_json(cls, data) -> "SymMat":
        """Parse the row-major rational-string literal, e.g. ``[["1","1/2"],["1/2","1"]]``."""
        if isinstance(data, str):
            data = json.loads(data)
        return cls([[Fraction(str(x)) for x in row] for row in data])

    def to_mp(self) -> mpmath.matrix:
        return mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in r] for r in self._rows])


def _check_dims(a: SymMat, b: SymMat) -> None:
    if a.n != b.n:
        raise ValueError(f"dimension mismatch: {a.n} vs {b.n}")


def pairing(T: SymMat, X: SymMat) -> Fraction:
    """The trace pairing ``(T, X) = tr(T X)``, computed exactly."""
    _check_dims(T, X)
    n = T.n
    t, x = T.rows, X.rows
    return sum((t[i][j] * x[j][i] for i in range(n) for j in range(n)), Fraction(0))


def is_positive_definite(T: SymMat) -> bool:
    """Exact Sylvester test: every leading principal minor is positive."""
    piv = leading_pivots(T.rows)
    return len(piv) == T.n and piv[-1] > 0


def in_dual_lattice(T: SymMat, M: int = 1) -> bool:
    """Membership in ``M^{-1}`` times the half-integral lattice.

    Diagonal entries must lie in ``(1/M) Z`` and off-diagonal ones in ``(1/2M) Z``.
    """
    if M < 1:
        raise ValueError("M must be a positive integer")
    n = T.n
    for i in range(n):
        if (M * T[i, i]).denominator != 1:
            return False
        for j in range(i + 1, n):
            if (2 * M * T[i, j]).denominator != 1:
                return False
    return True


def gl_action(T: SymMat, r) -> SymMat:
    """Right action ``T . r = r^t T r`` of an invertible rational matrix."""
    r = as_matrix(r)
    if len(r) != T.n:
        raise ValueError(f"dimension mismatch: {T.n} vs {len(r)}")
    if mat_det(r) == 0:
        raise ValueError("r is singular")
    return SymMat(mat_mul(mat_mul(transpose(r), T.rows), r))


class HalfSpacePoint:
    """A point ``Z = X + iY`` of the Siegel upper half-space.

    ``X`` and ``Y`` are real symmetric mpmath matrices; exact inputs
    (:class:`SymMat` or rationals) are converted at the working precision.
    """

    __slots__ = ("real", "imag")

    def __init__(self, real, imag, *, check: bool = True):
        self.real = _to_mp_sym(real)
        self.imag = _to_mp_sym(imag)
        if self.real.rows != self.imag.rows:
            raise ValueError("real and imaginary parts differ in dimension")
        if check and min_eigenvalue(self.imag) <= 0:
            raise ValueError("imaginary part is not positive-definite")

    @classmethod
    def from_complex(cls, Z, *, check: bool = True) -> "HalfSpacePoint":
        Z = mpmath.matrix(Z)
        n = Z.rows
        re = mpmath.matrix(n, n)
        im = mpmath.matrix(n, n)
        for i in range(n):
            for j in range(n):
                # symmetrize to wash out rounding asymmetry
                z = (mpmath.mpc(Z[i, j]) + mpmath.mpc(Z[j, i])) / 2
                re[i, j], im[i, j] = z.real, z.imag
        return cls(re, im, check=check)

    @property
    def n(self) -> int:
        return self.real.rows

    def complex_matrix(self) -> mpmath.matrix:
        n = self.n
        return mpmath.matrix([[mpmath.mpc(self.real[i, j], self.imag[i, j]) for j in range(n)] for i in range(n)])

    def to_json(self) -> dict:
        n = self.n
        fmt = lambda m: [[mpmath.nstr(m[i, j], 20) for j in range(n)] for i in range(n)]
        return {"re": fmt(self.real), "im": fmt(self.imag)}

    @classmethod
    def from_json(cls, data) -> "HalfSpacePoint":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(_parse_real_rows(data["re"]), _parse_real_rows(data["im"]))

    def __repr__(self) -> str:
        return f"HalfSpacePoint(re={self.real.tolist()}, im={self.imag.tolist()})"


def _parse_real_rows(rows):
    out = []
    for row in rows:
        out.append([_parse_real(x) for x in row])
    return out


def _parse_real(x):
    if isinstance(x, str) and "/" in x:
        f = Fraction(x)
        return mpmath.mpf(f.numerator) / f.denominator
    return mpmath.mpf(x)


def _to_mp_sym(m) -> mpmath.matrix:
    if isinstance(m, SymMat):
        return m.to_mp()
    if isinstance(m, mpmath.matrix):
        out = m.copy()
    else:
        rows = [list(r) for r in m]
        out = mpmath.matrix(
            [[mpmath.mpf(x.numerator) / x.denominator if isinstance(x, Fraction) else mpmath.mpf(x) for x in r] for r in rows]
        )
    if out.rows != out.cols:
        raise ValueError("expected a square matrix")
    return out


def min_eigenvalue(Y: mpmath.matrix):
    """Smallest eigenvalue of a real symmetric mpmath matrix (symmetrized first)."""
    n = Y.rows
    if n == 1:
        return Y[0, 0]
    S = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(n):
            S[i, j] = (Y[i, j] + Y[j, i]) / 2
    if n == 2:
        a, b, c = S[0, 0], S[0, 1], S[1, 1]
        lam_max = (a + c) / 2 + mpmath.sqrt(((a - c) / 2) ** 2 + b * b)
        return (a * c - b * b) / lam_max
    return min(mpmath.eigsy(S, eigvals_only=True))
