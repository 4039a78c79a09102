"""Enumeration of positive-definite matrices in ``M^-1 S_n(Z)^dual``.

Internally matrices are carried in scaled integer units: a diagonal entry
``T_ii`` is stored as ``M T_ii`` and an off-diagonal entry ``T_ij`` as
``2 M T_ij``.  The scaled matrix ``2M T`` is then integral, so definiteness
checks are pure integer arithmetic.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator

from .reduction import canonical_transforms, short_vectors
from .symmat import SymMat, mat_det, mat_mul, transpose, as_matrix

OUTPUT_CAP = 10**6


class CapExceeded(RuntimeError):
    """An enumeration would produce more entries than the configured cap."""


@dataclass(frozen=True)
class EnumSpec:
    n: int
    M: int
    cutoff: Fraction
    kind: str = "trace"

    def __post_init__(self):
        object.__setattr__(self, "cutoff", Fraction(self.cutoff))
        if self.n < 1 or self.M < 1 or self.cutoff <= 0:
            raise ValueError("EnumSpec requires n >= 1, M >= 1 and cutoff > 0")
        if self.kind not in ("trace", "det"):
            raise ValueError(f"unknown cutoff kind {self.kind!r}")


def _pairs(n: int):
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


def _diag_tuples(n: int, K: int) -> list[tuple[int, ...]]:
    out = [d for d in itertools.product(range(1, K + 1), repeat=n) if sum(d) <= K]
    out.sort(key=lambda d: (sum(d), d))
    return out


def _pd_scaled(n: int, D: list[int], offs: tuple[int, ...]) -> bool:
    # D holds the diagonal of the integral matrix 2M T, offs its upper off-diagonal
    if n == 1:
        return True
    if n == 2:
        return D[0] * D[1] - offs[0] ** 2 > 0
    if n == 3:
        A, B, C = D
        x, y, z = offs
        return A * B - x * x > 0 and A * (B * C - z * z) - x * (x * C - z * y) + y * (x * z - B * y) > 0
    S = [[0] * n for _ in range(n)]
    for i in range(n):
        S[i][i] = D[i]
    for (i, j), b in zip(_pairs(n), offs):
        S[i][j] = S[j][i] = b
    return all(mat_det(tuple(tuple(Fraction(S[i][j]) for j in range(k)) for i in range(k))) > 0 for k in range(1, n + 1))


def iter_scaled_by_trace(n: int, M: int, X) -> Iterator[tuple[tuple[int, ...], tuple[int, ...]]]:
    """Yield ``(M * diagonal, 2M * off-diagonal)`` for every member with trace <= X.

    Order is lexicographic on (trace, diagonal, off-diagonal).
    """
    K = math.floor(M * Fraction(X))
    pairs = _pairs(n)
    for diag in _diag_tuples(n, K):
        D = [2 * a for a in diag]
        # 2x2 minors: b_ij^2 < D_i D_j
        ranges = []
        for i, j in pairs:
            r = math.isqrt(D[i] * D[j] - 1)
            ranges.append(range(-r, r + 1))
        for offs in itertools.product(*ranges):
            if _pd_scaled(n, D, offs):
                yield diag, offs


def _from_scaled(n: int, M: int, diag, offs) -> SymMat:
    rows = [[Fraction(0)] * n for _ in range(n)]
    for i, a in enumerate(diag):
        rows[i][i] = Fraction(a, M)
    for (i, j), b in zip(_pairs(n), offs):
        rows[i][j] = rows[j][i] = Fraction(b, 2 * M)
    return SymMat(rows)


def count_by_trace(n: int, M: int, X) -> int:
    """Number of positive-definite members of ``M^-1 S_n(Z)^dual`` with trace <= X (streamed)."""
    return sum(1 for _ in iter_scaled_by_trace(n, M, X))


def by_trace(spec: EnumSpec, cap: int = OUTPUT_CAP) -> list[SymMat]:
    if spec.kind != "trace":
        raise ValueError("by_trace needs a trace cutoff")
    out = []
    for diag, offs in iter_scaled_by_trace(spec.n, spec.M, spec.cutoff):
        if len(out) >= cap:
            raise CapExceeded(f"more than {cap} matrices with trace <= {spec.cutoff}")
        out.append(_from_scaled(spec.n, spec.M, diag, offs))
    return out


def count_bound(n: int, M: int, X) -> Fraction:
    """``2^(n(n-1)/2) M^(n(n+1)/2) X^(n(n+1)/2)``."""
    X = Fraction(X)
    if X <= 0 or M < 1:
        raise ValueError("count_bound needs X > 0 and M >= 1")
    N = n * (n + 1) // 2
    return Fraction(2) ** (n * (n - 1) // 2) * Fraction(M) ** N * X**N


def orbit_canonical(T: SymMat) -> SymMat:
    """Canonical representative of the GL_n(Z) orbit of ``T``."""
    return canonical_transforms(T)[0]


def reduced_by_det(n: int, M: int, R, cap: int = OUTPUT_CAP) -> list[SymMat]:
    """All canonical reduced members with ``det(T) <= R``, one per GL_n(Z) orbit.

    For ``n = 2`` the search box comes from the reduced-domain inequalities
    ``0 <= 2 T12 <= T11 <= T22``, which give ``T11^2 <= (4/3) det`` and
    ``T11 T22 <= (4/3) det``.
    """
    R = Fraction(R)
    if R <= 0:
        raise ValueError("R must be positive")
    if n == 1:
        K = math.floor(M * R)
        if K > cap:
            raise CapExceeded(f"more than {cap} matrices with det <= {R}")
        return [SymMat([[Fraction(k, M)]]) for k in range(1, K + 1)]
    if n != 2:
        raise ValueError("reduced_by_det is complete only for n <= 2")
    out = []
    # units: a = M T11, c = M T22, b = 2M T12; det = (4ac - b^2) / (4 M^2)
    amax = math.isqrt(math.floor(Fraction(4, 3) * R * M * M))
    for a in range(1, amax + 1):
        cmax = math.floor(Fraction(4, 3) * R * M * M / a)
        for c in range(a, cmax + 1):
            for b in range(0, a + 1):
                if Fraction(4 * a * c - b * b, 4 * M * M) > R:
                    continue
                T = SymMat([[Fraction(a, M), Fraction(b, 2 * M)], [Fraction(b, 2 * M), Fraction(c, M)]])
                if orbit_canonical(T) != T:
                    continue
                out.append(T)
                if len(out) > cap:
                    raise CapExceeded(f"more than {cap} reduced matrices with det <= {R}")
    out.sort(key=lambda T: (T.trace(), tuple(T[i, i] for i in range(n)), T.upper()))
    return out


def orbit_members(C: SymMat, trace_cutoff) -> list[SymMat]:
    """Every ``g^t C g`` (g in GL_n(Z)) whose trace is at most ``trace_cutoff``.

    The columns of ``g`` are short vectors of ``C``; each has norm at most
    the cutoff minus ``(n - 1)`` times the minimum.  Sorted, duplicate-free.
    """
    X = Fraction(trace_cutoff)
    n = C.n
    if n == 1:
        return [C] if C.trace() <= X else []
    lam = orbit_canonical(C)[0, 0]
    room = X - (n - 1) * lam
    if room < lam:
        return []
    vecs = sorted(short_vectors(C.rows, room), key=lambda t: (t[1], t[0]))
    found = set()

    def rec(cols, used):
        if len(cols) == n:
            g = transpose(as_matrix(cols))
            if abs(mat_det(g)) == 1:
                found.add(SymMat(mat_mul(mat_mul(transpose(g), C.rows), g)))
            return
        left = n - len(cols) - 1
        for v, val in vecs:
            if used + val + left * lam > X:
                break
            rec(cols + [v], used + val)

    rec([], Fraction(0))
    return sorted(found, key=lambda T: (T.trace(), tuple(T[i, i] for i in range(n)), T.upper()))
