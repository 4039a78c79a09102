"""Reduction theory: Minkowski reduction of positive-definite forms and
Siegel-set reduction of points of the upper half-space.

Minkowski reduction is exact (rational arithmetic throughout).  The
symplectic action works in mpmath floating point at a configurable
precision; returned transforms are exact integer matrices and are checked
against the symplectic relation exactly.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import mpmath
import numpy as np

from .symmat import (
    HalfSpacePoint,
    Matrix,
    SymMat,
    as_matrix,
    identity,
    is_positive_definite,
    mat_det,
    mat_inv,
    mat_mul,
    min_eigenvalue,
    transpose,
)

DEFAULT_PREC = 64
VERIFY_TOL = 1e-8

# Hermite constants raised to the n-th power, so that the bound
# T11 <= C_n det(T)^(1/n) can be checked exactly as T11^n <= C_n^n det(T).
HERMITE_POW = {1: Fraction(1), 2: Fraction(4, 3), 3: Fraction(2)}
HERMITE = {1: 1.0, 2: 2 / math.sqrt(3), 3: 2 ** (1 / 3)}

# Y-floor of the Siegel set for n = 1, 2.  Larger n must be supplied explicitly.
EPSILON = {1: math.sqrt(3) / 2, 2: 0.5}


class PrecisionExhausted(ArithmeticError):
    """Floating work lost too much precision to certify its result."""


@dataclass(frozen=True)
class ReductionCert:
    transform: object
    reduced: object
    floor_constant: float
    checks: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.checks.values())


# ---------------------------------------------------------------------------
# exact lattice machinery on Gram matrices


def _gram_schmidt(G: Matrix):
    n = len(G)
    mu = [[Fraction(0)] * n for _ in range(n)]
    B = [Fraction(0)] * n
    for i in range(n):
        for j in range(i):
            s = G[i][j] - sum((mu[j][k] * mu[i][k] * B[k] for k in range(j)), Fraction(0))
            mu[i][j] = s / B[j]
        B[i] = G[i][i] - sum((mu[i][k] ** 2 * B[k] for k in range(i)), Fraction(0))
    return mu, B


def _nearest_int(x: Fraction) -> int:
    return math.floor(x + Fraction(1, 2))


def lll_gram(G: Matrix, delta: Fraction = Fraction(3, 4)) -> tuple[list[list[int]], Matrix]:
    """LLL-reduce a positive-definite Gram matrix exactly.

    Returns ``(U, U^t G U)`` with ``U`` unimodular.  Gram-Schmidt data is
    recomputed after every update; this is only meant for tiny dimensions.
    """
    n = len(G)
    U = [[int(i == j) for j in range(n)] for i in range(n)]  # columns are basis vectors

    def gram():
        return mat_mul(mat_mul(transpose(as_matrix(U)), G), as_matrix(U))

    cur = gram()
    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            mu, _ = _gram_schmidt(cur)
            q = _nearest_int(mu[k][j])
            if q:
                for row in U:
                    row[k] -= q * row[j]
                cur = gram()
        mu, B = _gram_schmidt(cur)
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            for row in U:
                row[k], row[k - 1] = row[k - 1], row[k]
            cur = gram()
            k = max(k - 1, 1)
    return U, cur


def _completion(G: Matrix):
    """Coefficients of Q(x) = sum_i q[i][i] (x_i + sum_{j>i} q[i][j] x_j)^2."""
    n = len(G)
    q = [list(r) for r in G]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


def _int_range(c: Fraction, r: Fraction) -> Iterator[int]:
    """Integers x with (x + c)^2 <= r, in increasing order."""
    if r < 0:
        return
    s = math.isqrt(r.numerator // r.denominator)  # s <= sqrt(r) < s + 1
    lo = math.floor(-c) - s - 1
    hi = math.ceil(-c) + s + 1
    for x in range(lo, hi + 1):
        if (x + c) ** 2 <= r:
            yield x


def short_vectors(G: Matrix, bound: Fraction) -> list[tuple[tuple[int, ...], Fraction]]:
    """All nonzero integer ``v`` with ``v^t G v <= bound`` (Fincke-Pohst, exact).

    ``G`` must be positive-definite.  Each of ``v`` and ``-v`` is listed.
    """
    n = len(G)
    q = _completion(G)
    bound = Fraction(bound)
    out = []
    x = [0] * n

    def rec(i: int, remaining: Fraction):
        c = sum((q[i][j] * x[j] for j in range(i + 1, n)), Fraction(0))
        for xi in _int_range(c, remaining / q[i][i]):
            x[i] = xi
            rem = remaining - q[i][i] * (xi + c) ** 2
            if i == 0:
                if any(x):
                    v = tuple(x)
                    out.append((v, bound - rem))
            else:
                rec(i - 1, rem)
        x[i] = 0

    rec(n - 1, bound)
    return out


def _extends_to_basis(vectors: Sequence[Sequence[int]], n: int) -> bool:
    """Whether the given integer vectors are part of a basis of Z^n."""
    k = len(vectors)
    g = 0
    for rows in itertools.combinations(range(n), k):
        minor = mat_det(tuple(tuple(Fraction(v[r]) for v in vectors) for r in rows))
        g = math.gcd(g, int(minor))
        if g == 1:
            return True
    return False


def _canon_key(m: Matrix) -> tuple:
    # diagonal entries ascending first, then off-diagonals as large as possible
    n = len(m)
    return tuple(m[i][j] if i == j else -m[i][j] for i in range(n) for j in range(i, n))


def greedy_bases(G: Matrix) -> list[list[tuple[int, ...]]]:
    """Every basis obtainable by greedily choosing successive shortest vectors.

    At step k the candidates are the shortest vectors that extend the
    vectors already chosen to a basis of Z^n; all ties are branched on.
    The set is intrinsic to the form, which is what makes the derived
    canonical representative well defined.
    """
    n = len(G)
    bound = max(G[i][i] for i in range(n))
    while True:
        vecs = short_vectors(G, bound)
        vecs.sort(key=lambda t: (t[1], t[0]))
        bases = [[]]
        ok = True
        for _ in range(n):
            nxt = []
            best = None
            for chosen in bases:
                cands = [(v, val) for v, val in vecs if _extends_to_basis(chosen + [v], n)]
                if not cands:
                    ok = False
                    break
                m = cands[0][1]
                if best is None or m < best:
                    best, nxt = m, []
                if m == best:
                    nxt.extend(chosen + [v] for v, val in cands if val == m)
            if not ok:
                break
            bases = nxt
        if ok:
            return bases
        bound *= 2


def minkowski_reduce(T: SymMat) -> ReductionCert:
    """Minkowski-reduce a positive-definite form with ``n <= 3``.

    The reduced form is the canonical one: among all greedy successive-minima
    bases the lexicographically smallest result (diagonal ascending, then
    off-diagonals as large as possible) is returned.  Its (1,1) entry is the
    lattice minimum.
    """
    reduced, gammas = canonical_transforms(T)
    gamma = gammas[0]
    n = T.n
    det = T.det()
    checks = {
        "unimodular": abs(mat_det(gamma)) == 1,
        "reproduces": SymMat(mat_mul(mat_mul(transpose(gamma), T.rows), gamma)) == reduced,
        "det_preserved": reduced.det() == det,
        "hermite_bound": reduced[0, 0] ** n <= HERMITE_POW[n] * det,
    }
    return ReductionCert(
        transform=tuple(tuple(int(x) for x in row) for row in gamma),
        reduced=reduced,
        floor_constant=HERMITE[n],
        checks=checks,
    )


def canonical_transforms(T: SymMat) -> tuple[SymMat, list[Matrix]]:
    """The canonical reduced form of ``T`` and every unimodular ``g`` with ``g^t T g`` equal to it.

    The quotients ``g_i g_0^-1`` of the returned transforms are exactly the
    automorphisms of ``T``.  The list is sorted, largest entries first.
    """
    if T.n > 3:
        raise ValueError(f"exact Minkowski reduction is supported for n <= 3, got n = {T.n}")
    if not is_positive_definite(T):
        raise ValueError("form is not positive-definite")
    U0, G0 = lll_gram(T.rows)
    U0 = as_matrix(U0)
    best_key, best = None, []
    for basis in greedy_bases(G0):
        V = transpose(as_matrix(basis))  # columns are the chosen vectors
        R = mat_mul(mat_mul(transpose(V), G0), V)
        key = _canon_key(R)
        if best_key is None or key < best_key:
            best_key, best = key, [(V, R)]
        elif key == best_key:
            best.append((V, R))
    reduced = SymMat(best[0][1])
    # lexicographically largest first, so an already reduced form gets the identity
    gammas = sorted((mat_mul(U0, V) for V, _ in best), key=lambda g: [x for r in g for x in r], reverse=True)
    return reduced, gammas


def provable_radius(T: SymMat, bound=None) -> tuple[int, ...]:
    """Per-coordinate box radii that contain every v with v^t T v <= bound.

    Uses |v_i|^2 <= bound * (T^-1)_ii; ``bound`` defaults to T11, which is
    at least the lattice minimum.
    """
    bound = T[0, 0] if bound is None else Fraction(bound)
    inv = T.inverse()
    return tuple(math.isqrt(math.floor(bound * inv[i, i])) for i in range(T.n))


def shortest_value_bruteforce(T: SymMat, radius) -> Fraction:
    """Minimum of v^t T v over nonzero integer v with |v_i| <= radius (box search).

    ``radius`` is an int or a per-coordinate sequence of ints.  The search is
    exhaustive over the box, vectorized with exact integer arithmetic.
    """
    n = T.n
    radii = (radius,) * n if isinstance(radius, int) else tuple(radius)
    if len(radii) != n or any(r < 0 for r in radii) or not any(radii):
        raise ValueError("radii must be non-negative and not all zero")
    den = math.lcm(*(x.denominator for row in T.rows for x in row))
    A = np.array([[int(x * den) for x in row] for row in T.rows], dtype=object)
    big = max(abs(int(a)) for a in A.flat) * n * n * max(radii) ** 2
    dtype = np.int64 if big < 2**62 else object
    A = A.astype(dtype)
    axes = [np.arange(-r, r + 1, dtype=dtype) for r in radii[1:]]
    rest = np.array(np.meshgrid(*axes, indexing="ij")).reshape(n - 1, -1) if n > 1 else np.zeros((0, 1), dtype=dtype)
    best = None
    for v0 in range(-radii[0], radii[0] + 1):
        V = np.vstack([np.full((1, rest.shape[1]), v0, dtype=dtype), rest])
        vals = np.einsum("ik,ij,jk->k", V, A, V) if dtype is np.int64 else (V * (A @ V)).sum(axis=0)
        if v0 == 0:
            nz = np.any(V != 0, axis=0)
            vals = vals[nz]
        if vals.size:
            m = int(vals.min())
            best = m if best is None else min(best, m)
    return Fraction(best, den)


# ---------------------------------------------------------------------------
# symplectic matrices


def _zero(n: int) -> Matrix:
    return tuple(tuple(Fraction(0) for _ in range(n)) for _ in range(n))


def _add(a: Matrix, b: Matrix) -> Matrix:
    return tuple(tuple(x + y for x, y in zip(r, s)) for r, s in zip(a, b))


def _neg(a: Matrix) -> Matrix:
    return tuple(tuple(-x for x in r) for r in a)


class SymplecticMat:
    """A ``2n x 2n`` rational matrix ``[[a, b], [c, d]]`` with ``g^t J g = J``."""

    __slots__ = ("a", "b", "c", "d")

    def __init__(self, a, b, c, d, *, check: bool = True):
        self.a, self.b, self.c, self.d = (as_matrix(m) for m in (a, b, c, d))
        if check and not self.is_symplectic():
            raise ValueError("matrix is not symplectic")

    @property
    def n(self) -> int:
        return len(self.a)

    @classmethod
    def identity(cls, n: int) -> "SymplecticMat":
        return cls(identity(n), _zero(n), _zero(n), identity(n), check=False)

    @classmethod
    def translation(cls, S) -> "SymplecticMat":
        """``n(S) = [[1, S], [0, 1]]``, acting by ``Z -> Z + S``."""
        S = S.rows if isinstance(S, SymMat) else as_matrix(S)
        n = len(S)
        return cls(identity(n), S, _zero(n), identity(n))

    @classmethod
    def levi(cls, r) -> "SymplecticMat":
        """``m(r) = diag(r, r^-t)``, acting by ``Z -> r Z r^t``."""
        r = as_matrix(r)
        n = len(r)
        return cls(r, _zero(n), _zero(n), transpose(mat_inv(r)))

    @classmethod
    def inversion(cls, n: int) -> "SymplecticMat":
        """``[[0, -1], [1, 0]]``, acting by ``Z -> -Z^-1``."""
        return cls(_zero(n), _neg(identity(n)), identity(n), _zero(n))

    @classmethod
    def partial_inversion(cls, n: int, k: int) -> "SymplecticMat":
        """Classical inversion on coordinate ``k``, identity on the others."""
        e = [[Fraction(int(i == j == k)) for j in range(n)] for i in range(n)]
        one_minus = [[Fraction(int(i == j != k)) for j in range(n)] for i in range(n)]
        return cls(one_minus, _neg(as_matrix(e)), e, one_minus)

    @classmethod
    def from_full(cls, g) -> "SymplecticMat":
        g = [list(r) for r in g]
        if len(g) % 2:
            raise ValueError("symplectic matrices have even size")
        n = len(g) // 2
        blk = lambda r0, c0: [row[c0:c0 + n] for row in g[r0:r0 + n]]
        return cls(blk(0, 0), blk(0, n), blk(n, 0), blk(n, n))

    def full(self) -> Matrix:
        top = tuple(ra + rb for ra, rb in zip(self.a, self.b))
        bot = tuple(rc + rd for rc, rd in zip(self.c, self.d))
        return top + bot

    def is_symplectic(self) -> bool:
        a, b, c, d = self.a, self.b, self.c, self.d
        at, bt, ct, dt = (transpose(m) for m in (a, b, c, d))
        n = len(a)
        sym = lambda m: m == transpose(m)
        return (
            sym(mat_mul(at, c))
            and sym(mat_mul(bt, d))
            and _add(mat_mul(at, d), _neg(mat_mul(ct, b))) == identity(n)
        )

    def is_integral(self) -> bool:
        return all(x.denominator == 1 for row in self.full() for x in row)

    def __matmul__(self, other: "SymplecticMat") -> "SymplecticMat":
        a = _add(mat_mul(self.a, other.a), mat_mul(self.b, other.c))
        b = _add(mat_mul(self.a, other.b), mat_mul(self.b, other.d))
        c = _add(mat_mul(self.c, other.a), mat_mul(self.d, other.c))
        d = _add(mat_mul(self.c, other.b), mat_mul(self.d, other.d))
        return SymplecticMat(a, b, c, d, check=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, SymplecticMat) and self.full() == other.full()

    def __hash__(self) -> int:
        return hash(self.full())

    def to_json(self) -> list[list[str]]:
        return [[str(x) for x in row] for row in self.full()]

    def __repr__(self) -> str:
        return f"SymplecticMat({[[str(x) for x in r] for r in self.full()]})"


def _mp(m: Matrix) -> mpmath.matrix:
    return mpmath.matrix([[mpmath.mpf(x.numerator) / x.denominator for x in r] for r in m])


def _cz_plus_d(g: SymplecticMat, Z: HalfSpacePoint) -> mpmath.matrix:
    return _mp(g.c) * Z.complex_matrix() + _mp(g.d)


def cocycle_j(g: SymplecticMat, Z: HalfSpacePoint, prec: int | None = None):
    """``j(g, Z) = det(cZ + d)``."""
    with mpmath.workprec(prec or DEFAULT_PREC):
        return mpmath.det(_cz_plus_d(g, Z))


def symplectic_act(g: SymplecticMat, Z: HalfSpacePoint, prec: int | None = None) -> HalfSpacePoint:
    """``g . Z = (aZ + b)(cZ + d)^-1``.

    Raises :class:`PrecisionExhausted` when ``cZ + d`` is singular to working
    precision or the image fails a tolerance-aware definiteness check.
    """
    if g.n != Z.n:
        raise ValueError("dimension mismatch")
    prec = prec or DEFAULT_PREC
    with mpmath.workprec(prec):
        Zc = Z.complex_matrix()
        J = _mp(g.c) * Zc + _mp(g.d)
        scale = max(1, mpmath.mnorm(J, 1)) ** g.n
        if abs(mpmath.det(J)) <= scale * mpmath.mpf(2) ** (-prec // 2):
            raise PrecisionExhausted("cZ + d is numerically singular")
        W = (_mp(g.a) * Zc + _mp(g.b)) * mpmath.inverse(J)
        out = HalfSpacePoint.from_complex(W, check=False)
        if min_eigenvalue(out.imag) <= mpmath.mpf(2) ** (-prec // 2):
            raise PrecisionExhausted("image left the half-space to working precision")
    return out


# ---------------------------------------------------------------------------
# Siegel reduction


def _round_sym(X: mpmath.matrix) -> Matrix:
    n = X.rows
    return tuple(tuple(Fraction(int(mpmath.nint(X[min(i, j), max(i, j)]))) for j in range(n)) for i in range(n))


def _gauss_reduce_float(Y: mpmath.matrix) -> Matrix:
    """Integer U with U^t Y U Lagrange-reduced (0 <= 2 y12 <= y11 <= y22)."""
    n = Y.rows
    if n == 1:
        return identity(1)
    U = [[1, 0], [0, 1]]
    G = [[Y[0, 0], Y[0, 1]], [Y[1, 0], Y[1, 1]]]

    def col_op(k: int, j: int, q: int):  # b_k -= q b_j
        for row in U:
            row[k] -= q * row[j]

    for _ in range(10_000):
        if G[0][0] > G[1][1]:
            for row in U:
                row[0], row[1] = row[1], row[0]
            G = [[G[1][1], G[0][1]], [G[0][1], G[0][0]]]
        q = int(mpmath.nint(G[0][1] / G[0][0]))
        if q == 0:
            break
        col_op(1, 0, q)
        g12 = G[0][1] - q * G[0][0]
        g22 = G[1][1] - 2 * q * G[0][1] + q * q * G[0][0]
        G = [[G[0][0], g12], [g12, g22]]
    else:
        raise PrecisionExhausted("Gauss reduction did not terminate")
    if G[0][1] < 0:
        for row in U:
            row[1] = -row[1]
    return as_matrix(U)


def _inversion_candidates(n: int) -> list[SymplecticMat]:
    """Finite set of integral symplectic matrices tried to increase det(Im Z).

    For n = 1 this is the classical inversion.  For n = 2 it holds the full
    inversions composed with small translations, plus partial inversions
    along the primitive vectors e1, e2, e1 + e2, e1 - e2.
    """
    if n == 1:
        return [SymplecticMat.inversion(1)]
    if n != 2:
        raise ValueError("Siegel reduction is implemented for n <= 2")
    cands = []
    J = SymplecticMat.inversion(2)
    vals = (-1, 0, 1)
    for s11, s12, s22 in itertools.product(vals, repeat=3):
        cands.append(J @ SymplecticMat.translation([[s11, s12], [s12, s22]]))
    g1 = SymplecticMat.partial_inversion(2, 0)
    for r in ([[1, 0], [0, 1]], [[0, 1], [1, 0]], [[1, 1], [0, 1]], [[1, -1], [0, 1]]):
        m = SymplecticMat.levi(r)
        for s in vals:
            cands.append(g1 @ SymplecticMat.translation([[s, 0], [0, 0]]) @ m)
    return cands


_CANDIDATES: dict[int, list[SymplecticMat]] = {}


def siegel_reduce(
    Z: HalfSpacePoint,
    eps: float | None = None,
    prec: int | None = None,
    max_iter: int = 1000,
    tol: float = VERIFY_TOL,
) -> ReductionCert:
    """Move ``Z`` into the Siegel set ``Im Z >= eps * 1`` by an integral symplectic map.

    Alternates Minkowski reduction of ``Y``, integral translation of ``X``
    and the inversion that most increases ``det Y``, stopping when no
    candidate increases it.  If the resulting point still has a smallest
    eigenvalue below ``eps``, candidates on the boundary (``|j| = 1``) are
    tried as well before giving up.
    """
    n = Z.n
    if n not in (1, 2):
        raise ValueError("Siegel reduction is implemented for n <= 2")
    eps = EPSILON[n] if eps is None else eps
    prec = prec or DEFAULT_PREC
    cands = _CANDIDATES.setdefault(n, _inversion_candidates(n))
    gamma = SymplecticMat.identity(n)
    with mpmath.workprec(prec):
        det0 = mpmath.det(Z.imag)
        W = Z
        one = mpmath.mpf(1) - mpmath.mpf(2) ** (-prec // 2)
        for _ in range(max_iter):
            step = SymplecticMat.levi(transpose(_gauss_reduce_float(W.imag)))
            W = symplectic_act(step, W, prec)
            gamma = step @ gamma
            step = SymplecticMat.translation(_neg(_round_sym(W.real)))
            W = symplectic_act(step, W, prec)
            gamma = step @ gamma
            js = [abs(cocycle_j(g, W, prec)) for g in cands]
            k = min(range(len(cands)), key=js.__getitem__)
            if js[k] >= one:
                break
            W = symplectic_act(cands[k], W, prec)
            gamma = cands[k] @ gamma
        else:
            raise PrecisionExhausted(f"no convergence after {max_iter} iterations")

        if min_eigenvalue(W.imag) < eps:
            gamma, W = _polish_floor(gamma, W, cands, eps, prec)

        reduced = symplectic_act(gamma, Z, prec)
        lam = min_eigenvalue(reduced.imag)
        det1 = mpmath.det(reduced.imag)
        checks = {
            "symplectic": gamma.is_symplectic(),
            "integral": gamma.is_integral(),
            "floor": bool(lam >= eps - tol),
            "det_nondecreasing": bool(det1 >= det0 * (1 - tol)),
        }
    return ReductionCert(transform=gamma, reduced=reduced, floor_constant=eps, checks=checks)


def _polish_floor(gamma, W, cands, eps, prec):
    """Search boundary moves (|j| ~ 1, det Y unchanged) that raise the Y-floor."""
    tol = mpmath.mpf(2) ** (-prec // 3)
    seen = {gamma}
    frontier = [(gamma, W)]
    best = (min_eigenvalue(W.imag), gamma, W)
    for _ in range(3):
        nxt = []
        for g0, W0 in frontier:
            for g in cands:
                if abs(abs(cocycle_j(g, W0, prec)) - 1) > tol:
                    continue
                W1 = symplectic_act(g, W0, prec)
                fix = SymplecticMat.translation(_neg(_round_sym(W1.real)))
                W1 = symplectic_act(fix, W1, prec)
                g1 = fix @ g @ g0
                if g1 in seen:
                    continue
                seen.add(g1)
                lam = min_eigenvalue(W1.imag)
                if lam > best[0]:
                    best = (lam, g1, W1)
                nxt.append((g1, W1))
        if best[0] >= eps:
            break
        frontier = nxt
    return best[1], best[2]
