"""Fourier coefficient tables of Siegel cusp forms and what can be certified about them.

A :class:`CoeffTable` stores one coefficient per GL_n(Z) orbit, keyed by
the canonical reduced representative.  Orbits are expanded on demand with
the sign ``chi(det g)`` for ``a_{T.g} = chi(det g) a_T``; ``chi(-1)`` is the
table's ``convention`` (``(-1)^ell`` for integral weight).
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

import mpmath
from mpmath import iv

from . import bounds
from .enumeration import orbit_members
from .reduction import canonical_transforms
from .symmat import HalfSpacePoint, SymMat, gl_action, in_dual_lattice, is_positive_definite, mat_det, min_eigenvalue


class NonCanonicalKey(ValueError):
    """A canonical table holds a key that is not its own orbit representative."""


def default_convention(ell) -> int:
    ell = Fraction(ell)
    if ell.denominator == 1:
        return -1 if ell.numerator % 2 else 1
    return 1


def _sort_key(T: SymMat):
    return (T.trace(), tuple(T[i, i] for i in range(T.n)), T.upper())


class CoeffTable:
    """Finite table ``T -> a_T`` of a genus-``n`` weight-``ell`` form with denominator ``M``.

    With ``canonical=True`` (the default) keys must be canonical orbit
    representatives; ``canonical=False`` builds a raw table whose keys are
    arbitrary, which is how untrusted input is checked before ingest.
    """

    def __init__(self, n: int, ell, M: int, entries: Mapping[SymMat, complex], convention: int | None = None,
                 *, canonical: bool = True, validate: bool = True):
        if n < 1 or M < 1:
            raise ValueError("CoeffTable needs n >= 1 and M >= 1")
        self.n = n
        self.ell = Fraction(ell)
        self.M = M
        self.convention = default_convention(self.ell) if convention is None else convention
        if self.convention not in (1, -1):
            raise ValueError("convention must be +1 or -1")
        self.canonical = canonical
        self.entries = {T: complex(a) for T, a in sorted(entries.items(), key=lambda kv: _sort_key(kv[0]))}
        if validate:
            for T in self.entries:
                if T.n != n:
                    raise ValueError(f"key {T} has the wrong dimension")
                if not in_dual_lattice(T, M) or not is_positive_definite(T):
                    raise ValueError(f"key {T} is not a positive-definite lattice member")
                if canonical and canonical_transforms(T)[0] != T:
                    raise NonCanonicalKey(f"key {T} is not canonical")

    @classmethod
    def from_raw(cls, n: int, ell, M: int, raw: Mapping[SymMat, complex], convention: int | None = None,
                 tol: float = 1e-12) -> "CoeffTable":
        """Canonicalize arbitrary keys; conflicting values for one orbit raise."""
        conv = default_convention(ell) if convention is None else convention
        out: dict[SymMat, complex] = {}
        for T, a in raw.items():
            C, gammas = canonical_transforms(T)
            val = complex(a) * (conv if mat_det(gammas[0]) < 0 else 1)
            if C in out and abs(out[C] - val) > tol * max(1.0, abs(val)):
                raise ValueError(f"inconsistent coefficients for the orbit of {C}")
            out[C] = val
        return cls(n, ell, M, out, conv)

    def chi(self, det) -> int:
        return self.convention if det < 0 else 1

    def __len__(self) -> int:
        return len(self.entries)

    def __add__(self, other: "CoeffTable") -> "CoeffTable":
        if (self.n, self.ell, self.M, self.convention) != (other.n, other.ell, other.M, other.convention):
            raise ValueError("tables are not compatible")
        out = dict(self.entries)
        for T, a in other.entries.items():
            out[T] = out.get(T, 0) + a
        return CoeffTable(self.n, self.ell, self.M, out, self.convention, canonical=self.canonical, validate=False)

    def expanded(self, trace_cutoff=None) -> dict[SymMat, complex]:
        """Orbit expansion: every member ``T`` with ``tr T <= trace_cutoff`` and its coefficient.

        For ``n = 1`` orbits are singletons and the cutoff is ignored.
        """
        if self.n == 1:
            return dict(self.entries)
        if not self.canonical:
            raise ValueError("orbit expansion needs a canonical table")
        X = default_trace_cutoff(self) if trace_cutoff is None else Fraction(trace_cutoff)
        out = {}
        for C, a in self.entries.items():
            for T in orbit_members(C, X):
                if self.convention == 1:
                    out[T] = a
                else:
                    _, gammas = canonical_transforms(T)
                    out[T] = a * self.chi(mat_det(gammas[0]))
        return dict(sorted(out.items(), key=lambda kv: _sort_key(kv[0])))


def default_trace_cutoff(table: CoeffTable) -> Fraction:
    """Twice the largest canonical trace: enough to see every key's near neighbours."""
    if not table.entries:
        return Fraction(0)
    return 2 * max(T.trace() for T in table.entries)


def normalize(aT: complex, T: SymMat, ell) -> complex:
    """``beta_T = det(T)^(-ell/2) a_T``."""
    return aT * float(T.det()) ** (-float(ell) / 2)


def denormalize(beta: complex, T: SymMat, ell) -> complex:
    return beta * float(T.det()) ** (float(ell) / 2)


# ---------------------------------------------------------------------------
# P-symmetry


@dataclass(frozen=True)
class Violation:
    T: SymMat
    gamma: tuple
    expected: complex
    found: complex

    @property
    def magnitude(self) -> float:
        return abs(self.expected - self.found)

    def to_json(self) -> dict:
        return {
            "T": self.T.to_json(),
            "gamma": [[str(x) for x in r] for r in self.gamma],
            "expected": [self.expected.real, self.expected.imag],
            "found": [self.found.real, self.found.imag],
            "magnitude": self.magnitude,
        }


def check_p_symmetry(table: CoeffTable, gamma_samples: Iterable, tol: float = 1e-12) -> list[Violation]:
    """Check ``a_{T.g} = chi(det g) a_T`` for stored ``T`` and sampled unimodular ``g``.

    On a canonical table both sides are recovered through canonicalization,
    so a violation means some key has an automorphism of determinant -1
    while ``chi(-1) = -1`` and its coefficient is nonzero.  On a raw table
    the two sides are compared whenever ``T.g`` is itself stored.
    """
    gammas = [tuple(tuple(Fraction(x) for x in row) for row in g) for g in gamma_samples]
    for g in gammas:
        if abs(mat_det(g)) != 1:
            raise ValueError(f"sample {g} is not unimodular")
    out = []
    if table.canonical:
        for C in table.entries:
            if canonical_transforms(C)[0] != C:
                raise NonCanonicalKey(f"key {C} is not canonical")
    for T, a in table.entries.items():
        for g in gammas:
            Tg = gl_action(T, g)
            expected = table.chi(mat_det(g)) * a
            if table.canonical:
                _, back = canonical_transforms(Tg)
                found = table.chi(mat_det(back[0])) * a
            elif Tg in table.entries:
                found = table.entries[Tg]
            else:
                continue
            if abs(expected - found) > tol * max(1.0, abs(a)):
                out.append(Violation(T, g, expected, found))
    return out


# ---------------------------------------------------------------------------
# evaluation


def _float_point(Z: HalfSpacePoint) -> list[list[complex]]:
    n = Z.n
    return [[complex(float(Z.real[i, j]), float(Z.imag[i, j])) for j in range(n)] for i in range(n)]


def _terms(entries: Mapping[SymMat, complex], Z: HalfSpacePoint) -> list[complex]:
    z = _float_point(Z)
    n = Z.n
    out = []
    for T, a in entries.items():
        # tr(T Z) with T, Z symmetric
        s = sum(float(T[i, j]) * z[j][i] for i in range(n) for j in range(n))
        out.append(a * cmath.exp(2j * math.pi * s))
    return out


def _csum(terms: Sequence[complex]) -> complex:
    return complex(math.fsum(t.real for t in terms), math.fsum(t.imag for t in terms))


def eval_partial(table: CoeffTable, Z: HalfSpacePoint, trace_cutoff=None) -> complex:
    """``sum_T a_T exp(2 pi i tr(T Z))`` over the (orbit-expanded) table."""
    if Z.n != table.n:
        raise ValueError("dimension mismatch")
    return _csum(_terms(table.expanded(trace_cutoff), Z))


def eval_certified(table: CoeffTable, Z: HalfSpacePoint, sup_beta: float, R, mu, trace_cutoff=None
                   ) -> tuple[complex, float]:
    """Truncated evaluation at ``det(T) <= R`` with a rigorous error bound.

    Hypotheses (recorded by the caller): the table holds every nonzero
    coefficient with ``det(T) <= R``; ``|beta_T| <= sup_beta`` whenever
    ``det(T) > R``; and ``Im Z >= mu``.  The bound covers truncation only;
    floating-point summation error is not included.  For ``n >= 2`` the orbit expansion
    is cut at ``trace_cutoff`` and the omitted orbit members are bounded
    with the table's own largest ``|beta|``.
    """
    if not 0 < mu < 1:
        raise ValueError("mu must lie strictly between 0 and 1")
    if Z.n != table.n:
        raise ValueError("dimension mismatch")
    if min_eigenvalue(Z.imag) < mu:
        raise ValueError("Im Z is below the stated floor mu")
    R = Fraction(R)
    if R <= 0:
        raise ValueError("R must be positive")
    low = CoeffTable(table.n, table.ell, table.M, {T: a for T, a in table.entries.items() if T.det() <= R},
                     table.convention, canonical=table.canonical, validate=False)
    X = default_trace_cutoff(low) if trace_cutoff is None else Fraction(trace_cutoff)
    ent = low.expanded(X)
    terms = _terms(ent, Z)
    value = _csum(terms)

    dety = float(mpmath.det(Z.imag))
    params = bounds.BoundParams(table.ell, table.n, mu, table.M, R=float(R))
    with bounds.ivprec(53):
        scale = iv.mpf(dety) ** (-float(table.ell) / 2) if table.ell else iv.mpf(1)
        err = iv.mpf(sup_beta) * iv.mpf(bounds.tail_bound(params).value) * scale
        if table.n >= 2 and low.entries:
            beta_max = max(abs(normalize(a, T, table.ell)) for T, a in low.entries.items())
            err += iv.mpf(beta_max) * iv.mpf(bounds.trace_tail_bound(params, X).value) * scale
        err *= 1 + iv.mpf(2) ** -40
    return value, float(err.b)


# ---------------------------------------------------------------------------
# Fourier-Jacobi slices


def fj_slice(table: CoeffTable, t, trace_cutoff=None) -> dict[tuple[SymMat, tuple[Fraction, ...]], complex]:
    """Coefficients with upper-left entry ``t``, keyed by ``(T', xi)`` for ``T = [[t, xi^t], [xi, T']]``."""
    if table.n < 2:
        raise ValueError("Fourier-Jacobi slices need n >= 2")
    t = Fraction(t)
    n = table.n
    out = {}
    for T, a in table.expanded(trace_cutoff).items():
        if T[0, 0] != t:
            continue
        Tp = SymMat([[T[i, j] for j in range(1, n)] for i in range(1, n)])
        xi = tuple(T[i, 0] for i in range(1, n))
        out[(Tp, xi)] = a
    return out


def slice_is_positive(t, Tp: SymMat, xi: Sequence[Fraction]) -> bool:
    """``t T' - xi xi^t > 0``, equivalent to the full matrix being positive-definite when ``t > 0``."""
    t = Fraction(t)
    m = Tp.n
    S = SymMat([[t * Tp[i, j] - xi[i] * xi[j] for j in range(m)] for i in range(m)])
    return t > 0 and is_positive_definite(S)


# ---------------------------------------------------------------------------
# growth induction


@dataclass(frozen=True)
class GrowthSchedule:
    delta: float
    D0: float
    Q: float
    E: float

    def __post_init__(self):
        if not self.delta > 1:
            raise ValueError("delta must exceed 1")
        if not self.D0 > 1:
            raise ValueError("D0 must exceed 1")
        if not (self.Q > 0 and self.E > 0):
            raise ValueError("Q and E must be positive")

    def shell(self, det: float) -> int:
        if det < self.D0:
            return 0
        L = math.log(det) / math.log(self.D0)
        m = int(math.floor(math.log(L) / math.log(self.delta))) + 1
        # guard the float estimate with direct comparisons
        while m > 1 and L < self.delta ** (m - 1):
            m -= 1
        while L >= self.delta**m:
            m += 1
        return m

    def log_f(self, m: int, E: float | None = None) -> float:
        E = self.E if E is None else E
        if m == 0:
            return math.log(self.Q)
        return math.log(self.Q) + E * (self.delta**m - 1) / (self.delta - 1) * math.log(self.D0)

    def exponent(self, E: float | None = None) -> float:
        E = self.E if E is None else E
        return self.delta * E / (self.delta - 1)


@dataclass
class GrowthCertificate:
    passed: bool
    rows: list = field(default_factory=list)
    minimal_E: float | None = None
    exponent: float = 0.0

    def to_json(self) -> dict:
        return {"passed": self.passed, "minimal_E": self.minimal_E, "exponent": self.exponent, "rows": self.rows}


def _all_pass(sched: GrowthSchedule, data, E) -> bool:
    return all(lb <= sched.log_f(m, E) for m, lb in data)


def growth_certify(table: CoeffTable, sched: GrowthSchedule, tol: float = 1e-9) -> GrowthCertificate:
    """Check ``|beta_T| <= f(det T)`` on the shells ``D0^(delta^(m-1)) <= det < D0^(delta^m)``.

    Also reports the least E (to within ``tol``) for which every check passes,
    or ``None`` when no E works (a base-shell coefficient exceeds Q).
    """
    if not 1 < sched.delta < table.n:
        raise ValueError(f"need 1 < delta < n = {table.n}, got delta = {sched.delta}")
    rows, data = [], []
    for T, a in table.entries.items():
        det = float(T.det())
        beta = abs(normalize(a, T, table.ell))
        m = sched.shell(det)
        lb = math.log(beta) if beta > 0 else -math.inf
        lf = sched.log_f(m)
        poly = math.log(sched.Q) + sched.exponent() * math.log(det)
        rows.append({"T": T.to_json(), "det": det, "shell": m, "abs_beta": beta, "log_f": lf,
                     "pass": lb <= lf, "poly_pass": lb <= poly})
        data.append((m, lb))
    passed = all(r["pass"] for r in rows)

    minimal = None
    if _all_pass(sched, data, 0.0):
        minimal = 0.0
    else:
        hi = 1.0
        while hi < 1e6 and not _all_pass(sched, data, hi):
            hi *= 2
        if _all_pass(sched, data, hi):
            lo = 0.0
            while hi - lo > tol:
                mid = (lo + hi) / 2
                if _all_pass(sched, data, mid):
                    hi = mid
                else:
                    lo = mid
            minimal = hi
    return GrowthCertificate(passed, rows, minimal, sched.exponent())


# ---------------------------------------------------------------------------
# the discriminant function, as golden genus-1 data


def _mul_trunc(a: list[int], b: list[int], N: int) -> list[int]:
    out = [0] * N
    for i, x in enumerate(a):
        if x:
            for j in range(min(len(b), N - i)):
                out[i + j] += x * b[j]
    return out


def delta_coeffs(N: int) -> list[int]:
    """Ramanujan's ``tau(1..N)`` from ``q prod_m (1 - q^m)^24``, exactly."""
    if N < 1:
        raise ValueError("N must be >= 1")
    P = [1] + [0] * (N - 1)  # prod (1 - q^m) to degree N - 1
    for m in range(1, N):
        for k in range(N - 1, m - 1, -1):
            P[k] -= P[k - m]
    P2 = _mul_trunc(P, P, N)
    P4 = _mul_trunc(P2, P2, N)
    P8 = _mul_trunc(P4, P4, N)
    P16 = _mul_trunc(P8, P8, N)
    return _mul_trunc(P16, P8, N)


def delta_table(N: int) -> CoeffTable:
    """Genus-1 weight-12 table ``{k: tau(k)}`` for ``k <= N``."""
    tau = delta_coeffs(N)
    return CoeffTable(1, 12, 1, {SymMat([[k]]): tau[k - 1] for k in range(1, N + 1)})


# ---------------------------------------------------------------------------
# JSON-lines coefficient files


def _num(x) -> float:
    return float(Fraction(x)) if isinstance(x, str) and "/" in x else float(x)


def write_table(table: CoeffTable, path) -> None:
    with open(path, "w") as fh:
        header = {"n": table.n, "ell": str(table.ell), "M": table.M, "convention": table.convention}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for T, a in table.entries.items():
            rec = {"T": T.to_json(), "a_re": repr(a.real), "a_im": repr(a.imag)}
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


def read_table(path, canonical: bool = True) -> CoeffTable:
    """Read a coefficient file.  A non-canonical file is accepted with ``canonical=False``."""
    with open(path) as fh:
        lines = [ln for ln in fh if ln.strip()]
    if not lines:
        raise ValueError("empty coefficient file")
    header = json.loads(lines[0])
    entries = {}
    for ln in lines[1:]:
        rec = json.loads(ln)
        T = SymMat.from_json(rec["T"])
        entries[T] = complex(_num(rec["a_re"]), _num(rec.get("a_im", "0")))
    return CoeffTable(int(header["n"]), Fraction(str(header["ell"])), int(header.get("M", 1)), entries,
                      header.get("convention"), canonical=canonical)
