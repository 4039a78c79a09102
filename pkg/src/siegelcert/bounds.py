"""Certified upper bounds for the truncated Fourier series of a cusp form.

All bound-producing functions evaluate in outward-rounded interval
arithmetic (``mpmath.iv``) and return the upper endpoint, rounded up to a
double.  The oracle sums (:func:`s_partial`, :func:`tail_partial`) are plain
floating point; they are what the bounds get checked against.

Notation: ``N = n(n+1)/2`` is the number of free entries of a symmetric
matrix, and ``r = pi mu / (2M)`` is half the decay rate per unit of ``M tr T``.
"""

from __future__ import annotations

import math
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field
from fractions import Fraction


import mpmath
from mpmath import iv

from .enumeration import iter_scaled_by_trace
from .reduction import EPSILON
from .symmat import SymMat

IV_PREC = 80
SLACK = "outward-rounded interval arithmetic (mpmath.iv, 80 bits), upper endpoint rounded up to binary64"


@dataclass(frozen=True)
class BoundParams:
    ell: Fraction
    n: int
    mu: Fraction | float
    M: int = 1
    R: float | None = None
    eps: float | None = None

    def __post_init__(self):
        ell = Fraction(self.ell)
        object.__setattr__(self, "ell", ell)
        if ell < 0 or (2 * ell).denominator != 1:
            raise ValueError("weight must be a non-negative half-integer")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if not 0 < self.mu < 1:
            raise ValueError("mu must lie strictly between 0 and 1")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError("M must be a positive integer")
        if self.R is not None and self.R <= 0:
            raise ValueError("R must be positive")
        if self.eps is not None and self.eps < 0:
            raise ValueError("eps must be non-negative")

    def snapshot(self) -> dict:
        return {k: (str(v) if isinstance(v, Fraction) else v) for k, v in asdict(self).items()}


@dataclass(frozen=True)
class BoundReport:
    value: float
    formula: str
    inputs: dict
    slack: str = SLACK
    extra: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {"value": self.value, "formula": self.formula, "inputs": self.inputs, "slack": self.slack, **self.extra}


@contextmanager
def ivprec(prec: int):
    """Temporarily set the interval context's working precision (bits)."""
    old = iv.prec
    iv.prec = prec
    try:
        yield
    finally:
        iv.prec = old


def _iv(x):
    """Exact enclosure of an int, Fraction or float."""
    if isinstance(x, Fraction):
        return iv.mpf(x.numerator) / x.denominator
    if isinstance(x, int):
        return iv.mpf(x)
    return iv.mpf(mpmath.mpf(x))


def _up(x) -> float:
    """Upper endpoint of an interval, rounded up to a double."""
    b = x.b
    f = float(b)
    if mpmath.mpf(f) < b:
        f = math.nextafter(f, math.inf)
    return f


def _pow(base, e):
    # iv has no 0**0 convention; callers only pass base > 0 or e == 0
    if e == 0:
        return iv.mpf(1)
    return iv.exp(e * iv.log(base))


def _power_exp_iv(N, r):
    if N == 0:
        return iv.mpf(1)
    return _pow(N / r, N) * iv.exp(-N)


def power_exp_bound(N, r) -> float:
    """``(N/r)^N e^-N``, the maximum of ``v^N e^(-r v)`` over ``v >= 0``."""
    if r <= 0:
        raise ValueError("r must be positive")
    if N < 0:
        raise ValueError("N must be non-negative")
    with ivprec(IV_PREC):
        return _up(_power_exp_iv(_iv(N), _iv(r)))


def _c_iv(ell: Fraction, n: int):
    if ell == 0:
        return iv.mpf(1)
    ln = _iv(ell * n)
    return _pow(ln / (2 * iv.pi), ln / 2) * _pow(iv.mpf(n), -ln / 2) * iv.exp(-ln / 2)


def c_const(ell, n: int) -> float:
    """Uniform bound on ``det(Ty)^(ell/2) exp(-pi (T, y))`` over positive-definite T, y."""
    with ivprec(IV_PREC):
        return _up(_c_iv(Fraction(ell), n))


def _d_iv(ell: Fraction, n: int, mu):
    N = n * (n + 1) // 2
    pm = iv.pi * _iv(mu)
    return _c_iv(ell, n) * iv.mpf(2) ** (n * (n - 1) // 2) * _power_exp_iv(iv.mpf(N), pm / 2) * (2 / pm)


def d_const(ell, n: int, mu) -> tuple[float, Fraction]:
    """``(D, alpha)`` with ``S_ell(M, y) <= D M^alpha`` for every ``y >= mu``.

    ``D = C_{ell,n} 2^(n(n-1)/2) (2N/(pi mu))^N e^-N (2/(pi mu))`` and
    ``alpha = N + 1``.
    """
    BoundParams(ell, n, mu)
    N = n * (n + 1) // 2
    with ivprec(IV_PREC):
        return _up(_d_iv(Fraction(ell), n, mu)), Fraction(N + 1)


def _du_iv(ell: Fraction, n: int, mu):
    return _d_iv(ell, n, mu) * (1 + iv.pi * _iv(mu) / 2)


def d_const_uniform(ell, n: int, mu) -> tuple[float, Fraction]:
    """A ``D`` valid for both the full sum and the ``det >= R`` tail.

    The geometric tail starting at a possibly integral ``n M R^(1/n)`` costs
    an extra factor ``r / (1 - e^-r) <= 1 + r <= 1 + pi mu / 2`` over the
    full-sum constant.
    """
    BoundParams(ell, n, mu)
    N = n * (n + 1) // 2
    with ivprec(IV_PREC):
        return _up(_du_iv(Fraction(ell), n, mu)), Fraction(N + 1)


def _scaled_det(n: int, diag, offs) -> int:
    """det of the integral matrix 2M T, from scaled units."""
    if n == 1:
        return 2 * diag[0]
    if n == 2:
        return 4 * diag[0] * diag[1] - offs[0] ** 2
    if n == 3:
        A, B, C = (2 * a for a in diag)
        x, y, z = offs
        return A * (B * C - z * z) - x * (x * C - z * y) + y * (x * z - B * y)
    raise ValueError("oracle sums are implemented for n <= 3")


def _scaled_sums(ell, M: int, y: SymMat, cutoff, det_min=None) -> list[float]:
    n = y.n
    yd = [float(y[i, i]) for i in range(n)]
    yo = [float(y[i, j]) for i in range(n) for j in range(i + 1, n)]
    dety = float(y.det())
    half_ell = float(ell) / 2
    scale = (2 * M) ** n
    det_min = None if det_min is None else Fraction(det_min) * scale
    terms = []
    for diag, offs in iter_scaled_by_trace(n, M, cutoff):
        d = _scaled_det(n, diag, offs)
        if det_min is not None and d < det_min:
            continue
        # (T, y) = sum_i T_ii y_ii + 2 sum_{i<j} T_ij y_ij, with 2 T_ij = b_ij / M
        pair = (math.fsum(a * v for a, v in zip(diag, yd)) + math.fsum(b * v for b, v in zip(offs, yo))) / M
        w = math.exp(-2 * math.pi * pair)
        if half_ell:
            w *= (d / scale * dety) ** half_ell
        terms.append(w)
    return terms


def s_partial(ell, M: int, y: SymMat, cutoff) -> float:
    """Partial sum of ``det(T)^(ell/2) det(y)^(ell/2) exp(-2 pi (T, y))`` over T with trace <= cutoff."""
    if Fraction(cutoff) <= 0:
        return 0.0
    return math.fsum(_scaled_sums(ell, M, y, cutoff))


def tail_partial(ell, M: int, y: SymMat, cutoff, R) -> float:
    """As :func:`s_partial`, restricted to ``det(T) >= R``."""
    if Fraction(cutoff) <= 0:
        return 0.0
    return math.fsum(_scaled_sums(ell, M, y, cutoff, det_min=Fraction(R)))


def s_bound(params: BoundParams) -> BoundReport:
    """Bound ``D M^alpha`` on the full series, uniform in ``y >= mu``."""
    D, alpha = d_const(params.ell, params.n, params.mu)
    with ivprec(IV_PREC):
        val = _iv(D) * iv.mpf(params.M) ** int(alpha)
        return BoundReport(_up(val), "full_sum", params.snapshot(), extra={"D": D, "alpha": str(alpha)})


def tail_bound(params: BoundParams) -> BoundReport:
    """Bound on the ``det(T) >= R`` part of the series, uniform in ``y >= mu``.

    Value is ``D' M^alpha exp(-pi mu n R^(1/n) / 2)`` with ``D'`` from
    :func:`d_const_uniform`.
    """
    if params.R is None:
        raise ValueError("tail_bound needs R")
    n, M = params.n, params.M
    N = n * (n + 1) // 2
    with ivprec(IV_PREC):
        D = _du_iv(params.ell, n, params.mu)
        R = _iv(params.R)
        val = D * iv.mpf(M) ** (N + 1) * iv.exp(-iv.pi * _iv(params.mu) * n * _pow(R, iv.mpf(1) / n) / 2)
        return BoundReport(_up(val), "tail_det_ge_R", params.snapshot())


def trace_tail_bound(params: BoundParams, X) -> BoundReport:
    """Bound on the ``tr(T) > X`` part of the series, uniform in ``y >= mu``.

    Sums ``k^N e^(-2 r k)`` over ``k > M X`` after splitting off
    ``(N/r)^N e^-N``.
    """
    n, M = params.n, params.M
    N = n * (n + 1) // 2
    k1 = math.floor(M * Fraction(X)) + 1
    with ivprec(IV_PREC):
        r = iv.pi * _iv(params.mu) / (2 * M)
        geo = iv.exp(-r * k1) / (1 - iv.exp(-r))
        val = _c_iv(params.ell, n) * iv.mpf(2) ** (n * (n - 1) // 2) * _power_exp_iv(iv.mpf(N), r) * geo
        return BoundReport(_up(val), "tail_trace_gt_X", {**params.snapshot(), "X": str(X)})


def _epsilon(n: int, eps_n=None):
    if eps_n is not None:
        return eps_n
    if n not in EPSILON:
        raise ValueError(f"no Siegel-set floor configured for n = {n}")
    return EPSILON[n]


def sturm_cutoff(ell, n: int, M: int, eps_n=None) -> float:
    """Determinant cutoff ``R`` with ``e^(2 pi n) D M^alpha e^(-pi eps n R^(1/n) / 2) = 1/2``.

    ``D`` is :func:`d_const_uniform` at ``mu = eps_n`` and the result is
    rounded up, which only makes the tail factor smaller.
    """
    return float(sturm_report(ell, n, M, eps_n).value)


def sturm_report(ell, n: int, M: int, eps_n=None) -> BoundReport:
    eps = _epsilon(n, eps_n)
    params = BoundParams(ell, n, eps, M)
    D, alpha = d_const_uniform(ell, n, eps)
    with ivprec(IV_PREC):
        arg = 2 * iv.exp(2 * iv.pi * n) * _iv(D) * iv.mpf(M) ** int(alpha)
        if arg.a <= 1:
            raise ValueError("log argument must exceed 1")
        root = 2 / (iv.pi * n * _iv(eps)) * iv.log(arg)
        R = _up(_pow(root, iv.mpf(n)))
    residual = half_equation_residual(D, alpha, n, M, eps, R)
    return BoundReport(R, "sturm_cutoff", params.snapshot(), extra={"D": D, "alpha": str(alpha), "residual": residual})


def half_equation_residual(D, alpha, n, M, eps, R, dps: int = 40) -> float:
    """``|e^(2 pi n) D M^alpha exp(-pi eps n R^(1/n) / 2) - 1/2|`` at high precision."""
    with mpmath.workdps(dps):
        lhs = mpmath.exp(2 * mpmath.pi * n) * mpmath.mpf(D) * mpmath.mpf(M) ** int(alpha) * mpmath.exp(
            -mpmath.pi * mpmath.mpf(eps) * n * mpmath.root(mpmath.mpf(R), n) / 2
        )
        return float(abs(lhs - mpmath.mpf(1) / 2))


def sup_bound_from_coeffs(params: BoundParams) -> BoundReport:
    """Sup-norm bound ``eps * 2 e^(2 pi n) D M^alpha`` from small low coefficients.

    ``extra["coefficient_bound"]`` carries the companion bound
    ``eps * 2 e^(4 pi n) D M^alpha`` on every normalized coefficient.
    ``params.mu`` is the Siegel-set floor and must not exceed eps_n.
    """
    if params.eps is None:
        raise ValueError("sup_bound_from_coeffs needs eps")
    n, M = params.n, params.M
    if n in EPSILON and params.mu > EPSILON[n]:
        raise ValueError("mu exceeds the Siegel-set floor for this n")
    D, alpha = d_const_uniform(params.ell, n, params.mu)
    with ivprec(IV_PREC):
        K_sup = _up(2 * iv.exp(2 * iv.pi * n) * _iv(D) * iv.mpf(M) ** int(alpha))
        K_coef = _up(2 * iv.exp(4 * iv.pi * n) * _iv(D) * iv.mpf(M) ** int(alpha))
    with ivprec(53):
        eps = _iv(params.eps)
        sup = _up(eps * _iv(K_sup))
        coef = _up(eps * _iv(K_coef))
    return BoundReport(sup, "sup_from_low_coefficients", params.snapshot(), extra={"coefficient_bound": coef, "D": D})


def coeff_bound_from_sup(L, n: int) -> float:
    """``e^(2 pi n) L``: every normalized coefficient is bounded by this."""
    if L < 0:
        raise ValueError("L must be non-negative")
    if L == 0:
        return 0.0
    with ivprec(IV_PREC):
        return _up(iv.exp(2 * iv.pi * n) * _iv(L))
