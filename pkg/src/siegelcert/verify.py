"""Grid verification of the counting, power-exponential, series and coefficient lemmas.

Every check produces a record ``{"check", "params", "lhs", "rhs", "margin", "pass"}``
with ``lhs <= rhs`` the inequality being verified.  Records come out in a
fixed order so repeated runs serialize identically.
"""

from __future__ import annotations

import math
import random
from fractions import Fraction

import numpy as np

from . import bounds
from .enumeration import count_bound, count_by_trace
from .reduction import EPSILON
from .series import delta_coeffs
from .symmat import SymMat

GRIDS = {
    "small": {
        "count": {"n": (2, 3), "M": (1, 2), "X": (1, 2, 3)},
        "power_exp": 5,
        "series_n": (1, 2),
        "series_ell": (0, 12),
        "series_mu": ("1/4", "eps"),
        "series_M": (1, 2),
        "tail_R": (1, 5),
        "sturm_ell": (0, 6, 12),
        "sturm_M": (1, 4),
        "tau_N": 20,
        "fd_grid": 60,
    },
    "full": {
        "count": {"n": (1, 2, 3), "M": (1, 2, 3), "X": ("1/2", 1, 2, "5/2", 3, 4, 5, 6)},
        "power_exp": 20,
        "series_n": (1, 2),
        "series_ell": (0, 6, 12),
        "series_mu": ("1/4", "1/2", "eps"),
        "series_M": (1, 2, 4),
        "tail_R": (1, 2, 5, 10),
        "sturm_ell": tuple(Fraction(k, 2) for k in range(25)),
        "sturm_M": (1, 2, 3, 4),
        "tau_N": 50,
        "fd_grid": 200,
    },
}


def _record(check: str, params: dict, lhs, rhs) -> dict:
    lhs, rhs = float(lhs), float(rhs)
    return {"check": check, "params": params, "lhs": lhs, "rhs": rhs, "margin": rhs - lhs, "pass": lhs <= rhs}


def verify_counting(grid) -> list[dict]:
    out = []
    for n in grid["n"]:
        for M in grid["M"]:
            for X in grid["X"]:
                X = Fraction(X)
                c = count_by_trace(n, M, X)
                out.append(_record("count_bound", {"n": n, "M": M, "X": str(X)}, c, count_bound(n, M, X)))
    return out


def grid_max_power_exp(N: float, r: float, points: int = 10_000) -> float:
    """Max of v^N e^(-r v) on an even grid over [0, 4 N / r + 1]."""
    v = np.linspace(0.0, 4 * N / r + 1, points)
    return float(np.max(v**N * np.exp(-r * v)))


def verify_power_exp(count: int, seed: int) -> list[dict]:
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        N = round(rng.uniform(0, 12), 3)
        r = round(rng.uniform(0.1, 5), 3)
        out.append(_record("power_exp", {"N": N, "r": r}, grid_max_power_exp(N, r), bounds.power_exp_bound(N, r)))
    return out


SERIES_CUTOFF = {1: Fraction(40), 2: Fraction(8)}


def _mu_values(spec, n):
    return [EPSILON[n] if m == "eps" else Fraction(m) for m in spec]


def _y_samples(n: int, mu) -> list[SymMat]:
    mu = Fraction(mu)
    if n == 1:
        return [SymMat([[mu]]), SymMat([[mu + 1]])]
    return [SymMat.diag(*([mu] * n)), SymMat.diag(mu, *([mu + Fraction(1, 2)] * (n - 1)))]


def verify_series(grid) -> list[dict]:
    out = []
    for n in grid["series_n"]:
        for mu in _mu_values(grid["series_mu"], n):
            for ell in grid["series_ell"]:
                D, alpha = bounds.d_const(ell, n, mu)
                for M in grid["series_M"]:
                    X = SERIES_CUTOFF[n]
                    for y in _y_samples(n, mu):
                        p = {"n": n, "ell": str(ell), "mu": str(mu), "M": M, "y": y.to_json(), "cutoff": str(X)}
                        s = bounds.s_partial(ell, M, y, X)
                        out.append(_record("S_partial_le_DM^alpha", p, s, D * M ** int(alpha)))
                        for R in grid["tail_R"]:
                            t = bounds.tail_partial(ell, M, y, X, R)
                            tb = bounds.tail_bound(bounds.BoundParams(ell, n, mu, M, R=R)).value
                            out.append(_record("T_partial_le_tail_bound", {**p, "R": R}, t, tb))
    return out


def verify_sturm(grid, tolerance: float = 1e-10) -> list[dict]:
    out = []
    for n in (1, 2):
        for ell in grid["sturm_ell"]:
            for M in grid["sturm_M"]:
                rep = bounds.sturm_report(ell, n, M)
                out.append(_record("sturm_half_equation", {"n": n, "ell": str(ell), "M": M, "R": rep.value},
                                   rep.extra["residual"], tolerance))
    return out


def delta_fd_sup(grid: int = 200, terms: int = 40) -> float:
    """Estimate ``sup |Delta(z)| Im(z)^6`` by sampling the standard fundamental domain.

    The domain ``|x| <= 1/2, |z| >= 1`` is sampled on a ``grid x grid``
    mesh in ``x`` and ``y in [sqrt(1 - x^2), 2.5]``, edges included.
    Above ``y = 2.5`` the function stays below 4e-5, far under its values near ``y = 1``.
    """
    tau = np.array(delta_coeffs(terms), dtype=float)
    k = np.arange(1, terms + 1)
    xs = np.linspace(-0.5, 0.5, grid)
    best = 0.0
    for x in xs:
        y0 = math.sqrt(1 - x * x)
        ys = np.linspace(y0, 2.5, grid)
        z = x + 1j * ys
        q = np.exp(2j * np.pi * np.outer(z, k))
        vals = np.abs(q @ tau) * ys**6
        best = max(best, float(vals.max()))
    return best


def verify_fc_bound(grid) -> list[dict]:
    N = grid["tau_N"]
    tau = delta_coeffs(N)
    L = delta_fd_sup(grid["fd_grid"])
    rhs = bounds.coeff_bound_from_sup(L, 1)
    return [_record("fc_bound_genus1", {"k": k, "sup_estimate": L}, abs(tau[k - 1]) / k**6, rhs) for k in range(1, N + 1)]


def verify_lemmas(grid_name: str = "small", seed: int = 0) -> list[dict]:
    grid = GRIDS[grid_name]
    return (
        verify_counting(grid["count"])
        + verify_power_exp(grid["power_exp"], seed)
        + verify_series(grid)
        + verify_sturm(grid)
        + verify_fc_bound(grid)
    )
