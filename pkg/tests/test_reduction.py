import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from siegelcert.reduction import (
    EPSILON,
    HERMITE,
    SymplecticMat,
    canonical_transforms,
    cocycle_j,
    lll_gram,
    minkowski_reduce,
    provable_radius,
    short_vectors,
    shortest_value_bruteforce,
    siegel_reduce,
    symplectic_act,
)
from siegelcert.symmat import HalfSpacePoint, SymMat, is_positive_definite, mat_det, min_eigenvalue


def random_pd_int(rng, n, bound=50):
    while True:
        u = [rng.randint(-bound, bound) for _ in range(n * (n + 1) // 2)]
        T = SymMat.from_upper(n, u)
        if is_positive_definite(T):
            return T


def random_unimodular(rng, n, steps=6):
    g = [[int(i == j) for j in range(n)] for i in range(n)]
    for _ in range(steps):
        i, j = rng.sample(range(n), 2)
        q = rng.choice([-2, -1, 1, 2])
        for r in range(n):
            g[r][j] += q * g[r][i]
        if rng.random() < 0.3:
            for r in range(n):
                g[r][i] = -g[r][i]
    return g


def random_point(rng, n, lo=0.01, hi=2.0):
    X = mpmath.matrix(n, n)
    for i in range(n):
        for j in range(i, n):
            X[i, j] = X[j, i] = rng.uniform(-2, 2)
    if n == 1:
        Y = mpmath.matrix([[rng.uniform(lo, hi)]])
    else:
        th = rng.uniform(0, math.pi)
        R = mpmath.matrix([[math.cos(th), -math.sin(th)], [math.sin(th), math.cos(th)]])
        Y = R * mpmath.diag([rng.uniform(lo, hi), rng.uniform(lo, hi)]) * R.T
        Y = (Y + Y.T) / 2
    return HalfSpacePoint(X, Y)


def random_symplectic(rng, n, steps=4):
    g = SymplecticMat.identity(n)
    for _ in range(steps):
        k = rng.randrange(4)
        if k == 0:
            S = [[0] * n for _ in range(n)]
            for i in range(n):
                for j in range(i, n):
                    S[i][j] = S[j][i] = rng.randint(-2, 2)
            h = SymplecticMat.translation(S)
        elif k == 1:
            h = SymplecticMat.levi(random_unimodular(rng, n, 2) if n > 1 else [[rng.choice([-1, 1])]])
        elif k == 2:
            h = SymplecticMat.inversion(n)
        else:
            h = SymplecticMat.partial_inversion(n, rng.randrange(n))
        g = h @ g
    return g


def mp_close(A, B, tol):
    return mpmath.mnorm(A - B, 1) <= tol * max(1, mpmath.mnorm(A, 1))


# --- Minkowski ------------------------------------------------------------


def test_identity_is_already_reduced():
    cert = minkowski_reduce(SymMat.identity(2))
    assert cert.reduced == SymMat.identity(2)
    assert cert.transform == ((1, 0), (0, 1))
    assert cert.passed


def test_reduce_5_2_2_1():
    T = SymMat([[5, 2], [2, 1]])
    cert = minkowski_reduce(T)
    assert cert.reduced[0, 0] == 1
    assert T.quad((0, 1)) == 1
    assert shortest_value_bruteforce(T, 10) == 1
    assert cert.reduced[0, 0] <= HERMITE[2] * math.sqrt(T.det())
    assert cert.passed


def test_reduced_n2_lands_in_the_classical_cell():
    rng = random.Random(11)
    for _ in range(100):
        R = minkowski_reduce(random_pd_int(rng, 2)).reduced
        assert 0 <= 2 * R[0, 1] <= R[0, 0] <= R[1, 1]


def test_shortest_value_examples():
    assert shortest_value_bruteforce(SymMat.identity(2), 1) == 1
    assert shortest_value_bruteforce(SymMat([[5, 2], [2, 1]]), 5) == 1
    assert shortest_value_bruteforce(SymMat([[2, 1], [1, 2]]), 5) == 2
    with pytest.raises(ValueError):
        shortest_value_bruteforce(SymMat.identity(2), 0)


def test_provable_radius_allows_zero_axes():
    T = SymMat.diag(1, 100)
    assert provable_radius(T) == (1, 0)
    assert shortest_value_bruteforce(T, provable_radius(T)) == 1


@pytest.mark.parametrize("n", [2, 3])
def test_minimum_equals_bruteforce(n):
    rng = random.Random(100 + n)
    for _ in range(60):
        T = random_pd_int(rng, n)
        cert = minkowski_reduce(T)
        assert cert.passed, cert.checks
        assert cert.reduced[0, 0] == shortest_value_bruteforce(T, provable_radius(T))
        assert cert.reduced[0, 0] <= HERMITE[n] * float(T.det()) ** (1 / n) * (1 + 1e-12)


def test_hermite_constants_are_attained():
    # the hexagonal and fcc forms meet the bound with equality
    hexa = SymMat([[2, 1], [1, 2]])
    fcc = SymMat([[2, 1, 1], [1, 2, 1], [1, 1, 2]])
    for T, n in ((hexa, 2), (fcc, 3)):
        m = minkowski_reduce(T).reduced[0, 0]
        assert m**n == {2: Fraction(4, 3), 3: Fraction(2)}[n] * T.det()


def test_canonical_transforms_are_automorphs():
    T = SymMat([[2, 1], [1, 2]])
    R, gammas = canonical_transforms(T)
    # the hexagonal lattice has 12 automorphs
    assert len(gammas) == 12
    for g in gammas:
        assert SymMat([[sum(g[k][i] * T[k, l] * g[l][j] for k in range(2) for l in range(2)) for j in range(2)]
                       for i in range(2)]) == R


def test_rejects_large_or_indefinite():
    with pytest.raises(ValueError):
        minkowski_reduce(SymMat.identity(4))
    with pytest.raises(ValueError):
        minkowski_reduce(SymMat([[1, 2], [2, 1]]))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 10**6))
def test_lll_is_unimodular_and_reproduces(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3])
    T = random_pd_int(rng, n, 30)
    U, G = lll_gram(T.rows)
    assert abs(mat_det(U)) == 1
    got = [[sum(U[k][i] * T[k, l] * U[l][j] for k in range(n) for l in range(n)) for j in range(n)] for i in range(n)]
    assert tuple(tuple(r) for r in got) == G


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6))
def test_canonical_form_is_orbit_invariant(seed):
    rng = random.Random(seed)
    n = rng.choice([2, 3])
    T = random_pd_int(rng, n, 20)
    g = random_unimodular(rng, n)
    Tg = SymMat([[sum(g[k][i] * T[k, l] * g[l][j] for k in range(n) for l in range(n)) for j in range(n)]
                 for i in range(n)])
    assert minkowski_reduce(T).reduced == minkowski_reduce(Tg).reduced


def test_short_vectors_complete():
    T = SymMat([[3, 1], [1, 2]])
    found = {v for v, _ in short_vectors(T.rows, Fraction(7))}
    brute = {(x, y) for x in range(-4, 5) for y in range(-4, 5) if (x, y) != (0, 0) and T.quad((x, y)) <= 7}
    assert found == brute


# --- symplectic action ------------------------------------------------------


def test_symplectic_relation_exact():
    for g in (SymplecticMat.inversion(2), SymplecticMat.translation([[1, 2], [2, 0]]),
              SymplecticMat.levi([[1, 1], [0, 1]]), SymplecticMat.partial_inversion(2, 1)):
        assert g.is_symplectic() and g.is_integral()
    with pytest.raises(ValueError):
        SymplecticMat([[1]], [[1]], [[1]], [[1]])
    with pytest.raises(ValueError):
        SymplecticMat.translation([[0, 1], [2, 0]])


def test_identity_action_and_inversion():
    Z = HalfSpacePoint([[mpmath.mpf("0.3")]], [[mpmath.mpf("0.1")]])
    W = symplectic_act(SymplecticMat.identity(1), Z)
    assert W.real[0, 0] == Z.real[0, 0] and W.imag[0, 0] == Z.imag[0, 0]
    z = HalfSpacePoint([[0]], [[Fraction(1, 10)]])
    w = symplectic_act(SymplecticMat.inversion(1), z)
    assert abs(w.real[0, 0]) < 1e-15 and abs(w.imag[0, 0] - 10) < 1e-15


def test_cocycle_examples():
    rng = random.Random(5)
    for n in (1, 2):
        Z = random_point(rng, n)
        assert cocycle_j(SymplecticMat.identity(n), Z) == 1
    z = random_point(rng, 1)
    j = cocycle_j(SymplecticMat.inversion(1), z)
    assert abs(j - mpmath.mpc(z.real[0, 0], z.imag[0, 0])) < 1e-15


@pytest.mark.parametrize("n", [1, 2])
def test_group_law_and_cocycle(n):
    rng = random.Random(40 + n)
    for _ in range(100):
        g, h = random_symplectic(rng, n), random_symplectic(rng, n)
        Z = random_point(rng, n, 0.3, 2.0)
        with mpmath.workprec(128):
            hZ = symplectic_act(h, Z, 128)
            lhs = symplectic_act(g @ h, Z, 128)
            rhs = symplectic_act(g, hZ, 128)
            assert mp_close(lhs.complex_matrix(), rhs.complex_matrix(), 1e-20)
            j_gh = cocycle_j(g @ h, Z, 128)
            j_prod = cocycle_j(g, hZ, 128) * cocycle_j(h, Z, 128)
            assert abs(j_gh - j_prod) <= 1e-10 * abs(j_gh)


# --- Siegel reduction -------------------------------------------------------


def classical_reduce(z: complex) -> complex:
    # textbook SL2(Z) reduction: translate, invert when |z| < 1
    for _ in range(10_000):
        z = complex(z.real - math.floor(z.real + 0.5), z.imag)
        if abs(z) >= 1 - 1e-15:
            return z
        z = -1 / z
    raise AssertionError("classical reduction did not terminate")


def test_siegel_identity_when_already_reduced():
    cert = siegel_reduce(HalfSpacePoint([[0]], [[1]]))
    assert cert.transform == SymplecticMat.identity(1)
    assert cert.passed


def test_siegel_matches_classical_n1():
    cert = siegel_reduce(HalfSpacePoint([[Fraction(1, 2)]], [[Fraction(1, 10)]]))
    assert cert.passed
    assert cert.reduced.imag[0, 0] >= EPSILON[1] - 1e-8
    rng = random.Random(9)
    for _ in range(50):
        Z = random_point(rng, 1)
        z = complex(float(Z.real[0, 0]), float(Z.imag[0, 0]))
        cert = siegel_reduce(Z)
        assert abs(float(cert.reduced.imag[0, 0]) - classical_reduce(z).imag) < 1e-9


def test_siegel_small_diagonal_n2():
    cert = siegel_reduce(HalfSpacePoint(SymMat.diag(0, 0), SymMat.diag(Fraction(1, 10), Fraction(1, 10))))
    assert cert.passed
    assert min_eigenvalue(cert.reduced.imag) >= EPSILON[2] - 1e-8
    assert cert.transform.is_symplectic() and cert.transform.is_integral()


def test_siegel_transform_reproduces_point():
    rng = random.Random(2)
    Z = random_point(rng, 2)
    cert = siegel_reduce(Z)
    again = symplectic_act(cert.transform, Z)
    assert mp_close(again.complex_matrix(), cert.reduced.complex_matrix(), 1e-12)


def test_siegel_rejects_large_n():
    with pytest.raises(ValueError):
        siegel_reduce(HalfSpacePoint(SymMat.diag(0, 0, 0), SymMat.identity(3)))
