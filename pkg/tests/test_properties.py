"""Invariants checked on random inputs."""
import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from colwave.cones import (AffineMap, Cone, DomainError, FavorablePositionError, closure_of_sum, gamma_B,
                           minkowski_sum, separation_constant)
from colwave.mollify import build_mollifier, constant, family_U, family_V, oscillating_constant
from colwave.operations import FirstOrderOperator, char_set, product, pullback
from colwave.spectral import fit_decay
from colwave.wavefront import direction_bins

PHI = build_mollifier(1.0, 0)

finite = st.floats(-1e3, 1e3, allow_nan=False, allow_infinity=False)


def vec(n):
    return st.lists(st.floats(-1.0, 1.0, allow_nan=False), min_size=n, max_size=n).filter(
        lambda v: np.linalg.norm(v) > 1e-3)


def cone(n, kmax=3):
    return st.lists(vec(n), min_size=1, max_size=kmax).map(lambda d: Cone(np.array(d)))


# -- cones ---------------------------------------------------------------------------------------

@given(cone(3), vec(3), st.floats(1e-6, 1e6))
def test_contains_is_scale_invariant(G, xi, s):
    xi = np.array(xi)
    assert G.contains(xi) == G.contains(s * xi)


@given(cone(2), vec(2))
def test_contains_many_agrees_with_contains(G, xi):
    xi = np.array(xi)
    # stay off the tolerance boundary, where the two distance formulas may round differently
    assume(abs(G.angular_distance(xi) - G.tol) > 1e-9)
    assert G.contains_many(xi[None, :])[0] == G.contains(xi)


@given(cone(2), cone(2))
def test_separation_certificate_has_no_violations(S1, S2):
    try:
        alpha, cert = separation_constant(S1, S2, n_check=2000)
    except DomainError:
        return
    assert 0 < alpha <= 1.0
    assert cert["violations"] == 0


@given(cone(2, 2), cone(2, 2))
def test_minkowski_sum_is_symmetric(G1, G2):
    S12, f12 = minkowski_sum(G1, G2)
    S21, f21 = minkowski_sum(G2, G1)
    assert f12 == f21
    assert S12.subset_of(S21)[0] and S21.subset_of(S12)[0]


@given(cone(3, 2), cone(3, 2), st.floats(0.01, 10.0), st.floats(0.01, 10.0), st.integers(0, 1), st.integers(0, 1))
def test_closure_contains_positive_combinations(G1, G2, a, b, i, j):
    try:
        S = closure_of_sum(G1, G2)
    except FavorablePositionError:
        return
    u = G1.directions[min(i, len(G1.directions) - 1)]
    v = G2.directions[min(j, len(G2.directions) - 1)]
    w = a * u + b * v
    assume(np.linalg.norm(w) > 1e-6)
    assert S.contains(w) or S.contains_exact(w)
    assert S.contains(u) and S.contains(v)


@given(cone(2, 2), cone(2, 2))
def test_closure_raises_iff_zero_in_sum(G1, G2):
    _, flag = minkowski_sum(G1, G2)
    if flag:
        with pytest.raises(FavorablePositionError):
            closure_of_sum(G1, G2)
    else:
        closure_of_sum(G1, G2)


# -- decay fits ----------------------------------------------------------------------------------

@given(st.floats(0.5, 9.0), st.floats(-2.0, 4.0), st.floats(-5.0, 5.0))
def test_fit_decay_shift_invariance(p, N, logc):
    eps = 2.0 ** -np.arange(4, 9)
    lam = 2.0 ** np.arange(3, 12)
    base = eps[:, None] ** -N * (1 + lam[None, :]) ** -p
    f1 = fit_decay(base, eps, lam)
    f2 = fit_decay(np.exp(logc) * base, eps, lam)
    assert f2.p_hat == pytest.approx(f1.p_hat, abs=1e-8)
    assert f2.N_hat == pytest.approx(f1.N_hat, abs=1e-8)
    assert f1.p_hat == pytest.approx(p, abs=1e-6)


# -- family algebra ---------------------------------------------------------------------------

pts = st.lists(st.tuples(st.floats(-0.02, 0.02), st.floats(-0.5, 0.5)), min_size=1, max_size=30).map(np.array)


@given(pts, st.integers(4, 10))
def test_product_commutativity(P, k):
    eps = 2.0 ** -k
    U, V = family_U(PHI), family_V(PHI)
    assert np.array_equal(product(U, V)(eps, P), product(V, U)(eps, P))


matrices = st.lists(st.floats(-2.0, 2.0), min_size=4, max_size=4).map(lambda v: np.array(v).reshape(2, 2))


@given(matrices, matrices, st.lists(st.floats(-0.1, 0.1), min_size=2, max_size=2), pts)
def test_pullback_functoriality(A, B, b, P):
    f, g = AffineMap(A, np.array(b)), AffineMap(B)
    U = family_U(PHI)
    eps = 2.0 ** -6
    lhs = pullback(pullback(U, f), g)(eps, P)
    rhs = pullback(U, f.compose(g))(eps, P)
    # the composed map is evaluated in a different order: compare up to round-off in the argument
    scale = np.max(np.abs(rhs)) if rhs.size else 1.0
    assert np.allclose(lhs, rhs, rtol=1e-6, atol=1e-6 * (scale + 1.0 / eps))


# -- characteristic set ---------------------------------------------------------------------------

def _bin_value(k):
    # slopes whose normals +-(1, -b)/sqrt(1 + b^2) are exact 5-degree bin centres
    return float(np.round(-np.tan(np.deg2rad(5.0 * k)), 15))


@given(st.integers(-8, 8), st.integers(-8, 8))
def test_char_set_matches_gamma_B(k1, k2):
    assume(k1 != k2)
    b1, b2 = sorted((_bin_value(k1), _bin_value(k2)))
    dirs = direction_bins(2)
    res = char_set(FirstOrderOperator(oscillating_constant(b1, b2)), dirs=dirs)
    ref = gamma_B((b1, b2)).contains_many(dirs, 1e-9)
    assert np.array_equal(res.characteristic, ref)


@given(st.integers(-8, 8))
def test_char_set_constant_is_two_bins(k):
    b = _bin_value(k)
    res = char_set(FirstOrderOperator(constant(b)))
    assert len(res.cone) == 2
    assert res.cone.contains([1.0, -b], 1e-9) and res.cone.contains([-1.0, b], 1e-9)
