import numpy as np
import pytest

from colwave.cones import AffineMap, Cone, WaveFrontSet, diagonal_map, gamma_B
from colwave.mollify import (constant, family_B, family_U, family_V, oscillating_constant, pv_complex_family,
                             scaled_tensor, smooth_bump, transport_solution)
from colwave.operations import (FirstOrderOperator, LimitSet, association_errors, char_set, check_inclusion,
                                default_ladder, limit_points, pairing, product, product_wf_bound,
                                propagation_bound, pullback, tensor, vanishes_on_ball)
from colwave.spectral import CutoffWindow, DecayFit
from colwave.wavefront import (INCONCLUSIVE, IRREGULAR, REGULAR, EstimatorParams, PointEstimate,
                               WaveFrontEstimate, direction_bins)


def _pts(rng, n=400, r=0.3):
    return rng.uniform(-r, r, (n, 2))


# -- family algebra ---------------------------------------------------------------------

def test_product_is_pointwise(phi, rng):
    U, V = family_U(phi), family_V(phi)
    eps = 2.0 ** -6
    P = _pts(rng) * np.array([eps, 1.0])
    assert np.array_equal(product(U, V)(eps, P), U(eps, P) * V(eps, P))


def test_product_commutes(phi, rng):
    U, V = family_U(phi), family_V(phi)
    eps = 2.0 ** -5
    P = _pts(rng) * np.array([eps, 0.2])
    assert np.array_equal(product(U, V)(eps, P), product(V, U)(eps, P))
    assert np.array_equal(product(U, V).axis_scales(eps), product(V, U).axis_scales(eps))


def test_product_dimension_mismatch(phi):
    with pytest.raises(ValueError):
        product(family_U(phi), scaled_tensor(phi, 1))


def test_tensor_factorizes(phi, rng):
    D = scaled_tensor(phi, 1)
    T = tensor(D, smooth_bump(0.0, 0.5))
    eps = 2.0 ** -5
    x = rng.uniform(-eps, eps, 200)
    y = rng.uniform(-0.6, 0.6, 200)
    got = T(eps, np.stack([x, y], 1))
    ref = D(eps, x[:, None]) * smooth_bump(0.0, 0.5)(eps, y[:, None])
    assert np.array_equal(got, ref)
    assert T.dim == 2 and len(T.factors) == 2


def test_tensor_of_U_and_V_on_R4(phi, rng):
    U, V = family_U(phi), family_V(phi)
    T = tensor(U, V)
    eps = 2.0 ** -6
    P = rng.uniform(-0.1, 0.1, (300, 4)) * np.array([eps, 1, eps, 1])
    assert np.array_equal(T(eps, P), U(eps, P[:, :2]) * V(eps, P[:, 2:]))
    assert T.axis_scales(eps) == pytest.approx([eps, np.sqrt(eps)] * 2)


def test_UV_is_pullback_of_tensor_under_diagonal(phi, rng):
    U, V = family_U(phi), family_V(phi)
    dT = pullback(tensor(U, V), diagonal_map(2))
    eps = 2.0 ** -6
    P = _pts(rng) * np.array([eps, 0.3])
    assert np.array_equal(dT(eps, P), product(U, V)(eps, P))


def test_B_is_pullback_of_pv(phi, rng):
    # b_eps = a_eps o (sqrt(eps) x + y), an eps-dependent linear map R^2 -> R
    A = pv_complex_family(phi)
    B = pullback(A, lambda e: AffineMap(np.array([[np.sqrt(e), 1.0]])))
    eps = 2.0 ** -8
    P = rng.uniform(-1, 1, (500, 2))
    assert np.allclose(B(eps, P), family_B(phi)(eps, P), rtol=1e-13, atol=0)
    # chain rule scales: eps / sqrt(eps) along x, eps along y
    assert B.axis_scales(eps) == pytest.approx([np.sqrt(eps), eps])


def test_pullback_functoriality(phi, rng):
    F = family_U(phi)
    f = AffineMap(np.array([[1.0, 0.5], [-0.2, 1.0]]), np.array([0.01, -0.02]))
    g = AffineMap(np.array([[0.7, 0.1], [0.3, 0.9]]), np.array([0.0, 0.05]))
    eps = 2.0 ** -5
    P = _pts(rng, r=0.2)
    lhs = pullback(pullback(F, f), g)(eps, P)
    rhs = pullback(F, f.compose(g))(eps, P)
    assert np.allclose(lhs, rhs, rtol=1e-12, atol=1e-12 * np.max(np.abs(rhs)))


def test_pullback_general_map_needs_n_in(phi):
    with pytest.raises(ValueError):
        pullback(family_U(phi), lambda e, x: x, jacobian=np.eye(2))


def test_pullback_dimension_mismatch(phi):
    with pytest.raises(ValueError):
        pullback(family_U(phi), AffineMap(np.eye(3)))


# -- limit points and Char P --------------------------------------------------------------

def test_limit_points_constant():
    ls = limit_points(constant(0.7))
    assert ls.points == pytest.approx((0.7,)) and not ls.intervals
    assert ls.as_B() == pytest.approx((0.7,))


def test_limit_points_log_sinusoidal_is_interval():
    ls = limit_points(oscillating_constant(0.0, 1.0, "log-sinusoidal"), default_ladder(512))
    assert not ls.points and len(ls.intervals) == 1
    lo, hi = ls.intervals[0]
    assert lo <= 0.01 and hi >= 0.99
    assert ls.as_B()[0] == "interval"


def test_limit_points_short_ladder():
    with pytest.raises(ValueError):
        limit_points(constant(1.0), 2.0 ** -np.arange(4, 20))


def test_limit_set_gamma_matches_gamma_B():
    ls = LimitSet((0.0, 1.0))
    G, H = ls.gamma(), gamma_B((0.0, 1.0))
    assert G.subset_of(H)[0] and H.subset_of(G)[0]
    assert LimitSet().gamma().is_empty()
    assert LimitSet((0.5,), ((0.0, 1.0),)).as_B() is None


@pytest.mark.parametrize("b", [0.0, 1.0, -0.5])
def test_char_set_of_constant_speed(b):
    res = char_set(FirstOrderOperator(constant(b)))
    ref = gamma_B((b,))
    # every characteristic bin is within one bin of Gamma_{b}, and the normal bins are hit
    step = np.deg2rad(5.0)
    assert all(ref.angular_distance(d) <= step for d in res.cone.directions)
    assert 2 <= len(res.cone) <= 6


def test_char_set_two_limit_points():
    # a_eps alternates 0 and 1: characteristic where tau = 0 or tau = -xi
    res = char_set(FirstOrderOperator(oscillating_constant(0.0, 1.0)))
    ang = sorted(np.round(np.rad2deg(np.arctan2(res.cone.directions[:, 1], res.cone.directions[:, 0]))))
    assert ang == [-45.0, 0.0, 135.0, 180.0]


def test_char_set_agrees_with_gamma_B_bin_for_bin():
    dirs = direction_bins(2)
    res = char_set(FirstOrderOperator(oscillating_constant(0.0, 1.0)), dirs=dirs)
    G = gamma_B((0.0, 1.0))
    assert np.array_equal(res.characteristic, G.contains_many(dirs, 1e-9))


def test_symbol_and_apply(phi):
    P = FirstOrderOperator(constant(0.5))
    assert P.symbol(0.1, [2.0, 1.0]) == pytest.approx(1j * 2.0)
    # P annihilates the transport solution up to finite-difference error
    U = transport_solution(scaled_tensor(phi, 1), constant(0.5))
    eps = 2.0 ** -5
    t = np.linspace(-0.3, 0.3, 31)
    pts = np.stack([0.5 * t + 0.3 * eps, t], 1)
    assert np.max(np.abs(P.apply(U)(eps, pts))) <= 1e-3 * np.max(np.abs(U(eps, pts))) / eps


def test_propagation_bound_is_char_set_union_rhs():
    P = FirstOrderOperator(constant(0.0))
    rhs = WaveFrontSet([((0.0, 0.0), Cone([[1.0, 1.0]]))])
    wf = propagation_bound(P, rhs, [[0.0, 0.0], [0.5, 0.5]])
    char = char_set(P).cone
    f0, f1 = wf.fiber((0.0, 0.0)), wf.fiber((0.5, 0.5))
    assert f0.contains([1.0, 1.0]) and char.subset_of(f0)[0]
    assert not f1.contains([1.0, 1.0]) and char.subset_of(f1)[0] and f1.subset_of(char)[0]


# -- supports and association -------------------------------------------------------------------

def test_UV_support_is_the_origin(phi):
    UV = product(family_U(phi), family_V(phi))
    ladder = 2.0 ** -np.arange(6, 12)
    for c in [(0.5, 0.0), (0.0, 0.5), (-0.35, 0.35), (0.0, -0.5)]:
        assert vanishes_on_ball(UV, c, 0.25, ladder)
    assert not vanishes_on_ball(UV, (0.0, 0.0), 0.1, ladder)


def test_U_does_not_vanish_on_its_support(phi):
    # the band x = sqrt(eps) y passes through (0, 0.5) for all small eps
    assert not vanishes_on_ball(family_U(phi), (0.0, 0.5), 0.1, 2.0 ** -np.arange(6, 10))


def test_pairing_of_delta_is_psi_at_zero(phi):
    D = scaled_tensor(phi, 1)
    psi = CutoffWindow.around((0.1,), 0.5)
    ref = float(psi(np.array([[0.0]]))[0])
    for eps in (2.0 ** -6, 2.0 ** -10):
        assert pairing(D, psi, eps).real == pytest.approx(ref, abs=1e-4)


def test_association_errors_shrink(phi):
    D = scaled_tensor(phi, 1)
    # 0 sits on the slope of psi, so the second moment of phi_eps shows up
    psi = CutoffWindow.around((0.3,), 0.5)
    ref = float(psi(np.array([[0.0]]))[0])
    lad, err = association_errors(D, psi, ref, 2.0 ** -np.arange(5, 10), factor=32)
    assert lad[0] > lad[-1]
    # q = 0 mollifier: error ~ eps^2 psi''(0) m_2 / 2
    # (the coarsest step still carries the eps^4 term)
    assert err[1:-1] / err[2:] == pytest.approx([4.0] * 3, rel=0.02)
    assert err[-1] <= 1e-4


def test_smooth_family_pairing():
    bump = smooth_bump(0.0, 0.3)
    psi = CutoffWindow.around((0.0,), 0.6)
    x = np.linspace(-0.6, 0.6, 20001)
    ref = np.sum(bump(0.1, x[:, None]) * psi(x[:, None])) * (x[1] - x[0])
    assert pairing(bump, psi, 0.1).real == pytest.approx(ref, rel=1e-6)


# -- bounds and inclusion ----------------------------------------------------------------------

def test_product_bound_favorable():
    A = WaveFrontSet([((0.0, 0.0), Cone([[1.0, 0.0]]))])
    B = WaveFrontSet([((0.0, 0.0), Cone([[0.0, 1.0]])), ((1.0, 0.0), Cone([[0.0, -1.0]]))])
    pb = product_wf_bound(A, B)
    assert pb.applicable and not pb.zero_sum_points
    f = pb.wf.fiber((0.0, 0.0), 0.0)
    for d in ([1, 0], [0, 1], [1, 1], [1, 3]):
        assert f.contains(d)
    assert not f.contains([-1.0, 0.0])
    assert pb.wf.fiber((1.0, 0.0), 0.0).contains([0.0, -1.0])


def test_product_bound_not_applicable_when_sum_contains_zero():
    A = WaveFrontSet([((0.0, 0.0), Cone([[1.0, 0.0], [-1.0, 0.0]]))])
    pb = product_wf_bound(A, A)
    assert not pb.applicable
    assert len(pb.zero_sum_points) == 1
    assert pb.to_dict()["applicable"] is False


def _estimate(x, dirs, verdicts):
    fit = DecayFit((1.0,), 0.0, 0.0, 1.0, 0.0, (1, 2), (0.1, 0.2))
    dirs = np.asarray(dirs, dtype=float)
    p = PointEstimate(np.asarray(x, float), dirs, list(verdicts), [fit] * len(dirs), [])
    return WaveFrontEstimate([p], EstimatorParams())


def test_check_inclusion_holds_and_fails():
    dirs = direction_bins(2)
    v = [REGULAR] * len(dirs)
    v[0] = IRREGULAR        # (1, 0)
    v[18] = INCONCLUSIVE    # (0, 1) is not checked
    est = _estimate((0.0, 0.0), dirs, v)
    good = WaveFrontSet([((0.0, 0.0), Cone([[1.0, 0.0]]))])
    bad = WaveFrontSet([((0.0, 0.0), Cone([[0.0, 1.0]]))])
    far = WaveFrontSet([((0.5, 0.0), Cone([[1.0, 0.0]]))])
    r = check_inclusion(est, good)
    assert r.holds and r.checked_bins == 1
    for W in (bad, far):
        r = check_inclusion(est, W, label="x")
        assert not r.holds and len(r.witness_bins) == 1
        assert "VIOLATED" in r.text()
        assert r.to_dict()["witness_bins"][0]["direction"] == pytest.approx([1.0, 0.0])
