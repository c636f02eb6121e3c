import warnings

import numpy as np
import pytest
from scipy.integrate import quad

from colwave.mollify import family_U, scaled_tensor, smooth_family
from colwave.operations import tensor
from colwave.spectral import (CutoffWindow, ResolutionError, SampledField, evaluate_on_grid, evaluate_sparse,
                              fit_decay, lambda_ladder, plancherel_gap, ray_spectrum, sparse_ray_spectrum,
                              windowed_ft, directional_samples)


def _ones(n):
    return smooth_family(lambda x: np.ones(x.shape[:-1]), n, label="one")


def _quad_ft(f, k, a, b):
    """int_a^b e^{-ixk} f(x) dx by adaptive quadrature (real and imaginary parts)."""
    re = quad(lambda x: f(x) * np.cos(k * x), a, b, limit=400, epsabs=1e-13)[0]
    im = quad(lambda x: -f(x) * np.sin(k * x), a, b, limit=400, epsabs=1e-13)[0]
    return re + 1j * im


# -- evaluate_on_grid -------------------------------------------------------------

def test_delta_grid_peak(phi):
    eps = 2.0 ** -4
    f = evaluate_on_grid(scaled_tensor(phi, 1), eps, [[-1.0, 1.0]], 512)
    x = f.axes()[0]
    i = int(np.argmin(np.abs(x)))
    assert np.argmax(f.values.real) == i
    assert f.values.real[i] == pytest.approx(float(phi(x[i] / eps)) / eps, rel=1e-14)
    assert f.values.real[i] == pytest.approx(float(phi(0.0)) / eps, rel=1e-2)


def test_delta_grid_quadrature(phi):
    f = evaluate_on_grid(scaled_tensor(phi, 1), 2.0 ** -4, [[-1.0, 1.0]], 512)
    # about 32 nodes across the support; the sum converges spectrally, so 4x the nodes reaches round-off
    assert np.sum(f.values.real) * f.h[0] == pytest.approx(1.0, abs=1e-4)
    g = evaluate_on_grid(scaled_tensor(phi, 1), 2.0 ** -4, [[-1.0, 1.0]], 2048)
    assert np.sum(g.values.real) * g.h[0] == pytest.approx(1.0, abs=1e-9)


def test_U_slice_support(phi):
    eps = 2.0 ** -4
    f = evaluate_on_grid(family_U(phi), eps, [[-0.5, 0.5], [-0.5, 0.5]], (512, 128))
    X, Y = np.meshgrid(*f.axes(), indexing="ij")
    s = X / eps - Y / np.sqrt(eps)
    assert np.all(f.values[np.abs(s) > 1.0] == 0)
    assert np.any(f.values[np.abs(s) < 0.5] != 0)


def test_resolution_guard_reports_shape(phi):
    with pytest.raises(ResolutionError) as exc:
        evaluate_on_grid(scaled_tensor(phi, 1), 2.0 ** -8, [[-1.0, 1.0]], 512)
    # eps >= 8 h  <=>  n >= 8 * 2 / eps + 1
    assert exc.value.required_shape == (8 * 2 * 2 ** 8 + 1,)


def test_sparse_matches_dense(phi):
    F = family_U(phi)
    eps = 2.0 ** -4
    box = [[-0.25, 0.25], [-0.25, 0.25]]
    dense = evaluate_on_grid(F, eps, box, (160, 64))
    axes, idx, vals = evaluate_sparse(F, eps, box, (160, 64))
    rebuilt = np.zeros(dense.shape, complex)
    rebuilt[tuple(idx)] = vals
    assert np.array_equal(rebuilt, dense.values)


# -- windowed_ft ----------------------------------------------------------------------

def test_windowed_ft_of_one_is_window_transform():
    w = CutoffWindow.around((0.1,), 0.5, 0.5, 1.0)
    f = evaluate_on_grid(_ones(1), 1.0, [[-1.0, 1.0]], 4097)
    ft = windowed_ft(f, w)
    k = ft.axes()[0]
    n0 = len(k) // 2
    for j in range(0, 20, 2):
        ref = _quad_ft(lambda x: float(w(np.array([x]))), k[n0 + j], -0.4, 0.6)
        assert abs(ft.values[n0 + j] - ref) <= 1e-9 * max(1.0, abs(ref))


def test_windowed_ft_real_even_input():
    x = np.linspace(-1.0, 1.0, 2049)
    f = SampledField(1, [[-1.0, 1.0]], (2049,), np.exp(-x ** 2).astype(complex))
    ft = windowed_ft(f, CutoffWindow.around((0.0,), 0.8, 0.5, 1.0))
    v = ft.values
    assert np.max(np.abs(v.imag)) <= 1e-10 * np.max(np.abs(v))
    assert np.allclose(v, v[::-1], rtol=0, atol=1e-10 * np.max(np.abs(v)))


def test_delta_windowed_ft_is_mollifier_transform(phi):
    eps = 2.0 ** -5
    f = evaluate_on_grid(scaled_tensor(phi, 1), eps, [[-1.0, 1.0]], 4097)
    ft = windowed_ft(f, CutoffWindow.around((0.0,), 0.5, 0.5, 1.0))
    k = ft.axes()[0]
    sel = np.nonzero((k > 0) & (k < 150))[0][::7]
    for i in sel:
        # oracle: phi is even, phi_hat(s) = int cos(s x) phi(x) dx
        ref = quad(lambda x: float(phi(x)) * np.cos(eps * k[i] * x), -1, 1, epsabs=1e-13, limit=200)[0]
        assert abs(ft.values[i]) == pytest.approx(abs(ref), abs=1e-9)


def test_window_outside_box_is_refused():
    f = evaluate_on_grid(_ones(1), 1.0, [[-0.3, 0.3]], 128)
    with pytest.raises(ValueError):
        windowed_ft(f, CutoffWindow.around((0.0,), 0.5))


def test_ray_spectrum_matches_direct_sum(rng):
    vals = np.zeros((40, 30), complex)
    vals[rng.integers(0, 40, 60), rng.integers(0, 30, 60)] = rng.normal(size=60) + 1j * rng.normal(size=60)
    f = SampledField(2, [[-0.4, 0.3], [0.1, 0.5]], vals.shape, vals)
    K = rng.normal(scale=30.0, size=(17, 2))
    X, Y = np.meshgrid(*f.axes(), indexing="ij")
    ref = np.array([np.sum(vals * np.exp(-1j * (k[0] * X + k[1] * Y))) for k in K]) * np.prod(f.h)
    assert np.allclose(ray_spectrum(f, None, K), ref, rtol=1e-11, atol=1e-13)


def test_ray_spectrum_agrees_with_fft_on_grid(phi):
    eps = 2.0 ** -4
    f = evaluate_on_grid(scaled_tensor(phi, 1), eps, [[-1.0, 1.0]], 1025)
    w = CutoffWindow.around((0.0,), 0.6, 0.5, 1.0)
    ft = windowed_ft(f, w)
    k = ft.axes()[0][::37]
    assert np.allclose(ray_spectrum(f, w, k[:, None]), ft.values[::37], atol=1e-12)


def test_sparse_ray_spectrum_of_nothing_is_zero():
    axes = [np.linspace(0, 1, 8)]
    out = sparse_ray_spectrum(axes, np.zeros((1, 0), int), np.zeros(0), [[1.0], [2.0]])
    assert np.array_equal(out, np.zeros(2))


# -- directional_samples ----------------------------------------------------------------

def _delta_one_ft(phi, eps):
    F = tensor(scaled_tensor(phi, 1), _ones(1))
    f = evaluate_on_grid(F, eps, [[-1.0, 1.0], [-1.0, 1.0]], 513)
    w = CutoffWindow.around((0.0, 0.0), 0.7, 0.5, 1.0)
    return windowed_ft(f, w), w


def test_directional_samples_separable(phi):
    eps = 2.0 ** -4
    ft, w = _delta_one_ft(phi, eps)
    lam = lambda_ladder(4.0, 200.0)
    got_l, got, trunc = directional_samples(ft, [1.0, 0.0], lam)
    assert not trunc and np.array_equal(got_l, lam)
    # oracle: |phi_hat(eps lam)| * |g_hat(0)|, g the y-profile of the window
    g0 = quad(lambda y: float(w.profile(1, y)), -0.7, 0.7, epsabs=1e-13)[0]
    for L, v in zip(lam, got):
        ref = abs(quad(lambda x: float(phi(x)) * np.cos(eps * L * x), -1, 1, epsabs=1e-13)[0]) * g0
        assert v == pytest.approx(ref, rel=2e-2)


def test_directional_samples_hermitian(phi):
    ft, _ = _delta_one_ft(phi, 2.0 ** -4)
    lam = lambda_ladder(4.0, 300.0)
    for d in ([1.0, 0.0], [0.6, 0.8], [-0.3, 1.0]):
        a = directional_samples(ft, d, lam)[1]
        b = directional_samples(ft, -np.asarray(d), lam)[1]
        assert np.allclose(a, b, rtol=1e-9, atol=1e-14)


def test_directional_samples_truncates_at_guard(phi):
    ft, _ = _delta_one_ft(phi, 2.0 ** -4)
    nyq = np.pi / (2.0 / 512)
    lam = np.array([10.0, 0.5 * nyq, 0.9 * nyq])
    with warnings.catch_warnings(record=True) as rec:
        warnings.simplefilter("always")
        used, vals, trunc = directional_samples(ft, [1.0, 0.0], lam)
    assert trunc and len(used) == 2 and rec
    assert lam.min() > 0


def test_interpolation_stable_under_grid_doubling(phi):
    eps = 2.0 ** -5
    w = CutoffWindow.around((0.0,), 0.5, 0.5, 1.0)
    lam = lambda_ladder(4.0, 256.0)
    out = []
    for n in (2049, 4097):
        f = evaluate_on_grid(scaled_tensor(phi, 1), eps, [[-1.0, 1.0]], n)
        out.append(directional_samples(windowed_ft(f, w), [1.0], lam)[1])
    assert np.max(np.abs(out[0] - out[1]) / out[1]) < 1e-2


# -- plancherel -----------------------------------------------------------------------------

def test_plancherel(phi):
    f = evaluate_on_grid(family_U(phi), 2.0 ** -3, [[-0.5, 0.5], [-0.5, 0.5]], (256, 128))
    assert plancherel_gap(f, CutoffWindow.around((0.0, 0.0), 0.4, 0.5, 1.0)) <= 1e-8
    assert plancherel_gap(f) <= 1e-8


# -- SampledField serialization -----------------------------------------------------------------

def test_sampled_field_round_trip(tmp_path, rng):
    v = rng.normal(size=(5, 7)) + 1j * rng.normal(size=(5, 7))
    f = SampledField(2, [[0.0, 1.0], [-2.0, 2.0]], (5, 7), v, meta={"eps": 0.125})
    f.save(tmp_path / "f.bin")
    raw = (tmp_path / "f.bin").read_bytes()
    # header: dim and shape as int64, box as float64, then interleaved re/im
    assert len(raw) == 8 * 3 + 8 * 4 + 16 * 35
    assert np.frombuffer(raw[:24], "<i8").tolist() == [2, 5, 7]
    g = SampledField.load(tmp_path / "f.bin")
    assert np.array_equal(g.values, v) and np.array_equal(g.box, f.box) and g.meta == {"eps": 0.125}


# -- fit_decay -------------------------------------------------------------------------------

EPS = 2.0 ** -np.arange(4, 12)
LAM = lambda_ladder(4.0, 4096.0)


def _model(c, N, p):
    return c * EPS[:, None] ** (-N) * (1 + LAM[None, :]) ** (-p)


def test_fit_exact_model():
    f = fit_decay(_model(3.0, 2.0, 7.0), EPS, LAM)
    assert f.p_hat == pytest.approx(7.0, abs=0.05)
    assert f.N_hat == pytest.approx(2.0, abs=0.05)
    assert f.c == pytest.approx(3.0, rel=1e-6)
    assert f.residual <= 1e-10


def test_fit_constant_samples():
    f = fit_decay(np.ones((len(EPS), len(LAM))), EPS, LAM)
    assert f.p_hat == pytest.approx(0.0, abs=1e-12)
    assert f.N_hat == pytest.approx(0.0, abs=1e-12)


def test_fit_shift_invariance(rng):
    S = _model(1.0, 0.7, 3.0) * np.exp(0.1 * rng.normal(size=(len(EPS), len(LAM))))
    a, b = fit_decay(S, EPS, LAM), fit_decay(1234.5 * S, EPS, LAM)
    assert b.p_hat == pytest.approx(a.p_hat, abs=1e-9)
    assert b.N_hat == pytest.approx(a.N_hat, abs=1e-9)
    assert b.c == pytest.approx(1234.5 * a.c, rel=1e-9)


def test_fit_takes_min_over_eps():
    S = _model(1.0, 0.0, 6.0)
    S[3] = (1 + LAM) ** -2.0
    f = fit_decay(S, EPS, LAM)
    assert f.p_hat == pytest.approx(2.0, abs=1e-9)


def test_fit_censors_rows_below_floor():
    S = _model(1.0, 0.0, 2.0)
    S[2, len(LAM) // 2:] = 1e-30
    f = fit_decay(S, EPS, LAM, floor=1e-20)
    assert f.p_eps[2] == 99.0 and "row2-below-floor" in f.flags
    assert f.p_hat == pytest.approx(2.0, abs=1e-9)


def test_fit_of_zero_table():
    f = fit_decay(np.zeros((len(EPS), len(LAM))), EPS, LAM)
    assert f.p_hat == 99.0 and "all-zero" in f.flags


def test_fit_flags_short_ladder_and_never_raises():
    f = fit_decay(np.abs(np.sin(np.arange(15.0))).reshape(3, 5) + 1e-3, EPS[:3], LAM[:5])
    assert "ladder-too-short" in f.flags
    assert np.isfinite(f.residual)


def test_fit_shape_mismatch():
    with pytest.raises(ValueError):
        fit_decay(np.ones((2, 3)), EPS, LAM)


def test_lambda_ladder():
    lam = lambda_ladder(4.0, 2048.0)
    assert lam[0] == 4.0 and lam[-1] == pytest.approx(2048.0)
    assert np.allclose(lam[1:] / lam[:-1], np.sqrt(2.0))
