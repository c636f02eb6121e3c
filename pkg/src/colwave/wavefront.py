"""
Estimation of cones of irregular directions from directional Fourier decay.

For a base point x0 and a cutoff window around it, each direction bin gets a
:class:`~colwave.spectral.DecayFit` from samples |F(psi u_eps)(lambda xi0)|
over an (eps, lambda) ladder, and a verdict:

* regular      p_hat >= p_threshold, N_hat <= N_cap, residual <= residual_max
* irregular    p_hat <= p_irregular
* inconclusive otherwise

The estimated cone is irregular plus inconclusive bins.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field, asdict, replace
from typing import Optional, Sequence

import numpy as np

from .mollify import ScaledFamily
from .spectral import (CutoffWindow, DecayFit, ResolutionError, SampledField, evaluate_sparse,
                       fit_decay, lambda_ladder, required_shape, sparse_ray_spectrum, window_at,
                       GUARD_FACTOR)
from .cones import Cone, DomainError, WaveFrontSet, DEFAULT_TOL


REGULAR, IRREGULAR, INCONCLUSIVE = "regular", "irregular", "inconclusive"


@dataclass(frozen=True)
class EstimatorParams:
    """Everything that controls a wave front estimate.

    lambda_max caps the frequency ladder independently of the grid; grids are
    refined per eps so that each axis satisfies h <= scale/oversample and
    resolves the window up to lambda_max.
    """

    eps: tuple = tuple(2.0 ** -np.arange(4, 13))
    lambda_min: float = 4.0
    lambda_ratio: float = float(np.sqrt(2.0))
    lambda_max: float = 2048.0
    radii: tuple = (0.5, 0.25, 0.125)
    plateau: float = 0.25
    window_alpha: float = 1.5
    bins: int = 72
    p_threshold: float = 5.0
    N_cap: float = 6.0
    residual_max: float = 0.5
    p_irregular: float = 1.0
    oversample: float = GUARD_FACTOR
    window_decay: float = 1000.0    # lambda*r2 beyond which the window spectrum is negligible
    substeps: int = 2
    floor_rel: float = 1e-9
    max_points: int = 2 ** 26
    min_nodes: int = 64             # floor on nodes per axis

    def lambdas(self):
        return lambda_ladder(self.lambda_min, self.lambda_max, self.lambda_ratio)

    def to_dict(self):
        d = asdict(self)
        d["eps"] = [float(e) for e in self.eps]
        d["radii"] = [float(r) for r in self.radii]
        return d


def direction_bins(n, count=None):
    """Unit bin centres: 2 on S^0, ``count`` (default 72) on S^1 at k*360/count deg,
    320 icosahedral face centres on S^2 (one refinement of the 20-face solid
    into 4^k pieces, k=2 gives 320)."""
    if n == 1:
        return np.array([[1.0], [-1.0]])
    if n == 2:
        m = count or 72
        th = 2 * np.pi * np.arange(m) / m
        return np.stack([np.cos(th), np.sin(th)], axis=1)
    if n == 3:
        return icosahedral_centres(2)
    raise ValueError("default bins exist for n <= 3; pass explicit directions")


def icosahedral_centres(level=2):
    t = (1 + 5 ** 0.5) / 2
    V = np.array([[-1, t, 0], [1, t, 0], [-1, -t, 0], [1, -t, 0], [0, -1, t], [0, 1, t],
                  [0, -1, -t], [0, 1, -t], [t, 0, -1], [t, 0, 1], [-t, 0, -1], [-t, 0, 1]], float)
    V /= np.linalg.norm(V, axis=1, keepdims=True)
    Fc = [(0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11), (1, 5, 9), (5, 11, 4),
          (11, 10, 2), (10, 7, 6), (7, 1, 8), (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8),
          (3, 8, 9), (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1)]
    tris = [np.array([V[a], V[b], V[c]]) for a, b, c in Fc]
    for _ in range(level):
        new = []
        for A, B, C in tris:
            ab, bc, ca = [(p + q) / np.linalg.norm(p + q) for p, q in ((A, B), (B, C), (C, A))]
            new += [np.array(x) for x in ((A, ab, ca), (ab, B, bc), (ca, bc, C), (ab, bc, ca))]
        tris = new
    cen = np.array([t.mean(axis=0) for t in tris])
    return cen / np.linalg.norm(cen, axis=1, keepdims=True)


def grid_shape(F: ScaledFamily, eps, w: CutoffWindow, params: EstimatorParams):
    """Per-axis node counts for the window box at this eps."""
    box = w.box()
    base = np.array(required_shape(F, eps, box, params.oversample))
    # window resolution: alias images of the windowed spectrum stay below the floor
    # when 2 pi / h >= top sampled frequency + window_decay / r2
    kmax = params.lambda_max * params.lambda_ratio + params.window_decay / w.r2
    hw = 2 * np.pi / kmax
    nw = np.ceil(2 * w.r2 / hw) + 1
    return tuple(int(max(b, nw, params.min_nodes)) for b in base)


def _unique_mod_sign(dirs):
    """Indices into a reduced list covering dirs up to sign, and the sign map."""
    keep, rep, conj = [], np.empty(len(dirs), int), np.zeros(len(dirs), bool)
    for i, d in enumerate(dirs):
        for j, k in enumerate(keep):
            if np.allclose(dirs[k], -d, atol=1e-12):
                rep[i], conj[i] = j, True
                break
        else:
            keep.append(i)
            rep[i] = len(keep) - 1
    return np.array(keep), rep, conj


def spectrum_table(F: ScaledFamily, w: CutoffWindow, dirs, params: EstimatorParams):
    """|F(psi u_eps)(lambda xi)| with shape (n_dirs, n_eps, n_lambda), plus per-eps floors.

    The floor is floor_rel times the largest modulus in the whole table, so an
    eps level whose content is many orders below the others (e.g. a member
    that only touches the window's flat edge) is treated as noise.
    """
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    lams = params.lambdas()
    eps = np.asarray(params.eps, dtype=float)
    out = np.zeros((len(dirs), len(eps), len(lams)))
    floors = np.zeros(len(eps))
    for j, e in enumerate(eps):
        vals = _ray_moduli(F, e, w, dirs, lams, params)
        out[:, j, :] = vals
    floors[:] = params.floor_rel * out.max()
    return out, floors


def _field_spectrum(G, e, w, pts, params):
    shape = grid_shape(G, e, w, params)
    # compact families are evaluated near their support only, so the cap
    # applies to the nonzero count rather than to the full grid
    if not (G.compact or G.support_family is not None) and np.prod(np.array(shape, dtype=float)) > params.max_points:
        raise ResolutionError(f"{G.label}: grid {shape} at eps={e:g} exceeds max_points={params.max_points}",
                              shape)
    axes, idx, vals = evaluate_sparse(G, e, w.box(), shape, params.oversample)
    if len(vals) > params.max_points:
        raise ResolutionError(f"{G.label}: {len(vals)} nonzero nodes at eps={e:g} exceed max_points", shape)
    vals = vals * window_at(w, axes, idx)
    keep = vals != 0
    return sparse_ray_spectrum(axes, idx[:, keep], vals[keep], pts), bool(np.all(vals.imag == 0))


def _ray_moduli(F, e, w, dirs, lams, params):
    s = params.substeps
    offs = params.lambda_ratio ** ((np.arange(s) - (s - 1) / 2) / s)
    L = (lams[:, None] * offs[None, :]).ravel()
    if F.factors:
        # tensor family and tensor-product window: the spectrum factorizes
        spec = np.ones((len(dirs), len(L)), dtype=complex)
        off = 0
        for G in F.factors:
            ax = list(range(off, off + G.dim))
            pts = (dirs[:, ax][:, None, :] * L[None, :, None]).reshape(-1, G.dim)
            spec = spec * _field_spectrum(G, e, w.factor(ax), pts, params)[0].reshape(len(dirs), len(L))
            off += G.dim
        m = np.abs(spec).reshape(len(dirs), len(lams), s)
        return np.sqrt(np.mean(m ** 2, axis=2))
    if F.real:
        keep, rep, _ = _unique_mod_sign(dirs)
    else:
        keep, rep = np.arange(len(dirs)), np.arange(len(dirs))
    pts = (dirs[keep][:, None, :] * L[None, :, None]).reshape(-1, F.dim)
    spec, _ = _field_spectrum(F, e, w, pts, params)
    v = np.abs(spec).reshape(len(keep), len(lams), s)
    v = np.sqrt(np.mean(v ** 2, axis=2))
    return v[rep]


def verdict(fit: DecayFit, params: EstimatorParams):
    if fit.p_hat >= params.p_threshold and fit.N_hat <= params.N_cap and fit.residual <= params.residual_max:
        return REGULAR
    if fit.p_hat <= params.p_irregular:
        return IRREGULAR
    return INCONCLUSIVE


@dataclass
class WindowResult:
    """Per-bin fits and verdicts for one window."""

    window: CutoffWindow
    directions: np.ndarray
    fits: list
    verdicts: list
    table: Optional[np.ndarray] = None

    def cone(self, tol=DEFAULT_TOL):
        m = [v != REGULAR for v in self.verdicts]
        return Cone(self.directions[m], tol, dim=self.directions.shape[1])

    def irregular(self):
        return self.directions[[v == IRREGULAR for v in self.verdicts]]


def sigma_g(F: ScaledFamily, w: CutoffWindow, params: EstimatorParams = EstimatorParams(), dirs=None,
            keep_table=False):
    """Estimate Sigma_g(psi F) on the window; returns (Cone, WindowResult)."""
    if dirs is None:
        dirs = direction_bins(F.dim, params.bins)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    table, floors = spectrum_table(F, w, dirs, params)
    lams = params.lambdas()
    fits, verd = [], []
    for i, d in enumerate(dirs):
        f = fit_decay(table[i], params.eps, lams, direction=d, floor=floors)
        fits.append(f)
        verd.append(verdict(f, params))
    res = WindowResult(w, dirs, fits, verd, table if keep_table else None)
    return res.cone(), res


@dataclass
class PointEstimate:
    """Combined verdicts at one base point over a window schedule."""

    base_point: tuple
    directions: np.ndarray
    verdicts: list
    fits: list                    # fit from the deciding window per bin
    windows: list                 # WindowResult per radius (largest first)
    dropped: list = field(default_factory=list)

    def cone(self, tol=DEFAULT_TOL):
        m = [v != REGULAR for v in self.verdicts]
        return Cone(self.directions[m], tol, dim=self.directions.shape[1])

    def irregular_cone(self, tol=DEFAULT_TOL):
        m = [v == IRREGULAR for v in self.verdicts]
        return Cone(self.directions[m], tol, dim=self.directions.shape[1])

    def to_dict(self):
        return {"base_point": [float(v) for v in self.base_point],
                "bins": [{"direction": [float(v) for v in d], "p_hat": f.to_dict()["p_hat"],
                          "N_hat": f.to_dict()["N_hat"], "residual": f.to_dict()["residual"],
                          "verdict": v}
                         for d, f, v in zip(self.directions, self.fits, self.verdicts)],
                "windows": [float(r.window.r2) for r in self.windows],
                "dropped_radii": [float(r) for r in self.dropped]}


def combine_windows(x0, dirs, results):
    """Bin-wise intersection over windows: a bin is regular as soon as one window
    certifies it; otherwise the smallest window's verdict stands."""
    verd, fits = [], []
    for i in range(len(dirs)):
        reg = [r for r in results if r.verdicts[i] == REGULAR]
        if reg:
            verd.append(REGULAR)
            fits.append(reg[-1].fits[i])
        else:
            verd.append(results[-1].verdicts[i])
            fits.append(results[-1].fits[i])
    return verd, fits


def sigma_g_at(F: ScaledFamily, x0, params: EstimatorParams = EstimatorParams(), radii=None, dirs=None,
               keep_table=False) -> PointEstimate:
    """Sigma_{g,x0}(F) over a decreasing window schedule."""
    radii = tuple(sorted(radii if radii is not None else params.radii, reverse=True))
    if len(radii) < 2:
        raise ValueError("sigma_g_at needs at least two window radii")
    x0 = tuple(float(v) for v in np.atleast_1d(x0))
    if dirs is None:
        dirs = direction_bins(F.dim, params.bins)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    results, dropped = [], []
    for r in radii:
        w = CutoffWindow.around(x0, r, params.plateau, params.window_alpha)
        try:
            _, res = sigma_g(F, w, params, dirs, keep_table)
        except ResolutionError as exc:
            if r == radii[-1] and results:
                warnings.warn(f"dropping window radius {r}: {exc}", stacklevel=2)
                dropped.append(r)
                continue
            raise
        results.append(res)
    verd, fits = combine_windows(x0, dirs, results)
    return PointEstimate(x0, dirs, verd, fits, results, dropped)


@dataclass
class WaveFrontEstimate:
    """Point estimates over a base grid plus the parameters used."""

    points: list
    params: EstimatorParams

    def wavefront_set(self, tol=DEFAULT_TOL, irregular_only=False):
        entries = []
        for p in self.points:
            c = p.irregular_cone(tol) if irregular_only else p.cone(tol)
            entries.append((np.array(p.base_point), c))
        return WaveFrontSet(entries)

    def to_dict(self):
        return {"params": self.params.to_dict(), "points": [p.to_dict() for p in self.points]}

    def rows(self):
        """Flat rows (x..., dir..., p_hat, N_hat, residual, verdict)."""
        out = []
        for p in self.points:
            for d, f, v in zip(p.directions, p.fits, p.verdicts):
                out.append(list(p.base_point) + list(d) + [f.p_hat, f.N_hat, f.residual, v])
        return out


def wavefront(F: ScaledFamily, base_grid, params: EstimatorParams = EstimatorParams(), dirs=None,
              radii=None) -> WaveFrontEstimate:
    """sigma_g_at at every base point (in the given order)."""
    pts = [sigma_g_at(F, x, params, radii, dirs) for x in np.atleast_2d(np.asarray(base_grid, float))]
    return WaveFrontEstimate(pts, params)


def uniform_order_check(F: ScaledFamily, w: CutoffWindow, gamma: Cone, params: EstimatorParams = EstimatorParams()):
    """Largest N_hat over the bins inside gamma, after checking that gamma
    stays delta-away from the estimated Sigma_g(wF) and that all its bins are regular."""
    dirs = direction_bins(F.dim, params.bins)
    sel = np.array([gamma.contains(d) for d in dirs])
    if not sel.any():
        raise DomainError("cone contains no direction bin")
    cone, res = sigma_g(F, w, params, dirs)
    sig = cone
    for d, inside in zip(dirs, sel):
        if inside and sig.contains(d):
            raise DomainError(f"cone touches the estimated Sigma_g at direction {d}")
    fits = [f for f, s in zip(res.fits, sel) if s]
    return max(f.N_hat for f in fits), fits
