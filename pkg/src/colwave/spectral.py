"""
Grid evaluation, windowed Fourier transforms and decay-exponent fits.

Convention: F(u)(xi) = int e^{-i<x, xi>} u(x) dx, approximated on a uniform
grid by prod(h) * sum_j u(x_j) e^{-i<x_j, xi>}.  No 2*pi in the forward
transform.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np

from .mollify import ScaledFamily

GUARD_FACTOR = 8  # eps >= 8 h keeps phi_eps resolved
LOG10E = np.log10(np.e)


class ResolutionError(ValueError):
    """Grid too coarse for the family at this eps (CLI exit code 4)."""

    def __init__(self, msg, required_shape=None):
        super().__init__(msg)
        self.required_shape = required_shape


@dataclass
class SampledField:
    """Values on a uniform axis-aligned grid (both endpoints included).

    For spectra produced by :func:`windowed_ft` ``domain`` is "frequency" and
    ``box`` holds the frequency range.
    """

    dim: int
    box: np.ndarray          # (dim, 2)
    shape: tuple
    values: np.ndarray
    domain: str = "space"
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.box = np.asarray(self.box, dtype=float).reshape(self.dim, 2)
        self.shape = tuple(int(s) for s in self.shape)
        self.values = np.asarray(self.values).reshape(self.shape)

    @property
    def h(self):
        return (self.box[:, 1] - self.box[:, 0]) / (np.array(self.shape) - 1)

    def axes(self):
        return [np.linspace(lo, hi, n) for (lo, hi), n in zip(self.box, self.shape)]

    # -- flat binary layout + JSON sidecar -------------------------------
    def save(self, path):
        """Write ``path`` (binary) and ``path + '.json'`` (sidecar)."""
        path = Path(path)
        head = np.array([self.dim, *self.shape], dtype="<i8").tobytes()
        head += np.asarray(self.box, dtype="<f8").tobytes()
        payload = np.ascontiguousarray(self.values, dtype="<c16").tobytes()
        path.write_bytes(head + payload)
        side = {"dim": self.dim, "shape": list(self.shape), "box": self.box.tolist(),
                "domain": self.domain, "dtype": "complex128-le", "meta": self.meta}
        Path(str(path) + ".json").write_text(json.dumps(side, indent=1, sort_keys=True))

    @classmethod
    def load(cls, path):
        raw = Path(path).read_bytes()
        dim = int(np.frombuffer(raw[:8], "<i8")[0])
        off = 8
        shape = tuple(np.frombuffer(raw[off:off + 8 * dim], "<i8"))
        off += 8 * dim
        box = np.frombuffer(raw[off:off + 16 * dim], "<f8").reshape(dim, 2)
        off += 16 * dim
        vals = np.frombuffer(raw[off:], "<c16").reshape(shape)
        meta, domain = {}, "space"
        side = Path(str(path) + ".json")
        if side.exists():
            s = json.loads(side.read_text())
            meta, domain = s.get("meta", {}), s.get("domain", "space")
        return cls(dim, box.copy(), shape, vals.copy(), domain, meta)


def _step(t, alpha):
    # smooth 1 -> 0 transition on [0, 1]
    t = np.clip(t, 0.0, 1.0)

    def f(u):
        out = np.zeros_like(u)
        m = u > 0
        out[m] = np.exp(-1.0 / u[m] ** alpha)
        return out
    a, b = f(1.0 - t), f(t)
    return a / (a + b)


@dataclass(frozen=True)
class CutoffWindow:
    """Tensor-product cutoff: 1 on the cube of half-width r1, 0 outside r2."""

    center: tuple
    r1: float
    r2: float
    alpha: float = 1.0

    def __post_init__(self):
        if not (0 <= self.r1 < self.r2):
            raise ValueError("CutoffWindow needs 0 <= r1 < r2")

    @classmethod
    def around(cls, center, r2, plateau=0.5, alpha=1.0):
        c = tuple(float(v) for v in np.atleast_1d(center))
        return cls(c, plateau * r2, r2, alpha)

    @property
    def dim(self):
        return len(self.center)

    def profile(self, axis, x):
        """One-dimensional factor along ``axis`` evaluated at coordinates x."""
        t = (np.abs(np.asarray(x, dtype=float) - self.center[axis]) - self.r1) / (self.r2 - self.r1)
        return _step(t, self.alpha)

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        v = np.ones(x.shape[:-1])
        for i in range(self.dim):
            v = v * self.profile(i, x[..., i])
        return v

    def box(self):
        c = np.asarray(self.center)
        return np.stack([c - self.r2, c + self.r2], axis=1)

    def factor(self, axes):
        """Sub-window on a subset of axes (for tensor families)."""
        return CutoffWindow(tuple(self.center[i] for i in axes), self.r1, self.r2, self.alpha)


def required_shape(F: ScaledFamily, eps, box, factor=GUARD_FACTOR):
    box = np.asarray(box, dtype=float).reshape(F.dim, 2)
    sc = F.axis_scales(eps)
    width = box[:, 1] - box[:, 0]
    n = np.where(np.isfinite(sc), np.ceil(factor * width / np.maximum(sc, 1e-300)) + 1, 64)
    return tuple(int(max(64, v)) for v in n)


def evaluate_on_grid(F: ScaledFamily, eps, box, shape, factor=GUARD_FACTOR, chunk=2 ** 21) -> SampledField:
    """Evaluate F(eps, .) at the nodes of a uniform grid.

    Refuses (ResolutionError carrying the needed shape) when some axis has
    spacing h_i > scale_i / factor; for the delta-type families scale_i = eps,
    which is the guard eps >= 8 h.
    """
    box = np.asarray(box, dtype=float).reshape(F.dim, 2)
    shape = tuple(int(s) for s in np.broadcast_to(shape, (F.dim,)))
    if eps < F.eps_floor:
        raise ResolutionError(f"eps={eps:g} below eps_floor={F.eps_floor:g} of {F.label}")
    need = required_shape(F, eps, box, factor)
    if any(s < r for s, r in zip(shape, need)):
        raise ResolutionError(
            f"{F.label}: grid {shape} too coarse at eps={eps:g}; need at least {need}", need)
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(box, shape)]
    if F.dim == 1:
        vals = F(eps, axes[0][:, None]).astype(complex)
    else:
        # evaluate slab by slab along the first axis to bound memory
        rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1)
        per = max(1, chunk // max(1, rest[..., 0].size))
        vals = np.empty(shape, dtype=complex)
        for i0 in range(0, shape[0], per):
            xs = axes[0][i0:i0 + per]
            pts = np.concatenate([np.broadcast_to(xs.reshape((-1,) + (1,) * (F.dim - 1) + (1,)),
                                                  (len(xs),) + rest.shape[:-1] + (1,)),
                                  np.broadcast_to(rest, (len(xs),) + rest.shape)], axis=-1)
            vals[i0:i0 + per] = F(eps, pts)
    if not np.all(np.isfinite(vals)):
        raise FloatingPointError(f"{F.label}: non-finite values at eps={eps:g}")
    return SampledField(F.dim, box, shape, vals, meta={"eps": float(eps), "label": F.label})


def _coarse_mask(F: ScaledFamily, eps, box, chunk, max_cells=2 ** 28):
    # coarse pass at half the scale per axis, slab by slab; marked cells are
    # dilated twice so every fine node within one scale of the support maps
    # onto a marked coarse node
    from scipy.ndimage import binary_dilation
    sc = F.axis_scales(eps)
    width = box[:, 1] - box[:, 0]
    step = np.where(np.isfinite(sc), np.minimum(sc / 2.0, width / 64.0), width / 64.0)
    n = np.ceil(width / step).astype(int) + 1
    if np.prod(n.astype(float)) > max_cells:
        return None
    caxes = [np.linspace(lo, hi, k) for (lo, hi), k in zip(box, n)]
    rest = np.stack(np.meshgrid(*caxes[1:], indexing="ij"), axis=-1)
    per = max(1, chunk // max(1, rest[..., 0].size))
    m = np.zeros(tuple(n), dtype=bool)
    for i0 in range(0, n[0], per):
        xs = caxes[0][i0:i0 + per]
        pts = np.concatenate([np.broadcast_to(xs.reshape((-1,) + (1,) * (F.dim - 1) + (1,)),
                                              (len(xs),) + rest.shape[:-1] + (1,)),
                              np.broadcast_to(rest, (len(xs),) + rest.shape)], axis=-1)
        m[i0:i0 + per] = F(eps, pts) != 0
    m = binary_dilation(m, np.ones((3,) * F.dim, bool), iterations=2)
    return m, caxes


def evaluate_sparse(F: ScaledFamily, eps, box, shape, factor=GUARD_FACTOR, chunk=2 ** 21):
    """Like :func:`evaluate_on_grid` but keeps only the nonzero nodes.

    Returns (axes, idx, vals) with idx of shape (dim, nnz).  Slabs along the
    first axis are evaluated one at a time, so grids far larger than memory
    allows densely are fine as long as the support is thin.  For families
    flagged ``compact`` (or carrying a ``support_family``) only nodes next to
    the support seen on a coarse grid are evaluated.
    """
    box = np.asarray(box, dtype=float).reshape(F.dim, 2)
    shape = tuple(int(s) for s in np.broadcast_to(shape, (F.dim,)))
    if eps < F.eps_floor:
        raise ResolutionError(f"eps={eps:g} below eps_floor={F.eps_floor:g} of {F.label}")
    need = required_shape(F, eps, box, factor)
    if any(s < r for s, r in zip(shape, need)):
        raise ResolutionError(
            f"{F.label}: grid {shape} too coarse at eps={eps:g}; need at least {need}", need)
    axes = [np.linspace(lo, hi, n) for (lo, hi), n in zip(box, shape)]
    if F.dim == 1:
        v = F(eps, axes[0][:, None]).astype(complex)
        nz = np.nonzero(v)
        return axes, np.array(nz), v[nz]
    S = F.support_family if F.support_family is not None else (F if F.compact else None)
    coarse = _coarse_mask(S, eps, box, chunk) if S is not None else None
    if coarse is not None:
        mask, caxes = coarse
        near = [np.clip(np.rint((ax - c[0]) / (c[1] - c[0])).astype(int), 0, len(c) - 1)
                for ax, c in zip(axes, caxes)]
        I, V = [], []
        # fine rows sharing a coarse row share the same candidate set
        rows = np.arange(shape[0])
        for j in np.unique(near[0]):
            sub = mask[j][np.ix_(*near[1:])]
            rest_idx = np.nonzero(sub)
            if not rest_idx[0].size:
                continue
            ii = rows[near[0] == j]
            ri = [np.broadcast_to(r, (len(ii), r.size)).ravel() for r in rest_idx]
            i_all = np.repeat(ii, rest_idx[0].size)
            pts = np.stack([axes[0][i_all]] + [axes[k + 1][r] for k, r in enumerate(ri)], axis=-1)
            v = F(eps, pts)
            if not np.all(np.isfinite(v)):
                raise FloatingPointError(f"{F.label}: non-finite values at eps={eps:g}")
            keep = v != 0
            I.append(np.vstack([i_all[keep]] + [r[keep] for r in ri]))
            V.append(v[keep].astype(complex))
        if not I:
            return axes, np.zeros((F.dim, 0), dtype=int), np.zeros(0, complex)
        return axes, np.concatenate(I, axis=1), np.concatenate(V)
    rest = np.stack(np.meshgrid(*axes[1:], indexing="ij"), axis=-1)
    per = max(1, chunk // max(1, rest[..., 0].size))
    I, V = [], []
    for i0 in range(0, shape[0], per):
        xs = axes[0][i0:i0 + per]
        pts = np.concatenate([np.broadcast_to(xs.reshape((-1,) + (1,) * (F.dim - 1) + (1,)),
                                              (len(xs),) + rest.shape[:-1] + (1,)),
                              np.broadcast_to(rest, (len(xs),) + rest.shape)], axis=-1)
        v = F(eps, pts)
        if not np.all(np.isfinite(v)):
            raise FloatingPointError(f"{F.label}: non-finite values at eps={eps:g}")
        nz = np.nonzero(v)
        I.append(np.array(nz) + np.array([i0] + [0] * (F.dim - 1))[:, None])
        V.append(v[nz].astype(complex))
    return axes, np.concatenate(I, axis=1), np.concatenate(V)


def window_at(w: CutoffWindow, axes, idx):
    """Window values at grid nodes given by index arrays."""
    out = np.ones(idx.shape[1])
    for i, ax in enumerate(axes):
        out = out * w.profile(i, ax)[idx[i]]
    return out


def window_values(field: SampledField, w: CutoffWindow):
    if field.dim != w.dim:
        raise ValueError("window and field dimensions differ")
    wb = w.box()
    if np.any(wb[:, 0] < field.box[:, 0] - 1e-12) or np.any(wb[:, 1] > field.box[:, 1] + 1e-12):
        raise ValueError("window support exceeds the field box")
    out = np.ones(field.shape)
    for i, ax in enumerate(field.axes()):
        sh = [1] * field.dim
        sh[i] = -1
        out = out * w.profile(i, ax).reshape(sh)
    return out


def windowed_ft(field: SampledField, w: CutoffWindow) -> SampledField:
    """FFT of the windowed field, scaled by prod(h) so it approximates the integral."""
    g = field.values * window_values(field, w)
    h = field.h
    n = np.array(field.shape)
    G = np.fft.fftshift(np.fft.fftn(g))
    freqs = [np.fft.fftshift(np.fft.fftfreq(int(ni), d=hi)) * 2 * np.pi for ni, hi in zip(n, h)]
    # phase from the grid origin x_0 = box[:, 0]
    for i, k in enumerate(freqs):
        sh = [1] * field.dim
        sh[i] = -1
        G = G * np.exp(-1j * k * field.box[i, 0]).reshape(sh)
    G = G * np.prod(h)
    box = np.array([[k[0], k[-1]] for k in freqs])
    return SampledField(field.dim, box, G.shape, G, domain="frequency",
                        meta={"nyquist": (np.pi / h).tolist()})


def directional_samples(ft: SampledField, xi0, lambdas, guard=0.8):
    """Bilinear (multilinear) interpolation of |FT| along lambda * xi0.

    Returns (lambdas_used, values, truncated) where ladder entries beyond
    guard * Nyquist are dropped and ``truncated`` flags that.
    """
    xi0 = np.asarray(xi0, dtype=float)
    xi0 = xi0 / np.linalg.norm(xi0)
    lambdas = np.asarray(lambdas, dtype=float)
    nyq = np.asarray(ft.meta.get("nyquist", np.abs(ft.box).max(axis=1)), dtype=float)
    with np.errstate(divide="ignore"):
        lim = np.min(np.where(np.abs(xi0) > 1e-15, guard * nyq / np.abs(xi0), np.inf))
    keep = lambdas <= lim
    truncated = not bool(np.all(keep))
    if truncated:
        warnings.warn("directional_samples: ladder truncated at the Nyquist guard", stacklevel=2)
    lam = lambdas[keep]
    pts = lam[:, None] * xi0[None, :]
    mag = np.abs(ft.values)
    out = np.zeros(len(lam))
    h = ft.h
    # multilinear weights
    idx = (pts - ft.box[:, 0]) / h
    i0 = np.floor(idx).astype(int)
    fr = idx - i0
    for corner in range(2 ** ft.dim):
        bits = [(corner >> a) & 1 for a in range(ft.dim)]
        wgt = np.ones(len(lam))
        ii = []
        for a, b in enumerate(bits):
            wgt = wgt * (fr[:, a] if b else 1 - fr[:, a])
            ii.append(np.clip(i0[:, a] + b, 0, ft.shape[a] - 1))
        out += wgt * mag[tuple(ii)]
    return lam, out, truncated


def ray_spectrum(field: SampledField, w: Optional[CutoffWindow], freqs, block=256):
    """Exact discrete transform prod(h) sum_j g(x_j) e^{-i<x_j, k>} at arbitrary k.

    ``freqs`` has shape (K, dim).  Only nonzero nodes enter; see
    :func:`sparse_ray_spectrum`.
    """
    g = field.values if w is None else field.values * window_values(field, w)
    idx = np.nonzero(g)
    return sparse_ray_spectrum(field.axes(), np.array(idx), g[idx], freqs, block)


def sparse_ray_spectrum(axes, idx, vals, freqs, block=256):
    """Ray transform of a field given by its nonzero nodes.

    The nodes are grouped into rows along one "span" axis; within a row the
    phases along that axis are powers of exp(-i k h), so every row becomes
    one column of a complex matrix product.  Band-like supports (a line
    crossing the grid) cost O(K * band * rows) instead of O(K * N).
    """
    dim = len(axes)
    freqs = np.asarray(freqs, dtype=float).reshape(-1, dim)
    K = len(freqs)
    out = np.zeros(K, dtype=complex)
    h = np.array([ax[1] - ax[0] for ax in axes])
    if len(vals) == 0:
        return out
    idx = np.asarray(idx).reshape(dim, -1)
    shape = [len(ax) for ax in axes]
    best = None
    for a in range(dim):
        others = [b for b in range(dim) if b != a]
        rid = np.ravel_multi_index(tuple(idx[b] for b in others), [shape[b] for b in others]) if others \
            else np.zeros(idx.shape[1], dtype=np.int64)
        rows, inv = np.unique(rid, return_inverse=True)
        lo = np.full(len(rows), np.iinfo(np.int64).max)
        hi = np.full(len(rows), -1)
        np.minimum.at(lo, inv, idx[a])
        np.maximum.at(hi, inv, idx[a])
        W = int((hi - lo).max()) + 1
        cost = W * len(rows)
        if best is None or cost < best[0]:
            best = (cost, a, others, rows, inv, lo, W)
    _, a, others, rows, inv, lo, W = best
    G = np.zeros((len(rows), W), dtype=complex)
    G[inv, idx[a] - lo[inv]] = vals
    # coordinates of each row start
    if others:
        rsub = np.unravel_index(rows, [shape[b] for b in others])
    wgrid = np.arange(W) * h[a]
    x0 = axes[a][lo]
    for k0 in range(0, K, block):
        fk = freqs[k0:k0 + block]
        P = np.exp(-1j * np.outer(fk[:, a], wgrid))
        inner = P @ G.T                                  # (kb, rows)
        ph = np.outer(fk[:, a], x0)
        for j, b in enumerate(others):
            ph += np.outer(fk[:, b], axes[b][rsub[j]])
        out[k0:k0 + block] = np.sum(inner * np.exp(-1j * ph), axis=1)
    return out * np.prod(h)


def plancherel_gap(field: SampledField, w: Optional[CutoffWindow] = None):
    """Relative mismatch between h*sum|f|^2 and (2pi)^-n * dk * sum|F|^2."""
    g = field.values if w is None else field.values * window_values(field, w)
    h = field.h
    lhs = np.prod(h) * np.sum(np.abs(g) ** 2)
    G = np.fft.fftn(g) * np.prod(h)
    dk = np.prod(2 * np.pi / (np.array(field.shape) * h))
    rhs = (2 * np.pi) ** (-field.dim) * dk * np.sum(np.abs(G) ** 2)
    return abs(lhs - rhs) / max(lhs, 1e-300)


# --------------------------------------------------------------------------
# decay fits
# --------------------------------------------------------------------------

@dataclass
class DecayFit:
    """Fitted bound |F| ~ c eps^-N (1+lambda)^-p along one direction."""

    direction: tuple
    p_hat: float
    N_hat: float
    c: float
    residual: float
    lambda_range: tuple
    eps_range: tuple
    p_eps: list = field(default_factory=list)
    flags: list = field(default_factory=list)

    def to_dict(self):
        return {"direction": [float(v) for v in self.direction],
                "p_hat": _r(self.p_hat), "N_hat": _r(self.N_hat), "c": _r(self.c),
                "residual": _r(self.residual),
                "lambda_range": [_r(v) for v in self.lambda_range],
                "eps_range": [_r(v) for v in self.eps_range],
                "p_eps": [_r(v) for v in self.p_eps], "flags": list(self.flags)}


def _r(v, nd=10):
    v = float(v)
    if not np.isfinite(v):
        return None
    return float(np.format_float_positional(v, precision=nd, unique=True, fractional=False, trim="-")) if v else 0.0


def fit_decay(samples, eps, lambdas, direction=(1.0,), floor=None, p_cap=99.0) -> DecayFit:
    """Two-stage fit of |F(eps, lambda)| <= c eps^-N (1+lambda)^-p.

    Stage (a): per eps, least-squares slope of log|F| against log(1+lambda)
    over the upper half of the ladder, giving p_eps and intercept I_eps.
    Stage (b): p_hat = min_eps p_eps; the intercepts are then re-adjusted
    to the common slope p_hat (mean of log|F| + p_hat log(1+lambda) over the
    fitted samples) and N_hat is the slope of these adjusted intercepts
    against log(1/eps).  Extrapolating each row's own line back to lambda=0
    would make N_hat hostage to small differences between the p_eps.

    ``floor`` (absolute, scalar or one value per eps) censors samples that
    sit at numerical noise.  A row whose upper half is censored beyond
    three points is assigned ``p_cap``: it fell below the noise floor
    faster than the ladder resolves.  Rows censored entirely are ignored.
    Never raises; problems show up in ``flags``.
    """
    S = np.abs(np.asarray(samples, dtype=float))
    eps = np.asarray(eps, dtype=float)
    lam = np.asarray(lambdas, dtype=float)
    flags = []
    if S.shape != (len(eps), len(lam)):
        raise ValueError("samples must have shape (len(eps), len(lambdas))")
    if len(eps) < 4 or len(lam) < 6:
        flags.append("ladder-too-short")
    nl = len(lam)
    up = np.arange(nl // 2, nl)
    X = np.log1p(lam[up])
    fl = np.zeros(len(eps)) if floor is None else np.broadcast_to(np.asarray(floor, dtype=float), (len(eps),))
    p_eps, I_eps, res_all, used = [], [], [], []
    fitted = {}
    for i in range(len(eps)):
        row = S[i]
        ok_all = row > max(fl[i], 1e-300)
        if not ok_all.any():
            p_eps.append(np.nan)
            I_eps.append(np.nan)
            continue
        ok = ok_all[up]
        if ok.sum() >= 3:
            Y = np.log10(row[up][ok])
            Xi = X[ok]
            A = np.vstack([Xi, np.ones_like(Xi)]).T
            (slope, icpt), *_ = np.linalg.lstsq(A, Y, rcond=None)
            r = Y - (slope * Xi + icpt)
            res_all.append(np.sqrt(np.mean(r ** 2)))
            p_eps.append(-slope / LOG10E)
            I_eps.append(icpt / LOG10E)
            fitted[i] = (Xi, Y / LOG10E)
            used.append(i)
        else:
            p_eps.append(p_cap)
            I_eps.append(np.nan)
            flags.append(f"row{i}-below-floor")
    p_eps = np.array(p_eps)
    I_eps = np.array(I_eps)
    fin = np.isfinite(p_eps)
    if not fin.any():
        # identically zero near the window: nothing singular to see
        return DecayFit(tuple(direction), p_cap, 0.0, 0.0, 0.0, (float(lam[0]), float(lam[-1])),
                        (float(eps.min()), float(eps.max())), [p_cap] * len(eps), flags + ["all-zero"])
    p_hat = float(np.min(p_eps[fin]))
    for i, (Xi, Yn) in fitted.items():
        I_eps[i] = float(np.mean(Yn + p_hat * Xi))
    ii = np.isfinite(I_eps)
    if ii.sum() >= 2:
        L = np.log(1.0 / eps[ii])
        A = np.vstack([L, np.ones_like(L)]).T
        (N_hat, b0), *_ = np.linalg.lstsq(A, I_eps[ii], rcond=None)
        N_hat = float(N_hat)
    else:
        N_hat = 0.0
        if ii.sum() < 2:
            flags.append("N-underdetermined")
    c = float(np.exp(np.max(I_eps[ii] - N_hat * np.log(1.0 / eps[ii])))) if ii.any() else 0.0
    residual = float(np.max(res_all)) if res_all else 0.0
    if residual > 0.5:
        flags.append("high-residual")
    return DecayFit(tuple(float(v) for v in np.atleast_1d(direction)), p_hat, N_hat, c, residual,
                    (float(lam[up][0]), float(lam[-1])), (float(eps.min()), float(eps.max())),
                    [float(v) for v in p_eps], flags)


def lambda_ladder(lmin=4.0, lmax=None, ratio=np.sqrt(2.0)):
    """Geometric ladder lmin * ratio^k up to lmax."""
    n = int(np.floor(np.log(lmax / lmin) / np.log(ratio) + 1e-9)) + 1
    return lmin * ratio ** np.arange(n)
