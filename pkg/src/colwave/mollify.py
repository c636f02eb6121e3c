"""
Mollifiers and the eps-scaled representative families built from them.

Everything here lives in the fixed-mollifier slice: one compactly supported
bump phi is chosen per experiment and a generalized function is represented
by the map (eps, x) -> R(phi_eps, x).  Families are plain callables wrapped
in :class:`ScaledFamily`; they carry a per-axis length scale so that grid
builders know how finely each axis has to be sampled.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.interpolate import make_interp_spline


class ConfigurationError(ValueError):
    """Invalid construction parameters (maps to CLI exit code 3)."""


class NumericalAccuracyError(RuntimeError):
    """A quadrature did not reach the requested accuracy."""


@lru_cache(maxsize=64)
def _leggauss(n):
    return np.polynomial.legendre.leggauss(n)


def gauss_legendre(n, a, b):
    """Gauss-Legendre nodes and weights on [a, b]."""
    x, w = _leggauss(int(n))
    half = 0.5 * (b - a)
    return a + half * (x + 1.0), half * w


def _bump(x, d):
    # exp(-1/(1-(x/d)^2)) inside, exact zero outside
    x = np.asarray(x, dtype=float)
    t = x / d
    out = np.zeros_like(t)
    m = np.abs(t) < 1.0
    out[m] = np.exp(-1.0 / (1.0 - t[m] ** 2))
    return out


@dataclass(frozen=True)
class Mollifier:
    """Compactly supported test function with unit mass and q vanishing moments.

    Parameters
    ----------
    support_radius : float
        phi(x) = 0 for |x| > d.
    moment_order : int
        Moments of order 1..q vanish.
    coeffs : ndarray
        Polynomial coefficients (increasing powers of x/d) multiplying the bump.
    quadrature_resolution : int
        Gauss-Legendre nodes used by the reference quadrature.
    """

    support_radius: float
    moment_order: int
    coeffs: np.ndarray
    quadrature_resolution: int = 400

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        d = self.support_radius
        return _bump(x, d) * np.polynomial.polynomial.polyval(x / d, self.coeffs)

    evaluator = __call__

    def quadrature(self, n=None):
        """Reference nodes/weights covering the support."""
        n = n or self.quadrature_resolution
        return gauss_legendre(n, -self.support_radius, self.support_radius)

    def moment(self, k, n=None):
        x, w = self.quadrature(n)
        return float(np.sum(w * x ** k * self(x)))

    def moments(self, kmax, n=None):
        x, w = self.quadrature(n)
        v = w * self(x)
        return np.array([np.sum(v * x ** k) for k in range(kmax + 1)])

    def fourier(self, k, n=None):
        """phi_hat(k) = int e^{-ixk} phi(x) dx by the reference quadrature."""
        x, w = self.quadrature(n or max(self.quadrature_resolution, 800))
        k = np.atleast_1d(np.asarray(k, dtype=float))
        return np.exp(-1j * np.outer(k, x)) @ (w * self(x))

    def to_dict(self):
        return {"d": self.support_radius, "q": self.moment_order,
                "coeffs": [float(c) for c in self.coeffs]}


def build_mollifier(d: float = 1.0, q: int = 0, quadrature_resolution: int = 400) -> Mollifier:
    """Bump times a degree-q polynomial solving the moment system.

    The polynomial P(x) = sum_j c_j (x/d)^j is fixed by
    int (x/d)^k b(x) P(x) dx = delta_{k0}, k = 0..q, which also makes the
    result have unit integral.
    """
    if not d > 0:
        raise ConfigurationError(f"support radius must be positive, got {d}")
    if int(q) != q or q < 0:
        raise ConfigurationError(f"moment order must be a nonnegative integer, got {q}")
    q = int(q)
    x, w = gauss_legendre(quadrature_resolution, -d, d)
    bw = w * _bump(x, d)
    t = x / d
    mu = np.array([np.sum(bw * t ** k) for k in range(2 * q + 1)])
    M = np.array([[mu[i + j] for j in range(q + 1)] for i in range(q + 1)])
    rhs = np.zeros(q + 1)
    rhs[0] = 1.0
    if np.linalg.cond(M) > 1e12:
        raise ConfigurationError("moment system is numerically singular; raise quadrature_resolution")
    c = np.linalg.solve(M, rhs)
    # odd-index coefficients vanish by symmetry; clean the round-off
    c[1::2] = 0.0
    return Mollifier(float(d), q, c, quadrature_resolution)


# --------------------------------------------------------------------------
# families
# --------------------------------------------------------------------------

def _iso_scales(n):
    return lambda eps: np.full(n, float(eps))


@dataclass(frozen=True)
class ScaledFamily:
    """An evaluable map (eps, x) -> C standing for a generalized function.

    ``evaluator(eps, x)`` takes x of shape (..., n) and returns an array of
    shape (...).  ``scales(eps)`` gives the length on which the family varies
    along each axis; grid builders refuse spacings above scales/8.
    ``factors`` is set for tensor products so spectra can be factorized.
    ``compact`` promises exact zeros off the support and a support that is at
    least one scale wide along every axis, which lets sparse evaluation skip
    empty regions after a coarse pass.  ``support_family`` may name a
    compact family whose nonzero set contains this one's (a compact factor
    of a product, say); the coarse pass then runs on it instead.
    """

    dim: int
    evaluator: Callable
    eps_floor: float = 2.0 ** -24
    label: str = ""
    scales: Optional[Callable] = None
    factors: tuple = ()
    real: bool = False
    compact: bool = False
    support_family: Optional["ScaledFamily"] = None
    meta: dict = field(default_factory=dict)

    def __call__(self, eps, x):
        x = np.asarray(x, dtype=float)
        if x.shape[-1] != self.dim:
            if self.dim == 1:
                x = x[..., None]
            else:
                raise ValueError(f"{self.label}: expected points with {self.dim} coordinates")
        return np.asarray(self.evaluator(float(eps), x))

    def axis_scales(self, eps):
        if self.scales is None:
            return np.full(self.dim, float(eps))
        return np.asarray(self.scales(float(eps)), dtype=float).reshape(self.dim)


def scaled_tensor(phi: Mollifier, n: int = 1) -> ScaledFamily:
    """iota(delta) in dimension n: eps^{-n} prod_i phi(x_i/eps)."""
    def ev(eps, x):
        v = np.ones(x.shape[:-1])
        for i in range(n):
            v = v * phi(x[..., i] / eps)
        return v / eps ** n
    return ScaledFamily(n, ev, label=f"delta{n}", scales=_iso_scales(n), real=True,
                        compact=True, meta={"kind": "delta"})


def smooth_family(profile: Callable, n: int = 1, scale: float = 0.05, label="smooth") -> ScaledFamily:
    """An eps-independent family (the embedding of a smooth function)."""
    def ev(eps, x):
        return profile(x)
    return ScaledFamily(n, ev, label=label, scales=lambda eps: np.full(n, scale), real=True,
                        meta={"kind": "smooth"})


def smooth_bump(center=0.0, width=0.3, n=1) -> ScaledFamily:
    """Fixed bump exp(-1/(1-|x-c|^2/w^2)), independent of eps."""
    c = np.broadcast_to(np.asarray(center, dtype=float), (n,))

    def prof(x):
        r2 = np.sum(((x - c) / width) ** 2, axis=-1)
        out = np.zeros(r2.shape)
        m = r2 < 1.0
        out[m] = np.exp(-1.0 / (1.0 - r2[m]))
        return out
    return smooth_family(prof, n, scale=width / 8, label="smooth_bump")


class _PVTable:
    """A(sigma) = int_0^inf [phi(sigma-z) - phi(sigma+z)]/z dz - i pi phi(sigma).

    Tabulated on [-T, T] with a quintic spline, continued outside by the
    moment series int phi(t)/(sigma-t) dt = sum_k m_k / sigma^{k+1}.
    """

    def __init__(self, phi: Mollifier, T_factor=2.0, nodes=8001, panel_order=48, nterms=60):
        d = phi.support_radius
        self.phi = phi
        self.T = T_factor * d
        s = np.linspace(-self.T, self.T, nodes)
        vals = np.array([self._pv(si, d, panel_order) for si in s])
        self.spline = make_interp_spline(s, vals, k=5)
        self.m = phi.moments(nterms - 1, n=max(phi.quadrature_resolution, 600))
        self.check = (s, vals)

    def _pv(self, sigma, d, order):
        # integrand vanishes for z > |sigma| + d; split at kinks of the shifted bumps
        top = abs(sigma) + d
        br = {0.0, top}
        for c in (sigma - d, sigma + d, d - sigma, -d - sigma):
            if 0.0 < c < top:
                br.add(c)
        br = sorted(br)
        tot = 0.0
        for a, b in zip(br[:-1], br[1:]):
            z, w = gauss_legendre(order, a, b)
            tot += np.sum(w * (self.phi(sigma - z) - self.phi(sigma + z)) / z)
        return tot

    def real_part(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        out = np.empty_like(sigma)
        inside = np.abs(sigma) <= self.T
        out[inside] = self.spline(sigma[inside])
        so = sigma[~inside]
        if so.size:
            inv = 1.0 / so
            acc = np.zeros_like(so)
            for mk in self.m[::-1]:
                acc = (acc + mk) * inv
            out[~inside] = acc
        return out

    def __call__(self, sigma):
        sigma = np.asarray(sigma, dtype=float)
        return self.real_part(sigma) - 1j * np.pi * self.phi(sigma)


_PV_CACHE: dict = {}


def pv_table(phi: Mollifier) -> _PVTable:
    key = (phi.support_radius, phi.moment_order, tuple(np.round(phi.coeffs, 14)))
    if key not in _PV_CACHE:
        _PV_CACHE[key] = _PVTable(phi)
    return _PV_CACHE[key]


def pv_complex_family(phi: Mollifier) -> ScaledFamily:
    """iota(1/(x+i0)): a_eps(s) = A(s/eps)/eps."""
    A = pv_table(phi)

    def ev(eps, x):
        return A(x[..., 0] / eps) / eps
    return ScaledFamily(1, ev, label="pv", scales=_iso_scales(1), meta={"kind": "pv"})


def family_U(phi: Mollifier) -> ScaledFamily:
    """u_eps(x, y) = phi(x/eps - y/sqrt(eps)) / eps."""
    def ev(eps, x):
        return phi(x[..., 0] / eps - x[..., 1] / np.sqrt(eps)) / eps
    return ScaledFamily(2, ev, label="U", scales=lambda e: np.array([e, np.sqrt(e)]), real=True, compact=True,
                        meta={"kind": "U"})


def family_V(phi: Mollifier) -> ScaledFamily:
    """v_eps(x, y) = phi(x/eps + y/sqrt(eps)) / eps."""
    def ev(eps, x):
        return phi(x[..., 0] / eps + x[..., 1] / np.sqrt(eps)) / eps
    return ScaledFamily(2, ev, label="V", scales=lambda e: np.array([e, np.sqrt(e)]), real=True, compact=True,
                        meta={"kind": "V"})


def family_B(phi: Mollifier) -> ScaledFamily:
    """b_eps(x, y) = a_eps(sqrt(eps) x + y)."""
    A = pv_table(phi)

    def ev(eps, x):
        return A((np.sqrt(eps) * x[..., 0] + x[..., 1]) / eps) / eps
    return ScaledFamily(2, ev, label="B", scales=lambda e: np.array([np.sqrt(e), e]),
                        meta={"kind": "B"})


# --------------------------------------------------------------------------
# generalized constants
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GeneralizedConstant:
    """A bounded net eps -> a_eps with its (known) limit-point set."""

    evaluator: Callable
    bound: float
    label: str = ""
    limit_set: Optional[tuple] = None  # ("finite", values) or ("interval", (lo, hi))

    def __call__(self, eps):
        return self.evaluator(eps)


def constant(b: float) -> GeneralizedConstant:
    b = float(b)
    return GeneralizedConstant(lambda eps: b + 0.0 * np.asarray(eps, dtype=float),
                               abs(b) or 1.0, f"const({b})", ("finite", (b,)))


def oscillating_constant(b1: float, b2: float, mode: str = "dyadic-alternating") -> GeneralizedConstant:
    """Bounded generalized constants with two limit points or a limit interval.

    dyadic-alternating: b1 if floor(log2(1/eps)) is even else b2.
    log-sinusoidal: b1 + (b2-b1)(1 + sin ln(1/eps))/2.
    """
    if not b1 < b2:
        raise ConfigurationError("oscillating_constant needs b1 < b2")
    b1, b2 = float(b1), float(b2)
    bound = max(abs(b1), abs(b2)) or 1.0
    if mode == "dyadic-alternating":
        def ev(eps):
            # small guard so that exact powers of two are not split by round-off
            k = np.floor(np.log2(1.0 / np.asarray(eps, dtype=float)) + 1e-9)
            return np.where(k % 2 == 0, b1, b2)
        return GeneralizedConstant(ev, bound, f"dyadic({b1},{b2})", ("finite", (b1, b2)))
    if mode == "log-sinusoidal":
        def ev(eps):
            return b1 + (b2 - b1) * (1.0 + np.sin(np.log(1.0 / np.asarray(eps, dtype=float)))) / 2.0
        return GeneralizedConstant(ev, bound, f"logsin({b1},{b2})", ("interval", (b1, b2)))
    raise ConfigurationError(f"unknown oscillation mode {mode!r}")


def transport_solution(U0: ScaledFamily, a: GeneralizedConstant) -> ScaledFamily:
    """U(eps, x, t) = U0(eps, x - a_eps t): solution of (d_t + a d_x) U = 0."""
    if U0.dim != 1:
        raise ValueError("transport_solution needs a one-dimensional initial family")

    def ev(eps, x):
        ae = float(a(eps))
        return U0.evaluator(eps, (x[..., 0] - ae * x[..., 1])[..., None])

    def sc(eps):
        s = float(U0.axis_scales(eps)[0])
        ae = abs(float(a(eps)))
        return np.array([s, s / ae if ae > 0 else np.inf])
    return ScaledFamily(2, ev, eps_floor=U0.eps_floor, label=f"transport[{U0.label},{a.label}]",
                        scales=sc, real=U0.real, compact=U0.compact, meta={"kind": "transport"})


def eps_ladder(kmin=4, kmax=12, step=1.0):
    """Standard ladder eps = 2^-k."""
    ks = np.arange(kmin, kmax + 1e-9, step)
    return 2.0 ** (-ks)
