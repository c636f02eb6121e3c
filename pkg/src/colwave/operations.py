"""
Algebra on scaled families and the checkers built on top of it.

Products, tensor products and pullbacks act on representatives at a shared
eps.  First-order operators d_t + a d_x with a generalized constant a get a
characteristic set and the propagation bound WF U <= Char P u WF P(U).
Inclusion checks compare estimated wave front sets against bounds computed
with the cone machinery.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Union

import numpy as np

from .cones import (DEFAULT_TOL, AffineMap, Cone, FavorablePositionError, WaveFrontSet, closure_of_sum,
                    favorable_position, gamma_B, minkowski_sum)
from .mollify import GeneralizedConstant, ScaledFamily
from .spectral import (GUARD_FACTOR, CutoffWindow, evaluate_sparse, required_shape, sparse_ray_spectrum,
                       window_at)
from .wavefront import IRREGULAR, WaveFrontEstimate, direction_bins


# --------------------------------------------------------------------------
# family algebra
# --------------------------------------------------------------------------

def product(F: ScaledFamily, G: ScaledFamily) -> ScaledFamily:
    """Pointwise product at the same eps."""
    if F.dim != G.dim:
        raise ValueError(f"product needs equal dimensions, got {F.dim} and {G.dim}")

    def ev(eps, x):
        return F.evaluator(eps, x) * G.evaluator(eps, x)

    def sc(eps):
        return np.minimum(F.axis_scales(eps), G.axis_scales(eps))
    compact = F.compact and G.compact
    # a compact factor bounds the support of the product
    supp = None
    if not compact:
        supp = F if F.compact else (G if G.compact else None)
    return ScaledFamily(F.dim, ev, eps_floor=max(F.eps_floor, G.eps_floor), label=f"{F.label}*{G.label}",
                        scales=sc, real=F.real and G.real, compact=compact, support_family=supp,
                        meta={"kind": "product", "factors": [F.label, G.label]})


def tensor(F: ScaledFamily, G: ScaledFamily) -> ScaledFamily:
    """(F x G)(eps, (x, y)) = F(eps, x) G(eps, y)."""
    m, n = F.dim, G.dim

    def ev(eps, x):
        return F.evaluator(eps, x[..., :m]) * G.evaluator(eps, x[..., m:])

    def sc(eps):
        return np.concatenate([F.axis_scales(eps), G.axis_scales(eps)])
    factors = (F.factors or (F,)) + (G.factors or (G,))
    return ScaledFamily(m + n, ev, eps_floor=max(F.eps_floor, G.eps_floor), label=f"{F.label}(x){G.label}",
                        scales=sc, factors=factors, real=F.real and G.real,
                        compact=F.compact and G.compact, meta={"kind": "tensor"})


MapLike = Union[AffineMap, Callable]


def _affine_at(f, eps):
    return f(eps) if not isinstance(f, AffineMap) else f


def pullback(F: ScaledFamily, f: MapLike, jacobian=None, n_in: Optional[int] = None) -> ScaledFamily:
    """F o f_eps.

    ``f`` is an :class:`AffineMap` (eps-independent) or a callable
    eps -> AffineMap for eps-dependent affine maps such as
    (x, y) -> sqrt(eps) x + y.  A general smooth map can be passed as a
    callable (eps, x) -> y together with ``jacobian`` (a matrix bounding
    |df| entrywise, or a callable eps -> matrix) and ``n_in``.

    Per-axis scales follow from the chain rule: moving x_j by dx changes
    y_i by about |J_ij| dx, so scale_j = min_i scale_i(F) / |J_ij|.
    """
    if jacobian is None:
        A0 = _affine_at(f, 1.0)
        n_in = A0.n_in
        if A0.n_out != F.dim:
            raise ValueError(f"map lands in R^{A0.n_out}, family lives on R^{F.dim}")

        def ev(eps, x):
            return F.evaluator(eps, _affine_at(f, eps)(x))

        def jac(eps):
            return _affine_at(f, eps).jacobian()
    else:
        if n_in is None:
            raise ValueError("n_in is required for a general map")

        def ev(eps, x):
            return F.evaluator(eps, f(eps, x))

        def jac(eps):
            return np.asarray(jacobian(eps) if callable(jacobian) else jacobian, dtype=float)

    def sc(eps):
        J = np.abs(jac(eps)).reshape(F.dim, n_in)
        s = F.axis_scales(eps)[:, None]
        with np.errstate(divide="ignore"):
            r = np.where(J > 0, s / np.where(J > 0, J, 1.0), np.inf)
        return r.min(axis=0)
    return ScaledFamily(n_in, ev, eps_floor=F.eps_floor, label=f"pullback[{F.label}]", scales=sc,
                        real=F.real, compact=F.compact, meta={"kind": "pullback"})


# --------------------------------------------------------------------------
# generalized constants and first-order operators
# --------------------------------------------------------------------------

def default_ladder(n=256, kmin=4.0, per_octave=8):
    """eps = 2^-(kmin + j/per_octave), j < n: long enough for tail statistics."""
    return 2.0 ** -(kmin + np.arange(n) / per_octave)


@dataclass
class LimitSet:
    """Limit points of a bounded net: isolated values and closed intervals."""

    points: tuple = ()
    intervals: tuple = ()

    def as_B(self):
        """Argument for :func:`colwave.cones.gamma_B` (a single kind only)."""
        if self.intervals and not self.points and len(self.intervals) == 1:
            return ("interval", self.intervals[0])
        if not self.intervals:
            return tuple(self.points)
        return None

    def gamma(self, tol=DEFAULT_TOL, step=0.05) -> Cone:
        parts = [gamma_B(tuple(self.points), step, tol)] if self.points else []
        parts += [gamma_B(("interval", iv), step, tol) for iv in self.intervals]
        if not parts:
            return Cone(dim=2, tol=tol)
        return parts[0].union(*parts[1:]) if len(parts) > 1 else parts[0]

    def to_dict(self):
        return {"points": [float(p) for p in self.points],
                "intervals": [[float(a), float(b)] for a, b in self.intervals]}


def limit_points(a: GeneralizedConstant, ladder=None, merge=0.05) -> LimitSet:
    """Cluster the tail of (a_eps) over the ladder.

    Sorted tail values are split wherever consecutive values differ by more
    than ``merge``; a cluster narrower than ``merge`` is a point (its mean),
    a wider one is a dense run and is reported as an interval.
    """
    eps = np.sort(np.asarray(default_ladder() if ladder is None else ladder, dtype=float))[::-1]
    if len(eps) < 32:
        raise ValueError("limit_points needs a ladder of at least 32 values")
    vals = np.asarray(a(eps[len(eps) // 2:]), dtype=float)
    v = np.sort(vals)
    cuts = np.nonzero(np.diff(v) > merge)[0] + 1
    pts, ivs = [], []
    for c in np.split(v, cuts):
        if c[-1] - c[0] <= merge:
            pts.append(round(float(np.mean(c)), 12))
        else:
            ivs.append((float(c[0]), float(c[-1])))
    return LimitSet(tuple(pts), tuple(ivs))


@dataclass(frozen=True)
class FirstOrderOperator:
    """P = d_t + a d_x on R^2 with coordinates (x, t); symbol i(tau + a_eps xi)."""

    a: GeneralizedConstant

    def symbol(self, eps, xi_tau):
        z = np.asarray(xi_tau, dtype=float)
        return 1j * (z[..., 1] + np.asarray(self.a(eps)) * z[..., 0])

    def apply(self, U: ScaledFamily, h=None) -> ScaledFamily:
        """P(U) by centred differences with step h (default scale/64)."""
        def ev(eps, x):
            sc = U.axis_scales(eps)
            hx = h or sc[0] / 64
            ht = h or (sc[1] / 64 if np.isfinite(sc[1]) else sc[0] / 64)
            ex, et = np.array([hx, 0.0]), np.array([0.0, ht])
            dt = (U.evaluator(eps, x + et) - U.evaluator(eps, x - et)) / (2 * ht)
            dx = (U.evaluator(eps, x + ex) - U.evaluator(eps, x - ex)) / (2 * hx)
            return dt + self.a(eps) * dx
        return ScaledFamily(2, ev, eps_floor=U.eps_floor, label=f"P[{U.label}]", scales=U.scales,
                            real=U.real, compact=U.compact, meta={"kind": "operator-image"})


@dataclass
class CharSetResult:
    cone: Cone
    directions: np.ndarray
    characteristic: np.ndarray
    C: np.ndarray
    r: np.ndarray
    caveat: str = ("checked for one mollifier only; the definition quantifies over all "
                   "mollifier classes")


def char_set(P: FirstOrderOperator, ladder=None, dirs=None, r_cap=0.0, bin_tol=None,
             tol=DEFAULT_TOL) -> CharSetResult:
    """Characteristic directions of P over a direction-bin set.

    For each unit (xi0, tau0) let m(eps) = |tau0 + a_eps xi0| on the tail of
    the ladder.  The direction is non-characteristic when a lower bound
    m >= C eps^r with r <= r_cap holds with C above ``bin_tol``; the best
    such C is min_tail m eps^-r_cap.  bin_tol (default: sine of half the bin
    spacing) absorbs the discretization of the direction set.  The reported
    r is the least-squares slope of log m against log eps over per-octave
    minima, for information.
    """
    eps = np.sort(np.asarray(default_ladder() if ladder is None else ladder, dtype=float))[::-1]
    if dirs is None:
        dirs = direction_bins(2)
    dirs = np.atleast_2d(np.asarray(dirs, dtype=float))
    if bin_tol is None:
        ang = np.sort(np.arctan2(dirs[:, 1], dirs[:, 0]))
        d = np.diff(ang)
        bin_tol = np.sin(0.5 * (d[d > 1e-12].min() if (d > 1e-12).any() else 0.1))
    tail = eps[len(eps) // 2:]
    a = np.asarray(P.a(tail), dtype=float)
    m = np.abs(dirs[:, 1][:, None] + a[None, :] * dirs[:, 0][:, None])
    C = np.min(m * tail[None, :] ** (-r_cap), axis=1)
    # per-octave minima for the informational exponent
    octave = np.floor(np.log2(1.0 / tail) + 1e-9)
    keys = np.unique(octave)
    L = np.log(np.array([tail[octave == k].max() for k in keys]))
    r = np.zeros(len(dirs))
    for i, row in enumerate(m):
        mins = np.array([row[octave == k].min() for k in keys])
        r[i] = np.polyfit(L, np.log(np.maximum(mins, 1e-300)), 1)[0] if len(keys) > 1 else 0.0
    ch = C <= bin_tol
    return CharSetResult(Cone(dirs[ch], tol, dim=2), dirs, ch, C, r)


def propagation_bound(P: FirstOrderOperator, WF_rhs: WaveFrontSet, base_points, ladder=None,
                      tol=DEFAULT_TOL, radius=0.05) -> WaveFrontSet:
    """Char P u WF(P U) at each base point (Char P does not depend on the point)."""
    char = char_set(P, ladder, tol=tol).cone
    out = []
    for x in np.atleast_2d(np.asarray(base_points, dtype=float)):
        rhs = WF_rhs.fiber(x, radius) if WF_rhs is not None else None
        out.append((x, char.union(rhs) if rhs is not None else char))
    return WaveFrontSet(out)


# --------------------------------------------------------------------------
# supports
# --------------------------------------------------------------------------

def vanishes_on_ball(F: ScaledFamily, center, r, ladder, n_small=4, factor=GUARD_FACTOR) -> bool:
    """True when |F(eps, .)| is exactly zero at every grid node of the closed
    ball B_r(center) for the ``n_small`` smallest eps of the ladder.

    The grid is the guard grid (h_i <= scale_i / factor) on the bounding box;
    compact families are screened on a coarse grid first.
    """
    c = np.atleast_1d(np.asarray(center, dtype=float))
    box = np.stack([c - r, c + r], axis=1)
    for eps in np.sort(np.asarray(ladder, dtype=float))[:n_small]:
        shape = required_shape(F, eps, box, factor)
        axes, idx, vals = evaluate_sparse(F, eps, box, shape, factor)
        if len(vals) == 0:
            continue
        pts = np.stack([ax[i] for ax, i in zip(axes, idx)], axis=-1)
        if np.any(np.linalg.norm(pts - c, axis=1) <= r):
            return False
    return True


# --------------------------------------------------------------------------
# association (weak limits)
# --------------------------------------------------------------------------

def _localized(F: ScaledFamily, psi: CutoffWindow, eps, factor):
    box = psi.box()
    axes, idx, vals = evaluate_sparse(F, eps, box, required_shape(F, eps, box, factor), factor)
    return axes, idx, vals * window_at(psi, axes, idx)


def pairing(F: ScaledFamily, psi: CutoffWindow, eps, factor=GUARD_FACTOR) -> complex:
    """<F(eps, .), psi> as a Riemann sum on the guard grid of the window box.

    The integrand vanishes to all orders at the box boundary, so the plain
    sum is spectrally accurate once phi_eps is resolved.
    """
    axes, idx, vals = _localized(F, psi, eps, factor)
    h = np.prod([ax[1] - ax[0] for ax in axes])
    return complex(np.sum(vals) * h)


def localized_ft(F: ScaledFamily, psi: CutoffWindow, eps, freqs, factor=GUARD_FACTOR):
    """F(psi F(eps, .)) at the given frequencies (shape (K, dim))."""
    axes, idx, vals = _localized(F, psi, eps, factor)
    return sparse_ray_spectrum(axes, idx, vals, freqs)


def association_errors(F: ScaledFamily, psi: CutoffWindow, limit, ladder, factor=GUARD_FACTOR):
    """|<F(eps, .), psi> - limit| along the eps ladder (largest eps first)."""
    ladder = np.sort(np.asarray(ladder, dtype=float))[::-1]
    return ladder, np.array([abs(pairing(F, psi, e, factor) - limit) for e in ladder])


# --------------------------------------------------------------------------
# bounds and inclusion checks
# --------------------------------------------------------------------------

@dataclass
class ProductBound:
    wf: WaveFrontSet
    applicable: bool
    zero_sum_points: list = field(default_factory=list)

    def to_dict(self):
        return {"applicable": self.applicable,
                "zero_sum_points": [[float(v) for v in x] for x in self.zero_sum_points],
                "bound": self.wf.to_dict()}


def _same_point(x, pts, radius):
    return any(np.max(np.abs(x - p)) <= radius + 1e-12 for p in pts)


def product_wf_bound(WF1: WaveFrontSet, WF2: WaveFrontSet, radius=0.05) -> ProductBound:
    """(WF1 + WF2) u WF1 u WF2 pointwise.

    Not applicable when the two sets are not in favorable position; the
    union is then still formed from the sampled sum (which contains 0 at
    the offending points) and the flag is cleared.
    """
    applicable = favorable_position(WF1, WF2, radius)
    pts = []
    for x in WF1.base_points + WF2.base_points:
        if not _same_point(x, pts, 0.0):
            pts.append(x)
    entries, bad = [], []
    for x in pts:
        f1, f2 = WF1.fiber(x, radius), WF2.fiber(x, radius)
        if f1 is None or f1.is_empty():
            fib = f2
        elif f2 is None or f2.is_empty():
            fib = f1
        else:
            try:
                s = closure_of_sum(f1, f2)
            except FavorablePositionError:
                s, _ = minkowski_sum(f1, f2)
                s = s.union(f1, f2)
                bad.append(x)
            fib = s
        if fib is not None:
            entries.append((x, fib))
    return ProductBound(WaveFrontSet(entries), applicable, bad)


@dataclass
class InclusionReport:
    """Result of checking estimated irregular bins against a bound."""

    holds: bool
    witness_bins: list           # (base point, direction, fit dict)
    tolerance: float
    checked_bins: int = 0
    label: str = ""

    def to_dict(self):
        return {"label": self.label, "holds": self.holds, "tolerance": self.tolerance,
                "checked_bins": self.checked_bins,
                "witness_bins": [{"base_point": [float(v) for v in x], "direction": [float(v) for v in d],
                                  "fit": f} for x, d, f in self.witness_bins]}

    def text(self):
        head = f"{self.label or 'inclusion'}: {'holds' if self.holds else 'VIOLATED'} " \
               f"({self.checked_bins} irregular bins checked, tolerance {self.tolerance:g} rad)"
        lines = [head]
        for x, d, f in self.witness_bins[:20]:
            lines.append(f"  at {np.round(x, 4).tolist()} direction {np.round(d, 4).tolist()} "
                         f"p_hat={f.get('p_hat')} N_hat={f.get('N_hat')}")
        if len(self.witness_bins) > 20:
            lines.append(f"  ... {len(self.witness_bins) - 20} more")
        return "\n".join(lines)


def check_inclusion(estimated: WaveFrontEstimate, bound: WaveFrontSet, tol=DEFAULT_TOL, radius=0.05,
                    label="") -> InclusionReport:
    """Every irregular bin of ``estimated`` must lie within tol of the bound
    fiber at a base point within ``radius`` (sup norm); a missing bound
    point counts as an empty fiber."""
    wit, n = [], 0
    for p in estimated.points:
        x = np.asarray(p.base_point, dtype=float)
        fib = bound.fiber(x, radius)
        for d, f, v in zip(p.directions, p.fits, p.verdicts):
            if v != IRREGULAR:
                continue
            n += 1
            if fib is None or fib.is_empty() or not fib.contains(d, tol):
                wit.append((x, np.asarray(d, float), f.to_dict()))
    return InclusionReport(not wit, wit, float(tol), n, label)
