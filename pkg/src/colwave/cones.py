"""
Closed cones in R^n \\ 0 and wave front sets built from them.

A cone is a finite set of unit directions plus an angular tolerance delta:
xi belongs to it when xi/|xi| is within delta (radians) of a stored
direction.  Curved cones can also carry exact generator curves, which
are used where the sampled picture would blur a limit (e.g. sums of two
curved cones that are not closed).
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.linalg import null_space
from scipy.optimize import minimize
from scipy.spatial import cKDTree

DEFAULT_TOL = 0.02


class DomainError(ValueError):
    """Operation not defined for these inputs (zero vector, intersecting cones...)."""


class FavorablePositionError(DomainError):
    """0 lies in Gamma1 + Gamma2, so the closure identity does not apply."""


def _unit(v):
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v, axis=-1, keepdims=True)
    return v / n


def _chord(theta):
    return 2.0 * np.sin(np.minimum(theta, np.pi) / 2.0)


def angle_between(u, v):
    u, v = _unit(u), _unit(v)
    c = np.clip(np.sum(u * v, axis=-1), -1.0, 1.0)
    return np.arccos(c)


def thin(dirs, step):
    """Drop directions that fall in an already occupied cell of size ~step."""
    dirs = np.atleast_2d(dirs)
    if len(dirs) == 0:
        return dirs
    if dirs.shape[1] == 2:
        key = np.round(np.arctan2(dirs[:, 1], dirs[:, 0]) / step).astype(np.int64)
        key[key == int(np.round(np.pi / step))] = int(np.round(-np.pi / step))
        _, idx = np.unique(key, return_index=True)
    else:
        key = np.round(dirs / (step / np.sqrt(dirs.shape[1]))).astype(np.int64)
        # unit vectors give |key| <= sqrt(n)/step, so a mixed-radix code is exact
        base = int(np.abs(key).max()) * 2 + 1
        if base ** dirs.shape[1] < 2 ** 62:
            code = np.zeros(len(key), dtype=np.int64)
            for j in range(dirs.shape[1]):
                code = code * base + (key[:, j] + base // 2)
            _, idx = np.unique(code, return_index=True)
        else:
            _, idx = np.unique(key, axis=0, return_index=True)
    return dirs[np.sort(idx)]


@dataclass(frozen=True)
class GeneratorCurve:
    """Exact parametrized curve of (not necessarily unit) generators c(t), t in [a, b]."""

    func: Callable
    param_range: tuple = (0.0, 1.0)
    n_samples: int = 2001
    label: str = ""

    def samples(self, n=None):
        t = np.linspace(*self.param_range, n or self.n_samples)
        return t, _unit(np.array([self.func(s) for s in t], dtype=float))

    def nearest_angle(self, xi):
        """Minimal angle from xi to the curve (grid search + bounded refinement)."""
        xi = _unit(xi)
        t, S = self.samples()
        ang = angle_between(S, xi)
        i = int(np.argmin(ang))
        a, b = self.param_range
        dt = (b - a) / (len(t) - 1)
        lo, hi = max(a, t[i] - dt), min(b, t[i] + dt)
        from scipy.optimize import minimize_scalar
        r = minimize_scalar(lambda s: float(angle_between(self.func(s), xi)), bounds=(lo, hi),
                            method="bounded", options={"xatol": 1e-13})
        return float(min(ang[i], r.fun))


class Cone:
    """Sampled closed cone with angular tolerance."""

    def __init__(self, directions=(), tol=DEFAULT_TOL, curves=(), dim=None):
        d = np.asarray(directions, dtype=float)
        if d.size == 0:
            if dim is None:
                raise ValueError("empty cone needs an explicit dim")
            d = np.zeros((0, dim))
        d = np.atleast_2d(d)
        nrm = np.linalg.norm(d, axis=1)
        if np.any(nrm == 0):
            raise DomainError("a cone cannot contain the zero vector")
        self.directions = d / nrm[:, None]
        self.dim = int(dim or d.shape[1])
        self.tol = float(tol)
        self.curves = tuple(curves)
        self._tree = None

    # -- sampling ---------------------------------------------------------
    def all_directions(self, curve_samples=None):
        parts = [self.directions]
        for c in self.curves:
            parts.append(c.samples(curve_samples)[1])
        return np.concatenate(parts, axis=0) if parts else np.zeros((0, self.dim))

    def __len__(self):
        return len(self.all_directions())

    def is_empty(self):
        return len(self.directions) == 0 and not self.curves

    def _kd(self):
        if self._tree is None:
            self._tree = cKDTree(self.all_directions()) if len(self) else None
        return self._tree

    # -- membership -------------------------------------------------------
    def angular_distance(self, xi):
        xi = np.asarray(xi, dtype=float)
        if np.linalg.norm(xi) == 0:
            raise DomainError("zero vector has no direction")
        if self._kd() is None:
            return np.pi
        dist, _ = self._kd().query(_unit(xi))
        ang = 2.0 * np.arcsin(min(1.0, dist / 2.0))
        for c in self.curves:
            ang = min(ang, c.nearest_angle(xi))
        return float(ang)

    def contains(self, xi, tol=None):
        tol = self.tol if tol is None else tol
        return self.angular_distance(xi) <= tol + 1e-12

    def contains_many(self, X, tol=None):
        """Vectorized sample-only membership (curves via their samples)."""
        X = np.atleast_2d(X)
        if len(X) == 0:
            return np.zeros(0, bool)
        if self._kd() is None:
            return np.zeros(len(X), bool)
        tol = self.tol if tol is None else tol
        r = _chord(tol) + 1e-12
        dist, _ = self._kd().query(_unit(X), distance_upper_bound=r * (1 + 1e-9))
        return dist <= r

    def subset_of(self, other, tol=None):
        """Sampled inclusion (delta-relaxed); returns (bool, offending directions)."""
        D = self.all_directions()
        if len(D) == 0:
            return True, D
        ok = other.contains_many(D, tol)
        return bool(ok.all()), D[~ok]

    # -- set operations ---------------------------------------------------
    def union(self, *others):
        dirs = [self.directions] + [o.directions for o in others]
        curves = list(self.curves) + [c for o in others for c in o.curves]
        return Cone(np.concatenate(dirs, axis=0), self.tol, curves, dim=self.dim)

    def intersect(self, other, tol=None):
        """delta-relaxed intersection on samples."""
        D = self.all_directions()
        keep = other.contains_many(D, tol) if len(D) else np.zeros(0, bool)
        return Cone(D[keep], self.tol, dim=self.dim)

    def negate(self):
        return Cone(-self.directions, self.tol, [GeneratorCurve(lambda t, f=c.func: -np.asarray(f(t)),
                                                                c.param_range, c.n_samples) for c in self.curves],
                    dim=self.dim)

    def thinned(self, step=None):
        return Cone(thin(self.directions, step or self.tol / 2), self.tol, self.curves, dim=self.dim)

    def to_dict(self):
        return {"dim": self.dim, "tolerance": self.tol,
                "directions": [[round(float(v), 12) for v in d] for d in self.directions],
                "curves": [{"param_range": list(c.param_range),
                            "samples": [[round(float(v), 12) for v in s] for s in c.samples(33)[1]]}
                           for c in self.curves]}

    def __repr__(self):
        return f"Cone(dim={self.dim}, n={len(self.directions)}, curves={len(self.curves)}, tol={self.tol})"


# --------------------------------------------------------------------------
# sums
# --------------------------------------------------------------------------

def zero_in_sum(G1: Cone, G2: Cone, tol=None):
    """True when some direction of G1 is within tol of the negative of one of G2."""
    tol = G1.tol if tol is None else tol
    A, B = G1.all_directions(), G2.all_directions()
    if len(A) == 0 or len(B) == 0:
        return False
    d, _ = cKDTree(A).query(-B)
    return bool(np.any(d <= _chord(tol) + 1e-12))


def _arcs(U, V, step):
    """Samples of the open great-circle arcs {normalize(lam u + v): lam > 0}."""
    out = []
    for u in U:
        c = np.clip(V @ u, -1.0, 1.0)
        th = np.arccos(c)                 # angle from v to u
        ok = th < np.pi - 1e-9
        if not ok.any():
            continue
        Vv, th = V[ok], th[ok]
        w = u[None, :] - c[ok][:, None] * Vv
        wn = np.linalg.norm(w, axis=1)
        good = wn > 1e-14
        Vv, th, w, wn = Vv[good], th[good], w[good], wn[good]
        if len(Vv) == 0:
            continue
        w = w / wn[:, None]
        m = max(2, int(np.ceil(th.max() / step)))
        s = (np.arange(1, m) / m)
        ang = th[:, None] * s[None, :]
        pts = Vv[:, None, :] * np.cos(ang)[..., None] + w[:, None, :] * np.sin(ang)[..., None]
        out.append(thin(pts.reshape(-1, U.shape[1]), step))
    if not out:
        return np.zeros((0, U.shape[1]))
    return thin(np.concatenate(out, axis=0), step)


def minkowski_sum(G1: Cone, G2: Cone, step=None):
    """Sampled directions of G1 + G2 and the zero_in_sum flag.

    Sums lam*u + v over lam > 0 trace the open great-circle arc from v to u,
    so the arc is sampled directly at angular spacing step (default tol/2).
    """
    if G1.dim != G2.dim:
        raise ValueError("cones of different dimension")
    step = step or G1.tol / 2
    A, B = thin(G1.all_directions(), step), thin(G2.all_directions(), step)
    flag = zero_in_sum(G1, G2)
    if len(A) == 0 or len(B) == 0:
        return Cone(dim=G1.dim, tol=G1.tol), flag
    D = _arcs(A, B, step)
    # a ray is closed under addition: same-direction pairs give u itself
    same = cKDTree(A).query(B)[0] <= _chord(G1.tol)
    if same.any():
        D = np.concatenate([D, B[same]], axis=0) if len(D) else B[same]
    return Cone(D, G1.tol, dim=G1.dim), flag


class SumCone(Cone):
    """(G1 + G2) u G1 u G2 with exact membership when generators are curves."""

    def __init__(self, G1: Cone, G2: Cone, sampled: Cone):
        super().__init__(sampled.directions, G1.tol, dim=G1.dim)
        self.parts = (G1, G2)

    def contains_exact(self, xi, res_tol=1e-9, coef_bound=1e6):
        G1, G2 = self.parts
        for G in (G1, G2):
            if G.angular_distance(xi) <= 1e-9:
                return True
        return exact_sum_member(G1, G2, xi, res_tol, coef_bound)


def _generators(G: Cone):
    """Callables t -> vector and their ranges (finite directions become constant maps)."""
    gens = [(lambda t, f=c.func: np.asarray(f(t), float), c.param_range) for c in G.curves]
    for d in G.directions:
        gens.append((lambda t, d=d: d, (0.0, 0.0)))
    return gens


def _nn2(a, b, x, bound):
    """min |l a + m b - x| with 0 <= l, m <= bound (2-column bounded NNLS)."""
    best = np.linalg.norm(x)
    M = np.stack([a, b], axis=1)
    try:
        lm = np.linalg.solve(M.T @ M, M.T @ x)
        if np.all(lm >= 0) and np.all(lm <= bound):
            return float(np.linalg.norm(M @ lm - x))
    except np.linalg.LinAlgError:
        pass
    for col in (a, b):
        l = np.clip(col @ x / max(col @ col, 1e-300), 0, bound)
        best = min(best, float(np.linalg.norm(l * col - x)))
    # one coefficient at the bound
    for c1, c2 in ((a, b), (b, a)):
        r = x - bound * c1
        l = np.clip(c2 @ r / max(c2 @ c2, 1e-300), 0, bound)
        best = min(best, float(np.linalg.norm(l * c2 - r)))
    return best


def exact_sum_member(G1: Cone, G2: Cone, xi, res_tol=1e-9, coef_bound=1e6, grid=81):
    """Is xi (normalized) = l c1(t) + m c2(s) with l, m in (0, coef_bound]?

    Grid over the generator parameters followed by local refinement; a
    residual at or below res_tol counts as membership.  Limits that need
    unbounded coefficients (the non-closed part of a sum) are rejected.
    """
    x = _unit(xi)
    best = np.inf
    cands = []
    for f1, r1 in _generators(G1):
        t1 = np.linspace(*r1, grid) if r1[1] > r1[0] else np.array([r1[0]])
        for f2, r2 in _generators(G2):
            t2 = np.linspace(*r2, grid) if r2[1] > r2[0] else np.array([r2[0]])
            C1 = [np.asarray(f1(t), float) for t in t1]
            C2 = [np.asarray(f2(s), float) for s in t2]
            for i, a in enumerate(C1):
                for j, b in enumerate(C2):
                    r = _nn2(a, b, x, coef_bound)
                    cands.append((r, t1[i], t2[j], f1, f2, r1, r2))
    cands.sort(key=lambda c: c[0])
    for r, t, s, f1, f2, r1, r2 in cands[:8]:
        best = min(best, r)
        if best <= res_tol:
            return True

        def obj(p):
            tt = np.clip(p[0], *r1)
            ss = np.clip(p[1], *r2)
            return _nn2(np.asarray(f1(tt), float), np.asarray(f2(ss), float), x, coef_bound)
        sol = minimize(obj, [t, s], method="Nelder-Mead",
                       options={"xatol": 1e-14, "fatol": 1e-16, "maxiter": 4000})
        best = min(best, sol.fun)
        if best <= res_tol:
            return True
    return bool(best <= res_tol)


def closure_of_sum(G1: Cone, G2: Cone, step=None) -> SumCone:
    """(G1 + G2) u G1 u G2; refuses when 0 is in G1 + G2."""
    S, flag = minkowski_sum(G1, G2, step)
    if flag:
        raise FavorablePositionError("0 lies in G1 + G2: the sum is not closed in R^n \\ 0 this way")
    parts = [S.directions, G1.all_directions(), G2.all_directions()]
    return SumCone(G1, G2, Cone(np.concatenate(parts, axis=0), G1.tol, dim=G1.dim))


# --------------------------------------------------------------------------
# separation and neighborhoods
# --------------------------------------------------------------------------

def separation_constant(S1: Cone, S2: Cone, n_check=10_000, seed=0):
    """alpha with |xi - eta| >= alpha |eta| for xi in S1, eta in S2.

    Returns (alpha, certificate) where certificate counts violations of
    |xi-eta| >= (alpha - 1e-9)|eta| on random pairs with random scalings.
    """
    A, B = S1.all_directions(), S2.all_directions()
    if len(A) == 0 or len(B) == 0:
        raise DomainError("separation constant needs nonempty cones")
    if np.any(S1.contains_many(B)):
        raise DomainError("cones intersect (within tolerance)")
    c = B @ A.T                                  # (m2, m1)
    dist = np.where(c > 0, np.sqrt(np.clip(1 - c ** 2, 0, None)), 1.0)
    alpha = float(dist.min())
    rng = np.random.default_rng(seed)
    i = rng.integers(0, len(A), n_check)
    j = rng.integers(0, len(B), n_check)
    la = 10.0 ** rng.uniform(-3, 3, n_check)
    mu = 10.0 ** rng.uniform(-3, 3, n_check)
    xi, eta = A[i] * la[:, None], B[j] * mu[:, None]
    lhs = np.linalg.norm(xi - eta, axis=1)
    viol = int(np.sum(lhs < (alpha - 1e-9) * np.linalg.norm(eta, axis=1)))
    return alpha, {"pairs": n_check, "violations": viol}


def _cap(u, theta, step):
    """Directions within angle theta of the unit vector u, spacing ~step."""
    n = len(u)
    if theta <= 0:
        return u[None, :]
    Q = null_space(u[None, :])                   # tangent basis (n, n-1)
    m = max(1, int(np.ceil(theta / step)))
    g = np.linspace(-theta, theta, 2 * m + 1)
    if n == 2:
        V = g[:, None]
    else:
        V = np.stack(np.meshgrid(*([g] * (n - 1)), indexing="ij"), axis=-1).reshape(-1, n - 1)
        V = V[np.linalg.norm(V, axis=1) <= theta + 1e-12]
        # close the boundary circle with points at exactly theta
        if n == 3:
            k = max(8, int(np.ceil(2 * np.pi * theta / step)))
            a = 2 * np.pi * np.arange(k) / k
            V = np.concatenate([V, theta * np.stack([np.cos(a), np.sin(a)], axis=1)])
    r = np.linalg.norm(V, axis=1)
    out = np.outer(np.cos(r), u)
    nz = r > 0
    out[nz] += np.sin(r[nz])[:, None] * ((V[nz] / r[nz, None]) @ Q.T)
    return out


def conic_neighborhood(G: Cone, theta, step=None) -> Cone:
    """All directions within angle theta of G (sampled, tolerance unchanged)."""
    if not theta > 0:
        raise ValueError("theta must be positive")
    D = G.all_directions()
    if len(D) == 0:
        return Cone(dim=G.dim, tol=G.tol)
    step = step or max(G.tol / 2, theta / 12)
    caps = np.concatenate([_cap(u, theta, step) for u in D], axis=0)
    return Cone(thin(caps, min(step, G.tol / 2) if theta < G.tol else step), G.tol, dim=G.dim)


@dataclass
class NeighborhoodResult:
    success: bool
    theta: float
    W1: Optional[Cone] = None
    W2: Optional[Cone] = None
    certificate: Optional[np.ndarray] = None
    message: str = ""


def _ring(u, theta, step):
    """Boundary of the cap of angle theta around u (n = 2: the two end rays)."""
    n = len(u)
    Q = null_space(u[None, :])
    if n == 2:
        a = np.array([-theta, theta])
        return np.outer(np.cos(a), u) + np.sin(a)[:, None] * Q[:, 0][None, :]
    k = max(8, int(np.ceil(2 * np.pi * np.sin(theta) / step)))
    a = 2 * np.pi * np.arange(k) / k
    return np.cos(theta) * u[None, :] + np.sin(theta) * (np.cos(a)[:, None] * Q[:, 0] + np.sin(a)[:, None] * Q[:, 1])


def _sum_inside(G1: Cone, G2: Cone, theta, W: Cone, step):
    """Certificate that (W1 + W2) u W1 u W2 lies in W for the theta-neighborhoods
    W1, W2 of G1, G2, or None.

    Each cap is convex, and the sum of two convex caps is the union of the
    arcs joining their boundaries (extend any arc through a sum point until
    both ends leave the caps), so only ring-to-ring arcs are sampled, at
    spacing ``step``.  Checked generator by generator so that a failing
    trial stops early.
    """
    A, B = G1.all_directions(), G2.all_directions()
    n = G1.dim
    parts = []
    for D in (A, B):
        caps = np.concatenate([_cap(u, theta, step) for u in D], axis=0)
        if not W.contains_many(caps).all():
            return None
        parts.append(caps)
    if n > 3:
        RA = np.concatenate([_cap(u, theta, step) for u in A], axis=0)
        RB = np.concatenate([_cap(u, theta, step) for u in B], axis=0)
    else:
        RA = np.concatenate([_ring(u, theta, step) for u in A], axis=0)
        RB = np.concatenate([_ring(u, theta, step) for u in B], axis=0)
    if np.any(cKDTree(RA).query(-RB)[0] <= _chord(G1.tol) + 1e-12):
        return None
    for u in RA:
        D = _arcs(u[None, :], RB, step)
        if len(D) and not W.contains_many(D).all():
            return None
        parts.append(D)
    return thin(np.concatenate(parts, axis=0), step)


def neighborhoods_with_sum_inside(G1: Cone, G2: Cone, W: Cone, theta0=np.deg2rad(30.0), theta_min=1e-4,
                                  refine=8):
    """Bisection (halving from 30 deg) for conic neighborhoods W1 of G1, W2 of G2
    whose sampled sum W1 + W2 stays inside W.

    Trial sums are sampled at spacing max(tol, theta/refine) (membership in W
    is tol-relaxed anyway), so wide trial neighborhoods stay cheap in R^3.
    """
    if zero_in_sum(G1, G2):
        return NeighborhoodResult(False, 0.0, message="0 in G1 + G2: no such neighborhoods")
    theta = theta0
    while theta >= theta_min:
        step = max(G1.tol, theta / refine)
        cert = _sum_inside(G1, G2, theta, W, step)
        if cert is not None:
            return NeighborhoodResult(True, theta, conic_neighborhood(G1, theta), conic_neighborhood(G2, theta),
                                      cert)
        theta /= 2.0
    return NeighborhoodResult(False, theta, message="bisection exhausted")


# --------------------------------------------------------------------------
# wave front sets
# --------------------------------------------------------------------------

class WaveFrontSet:
    """Finite list of (base point, fiber cone)."""

    def __init__(self, entries=()):
        self.entries = [(np.atleast_1d(np.asarray(x, dtype=float)), c) for x, c in entries]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self):
        return len(self.entries)

    @property
    def base_points(self):
        return [x for x, _ in self.entries]

    def fiber(self, x, radius=0.05):
        """Union of fibers at base points within radius (sup norm) of x, or None."""
        x = np.atleast_1d(np.asarray(x, dtype=float))
        hits = [c for b, c in self.entries if b.shape == x.shape and np.max(np.abs(b - x)) <= radius + 1e-12]
        if not hits:
            return None
        return hits[0].union(*hits[1:]) if len(hits) > 1 else hits[0]

    def nonempty(self):
        return WaveFrontSet([(x, c) for x, c in self.entries if not c.is_empty()])

    def to_dict(self):
        return {"entries": [{"base_point": [float(v) for v in x], "fiber": c.to_dict()} for x, c in self.entries]}


def favorable_position(WF1: WaveFrontSet, WF2: WaveFrontSet, radius=0.05):
    """No shared base point where the fibers sum to zero."""
    for x, c1 in WF1:
        c2 = WF2.fiber(x, radius)
        if c2 is not None and zero_in_sum(c1, c2):
            return False
    return True


def gamma_B(B, step=0.05, tol=DEFAULT_TOL) -> Cone:
    """{(xi, tau): tau = -b xi, b in B} with B finite or ("interval", (lo, hi))."""
    if isinstance(B, tuple) and len(B) == 2 and B[0] == "interval":
        lo, hi = B[1]
        bs = np.arange(lo, hi + step / 2, step)
        curves = [GeneratorCurve(lambda b: np.array([1.0, -b]), (lo, hi)),
                  GeneratorCurve(lambda b: np.array([-1.0, b]), (lo, hi))]
    else:
        bs = np.atleast_1d(np.asarray(B, dtype=float))
        curves = []
    if len(bs) == 0:
        raise ValueError("B must be nonempty")
    d = np.stack([np.ones_like(bs), -bs], axis=1) / np.sqrt(1 + bs ** 2)[:, None]
    return Cone(np.concatenate([d, -d]), tol, curves)


@dataclass(frozen=True)
class AffineMap:
    """x -> A x + c, A of shape (n_out, n_in)."""

    A: np.ndarray
    c: Optional[np.ndarray] = None

    @property
    def n_in(self):
        return np.asarray(self.A).shape[1]

    @property
    def n_out(self):
        return np.asarray(self.A).shape[0]

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        c = np.zeros(self.n_out) if self.c is None else np.asarray(self.c, float)
        return x @ np.asarray(self.A, float).T + c

    def jacobian(self, x=None):
        return np.asarray(self.A, float)

    def compose(self, inner: "AffineMap") -> "AffineMap":
        """self o inner."""
        A = np.asarray(self.A, float) @ np.asarray(inner.A, float)
        c = self(np.zeros(self.n_in) if inner.c is None else np.asarray(inner.c, float))
        return AffineMap(A, c)


def diagonal_map(n):
    """d: R^n -> R^{2n}, x -> (x, x)."""
    return AffineMap(np.vstack([np.eye(n), np.eye(n)]))


def _sphere_samples(Q, tol):
    """Unit vectors of span(Q) (orthonormal columns)."""
    k = Q.shape[1]
    if k == 0:
        return np.zeros((0, Q.shape[0]))
    if k == 1:
        return np.stack([Q[:, 0], -Q[:, 0]])
    if k == 2:
        m = int(np.ceil(2 * np.pi / tol))
        a = 2 * np.pi * np.arange(m) / m
        return np.cos(a)[:, None] * Q[:, 0] + np.sin(a)[:, None] * Q[:, 1]
    from .wavefront import icosahedral_centres
    if k == 3:
        return icosahedral_centres(3) @ Q.T
    rng = np.random.default_rng(0)
    G = rng.normal(size=(4000, k))
    return _unit(G) @ Q.T


def normal_set(f: AffineMap, domain_samples, tol=DEFAULT_TOL) -> WaveFrontSet:
    """N_f = {(f(x), xi): f'(x)^T xi = 0, xi != 0} at the given x."""
    out = []
    for x in np.atleast_2d(np.asarray(domain_samples, float)):
        K = null_space(f.jacobian(x).T, rcond=1e-10)
        out.append((f(x), Cone(_sphere_samples(K, tol / 2), tol, dim=f.n_out)))
    return WaveFrontSet(out)


def pullback_cone(f: AffineMap, G: WaveFrontSet, domain_samples=None, radius=0.05) -> WaveFrontSet:
    """f*G = {(x, f'(x)^T xi) : (f(x), xi) in G}; zero images are dropped.

    Without ``domain_samples`` every base point y of G with a preimage
    (least-squares residual below 1e-9) contributes x = pinv(A)(y - c).
    """
    J = f.jacobian()
    if domain_samples is None:
        xs = []
        P = np.linalg.pinv(J)
        c = np.zeros(f.n_out) if f.c is None else np.asarray(f.c, float)
        for y, _ in G:
            x = P @ (y - c)
            if np.linalg.norm(f(x) - y) <= 1e-9:
                xs.append(x)
    else:
        xs = list(np.atleast_2d(np.asarray(domain_samples, float)))
    out = []
    for x in xs:
        fib = G.fiber(f(x), radius)
        if fib is None:
            continue
        D = fib.all_directions()
        img = D @ J
        keep = np.linalg.norm(img, axis=1) > 1e-12
        out.append((x, Cone(thin(_unit(img[keep]), fib.tol / 4) if keep.any() else np.zeros((0, f.n_in)),
                            fib.tol, dim=f.n_in)))
    return WaveFrontSet(out)


def _product_fiber(A, B, with_left_zero, with_right_zero, step):
    """Directions (cos a * xi, sin a * eta) for xi in A, eta in B, a in (0, pi/2),
    plus the a = 0 / a = pi/2 ends when allowed."""
    n1 = A.shape[1] if A.size else None
    parts = []
    if len(A) and len(B):
        m = max(2, int(np.ceil((np.pi / 2) / step)))
        a = np.arange(1, m) / m * (np.pi / 2)
        ca, sa = np.cos(a), np.sin(a)
        for u in A:
            for v in B:
                parts.append(np.concatenate([np.outer(ca, u), np.outer(sa, v)], axis=1))
    return parts


def boxtimes(WF1: WaveFrontSet, WF2: WaveFrontSet, supp1, supp2, n1=None, n2=None, tol=DEFAULT_TOL,
             radius=0.05) -> WaveFrontSet:
    """(WF1 [x] WF2) u ((supp1 x 0) [x] WF2) u (WF1 [x] (supp2 x 0)) over the product base.

    Base points are pairs (x, y) with x from WF1 base points or supp1 and y
    from WF2 base points or supp2.
    """
    step = tol / 2
    s1 = [np.atleast_1d(np.asarray(x, float)) for x in (supp1 if supp1 is not None else [])]
    s2 = [np.atleast_1d(np.asarray(y, float)) for y in (supp2 if supp2 is not None else [])]
    n1 = n1 or (WF1.base_points[0].size if len(WF1) else (s1[0].size if s1 else None))
    n2 = n2 or (WF2.base_points[0].size if len(WF2) else (s2[0].size if s2 else None))
    if n1 is None or n2 is None:
        return WaveFrontSet()

    def uniq(pts):
        out = []
        for p in pts:
            if not any(q.shape == p.shape and np.allclose(q, p) for q in out):
                out.append(p)
        return out
    X = uniq(WF1.base_points + s1)
    Y = uniq(WF2.base_points + s2)

    def near(p, S):
        return any(np.max(np.abs(p - q)) <= radius for q in S)
    entries = []
    for x in X:
        f1 = WF1.fiber(x, radius)
        A = f1.all_directions() if f1 is not None else np.zeros((0, n1))
        for y in Y:
            f2 = WF2.fiber(y, radius)
            B = f2.all_directions() if f2 is not None else np.zeros((0, n2))
            parts = _product_fiber(A, B, False, False, step)
            if len(A) and near(y, s2):
                parts.append(np.concatenate([A, np.zeros((len(A), n2))], axis=1))
            if len(B) and near(x, s1):
                parts.append(np.concatenate([np.zeros((len(B), n1)), B], axis=1))
            D = np.concatenate(parts, axis=0) if parts else np.zeros((0, n1 + n2))
            if len(D):
                entries.append((np.concatenate([x, y]), Cone(thin(D, step), tol, dim=n1 + n2)))
    return WaveFrontSet(entries)
