"""
Convex bodies with projection oracles.

Every body exposes the metric projection (nearest point), a containment
test, and an outer radius ``R`` such that the body lies in the ball of
radius ``R`` about the origin. Ball, ellipsoid, box and V-polytope also
have an exact support function.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..errors import NonConvergence, PointInsideBody, Unsupported

# Depth below which a contained point counts as a boundary point.
BOUNDARY_BAND = 1e-9

ELLIPSOID_TOL = 1e-12
ELLIPSOID_MAX_ITER = 200
HULL_GAP_TOL = 1e-10
HULL_MAX_ITER = 10_000
DYKSTRA_TOL = 1e-11
DYKSTRA_MAX_SWEEPS = 5_000


def as_vector(x, dim: int | None = None) -> np.ndarray:
    """Coerce ``x`` to a finite 1-D float array, optionally of length ``dim``."""
    v = np.asarray(x, dtype=float)
    if v.ndim != 1:
        raise ValueError(f"expected a 1-D vector, got shape {v.shape}")
    if v.size < 2:
        raise ValueError("vectors must have dimension >= 2")
    if dim is not None and v.size != dim:
        raise ValueError(f"dimension mismatch: expected {dim}, got {v.size}")
    if not np.all(np.isfinite(v)):
        raise ValueError("vector has non-finite coordinates")
    return v


class ConvexBody:
    """Base class. Subclasses implement ``_nearest`` and friends."""

    kind: str = "abstract"
    dim: int

    @property
    def outer_radius(self) -> float:
        raise NotImplementedError

    def _nearest(self, p: np.ndarray) -> np.ndarray:
        """Metric projection; returns ``p`` itself for points of the body."""
        raise NotImplementedError

    def _nearest_many(self, points: np.ndarray) -> np.ndarray:
        return np.array([self._nearest(p) for p in points]).reshape(points.shape)

    def _is_deep(self, p: np.ndarray, margin: float) -> bool:
        """True if the ball of radius ``margin`` about ``p`` is inside the body.

        May return False for some deep points (conservative).
        """
        raise NotImplementedError

    def contains(self, p, tol: float = 1e-9) -> bool:
        p = as_vector(p, self.dim)
        return bool(np.linalg.norm(p - self._nearest(p)) <= tol)

    def support(self, u) -> float:
        raise Unsupported(f"no closed-form support function for kind '{self.kind}'")

    def scaled(self, r: float) -> "ConvexBody":
        raise NotImplementedError

    def reference_point(self) -> np.ndarray:
        """The origin if it lies in the body, else its projection onto the body."""
        origin = np.zeros(self.dim)
        return self._nearest(origin)


def _checked_scale(r: float) -> float:
    r = float(r)
    if not (r > 0 and math.isfinite(r)):
        raise ValueError("scale factor must be positive and finite")
    return r


@dataclass(frozen=True, eq=False)
class Ball(ConvexBody):
    center: np.ndarray
    radius: float
    kind: str = field(default="ball", init=False)

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        if c.ndim != 1 or c.size < 2 or not np.all(np.isfinite(c)):
            raise ValueError("ball center must be a finite vector of dimension >= 2")
        if not self.radius > 0:
            raise ValueError("ball radius must be positive")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "radius", float(self.radius))

    @property
    def dim(self) -> int:
        return self.center.size

    @property
    def outer_radius(self) -> float:
        return float(np.linalg.norm(self.center)) + self.radius

    def _nearest(self, p):
        y = p - self.center
        n = np.linalg.norm(y)
        if n <= self.radius:
            return p.copy()
        return self.center + (self.radius / n) * y

    def _nearest_many(self, points):
        y = points - self.center
        n = np.linalg.norm(y, axis=1)
        scale = np.where(n > self.radius, self.radius / np.maximum(n, 1e-300), 1.0)
        return self.center + y * scale[:, None]

    def _is_deep(self, p, margin):
        return bool(np.linalg.norm(p - self.center) < self.radius - margin)

    def contains(self, p, tol=1e-9):
        p = as_vector(p, self.dim)
        return bool(np.linalg.norm(p - self.center) <= self.radius + tol)

    def support(self, u):
        u = as_vector(u, self.dim)
        return float(u @ self.center + self.radius * np.linalg.norm(u))

    def scaled(self, r):
        r = _checked_scale(r)
        return Ball(self.center * r, self.radius * r)


def _secular_root(y2a2: np.ndarray, a2: np.ndarray, t_hi: float) -> float:
    """Positive root of sum(a^2 y^2 / (a^2 + t)^2) = 1.

    Newton from t = 0 with a bisection safeguard on [0, t_hi]. The secular
    function is convex and decreasing on t > 0, so plain Newton iterates
    increase monotonically toward the root; the bracket only guards
    round-off.
    """
    lo, hi = 0.0, t_hi
    t = 0.0
    for _ in range(ELLIPSOID_MAX_ITER):
        q = a2 + t
        f = float(np.sum(y2a2 / q**2)) - 1.0
        if f > 0:
            lo = t
        else:
            hi = t
        df = -2.0 * float(np.sum(y2a2 / q**3))
        t_new = t - f / df if df < 0 else 0.5 * (lo + hi)
        if not (lo <= t_new <= hi):
            t_new = 0.5 * (lo + hi)
        if abs(t_new - t) <= ELLIPSOID_TOL * max(1.0, t):
            return t_new
        t = t_new
    raise NonConvergence("ellipsoid secular equation did not converge")


@dataclass(frozen=True, eq=False)
class Ellipsoid(ConvexBody):
    """Axis-aligned ellipsoid ``sum(((x - c) / a)**2) <= 1``."""

    center: np.ndarray
    semiaxes: np.ndarray
    kind: str = field(default="ellipsoid", init=False)

    def __post_init__(self):
        c = np.asarray(self.center, dtype=float)
        a = np.asarray(self.semiaxes, dtype=float)
        if c.ndim != 1 or c.size < 2 or a.shape != c.shape:
            raise ValueError("ellipsoid center and semiaxes must be vectors of equal dimension >= 2")
        if not (np.all(np.isfinite(c)) and np.all(np.isfinite(a)) and np.all(a > 0)):
            raise ValueError("ellipsoid semiaxes must be positive and finite")
        object.__setattr__(self, "center", c)
        object.__setattr__(self, "semiaxes", a)

    @property
    def dim(self):
        return self.center.size

    @property
    def outer_radius(self):
        return float(np.linalg.norm(self.center) + self.semiaxes.max())

    def _level(self, p):
        return float(np.sum(((p - self.center) / self.semiaxes) ** 2))

    def _nearest(self, p):
        if self._level(p) <= 1.0:
            return p.copy()
        y = p - self.center
        a2 = self.semiaxes**2
        t = _secular_root(a2 * y**2, a2, float(self.semiaxes.max() * np.linalg.norm(y)))
        return self.center + a2 * y / (a2 + t)

    def _nearest_many(self, points):
        y = points - self.center
        a2 = self.semiaxes**2
        level = np.sum(y**2 / a2, axis=1)
        out = points.copy()
        idx = np.nonzero(level > 1.0)[0]
        if idx.size == 0:
            return out
        ys = y[idx]
        num = a2 * ys**2
        lo = np.zeros(idx.size)
        hi = self.semiaxes.max() * np.linalg.norm(ys, axis=1)
        t = np.zeros(idx.size)
        active = np.ones(idx.size, dtype=bool)
        for _ in range(ELLIPSOID_MAX_ITER):
            q = a2 + t[:, None]
            f = np.sum(num / q**2, axis=1) - 1.0
            df = -2.0 * np.sum(num / q**3, axis=1)
            lo = np.where(f > 0, t, lo)
            hi = np.where(f > 0, hi, t)
            t_new = t - f / np.where(df < 0, df, -1.0)
            bad = (df >= 0) | (t_new < lo) | (t_new > hi)
            t_new = np.where(bad, 0.5 * (lo + hi), t_new)
            done = np.abs(t_new - t) <= ELLIPSOID_TOL * np.maximum(1.0, t)
            t = np.where(active, t_new, t)
            active &= ~done
            if not active.any():
                break
        else:
            raise NonConvergence("ellipsoid secular equation did not converge")
        out[idx] = self.center + a2 * ys / (a2 + t[:, None])
        return out

    def _is_deep(self, p, margin):
        s = 1.0 - margin / self.semiaxes.min()
        return s > 0 and self._level(p) < s * s

    def contains(self, p, tol=1e-9):
        p = as_vector(p, self.dim)
        if self._level(p) <= 1.0:
            return True
        return bool(np.linalg.norm(p - self._nearest(p)) <= tol)

    def support(self, u):
        u = as_vector(u, self.dim)
        return float(u @ self.center + np.sqrt(np.sum((self.semiaxes * u) ** 2)))

    def scaled(self, r):
        r = _checked_scale(r)
        return Ellipsoid(self.center * r, self.semiaxes * r)


@dataclass(frozen=True, eq=False)
class Box(ConvexBody):
    lo: np.ndarray
    hi: np.ndarray
    kind: str = field(default="box", init=False)

    def __post_init__(self):
        lo = np.asarray(self.lo, dtype=float)
        hi = np.asarray(self.hi, dtype=float)
        if lo.ndim != 1 or lo.size < 2 or lo.shape != hi.shape:
            raise ValueError("box bounds must be vectors of equal dimension >= 2")
        if not (np.all(np.isfinite(lo)) and np.all(np.isfinite(hi)) and np.all(lo < hi)):
            raise ValueError("box requires finite lo < hi componentwise")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def dim(self):
        return self.lo.size

    @property
    def outer_radius(self):
        return float(np.linalg.norm(np.maximum(np.abs(self.lo), np.abs(self.hi))))

    def _nearest(self, p):
        return np.clip(p, self.lo, self.hi)

    def _nearest_many(self, points):
        return np.clip(points, self.lo, self.hi)

    def _is_deep(self, p, margin):
        return bool(np.all(p > self.lo + margin) and np.all(p < self.hi - margin))

    def support(self, u):
        u = as_vector(u, self.dim)
        return float(np.sum(np.maximum(u * self.lo, u * self.hi)))

    def vertices(self) -> np.ndarray:
        d = self.dim
        corners = np.array(np.meshgrid(*[[0, 1]] * d, indexing="ij")).reshape(d, -1).T
        return np.where(corners == 1, self.hi, self.lo)

    def scaled(self, r):
        r = _checked_scale(r)
        return Box(self.lo * r, self.hi * r)


def _hull_nearest(V: np.ndarray, p: np.ndarray, w0: np.ndarray | None = None):
    """Nearest point of conv(V) to p by away-step conditional gradient.

    Works on barycentric weights. Each iteration first tries a corrective
    step toward the minimizer over the affine hull of the active vertices
    (the minor cycle of Wolfe's method), which makes the final iterate
    exact to rounding once the optimal face is identified. Stops when the
    Frank-Wolfe duality gap drops below ``HULL_GAP_TOL``.
    """
    n = V.shape[0]
    if n == 1:
        return V[0].copy(), np.ones(1)
    if w0 is None:
        w = np.zeros(n)
        w[np.argmin(np.sum((V - p) ** 2, axis=1))] = 1.0
    else:
        w = w0.copy()
    for _ in range(HULL_MAX_ITER):
        S = np.nonzero(w > 0)[0]
        if S.size > 1:
            v0 = V[S[0]]
            D = (V[S[1:]] - v0).T
            mu = np.linalg.lstsq(D, p - v0, rcond=None)[0]
            lam = np.concatenate(([1.0 - mu.sum()], mu))
            ws = w[S]
            if np.all(lam >= 0):
                w[S] = lam
            else:
                neg = lam < 0
                theta = np.min(ws[neg] / (ws[neg] - lam[neg]))
                ws = ws + theta * (lam - ws)
                ws[ws < 1e-15] = 0.0
                w[S] = ws
            w /= w.sum()
        x = w @ V
        g = x - p
        scores = V @ g
        gx = g @ x
        s = int(np.argmin(scores))
        fw_gap = gx - scores[s]
        if fw_gap <= HULL_GAP_TOL:
            return x, w
        S = np.nonzero(w > 0)[0]
        a = int(S[np.argmax(scores[S])])
        away_gap = scores[a] - gx
        if fw_gap >= away_gap:
            d = V[s] - x
            gamma_max = 1.0
        else:
            d = x - V[a]
            gamma_max = w[a] / (1.0 - w[a]) if w[a] < 1.0 else np.inf
        dd = d @ d
        if dd == 0.0:
            return x, w
        gamma = min(max(-(g @ d) / dd, 0.0), gamma_max)
        if fw_gap >= away_gap:
            w *= 1.0 - gamma
            w[s] += gamma
        else:
            w *= 1.0 + gamma
            w[a] -= gamma
            if gamma == gamma_max:
                w[a] = 0.0
        w[w < 0] = 0.0
    raise NonConvergence("convex-hull projection exceeded its iteration cap")


@dataclass(frozen=True, eq=False)
class VPolytope(ConvexBody):
    """Convex hull of a finite vertex list."""

    vertices: np.ndarray
    kind: str = field(default="vpolytope", init=False)

    def __post_init__(self):
        V = np.asarray(self.vertices, dtype=float)
        if V.ndim != 2 or V.shape[0] < 1 or V.shape[1] < 2:
            raise ValueError("vpolytope needs at least one vertex of dimension >= 2")
        if not np.all(np.isfinite(V)):
            raise ValueError("vpolytope vertices must be finite")
        object.__setattr__(self, "vertices", V)

    @property
    def dim(self):
        return self.vertices.shape[1]

    @property
    def outer_radius(self):
        return float(np.linalg.norm(self.vertices, axis=1).max())

    def _nearest(self, p):
        return _hull_nearest(self.vertices, p)[0]

    def _nearest_many(self, points):
        out = np.empty_like(points)
        w = None
        for i, p in enumerate(points):
            # consecutive queries are usually close; reuse the active set
            out[i], w = _hull_nearest(self.vertices, p, w)
        return out

    def _is_deep(self, p, margin):
        # the cross-polytope with vertices p +- r e_i contains the ball of radius r / sqrt(d)
        r = margin * math.sqrt(self.dim)
        for i in range(self.dim):
            for sign in (1.0, -1.0):
                q = p.copy()
                q[i] += sign * r
                if np.linalg.norm(q - self._nearest(q)) > 1e-13:
                    return False
        return True

    def support(self, u):
        u = as_vector(u, self.dim)
        return float(np.max(self.vertices @ u))

    def scaled(self, r):
        r = _checked_scale(r)
        return VPolytope(self.vertices * r)


def dykstra(members: Sequence[ConvexBody], p: np.ndarray) -> np.ndarray:
    """Dykstra's alternating projection onto the intersection of ``members``."""
    x = p.copy()
    incs = [np.zeros_like(p) for _ in members]
    for _ in range(DYKSTRA_MAX_SWEEPS):
        x_prev = x
        for i, body in enumerate(members):
            y = body._nearest(x + incs[i])
            incs[i] = x + incs[i] - y
            x = y
        if np.linalg.norm(x - x_prev) < DYKSTRA_TOL:
            return x
    raise NonConvergence("Dykstra's projection exceeded its sweep cap")


@dataclass(frozen=True, eq=False)
class Intersection(ConvexBody):
    members: tuple
    kind: str = field(default="intersection", init=False)

    def __post_init__(self):
        members = tuple(self.members)
        if not members:
            raise ValueError("intersection needs at least one member")
        dims = {m.dim for m in members}
        if len(dims) != 1:
            raise ValueError("intersection members differ in dimension")
        object.__setattr__(self, "members", members)
        # feasibility probe: project the origin and confirm every member holds it
        probe = dykstra(members, np.zeros(members[0].dim))
        if not all(m.contains(probe, 1e-7) for m in members):
            raise ValueError("intersection is empty")

    @property
    def dim(self):
        return self.members[0].dim

    @property
    def outer_radius(self):
        return min(m.outer_radius for m in self.members)

    def _nearest(self, p):
        if all(m.contains(p, 0.0) for m in self.members):
            return p.copy()
        return dykstra(self.members, p)

    def _is_deep(self, p, margin):
        return all(m._is_deep(p, margin) for m in self.members)

    def contains(self, p, tol=1e-9):
        p = as_vector(p, self.dim)
        return all(m.contains(p, tol) for m in self.members)

    def scaled(self, r):
        return Intersection(tuple(m.scaled(r) for m in self.members))


def project(body: ConvexBody, p) -> np.ndarray:
    """Nearest point of ``body`` to the exterior point ``p``.

    Points within ``BOUNDARY_BAND`` of the boundary are accepted and map to
    (numerically) themselves; deeper interior points raise PointInsideBody.
    """
    p = as_vector(p, body.dim)
    foot = body._nearest(p)
    if np.linalg.norm(p - foot) == 0.0 and body._is_deep(p, BOUNDARY_BAND):
        raise PointInsideBody("point lies in the interior of the body")
    return foot


def project_many(body: ConvexBody, points) -> np.ndarray:
    """Row-wise metric projection; no interior check."""
    P = np.asarray(points, dtype=float)
    if P.ndim != 2 or P.shape[1] != body.dim:
        raise ValueError(f"expected an (n, {body.dim}) array")
    return body._nearest_many(P)


def contains(body: ConvexBody, p, tol: float = 1e-9) -> bool:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    return body.contains(p, tol)


def direction_map(body: ConvexBody, p) -> tuple[np.ndarray, np.ndarray]:
    """Unit outward direction from the projection foot toward ``p``, and the foot."""
    p = as_vector(p, body.dim)
    foot = body._nearest(p)
    diff = p - foot
    n = np.linalg.norm(diff)
    if n == 0.0:
        raise PointInsideBody("direction map is undefined for points of the body")
    return diff / n, foot


def support_body(body: ConvexBody, u) -> float:
    return body.support(u)
