"""Halfspaces, H-polytopes and their support function."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy.spatial import cKDTree

from ..errors import Unbounded
from .bodies import as_vector
from .simplex import DUAL_TOL, PIVOT_TOL, lp_max

NORMAL_TOL = 1e-12
STALL_ROUNDS = 4
PERTURB = 1e-9
FEAS_EXACT = 1e-12


@dataclass(frozen=True, eq=False)
class Halfspace:
    """``{x : <normal, x> <= offset}`` with a unit normal."""

    normal: np.ndarray
    offset: float

    def __post_init__(self):
        n = as_vector(self.normal)
        if abs(np.linalg.norm(n) - 1.0) > NORMAL_TOL:
            raise ValueError("halfspace normal must have unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    def contains(self, x, tol: float = 1e-9) -> bool:
        return bool(self.normal @ np.asarray(x, dtype=float) <= self.offset + tol)


class HPolytope:
    """Finite intersection of halfspaces, kept in generation order."""

    def __init__(self, dim: int, halfspaces: Sequence[Halfspace] = ()):
        self.dim = int(dim)
        hs = list(halfspaces)
        for h in hs:
            if h.normal.size != self.dim:
                raise ValueError("halfspace dimension does not match polytope")
        self.halfspaces = hs
        if hs:
            self.normals = np.array([h.normal for h in hs])
            self.offsets = np.array([h.offset for h in hs])
        else:
            self.normals = np.zeros((0, self.dim))
            self.offsets = np.zeros(0)

    @classmethod
    def from_arrays(cls, normals, offsets) -> "HPolytope":
        normals = np.asarray(normals, dtype=float)
        offsets = np.asarray(offsets, dtype=float)
        return cls(normals.shape[1], [Halfspace(n, g) for n, g in zip(normals, offsets)])

    def __len__(self):
        return len(self.halfspaces)

    def contains(self, x, tol: float = 1e-9) -> bool:
        x = as_vector(x, self.dim)
        return bool(np.all(self.normals @ x <= self.offsets + tol))

    def max_violation(self, points) -> float:
        """Largest amount by which any of ``points`` violates any halfspace."""
        P = np.atleast_2d(np.asarray(points, dtype=float))
        return float(np.max(P @ self.normals.T - self.offsets))

    def scaled(self, r: float) -> "HPolytope":
        return HPolytope(self.dim, [Halfspace(h.normal, h.offset * r) for h in self.halfspaces])


def support_hpolytope(P: HPolytope, u) -> tuple[float, np.ndarray]:
    """Exact support value of ``P`` in direction ``u`` and a maximizer.

    When the maximizer is not unique the lexicographically smallest point
    of the optimal face is returned.

    Raises
    ------
    Unbounded
        ``P`` is unbounded in direction ``u`` (typically the net was too
        sparse to close the polytope).
    Infeasible
        The halfspaces have an empty intersection.
    """
    u = as_vector(u, P.dim)
    if len(P) == 0:
        raise Unbounded("polytope has no halfspaces")
    A, b = P.normals, P.offsets
    value, x, basis, lam = lp_max(A, b, u)
    if lam.min() > DUAL_TOL * max(1.0, float(np.abs(u).max())):
        return value, x
    # possible optimal face: lexicographic minimization over it
    slack = 1e-12 * max(1.0, abs(value))
    A2 = np.vstack([A, -u])
    b2 = np.concatenate([b, [-(value - slack)]])
    for k in range(P.dim):
        e = np.zeros(P.dim)
        e[k] = -1.0
        try:
            _, x, basis, _ = lp_max(A2, b2, e, basis)
        except Unbounded:
            break
        A2 = np.vstack([A2, -e])
        b2 = np.concatenate([b2, [x[k] + 1e-12 * max(1.0, abs(x[k]))]])
    return value, x


class _VertexCache:
    """Vertex bases discovered so far, stored as growing arrays."""

    def __init__(self, A, b):
        self.A, self.b = A, b
        d = A.shape[1]
        self.x = np.empty((0, d))
        self.basis = np.empty((0, d), dtype=int)
        self.minv = np.empty((0, d, d))
        self.cone = np.empty((0, d))
        self._index: dict = {}

    def __len__(self):
        return self.x.shape[0]

    def add(self, bases: np.ndarray) -> np.ndarray:
        """Insert bases (rows of row indices); return their entry numbers."""
        bases = np.atleast_2d(np.asarray(bases, dtype=int))
        keys = [tuple(sorted(r)) for r in bases.tolist()]
        out = np.empty(len(keys), dtype=int)
        fresh = []
        for pos, key in enumerate(keys):
            e = self._index.get(key)
            if e is None:
                e = len(self) + len(fresh)
                self._index[key] = e
                fresh.append(pos)
            out[pos] = e
        if fresh:
            nb = bases[fresh]
            AB = self.A[nb]
            x = np.linalg.solve(AB, self.b[nb][..., None])[..., 0]
            minv = np.linalg.inv(np.transpose(AB, (0, 2, 1)))
            cone = AB.sum(axis=1)
            cone /= np.maximum(np.linalg.norm(cone, axis=1, keepdims=True), 1e-300)
            self.x = np.vstack([self.x, x])
            self.basis = np.vstack([self.basis, nb])
            self.minv = np.concatenate([self.minv, minv])
            self.cone = np.vstack([self.cone, cone])
        return out


def _pivot_batch(cache: _VertexCache, entries: np.ndarray, leaving: np.ndarray) -> np.ndarray:
    """One simplex step for each (entry, leaving position) pair; returns new entries."""
    A, b = cache.A, cache.b
    bases = cache.basis[entries]
    # edge direction: A_B dx = -e_j, i.e. dx = -(A_B^-1)[:, j] = -minv[j, :]
    dx = -cache.minv[entries, leaving, :]
    Ad = dx @ A.T
    np.put_along_axis(Ad, bases, 0.0, axis=1)
    slack = b - cache.x[entries] @ A.T
    np.maximum(slack, 0.0, out=slack)
    tol = PIVOT_TOL * np.linalg.norm(dx, axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = np.where(Ad > tol, slack / Ad, np.inf)
    tmin = ratios.min(axis=1, keepdims=True)
    if np.any(np.isinf(tmin)):
        raise Unbounded("objective is unbounded over the polyhedron")
    # among ratio ties take the largest pivot element
    tie = ratios <= tmin + 1e-14 * np.maximum(1.0, tmin)
    entering = np.argmax(np.where(tie, Ad, -np.inf), axis=1)
    new_bases = bases.copy()
    new_bases[np.arange(len(entries)), leaving] = entering
    return cache.add(new_bases)


def support_many(P: HPolytope, directions, max_rounds: int = 200) -> tuple[np.ndarray, np.ndarray]:
    """Exact support values of ``P`` for many directions, with maximizers.

    Vertex bases found for one direction are shared with the others. Each
    round, every open direction moves to the best known basis near it (by
    normal cone) and, unless that basis is dual feasible for it, takes one
    simplex step from there; all steps of a round share one vectorized
    ratio test.

    The walk runs on offsets raised by tiny fixed pseudo-random amounts,
    which makes the polytope simple so degenerate pivots cannot stall it.
    Each final basis is then re-solved with the true offsets. Dual
    feasibility does not depend on the offsets, so wherever that vertex is
    feasible it is an exact maximizer. The remaining directions, and any
    left open after ``max_rounds`` or stuck for ``STALL_ROUNDS`` rounds,
    get a full simplex solve with anti-cycling pricing.
    """
    U = np.atleast_2d(np.asarray(directions, dtype=float))
    if U.shape[1] != P.dim:
        raise ValueError("direction dimension does not match polytope")
    if len(P) == 0:
        raise Unbounded("polytope has no halfspaces")
    A, b = P.normals, P.offsets
    n, d = U.shape
    values = np.empty(n)
    argmax = np.empty((n, d))
    bscale = max(1.0, float(np.abs(b).max()))
    jitter = np.random.default_rng(0).uniform(0.0, PERTURB * bscale, size=b.size)
    cache = _VertexCache(A, b + jitter)

    # seed vertices from a few spread-out directions, warm-chained
    warm = None
    seeds = np.unique(np.linspace(0, n - 1, min(n, 16 * d)).astype(int))
    for i in seeds:
        _, _, warm, _ = lp_max(A, cache.b, U[i], warm)
        if warm is None:
            # polyhedron without vertices; nothing to share between directions
            for j in range(n):
                values[j], argmax[j] = lp_max(A, b, U[j])[:2]
            return values, argmax
        cache.add([warm])

    open_ = np.arange(n)
    cur = np.zeros(n, dtype=int)
    best = np.full(n, -np.inf)
    stall = np.zeros(n, dtype=int)
    certified = np.zeros(n, dtype=bool)
    uscale = np.maximum(1.0, np.abs(U).max(axis=1))
    for _ in range(max_rounds):
        if open_.size == 0:
            break
        Uo = U[open_]
        k = min(8, len(cache))
        _, nbr = cKDTree(cache.cone).query(Uo, k=k)
        cand = np.column_stack([nbr.reshape(open_.size, k), cur[open_]])
        vals = np.einsum("nkd,nd->nk", cache.x[cand], Uo)
        pick = np.argmax(vals, axis=1)
        cur[open_] = cand[np.arange(open_.size), pick]
        top = vals[np.arange(open_.size), pick]
        gain = top > best[open_] + 1e-13 * uscale[open_]
        stall[open_] = np.where(gain, 0, stall[open_] + 1)
        best[open_] = top
        lam = np.einsum("nij,nj->ni", cache.minv[cur[open_]], Uo)
        done = lam.min(axis=1) >= -DUAL_TOL * uscale[open_]
        certified[open_[done]] = True
        keep = ~done & (stall[open_] < STALL_ROUNDS)
        open_, lam = open_[keep], lam[keep]
        if open_.size == 0:
            break
        # Dantzig pricing, ties to the lowest row index
        worst = lam.min(axis=1, keepdims=True)
        rows = np.where(lam <= worst + 1e-15 * uscale[open_, None], cache.basis[cur[open_]], np.iinfo(int).max)
        leaving = np.argmin(rows, axis=1)
        pairs, inverse = np.unique(np.column_stack([cur[open_], leaving]), axis=0, return_inverse=True)
        new_entries = np.concatenate([
            _pivot_batch(cache, pairs[s : s + 256, 0], pairs[s : s + 256, 1])
            for s in range(0, len(pairs), 256)
        ])
        cur[open_] = new_entries[inverse.ravel()]

    # re-solve the certifying bases with the true offsets
    entries, where = np.unique(cur[certified], return_inverse=True)
    bases = cache.basis[entries]
    X = np.linalg.solve(A[bases], b[bases][..., None])[..., 0]
    viol = np.concatenate([
        (X[s : s + 512] @ A.T - b).max(axis=1) for s in range(0, len(X), 512)
    ]) if len(X) else np.zeros(0)
    idx = np.flatnonzero(certified)
    ok = viol[where.ravel()] <= FEAS_EXACT * bscale
    argmax[idx[ok]] = X[where.ravel()[ok]]
    values[idx[ok]] = np.einsum("nd,nd->n", argmax[idx[ok]], U[idx[ok]])
    for i in np.flatnonzero(~certified).tolist() + idx[~ok].tolist():
        value, x, _, _ = lp_max(A, b, U[i], cache.basis[cur[i]].tolist())
        values[i], argmax[i] = value, x
    return values, argmax
