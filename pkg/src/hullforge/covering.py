"""
Epsilon-nets on the unit hypersphere.

Builders for polar-coordinate grid nets and for nets given by the vertex
set of an inscribed polytope, a probe-based covering-radius estimator,
the covering-efficiency constants, and a plain-text net file format::

    d m eps
    x_11 ... x_1d
    ...
    x_m1 ... x_md
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass

import numpy as np
from scipy.spatial import cKDTree

from .errors import DegenerateHull, FormatError

UNIT_TOL = 1e-12
FILE_UNIT_TOL = 1e-6
DEDUP_DECIMALS = 12


@dataclass(frozen=True, eq=False)
class SphericalNet:
    """Finite set of unit directions with a guaranteed covering radius.

    Attributes
    ----------
    dim : int
    points : (m, dim) array of unit vectors
    eps_bound : float
        Every unit vector lies within this Euclidean distance of some point.
    provenance : str
        ``"polar_grid"``, ``"from_polytope"`` or ``"file"``.
    k : int or None
        Grid resolution for polar nets.
    path : str or None
        Source file for nets read from disk.
    """

    dim: int
    points: np.ndarray
    eps_bound: float
    provenance: str
    k: int | None = None
    path: str | None = None

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[1] != self.dim or pts.shape[0] < 1:
            raise ValueError(f"net points must be an (m, {self.dim}) array with m >= 1")
        if self.dim < 2:
            raise ValueError("net dimension must be >= 2")
        if np.max(np.abs(np.linalg.norm(pts, axis=1) - 1.0)) > UNIT_TOL:
            raise ValueError("net points must have unit norm")
        if not self.eps_bound > 0:
            raise ValueError("eps_bound must be positive")
        if pts.shape[0] > 1:
            dist, _ = cKDTree(pts).query(pts, k=2)
            if dist[:, 1].min() <= UNIT_TOL:
                raise ValueError("net points must be pairwise distinct")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "eps_bound", float(self.eps_bound))

    @property
    def m(self) -> int:
        return self.points.shape[0]

    def equivalent_k(self) -> int:
        """Polar grid resolution whose designed bound does not exceed eps_bound."""
        if self.k is not None:
            return self.k
        return polar_k_for_eps(self.dim, self.eps_bound)


def polar_eps(d: int, k: int) -> float:
    return math.pi / (2 * k) * math.sqrt(d - 1)


def polar_k_for_eps(d: int, eps: float) -> int:
    """Smallest k >= 2 with polar_eps(d, k) <= eps."""
    k = max(2, math.ceil(math.pi * math.sqrt(d - 1) / (2 * eps)))
    while polar_eps(d, k) > eps:
        k += 1
    return k


def theta_polar(d: int) -> float:
    """Covering constant 2 [pi^2 (d-1) / 4]^((d-1)/2) of polar grid nets."""
    return 2.0 * (math.pi**2 * (d - 1) / 4.0) ** ((d - 1) / 2.0)


def _polar_points(d: int, k: int, first_angle: np.ndarray | None = None) -> np.ndarray:
    """Raw (non-deduplicated) grid images, lexicographic in grid indices."""
    polar = np.arange(k + 1) * (math.pi / k)
    azimuth = np.arange(2 * k) * (math.pi / k)
    axes = [polar] * (d - 2) + [azimuth]
    if first_angle is not None:
        axes[0] = first_angle
    grids = np.meshgrid(*axes, indexing="ij")
    angles = [g.ravel() for g in grids]
    n = angles[0].size
    out = np.empty((n, d))
    sin_prod = np.ones(n)
    for i, a in enumerate(angles[:-1]):
        out[:, i] = sin_prod * np.cos(a)
        sin_prod = sin_prod * np.sin(a)
    out[:, d - 2] = sin_prod * np.cos(angles[-1])
    out[:, d - 1] = sin_prod * np.sin(angles[-1])
    return out


def polar_grid_net(d: int, k: int) -> SphericalNet:
    """Uniform grid in spherical coordinates.

    The ``d - 2`` polar angles take the values ``j pi / k`` for
    ``j = 0..k`` and the azimuth ``j pi / k`` for ``j = 0..2k-1``, so every
    angle step is ``pi / k``. Images that coincide (at the poles) are kept
    once, at their first occurrence.

    The map from angles to the sphere is 1-Lipschitz, so half the diagonal
    of a grid cell, ``(pi / 2k) sqrt(d - 1)``, bounds the chordal covering
    radius.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    if k < 2:
        raise ValueError("k must be >= 2")
    raw = _polar_points(d, k)
    keys = np.round(raw, DEDUP_DECIMALS) + 0.0  # +0.0 folds -0.0 into 0.0
    _, first = np.unique(keys, axis=0, return_index=True)
    pts = raw[np.sort(first)]
    return SphericalNet(d, pts, polar_eps(d, k), "polar_grid", k=k)


def equispaced_circle_net(m: int, phase: float = 0.0) -> SphericalNet:
    """``m`` equally spaced directions on the unit circle."""
    if m < 2:
        raise ValueError("m must be >= 2")
    ang = phase + 2.0 * math.pi * np.arange(m) / m
    pts = np.column_stack([np.cos(ang), np.sin(ang)])
    return SphericalNet(2, pts, 2.0 * math.sin(math.pi / (2 * m)), "equispaced", k=None)


def random_unit_vectors(d: int, n: int, rng: np.random.Generator) -> np.ndarray:
    g = rng.standard_normal((n, d))
    return g / np.linalg.norm(g, axis=1, keepdims=True)


def covering_radius_estimate(net: SphericalNet, probe_count: int | None = None, seed: int = 0) -> float:
    """Lower estimate of the covering radius of ``net``.

    Probes are a polar grid at four times the net's resolution plus
    ``probe_count`` seeded random unit vectors (default ``10 m``). The
    result is the largest probe-to-net distance, never more than the true
    covering radius.
    """
    if probe_count is None:
        probe_count = 10 * net.m
    if probe_count < 1:
        raise ValueError("probe_count must be >= 1")
    tree = cKDTree(net.points)
    best = 0.0
    d = net.dim
    kp = 4 * net.equivalent_k()
    if d == 2:
        chunks = [_polar_points(2, kp)]
    else:
        first = np.arange(kp + 1) * (math.pi / kp)
        chunks = (_polar_points(d, kp, first[i : i + 1]) for i in range(kp + 1))
    for probes in chunks:
        dist, _ = tree.query(probes)
        best = max(best, float(dist.max()))
    rng = np.random.default_rng(seed)
    remaining = probe_count
    while remaining > 0:
        n = min(remaining, 200_000)
        dist, _ = tree.query(random_unit_vectors(d, n, rng))
        best = max(best, float(dist.max()))
        remaining -= n
    return best


def _check_vertices(vertices) -> np.ndarray:
    V = np.asarray(vertices, dtype=float)
    if V.ndim != 2 or V.shape[1] < 2:
        raise ValueError("vertices must be an (n, d) array with d >= 2")
    d = V.shape[1]
    if np.max(np.abs(np.linalg.norm(V, axis=1) - 1.0)) > UNIT_TOL:
        raise ValueError("vertices must lie on the unit sphere")
    if V.shape[0] < d + 1:
        raise DegenerateHull(f"need at least {d + 1} vertices in dimension {d}")
    return V


def hull_facet_offsets(vertices, tol: float = 1e-10) -> np.ndarray:
    """Offsets of the facet hyperplanes of conv(vertices), by brute force.

    Every d-subset of vertices spanning a hyperplane that leaves all
    vertices on one side yields a facet plane ``{x : <n, x> = g}`` with the
    hull in ``<n, x> <= g``. Intended for small inputs only.
    """
    V = np.asarray(vertices, dtype=float)
    n, d = V.shape
    offsets = []
    combos = itertools.combinations(range(n), d)
    while True:
        batch = np.array(list(itertools.islice(combos, 50_000)), dtype=int)
        if batch.size == 0:
            break
        base = V[batch[:, 0]]
        edges = V[batch[:, 1:]] - base[:, None, :]
        _, s, vt = np.linalg.svd(edges)
        # keep affinely independent subsets only
        full = s[:, -1] > 1e-9
        normal = vt[full, -1, :]
        g = np.einsum("nd,nd->n", normal, base[full])
        side = V @ normal.T - g  # (n_vertices, n_planes)
        below = np.all(side <= tol, axis=0)
        above = np.all(side >= -tol, axis=0)
        flat = below & above
        if flat.any():
            raise DegenerateHull("vertices lie in a hyperplane")
        offsets.append(np.where(below, g, -g)[below | above])
    if not offsets or sum(o.size for o in offsets) == 0:
        raise DegenerateHull("no facets found")
    return np.concatenate(offsets)


def delta_inscribed(vertices) -> float:
    """Hausdorff distance between the unit ball and an inscribed polytope.

    Equals one minus the smallest distance from the origin to a facet
    hyperplane. Raises DegenerateHull unless the origin is interior.
    """
    V = _check_vertices(vertices)
    g = hull_facet_offsets(V)
    if g.min() <= 1e-10:
        raise DegenerateHull("origin is not interior to the hull")
    return float(1.0 - g.min())


def net_from_polytope(vertices) -> SphericalNet:
    """Net given by the vertices of a polytope inscribed in the unit ball.

    The vertex set covers the sphere with radius ``sqrt(2 delta)``, where
    ``delta`` is the Hausdorff distance from the polytope to the ball.
    """
    V = _check_vertices(vertices)
    delta = delta_inscribed(V)
    return SphericalNet(V.shape[1], V, math.sqrt(2.0 * delta), "from_polytope")


G1 = 1.0
G2 = 2.0 * math.pi / math.sqrt(27.0)
_MIN_COVERING_DENSITY = {1: G1, 2: G2}


def unit_ball_volume(d: int) -> float:
    return math.pi ** (d / 2.0) / math.gamma(d / 2.0 + 1.0)


def optimal_covering_constant(d: int) -> float | None:
    """Constant G in m(eps) ~ G / eps^(d-1) for optimal nets of the (d-1)-sphere.

    Only available where the minimal covering density of E^(d-1) is
    known exactly (d - 1 in {1, 2}).
    """
    dens = _MIN_COVERING_DENSITY.get(d - 1)
    if dens is None:
        return None
    return dens * d * unit_ball_volume(d) / unit_ball_volume(d - 1)


def efficiency_theta(net: SphericalNet) -> tuple[float, float | None]:
    """Covering constant ``m eps^(d-1)`` of the net and its asymptotic efficiency."""
    d = net.dim
    theta = net.m * net.eps_bound ** (d - 1)
    G = optimal_covering_constant(d)
    eta = None if G is None else (G / theta) ** (1.0 / (d - 1))
    return theta, eta


def net_write(net: SphericalNet, path) -> None:
    lines = [f"{net.dim} {net.m} {net.eps_bound!r}"]
    lines.extend(" ".join(f"{c:.17g}" for c in row) for row in net.points)
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines) + "\n")


def net_read(path) -> SphericalNet:
    """Read a net file. Points are re-normalized after the norm check."""
    with open(path, encoding="utf-8") as fh:
        rows = [ln.split() for ln in fh if ln.strip()]
    if not rows:
        raise FormatError(f"{path}: empty net file")
    header = rows[0]
    try:
        if len(header) != 3:
            raise ValueError
        d, m, eps = int(header[0]), int(header[1]), float(header[2])
    except ValueError:
        raise FormatError(f"{path}: header must be 'd m eps'") from None
    if d < 2 or m < 1 or not eps > 0:
        raise FormatError(f"{path}: invalid header values d={d} m={m} eps={eps}")
    body = rows[1:]
    if len(body) != m:
        raise FormatError(f"{path}: header announces {m} points, found {len(body)}")
    try:
        pts = np.array([[float(c) for c in r] for r in body])
    except ValueError:
        raise FormatError(f"{path}: non-numeric coordinate") from None
    if pts.shape != (m, d):
        raise FormatError(f"{path}: every point line must have {d} coordinates")
    norms = np.linalg.norm(pts, axis=1)
    bad = np.nonzero(np.abs(norms - 1.0) > FILE_UNIT_TOL)[0]
    if bad.size:
        raise FormatError(f"{path}: point {bad[0] + 1} has norm {norms[bad[0]]:.6g}")
    pts = pts / norms[:, None]
    try:
        return SphericalNet(d, pts, eps, "file", path=os.fspath(path))
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
