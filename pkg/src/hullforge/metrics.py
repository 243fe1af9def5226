"""
Measurement harness: Hausdorff estimates for outer polytopes, analytic
reference values, and log-log convergence-rate fits.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .covering import SphericalNet, random_unit_vectors
from .errors import DegenerateFit, Unsupported
from .geometry import ConvexBody, HPolytope, project_many, support_many

REPORT_FIELDS = (
    "d",
    "m",
    "beta",
    "eps_net",
    "delta_measured",
    "delta_bound_thm1",
    "delta_bound_thm3",
    "runtime_seconds",
)


@dataclass
class ApproxReport:
    d: int
    m: int
    beta: float
    eps_net: float
    delta_measured: float
    delta_bound_thm1: float | None
    delta_bound_thm3: float
    runtime_seconds: float

    def as_dict(self) -> dict:
        return {k: asdict(self)[k] for k in REPORT_FIELDS}

    @property
    def within_bound(self) -> bool | None:
        if self.delta_bound_thm1 is None:
            return None
        return self.delta_measured <= self.delta_bound_thm1


@dataclass
class RateFit:
    slope: float
    intercept: float
    r_squared: float
    points: list = field(default_factory=list)


@dataclass
class HausdorffEstimate:
    """Lower estimate of the Hausdorff distance between a body and an outer polytope.

    ``support_gap`` is the largest support-function gap over the direction
    net; its distance to the true value is at most ``gap_error_bound``.
    ``vertex_distance`` is the largest distance from an LP maximizer (a
    point of the polytope) to the body. Both never exceed the true value.
    """

    value: float
    support_gap: float | None
    vertex_distance: float
    gap_error_bound: float | None


def hausdorff_outer_detail(body: ConvexBody, P: HPolytope, direction_net: SphericalNet) -> HausdorffEstimate:
    if direction_net.dim != body.dim or P.dim != body.dim:
        raise ValueError("dimension mismatch")
    U = direction_net.points
    hP, X = support_many(P, U)
    try:
        hC = np.array([body.support(u) for u in U])
    except Unsupported:
        hC = None
    verts = np.unique(X, axis=0)
    dist = np.linalg.norm(verts - project_many(body, verts), axis=1)
    vertex_distance = float(dist.max())
    if hC is None:
        return HausdorffEstimate(vertex_distance, None, vertex_distance, None)
    gap = float(np.max(hP - hC))
    R_P = float(np.linalg.norm(verts, axis=1).max())
    err = (R_P + body.outer_radius) * direction_net.eps_bound
    return HausdorffEstimate(max(gap, vertex_distance), gap, vertex_distance, err)


def hausdorff_outer_estimate(body: ConvexBody, P: HPolytope, direction_net: SphericalNet) -> float:
    """Lower estimate of the Hausdorff distance for ``body`` inside ``P``.

    For nested convex sets the distance equals the largest support gap
    ``h_P(u) - h_C(u)`` over all unit ``u``; the maximum is taken over the
    direction net and, additionally, over the distances from the LP
    maximizers to the body. Both are attained by points or directions that
    exist, so the estimate never overshoots, and it is exact once the net
    reaches every vertex of ``P``. Raises Unbounded if ``P`` is open in
    some net direction.
    """
    return hausdorff_outer_detail(body, P, direction_net).value


def analytic_delta_disk_kgon(k: int) -> float:
    """Hausdorff distance between the unit disk and its circumscribed regular k-gon."""
    if k < 3:
        raise ValueError("k must be >= 3")
    return 1.0 / math.cos(math.pi / k) - 1.0


def rate_fit(points) -> RateFit:
    """Least-squares fit of log(delta) against log(m) (natural logs)."""
    pts = [(int(m), float(dl)) for m, dl in points]
    if len(pts) < 3:
        raise ValueError("need at least 3 points")
    ms = np.array([p[0] for p in pts], dtype=float)
    ds = np.array([p[1] for p in pts])
    if np.any(np.diff(ms) <= 0):
        raise ValueError("m values must be strictly increasing")
    if np.any(ds <= 0):
        raise DegenerateFit("delta must be positive for a log-log fit")
    x, y = np.log(ms), np.log(ds)
    xc, yc = x - x.mean(), y - y.mean()
    slope = float(xc @ yc / (xc @ xc))
    intercept = float(y.mean() - slope * x.mean())
    ss_tot = float(yc @ yc)
    ss_res = float(np.sum((yc - slope * xc) ** 2))
    r2 = 1.0 if ss_tot == 0.0 else 1.0 - ss_res / ss_tot
    return RateFit(slope, intercept, r2, pts)


def sample_body_points(body: ConvexBody, n: int, seed: int = 0) -> np.ndarray:
    """Seeded points of the body.

    Random exterior points are projected onto the body (boundary points);
    every other sample is then pulled toward the reference point (the
    origin, or its projection if the origin lies outside) by a random
    convex combination.
    """
    rng = np.random.default_rng(seed)
    R = body.outer_radius
    ref = body.reference_point()
    far = 3.0 * max(R, 1e-12) * random_unit_vectors(body.dim, n, rng)
    pts = project_many(body, far)
    t = rng.uniform(0.0, 1.0, size=n)
    t[::2] = 1.0
    return ref + t[:, None] * (pts - ref)
