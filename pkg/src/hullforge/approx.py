"""
Outer polyhedral approximation from projections.

Each net direction ``w`` is pushed out to the sphere of radius
``1 + beta``, projected onto the body, and the projection foot together
with the unit direction back toward the pushed point defines a supporting
halfspace. The intersection of these halfspaces is the outer polytope.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

import numpy as np

from . import _parallel
from .covering import SphericalNet, efficiency_theta, net_read, polar_grid_net, polar_k_for_eps
from .errors import BodyNotInUnitBall, InvalidRegime, NetTooCoarse
from .geometry import ConvexBody, Halfspace, HPolytope, project_many
from .metrics import ApproxReport, hausdorff_outer_estimate

RADIUS_SLACK = 1e-9


@dataclass
class ApproxConfig:
    """Parameters of one approximation run.

    ``rescale`` lets bodies outside the unit ball be handled by scaling
    them into it by their declared outer radius.
    """

    net: SphericalNet
    beta: float = 1.0
    target_delta: float | None = None
    rescale: bool = False

    def __post_init__(self):
        if not self.beta > 0:
            raise ValueError("beta must be positive")
        if self.target_delta is not None and not self.target_delta > 0:
            raise ValueError("target_delta must be positive")

    @property
    def in_guarantee_regime(self) -> bool:
        return (1.0 + self.beta) * self.net.eps_bound < self.beta


def theorem1_bound(eps: float, beta: float) -> float:
    """Hausdorff bound for an eps-net of the sphere of radius 1 + beta."""
    if not (eps > 0 and beta > 0):
        raise ValueError("eps and beta must be positive")
    if eps >= beta:
        raise InvalidRegime(f"bound needs eps < beta (eps={eps}, beta={beta})")
    return eps * eps / math.sqrt(beta * beta - eps * eps)


def lemma1_bound(eps_net_on_S: float, beta: float) -> float:
    """Bound for an eps-net of the unit sphere scaled out by 1 + beta."""
    if not (eps_net_on_S > 0 and beta > 0):
        raise ValueError("eps and beta must be positive")
    e = (1.0 + beta) * eps_net_on_S
    if e >= beta:
        raise InvalidRegime(f"bound needs (1 + beta) eps < beta (got {e} >= {beta})")
    return e * e / math.sqrt(beta * beta - e * e)


def theorem3_constant(theta: float, d: int, beta: float = 1.0) -> float:
    """Rate constant ``(1 + beta)^2 theta^(2/(d-1)) / beta``; minimal at beta = 1."""
    if not (theta > 0 and beta > 0) or d < 2:
        raise ValueError("need theta > 0, beta > 0, d >= 2")
    return (1.0 + beta) ** 2 * theta ** (2.0 / (d - 1)) / beta


def select_epsilon(delta: float) -> float:
    """Largest eps with ``4 eps^2 / sqrt(1 - 4 eps^2) <= delta``.

    With ``t = 4 eps^2`` the equality case is ``t^2 + delta^2 t - delta^2 = 0``.
    The positive root is evaluated in a cancellation-free form, scaled by
    ``delta`` or ``1 / delta`` so that squaring cannot overflow. For huge
    ``delta`` the root rounds to 1/2; the result is kept strictly below it.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    if delta < 1.0:
        t = 2.0 * delta / (delta + math.sqrt(delta * delta + 4.0))
    else:
        r = 1.0 / delta
        t = 2.0 / (1.0 + math.sqrt(1.0 + 4.0 * r * r))
    return min(math.sqrt(t) / 2.0, math.nextafter(0.5, 0.0))


def _check_in_unit_ball(body: ConvexBody) -> None:
    if body.outer_radius > 1.0 + RADIUS_SLACK:
        raise BodyNotInUnitBall(
            f"outer radius {body.outer_radius:.6g} exceeds 1; rescale the body first"
        )


def build_outer_polytope(body: ConvexBody, net: SphericalNet, beta: float = 1.0) -> HPolytope:
    """Supporting halfspaces at the projections of ``(1 + beta) * net``.

    Halfspace ``i`` comes from net point ``i``; none are merged or pruned.
    """
    if not beta > 0:
        raise ValueError("beta must be positive")
    if net.dim != body.dim:
        raise ValueError("net and body dimensions differ")
    _check_in_unit_ball(body)
    pushed = (1.0 + beta) * net.points
    feet = _parallel.map_rows(lambda rows: project_many(body, rows), pushed)
    diff = pushed - feet
    normals = diff / np.linalg.norm(diff, axis=1, keepdims=True)
    offsets = np.einsum("nd,nd->n", normals, feet)
    return HPolytope(body.dim, [Halfspace(u, g) for u, g in zip(normals, offsets)])


def support_baseline(body: ConvexBody, net: SphericalNet) -> HPolytope:
    """Supporting halfspaces with the net points themselves as normals.

    Needs an exact support function (Unsupported otherwise).
    """
    if net.dim != body.dim:
        raise ValueError("net and body dimensions differ")
    return HPolytope(body.dim, [Halfspace(u, body.support(u)) for u in net.points])


def bounds_for(net: SphericalNet, beta: float, scale: float = 1.0) -> tuple[float | None, float]:
    """(guaranteed bound or None outside its regime, leading-order rate bound)."""
    try:
        thm1 = scale * lemma1_bound(net.eps_bound, beta)
    except InvalidRegime:
        thm1 = None
    theta, _ = efficiency_theta(net)
    thm3 = scale * theorem3_constant(theta, net.dim, beta) / net.m ** (2.0 / (net.dim - 1))
    return thm1, thm3


def default_direction_net(net: SphericalNet, factor: int = 4) -> SphericalNet:
    return polar_grid_net(net.dim, factor * net.equivalent_k())


def _resolve_net(net_source, d: int, eps: float) -> SphericalNet:
    if isinstance(net_source, SphericalNet):
        net = net_source
    elif isinstance(net_source, str) and net_source == "polar":
        return polar_grid_net(d, polar_k_for_eps(d, eps))
    elif isinstance(net_source, (str, os.PathLike)):
        net = net_read(net_source)
    else:
        raise TypeError("net_source must be 'polar', a SphericalNet or a net file path")
    if net.dim != d:
        raise ValueError("net and body dimensions differ")
    if net.eps_bound > eps:
        raise NetTooCoarse(
            f"net covering radius {net.eps_bound:.6g} exceeds the required {eps:.6g}"
        )
    return net


def approximate_to_accuracy(
    body: ConvexBody,
    delta: float,
    net_source="polar",
    *,
    rescale: bool = True,
    measure: bool = True,
    direction_net: SphericalNet | None = None,
) -> tuple[HPolytope, ApproxReport]:
    """Outer polytope within Hausdorff distance ``delta`` of ``body``.

    Uses ``beta = 1``: picks the largest admissible eps, builds (or checks)
    an eps-net of the unit sphere, and takes the halfspaces at the
    projections of the doubled net points. With ``rescale`` the body is
    first shrunk by its outer radius ``R``, the accuracy target becomes
    ``delta / R``, and the offsets are scaled back by ``R`` at the end.
    """
    if not delta > 0:
        raise ValueError("delta must be positive")
    t0 = time.perf_counter()
    beta = 1.0
    R = body.outer_radius if rescale else 1.0
    if not rescale:
        _check_in_unit_ball(body)
    work = body.scaled(1.0 / R) if R != 1.0 else body
    eps = select_epsilon(delta / R)
    net = _resolve_net(net_source, body.dim, eps)
    if (1.0 + beta) * net.eps_bound >= beta:
        raise NetTooCoarse("net violates (1 + beta) eps < beta")
    P = build_outer_polytope(work, net, beta)
    if R != 1.0:
        P = P.scaled(R)
    thm1, thm3 = bounds_for(net, beta, R)
    measured = float("nan")
    if measure:
        dnet = direction_net if direction_net is not None else default_direction_net(net)
        measured = hausdorff_outer_estimate(body, P, dnet)
    report = ApproxReport(
        d=body.dim,
        m=net.m,
        beta=beta,
        eps_net=net.eps_bound,
        delta_measured=measured,
        delta_bound_thm1=thm1,
        delta_bound_thm3=thm3,
        runtime_seconds=time.perf_counter() - t0,
    )
    return P, report


def run_approximation(
    body: ConvexBody,
    net: SphericalNet,
    beta: float = 1.0,
    *,
    rescale: bool = False,
    measure: bool = True,
    direction_net: SphericalNet | None = None,
) -> tuple[HPolytope, ApproxReport]:
    """Build the outer polytope for a given net and report bounds and error."""
    t0 = time.perf_counter()
    cfg = ApproxConfig(net=net, beta=beta, rescale=rescale)
    R = body.outer_radius if cfg.rescale else 1.0
    work = body.scaled(1.0 / R) if R != 1.0 else body
    P = build_outer_polytope(work, net, beta)
    if R != 1.0:
        P = P.scaled(R)
    thm1, thm3 = bounds_for(net, beta, R)
    measured = float("nan")
    if measure:
        dnet = direction_net if direction_net is not None else default_direction_net(net)
        measured = hausdorff_outer_estimate(body, P, dnet)
    report = ApproxReport(
        d=body.dim,
        m=net.m,
        beta=beta,
        eps_net=net.eps_bound,
        delta_measured=measured,
        delta_bound_thm1=thm1,
        delta_bound_thm3=thm3,
        runtime_seconds=time.perf_counter() - t0,
    )
    return P, report
