"""Vector algebra, convex bodies with projection oracles, and H-polytopes."""

from .bodies import (
    BOUNDARY_BAND,
    Ball,
    Box,
    ConvexBody,
    Ellipsoid,
    Intersection,
    VPolytope,
    as_vector,
    contains,
    direction_map,
    project,
    project_many,
    support_body,
)
from .polytope import Halfspace, HPolytope, support_hpolytope, support_many
from .simplex import lp_max

__all__ = [
    "BOUNDARY_BAND",
    "Ball",
    "Box",
    "ConvexBody",
    "Ellipsoid",
    "HPolytope",
    "Halfspace",
    "Intersection",
    "VPolytope",
    "as_vector",
    "contains",
    "direction_map",
    "lp_max",
    "project",
    "project_many",
    "support_body",
    "support_hpolytope",
    "support_many",
]
