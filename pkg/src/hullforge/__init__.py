"""Non-adaptive outer polyhedral approximation of convex bodies from projections."""

from .approx import (
    ApproxConfig,
    approximate_to_accuracy,
    build_outer_polytope,
    lemma1_bound,
    run_approximation,
    select_epsilon,
    support_baseline,
    theorem1_bound,
    theorem3_constant,
)
from .covering import (
    SphericalNet,
    covering_radius_estimate,
    delta_inscribed,
    efficiency_theta,
    equispaced_circle_net,
    net_from_polytope,
    net_read,
    net_write,
    polar_grid_net,
)
from .errors import *  # noqa: F401,F403
from .geometry import (
    Ball,
    Box,
    ConvexBody,
    Ellipsoid,
    Halfspace,
    HPolytope,
    Intersection,
    VPolytope,
    contains,
    direction_map,
    project,
    support_body,
    support_hpolytope,
)
from .metrics import (
    ApproxReport,
    RateFit,
    analytic_delta_disk_kgon,
    hausdorff_outer_estimate,
    rate_fit,
)

__version__ = "0.1.0"
