import math

import numpy as np
import pytest

from hullforge import (
    Ball,
    Box,
    HPolytope,
    Intersection,
    analytic_delta_disk_kgon,
    build_outer_polytope,
    equispaced_circle_net,
    hausdorff_outer_estimate,
    polar_grid_net,
    rate_fit,
)
from hullforge.errors import DegenerateFit
from hullforge.metrics import REPORT_FIELDS, ApproxReport, hausdorff_outer_detail, sample_body_points

from oracles import regular_polygon_hausdorff

KGON_SLOPE_8_128 = -2.0212499432967084


def test_analytic_kgon_examples():
    assert analytic_delta_disk_kgon(4) == pytest.approx(math.sqrt(2) - 1, abs=1e-15)
    assert analytic_delta_disk_kgon(8) == pytest.approx(0.0823922, abs=1e-7)
    for k in (3, 8, 64):
        assert analytic_delta_disk_kgon(k) == pytest.approx(regular_polygon_hausdorff(k), rel=1e-15)
    k = 10**4
    assert analytic_delta_disk_kgon(k) == pytest.approx(math.pi**2 / (2 * k * k), rel=1e-6)
    with pytest.raises(ValueError):
        analytic_delta_disk_kgon(2)


def test_octagon_estimate_dense_net():
    disk = Ball(np.zeros(2), 1.0)
    P = build_outer_polytope(disk, equispaced_circle_net(8), 1.0)
    est = hausdorff_outer_estimate(disk, P, equispaced_circle_net(1000, phase=0.001))
    assert est == pytest.approx(0.0823922, abs=1e-6)


def test_identical_box_gives_zero():
    box = Box(-np.ones(2), np.ones(2))
    P = HPolytope.from_arrays(np.vstack([np.eye(2), -np.eye(2)]), np.ones(4))
    assert hausdorff_outer_estimate(box, P, polar_grid_net(2, 16)) == pytest.approx(0.0, abs=1e-12)


def test_coarse_estimate_is_lower_bound():
    disk = Ball(np.zeros(2), 1.0)
    P = build_outer_polytope(disk, equispaced_circle_net(8), 1.0)
    # four directions that avoid the octagon vertices
    coarse = equispaced_circle_net(4, phase=0.1)
    detail = hausdorff_outer_detail(disk, P, coarse)
    assert detail.support_gap <= analytic_delta_disk_kgon(8)
    assert detail.value <= analytic_delta_disk_kgon(8) + 1e-15
    assert analytic_delta_disk_kgon(8) - detail.support_gap <= detail.gap_error_bound


def test_estimate_monotone_under_refinement():
    disk = Ball(np.zeros(2), 1.0)
    P = build_outer_polytope(disk, equispaced_circle_net(7), 1.0)
    prev = 0.0
    for k in (3, 6, 12, 24, 48):
        # nested nets: polar(2, 2k) contains polar(2, k)
        gap = hausdorff_outer_detail(disk, P, polar_grid_net(2, k)).support_gap
        assert gap >= prev - 1e-15
        prev = gap


def test_estimator_converges_on_kgons():
    disk = Ball(np.zeros(2), 1.0)
    for k in (5, 9, 16):
        P = build_outer_polytope(disk, equispaced_circle_net(k), 1.0)
        dnet = equispaced_circle_net(50 * k, phase=0.0123)
        detail = hausdorff_outer_detail(disk, P, dnet)
        exact = analytic_delta_disk_kgon(k)
        assert exact - detail.support_gap <= detail.gap_error_bound
        assert detail.gap_error_bound <= (1 / math.cos(math.pi / k) + 1) * dnet.eps_bound + 1e-15


def test_estimate_without_support_oracle_uses_vertices():
    lens = Intersection((Ball(np.array([0.3, 0.0]), 0.7), Ball(np.array([-0.3, 0.0]), 0.7)))
    P = build_outer_polytope(lens, polar_grid_net(2, 8), 1.0)
    detail = hausdorff_outer_detail(lens, P, polar_grid_net(2, 32))
    assert detail.support_gap is None and detail.gap_error_bound is None
    assert detail.value == detail.vertex_distance > 0


def test_rate_fit_examples():
    pts = [(k, analytic_delta_disk_kgon(k)) for k in (8, 16, 32, 64, 128)]
    # numpy.polyfit on the same logs; the k = 8 point still carries the k^-4 term
    assert rate_fit(pts).slope == pytest.approx(KGON_SLOPE_8_128, abs=1e-12)
    assert rate_fit(pts[1:]).slope == pytest.approx(-2.0, abs=0.01)
    fit = rate_fit([(m, 1.0 / m) for m in (10, 100, 1000)])
    assert fit.slope == pytest.approx(-1.0, abs=1e-12)
    assert fit.r_squared == pytest.approx(1.0)
    fit = rate_fit([(m, 0.3) for m in (10, 20, 40)])
    assert fit.slope == pytest.approx(0.0, abs=1e-15)
    assert fit.r_squared == 1.0


def test_rate_fit_errors():
    with pytest.raises(ValueError):
        rate_fit([(10, 0.1), (20, 0.05)])
    with pytest.raises(ValueError):
        rate_fit([(10, 0.1), (10, 0.05), (20, 0.01)])
    with pytest.raises(DegenerateFit):
        rate_fit([(10, 0.1), (20, 0.0), (40, 0.01)])


def test_report_fields():
    rep = ApproxReport(2, 8, 1.0, 0.3, 0.05, None, 0.4, 0.01)
    assert tuple(rep.as_dict()) == REPORT_FIELDS
    assert rep.within_bound is None


def test_sample_body_points_inside_and_deterministic():
    body = Box(np.array([-0.3, 0.1]), np.array([0.5, 0.7]))
    a = sample_body_points(body, 200, seed=4)
    assert np.array_equal(a, sample_body_points(body, 200, seed=4))
    assert all(body.contains(p) for p in a)
    # half the samples sit on the boundary
    on_edge = np.isclose(a, body.lo).any(axis=1) | np.isclose(a, body.hi).any(axis=1)
    assert on_edge.sum() >= 100
