import math

import numpy as np
import pytest

from hullforge import (
    Ball,
    Box,
    Ellipsoid,
    Intersection,
    VPolytope,
    contains,
    direction_map,
    project,
    support_body,
)
from hullforge.errors import NonConvergence, PointInsideBody, Unsupported
from hullforge.geometry import as_vector, project_many

# frozen from tests/oracles.py (angle search / NNLS)
ELLIPSE_2_1_AT_3_2 = [1.725411259900133, 0.5057064326785442]
ELLIPSE_2_05_AT_03_M15 = [0.2662680846479597, -0.4955490204748862]
HULL12 = [
    [0.001, 0.299, -0.274], [-0.891, -0.455, -0.992], [0.06, 1.34, -0.492],
    [-0.62, 0.49, 0.357], [0.105, -0.93, -0.029], [0.695, -1.344, -0.458],
    [-1.901, -1.29, -1.842], [-0.235, -1.267, 0.271], [0.157, -0.187, -2.517],
    [-0.539, -0.049, 0.113], [-1.53, -0.478, -0.979], [-0.809, 1.061, -0.808],
]
HULL12_AT_2_1_M3 = [0.14712642976324056, -0.03156761080895196, -2.310876497634661]


def test_as_vector_rejects_bad_input():
    with pytest.raises(ValueError):
        as_vector([1.0])
    with pytest.raises(ValueError):
        as_vector([1.0, np.nan])
    with pytest.raises(ValueError):
        as_vector([1.0, 2.0], dim=3)


@pytest.mark.parametrize(
    "body, p, expected",
    [
        (Ball(np.zeros(2), 1.0), [2.0, 0.0], [1.0, 0.0]),
        (Box(-np.ones(2), np.ones(2)), [3.0, 0.5], [1.0, 0.5]),
        (Ellipsoid(np.zeros(2), np.array([2.0, 1.0])), [4.0, 0.0], [2.0, 0.0]),
        (VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])), [1.0, 1.0], [0.5, 0.5]),
    ],
)
def test_project_examples(body, p, expected):
    np.testing.assert_allclose(project(body, p), expected, atol=1e-9)


def test_project_ellipse_against_angle_search():
    e = Ellipsoid(np.zeros(2), np.array([2.0, 1.0]))
    np.testing.assert_allclose(project(e, [3.0, 2.0]), ELLIPSE_2_1_AT_3_2, atol=1e-9)
    e = Ellipsoid(np.zeros(2), np.array([2.0, 0.5]))
    np.testing.assert_allclose(project(e, [0.3, -1.5]), ELLIPSE_2_05_AT_03_M15, atol=1e-9)


def test_project_ellipsoid_off_center_and_on_axis_plane():
    e = Ellipsoid(np.array([1.0, -1.0, 0.5]), np.array([1.0, 0.5, 0.25]))
    # points on a principal axis through the center project to the axis tip
    np.testing.assert_allclose(project(e, [1.0, -1.0, 2.5]), [1.0, -1.0, 0.75], atol=1e-12)
    q = project(e, [1.0, 0.0, 0.5])
    np.testing.assert_allclose(q, [1.0, -0.5, 0.5], atol=1e-12)


def test_project_vpolytope_against_nnls():
    body = VPolytope(np.array(HULL12))
    np.testing.assert_allclose(project(body, [2.0, 1.0, -3.0]), HULL12_AT_2_1_M3, atol=1e-6)


def test_project_intersection_lens():
    lens = Intersection((Ball(np.array([0.5, 0.0]), 1.0), Ball(np.array([-0.5, 0.0]), 1.0)))
    # the lens tip lies at (0, sqrt(3)/2)
    np.testing.assert_allclose(project(lens, [0.0, 3.0]), [0.0, math.sqrt(3) / 2], atol=1e-6)
    np.testing.assert_allclose(project(lens, [2.0, 0.0]), [0.5, 0.0], atol=1e-6)


def test_project_inside_raises():
    with pytest.raises(PointInsideBody):
        project(Ball(np.zeros(2), 1.0), [0.2, 0.1])
    with pytest.raises(PointInsideBody):
        project(VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])), [0.2, 0.2])


def test_project_boundary_point_is_fixed():
    b = Box(-np.ones(3), np.ones(3))
    np.testing.assert_allclose(project(b, [1.0, 0.2, -0.3]), [1.0, 0.2, -0.3], atol=1e-12)
    ball = Ball(np.zeros(2), 1.0)
    u = np.array([0.6, 0.8])
    np.testing.assert_allclose(project(ball, u), u, atol=1e-12)


def test_project_many_matches_single():
    rng = np.random.default_rng(3)
    e = Ellipsoid(np.array([0.1, 0.0, -0.2]), np.array([0.9, 0.5, 0.3]))
    P = 2.0 * rng.normal(size=(50, 3))
    P = P[[not e.contains(p) for p in P]]
    batch = project_many(e, P)
    single = np.array([project(e, p) for p in P])
    np.testing.assert_allclose(batch, single, atol=1e-12)


@pytest.mark.parametrize(
    "p, tol, expected",
    [([0.0, 0.0], 0.0, True), ([1.001, 0.0], 1e-6, False), ([1.001, 0.0], 1e-2, True)],
)
def test_contains_examples(p, tol, expected):
    assert contains(Ball(np.zeros(2), 1.0), p, tol) is expected


def test_contains_rejects_negative_tolerance():
    with pytest.raises(ValueError):
        contains(Ball(np.zeros(2), 1.0), [0.0, 0.0], -1.0)


def test_contains_per_kind():
    tri = VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]]))
    assert contains(tri, [0.25, 0.25], 0.0)
    assert not contains(tri, [0.6, 0.6], 1e-6)
    e = Ellipsoid(np.zeros(2), np.array([2.0, 1.0]))
    assert contains(e, [1.9, 0.0])
    assert not contains(e, [0.0, 1.01])
    lens = Intersection((Ball(np.array([0.5, 0.0]), 1.0), Ball(np.array([-0.5, 0.0]), 1.0)))
    assert contains(lens, [0.0, 0.8])
    assert not contains(lens, [1.2, 0.0])


@pytest.mark.parametrize(
    "body, p, u, foot",
    [
        (Ball(np.zeros(2), 1.0), [2.0, 0.0], [1.0, 0.0], [1.0, 0.0]),
        (Ball(np.zeros(2), 1.0), [0.0, 3.0], [0.0, 1.0], [0.0, 1.0]),
        (Box(-np.ones(2), np.ones(2)), [2.0, 2.0], [math.sqrt(2) / 2] * 2, [1.0, 1.0]),
    ],
)
def test_direction_map_examples(body, p, u, foot):
    got_u, got_foot = direction_map(body, p)
    np.testing.assert_allclose(got_u, u, atol=1e-12)
    np.testing.assert_allclose(got_foot, foot, atol=1e-12)
    assert abs(np.linalg.norm(got_u) - 1.0) <= 1e-12


def test_direction_map_box_corner_grid_search():
    box = Box(-np.ones(2), np.ones(2))
    g = np.linspace(-1, 1, 401)
    X, Y = np.meshgrid(g, g)
    pts = np.column_stack([X.ravel(), Y.ravel()])
    best = pts[np.argmin(np.linalg.norm(pts - [2.0, 2.0], axis=1))]
    _, foot = direction_map(box, [2.0, 2.0])
    np.testing.assert_allclose(foot, best, atol=1e-12)


def test_direction_map_on_boundary_raises():
    with pytest.raises(PointInsideBody):
        direction_map(Ball(np.zeros(2), 1.0), [1.0, 0.0])


def test_support_body_examples():
    assert support_body(Ball(np.zeros(2), 1.0), [0.0, 1.0]) == pytest.approx(1.0, abs=1e-15)
    u = np.ones(3) / math.sqrt(3)
    box = Box(-np.ones(3), np.ones(3))
    assert support_body(box, u) == pytest.approx(max(box.vertices() @ u), abs=1e-12)
    assert support_body(box, u) == pytest.approx(math.sqrt(3), abs=1e-12)
    assert support_body(VPolytope(np.array([[0.0, 0.0], [2.0, 0.0]])), [1.0, 0.0]) == 2.0
    e = Ellipsoid(np.array([1.0, 0.0]), np.array([2.0, 1.0]))
    assert support_body(e, [0.6, 0.8]) == pytest.approx(0.6 + math.sqrt(4 * 0.36 + 0.64), abs=1e-12)


def test_support_body_intersection_unsupported():
    lens = Intersection((Ball(np.array([0.5, 0.0]), 1.0), Ball(np.array([-0.5, 0.0]), 1.0)))
    with pytest.raises(Unsupported):
        support_body(lens, [1.0, 0.0])


@pytest.mark.parametrize(
    "factory",
    [
        lambda: Ball(np.zeros(2), 0.0),
        lambda: Ellipsoid(np.zeros(2), np.array([1.0, -1.0])),
        lambda: Ellipsoid(np.zeros(2), np.array([1.0, 1.0, 1.0])),
        lambda: Box(np.ones(2), np.zeros(2)),
        lambda: VPolytope(np.zeros((0, 2))),
        lambda: Intersection((Ball(np.array([3.0, 0.0]), 1.0), Ball(np.array([-3.0, 0.0]), 1.0))),
        lambda: Intersection(()),
    ],
)
def test_invalid_bodies_rejected(factory):
    with pytest.raises(ValueError):
        factory()


def test_outer_radius_bounds_body():
    rng = np.random.default_rng(5)
    bodies = [
        Ball(np.array([0.3, -0.2]), 0.5),
        Ellipsoid(np.array([0.1, 0.1]), np.array([0.7, 0.2])),
        Box(np.array([-0.5, 0.1]), np.array([0.2, 0.6])),
        VPolytope(rng.normal(size=(7, 2))),
    ]
    for body in bodies:
        far = 10 * rng.normal(size=(500, 2))
        pts = project_many(body, far)
        assert np.linalg.norm(pts, axis=1).max() <= body.outer_radius + 1e-12


def test_scaled_bodies():
    for body in [
        Ball(np.array([0.3, 0.0]), 0.5),
        Ellipsoid(np.zeros(2), np.array([0.7, 0.2])),
        Box(np.array([-0.5, 0.1]), np.array([0.2, 0.6])),
        VPolytope(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])),
    ]:
        big = body.scaled(3.0)
        assert big.outer_radius == pytest.approx(3.0 * body.outer_radius)
        np.testing.assert_allclose(project(big, [9.0, 9.0]), 3.0 * project(body, [3.0, 3.0]), atol=1e-8)


def test_hull_projection_reports_nonconvergence(monkeypatch):
    from hullforge.geometry import bodies

    monkeypatch.setattr(bodies, "HULL_MAX_ITER", 1)
    V = np.random.default_rng(0).normal(size=(200, 3))
    with pytest.raises(NonConvergence):
        bodies._hull_nearest(V, np.array([5.0, 5.0, 5.0]))
