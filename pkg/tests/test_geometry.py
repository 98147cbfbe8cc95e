import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from sphquad.errors import InvalidParameterError, ResourceLimitError
from sphquad.geometry import (PointSet, SphericalCap, dyadic_triangulation, geodesic_dist,
                              in_triangle, locate, mesh_norm, random_points,
                              spawn_seeds, spherical_triangle_area,
                              triangulated_measure)


def test_pointset_validation():
    with pytest.raises(InvalidParameterError):
        PointSet(np.array([[1.0, 0, 0]]), np.array([0.5]))
    with pytest.raises(InvalidParameterError):
        PointSet(np.array([[2.0, 0, 0]]), np.array([1.0]))
    with pytest.raises(InvalidParameterError):
        PointSet(np.array([[1.0, 0, 0], [0, 1.0, 0]]), np.array([1.5, -0.5]))
    with pytest.raises(InvalidParameterError):
        PointSet(np.eye(3)[:1], np.ones(1), kind="bogus")
    C = PointSet.uniform(np.eye(3))
    assert len(C) == 3 and C.dim == 2
    np.testing.assert_allclose(C.measure, 1 / 3)


def test_random_points_deterministic_and_unit():
    a = random_points(3, 500)
    b = random_points(3, 500)
    np.testing.assert_array_equal(a.points, b.points)
    assert not np.array_equal(a.points, random_points(4, 500).points)
    np.testing.assert_allclose(np.linalg.norm(a.points, axis=1), 1.0, atol=1e-15)
    assert a.kind == "monte-carlo"
    assert random_points(1, 10, q=3).dim == 3
    with pytest.raises(InvalidParameterError):
        random_points(0, 0)


def test_random_points_are_uniform():
    # the mean of a uniform sample is near 0 and second moments are 1/3
    p = random_points(11, 200000).points
    np.testing.assert_allclose(p.mean(axis=0), 0.0, atol=0.01)
    np.testing.assert_allclose(p.T @ p / len(p), np.eye(3) / 3, atol=0.01)


def test_spawn_seeds():
    assert spawn_seeds(5, 4) == spawn_seeds(5, 4)
    assert len(set(spawn_seeds(5, 30))) == 30


def test_geodesic_dist():
    assert geodesic_dist([1, 0, 0], [0, 1, 0]) == pytest.approx(np.pi / 2)
    assert geodesic_dist([1, 0, 0], [-1, 0, 0]) == pytest.approx(np.pi)
    assert geodesic_dist([0, 0, 1], [0, 0, 1]) == 0.0


def test_triangle_area_octant():
    tri = np.eye(3)[None]
    assert spherical_triangle_area(tri)[0] == pytest.approx(np.pi / 2, rel=1e-14)


@pytest.mark.parametrize("level", [0, 1, 3, 5])
def test_dyadic_triangulation(level):
    tr = dyadic_triangulation(level)
    assert len(tr) == 8 * 4 ** level
    assert tr.raw_areas.sum() == pytest.approx(4 * np.pi, rel=1e-13)
    assert tr.areas.sum() == pytest.approx(1.0, abs=1e-13)
    np.testing.assert_allclose(np.linalg.norm(tr.centers, axis=1), 1.0, atol=1e-15)
    np.testing.assert_array_equal(locate(tr.centers, level), np.arange(len(tr)))
    C = tr.point_set()
    assert C.kind == "triangulated"


def test_dyadic_children_partition_parent():
    t0, t1 = dyadic_triangulation(2), dyadic_triangulation(3)
    np.testing.assert_allclose(t1.raw_areas.reshape(-1, 4).sum(axis=1), t0.raw_areas, rtol=1e-12)
    # children of triangle t are 4t .. 4t+3
    np.testing.assert_array_equal(locate(t1.centers, 2), np.repeat(np.arange(len(t0)), 4))


def test_dyadic_level_cap():
    with pytest.raises(ResourceLimitError):
        dyadic_triangulation(10)


def test_locate_random_points_lie_in_their_triangle(rng):
    p = rng.standard_normal((3000, 3))
    p /= np.linalg.norm(p, axis=1, keepdims=True)
    tr = dyadic_triangulation(4)
    idx = locate(p, 4)
    assert np.all(in_triangle(tr.triangles[idx], p, tol=1e-12))


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=3, max_size=3).filter(
    lambda v: 1e-3 < np.linalg.norm(v)), st.integers(0, 6))
def test_locate_property(v, level):
    p = np.asarray(v, dtype=float)[None]
    p /= np.linalg.norm(p)
    idx = locate(p, level)
    tr = dyadic_triangulation(level)
    assert in_triangle(tr.triangles[idx], p, tol=1e-12)[0]


def test_triangulated_measure(rng):
    C = random_points(8, 20000)
    sel = triangulated_measure(C.points)
    n_tri = 8 * 4 ** sel.level
    assert len(sel.point_set) == n_tri
    assert len(sel.kept) + len(sel.discarded) == len(C)
    assert sel.point_set.measure.sum() == pytest.approx(1.0, abs=1e-12)
    # level L+1 would leave a triangle empty
    assert np.unique(locate(C.points, sel.level + 1)).size < 8 * 4 ** (sel.level + 1)
    # kept points are the nearest to their triangle centers
    tr = dyadic_triangulation(sel.level)
    idx = locate(C.points, sel.level)
    d = geodesic_dist(C.points, tr.centers[idx])
    for t in rng.choice(n_tri, 20, replace=False):
        members = np.flatnonzero(idx == t)
        assert members[np.argmin(d[members])] in sel.kept


def test_triangulated_measure_needs_all_octants():
    with pytest.raises(InvalidParameterError):
        triangulated_measure(np.array([[1.0, 0, 0]] * 20))


def test_cap_sampling(rng):
    cap = SphericalCap([-1, 0, -1], 0.451)
    pts = cap.sample(2000, rng)
    assert np.all(cap.contains(pts))
    np.testing.assert_allclose(np.linalg.norm(pts, axis=1), 1.0, atol=1e-15)
    # area-uniform: the cosine of the distance to the center is uniform
    t = np.cos(geodesic_dist(pts, cap.center))
    assert abs(t.mean() - (1 + np.cos(0.451)) / 2) < 0.003
    with pytest.raises(InvalidParameterError):
        SphericalCap([0, 0, 1], 0.0)


def test_mesh_norm():
    bound, probe, radius = mesh_norm(np.array([[0, 0, 1.0], [0, 0, -1.0]]), resolution=5)
    assert probe == pytest.approx(np.pi / 2, abs=2 * radius)
    assert bound >= np.pi / 2
    coarse = mesh_norm(dyadic_triangulation(3).point_set())[0]
    fine = mesh_norm(dyadic_triangulation(4).point_set())[0]
    assert 0.4 < fine / coarse < 0.65
