import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.spatial import ConvexHull

from conftest import SQUARE
from meshcert.delaunay import DelaunayError, delaunay_simplices
from meshcert.mesh import delaunay, validate_mesh


def empty_circumball_violations(mesh, rtol=1e-10):
    """Brute-force O(N |T|) oracle: points strictly inside a circumball."""
    bad = []
    c, r = mesh.circumcenters, mesh.circumradii
    for t in range(mesh.n_simplices):
        dist = np.linalg.norm(mesh.points - c[t], axis=1)
        dist[mesh.simplices[t]] = np.inf
        if np.any(dist < r[t] * (1 - rtol)):
            bad.append(t)
    return bad


def test_square_two_triangles_deterministic():
    m = delaunay(SQUARE)
    assert m.n_simplices == 2
    assert not empty_circumball_violations(m)
    again = delaunay(SQUARE)
    assert np.array_equal(m.simplices, again.simplices)


def test_square_tie_break_independent_of_coordinates_order():
    # same geometric input, same ids -> same diagonal, however often it is run
    diags = {tuple(sorted(set(delaunay(SQUARE).simplices[0]) & set(delaunay(SQUARE).simplices[1])))
             for _ in range(3)}
    assert len(diags) == 1


def test_square_plus_center_fans():
    pts = np.vstack([SQUARE, [[0.5, 0.5]]])
    m = delaunay(pts)
    assert m.n_simplices == 4
    assert all(4 in s for s in m.simplices)
    assert not empty_circumball_violations(m)


@pytest.mark.parametrize("seed", range(5))
def test_random_3d_50_points(seed):
    rng = np.random.default_rng(seed)
    pts = rng.random((50, 3))
    m = delaunay(pts)
    assert not empty_circumball_violations(m)
    assert m.volumes.sum() == pytest.approx(ConvexHull(pts).volume, rel=1e-10)
    assert validate_mesh(m).passed


@pytest.mark.parametrize("d, n", [(1, 12), (2, 80), (4, 40), (5, 20)])
def test_random_various_dimensions(d, n):
    rng = np.random.default_rng(d)
    pts = rng.random((n, d))
    m = delaunay(pts)
    assert not empty_circumball_violations(m)
    hull = ConvexHull(pts).volume if d > 1 else np.ptp(pts)
    assert m.volumes.sum() == pytest.approx(hull, rel=1e-9)


def test_integer_grid_cospherical_3d():
    g = np.array(np.meshgrid(*[np.arange(3.0)] * 3, indexing="ij")).reshape(3, -1).T
    m = delaunay(g)
    assert m.volumes.sum() == pytest.approx(8.0, rel=1e-12)
    assert not empty_circumball_violations(m)
    assert validate_mesh(m).passed


def test_insertion_order_does_not_change_geometry_of_ties():
    # a cocircular hexagon plus centre: every triangulation of the ring is Delaunay,
    # the perturbation must still produce a valid covering mesh
    ang = np.arange(6) * np.pi / 3
    pts = np.vstack([np.column_stack([np.cos(ang), np.sin(ang)]), [[0, 0]]])
    m = delaunay(pts)
    assert m.volumes.sum() == pytest.approx(ConvexHull(pts).volume, rel=1e-12)
    assert validate_mesh(m).passed


def test_errors():
    with pytest.raises(DelaunayError):
        delaunay_simplices([[0, 0], [1, 1], [2, 2], [3, 3]])
    with pytest.raises(DelaunayError):
        delaunay_simplices([[0, 0], [1, 0], [0, 1], [1, 0]])
    with pytest.raises(DelaunayError):
        delaunay_simplices([[0, 0], [1, 0]])
    with pytest.raises(ValueError):
        delaunay_simplices([[0, 0], [1, np.nan], [0, 1]])


@settings(max_examples=25, deadline=None)
@given(st.integers(2, 3), st.integers(5, 40), st.integers(0, 2**31))
def test_property_empty_circumballs(d, n, seed):
    rng = np.random.default_rng(seed)
    # coordinates on a coarse grid provoke many exact ties
    pts = np.unique(rng.integers(0, 6, size=(n, d)).astype(float), axis=0)
    if len(pts) < d + 1 or np.linalg.matrix_rank(pts[1:] - pts[0]) < d:
        return
    m = delaunay(pts)
    assert not empty_circumball_violations(m)
    assert validate_mesh(m).passed
