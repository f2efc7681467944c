"""
Single-simplex geometry.

Volumes, facet normals, elevations, thickness, circumscribed and
min-containment balls for a d-simplex given as a ``(d+1, d)`` array of
vertex coordinates.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DegenerateSimplexError",
    "SimplexGeometry",
    "det_extended",
    "edge_vectors",
    "simplex_volume",
    "diameter",
    "facet_normal_and_volume",
    "elevation",
    "elevations",
    "thickness",
    "circumsphere",
    "min_containment_ball",
    "simplex_geometry",
    "is_degenerate",
]

# volume < DEGENERACY_RTOL * diam**d marks a simplex as degenerate
DEGENERACY_RTOL = 1e-12


class DegenerateSimplexError(ValueError):
    """Raised when an operation needs a simplex with nonzero volume."""


def _as_simplex(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be a 2-D array of shape (d+1, d)")
    n, d = pts.shape
    if n != d + 1:
        raise ValueError(f"a {d}-simplex needs {d + 1} vertices, got {n}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("vertex coordinates must be finite")
    return pts


def det_extended(mat) -> float:
    """Determinant by partially pivoted elimination in ``np.longdouble``."""
    a = np.array(mat, dtype=np.longdouble)
    n = a.shape[0]
    if a.shape != (n, n):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1.0
    sign = 1.0
    det = np.longdouble(1.0)
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if a[piv, k] == 0:
            return 0.0
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            sign = -sign
        det *= a[k, k]
        if k + 1 < n:
            f = a[k + 1:, k] / a[k, k]
            a[k + 1:, k:] -= np.outer(f, a[k, k:])
    return float(sign * det)


def edge_vectors(points) -> np.ndarray:
    """All ``d(d+1)/2`` edges ``p_j - p_i`` (i < j), shape ``(n_edges, d)``."""
    pts = np.asarray(points, dtype=float)
    i, j = np.triu_indices(len(pts), k=1)
    return pts[j] - pts[i]


def diameter(points) -> float:
    """Longest edge length."""
    e = edge_vectors(points)
    return float(np.sqrt((e * e).sum(axis=1).max()))


def simplex_volume(points) -> float:
    """d-volume ``|det[q_1..q_d]| / d!`` with ``q_i = p_i - p_0``."""
    pts = _as_simplex(points)
    d = pts.shape[1]
    q = (pts[1:] - pts[0]).T
    return abs(det_extended(q)) / math.factorial(d)


def is_degenerate(points) -> bool:
    pts = _as_simplex(points)
    d = pts.shape[1]
    return simplex_volume(pts) < DEGENERACY_RTOL * diameter(pts) ** d


def facet_normal_and_volume(points, r: int) -> tuple[np.ndarray, float]:
    """Outward normal of the facet opposite vertex ``r`` and the facet volume.

    The normal is the generalized cross product of the facet's edge vectors,
    so its length is ``(d-1)!`` times the (d-1)-volume of the facet.  It is
    oriented away from vertex ``r``.

    For a degenerate simplex "outward" is undefined: the zero vector is
    returned as a flag, together with the facet volume.
    """
    pts = _as_simplex(points)
    n_v, d = pts.shape
    if not 0 <= r < n_v:
        raise IndexError(f"vertex index {r} out of range")
    facet = np.delete(pts, r, axis=0)
    base = facet[0]
    q = (facet[1:] - base).T  # d x (d-1)
    normal = np.empty(d)
    for m in range(d):
        minor = np.delete(q, m, axis=0)
        normal[m] = (-1) ** m * det_extended(minor)
    area = float(np.linalg.norm(normal)) / math.factorial(d - 1)
    if is_degenerate(pts):
        return np.zeros(d), area
    if np.dot(normal, pts[r] - base) > 0:
        normal = -normal
    return normal, area


def elevation(points, s: int) -> float:
    """Distance from vertex ``s`` to the affine hull of the opposite facet.

    Uses ``d |K| / |F_s|``.
    """
    pts = _as_simplex(points)
    d = pts.shape[1]
    if is_degenerate(pts):
        raise DegenerateSimplexError("elevation of a degenerate simplex")
    _, area = facet_normal_and_volume(pts, s)
    return d * simplex_volume(pts) / area


def elevations(points) -> np.ndarray:
    pts = _as_simplex(points)
    return np.array([elevation(pts, s) for s in range(len(pts))])


def thickness(points) -> float:
    """Minimum elevation over ``d`` times the diameter; 0 for degenerate input."""
    pts = _as_simplex(points)
    d = pts.shape[1]
    if is_degenerate(pts):
        return 0.0
    return float(elevations(pts).min() / (d * diameter(pts)))


def _affine_circumball(pts: np.ndarray) -> tuple[np.ndarray, float]:
    """Smallest sphere through all ``pts`` with center in their affine hull."""
    if len(pts) == 1:
        return pts[0].copy(), 0.0
    q = pts[1:] - pts[0]
    gram = q @ q.T
    rhs = 0.5 * np.einsum("ij,ij->i", q, q)
    coef = np.linalg.solve(gram, rhs)
    center = pts[0] + coef @ q
    return center, float(np.linalg.norm(center - pts[0]))


def circumsphere(points) -> tuple[np.ndarray, float]:
    """Center and radius of the sphere through all d+1 vertices."""
    pts = _as_simplex(points)
    if is_degenerate(pts):
        raise DegenerateSimplexError("circumsphere of a degenerate simplex is unbounded")
    return _affine_circumball(pts)


def _independent(pts: np.ndarray) -> bool:
    if len(pts) <= 1:
        return True
    q = pts[1:] - pts[0]
    s = np.linalg.svd(q, compute_uv=False)
    scale = max(float(np.abs(q).max()), 1e-300)
    return bool(s[-1] > 1e-12 * scale)


def _ball_brute_force(pts: np.ndarray, tol: float) -> tuple[np.ndarray, float]:
    best = None
    n = len(pts)
    scale = float(np.ptp(pts, axis=0).max()) if n > 1 else 0.0
    for size in range(1, n + 1):
        for subset in itertools.combinations(range(n), size):
            sub = pts[list(subset)]
            if not _independent(sub):
                continue
            c, rad = _affine_circumball(sub)
            if best is not None and rad >= best[1]:
                continue
            if np.all(np.linalg.norm(pts - c, axis=1) <= rad + tol * max(scale, 1.0)):
                best = (c, rad)
    assert best is not None
    return best


def _ball_from_support(support: list[np.ndarray]) -> tuple[np.ndarray, float]:
    if not support:
        return None, -1.0
    pts = np.array(support)
    if not _independent(pts):
        # a dependent support can only occur through roundoff; fall back
        return _ball_brute_force(pts, 1e-12)
    return _affine_circumball(pts)


def _welzl(pts: np.ndarray, rng: np.random.Generator, tol: float) -> tuple[np.ndarray, float]:
    d = pts.shape[1]
    order = rng.permutation(len(pts))
    pts = pts[order]

    def inside(c, r, p):
        return c is not None and np.linalg.norm(p - c) <= r + tol

    def solve(n: int, support: list) -> tuple:
        c, r = _ball_from_support(support)
        if len(support) == d + 1:
            return c, r
        for i in range(n):
            if not inside(c, r, pts[i]):
                c, r = solve(i, support + [pts[i]])
        return c, r

    return solve(len(pts), [])


def min_containment_ball(points, tol: float = 1e-12, seed: int = 0) -> tuple[np.ndarray, float]:
    """Smallest ball enclosing a point set.

    Sets of at most d+2 points are solved by enumerating every affinely
    independent subset as a candidate support; larger sets use randomized
    incremental construction (Welzl) with a fixed seed.
    """
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    if pts.size == 0:
        raise ValueError("min_containment_ball of an empty point set")
    d = pts.shape[1]
    if len(pts) <= d + 2:
        return _ball_brute_force(pts, tol)
    scale = float(np.ptp(pts, axis=0).max())
    return _welzl(pts, np.random.default_rng(seed), tol * max(scale, 1.0))


@dataclass(frozen=True)
class SimplexGeometry:
    volume: float
    diameter: float
    elevations: np.ndarray
    thickness: float
    circumcenter: np.ndarray
    circumradius: float
    mcc_center: np.ndarray
    mcc_radius: float
    facet_volumes: np.ndarray


def simplex_geometry(points) -> SimplexGeometry:
    """All derived quantities of one nondegenerate simplex."""
    pts = _as_simplex(points)
    d = pts.shape[1]
    if is_degenerate(pts):
        raise DegenerateSimplexError("simplex has (numerically) zero volume")
    vol = simplex_volume(pts)
    areas = np.array([facet_normal_and_volume(pts, r)[1] for r in range(d + 1)])
    elev = d * vol / areas
    diam = diameter(pts)
    cc, cr = circumsphere(pts)
    mc, mr = min_containment_ball(pts)
    return SimplexGeometry(
        volume=vol,
        diameter=diam,
        elevations=elev,
        thickness=float(elev.min() / (d * diam)),
        circumcenter=cc,
        circumradius=cr,
        mcc_center=mc,
        mcc_radius=min(mr, cr),
        facet_volumes=areas,
    )
