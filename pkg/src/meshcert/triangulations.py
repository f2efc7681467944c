"""
Exhaustive enumeration of the triangulations of a small planar point set.

A triangulation of points in general position is a maximal set of pairwise
non-crossing segments; all of them have ``3n - 3 - h`` edges (``h`` hull
vertices), so a depth-first search over edges with a size target finds
every one.  Practical up to about ten points.
"""
from __future__ import annotations

import itertools

import numpy as np
from scipy.spatial import ConvexHull

from .predicates import orient

__all__ = ["planar_triangulations", "segments_cross"]

MAX_POINTS = 10


def segments_cross(p: np.ndarray, a: int, b: int, c: int, d: int) -> bool:
    """True if open segments ``ab`` and ``cd`` cross (shared endpoints never cross)."""
    if len({a, b, c, d}) < 4:
        return False
    o1 = orient(p[[a, b, c]])
    o2 = orient(p[[a, b, d]])
    o3 = orient(p[[c, d, a]])
    o4 = orient(p[[c, d, b]])
    return o1 * o2 < 0 and o3 * o4 < 0


def _empty_triangle(p: np.ndarray, tri) -> bool:
    a, b, c = tri
    o = orient(p[[a, b, c]])
    if o == 0:
        return False
    for q in range(len(p)):
        if q in tri:
            continue
        s = (orient(p[[a, b, q]]), orient(p[[b, c, q]]), orient(p[[c, a, q]]))
        if all(x == o for x in s):
            return False
    return True


def planar_triangulations(points) -> list[np.ndarray]:
    """Every triangulation of a planar point set in general position.

    Returns a list of ``(T, 3)`` positively oriented triangle arrays.
    """
    p = np.asarray(points, dtype=float)
    n = len(p)
    if p.ndim != 2 or p.shape[1] != 2:
        raise ValueError("points must be an (N, 2) array")
    if not 3 <= n <= MAX_POINTS:
        raise ValueError(f"enumeration supports 3..{MAX_POINTS} points, got {n}")
    for tri in itertools.combinations(range(n), 3):
        if orient(p[list(tri)]) == 0:
            raise ValueError("points must be in general position (no three collinear)")
    h = len(ConvexHull(p).vertices)
    target = 3 * n - 3 - h
    edges = list(itertools.combinations(range(n), 2))
    m = len(edges)
    crosses = [[segments_cross(p, *edges[i], *edges[j]) for j in range(m)] for i in range(m)]
    found: list[list[int]] = []

    def dfs(i: int, chosen: list[int]) -> None:
        if len(chosen) == target:
            found.append(list(chosen))
            return
        if len(chosen) + (m - i) < target:
            return
        if not any(crosses[i][j] for j in chosen):
            chosen.append(i)
            dfs(i + 1, chosen)
            chosen.pop()
        dfs(i + 1, chosen)

    dfs(0, [])
    out = []
    for edge_ids in found:
        es = {edges[i] for i in edge_ids}
        tris = []
        for tri in itertools.combinations(range(n), 3):
            a, b, c = tri
            if (a, b) in es and (b, c) in es and (a, c) in es and _empty_triangle(p, tri):
                t = list(tri)
                if orient(p[t]) < 0:
                    t[0], t[1] = t[1], t[0]
                tris.append(t)
        out.append(np.array(tris, dtype=np.int64))
    return out
