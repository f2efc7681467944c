"""
Incremental Bowyer-Watson Delaunay triangulation in R^d.

The hull is closed with "infinite" cells (a hull facet plus a symbolic
vertex at infinity), so no bounding super-simplex is needed.  Cospherical
ties are broken by the symbolic perturbation in :mod:`.predicates`, which
makes the output independent of insertion order.
"""
from __future__ import annotations

import math
import random

import numpy as np

from .predicates import orient, perturbed_insphere

__all__ = ["delaunay_simplices", "DelaunayError"]

INF = -1


class DelaunayError(ValueError):
    pass


class _Triangulation:
    def __init__(self, points: np.ndarray):
        self.p = points
        self.d = points.shape[1]
        self.verts: list[list[int]] = []
        self.nbr: list[list[int]] = []
        self.alive: list[bool] = []
        self.last = 0
        self.rng = random.Random(0)

    # -- cell bookkeeping -------------------------------------------------
    def _new(self, verts):
        self.verts.append(list(verts))
        self.nbr.append([-1] * (self.d + 1))
        self.alive.append(True)
        return len(self.verts) - 1

    def _link(self, cells):
        """Pair up facets of ``cells`` that have no neighbor yet."""
        open_facets = {}
        for c in cells:
            vs = self.verts[c]
            for i in range(self.d + 1):
                if self.nbr[c][i] != -1:
                    continue
                key = tuple(sorted(vs[:i] + vs[i + 1:]))
                other = open_facets.pop(key, None)
                if other is None:
                    open_facets[key] = (c, i)
                else:
                    oc, oi = other
                    self.nbr[c][i] = oc
                    self.nbr[oc][oi] = c
        if open_facets:
            raise AssertionError("unmatched facets while linking cells")

    # -- predicates ---------------------------------------------------------
    def _conflict(self, c, qi):
        vs = self.verts[c]
        if INF not in vs:
            return perturbed_insphere(self.p[vs], vs, self.p[qi], qi) > 0
        k = vs.index(INF)
        facet = vs[:k] + vs[k + 1:]
        n = self.nbr[c][k]
        nv = next(v for v in self.verts[n] if v not in facet)
        o_q = orient(self.p[facet + [qi]])
        if o_q == 0:
            return self._conflict(n, qi)
        return o_q == -orient(self.p[facet + [nv]])

    def _locate(self, qi):
        """A cell in conflict with point ``qi`` (stochastic visibility walk)."""
        c = self.last
        if not self.alive[c] or INF in self.verts[c]:
            c = next(i for i, a in enumerate(self.alive) if a and INF not in self.verts[i])
        q = self.p[qi]
        for _ in range(10 * len(self.verts) + 100):
            vs = self.verts[c]
            pts = self.p[vs]
            o = orient(pts)
            order = list(range(self.d + 1))
            self.rng.shuffle(order)
            moved = False
            for i in order:
                trial = pts.copy()
                trial[i] = q
                if orient(trial) == -o:
                    c = self.nbr[c][i]
                    moved = True
                    break
            if not moved:
                return c
            if INF in self.verts[c]:
                return c
        raise AssertionError("point location did not terminate")

    # -- construction -------------------------------------------------------
    def start(self, ids):
        s0 = self._new(ids)
        cells = [s0]
        for i in range(self.d + 1):
            vs = list(ids)
            vs[i] = INF
            cells.append(self._new(vs))
        self._link(cells)
        self.last = s0

    def insert(self, qi):
        seed = self._locate(qi)
        conflict = {seed}
        stack = [seed]
        status = {seed: True}
        while stack:
            c = stack.pop()
            for n in self.nbr[c]:
                if n in status:
                    continue
                status[n] = self._conflict(n, qi)
                if status[n]:
                    conflict.add(n)
                    stack.append(n)
        created = []
        for c in sorted(conflict):
            for i, n in enumerate(self.nbr[c]):
                if n in conflict:
                    continue
                vs = list(self.verts[c])
                vs[i] = qi
                nc = self._new(vs)
                self.nbr[nc][i] = n
                self.nbr[n][self.nbr[n].index(c)] = nc
                created.append(nc)
        for c in conflict:
            self.alive[c] = False
        self._link(created)
        for c in created:
            if INF not in self.verts[c]:
                self.last = c
                break

    def finite_cells(self):
        out = []
        for c, vs in enumerate(self.verts):
            if self.alive[c] and INF not in vs:
                vs = list(vs)
                if orient(self.p[vs]) < 0:
                    vs[0], vs[1] = vs[1], vs[0]
                out.append(vs)
        out.sort(key=lambda v: sorted(v))
        return out


def _initial_simplex(points: np.ndarray) -> list[int]:
    d = points.shape[1]
    chosen = [0]
    scale = float(np.ptp(points, axis=0).max())
    for i in range(1, len(points)):
        trial = points[chosen + [i]] - points[chosen[0]]
        sv = np.linalg.svd(trial[1:], compute_uv=False)
        if sv.min() > 1e-10 * scale:
            chosen.append(i)
            if len(chosen) == d + 1:
                return chosen
    raise DelaunayError("all points lie on a common hyperplane")


def delaunay_simplices(points) -> np.ndarray:
    """Delaunay simplices (vertex ids, positively oriented) of a point set."""
    pts = np.asarray(points, dtype=float)
    if pts.ndim != 2:
        raise ValueError("points must be an (N, d) array")
    n, d = pts.shape
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if n < d + 1:
        raise DelaunayError(f"need at least {d + 1} points in R^{d}, got {n}")
    if not np.all(np.isfinite(pts)):
        raise ValueError("coordinates must be finite")
    if len(np.unique(pts, axis=0)) != n:
        raise DelaunayError("duplicate points")
    tri = _Triangulation(pts)
    first = _initial_simplex(pts)
    tri.start(first)
    used = set(first)
    for i in range(n):
        if i not in used:
            tri.insert(i)
    cells = np.array(tri.finite_cells(), dtype=np.int64).reshape(-1, d + 1)
    return _peel_hull_slivers(pts, cells)


def _peel_hull_slivers(pts: np.ndarray, cells: np.ndarray) -> np.ndarray:
    """Drop near-zero-volume simplices that touch the hull boundary.

    Inputs that are cospherical or coplanar only up to float rounding give
    exact-predicate hulls with flat slivers; removing them changes the covered
    volume by a rounding-level amount.
    """
    d = pts.shape[1]
    v = pts[cells]
    vol = np.abs(np.linalg.det(v[:, 1:] - v[:, :1]))
    i, j = np.triu_indices(d + 1, k=1)
    diam = np.sqrt(((v[:, j] - v[:, i]) ** 2).sum(axis=2).max(axis=1))
    flat = vol < 1e-12 * diam ** d * math.factorial(d)
    keep = np.ones(len(cells), dtype=bool)
    while flat[keep].any():
        count = {}
        for k in np.nonzero(keep)[0]:
            s = cells[k].tolist()
            for r in range(d + 1):
                key = tuple(sorted(s[:r] + s[r + 1:]))
                count[key] = count.get(key, 0) + 1
        removed = False
        for k in np.nonzero(keep & flat)[0]:
            s = cells[k].tolist()
            if any(count[tuple(sorted(s[:r] + s[r + 1:]))] == 1 for r in range(d + 1)):
                keep[k] = False
                removed = True
        if not removed:
            raise DelaunayError("interior degenerate simplex in triangulation")
    return cells[keep]
