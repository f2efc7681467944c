"""Simplicial mesh container, validation, point-net and protection measurement."""
from __future__ import annotations

import math
import itertools
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy.spatial import ConvexHull, cKDTree

from . import geometry
from .delaunay import DelaunayError, delaunay_simplices

__all__ = [
    "Mesh",
    "ValidationReport",
    "NetParams",
    "ProtectionReport",
    "validate_pseudo_manifold",
    "validate_mesh",
    "delaunay",
    "measure_net",
    "protection",
    "sample_in_mesh",
    "DelaunayError",
]


@dataclass
class Mesh:
    """Points ``(N, d)`` and simplices ``(T, d+1)`` of vertex ids (0-based)."""

    points: np.ndarray
    simplices: np.ndarray

    def __post_init__(self):
        self.points = np.ascontiguousarray(self.points, dtype=float)
        if self.points.ndim != 2:
            raise ValueError("points must be (N, d)")
        d = self.points.shape[1]
        self.simplices = np.asarray(self.simplices, dtype=np.int64).reshape(-1, d + 1)
        if self.simplices.size and (self.simplices.min() < 0 or self.simplices.max() >= len(self.points)):
            raise ValueError("simplex vertex id out of range")
        if not np.all(np.isfinite(self.points)):
            raise ValueError("point coordinates must be finite")

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def n_simplices(self) -> int:
        return len(self.simplices)

    @cached_property
    def vertex_coords(self) -> np.ndarray:
        """``(T, d+1, d)`` array of simplex vertex coordinates."""
        return self.points[self.simplices]

    @cached_property
    def facet_adjacency(self) -> dict[tuple, list[int]]:
        adj = defaultdict(list)
        for k, s in enumerate(self.simplices.tolist()):
            for i in range(len(s)):
                adj[tuple(sorted(s[:i] + s[i + 1:]))].append(k)
        return dict(adj)

    @cached_property
    def volumes(self) -> np.ndarray:
        q = self.vertex_coords[:, 1:] - self.vertex_coords[:, :1]
        return np.abs(np.linalg.det(q)) / math.factorial(self.dim)

    @cached_property
    def edge_sq_sums(self) -> np.ndarray:
        """Sum over the ``d(d+1)/2`` edges of squared edge length, per simplex."""
        i, j = np.triu_indices(self.dim + 1, k=1)
        e = self.vertex_coords[:, j] - self.vertex_coords[:, i]
        return (e * e).sum(axis=(1, 2))

    @cached_property
    def diameters(self) -> np.ndarray:
        i, j = np.triu_indices(self.dim + 1, k=1)
        e = self.vertex_coords[:, j] - self.vertex_coords[:, i]
        return np.sqrt((e * e).sum(axis=2).max(axis=1))

    @cached_property
    def facet_volumes(self) -> np.ndarray:
        """``(T, d+1)`` volumes of the facet opposite each vertex."""
        d = self.dim
        out = np.empty((self.n_simplices, d + 1))
        for r in range(d + 1):
            f = np.delete(self.vertex_coords, r, axis=1)
            q = f[:, 1:] - f[:, :1]
            gram = np.einsum("tid,tjd->tij", q, q)
            out[:, r] = np.sqrt(np.clip(np.linalg.det(gram), 0.0, None)) / math.factorial(d - 1)
        return out

    @cached_property
    def elevations(self) -> np.ndarray:
        """``(T, d+1)`` distances from each vertex to its opposite facet's hull."""
        return self.dim * self.volumes[:, None] / self.facet_volumes

    @cached_property
    def min_elevations(self) -> np.ndarray:
        return self.elevations.min(axis=1)

    @cached_property
    def thicknesses(self) -> np.ndarray:
        return self.min_elevations / (self.dim * self.diameters)

    @cached_property
    def _circum(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        v = self.vertex_coords
        q = v[:, 1:] - v[:, :1]
        rhs = 0.5 * (q * q).sum(axis=2)
        rel = np.linalg.solve(q, rhs[..., None])[..., 0]
        centers = v[:, 0] + rel
        radii = np.linalg.norm(rel, axis=1)
        # barycentric coordinates of the circumcenter
        lam = np.linalg.solve(np.transpose(q, (0, 2, 1)), rel[..., None])[..., 0]
        bary = np.concatenate([1.0 - lam.sum(axis=1, keepdims=True), lam], axis=1)
        return centers, radii, bary

    @property
    def circumcenters(self) -> np.ndarray:
        return self._circum[0]

    @property
    def circumradii(self) -> np.ndarray:
        return self._circum[1]

    @cached_property
    def mcc_radii(self) -> np.ndarray:
        """Min-containment radii; equal to the circumradius when the
        circumcenter lies in the closed simplex."""
        _, radii, bary = self._circum
        out = radii.copy()
        for t in np.nonzero(bary.min(axis=1) < -1e-12)[0]:
            out[t] = min(geometry.min_containment_ball(self.vertex_coords[t])[1], radii[t])
        return out

    def geometry_of(self, t: int) -> geometry.SimplexGeometry:
        return geometry.simplex_geometry(self.vertex_coords[t])

    def scaled(self, factor: float) -> "Mesh":
        return Mesh(self.points * factor, self.simplices.copy())

    def barycentric(self, x: np.ndarray, simplex_ids=None) -> np.ndarray:
        """Barycentric coordinates of points ``x`` (M, d) in each listed simplex.

        Returns ``(len(simplex_ids), M, d+1)``.
        """
        ids = np.arange(self.n_simplices) if simplex_ids is None else np.asarray(simplex_ids)
        v = self.vertex_coords[ids]
        jac = np.transpose(v[:, 1:] - v[:, :1], (0, 2, 1))
        inv = np.linalg.inv(jac)
        rel = x[None, :, :] - v[:, :1, :]
        lam = np.einsum("tij,tmj->tmi", inv, rel)
        return np.concatenate([1.0 - lam.sum(axis=2, keepdims=True), lam], axis=2)

    def locate(self, x: np.ndarray, tol: float = 1e-10) -> np.ndarray:
        """Index of a simplex containing each point, or -1."""
        x = np.atleast_2d(x)
        out = np.full(len(x), -1, dtype=np.int64)
        chunk = max(1, 2_000_000 // max(1, len(x) * (self.dim + 1)))
        for start in range(0, self.n_simplices, chunk):
            ids = np.arange(start, min(start + chunk, self.n_simplices))
            lam = self.barycentric(x, ids)
            inside = np.all(lam >= -tol, axis=2)
            for t_local in range(len(ids)):
                hit = inside[t_local] & (out < 0)
                out[hit] = ids[t_local]
            if np.all(out >= 0):
                break
        return out


@dataclass
class ValidationReport:
    passed: bool
    bad_facets: list[tuple] = field(default_factory=list)
    overlapping_pairs: list[tuple[int, int]] = field(default_factory=list)
    volume: float = float("nan")
    hull_volume: float = float("nan")
    messages: list[str] = field(default_factory=list)


def validate_pseudo_manifold(mesh: Mesh) -> ValidationReport:
    """Every (d-1)-face must border exactly one or two d-simplices."""
    if mesh.n_simplices == 0:
        raise ValueError("empty mesh")
    bad = sorted((f, len(s)) for f, s in mesh.facet_adjacency.items() if len(s) not in (1, 2))
    msgs = [f"facet {f} has {n} incident simplices" for f, n in bad]
    return ValidationReport(passed=not bad, bad_facets=[f for f, _ in bad], messages=msgs)


def validate_mesh(mesh: Mesh, volume_rtol: float = 1e-8) -> ValidationReport:
    """Pseudo-manifold check, pairwise overlap sampling and hull-volume match."""
    rep = validate_pseudo_manifold(mesh)
    if np.any(mesh.volumes <= 0):
        rep.messages.append("mesh contains zero-volume simplices")
        rep.passed = False
    bary = mesh.vertex_coords.mean(axis=1)
    overlaps = []
    chunk = 256
    for start in range(0, mesh.n_simplices, chunk):
        ids = np.arange(start, min(start + chunk, mesh.n_simplices))
        lam = mesh.barycentric(bary, ids)
        inside = np.all(lam > 1e-9, axis=2)
        for t_local, t in enumerate(ids):
            for other in np.nonzero(inside[t_local])[0]:
                if other != t:
                    overlaps.append((int(min(t, other)), int(max(t, other))))
    rep.overlapping_pairs = sorted(set(overlaps))
    if rep.overlapping_pairs:
        rep.passed = False
        rep.messages.append(f"{len(rep.overlapping_pairs)} overlapping simplex pairs")
    rep.volume = float(mesh.volumes.sum())
    pts = mesh.points
    rep.hull_volume = float(ConvexHull(pts).volume) if mesh.dim > 1 else float(np.ptp(pts))
    if abs(rep.volume - rep.hull_volume) > volume_rtol * rep.hull_volume:
        rep.passed = False
        rep.messages.append(f"mesh volume {rep.volume!r} differs from hull volume {rep.hull_volume!r}")
    return rep


def delaunay(points) -> Mesh:
    """Delaunay mesh of a point set (exact predicates, deterministic ties)."""
    pts = np.asarray(points, dtype=float)
    return Mesh(pts, delaunay_simplices(pts))


def sample_in_mesh(mesh: Mesh, n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` points uniform over the union of the mesh simplices."""
    prob = mesh.volumes / mesh.volumes.sum()
    which = rng.choice(mesh.n_simplices, size=n, p=prob)
    lam = rng.dirichlet(np.ones(mesh.dim + 1), size=n)
    return np.einsum("ni,nid->nd", lam, mesh.vertex_coords[which])


@dataclass(frozen=True)
class NetParams:
    """Covering radius bracket and exact separation of a point set.

    ``epsilon`` is the certified upper bound on the covering radius of the
    hull; ``epsilon_lower`` a Monte Carlo lower estimate.
    """

    epsilon: float
    epsilon_lower: float
    eta: float

    @property
    def eta_bar(self) -> float:
        return self.eta / self.epsilon


def measure_net(points, mesh: Mesh | None = None, hull_volume_tol: float = 1e-8,
                n_samples: int = 100_000, seed: int = 0) -> NetParams:
    """Measure the (epsilon, eta) net parameters of ``points``.

    Any point of a simplex is within its min-containment radius of one of the
    simplex vertices, so the maximum of that radius over a triangulation of
    the hull bounds the covering radius from above.
    """
    pts = np.asarray(points, dtype=float)
    n, d = pts.shape
    if n < d + 1:
        raise ValueError(f"need at least {d + 1} points, got {n}")
    dist, _ = cKDTree(pts).query(pts, k=2)
    eta = float(dist[:, 1].min())
    if eta == 0.0:
        raise ValueError("coincident points: separation is zero")
    if mesh is None:
        mesh = delaunay(pts)
    rep_vol = float(mesh.volumes.sum())
    hull = ConvexHull(pts).volume if d > 1 else float(np.ptp(pts))
    if abs(rep_vol - hull) > hull_volume_tol * hull:
        raise ValueError("mesh does not cover the convex hull of the points")
    eps_upper = float(mesh.mcc_radii.max())
    x = sample_in_mesh(mesh, n_samples, np.random.default_rng(seed))
    near, _ = cKDTree(pts).query(x)
    eps_lower = float(near.max())
    return NetParams(epsilon=eps_upper, epsilon_lower=eps_lower, eta=eta)


@dataclass
class ProtectionReport:
    delta: float
    per_simplex: np.ndarray
    is_delaunay: bool
    violations: list[int] = field(default_factory=list)


def protection(mesh: Mesh, tol: float = 1e-12) -> ProtectionReport:
    """Protection ``delta = min_K (min_{p not in K} |p - c_K| - R_K)``.

    Simplices whose circumball strictly contains another point (beyond
    ``tol * R_K``) are listed as violations; values are never clamped.
    """
    k = min(mesh.dim + 2, len(mesh.points))
    centers, radii = mesh.circumcenters, mesh.circumradii
    dist, idx = cKDTree(mesh.points).query(centers, k=k)
    per = np.full(mesh.n_simplices, np.inf)
    for t in range(mesh.n_simplices):
        verts = set(mesh.simplices[t].tolist())
        for dd, ii in zip(dist[t], idx[t]):
            if ii not in verts:
                per[t] = dd - radii[t]
                break
    bad = [int(t) for t in np.nonzero(per < -tol * radii)[0]]
    return ProtectionReport(delta=float(per.min()), per_simplex=per, is_delaunay=not bad, violations=bad)


def random_net(d: int, n: int, seed: int = 0, separation: float | None = None,
               max_tries: int = 200_000) -> np.ndarray:
    """Well-separated random points in the unit cube, corners included.

    Dart throwing with minimum separation ``separation`` (default
    ``0.5 n^(-1/d)``) until ``n`` points are placed or tries run out.  A
    share of the candidates is snapped onto a cube face so the boundary is
    sampled as densely as the interior (otherwise hull elements are flat).
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    corners = np.array(list(itertools.product((0.0, 1.0), repeat=d)))
    if n < len(corners):
        raise ValueError(f"need at least {len(corners)} points to include the cube corners")
    r = 0.5 * n ** (-1.0 / d) if separation is None else separation
    rng = np.random.default_rng(seed)
    pts = [c for c in corners]
    tries = 0
    while len(pts) < n and tries < max_tries:
        batch = rng.random((256, d))
        for row in np.nonzero(rng.random(256) < 0.3)[0]:
            # snap onto a random face of random codimension
            axes = rng.permutation(d)[: rng.integers(1, d + 1)]
            batch[row, axes] = rng.integers(0, 2, size=len(axes))
        for q in batch:
            tries += 1
            if min(np.sum((np.asarray(pts) - q) ** 2, axis=1)) >= r * r:
                pts.append(q)
                if len(pts) == n:
                    break
    return np.array(pts)
