"""
Sizing fields, per-element size mismatch and the min-containment constant.

A sizing field is described through ``1/D(x)^2`` directly, since that is
the quantity that gets interpolated and differentiated.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .mesh import Mesh, NetParams

__all__ = [
    "SizingField",
    "ElementSizing",
    "C3Result",
    "constant_sizing",
    "affine_sizing",
    "radial_quadratic_sizing",
    "sizing_from_spec",
    "compute_zeta",
    "estimate_hessian_sup",
    "sizing_bounds",
    "constant_c3",
]


@dataclass
class SizingField:
    """``inv_d2`` maps ``(M, d)`` points to ``1/D^2`` values.

    ``hessian_sup`` is an analytic bound on the largest second directional
    derivative of ``1/D^2`` over the domain, when one is known.
    ``sup_value`` is likewise an optional analytic bound on ``1/D^2`` itself,
    given as a function of the mesh vertices (whose hull is the domain).
    """

    inv_d2: Callable[[np.ndarray], np.ndarray]
    hessian_sup: float | None = None
    sup_value: Callable[[np.ndarray], float] | None = None
    name: str = "custom"

    def vertex_values(self, mesh: Mesh) -> np.ndarray:
        vals = np.asarray(self.inv_d2(mesh.points), dtype=float)
        if np.any(~np.isfinite(vals)) or np.any(vals <= 0):
            raise ValueError("sizing field 1/D^2 must be positive at every vertex")
        return vals


def constant_sizing(h0: float) -> SizingField:
    if h0 <= 0:
        raise ValueError("sizing length must be positive")
    c = 1.0 / h0**2
    return SizingField(lambda x: np.full(len(np.atleast_2d(x)), c), hessian_sup=0.0,
                       sup_value=lambda pts: c, name=f"constant:{h0!r}")


def affine_sizing(a: float, b) -> SizingField:
    """``1/D^2 = a + b . x``; positive on the mesh hull is the caller's job."""
    b = np.asarray(b, dtype=float)

    def f(x):
        return a + np.atleast_2d(x) @ b

    # a linear function peaks at a hull vertex
    return SizingField(f, hessian_sup=0.0, sup_value=lambda pts: float(f(pts).max()),
                       name=f"affine:{a!r}")


def radial_quadratic_sizing(a: float, b: float, center) -> SizingField:
    """``1/D^2 = a + b |x - c|^2`` (Hessian ``2 b I``)."""
    c = np.asarray(center, dtype=float)

    def f(x):
        r = np.atleast_2d(x) - c
        return a + b * (r * r).sum(axis=1)

    def sup(pts):
        # convex for b >= 0, so the max over the hull sits at a vertex
        return float(f(pts).max()) if b >= 0 else a

    return SizingField(f, hessian_sup=2.0 * abs(b), sup_value=sup, name=f"radial:{a!r},{b!r}")


def sizing_from_spec(spec: str, mesh: Mesh) -> SizingField:
    """Built-in field from a short spec string.

    ``auto`` (constant at the largest element diameter), ``constant:h``,
    ``affine:a,b1,...,bd``, ``radial:a,b,c1,...,cd``.
    """
    kind, _, args = spec.partition(":")
    vals = [float(v) for v in args.split(",")] if args else []
    d = mesh.dim
    if kind == "auto":
        return constant_sizing(float(mesh.diameters.max()))
    if kind == "constant" and len(vals) == 1:
        return constant_sizing(vals[0])
    if kind == "affine" and len(vals) == d + 1:
        return affine_sizing(vals[0], vals[1:])
    if kind == "radial" and len(vals) == d + 2:
        return radial_quadratic_sizing(vals[0], vals[1], vals[2:])
    raise ValueError(f"unrecognised sizing spec {spec!r}")


@dataclass(frozen=True)
class ElementSizing:
    zeta: np.ndarray
    min_vertex_value: np.ndarray
    max_vertex_value: np.ndarray
    inv_diam2: np.ndarray


def compute_zeta(mesh: Mesh, field: SizingField) -> ElementSizing:
    """Smallest-magnitude ``zeta_K`` with
    ``min_i 1/D^2(p_i) <= 1/diam(K)^2 + zeta_K <= max_i 1/D^2(p_i)``."""
    vals = field.vertex_values(mesh)[mesh.simplices]
    lo, hi = vals.min(axis=1), vals.max(axis=1)
    inv_d2 = 1.0 / mesh.diameters**2
    zeta = np.clip(0.0, lo - inv_d2, hi - inv_d2)
    return ElementSizing(zeta=zeta, min_vertex_value=lo, max_vertex_value=hi, inv_diam2=inv_d2)


def estimate_hessian_sup(field: SizingField, probes, step: float | None = None,
                         mesh: Mesh | None = None) -> float:
    """Largest spectral norm of a central-difference Hessian over ``probes``.

    For a symmetric Hessian ``H`` the sup of ``|u1' H u2|`` over unit vectors
    is the spectral norm.  When ``mesh`` is given, probes must lie in it.
    """
    x = np.atleast_2d(np.asarray(probes, dtype=float))
    n, d = x.shape
    if mesh is not None and np.any(mesh.locate(x) < 0):
        raise ValueError("hessian probe outside the mesh hull")
    if step is None:
        span = float(np.ptp(mesh.points, axis=0).max()) if mesh is not None else float(np.ptp(x, axis=0).max() or 1.0)
        step = 1e-4 * span
    h = step
    f = field.inv_d2
    eye = np.eye(d) * h
    hess = np.empty((n, d, d))
    f0 = f(x)
    for i in range(d):
        fp, fm = f(x + eye[i]), f(x - eye[i])
        hess[:, i, i] = (fp - 2 * f0 + fm) / h**2
        for j in range(i + 1, d):
            val = (f(x + eye[i] + eye[j]) - f(x + eye[i] - eye[j])
                   - f(x - eye[i] + eye[j]) + f(x - eye[i] - eye[j])) / (4 * h * h)
            hess[:, i, j] = hess[:, j, i] = val
    return float(np.abs(np.linalg.eigvalsh(hess)).max())


@dataclass(frozen=True)
class SizingBounds:
    hessian_sup: float
    hessian_is_estimate: bool
    value_sup: float
    value_is_estimate: bool


def sizing_bounds(mesh: Mesh, field: SizingField, n_probes: int = 1000, seed: int = 0,
                  safety: float = 1.05) -> SizingBounds:
    """Hessian and value sup norms of ``1/D^2``: analytic when available,
    otherwise sampled (with ``safety`` inflation) and flagged as estimates."""
    from .mesh import sample_in_mesh

    probes = None
    if field.hessian_sup is not None:
        hs, h_est = float(field.hessian_sup), False
    else:
        probes = sample_in_mesh(mesh, n_probes, np.random.default_rng(seed))
        hs, h_est = safety * estimate_hessian_sup(field, probes, mesh=None,
                                                  step=1e-4 * float(np.ptp(mesh.points, axis=0).max())), True
    if field.sup_value is not None:
        vs, v_est = float(field.sup_value(mesh.points)), False
    else:
        if probes is None:
            probes = sample_in_mesh(mesh, n_probes, np.random.default_rng(seed))
        samples = np.concatenate([field.inv_d2(probes), field.vertex_values(mesh)])
        vs, v_est = safety * float(samples.max()), True
    return SizingBounds(hs, h_est, vs, v_est)


@dataclass(frozen=True)
class C3Result:
    c3: float
    branch: str  # "sizing" or "separation" (ties report "separation")
    sizing_term: float
    separation_term: float
    bounds: SizingBounds | None = None


def c3_from_parts(max_mcc_radius: float, hessian_sup: float, value_sup: float,
                  max_abs_zeta: float, eta: float) -> C3Result:
    sizing_term = 0.5 * max_mcc_radius**2 * hessian_sup + value_sup + max_abs_zeta
    sep_term = 1.0 / eta**2
    if sizing_term < sep_term:
        return C3Result(float(np.sqrt(sizing_term)), "sizing", sizing_term, sep_term)
    return C3Result(float(np.sqrt(sep_term)), "separation", sizing_term, sep_term)


def constant_c3(mesh: Mesh, field: SizingField, net: NetParams | None, **kw) -> C3Result:
    """Min-containment constant: square root of the smaller of the sizing
    bound ``max R_min^2 |1/D^2|_2 / 2 + |1/D^2|_inf + max|zeta|`` and ``1/eta^2``."""
    if net is None:
        raise ValueError("net parameters are required for C3")
    zeta = compute_zeta(mesh, field).zeta
    bounds = sizing_bounds(mesh, field, **kw)
    res = c3_from_parts(float(mesh.mcc_radii.max()), bounds.hessian_sup, bounds.value_sup,
                        float(np.abs(zeta).max()), net.eta)
    return C3Result(res.c3, res.branch, res.sizing_term, res.separation_term, bounds)
