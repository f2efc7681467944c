"""
Mesh functionals, quality constants and inequality checks.

Vector fields are passed either as callables ``f(x) -> (M, m)`` on physical
points or as objects exposing ``element_values(mesh, bary, ids)`` that
return ``(len(ids), Q, m)`` values at barycentric points of each element
(used for interpolation errors, which are only defined element-wise).

The element length scale is the element diameter throughout.
"""
from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .interpolation import (
    FieldInterpolant,
    InterpolationScheme,
    best_approx_surrogate,
    interpolate_vector,
    lebesgue_constant,
    reference_lattice,
)
from .mesh import Mesh, NetParams, measure_net, protection
from .quadrature import QuadratureRule, simplex_quadrature
from .sizing import SizingField, constant_c3, constant_sizing

__all__ = [
    "ErrorField",
    "CheckResult",
    "VerificationReport",
    "QualityReport",
    "default_quadrature",
    "roughness_functional",
    "edge_functional",
    "gradient_norm",
    "sup_norm",
    "rajan_theta",
    "constant_c1",
    "constant_c2",
    "roughness_energy",
    "energy_J",
    "verify_equivalence",
    "verify_upper_bound",
    "verify_error_estimates",
    "quality_report",
]

CHUNK = 20_000  # element-point pairs per evaluation batch (times components)


@dataclass
class ErrorField:
    """``target - interpolant`` as an element-wise field."""

    target: Callable
    interpolant: FieldInterpolant

    def element_values(self, mesh: Mesh, bary: np.ndarray, ids: np.ndarray) -> np.ndarray:
        pts = np.einsum("qi,tid->tqd", bary, mesh.vertex_coords[ids])
        tv = np.asarray(self.target(pts.reshape(-1, mesh.dim)), dtype=float)
        tv = tv.reshape(len(ids), len(bary), -1)
        lag = self.interpolant.scheme.lagrange_bary(bary)
        iv = np.einsum("qj,tjm->tqm", lag, self.interpolant.values[ids])
        return tv - iv


def _element_values(mesh: Mesh, fld, bary: np.ndarray, ids: np.ndarray) -> np.ndarray:
    if hasattr(fld, "element_values"):
        return fld.element_values(mesh, bary, ids)
    pts = np.einsum("qi,tid->tqd", bary, mesh.vertex_coords[ids])
    vals = np.asarray(fld(pts.reshape(-1, mesh.dim)), dtype=float)
    if vals.ndim == 1:
        vals = vals[:, None]
    return vals.reshape(len(ids), len(bary), -1)


def _chunks(n_elem: int, n_pts: int):
    step = max(1, CHUNK // max(1, n_pts))
    for start in range(0, n_elem, step):
        yield np.arange(start, min(start + step, n_elem))


def default_quadrature(d: int, degree: int = 6) -> QuadratureRule:
    return simplex_quadrature(d, degree)


def _edge_pairs(d: int):
    return np.triu_indices(d + 1, k=1)


def _per_element_integrals(mesh: Mesh, fld, quad: QuadratureRule) -> tuple[np.ndarray, np.ndarray]:
    """Per element: ``int_K sum_{i>j} (|w| . |p_ij|)^2`` and ``int_K w . w``."""
    if quad.dim != mesh.dim:
        raise ValueError("quadrature and mesh dimensions differ")
    i, j = _edge_pairs(mesh.dim)
    rough = np.empty(mesh.n_simplices)
    norm2 = np.empty(mesh.n_simplices)
    for ids in _chunks(mesh.n_simplices, len(quad.weights)):
        v = mesh.vertex_coords[ids]
        abs_edges = np.abs(v[:, j] - v[:, i])  # (t, E, d)
        w = _element_values(mesh, fld, quad.nodes, ids)  # (t, Q, d)
        if w.shape[2] != mesh.dim:
            raise ValueError(f"field must have {mesh.dim} components, got {w.shape[2]}")
        dots = np.einsum("tqd,ted->tqe", np.abs(w), abs_edges)
        vol = mesh.volumes[ids]
        rough[ids] = vol * ((dots**2).sum(axis=2) @ quad.weights)
        norm2[ids] = vol * ((w * w).sum(axis=2) @ quad.weights)
    # rules with negative weights can round a vanishing integral of a
    # nonnegative integrand to a tiny negative number
    return np.maximum(rough, 0.0), np.maximum(norm2, 0.0)


def roughness_functional(mesh: Mesh, fld, quad: QuadratureRule | None = None) -> float:
    """``sqrt( sum_K diam(K)^-2 int_K sum_{i>j} (|w| . |p_ij|)^2 dV )``."""
    if np.any(mesh.diameters <= 0):
        raise ValueError("degenerate element with zero diameter")
    quad = quad or default_quadrature(mesh.dim)
    rough, _ = _per_element_integrals(mesh, fld, quad)
    return float(np.sqrt(np.sum(rough / mesh.diameters**2)))


def edge_functional(mesh: Mesh, f, quad: QuadratureRule | None = None) -> float:
    """Same functional applied to a general vector field ``f``."""
    return roughness_functional(mesh, f, quad)


def gradient_norm(mesh: Mesh, fld, quad: QuadratureRule | None = None) -> float:
    """``sqrt( sum_K int_K w . w dV )``."""
    quad = quad or default_quadrature(mesh.dim)
    _, norm2 = _per_element_integrals(mesh, fld, quad)
    return float(np.sqrt(norm2.sum()))


def sup_sample_points(d: int, density: int | None = None, n_random: int | None = None,
                      seed: int = 0) -> np.ndarray:
    """Per-element barycentric sample set: a lattice for d <= 3, random (plus vertices) above."""
    if d <= 3 and n_random is None:
        return reference_lattice(d, 20 if density is None else density)
    rng = np.random.default_rng(seed)
    n = 10_000 if n_random is None else n_random
    return np.vstack([np.eye(d + 1), rng.dirichlet(np.ones(d + 1), size=n)])


def sup_norm(mesh: Mesh, fld, density: int | None = None, n_random: int | None = None,
             safety: float = 1.05, seed: int = 0) -> float:
    """Dense-sample estimate of ``sup |w|`` (Euclidean norm), inflated by ``safety``."""
    bary = sup_sample_points(mesh.dim, density, n_random, seed)
    best = 0.0
    for ids in _chunks(mesh.n_simplices, len(bary)):
        w = _element_values(mesh, fld, bary, ids)
        best = max(best, float(np.sqrt((w * w).sum(axis=2)).max()))
    return safety * best


def rajan_theta(mesh: Mesh) -> tuple[float, float]:
    """``Theta = sum_K |K| sum_{i>j} |p_ij|^2`` and ``Theta / ((d+1)(d+2))``."""
    theta = float(mesh.volumes @ mesh.edge_sq_sums)
    d = mesh.dim
    return theta, theta / ((d + 1) * (d + 2))


def constant_c1(mesh: Mesh) -> float:
    """``sqrt((d+1)/(2d)) * min_K (min elevation / diam)``."""
    d = mesh.dim
    ratio = mesh.min_elevations / mesh.diameters
    return float(np.sqrt((d + 1) / (2 * d)) * ratio.min())


def constant_c2(mesh: Mesh) -> float:
    """``max_K sqrt(sum of squared edge lengths) / diam``."""
    return float((np.sqrt(mesh.edge_sq_sums) / mesh.diameters).max())


def roughness_energy(mesh: Mesh, grad_v: Callable, quad: QuadratureRule | None = None) -> float:
    """``a(v, v) = int |grad v|^2``."""
    return gradient_norm(mesh, grad_v, quad) ** 2


def energy_J(mesh: Mesh, v: Callable, grad_v: Callable, forcing: Callable,
             quad: QuadratureRule | None = None) -> float:
    """``J(v) = a(v, v) - 2 int f v``."""
    quad = quad or default_quadrature(mesh.dim)
    load = 0.0
    for ids in _chunks(mesh.n_simplices, len(quad.weights)):
        pts = np.einsum("qi,tid->tqd", quad.nodes, mesh.vertex_coords[ids]).reshape(-1, mesh.dim)
        fv = (np.asarray(forcing(pts), dtype=float) * np.asarray(v(pts), dtype=float))
        load += float(mesh.volumes[ids] @ (fv.reshape(len(ids), -1) @ quad.weights))
    return roughness_energy(mesh, grad_v, quad) - 2.0 * load


# -- verification -------------------------------------------------------------

@dataclass
class CheckResult:
    check_id: str
    paper_anchor: str
    lhs: float
    rhs: float
    passed: bool
    tightness: float

    def to_dict(self) -> dict:
        return {"check_id": self.check_id, "paper_anchor": self.paper_anchor, "lhs": self.lhs,
                "rhs": self.rhs, "pass": self.passed, "tightness": self.tightness}


@dataclass
class VerificationReport:
    checks: list[CheckResult] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def failing(self) -> list[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def extend(self, other: "VerificationReport") -> "VerificationReport":
        self.checks.extend(other.checks)
        self.info.update(other.info)
        return self


def _check(check_id: str, anchor: str, lhs: float, rhs: float, rtol: float, atol: float) -> CheckResult:
    ok = bool(lhs <= rhs * (1.0 + rtol) + atol)
    if rhs > 0:
        tight = lhs / rhs
    else:
        tight = 0.0 if lhs <= atol else float("inf")
    return CheckResult(check_id, anchor, float(lhs), float(rhs), ok, float(tight))


def verify_equivalence(mesh: Mesh, fields, quad: QuadratureRule | None = None, rtol: float = 1e-9,
                       atol: float = 1e-14, c1: float | None = None, names=None) -> VerificationReport:
    """``C1 ||w|| <= Psi(w) <= C2 ||w||`` for every field.

    ``c1`` overrides the computed constant (used to exercise failure paths).
    """
    fields = list(fields)
    if not fields:
        raise ValueError("at least one test field is required")
    quad = quad or default_quadrature(mesh.dim)
    c1 = constant_c1(mesh) if c1 is None else float(c1)
    c2 = constant_c2(mesh)
    rep = VerificationReport(info={"c1": c1, "c2": c2})
    names = names or [f"field{n}" for n in range(len(fields))]
    for name, fld in zip(names, fields):
        rough, norm2 = _per_element_integrals(mesh, fld, quad)
        psi = float(np.sqrt(np.sum(rough / mesh.diameters**2)))
        nrm = float(np.sqrt(norm2.sum()))
        rep.checks.append(_check(f"{name}:lower", "functional_equivalence", c1 * nrm, psi, rtol, atol))
        rep.checks.append(_check(f"{name}:upper", "functional_equivalence", psi, c2 * nrm, rtol, atol))
    return rep


def _c3_and_theta(mesh: Mesh, sizing: SizingField | None, net: NetParams | None):
    if sizing is None:
        sizing = constant_sizing(float(mesh.diameters.max()))
    if net is None:
        net = measure_net(mesh.points, mesh=mesh)
    c3 = constant_c3(mesh, sizing, net)
    theta, _ = rajan_theta(mesh)
    return c3, theta, net


def verify_upper_bound(mesh: Mesh, fields, sizing: SizingField | None = None, net: NetParams | None = None,
                       quad: QuadratureRule | None = None, rtol: float = 1e-9, atol: float = 1e-14,
                       sup_kw: dict | None = None, names=None) -> VerificationReport:
    """``Psi(w) <= C3 sqrt(Theta) |w|_inf`` and ``||w|| <= C3 sqrt(Theta) / C1 |w|_inf``."""
    quad = quad or default_quadrature(mesh.dim)
    c3, theta, net = _c3_and_theta(mesh, sizing, net)
    c1 = constant_c1(mesh)
    coef = c3.c3 * np.sqrt(theta)
    rep = VerificationReport(info={"c1": c1, "c3": c3.c3, "c3_branch": c3.branch, "theta": theta})
    if not isinstance(fields, (list, tuple)):
        fields = [fields]
    names = names or [f"field{n}" for n in range(len(fields))]
    for name, fld in zip(names, fields):
        rough, norm2 = _per_element_integrals(mesh, fld, quad)
        psi = float(np.sqrt(np.sum(rough / mesh.diameters**2)))
        nrm = float(np.sqrt(norm2.sum()))
        sup = sup_norm(mesh, fld, **(sup_kw or {}))
        rep.checks.append(_check(f"{name}:psi_sup", "iso_upper_bound", psi, coef * sup, rtol, atol))
        rep.checks.append(_check(f"{name}:l2_sup", "gradient_norm_upper_bound", nrm, coef / c1 * sup, rtol, atol))
    return rep


def verify_error_estimates(mesh: Mesh, scheme: InterpolationScheme, target: Callable,
                           sizing: SizingField | None = None, net: NetParams | None = None,
                           quad: QuadratureRule | None = None, vector: bool = False,
                           rtol: float = 1e-9, atol: float = 1e-12, lebesgue: float | None = None,
                           best_kw: dict | None = None, name: str = "target") -> VerificationReport:
    """Interpolation error against ``(1 + Lambda) C3 sqrt(Theta) E``.

    ``target`` is the gradient evaluator (or the vector field when
    ``vector=True``); ``E`` is the certified best-approximation estimate.
    """
    quad = quad or default_quadrature(mesh.dim, 2 * scheme.degree + 2)
    c3, theta, net = _c3_and_theta(mesh, sizing, net)
    c1 = constant_c1(mesh)
    lam = lebesgue if lebesgue is not None else (
        scheme.lebesgue.value if scheme.lebesgue is not None else lebesgue_constant(scheme).value)
    interp = interpolate_vector(mesh, scheme, target)
    best = best_approx_surrogate(mesh, scheme, target, **(best_kw or {}))
    err = ErrorField(target, interp)
    rough, norm2 = _per_element_integrals(mesh, err, quad)
    psi = float(np.sqrt(np.sum(rough / mesh.diameters**2)))
    l2 = float(np.sqrt(norm2.sum()))
    rhs = (1.0 + lam) * c3.c3 * np.sqrt(theta) * best.certified_error
    anchors = ("vector_error_functional", "vector_norm_error_estimate") if vector else (
        "functional_error_estimate", "norm_error_estimate")
    rep = VerificationReport(info={
        "c1": c1, "c3": c3.c3, "c3_branch": c3.branch, "theta": theta, "lambda": lam,
        "best_error": best.certified_error, "best_fallback": best.fallback,
        "psi_error": psi, "l2_error": l2,
    })
    rep.checks.append(_check(f"{name}:psi_error", anchors[0], psi, rhs, rtol, atol))
    rep.checks.append(_check(f"{name}:l2_error", anchors[1], l2, rhs / c1, rtol, atol))
    return rep


# -- quality report -----------------------------------------------------------

@dataclass
class QualityReport:
    dim: int
    n_points: int
    n_simplices: int
    c1: float
    c2: float
    c3: float
    c3_branch: str
    theta: float
    theta_hat: float
    lam: float | None
    xi_min: float
    delta: float
    is_delaunay: bool
    epsilon: float
    epsilon_lower: float
    eta: float
    eta_bar: float
    sizing: str
    hessian_is_estimate: bool
    bound_chain: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = asdict(self)
        out["lambda"] = out.pop("lam")
        return out


ANCHORS = {
    "c1": "sliver_constant",
    "c2": "coarse_constant",
    "c3": "min_containment_constant",
    "theta": "rajan_functional",
    "theta_hat": "rajan_functional_scaled",
    "lambda": "lebesgue_constant",
    "xi_min": "thickness",
    "delta": "protection",
    "epsilon": "net_density",
    "epsilon_lower": "net_density",
    "eta": "net_separation",
    "eta_bar": "net_separation",
}


def quality_report(mesh: Mesh, scheme: InterpolationScheme | None = None,
                   sizing: SizingField | None = None, net: NetParams | None = None) -> QualityReport:
    """All mesh constants plus the multipliers of the bound chain.

    ``bound_chain`` holds the factors that multiply the field norms on the
    right-hand sides: ``C1``/``C2`` (equivalence), ``C3 sqrt(Theta)``
    (sup-norm bound), ``C3 sqrt(Theta)/C1`` (L2 bound) and, when a scheme is
    given, ``(1 + Lambda) C3 sqrt(Theta)/C1`` for the interpolation error.
    """
    sizing = sizing or constant_sizing(float(mesh.diameters.max()))
    net = net or measure_net(mesh.points, mesh=mesh)
    c3 = constant_c3(mesh, sizing, net)
    theta, theta_hat = rajan_theta(mesh)
    c1, c2 = constant_c1(mesh), constant_c2(mesh)
    prot = protection(mesh)
    lam = None
    if scheme is not None:
        lam = scheme.lebesgue.value if scheme.lebesgue is not None else lebesgue_constant(scheme).value
    coef = c3.c3 * np.sqrt(theta)
    chain = {
        "equivalence_lower": c1,
        "equivalence_upper": c2,
        "iso_upper_bound": coef,
        "gradient_norm_upper_bound": coef / c1,
    }
    if lam is not None:
        chain["functional_error_estimate"] = (1 + lam) * coef
        chain["norm_error_estimate"] = (1 + lam) * coef / c1
        chain["vector_norm_error_estimate"] = (1 + lam) * coef / c1
    return QualityReport(
        dim=mesh.dim, n_points=len(mesh.points), n_simplices=mesh.n_simplices,
        c1=c1, c2=c2, c3=c3.c3, c3_branch=c3.branch, theta=theta, theta_hat=theta_hat, lam=lam,
        xi_min=float(mesh.thicknesses.min()), delta=prot.delta, is_delaunay=prot.is_delaunay,
        epsilon=net.epsilon, epsilon_lower=net.epsilon_lower, eta=net.eta, eta_bar=net.eta_bar,
        sizing=sizing.name, hessian_is_estimate=bool(c3.bounds and c3.bounds.hessian_is_estimate),
        bound_chain={k: float(v) for k, v in chain.items()},
    )
