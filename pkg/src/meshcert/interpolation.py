"""
Degree-k Lagrange interpolation on simplices.

Reference coordinates ``xi`` live in the unit simplex
``{xi_i >= 0, sum(xi) <= 1}``; barycentric tuples are
``(1 - sum(xi), xi_1, ..., xi_d)``.  Lagrange polynomials are expressed in an
orthonormal (Dubiner-type, collapsed-Jacobi) basis so that the nodal matrix
stays well conditioned at moderate degree.
"""
from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Callable

import numpy as np
from scipy.optimize import linprog
from scipy.special import eval_jacobi

from .mesh import Mesh
from .quadrature import _compositions, simplex_quadrature

__all__ = [
    "InterpolationScheme",
    "AffineMap",
    "FieldInterpolant",
    "BestApproximation",
    "LebesgueEstimate",
    "n_points",
    "equispaced_points",
    "orthonormal_basis",
    "build_scheme",
    "load_points_sidecar",
    "lebesgue_constant",
    "interpolate_gradient",
    "interpolate_vector",
    "best_approx_surrogate",
    "reference_lattice",
]

COND_LIMIT = 1e12


def n_points(d: int, k: int) -> int:
    """Dimension of the degree-k polynomials in d variables, ``(k+d)!/(k! d!)``."""
    return math.comb(k + d, d)


def reference_lattice(d: int, m: int) -> np.ndarray:
    """Barycentric principal lattice ``alpha / m`` with ``|alpha| = m``, shape ``(M, d+1)``."""
    if m == 0:
        return np.full((1, d + 1), 1.0 / (d + 1))
    return np.array(list(_compositions(m, d + 1)), dtype=float) / m


def equispaced_points(d: int, k: int) -> np.ndarray:
    """Equispaced interpolation points as barycentric tuples."""
    return reference_lattice(d, k)


# -- orthonormal basis ------------------------------------------------------

@lru_cache(maxsize=None)
def _basis_indices(d: int, k: int) -> tuple[tuple[int, ...], ...]:
    """Multi-indices of total degree <= k, graded by degree."""
    out = []
    for total in range(k + 1):
        out.extend(sorted(_compositions(total, d), reverse=True))
    return tuple(out)


def _raw_basis(xi: np.ndarray, idx: tuple[int, ...]) -> np.ndarray:
    """Unnormalized collapsed-coordinate orthogonal polynomial at ``xi`` (M, d)."""
    d = xi.shape[1]
    t = xi[:, -1]
    n = idx[-1]
    if d == 1:
        return eval_jacobi(n, 0.0, 0.0, 2.0 * t - 1.0)
    head = idx[:-1]
    a = sum(head)
    rest = 1.0 - t
    safe = np.where(rest > 1e-14, rest, 1.0)
    inner = _raw_basis(xi[:, :-1] / safe[:, None], head)
    return rest**a * inner * eval_jacobi(n, 2.0 * a + d - 1, 0.0, 2.0 * t - 1.0)


@lru_cache(maxsize=None)
def _basis_norms(d: int, k: int) -> np.ndarray:
    rule = simplex_quadrature(d, 2 * k)
    xi = rule.nodes[:, 1:]
    norms = []
    for idx in _basis_indices(d, k):
        p = _raw_basis(xi, idx)
        norms.append(math.sqrt(float(rule.weights @ (p * p))))
    return np.array(norms)


def orthonormal_basis(xi, d: int, k: int) -> np.ndarray:
    """Values ``(M, N_p)`` of the orthonormal degree-k basis at reference points.

    Normalized so that the mean of ``phi_i phi_j`` over the simplex is ``delta_ij``.
    """
    xi = np.atleast_2d(np.asarray(xi, dtype=float))
    cols = [_raw_basis(xi, idx) for idx in _basis_indices(d, k)]
    return np.column_stack(cols) / _basis_norms(d, k)


def _bary_to_ref(bary: np.ndarray) -> np.ndarray:
    return np.asarray(bary, dtype=float)[:, 1:]


# -- schemes ----------------------------------------------------------------

@dataclass(frozen=True)
class LebesgueEstimate:
    value: float
    density: int
    maximizer: np.ndarray  # barycentric tuple
    lattice_value: float


@dataclass
class InterpolationScheme:
    """Lagrange basis ``L(xi) = phi(xi) @ basis_coeffs`` on the reference simplex."""

    dim: int
    degree: int
    ref_points: np.ndarray  # (N_p, d+1) barycentric
    basis_coeffs: np.ndarray  # (N_p, N_p)
    condition_number: float
    family: str = "equispaced"
    lebesgue: LebesgueEstimate | None = None

    @property
    def n_points(self) -> int:
        return len(self.ref_points)

    def lagrange(self, xi) -> np.ndarray:
        """``(M, N_p)`` Lagrange basis values at reference points ``xi`` (M, d)."""
        return orthonormal_basis(xi, self.dim, self.degree) @ self.basis_coeffs

    def lagrange_bary(self, bary) -> np.ndarray:
        bary = np.atleast_2d(np.asarray(bary, dtype=float))
        if self.degree == 1 and self.family == "equispaced":
            # vertex scheme: the Lagrange basis is the barycentric coordinates
            return bary.copy()
        return self.lagrange(_bary_to_ref(bary))

    def lebesgue_function(self, bary) -> np.ndarray:
        return np.abs(self.lagrange_bary(bary)).sum(axis=1)


def build_scheme(d: int, k: int, points=None, check_tol: float = 1e-10) -> InterpolationScheme:
    """Lagrange scheme of degree ``k`` in ``d`` dimensions.

    ``points`` are optional barycentric tuples (default: equispaced lattice).
    Raises ``ValueError`` if they are not unisolvent or the Kronecker-delta
    and partition-of-unity checks fail.
    """
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if k < 1:
        raise ValueError("degree must be >= 1")
    npts = n_points(d, k)
    if points is None:
        bary, family = equispaced_points(d, k), "equispaced"
    else:
        bary, family = np.asarray(points, dtype=float), "user"
        if bary.shape != (npts, d + 1):
            raise ValueError(f"expected {npts} barycentric tuples of length {d + 1}, got shape {bary.shape}")
        if np.any(np.abs(bary.sum(axis=1) - 1.0) > 1e-12) or np.any(bary < -1e-12):
            raise ValueError("interpolation points must be barycentric tuples inside the simplex")
    vand = orthonormal_basis(_bary_to_ref(bary), d, k)
    cond = float(np.linalg.cond(vand))
    if not np.isfinite(cond) or cond > COND_LIMIT:
        raise ValueError(f"point set is not unisolvent for degree {k} (condition number {cond:.3g})")
    coeffs = np.linalg.inv(vand)
    scheme = InterpolationScheme(d, k, bary, coeffs, cond, family)
    # cardinality and partition of unity
    card = scheme.lagrange_bary(bary)
    if np.abs(card - np.eye(npts)).max() > check_tol:
        raise ValueError("Lagrange basis fails the Kronecker-delta check")
    probe = reference_lattice(d, k + 3)
    if np.abs(scheme.lagrange_bary(probe).sum(axis=1) - 1.0).max() > check_tol:
        raise ValueError("Lagrange basis fails the partition-of-unity check")
    return scheme


def load_points_sidecar(path) -> np.ndarray:
    """Barycentric point set from a JSON sidecar.

    Either a bare list of tuples or an object with a ``points`` list.
    """
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    if isinstance(data, dict):
        data = data.get("points")
    arr = np.asarray(data, dtype=float)
    if arr.ndim != 2:
        raise ValueError(f"{path}: expected a list of barycentric tuples")
    return arr


def _project_to_simplex(bary: np.ndarray) -> np.ndarray:
    b = np.clip(bary, 0.0, None)
    return b / b.sum(axis=-1, keepdims=True)


def lebesgue_constant(scheme: InterpolationScheme, density: int | None = None,
                      n_starts: int = 8, tol: float = 1e-12) -> LebesgueEstimate:
    """Sampled lower bound on ``max_xi sum_m |L_m(xi)|``.

    The Lebesgue function is evaluated on the barycentric lattice of the
    given density, then refined by a shrinking pattern search started from
    the best few lattice points.  Refinement only ever adds candidates, so
    the result is at least the lattice maximum.
    """
    d, k = scheme.dim, scheme.degree
    if density is None:
        density = max(4 * k, {1: 400, 2: 60, 3: 24}.get(d, 10))
    if k == 1 and scheme.family == "equispaced":
        # nonnegative barycentric coordinates summing to one: exactly 1 everywhere
        est = LebesgueEstimate(1.0, density, scheme.ref_points[0].copy(), 1.0)
        scheme.lebesgue = est
        return est
    lattice = reference_lattice(d, density)
    vals = scheme.lebesgue_function(lattice)
    lattice_max = float(vals.max())
    ranked = np.argsort(-vals, kind="stable")
    order = ranked[:n_starts]
    best_val, best_pt = lattice_max, lattice[ranked[0]]
    # moves along the edge directions e_i - e_j of the barycentric simplex
    dirs = []
    for i in range(d + 1):
        for j in range(d + 1):
            if i != j:
                v = np.zeros(d + 1)
                v[i], v[j] = 1.0, -1.0
                dirs.append(v)
    dirs = np.array(dirs)
    for start in order:
        x, fx = lattice[start].copy(), float(vals[start])
        step = 1.0 / density
        while step > tol:
            cand = _project_to_simplex(x[None, :] + step * dirs)
            fc = scheme.lebesgue_function(cand)
            j = int(np.argmax(fc))
            if fc[j] > fx:
                x, fx = cand[j], float(fc[j])
            else:
                step *= 0.5
        if fx > best_val:
            best_val, best_pt = fx, x
    est = LebesgueEstimate(best_val, density, best_pt, lattice_max)
    scheme.lebesgue = est
    return est


# -- physical elements ------------------------------------------------------

@dataclass(frozen=True)
class AffineMap:
    """``x(xi) = origin + edges @ xi`` for one physical simplex."""

    origin: np.ndarray
    edges: np.ndarray  # (d, d), column i = p_i - p_0

    @classmethod
    def from_vertices(cls, verts) -> "AffineMap":
        v = np.asarray(verts, dtype=float)
        return cls(v[0].copy(), (v[1:] - v[0]).T.copy())

    @property
    def det(self) -> float:
        return float(np.linalg.det(self.edges))

    def forward(self, xi) -> np.ndarray:
        return self.origin + np.atleast_2d(xi) @ self.edges.T

    def inverse(self, x) -> np.ndarray:
        return np.linalg.solve(self.edges, (np.atleast_2d(x) - self.origin).T).T


@dataclass
class FieldInterpolant:
    """Element-wise Lagrange interpolant of an ``m``-component field.

    ``values[t, j]`` is the target sampled at ``x_j = x_t(xi_j)``.
    """

    mesh: Mesh
    scheme: InterpolationScheme
    values: np.ndarray  # (T, N_p, m)
    nodes: np.ndarray  # (T, N_p, d) physical interpolation points

    def at_reference(self, bary) -> np.ndarray:
        """Interpolant at the same barycentric points in every element, ``(T, M, m)``."""
        lag = self.scheme.lagrange_bary(bary)
        return np.einsum("qj,tjm->tqm", lag, self.values)

    def evaluate(self, x, simplex_ids=None) -> np.ndarray:
        """Interpolant at physical points ``x`` (M, d); located if ids omitted."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        ids = self.mesh.locate(x) if simplex_ids is None else np.asarray(simplex_ids)
        if np.any(ids < 0):
            raise ValueError("evaluation point outside the mesh")
        out = np.empty((len(x), self.values.shape[2]))
        for t in np.unique(ids):
            sel = ids == t
            xi = AffineMap.from_vertices(self.mesh.vertex_coords[t]).inverse(x[sel])
            out[sel] = self.scheme.lagrange(xi) @ self.values[t]
        return out


def _sample_elements(mesh: Mesh, bary: np.ndarray, fn: Callable, what: str) -> np.ndarray:
    pts = np.einsum("qi,tid->tqd", bary, mesh.vertex_coords)
    flat = pts.reshape(-1, mesh.dim)
    try:
        vals = np.asarray(fn(flat), dtype=float)
    except Exception as exc:  # noqa: BLE001 - re-raised with context
        raise ValueError(f"{what} evaluation failed: {exc}") from exc
    if vals.ndim == 1:
        vals = vals[:, None]
    if vals.shape[0] != flat.shape[0]:
        raise ValueError(f"{what} returned {vals.shape[0]} rows for {flat.shape[0]} points")
    if not np.all(np.isfinite(vals)):
        raise ValueError(f"{what} is not finite inside an element")
    return vals.reshape(pts.shape[0], pts.shape[1], -1)


def interpolate_vector(mesh: Mesh, scheme: InterpolationScheme, f: Callable) -> FieldInterpolant:
    """Interpolate ``f: (M, d) -> (M, m)`` element by element."""
    if scheme.dim != mesh.dim:
        raise ValueError("scheme and mesh dimensions differ")
    vals = _sample_elements(mesh, scheme.ref_points, f, "field")
    nodes = np.einsum("qi,tid->tqd", scheme.ref_points, mesh.vertex_coords)
    return FieldInterpolant(mesh, scheme, vals, nodes)


def interpolate_gradient(mesh: Mesh, scheme: InterpolationScheme, grad_v: Callable) -> FieldInterpolant:
    """Interpolate each component of ``grad v`` (given as a gradient evaluator)."""
    return interpolate_vector(mesh, scheme, grad_v)


# -- best approximation -----------------------------------------------------

@dataclass
class BestApproximation:
    """Element-wise discrete-minimax surrogate for the best approximation.

    ``certified_error`` is the Euclidean combination over components of the
    largest sampled componentwise error, times ``safety``.
    """

    coeffs: np.ndarray  # (T, N_p, m) in the orthonormal basis
    component_errors: np.ndarray  # (T, m) sampled sup error per element/component
    certified_error: float
    safety: float
    sample_density: int
    lp_solved: int
    fallback: bool = False
    messages: list[str] = field(default_factory=list)


def _minimax_lp(phi: np.ndarray, f: np.ndarray) -> tuple[np.ndarray, float] | None:
    """``min_c max_s |phi c - f|`` as a linear program; None on failure."""
    s, n = phi.shape
    c_obj = np.zeros(n + 1)
    c_obj[-1] = 1.0
    ones = np.ones((s, 1))
    a_ub = np.block([[phi, -ones], [-phi, -ones]])
    b_ub = np.concatenate([f, -f])
    res = linprog(c_obj, A_ub=a_ub, b_ub=b_ub, bounds=[(None, None)] * n + [(0, None)], method="highs")
    if res.status != 0:
        return None
    c = res.x[:n]
    return c, float(np.abs(phi @ c - f).max())


def best_approx_surrogate(mesh: Mesh, scheme: InterpolationScheme, target: Callable,
                          density: int | None = None, safety: float = 1.05,
                          rtol: float = 1e-9, max_lp: int | None = 64) -> BestApproximation:
    """Certified upper estimate of the element-wise sup-norm best-approximation error.

    Every element gets a least-squares fit; the discrete minimax linear
    program is then solved element by element in decreasing order of the
    least-squares error, stopping once no remaining element can raise the
    maximum (its minimax error is at most its least-squares error) or after
    ``max_lp`` solves per component.  Any fit's error bounds the best error
    from above, so elements left at their least-squares fit keep the result
    an upper bound, just a less tight one.
    """
    d, k = scheme.dim, scheme.degree
    if density is None:
        density = {1: 200, 2: 24, 3: 12}.get(d, 8) if k > 0 else 4
        density = max(density, 3 * k)
    bary = reference_lattice(d, density)
    phi = orthonormal_basis(_bary_to_ref(bary), d, k)  # (S, N_p)
    vals = _sample_elements(mesh, bary, target, "target")  # (T, S, m)
    ls_coef, *_ = np.linalg.lstsq(phi, vals.transpose(1, 0, 2).reshape(len(bary), -1), rcond=None)
    t_count, _, m = vals.shape
    coeffs = ls_coef.reshape(-1, t_count, m).transpose(1, 0, 2).copy()
    resid = np.abs(np.einsum("sn,tnm->tsm", phi, coeffs) - vals).max(axis=1)  # (T, m)
    errors = resid.copy()
    scale = max(1.0, float(np.abs(vals).max()))
    solved, failed, exhausted = 0, 0, 0
    for comp in range(m):
        order = np.argsort(-resid[:, comp], kind="stable")
        current = 0.0
        for n_done, t in enumerate(order):
            if resid[t, comp] <= current or resid[t, comp] <= rtol * scale:
                break
            if max_lp is not None and n_done >= max_lp:
                exhausted += 1
                break
            out = _minimax_lp(phi, vals[t, :, comp])
            if out is None:
                failed += 1
                current = max(current, resid[t, comp])
                continue
            c, err = out
            solved += 1
            if err < resid[t, comp]:
                coeffs[t, :, comp] = c
                errors[t, comp] = err
            current = max(current, errors[t, comp])
    per_comp = errors.max(axis=0)
    cert = safety * float(np.sqrt((per_comp**2).sum()))
    msgs = []
    if exhausted:
        msgs.append(f"minimax budget reached on {exhausted} component(s); remaining elements use least squares")
    if failed:
        msgs.append(f"{failed} minimax solves failed; least-squares fit kept")
        warnings.warn(msgs[-1], RuntimeWarning, stacklevel=2)
    return BestApproximation(coeffs, errors, cert, safety, density, solved, bool(failed), msgs)
