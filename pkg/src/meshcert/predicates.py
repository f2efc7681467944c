"""
Orientation and insphere signs in R^d.

A floating-point determinant is accepted when it clears a conservative
Hadamard-scaled threshold; otherwise the sign is recomputed exactly on
integer-scaled coordinates.  The insphere test carries a symbolic
perturbation of the lifted coordinate (larger point index = larger
perturbation) so it never returns 0 for a nondegenerate simplex.
"""
from __future__ import annotations

from fractions import Fraction

import numpy as np

__all__ = ["orient", "insphere", "perturbed_insphere", "exact_det_sign"]

_FILTER = 1e-9


def _bareiss_sign(rows: list[list[int]]) -> int:
    """Sign of an integer determinant via fraction-free elimination."""
    a = [list(r) for r in rows]
    n = len(a)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if a[k][k] == 0:
            for i in range(k + 1, n):
                if a[i][k] != 0:
                    a[k], a[i] = a[i], a[k]
                    sign = -sign
                    break
            else:
                return 0
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                row_i[j] = (row_i[j] * akk - aik * row_k[j]) // prev
            row_i[k] = 0
        prev = akk
    det = a[n - 1][n - 1]
    return sign * (det > 0) - sign * (det < 0)


def exact_det_sign(mat) -> int:
    """Exact sign of a determinant whose entries are rationals (or floats)."""
    fr = [[Fraction(x) for x in row] for row in mat]
    den = 1
    for row in fr:
        for x in row:
            den = max(den, x.denominator)
    # float-derived denominators are powers of two, so the max is a common multiple
    ints = []
    for row in fr:
        r = []
        for x in row:
            q, rem = divmod(x.numerator * den, x.denominator)
            if rem:
                return _fraction_det_sign(fr)
            r.append(q)
        ints.append(r)
    return _bareiss_sign(ints)


def _fraction_det_sign(fr) -> int:
    a = [list(r) for r in fr]
    n = len(a)
    sign = 1
    for k in range(n):
        piv = next((i for i in range(k, n) if a[i][k] != 0), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            sign = -sign
        for i in range(k + 1, n):
            f = a[i][k] / a[k][k]
            for j in range(k, n):
                a[i][j] -= f * a[k][j]
    det = Fraction(sign)
    for k in range(n):
        det *= a[k][k]
    return (det > 0) - (det < 0)


def _filtered_sign(m: np.ndarray) -> int | None:
    det = np.linalg.det(m)
    bound = float(np.prod(np.sqrt((m * m).sum(axis=1))))
    if abs(det) > _FILTER * bound:
        return 1 if det > 0 else -1
    return None


def orient(points) -> int:
    """Sign of ``det[p_1 - p_0, ..., p_d - p_0]`` for d+1 points in R^d."""
    pts = np.asarray(points, dtype=float)
    m = pts[1:] - pts[0]
    s = _filtered_sign(m)
    if s is not None:
        return s
    p0 = [Fraction(x) for x in pts[0]]
    rows = [[Fraction(x) - y for x, y in zip(p, p0)] for p in pts[1:]]
    return exact_det_sign(rows)


def _lifted_exact(pts: np.ndarray, q: np.ndarray) -> int:
    qf = [Fraction(x) for x in q]
    rows = []
    for p in pts:
        diff = [Fraction(x) - y for x, y in zip(p, qf)]
        rows.append(diff + [sum(v * v for v in diff)])
    return exact_det_sign(rows)


def insphere(simplex, q) -> int:
    """+1 if ``q`` is strictly inside the circumsphere, -1 outside, 0 on it.

    Independent of vertex order.
    """
    pts = np.asarray(simplex, dtype=float)
    q = np.asarray(q, dtype=float)
    o = orient(pts)
    if o == 0:
        raise ValueError("insphere needs a nondegenerate simplex")
    diff = pts - q
    m = np.column_stack([diff, (diff * diff).sum(axis=1)])
    s = _filtered_sign(m)
    if s is None:
        s = _lifted_exact(pts, q)
    # with D the (d+2)x(d+2) lifted determinant, q is inside iff
    # sign(D) == -sign(dD/dh_q) = (-1)**d * orient
    d = pts.shape[1]
    return s * o * (-1) ** d


def perturbed_insphere(simplex, ids, q, q_id) -> int:
    """Insphere sign with ties broken by a consistent symbolic perturbation.

    Every point is lifted to ``|p|^2 + w_i`` with infinitesimal ``w_i``
    ordered by index (larger index, larger ``w``).  The lifted determinant
    ``D`` is linear in the lifted column, so on a tie its sign is that of the
    first nonzero cofactor ``dD/dh_i = (-1)**i * orient(rows without i)``.
    Never returns 0 for a nondegenerate simplex.
    """
    pts = np.asarray(simplex, dtype=float)
    q = np.asarray(q, dtype=float)
    s = insphere(pts, q)
    if s != 0:
        return s
    d = pts.shape[1]
    allp = np.vstack([pts, q[None, :]])
    allid = list(ids) + [q_id]
    c_q = (-1) ** (d + 1) * orient(pts)
    for row in sorted(range(d + 2), key=lambda r: -allid[r]):
        c = (-1) ** row * orient(np.delete(allp, row, axis=0))
        if c != 0:
            return -c * c_q
    raise AssertionError("perturbation failed to break the tie")
