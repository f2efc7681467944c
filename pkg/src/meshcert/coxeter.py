"""
Coxeter triangulations of type A~_d.

The Freudenthal-Kuhn triangulation of the integer grid (one simplex per
cube and coordinate ordering) is mapped linearly so that the unit vector
``e_k`` goes to the projection of the k-th standard basis vector of
R^(d+1) onto the hyperplane ``sum(x) = 0``.  A run of ``m`` consecutive
steps then has squared length ``m (d + 1 - m) / (d + 1)``, which is the
A~_d alcove metric, and every simplex is congruent to every other.
"""
from __future__ import annotations

import itertools

import numpy as np

from .mesh import Mesh

__all__ = ["coxeter_a_tilde", "a_tilde_basis", "MAX_DIM"]

MAX_DIM = 6


def a_tilde_basis(d: int) -> np.ndarray:
    """``(d, d)`` matrix whose row k is the image of ``e_k``."""
    # Helmert basis of {sum = 0} in R^(d+1), columns orthonormal
    helm = np.zeros((d + 1, d))
    for j in range(1, d + 1):
        helm[:j, j - 1] = 1.0
        helm[j, j - 1] = -j
        helm[:, j - 1] /= np.sqrt(j * (j + 1))
    return helm[:d]


def coxeter_a_tilde(d: int, layers: int, scale: float = 1.0) -> Mesh:
    """Patch of the A~_d triangulation covering ``layers**d`` grid cubes.

    ``scale`` is applied to the grid spacing, so ``scale = 1/layers`` refines
    a fixed parallelepiped.
    """
    if not 2 <= d <= MAX_DIM:
        raise ValueError(f"Coxeter A~_d patches are supported for 2 <= d <= {MAX_DIM}, got {d}")
    if layers < 1:
        raise ValueError("layers must be >= 1")
    shape = (layers + 1,) * d
    grid = np.array(list(itertools.product(range(layers + 1), repeat=d)), dtype=np.int64)
    points = scale * (grid @ a_tilde_basis(d))

    perms = np.array(list(itertools.permutations(range(d))), dtype=np.int64)
    # cumulative offsets: vertex m of the simplex for permutation pi is sum of e_pi[:m]
    offs = np.zeros((len(perms), d + 1, d), dtype=np.int64)
    for m in range(1, d + 1):
        offs[:, m] = offs[:, m - 1]
        offs[np.arange(len(perms)), m, perms[:, m - 1]] += 1
    bases = np.array(list(itertools.product(range(layers), repeat=d)), dtype=np.int64)
    corners = bases[:, None, None, :] + offs[None, :, :, :]
    ids = np.ravel_multi_index(tuple(np.moveaxis(corners, -1, 0)), shape)
    simplices = ids.reshape(-1, d + 1)
    # orient positively
    v = points[simplices]
    neg = np.linalg.det(v[:, 1:] - v[:, :1]) < 0
    simplices[neg, 0], simplices[neg, 1] = simplices[neg, 1], simplices[neg, 0].copy()
    return Mesh(points, simplices)
