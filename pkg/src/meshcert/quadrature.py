"""Grundmann-Moller quadrature on the d-simplex, generated on demand."""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

__all__ = ["QuadratureRule", "simplex_quadrature", "monomial_integral", "barycentric_exponents", "MAX_DEGREE"]

MAX_DEGREE = 25


@dataclass(frozen=True)
class QuadratureRule:
    """Barycentric nodes and weights normalized to sum to one.

    Integrate over a simplex ``K`` with ``|K| * weights @ f(nodes @ verts)``.
    """

    nodes: np.ndarray
    weights: np.ndarray
    exact_degree: int

    @property
    def dim(self) -> int:
        return self.nodes.shape[1] - 1

    def points(self, verts) -> np.ndarray:
        """Physical nodes for one simplex (or a stack of simplices)."""
        return np.einsum("qi,...id->...qd", self.nodes, np.asarray(verts, dtype=float))


def _compositions(total: int, parts: int):
    if parts == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _compositions(total - first, parts - 1):
            yield (first,) + rest


@lru_cache(maxsize=None)
def _grundmann_moller(d: int, s: int):
    deg = 2 * s + 1
    acc: dict[tuple, Fraction] = {}
    for i in range(s + 1):
        w = Fraction((-1) ** i * (deg + d - 2 * i) ** deg, 2 ** (2 * s) * math.factorial(i) * math.factorial(deg + d - i))
        den = deg + d - 2 * i
        for beta in _compositions(s - i, d + 1):
            node = tuple(Fraction(2 * b + 1, den) for b in beta)
            acc[node] = acc.get(node, Fraction(0)) + w
    total = sum(acc.values())
    keys = sorted(acc)
    nodes = np.array([[float(c) for c in k] for k in keys])
    weights = np.array([float(acc[k] / total) for k in keys])
    return nodes, weights


def simplex_quadrature(d: int, degree: int) -> QuadratureRule:
    """Rule on the reference d-simplex exact for total degree ``<= degree``."""
    if d < 1:
        raise ValueError("dimension must be >= 1")
    if degree < 0:
        raise ValueError("degree must be >= 0")
    if degree > MAX_DEGREE:
        raise ValueError(f"quadrature degree capped at {MAX_DEGREE}, got {degree}")
    s = max(0, math.ceil((degree - 1) / 2))
    nodes, weights = _grundmann_moller(d, s)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights, exact_degree=2 * s + 1)


def monomial_integral(exponents) -> Fraction:
    """Exact mean of ``prod(lambda_i ** a_i)`` over a simplex (barycentric).

    ``d! prod(a_i!) / (d + sum a_i)!`` with ``d = len(exponents) - 1``.
    """
    a = [int(x) for x in exponents]
    d = len(a) - 1
    num = math.factorial(d) * math.prod(math.factorial(x) for x in a)
    return Fraction(num, math.factorial(d + sum(a)))


def barycentric_exponents(d: int, degree: int):
    """Every exponent tuple over ``d+1`` barycentric coordinates of total degree ``<= degree``."""
    for total in range(degree + 1):
        yield from _compositions(total, d + 1)

