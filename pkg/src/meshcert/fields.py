"""
Named analytic test fields.

Each field carries a scalar potential ``v`` with its gradient, or (for the
vector family) only the vector field itself.  All evaluators take ``(M, d)``
arrays of points.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

__all__ = ["NamedField", "field_from_spec", "FIELD_HELP"]

FIELD_HELP = (
    "zero | trig | radial | poly:c0,c1,... (v = sum c_n s^n, s = sum_i i*x_i/d) | "
    "vtrig (vector field f_i = sin or cos of the next coordinate)"
)


@dataclass(frozen=True)
class NamedField:
    name: str
    vector: Callable[[np.ndarray], np.ndarray]
    v: Callable[[np.ndarray], np.ndarray] | None = None
    is_gradient: bool = True
    poly_degree: int | None = None  # degree of the vector field if polynomial


def _trig(d: int) -> NamedField:
    # v = sin(x1) * prod_{i>1} cos(x_i)
    def v(x):
        return np.sin(x[:, 0]) * np.prod(np.cos(x[:, 1:]), axis=1)

    def grad(x):
        s, c = np.sin(x), np.cos(x)
        out = np.empty_like(x)
        for i in range(d):
            parts = [c[:, 0] if i == 0 else s[:, 0]]
            for j in range(1, d):
                parts.append(-s[:, j] if j == i else c[:, j])
            out[:, i] = np.prod(parts, axis=0)
        return out

    return NamedField("trig", grad, v)


def _radial(d: int) -> NamedField:
    def v(x):
        return np.exp(-(x * x).sum(axis=1))

    def grad(x):
        return -2.0 * x * v(x)[:, None]

    return NamedField("radial", grad, v)


def _poly(d: int, coeffs: list[float]) -> NamedField:
    w = np.arange(1, d + 1, dtype=float) / d
    c = np.asarray(coeffs, dtype=float)
    dc = c[1:] * np.arange(1, len(c))

    def v(x):
        return np.polynomial.polynomial.polyval(x @ w, c)

    def grad(x):
        ds = np.polynomial.polynomial.polyval(x @ w, dc) if len(dc) else np.zeros(len(x))
        return ds[:, None] * w[None, :]

    return NamedField("poly:" + ",".join(repr(float(a)) for a in coeffs), grad, v,
                     poly_degree=max(0, len(c) - 2))


def _zero(d: int) -> NamedField:
    return NamedField("zero", lambda x: np.zeros_like(x), lambda x: np.zeros(len(x)), poly_degree=0)


def _vtrig(d: int) -> NamedField:
    def f(x):
        out = np.empty_like(x)
        for i in range(d):
            nxt = x[:, (i + 1) % d]
            out[:, i] = np.sin(nxt) if i % 2 == 0 else np.cos(nxt)
        return out

    return NamedField("vtrig", f, None, is_gradient=False)


def field_from_spec(spec: str, d: int) -> NamedField:
    kind, _, args = spec.partition(":")
    if kind == "trig":
        return _trig(d)
    if kind == "radial":
        return _radial(d)
    if kind == "zero":
        return _zero(d)
    if kind == "vtrig":
        return _vtrig(d)
    if kind == "poly" and args:
        return _poly(d, [float(a) for a in args.split(",")])
    raise ValueError(f"unrecognised field spec {spec!r}; expected {FIELD_HELP}")
