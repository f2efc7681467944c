"""
Mesh file format.

A JSON document::

    {"format": "meshcert-mesh", "version": 1, "dim": d,
     "points": [[x, ...], ...], "simplices": [[i, ...], ...],
     "interpolation_points": [[l0, ..., ld], ...]}   # optional

Reals are written with 17 significant digits, which round-trips IEEE
doubles; vertex ids are 0-based.  Readers reject any point or simplex whose
length disagrees with ``dim``.
"""
from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .mesh import Mesh

__all__ = ["MeshFormatError", "FORMAT", "VERSION", "format_real", "dumps_mesh", "write_mesh",
           "read_mesh", "loads_mesh", "read_points", "dumps_json"]

FORMAT = "meshcert-mesh"
VERSION = 1


class MeshFormatError(ValueError):
    """Malformed mesh document; the message names the offending line or field."""


def format_real(x: float) -> str:
    x = float(x)
    if not math.isfinite(x):
        raise ValueError(f"non-finite value {x!r} cannot be written")
    return format(x, ".17g")


def _rows(arr, fmt) -> str:
    return ",\n    ".join("[" + ", ".join(fmt(v) for v in row) + "]" for row in arr)


def dumps_mesh(mesh: Mesh, interpolation_points=None) -> str:
    parts = [
        "{",
        f'  "format": "{FORMAT}",',
        f'  "version": {VERSION},',
        f'  "dim": {mesh.dim},',
        '  "points": [\n    ' + _rows(mesh.points, format_real) + "\n  ],",
        '  "simplices": [\n    ' + _rows(mesh.simplices, lambda i: str(int(i))) + "\n  ]",
    ]
    if interpolation_points is not None:
        parts[-1] += ","
        parts.append('  "interpolation_points": [\n    ' + _rows(interpolation_points, format_real) + "\n  ]")
    parts.append("}")
    return "\n".join(parts) + "\n"


def write_mesh(path, mesh: Mesh, interpolation_points=None) -> None:
    Path(path).write_text(dumps_mesh(mesh, interpolation_points), encoding="utf-8", newline="\n")


def _array(doc, key, dtype, width, what):
    if key not in doc:
        raise MeshFormatError(f"field '{key}': missing")
    rows = doc[key]
    if not isinstance(rows, list) or not rows:
        raise MeshFormatError(f"field '{key}': expected a nonempty array")
    for n, row in enumerate(rows):
        if not isinstance(row, list):
            raise MeshFormatError(f"field '{key}[{n}]': expected an array")
        if len(row) != width:
            raise MeshFormatError(f"field '{key}[{n}]': expected {width} {what}, got {len(row)} (dim mismatch)")
        for m, v in enumerate(row):
            ok = isinstance(v, int) if dtype is int else isinstance(v, (int, float))
            if not ok or isinstance(v, bool):
                raise MeshFormatError(f"field '{key}[{n}][{m}]': expected {'an integer' if dtype is int else 'a real'}, got {v!r}")
    return np.array(rows, dtype=np.int64 if dtype is int else float)


def loads_mesh(text: str, source: str = "<string>") -> tuple[Mesh, np.ndarray | None]:
    """Parse a mesh document; returns the mesh and optional interpolation points."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise MeshFormatError(f"{source}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise MeshFormatError(f"{source}: top level must be an object")
    try:
        if doc.get("format", FORMAT) != FORMAT:
            raise MeshFormatError(f"field 'format': expected {FORMAT!r}, got {doc['format']!r}")
        if doc.get("version", VERSION) != VERSION:
            raise MeshFormatError(f"field 'version': unsupported version {doc['version']!r}")
        d = doc.get("dim")
        if not isinstance(d, int) or isinstance(d, bool) or d < 1:
            raise MeshFormatError(f"field 'dim': expected a positive integer, got {d!r}")
        pts = _array(doc, "points", float, d, "coordinates")
        sims = _array(doc, "simplices", int, d + 1, "vertex ids")
        if sims.min() < 0 or sims.max() >= len(pts):
            raise MeshFormatError(f"field 'simplices': vertex id out of range [0, {len(pts) - 1}]")
        ip = None
        if "interpolation_points" in doc:
            ip = _array(doc, "interpolation_points", float, d + 1, "barycentric coordinates")
        try:
            mesh = Mesh(pts, sims)
        except ValueError as exc:
            raise MeshFormatError(f"field 'simplices': {exc}") from None
    except MeshFormatError as exc:
        raise MeshFormatError(f"{source}: {exc}") from None
    return mesh, ip


def read_mesh(path) -> tuple[Mesh, np.ndarray | None]:
    path = Path(path)
    return loads_mesh(path.read_text(encoding="utf-8"), str(path))


def read_points(path) -> np.ndarray:
    """Points from a mesh document, a JSON ``{"points": ...}``/list, or whitespace/CSV text."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{") or stripped.startswith("["):
        try:
            doc = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MeshFormatError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        rows = doc.get("points") if isinstance(doc, dict) else doc
    else:
        rows = []
        for n, line in enumerate(text.splitlines(), 1):
            line = line.split("#")[0].strip()
            if not line:
                continue
            try:
                rows.append([float(v) for v in line.replace(",", " ").split()])
            except ValueError:
                raise MeshFormatError(f"{path}: line {n}: cannot parse coordinates") from None
    try:
        arr = np.array(rows, dtype=float)
    except (ValueError, TypeError):
        raise MeshFormatError(f"{path}: field 'points': rows of unequal length") from None
    if arr.ndim != 2 or arr.shape[0] == 0:
        raise MeshFormatError(f"{path}: field 'points': expected a nonempty list of coordinate rows")
    return arr


def _clean(obj):
    if isinstance(obj, dict):
        return {k: _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        return x if math.isfinite(x) else ("inf" if x > 0 else "-inf" if x < 0 else "nan")
    return obj


def dumps_json(obj) -> str:
    """Deterministic JSON for reports; non-finite reals become strings."""
    return json.dumps(_clean(obj), indent=2, sort_keys=False) + "\n"
