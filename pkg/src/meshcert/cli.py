"""
Command-line front end.

Subcommands: ``gen-coxeter``, ``gen-random-net``, ``delaunay``, ``report``,
``verify`` and ``interp-study``.  Settings come from flags, then an optional
JSON config file (``--config``), then built-in defaults; the effective values
are echoed into every report header.  Relative output paths and omitted
``--out`` resolve against ``$MESHCERT_OUTPUT_DIR`` when it is set.

Exit codes: 0 success, 1 a verification inequality failed, 2 bad input.
"""
from __future__ import annotations

import argparse
import csv
import io as _io
import json
import math
import os
import sys
import warnings
from pathlib import Path

import numpy as np

from . import io
from .coxeter import coxeter_a_tilde
from .fields import FIELD_HELP, field_from_spec
from .functionals import (
    ANCHORS,
    ErrorField,
    VerificationReport,
    constant_c1,
    default_quadrature,
    quality_report,
    rajan_theta,
    sup_norm,
    verify_equivalence,
    verify_error_estimates,
    verify_upper_bound,
)
from .interpolation import build_scheme, interpolate_vector, lebesgue_constant
from .mesh import Mesh, delaunay, measure_net, random_net
from .sizing import sizing_from_spec

__all__ = ["main", "build_parser", "DEFAULTS"]

ENV_OUTPUT_DIR = "MESHCERT_OUTPUT_DIR"

DEFAULTS = {
    "dim": 2,
    "degree": 2,
    "levels": 4,
    "layers": 4,
    "base_layers": None,
    "field": "trig",
    "sizing": "auto",
    "seed": 0,
    "threads": 1,
    "n_points": 200,
    "points": None,
    "mesh": None,
    "out": None,
    "inject_c1_factor": None,
}

DEFAULT_NAMES = {
    "gen-coxeter": "coxeter.json",
    "gen-random-net": "random_net.json",
    "delaunay": "delaunay.json",
    "report": "report.json",
    "verify": "verify.json",
    "interp-study": "interp_study.csv",
}


class UsageError(Exception):
    """Bad input; reported with exit code 2."""


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults (keys as in the long flags)")
    common.add_argument("--out", help="output file (default: stdout, or $%s/<name>)" % ENV_OUTPUT_DIR)
    common.add_argument("--seed", type=int, help="random seed (default 0)")
    common.add_argument("--threads", type=int, help="thread count, echoed for provenance (computation is serial)")

    p = argparse.ArgumentParser(prog="meshcert", description=__doc__.split("\n\n")[0])
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen-coxeter", parents=[common], help="write a Coxeter A~_d patch")
    g.add_argument("--dim", type=int)
    g.add_argument("--layers", type=int, help="grid cubes per axis (default 4)")
    g.add_argument("--scale", type=float, help="grid spacing (default 1/layers)")

    g = sub.add_parser("gen-random-net", parents=[common], help="write the Delaunay mesh of a random net")
    g.add_argument("--dim", type=int)
    g.add_argument("--n-points", dest="n_points", type=int, help="number of points (default 200)")

    g = sub.add_parser("delaunay", parents=[common], help="triangulate a point file")
    g.add_argument("--points", help="point file: mesh JSON, JSON list, or whitespace/CSV rows")

    for name, hlp in (("report", "mesh quality report"), ("verify", "check the inequalities on a mesh")):
        g = sub.add_parser(name, parents=[common], help=hlp)
        g.add_argument("--mesh", help="mesh file")
        g.add_argument("--degree", type=int, help="interpolation degree k (default 2)")
        g.add_argument("--sizing", help="auto | constant:h | affine:a,b1..bd | radial:a,b,c1..cd")
        g.add_argument("--points", help="JSON sidecar of barycentric interpolation points")
        if name == "verify":
            g.add_argument("--field", help=FIELD_HELP)
            g.add_argument("--inject-c1-factor", dest="inject_c1_factor", type=float, help=argparse.SUPPRESS)

    g = sub.add_parser("interp-study", parents=[common], help="convergence study on refined Coxeter patches")
    g.add_argument("--dim", type=int)
    g.add_argument("--degree", type=int)
    g.add_argument("--levels", type=int, help="number of refinement levels (default 4)")
    g.add_argument("--base-layers", dest="base_layers", type=int,
                   help="layers of the coarsest patch (default 2 for d=2, 1 otherwise)")
    g.add_argument("--field", help=FIELD_HELP)
    g.add_argument("--sizing")
    return p


def _resolve(args: argparse.Namespace) -> dict:
    cfg = dict(DEFAULTS)
    if getattr(args, "config", None):
        path = Path(args.config)
        if not path.is_file():
            raise UsageError(f"config file not found: {path}")
        try:
            loaded = json.loads(path.read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise UsageError(f"{path}: line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
        if not isinstance(loaded, dict):
            raise UsageError(f"{path}: config must be a JSON object")
        for key, val in loaded.items():
            key = key.replace("-", "_")
            if key not in cfg and key != "scale":
                raise UsageError(f"{path}: unknown config key {key!r}")
            cfg[key] = val
    for key, val in vars(args).items():
        if key in ("config",) or val is None:
            continue
        cfg[key] = val
    cfg["command"] = args.command
    return cfg


def _out_path(cfg: dict) -> Path | None:
    env = os.environ.get(ENV_OUTPUT_DIR)
    out = cfg.get("out")
    if out is None:
        return Path(env) / DEFAULT_NAMES[cfg["command"]] if env else None
    out = Path(out)
    if not out.is_absolute() and env:
        out = Path(env) / out
    return out


def _emit(cfg: dict, text: str) -> None:
    path = _out_path(cfg)
    if path is None:
        sys.stdout.write(text)
        return
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
    print(f"wrote {path}", file=sys.stderr)


HEADER_KEYS = {
    "report": ("mesh", "degree", "sizing", "points", "seed", "threads"),
    "verify": ("mesh", "degree", "field", "sizing", "points", "seed", "threads"),
    "interp-study": ("dim", "degree", "levels", "base_layers", "field", "sizing", "seed", "threads"),
}


def _header(cfg: dict) -> dict:
    out = {"command": cfg["command"]}
    out.update({k: cfg.get(k) for k in HEADER_KEYS[cfg["command"]]})
    if cfg.get("inject_c1_factor") is not None:
        out["inject_c1_factor"] = cfg["inject_c1_factor"]
    return out


def _load_mesh(cfg: dict) -> tuple[Mesh, np.ndarray | None]:
    if not cfg.get("mesh"):
        raise UsageError("--mesh is required")
    path = Path(cfg["mesh"])
    if not path.is_file():
        raise UsageError(f"mesh file not found: {path}")
    return io.read_mesh(path)


def _scheme(cfg: dict, d: int, sidecar):
    pts = sidecar
    if cfg.get("points"):
        from .interpolation import load_points_sidecar

        path = Path(cfg["points"])
        if not path.is_file():
            raise UsageError(f"points file not found: {path}")
        pts = load_points_sidecar(path)
    scheme = build_scheme(d, int(cfg["degree"]), pts)
    lebesgue_constant(scheme)
    return scheme


# -- commands -------------------------------------------------------------------

def cmd_gen_coxeter(cfg: dict) -> int:
    layers = int(cfg["layers"])
    scale = float(cfg["scale"]) if cfg.get("scale") is not None else 1.0 / layers
    mesh = coxeter_a_tilde(int(cfg["dim"]), layers, scale)
    _emit(cfg, io.dumps_mesh(mesh))
    return 0


def cmd_gen_random_net(cfg: dict) -> int:
    pts = random_net(int(cfg["dim"]), int(cfg["n_points"]), int(cfg["seed"]))
    _emit(cfg, io.dumps_mesh(delaunay(pts)))
    return 0


def cmd_delaunay(cfg: dict) -> int:
    if not cfg.get("points"):
        raise UsageError("--points is required")
    path = Path(cfg["points"])
    if not path.is_file():
        raise UsageError(f"points file not found: {path}")
    _emit(cfg, io.dumps_mesh(delaunay(io.read_points(path))))
    return 0


def cmd_report(cfg: dict) -> int:
    mesh, sidecar = _load_mesh(cfg)
    scheme = _scheme(cfg, mesh.dim, sidecar)
    sizing = sizing_from_spec(cfg["sizing"], mesh)
    net = measure_net(mesh.points, mesh=mesh, seed=int(cfg["seed"]))
    rep = quality_report(mesh, scheme, sizing, net)
    data = rep.to_dict()
    doc = {
        "header": _header(cfg),
        "report": data,
        "anchors": {k: ANCHORS[k] for k in ANCHORS if k in data},
    }
    _emit(cfg, io.dumps_json(doc))
    return 0


def run_verify(mesh: Mesh, cfg: dict, sidecar=None) -> VerificationReport:
    d = mesh.dim
    fld = field_from_spec(cfg["field"], d)
    scheme = _scheme(cfg, d, sidecar)
    sizing = sizing_from_spec(cfg["sizing"], mesh)
    net = measure_net(mesh.points, mesh=mesh, seed=int(cfg["seed"]))
    quad = default_quadrature(d, 2 * scheme.degree + 2)
    c1 = None
    if cfg.get("inject_c1_factor") is not None:
        c1 = constant_c1(mesh) * float(cfg["inject_c1_factor"])
    rep = verify_equivalence(mesh, [fld.vector], quad, c1=c1, names=[fld.name])
    rep.extend(verify_upper_bound(mesh, [fld.vector], sizing, net, quad, names=[fld.name],
                                  sup_kw={"seed": int(cfg["seed"])}))
    rep.extend(verify_error_estimates(mesh, scheme, fld.vector, sizing, net, quad,
                                      vector=not fld.is_gradient, name=fld.name))
    return rep


def cmd_verify(cfg: dict) -> int:
    mesh, sidecar = _load_mesh(cfg)
    rep = run_verify(mesh, cfg, sidecar)
    doc = {
        "header": _header(cfg),
        "passed": rep.passed,
        "checks": [c.to_dict() for c in rep.checks],
        "info": rep.info,
    }
    _emit(cfg, io.dumps_json(doc))
    if not rep.passed:
        anchors = sorted({c.paper_anchor for c in rep.failing()})
        print("verification failed: " + ", ".join(anchors), file=sys.stderr)
        return 1
    return 0


STUDY_COLUMNS = ["h", "l2_error", "sup_error", "psi_error", "bound_rhs", "lambda", "theta", "c1", "c3"]


def interp_study_rows(cfg: dict) -> tuple[list[list[float]], list[float] | None]:
    d, k, levels = int(cfg["dim"]), int(cfg["degree"]), int(cfg["levels"])
    base = cfg.get("base_layers") or (2 if d == 2 else 1)
    fld = field_from_spec(cfg["field"], d)
    scheme = build_scheme(d, k)
    lam = lebesgue_constant(scheme).value
    quad = default_quadrature(d, 2 * k + 2)
    rows = []
    for lev in range(levels):
        layers = base * 2**lev
        mesh = coxeter_a_tilde(d, layers, 1.0 / layers)
        sizing = sizing_from_spec(cfg["sizing"], mesh)
        net = measure_net(mesh.points, mesh=mesh, seed=int(cfg["seed"]))
        rep = verify_error_estimates(mesh, scheme, fld.vector, sizing, net, quad, lebesgue=lam,
                                     vector=not fld.is_gradient)
        interp = interpolate_vector(mesh, scheme, fld.vector)
        sup_err = sup_norm(mesh, ErrorField(fld.vector, interp), safety=1.0, seed=int(cfg["seed"]),
                           **({"n_random": 2000} if d >= 4 else {}))
        info = rep.info
        l2_bound = next(c.rhs for c in rep.checks if c.check_id.endswith("l2_error"))
        rows.append([float(mesh.diameters.max()), info["l2_error"], sup_err, info["psi_error"], l2_bound,
                     lam, rajan_theta(mesh)[0], info["c1"], info["c3"]])
    slopes = None
    if levels >= 2:
        h = np.log([r[0] for r in rows])
        slopes = []
        for col in (1, 2, 3):
            e = np.array([r[col] for r in rows])
            slopes.append(float(np.polyfit(h, np.log(e), 1)[0]) if np.all(e > 0) else float("nan"))
    return rows, slopes


def cmd_interp_study(cfg: dict) -> int:
    if int(cfg["levels"]) < 2:
        warnings.warn("a single refinement level: convergence slope omitted", stacklevel=1)
        print("warning: a single refinement level; convergence slope omitted", file=sys.stderr)
    rows, slopes = interp_study_rows(cfg)
    buf = _io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(STUDY_COLUMNS)
    for r in rows:
        w.writerow([io.format_real(v) for v in r])
    if slopes is not None:
        w.writerow(["slope"] + [io.format_real(s) if math.isfinite(s) else "nan" for s in slopes]
                   + [""] * (len(STUDY_COLUMNS) - 4))
    _emit(cfg, buf.getvalue())
    return 0


COMMANDS = {
    "gen-coxeter": cmd_gen_coxeter,
    "gen-random-net": cmd_gen_random_net,
    "delaunay": cmd_delaunay,
    "report": cmd_report,
    "verify": cmd_verify,
    "interp-study": cmd_interp_study,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = _resolve(args)
        return COMMANDS[cfg["command"]](cfg)
    except (UsageError, io.MeshFormatError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
