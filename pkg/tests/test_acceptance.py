"""
Acceptance suite: one test per criterion, each printing a single pass/fail
line (also collected into the terminal summary).
"""
import contextlib
import itertools
import os
import subprocess
import sys

import numpy as np
import pytest

import conftest
from conftest import EQUILATERAL, SQUARE, random_simplex, single
from meshcert.coxeter import coxeter_a_tilde
from meshcert.fields import field_from_spec
from meshcert.functionals import (
    constant_c1,
    constant_c2,
    default_quadrature,
    gradient_norm,
    rajan_theta,
    roughness_functional,
    verify_equivalence,
    verify_error_estimates,
    verify_upper_bound,
)
from meshcert.geometry import _ball_brute_force, elevation, facet_normal_and_volume, min_containment_ball, simplex_volume
from meshcert.interpolation import build_scheme, lebesgue_constant, n_points
from meshcert.io import write_mesh
from meshcert.mesh import Mesh, delaunay, measure_net, protection, random_net, validate_mesh
from meshcert.sizing import constant_sizing
from meshcert.triangulations import planar_triangulations


@contextlib.contextmanager
def criterion(n, title):
    detail = []
    try:
        yield detail
    except BaseException:
        conftest.ACCEPTANCE[n] = (False, title, "; ".join(detail))
        print(f"criterion {n}: FAIL - {title}")
        raise
    conftest.ACCEPTANCE[n] = (True, title, "; ".join(detail))
    print(f"criterion {n}: PASS - {title} ({'; '.join(detail)})")


# -- shared batch for criteria 1 and 2 ---------------------------------------------

N_FIELDS = 100


def random_field(rng, d, trig):
    b = rng.normal(size=d)
    if trig:
        amp, freq, ph = rng.normal(size=d), rng.normal(scale=3.0, size=(d, d)), rng.uniform(0, 2 * np.pi, d)
        return lambda x: b + amp * np.sin(x @ freq + ph)
    a, q = rng.normal(size=(d, d)), rng.normal(size=(d, d, d))
    return lambda x: b + x @ a + np.einsum("pi,pj,kij->pk", x, x, q)


def batch_meshes():
    out = []
    for d, layers, n_net in ((2, 20, 300), (3, 6, 200), (4, 3, 90)):
        out.append((f"coxeter d={d}", coxeter_a_tilde(d, layers, 1.0 / layers)))
        out.append((f"random-net d={d}", delaunay(random_net(d, n_net, seed=d))))
    return out


@pytest.fixture(scope="module")
def batch():
    rng = np.random.default_rng(2024)
    items = []
    for name, mesh in batch_meshes():
        assert mesh.n_simplices <= 5000
        fields = [random_field(rng, mesh.dim, trig=bool(n % 2)) for n in range(N_FIELDS)]
        items.append((name, mesh, fields))
    return items


def test_criterion_1_equivalence_sandwich(batch):
    with criterion(1, "equivalence sandwich") as info:
        n_checks, worst = 0, 0.0
        for name, mesh, fields in batch:
            rep = verify_equivalence(mesh, fields, default_quadrature(mesh.dim, 6), rtol=1e-9)
            assert rep.passed, (name, [c.to_dict() for c in rep.failing()][:3])
            n_checks += len(rep.checks)
            worst = max(worst, max(c.tightness for c in rep.checks))
        info.append(f"{n_checks} checks on {len(batch)} meshes, max tightness {worst:.4f}")
        mesh = single(EQUILATERAL)
        w = lambda x: np.tile([1.0, 0.0], (len(x), 1))
        nrm = gradient_norm(mesh, w)
        triple = (constant_c1(mesh) * nrm, roughness_functional(mesh, w), constant_c2(mesh) * nrm)
        assert triple[0] == pytest.approx(0.493528, abs=1e-6)
        assert triple[1] == pytest.approx(0.805927, abs=1e-6)
        # the closed form sqrt(3) * (sqrt(3)/4)^(1/2) = 1.1397535...
        assert triple[2] == pytest.approx(np.sqrt(3.0) * np.sqrt(np.sqrt(3.0) / 4), abs=1e-12)
        assert triple[2] == pytest.approx(1.139754, abs=1e-6)
        info.append("triple " + ", ".join(f"{t:.6f}" for t in triple))


def test_criterion_2_upper_bound(batch):
    with criterion(2, "sup-norm upper bounds") as info:
        n_checks, worst = 0, 0.0
        for name, mesh, fields in batch:
            net = measure_net(mesh.points, mesh=mesh, n_samples=20_000)
            sup_kw = {"density": 12} if mesh.dim <= 3 else {"n_random": 300}
            rep = verify_upper_bound(mesh, fields, None, net, default_quadrature(mesh.dim, 6), sup_kw=sup_kw)
            assert rep.passed, (name, [c.to_dict() for c in rep.failing()][:3])
            n_checks += len(rep.checks)
            worst = max(worst, max(c.tightness for c in rep.checks))
        info.append(f"{n_checks} checks, safety 1.05, max tightness {worst:.4f}")


# -- criteria 3 and 4 ----------------------------------------------------------

LEVELS = 4


def study(d, k, spec):
    fld = field_from_spec(spec, d)
    scheme = build_scheme(d, k)
    lam = lebesgue_constant(scheme).value
    quad = default_quadrature(d, 2 * k + 2)
    base = 2 if d == 2 else 1
    rows = []
    for lev in range(LEVELS):
        layers = base * 2**lev
        mesh = coxeter_a_tilde(d, layers, 1.0 / layers)
        rep = verify_error_estimates(mesh, scheme, fld.vector, quad=quad, lebesgue=lam,
                                     vector=not fld.is_gradient)
        rows.append((float(mesh.diameters.max()), rep))
    return rows


@pytest.fixture(scope="module")
def studies():
    out = {}
    for d, k in itertools.product((2, 3), (1, 2, 3)):
        out[(d, k, "trig")] = study(d, k, "trig")
    for k in (1, 2, 3):
        out[(2, k, "vtrig")] = study(2, k, "vtrig")
    return out


def test_criterion_3_error_chain(studies):
    with criterion(3, "interpolation error-estimate chain") as info:
        for d, k in itertools.product((2, 3), (1, 2, 3)):
            coeffs = ",".join(["0.3"] + ["1"] * (k + 1))  # gradient of degree exactly k
            fld = field_from_spec(f"poly:{coeffs}", d)
            mesh = coxeter_a_tilde(d, 2, 0.5)
            rep = verify_error_estimates(mesh, build_scheme(d, k), fld.vector)
            assert rep.passed
            for c in rep.checks:
                assert c.lhs <= 1e-10 and c.rhs <= 1e-10, (d, k, c.to_dict())
        info.append("exact on degree-k targets")
        worst = 0.0
        for key, rows in studies.items():
            for h, rep in rows:
                assert rep.passed, (key, h, [c.to_dict() for c in rep.failing()])
                worst = max(worst, max(c.tightness for c in rep.checks))
        info.append(f"{len(studies)} studies x {LEVELS} levels, max tightness {worst:.3g}")


def test_criterion_4_convergence(studies):
    with criterion(4, "L2 gradient-error convergence rate") as info:
        for d, k in itertools.product((2, 3), (1, 2)):
            rows = studies[(d, k, "trig")]
            h = np.log([r[0] for r in rows])
            e = np.log([r[1].info["l2_error"] for r in rows])
            slope = float(np.polyfit(h, e, 1)[0])
            info.append(f"d={d} k={k} slope {slope:.3f}")
            assert slope >= k + 0.8


# -- criterion 5 ---------------------------------------------------------------

def brute_force_empty_balls(mesh, rtol=1e-9):
    c, r = mesh.circumcenters, mesh.circumradii
    for t in range(mesh.n_simplices):
        dist = np.linalg.norm(mesh.points - c[t], axis=1)
        others = np.setdiff1d(np.arange(len(mesh.points)), mesh.simplices[t])
        if np.any(dist[others] < r[t] * (1 - rtol)):
            return False
    return True


def test_criterion_5_delaunay():
    with criterion(5, "Delaunay correctness") as info:
        rng = np.random.default_rng(55)
        for inst in range(50):
            d = int(rng.integers(2, 5))
            n = int(rng.integers(d + 2, 201))
            pts = rng.random((n, d)) if inst % 2 else rng.normal(size=(n, d))
            mesh = delaunay(pts)
            assert validate_mesh(mesh).passed, (inst, d, n)
            assert brute_force_empty_balls(mesh), (inst, d, n)
        info.append("50 instances, N <= 200, d <= 4")
        a, b = delaunay(SQUARE), delaunay(SQUARE)
        assert np.array_equal(a.simplices, b.simplices) and a.n_simplices == 2
        delta = protection(a).delta
        assert abs(delta) <= 1e-12
        info.append(f"square delta {delta:g}")


# -- criterion 6 ---------------------------------------------------------------

def test_criterion_6_protection_thickness():
    with criterion(6, "protection/thickness bound") as info:
        for d, layers in ((2, 6), (3, 4), (4, 2)):
            mesh = coxeter_a_tilde(d, layers, 1.0 / layers)
            delta = protection(mesh).delta
            eps = measure_net(mesh.points, mesh=mesh).epsilon
            assert delta > 0
            floor = delta**2 / (8 * d * eps**2)
            assert np.all(mesh.thicknesses >= floor)
            c1_floor = np.sqrt((d + 1) / (2 * d)) * delta**2 / (8 * eps**2)
            assert constant_c1(mesh) >= c1_floor
            info.append(f"d={d} min xi {mesh.thicknesses.min():.4f} >= {floor:.4f}")


# -- criterion 7 ---------------------------------------------------------------

def test_criterion_7_rajan_minimality():
    with criterion(7, "Delaunay minimises Theta and max min-containment radius") as info:
        rng = np.random.default_rng(77)
        total = 0
        for _ in range(20):
            n = int(rng.integers(4, 8))
            pts = rng.random((n, 2))
            dt = delaunay(pts)
            theta_dt, r_dt = rajan_theta(dt)[0], dt.mcc_radii.max()
            tris = planar_triangulations(pts)
            total += len(tris)
            assert any(sorted(map(sorted, t.tolist())) == sorted(map(sorted, dt.simplices.tolist())) for t in tris)
            for t in tris:
                m = Mesh(pts, t)
                assert theta_dt <= rajan_theta(m)[0] + 1e-12
                assert r_dt <= m.mcc_radii.max() + 1e-12
        info.append(f"20 instances, {total} triangulations enumerated")


# -- criterion 8 ---------------------------------------------------------------

def test_criterion_8_geometry_identities():
    with criterion(8, "geometry identities") as info:
        rng = np.random.default_rng(8)
        for d in (1, 2, 3, 4, 5):
            for _ in range(10):
                p = random_simplex(d, rng)
                vol = simplex_volume(p)
                total = np.zeros(d)
                for s in range(d + 1):
                    normal, area = facet_normal_and_volume(p, s)
                    assert elevation(p, s) * area == pytest.approx(d * vol, rel=1e-10)
                    total += normal
                assert np.linalg.norm(total) <= 1e-10 * max(1.0, np.abs(p).max() ** (d - 1))
                c, r = min_containment_ball(p)
                cb, rb = _ball_brute_force(p, 1e-12)
                assert r == pytest.approx(rb, rel=1e-10)
            cloud = rng.normal(size=(d + 2, d))
            assert min_containment_ball(cloud)[1] == pytest.approx(_ball_brute_force(cloud, 1e-12)[1], rel=1e-10)
        info.append("elevation*facet = d*volume, sum of normals = 0, ball vs brute force")
        for d in (1, 2, 3):
            assert lebesgue_constant(build_scheme(d, 1)).value == 1.0
        lam = lebesgue_constant(build_scheme(1, 2)).value
        assert lam == pytest.approx(1.25, abs=1e-6)
        assert n_points(3, 2) == 10
        info.append(f"Lambda(k=1) = 1, Lambda(d=1,k=2) = {lam:.8f}, N_p(3,2) = 10")


# -- criterion 9 ---------------------------------------------------------------

def _cli(args, cwd):
    env = {k: v for k, v in os.environ.items() if k != "MESHCERT_OUTPUT_DIR"}
    return subprocess.run([sys.executable, "-m", "meshcert.cli", *map(str, args)],
                          capture_output=True, cwd=cwd, env=env)


def test_criterion_9_determinism(tmp_path):
    with criterion(9, "byte-identical outputs across runs") as info:
        mesh_path = tmp_path / "mesh.json"
        write_mesh(mesh_path, coxeter_a_tilde(2, 4, 0.25))
        commands = {
            "report": ["report", "--mesh", mesh_path, "--degree", 2, "--seed", 7, "--threads", 1],
            "verify": ["verify", "--mesh", mesh_path, "--degree", 2, "--seed", 7, "--threads", 1],
            "interp-study": ["interp-study", "--dim", 2, "--degree", 2, "--levels", 3, "--seed", 7, "--threads", 1],
        }
        for name, args in commands.items():
            outs = []
            for run in range(2):
                out = tmp_path / f"{name}-{run}.out"
                res = _cli([*args, "--out", out], tmp_path)
                assert res.returncode == 0, res.stderr
                outs.append(out.read_bytes())
            assert outs[0] == outs[1], name
            info.append(f"{name} {len(outs[0])} bytes")
