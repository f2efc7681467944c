import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import EQUILATERAL, SQUARE, single
from meshcert.mesh import NetParams, delaunay
from meshcert.sizing import (
    SizingField,
    affine_sizing,
    c3_from_parts,
    compute_zeta,
    constant_c3,
    constant_sizing,
    estimate_hessian_sup,
    radial_quadratic_sizing,
    sizing_bounds,
    sizing_from_spec,
)


def test_zeta_zero_when_sizing_matches_mesh():
    m = single(EQUILATERAL)
    es = compute_zeta(m, constant_sizing(1.0))
    assert np.all(es.zeta == 0.0)


def test_zeta_single_triangle_diameter_two():
    m = single(2 * EQUILATERAL)
    es = compute_zeta(m, constant_sizing(1.0))
    assert es.zeta[0] == pytest.approx(0.75)


def test_zeta_linear_sizing_hand_evaluation():
    # 1/D^2 = 1 + 2x on the right triangle with legs 1: vertex values 1, 3, 1
    m = single([[0, 0], [1, 0], [0, 1]])
    es = compute_zeta(m, affine_sizing(1.0, [2.0, 0.0]))
    # 1/diam^2 = 0.5 lies below the interval [1, 3]: nearest endpoint gives 0.5
    assert es.min_vertex_value[0] == 1.0 and es.max_vertex_value[0] == 3.0
    assert es.zeta[0] == pytest.approx(0.5)
    # mesh spacing inside the interval -> zero
    m2 = single(0.6 * np.array([[0, 0], [1, 0], [0, 1.0]]))
    es2 = compute_zeta(m2, affine_sizing(1.0, [2.0, 0.0]))
    assert es2.inv_diam2[0] == pytest.approx(1 / 0.72)
    assert es2.max_vertex_value[0] == pytest.approx(2.2)
    assert es2.zeta[0] == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_zeta_satisfies_both_inequalities(seed):
    rng = np.random.default_rng(seed)
    m = delaunay(rng.random((12, 2)))
    f = radial_quadratic_sizing(rng.uniform(0.5, 50), rng.uniform(0, 20), rng.random(2))
    es = compute_zeta(m, f)
    tol = 1e-12 * es.max_vertex_value
    assert np.all(es.min_vertex_value <= es.inv_diam2 + es.zeta + tol)
    assert np.all(es.inv_diam2 + es.zeta <= es.max_vertex_value + tol)


def test_nonpositive_field_rejected():
    m = single(EQUILATERAL)
    with pytest.raises(ValueError):
        compute_zeta(m, affine_sizing(-1.0, [0.0, 0.0]))


@pytest.mark.parametrize("fn, expected", [
    (lambda x: np.full(len(x), 3.0), 0.0),
    (lambda x: x[:, 0] ** 2, 2.0),
    (lambda x: x[:, 0] * x[:, 1], 1.0),
])
def test_hessian_estimate_examples(fn, expected):
    m = delaunay(SQUARE)
    probes = np.random.default_rng(0).random((50, 2)) * 0.98 + 0.01
    assert estimate_hessian_sup(SizingField(fn), probes, mesh=m) == pytest.approx(expected, abs=1e-5)


def test_hessian_probe_outside_hull():
    with pytest.raises(ValueError):
        estimate_hessian_sup(SizingField(lambda x: x[:, 0] ** 2), [[2.0, 2.0]], mesh=delaunay(SQUARE))


def test_bounds_flag_estimates():
    m = delaunay(SQUARE)
    b = sizing_bounds(m, SizingField(lambda x: 1 + x[:, 0] ** 2))
    assert b.hessian_is_estimate and b.value_is_estimate
    assert b.hessian_sup >= 2.0 and b.value_sup >= 2.0
    b2 = sizing_bounds(m, radial_quadratic_sizing(1.0, 1.0, [0, 0]))
    assert not b2.hessian_is_estimate and b2.hessian_sup == 2.0 and b2.value_sup == 3.0


def test_c3_examples():
    m = single(EQUILATERAL)
    one = constant_sizing(1.0)
    r = constant_c3(m, one, NetParams(1.0, 1.0, 1.0))
    assert r.c3 == pytest.approx(1.0)
    r = constant_c3(m, one, NetParams(1.0, 1.0, 0.5))
    assert r.c3 == pytest.approx(1.0) and r.branch == "sizing"
    small = single(0.5 * EQUILATERAL)  # zeta = 1 - 4 = -3
    assert compute_zeta(small, one).zeta[0] == pytest.approx(-3.0)
    r = constant_c3(small, one, NetParams(1.0, 1.0, 0.5))
    assert r.c3 == pytest.approx(2.0) and r.branch == "separation"


def test_c3_requires_net():
    with pytest.raises(ValueError):
        constant_c3(single(EQUILATERAL), constant_sizing(1.0), None)


@settings(max_examples=100, deadline=None)
@given(st.floats(0.01, 2), st.floats(0, 50), st.floats(0.1, 10), st.floats(0, 10), st.floats(0.05, 2),
       st.floats(1.0, 3.0))
def test_c3_monotone_and_capped(rmin, hess, sup, zeta, eta, factor):
    base = c3_from_parts(rmin, hess, sup, zeta, eta).c3
    assert c3_from_parts(rmin * factor, hess, sup, zeta, eta).c3 >= base
    assert c3_from_parts(rmin, hess * factor, sup, zeta, eta).c3 >= base
    assert c3_from_parts(rmin, hess, sup, zeta * factor, eta).c3 >= base
    assert base <= 1 / eta * (1 + 1e-15)


def test_sizing_spec_parsing():
    m = delaunay(SQUARE)
    assert sizing_from_spec("auto", m).inv_d2(np.zeros((1, 2)))[0] == pytest.approx(0.5)
    assert sizing_from_spec("constant:0.5", m).inv_d2(np.zeros((1, 2)))[0] == pytest.approx(4.0)
    assert sizing_from_spec("affine:1,2,3", m).inv_d2(np.ones((1, 2)))[0] == pytest.approx(6.0)
    assert sizing_from_spec("radial:1,2,0,0", m).inv_d2(np.ones((1, 2)))[0] == pytest.approx(5.0)
    with pytest.raises(ValueError):
        sizing_from_spec("affine:1", m)
