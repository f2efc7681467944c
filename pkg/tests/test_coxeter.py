import itertools

import numpy as np
import pytest

from meshcert.coxeter import a_tilde_basis, coxeter_a_tilde
from meshcert.mesh import delaunay, measure_net, protection, validate_mesh


def sorted_edges(mesh):
    v = mesh.vertex_coords
    d = mesh.dim
    i, j = np.triu_indices(d + 1, k=1)
    return np.sort(np.linalg.norm(v[:, j] - v[:, i], axis=2), axis=1)


def test_equilateral_in_2d():
    m = coxeter_a_tilde(2, 5, 1.0)
    e = sorted_edges(m)
    assert np.allclose(e, e[0, 0], rtol=1e-12)
    assert np.allclose(m.thicknesses, 0.433013, atol=1e-6)


@pytest.mark.parametrize("d, layers", [(3, 3), (4, 2), (5, 1), (6, 1)])
def test_congruent_simplices(d, layers):
    m = coxeter_a_tilde(d, layers)
    e = sorted_edges(m)
    assert np.allclose(e, e[0], atol=1e-9)
    assert np.allclose(m.thicknesses, m.thicknesses[0], atol=1e-9)
    assert np.all(m.volumes > 0)


@pytest.mark.parametrize("d", [2, 3, 4])
def test_is_delaunay_with_positive_protection(d):
    m = coxeter_a_tilde(d, 2)
    assert validate_mesh(m).passed
    rep = protection(m)
    assert rep.is_delaunay and rep.delta > 0
    # the Delaunay triangulation of the vertices is the same complex
    dm = delaunay(m.points)
    assert {tuple(sorted(s)) for s in dm.simplices} == {tuple(sorted(s)) for s in m.simplices}


def test_alcove_metric():
    d = 4
    b = a_tilde_basis(d)
    for m in range(1, d + 1):
        for start in range(d - m + 1):
            v = b[start:start + m].sum(axis=0)
            assert v @ v == pytest.approx(m * (d + 1 - m) / (d + 1), rel=1e-12)


def test_scale_and_protection_ratio_recorded():
    m1, m2 = coxeter_a_tilde(2, 4, 1.0), coxeter_a_tilde(2, 4, 0.25)
    r1 = protection(m1).delta / measure_net(m1.points, mesh=m1).epsilon
    r2 = protection(m2).delta / measure_net(m2.points, mesh=m2).epsilon
    assert r1 == pytest.approx(r2, rel=1e-10)
    assert r1 > 0


def test_errors():
    with pytest.raises(ValueError):
        coxeter_a_tilde(1, 3)
    with pytest.raises(ValueError):
        coxeter_a_tilde(7, 1)
    with pytest.raises(ValueError):
        coxeter_a_tilde(2, 0)
