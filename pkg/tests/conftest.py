import numpy as np
import pytest

from meshcert.mesh import Mesh

SQRT3 = np.sqrt(3.0)

RIGHT_TRIANGLE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
EQUILATERAL = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, SQRT3 / 2]])
REGULAR_TET = np.array([
    [0.0, 0.0, 0.0],
    [1.0, 0.0, 0.0],
    [0.5, SQRT3 / 2, 0.0],
    [0.5, SQRT3 / 6, np.sqrt(2.0 / 3.0)],
])
RIGHT_TET = np.vstack([np.zeros(3), np.eye(3)])
SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]])


def single(points):
    pts = np.asarray(points, dtype=float)
    return Mesh(pts, np.arange(len(pts))[None, :])


@pytest.fixture
def equilateral_mesh():
    return single(EQUILATERAL)


@pytest.fixture
def right_mesh():
    return single(RIGHT_TRIANGLE)


def random_rotation(d, rng):
    q, r = np.linalg.qr(rng.normal(size=(d, d)))
    return q * np.sign(np.diag(r))


def random_simplex(d, rng):
    while True:
        p = rng.normal(size=(d + 1, d))
        if abs(np.linalg.det(p[1:] - p[0])) > 0.05:
            return p


# acceptance criterion id -> (passed, title, detail); filled by test_acceptance
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {title}{' (' + detail + ')' if detail else ''}")
