"""
The equivalence sandwich on a single equilateral triangle, then on slivers.

For a constant field w = (1, 0) every quantity has a closed form, so this is
a good place to see what the two constants C1 and C2 measure: C2 is a
"coarseness" factor that stays bounded, while C1 collapses as the element
flattens, and with it the lower bound.
"""
import numpy as np

from meshcert import Mesh, constant_c1, constant_c2, gradient_norm, roughness_functional, verify_equivalence


def constant(vec):
    return lambda x: np.tile(vec, (len(x), 1))


def show(pts, label):
    mesh = Mesh(np.asarray(pts, dtype=float), np.array([[0, 1, 2]]))
    w = constant([1.0, 0.0])
    nrm = gradient_norm(mesh, w)
    psi = roughness_functional(mesh, w)
    c1, c2 = constant_c1(mesh), constant_c2(mesh)
    print(f"{label:>22}: C1|w| = {c1 * nrm:.6f} <= Psi = {psi:.6f} <= C2|w| = {c2 * nrm:.6f}")


if __name__ == "__main__":
    show([[0, 0], [1, 0], [0.5, np.sqrt(3) / 2]], "equilateral")
    for height in (0.3, 0.05, 0.001):
        show([[0, 0], [1, 0], [0.5, height]], f"isosceles h={height}")

    print("\nfor a field normal to the long edge of a sliver the lower bound holds within a constant factor (~0.6):")
    sliver = Mesh(np.array([[0, 0], [1, 0], [0.5, 1e-3]]), np.array([[0, 1, 2]]))
    rep = verify_equivalence(sliver, [constant([0.0, 1.0])], names=["normal"])
    for c in rep.checks:
        print(f"  {c.check_id:<14} lhs {c.lhs:.3e}  rhs {c.rhs:.3e}  tightness {c.tightness:.3f}")
