"""
Among all triangulations of a small planar point set, the Delaunay one
minimises both the weighted squared-edge functional Theta and the largest
min-containment radius.  Enumerate every triangulation and check.
"""
import numpy as np

from meshcert import Mesh, delaunay, rajan_theta
from meshcert.triangulations import planar_triangulations

if __name__ == "__main__":
    rng = np.random.default_rng(3)
    pts = rng.random((7, 2))
    dt = delaunay(pts)
    tris = planar_triangulations(pts)
    print(f"{len(tris)} triangulations of 7 random points")
    scores = []
    for t in tris:
        m = Mesh(pts, t)
        scores.append((rajan_theta(m)[0], m.mcc_radii.max(), sorted(map(sorted, t.tolist()))))
    scores.sort()
    key = sorted(map(sorted, dt.simplices.tolist()))
    for theta, rmax, simp in scores[:5]:
        tag = "  <- Delaunay" if simp == key else ""
        print(f"  Theta {theta:.6f}  max R_min {rmax:.6f}{tag}")
    print(f"  ... worst Theta {scores[-1][0]:.6f}")
