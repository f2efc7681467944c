"""
Refinement study: interpolation error of the gradient of sin(x1)cos(x2)
against the certified upper bound, on nested Coxeter meshes.

Both the error and the bound decay like h^(k+1); the ratio between them is
the price of the general-purpose constants.  The same table is available as
CSV through ``meshcert interp-study``.
"""
from meshcert.cli import interp_study_rows

if __name__ == "__main__":
    for k in (1, 2, 3):
        cfg = {"dim": 2, "degree": k, "levels": 4, "base_layers": None, "field": "trig",
               "sizing": "auto", "seed": 0}
        rows, slopes = interp_study_rows(cfg)
        print(f"k = {k}")
        print(f"  {'h':>8} {'L2 error':>11} {'bound':>11} {'ratio':>7}")
        for r in rows:
            print(f"  {r[0]:8.4f} {r[1]:11.3e} {r[4]:11.3e} {r[4] / r[1]:7.1f}")
        print(f"  observed slopes (L2, sup, Psi): {', '.join(f'{s:.2f}' for s in slopes)}\n")
