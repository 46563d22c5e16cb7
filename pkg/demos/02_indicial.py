"""Indicial roots and admissible weight windows.

The Mellin transform turns the dilation-invariant Laplacian into a quadratic
in tau.  Its roots fix which decay weights admit an invertible normal operator.
"""

from conicres.indicial import End, alpha_interval, central_interval, indicial_roots, mellin_symbol_eval
from conicres.model import AngularMode, ModelParams

for n in (3, 4, 5):
    p = ModelParams(n=n)
    scat = central_interval(p, End.SCATTERING).as_tuple()
    conic = central_interval(p, End.CONIC).as_tuple()
    print(f"n={n}: scattering-end interval {scat}, conic-point interval {conic}")
    for k in range(3):
        mode = AngularMode.sphere(k, n)
        r1, r2 = indicial_roots(p, mode)
        print(f"   k={k}: roots {r1:.4f}, {r2:.4f}  |symbol(root)| = {abs(mellin_symbol_eval(p, mode, r1)):.1e}")

skew = ModelParams(n=3, beta=0.6j, beta_prime=0.3)
print("with beta=0.6i, beta'=0.3, k=0 roots:", indicial_roots(skew, AngularMode.sphere(0, 3)))
print("alpha window for l=-0.75 on the free cone n=3:", alpha_interval(ModelParams(n=3), -0.75))
