"""Weighted b-Sobolev norms on a log-radial grid.

Gram matrices are banded; the built-in self tests compare them with closed-form
integrals and check the Mellin picture of the b-Laplacian.
"""

import numpy as np

from conicres.discretization import LogGrid, NormSpec, gram, mellin, norm_selftests
from conicres.model import AngularMode

for test in norm_selftests():
    mark = "ok " if test.passed else "BAD"
    print(f"[{mark}] {test.check:<40} error {test.error:.1e} (tol {test.tol:.0e})")

grid = LogGrid.from_spacing(-8, 8, 0.05)
u = np.exp(-grid.t ** 2) / (1 + grid.rho ** 2)
for s in (0, 1, 2):
    G = gram(NormSpec(s=s, l=-0.75), grid, AngularMode.sphere(1, 3))
    print(f"H_b^{{{s},-0.75}} norm of the test function: {G.norm_of(u):.6f} (bandwidth {G.bandwidth})")

ms = mellin(np.exp(-grid.t ** 2), grid)
i0 = int(np.argmin(np.abs(ms.tau)))
print(f"Mellin transform of a Gaussian at tau=0: {ms.values[i0].real:.10f} vs sqrt(pi) = {np.sqrt(np.pi):.10f}")
