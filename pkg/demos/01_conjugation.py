"""Conjugating away the outgoing oscillation.

P(sigma) = Delta + W - sigma^2 has outgoing solutions behaving like
exp(i sigma rho).  After conjugation by that phase the operator gains an extra
order of vanishing at x = 0.  Here the conjugated coefficients are compared with
a brute-force conjugation of the unconjugated operator on a grid.
"""

import numpy as np

from conicres.discretization import LogGrid
from conicres.model import (AngularMode, ModelParams, OperatorKind, Potential, SpectralParam, apply_coeffs,
                            apply_conjugation, build_coeffs)

params = ModelParams(n=3, potential=Potential(lambda x: 0.7 * x ** 2 / (1 + x ** 2), 2.0))
mode = AngularMode.sphere(1, 3)
sigma = SpectralParam(0.05)
grid = LogGrid.from_spacing(-5.5, 5.5, 0.02)

u = np.exp(-(grid.t / 0.45) ** 2)
direct = apply_conjugation(params, mode, sigma, u, grid)
fast = apply_coeffs(build_coeffs(params, mode, sigma, OperatorKind.CONJUGATED), grid, u)
inner = slice(grid.num_points // 10, 9 * grid.num_points // 10)
err = np.linalg.norm((direct - fast)[inner]) / np.linalg.norm(fast[inner])
print(f"relative gap between oracle and conjugated coefficients: {err:.2e}")

coeffs = build_coeffs(params, mode, sigma, OperatorKind.CONJUGATED)
x = np.array([1e-2, 1e-4, 1e-6, 1e-8])
print("x, |c2|, |c1|, |c0| near the boundary at infinity (all shrink with x):")
for xi, c2, c1, c0 in zip(x, coeffs.c2(x), coeffs.c1(x), coeffs.c0(x)):
    print(f"  {xi:.0e}  {abs(c2):.2e}  {abs(c1):.2e}  {abs(c0):.2e}")
