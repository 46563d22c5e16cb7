"""Uniform low-energy estimates and their failure outside the weight window.

For each sigma the best constant C(sigma) in ||u|| <= C ||P-hat(sigma) u|| is the
largest generalized singular value of the discretized operator between two
weighted norms.  Inside the admissible alpha range it stays bounded as sigma
goes to zero, and outside it the constants blow up.
"""

from conicres.estimates import SweepConfig, sigma_sweep

for alpha in (0.0, 1.2, -0.5):
    rep = sigma_sweep(SweepConfig.standard("RemarkB", alpha=alpha))
    cs = ", ".join(f"{c:.3g}" for c in rep.c_max)
    print(f"alpha={alpha:+.1f}  window {rep.alpha_window}  C per sigma [{cs}]")
    print(f"            fitted slope {rep.slope:+.3f}, verdict {rep.verdict}")
