"""Approaching the real axis from above selects the outgoing solution.

Solutions at sigma = 0.1 + i eps converge, in a weighted space with l < -1/2,
to the solve with the outgoing closure at the outer end.
"""

from conicres.model import AngularMode, ModelParams
from conicres.solve import lap_limit

tab = lap_limit(ModelParams(n=3), AngularMode.sphere(0, 3), 0.1, [1e-1, 1e-2, 1e-3, 1e-4])
for eps, d in tab.rows():
    print(f"eps={eps:.0e}  distance to the outgoing solve {d:.3e}")
print(f"decrease factor {tab.decrease_factor:.1f}; outgoing solve vs Green oracle {tab.reference_error:.1e}")
