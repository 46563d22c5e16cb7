"""Symbolic commutator identities.

Symbols are finite sums of monomials in x, sigma, tau, mu^2 and (tau^2+mu^2).
The Poisson bracket of the principal symbol with a weighted escape function is
computed term by term and compared against closed-form expressions at random points.
"""

from collections import defaultdict

import numpy as np

from conicres.model import ModelParams
from conicres.symbols import BracketPoint, commutator_symbol_real, evaluate, real_closed_form, verify_identities

p = ModelParams(n=3)
computed = commutator_symbol_real(p, l=-0.75, rt=1.25).canonical()
closed = real_closed_form(p, l=-0.75, rt=1.25).canonical()
print("computed bracket:", computed.terms)
print("closed form:     ", closed.terms)
# the monomial lists differ because (tau^2+mu^2)^e absorbs tau^2 + mu^2 at
# will, so agreement is tested by evaluation
rng = np.random.default_rng(0)
for _ in range(3):
    pt = BracketPoint(rng.uniform(0.1, 2), rng.uniform(0.1, 2), rng.uniform(-2, 2), rng.uniform(0, 2))
    print(f"  at x={pt.x:.2f} sigma={pt.sigma:.2f}: {evaluate(computed, pt).real:+.12f} "
          f"vs {evaluate(closed, pt).real:+.12f}")

checks = verify_identities(draws=5, points=50, seed=3)
worst = defaultdict(float)
for c in checks:
    worst[c.identity] = max(worst[c.identity], c.max_rel_error)
for name, err in worst.items():
    print(f"{name:>28}: worst relative error {err:.1e}")
print("sign violations of the modified symbols:", sum(c.sign_violations for c in checks))
