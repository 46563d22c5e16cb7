import cmath
import numpy as np

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicres.indicial import (End, OrderBranch, alpha_interval, central_interval, indicial_roots,
                               mellin_symbol_eval, validate_orders)
from conicres.model import AngularMode, InvalidParameters, ModelParams


def test_n3_central_intervals():
    p = ModelParams(n=3)
    assert central_interval(p, End.SCATTERING).as_tuple() == (-1.5, -0.5)
    assert central_interval(p, End.CONIC).as_tuple() == (0.5, 1.5)
    assert central_interval(p, "ConicPoint").end is End.CONIC


def test_n3_radial_mode_roots():
    r1, r2 = indicial_roots(ModelParams(n=3), AngularMode.sphere(0, 3))
    assert r1 == pytest.approx(0.5j) and r2 == pytest.approx(-0.5j)


def test_alpha_window_for_headline_weight():
    lo, hi = alpha_interval(ModelParams(n=3), -0.75)
    assert (lo, hi) == pytest.approx((-0.25, 0.75))


@pytest.mark.parametrize("r, l, branch", [
    (1.25, -0.75, OrderBranch.BRANCH_A),
    (-1.0, 0.0, OrderBranch.BRANCH_B),
    (0.0, 0.0, OrderBranch.INVALID),
])
def test_order_branches(r, l, branch):
    assert validate_orders(ModelParams(n=3), r, l) is branch


def test_window_closes_at_the_beta_prime_bound():
    with pytest.raises(InvalidParameters):
        ModelParams(n=3, beta_prime=-0.25)
    lo, hi = central_interval(ModelParams(n=3, beta_prime=-0.25 + 1e-6)).as_tuple()
    assert hi - lo == pytest.approx(2e-3)


@settings(max_examples=200, deadline=None)
@given(n=st.integers(3, 8), k=st.integers(0, 6), ib=st.floats(-3, 3),
       gap=st.floats(1e-3, 5), ibp=st.floats(-2, 2))
def test_roots_are_ordered_zeros(n, k, ib, gap, ibp):
    c = (n - 2) / 2
    beta = 1j * ib
    bp = complex((beta * beta).real / 4 - c * c + gap, ibp)
    p, m = ModelParams(n=n, beta=beta, beta_prime=bp), AngularMode.sphere(k, n)
    roots = indicial_roots(p, m)
    for r in roots:
        scale = abs(r) ** 2 + abs(beta * r) + abs(bp + m.lam + c * c)
        assert abs(mellin_symbol_eval(p, m, r)) <= 1e-12 * scale
    # Vieta
    assert abs(roots[0] + roots[1] + beta) <= 1e-12 * (1 + abs(roots[0]) + abs(roots[1]))
    # a root with nonnegative imaginary part comes first
    if any(r.imag >= 0 for r in roots):
        assert roots[0].imag >= 0


@settings(max_examples=100, deadline=None)
@given(n=st.integers(3, 8), ib=st.floats(-2, 2), gap=st.floats(1e-2, 4))
def test_intervals_are_reflections(n, ib, gap):
    c = (n - 2) / 2
    p = ModelParams(n=n, beta=1j * ib, beta_prime=(-ib * ib) / 4 - c * c + gap)
    s, cp = central_interval(p, End.SCATTERING), central_interval(p, End.CONIC)
    assert (cp.lo, cp.hi) == (-s.hi, -s.lo)
    width = 2 * cmath.sqrt(gap).real
    assert s.hi - s.lo == pytest.approx(width)


@pytest.mark.parametrize("n, lam, root", [(3, 0.0, 0.5j), (3, 2.0, 1.5j), (4, 0.0, 1.0j)])
def test_root_examples(n, lam, root):
    r1, r2 = indicial_roots(ModelParams(n=n), AngularMode(0, lam))
    assert r1 == pytest.approx(root) and r2 == pytest.approx(-root)


def test_interval_and_window_examples():
    assert central_interval(ModelParams(n=5)).as_tuple() == pytest.approx((-2.5, 0.5))
    assert alpha_interval(ModelParams(n=3), -0.5) == pytest.approx((0.0, 1.0))
    assert alpha_interval(ModelParams(n=4), -0.6) == pytest.approx((-0.6, 1.4))


def test_symbol_examples():
    p3 = ModelParams(n=3)
    assert mellin_symbol_eval(p3, AngularMode(0, 0.0), 0) == pytest.approx(0.25)
    assert abs(mellin_symbol_eval(p3, AngularMode(0, 0.0), 0.5j)) < 1e-15
    assert mellin_symbol_eval(ModelParams(n=4), AngularMode(0, 2.0), 1) == pytest.approx(4.0)


def test_symbol_is_positive_on_real_line():
    for n in (3, 4, 7):
        p = ModelParams(n=n)
        for k in range(4):
            m = AngularMode.sphere(k, n)
            vals = np.array([mellin_symbol_eval(p, m, t) for t in np.linspace(-20, 20, 101)])
            assert np.all(vals.imag == 0) and np.all(vals.real >= ((n - 2) / 2) ** 2)


def test_window_contains_zero_iff_l_in_interval():
    p = ModelParams(n=3)
    lo, hi = central_interval(p).as_tuple()
    for l in np.linspace(-3, 2, 51):
        a, b = alpha_interval(p, l)
        assert (a < 0 < b) == (lo < l < hi)
