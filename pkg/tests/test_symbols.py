import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicres.model import InvalidParameters, ModelParams
from conicres.symbols import (IDENTITY_NAMES, commutator_symbol_real, evaluation_scale, modified_commutator_complex,
                              modified_commutator_real, MU2, SIGMA, TAU, WEIGHT, BracketPoint, SymbolExpr, X, bracket, const,
                              d_tau, draw_identity_params, evaluate, expand_weight, identity_pair, restrict_x0,
                              verify_identities, x_dx)

exps = st.floats(-2, 2).map(lambda v: round(v, 3))
coefs = st.floats(-3, 3)


@st.composite
def symbols(draw):
    out = const(0)
    for _ in range(draw(st.integers(1, 4))):
        out = out + draw(coefs) * X(draw(exps)) * SIGMA(draw(st.integers(0, 2))) * TAU(draw(st.integers(0, 3))) \
            * MU2(draw(st.integers(0, 2))) * WEIGHT(draw(exps))
    return out


points = st.builds(BracketPoint, x=st.floats(0.1, 10), sigma=st.floats(0.05, 5), taub=st.floats(-3, 3),
                   mu_sq=st.floats(0.1, 4))


def close(a, b, scale=1.0):
    return abs(a - b) <= 1e-10 * (1 + abs(a) + abs(b) + scale)


def test_canonical_merging():
    e = X(0.5) * TAU(2) + 2 * TAU(2) * X(0.5) - 3 * X(0.5) * TAU(2)
    assert len(e) == 0 and e == SymbolExpr()
    assert (X(1) * X(1)).coefficient(2, 0, 0, 0, 0) == 1


def test_elementary_brackets():
    assert bracket(TAU(), X(0.7)) == 0.7 * X(0.7)
    assert bracket(X(0.7), TAU()) == -0.7 * X(0.7)
    assert d_tau(WEIGHT(1.5)) == 3 * TAU() * WEIGHT(0.5)
    assert x_dx(X(-1) * SIGMA(2)) == -X(-1) * SIGMA(2)


@settings(max_examples=40, deadline=None)
@given(p=symbols(), a=symbols(), pt=points)
def test_bracket_is_antisymmetric(p, a, pt):
    assert close(evaluate(bracket(p, a), pt), -evaluate(bracket(a, p), pt))
    assert abs(evaluate(bracket(p, p), pt)) <= 1e-9 * (1 + abs(evaluate(p * p, pt)))


@settings(max_examples=40, deadline=None)
@given(p=symbols(), a=symbols(), b=symbols(), pt=points)
def test_bracket_is_a_derivation(p, a, b, pt):
    lhs = evaluate(bracket(p, a * b), pt)
    rhs = evaluate(a * bracket(p, b) + b * bracket(p, a), pt)
    assert close(lhs, rhs, abs(evaluate(a, pt) * evaluate(b, pt)))


@settings(max_examples=40, deadline=None)
@given(e=symbols(), pt=points)
def test_d_tau_matches_finite_difference(e, pt):
    h = 1e-5
    up = BracketPoint(pt.x, pt.sigma, pt.taub + h, pt.mu_sq)
    dn = BracketPoint(pt.x, pt.sigma, pt.taub - h, pt.mu_sq)
    fd = (evaluate(e, up) - evaluate(e, dn)) / (2 * h)
    assert abs(evaluate(d_tau(e), pt) - fd) <= 1e-5 * (1 + abs(fd))


@settings(max_examples=40, deadline=None)
@given(e=symbols(), pt=points, base=st.sampled_from([-0.5, 0.0, 0.25]))
def test_expand_weight_preserves_value(e, pt, base):
    e = e * WEIGHT(base + 2)
    assert close(evaluate(expand_weight(e, base), pt), evaluate(e, pt), 10)


def test_restrict_x0():
    e = X(0.5) + X(1.5) + 2 * X(0.5) * TAU()
    assert restrict_x0(e, 0.5) == X(0.5) + 2 * X(0.5) * TAU()


def test_bracket_point_validation():
    with pytest.raises(InvalidParameters):
        BracketPoint(0.0, 1.0, 0.0, 1.0)
    with pytest.raises(InvalidParameters):
        BracketPoint(1.0, 1.0, 0.0, -1.0)
    with pytest.raises(InvalidParameters):
        evaluate(WEIGHT(-0.5), BracketPoint(1.0, 1.0, 0.0, 0.0))


def test_identity_pairs_and_lookup():
    d = draw_identity_params(np.random.default_rng(3))
    for name in IDENTITY_NAMES:
        eng, ref = identity_pair(name, d)
        assert len(eng) > 0 and len(ref) > 0
    with pytest.raises(InvalidParameters):
        identity_pair("jacobi", d)


def test_identities_hold_and_are_deterministic():
    a = verify_identities(draws=5, points=30, seed=11)
    b = verify_identities(draws=5, points=30, seed=11)
    assert [c.max_rel_error for c in a] == [c.max_rel_error for c in b]
    assert all(c.passed(1e-12) for c in a)
    assert {c.draw.branch for c in verify_identities(draws=12, points=5, seed=2)} == {"BranchA", "BranchB"}


def test_evaluation_examples():
    assert evaluate(X(2), BracketPoint(3, 1, 0, 0)) == pytest.approx(9)
    assert evaluate(WEIGHT(0.5), BracketPoint(1, 1, 3, 16)) == pytest.approx(5)
    assert evaluate(TAU() * SIGMA() * X(-1), BracketPoint(2, 0.5, 4, 0)) == pytest.approx(1)


def test_bracket_examples():
    assert bracket(TAU(), X(-1)) == -X(-1)
    assert bracket(X(2) * WEIGHT(1), TAU()) == -2 * X(2) * WEIGHT(1)


def _expanded_bracket(l, rt, pt, ib=0.0):
    w = pt.taub ** 2 + pt.mu_sq
    return pt.x ** (-2 * l) * w ** (rt - 1.5) * (
        4 * pt.sigma * ((l + rt - ib / 2) * pt.taub ** 2 + (l + 0.5 - ib / 2) * pt.mu_sq)
        - 4 * pt.x * (l + rt - ib / 2) * pt.taub * w)


def test_weighted_bracket_matches_expanded_form():
    l, rt = -0.75, 2.0
    p = X(2) * WEIGHT(1) - 2 * X(1) * SIGMA() * TAU()
    a = X(-2 * l - 1) * WEIGHT(rt - 0.5)
    pt = BracketPoint(1, 0.3, 1, 2)
    assert evaluate(bracket(p, a), pt) == pytest.approx(_expanded_bracket(l, rt, pt), rel=1e-12)
    eng = commutator_symbol_real(ModelParams(n=3), l, rt)
    rng = np.random.default_rng(4)
    for _ in range(100):
        q = BracketPoint(np.exp(rng.uniform(-2, 2)), np.exp(rng.uniform(-3, 1)), rng.normal(0, 2), rng.uniform(0, 4))
        assert evaluate(eng, q) == pytest.approx(_expanded_bracket(l, rt, q), rel=1e-12, abs=1e-300)


def test_imaginary_beta_shifts_tau_coefficient():
    l, rt = -0.75, 2.0
    a = commutator_symbol_real(ModelParams(n=3, beta=0.4j), l, rt)
    b = commutator_symbol_real(ModelParams(n=3), l, rt)
    diff = expand_weight(a - b, rt - 1.5)
    # sigma tau^2 slot: 4 (l + rt - Im beta / 2) minus 4 (l + rt)
    assert diff.coefficient(-2 * l, 1, 2, 0, rt - 1.5) == pytest.approx(-0.8)


def test_vanishing_x_tau_term():
    e = expand_weight(commutator_symbol_real(ModelParams(n=3), -0.75, 0.75), -0.75 - 0.5 + 0.0)
    assert all(not (k[0] > 1.5 + 1e-9 and k[2] % 2 == 1) for k in e.terms)


def test_modified_symbols():
    p0 = ModelParams(n=3)
    pt = BracketPoint(0.5, 1.0, 1.0, 1.0)
    val = evaluate(modified_commutator_complex(-0.75, 2.0), pt)
    weight = 0.5 ** 1.5 * 2.0 ** 0.5
    assert val == pytest.approx(-6.0 * weight, rel=1e-12)
    # both slots zero: the modified real symbol vanishes
    # Im(b+g)/2 = 0.3 and Im(b-g)/2 = -0.1, so l = -0.6 and rt = 0.9
    zero = modified_commutator_real(ModelParams(n=3, beta=0.2j, gamma=0.4j), -0.6, 0.9)
    for q in (pt, BracketPoint(0.1, 2.0, -1.0, 3.0)):
        assert abs(evaluate(zero, q)) < 1e-12 * (1 + evaluation_scale(modified_commutator_real(p0, -0.2, 0.5), q))
    rng = np.random.default_rng(0)
    for _ in range(100):
        q = BracketPoint(np.exp(rng.uniform(-2, 2)), np.exp(rng.uniform(-3, 1)), rng.normal(0, 2), rng.uniform(0, 4))
        assert evaluate(modified_commutator_real(p0, -0.75, 2.0), q).real <= 0
        assert evaluate(modified_commutator_real(p0, 0.0, -0.25), q).real >= 0


@settings(max_examples=30, deadline=None)
@given(e=symbols())
def test_canonical_is_idempotent(e):
    once = e.canonical()
    assert once.canonical().terms == once.terms
