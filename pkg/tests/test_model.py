import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conicres.discretization import LogGrid
from conicres.model import (AngularMode, InvalidParameters, ModelParams, OperatorKind, Potential,
                            SpectralParam, apply_coeffs, apply_conjugation, build_coeffs, validate_params)


def test_exact_cone_is_valid():
    p = ModelParams(n=3)
    assert validate_params(p) == []
    assert p.is_exact_cone and p.c == 0.5


@pytest.mark.parametrize("fields, fragment", [
    ({"n": 2}, "n >= 3"),
    ({"n": 3, "beta": 0.3 + 0.1j}, "Re beta"),
    ({"n": 3, "beta_prime": -0.5}, "Re beta'"),
    ({"n": 3.0}, "integer"),
    ({"n": 3, "varpi": 1j}, "varpi"),
])
def test_invalid_fields_are_diagnosed(fields, fragment):
    diags = validate_params(fields)
    assert any(fragment in d for d in diags), diags
    with pytest.raises(InvalidParameters):
        ModelParams(**fields)


def test_unknown_field_in_mapping():
    assert "unknown" in validate_params({"n": 3, "mass": 1})[0]


def test_beta_prime_bound_uses_beta():
    # Re beta' > beta^2/4 - c^2 with beta = 2i gives the bound -1 - 1/4
    assert validate_params({"n": 3, "beta": 2j, "beta_prime": -1.2}) == []
    assert validate_params({"n": 3, "beta": 2j, "beta_prime": -1.3}) != []


def test_potential_decay_checks():
    with pytest.raises(InvalidParameters, match="decay"):
        ModelParams(n=3, potential=Potential(lambda x: x, decay=1.0))
    with pytest.raises(InvalidParameters, match="declared rate"):
        ModelParams(n=3, potential=Potential(lambda x: x, decay=2.0))
    ModelParams(n=3, potential=Potential(lambda x: x ** 3, decay=2.0))


def test_spectral_param_half_plane():
    with pytest.raises(InvalidParameters):
        SpectralParam(0.1 - 1e-3j)
    assert SpectralParam(0.1 + 0.1j).phase == pytest.approx((1 + 1j) / np.sqrt(2))
    with pytest.raises(InvalidParameters):
        SpectralParam(0).phase


@pytest.mark.parametrize("n, k, mult", [(3, 0, 1), (3, 1, 3), (3, 2, 5), (4, 2, 9), (5, 1, 5)])
def test_sphere_modes(n, k, mult):
    m = AngularMode.sphere(k, n)
    assert m.lam == k * (k + n - 2) and m.multiplicity == mult


@pytest.mark.parametrize("text", ["Conjugated", "conjugated", "CONJUGATED"])
def test_kind_parse(text):
    assert OperatorKind.parse(text) is OperatorKind.CONJUGATED
    with pytest.raises(InvalidParameters):
        OperatorKind.parse("Adjoint")


def test_normal_operators_need_nonzero_sigma():
    for kind in ("Normal0", "RescaledTilde"):
        with pytest.raises(InvalidParameters):
            build_coeffs(ModelParams(n=3), AngularMode.sphere(0, 3), SpectralParam(0), kind)


def test_rescaled_operator_uses_phase():
    p, m = ModelParams(n=3, gamma=0.4j), AngularMode.sphere(1, 3)
    a = build_coeffs(p, m, SpectralParam(1e-3 + 1e-3j), "RescaledTilde")
    b = build_coeffs(p, m, SpectralParam(1.0 + 1.0j), "RescaledTilde")
    X = np.geomspace(1e-2, 1e2, 9)
    for f in ("c2", "c1", "c0"):
        np.testing.assert_allclose(getattr(a, f)(X), getattr(b, f)(X), rtol=1e-14)
    assert a.variable == "X"


def test_normal0_drops_potential_and_varpi():
    pot = Potential(lambda x: x ** 3, decay=3.0)
    p = ModelParams(n=3, varpi=0.7, potential=pot)
    sp = SpectralParam(0.2)
    c = build_coeffs(p, AngularMode.sphere(0, 3), sp, "Normal0")
    q = build_coeffs(ModelParams(n=3), AngularMode.sphere(0, 3), sp, "Normal0")
    x = np.geomspace(1e-3, 1, 7)
    np.testing.assert_allclose(c.c0(x), q.c0(x))


def test_coarse_grid_is_rejected():
    g = LogGrid.from_spacing(0, 8, 0.1)
    with pytest.raises(InvalidParameters, match="too coarse"):
        apply_conjugation(ModelParams(n=3), AngularMode.sphere(0, 3), SpectralParam(1.0), np.zeros(g.num_points), g)


@settings(max_examples=25, deadline=None)
@given(k=st.integers(0, 3), sr=st.floats(0.01, 0.1), si=st.floats(0, 0.01),
       ib=st.floats(-0.5, 0.5), ig=st.floats(-0.5, 0.5), varpi=st.floats(-1, 1),
       t0=st.floats(-0.5, 0.5))
def test_conjugated_coefficients_match_direct_conjugation(k, sr, si, ib, ig, varpi, t0):
    p = ModelParams(n=3, beta=1j * ib, gamma=1j * ig, varpi=varpi, beta_prime=0.1)
    m, sp = AngularMode.sphere(k, 3), SpectralParam(complex(sr, si))
    g = LogGrid.from_spacing(-5.5, 5.5, 0.02)
    u = np.exp(-((g.t - t0) / 0.45) ** 2)
    a = apply_conjugation(p, m, sp, u, g)
    b = apply_coeffs(build_coeffs(p, m, sp, "Conjugated"), g, u)
    i = slice(g.num_points // 10, 9 * g.num_points // 10)
    assert np.linalg.norm((a - b)[i]) < 1e-8 * np.linalg.norm(b[i])


def test_fd4_and_spectral_agree():
    p, m, sp = ModelParams(n=3), AngularMode.sphere(1, 3), SpectralParam(0.05)
    g = LogGrid.from_spacing(-6, 6, 0.01)
    u = np.exp(-g.t ** 2)
    c = build_coeffs(p, m, sp, "Conjugated")
    a, b = apply_coeffs(c, g, u), apply_coeffs(c, g, u, method="fd4")
    assert np.isnan(b[:2]).all() and np.isnan(b[-2:]).all()
    assert np.max(np.abs(a - b)[2:-2]) < 1e-6 * np.max(np.abs(a))


@pytest.mark.parametrize("n, lam, a", [(3, 0.0, 0.7), (3, 2.0, -1.3), (5, 6.0, 2.0)])
def test_b_basis_change_on_powers(n, lam, a):
    # independent oracle: (x^2 D_x)^2 x^a = -a(a+1) x^{a+2}, x (x^2 D_x) x^a = -i a x^{a+2}
    beta = 0.3j
    p = ModelParams(n=n, beta=beta, beta_prime=0.2)
    mode = AngularMode(0, lam)
    c = build_coeffs(p, mode, SpectralParam(0.0), "Unconjugated")
    x = np.geomspace(1e-3, 1.0, 7)
    via_basis = c.c2(x) * (-a * a) + c.c1(x) * (-1j * a) + c.c0(x)
    direct = (-a * (a + 1) + (1j * (n - 1) + beta) * (-1j * a) + lam + 0.2 + 1j * beta * (n - 2) / 2) * x ** 2
    np.testing.assert_allclose(via_basis, direct, rtol=1e-13)


def test_unconjugated_structure():
    p, m = ModelParams(n=3), AngularMode.sphere(1, 3)
    c = build_coeffs(p, m, SpectralParam(0.3), "Unconjugated")
    x = np.geomspace(1e-4, 1, 5)
    np.testing.assert_allclose(c.c2(x), x ** 2)
    assert c.poly0[0] == pytest.approx(-0.09)


def test_conjugated_on_constants():
    c = build_coeffs(ModelParams(n=3), AngularMode.sphere(0, 3), SpectralParam(0.1), "Conjugated")
    x = np.geomspace(1e-3, 1, 5)
    np.testing.assert_allclose(c.c0(x), -0.2j * x, rtol=1e-14)


def test_normal0_first_order_coefficient():
    c = build_coeffs(ModelParams(n=3), AngularMode.sphere(0, 3), SpectralParam(0.01), "Normal0")
    assert c.poly1[1] == pytest.approx(-0.02)


@pytest.mark.parametrize("sigma", [0.1, 0.01 + 0.002j])
def test_conjugated_coefficients_vanish_to_first_order(sigma):
    pot = Potential(lambda x: 0.7 * x ** 2 / (1 + x ** 2), 2.0)
    p = ModelParams(n=3, beta=0.2j, gamma=0.1j, varpi=0.4, beta_prime=0.3, potential=pot)
    c = build_coeffs(p, AngularMode.sphere(2, 3), SpectralParam(sigma), "Conjugated")
    x = np.geomspace(1e-8, 1e-3, 20)
    for f in (c.c2, c.c1, c.c0):
        v = np.abs(f(x))
        assert np.polyfit(np.log(x), np.log(v), 1)[0] >= 0.99
        assert v[0] < 1e-6


def test_conjugation_at_zero_is_identity():
    p, m = ModelParams(n=3), AngularMode.sphere(1, 3)
    g = LogGrid.from_spacing(-6, 6, 0.02)
    u = np.exp(-g.t ** 2)
    a = apply_conjugation(p, m, SpectralParam(0.0), u, g)
    b = apply_coeffs(build_coeffs(p, m, SpectralParam(0.0), "Unconjugated"), g, u)
    np.testing.assert_array_equal(a, b)


def test_leading_term_annihilates_outgoing_power():
    # x^{(n-1)/2} is killed by the O(x) part of P_hat: two extra orders of decay instead of one
    # (k = 1 so that the O(x^2) remainder lam x^3 is not identically zero)
    p, m, sp = ModelParams(n=3), AngularMode.sphere(1, 3), SpectralParam(0.05)
    g = LogGrid.from_spacing(5.0, 11.0, 0.01)
    c = build_coeffs(p, m, sp, "Conjugated")
    i = slice(10, -10)
    gains = []
    for a in (1.0, 0.3):
        u = g.x ** a
        r = apply_coeffs(c, g, u, method="fd4")
        gains.append(np.polyfit(np.log(g.x[i]), np.log(np.abs(r[i] / u[i])), 1)[0])
    assert gains[0] == pytest.approx(2.0, abs=0.02)
    assert gains[1] == pytest.approx(1.0, abs=0.02)
