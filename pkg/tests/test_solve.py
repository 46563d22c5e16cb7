import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sps

from conicres.discretization import LogGrid, NormSpec, assemble, gram
from conicres.model import AngularMode, InvalidParameters, ModelParams, OperatorKind, SpectralParam, apply_coeffs, build_coeffs
from conicres.solve import (GREEN_FACTOR, bessel_j, fd_solve, green_apply, green_kernel, hankel1, hankel1_closed_form,
                            hankel1_scaled, hankel2_scaled, lap_limit, wronskian_normalizer)

N3 = ModelParams(n=3)


def test_reference_values():
    assert bessel_j(0.5, 1.0) == pytest.approx(0.671396707141804, abs=1e-12)
    assert hankel1(0.5, 1.0) == pytest.approx(0.671396707141804 - 0.431098868018376j, abs=1e-12)


@pytest.mark.parametrize("nu", [0.5, 1.5, 2.5, 3.5])
def test_closed_form_matches_scipy(nu):
    z = np.array([0.01, 0.3, 1.0, 7.0, 50.0 + 0.2j, 2.0 + 3.0j])
    np.testing.assert_allclose(hankel1_closed_form(nu, z), sps.hankel1(nu, z), rtol=1e-12)
    np.testing.assert_allclose(hankel1_scaled(nu, z), sps.hankel1e(nu, z), rtol=1e-12)


@pytest.mark.parametrize("nu", [0.5, 1.7, 2.5])
def test_incoming_is_conjugate_outgoing_on_real_axis(nu):
    z = np.geomspace(1e-3, 1e3, 50)
    np.testing.assert_allclose(hankel2_scaled(nu, z), np.conj(hankel1_scaled(nu, z)), rtol=1e-12)


def test_argument_region():
    with pytest.raises(InvalidParameters):
        hankel1(0.5, 1 - 0.1j)
    with pytest.raises(InvalidParameters):
        bessel_j(0.5, 1e5)


@settings(max_examples=30, deadline=None)
@given(k=st.integers(0, 4), sr=st.floats(1e-3, 2.0), si=st.floats(0, 0.5))
def test_wronskian_is_constant(k, sr, si):
    rho = np.geomspace(0.1, 100, 60)
    w = wronskian_normalizer(N3, AngularMode.sphere(k, 3), SpectralParam(complex(sr, si)), rho)
    np.testing.assert_allclose(w, 2j / np.pi, rtol=1e-9)
    assert GREEN_FACTOR * w[0] == pytest.approx(-1.0)


def test_green_kernel_symmetry_and_oracle_guard():
    m, s = AngularMode.sphere(1, 3), SpectralParam(0.3)
    rho = np.geomspace(0.2, 20, 11)
    k1 = green_kernel(N3, m, s, rho, 2.0)
    k2 = np.array([green_kernel(N3, m, s, 2.0, r) for r in rho]).ravel()
    np.testing.assert_allclose(k1, k2, rtol=1e-14)
    with pytest.raises(InvalidParameters):
        green_kernel(ModelParams(n=3, gamma=0.1j), m, s, rho, 2.0)
    with pytest.raises(InvalidParameters):
        green_kernel(N3, m, SpectralParam(0), rho, 2.0)


def test_green_solution_is_real_on_imaginary_axis():
    # sigma = i eps: P = -Delta + eps^2 is real, so the decaying solution is real
    m, sp = AngularMode.sphere(0, 3), SpectralParam(0.3j)
    g = LogGrid.from_spacing(-2, 5, 0.02)
    u = green_apply(N3, m, sp, lambda t: np.exp(-(t - 1) ** 2), g)
    assert np.max(np.abs(u.imag)) < 1e-10 * np.max(np.abs(u))


def test_green_apply_solves_the_equation():
    m, sp = AngularMode.sphere(0, 3), SpectralParam(0.1)
    g = LogGrid.from_spacing(-2, 6, 0.025)
    f = lambda t: np.exp(-((t - 1.3) / 0.8) ** 2) * np.exp(-2 * t)  # noqa: E731
    for frame, kind in (("unconjugated", "Unconjugated"), ("conjugated", "Conjugated")):
        u = green_apply(N3, m, sp, f, g, frame=frame)
        r = apply_coeffs(build_coeffs(N3, m, sp, kind), g, u, method="fd4") - f(g.t)
        assert np.nanmax(np.abs(r[5:-5])) < 1e-4 * np.max(np.abs(f(g.t)))


def test_fd_solve_converges_to_green():
    m, sp = AngularMode.sphere(2, 3), SpectralParam(0.1)
    t0 = np.log(10) - 1
    f = lambda t: np.exp(-((t - t0) / 0.8) ** 2) * np.exp(-2 * t)  # noqa: E731
    errs = []
    hs = (0.05, 0.025)
    ref = green_apply(N3, m, sp, f, LogGrid.from_spacing(-2, 7.5, 0.0125), frame="conjugated", refine=4)
    for h in hs:
        g = LogGrid.from_spacing(-2, 7.5, h)
        sol = fd_solve(assemble(N3, m, sp, OperatorKind.CONJUGATED, g), f(g.t))
        assert sol.residual < 1e-12
        G = gram(NormSpec(s=0, l=-0.75), g, m)
        r = ref[::int(round(h / 0.0125))]
        errs.append(G.norm_of(sol.u - r) / G.norm_of(r))
    assert 3.4 < errs[0] / errs[1] < 4.6


def test_fd_solve_shape_check():
    g = LogGrid.from_spacing(-2, 3, 0.05)
    op = assemble(N3, AngularMode.sphere(0, 3), SpectralParam(0.1), "Conjugated", g)
    with pytest.raises(InvalidParameters):
        fd_solve(op, np.zeros(5))


def test_limiting_absorption_table():
    tab = lap_limit(N3, AngularMode.sphere(0, 3), 0.1, [1e-2, 1e-3, 1e-4])
    assert tab.passed and tab.decrease_factor > 4
    assert tab.reference_error < 1e-2
    with pytest.raises(InvalidParameters):
        lap_limit(N3, AngularMode.sphere(0, 3), 0.1, [1e-3, 1e-2])
    with pytest.raises(InvalidParameters):
        lap_limit(N3, AngularMode.sphere(0, 3), 0.1, [1e-2, 1e-3], l=0.0)


def test_bessel_wronskian_random():
    rng = np.random.default_rng(0)
    for _ in range(50):
        nu = float(rng.choice([0.5, 1.5, 2.5])) if rng.random() < 0.5 else float(rng.uniform(0.1, 4))
        z = complex(rng.uniform(0.05, 30), rng.uniform(0, 2))
        J, H = bessel_j(nu, z), hankel1(nu, z)
        Jp = bessel_j(nu - 1, z) - nu / z * J if nu >= 1 else -bessel_j(nu + 1, z) + nu / z * J
        Hp = hankel1(nu - 1, z) - nu / z * H if nu >= 1 else -hankel1(nu + 1, z) + nu / z * H
        w = J * Hp - Jp * H
        assert abs(w - 2j / (np.pi * z)) <= 1e-9 * abs(2 / (np.pi * z))


def test_narrow_bump_approaches_green_kernel():
    m, sp = AngularMode.sphere(0, 3), SpectralParam(0.2)
    g = LogGrid.from_spacing(-2, 5, 0.005)
    t0, probe = 1.0, slice(None, None)
    far = np.abs(g.t - t0) > 1.0
    errs = []
    for w in (0.08, 0.04):
        bump = np.exp(-((g.t - t0) / w) ** 2)
        bump = bump / np.sum(g.trapezoid_weights() * bump * g.rho ** 3)
        u = green_apply(N3, m, sp, bump, g)
        G = green_kernel(N3, m, sp, g.rho, np.exp(t0), rho_min=g.rho[0])
        errs.append(np.max(np.abs((u - G)[far][probe])) / np.max(np.abs(G[far])))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.15)


def test_green_residual_random_sources():
    rng = np.random.default_rng(3)
    g = LogGrid.from_spacing(-3, 6, 0.005)
    c = build_coeffs(N3, AngularMode.sphere(1, 3), SpectralParam(0.1), "Unconjugated")
    for _ in range(10):
        t0, w = rng.uniform(0, 2), rng.uniform(0.5, 1.0)
        f = lambda t, t0=t0, w=w: np.exp(-((t - t0) / w) ** 2) * np.exp(-2 * t)  # noqa: E731
        u = green_apply(N3, AngularMode.sphere(1, 3), SpectralParam(0.1), f, g)
        r = (apply_coeffs(c, g, u, method="fd4") - f(g.t))[200:-200]
        assert np.linalg.norm(r) < 1e-6 * np.linalg.norm(f(g.t)[200:-200])


def test_zero_source_gives_zero():
    g = LogGrid.from_spacing(-2, 4, 0.05)
    op = assemble(N3, AngularMode.sphere(0, 3), SpectralParam(0.1), "Conjugated", g)
    assert not np.any(fd_solve(op, np.zeros(g.num_points)).u)


def test_incoming_solve_is_conjugate_of_outgoing():
    from conicres.discretization import BoundaryConditions, OuterBC

    m, s = AngularMode.sphere(1, 3), SpectralParam(0.3)
    g = LogGrid.from_spacing(-2, 4, 0.01)
    f = np.exp(-((g.t - 1) / 0.7) ** 2)
    out = fd_solve(assemble(N3, m, s, "Unconjugated", g), f).u
    inc = fd_solve(assemble(N3, m, s, "Unconjugated", g, BoundaryConditions(outer=OuterBC.EXACT_INCOMING)), f).u
    np.testing.assert_allclose(inc, np.conj(out), rtol=1e-10, atol=1e-14 * np.max(np.abs(out)))


def test_asymptotic_robin_conjugated_matches_oracle():
    from conicres.discretization import BoundaryConditions, OuterBC

    m, s = AngularMode.sphere(0, 3), SpectralParam(0.5)
    f = lambda t: np.exp(-((t - 0.5) / 0.6) ** 2)  # noqa: E731
    for t_out in (3.0, 5.0):
        g = LogGrid.from_spacing(-2, t_out, 0.01)
        G = gram(NormSpec(s=0, l=-0.75), g, m)
        ug = green_apply(N3, m, s, f, g, frame="conjugated")
        robin = fd_solve(assemble(N3, m, s, "Conjugated", g, BoundaryConditions(outer=OuterBC.ASYMPTOTIC_ROBIN)),
                         f(g.t)).u
        exact = fd_solve(assemble(N3, m, s, "Conjugated", g), f(g.t)).u
        assert G.norm_of(robin - ug) < 1e-4 * G.norm_of(ug)
        assert G.norm_of(robin - exact) < 1e-8 * G.norm_of(ug)
