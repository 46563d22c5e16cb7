"""Exact-cone Green function oracle, finite-difference solves and limiting absorption runs."""

from __future__ import annotations

from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np
import scipy.sparse.linalg as spla
from scipy import special as sps
from scipy.integrate import cumulative_simpson

from .discretization import (BoundaryConditions, InnerBC, LogGrid, NormSpec, OuterBC, RadialOperator,
                             assemble, gram)
from .model import AngularMode, InvalidParameters, ModelParams, OperatorKind, SpectralParam
from .special import bessel_j, bessel_order, hankel1, hankel1_closed_form, hankel1_scaled, hankel2_scaled

__all__ = [
    "BesselOrder",
    "BoundaryConditions",
    "OuterBC",
    "InnerBC",
    "SingularOperator",
    "FDSolution",
    "LapTable",
    "bessel_j",
    "hankel1",
    "hankel1_closed_form",
    "hankel1_scaled",
    "hankel2_scaled",
    "wronskian_normalizer",
    "green_kernel",
    "green_apply",
    "fd_solve",
    "lap_limit",
]


class SingularOperator(RuntimeError):
    """The banded factorization hit a (numerically) zero pivot."""


@dataclass(frozen=True)
class BesselOrder:
    nu: float

    @classmethod
    def for_mode(cls, mode: AngularMode, n: int) -> "BesselOrder":
        return cls(bessel_order(mode.lam, n))


def _require_exact_cone(params: ModelParams, sp_: SpectralParam):
    if not params.is_exact_cone:
        raise InvalidParameters("the Bessel oracle is only valid on the exact cone "
                                "(beta = beta' = gamma = varpi = 0, W = 0)")
    sp_.require_nonzero("the Bessel oracle")


def _regular_mix(nu: float, sigma: complex, rho_min: float | None) -> complex:
    """``kappa`` such that ``J - kappa H`` satisfies the regular-solution Robin condition at ``rho_min``."""
    if rho_min is None:
        return 0j
    z0 = sigma * rho_min
    return complex(sps.jv(nu + 1, z0) / sps.hankel1(nu + 1, z0))


def _phi_psi(params, mode, sigma, rho, rho_min):
    c = params.c
    nu = bessel_order(mode.lam, params.n)
    z = sigma * np.asarray(rho)
    kappa = _regular_mix(nu, sigma, rho_min)
    H = hankel1(nu, z)
    phi = rho ** (-c) * (bessel_j(nu, z) - kappa * H)
    psi = rho ** (-c) * H
    return phi, psi


def wronskian_normalizer(params: ModelParams, mode: AngularMode, sp_: SpectralParam, rho) -> np.ndarray:
    """``rho^{n-1} (phi psi' - phi' psi)`` for ``phi = rho^{-c} J_nu``, ``psi = rho^{-c} H_nu``.

    Independent derivatives from :mod:`scipy.special`; the value is ``2i/pi``.
    """
    c, n = params.c, params.n
    nu = bessel_order(mode.lam, n)
    s = sp_.sigma
    rho = np.asarray(rho, dtype=float)
    z = s * rho
    J, Jp = sps.jv(nu, z), sps.jvp(nu, z)
    H, Hp = sps.hankel1(nu, z), sps.h1vp(nu, z)
    phi, dphi = rho ** -c * J, rho ** -c * (s * Jp - c * J / rho)
    psi, dpsi = rho ** -c * H, rho ** -c * (s * Hp - c * H / rho)
    return rho ** (n - 1) * (phi * dpsi - dphi * psi)


GREEN_FACTOR = 1j * np.pi / 2   # 1 / (rho^{n-1} W(phi, psi)) with the sign of P = -Delta - sigma^2


def green_kernel(params: ModelParams, mode: AngularMode, sp_: SpectralParam, rho, rho0: float,
                 rho_min: float | None = None) -> np.ndarray:
    """``G(rho, rho0) = (i pi/2) phi(min) psi(max)``."""
    _require_exact_cone(params, sp_)
    rho = np.asarray(rho, dtype=float)
    lo, hi = np.minimum(rho, rho0), np.maximum(rho, rho0)
    phi_lo, _ = _phi_psi(params, mode, sp_.sigma, lo, rho_min)
    _, psi_hi = _phi_psi(params, mode, sp_.sigma, hi, rho_min)
    return GREEN_FACTOR * phi_lo * psi_hi


def green_apply(params: ModelParams, mode: AngularMode, sp_: SpectralParam,
                f: Callable[[np.ndarray], np.ndarray] | np.ndarray, grid: LogGrid, *,
                refine: int = 8, truncated: bool = True, frame: str = "unconjugated") -> np.ndarray:
    """Solve ``P(sigma) u = f`` on the exact cone with the Bessel Green function.

    Parameters
    ----------
    f
        Callable of ``t`` (preferred, sampled on a refined grid) or samples on ``grid``.
    truncated
        Use the regular solution satisfying the inner closure condition at
        ``rho_min``; otherwise the regular solution of the full cone.
    frame
        ``"unconjugated"`` solves ``P u = f``; ``"conjugated"`` solves
        ``P-hat u = f``, i.e. both ``f`` and the result carry the factor
        ``exp(-i sigma rho)``.

    The integrals ``int phi f rho^n dt`` are computed by cumulative Simpson
    quadrature on a grid ``refine`` times finer than ``grid``.
    """
    _require_exact_cone(params, sp_)
    if frame not in ("unconjugated", "conjugated"):
        raise InvalidParameters(f"unknown frame {frame!r}")
    if callable(f):
        fine = grid.refine(refine)
        fv = np.asarray(f(fine.t), dtype=complex)
        step = refine
    else:
        fine = grid
        fv = np.asarray(f, dtype=complex)
        step = 1
    rho = fine.rho
    phi, psi = _phi_psi(params, mode, sp_.sigma, rho, rho[0] if truncated else None)
    if frame == "conjugated":
        fv = fv * np.exp(1j * sp_.sigma * rho)
    dens = fv * rho ** params.n
    inner = _cumsimpson(phi * dens, fine.h)
    outer_rev = _cumsimpson((psi * dens)[::-1], fine.h)[::-1]
    u = GREEN_FACTOR * (psi * inner + phi * outer_rev)
    if frame == "conjugated":
        u = u * np.exp(-1j * sp_.sigma * rho)
    return u[::step]


def _cumsimpson(y: np.ndarray, dx: float) -> np.ndarray:
    # scipy's cumulative_simpson works on real arrays only
    return (cumulative_simpson(y.real, dx=dx, initial=0)
            + 1j * cumulative_simpson(y.imag, dx=dx, initial=0))


@dataclass(frozen=True)
class FDSolution:
    u: np.ndarray
    residual: float


def _factor(A) -> spla.SuperLU:
    lu = spla.splu(A.tocsc(), permc_spec="NATURAL", diag_pivot_thresh=1.0)
    d = np.abs(lu.U.diagonal())
    scale = abs(A).max()
    if d.min() < 1e-14 * scale:
        raise SingularOperator(f"pivot {d.min():.3g} below 1e-14 x scale {scale:.3g}: operator is "
                               "numerically singular (near a discrete resonance?)")
    return lu


def fd_solve(op: RadialOperator, f) -> FDSolution:
    """Banded LU solve of ``op u = f`` (closure rows homogeneous) with one refinement step."""
    f = np.asarray(f, dtype=complex)
    N = op.grid.num_points
    if f.shape == (N,):
        rhs = f[1:-1]
    elif f.shape == (N - 2,):
        rhs = f
    else:
        raise InvalidParameters(f"right-hand side has shape {f.shape}, expected ({N},) or ({N - 2},)")
    A = op.interior()
    lu = _factor(A)
    v = lu.solve(rhs)
    v = v + lu.solve(rhs - A @ v)
    res = np.max(np.abs(A @ v - rhs)) / max(np.max(np.abs(rhs)), 1e-300)
    return FDSolution(op.extension() @ v, float(res))


@dataclass(frozen=True)
class LapTable:
    sigma_r: float
    eps: tuple[float, ...]
    distance: tuple[float, ...]
    reference_error: float
    decrease_factor: float
    monotone: bool

    @property
    def passed(self) -> bool:
        return self.monotone and self.decrease_factor >= 4.0

    def rows(self):
        return [(e, d) for e, d in zip(self.eps, self.distance)]


def lap_limit(params: ModelParams, mode: AngularMode, sigma_r: float, eps_list: Sequence[float], *,
              grid: LogGrid | None = None, f: Callable[[np.ndarray], np.ndarray] | None = None,
              l: float = -0.75, t_inner: float = -2.0, t_outer: float = 5.0, h: float = 0.05) -> LapTable:
    """Conjugated solves at ``sigma_r + i eps`` compared with the outgoing solve at ``eps = 0``.

    Distances are measured in ``H_b^{0,l}`` with ``l < -1/2``.  On the exact cone
    the ``eps = 0`` solve is also compared with :func:`green_apply`.
    """
    if sigma_r == 0:
        raise InvalidParameters("sigma_r must be nonzero")
    eps = [float(e) for e in eps_list]
    if any(e <= 0 for e in eps) or any(a <= b for a, b in zip(eps, eps[1:])):
        raise InvalidParameters("eps_list must be positive and strictly decreasing")
    if not l < -0.5:
        raise InvalidParameters("distances need l < -1/2")
    if grid is None:
        grid = LogGrid.from_spacing(t_inner, np.log(1 / abs(sigma_r)) + t_outer, h)
    if f is None:
        t0 = np.log(1 / abs(sigma_r)) - 1.0
        f = lambda t: np.exp(-((t - t0) / 0.8) ** 2) * np.exp(-2 * t)  # noqa: E731
    fv = np.asarray(f(grid.t), dtype=complex)
    G = gram(NormSpec(s=0, l=l), grid, mode, params.n)

    def solve_at(sig):
        op = assemble(params, mode, SpectralParam(sig), OperatorKind.CONJUGATED, grid)
        return fd_solve(op, fv).u

    u0 = solve_at(complex(sigma_r))
    ref_err = np.nan
    if params.is_exact_cone:
        ug = green_apply(params, mode, SpectralParam(sigma_r), f, grid, frame="conjugated")
        ref_err = G.norm_of(u0 - ug) / G.norm_of(ug)
    dist = [G.norm_of(solve_at(complex(sigma_r, e)) - u0) for e in eps]
    monotone = all(b <= 2 * a for a, b in zip(dist, dist[1:]))
    factor = dist[0] / dist[-1] if dist[-1] > 0 else np.inf
    return LapTable(float(sigma_r), tuple(eps), tuple(dist), float(ref_err), float(factor), monotone)
