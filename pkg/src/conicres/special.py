"""Bessel and Hankel functions for the exact-cone oracle.

Half-integer orders use the terminating closed forms of the spherical Hankel
functions.  Other orders, and all of ``J_nu``, go through the AMOS-based
routines of :mod:`scipy.special`.
"""

from __future__ import annotations

from math import factorial

import numpy as np
from scipy import special as sps

from .model import InvalidParameters

__all__ = [
    "bessel_order",
    "is_half_integer",
    "bessel_j",
    "hankel1",
    "hankel1_scaled",
    "hankel2_scaled",
    "hankel1_closed_form",
]

Z_MIN, Z_MAX = 1e-8, 1e4


def bessel_order(lam: float, n: int, beta_prime: complex = 0.0) -> float:
    """``nu = sqrt(lam + ((n-2)/2)^2 + beta')`` for real ``beta'``."""
    val = lam + ((n - 2) / 2) ** 2 + complex(beta_prime).real
    if complex(beta_prime).imag != 0 or val < 0:
        raise InvalidParameters("Bessel order requires real beta' with lam + c^2 + beta' >= 0")
    return float(np.sqrt(val))


def is_half_integer(nu: float, tol: float = 1e-12) -> bool:
    return abs((nu - 0.5) - round(nu - 0.5)) < tol and nu >= 0.5 - tol


def _check_region(z, need_upper: bool):
    z = np.asarray(z, dtype=complex)
    mag = np.abs(z)
    if np.any(mag <= Z_MIN) or np.any(mag >= Z_MAX):
        raise InvalidParameters(f"|z| outside supported region ({Z_MIN:g}, {Z_MAX:g}): "
                                f"range [{mag.min():.3g}, {mag.max():.3g}]")
    if need_upper and np.any(z.imag < -1e-15 * mag):
        raise InvalidParameters("hankel1 requires Im z >= 0")
    return z


def _spherical_h1_scaled(k: int, z: np.ndarray) -> np.ndarray:
    """``e^{-iz} h_k^{(1)}(z)`` from the terminating series."""
    total = np.zeros_like(z)
    for m in range(k + 1):
        coef = factorial(k + m) / (factorial(m) * factorial(k - m))
        total = total + coef * (1j) ** m / (2 * z) ** m
    return (-1j) ** (k + 1) * total / z


def hankel1_closed_form(nu: float, z, scaled: bool = False):
    """Half-integer ``H^{(1)}_nu(z)`` via ``sqrt(2z/pi) h^{(1)}_{nu-1/2}(z)``."""
    if not is_half_integer(nu):
        raise InvalidParameters(f"closed form needs a half-integer order, got nu={nu}")
    z = np.asarray(z, dtype=complex)
    k = int(round(nu - 0.5))
    val = np.sqrt(2 * z / np.pi) * _spherical_h1_scaled(k, z)
    return val if scaled else val * np.exp(1j * z)


def bessel_j(nu: float, z):
    z = _check_region(z, need_upper=False)
    return sps.jv(nu, z)


def hankel1(nu: float, z):
    z = _check_region(z, need_upper=True)
    if is_half_integer(nu):
        return hankel1_closed_form(nu, z)
    return sps.hankel1(nu, z)


def hankel1_scaled(nu: float, z):
    """``e^{-iz} H^{(1)}_nu(z)``, free of the outgoing oscillation."""
    z = _check_region(z, need_upper=True)
    if is_half_integer(nu):
        return hankel1_closed_form(nu, z, scaled=True)
    return sps.hankel1e(nu, z)


def hankel2_scaled(nu: float, z):
    """``e^{iz} H^{(2)}_nu(z)`` for real ``z > 0``."""
    z = _check_region(z, need_upper=False)
    if is_half_integer(nu) and np.all(np.asarray(z).imag == 0):
        return np.conj(hankel1_closed_form(nu, np.conj(z), scaled=True))
    return sps.hankel2e(nu, z)
