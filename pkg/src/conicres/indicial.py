"""Mellin symbol, indicial roots and admissible weight intervals."""

from __future__ import annotations

import cmath
import enum
from dataclasses import dataclass

from .model import AngularMode, InvalidParameters, ModelParams, OperatorKind, RadialCoeffs, SpectralParam

__all__ = [
    "End",
    "OrderBranch",
    "MellinSymbol",
    "CentralInterval",
    "mellin_symbol",
    "mellin_symbol_eval",
    "indicial_roots",
    "central_interval",
    "alpha_interval",
    "validate_orders",
    "b_laplacian_coeffs",
]


class End(enum.Enum):
    SCATTERING = "ScatteringEnd"
    CONIC = "ConicPoint"


class OrderBranch(enum.Enum):
    BRANCH_A = "BranchA"
    BRANCH_B = "BranchB"
    INVALID = "Invalid"


@dataclass(frozen=True)
class MellinSymbol:
    """Quadratic ``a2 tau^2 + a1 tau + a0`` with ``a2 == 1``."""

    a1: complex
    a0: complex
    a2: complex = 1.0

    def __call__(self, tau):
        return (self.a2 * tau + self.a1) * tau + self.a0


@dataclass(frozen=True)
class CentralInterval:
    lo: float
    hi: float
    end: End

    def __contains__(self, value: float) -> bool:
        return self.lo < value < self.hi

    def as_tuple(self) -> tuple[float, float]:
        return (self.lo, self.hi)


def mellin_symbol(params: ModelParams, mode: AngularMode) -> MellinSymbol:
    c = params.c
    return MellinSymbol(a1=params.beta, a0=params.beta_prime + mode.lam + c * c)


def mellin_symbol_eval(params: ModelParams, mode: AngularMode, taub: complex) -> complex:
    """Evaluate ``tau^2 + beta tau + beta' + lam + ((n-2)/2)^2``."""
    return complex(mellin_symbol(params, mode)(complex(taub)))


def _sort_key(z: complex):
    # nonnegative imaginary part first, then nonnegative real part first
    return (z.imag < 0, z.real < 0, -z.imag, -z.real)


def indicial_roots(params: ModelParams, mode: AngularMode) -> tuple[complex, complex]:
    sym = mellin_symbol(params, mode)
    disc = cmath.sqrt(complex(sym.a1 * sym.a1 - 4 * sym.a0) + 0j)
    r1 = (-sym.a1 + disc) / 2
    r2 = (-sym.a1 - disc) / 2
    # Vieta-stable second root when the first one is much larger
    if abs(r1) > 0 and abs(r2) < 1e-8 * abs(r1):
        r2 = sym.a0 / r1
    roots = sorted((complex(r1), complex(r2)), key=_sort_key)
    return roots[0], roots[1]


def _scattering_bounds(params: ModelParams) -> tuple[float, float]:
    beta = params.beta
    c = params.c
    root = cmath.sqrt(-beta * beta / 4 + c * c + params.beta_prime)
    mid = -1 + beta.imag / 2
    return mid - root.real, mid + root.real


def central_interval(params: ModelParams, end: End | str = End.SCATTERING) -> CentralInterval:
    """Weight window between the critical indicial lines at the given end."""
    if not isinstance(end, End):
        end = End(end) if end in {e.value for e in End} else End[str(end).upper()]
    lo, hi = _scattering_bounds(params)
    if not lo < hi:
        raise InvalidParameters(f"degenerate central interval ({lo}, {hi})")
    if end is End.CONIC:
        return CentralInterval(-hi, -lo, end)
    return CentralInterval(lo, hi, end)


def alpha_interval(params: ModelParams, l: float) -> tuple[float, float]:
    """Admissible resolved-weight exponents ``(l - nu_+, l - nu_-)``."""
    nu_lo, nu_hi = _scattering_bounds(params)
    return (l - nu_hi, l - nu_lo)


def validate_orders(params: ModelParams, r: float, l: float) -> OrderBranch:
    bg_plus = (params.beta + params.gamma).imag / 2
    bg_minus = (params.beta - params.gamma).imag / 2
    if r > -0.5 + bg_plus and l < -0.5 + bg_minus:
        return OrderBranch.BRANCH_A
    if r < -0.5 + bg_plus and l > -0.5 + bg_minus:
        return OrderBranch.BRANCH_B
    return OrderBranch.INVALID


def b_laplacian_coeffs(params: ModelParams, mode: AngularMode) -> RadialCoeffs:
    """``(xD_x)^2 + beta (xD_x) + beta' + lam + c^2``: the renormalized normal operator.

    Its Mellin symbol is :func:`mellin_symbol_eval`; with ``beta = beta' = 0``
    it is the b-normalized Laplacian, positive on ``L^2_b``.
    """
    c = params.c
    return RadialCoeffs(OperatorKind.NORMAL0, params, mode, SpectralParam(0),
                        poly2={0: 1.0}, poly1={0: params.beta},
                        poly0={0: params.beta_prime + mode.lam + c * c})
