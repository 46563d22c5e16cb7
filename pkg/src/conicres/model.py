"""Model spectral family on an exact or radially perturbed cone, per angular mode.

Every operator is stored in the b-derivative basis,

    c2(x) (x D_x)^2 + c1(x) (x D_x) + c0(x),      D_x = -i d/dx,

with ``x = 1/rho`` the boundary defining function.  In the log variable
``t = log rho = -log x`` one has ``x D_x = i d/dt``.

The unconjugated family is

    P(sigma) = (x^2 D_x)^2 + (i(n-1) + beta) x (x^2 D_x) + x^2 (lam + beta')
               + W(x) + sigma gamma x - sigma^2 (1 - varpi x)

and the conjugated family is ``exp(-i sigma/x) P(sigma) exp(i sigma/x)``.  The
basis change used throughout is

    (x^2 D_x)^2   = x^2 ((x D_x)^2 - i (x D_x)),
    x (x^2 D_x)   = x^2 (x D_x).

The zeroth order coefficient also carries ``i beta (n-2)/2``, so that the Mellin
symbol of the normal operator is exactly ``tau^2 + beta tau + beta' + lam + ((n-2)/2)^2``.
"""

from __future__ import annotations

import enum
import math
from collections.abc import Callable, Mapping
from dataclasses import dataclass
from typing import Any

import numpy as np

__all__ = [
    "OperatorKind",
    "Potential",
    "ModelParams",
    "InvalidParameters",
    "SpectralParam",
    "AngularMode",
    "RadialCoeffs",
    "validate_params",
    "build_coeffs",
    "apply_coeffs",
    "apply_conjugation",
]


class InvalidParameters(ValueError):
    """Raised when a model, grid or solver precondition is violated."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))


class OperatorKind(enum.Enum):
    UNCONJUGATED = "Unconjugated"
    CONJUGATED = "Conjugated"
    NORMAL0 = "Normal0"
    RESCALED_TILDE = "RescaledTilde"

    @classmethod
    def parse(cls, value: "OperatorKind | str") -> "OperatorKind":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower().replace("_", "").replace("-", "")
        for member in cls:
            if member.value.lower() == key or member.name.lower().replace("_", "") == key:
                return member
        raise InvalidParameters(f"unknown operator kind {value!r}")


@dataclass(frozen=True)
class Potential:
    """Radial potential ``W(x)`` with a declared decay rate ``W(x) = O(x**decay)``."""

    func: Callable[[np.ndarray], np.ndarray]
    decay: float = 2.0
    name: str = "W"

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)))

    def is_zero(self) -> bool:
        probe = np.logspace(-6, 3, 25)
        return bool(np.all(self(probe) == 0))


# Sample on which the declared decay of a potential is spot-checked.
_DECAY_SAMPLE = np.logspace(-8, -2, 13)


def _decay_violation(pot: Potential) -> str | None:
    if pot.decay < 2:
        return f"potential decay rate p_W={pot.decay} must be >= 2"
    with np.errstate(all="ignore"):
        vals = np.abs(pot(_DECAY_SAMPLE))
        ratio = vals / _DECAY_SAMPLE ** pot.decay
    if vals.shape != _DECAY_SAMPLE.shape or not np.all(np.isfinite(ratio)):
        return "potential must return finite values of the same shape as its input"
    # W/x^p bounded: the ratio may not blow up as x -> 0.
    if ratio[0] > 10.0 * ratio[-1] + 1e-12:
        return (f"potential does not decay at the declared rate x^{pot.decay}: "
                f"|W|/x^p grows from {ratio[-1]:.3g} to {ratio[0]:.3g} as x -> 0")
    return None


_PARAM_FIELDS = ("n", "beta", "beta_prime", "gamma", "varpi", "potential")


def validate_params(params: "ModelParams | Mapping[str, Any]") -> list[str]:
    """Return one diagnostic string per violated invariant ([] when valid).

    Accepts a :class:`ModelParams` or a mapping with the same field names, so
    parameter sets can be checked before construction.
    """
    if isinstance(params, Mapping):
        unknown = set(params) - set(_PARAM_FIELDS)
        if unknown:
            return [f"unknown parameter field(s): {sorted(unknown)}"]
        get = lambda k, d: params.get(k, d)  # noqa: E731
    else:
        get = lambda k, d: getattr(params, k, d)  # noqa: E731

    diags: list[str] = []
    n = get("n", None)
    try:
        beta = complex(get("beta", 0))
        beta_prime = complex(get("beta_prime", 0))
        complex(get("gamma", 0))
        varpi = get("varpi", 0.0)
    except (TypeError, ValueError) as exc:
        return [f"non-numeric coefficient: {exc}"]
    if isinstance(varpi, complex) and varpi.imag != 0:
        diags.append("varpi must be real")
    if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
        diags.append(f"dimension n must be an integer, got {n!r}")
        return diags
    if n < 3:
        diags.append(f"dimension n={n} violates n >= 3")
    if beta.real != 0:
        diags.append(f"Re beta = {beta.real} violates Re beta = 0")
    c = (n - 2) / 2
    bound = (beta * beta).real / 4 - c * c
    if not beta_prime.real > bound:
        diags.append(f"Re beta' = {beta_prime.real} violates Re beta' > beta^2/4 - ((n-2)/2)^2 = {bound}")
    pot = get("potential", None)
    if pot is not None:
        if not isinstance(pot, Potential):
            diags.append("potential must be a Potential instance (function plus decay rate)")
        else:
            msg = _decay_violation(pot)
            if msg:
                diags.append(msg)
    return diags


@dataclass(frozen=True)
class ModelParams:
    """Coefficients of the model family; validated on construction."""

    n: int = 3
    beta: complex = 0j
    beta_prime: complex = 0j
    gamma: complex = 0j
    varpi: float = 0.0
    potential: Potential | None = None

    def __post_init__(self):
        diags = validate_params(self)
        if diags:
            raise InvalidParameters(diags)
        object.__setattr__(self, "beta", complex(self.beta))
        object.__setattr__(self, "beta_prime", complex(self.beta_prime))
        object.__setattr__(self, "gamma", complex(self.gamma))
        object.__setattr__(self, "varpi", float(self.varpi))

    @property
    def c(self) -> float:
        """Half the dimension shift, ``(n-2)/2``."""
        return (self.n - 2) / 2

    @property
    def is_exact_cone(self) -> bool:
        return (self.beta == 0 and self.beta_prime == 0 and self.gamma == 0
                and self.varpi == 0 and (self.potential is None or self.potential.is_zero()))


@dataclass(frozen=True)
class SpectralParam:
    """Spectral parameter with ``Im sigma >= 0``."""

    sigma: complex

    def __post_init__(self):
        s = complex(self.sigma)
        if not np.isfinite(s.real) or not np.isfinite(s.imag):
            raise InvalidParameters(f"sigma={self.sigma!r} is not finite")
        if s.imag < 0:
            raise InvalidParameters(f"sigma={s} violates Im sigma >= 0")
        object.__setattr__(self, "sigma", s)

    @property
    def abs(self) -> float:
        return abs(self.sigma)

    @property
    def phase(self) -> complex:
        """Normalized phase ``sigma/|sigma|``."""
        if self.sigma == 0:
            raise InvalidParameters("phase of sigma = 0 is undefined")
        return self.sigma / abs(self.sigma)

    def require_nonzero(self, what: str = "this operation"):
        if self.sigma == 0:
            raise InvalidParameters(f"{what} requires sigma != 0")


@dataclass(frozen=True)
class AngularMode:
    """Eigenmode of the cross-section Laplacian."""

    k: int
    lam: float
    multiplicity: int = 1

    def __post_init__(self):
        if self.k < 0:
            raise InvalidParameters(f"mode index k={self.k} must be nonnegative")
        if self.lam < 0:
            raise InvalidParameters(f"eigenvalue lambda={self.lam} must be nonnegative")
        if self.multiplicity < 1:
            raise InvalidParameters("multiplicity must be a positive integer")

    @classmethod
    def sphere(cls, k: int, n: int) -> "AngularMode":
        """Spherical harmonics of degree ``k`` on ``S^{n-1}``."""
        mult = math.comb(k + n - 1, n - 1) - (math.comb(k + n - 3, n - 1) if k >= 2 else 0)
        return cls(k=k, lam=float(k * (k + n - 2)), multiplicity=mult)


def _poly_eval(poly: Mapping[float, complex], x):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape, dtype=complex)
    for p, a in poly.items():
        if a != 0:
            out += a * x ** p
    return out


@dataclass(frozen=True)
class RadialCoeffs:
    """b-basis coefficients of one operator on one angular mode.

    ``poly2``, ``poly1`` and ``poly0`` map x-exponents to complex coefficients;
    ``potential`` (if any) is added to ``c0``.  For the rescaled kind the
    variable is ``X = x/|sigma|`` rather than ``x``.
    """

    kind: OperatorKind
    params: ModelParams
    mode: AngularMode
    sp: SpectralParam
    poly2: Mapping[float, complex]
    poly1: Mapping[float, complex]
    poly0: Mapping[float, complex]
    potential: Potential | None = None
    variable: str = "x"

    def c2(self, x):
        return _poly_eval(self.poly2, x)

    def c1(self, x):
        return _poly_eval(self.poly1, x)

    def c0(self, x):
        out = _poly_eval(self.poly0, x)
        if self.potential is not None:
            out = out + self.potential(x)
        return out


def build_coeffs(params: ModelParams, mode: AngularMode, sp: SpectralParam,
                 kind: OperatorKind | str) -> RadialCoeffs:
    """Per-mode b-basis coefficients of ``P``, ``P-hat``, ``N_0`` or ``P-tilde``.

    Parameters
    ----------
    params, mode, sp
        Model, angular mode and spectral parameter.
    kind
        ``Unconjugated`` (``P(sigma)``), ``Conjugated`` (``P-hat(sigma)``),
        ``Normal0`` (effective normal operator, no potential, no
        ``sigma^2 varpi x`` term) or ``RescaledTilde`` (the normal operator in
        ``X = x/|sigma|`` with ``|sigma|^2`` divided out; its spectral
        parameter is the phase of sigma).

    Returns
    -------
    RadialCoeffs
    """
    kind = OperatorKind.parse(kind)
    n, lam = params.n, mode.lam
    beta, bp, gamma, varpi = params.beta, params.beta_prime, params.gamma, params.varpi
    if kind in (OperatorKind.NORMAL0, OperatorKind.RESCALED_TILDE) and sp.sigma == 0:
        raise InvalidParameters(f"kind {kind.value} requires sigma != 0")
    s = sp.sigma
    a2 = lam + bp + 1j * beta * (n - 2) / 2   # x^2 coefficient of c0
    b2 = 1j * (n - 2) + beta                  # x^2 coefficient of c1

    if kind is OperatorKind.UNCONJUGATED:
        return RadialCoeffs(kind, params, mode, sp,
                            poly2={2: 1.0}, poly1={2: b2},
                            poly0={2: a2, 1: s * gamma + s * s * varpi, 0: -s * s},
                            potential=params.potential)
    if kind is OperatorKind.CONJUGATED:
        return RadialCoeffs(kind, params, mode, sp,
                            poly2={2: 1.0}, poly1={2: b2, 1: -2 * s},
                            poly0={2: a2, 1: -s * (1j * (n - 1) + beta - gamma) + s * s * varpi},
                            potential=params.potential)
    if kind is OperatorKind.RESCALED_TILDE:
        s = sp.phase
    poly0 = {2: a2, 1: -s * (1j * (n - 1) + beta - gamma)}
    return RadialCoeffs(kind, params, mode, sp, poly2={2: 1.0}, poly1={2: b2, 1: -2 * s},
                        poly0=poly0, potential=None,
                        variable="X" if kind is OperatorKind.RESCALED_TILDE else "x")


def _spectral_dt(u: np.ndarray, h: float, order: int) -> np.ndarray:
    n = u.shape[-1]
    k = 2 * np.pi * np.fft.fftfreq(n, d=h)
    if n % 2 == 0:
        k[n // 2] = 0.0 if order % 2 else k[n // 2]
    return np.fft.ifft((1j * k) ** order * np.fft.fft(u))


def _fd4_dt(u: np.ndarray, h: float):
    d1 = np.full(u.shape, np.nan, dtype=complex)
    d2 = np.full(u.shape, np.nan, dtype=complex)
    d1[2:-2] = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    d2[2:-2] = (-u[:-4] + 16 * u[1:-3] - 30 * u[2:-2] + 16 * u[3:-1] - u[4:]) / (12 * h * h)
    return d1, d2


def apply_coeffs(coeffs: RadialCoeffs, grid, u, method: str = "spectral") -> np.ndarray:
    """Apply ``c2 (xD_x)^2 + c1 (xD_x) + c0`` to grid samples ``u``.

    ``method="spectral"`` differentiates in ``t`` by FFT (``u`` must decay at
    both grid ends); ``method="fd4"`` uses fourth-order central differences and
    leaves the two outermost nodes at each end as NaN.
    """
    u = np.asarray(u, dtype=complex)
    x = grid.x
    if method == "spectral":
        ut = _spectral_dt(u, grid.h, 1)
        utt = _spectral_dt(u, grid.h, 2)
    elif method == "fd4":
        ut, utt = _fd4_dt(u, grid.h)
    else:
        raise InvalidParameters(f"unknown differentiation method {method!r}")
    # x D_x = i d/dt, (x D_x)^2 = -d^2/dt^2
    return -coeffs.c2(x) * utt + 1j * coeffs.c1(x) * ut + coeffs.c0(x) * u


def apply_conjugation(params: ModelParams, mode: AngularMode, sp: SpectralParam, u, grid,
                      method: str = "spectral") -> np.ndarray:
    """Oracle ``exp(-i sigma/x) P(sigma) (exp(i sigma/x) u)`` by direct multiplication.

    Raises :class:`InvalidParameters` when the grid cannot resolve the phase,
    i.e. when ``|sigma| rho_max h > 0.5``.
    """
    rho = grid.rho
    osc = sp.abs * rho[-1] * grid.h
    if osc > 0.5:
        raise InvalidParameters(
            f"grid too coarse for the phase exp(i sigma/x): |sigma| rho_max h = {osc:.3g} > 0.5")
    phase = np.exp(1j * sp.sigma * rho)
    coeffs = build_coeffs(params, mode, sp, OperatorKind.UNCONJUGATED)
    w = apply_coeffs(coeffs, grid, phase * np.asarray(u, dtype=complex), method=method)
    return w / phase
