"""Uniform log-radial grids, tridiagonal operators, boundary closures and Gram matrices.

The grid variable is ``t = log rho = -log x``.  Operators are assembled in a
conservative (flux) form so that, with the trapezoid weights ``rho_i^n h``, the
discretization of a formally self-adjoint operator is a symmetric matrix:

    c2 (xD_x)^2 + c1 (xD_x) + c0
        = -rho^{-n} d_t(m2 d_t)  +  b d_t  +  c0,       m2 = rho^n c2,
          b = n c2 + d_t c2 + i c1,

and ``b d_t`` is split into the skew-symmetric average of ``b d_t`` and
``rho^{-n} d_t(rho^n b .)`` plus a zeroth order correction.  Both pieces use
centered second-order differences.

Boundary rows are closures ``u_0 = r_in u_1`` and ``u_{N-1} = r_out u_{N-2}``
where ``r`` is the exact ratio of a reference solution between the two nodes.
At the tip the reference solution is obtained by integrating the homogeneous
equation across the first cell from the regular Robin data, so potentials and
sigma-dependent terms do not degrade the closure to first order.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.integrate import solve_ivp

from .model import (AngularMode, InvalidParameters, ModelParams, OperatorKind, RadialCoeffs,
                    SpectralParam, build_coeffs)
from .special import bessel_order, hankel1_scaled, hankel2_scaled

__all__ = [
    "LogGrid",
    "OuterBC",
    "InnerBC",
    "BoundaryConditions",
    "RadialOperator",
    "NormFamily",
    "NormSpec",
    "GramMatrix",
    "assemble",
    "assemble_coeffs",
    "gram",
    "weight_apply",
    "mellin",
    "inverse_mellin",
    "MellinSample",
    "pullback",
    "b_density_norm",
    "two_end_norm",
    "SelfTest",
    "norm_selftests",
]

MIN_POINTS = 64
ACCEPTANCE_H = 0.05


@dataclass(frozen=True)
class LogGrid:
    """Uniform grid in ``t = log rho`` with ``N`` nodes on ``[t_min, t_max]``."""

    t_min: float
    t_max: float
    num_points: int

    def __post_init__(self):
        if int(self.num_points) != self.num_points or self.num_points < MIN_POINTS:
            raise InvalidParameters(f"grid needs N >= {MIN_POINTS} points, got {self.num_points}")
        if not self.t_max > self.t_min:
            raise InvalidParameters(f"grid nodes must increase: t_min={self.t_min}, t_max={self.t_max}")

    @classmethod
    def from_spacing(cls, t_min: float, t_max: float, h: float) -> "LogGrid":
        """Grid starting at ``t_min`` with step exactly ``h``; ``t_max`` is rounded up to the lattice."""
        steps = int(math.ceil((t_max - t_min) / h - 1e-9))
        return cls(t_min, t_min + steps * h, steps + 1)

    @property
    def h(self) -> float:
        return (self.t_max - self.t_min) / (self.num_points - 1)

    @property
    def t(self) -> np.ndarray:
        return self.t_min + self.h * np.arange(self.num_points)

    @property
    def rho(self) -> np.ndarray:
        return np.exp(self.t)

    @property
    def x(self) -> np.ndarray:
        return np.exp(-self.t)

    @property
    def acceptance_grade(self) -> bool:
        return self.h <= ACCEPTANCE_H + 1e-12

    def interior(self) -> "LogGrid":
        h = self.h
        return LogGrid(self.t_min + h, self.t_max - h, self.num_points - 2)

    def trapezoid_weights(self) -> np.ndarray:
        w = np.full(self.num_points, self.h)
        w[0] = w[-1] = self.h / 2
        return w

    def refine(self, factor: int) -> "LogGrid":
        return LogGrid(self.t_min, self.t_max, (self.num_points - 1) * factor + 1)


# ---------------------------------------------------------------------------
# boundary closures


class OuterBC(enum.Enum):
    EXACT_OUTGOING = "ExactOutgoing"
    EXACT_INCOMING = "ExactIncoming"
    ASYMPTOTIC_ROBIN = "AsymptoticRobin"


class InnerBC(enum.Enum):
    REGULAR_ROBIN = "RegularRobin"


@dataclass(frozen=True)
class BoundaryConditions:
    """Closures at the scattering end (large rho) and the truncated cone tip."""

    outer: OuterBC = OuterBC.EXACT_OUTGOING
    inner: InnerBC = InnerBC.REGULAR_ROBIN

    @staticmethod
    def robin_exponent(params: ModelParams, sigma: complex) -> complex:
        """Leading exponent ``a`` of ``u ~ x^a`` at the scattering end after conjugation."""
        return (params.n - 1 - 1j * (params.beta - params.gamma) + 1j * sigma * params.varpi) / 2

    def check(self, params: ModelParams, kind: OperatorKind):
        if self.outer in (OuterBC.EXACT_OUTGOING, OuterBC.EXACT_INCOMING):
            pot_ok = params.potential is None or params.potential.decay >= 2
            if params.beta != 0 or params.gamma != 0 or params.varpi != 0 or params.beta_prime.imag != 0 \
                    or not pot_ok:
                raise InvalidParameters(
                    f"{self.outer.value} closure needs beta = gamma = varpi = 0 and real beta'")
        if self.outer is OuterBC.EXACT_INCOMING and kind is not OperatorKind.UNCONJUGATED:
            raise InvalidParameters("incoming closure is only meaningful for the unconjugated operator")

    def ratios(self, params: ModelParams, mode: AngularMode, sigma: complex, kind: OperatorKind,
               grid: LogGrid) -> tuple[complex, complex]:
        """Return ``(r_in, r_out)`` with ``u_0 = r_in u_1`` and ``u_{N-1} = r_out u_{N-2}``."""
        self.check(params, kind)
        h = grid.h
        rho = grid.rho
        conj = kind is not OperatorKind.UNCONJUGATED
        c = params.c
        nu = np.sqrt(complex(mode.lam + c * c + params.beta_prime)).real

        # inner: regular solution with (rho d_rho - (nu - c)) u = 0 at rho_min
        a_in = nu - c - (1j * sigma * rho[0] if conj else 0.0)
        r_in = _tip_ratio(build_coeffs(params, mode, SpectralParam(sigma), kind), grid.t[0], h, a_in)

        d_rho = rho[-1] - rho[-2]
        if self.outer is OuterBC.ASYMPTOTIC_ROBIN:
            a = self.robin_exponent(params, sigma)
            r_out = np.exp(-a * h)
            if not conj:
                r_out *= np.exp(1j * sigma * d_rho)
            return complex(r_in), complex(r_out)

        nu_b = bessel_order(mode.lam, params.n, params.beta_prime)
        if sigma == 0:
            return complex(r_in), complex(np.exp(-(c + nu_b) * h))
        z = sigma * rho[-2:]
        if self.outer is OuterBC.EXACT_OUTGOING:
            hs = hankel1_scaled(nu_b, z)  # e^{-iz} H^(1)
            r_out = hs[1] / hs[0] * np.exp(-c * h)
            if not conj:
                r_out *= np.exp(1j * sigma * d_rho)
        else:
            hs = hankel2_scaled(nu_b, z)  # e^{iz} H^(2)
            r_out = hs[1] / hs[0] * np.exp(-c * h) * np.exp(-1j * sigma * d_rho)
        return complex(r_in), complex(r_out)


def _tip_ratio(coeffs: RadialCoeffs, t0: float, h: float, slope: complex) -> complex:
    """``u(t0) / u(t0 + h)`` for the homogeneous solution with ``u_t = slope u`` at ``t0``.

    Uses ``-c2 u_tt + i c1 u_t + c0 u = 0`` (``x D_x = i d/dt``).  For a pure
    power solution this is ``exp(-slope h)`` to integration tolerance.
    """
    def rhs(t, y):
        x = math.exp(-t)
        return [y[1], (1j * complex(coeffs.c1(x)) * y[1] + complex(coeffs.c0(x)) * y[0]) / complex(coeffs.c2(x))]

    sol = solve_ivp(rhs, (t0, t0 + h), [1.0 + 0j, complex(slope)], method="DOP853", rtol=1e-13, atol=1e-15)
    if not sol.success:
        raise InvalidParameters(f"tip closure integration failed: {sol.message}")
    return complex(1.0 / sol.y[0, -1])


# ---------------------------------------------------------------------------
# operators


@dataclass(frozen=True, eq=False)
class RadialOperator:
    """Tridiagonal operator on a :class:`LogGrid` with boundary closure rows."""

    matrix: sp.csr_matrix
    grid: LogGrid
    kind: OperatorKind | None
    sigma: complex
    mode: AngularMode | None
    params: ModelParams | None
    bc: BoundaryConditions | None
    r_in: complex
    r_out: complex
    _cache: dict = field(default_factory=dict, repr=False)

    @property
    def shape(self):
        return self.matrix.shape

    def extension(self) -> sp.csr_matrix:
        """Map ``E`` from interior values to full grid values satisfying the closures."""
        if "E" not in self._cache:
            m = self.grid.num_points - 2
            rows = np.concatenate(([0], np.arange(1, m + 1), [m + 1]))
            cols = np.concatenate(([0], np.arange(m), [m - 1]))
            vals = np.concatenate(([self.r_in], np.ones(m), [self.r_out])).astype(complex)
            self._cache["E"] = sp.csr_matrix((vals, (rows, cols)), shape=(m + 2, m))
        return self._cache["E"]

    def interior(self) -> sp.csc_matrix:
        """Interior block ``A[1:-1] E`` acting on interior unknowns."""
        if "A_int" not in self._cache:
            self._cache["A_int"] = (self.matrix[1:-1, :] @ self.extension()).tocsc()
        return self._cache["A_int"]

    def apply(self, u) -> np.ndarray:
        return self.matrix @ np.asarray(u, dtype=complex)


def _stencil(grid: LogGrid, n: int, poly2, poly1, c0_values) -> sp.csr_matrix:
    """Flux-form tridiagonal rows for monomial ``c2``, ``c1`` and sampled ``c0``."""
    t, h = grid.t, grid.h
    N = grid.num_points
    t_mid = t[:-1] + h / 2
    m2 = np.zeros(N - 1, dtype=complex)
    for p, a in poly2.items():
        m2 += a * np.exp((n - p) * t_mid)
    # b = sum_p b_p x^p with b_p = (n-p) a2_p + i a1_p
    bp: dict[float, complex] = {}
    for p, a in poly2.items():
        bp[p] = bp.get(p, 0) + (n - p) * a
    for p, a in poly1.items():
        bp[p] = bp.get(p, 0) + 1j * a
    m1 = np.zeros(N, dtype=complex)
    corr = np.zeros(N, dtype=complex)
    for p, b in bp.items():
        m1 += b * np.exp((n - p) * t)
        corr += 0.5 * (n - p) * b * np.exp(-p * t)
    inv = np.exp(-n * t)
    lower = np.zeros(N, dtype=complex)
    upper = np.zeros(N, dtype=complex)
    diag = np.zeros(N, dtype=complex)
    i = np.arange(1, N - 1)
    lower[i] = inv[i] * (-m2[i - 1] / h ** 2 - (m1[i] + m1[i - 1]) / (4 * h))
    upper[i] = inv[i] * (-m2[i] / h ** 2 + (m1[i] + m1[i + 1]) / (4 * h))
    diag[i] = inv[i] * (m2[i] + m2[i - 1]) / h ** 2 + c0_values[i] - corr[i]
    return sp.diags([lower[1:], diag, upper[:-1]], [-1, 0, 1], shape=(N, N), format="lil")


def assemble_coeffs(coeffs: RadialCoeffs, grid: LogGrid, r_in: complex, r_out: complex,
                    bc: BoundaryConditions | None = None) -> RadialOperator:
    """Assemble arbitrary monomial coefficients with given closure ratios."""
    n = coeffs.params.n
    A = _stencil(grid, n, coeffs.poly2, coeffs.poly1, coeffs.c0(grid.x))
    N = grid.num_points
    A[0, 0], A[0, 1] = 1.0, -r_in
    A[N - 1, N - 1], A[N - 1, N - 2] = 1.0, -r_out
    return RadialOperator(A.tocsr(), grid, coeffs.kind, coeffs.sp.sigma, coeffs.mode, coeffs.params,
                          bc, complex(r_in), complex(r_out))


def assemble(params: ModelParams, mode: AngularMode, sp_: SpectralParam, kind: OperatorKind | str,
             grid: LogGrid, bc: BoundaryConditions | None = None) -> RadialOperator:
    """Discretize one of the model operators on ``grid``.

    Raises
    ------
    InvalidParameters
        For the unconjugated kind when ``|sigma| rho_max h > 0.5`` (the phase
        ``exp(i sigma rho)`` is not resolved) or when the closure does not fit
        the parameters.
    """
    kind = OperatorKind.parse(kind)
    bc = bc or BoundaryConditions()
    if kind is OperatorKind.UNCONJUGATED:
        osc = sp_.abs * grid.rho[-1] * grid.h
        if osc > 0.5:
            raise InvalidParameters(
                f"unresolved oscillation for the unconjugated operator: |sigma| rho_max h = {osc:.3g} > 0.5")
    coeffs = build_coeffs(params, mode, sp_, kind)
    sigma = sp_.phase if kind is OperatorKind.RESCALED_TILDE else sp_.sigma
    r_in, r_out = bc.ratios(params, mode, sigma, kind, grid)
    return assemble_coeffs(coeffs, grid, r_in, r_out, bc)


# ---------------------------------------------------------------------------
# norms


class NormFamily(enum.Enum):
    HB = "Hb"
    RESOLVED = "HscbrResolved"


@dataclass(frozen=True)
class NormSpec:
    """Weighted Sobolev norm on one mode.

    ``Hb``: ``sum_{j+m<=s} lam^m int x^{-2l} |(xD_x)^j u|^2 rho^n dt``.

    ``HscbrResolved``: the same with the extra factor ``(1 + |sigma|/x)^{2(r-s-l)}``,
    which turns on the scattering-side decay shift and is identically one at
    ``r = s + l``.  ``alpha`` is the exponent of the separate pointwise
    multiplier ``(x + |sigma|)^alpha`` applied by the estimate layer.
    """

    family: NormFamily = NormFamily.HB
    s: int = 0
    l: float = 0.0
    r: float | None = None
    alpha: float = 0.0
    sigma_ref: float | None = None

    def __post_init__(self):
        fam = self.family if isinstance(self.family, NormFamily) else NormFamily(self.family)
        object.__setattr__(self, "family", fam)
        if int(self.s) != self.s or self.s < 0:
            raise InvalidParameters(f"differential order s={self.s} must be a nonnegative integer")
        object.__setattr__(self, "s", int(self.s))
        if self.r is None:
            object.__setattr__(self, "r", self.s + self.l)
        if fam is NormFamily.HB and abs(self.r - (self.s + self.l)) > 1e-12:
            raise InvalidParameters(f"Hb family requires r = s + l, got r={self.r}, s+l={self.s + self.l}")
        if fam is NormFamily.RESOLVED and self.r != self.s + self.l:
            if self.sigma_ref is None or not self.sigma_ref > 0:
                raise InvalidParameters("resolved family with r != s + l needs sigma_ref > 0")

    def with_sigma(self, sigma: float) -> "NormSpec":
        return replace(self, sigma_ref=float(sigma))


@dataclass(frozen=True, eq=False)
class GramMatrix:
    """Real symmetric positive definite banded matrix of a quadratic form on grid values."""

    matrix: sp.csr_matrix
    grid: LogGrid
    norm: NormSpec
    mode: AngularMode

    @property
    def bandwidth(self) -> int:
        return self.norm.s

    def quad(self, u) -> float:
        u = np.asarray(u)
        return float(np.real(np.vdot(u, self.matrix @ u)))

    def norm_of(self, u) -> float:
        return math.sqrt(max(self.quad(u), 0.0))

    def banded(self) -> np.ndarray:
        """Upper banded storage for :func:`scipy.linalg.cholesky_banded`."""
        return _upper_banded(self.matrix, self.bandwidth)

    def cholesky(self) -> np.ndarray:
        """Banded Cholesky factor; raises ``LinAlgError`` unless positive definite."""
        return sla.cholesky_banded(self.banded(), lower=False)


def _upper_banded(M, bw: int) -> np.ndarray:
    M = sp.dia_matrix(M)
    N = M.shape[0]
    ab = np.zeros((bw + 1, N), dtype=M.dtype)
    for off, row in zip(M.offsets, M.data):
        if 0 <= off <= bw:
            ab[bw - off, off:] = row[off:]
    return ab


def _forward_difference(N: int, j: int, h: float) -> sp.csr_matrix:
    coeffs = [(-1) ** (j - k) * math.comb(j, k) for k in range(j + 1)]
    return sp.diags([np.full(N - j, c) for c in coeffs], list(range(j + 1)),
                    shape=(N - j, N), format="csr") / h ** j


def norm_density(norm: NormSpec, grid_t: np.ndarray, n: int) -> np.ndarray:
    """``x^{-2l} rho^n`` times the resolved factor, at the given ``t`` values."""
    w = np.exp((n + 2 * norm.l) * grid_t)
    shift = norm.r - norm.s - norm.l
    if norm.family is NormFamily.RESOLVED and shift != 0:
        w = w * (1 + norm.sigma_ref * np.exp(grid_t)) ** (2 * shift)
    return w


def gram(norm: NormSpec, grid: LogGrid, mode: AngularMode, n: int = 3) -> GramMatrix:
    """Gram matrix of ``norm`` on ``grid`` for angular ``mode`` in dimension ``n``.

    The ``j``-th b-derivative is the ``j``-th forward difference, sampled at
    the staggered points ``t_i + j h/2`` and integrated with the trapezoid rule
    on those points.  Angular derivatives contribute ``sum_{m<=s-j} lam^m``.
    """
    if norm.s < 0:
        raise InvalidParameters("negative differential orders are not supported")
    N, h = grid.num_points, grid.h
    G = sp.csr_matrix((N, N))
    for j in range(norm.s + 1):
        ang = sum(mode.lam ** m for m in range(norm.s - j + 1))
        pts = grid.t[: N - j] + j * h / 2
        q = np.full(N - j, h)
        q[0] = q[-1] = h / 2
        w = ang * mode.multiplicity * q * norm_density(norm, pts, n)
        D = _forward_difference(N, j, h)
        G = G + D.T @ sp.diags(w) @ D
    G = (G + G.T) / 2   # the sparse triple products are symmetric only up to roundoff
    return GramMatrix(sp.csr_matrix(G), grid, norm, mode)


def weight_apply(alpha: float, sigma: float, u, grid: LogGrid) -> np.ndarray:
    """Pointwise ``(x_i + |sigma|)^alpha u_i``."""
    return (grid.x + abs(sigma)) ** alpha * np.asarray(u)


def weight_vector(alpha: float, sigma: float, grid: LogGrid, *, rescaled: bool = False) -> np.ndarray:
    """``(x + |sigma|)^alpha``, or ``(1 + x/|sigma|)^alpha`` when ``rescaled``."""
    x = grid.x
    s = abs(sigma)
    return (1 + x / s) ** alpha if rescaled else (x + s) ** alpha


# ---------------------------------------------------------------------------
# Mellin transform


@dataclass(frozen=True)
class MellinSample:
    """Samples of ``int x^{-i tau} u dx/x`` on the real ``tau`` line (FFT ordering)."""

    tau: np.ndarray
    values: np.ndarray
    grid: LogGrid


def mellin(u, grid: LogGrid, decay_tol: float = 1e-8) -> MellinSample:
    u = np.asarray(u, dtype=complex)
    peak = np.max(np.abs(u))
    if peak == 0 or max(abs(u[0]), abs(u[-1])) >= decay_tol * peak:
        raise InvalidParameters("Mellin transform on the real line needs u decaying at both grid ends")
    N, h = grid.num_points, grid.h
    tau = 2 * np.pi * np.fft.fftfreq(N, d=h)
    # int e^{i tau t} u dt with t_j = t_0 + j h
    vals = h * N * np.fft.ifft(u) * np.exp(1j * tau * grid.t_min)
    return MellinSample(tau, vals, grid)


def inverse_mellin(sample: MellinSample) -> np.ndarray:
    g = sample.grid
    return np.fft.fft(sample.values * np.exp(-1j * sample.tau * g.t_min)) / (g.h * g.num_points)


# ---------------------------------------------------------------------------
# dilations


def dilation_steps(sigma: float, grid: LogGrid, tol: float = 1e-9) -> int:
    """Number ``m`` of grid steps with ``log(1/sigma) = m h``; rejects incompatible sigma."""
    m = math.log(1 / abs(sigma)) / grid.h
    if abs(m - round(m)) > tol * max(1.0, abs(m)):
        raise InvalidParameters(f"log(1/|sigma|) = {m * grid.h} is not a multiple of h = {grid.h}")
    return int(round(m))


def pullback(v, sigma: float, grid: LogGrid) -> np.ndarray:
    """``(kappa_sigma^* v)(x) = v(x/sigma)`` as an index shift; vacated nodes are zero."""
    m = dilation_steps(sigma, grid)
    v = np.asarray(v)
    out = np.zeros_like(v)
    if m >= 0:
        out[m:] = v[: v.size - m]
    else:
        out[:m] = v[-m:]
    return out


def b_density_norm(v, grid: LogGrid, s: int = 0, lam: float = 0.0) -> float:
    """``H_b^s`` norm with respect to ``dt`` (weights ``x^{n/2}`` and ``rho^{n/2}`` folded in)."""
    N, h = grid.num_points, grid.h
    total = 0.0
    v = np.asarray(v)
    for j in range(s + 1):
        ang = sum(lam ** m for m in range(s - j + 1))
        d = _forward_difference(N, j, h) @ v
        q = np.full(N - j, h)
        q[0] = q[-1] = h / 2
        total += ang * float(np.sum(q * np.abs(d) ** 2))
    return math.sqrt(total)


def two_end_norm(v, grid: LogGrid, n: int, s: int, l: float, nu: float, lam: float = 0.0) -> float:
    """Norm with b-decay ``l`` at ``x = 0`` and order ``nu`` at ``x = infinity``.

    The weight relative to the b-density norm is
    ``(1 + x)^{nu - n/2} (1 + 1/x)^{l + n/2}``, applied before differentiating.
    """
    x = grid.x
    w = (1 + x) ** (nu - n / 2) * (1 + 1 / x) ** (l + n / 2)
    return b_density_norm(w * np.asarray(v), grid, s, lam)


# ---------------------------------------------------------------------------
# self-tests of norms, stencils and the Mellin transform


@dataclass(frozen=True)
class SelfTest:
    check: str
    value: float
    reference: float
    error: float
    tol: float

    @property
    def passed(self) -> bool:
        return bool(self.error < self.tol)


def norm_selftests(seed: int = 0) -> list[SelfTest]:
    """Closed-form checks of the Gram matrices, the stencil and the Mellin transform."""
    from .indicial import b_laplacian_coeffs, mellin_symbol_eval   # indicial imports model only
    from .model import SpectralParam, apply_coeffs, build_coeffs

    rng = np.random.default_rng(seed)
    out: list[SelfTest] = []
    exact = ModelParams(n=3)
    m0, m1 = AngularMode.sphere(0, 3), AngularMode.sphere(1, 3)

    # int_1^e rho^2 d rho with the trapezoid rule in t, relative error
    g = LogGrid.from_spacing(0.0, 1.0, 0.01)
    G = gram(NormSpec(s=0, l=0.0), g, AngularMode(0, 0.0, 1), 3)
    val, ref = G.quad(np.ones(g.num_points)), (math.e ** 3 - 1) / 3
    out.append(SelfTest("l2_quadrature_e3", val, ref, abs(val - ref) / ref, 1e-4))

    # resolved family at r = s + l equals the plain b-family entrywise
    g = LogGrid.from_spacing(-4.0, 6.0, 0.05)
    for s, l in ((0, 0.5), (2, -0.75), (1, 1.25)):
        Gb = gram(NormSpec(s=s, l=l), g, m1).matrix
        Gr = gram(NormSpec(NormFamily.RESOLVED, s=s, l=l, r=s + l, sigma_ref=1e-3), g, m1).matrix
        diff = abs(Gb - Gr).max()
        out.append(SelfTest(f"resolved_equals_hb_s{s}_l{l:g}", float(diff), 0.0, float(diff), 1e-15))

    # l-shift law: |x^d u|_{0,l} = |u|_{0,l-d}
    u = np.exp(-((g.t - 1.0) / 0.8) ** 2)
    for d in (0.5, -1.0):
        a = gram(NormSpec(s=0, l=-0.75), g, m0).norm_of(g.x ** d * u)
        b = gram(NormSpec(s=0, l=-0.75 - d), g, m0).norm_of(u)
        out.append(SelfTest(f"weight_shift_d{d:g}", a, b, abs(a - b) / b, 1e-12))

    # positivity of the acceptance Gram matrices
    for name, norm in (("Hb_2_-0.75", NormSpec(s=2, l=-0.75)), ("Hb_1_1.25", NormSpec(s=1, l=1.25)),
                       ("Hb_2_0.25", NormSpec(s=2, l=0.25))):
        for mode in (m0, m1):
            Gm = gram(norm, g, mode)
            ok = 1.0
            try:
                Gm.cholesky()
            except np.linalg.LinAlgError:
                ok = 0.0
            v = rng.standard_normal((g.num_points, 20))
            q = np.einsum("ij,ij->j", v, Gm.matrix @ v)
            worst = float(q.min() / q.max())
            out.append(SelfTest(f"gram_positive_{name}_k{mode.k}", worst, 0.0, 1.0 - ok, 0.5))

    # Mellin round trip and the symbol of the b-normalized Laplacian
    g = LogGrid.from_spacing(-12.0, 12.0, 0.05)
    u = np.exp(-g.t ** 2 / 2)
    ms = mellin(u, g)
    rt = float(np.max(np.abs(inverse_mellin(ms) - u)))
    out.append(SelfTest("mellin_round_trip", rt, 0.0, rt, 1e-8))
    for mode in (m0, m1):
        Lu = apply_coeffs(b_laplacian_coeffs(exact, mode), g, u)
        ml = mellin(Lu, g)
        sym = np.array([mellin_symbol_eval(exact, mode, t) for t in ms.tau])
        mask = np.abs(ms.values) > 1e-6 * np.abs(ms.values).max()
        err = float(np.max(np.abs(ml.values - sym * ms.values)[mask] / np.abs(sym * ms.values)[mask]))
        out.append(SelfTest(f"mellin_laplacian_symbol_k{mode.k}", err, 0.0, err, 1e-6))

    # stencil order on a Gaussian (conjugated operator, sigma = 0.1, k = 1)
    errs = []
    for h in (0.05, 0.025, 0.0125):
        gs = LogGrid.from_spacing(-6.0, 6.0, h)
        w = np.exp(-gs.t ** 2)
        sp_ = SpectralParam(0.1)
        op = assemble(exact, m1, sp_, OperatorKind.CONJUGATED, gs)
        ex = apply_coeffs(build_coeffs(exact, m1, sp_, OperatorKind.CONJUGATED), gs, w)
        errs.append(float(np.max(np.abs((op.matrix @ w - ex)[1:-1]))))
    order = float(np.polyfit(np.log([0.05, 0.025, 0.0125]), np.log(errs), 1)[0])
    out.append(SelfTest("stencil_order", order, 2.0, abs(order - 2.0), 0.1))
    return out
