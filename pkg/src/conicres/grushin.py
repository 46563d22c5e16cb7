"""Zero-energy kernel engineering and the Grushin block decomposition.

A free exact cone (``n = 3``, spherical mode ``k = 0``) is perturbed by an
attractive radial bump ``c * V_bump`` whose coupling is tuned until the
discretized conjugated operator at ``sigma = 0`` acquires a one-dimensional
kernel.  The free operator then plays the role of the invertible comparison
operator ``P_check``, the tuned one is ``P_hat``, and ``V = P_check - P_hat``
is independent of ``sigma``.

All linear algebra happens on interior unknowns of a :class:`LogGrid`.  The
``L^2_{g_0}`` pairing uses the diagonal weights ``h rho^n``.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from collections.abc import Sequence

import numpy as np
import scipy.linalg as sla
from scipy.optimize import brentq

from .discretization import LogGrid, assemble
from .model import AngularMode, InvalidParameters, ModelParams, OperatorKind, Potential, SpectralParam

__all__ = [
    "NoKernel",
    "default_bump",
    "default_grid",
    "KernelSetup",
    "lowest_eigenvalue",
    "tune_kernel",
    "fit_power",
    "fit_slope",
    "BlockReport",
    "block_scaling",
    "block_inverse_norms",
    "PairingReport",
    "pairing_check",
]

SLOPE_TOL = 0.1
DEFECT_MIN_SLOPE = 1.9
DECAY_GAIN_MIN = 0.9
KERNEL_POWER_WINDOW = (0.5, 1.5)
SV_RATIO_MAX = 1e-10


class NoKernel(InvalidParameters):
    """The discretized operator has no (isolated) zero-energy kernel."""


def default_bump() -> Potential:
    """Attractive bump ``-(1 + rho^2)^{-2}``, i.e. ``-x^4 / (1 + x^2)^2``.

    The ``x^4`` tail keeps the potential short range while leaving a
    measurable subleading term in the kernel element, which the decay-gain
    check needs (a compactly supported bump makes that term vanish exactly).
    """
    return Potential(lambda x: -x ** 4 / (1 + x ** 2) ** 2, decay=4.0, name="bump")


def default_grid(h: float = 0.05) -> LogGrid:
    return LogGrid.from_spacing(-2.0, 3.0, h)


def _l2_weights(grid: LogGrid, n: int) -> np.ndarray:
    return grid.h * grid.interior().rho ** n


def _assembled(params: ModelParams, mode: AngularMode, grid: LogGrid, sigma: float, coupling: float = 0.0,
               bump: Potential | None = None):
    if coupling != 0.0:
        pot = Potential(lambda x, c=coupling, b=bump: c * b(x), decay=bump.decay, name=f"{coupling:g}*{bump.name}")
        params = replace(params, potential=pot)
    return assemble(params, mode, SpectralParam(sigma), OperatorKind.CONJUGATED, grid)


def _operator(params: ModelParams, mode: AngularMode, grid: LogGrid, sigma: float, coupling: float = 0.0,
              bump: Potential | None = None) -> np.ndarray:
    return _assembled(params, mode, grid, sigma, coupling, bump).interior().toarray()


def _b_weights(grid: LogGrid, n: int) -> np.ndarray:
    return grid.h * grid.interior().rho ** (n - 2)


def _b_symmetric(A: np.ndarray, grid: LogGrid, n: int) -> np.ndarray:
    """``G_b^{1/2} rho^2 A G_b^{-1/2}`` with ``G_b = h rho^{n-2}``.

    ``rho^2 P_hat(0)`` is the b-normalized operator (entries of size ``1/h^2``
    across the whole grid) and is self-adjoint for ``h rho^{n-2}``; working
    with it keeps the zero singular value at the roundoff level of ``1/h^2``
    rather than of the ``x^2/h^2`` entries near the tip.
    """
    rho = grid.interior().rho
    s = np.sqrt(_b_weights(grid, n))
    return (s[:, None] * (rho ** 2)[:, None] * A) / s[None, :]


def lowest_eigenvalue(params: ModelParams, mode: AngularMode, grid: LogGrid, coupling: float,
                      bump: Potential | None = None) -> float:
    """Lowest eigenvalue of the b-normalized ``rho^2 (P_hat(0) + c V_bump)``.

    At ``sigma = 0`` the flux-form matrix is self-adjoint for the weights
    ``h rho^n`` (``h rho^{n-2}`` after b-normalization), so the eigenvalues
    are real and the lowest one crosses zero exactly where the first kernel
    appears.
    """
    bump = bump or default_bump()
    S = _b_symmetric(_operator(params, mode, grid, 0.0, coupling, bump), grid, params.n)
    S = (S + S.conj().T) / 2
    return float(sla.eigvalsh(S, subset_by_index=[0, 0])[0])


@dataclass(frozen=True)
class KernelSetup:
    """A tuned kernel at zero energy and the data of the Grushin decomposition."""

    base: ModelParams
    mode: AngularMode
    grid: LogGrid
    bump: Potential
    coupling: float
    u0: np.ndarray           # interior values, unit L^2_{g_0} norm
    u0_star: np.ndarray      # left null vector for the L^2_{g_0} pairing, unit norm
    singular_values: tuple[float, float]   # of the b-normalized operator
    kernel_power: float
    weights: np.ndarray = field(repr=False)

    @property
    def sv_ratio(self) -> float:
        return self.singular_values[0] / self.singular_values[1]

    @property
    def is_kernel(self) -> bool:
        return self.sv_ratio < SV_RATIO_MAX

    def p_hat(self, sigma: float) -> np.ndarray:
        return _operator(self.base, self.mode, self.grid, sigma, self.coupling, self.bump)

    def p_check(self, sigma: float) -> np.ndarray:
        """The free operator with the closure rows of ``P_hat``.

        Sharing the tip closure (which sees the potential) keeps
        ``P_check - P_hat = V`` exact on the discrete level.
        """
        return self.p_hat(sigma) + self.V()

    def V(self) -> np.ndarray:
        """``P_check - P_hat``, a diagonal matrix independent of ``sigma``."""
        x = self.grid.interior().x
        return np.diag(-self.coupling * self.bump(x)).astype(complex)

    def pair(self, a, b) -> complex:
        """``<a, b>`` in ``L^2_{g_0}`` (linear in ``a``)."""
        return complex(np.sum(self.weights * a * np.conj(b)))

    def full_u0(self) -> np.ndarray:
        """``u0`` extended to the whole grid by the closure conditions."""
        A = _assembled(self.base, self.mode, self.grid, 0.0, self.coupling, self.bump)
        return A.extension() @ self.u0


def fit_power(x: np.ndarray, values: np.ndarray) -> float:
    """Least-squares exponent ``p`` in ``|values| ~ x^p``."""
    return float(np.polyfit(np.log(x), np.log(np.abs(values)), 1)[0])


def fit_slope(sigmas, values) -> float:
    return float(np.polyfit(np.log(np.asarray(sigmas)), np.log(np.abs(np.asarray(values))), 1)[0])


def _fit_window(grid: LogGrid, t_lo: float = 0.5, t_hi: float | None = None) -> np.ndarray:
    t = grid.interior().t
    t_hi = grid.t_max - 0.5 if t_hi is None else t_hi
    return (t >= t_lo) & (t <= t_hi)


def tune_kernel(base: ModelParams | None = None, bump: Potential | None = None,
                c_bracket: tuple[float, float] = (0.0, 20.0), *, grid: LogGrid | None = None,
                mode: AngularMode | None = None, scan: int = 41, xtol: float = 1e-13) -> KernelSetup:
    """Tune the coupling of ``bump`` until ``P_hat(0) + c V_bump`` has a kernel.

    A coarse scan of ``c_bracket`` locates the first sign change of the
    lowest eigenvalue (the smallest singular value has its zero there); a
    bracketing root finder then refines it to ``xtol``.

    Raises
    ------
    NoKernel
        If the lowest eigenvalue does not change sign inside ``c_bracket``.
    """
    base = base or ModelParams(n=3)
    if not base.is_exact_cone:
        raise InvalidParameters("kernel tuning starts from the exact cone (beta = beta' = gamma = varpi = 0, W = 0)")
    bump = bump or default_bump()
    grid = grid or default_grid()
    mode = mode or AngularMode.sphere(0, base.n)
    lo, hi = map(float, c_bracket)
    if not hi > lo:
        raise InvalidParameters(f"empty coupling bracket {c_bracket}")

    def f(c):
        return lowest_eigenvalue(base, mode, grid, c, bump)

    cs = np.linspace(lo, hi, scan)
    vals = np.array([f(c) for c in cs])
    sign_change = np.nonzero(np.sign(vals[:-1]) * np.sign(vals[1:]) <= 0)[0]
    if sign_change.size == 0:
        raise NoKernel(f"lowest eigenvalue keeps its sign on c in [{lo:g}, {hi:g}] "
                       f"(range [{vals.min():.3g}, {vals.max():.3g}]): no kernel in the bracket")
    j = int(sign_change[0])
    c_star = brentq(f, cs[j], cs[j + 1], xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=200)

    g = _l2_weights(grid, base.n)
    gb = _b_weights(grid, base.n)
    S = _b_symmetric(_operator(base, mode, grid, 0.0, c_star, bump), grid, base.n)
    U, sv, Wh = np.linalg.svd(S)
    # right/left singular vectors of the smallest value; the left one, pulled
    # back through rho^2 and the weights, is the L^2_{g_0} cokernel vector
    u0 = Wh[-1].conj() / np.sqrt(gb)
    u0_star = U[:, -1] / np.sqrt(gb)
    u0 = u0 / np.sqrt(np.sum(g * np.abs(u0) ** 2))
    u0_star = u0_star / np.sqrt(np.sum(g * np.abs(u0_star) ** 2))
    # fix phases: u0 positive near the tip, <u0, u0*> > 0
    u0 = u0 * np.exp(-1j * np.angle(u0[0]))
    pr = np.sum(g * u0 * np.conj(u0_star))
    u0_star = u0_star * np.exp(1j * np.angle(pr))
    win = _fit_window(grid)
    power = fit_power(grid.interior().x[win], u0[win])
    return KernelSetup(base, mode, grid, bump, float(c_star), u0, u0_star,
                       (float(sv[-1]), float(sv[-2])), power, g)


def _require_kernel(setup: KernelSetup):
    if not setup.is_kernel:
        raise NoKernel(f"smallest/next singular value = {setup.sv_ratio:.3g} >= {SV_RATIO_MAX:g}: "
                       "no one-dimensional kernel to split off")


def _require_sigmas(sigmas: Sequence[float], decades: float = 2.0) -> np.ndarray:
    s = np.asarray([float(v) for v in sigmas])
    if s.size < 2 or np.any(s <= 0):
        raise InvalidParameters("sigma list needs at least two positive values")
    if np.log10(s.max() / s.min()) < decades - 1e-9:
        raise InvalidParameters(f"sigma list must span at least {decades:g} decades")
    return s


def _unitary_completion(v: np.ndarray, rng: np.random.Generator | None) -> np.ndarray:
    """Unitary matrix whose last column is ``v / |v|``; the others span its complement."""
    m = v.size
    Q, _ = np.linalg.qr(np.column_stack([v, np.eye(m, dtype=complex)]))
    comp = Q[:, 1:m] if rng is None else Q[:, 1:m] @ _random_unitary(m - 1, rng)
    return np.column_stack([comp, v / np.linalg.norm(v)])


def _random_unitary(m: int, rng: np.random.Generator) -> np.ndarray:
    Z = rng.standard_normal((m, m)) + 1j * rng.standard_normal((m, m))
    Q, R = np.linalg.qr(Z)
    return Q * (np.diag(R) / np.abs(np.diag(R)))


def _block_matrix(setup: KernelSetup, sigma: float, rng=None) -> tuple[np.ndarray, complex]:
    """``Id - V P_check(sigma)^{-1}`` in L^2_{g_0}-orthonormal bases (kernel direction last).

    Returns the block matrix and the unnormalized 11 entry
    ``<(Id - V P_check^{-1}) V u0, u0*>``.
    """
    g = setup.weights
    s = np.sqrt(g)
    V = setup.V()
    Pc = setup.p_check(sigma)
    m = V.shape[0]
    M = np.eye(m) - V @ np.linalg.solve(Pc, np.eye(m))
    Mt = (s[:, None] * M) / s[None, :]
    dom = _unitary_completion(s * (V @ setup.u0), rng)
    cod = _unitary_completion(s * setup.u0_star, rng)
    B = cod.conj().T @ Mt @ dom
    raw = setup.pair(M @ (V @ setup.u0), setup.u0_star)
    return B, raw


def block_inverse_norms(B: np.ndarray) -> tuple[float, float, float, float]:
    """Operator norms of the blocks ``(00, 01, 10, 11)`` of ``B^{-1}``, the kernel block last."""
    Bi = np.linalg.inv(B)
    return (float(np.linalg.norm(Bi[:-1, :-1], 2)), float(np.linalg.norm(Bi[:-1, -1])),
            float(np.linalg.norm(Bi[-1, :-1])), float(abs(Bi[-1, -1])))


@dataclass(frozen=True)
class BlockReport:
    sigmas: tuple[float, ...]
    inverse_norms: tuple[tuple[float, float, float, float], ...]
    block11: tuple[complex, ...]
    slopes: tuple[float, float, float, float]
    block11_slope: float
    expected: tuple[float, float, float, float] = (0.0, 0.0, 0.0, -1.0)
    tol: float = SLOPE_TOL

    @property
    def passed(self) -> bool:
        ok = all(abs(s - e) <= self.tol for s, e in zip(self.slopes, self.expected))
        return ok and abs(self.block11_slope - 1.0) <= self.tol


def block_scaling(setup: KernelSetup, sigma_list: Sequence[float] = (1e-2, 1e-3, 1e-4), *,
                  basis_seed: int | None = None, workers: int = 1) -> BlockReport:
    """Fit log-log slopes of the inverse-block norms of ``Id - V P_check(sigma)^{-1}``.

    ``basis_seed`` rotates the complement bases by random unitaries, which
    must leave every norm (hence every slope) unchanged.
    """
    _require_kernel(setup)
    sig = _require_sigmas(sigma_list)

    def task(i):
        rng = None if basis_seed is None else np.random.default_rng([basis_seed, i])
        B, _ = _block_matrix(setup, sig[i], rng)
        return block_inverse_norms(B), complex(B[-1, -1])

    if workers > 1:
        with ThreadPoolExecutor(workers) as ex:
            out = list(ex.map(task, range(sig.size)))
    else:
        out = [task(i) for i in range(sig.size)]
    norms = tuple(o[0] for o in out)
    b11 = tuple(o[1] for o in out)
    arr = np.array(norms)
    slopes = tuple(fit_slope(sig, arr[:, j]) for j in range(4))
    return BlockReport(tuple(sig), norms, b11, slopes, fit_slope(sig, b11))


@dataclass(frozen=True)
class PairingReport:
    sigmas: tuple[float, ...]
    block11: tuple[complex, ...]
    pairing: tuple[complex, ...]
    defect: tuple[float, ...]
    defect_slope: float
    kernel_power: float
    difference_power: float
    decay_gain: float

    @property
    def passed(self) -> bool:
        return self.defect_slope >= DEFECT_MIN_SLOPE and self.decay_gain >= DECAY_GAIN_MIN


def pairing_check(setup: KernelSetup, sigma_list: Sequence[float] = (1e-2, 1e-3, 1e-4)) -> PairingReport:
    """Compare the 11 entry with ``<(P_hat(sigma) - P_hat(0)) u0, u0*>``.

    Also fits the decay of ``(P_hat(sigma) - P_hat(0)) u0`` against that of
    ``x u0`` on the outer part of the grid (away from the closure rows).
    """
    _require_kernel(setup)
    sig = _require_sigmas(sigma_list)
    P0 = setup.p_hat(0.0)
    b11, pair, defect = [], [], []
    for s in sig:
        _, raw = _block_matrix(setup, s)
        d = (setup.p_hat(s) - P0) @ setup.u0
        p = setup.pair(d, setup.u0_star)
        b11.append(raw)
        pair.append(p)
        defect.append(abs(raw - p))
    x = setup.grid.interior().x
    win = _fit_window(setup.grid)
    d = (setup.p_hat(sig[0]) - P0) @ setup.u0
    diff_power = fit_power(x[win], d[win])
    xu_power = fit_power(x[win], x[win] * setup.u0[win])
    return PairingReport(tuple(sig), tuple(b11), tuple(pair), tuple(defect), fit_slope(sig, defect),
                         setup.kernel_power, diff_power, diff_power - xu_power)
