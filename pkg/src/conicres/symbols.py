"""Term algebra on the b-cotangent bundle and a b-Poisson bracket engine.

A :class:`SymbolExpr` is a finite sum of monomials

    coeff * x**a * sigma**b * tau**p * (mu^2)**q * (tau^2 + mu^2)**e

with real ``a, b, e`` and nonnegative integer ``p, q``.  Symbols carry no
``y`` dependence, so the bracket with ``p`` reduces to
``(d_tau p)(x d_x a) - (x d_x p)(d_tau a)``.

The ``*_commutator_*`` functions rebuild the weighted commutator symbols used in
the positive-commutator estimates from nothing but this engine, and the
``*_closed_form`` functions give the target expressions they must match.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from math import comb

import numpy as np

from .model import InvalidParameters, ModelParams

__all__ = [
    "Key",
    "SymbolExpr",
    "BracketPoint",
    "const", "X", "SIGMA", "TAU", "MU2", "WEIGHT",
    "evaluate",
    "bracket",
    "d_tau",
    "x_dx",
    "expand_weight",
    "restrict_x0",
    "commutator_symbol_real",
    "modified_commutator_real",
    "commutator_symbol_complex",
    "modified_commutator_complex",
    "real_closed_form",
    "modified_real_closed_form",
    "complex_closed_form",
    "modified_complex_closed_form",
    "IDENTITY_NAMES",
    "IdentityDraw",
    "IdentityCheck",
    "draw_identity_params",
    "identity_pair",
    "verify_identities",
]

Key = tuple  # (a, b, p, q, e)

_DIGITS = 14          # exponents are rounded to this many decimals when merging keys
_DROP_RTOL = 1e-14    # relative threshold for dropping cancelled terms


def _norm_key(a, b, p, q, e) -> Key:
    def r(v):
        v = round(float(v), _DIGITS)
        return 0.0 if v == 0 else v
    if int(p) != p or p < 0 or int(q) != q or q < 0:
        raise InvalidParameters(f"tau and mu^2 exponents must be nonnegative integers, got p={p}, q={q}")
    return (r(a), r(b), int(p), int(q), r(e))


class SymbolExpr:
    """Immutable canonical sum of monomial terms."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Mapping[Key, complex] | Iterable[tuple[Key, complex]] = ()):
        items = terms.items() if isinstance(terms, Mapping) else terms
        merged: dict[Key, complex] = {}
        for key, c in items:
            key = _norm_key(*key)
            merged[key] = merged.get(key, 0j) + complex(c)
        if merged:
            big = max(abs(c) for c in merged.values())
            merged = {k: c for k, c in merged.items() if abs(c) > _DROP_RTOL * big}
        self._terms = dict(sorted(merged.items()))

    @property
    def terms(self) -> dict[Key, complex]:
        return dict(self._terms)

    def canonical(self) -> "SymbolExpr":
        return SymbolExpr(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self._terms.items())

    def __eq__(self, other):
        return isinstance(other, SymbolExpr) and self._terms == other._terms

    def __hash__(self):
        return hash(tuple(self._terms.items()))

    def __repr__(self):
        if not self._terms:
            return "SymbolExpr(0)"
        parts = []
        for (a, b, p, q, e), c in self._terms.items():
            parts.append(f"({c:.6g}) x^{a:g} s^{b:g} tau^{p} mu2^{q} W^{e:g}")
        return "SymbolExpr(" + " + ".join(parts) + ")"

    # algebra
    def __add__(self, other):
        other = _lift(other)
        return SymbolExpr(list(self._terms.items()) + list(other._terms.items()))

    __radd__ = __add__

    def __neg__(self):
        return SymbolExpr({k: -c for k, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-_lift(other))

    def __rsub__(self, other):
        return _lift(other) - self

    def __mul__(self, other):
        other = _lift(other)
        out = []
        for (a1, b1, p1, q1, e1), c1 in self._terms.items():
            for (a2, b2, p2, q2, e2), c2 in other._terms.items():
                out.append(((a1 + a2, b1 + b2, p1 + p2, q1 + q2, e1 + e2), c1 * c2))
        return SymbolExpr(out)

    __rmul__ = __mul__

    def coefficient(self, a, b, p, q, e) -> complex:
        return self._terms.get(_norm_key(a, b, p, q, e), 0j)

    def max_x_exponent(self) -> float:
        return max((k[0] for k in self._terms), default=-np.inf)


def _lift(v) -> SymbolExpr:
    if isinstance(v, SymbolExpr):
        return v
    if np.isscalar(v):
        return const(v)
    raise TypeError(f"cannot combine SymbolExpr with {type(v).__name__}")


def const(c) -> SymbolExpr:
    return SymbolExpr({(0, 0, 0, 0, 0): c})


def X(a: float = 1.0) -> SymbolExpr:
    return SymbolExpr({(a, 0, 0, 0, 0): 1.0})


def SIGMA(b: float = 1.0) -> SymbolExpr:
    return SymbolExpr({(0, b, 0, 0, 0): 1.0})


def TAU(p: int = 1) -> SymbolExpr:
    return SymbolExpr({(0, 0, p, 0, 0): 1.0})


def MU2(q: int = 1) -> SymbolExpr:
    return SymbolExpr({(0, 0, 0, q, 0): 1.0})


def WEIGHT(e: float = 1.0) -> SymbolExpr:
    """``(tau^2 + mu^2)**e``."""
    return SymbolExpr({(0, 0, 0, 0, e): 1.0})


@dataclass(frozen=True)
class BracketPoint:
    x: float
    sigma: float
    taub: float
    mu_sq: float

    def __post_init__(self):
        if not 1e-6 < self.x < 1e6:
            raise InvalidParameters(f"x={self.x} outside (1e-6, 1e6)")
        if not 1e-6 < abs(self.sigma) < 1e6:
            raise InvalidParameters(f"|sigma|={abs(self.sigma)} outside (1e-6, 1e6)")
        if self.mu_sq < 0:
            raise InvalidParameters("mu_sq must be nonnegative")


def _term_values(expr: SymbolExpr, pt: BracketPoint) -> np.ndarray:
    w = pt.taub ** 2 + pt.mu_sq
    vals = []
    for (a, b, p, q, e), c in expr:
        if w == 0 and e < 0:
            raise InvalidParameters("negative power of tau^2 + mu^2 evaluated at the fiber origin")
        sig = complex(pt.sigma) ** b if b != 0 else 1.0
        vals.append(c * pt.x ** a * sig * pt.taub ** p * pt.mu_sq ** q * (w ** e if e != 0 else 1.0))
    return np.array(vals, dtype=complex)


def evaluate(expr: SymbolExpr, pt: BracketPoint) -> complex:
    """Value of ``expr`` at ``pt``."""
    return complex(np.sum(_term_values(expr, pt)))


def evaluation_scale(expr: SymbolExpr, pt: BracketPoint) -> float:
    """Sum of absolute term values, the natural rounding scale of :func:`evaluate`."""
    return float(np.sum(np.abs(_term_values(expr, pt))))


def d_tau(expr: SymbolExpr) -> SymbolExpr:
    out = []
    for (a, b, p, q, e), c in expr:
        if p:
            out.append(((a, b, p - 1, q, e), c * p))
        if e:
            out.append(((a, b, p + 1, q, e - 1), 2 * c * e))
    return SymbolExpr(out)


def x_dx(expr: SymbolExpr) -> SymbolExpr:
    return SymbolExpr([(k, c * k[0]) for k, c in expr])


def bracket(p: SymbolExpr, a: SymbolExpr) -> SymbolExpr:
    """Hamilton derivative ``H_p a`` for y-independent b-symbols."""
    return d_tau(p) * x_dx(a) - x_dx(p) * d_tau(a)


def expand_weight(expr: SymbolExpr, base_e: float) -> SymbolExpr:
    """Rewrite terms whose weight exponent is ``base_e + k`` (``k`` a nonnegative
    integer) as ``W**base_e`` times the binomial expansion of ``(tau^2+mu^2)**k``.

    After this, coefficients of ``tau^p mu2^q W^base_e`` are unambiguous.
    """
    out = []
    for (a, b, p, q, e), c in expr:
        k = e - base_e
        kr = round(k)
        if abs(k - kr) < 1e-9 and kr >= 0:
            for j in range(kr + 1):
                out.append(((a, b, p + 2 * j, q + kr - j, base_e), c * comb(kr, j)))
        else:
            out.append(((a, b, p, q, e), c))
    return SymbolExpr(out)


def restrict_x0(expr: SymbolExpr, base_a: float) -> SymbolExpr:
    """Drop every term whose x-exponent exceeds ``base_a`` (restriction to x = 0)."""
    tol = 10.0 ** (-_DIGITS + 2)
    return SymbolExpr([(k, c) for k, c in expr if k[0] <= base_a + tol])


# ---------------------------------------------------------------------------
# Weighted commutator symbols


def _weight_symbol(l: float, rt: float, nu: float = 0.0) -> SymbolExpr:
    return SymbolExpr({(-2 * l - 1, 2 * nu, 0, 0, rt - 0.5): 1.0})


def _re_p_hat() -> SymbolExpr:
    # x^2 (tau^2 + mu^2) - 2 x sigma tau
    return X(2) * WEIGHT(1) - 2 * X(1) * SIGMA(1) * TAU(1)


def _im_p_hat_sub(params: ModelParams) -> SymbolExpr:
    # x^2 tau Im(beta) - sigma x Im(beta - gamma)
    ib = params.beta.imag
    ibg = (params.beta - params.gamma).imag
    return ib * X(2) * TAU(1) - ibg * SIGMA(1) * X(1)


def commutator_symbol_real(params: ModelParams, l: float, rt: float, nu: float = 0.0) -> SymbolExpr:
    """Symbol of the weighted commutator for real sigma.

    ``H_{Re p} a + 2 Im(p_sub) a`` with ``a = x^{-2l-1} sigma^{2 nu} W^{rt-1/2}``.
    """
    a = _weight_symbol(l, rt, nu)
    return bracket(_re_p_hat(), a) + 2 * _im_p_hat_sub(params) * a


def modified_commutator_real(params: ModelParams, l: float, rt: float, nu: float = 0.0) -> SymbolExpr:
    """Commutator symbol plus ``2 s a Re p`` with ``s = 2(l + rt - Im beta/2) tau / W``,
    restricted to ``x = 0``."""
    a = _weight_symbol(l, rt, nu)
    s_hat = 2 * (l + rt - params.beta.imag / 2) * TAU(1) * WEIGHT(-1)
    full = commutator_symbol_real(params, l, rt, nu) + 2 * s_hat * a * _re_p_hat()
    return restrict_x0(full, -2 * l)


def _re_p_tilde(re_sigma_over_abs2: float) -> SymbolExpr:
    # (Re sigma/|sigma|^2) x^2 (tau^2 + mu^2) - 2 x tau
    return re_sigma_over_abs2 * X(2) * WEIGHT(1) - 2 * X(1) * TAU(1)


def commutator_symbol_complex(l: float, rt: float, re_sigma_over_abs2: float = 1.0) -> SymbolExpr:
    """``H_{Re p~} (x^{-2l-1} W^{rt-1/2})`` with the rescaled real part."""
    return bracket(_re_p_tilde(re_sigma_over_abs2), _weight_symbol(l, rt))


def modified_commutator_complex(l: float, rt: float, re_sigma_over_abs2: float = 1.0) -> SymbolExpr:
    a = _weight_symbol(l, rt)
    s0 = 2 * (l + rt) * TAU(1) * WEIGHT(-1)
    full = commutator_symbol_complex(l, rt, re_sigma_over_abs2) + 2 * s0 * _re_p_tilde(re_sigma_over_abs2) * a
    return restrict_x0(full, -2 * l)


# closed forms ------------------------------------------------------------


def real_closed_form(params: ModelParams, l, rt, nu=0.0) -> SymbolExpr:
    ib = params.beta.imag
    ibg = (params.beta - params.gamma).imag
    pref = SymbolExpr({(-2 * l, 2 * nu, 0, 0, rt - 1.5): 1.0})
    inner = (4 * SIGMA(1) * ((l + rt - ibg / 2) * TAU(2) + (l + 0.5 - ibg / 2) * MU2(1))
             - 4 * (l + rt - ib / 2) * X(1) * TAU(1) * WEIGHT(1))
    return pref * inner


def modified_real_closed_form(params: ModelParams, l, rt, nu=0.0) -> SymbolExpr:
    ibp = (params.beta + params.gamma).imag
    ibg = (params.beta - params.gamma).imag
    pref = SymbolExpr({(-2 * l, 2 * nu + 1, 0, 0, rt - 1.5): 4.0})
    return pref * (-(l + rt - ibp / 2) * TAU(2) + (l + 0.5 - ibg / 2) * MU2(1))


def complex_closed_form(l, rt, re_sigma_over_abs2=1.0) -> SymbolExpr:
    pref = SymbolExpr({(-2 * l, 0, 0, 0, rt - 1.5): 1.0})
    inner = (4 * ((l + rt) * TAU(2) + (l + 0.5) * MU2(1))
             - 4 * re_sigma_over_abs2 * (l + rt) * X(1) * TAU(1) * WEIGHT(1))
    return pref * inner


def modified_complex_closed_form(l, rt) -> SymbolExpr:
    pref = SymbolExpr({(-2 * l, 0, 0, 0, rt - 1.5): 4.0})
    return pref * (-(l + rt) * TAU(2) + (l + 0.5) * MU2(1))


# ---------------------------------------------------------------------------
# random-point verification corpus

IDENTITY_NAMES = ("commutator_real", "modified_real", "commutator_complex", "modified_complex")


@dataclass(frozen=True)
class IdentityDraw:
    """One parameter draw; ``branch`` is ``"BranchA"`` or ``"BranchB"``."""

    im_beta: float
    im_gamma: float
    l: float
    rt: float
    nu: float
    re_sigma_over_abs2: float
    branch: str

    @property
    def params(self) -> ModelParams:
        return ModelParams(n=3, beta=1j * self.im_beta, gamma=1j * self.im_gamma)


@dataclass(frozen=True)
class IdentityCheck:
    identity: str
    draw_index: int
    draw: IdentityDraw
    max_rel_error: float
    sign_violations: int     # only counted for the modified symbols
    points: int

    def passed(self, rtol: float = 1e-12) -> bool:
        return self.max_rel_error < rtol and self.sign_violations == 0


def draw_identity_params(rng: np.random.Generator) -> IdentityDraw:
    """Random orders on a random branch, valid both for the drawn ``Im beta, Im gamma``
    and for ``beta = gamma = 0`` (used by the complex-sigma displays)."""
    ib, ig = rng.uniform(-0.5, 0.5, size=2)
    plus, minus = (ib + ig) / 2, (ib - ig) / 2
    branch = "BranchA" if rng.random() < 0.5 else "BranchB"
    g1, g2 = rng.uniform(0.05, 1.5, size=2)
    if branch == "BranchA":
        l = -0.5 + min(minus, 0.0) - g1
        lr = max(plus, 0.0) + g2
    else:
        l = -0.5 + max(minus, 0.0) + g1
        lr = min(plus, 0.0) - g2
    return IdentityDraw(float(ib), float(ig), float(l), float(lr - l), float(rng.uniform(-1, 1)),
                        float(rng.uniform(0.2, 5.0)), branch)


def _random_point(rng: np.random.Generator) -> BracketPoint:
    return BracketPoint(x=float(np.exp(rng.uniform(np.log(0.1), np.log(10.0)))),
                        sigma=float(np.exp(rng.uniform(np.log(0.05), np.log(5.0)))),
                        taub=float(rng.normal(0, 2)), mu_sq=float(rng.uniform(0, 4)))


def identity_pair(name: str, d: IdentityDraw) -> tuple[SymbolExpr, SymbolExpr]:
    """(engine result, closed form) for one named identity."""
    p = d.params
    if name == "commutator_real":
        return commutator_symbol_real(p, d.l, d.rt, d.nu), real_closed_form(p, d.l, d.rt, d.nu)
    if name == "modified_real":
        return modified_commutator_real(p, d.l, d.rt, d.nu), modified_real_closed_form(p, d.l, d.rt, d.nu)
    if name == "commutator_complex":
        return (commutator_symbol_complex(d.l, d.rt, d.re_sigma_over_abs2),
                complex_closed_form(d.l, d.rt, d.re_sigma_over_abs2))
    if name == "modified_complex":
        return (modified_commutator_complex(d.l, d.rt, d.re_sigma_over_abs2),
                modified_complex_closed_form(d.l, d.rt))
    raise InvalidParameters(f"unknown identity {name!r}; expected one of {IDENTITY_NAMES}")


def verify_identities(draws: int = 20, points: int = 100, seed: int = 0) -> list[IdentityCheck]:
    """Check every identity at ``points`` random points for each of ``draws`` draws.

    The relative error is ``|engine - closed| / S`` where ``S`` is the sum of
    absolute term values of the closed form at that point (its rounding
    scale).  For the modified symbols the sign is also checked: ``<= 0`` on
    BranchA and ``>= 0`` on BranchB, with ``sigma > 0``.
    """
    rng = np.random.default_rng(seed)
    out = []
    for i in range(draws):
        d = draw_identity_params(rng)
        pts = [_random_point(rng) for _ in range(points)]
        for name in IDENTITY_NAMES:
            eng, ref = identity_pair(name, d)
            worst, bad = 0.0, 0
            for pt in pts:
                ve, vr = evaluate(eng, pt), evaluate(ref, pt)
                scale = max(evaluation_scale(ref, pt), 1e-300)
                worst = max(worst, abs(ve - vr) / scale)
                if name.startswith("modified"):
                    tol = 1e-12 * scale
                    if d.branch == "BranchA" and ve.real > tol:
                        bad += 1
                    elif d.branch == "BranchB" and ve.real < -tol:
                        bad += 1
                    if abs(ve.imag) > tol:
                        bad += 1
            out.append(IdentityCheck(name, i, d, float(worst), bad, points))
    return out
