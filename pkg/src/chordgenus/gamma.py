"""Genus-filtered generating functions.

A gamma-matching is a connected matching all of whose irreducible shadows
have genus at most gamma.  This module assembles

* ``H_gamma`` -- one-backbone gamma-matchings, from irreducible shadows
  substituted into ``uH^2/(1-uH^2)`` and solved as a fixed point;
* ``Q_gamma`` -- two-backbone gamma-matchings; ``q_full_bivariate`` is the
  unfiltered genus series;
* the shape series ``S_gamma(u,t,e)`` and the tau-canonical structure
  series ``Q_{tau,gamma}(z,t)``.

Every builder takes an optional exact ``t``.  With ``t=None`` and
``bivariate=True`` the result is a :class:`BivariateSeries` in ``(u,t)``;
with a rational ``t`` the genus marker is substituted numerically and a
univariate series comes back.  The second route feeds the asymptotics
module without ever forming the bivariate series.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from typing import Optional, Union

from .errors import TruncationTooLow
from .recursions import (
    catalan_bivariate,
    gamma_polys,
    two_bb_shadow_polys,
)
from .series import BivariateSeries, Polynomial, TruncatedSeries, solve_fixed_point

Series = Union[TruncatedSeries, BivariateSeries]

VARIANTS = ("corrected", "printed")


def _cap(name: str, default: int) -> int:
    return int(os.environ.get(name, default))


@dataclass(frozen=True)
class GammaConfig:
    gamma: int
    tau: int = 1
    u_order: int = 60
    bivariate: bool = False
    t_cap: Optional[int] = None

    def __post_init__(self):
        gcap = _cap("CHORDGENUS_GAMMA_CAP", 4)
        tcap = _cap("CHORDGENUS_TAU_CAP", 10)
        if not 0 <= self.gamma <= gcap:
            raise ValueError(f"gamma must be in [0, {gcap}]")
        if not 1 <= self.tau <= tcap:
            raise ValueError(f"tau must be in [1, {tcap}]")
        if self.u_order < 0:
            raise ValueError("u_order must be nonnegative")

    @property
    def genus_cap(self) -> int:
        """t-degree kept in bivariate mode."""
        return self.u_order // 2 + 1 if self.t_cap is None else self.t_cap


# ---------------------------------------------------------------------------
# helpers shared by the uni- and bivariate routes


def _times_u(x: Series) -> Series:
    return x.shift(1).truncate(x.order)


def _times_t(x: Series, g: int, t: Optional[Fraction]) -> Series:
    """``t^g x``; ``t=None`` means symbolic t (bivariate)."""
    if g == 0:
        return x
    if t is None:
        return x.shift_t(g)
    return x * (t**g)


def _marked_sum(polys: list[Polynomial], arg: Series, t: Optional[Fraction]) -> Series:
    """``sum_g t^g P_g(arg)``."""
    total = arg * 0
    for g, p in enumerate(polys):
        if p:
            total = total + _times_t(p(arg), g, t)
    return total


def _seed(order: int, cfg: GammaConfig, t: Optional[Fraction]) -> Series:
    if cfg.bivariate and t is None:
        return BivariateSeries.constant(1, 0, cfg.genus_cap)
    return TruncatedSeries([1], 0)


def _check_t(cfg: GammaConfig, t) -> Optional[Fraction]:
    if t is None:
        return None if cfg.bivariate else Fraction(1)
    return Fraction(t)


def _nested(x: Series) -> Series:
    """``x/(1-x)``."""
    return x * (1 - x).invert()


# ---------------------------------------------------------------------------
# one backbone


def h_gamma(cfg: GammaConfig, t=None) -> Series:
    """``H_gamma``: solve ``H = 1 + uH^2 + sum_{g<=gamma} t^g I_g(uH^2/(1-uH^2))``."""
    tv = _check_t(cfg, t)
    polys = gamma_polys(cfg.gamma, "1")

    def equation(h: Series) -> Series:
        uh2 = _times_u(h * h)
        return 1 + uh2 + _marked_sum(polys, _nested(uh2), tv)

    return solve_fixed_point(equation, _seed(cfg.u_order, cfg, tv), cfg.u_order)


# ---------------------------------------------------------------------------
# two backbones


def _geometric_over(x: TruncatedSeries) -> TruncatedSeries:
    """``x/(1-u)``: prefix sums of the coefficients."""
    acc, out = Fraction(0), []
    for c in x.coeffs:
        acc += c
        out.append(acc)
    return TruncatedSeries(out, x.order, x.var)


def q_gamma_uni(cfg: GammaConfig, variant: str = "corrected", H: TruncatedSeries | None = None) -> TruncatedSeries:
    """Univariate ``Q_gamma(u) = H^2(uH^2 + X)/(1 - uH^2 - X)``.

    ``X = sum_{g<=gamma} I_{g,2}(w)`` where ``w = uH^2/(1-uH^2)`` for the
    ``corrected`` variant (the t=1 specialisation of the bivariate formula)
    and ``w = uH^2/(1-u)`` for the ``printed`` variant.
    """
    if variant not in VARIANTS:
        raise ValueError(f"variant must be one of {VARIANTS}")
    if H is None:
        H = h_gamma(GammaConfig(cfg.gamma, cfg.tau, cfg.u_order))
    H2 = H * H
    uH2 = _times_u(H2)
    w = _nested(uH2) if variant == "corrected" else _geometric_over(uH2)
    X = _marked_sum(gamma_polys(cfg.gamma, "2"), w, Fraction(1))
    return H2 * (uH2 + X) * (1 - uH2 - X).invert()


def _two_bb_formula(C: Series, XA: Series, XB: Series, t: Optional[Fraction]) -> Series:
    """``C^2(XA + XB - tXB^2 - XA XB + uC^2(1-XB)) / ((1-tXB)(1-uC^2-XA-tXB))``."""
    C2 = C * C
    uC2 = _times_u(C2)
    tXB = _times_t(XB, 1, t)
    num = XA + XB - tXB * XB - XA * XB + uC2 * (1 - XB)
    den = (1 - tXB) * (1 - uC2 - XA - tXB)
    return C2 * num * den.invert()


def q_full_bivariate(u_order: int, t_cap: int | None = None, max_shadow_genus: int | None = None) -> BivariateSeries:
    """Unfiltered ``Q(u,t)`` of connected two-backbone matchings.

    Uses the full genus series ``C(u,t)`` and all shadow layers up to the
    genus kept in ``t``.  ``max_shadow_genus`` lets callers supply fewer
    layers, which is an error whenever it is below ``t_cap``.
    """
    t_cap = max((u_order - 1) // 2, 0) if t_cap is None else t_cap
    layers = t_cap if max_shadow_genus is None else max_shadow_genus
    if layers < t_cap:
        raise TruncationTooLow(f"genus layers {t_cap} of the shadow polynomials needed, {layers} available")
    C = catalan_bivariate(u_order, t_cap)
    a, b = two_bb_shadow_polys(layers)
    omega = _nested(_times_u(C * C))
    XA = _marked_sum([a[g] for g in range(t_cap + 1)], omega, None)
    XB = _marked_sum([b[g] for g in range(t_cap + 1)], omega, None)
    return _two_bb_formula(C, XA, XB, None)


def shadow_layer_polys(gamma: int) -> tuple[list[Polynomial], list[Polynomial]]:
    a, b = two_bb_shadow_polys(gamma)
    return [a[g] for g in range(gamma + 1)], [b[g] for g in range(gamma + 1)]


def i2_gamma(gamma: int, kind: str, u_order: int | None = None, t_cap: int | None = None) -> BivariateSeries:
    """``I_{2,gamma_A}(u,t)`` or ``I_{2,gamma_B}(u,t)`` as a bivariate polynomial."""
    a, b = shadow_layer_polys(gamma)
    polys = a if kind == "A" else b
    u_order = 6 * (gamma + 1) - 2 if u_order is None else u_order
    t_cap = gamma if t_cap is None else t_cap
    rows = [[0] * (t_cap + 1) for _ in range(u_order + 1)]
    for g, p in enumerate(polys):
        if g > t_cap:
            continue
        for n in range(min(len(p), u_order + 1)):
            rows[n][g] = p[n]
    return BivariateSeries(rows, u_order, t_cap)


def q_gamma_bivariate(cfg: GammaConfig, t=None, H: Series | None = None) -> Series:
    """``Q_gamma(u,t)``: two-backbone formula with ``H_gamma(u,t)`` in place of ``C``.

    The shadow series are ``sum_{g<=gamma} t^g I_{2,*_g}(uH^2/(1-uH^2))``.
    """
    tv = _check_t(cfg, t)
    if H is None:
        H = h_gamma(cfg, tv)
    a, b = shadow_layer_polys(cfg.gamma)
    w = _nested(_times_u(H * H))
    XA = _marked_sum(a, w, tv)
    XB = _marked_sum(b, w, tv)
    return _two_bb_formula(H, XA, XB, tv)


def free_exterior_series(u_order: int, t_cap: int | None = None) -> BivariateSeries:
    """``A(u,t) = uC^4/(1-uC^2)``: matchings whose exterior arcs cross nothing."""
    t_cap = u_order // 2 + 1 if t_cap is None else t_cap
    C = catalan_bivariate(u_order, t_cap)
    C2 = C * C
    uC2 = _times_u(C2)
    return _times_u(C2 * C2) * (1 - uC2).invert()


# ---------------------------------------------------------------------------
# shapes and canonical structures


@dataclass(frozen=True)
class ShapeSeries:
    """``S_gamma(u,t,e) = sum_k e^k S_k(u,t)``; ``k`` counts 1-arcs."""

    slices: tuple[Series, ...]

    @property
    def order(self) -> int:
        return self.slices[0].order

    def at_e(self, e) -> Series:
        e = Fraction(e)
        total = self.slices[0] * 0
        for k, s in enumerate(self.slices):
            total = total + s * (e**k)
        return total

    def coefficient(self, n: int, k: int, g: int | None = None):
        s = self.slices[k]
        if isinstance(s, BivariateSeries):
            return s.coefficient(n, g)
        return s[n]


def shape_gf(cfg: GammaConfig, t=None, Q: Series | None = None) -> ShapeSeries:
    """Slices of ``(1+u)^2/(1+2u-ue)^2 Q_gamma(u(1+u)/(1+2u-ue)^2, t)`` in ``e``.

    Expanding ``(1+2u-ue)^(-2n-2)`` binomially gives
    ``S_k = u^k sum_n Q_n C(2n+1+k, k) u^n (1+u)^(n+2) (1+2u)^(-(2n+2+k))``.
    """
    tv = _check_t(cfg, t)
    N = cfg.u_order
    if Q is None:
        Q = q_gamma_bivariate(cfg, tv)
    u = TruncatedSeries.gen(N)
    inv = (1 + 2 * u).invert()
    one_u = 1 + u
    bivariate = isinstance(Q, BivariateSeries)

    def lift(s: TruncatedSeries) -> Series:
        return BivariateSeries.from_univariate(s, Q.t_cap) if bivariate else s

    # base_n = u^n (1+u)^(n+2) (1+2u)^(-(2n+2))
    bases = []
    b = one_u * one_u * inv * inv
    step = u * one_u * inv * inv
    for n in range(N + 1):
        bases.append(b)
        b = b * step
    slices = []
    for k in range(N + 1):
        total = lift(TruncatedSeries.zero(N))
        extra = (u * inv) ** k
        for n in range(N - k + 1):
            coef = Q.coefficient(n) if bivariate else Q[n]
            if not coef:
                continue
            term = lift(bases[n] * extra * comb(2 * n + 1 + k, k))
            if bivariate:
                total = total + term * BivariateSeries([coef] + [[]] * N, N, Q.t_cap)
            else:
                total = total + term * coef
        slices.append(total)
    return ShapeSeries(tuple(slices))


def u_tau(tau: int, order: int, var: str = "z") -> TruncatedSeries:
    """``u_tau(z) = z^(2tau-2)/(z^(2tau) - z^2 + 1)``."""
    z = TruncatedSeries.gen(order, var)
    return (z ** (2 * tau - 2)) * (z ** (2 * tau) - z * z + 1).invert()


def canonical_substitution(tau: int, order: int) -> tuple[TruncatedSeries, TruncatedSeries]:
    """``(x(z), 1/d(z)^2)`` with ``d = u_tau z^2 - z + 1``, ``x = u_tau z^2 / d^2``."""
    z = TruncatedSeries.gen(order, "z")
    w = u_tau(tau, order) * z * z
    d2inv = ((w - z + 1) ** 2).invert()
    return w * d2inv, d2inv


def canonical_gf(cfg: GammaConfig, z_order: int | None = None, t=None, Q: Series | None = None) -> Series:
    """``Q_{tau,gamma}(z,t) = Q_gamma(x(z), t) / d(z)^2``.

    ``x`` has valuation ``2 tau``, so ``Q_gamma`` is only needed through
    ``u``-order ``z_order // (2 tau)``; ``cfg.u_order`` is ignored here.
    """
    tv = _check_t(cfg, t)
    N = cfg.u_order if z_order is None else z_order
    M = N // (2 * cfg.tau)
    if Q is None:
        sub = GammaConfig(cfg.gamma, cfg.tau, M, cfg.bivariate, cfg.t_cap)
        Q = q_gamma_bivariate(sub, tv)
    elif Q.order < M:
        raise TruncationTooLow(f"Q_gamma has order {Q.order}, need {M}")
    x, d2inv = canonical_substitution(cfg.tau, N)
    composed = Q.truncate(M)(x) if isinstance(Q, TruncatedSeries) else Q.truncate(M).compose_u(x)
    if isinstance(composed, BivariateSeries):
        composed = BivariateSeries._raw(composed._num, composed._den, composed.order, composed.t_cap, "z", composed.tvar)
        return composed * BivariateSeries.from_univariate(d2inv, composed.t_cap)
    return composed * d2inv


# ---------------------------------------------------------------------------
# bundle


@dataclass(frozen=True)
class GammaSeriesBundle:
    config: GammaConfig
    H: Series
    Q: Series
    I2A_gamma: BivariateSeries
    I2B_gamma: BivariateSeries
    A: BivariateSeries
    S: ShapeSeries | None = field(default=None, repr=False)
    Q_tau: Series | None = field(default=None, repr=False)


def build_bundle(cfg: GammaConfig, with_shapes: bool = False, z_order: int | None = None) -> GammaSeriesBundle:
    H = h_gamma(cfg)
    Q = q_gamma_bivariate(cfg, H=H)
    S = shape_gf(cfg, Q=Q) if with_shapes else None
    Qt = canonical_gf(cfg, z_order=z_order, Q=Q) if z_order is not None else None
    return GammaSeriesBundle(
        config=cfg,
        H=H,
        Q=Q,
        I2A_gamma=i2_gamma(cfg.gamma, "A"),
        I2B_gamma=i2_gamma(cfg.gamma, "B"),
        A=free_exterior_series(cfg.u_order, cfg.genus_cap),
        S=S,
        Q_tau=Qt,
    )
