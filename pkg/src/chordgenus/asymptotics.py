"""Numerical singularity analysis of the exact series.

Everything upstream is exact; floating point appears only here, as
``gmpy2.mpfr`` at a configurable working precision, and is converted to
``float`` at the very end.

Radii are estimated from the tail of the coefficient ratios
``r_n = a_n / a_(n-1)``, which tend to ``1/rho``.  Two accelerators are
offered:

``ratio``
    Richardson extrapolation in powers of ``1/n``.  Right for algebraic
    singularities, where ``r_n = (1/rho)(1 + c_1/n + c_2/n^2 + ...)``.
``three-term-extrapolation``
    Wynn's epsilon algorithm, i.e. repeated three-term Shanks/Aitken
    elimination.  Right when the dominant singularity is a pole and the
    corrections decay geometrically, as for the two-backbone series.

``auto`` runs both and keeps the one with the smaller error estimate.
The error estimate is always the difference of the last two extrapolants.
"""

from __future__ import annotations

import os
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from math import factorial
from typing import Iterable, Sequence

import gmpy2
from gmpy2 import mpfr, mpq

from .errors import NonPositiveTail, OrderTooLow, TooFewTerms, UnstableDerivative
from .gamma import GammaConfig, canonical_gf
from .series import BivariateSeries, TruncatedSeries

METHODS = ("ratio", "three-term-extrapolation")

MIN_TERMS = 50
DEFAULT_ORDER = int(os.environ.get("CHORDGENUS_ASYMPTOTIC_ORDER", 400))
DEFAULT_H = 1e-3
PRECISION = 800  # bits


@dataclass(frozen=True)
class SingularityEstimate:
    radius: float
    error_estimate: float
    method: str
    terms_used: int

    def __post_init__(self):
        if not self.radius > 0:
            raise ValueError("radius must be positive")
        if self.error_estimate < 0:
            raise ValueError("error_estimate must be nonnegative")

    @property
    def growth(self) -> float:
        """Exponential growth rate ``1/radius``."""
        return 1.0 / self.radius

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class CltReport:
    gamma: int
    tau: int
    mu: float
    sigma_sq: float
    theta_at_1: float
    theta_prime: float
    theta_second: float
    step_h: float
    mu_error: float
    sigma_sq_error: float
    theta_error: float
    growth_constant: float
    order: int
    method: str

    def to_json(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class GenusDistribution:
    n: int
    tau: int
    gamma: int
    probabilities: tuple[float, ...]
    exact: tuple[Fraction, ...] = field(repr=False)
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float

    def to_json(self) -> dict:
        doc = asdict(self)
        doc["probabilities"] = list(self.probabilities)
        doc["exact"] = [f"{p.numerator}/{p.denominator}" for p in self.exact]
        return doc


# ---------------------------------------------------------------------------
# radius estimation


def _working(precision: int):
    return gmpy2.context(gmpy2.get_context(), precision=precision)


def _integers(coeffs) -> list:
    """Coefficients as exact numbers sharing one scale (ratios are what matter)."""
    if isinstance(coeffs, TruncatedSeries):
        return list(coeffs._num)
    return [c if isinstance(c, (int, Fraction)) else Fraction(c) for c in coeffs]


def _as_mpq(x) -> mpq:
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    return mpq(x)


def _richardson(s: Sequence, n_last: int, k: int):
    """Order-``k`` Richardson extrapolant of ``s`` ending at index ``n_last``.

    ``s[i]`` is the value at ``n = i``; the sequence is assumed to expand in
    powers of ``1/n``.
    """
    total = mpfr(0)
    for j in range(k + 1):
        n = n_last - k + j
        w = (-1) ** (k + j) * n**k
        total += mpfr(w) * s[n] / (factorial(j) * factorial(k - j))
    return total


def _wynn(s: Sequence) -> list:
    """Even columns of Wynn's epsilon table; the last entry of each column."""
    prev = [mpfr(0)] * (len(s) + 1)
    cur = list(s)
    out = [cur[-1]]
    k = 0
    while len(cur) > 1:
        diffs = [cur[i + 1] - cur[i] for i in range(len(cur) - 1)]
        if any(d == 0 for d in diffs):
            break  # converged to working precision
        nxt = [prev[i + 1] + 1 / diffs[i] for i in range(len(diffs))]
        prev, cur = cur, nxt
        k += 1
        if k % 2 == 0:
            out.append(cur[-1])
    return out


def _ratio_estimate(s: dict, last: int, k: int) -> tuple:
    a = 1 / _richardson(s, last, k)
    b = 1 / _richardson(s, last - 1, k)
    return a, abs(a - b)


def _three_term_estimate(tail: list, depth: int) -> tuple:
    cols = _wynn(tail)
    depth = min(depth, len(cols) - 1)
    if depth == 0:
        return 1 / cols[0], mpfr(0)
    a = 1 / cols[depth]
    return a, abs(a - 1 / cols[depth - 1])


def estimate_radius(
    coeffs,
    method: str = "auto",
    window: int = 40,
    richardson_order: int = 6,
    wynn_depth: int = 6,
    precision: int = PRECISION,
) -> SingularityEstimate:
    """Radius of convergence from a coefficient sequence ``a_0, a_1, ...``.

    Only the last ``window`` ratios are used; those coefficients must be
    positive.  Earlier terms (burn-in) may be anything.
    """
    if method not in METHODS + ("auto",):
        raise ValueError(f"method must be one of {METHODS + ('auto',)}")
    a = _integers(coeffs)
    if len(a) < MIN_TERMS:
        raise TooFewTerms(f"{len(a)} coefficients given, at least {MIN_TERMS} needed")
    window = max(window, richardson_order + 2)
    last = len(a) - 1
    first = last - window
    if any(not x > 0 for x in a[first:]):
        raise NonPositiveTail(f"coefficients {first}..{last} must all be positive")
    with _working(precision):
        s = {n: mpfr(_as_mpq(a[n]) / _as_mpq(a[n - 1])) for n in range(first + 1, last + 1)}
        results = {}
        if method in ("ratio", "auto"):
            results["ratio"] = _ratio_estimate(s, last, richardson_order)
        if method in ("three-term-extrapolation", "auto"):
            results["three-term-extrapolation"] = _three_term_estimate([s[n] for n in sorted(s)], wynn_depth)
        chosen = min(results, key=lambda m: (results[m][1], METHODS.index(m)))
        value, err = results[chosen]
        return SingularityEstimate(float(value), float(err), chosen, window)


def _estimate_mp(coeffs, method: str, window: int, precision: int) -> tuple:
    """Like :func:`estimate_radius` but keeps the radius at full precision."""
    a = _integers(coeffs)
    last = len(a) - 1
    first = last - window
    if any(not x > 0 for x in a[first:]):
        raise NonPositiveTail(f"coefficients {first}..{last} must all be positive")
    s = {n: mpfr(_as_mpq(a[n]) / _as_mpq(a[n - 1])) for n in range(first + 1, last + 1)}
    if method == "ratio":
        return _ratio_estimate(s, last, 6)
    return _three_term_estimate([s[n] for n in sorted(s)], 6)


# ---------------------------------------------------------------------------
# theta(t) and the CLT parameters


def _exact_t(t) -> Fraction:
    # floats go through their shortest repr, so 1.001 means 1001/1000
    return Fraction(repr(t)) if isinstance(t, float) else Fraction(t)


def _canonical_coeffs(cfg: GammaConfig, order: int, t: Fraction) -> TruncatedSeries:
    return canonical_gf(GammaConfig(cfg.gamma, cfg.tau, cfg.u_order), z_order=order, t=t)


def _theta_sample(gamma: int, tau: int, order: int, t: Fraction, method: str, window: int, precision: int):
    with _working(precision):
        series = _canonical_coeffs(GammaConfig(gamma, tau), order, t)
        return _estimate_mp(series, method, window, precision)


def _theta_mp(cfg: GammaConfig, ts: Sequence[Fraction], order: int, method: str, window: int, precision: int, workers: int = 1):
    """High-precision theta samples; ``method='auto'`` is resolved at the first t."""
    if order + 1 < MIN_TERMS:
        raise TooFewTerms(f"order {order} gives fewer than {MIN_TERMS} coefficients")
    if method == "auto":
        with _working(precision):
            method = estimate_radius(_canonical_coeffs(cfg, order, ts[0]), "auto", window, precision=precision).method
    jobs = [(cfg.gamma, cfg.tau, order, t, method, window, precision) for t in ts]
    if workers > 1 and len(ts) > 1:
        from concurrent.futures import ProcessPoolExecutor

        with ProcessPoolExecutor(max_workers=workers) as pool:
            raw = list(pool.map(_theta_sample, *zip(*jobs)))
    else:
        raw = [_theta_sample(*job) for job in jobs]
    return dict(zip(ts, raw)), method


def theta_curve(
    cfg: GammaConfig,
    t_values: Iterable,
    order: int = DEFAULT_ORDER,
    method: str = "auto",
    window: int = 40,
    precision: int = PRECISION,
    workers: int = 1,
) -> list[SingularityEstimate]:
    """Dominant singularity ``theta(t)`` of ``Q_{tau,gamma}(z,t)`` at each t.

    Each t is substituted exactly (floats via their decimal repr).  With
    ``method='auto'`` the method is chosen at the t closest to 1 and then
    used for every sample.
    """
    ts = [_exact_t(t) for t in t_values]
    if not ts:
        return []
    centre = min(ts, key=lambda t: abs(t - 1))
    ordered = [centre] + [t for t in ts if t != centre]
    samples, chosen = _theta_mp(cfg, ordered, order, method, window, precision, workers)
    return [SingularityEstimate(float(samples[t][0]), float(samples[t][1]), chosen, window) for t in ts]


def _stencil(th: dict, h, centre):
    """Five-point central first and second derivatives."""
    m2, m1, p1, p2 = th[-2], th[-1], th[1], th[2]
    d1 = (m2 - 8 * m1 + 8 * p1 - p2) / (12 * h)
    d2 = (-m2 + 16 * m1 - 30 * centre + 16 * p1 - p2) / (12 * h * h)
    return d1, d2


def _mu_sigma(theta, d1, d2):
    r = d1 / theta
    return -r, -d2 / theta - r + r * r


def clt_params(
    cfg: GammaConfig,
    h: float = DEFAULT_H,
    order: int = DEFAULT_ORDER,
    tolerance: float = 1e-4,
    sigma_tolerance: float = 1e-3,
    method: str = "auto",
    window: int = 40,
    precision: int = PRECISION,
    workers: int = 1,
) -> CltReport:
    """``mu = -theta'/theta`` and ``sigma^2 = -theta''/theta - theta'/theta + (theta'/theta)^2`` at t=1.

    Derivatives come from the five-point stencil with step ``h``; the same
    stencil with ``h/2`` gives the reported error.  A disagreement above
    ``tolerance`` (for mu) or ``sigma_tolerance`` (for sigma^2) raises
    :class:`UnstableDerivative`.
    """
    hq = _exact_t(h)
    half = hq / 2
    offsets = {k: hq * k for k in (-2, -1, 1, 2)}
    offsets_half = {k: half * k for k in (-2, -1, 1, 2)}
    ts = [Fraction(1)] + sorted({1 + d for d in list(offsets.values()) + list(offsets_half.values())})
    with _working(precision):
        samples, chosen = _theta_mp(cfg, ts, order, method, window, precision, workers)
        theta0 = samples[Fraction(1)][0]
        theta_err = max(float(v[1]) for v in samples.values())
        results = []
        for step, offs in ((hq, offsets), (half, offsets_half)):
            th = {k: samples[1 + d][0] for k, d in offs.items()}
            d1, d2 = _stencil(th, mpfr(_as_mpq(step)), theta0)
            results.append((d1, d2) + _mu_sigma(theta0, d1, d2))
        (d1, d2, mu, s2), (_, _, mu_h, s2_h) = results
        mu_err = float(abs(mu - mu_h))
        s2_err = float(abs(s2 - s2_h))
    if mu_err > tolerance or s2_err > sigma_tolerance:
        raise UnstableDerivative(
            f"step halving moved mu by {mu_err:.2e} (tolerance {tolerance:.0e}) and "
            f"sigma^2 by {s2_err:.2e} (tolerance {sigma_tolerance:.0e}) at order {order}"
        )
    return CltReport(
        gamma=cfg.gamma,
        tau=cfg.tau,
        mu=float(mu),
        sigma_sq=float(s2),
        theta_at_1=float(theta0),
        theta_prime=float(d1),
        theta_second=float(d2),
        step_h=float(hq),
        mu_error=mu_err,
        sigma_sq_error=s2_err,
        theta_error=theta_err,
        growth_constant=float(1 / theta0),
        order=order,
        method=chosen,
    )


# ---------------------------------------------------------------------------
# finite-n genus distribution


def _moments(probs: Sequence[Fraction]) -> tuple[float, float, float, float]:
    mean = sum(g * p for g, p in enumerate(probs))
    central = [sum((g - mean) ** k * p for g, p in enumerate(probs)) for k in (2, 3, 4)]
    var, m3, m4 = central
    if var == 0:
        return float(mean), 0.0, 0.0, 0.0
    fvar = float(var)
    return float(mean), fvar, float(m3) / fvar**1.5, float(m4 / (var * var)) - 3.0


def genus_distribution(n: int, cfg: GammaConfig, Q: BivariateSeries | None = None) -> GenusDistribution:
    """``P(X = g) = [z^n t^g] Q_{tau,gamma} / [z^n] Q_{tau,gamma}`` for g = 0..floor((n-1)/2)."""
    if n < 1:
        raise ValueError("n must be positive")
    if Q is None:
        Q = canonical_gf(GammaConfig(cfg.gamma, cfg.tau, n, bivariate=True), z_order=n)
    elif Q.order < n:
        raise OrderTooLow(f"series known to z^{Q.order}, z^{n} requested")
    support = (n - 1) // 2
    row = [Q.coefficient(n, g) if g <= Q.t_cap else Fraction(0) for g in range(support + 1)]
    if Q.t_cap > support and any(Q.coefficient(n, g) for g in range(support + 1, Q.t_cap + 1)):
        raise ArithmeticError(f"genus beyond floor((n-1)/2) at n={n}")
    total = sum(row)
    if total == 0:
        raise ValueError(f"no structures on {n} vertices")
    exact = tuple(Fraction(c) / total for c in row)
    mean, var, skew, kurt = _moments(exact)
    return GenusDistribution(
        n=n,
        tau=cfg.tau,
        gamma=cfg.gamma,
        probabilities=tuple(float(p) for p in exact),
        exact=exact,
        mean=mean,
        variance=var,
        skewness=skew,
        excess_kurtosis=kurt,
    )
