"""Counting recursions for one- and two-backbone diagrams.

* :func:`harer_zagier` -- genus table ``c_g(n)`` of one-backbone matchings.
* :func:`irreducible_1bb` -- irreducible one-backbone shadow polynomials
  ``I_g(y)`` through the substitution ``u = theta(y)``.
* :func:`bicellular_q` -- connected two-backbone matchings ``q_g(n)`` from
  the one-backbone table.
* :func:`two_bb_shadow_polys` -- the A/B split ``I_{2,A_g}``, ``I_{2,B_g}``
  of irreducible two-backbone shadows, solved layer by layer in the genus.

All work is exact.  Polynomials are recovered from truncated series by
reading coefficients up to the known degree bound and checking that the
remaining coefficients of the working series vanish.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from typing import Union

from .errors import InconsistentSystem, TruncationTooLow
from .series import BivariateSeries, Polynomial, TruncatedSeries

Entry = Union[Polynomial, TruncatedSeries]

KINDS = ("c", "q", "i_1bb", "i_2A", "i_2B")


@dataclass(frozen=True)
class GenusTable:
    """Per-genus counting data.

    ``c`` and ``q`` store truncated series in ``u`` (one per genus); the
    shadow kinds store exact polynomials in ``y``.
    """

    kind: str
    entries: dict[int, Entry]
    max_genus: int
    max_order: int

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown table kind {self.kind!r}")

    def __getitem__(self, g: int) -> Entry:
        return self.entries[g]

    def count(self, g: int, n: int) -> int:
        if g not in self.entries:
            return 0
        e = self.entries[g]
        if isinstance(e, TruncatedSeries) and n > e.order:
            raise TruncationTooLow(f"{self.kind} table only reaches n={e.order}")
        c = e[n]
        if c.denominator != 1:
            raise InconsistentSystem(f"{self.kind}_{g}({n}) = {c} is not an integer")
        return int(c)

    def bivariate(self, order: int | None = None, t_cap: int | None = None) -> BivariateSeries:
        """sum_g entries[g] t^g as a series in ``u``."""
        order = self.max_order if order is None else order
        t_cap = self.max_genus if t_cap is None else t_cap
        rows = [[0] * (t_cap + 1) for _ in range(order + 1)]
        for g, e in self.entries.items():
            if g > t_cap:
                continue
            for n in range(order + 1):
                if isinstance(e, TruncatedSeries) and n > e.order:
                    raise TruncationTooLow(f"{self.kind} table only reaches n={e.order}")
                rows[n][g] = e[n]
        return BivariateSeries(rows, order, t_cap)

    def is_integral(self) -> bool:
        return all(e.is_integral() for e in self.entries.values())

    def to_json(self) -> dict:
        out = {}
        for g, e in sorted(self.entries.items()):
            coeffs = e.coeffs
            out[str(g)] = [int(c) if c.denominator == 1 else str(c) for c in coeffs]
        return {"kind": self.kind, "max_genus": self.max_genus, "max_order": self.max_order, "entries": out}


@dataclass(frozen=True)
class ThetaSubstitution:
    """``theta(y) = y(y+1)/(2y+1)^2`` and ``omega = uC^2/(1-uC^2)``.

    ``theta`` inverts the genus-0 part of ``omega``: ``omega_0(theta(y)) = y``.
    """

    theta: TruncatedSeries
    omega: BivariateSeries
    omega_at_theta: BivariateSeries = field(repr=False)


# ---------------------------------------------------------------------------
# one backbone


@lru_cache(maxsize=32)
def _harer_rows(max_genus: int, max_arcs: int) -> tuple[tuple[int, ...], ...]:
    c = [[0] * (max_arcs + 1) for _ in range(max_genus + 1)]
    c[0][0] = 1
    for n in range(1, max_arcs + 1):
        for g in range(max_genus + 1):
            if 2 * g > n:
                continue
            val = 2 * (2 * n - 1) * c[g][n - 1]
            if g >= 1 and n >= 2:
                val += (2 * n - 1) * (n - 1) * (2 * n - 3) * c[g - 1][n - 2]
            q, r = divmod(val, n + 1)
            if r:
                raise InconsistentSystem(f"Harer recursion not integral at g={g}, n={n}")
            c[g][n] = q
    return tuple(tuple(row) for row in c)


def harer_zagier(max_genus: int, max_arcs: int) -> GenusTable:
    """``c_g(n)``: one-backbone matchings with ``n`` arcs and genus ``g``.

    Uses ``(n+1) c_g(n) = 2(2n-1) c_g(n-1) + (2n-1)(n-1)(2n-3) c_{g-1}(n-2)``.
    """
    if max_genus < 0 or max_arcs < 0:
        raise ValueError("max_genus and max_arcs must be nonnegative")
    rows = _harer_rows(max_genus, max_arcs)
    entries = {g: TruncatedSeries(rows[g], max_arcs) for g in range(max_genus + 1)}
    return GenusTable("c", entries, max_genus, max_arcs)


def catalan_bivariate(order: int, t_cap: int | None = None) -> BivariateSeries:
    """``C(u,t) = sum_{g,n} c_g(n) u^n t^g`` truncated at ``t_cap``."""
    t_cap = order // 2 + 1 if t_cap is None else t_cap
    return harer_zagier(t_cap, order).bivariate(order, t_cap)


def theta_series(order: int, var: str = "y") -> TruncatedSeries:
    y = TruncatedSeries.gen(order, var)
    return y * (1 + y) * ((1 + 2 * y) ** 2).invert()


def theta_substitution(order: int, t_cap: int) -> ThetaSubstitution:
    """Build ``theta`` and ``omega`` and check the round trip ``omega_0(theta(y)) = y``."""
    C = catalan_bivariate(order, t_cap)
    uC2 = C * C
    uC2 = uC2.shift(1).truncate(order)
    omega = uC2 * (1 - uC2).invert()
    theta = theta_series(order)
    omega_theta = omega.compose_u(theta)
    if omega_theta.t_slice(0) != TruncatedSeries.gen(order, "u"):
        raise InconsistentSystem("theta does not invert omega at genus 0")
    return ThetaSubstitution(theta, omega, omega_theta)


def _recover(s: TruncatedSeries, degree: int, what: str) -> Polynomial:
    for k in range(degree + 1, s.order + 1):
        if s[k] != 0:
            raise InconsistentSystem(f"{what}: nonzero coefficient {s[k]} at y^{k} beyond degree bound {degree}")
    p = Polynomial(s.coeffs[: degree + 1], "y")
    if not p.is_integral():
        raise InconsistentSystem(f"{what} has non-integral coefficients")
    return p


def irreducible_1bb(max_genus: int, order: int | None = None) -> GenusTable:
    """``I_g(y)`` for ``1 <= g <= max_genus`` (``I_0 = 0``).

    ``I_g(y) = [t^g](C - uC^2)(theta(y)) - sum_{1<=j<g} [t^(g-j)] I_j(omega(theta(y), t))``.
    """
    order = 6 * max_genus + 2 if order is None else order
    if order < 6 * max_genus - 2:
        raise TruncationTooLow(f"working order {order} below degree bound {6 * max_genus - 2}")
    return _irreducible_1bb(max_genus, order)


@lru_cache(maxsize=16)
def _irreducible_1bb(max_genus: int, order: int) -> GenusTable:
    cap = max(max_genus, 1)
    C = catalan_bivariate(order, cap)
    F = C - (C * C).shift(1).truncate(order)
    sub = theta_substitution(order, cap)
    F_theta = F.compose_u(sub.theta)
    entries: dict[int, Polynomial] = {0: Polynomial((), "y")}
    composed: dict[int, BivariateSeries] = {}
    for g in range(1, max_genus + 1):
        s = F_theta.t_slice(g)
        for j in range(1, g):
            s = s - composed[j].t_slice(g - j)
        s = TruncatedSeries(s.coeffs, s.order, "y")
        entries[g] = _recover(s, 6 * g - 2, f"I_{g}")
        composed[g] = entries[g](sub.omega_at_theta)
    return GenusTable("i_1bb", entries, max_genus, order)


# ---------------------------------------------------------------------------
# two backbones


def bicellular_q(max_genus: int, max_arcs: int) -> GenusTable:
    """``q_g(n) = c_{g+1}(n+1) - sum_{g1=0}^{g+1} sum_i c_{g1}(i) c_{g+1-g1}(n-i)``."""
    c = _harer_rows(max_genus + 1, max_arcs + 1)
    entries = {}
    for g in range(max_genus + 1):
        row = []
        for n in range(max_arcs + 1):
            val = c[g + 1][n + 1]
            for g1 in range(g + 2):
                val -= sum(c[g1][i] * c[g + 1 - g1][n - i] for i in range(n + 1))
            if val < 0:
                raise InconsistentSystem(f"q_{g}({n}) = {val} is negative")
            row.append(val)
        entries[g] = TruncatedSeries(row, max_arcs)
    return GenusTable("q", entries, max_genus, max_arcs)


def two_bb_shadow_polys(max_genus: int, order: int | None = None) -> tuple[GenusTable, GenusTable]:
    """``(I_{2,A_g}, I_{2,B_g})`` for ``0 <= g <= max_genus``.

    Order of solution: ``A_0 = 0``; the genus-g layer of the two-backbone
    functional equation (checked against the bicellular table for ``Q``)
    gives ``B_g`` from ``A_g``; the cutting identity
    ``B_g + A_{g+1} = 2(y^2+y) I_{g+1}' - I_{g+1}`` gives ``A_{g+1}``.
    """
    order = 6 * (max_genus + 1) + 2 if order is None else order
    if order < 6 * (max_genus + 1) - 2:
        raise TruncationTooLow(f"working order {order} below degree bound {6 * (max_genus + 1) - 2}")
    return _two_bb_shadow_polys(max_genus, order)


def _layer(series: BivariateSeries, g: int) -> TruncatedSeries:
    return series.t_slice(g) if g <= series.t_cap else TruncatedSeries.zero(series.order)


@lru_cache(maxsize=16)
def _two_bb_shadow_polys(max_genus: int, order: int) -> tuple[GenusTable, GenusTable]:
    cap = max_genus
    ones = irreducible_1bb(max_genus, order)
    C = catalan_bivariate(order, cap)
    Q = bicellular_q(cap, order).bivariate(order, cap)
    uC2 = (C * C).shift(1).truncate(order)
    C2 = C * C
    omega = uC2 * (1 - uC2).invert()
    theta = theta_series(order)
    y = Polynomial([0, 1], "y")

    def to_y(s: TruncatedSeries) -> TruncatedSeries:
        r = s.compose(theta)
        return TruncatedSeries(r.coeffs, r.order, "y")

    C0sq = C2.t_slice(0)
    uC0sq = uC2.t_slice(0)
    Q0 = Q.t_slice(0)
    A: dict[int, Polynomial] = {0: Polynomial((), "y")}
    B: dict[int, Polynomial] = {}
    # X_A, X_B accumulate sum_j t^j I_{2,*_j}(omega(u,t)) over solved layers
    XA = BivariateSeries.constant(0, order, cap)
    XB = BivariateSeries.constant(0, order, cap)
    b_coeff = to_y(C0sq * (1 - uC0sq))
    for g in range(max_genus + 1):
        a_poly = A[g]
        # residual of the genus-g layer with both unknown layers set to zero;
        # the unknowns enter linearly through their genus-0 coefficients
        tXB = XB.shift_t(1)
        den = (1 - tXB) * (1 - uC2 - XA - tXB)
        num = XA + XB - tXB * XB - XA * XB + uC2 * (1 - XB)
        resid = _layer(Q * den - C2 * num, g)
        beta = _layer(XB, 0) if g > 0 else TruncatedSeries.zero(order)
        a_coeff = to_y(C0sq * (1 - beta) + Q0)
        rhs = to_y(resid) - a_poly.to_series(order) * a_coeff
        b_series = TruncatedSeries((rhs * b_coeff.invert()).coeffs, order, "y")
        B[g] = _recover(b_series, 6 * (g + 1) - 2, f"I_2B_{g}")
        if a_poly:
            XA = XA + a_poly(omega).shift_t(g)
        XB = XB + B[g](omega).shift_t(g)
        if g + 1 <= max_genus:
            i_next = ones[g + 1]
            a_next = 2 * (y * y + y) * i_next.derivative() - i_next - B[g]
            if not a_next.is_integral() or any(c < 0 for c in a_next.coeffs):
                raise InconsistentSystem(f"I_2A_{g + 1} has negative or non-integral coefficients")
            A[g + 1] = a_next
    for name, table in (("A", A), ("B", B)):
        for g, p in table.items():
            if any(c < 0 for c in p.coeffs):
                raise InconsistentSystem(f"I_2{name}_{g} has a negative coefficient")
    return (
        GenusTable("i_2A", A, max_genus, order),
        GenusTable("i_2B", B, max_genus, order),
    )


def abi_rhs(i_g: Polynomial, m: int) -> int:
    """``(2m-1) i_g(m) + 2(m-1) i_g(m-1)``: arc-count form of the cutting identity."""
    val = (2 * m - 1) * i_g[m] + (2 * (m - 1) * i_g[m - 1] if m >= 1 else 0)
    return int(val)


def gamma_polys(gamma: int, kind: str, order: int | None = None) -> list[Polynomial]:
    """``[P_0, ..., P_gamma]`` for ``kind`` in {"1", "2A", "2B", "2"}."""
    if kind == "1":
        t = irreducible_1bb(max(gamma, 1), order)
        return [t[g] for g in range(gamma + 1)]
    a, b = two_bb_shadow_polys(gamma, order)
    if kind == "2A":
        return [a[g] for g in range(gamma + 1)]
    if kind == "2B":
        return [b[g] for g in range(gamma + 1)]
    if kind == "2":
        return [a[g] + b[g] for g in range(gamma + 1)]
    raise ValueError(f"unknown polynomial kind {kind!r}")

