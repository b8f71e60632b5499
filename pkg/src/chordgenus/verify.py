"""Wire every recursion to its brute-force oracle.

Each check compares cells ``(g, n)`` and records the first mismatch.  The
CLI ``verify`` subcommand runs :func:`run_checks` and exits nonzero if any
check fails.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable

from .diagrams import (
    _caps,
    enumerate_diagrams,
    free_exterior_2bb,
    gamma_matchings_1bb,
    gamma_matchings_2bb,
)
from .gamma import GammaConfig, free_exterior_series, h_gamma, q_full_bivariate, q_gamma_bivariate, q_gamma_uni
from .recursions import abi_rhs, bicellular_q, harer_zagier, irreducible_1bb, two_bb_shadow_polys


@dataclass
class CheckResult:
    name: str
    cells: int = 0
    first_failure: dict | None = None

    @property
    def ok(self) -> bool:
        return self.first_failure is None

    def compare(self, g: int | None, n: int, expected, got, **extra) -> None:
        self.cells += 1
        if self.first_failure is None and Fraction(expected) != Fraction(got):
            self.first_failure = {"g": g, "n": n, "expected": str(expected), "got": str(got), **extra}

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "cells": self.cells,
            "ok": self.ok,
            "first_failure": self.first_failure,
        }


def _harer(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("harer_zagier_vs_bruteforce")
    top = min(max_arcs, _caps()["matchings_1bb"])
    c = harer_zagier(top // 2, top)
    for n in range(top + 1):
        brute = enumerate_diagrams("matchings_1bb", n)
        for g in range(n // 2 + 1):
            res.compare(g, n, c.count(g, n), brute.get((g, ""), 0))
    return res


def _bicellular(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("bicellular_vs_bruteforce")
    top = min(max_arcs, _caps()["matchings_2bb"])
    q = bicellular_q(max(top // 2, 1), top)
    for n in range(1, top + 1):
        brute = enumerate_diagrams("matchings_2bb", n)
        for g in range((n - 1) // 2 + 1):
            res.compare(g, n, q.count(g, n), brute.get((g, ""), 0))
    return res


def _two_backbone_formula(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("two_backbone_formula_vs_bicellular")
    Q = q_full_bivariate(max_arcs)
    q = bicellular_q(Q.t_cap, max_arcs)
    for n in range(max_arcs + 1):
        for g in range(Q.t_cap + 1):
            res.compare(g, n, q.count(g, n), Q.coefficient(n, g))
    return res


def _shadows_1bb(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("irreducible_shadows_1bb")
    table = irreducible_1bb(max(max_genus, 1))
    for g in range(1, max_genus + 1):
        for m in range(1, max_arcs + 1):
            brute = enumerate_diagrams("shadows_1bb", m, genus=g, irreducible=True)
            res.compare(g, m, table[g][m], brute.get((g, ""), 0))
    return res


def _shadows_2bb(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("irreducible_shadows_2bb_AB")
    a, b = two_bb_shadow_polys(max_genus)
    for g in range(max_genus + 1):
        for m in range(1, max_arcs + 1):
            brute = enumerate_diagrams("shadows_2bb", m, genus=g, irreducible=True)
            res.compare(g, m, a[g][m], brute.get((g, "A"), 0), cls="A")
            res.compare(g, m, b[g][m], brute.get((g, "B"), 0), cls="B")
    return res


def _cutting(max_arcs: int, max_genus: int) -> CheckResult:
    """``B_g + A_(g+1)`` in arc-count form, for every coefficient up to m = 20."""
    res = CheckResult("cutting_identity")
    top = max(max_genus, 1)
    a, b = two_bb_shadow_polys(top)
    i1 = irreducible_1bb(top)
    for g in range(top):
        for m in range(21):
            res.compare(g, m, abi_rhs(i1[g + 1], m), b[g][m] + a[g + 1][m])
    return res


def _gamma_h(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("gamma_filter_one_backbone")
    top = min(max_arcs, _caps()["matchings_1bb"])
    for gamma in range(min(max_genus, 4) + 1):
        H = h_gamma(GammaConfig(gamma, u_order=top, bivariate=True))
        for n in range(top + 1):
            brute = gamma_matchings_1bb(n, gamma) if n else {0: 1}
            for g in range(H.t_cap + 1):
                res.compare(g, n, brute.get(g, 0), H.coefficient(n, g), gamma=gamma)
    return res


def _gamma_q(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("gamma_filter_two_backbones")
    top = min(max_arcs, _caps()["matchings_2bb"])
    for gamma in range(min(max_genus, 4) + 1):
        Q = q_gamma_bivariate(GammaConfig(gamma, u_order=top, bivariate=True))
        for n in range(1, top + 1):
            brute = gamma_matchings_2bb(n, gamma)
            for g in range(Q.t_cap + 1):
                res.compare(g, n, brute.get(g, 0), Q.coefficient(n, g), gamma=gamma)
    return res


def _free_exterior(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("free_exterior_arcs")
    top = min(max_arcs, _caps()["matchings_2bb"])
    A = free_exterior_series(top)
    for n in range(1, top + 1):
        brute = free_exterior_2bb(n)
        for g in range(A.t_cap + 1):
            res.compare(g, n, brute.get(g, 0), A.coefficient(n, g))
    return res


def _specialization(max_arcs: int, max_genus: int) -> CheckResult:
    res = CheckResult("t_equals_1_specialization")
    order = max(max_arcs, 10)
    for gamma in range(min(max_genus, 4) + 1):
        bi = GammaConfig(gamma, u_order=order, bivariate=True)
        uni = GammaConfig(gamma, u_order=order)
        pairs = ((h_gamma(bi).at_t(1), h_gamma(uni)), (q_gamma_bivariate(bi).at_t(1), q_gamma_uni(uni)))
        for left, right in pairs:
            for n in range(order + 1):
                res.compare(None, n, right[n], left[n], gamma=gamma)
    return res


CHECKS: dict[str, Callable[[int, int], CheckResult]] = {
    "harer_zagier_vs_bruteforce": _harer,
    "bicellular_vs_bruteforce": _bicellular,
    "two_backbone_formula_vs_bicellular": _two_backbone_formula,
    "irreducible_shadows_1bb": _shadows_1bb,
    "irreducible_shadows_2bb_AB": _shadows_2bb,
    "cutting_identity": _cutting,
    "gamma_filter_one_backbone": _gamma_h,
    "gamma_filter_two_backbones": _gamma_q,
    "free_exterior_arcs": _free_exterior,
    "t_equals_1_specialization": _specialization,
}


def run_checks(max_arcs: int, max_genus: int, only: Iterable[str] | None = None) -> list[CheckResult]:
    names = list(CHECKS) if only is None else list(only)
    unknown = [n for n in names if n not in CHECKS]
    if unknown:
        raise ValueError(f"unknown checks {unknown}")
    return [CHECKS[n](max_arcs, max_genus) for n in names]
