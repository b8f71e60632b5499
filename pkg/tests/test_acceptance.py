"""Acceptance criteria, one printed PASS/FAIL line per criterion.

Tolerances and reference values are pinned here; nothing is tuned to make a
line pass.  Criteria whose published reference values disagree with the
brute-force-validated computation are expected to print FAIL.
"""

import time

import pytest

import goldens as G
from chordgenus.asymptotics import clt_params, estimate_radius, genus_distribution
from chordgenus.diagrams import census, enumerate_diagrams
from chordgenus.errors import UnstableDerivative
from chordgenus.gamma import (
    GammaConfig,
    canonical_gf,
    canonical_substitution,
    h_gamma,
    i2_gamma,
    q_full_bivariate,
    q_gamma_bivariate,
    q_gamma_uni,
    shape_gf,
    u_tau,
)
from chordgenus.recursions import (
    abi_rhs,
    bicellular_q,
    catalan_bivariate,
    harer_zagier,
    irreducible_1bb,
    two_bb_shadow_polys,
)
from chordgenus.series import Polynomial, TruncatedSeries

from oracles import catalan

GROWTH_ORDER = 400
GROWTH_REL = 5e-3
TABLE_ABS = 5e-3
TABLE_ORDER, TABLE_FALLBACK = 400, 600


def report(capsys, number, ok, seconds, budget, lines):
    within = seconds <= budget
    verdict = "PASS" if ok and within else "FAIL"
    with capsys.disabled():
        print(f"\ncriterion {number}: {verdict} ({seconds:.1f}s, budget {budget:.0f}s)")
        for line in lines:
            print(f"    {line}")
    assert ok, f"criterion {number} failed"
    assert within, f"criterion {number} exceeded {budget}s"


def t_part(B, g):
    return Polynomial(B.t_slice(g).coeffs) if g <= B.t_cap else Polynomial([])


def test_criterion_1_golden_polynomials(capsys):
    start = time.perf_counter()
    one = irreducible_1bb(3)
    a, b = two_bb_shadow_polys(3)
    g0b, g1a, g1b = i2_gamma(0, "B"), i2_gamma(1, "A"), i2_gamma(1, "B")
    checks = {
        "I_{1,1}": (one[1], G.I_1_1),
        "I_{2,1}": (one[2], G.I_2_1),
        "I_{0,2}": (a[0] + b[0], G.I_0_2),
        "I_{1,2}": (a[1] + b[1], G.I_1_2),
        "I_1": (one[1], G.I1),
        "I_2": (one[2], G.I2),
        "I_3": (one[3], G.I3),
        "I_{2,A_1}": (a[1], G.A1),
        "I_{2,A_2}": (a[2], G.A2),
        "I_{2,A_3}": (a[3], G.A3),
        "I_{2,B_0}": (b[0], G.B0),
        "I_{2,B_1}": (b[1], G.B1),
        "I_{2,B_2}": (b[2], G.B2),
        "I_{2,0_B} t^0": (t_part(g0b, 0), G.GAMMA0_B[0]),
        "I_{2,1_A} t^0": (t_part(g1a, 0), Polynomial([])),
        "I_{2,1_A} t^1": (t_part(g1a, 1), G.GAMMA1_A[1]),
        "I_{2,1_B} t^0": (t_part(g1b, 0), G.GAMMA1_B[0]),
        "I_{2,1_B} t^1": (t_part(g1b, 1), G.GAMMA1_B[1]),
    }
    elapsed = time.perf_counter() - start
    lines, ok = [], True
    for name, (got, want) in checks.items():
        good = got == want
        ok &= good
        lines.append(f"{name}: {'ok' if good else f'got {got}, reference {want}'}")
    summed = t_part(g1a, 1) + t_part(g1b, 1) == G.GAMMA1_A[1] + G.GAMMA1_B[1]
    lines.append(f"I_{{2,1_A}} + I_{{2,1_B}} at t^1 equals the reference sum: {summed}")
    report(capsys, 1, ok, elapsed, 1.0, lines)


def test_criterion_2_cross_identity(capsys):
    start = time.perf_counter()
    a, b = two_bb_shadow_polys(4)
    one = irreducible_1bb(4)
    lines, ok = [], True
    for g, ref in [(0, G.I_0_2), (1, G.I_1_2)]:
        good = a[g] + b[g] == ref
        ok &= good
        lines.append(f"A_{g} + B_{g} equals the genus-{g} two-backbone polynomial: {good}")
    u4 = (a[1][4], b[1][4], G.I_1_2[4])
    ok &= u4 == (18, 119, 137)
    lines.append(f"u^4: {u4[0]} + {u4[1]} = {u4[2]}")
    bad = [(g, m) for g in range(4) for m in range(1, 21) if a[g + 1][m] + b[g][m] != abi_rhs(one[g + 1], m)]
    ok &= not bad
    lines.append(f"cutting identity for g <= 3, m <= 20: {'holds' if not bad else f'fails at {bad[:3]}'}")
    report(capsys, 2, ok, time.perf_counter() - start, 1.0, lines)


def test_criterion_3_oracle_equivalence(capsys):
    start = time.perf_counter()
    lines, ok = [], True

    c = harer_zagier(4, 8)
    bad = []
    for n in range(9):
        brute = enumerate_diagrams("matchings_1bb", n)
        bad += [(g, n) for g in range(5) if c.count(g, n) != brute.get((g, ""), 0)]
    ok &= not bad
    lines.append(f"c_g(n), n <= 8: {'equal' if not bad else bad[:3]}")

    q = bicellular_q(3, 6)
    Q = q_full_bivariate(6)
    bad, bad_q = [], []
    for n in range(1, 7):
        brute = enumerate_diagrams("matchings_2bb", n)
        for g in range(4):
            want = brute.get((g, ""), 0)
            if q.count(g, n) != want:
                bad.append((g, n))
            if (Q.coefficient(n, g) if g <= Q.t_cap else 0) != want:
                bad_q.append((g, n))
    ok &= not bad and not bad_q
    lines.append(f"q_g(n), n <= 6: {'equal' if not bad else bad[:3]}")
    lines.append(f"[u^n t^g] Q(u,t) vs bicellular and brute force, n <= 6: {'equal' if not bad_q else bad_q[:3]}")

    one = irreducible_1bb(2)
    a, b = two_bb_shadow_polys(2)
    bad = []
    for g in range(3):
        for m in range(1, 6):
            if g and one[g][m] != enumerate_diagrams("shadows_1bb", m, genus=g, irreducible=True).get((g, ""), 0):
                bad.append(("1bb", g, m))
            tab = enumerate_diagrams("shadows_2bb", m, genus=g, irreducible=True)
            if a[g][m] != tab.get((g, "A"), 0) or b[g][m] != tab.get((g, "B"), 0):
                bad.append(("2bb", g, m))
    ok &= not bad
    lines.append(f"irreducible shadows, 1bb and 2bb A/B, m <= 5, g <= 2: {'equal' if not bad else bad[:3]}")
    report(capsys, 3, ok, time.perf_counter() - start, 600.0, lines)


def test_criterion_4_support_bounds(capsys, monkeypatch):
    # the first empty arc number above the g=1 range needs one more arc than the default cap
    monkeypatch.setenv("CHORDGENUS_CAP_PRUNED", "11")
    start = time.perf_counter()
    lines, ok = [], True
    for g, lo, hi in [(0, 2, 4), (1, 3, 10)]:
        cen = census("shadows_2bb", g, range(1, hi + 2), irreducible=None)
        good = cen.support() == list(range(lo, hi + 1))
        ok &= good
        lines.append(f"g={g}: support {cen.support()[0]}..{cen.support()[-1]}, expected {lo}..{hi}, counts {cen.counts}")
    edge = census("shadows_2bb", 2, [4, 5], irreducible=None)
    good = edge.counts[4] == 0 and edge.counts[5] > 0
    ok &= good
    lines.append(f"g=2 lower edge: m=4 -> {edge.counts[4]}, m=5 -> {edge.counts[5]}")
    report(capsys, 4, ok, time.perf_counter() - start, 600.0, lines)


def test_criterion_5_growth_constants(capsys):
    start = time.perf_counter()
    series = {
        "rho^-1 (H_1)": (h_gamma(GammaConfig(1, u_order=GROWTH_ORDER)), G.RHO_INV),
        "delta_0^-1 (Q_0)": (q_gamma_uni(GammaConfig(0, u_order=GROWTH_ORDER)), G.DELTA0_INV),
        "delta_1^-1 (Q_1)": (q_gamma_uni(GammaConfig(1, u_order=GROWTH_ORDER)), G.DELTA1_INV),
    }
    lines, ok = [], True
    for name, (s, ref) in series.items():
        est = estimate_radius(s, method="ratio")
        got = 1 / est.radius
        rel = abs(got - ref) / ref
        ok &= rel <= GROWTH_REL
        lines.append(f"{name}: {got:.6f} vs {ref} (rel. dev. {rel:.2%}, tolerance {GROWTH_REL:.1%})")
    elapsed = time.perf_counter() - start
    for g, ref in [(0, G.DELTA0_INV), (1, G.DELTA1_INV)]:
        printed = q_gamma_uni(GammaConfig(g, u_order=GROWTH_ORDER), "printed")
        lines.append(f"note: the printed-variant Q_{g} gives {1 / estimate_radius(printed, method='ratio').radius:.6f} (reference {ref})")
    report(capsys, 5, ok, elapsed, 600.0, lines)


def test_criterion_6_clt_table(capsys):
    start = time.perf_counter()
    lines, ok = [], True
    for (gamma, tau), (mu_ref, s2_ref) in G.TABLE.items():
        try:
            r = clt_params(GammaConfig(gamma, tau), order=TABLE_ORDER)
        except UnstableDerivative as err:
            lines.append(f"(gamma={gamma}, tau={tau}) order {TABLE_ORDER}: {err}; retrying at {TABLE_FALLBACK}")
            r = clt_params(GammaConfig(gamma, tau), order=TABLE_FALLBACK)
        dmu, ds2 = abs(r.mu - mu_ref), abs(r.sigma_sq - s2_ref)
        good = dmu <= TABLE_ABS and ds2 <= TABLE_ABS
        ok &= good
        lines.append(
            f"(gamma={gamma}, tau={tau}) order {r.order}: mu={r.mu:.6f} (ref {mu_ref}, |d|={dmu:.2e}, step-halving {r.mu_error:.1e}) "
            f"sigma^2={r.sigma_sq:.6f} (ref {s2_ref}, |d|={ds2:.2e}, step-halving {r.sigma_sq_error:.1e}) {'ok' if good else 'OUT'}"
        )
    report(capsys, 6, ok, time.perf_counter() - start, 1800.0, lines)


def test_criterion_7_specializations(capsys):
    start = time.perf_counter()
    lines, ok = [], True
    order = 20

    def check(name, good):
        nonlocal ok
        ok &= bool(good)
        lines.append(f"{name}: {bool(good)}")

    for gamma in range(3):
        bi, uni = GammaConfig(gamma, u_order=order, bivariate=True), GammaConfig(gamma, u_order=order)
        check(f"H_{gamma}(u,1) = H_{gamma}(u)", h_gamma(bi).at_t(1) == h_gamma(uni))
        check(f"Q_{gamma}(u,1) = Q_{gamma}(u)", q_gamma_bivariate(bi).at_t(1) == q_gamma_uni(uni))
        for tau in (1, 2, 3):
            zb = canonical_gf(GammaConfig(gamma, tau, u_order=order, bivariate=True), z_order=order)
            zu = canonical_gf(GammaConfig(gamma, tau, u_order=order), z_order=order)
            check(f"canonical Q_{{{tau},{gamma}}}(z,1) = univariate", zb.at_t(1) == zu)
    S_bi = shape_gf(GammaConfig(1, u_order=8, bivariate=True))
    S_uni = shape_gf(GammaConfig(1, u_order=8))
    check("shape series at t=1 = univariate", all(S_bi.slices[k].at_t(1) == S_uni.slices[k] for k in range(len(S_uni.slices))))
    check("bicellular Q(u,1) = univariate sum", q_full_bivariate(order).at_t(1) == TruncatedSeries(
        [sum(bicellular_q(order, order).count(g, n) for g in range(order + 1)) for n in range(order + 1)], order))
    check("C(u,1) = sum over genera", catalan_bivariate(order, order).at_t(1)[order] == sum(harer_zagier(order, order).count(g, order) for g in range(order + 1)))
    check("H_0 = Catalan", list(h_gamma(GammaConfig(0, u_order=60))) == catalan(60))
    z = TruncatedSeries.gen(order, "z")
    x, d2inv = canonical_substitution(1, order)
    check("u_1(z) = 1", u_tau(1, order) == TruncatedSeries.one(order, "z"))
    check("tau=1 substitution = z^2/(z^2-z+1)^2", x == z * z * d2inv)
    report(capsys, 7, ok, time.perf_counter() - start, 60.0, lines)


def test_criterion_8_clt_shape(capsys):
    start = time.perf_counter()
    d = genus_distribution(150, GammaConfig(0, 1))
    ok = abs(d.skewness) < 0.3 and abs(d.excess_kurtosis) < 0.5
    lines = [
        f"n=150, gamma=0, tau=1: mean {d.mean:.4f}, variance {d.variance:.4f}",
        f"skewness {d.skewness:.4f} (|.| < 0.3), excess kurtosis {d.excess_kurtosis:.4f} (|.| < 0.5)",
    ]
    report(capsys, 8, ok, time.perf_counter() - start, 300.0, lines)

