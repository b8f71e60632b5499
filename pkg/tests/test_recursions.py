import json
from math import comb, factorial

import pytest

import goldens as G
from chordgenus.diagrams import enumerate_diagrams
from chordgenus.errors import TruncationTooLow
from chordgenus.recursions import (
    abi_rhs,
    bicellular_q,
    catalan_bivariate,
    harer_zagier,
    irreducible_1bb,
    theta_substitution,
    two_bb_shadow_polys,
)
from chordgenus.series import Polynomial, TruncatedSeries

from oracles import catalan, convolve


# --- Harer recursion ----------------------------------------------------------------


def test_harer_small_values():
    c = harer_zagier(2, 6)
    assert c.count(0, 3) == 5
    assert c.count(1, 2) == 1
    assert c.count(1, 3) == 10


def test_genus_zero_is_catalan():
    c = harer_zagier(0, 30)
    assert [c.count(0, n) for n in range(31)] == catalan(30)


def test_genus_one_closed_form():
    # c_1(n) = Catalan(n) (n+1) n (n-1) / 12
    c = harer_zagier(1, 25)
    cat = catalan(25)
    for n in range(26):
        assert 12 * c.count(1, n) == cat[n] * (n + 1) * n * (n - 1)


def test_harer_vanishes_above_half():
    c = harer_zagier(4, 12)
    for g in range(5):
        for n in range(2 * g):
            assert c.count(g, n) == 0
    assert c.is_integral()


def test_row_sums_are_double_factorials():
    c = harer_zagier(6, 12)
    for n in range(13):
        total = sum(c.count(g, n) for g in range(7))
        assert total == factorial(2 * n) // (2**n * factorial(n))


@pytest.mark.parametrize("n", range(0, 7))
def test_harer_against_bruteforce(n):
    brute = enumerate_diagrams("matchings_1bb", n)
    c = harer_zagier(3, 6)
    for g in range(4):
        assert c.count(g, n) == brute.get((g, ""), 0)


def test_table_json():
    doc = json.loads(json.dumps(harer_zagier(1, 4).to_json()))
    assert doc["entries"]["1"] == [0, 0, 1, 10, 70]


def test_table_past_order():
    with pytest.raises(TruncationTooLow):
        harer_zagier(1, 4).count(0, 5)


# --- theta substitution -------------------------------------------------------


def test_theta_round_trip():
    sub = theta_substitution(12, 2)
    assert sub.theta[0] == 0
    assert sub.omega.coefficient(0) == Polynomial([])
    assert list(sub.theta.truncate(4)) == [0, 1, -3, 8, -20]


# --- irreducible one-backbone shadows ---------------------------------------------


def test_i1_i2_i3():
    t = irreducible_1bb(3)
    assert t[1] == G.I1
    assert t[2] == G.I2
    assert t[3] == G.I3
    assert t[2][4] == 17 and t[3][6] == 1259


def test_expanded_forms_agree():
    assert G.I1 == G.I_1_1
    assert G.I2 == G.I_2_1


def test_i_truncation_too_low():
    with pytest.raises(TruncationTooLow):
        irreducible_1bb(2, order=9)


@pytest.mark.parametrize("g", [1, 2])
def test_i_against_bruteforce(g):
    p = irreducible_1bb(g)[g]
    for m in range(1, 7):
        brute = enumerate_diagrams("shadows_1bb", m, genus=g, irreducible=True)
        assert p[m] == brute.get((g, ""), 0)


def test_i_degree_bounds():
    t = irreducible_1bb(4)
    for g in range(1, 5):
        p = t[g]
        assert p.degree == 6 * g - 2
        assert all(p[m] == 0 for m in range(2 * g))
        assert p[2 * g] > 0


# --- bicellular identity ------------------------------------------------------


def test_bicellular_small():
    q = bicellular_q(2, 6)
    assert q.count(0, 2) == 8
    assert q.count(0, 1) == 1


def test_bicellular_at_one_arc_by_formula():
    c = harer_zagier(1, 2)
    val = c.count(1, 2) - 2 * (c.count(0, 0) * c.count(1, 1) + c.count(0, 1) * c.count(1, 0))
    assert val == 1


@pytest.mark.parametrize("n", range(1, 7))
def test_bicellular_against_bruteforce(n):
    brute = enumerate_diagrams("matchings_2bb", n)
    q = bicellular_q(2, 6)
    for g in range(3):
        assert q.count(g, n) == brute.get((g, ""), 0)


def test_bicellular_generating_form():
    # sum_{g1} C_{g1} C_{g+1-g1} + Q_g = C_{g+1}/u, compared by plain convolution
    order = 14
    c = harer_zagier(4, order + 1)
    q = bicellular_q(3, order)
    for g in range(4):
        lhs = [q.count(g, n) for n in range(order + 1)]
        for g1 in range(g + 2):
            a = [c.count(g1, n) for n in range(order + 1)]
            b = [c.count(g + 1 - g1, n) for n in range(order + 1)]
            lhs = [x + y for x, y in zip(lhs, convolve(a, b, order + 1))]
        assert lhs == [c.count(g + 1, n + 1) for n in range(order + 1)]


# --- two-backbone shadows -------------------------------------------------------


def test_two_backbone_goldens():
    a, b = two_bb_shadow_polys(3)
    assert a[0] == G.A0
    assert a[1] == G.A1
    assert a[2] == G.A2
    assert a[3] == G.A3
    assert b[0] == G.B0
    assert b[1] == G.B1
    assert b[2] == G.B2


def test_split_sums_to_irreducible_census():
    a, b = two_bb_shadow_polys(1)
    assert a[0] + b[0] == G.I_0_2
    assert a[1] + b[1] == G.I_1_2
    assert a[1][4] + b[1][4] == 137


@pytest.mark.parametrize("g", range(0, 4))
def test_cutting_identity(g):
    a, b = two_bb_shadow_polys(4)
    i = irreducible_1bb(4)[g + 1]
    for m in range(1, 21):
        assert a[g + 1][m] + b[g][m] == abi_rhs(i, m)
        assert abi_rhs(i, m) == (2 * m - 1) * i[m] + 2 * (m - 1) * i[m - 1]


def test_two_backbone_support():
    a, b = two_bb_shadow_polys(3)
    for g in range(4):
        lo, hi = max(2, 2 * g + 1), 6 * (g + 1) - 2
        for p in (a[g], b[g]):
            assert all(c >= 0 and c.denominator == 1 for c in p.coeffs)
            assert all(p[m] == 0 for m in range(len(p)) if not lo <= m <= hi)
        assert b[g][hi] > 0


@pytest.mark.parametrize("g", [0, 1, 2])
def test_two_backbone_against_bruteforce(g):
    a, b = two_bb_shadow_polys(2)
    for m in range(1, 6):
        tab = enumerate_diagrams("shadows_2bb", m, genus=g, irreducible=True)
        assert a[g][m] == tab.get((g, "A"), 0)
        assert b[g][m] == tab.get((g, "B"), 0)


def test_two_backbone_truncation():
    with pytest.raises(TruncationTooLow):
        two_bb_shadow_polys(1, order=5)


def test_bivariate_catalan_t_slices():
    C = catalan_bivariate(8, 3)
    assert C.t_slice(0) == TruncatedSeries(catalan(8), 8)
    assert C.coefficient(4, 2) == 21
    assert C.at_t(1)[4] == 105
    assert comb(8, 4) // 5 == C.coefficient(4, 0)
