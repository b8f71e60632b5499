import json
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from chordgenus.errors import NoConvergence, NonzeroConstantTerm, TruncationError, ZeroConstantTerm
from chordgenus.series import (
    BivariateSeries,
    Polynomial,
    TruncatedSeries,
    arith,
    compose,
    derivative,
    from_json,
    invert,
    solve_fixed_point,
)

from oracles import catalan, convolve, divide, power

small = st.fractions(min_value=-20, max_value=20, max_denominator=7)


def series(min_size=1, max_size=9, unit=False):
    coeffs = st.lists(small, min_size=min_size, max_size=max_size)
    if unit:
        coeffs = coeffs.map(lambda c: [Fraction(1)] + c[1:])
    return coeffs.map(lambda c: TruncatedSeries(c, len(c) - 1))


# --- arithmetic ------------------------------------------------------------------


def test_telescoping_product():
    u = TruncatedSeries.gen(5)
    got = arith(1 + u, 1 - u, "mul")
    assert got.order == 5
    assert list(got) == [1, 0, -1, 0, 0, 0]


def test_additive_identity():
    p = TruncatedSeries([3, -1, Fraction(1, 2)], 2)
    assert arith(p, TruncatedSeries.zero(2), "add") == p
    q = Polynomial([1, 2, 3])
    assert q + 0 == q


def test_catalan_square():
    c = TruncatedSeries(catalan(6), 6)
    assert (c * c)[3] == 14


def test_truncation_is_min_of_orders():
    a = TruncatedSeries([1, 1, 1, 1, 1], 4)
    b = TruncatedSeries([1, 2], 1)
    assert (a * b).order == 1
    assert (a + b).order == 1


def test_reading_past_order_raises():
    s = TruncatedSeries([1, 2, 3], 2)
    with pytest.raises(TruncationError):
        s[3]


def test_fractions_reduce():
    s = TruncatedSeries([Fraction(2, 4), Fraction(6, 3)], 1)
    assert s[0] == Fraction(1, 2) and s[0].denominator == 2
    assert s.denominator == 2
    assert not s.is_integral()
    assert (2 * s).is_integral()


def test_polynomial_trims():
    p = Polynomial([1, 2, 0, 0])
    assert p.degree == 1
    assert Polynomial([0, 0]).degree < 0
    assert Polynomial([1, 1]) * Polynomial([1, -1]) == Polynomial([1, 0, -1])


@given(series(), series(), series())
def test_ring_axioms(a, b, c):
    assert a + b == b + a
    assert a * b == b * a
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c


@given(series(), series())
def test_mul_matches_convolution(a, b):
    n = min(a.order, b.order) + 1
    assert list(a * b) == convolve(list(a), list(b), n)


def test_big_product_matches_convolution():
    # long operands go through the packed big-integer product
    rng = random.Random(7)
    a = [rng.randint(-10**30, 10**30) for _ in range(80)]
    b = [Fraction(rng.randint(-99, 99), rng.randint(1, 9)) for _ in range(80)]
    got = TruncatedSeries(a, 79) * TruncatedSeries(b, 79)
    assert list(got) == convolve([Fraction(x) for x in a], b, 80)


# --- inversion ----------------------------------------------------------------------


def test_invert_geometric():
    u = TruncatedSeries.gen(6)
    assert list(invert(1 - u)) == [1] * 7
    assert invert(TruncatedSeries.one(4)) == TruncatedSeries.one(4)


def test_invert_catalan_expression():
    c = TruncatedSeries(catalan(5), 5)
    s = 1 - (c * c).shift(1)
    assert invert(s)[2] == 3
    inv = invert(s)
    assert list(inv) == divide([1], list(s), inv.order + 1)


def test_invert_zero_constant():
    with pytest.raises(ZeroConstantTerm):
        invert(TruncatedSeries([0, 1], 3))


def test_invert_hundred_random():
    rng = random.Random(2024)
    for _ in range(100):
        order = rng.randint(0, 25)
        c = [Fraction(rng.choice([-3, -2, -1, 1, 2, 3]), rng.randint(1, 4))]
        c += [Fraction(rng.randint(-9, 9), rng.randint(1, 5)) for _ in range(order)]
        s = TruncatedSeries(c, order)
        assert s * s.invert() == TruncatedSeries.one(order)


def test_bivariate_invert():
    u = BivariateSeries.gen(6, 2)
    t = BivariateSeries.t_monomial(6, 2)
    s = 1 - u - u * t
    inv = s.invert()
    assert inv * s == BivariateSeries.constant(1, 6, 2)
    # [u^3] 1/(1 - u(1+t)) = (1+t)^3 truncated at t^2
    assert inv.coefficient(3) == Polynomial([1, 3, 3])


def test_bivariate_invert_zero_constant():
    t = BivariateSeries.t_monomial(4, 2)
    with pytest.raises(ZeroConstantTerm):
        t.invert()


# --- composition ---------------------------------------------------------------------


def test_compose_square():
    u = TruncatedSeries.gen(5)
    got = compose(Polynomial([0, 0, 1]), u + u * u)
    assert got[3] == 2


def test_compose_first_genus_polynomial():
    u = TruncatedSeries.gen(6)
    i11 = Polynomial([0, 0, 1, 2, 1])
    assert list(compose(i11, u)) == [0, 0, 1, 2, 1, 0, 0]


def test_theta_expansion():
    # y(y+1)/(2y+1)^2 expanded by long division
    order = 6
    y = TruncatedSeries.gen(order, "y")
    theta = y * (y + 1) * ((2 * y + 1) ** 2).invert()
    expected = divide([0, 1, 1], [1, 4, 4], order + 1)
    assert list(theta) == expected
    assert list(compose(theta, y).truncate(4)) == [0, 1, -3, 8, -20]


def test_compose_nonzero_constant():
    with pytest.raises(NonzeroConstantTerm):
        compose(Polynomial([0, 1]), TruncatedSeries([1, 1], 2))


@given(st.integers(0, 8), st.lists(small, min_size=2, max_size=9))
def test_compose_monomial_matches_power(k, inner):
    inner[0] = Fraction(0)
    g = TruncatedSeries(inner, len(inner) - 1)
    got = compose(Polynomial.monomial(k), g)
    assert list(got) == power(inner, k, len(inner))


@given(series(min_size=2), st.lists(small, min_size=2, max_size=9))
def test_compose_series_outer(f, inner):
    inner[0] = Fraction(0)
    g = TruncatedSeries(inner, len(inner) - 1)
    got = compose(f, g)
    n = got.order + 1
    expected = [Fraction(0)] * n
    for k, c in enumerate(f):
        for i, x in enumerate(power(inner[:n] + [0] * n, k, n)):
            expected[i] += c * x
    assert list(got) == expected


def test_bivariate_compose_u():
    # outer(u, t) = 1 + t u, inner = u + u^2
    outer = BivariateSeries([[1, 0], [0, 1], [0, 0], [0, 0]], 3, 1)
    inner = TruncatedSeries([0, 1, 1, 0], 3)
    got = outer.compose_u(inner)
    rows = [got.coefficient(n) for n in range(4)]
    assert rows == [Polynomial([1]), Polynomial([0, 1]), Polynomial([0, 1]), Polynomial([])]


# --- derivative ----------------------------------------------------------------------


def test_power_rule():
    assert derivative(Polynomial([0, 0, 1, 2, 1])) == Polynomial([0, 2, 6, 4])
    assert derivative(Polynomial([5])) == Polynomial([])
    s = TruncatedSeries([1, 1, 1, 1], 3)
    assert derivative(s).order == 2
    assert list(derivative(s)) == [1, 2, 3]


def test_cutting_operator_on_first_genus():
    i1 = Polynomial([0, 0, 1, 2, 1])
    y2y = Polynomial([0, 1, 1])
    got = 2 * y2y * derivative(i1) - i1
    assert got == Polynomial([0, 0, 3, 14, 19, 8])


def test_order_zero_derivative():
    with pytest.raises(TruncationError):
        derivative(TruncatedSeries([1], 0))


# --- fixed points --------------------------------------------------------------------


def test_fixed_point_catalan():
    def eq(h):
        return 1 + (h * h).shift(1)

    h = solve_fixed_point(eq, TruncatedSeries.one(0), 12)
    assert list(h) == catalan(12)
    assert eq(h).truncate(12) - h == TruncatedSeries.zero(12)


def test_fixed_point_constant():
    h = solve_fixed_point(lambda x: TruncatedSeries.one(x.order), TruncatedSeries.one(0), 5)
    assert list(h) == [1, 0, 0, 0, 0, 0]


def test_fixed_point_bad_seed():
    with pytest.raises(NoConvergence):
        solve_fixed_point(lambda x: 1 + x.shift(1), TruncatedSeries([2], 0), 4)


def test_fixed_point_not_contracting():
    # x = 2x - 1 + u has the root 1 - u but plain iteration cannot find it
    def eq(x):
        return 2 * x - 1 + TruncatedSeries.gen(x.order)

    with pytest.raises(NoConvergence):
        solve_fixed_point(eq, TruncatedSeries.one(0), 4)


@given(st.lists(st.integers(-5, 5), min_size=1, max_size=5))
def test_fixed_point_residual(extra):
    # x = 1 + u x^2 + u^2 p(u) x
    p = TruncatedSeries(extra, 10)

    def eq(x):
        return 1 + (x * x).shift(1) + (x * p.truncate(x.order)).shift(2)

    x = solve_fixed_point(eq, TruncatedSeries.one(0), 10)
    assert eq(x).truncate(10) == x


# --- serialization -------------------------------------------------------------


@given(series())
def test_json_round_trip(s):
    doc = json.loads(json.dumps(s.to_json()))
    assert from_json(doc) == s
    assert all(isinstance(x, str) for pair in doc["coeffs"] for x in pair)


def test_bivariate_json_round_trip():
    s = BivariateSeries([[1, 0], [Fraction(1, 3), 2], [0, -7]], 2, 1)
    assert from_json(json.loads(json.dumps(s.to_json()))) == s
    p = Polynomial([1, Fraction(-2, 5)])
    assert from_json(p.to_json()) == p


def test_big_integers_serialize_as_strings():
    s = TruncatedSeries([10**40], 0)
    assert s.to_json()["coeffs"] == [[str(10**40), "1"]]


def test_bivariate_t_cap_drops_high_genus():
    t = BivariateSeries.t_monomial(3, 1)
    assert t * t == BivariateSeries.constant(0, 3, 1)
    assert (1 + t).at_t(1) == TruncatedSeries([2, 0, 0, 0], 3)
