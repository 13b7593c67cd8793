from fractions import Fraction

import mpmath
import pytest
from sympy import Rational, oo

from xopspy.exact import (
    POSITIVE_HALF_LINE,
    REAL_LINE,
    UNIT_INTERVAL,
    Interval,
    RatFunc,
    antiderivative,
    coeffs,
    discriminant,
    laurent_coeffs,
    monic,
    nullspace,
    order_at,
    poly,
    poly_gcd,
    rank,
    rat,
    rational_roots,
    series_divide,
    squarefree_factor,
    sturm_count,
    taylor,
    valuation,
)
from xopspy.exception import PreconditionError, ZeroInputError
from xopspy.test.test_helpers import poly_from_roots, random_ratfunc, random_roots

Z1 = poly([0, 1])


def test_rat_conversions():
    assert rat("-3/4") == Rational(-3, 4)
    assert rat(Fraction(5, 10)) == Rational(1, 2)
    assert rat(7) == 7
    with pytest.raises(TypeError):
        rat(0.5)
    with pytest.raises(PreconditionError):
        rat("sqrt(2)")


def test_poly_strips_trailing_zeros():
    p = poly([1, 2, 0, 0])
    assert p.degree() == 1
    assert coeffs(p) == [1, 2]
    assert poly().is_zero
    assert poly().degree() == -oo


def test_antiderivative_and_taylor():
    assert antiderivative(poly([1, 2, 3])) == poly([0, 1, 1, 1])
    assert taylor(poly([0, 0, 1]), 1) == [1, 2, 1]


def test_valuation():
    p = poly_from_roots([1, 1, -2])
    assert valuation(p, 1) == 2
    assert valuation(p, -2) == 1
    assert valuation(p, 0) == 0
    with pytest.raises(ZeroInputError):
        valuation(poly(), 0)


def test_rational_roots():
    p = poly_from_roots([Rational(1, 2), Rational(1, 2), -3]) * poly([1, 0, 1])
    assert rational_roots(p) == {-3: 1, Rational(1, 2): 2}
    assert list(rational_roots(p)) == [-3, Rational(1, 2)]


def test_gcd_and_monic():
    a = poly_from_roots([1, 2]).mul_ground(3)
    b = poly_from_roots([2, 5]).mul_ground(-2)
    assert poly_gcd([a, b]) == poly([-2, 1])
    assert monic(a) == poly_from_roots([1, 2])
    with pytest.raises(ZeroInputError):
        monic(poly())


def test_ratfunc_canonical_form():
    f = RatFunc(poly([0, 2]), poly([0, 4]))
    assert f.is_constant
    assert f.as_constant() == Rational(1, 2)
    g = RatFunc(poly([1]), poly([2, 0, -2]))
    assert g.den == poly([-1, 0, 1])
    assert g.num == poly([Rational(-1, 2)])
    assert RatFunc(poly(), poly([1, 1])) == RatFunc()
    with pytest.raises(ZeroDivisionError):
        RatFunc(1, poly())


def test_ratfunc_arithmetic(rng):
    for _ in range(10):
        f = random_ratfunc(rng)
        g = random_ratfunc(rng, 1, 1)
        assert (f + g) - g == f
        assert (f * g) / g == f
        assert (f * g).diff() == f.diff() * g + f * g.diff()
        assert hash(f + 0) == hash(f)


def test_ratfunc_derivatives_and_eval():
    w = RatFunc(1, Z1)
    assert w.diff() == RatFunc(-1, poly([0, 0, 1]))
    assert RatFunc(poly([0, 0, 1])).log_diff() == RatFunc(2, Z1)
    assert RatFunc(poly([1, 1]), poly([2, 1])).eval(0) == Rational(1, 2)
    with pytest.raises(ZeroDivisionError):
        w.eval(0)
    with mpmath.workprec(64):
        half = RatFunc(1, poly([1, 0, 1])).mp_eval(mpmath.mpf(1))
    assert half == mpmath.mpf("0.5")


def test_ratfunc_is_read_only():
    f = RatFunc(Z1)
    with pytest.raises(RuntimeError):
        f.num = poly([1])


def test_ratfunc_views():
    f = RatFunc(poly([0, 1, 3]), poly([1, 1]))
    assert f.degree() == 1
    assert f.leading() == 3
    assert not f.is_poly
    with pytest.raises(PreconditionError):
        f.as_poly()
    assert RatFunc().degree() == -oo


def test_interval():
    assert POSITIVE_HALF_LINE.contains(1)
    assert not POSITIVE_HALF_LINE.contains(0)
    assert Interval.closure_of(POSITIVE_HALF_LINE).contains(0)
    assert Interval.closure_of(UNIT_INTERVAL).contains(-1)
    assert REAL_LINE.contains("-1000")
    assert str(Interval(Rational(0), oo, lo_closed=True)) == "[0, oo)"
    with pytest.raises(PreconditionError):
        Interval(Rational(1), Rational(1))
    with pytest.raises(PreconditionError):
        Interval(-oo, Rational(0), lo_closed=True)


def test_squarefree_factor():
    p = poly_from_roots([1, 1, -1]).mul_ground(-2)
    lc, factors = squarefree_factor(p)
    assert lc == -2
    assert sorted(factors, key=lambda item: item[1]) == [
        (poly([1, 1]), 1),
        (poly([-1, 1]), 2),
    ]
    assert squarefree_factor(poly([5])) == (5, [])


def test_discriminant():
    b, c = Rational(3), Rational(-7, 2)
    assert discriminant(poly([c, b, 1])) == b**2 - 4 * c
    # z^3 + 4z^2 - 4z - 8
    assert discriminant(poly([-8, -4, 4, 1])) == 3136
    assert discriminant(poly([Rational(5, 8), Rational(5, 4), Rational(5, 2), 1])) == (
        Rational(-25, 2)
    )
    with pytest.raises(PreconditionError):
        discriminant(poly([3]))


def test_sturm_count():
    p = poly_from_roots([1, 2, -3])
    assert sturm_count(p) == 3
    assert sturm_count(p, Interval(Rational(1), Rational(2))) == 0
    assert sturm_count(p, Interval(Rational(1), Rational(2), True, True)) == 2
    assert sturm_count(p, Interval(Rational(1), Rational(2), True, False)) == 1
    assert sturm_count(p, POSITIVE_HALF_LINE) == 2
    assert sturm_count(p * p) == 3
    assert sturm_count(poly([1, 0, 1])) == 0
    with pytest.raises(ZeroInputError):
        sturm_count(poly())


@pytest.mark.parametrize("count", [1, 2, 4])
def test_sturm_count_random_roots(rng, count):
    roots = random_roots(rng, count)
    p = poly_from_roots(roots) * poly([1, 0, 1])
    assert sturm_count(p) == count
    positive = sum(1 for x in roots if x > 0)
    assert sturm_count(p, POSITIVE_HALF_LINE) == positive


def test_order_and_laurent():
    f = RatFunc(Z1, poly_from_roots([1, 1]))
    assert order_at(f, 1) == -2
    assert order_at(f, 0) == 1
    g = RatFunc(1, poly([0, 1, -1]))  # 1/(z(1-z))
    assert laurent_coeffs(g, 0, -2, 2) == {-2: 0, -1: 1, 0: 1, 1: 1, 2: 1}
    assert laurent_coeffs(RatFunc(), 0, 0, 1) == {0: 0, 1: 0}
    with pytest.raises(PreconditionError):
        laurent_coeffs(g, 0, 2, 1)
    with pytest.raises(ZeroInputError):
        order_at(RatFunc(), 0)


def test_series_divide():
    assert series_divide([1], [1, -1], 4) == [1, 1, 1, 1]
    assert series_divide([Rational(1), 1], [Rational(1), 1], 3) == [1, 0, 0]


def test_nullspace_and_rank():
    rows = [[Rational(1), 1, 0], [Rational(0), 1, 1]]
    (kernel,) = nullspace(rows, 3)
    assert all(sum(a * b for a, b in zip(row, kernel)) == 0 for row in rows)
    assert rank(rows, 3) == 2
    assert len(nullspace([], 2)) == 2
    assert rank([], 2) == 0
