import pytest
from sympy import QQ, Poly

from xopspy.diffop import (
    DiffOp,
    FirstOrderOp,
    SecondOrderOp,
    apply,
    commutator,
    compose,
    euler_operator,
    gauge_conjugate,
    is_bochner,
    leading_order,
    local_expansion,
    op_degree,
    operator_sum,
    symbol_poly,
)
from xopspy.exact import RatFunc, n, poly
from xopspy.exception import PreconditionError, ZeroInputError
from xopspy.test.test_helpers import random_poly, random_ratfunc

Z1 = poly([0, 1])


def test_heisenberg_relation():
    D = DiffOp.D()
    zed = DiffOp.multiplication(Z1)
    assert commutator(D, zed) == DiffOp.identity()
    assert compose(D, zed) == DiffOp([1, Z1])


def test_compose_matches_apply(rng):
    for _ in range(5):
        first = DiffOp([random_ratfunc(rng, 1, 1), random_poly(rng, 1), 1])
        second = DiffOp([random_poly(rng, 2), random_ratfunc(rng, 1, 1)])
        f = random_ratfunc(rng, 3, 1)
        assert (first @ second)(f) == first(second(f))


def test_operator_arithmetic():
    D = DiffOp.D()
    assert D - D == DiffOp()
    assert (D + 1).coeffs == (RatFunc(1), RatFunc(1))
    assert operator_sum([D, D, DiffOp.identity()]) == DiffOp([1, 2])
    with pytest.raises(RuntimeError):
        D.coeffs = ()
    with pytest.raises(ZeroInputError):
        DiffOp().order


def test_hermite_eigenpolynomial(hermite_operator):
    h2 = poly([-2, 0, 4])
    assert hermite_operator.apply(h2) == RatFunc(h2) * -4
    assert apply(hermite_operator, h2) == hermite_operator(h2)
    assert symbol_poly(hermite_operator) == Poly(-2 * n, n, domain=QQ)
    assert op_degree(hermite_operator) == 0
    assert is_bochner(hermite_operator)


def test_second_order_op_checks():
    with pytest.raises(PreconditionError):
        SecondOrderOp(0, 1, 1)
    with pytest.raises(PreconditionError):
        SecondOrderOp.from_diffop(DiffOp.D())
    T = SecondOrderOp(Z1, 1, 2)
    assert SecondOrderOp.from_diffop(T.to_diffop()) == T
    assert (T + 3).r == RatFunc(5)
    assert (T - 2).r == RatFunc()


def test_first_order_op():
    with pytest.raises(PreconditionError):
        FirstOrderOp(0, 1)
    A = FirstOrderOp(1, RatFunc(1, Z1))
    assert A.apply(Z1).is_zero
    assert A.to_diffop()(poly([0, 0, 1])) == RatFunc(Z1)


def test_ricatti_residual(hermite_operator):
    # exp(z^2) is a formal eigenfunction with eigenvalue 2
    assert hermite_operator.ricatti_residual(RatFunc(poly([0, 2]))) == RatFunc(2)


def test_gauge_conjugate_intertwines(hermite_operator, rng):
    for _ in range(5):
        sigma = random_ratfunc(rng, 2, 1)
        conjugated = gauge_conjugate(hermite_operator, sigma)
        y = random_poly(rng, 4)
        assert conjugated.apply(sigma * y) == sigma * hermite_operator.apply(y)
        assert gauge_conjugate(conjugated, sigma.inverse()) == hermite_operator
    assert gauge_conjugate(hermite_operator, 3) is hermite_operator
    with pytest.raises(ZeroInputError):
        gauge_conjugate(hermite_operator, 0)


def test_hermite_conjugate_coefficients(hermite_conjugate):
    w = RatFunc(1, poly([1, 0, 1]))
    assert hermite_conjugate.q == RatFunc(poly([0, -2])) - 4 * RatFunc(Z1) * w
    assert hermite_conjugate.r == 4 + 2 * w - 8 * w * w
    assert not is_bochner(hermite_conjugate)
    assert hermite_conjugate.lcm_denominator() == poly([1, 0, 1]) ** 2


def test_euler_operator():
    T = euler_operator(1, -2, 2)
    assert symbol_poly(T) == Poly(n**2 - 3 * n + 2, n, domain=QQ)
    assert T.apply(Z1).is_zero
    assert T.apply(poly([0, 0, 1])).is_zero


def test_local_expansion(log_control):
    assert leading_order(log_control, 0) == -2
    assert log_control.lcm_denominator() == Z1
    local = local_expansion(log_control, 0, 1)
    assert local.d == -2
    assert local.depth == 1
    indicial = local.action_poly(0)
    assert indicial == Poly(n**2 - 3 * n, n, domain=QQ)
    assert local.action_poly(1) == Poly(1, n, domain=QQ)
    with pytest.raises(PreconditionError):
        local_expansion(log_control, 0, -3)


def test_local_expansion_ordinary_point(hermite_operator):
    assert leading_order(hermite_operator, 1) == -2
    local = local_expansion(hermite_operator, 1, 0)
    # p_0 = 1, q_{-1} = 0 at an ordinary point
    assert local.term(-2) == (1, 0, 0)
    assert local.action_poly(0) == Poly(n**2 - n, n, domain=QQ)
