import pytest
from sympy import Rational

from xopspy.diffop import SecondOrderOp, gauge_conjugate
from xopspy.exact import RatFunc, poly
from xopspy.exception import (
    IdentityViolation,
    NotNaturalError,
    NotReducedError,
    PreconditionError,
)
from xopspy.structure import (
    NaturalForm,
    SubspaceBasis,
    codimension_report,
    echelon_by_degree,
    gauge_to_natural,
    infer_eta,
    invariant_subspace,
    mu_of,
    order_sequence,
    poly_vector,
    reduced_form_check,
    reduced_gap_shape,
    stabilizer_check,
    subspace_basis,
    to_reduced,
    verify_natural,
)
from xopspy.test.test_helpers import (
    poly_from_roots,
    random_poly,
    random_rational,
    random_roots,
)

ALPHA_TRIPLE = Rational(-7, 4)
Z34 = poly([Rational(3, 4), 1])


def test_poly_vector():
    assert poly_vector(poly([1, 2]), 4) == [1, 2, 0, 0]
    with pytest.raises(PreconditionError):
        poly_vector(poly([1, 2, 3]), 2)


def test_echelon_by_degree():
    basis = echelon_by_degree([poly([0, 1, 1]), poly([0, 1]), poly([1, 1])], 3)
    assert basis == [poly([1]), poly([0, 1]), poly([0, 0, 1])]
    assert echelon_by_degree([poly()], 3) == []
    half = poly([Rational(1, 2), 1])
    assert echelon_by_degree([poly([2, 4]), poly([1, 2])], 2) == [half]


def test_natural_form_normalizes_eta():
    nf = NaturalForm(poly([1]), poly([0, -2]), poly([0, 2]))
    assert nf.eta == poly([0, 1])
    with pytest.raises(PreconditionError):
        NaturalForm(poly([1]), poly(), poly())


def test_x1_laguerre_coefficients(x1_laguerre):
    nf = x1_laguerre(2)
    z2 = poly([2, 1])
    assert nf.q == RatFunc(poly([3, -1])) - RatFunc(poly([0, 2]), z2)
    assert nf.r == RatFunc(poly([-2, 1]), z2)


def test_bilinear_expression(laguerre_natural, rng):
    nf = laguerre_natural(Rational(-3, 2))
    T = nf.operator()
    for degree in range(5):
        y = random_poly(rng, degree)
        assert nf.bilinear(y) == (RatFunc(nf.eta) * T.apply(y)).as_poly()


def test_verify_natural(laguerre_natural, hermite_conjugate):
    nf = laguerre_natural(Rational(-3, 2))
    assert verify_natural(nf.operator(), nf.eta) == nf
    with pytest.raises(NotNaturalError):
        verify_natural(hermite_conjugate, poly([1, 0, 1]))
    with pytest.raises(NotNaturalError):
        verify_natural(nf.operator(), poly([1]))
    with pytest.raises(NotNaturalError):
        verify_natural(SecondOrderOp(poly([0, 0, 0, 1])), poly([1]))
    with pytest.raises(PreconditionError):
        verify_natural(nf.operator(), poly())


def test_infer_eta(laguerre_natural, hermite_conjugate):
    nf = laguerre_natural(Rational(-3, 2))
    assert infer_eta(nf.operator()) == (nf.eta, nf.s)
    # The pole of q at the roots of 1 + z^2 mimics a natural eta; r then disagrees
    eta, s = infer_eta(hermite_conjugate)
    assert eta == poly([1, 0, 1])
    with pytest.raises(NotNaturalError):
        verify_natural(hermite_conjugate, eta)
    assert infer_eta(SecondOrderOp(poly([0, 0, 0, 1]))) is None


def test_infer_eta_after_random_gauge(rng):
    for _ in range(20):
        eta = poly_from_roots(random_roots(rng, 2))
        s = poly([random_rational(rng), random_rational(rng)])
        T = NaturalForm(poly([1]), s, eta).operator()
        sigma = random_poly(rng, 2, monic=True)
        found = infer_eta(gauge_conjugate(T, sigma))
        assert found is not None
        assert found[0] == (eta * sigma).monic()


def test_mu_of():
    assert mu_of(poly_from_roots([1, 1, 1, -1])) == poly_from_roots([1, 1, 1])
    assert mu_of(poly_from_roots([2, 3])) == poly([1])


def test_subspace_basis_x1(x1_laguerre):
    nf = x1_laguerre(2)
    basis = subspace_basis(nf, 5)
    assert basis.codim == 1
    assert basis.missing_degrees == [0]
    assert basis.degrees == [1, 2, 3, 4, 5]
    assert basis.contains(poly([3, 1]))
    assert not basis.contains(poly([1]))
    assert not basis.contains(poly([0] * 6 + [1]))
    assert basis.contains(poly())


def test_subspace_basis_laguerre(laguerre_natural):
    nf = laguerre_natural(Rational(-3, 2))
    basis = subspace_basis(nf, 10)
    assert basis.codim == 3
    assert basis.missing_degrees == [0, 1, 3]
    assert invariant_subspace(nf.operator(), 10).degrees == basis.degrees


def test_invariant_subspace_in_non_natural_gauge(hermite_conjugate):
    basis = invariant_subspace(hermite_conjugate, 6)
    assert basis.codim == 2
    assert basis.missing_degrees == [0, 1]
    for y in basis.basis:
        assert y.rem(poly([1, 0, 1])).is_zero


def test_reduced_gap_shape():
    assert reduced_gap_shape(2, 7) == [0, 2, 4, 5, 6, 7]
    assert reduced_gap_shape(0, 3) == [0, 1, 2, 3]


def test_codimension_report_triple_root(laguerre_natural):
    nf = laguerre_natural(ALPHA_TRIPLE)
    assert nf.eta == Z34**3
    report = codimension_report(nf, subspace_basis(nf, 10))
    assert report.codim == 3
    assert report.eta_degree == 3
    (pole,) = report.poles
    assert pole.zeta == Rational(-3, 4)
    assert pole.nu == 3
    assert pole.order_prefix == (1, 3, 5, 6, 7)
    with pytest.raises(PreconditionError):
        codimension_report(nf, subspace_basis(nf, 7))
    # margin met, but the order sequence at -3/4 is not yet conclusive
    with pytest.raises(PreconditionError, match="inconclusive"):
        codimension_report(nf, subspace_basis(nf, 8))


def test_codimension_report_irrational_factor():
    nf = NaturalForm(poly([1]), poly([0, -2]), poly([Rational(1, 2), 0, 1]))
    basis = subspace_basis(nf, 6)
    report = codimension_report(nf, basis)
    (pole,) = report.poles
    assert pole.zeta is None
    assert pole.factor == poly([Rational(1, 2), 0, 1])
    assert pole.nu == 1


def test_reduced_form_triple_root(laguerre_natural):
    nf = laguerre_natural(ALPHA_TRIPLE)
    T = nf.operator()
    sigma, T_red = to_reduced(T, subspace_basis(nf, 10).basis)
    assert sigma == Z34
    w = RatFunc(1, Z34)
    q_red = RatFunc(poly([Rational(5, 4), -1])) - 4 * RatFunc(poly([0, 1])) * w
    assert T_red.q == q_red
    assert T_red.r == 2 - w
    rf = reduced_form_check(T_red)
    assert rf.eta == Z34**2
    assert rf.mu == Z34
    assert rf.c == 0
    assert rf.natural_eta == nf.eta
    assert gauge_to_natural(T_red) == T


def test_reduced_order_sequence(laguerre_natural):
    nf = laguerre_natural(ALPHA_TRIPLE)
    _, T_red = to_reduced(nf.operator(), subspace_basis(nf, 10).basis)
    basis = invariant_subspace(T_red, 10)
    seq = order_sequence(basis, Rational(-3, 4), 7, expect_reduced=True)
    assert seq.orders == (0, 2, 4, 5, 6, 7)
    assert seq.gaps == 2
    assert seq.gap_orders == [1, 3]
    assert seq.conclusive
    with pytest.raises(IdentityViolation):
        natural = subspace_basis(nf, 10)
        order_sequence(natural, Rational(-3, 4), 7, expect_reduced=True)
    with pytest.raises(PreconditionError):
        order_sequence(basis, 0, 11)


def test_not_reduced(log_control):
    with pytest.raises(NotReducedError):
        reduced_form_check(log_control)
    with pytest.raises(PreconditionError):
        to_reduced(log_control, [])


def test_stabilizer(x1_laguerre):
    nf = x1_laguerre(2)
    basis = subspace_basis(nf, 6)
    assert stabilizer_check(poly([4, 4, 1]), nf, basis)
    assert not stabilizer_check(poly([0, 1]), nf, basis)


def test_subspace_basis_counts():
    basis = SubspaceBasis(3, [poly([0, 1]), poly([0, 0, 1])])
    assert basis.dim == 2
    assert basis.codim == 2
    assert basis.missing_degrees == [0, 3]


def test_subspace_basis_triple_root(laguerre_natural):
    nf = laguerre_natural(ALPHA_TRIPLE)
    basis = subspace_basis(nf, 10)
    assert basis.codim == 3
    assert basis.missing_degrees == [0, 1, 3]
    assert invariant_subspace(nf.operator(), 10).degrees == basis.degrees
    # the divisibility test alone only forces y(-3/4) = 0
    assert nf.subspace_residue(Z34).is_zero
    assert not nf.in_subspace(Z34)
    assert not basis.contains(Z34)
    assert not nf.in_subspace(poly([1]))
    for y in basis.basis:
        assert nf.in_subspace(y)


def test_in_subspace_matches_basis(x1_laguerre):
    nf = x1_laguerre(2)
    basis = subspace_basis(nf, 6)
    for y in basis.basis:
        assert nf.in_subspace(y)
    assert nf.in_subspace(poly())
    assert not nf.in_subspace(poly([1]))


def test_to_reduced_needs_stable_gcd(laguerre_natural):
    nf = laguerre_natural(ALPHA_TRIPLE)
    few = subspace_basis(nf, 10).basis[:3]
    with pytest.raises(PreconditionError, match="not stabilized"):
        to_reduced(nf.operator(), few)
