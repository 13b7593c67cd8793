import pytest
from sympy import Rational

from xopspy.classical import Family, bochner_operator, seed
from xopspy.darboux import (
    DarbouxChain,
    DarbouxStep,
    SeedFunction,
    default_gauge,
    factorize,
    find_intertwiner,
    find_intertwiner_shifted,
    partner,
    partner_from,
    run_chain,
    shift_candidates,
    transport,
    verify_intertwining,
)
from xopspy.defaults import MAX_INTERTWINER_ORDER
from xopspy.diffop import DiffOp, SecondOrderOp, compose
from xopspy.exact import RatFunc, poly
from xopspy.exception import (
    ChainStepError,
    DegenerateSeedError,
    InvalidSeedError,
    PreconditionError,
    ZeroInputError,
)
from xopspy.structure import verify_natural

ALPHA = Rational(1, 3)


def shift_step(family):
    return DarbouxStep(seed(family, "I", 0), b=1, transport=False)


def test_factorization_reproduces_operator():
    family = Family.laguerre(ALPHA)
    T = bochner_operator(family)
    s = SeedFunction.from_seed(seed(family, "I", 2))
    fac = factorize(T, s, default_gauge(s, T))
    assert fac.eigenvalue == -2
    assert compose(fac.B, fac.A) + fac.eigenvalue == T.to_diffop()
    That = partner_from(T, fac)
    assert That == SecondOrderOp.from_diffop(compose(fac.A, fac.B) + fac.eigenvalue)
    assert verify_intertwining(That, fac.A.to_diffop(), T)


def test_factorize_rejects_foreign_seed():
    T = bochner_operator(Family.laguerre(ALPHA))
    foreign = seed(Family.laguerre(ALPHA + 1), "I", 1)
    with pytest.raises(InvalidSeedError):
        factorize(T, foreign, 1)
    with pytest.raises(ZeroInputError):
        factorize(T, seed(Family.laguerre(ALPHA), "I", 0), 0)


def test_laguerre_parameter_shift():
    family = Family.laguerre(ALPHA)
    T = bochner_operator(family)
    shifted = bochner_operator(Family.laguerre(ALPHA + 1))
    That = partner(T, shift_step(family))
    assert That == shifted - 1
    assert find_intertwiner(That, T) == DiffOp.D()
    # both D (gamma = 1) and D - 1 (gamma = 0) intertwine at order one
    gamma, L = find_intertwiner_shifted(shifted, T, [0, 1, -1])
    assert L.order == 1
    assert verify_intertwining(shifted, L, T + gamma)
    assert find_intertwiner_shifted(shifted, T, [1]) == (1, DiffOp.D())


def test_jacobi_parameter_shift():
    a, b = Rational(1, 2), Rational(-1, 4)
    family = Family.jacobi(a, b)
    That = partner(bochner_operator(family), shift_step(family))
    assert That == bochner_operator(Family.jacobi(a + 1, b + 1)) - (2 + a + b)


def test_find_intertwiner_without_solution(hermite_operator):
    shifted = bochner_operator(Family.laguerre(ALPHA))
    assert find_intertwiner(hermite_operator, shifted, max_order=1) is None
    assert find_intertwiner_shifted(hermite_operator, shifted, [0], 1) is None
    with pytest.raises(PreconditionError):
        find_intertwiner(shifted, shifted, MAX_INTERTWINER_ORDER + 1)


def test_identity_intertwines_operator_with_itself(hermite_operator):
    assert find_intertwiner(hermite_operator, hermite_operator) == DiffOp.identity()


def test_shift_candidates():
    assert shift_candidates([1, 2]) == [-3, -2, -1, 0, 1, 2, 3]
    assert shift_candidates([]) == [0]


def test_default_gauge_clears_denominator(hermite_operator):
    s = seed(Family.hermite(), "pseudo", 2)
    assert default_gauge(s, hermite_operator) == RatFunc(poly([Rational(1, 2), 0, 1]))


def test_transport_degenerate():
    s = SeedFunction.from_seed(seed(Family.hermite(), "polynomial", 1))
    T = bochner_operator(Family.hermite())
    fac = factorize(T, s, default_gauge(s, T))
    with pytest.raises(DegenerateSeedError):
        transport(s, fac.A)
    other = SeedFunction.from_seed(seed(Family.hermite(), "polynomial", 2))
    moved = transport(other, fac.A)
    assert moved.transported_by == 1
    assert "transported 1x" in moved.name
    That = partner_from(T, fac)
    assert That.ricatti_residual(moved.w) == RatFunc(moved.eigenvalue)


def test_darbouxstep_zero_gauge():
    with pytest.raises(ZeroInputError):
        DarbouxStep(seed(Family.hermite(), "polynomial", 1), b=0)


def test_one_step_weight_multiplier():
    family = Family.laguerre(ALPHA)
    result = run_chain(DarbouxChain(family, [shift_step(family)]))
    assert result.weight_multiplier() == RatFunc(poly([0, 1]))
    assert result.eigenvalues == [0]
    assert result.intertwiner == DiffOp.D()
    assert result.final + 1 == bochner_operator(Family.laguerre(ALPHA + 1))


def test_laguerre_i1_iii2(corpus):
    result = run_chain(corpus["laguerre-i1-iii2"])
    assert len(result.operators) == 3
    assert result.eigenvalues == [-1, Rational(3, 2)]
    assert result.intertwiner.order == 2
    assert verify_intertwining(result.final, result.intertwiner, result.base)


@pytest.mark.parametrize(
    "name",
    [
        "hermite-krein-adler-1-2",
        "hermite-pseudo-2",
        "laguerre-double-shift",
        "laguerre-i1-iii2",
        "laguerre-x1",
        "laguerre-triple-shift",
        "jacobi-shift",
        "jacobi-ii-1",
    ],
)
def test_corpus_chains_intertwine(corpus, name):
    chain = corpus[name]
    result = run_chain(chain)
    assert result.intertwiner.order == len(chain.steps)
    assert verify_intertwining(result.final, result.intertwiner, result.base)
    assert len(result.weight_updates) == len(chain.steps)


def test_dependent_seeds():
    h1 = seed(Family.hermite(), "polynomial", 1)
    chain = DarbouxChain(Family.hermite(), [DarbouxStep(h1), DarbouxStep(h1)])
    with pytest.raises(DegenerateSeedError) as excinfo:
        run_chain(chain)
    assert excinfo.value.pair == (0, 1)


def test_untransported_foreign_seed():
    family = Family.laguerre(ALPHA)
    foreign = seed(Family.laguerre(ALPHA + Rational(1, 2)), "I", 1)
    chain = DarbouxChain(family, [DarbouxStep(foreign, transport=False)])
    with pytest.raises(ChainStepError) as excinfo:
        run_chain(chain)
    assert excinfo.value.step == 0


def test_natural_after_shift():
    family = Family.laguerre(ALPHA)
    result = run_chain(DarbouxChain(family, [shift_step(family)]))
    nf = verify_natural(result.final + 1, poly([1]))
    assert nf.eta == poly([1])
