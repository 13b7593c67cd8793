# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
#
# Set up pytest:
# - Seeded random number generator for the property tests
# - Operators and natural forms that are useful across test modules

import logging

import numpy as np
import pytest
from sympy import Poly, Rational

from xopspy.classical import Family, bochner_operator
from xopspy.darboux import corpus_chains
from xopspy.diffop import SecondOrderOp, gauge_conjugate
from xopspy.exact import RatFunc, poly
from xopspy.structure import NaturalForm
from xopspy.test.test_helpers import node_seed

logger = logging.getLogger("xopspy")
logger.setLevel(logging.INFO)


def pytest_addoption(parser):
    parser.addoption(
        "--xopspy-seed",
        type=int,
        default=20240517,
        help="Seed of the random number generator used in property tests",
    )


@pytest.fixture()
def rng(pytestconfig: pytest.Config, request: pytest.FixtureRequest):
    # Different (but reproducible) streams for each parametrized case
    seed = pytestconfig.getoption("xopspy_seed")
    return np.random.default_rng([seed, node_seed(request.node.name)])


@pytest.fixture(scope="session")
def corpus():
    return corpus_chains()


def laguerre_eta(alpha) -> Poly:
    """Monic ``z^3 + (a+4) z^2 - (a+4)(a+1) z - (a+1)(a+2)(a+4)``."""
    a = Rational(alpha)
    return poly([-(a + 1) * (a + 2) * (a + 4), -(a + 4) * (a + 1), a + 4, 1])


@pytest.fixture()
def laguerre_natural():
    """Factory of the natural form of the codimension 3 Laguerre family."""

    def make(alpha) -> NaturalForm:
        a = Rational(alpha)
        s = poly([a + Rational(5, 2), -1])
        return NaturalForm(poly([0, 1]), s, laguerre_eta(a))

    return make


@pytest.fixture()
def x1_laguerre():
    """Factory of the natural form ``p = z, s = a + 1/2 - z, eta = z + a``."""

    def make(alpha) -> NaturalForm:
        a = Rational(alpha)
        return NaturalForm(poly([0, 1]), poly([a + Rational(1, 2), -1]), poly([a, 1]))

    return make


@pytest.fixture()
def hermite_operator():
    return bochner_operator(Family.hermite())


@pytest.fixture()
def hermite_conjugate(hermite_operator):
    """Hermite operator conjugated by ``1 + z^2``: not natural, exceptional {0, 1}."""
    return gauge_conjugate(hermite_operator, poly([1, 0, 1]))


@pytest.fixture()
def degenerate_jacobi():
    return bochner_operator(Family.jacobi(0, -4))


@pytest.fixture()
def log_control():
    """``D^2 - (2/z) D + 1/z``: indicial roots {0, 3} at 0 and a logarithm."""
    return SecondOrderOp(1, RatFunc(-2, poly([0, 1])), RatFunc(1, poly([0, 1])))
