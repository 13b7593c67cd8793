import json

import mpmath
import pytest
from sympy import Rational

from xopspy.classical import Family, seed
from xopspy.darboux import DarbouxChain, DarbouxStep
from xopspy.diffop import DiffOp
from xopspy.exact import RatFunc, poly
from xopspy.exception import FormatVersionError, PreconditionError
from xopspy.serialize import (
    FORMAT_VERSION,
    chain_from_json,
    chain_to_json,
    decimal,
    diffop_from_json,
    diffop_to_json,
    dumps,
    family_from_json,
    family_to_json,
    gap_data_to_json,
    loads,
    operator_from_json,
    operator_to_json,
    poly_to_json,
    rat_from_json,
    ratfunc_from_json,
    ratfunc_to_json,
    seed_from_json,
    system_from_json,
    system_to_json,
)
from xopspy.spectral import eigenpolys, naturalize
from xopspy.structure import NaturalForm, codimension_report, subspace_basis


def test_rationals():
    assert rat_from_json("-3/4") == Rational(-3, 4)
    assert rat_from_json(5) == 5
    for bad in (True, 0.5, None, ["1"]):
        with pytest.raises(PreconditionError):
            rat_from_json(bad)


def test_decimal():
    assert decimal(None) is None
    assert decimal(Rational(1, 2)) == "1/2"
    assert decimal(mpmath.mpf("0.25")) == "0.25"
    assert decimal(mpmath.mpc(1, -2)) == "1.0-2.0i"
    assert decimal(mpmath.mpc(3, 0)) == "3.0"


def test_polynomials_and_rational_functions():
    assert poly_to_json(poly([Rational(1, 2), 0, -3])) == ["1/2", "0", "-3"]
    f = RatFunc(poly([1, 1]), poly([0, 2]))
    assert ratfunc_to_json(f) == {"num": ["1/2", "1/2"], "den": ["0", "1"]}
    assert ratfunc_from_json(ratfunc_to_json(f)) == f
    assert ratfunc_from_json(["0", "1"]) == RatFunc(poly([0, 1]))
    assert ratfunc_from_json("3/2") == RatFunc(Rational(3, 2))
    assert ratfunc_from_json({"num": ["2"]}) == RatFunc(2)
    with pytest.raises(PreconditionError):
        ratfunc_from_json({"num": ["1"], "denominator": ["1"]})
    with pytest.raises(PreconditionError):
        ratfunc_from_json({"num": "1"})


def test_operators(hermite_conjugate):
    document = operator_to_json(hermite_conjugate)
    assert set(document) == {"p", "q", "r"}
    assert operator_from_json(document) == hermite_conjugate
    assert operator_from_json({"p": ["1"]}).q.is_zero
    with pytest.raises(PreconditionError, match="Missing key 'p'"):
        operator_from_json({"q": "1"})
    L = DiffOp([poly([0, 1]), RatFunc(1, poly([1, 1])), 2])
    assert diffop_from_json(diffop_to_json(L)) == L


def test_families():
    jacobi = Family.jacobi(Rational(1, 2), -3)
    document = family_to_json(jacobi)
    assert document == {"family": "jacobi", "alpha": "1/2", "beta": "-3"}
    assert family_from_json(document) == jacobi
    assert family_to_json(Family.hermite()) == {"family": "hermite"}
    with pytest.raises(PreconditionError):
        family_from_json({"family": "laguerre"})


def test_seeds():
    family = Family.laguerre(Rational(-3, 2))
    value = {"kind": "III", "n": 2}
    assert seed_from_json(value, family) == seed(family, "III", 2)
    with pytest.raises(PreconditionError, match="Seed without family"):
        seed_from_json(value)
    for index in (-1, "2", True):
        with pytest.raises(PreconditionError):
            seed_from_json({"kind": "I", "n": index}, family)


def test_chain_documents():
    hermite = Family.hermite()
    chain = DarbouxChain(
        hermite,
        [
            DarbouxStep(seed(hermite, "polynomial", 1)),
            DarbouxStep(seed(hermite, "pseudo", 0), b=poly([0, 1]), transport=False),
        ],
    )
    document = chain_to_json(chain)
    first, second = document["steps"]
    assert first["b"] == "auto"
    assert "transport" not in first
    assert second["transport"] is False
    assert second["b"] == {"num": ["0", "1"], "den": ["1"]}
    assert chain_from_json(document) == chain


def test_chain_seed_family_defaults_to_base():
    document = {
        "base": {"family": "laguerre", "alpha": "1"},
        "steps": [{"seed": {"kind": "III", "n": 1}}],
    }
    chain = chain_from_json(document)
    (step,) = chain.steps
    assert step.seed == seed(Family.laguerre(1), "III", 1)
    assert step.b is None
    assert step.transport


@pytest.mark.parametrize(
    "name",
    [
        "hermite-krein-adler-1-2",
        "laguerre-double-shift",
        "laguerre-i1-iii2",
        "jacobi-shift",
    ],
)
def test_corpus_chain_documents(corpus, name):
    chain = corpus[name]
    document = json.loads(dumps("chain", chain_to_json(chain)))
    assert chain_from_json(document) == chain


def test_system_documents(x1_laguerre):
    nf = x1_laguerre(2)
    system = eigenpolys(nf.operator(), nf.eta, 3)
    document = system_to_json(system)
    assert document["eta"] == ["2", "1"]
    assert document["exceptional_degrees"] == [0]
    assert document["eigenvalues"]["1"] == "0"
    assert "gauge" not in document
    data = system_from_json(document)
    assert data["operator"] == nf.operator()
    assert data["eta"] == nf.eta
    assert data["N"] == 3
    assert sorted(data["eigenpolys"]) == [1, 2, 3]
    assert data["eigenpolys"][1] == poly([3, 1])


def test_naturalized_system_keeps_gauge(hermite_conjugate):
    document = system_to_json(naturalize(hermite_conjugate, 4))
    assert document["gauge"] == {"num": ["1"], "den": ["1", "0", "1"]}
    assert document["shift"] == "0"


def test_gap_data_documents(laguerre_natural):
    nf = laguerre_natural(Rational(-7, 4))
    gaps = codimension_report(nf, subspace_basis(nf, 10))
    assert gap_data_to_json(gaps) == {
        "codim": 3,
        "eta_degree": 3,
        "poles": [{"zeta": "-3/4", "nu": 3, "order_prefix": [1, 3, 5, 6, 7]}],
    }
    irrational = NaturalForm(poly([1]), poly([0, -2]), poly([Rational(1, 2), 0, 1]))
    document = gap_data_to_json(
        codimension_report(irrational, subspace_basis(irrational, 6))
    )
    (pole,) = document["poles"]
    assert pole["zeta"] == {"factor": ["1/2", "0", "1"]}
    assert pole["nu"] == 1


def test_dumps_and_loads():
    text = dumps("chain", {"steps": []}, metadata={"input": "abc"})
    assert text.endswith("}\n")
    document = loads(text)
    assert document["format_version"] == FORMAT_VERSION
    assert document["kind"] == "chain"
    assert document["metadata"] == {"input": "abc"}
    assert "metadata" not in loads(dumps("chain", {}))
    assert loads(b'{"format_version": "1.7"}')["format_version"] == "1.7"
    assert loads("{}") == {}


@pytest.mark.parametrize("text", ["{", "[1, 2]", '"chain"'])
def test_loads_rejects_malformed(text):
    with pytest.raises(PreconditionError):
        loads(text)


def test_loads_rejects_other_major_version():
    with pytest.raises(FormatVersionError, match="reads format 1.x"):
        loads('{"format_version": "2.0"}')
