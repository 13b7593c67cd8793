# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""JSON forms of the xopspy data types.

Exact values are written as strings: a rational is ``"num/den"`` (``"num"`` when the
denominator is one), a polynomial is the list of its ascending coefficients and a
rational function is ``{"num": [...], "den": [...]}``. Numeric values are decimal
strings. Documents carry a ``format_version``; readers accept the same major version.
"""

import json
import logging
from typing import Any, Dict, Optional, Union

import mpmath
from packaging.version import Version
from sympy import Poly, Rational

from xopspy.classical import Family, FamilyKind, Seed, seed
from xopspy.darboux import DarbouxChain, DarbouxStep
from xopspy.diffop import DiffOp, SecondOrderOp
from xopspy.exact import RatFunc, coeffs, poly, rat
from xopspy.exception import FormatVersionError, PreconditionError
from xopspy.spectral import ExceptionalSystem, MonodromyReport
from xopspy.structure import GapData

logger = logging.getLogger(__name__)

FORMAT_VERSION = "1.0"
"""Version of the JSON documents written by xopspy."""

NUMERIC_DIGITS = 20
"""Significant digits of decimal strings in reports."""


# Scalars and polynomials
def rat_to_json(x) -> str:
    return str(Rational(x))


def rat_from_json(value) -> Rational:
    if isinstance(value, bool) or not isinstance(value, (str, int)):
        raise PreconditionError(f"Expected a rational string, got {value!r}")
    return rat(value)


def decimal(x, digits: int = NUMERIC_DIGITS) -> Optional[str]:
    """Decimal string of an exact or mpmath number (None stays None)."""
    if x is None:
        return None
    if isinstance(x, Rational) or isinstance(x, int):
        return rat_to_json(x)
    if isinstance(x, mpmath.mpc) and x.imag != 0:
        sign = "+" if x.imag >= 0 else "-"
        return f"{mpmath.nstr(x.real, digits)}{sign}{mpmath.nstr(abs(x.imag), digits)}i"
    if isinstance(x, mpmath.mpc):
        x = x.real
    return mpmath.nstr(x, digits)


def poly_to_json(p: Poly) -> list:
    return [rat_to_json(c) for c in coeffs(p)]


def poly_from_json(value) -> Poly:
    if not isinstance(value, list):
        raise PreconditionError(f"Expected a coefficient list, got {value!r}")
    return poly(rat_from_json(c) for c in value)


def ratfunc_to_json(f) -> dict:
    f = RatFunc.coerce(f)
    return {"num": poly_to_json(f.num), "den": poly_to_json(f.den)}


def ratfunc_from_json(value) -> RatFunc:
    """Accepts ``{"num", "den"}``, a coefficient list or a single rational string."""
    if isinstance(value, dict):
        if set(value) - {"num", "den"}:
            raise PreconditionError(f"Unknown keys in rational function {value!r}")
        num = poly_from_json(value.get("num", []))
        return RatFunc(num, poly_from_json(value.get("den", ["1"])))
    if isinstance(value, list):
        return RatFunc(poly_from_json(value))
    return RatFunc(rat_from_json(value))


# Operators
def diffop_to_json(op: DiffOp) -> dict:
    return {"coeffs": [ratfunc_to_json(c) for c in op.coeffs]}


def diffop_from_json(value: dict) -> DiffOp:
    return DiffOp(ratfunc_from_json(c) for c in _require(value, "coeffs"))


def operator_to_json(T: SecondOrderOp) -> dict:
    return {
        "p": ratfunc_to_json(T.p),
        "q": ratfunc_to_json(T.q),
        "r": ratfunc_to_json(T.r),
    }


def operator_from_json(value: dict) -> SecondOrderOp:
    return SecondOrderOp(
        ratfunc_from_json(_require(value, "p")),
        ratfunc_from_json(value.get("q", "0")),
        ratfunc_from_json(value.get("r", "0")),
    )


# Families, seeds and chains
def family_to_json(family: Family) -> dict:
    result = {"family": family.kind.value}
    for name in family.kind.parameters:
        result[name] = rat_to_json(getattr(family, name))
    return result


def family_from_json(value: dict) -> Family:
    kind = FamilyKind.parse(_require(value, "family"))
    params = {
        name: rat_from_json(_require(value, name)) for name in kind.parameters
    }
    return Family(kind, **params)


def seed_to_json(s: Seed) -> dict:
    return {"family": family_to_json(s.family), "kind": s.kind.value, "n": s.index}


def seed_from_json(value: dict, default_family: Optional[Family] = None) -> Seed:
    """A catalog seed; ``family`` defaults to the chain base."""
    if "family" in value:
        family = family_from_json(value["family"])
    elif default_family is not None:
        family = default_family
    else:
        raise PreconditionError("Seed without family")
    index = _require(value, "n")
    if isinstance(index, bool) or not isinstance(index, int) or index < 0:
        raise PreconditionError(f"Seed index must be a non-negative integer: {index!r}")
    return seed(family, _require(value, "kind"), index)


def chain_to_json(chain: DarbouxChain) -> dict:
    steps = []
    for step in chain.steps:
        entry = {
            "seed": seed_to_json(step.seed),
            "b": "auto" if step.b is None else ratfunc_to_json(step.b),
        }
        if not step.transport:
            entry["transport"] = False
        steps.append(entry)
    return {"base": family_to_json(chain.base), "steps": steps}


def chain_from_json(value: dict) -> DarbouxChain:
    base = family_from_json(_require(value, "base"))
    steps = []
    for entry in value.get("steps", []):
        b = entry.get("b", "auto")
        steps.append(
            DarbouxStep(
                seed_from_json(_require(entry, "seed"), base),
                None if b == "auto" else ratfunc_from_json(b),
                bool(entry.get("transport", True)),
            )
        )
    return DarbouxChain(base, steps)


# Reports
def system_to_json(system: ExceptionalSystem) -> dict:
    result = {
        "operator": operator_to_json(system.T),
        "eta": None if system.nf is None else poly_to_json(system.nf.eta),
        "s": None if system.nf is None else poly_to_json(system.nf.s),
        "N": system.N,
        "exceptional_degrees": list(system.exceptional_degrees),
        "eigenvalues": {
            str(k): rat_to_json(pair.eigenvalue)
            for k, pair in sorted(system.eigenpairs.items())
        },
        "eigenpolys": {
            str(k): poly_to_json(pair.y)
            for k, pair in sorted(system.eigenpairs.items())
        },
    }
    if not system.gauge.is_constant or system.shift != 0:
        result["gauge"] = ratfunc_to_json(system.gauge)
        result["shift"] = rat_to_json(system.shift)
    return result


def system_from_json(value: dict) -> Dict[str, Any]:
    """Operator, eta, degree bound and stored eigenpolynomials of a system document.

    The system itself is recomputed by the caller.
    """
    eta = value.get("eta")
    return {
        "operator": operator_from_json(_require(value, "operator")),
        "eta": None if eta is None else poly_from_json(eta),
        "N": int(value.get("N", 0)),
        "exceptional_degrees": [int(k) for k in value.get("exceptional_degrees", [])],
        "eigenpolys": {
            int(k): poly_from_json(v) for k, v in value.get("eigenpolys", {}).items()
        },
    }


def gap_data_to_json(gaps: GapData) -> dict:
    poles = []
    for pole in gaps.poles:
        zeta = (
            rat_to_json(pole.zeta)
            if pole.zeta is not None
            else {"factor": poly_to_json(pole.factor)}
        )
        entry = {"zeta": zeta, "nu": pole.nu}
        if pole.order_prefix is not None:
            entry["order_prefix"] = list(pole.order_prefix)
        poles.append(entry)
    return {"codim": gaps.codim, "eta_degree": gaps.eta_degree, "poles": poles}


def monodromy_report_to_json(report: MonodromyReport) -> dict:
    entries = []
    for entry in report.entries:
        entries.append(
            {
                "zeta": decimal(entry.zeta),
                "factor": poly_to_json(entry.factor),
                "method": entry.method,
                "eigenvalue": rat_to_json(entry.eigenvalue),
                "verdict": entry.verdict,
                "obstruction": decimal(entry.obstruction),
                "reason": entry.reason,
            }
        )
    return {
        "eta": poly_to_json(report.eta),
        "precision_bits": report.precision_bits,
        "verdict": report.verdict,
        "entries": entries,
    }


def gram_report_to_json(report) -> dict:
    size = len(report.degrees)
    entries = [
        [str(report.degrees[i]), str(report.degrees[j]), decimal(report.matrix[i, j])]
        for i in range(size)
        for j in range(size)
    ]
    return {
        "degrees": list(report.degrees),
        "precision_bits": report.precision_bits,
        "max_offdiag": mpmath.nstr(report.max_offdiag, 5),
        "entries": entries,
    }


# Documents
def _require(value: dict, key: str):
    if not isinstance(value, dict):
        raise PreconditionError(f"Expected an object with key {key!r}, got {value!r}")
    if key not in value:
        raise PreconditionError(f"Missing key {key!r}")
    return value[key]


def check_format_version(document: dict) -> None:
    """Accept documents of the current major format version (or without version).

    Raises:
        FormatVersionError: for another major version.
    """
    found = document.get("format_version")
    if found is None:
        return
    if Version(str(found)).major != Version(FORMAT_VERSION).major:
        raise FormatVersionError(str(found), str(Version(FORMAT_VERSION).major))


def dumps(kind: str, payload: dict, metadata: Optional[dict] = None) -> str:
    """Deterministic JSON document with a trailing newline."""
    document = {"format_version": FORMAT_VERSION, "kind": kind}
    document.update(payload)
    if metadata:
        document["metadata"] = metadata
    return json.dumps(document, indent=2, ensure_ascii=False) + "\n"


def loads(text: Union[str, bytes]) -> dict:
    """Parse a document and check its format version.

    Raises:
        PreconditionError: for malformed JSON or a non-object document.
        FormatVersionError: for an unsupported major version.
    """
    try:
        document = json.loads(text)
    except json.JSONDecodeError as exc:
        raise PreconditionError(f"Malformed JSON: {exc}") from None
    if not isinstance(document, dict):
        raise PreconditionError("A document must be a JSON object")
    check_format_version(document)
    return document
