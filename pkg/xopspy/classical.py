# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""The classical Hermite, Laguerre and Jacobi families.

Each family provides its Bochner operator, its polynomials (by exact recurrence) and a
catalog of quasi-rational seed functions. A seed ``phi = prefactor * poly_part`` is
only ever represented through its rational logarithmic derivative ``w = phi'/phi``.
"""

import logging
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache
from typing import Optional, Tuple

import mpmath
import sympy
from sympy import Poly, Rational, factorial, ff

from xopspy.diffop import SecondOrderOp
from xopspy.exact import (
    ONE,
    POSITIVE_HALF_LINE,
    REAL_LINE,
    UNIT_INTERVAL,
    Interval,
    RatFunc,
    RatLike,
    Z,
    const,
    poly,
    rat,
    z,
)
from xopspy.exception import (
    IdentityViolation,
    InvalidSeedError,
    PreconditionError,
    UnknownFamilyError,
)

logger = logging.getLogger(__name__)


class FamilyKind(Enum):
    """The three classical families of orthogonal polynomials."""

    HERMITE = "hermite"
    """Hermite polynomials, weight ``exp(-z^2)`` on the real line."""

    LAGUERRE = "laguerre"
    """Laguerre polynomials with parameter alpha, weight ``z^alpha exp(-z)`` on
    ``(0, oo)``."""

    JACOBI = "jacobi"
    """Jacobi polynomials with parameters alpha, beta, weight
    ``(1-z)^alpha (1+z)^beta`` on ``(-1, 1)``."""

    def __init__(self, value) -> None:
        self.parameters = {
            "hermite": (),
            "laguerre": ("alpha",),
            "jacobi": ("alpha", "beta"),
        }[value]
        """Names of the rational parameters of the family."""

    @staticmethod
    @lru_cache(maxsize=None)
    def parse(name: str) -> "FamilyKind":
        """Parse a family name (case insensitive)."""
        try:
            return FamilyKind(name.lower())
        except ValueError:
            raise UnknownFamilyError(name, [k.value for k in FamilyKind]) from None


class SeedKind(Enum):
    """Catalog of quasi-rational seed functions.

    Hermite seeds are ``POLYNOMIAL`` or ``PSEUDO``; Laguerre and Jacobi seeds are of
    kind ``I`` to ``IV``.
    """

    POLYNOMIAL = "polynomial"
    """Hermite ``H_n``."""

    PSEUDO = "pseudo"
    """Hermite ``exp(z^2) H~_n`` with ``H~_n(z) = i^-n H_n(iz)``."""

    I = "I"  # noqa: E741
    """Laguerre ``L_n^(a)(z)``; Jacobi ``P_n^(a,b)(z)``."""

    II = "II"
    """Laguerre ``z^-a L_n^(-a)(z)``; Jacobi ``(1-z)^-a P_n^(-a,b)(z)``."""

    III = "III"
    """Laguerre ``exp(z) L_n^(a)(-z)``; Jacobi ``(1+z)^-b P_n^(a,-b)(z)``."""

    IV = "IV"
    """Laguerre ``z^-a exp(z) L_n^(-a)(-z)``; Jacobi
    ``(1-z)^-a (1+z)^-b P_n^(-a,-b)(z)``."""

    def __init__(self, value) -> None:
        self.families = (
            (FamilyKind.HERMITE,)
            if value in ("polynomial", "pseudo")
            else (FamilyKind.LAGUERRE, FamilyKind.JACOBI)
        )
        """Families for which this seed kind is defined."""

    @staticmethod
    @lru_cache(maxsize=None)
    def parse(name: str) -> "SeedKind":
        for kind in SeedKind:
            if name in (kind.value, kind.name) or name.lower() == kind.value:
                return kind
        raise UnknownFamilyError(name, [k.value for k in SeedKind], what="seed kind")


@dataclass(frozen=True)
class Family:
    """A classical family instantiated at rational parameter values."""

    kind: FamilyKind
    alpha: Optional[Rational] = None
    beta: Optional[Rational] = None

    def __post_init__(self):
        for name in ("alpha", "beta"):
            value = getattr(self, name)
            if name in self.kind.parameters:
                if value is None:
                    raise PreconditionError(f"{self.kind.value} family needs {name}")
                object.__setattr__(self, name, rat(value))
            elif value is not None:
                raise PreconditionError(f"{self.kind.value} family takes no {name}")

    @classmethod
    def hermite(cls) -> "Family":
        return cls(FamilyKind.HERMITE)

    @classmethod
    def laguerre(cls, alpha: RatLike) -> "Family":
        return cls(FamilyKind.LAGUERRE, alpha)

    @classmethod
    def jacobi(cls, alpha: RatLike, beta: RatLike) -> "Family":
        return cls(FamilyKind.JACOBI, alpha, beta)

    @classmethod
    def parse(cls, name: str, alpha=None, beta=None) -> "Family":
        return cls(FamilyKind.parse(name), alpha, beta)

    def with_parameters(self, alpha=None, beta=None) -> "Family":
        """Same family with different parameter values."""
        return Family(self.kind, alpha, beta)

    def __str__(self):
        params = ", ".join(f"{p}={getattr(self, p)}" for p in self.kind.parameters)
        return f"{self.kind.value}({params})" if params else self.kind.value


def bochner_operator(family: Family) -> SecondOrderOp:
    """The classical operator of ``family``, with vanishing zero order term."""
    if family.kind is FamilyKind.HERMITE:
        return SecondOrderOp(1, poly([0, -2]))
    if family.kind is FamilyKind.LAGUERRE:
        return SecondOrderOp(Z, poly([1 + family.alpha, -1]))
    a, b = family.alpha, family.beta
    return SecondOrderOp(poly([1, 0, -1]), poly([b - a, -(a + b + 2)]))


def _binomial(x: Rational, k: int) -> Rational:
    """Generalized binomial coefficient ``x (x-1) ... (x-k+1) / k!``."""
    return Rational(ff(x, k)) / factorial(k)


def _jacobi_sum(alpha: Rational, beta: Rational, degree: int) -> Poly:
    minus = poly([Rational(-1, 2), Rational(1, 2)])
    plus = poly([Rational(1, 2), Rational(1, 2)])
    result = poly()
    for s in range(degree + 1):
        c = _binomial(degree + alpha, degree - s) * _binomial(degree + beta, s)
        if c != 0:
            result = result + (minus**s * plus ** (degree - s)).mul_ground(Rational(c))
    return result


def _jacobi(alpha: Rational, beta: Rational, degree: int) -> Poly:
    """Three-term recurrence; the explicit sum where a recurrence divisor vanishes."""
    ab = alpha + beta
    previous, current = ONE, poly([(alpha - beta) / 2, (ab + 2) / 2])
    if degree == 0:
        return previous
    for k in range(2, degree + 1):
        divisor = 2 * k * (k + ab) * (2 * k + ab - 2)
        if divisor == 0:
            logger.debug("Jacobi recurrence divides by zero at index %d", k)
            return _jacobi_sum(alpha, beta, degree)
        c = 2 * k + ab
        nxt = poly([alpha**2 - beta**2, c * (c - 2)]).mul_ground(c - 1) * current
        nxt = nxt - previous.mul_ground(2 * (k + alpha - 1) * (k + beta - 1) * c)
        previous, current = current, nxt.quo_ground(divisor)
    return current


@lru_cache(maxsize=1024)
def classical_poly(family: Family, degree: int) -> Poly:
    """The classical polynomial of ``family`` with index ``degree``.

    All three families use their three-term recurrences. For Jacobi parameters where
    a recurrence divisor vanishes the explicit binomial sum is used instead. At
    degenerate parameters the result may have degree below ``degree``; see
    :func:`classical_poly_degenerate`.
    """
    if degree < 0:
        raise PreconditionError(f"Negative polynomial index {degree}")
    if family.kind is FamilyKind.JACOBI:
        result = _jacobi(family.alpha, family.beta, degree)
    elif family.kind is FamilyKind.HERMITE:
        previous, current = ONE, poly([0, 2])
        if degree == 0:
            return previous
        for k in range(1, degree):
            nxt = Z * current.mul_ground(2) - previous.mul_ground(2 * k)
            previous, current = current, nxt
        result = current
    else:
        alpha = family.alpha
        previous, current = ONE, poly([1 + alpha, -1])
        if degree == 0:
            return previous
        for k in range(1, degree):
            nxt = poly([2 * k + 1 + alpha, -1]) * current
            nxt = nxt - previous.mul_ground(k + alpha)
            previous, current = current, nxt.quo_ground(k + 1)
        result = current
    if result.is_zero or result.degree() < degree:
        logger.warning(
            "Classical polynomial of index %d of %s is degenerate (degree %s)",
            degree,
            family,
            result.degree(),
        )
    return result


def classical_poly_degenerate(family: Family, degree: int) -> bool:
    """True when the classical polynomial of index ``degree`` has lower degree."""
    p = classical_poly(family, degree)
    return p.is_zero or p.degree() < degree


def rodrigues_poly(family: Family, degree: int) -> Poly:
    """Classical polynomial from its Rodrigues formula by repeated differentiation.

    Slow; meant as an independent reference for small ``degree``.
    """
    k = degree
    if family.kind is FamilyKind.HERMITE:
        expr = (-1) ** k * sympy.exp(z**2) * sympy.diff(sympy.exp(-(z**2)), z, k)
    elif family.kind is FamilyKind.LAGUERRE:
        a = family.alpha
        inner = sympy.exp(-z) * z ** (k + a)
        expr = z ** (-a) * sympy.exp(z) * sympy.diff(inner, z, k) / factorial(k)
    else:
        a, b = family.alpha, family.beta
        inner = (1 - z) ** (a + k) * (1 + z) ** (b + k)
        prefactor = (-1) ** k / (2**k * factorial(k))
        prefactor = prefactor * (1 - z) ** (-a) * (1 + z) ** (-b)
        expr = prefactor * sympy.diff(inner, z, k)
    expr = sympy.cancel(sympy.powsimp(sympy.expand(expr), force=True))
    return Poly(expr, z, domain=sympy.QQ)


def szego_ratio(m: int, degree: int) -> Rational:
    """The constant ``c`` with ``L_n^(-m)(z) = c z^m L_(n-m)^(m)(z)`` for ``n >= m``.

    Raises:
        IdentityViolation: if the two sides are not proportional.
    """
    if not 0 <= m <= degree:
        raise PreconditionError(f"Need 0 <= m <= n, got m = {m}, n = {degree}")
    left = classical_poly(Family.laguerre(-m), degree)
    right = Z**m * classical_poly(Family.laguerre(m), degree - m)
    c = Rational(left.LC()) / Rational(right.LC())
    if left != right.mul_ground(c):
        raise IdentityViolation("L_n^(-m) proportional to z^m L_(n-m)^(m)")
    return c


@dataclass(frozen=True)
class Seed:
    """A quasi-rational eigenfunction ``phi`` of a classical operator.

    Attributes:
        family: Family whose operator the seed belongs to.
        kind: Catalog kind.
        index: Index of the underlying classical polynomial.
        w: Logarithmic derivative ``phi'/phi``.
        eigenvalue: ``T[phi] = eigenvalue * phi``, derived from the Ricatti residual.
        poly_part: Polynomial factor of ``phi``.
        log_prefactor: Logarithmic derivative of the non-polynomial factor.
    """

    family: Family
    kind: SeedKind
    index: int
    w: RatFunc
    eigenvalue: Rational
    poly_part: Poly
    log_prefactor: RatFunc

    @property
    def name(self) -> str:
        return f"{self.family}/{self.kind.value}/{self.index}"


def _seed_data(family: Family, kind: SeedKind, index: int) -> Tuple[Poly, RatFunc]:
    if family.kind not in kind.families:
        raise PreconditionError(
            f"Seed kind {kind.value} is not defined for the {family.kind.value} family"
        )
    if family.kind is FamilyKind.HERMITE:
        if kind is SeedKind.POLYNOMIAL:
            return classical_poly(family, index), RatFunc()
        # i^-n H_n(iz) has the recurrence H~_{k+1} = 2z H~_k + 2k H~_{k-1}
        previous, current = ONE, poly([0, 2])
        for k in range(1, index):
            nxt = Z * current.mul_ground(2) + previous.mul_ground(2 * k)
            previous, current = current, nxt
        return (ONE if index == 0 else current), RatFunc(Z.mul_ground(2))

    flip_a = kind in (SeedKind.II, SeedKind.IV)
    if family.kind is FamilyKind.LAGUERRE:
        a = family.alpha
        reflect = kind in (SeedKind.III, SeedKind.IV)
        base = classical_poly(Family.laguerre(-a if flip_a else a), index)
        if reflect:
            base = base.compose(-Z)
        g = RatFunc(1 if reflect else 0)
        if flip_a:
            g = g - RatFunc(const(a), Z)
        return base, g

    a, b = family.alpha, family.beta
    flip_b = kind in (SeedKind.III, SeedKind.IV)
    parameters = (-a if flip_a else a, -b if flip_b else b)
    base = classical_poly(Family.jacobi(*parameters), index)
    g = RatFunc()
    if flip_a:
        g = g + RatFunc(const(a), poly([1, -1]))
    if flip_b:
        g = g - RatFunc(const(b), poly([1, 1]))
    return base, g


def seed(family: Family, kind, index: int) -> Seed:
    """Build a catalog seed and derive its eigenvalue from the Ricatti residual.

    Args:
        family: Classical family.
        kind: :class:`SeedKind` or its name (``"III"``, ``"pseudo"``, ...).
        index: Index of the classical polynomial in the seed.

    Raises:
        InvalidSeedError: if the Ricatti residual is not constant.
    """
    if not isinstance(kind, SeedKind):
        kind = SeedKind.parse(kind)
    poly_part, g = _seed_data(family, kind, index)
    if poly_part.is_zero:
        raise InvalidSeedError(f"{family}/{kind.value}/{index}", 0, ": zero polynomial")
    w = RatFunc(poly_part.diff(), poly_part) + g
    residual = bochner_operator(family).ricatti_residual(w)
    if not residual.is_constant:
        raise InvalidSeedError(f"{family}/{kind.value}/{index}", residual)
    result = Seed(family, kind, index, w, residual.as_constant(), poly_part, g)
    logger.debug("Seed %s has eigenvalue %s", result.name, result.eigenvalue)
    return result


@dataclass(frozen=True)
class ClassicalWeight:
    """Classical orthogonality weight of a family and its interval."""

    family: Family
    interval: Interval

    def density(self, x):
        """The weight at an mpmath point ``x``."""
        kind = self.family.kind
        if kind is FamilyKind.HERMITE:
            return mpmath.exp(-(x**2))
        a = mpmath.mpf(self.family.alpha.p) / self.family.alpha.q
        if kind is FamilyKind.LAGUERRE:
            return x**a * mpmath.exp(-x)
        b = mpmath.mpf(self.family.beta.p) / self.family.beta.q
        return (1 - x) ** a * (1 + x) ** b

    @property
    def integrable(self) -> bool:
        """True when all moments of the weight are finite."""
        return all(getattr(self.family, p) > -1 for p in self.family.kind.parameters)


def classical_weight(family: Family) -> ClassicalWeight:
    interval = {
        FamilyKind.HERMITE: REAL_LINE,
        FamilyKind.LAGUERRE: POSITIVE_HALF_LINE,
        FamilyKind.JACOBI: UNIT_INTERVAL,
    }[family.kind]
    return ClassicalWeight(family, interval)
