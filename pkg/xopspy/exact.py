# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Exact arithmetic foundation of xopspy.

Scalars are :class:`sympy.Rational` numbers and polynomials are :class:`sympy.Poly`
objects over ``QQ`` in the single variable :data:`z`. The zero polynomial has degree
``-oo``. On top of these this module defines the canonical rational function
:class:`RatFunc`, real intervals, squarefree factorization, Sturm root counting and
local (Laurent) data at rational points.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Dict, Iterable, List, Sequence, Tuple, Union

import mpmath
import sympy
from sympy import QQ, Matrix, Poly, Rational, Symbol, oo

from xopspy.exception import PreconditionError, ZeroInputError

logger = logging.getLogger(__name__)

z = Symbol("z")
"""The independent variable of every polynomial and rational function."""

n = Symbol("n")
"""Formal degree variable used by operator symbols."""

Rat = Rational
"""Exact rational scalar type."""

RatLike = Union[int, str, Fraction, Rational]


def rat(value: RatLike) -> Rational:
    """Convert ``value`` to an exact rational.

    Accepts integers, strings like ``"-3/4"``, :class:`fractions.Fraction` and sympy
    rationals. Floats are refused: their binary value is rarely what was meant.
    """
    if isinstance(value, Fraction):
        return Rational(value.numerator, value.denominator)
    if isinstance(value, float):
        raise TypeError(f"Refusing to convert float {value!r} to an exact rational")
    result = sympy.sympify(value, rational=True)
    if not result.is_Rational:
        raise PreconditionError(f"{value!r} is not a rational number")
    return Rational(result)


def is_rational(value) -> bool:
    """Return True when ``value`` denotes an exact rational number."""
    if isinstance(value, (int, Fraction, Rational)):
        return True
    if isinstance(value, float):
        return False
    try:
        return bool(sympy.sympify(value).is_Rational)
    except (sympy.SympifyError, TypeError):
        return False


def poly(coeffs: Iterable[RatLike] = (), var: Symbol = z) -> Poly:
    """Build a polynomial from coefficients in ascending order of powers.

    Example:
        .. code-block:: python

            poly([1, 0, 1])  # 1 + z**2
    """
    dense = [rat(c) for c in coeffs]
    while dense and dense[-1] == 0:
        dense.pop()
    if not dense:
        return Poly(0, var, domain=QQ)
    return Poly.from_list(list(reversed(dense)), var, domain=QQ)


def coeffs(p: Poly) -> List[Rational]:
    """Coefficients of ``p`` in ascending order; empty for the zero polynomial."""
    if p.is_zero:
        return []
    return [Rational(c) for c in reversed(p.all_coeffs())]


def const(c: RatLike) -> Poly:
    return poly([c])


Z = Poly(z, z, domain=QQ)
ONE = const(1)
ZERO = poly()


def degree(p: Poly):
    """Degree of ``p``; ``-oo`` for the zero polynomial."""
    return p.degree()


def antiderivative(p: Poly) -> Poly:
    """Antiderivative of ``p`` with vanishing constant term."""
    return poly([0] + [c / (k + 1) for k, c in enumerate(coeffs(p))])


def taylor(p: Poly, zeta: RatLike) -> List[Rational]:
    """Ascending coefficients of ``p`` in powers of ``z - zeta``."""
    return coeffs(p.shift(rat(zeta)))


def valuation(p: Poly, zeta: RatLike) -> int:
    """Multiplicity of ``zeta`` as a root of the nonzero polynomial ``p``."""
    if p.is_zero:
        raise ZeroInputError("valuation")
    for k, c in enumerate(taylor(p, zeta)):
        if c != 0:
            return k
    raise AssertionError("nonzero polynomial with vanishing Taylor expansion")


def rational_roots(p: Poly) -> Dict[Rational, int]:
    """Rational roots of ``p`` with multiplicities, from factorization over QQ."""
    if p.is_zero:
        raise ZeroInputError("rational_roots")
    roots = {}
    _, factors = p.factor_list()
    for factor, mult in factors:
        if factor.degree() == 1:
            a1, a0 = factor.all_coeffs()
            roots[Rational(-a0, a1)] = mult
    return dict(sorted(roots.items()))


def poly_gcd(polys: Iterable[Poly]) -> Poly:
    """Monic GCD of a sequence of polynomials (zero for an empty sequence)."""
    return reduce(lambda a, b: a.gcd(b), polys, ZERO)


def monic(p: Poly) -> Poly:
    if p.is_zero:
        raise ZeroInputError("monic")
    return p.monic()


class RatFunc:
    """Canonical rational function ``num/den`` over the rationals.

    The representation is unique: ``gcd(num, den) = 1`` and ``den`` is monic. The zero
    function is ``0/1``. Instances are immutable and hashable.

    Example:
        .. code-block:: python

            w = RatFunc(poly([0, 2]), poly([1, 0, 1]))  # 2z/(1 + z^2)
            w.diff()
    """

    __slots__ = ("num", "den")

    def __init__(self, num: Union[Poly, RatLike] = 0, den: Union[Poly, RatLike] = 1):
        num = num if isinstance(num, Poly) else const(num)
        den = den if isinstance(den, Poly) else const(den)
        if den.is_zero:
            raise ZeroDivisionError("Rational function denominator is zero")
        if num.is_zero:
            num, den = ZERO, ONE
        else:
            g = num.gcd(den)
            if g.degree() > 0:
                num, den = num.exquo(g), den.exquo(g)
            lc = den.LC()
            num, den = num.quo_ground(lc), den.quo_ground(lc)
        object.__setattr__(self, "num", num)
        object.__setattr__(self, "den", den)

    def __setattr__(self, name, value):
        raise RuntimeError("Cannot set attribute: RatFunc is read-only.")

    @classmethod
    def coerce(cls, value) -> "RatFunc":
        """Convert polynomials and rational scalars to :class:`RatFunc`."""
        if isinstance(value, RatFunc):
            return value
        if isinstance(value, Poly):
            return cls(value)
        return cls(const(value))

    # Properties
    @property
    def is_zero(self) -> bool:
        return self.num.is_zero

    @property
    def is_poly(self) -> bool:
        return self.den.degree() == 0

    @property
    def is_constant(self) -> bool:
        return self.is_poly and self.num.degree() <= 0

    def degree(self):
        """``deg num - deg den``; ``-oo`` for the zero function."""
        if self.is_zero:
            return -oo
        return self.num.degree() - self.den.degree()

    def as_poly(self) -> Poly:
        if not self.is_poly:
            raise PreconditionError(f"{self} is not a polynomial")
        return self.num

    def as_constant(self) -> Rational:
        if not self.is_constant:
            raise PreconditionError(f"{self} is not a constant")
        return Rational(self.num.LC()) if not self.is_zero else Rational(0)

    def leading(self) -> Rational:
        """Leading coefficient ``lc(num)`` (den is monic); zero for zero."""
        return Rational(0) if self.is_zero else Rational(self.num.LC())

    # Arithmetic
    def __add__(self, other):
        other = RatFunc.coerce(other)
        if self.den == other.den:
            return RatFunc(self.num + other.num, self.den)
        return RatFunc(
            self.num * other.den + other.num * self.den, self.den * other.den
        )

    __radd__ = __add__

    def __neg__(self):
        return RatFunc(-self.num, self.den)

    def __sub__(self, other):
        return self + (-RatFunc.coerce(other))

    def __rsub__(self, other):
        return RatFunc.coerce(other) - self

    def __mul__(self, other):
        other = RatFunc.coerce(other)
        return RatFunc(self.num * other.num, self.den * other.den)

    __rmul__ = __mul__

    def inverse(self) -> "RatFunc":
        if self.is_zero:
            raise ZeroDivisionError("Inverse of the zero rational function")
        return RatFunc(self.den, self.num)

    def __truediv__(self, other):
        return self * RatFunc.coerce(other).inverse()

    def __rtruediv__(self, other):
        return RatFunc.coerce(other) * self.inverse()

    def __pow__(self, k: int):
        if not isinstance(k, int):
            return NotImplemented
        if k < 0:
            return self.inverse() ** (-k)
        return RatFunc(self.num**k, self.den**k)

    def diff(self) -> "RatFunc":
        """Derivative ``(num' den - num den') / den^2``."""
        return RatFunc(
            self.num.diff() * self.den - self.num * self.den.diff(), self.den**2
        )

    def log_diff(self) -> "RatFunc":
        """Logarithmic derivative ``f'/f``."""
        return self.diff() / self

    # Evaluation
    def eval(self, x: RatLike) -> Rational:
        x = rat(x)
        d = self.den.eval(x)
        if d == 0:
            raise ZeroDivisionError(f"{self} has a pole at z = {x}")
        return Rational(self.num.eval(x)) / Rational(d)

    def mp_eval(self, x):
        """Evaluate at an mpmath number in the current mpmath precision."""
        return mpmath.polyval(mp_coeffs(self.num), x) / mpmath.polyval(
            mp_coeffs(self.den), x
        )

    # Comparison & display
    def __eq__(self, other):
        if not isinstance(other, (RatFunc, Poly, int, Rational, Fraction)):
            return NotImplemented
        other = RatFunc.coerce(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((tuple(coeffs(self.num)), tuple(coeffs(self.den))))

    def as_expr(self):
        return self.num.as_expr() / self.den.as_expr()

    def __repr__(self):
        return f"RatFunc({self.num.as_expr()}, {self.den.as_expr()})"

    def __str__(self):
        if self.is_poly:
            return str(self.num.as_expr())
        return f"({self.num.as_expr()})/({self.den.as_expr()})"


def mp_coeffs(p: Poly) -> list:
    """Coefficients of ``p`` as mpmath numbers, highest power first."""
    if p.is_zero:
        return [mpmath.mpf(0)]
    return [mpmath.mpf(c.p) / c.q for c in map(Rational, p.all_coeffs())]


@dataclass(frozen=True)
class Interval:
    """A real interval with open or closed ends; infinite ends are always open."""

    lo: Rational = -oo
    hi: Rational = oo
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        if not self.lo < self.hi:
            raise PreconditionError(f"Empty interval: {self.lo} >= {self.hi}")
        if self.lo_closed and self.lo == -oo or self.hi_closed and self.hi == oo:
            raise PreconditionError("Infinite endpoints cannot be closed")

    @classmethod
    def closure_of(cls, other: "Interval") -> "Interval":
        return cls(other.lo, other.hi, other.lo != -oo, other.hi != oo)

    def contains(self, x: RatLike) -> bool:
        x = rat(x)
        above = x > self.lo or (self.lo_closed and x == self.lo)
        below = x < self.hi or (self.hi_closed and x == self.hi)
        return above and below

    def __str__(self):
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo}, {self.hi}{right}"


REAL_LINE = Interval()
POSITIVE_HALF_LINE = Interval(Rational(0), oo)
UNIT_INTERVAL = Interval(Rational(-1), Rational(1))


def squarefree_factor(p: Poly) -> Tuple[Rational, List[Tuple[Poly, int]]]:
    """Squarefree factorization of a nonzero polynomial.

    Returns:
        The leading constant and a list of ``(factor, multiplicity)`` pairs with monic,
        squarefree, pairwise coprime factors, such that
        ``constant * prod(factor**multiplicity) == p``.
    """
    if p.is_zero:
        raise ZeroInputError("squarefree_factor")
    if p.degree() == 0:
        return Rational(p.LC()), []
    _, factors = p.sqf_list()
    result = [(f.monic(), k) for f, k in factors if f.degree() > 0]
    return Rational(p.LC()), result


def discriminant(p: Poly) -> Rational:
    """Discriminant ``(-1)^(d(d-1)/2) res(p, p') / lc(p)``."""
    if p.is_zero or p.degree() < 1:
        raise PreconditionError("The discriminant needs a polynomial of degree >= 1")
    d = p.degree()
    sign = -1 if (d * (d - 1) // 2) % 2 else 1
    return sign * Rational(p.resultant(p.diff())) / Rational(p.LC())


def _sign_at(p: Poly, x) -> int:
    if x == oo:
        return int(sympy.sign(p.LC()))
    if x == -oo:
        return int(sympy.sign(p.LC())) * (-1) ** p.degree()
    return int(sympy.sign(p.eval(x)))


def _variations(signs: Sequence[int]) -> int:
    nonzero = [s for s in signs if s != 0]
    return sum(1 for a, b in zip(nonzero, nonzero[1:]) if a != b)


def sturm_sequence(p: Poly) -> List[Poly]:
    """Sturm chain of the squarefree part of ``p``.

    Remainders are rescaled by the absolute value of their leading coefficient, which
    keeps coefficients small without changing any sign.
    """
    f = p.exquo(p.gcd(p.diff()))
    chain = [f, f.diff()]
    while not chain[-1].is_zero and chain[-1].degree() > 0:
        remainder = -chain[-2].rem(chain[-1])
        if remainder.is_zero:
            break
        chain.append(remainder.quo_ground(abs(remainder.LC())))
    return [s for s in chain if not s.is_zero]


def sturm_count(p: Poly, interval: Interval = REAL_LINE) -> int:
    """Exact number of distinct real roots of ``p`` in ``interval``.

    Rational endpoint roots are divided out first and counted according to the
    endpoint flags, so the Sturm count only ever runs between non-roots.
    """
    if p.is_zero:
        raise ZeroInputError("sturm_count")
    if p.degree() < 1:
        return 0
    f = p.exquo(p.gcd(p.diff()))
    count = 0
    ends = ((interval.lo, interval.lo_closed), (interval.hi, interval.hi_closed))
    for end, closed in ends:
        if end not in (oo, -oo) and f.eval(end) == 0:
            f = f.exquo(Poly(z - end, z, domain=QQ))
            count += int(closed)
    if f.degree() < 1:
        return count
    chain = sturm_sequence(f)
    v_lo = _variations([_sign_at(s, interval.lo) for s in chain])
    v_hi = _variations([_sign_at(s, interval.hi) for s in chain])
    logger.debug("Sturm count of %s on %s: %d", p.as_expr(), interval, v_lo - v_hi)
    return count + v_lo - v_hi


def order_at(f: RatFunc, zeta: RatLike) -> int:
    """The ``(z - zeta)``-adic valuation of a nonzero rational function."""
    f = RatFunc.coerce(f)
    if f.is_zero:
        raise ZeroInputError("order of zero undefined")
    zeta = _rational_point(zeta)
    return valuation(f.num, zeta) - valuation(f.den, zeta)


def _rational_point(zeta) -> Rational:
    if not is_rational(zeta):
        raise PreconditionError(
            f"Local data is only computed at rational points, got z = {zeta}"
        )
    return rat(zeta)


def series_divide(num: Sequence, den: Sequence, count: int) -> list:
    """First ``count`` power series coefficients of ``num/den`` (``den[0] != 0``).

    Works for any coefficient type with field arithmetic (rationals or mpmath).
    """
    result = []
    for j in range(count):
        acc = num[j] if j < len(num) else 0
        for i in range(1, min(j, len(den) - 1) + 1):
            acc -= den[i] * result[j - i]
        result.append(acc / den[0])
    return result


def laurent_coeffs(
    f: RatFunc, zeta: RatLike, k_min: int, k_max: int
) -> Dict[int, Rational]:
    """Laurent coefficients of ``f`` at the rational point ``zeta``.

    Returns:
        Map from ``k`` to the coefficient of ``(z - zeta)**k`` for
        ``k_min <= k <= k_max``. The zero function yields zeros.
    """
    if k_min > k_max:
        raise PreconditionError(f"Empty Laurent range [{k_min}, {k_max}]")
    f = RatFunc.coerce(f)
    zeta = _rational_point(zeta)
    if f.is_zero:
        return {k: Rational(0) for k in range(k_min, k_max + 1)}
    num, den = taylor(f.num, zeta), taylor(f.den, zeta)
    v_num = next(i for i, c in enumerate(num) if c != 0)
    v_den = next(i for i, c in enumerate(den) if c != 0)
    shift = v_num - v_den
    series = series_divide(num[v_num:], den[v_den:], max(k_max - shift + 1, 0))
    return {
        k: (series[k - shift] if k >= shift else Rational(0))
        for k in range(k_min, k_max + 1)
    }


def nullspace(rows: Sequence[Sequence[Rational]], ncols: int) -> List[List[Rational]]:
    """Exact kernel of a rational matrix, in the fixed pivoting order of ``rref``.

    Args:
        rows: Matrix rows (each of length ``ncols``); may be empty.
        ncols: Number of unknowns.

    Returns:
        A list of basis vectors of the kernel.
    """
    if not rows:
        return [[Rational(int(i == j)) for i in range(ncols)] for j in range(ncols)]
    matrix = Matrix(len(rows), ncols, [Rational(x) for row in rows for x in row])
    return [[Rational(x) for x in vec] for vec in matrix.nullspace()]


def rank(rows: Sequence[Sequence[Rational]], ncols: int) -> int:
    if not rows:
        return 0
    return Matrix(len(rows), ncols, [Rational(x) for row in rows for x in row]).rank()
