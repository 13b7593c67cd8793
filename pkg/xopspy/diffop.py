# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Linear differential operators with rational function coefficients.

A :class:`DiffOp` stores its coefficients ``a_0 ... a_rho`` in ascending order of
derivatives, so that ``L = sum(a_j D^j)``. :class:`SecondOrderOp` and
:class:`FirstOrderOp` are checked views on operators of order two and one.
"""

import logging
from dataclasses import dataclass, field
from math import comb
from typing import Dict, Iterable, Sequence, Tuple, Union

from sympy import QQ, Poly, Rational

from xopspy.exact import (
    RatFunc,
    RatLike,
    Z,
    laurent_coeffs,
    n,
    order_at,
    rat,
)
from xopspy.exception import PreconditionError, ZeroInputError

logger = logging.getLogger(__name__)

Coefficient = Union[RatFunc, Poly, RatLike]


class DiffOp:
    """Linear differential operator ``sum(a_j D^j)`` with :class:`RatFunc` coefficients.

    Trailing zero coefficients are stripped, so the zero operator has no coefficients.
    Instances are immutable.

    Example:
        .. code-block:: python

            D = DiffOp.D()
            heisenberg = commutator(D, DiffOp.multiplication(Z))  # == identity
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable[Coefficient] = ()):
        coeffs = [RatFunc.coerce(a) for a in coeffs]
        while coeffs and coeffs[-1].is_zero:
            coeffs.pop()
        object.__setattr__(self, "coeffs", tuple(coeffs))

    def __setattr__(self, name, value):
        raise RuntimeError("Cannot set attribute: DiffOp is read-only.")

    @classmethod
    def identity(cls) -> "DiffOp":
        return cls([1])

    @classmethod
    def D(cls) -> "DiffOp":
        return cls([0, 1])

    @classmethod
    def multiplication(cls, f: Coefficient) -> "DiffOp":
        """The order zero operator ``y -> f*y``."""
        return cls([f])

    @property
    def order(self) -> int:
        if self.is_zero:
            raise ZeroInputError("order of the zero operator")
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, j: int) -> RatFunc:
        return self.coeffs[j] if 0 <= j < len(self.coeffs) else RatFunc()

    def __add__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.multiplication(other)
        size = max(len(self.coeffs), len(other.coeffs))
        return DiffOp(self.coeff(j) + other.coeff(j) for j in range(size))

    __radd__ = __add__

    def __neg__(self):
        return DiffOp(-a for a in self.coeffs)

    def __sub__(self, other):
        if not isinstance(other, DiffOp):
            other = DiffOp.multiplication(other)
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __matmul__(self, other: "DiffOp") -> "DiffOp":
        return compose(self, other)

    def __call__(self, f) -> RatFunc:
        return apply(self, f)

    def __eq__(self, other):
        if isinstance(other, SecondOrderOp):
            other = other.to_diffop()
        if not isinstance(other, DiffOp):
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def __repr__(self):
        terms = ", ".join(str(a) for a in self.coeffs)
        return f"DiffOp([{terms}])"


@dataclass(frozen=True)
class SecondOrderOp:
    """The operator ``T = p D^2 + q D + r`` with ``p != 0``."""

    p: RatFunc
    q: RatFunc = field(default_factory=RatFunc)
    r: RatFunc = field(default_factory=RatFunc)

    def __post_init__(self):
        for name in ("p", "q", "r"):
            object.__setattr__(self, name, RatFunc.coerce(getattr(self, name)))
        if self.p.is_zero:
            raise PreconditionError("A second order operator needs p != 0")

    @classmethod
    def from_diffop(cls, op: DiffOp) -> "SecondOrderOp":
        if op.is_zero or op.order != 2:
            raise PreconditionError(f"{op!r} is not of order two")
        return cls(op.coeff(2), op.coeff(1), op.coeff(0))

    def to_diffop(self) -> DiffOp:
        return DiffOp([self.r, self.q, self.p])

    def apply(self, f) -> RatFunc:
        f = RatFunc.coerce(f)
        df = f.diff()
        return self.p * df.diff() + self.q * df + self.r * f

    __call__ = apply

    def __add__(self, c) -> "SecondOrderOp":
        """Shift the operator by a rational function (usually a constant)."""
        return SecondOrderOp(self.p, self.q, self.r + RatFunc.coerce(c))

    def __sub__(self, c) -> "SecondOrderOp":
        return self + (-RatFunc.coerce(c))

    def ricatti_residual(self, w: RatFunc) -> RatFunc:
        """Ricatti residual ``p(w' + w^2) + q w + r``.

        It is constant iff ``exp(int w)`` is an eigenfunction of the operator.
        """
        w = RatFunc.coerce(w)
        return self.p * (w.diff() + w * w) + self.q * w + self.r

    @property
    def is_polynomial(self) -> bool:
        return self.p.is_poly and self.q.is_poly and self.r.is_poly

    def lcm_denominator(self) -> Poly:
        """Least common multiple of the denominators of ``p``, ``q`` and ``r``."""
        return self.p.den.lcm(self.q.den).lcm(self.r.den)

    def __str__(self):
        return f"({self.p}) D^2 + ({self.q}) D + ({self.r})"


@dataclass(frozen=True)
class FirstOrderOp:
    """The operator ``b (D - w)`` with ``b != 0``."""

    b: RatFunc
    w: RatFunc

    def __post_init__(self):
        object.__setattr__(self, "b", RatFunc.coerce(self.b))
        object.__setattr__(self, "w", RatFunc.coerce(self.w))
        if self.b.is_zero:
            raise PreconditionError("A first order operator b(D - w) needs b != 0")

    def to_diffop(self) -> DiffOp:
        return DiffOp([-self.b * self.w, self.b])

    def apply(self, f) -> RatFunc:
        f = RatFunc.coerce(f)
        return self.b * (f.diff() - self.w * f)

    __call__ = apply


def _as_diffop(op) -> DiffOp:
    if isinstance(op, (SecondOrderOp, FirstOrderOp)):
        return op.to_diffop()
    return op


def apply(op, f) -> RatFunc:
    """Apply an operator to a rational function (or polynomial), exactly."""
    op = _as_diffop(op)
    f = RatFunc.coerce(f)
    result = RatFunc()
    derivative = f
    for j, a in enumerate(op.coeffs):
        if j:
            derivative = derivative.diff()
        if derivative.is_zero:
            break
        if not a.is_zero:
            result = result + a * derivative
    return result


def compose(first, second) -> DiffOp:
    """Operator product ``first o second`` by the Leibniz rule.

    ``a_i D^i o b_j D^j = sum_k C(i, k) a_i b_j^(k) D^(i - k + j)``.
    """
    first, second = _as_diffop(first), _as_diffop(second)
    if first.is_zero or second.is_zero:
        return DiffOp()
    result = [RatFunc() for _ in range(first.order + second.order + 1)]
    for j, b in enumerate(second.coeffs):
        if b.is_zero:
            continue
        derivatives = [b]
        for _ in range(first.order):
            derivatives.append(derivatives[-1].diff())
        for i, a in enumerate(first.coeffs):
            if a.is_zero:
                continue
            for k in range(i + 1):
                if derivatives[k].is_zero:
                    break
                result[i - k + j] = result[i - k + j] + comb(i, k) * a * derivatives[k]
    return DiffOp(result)


def commutator(first, second) -> DiffOp:
    return compose(first, second) - compose(second, first)


def op_degree(op) -> int:
    """Operator degree ``max(deg a_j - j)``.

    This is the shift ``deg L[y] - deg y`` for generic polynomials ``y``.
    """
    op = _as_diffop(op)
    if op.is_zero:
        raise ZeroInputError("op_degree")
    return max(a.degree() - j for j, a in enumerate(op.coeffs) if not a.is_zero)


def symbol_poly(op) -> Poly:
    """Symbol ``sigma(n)`` with ``L[z^n] = sigma(n) z^(n+k) + lower order terms``.

    Returns:
        A polynomial in :data:`xopspy.exact.n` over the rationals; ``k`` is the operator
        degree.
    """
    op = _as_diffop(op)
    k = op_degree(op)
    sigma = Poly(0, n, domain=QQ)
    falling = Poly(1, n, domain=QQ)
    for j, a in enumerate(op.coeffs):
        if j:
            falling = falling * Poly(n - (j - 1), n, domain=QQ)
        if not a.is_zero and a.degree() == j + k:
            sigma = sigma + falling.mul_ground(a.leading())
    return sigma


def gauge_conjugate(T: SecondOrderOp, sigma: Coefficient) -> SecondOrderOp:
    """The conjugated operator ``sigma T sigma^-1``.

    With ``l = sigma'/sigma``: ``q^ = q - 2 l p`` and
    ``r^ = r - l q^ - (sigma''/sigma) p``.
    """
    sigma = RatFunc.coerce(sigma)
    if sigma.is_zero:
        raise ZeroInputError("gauge_conjugate")
    if sigma.is_constant:
        return T
    ld = sigma.log_diff()
    q_hat = T.q - 2 * ld * T.p
    r_hat = T.r - ld * q_hat - (sigma.diff().diff() / sigma) * T.p
    return SecondOrderOp(T.p, q_hat, r_hat)


def is_bochner(T: SecondOrderOp) -> bool:
    """True for operators with polynomial coefficients and operator degree zero."""
    return T.is_polynomial and op_degree(T) == 0


def euler_operator(a: RatLike, b: RatLike, c: RatLike) -> SecondOrderOp:
    """The Euler operator ``a z^2 D^2 + b z D + c``."""
    return SecondOrderOp(RatFunc(Z**2) * rat(a), RatFunc(Z) * rat(b), rat(c))


@dataclass(frozen=True)
class LocalExpansion:
    """Laurent data ``T = sum_{j >= d} T_j`` of a second order operator at ``zeta``.

    ``T_j = p_{j+2} (z-zeta)^(j+2) D^2 + q_{j+1} (z-zeta)^(j+1) D + r_j (z-zeta)^j``
    lowers vanishing orders by ``-j``; ``terms[j]`` holds ``(p_{j+2}, q_{j+1}, r_j)``.
    """

    zeta: Rational
    d: int
    terms: Dict[int, Tuple[Rational, Rational, Rational]]

    @property
    def depth(self) -> int:
        return max(self.terms)

    def term(self, j: int) -> Tuple[Rational, Rational, Rational]:
        return self.terms[j]

    def action_poly(self, i: int) -> Poly:
        """Polynomial ``F_i(x)`` with ``T_{d+i}[(z-zeta)^x] = F_i(x) (z-zeta)^(x+d+i)``.

        ``F_0`` is the indicial polynomial.
        """
        p_, q_, r_ = self.terms[self.d + i]
        x = Poly(n, n, domain=QQ)
        return (x * (x - 1)).mul_ground(p_) + x.mul_ground(q_) + Poly(r_, n, domain=QQ)


def _order_or_none(f: RatFunc, zeta):
    return None if f.is_zero else order_at(f, zeta)


def leading_order(T: SecondOrderOp, zeta: RatLike) -> int:
    """``d = min(ord p - 2, ord q - 1, ord r)`` at a rational point."""
    zeta = rat(zeta)
    return min(
        order - shift
        for order, shift in (
            (_order_or_none(T.p, zeta), 2),
            (_order_or_none(T.q, zeta), 1),
            (_order_or_none(T.r, zeta), 0),
        )
        if order is not None
    )


def local_expansion(T: SecondOrderOp, zeta: RatLike, depth: int) -> LocalExpansion:
    """Local decomposition of ``T`` at a rational point up to ``T_depth``."""
    zeta = rat(zeta)
    d = leading_order(T, zeta)
    if depth < d:
        raise PreconditionError(f"Expansion depth {depth} is below leading order {d}")
    p_ = laurent_coeffs(T.p, zeta, d + 2, depth + 2)
    q_ = laurent_coeffs(T.q, zeta, d + 1, depth + 1)
    r_ = laurent_coeffs(T.r, zeta, d, depth)
    terms = {j: (p_[j + 2], q_[j + 1], r_[j]) for j in range(d, depth + 1)}
    logger.debug("Local expansion of T at z = %s: d = %d", zeta, d)
    return LocalExpansion(zeta, d, terms)


def operator_sum(ops: Sequence[DiffOp]) -> DiffOp:
    total = DiffOp()
    for op in ops:
        total = total + _as_diffop(op)
    return total
