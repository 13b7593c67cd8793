# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Sturm-Liouville weights, regularity and numeric orthogonality.

An operator ``T = p D^2 + q D + r`` is formally symmetric for the weight
``W = exp(int q/p) / p``; with ``P = p W`` and ``R = r W`` the eigenvalue equation reads
``(P y')' + R y = lambda W y``. In the natural gauge
``W = exp(int s/p) p^(-1/2) / eta^2``, a classical density divided by ``eta^2``.

Numeric quantities are computed with :mod:`mpmath` at the precision of a
:class:`QuadConfig`; everything that decides *whether* a weight exists is exact.
"""

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import mpmath
import numpy as np
import sympy
from sympy import Poly, Rational, oo

from xopspy.classical import Family, FamilyKind, classical_weight
from xopspy.darboux import ChainResult
from xopspy.defaults import PRECISION_BITS, QUAD_MAX_SUBDIVISIONS, QUAD_REL_TOL
from xopspy.diffop import SecondOrderOp
from xopspy.exact import (
    Z,
    Interval,
    RatFunc,
    RatLike,
    coeffs,
    mp_coeffs,
    poly,
    rat,
    sturm_count,
)
from xopspy.exception import (
    IdentityViolation,
    NoWeightError,
    PreconditionError,
    QuadratureError,
)
from xopspy.spectral import ExceptionalSystem
from xopspy.structure import NaturalForm

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class QuadConfig:
    """Precision settings of all numeric integrals."""

    precision_bits: int = PRECISION_BITS
    rel_tol: str = QUAD_REL_TOL
    max_subdivisions: int = QUAD_MAX_SUBDIVISIONS

    def __post_init__(self):
        if self.precision_bits < 64:
            raise PreconditionError(
                f"precision_bits must be at least 64, got {self.precision_bits}"
            )
        if not mpmath.mpf(self.rel_tol) > 0:
            raise PreconditionError(f"rel_tol must be positive, got {self.rel_tol}")
        if self.max_subdivisions < 0:
            raise PreconditionError("max_subdivisions must be non-negative")


# Weight classification
@dataclass(frozen=True)
class AffineMap:
    """The change of variable ``u = a z + b``."""

    a: Rational
    b: Rational

    def __call__(self, x):
        return self.a * x + self.b


@dataclass(frozen=True)
class WeightType:
    """Normal form ``p = scale * p0(u)`` of a leading coefficient.

    ``kind`` is ``hermite`` (``p0 = 1``), ``laguerre`` (``u``), ``jacobi``
    (``1 - u^2``) or ``rejected`` (``u^2`` or ``1 + u^2``). ``affine`` is None when the
    normalizing map is irrational.
    """

    kind: str
    scale: Optional[Rational]
    affine: Optional[AffineMap]
    reason: str = ""

    @property
    def rejected(self) -> bool:
        return self.kind == "rejected"


def _rational_sqrt(x: Rational) -> Optional[Rational]:
    root = sympy.sqrt(x)
    return Rational(root) if root.is_Rational else None


def classify_weight_type(T: SecondOrderOp) -> WeightType:
    """Affine normal form of ``p`` and the weight type it allows.

    Raises:
        PreconditionError: if ``p`` is not a polynomial of degree at most two.
    """
    if not T.p.is_poly or T.p.as_poly().degree() > 2:
        raise PreconditionError(f"p = {T.p} is not a polynomial of degree <= 2")
    c = coeffs(T.p.as_poly()) + [Rational(0)] * 2
    p0, p1, p2 = c[:3]
    if p2 == 0 and p1 == 0:
        return WeightType("hermite", p0, AffineMap(Rational(1), Rational(0)))
    if p2 == 0:
        sign = 1 if p1 > 0 else -1
        affine = AffineMap(Rational(sign), sign * p0 / p1)
        return WeightType("laguerre", abs(p1), affine)
    disc = p1**2 - 4 * p2 * p0
    center = -p1 / (2 * p2)
    if disc == 0:
        return WeightType(
            "rejected", p2, AffineMap(Rational(1), -center), "p is a square: no weight"
        )
    root = _rational_sqrt(abs(disc))
    half_width = None if root is None else root / (2 * abs(p2))
    affine = None if root is None else AffineMap(1 / half_width, -center / half_width)
    if disc < 0:
        return WeightType(
            "rejected",
            None if root is None else p2 * half_width**2,
            affine,
            "p ~ 1 + u^2: exp(a arctan u)(1 + u^2)^b has infinite moments",
        )
    return WeightType(
        "jacobi", None if root is None else -p2 * half_width**2, affine
    )


# Weights
@dataclass(frozen=True)
class WeightDescriptor:
    """The weight ``W = W_classical * extra_rational / eta^2`` on ``interval``."""

    classical_part: Family
    eta: Poly
    interval: Interval
    extra_rational: RatFunc = field(default_factory=lambda: RatFunc(1))

    def density(self, x):
        """``W(x)`` for an mpmath number ``x`` in the current precision."""
        base = classical_weight(self.classical_part).density(x)
        return base * self.extra_rational.mp_eval(x) / mpmath.polyval(
            mp_coeffs(self.eta), x
        ) ** 2

    def log_derivative(self) -> RatFunc:
        """Exact ``W'/W``."""
        family = self.classical_part
        if family.kind is FamilyKind.HERMITE:
            classical = RatFunc(poly([0, -2]))
        elif family.kind is FamilyKind.LAGUERRE:
            classical = RatFunc(family.alpha, Z) - 1
        else:
            classical = RatFunc(-family.alpha, poly([1, -1])) + RatFunc(
                family.beta, poly([1, 1])
            )
        extra = self.extra_rational
        extra = RatFunc(0) if extra.is_constant else extra.log_diff()
        return classical + extra - 2 * RatFunc(self.eta).log_diff()


def weight_of(T: SecondOrderOp, nf: NaturalForm) -> WeightDescriptor:
    """Read the orthogonality weight of a natural operator.

    ``p`` must be a positive multiple of ``1``, ``z`` or ``1 - z^2`` and ``s/p`` must
    carry the matching classical exponents.

    Raises:
        NoWeightError: for a rejected ``p`` or ``s`` without a classical density.
    """
    if T.p != RatFunc(nf.p):
        raise PreconditionError("Natural form does not belong to the operator")
    wt = classify_weight_type(T)
    if wt.rejected:
        raise NoWeightError(wt.reason)
    if wt.scale is None or wt.affine != AffineMap(Rational(1), Rational(0)):
        raise NoWeightError(f"p = {T.p} is not in normal form; map z to {wt.affine}")
    c = wt.scale
    if c <= 0:
        raise NoWeightError(f"p = {T.p} is negative on the interval")
    s = coeffs(nf.s) + [Rational(0)] * 2
    s0, s1 = s[0] / c, s[1] / c
    if wt.kind == "hermite":
        if (s0, s1) != (0, -2):
            raise NoWeightError(f"s = {nf.s.as_expr()} is not a standard Gaussian")
        family = Family.hermite()
        interval = Interval()
    elif wt.kind == "laguerre":
        if s1 != -1:
            raise NoWeightError(f"s = {nf.s.as_expr()} has no exp(-z) factor")
        family = Family.laguerre(s0 - Rational(1, 2))
        interval = Interval(Rational(0), oo)
    else:
        at_plus, at_minus = s0 + s1, s0 - s1
        family = Family.jacobi(
            -Rational(1, 2) - at_plus / 2, -Rational(1, 2) + at_minus / 2
        )
        interval = Interval(Rational(-1), Rational(1))
    logger.debug("Weight of natural form: %s / eta^2 on %s", family, interval)
    return WeightDescriptor(family, nf.eta, interval)


@dataclass
class RegularityReport:
    failures: List[str] = field(default_factory=list)

    @property
    def regular(self) -> bool:
        return not self.failures


def regularity_check(W: WeightDescriptor) -> RegularityReport:
    """Positivity, single-valuedness and finite moments of ``W`` on its interval."""
    report = RegularityReport()
    closure = Interval.closure_of(W.interval)
    roots = sturm_count(W.eta, closure)
    if roots:
        report.failures.append(f"eta has {roots} root(s) in {closure}")
    family = W.classical_part
    for name in family.kind.parameters:
        value = getattr(family, name)
        if value <= -1:
            report.failures.append(f"{name} = {value} <= -1: moments diverge")
    extra = W.extra_rational
    if not extra.is_constant:
        for part, label in ((extra.num, "numerator"), (extra.den, "denominator")):
            if part.degree() > 0 and sturm_count(part, closure):
                report.failures.append(f"extra factor {label} vanishes on {closure}")
    if extra.is_zero or (extra.is_constant and extra.as_constant() < 0):
        report.failures.append("extra factor is not positive")
    for failure in report.failures:
        logger.info("Weight is irregular: %s", failure)
    return report


# Quadrature
def _mp_endpoint(x):
    if x == oo:
        return mpmath.inf
    if x == -oo:
        return -mpmath.inf
    x = Rational(x)
    return mpmath.mpf(x.p) / x.q


def _refine(points: list) -> list:
    refined = [points[0]]
    for a, b in zip(points, points[1:]):
        if mpmath.isinf(a) and mpmath.isinf(b):
            refined.append(mpmath.mpf(0))
        elif mpmath.isinf(b):
            refined.append(a + 1 if a <= 0 else 2 * a)
        elif mpmath.isinf(a):
            refined.append(b - 1 if b >= 0 else 2 * b)
        else:
            refined.append((a + b) / 2)
        refined.append(b)
    return refined


def integrate(f, interval: Interval, cfg: QuadConfig):
    """Tanh-sinh quadrature with subdivision until the error estimate is small.

    Infinite ends are handled by mpmath's variable transformations.

    Raises:
        QuadratureError: naming the worst subinterval after ``max_subdivisions``.
    """
    points = [_mp_endpoint(interval.lo), _mp_endpoint(interval.hi)]
    tol = mpmath.mpf(cfg.rel_tol)
    for level in range(cfg.max_subdivisions + 1):
        total, errors = mpmath.mpf(0), []
        for a, b in zip(points, points[1:]):
            value, error = mpmath.quad(f, [a, b], method="tanh-sinh", error=True)
            total += value
            errors.append((error, (a, b)))
        worst, segment = max(errors, key=lambda e: e[0])
        if sum(e for e, _ in errors) <= tol * max(abs(total), 1):
            return total
        logger.debug("Subdividing at level %d: worst error %s", level, worst)
        points = _refine(points)
    raise QuadratureError(mpmath.nstr(worst, 5), segment, cfg.max_subdivisions)


@dataclass
class GramReport:
    degrees: List[int]
    precision_bits: int
    matrix: np.ndarray
    max_offdiag: object

    @property
    def norms(self) -> List:
        return [self.matrix[i, i] for i in range(len(self.degrees))]


def gram_matrix(
    system: ExceptionalSystem,
    W: WeightDescriptor,
    degrees: Optional[Sequence[int]] = None,
    cfg: QuadConfig = QuadConfig(),
) -> GramReport:
    """``G_ij = int_I W y_i y_j`` for the eigenpolynomials of ``system``.

    Raises:
        NoWeightError: if ``W`` is not regular.
        PreconditionError: for a degree without eigenpolynomial.
        IdentityViolation: if a diagonal entry is not positive.
    """
    regularity = regularity_check(W)
    if not regularity.regular:
        raise NoWeightError("; ".join(regularity.failures))
    degrees = sorted(system.eigenpairs) if degrees is None else list(degrees)
    missing = [k for k in degrees if k not in system.eigenpairs]
    if missing:
        raise PreconditionError(f"No eigenpolynomial of degree {missing}")
    size = len(degrees)
    matrix = np.empty((size, size), dtype=object)
    with mpmath.workprec(cfg.precision_bits):
        polys = [mp_coeffs(system.eigenpairs[k].y) for k in degrees]
        for i in range(size):
            for j in range(i, size):
                yi, yj = polys[i], polys[j]

                def integrand(x, yi=yi, yj=yj):
                    return W.density(x) * mpmath.polyval(yi, x) * mpmath.polyval(yj, x)

                matrix[i, j] = matrix[j, i] = integrate(integrand, W.interval, cfg)
        for i, k in enumerate(degrees):
            if not matrix[i, i] > 0:
                raise IdentityViolation(f"positive norm of degree {k}", matrix[i, i])
        max_offdiag = mpmath.mpf(0)
        for i in range(size):
            for j in range(i + 1, size):
                scale = mpmath.sqrt(matrix[i, i] * matrix[j, j])
                max_offdiag = max(max_offdiag, abs(matrix[i, j]) / scale)
    logger.info(
        "Gram matrix of degrees %s: max normalized off-diagonal %s",
        degrees,
        mpmath.nstr(max_offdiag, 5),
    )
    return GramReport(degrees, cfg.precision_bits, matrix, max_offdiag)


def _mp_rat(x: RatLike):
    x = rat(x)
    return mpmath.mpf(x.p) / x.q


def symmetry_residual(
    T: SecondOrderOp,
    W: WeightDescriptor,
    f: Poly,
    g: Poly,
    a: RatLike,
    b: RatLike,
    cfg: QuadConfig = QuadConfig(),
):
    """``int_a^b (T[f] g - f T[g]) W - [p W (f' g - f g')]_a^b``."""
    a, b = rat(a), rat(b)
    if not (W.interval.contains(a) and W.interval.contains(b) and a < b):
        raise PreconditionError(f"[{a}, {b}] is not a subinterval of {W.interval}")
    Tf, Tg = T.apply(f), T.apply(g)
    F, G = RatFunc(f), RatFunc(g)
    boundary_poly = F.diff() * G - F * G.diff()
    with mpmath.workprec(cfg.precision_bits):

        def integrand(x):
            return (Tf.mp_eval(x) * G.mp_eval(x) - F.mp_eval(x) * Tg.mp_eval(x)) * (
                W.density(x)
            )

        def boundary(x):
            return T.p.mp_eval(x) * W.density(x) * boundary_poly.mp_eval(x)

        total = integrate(integrand, Interval(a, b), cfg)
        return total - (boundary(_mp_rat(b)) - boundary(_mp_rat(a)))


def sl_form_residual(
    T: SecondOrderOp,
    W: WeightDescriptor,
    y: Poly,
    eigenvalue: RatLike,
    x: RatLike,
    cfg: QuadConfig = QuadConfig(),
):
    """``(P y')' + R y - lambda W y`` at ``x`` with ``P = p W`` and ``R = r W``.

    The derivative of ``P y'`` is taken numerically, so the residual tests the weight
    itself and not only the eigenvalue equation.
    """
    Y, dY = RatFunc(y), RatFunc(y).diff()

    def flux(t):
        return T.p.mp_eval(t) * W.density(t) * dY.mp_eval(t)

    with mpmath.workprec(cfg.precision_bits):
        x, eigenvalue = _mp_rat(x), _mp_rat(eigenvalue)
        w = W.density(x)
        return mpmath.diff(flux, x) + (T.r.mp_eval(x) - eigenvalue) * w * Y.mp_eval(x)


def weight_curve(W: WeightDescriptor, grid: Sequence[RatLike], digits: int = 30):
    """Rows ``(x, W(x))`` with exact ``x`` and ``W`` as a decimal string."""
    rows = []
    for x in grid:
        x = rat(x)
        rows.append((str(x), mpmath.nstr(W.density(_mp_rat(x)), digits)))
    return rows


def write_weight_curve(path: Union[str, Path], rows: Sequence[Tuple[str, str]]):
    with open(path, "w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(["z", "W(z)"])
        writer.writerows(rows)


# Weight laws along chains
def weight_log_derivative(T: SecondOrderOp) -> RatFunc:
    """``W'/W = (q - p')/p`` for the symmetrizing weight of ``T``."""
    return (T.q - T.p.diff()) / T.p


@dataclass
class WeightRatioReport:
    """Outcome of :func:`weight_ratio_check`.

    ``k`` is the constant with ``chi'/chi = k/p``; residuals are exact rational
    functions and vanish when the laws hold.
    """

    multiplier: RatFunc
    k: Optional[Rational]
    step_residual: RatFunc
    residual: Optional[RatFunc]

    @property
    def passed(self) -> bool:
        return self.step_residual.is_zero and (
            self.residual is not None and self.residual.is_zero
        )


def weight_ratio_check(
    chain_result: ChainResult,
    nf_final: NaturalForm,
    gauge: Union[RatFunc, Poly, RatLike] = 1,
) -> WeightRatioReport:
    """Compare the composed weight multipliers with ``chi / eta^2``.

    ``gauge`` is ``g`` with ``nf_final.operator() = g T_final g^-1 - c``. The checks are
    the composed step law ``W_final = (prod p/b^2) W_base`` and
    ``prod p/b^2 = const * g^2 chi / eta^2`` with ``chi'/chi = k/p``, where ``k`` is the
    difference of the final and base ``s`` polynomials.
    """
    base, final = chain_result.base, chain_result.final
    multiplier = chain_result.weight_multiplier()
    ld_m = multiplier.log_diff() if not multiplier.is_constant else RatFunc(0)
    step_residual = ld_m + weight_log_derivative(base) - weight_log_derivative(final)
    g = RatFunc.coerce(gauge)
    ld_g = RatFunc(0) if g.is_constant else g.log_diff()
    gauge_residual = (final.q - nf_final.q) / (2 * final.p) - ld_g
    if not gauge_residual.is_zero:
        raise PreconditionError(f"gauge does not relate operators: {gauge_residual}")
    s_base = base.q - base.p.diff() / 2
    difference = RatFunc(nf_final.s) - s_base
    k, residual = None, None
    if difference.is_constant:
        k = difference.as_constant()
        eta = RatFunc(nf_final.eta)
        residual = ld_m - (2 * ld_g + RatFunc(k) / base.p - 2 * eta.log_diff())
    report = WeightRatioReport(multiplier, k, step_residual, residual)
    if report.passed:
        logger.info("Weight ratio law holds with k = %s", k)
    else:
        logger.warning("Weight ratio law fails: residual %s", residual)
    return report
