# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Rational Darboux transformations and factorization chains.

A quasi-rational eigenfunction ``phi`` of ``T`` with ``w = phi'/phi`` and a gauge factor
``b`` factorize ``T = B A + lambda0`` with ``A = b (D - w)``. The partner
``T^ = A B + lambda0`` satisfies ``T^ A = A T``. Chains iterate this, transporting the
remaining seeds through each ``A``.
"""

import logging
from dataclasses import dataclass, field
from functools import reduce
from typing import Dict, Iterable, List, Optional, Sequence, Tuple, Union

from sympy import Rational

from xopspy.classical import Family, Seed, SeedKind, bochner_operator, seed
from xopspy.defaults import MAX_INTERTWINER_ORDER
from xopspy.diffop import DiffOp, FirstOrderOp, SecondOrderOp, compose
from xopspy.exact import RatFunc, Z, coeffs, nullspace, rat
from xopspy.exception import (
    ChainStepError,
    DegenerateSeedError,
    IdentityViolation,
    InvalidSeedError,
    PreconditionError,
    ZeroInputError,
)

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SeedFunction:
    """A seed in the gauge of the current operator of a chain.

    Attributes:
        origin: Catalog seed this function descends from.
        w: Current logarithmic derivative.
        eigenvalue: Eigenvalue with respect to the current operator.
        transported_by: Number of chain steps the seed was transported through.
    """

    origin: Seed
    w: RatFunc
    eigenvalue: Rational
    transported_by: int = 0

    @classmethod
    def from_seed(cls, s: Seed) -> "SeedFunction":
        return cls(s, s.w, s.eigenvalue)

    @property
    def name(self) -> str:
        suffix = f" (transported {self.transported_by}x)" if self.transported_by else ""
        return self.origin.name + suffix


AnySeed = Union[Seed, SeedFunction]


@dataclass(frozen=True)
class DarbouxStep:
    """One step of a chain: a seed and a gauge factor (``None`` picks the default).

    With ``transport`` set, the seed is a function of the base operator carried through
    all preceding steps; otherwise its ``w`` is used as is and its eigenvalue is taken
    against the current operator.
    """

    seed: Seed
    b: Optional[RatFunc] = None
    transport: bool = True

    def __post_init__(self):
        if self.b is not None:
            b = RatFunc.coerce(self.b)
            if b.is_zero:
                raise ZeroInputError("gauge factor b")
            object.__setattr__(self, "b", b)


@dataclass(frozen=True)
class Factorization:
    """``T = B A + eigenvalue`` with first order ``A`` and ``B``."""

    A: FirstOrderOp
    B: FirstOrderOp
    eigenvalue: Rational


@dataclass(frozen=True)
class DarbouxChain:
    base: Family
    steps: Tuple[DarbouxStep, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))


@dataclass(frozen=True)
class WeightUpdate:
    """Weight law ``W^ = (p / b^2) W`` of one step."""

    b: RatFunc
    p: RatFunc

    @property
    def multiplier(self) -> RatFunc:
        return self.p / self.b**2


@dataclass
class ChainResult:
    operators: List[SecondOrderOp]
    intertwiner: DiffOp
    weight_updates: List[WeightUpdate] = field(default_factory=list)
    factorizations: List[Factorization] = field(default_factory=list)
    eigenvalues: List[Rational] = field(default_factory=list)

    @property
    def base(self) -> SecondOrderOp:
        return self.operators[0]

    @property
    def final(self) -> SecondOrderOp:
        return self.operators[-1]

    def weight_multiplier(self) -> RatFunc:
        """Product of all per-step weight multipliers ``p/b^2``."""
        return reduce(
            lambda acc, u: acc * u.multiplier, self.weight_updates, RatFunc(1)
        )


def _check_seed(T: SecondOrderOp, s: AnySeed) -> None:
    residual = T.ricatti_residual(s.w)
    if not residual.is_constant or residual.as_constant() != s.eigenvalue:
        raise InvalidSeedError(
            s.name, residual, f"; expected the constant {s.eigenvalue}"
        )


def factorize(T: SecondOrderOp, s: AnySeed, b) -> Factorization:
    """Factorize ``T = B A + lambda0`` through the seed ``s`` with gauge factor ``b``.

    ``A = b (D - w)`` and ``B = (p/b) (D - w^)`` with ``w^ = -w - q/p + b'/b``.

    Raises:
        InvalidSeedError: if the Ricatti residual of ``s.w`` is not ``s.eigenvalue``.
        IdentityViolation: if ``B A + lambda0`` does not reproduce ``T``.
    """
    _check_seed(T, s)
    b = RatFunc.coerce(b)
    if b.is_zero:
        raise ZeroInputError("gauge factor b")
    w_hat = -s.w - T.q / T.p + b.log_diff()
    A = FirstOrderOp(b, s.w)
    B = FirstOrderOp(T.p / b, w_hat)
    if compose(B, A) + s.eigenvalue != T.to_diffop():
        raise IdentityViolation("T = B A + lambda0")
    logger.debug("Factorized T through %s", s.name)
    return Factorization(A, B, s.eigenvalue)


def partner_from(T: SecondOrderOp, fac: Factorization) -> SecondOrderOp:
    """Partner of ``T`` from the closed coefficient laws, checked against ``A B``."""
    p, q, r = T.p, T.q, T.r
    b, w = fac.A.b, fac.A.w
    ld = b.log_diff()
    q_hat = q + p.diff() - 2 * ld * p
    r_hat = (
        r
        + q.diff()
        + w * p.diff()
        - ld * (q + p.diff())
        + (2 * ld * ld - b.diff().diff() / b + 2 * w.diff()) * p
    )
    result = SecondOrderOp(p, q_hat, r_hat)
    if compose(fac.A, fac.B) + fac.eigenvalue != result.to_diffop():
        raise IdentityViolation("T^ = A B + lambda0", result)
    return result


def default_gauge(s: AnySeed, T: SecondOrderOp) -> RatFunc:
    """Minimal gauge factor making ``A = b (D - w)`` map polynomials to polynomials.

    This is the monic denominator of ``w``: then ``b w`` is a polynomial.
    """
    _check_seed(T, s)
    return RatFunc(s.w.den)


def partner(T: SecondOrderOp, step: DarbouxStep) -> SecondOrderOp:
    """Partner operator ``T^ = A B + lambda0`` of one Darboux step."""
    s = SeedFunction.from_seed(step.seed)
    b = step.b if step.b is not None else default_gauge(s, T)
    return partner_from(T, factorize(T, s, b))


def transport(s: SeedFunction, A: FirstOrderOp) -> SeedFunction:
    """Carry a seed through ``A``: the log-derivative of ``A[phi] = b phi (w - w_A)``.

    Raises:
        DegenerateSeedError: when ``A[phi]`` vanishes, i.e. ``w == w_A``.
    """
    diff = s.w - A.w
    if diff.is_zero:
        raise DegenerateSeedError(-1, -1)
    w_new = A.b.log_diff() + s.w + diff.log_diff()
    return SeedFunction(s.origin, w_new, s.eigenvalue, s.transported_by + 1)


def run_chain(chain: DarbouxChain) -> ChainResult:
    """Run a factorization chain from the Bochner operator of ``chain.base``.

    Raises:
        ChainStepError: when a step's seed is not an eigenfunction of the current
            operator (carries the step index).
        DegenerateSeedError: when two seeds are dependent.
        IdentityViolation: if the final intertwining relation fails.
    """
    T0 = bochner_operator(chain.base)
    result = ChainResult([T0], DiffOp.identity())
    pending: Dict[int, SeedFunction] = {
        i: SeedFunction.from_seed(step.seed)
        for i, step in enumerate(chain.steps)
        if step.transport
    }
    T = T0
    for i, step in enumerate(chain.steps):
        if step.transport:
            s = pending.pop(i)
        else:
            residual = T.ricatti_residual(step.seed.w)
            if not residual.is_constant:
                raise ChainStepError(i, f"Ricatti residual {residual} is not constant")
            s = SeedFunction(step.seed, step.seed.w, residual.as_constant())
        residual = T.ricatti_residual(s.w)
        if not residual.is_constant:
            raise ChainStepError(i, f"Ricatti residual {residual} is not constant")
        if residual.as_constant() != s.eigenvalue:
            raise ChainStepError(
                i, f"seed eigenvalue moved from {s.eigenvalue} to {residual}"
            )
        b = step.b if step.b is not None else default_gauge(s, T)
        try:
            fac = factorize(T, s, b)
        except InvalidSeedError as exc:
            raise ChainStepError(i, str(exc)) from exc
        T_next = partner_from(T, fac)
        for j, other in list(pending.items()):
            try:
                pending[j] = transport(other, fac.A)
            except DegenerateSeedError:
                raise DegenerateSeedError(i, j) from None
        result.operators.append(T_next)
        result.intertwiner = compose(fac.A, result.intertwiner)
        result.weight_updates.append(WeightUpdate(fac.A.b, T.p))
        result.factorizations.append(fac)
        result.eigenvalues.append(fac.eigenvalue)
        logger.info(
            "Chain step %d: seed %s, eigenvalue %s, b = %s", i, s.name, s.eigenvalue, b
        )
        T = T_next
    if not verify_intertwining(result.final, result.intertwiner, T0):
        raise IdentityViolation("T_n L = L T_0")
    return result


def verify_intertwining(That: SecondOrderOp, L: DiffOp, T: SecondOrderOp) -> bool:
    """True iff ``That L - L T`` is the zero operator."""
    residual = compose(That, L) - compose(L, T)
    logger.debug("Intertwining residual is zero: %s", residual.is_zero)
    return residual.is_zero


def _unknowns(order: int, max_op_degree: int) -> List[Tuple[int, int]]:
    """Pairs ``(j, m)`` for the monomials ``z^m D^j`` of the intertwiner ansatz."""
    return [
        (j, m) for j in range(order + 1) for m in range(0, j + max_op_degree + 1)
    ]


def _solve_intertwiner(
    T: SecondOrderOp, TB: SecondOrderOp, order: int, max_op_degree: int
) -> Optional[DiffOp]:
    unknowns = _unknowns(order, max_op_degree)
    if not unknowns:
        return None
    residuals = []
    for j, m in unknowns:
        monomial = DiffOp([0] * j + [Z**m])
        residuals.append(compose(T, monomial) - compose(monomial, TB))
    common = reduce(
        lambda acc, a: acc.lcm(a.den),
        (a for res in residuals for a in res.coeffs),
        RatFunc(1).den,
    )
    equations: Dict[Tuple[int, int], List[Rational]] = {}
    for col, res in enumerate(residuals):
        for k, a in enumerate(res.coeffs):
            cleared = (a * RatFunc(common)).as_poly()
            for power, c in enumerate(coeffs(cleared)):
                if c != 0:
                    row = equations.setdefault(
                        (k, power), [Rational(0)] * len(unknowns)
                    )
                    row[col] = c
    kernel = nullspace(list(equations.values()), len(unknowns))
    if not kernel:
        return None
    vector = kernel[0]
    a = [RatFunc() for _ in range(order + 1)]
    for (j, m), c in zip(unknowns, vector):
        if c != 0:
            a[j] = a[j] + RatFunc(Z**m) * c
    L = DiffOp(a)
    if L.is_zero:
        return None
    return DiffOp(c / L.coeffs[-1].leading() for c in L.coeffs)


def find_intertwiner(
    T: SecondOrderOp,
    TB: SecondOrderOp,
    max_order: int = MAX_INTERTWINER_ORDER,
    max_op_degree: int = 0,
) -> Optional[DiffOp]:
    """Minimal order operator ``L`` with polynomial coefficients and ``T L = L TB``.

    The ansatz has ``deg a_j <= j + max_op_degree``; ``TB`` is used exactly as given,
    so any additive constant must be supplied by the caller (see
    :func:`find_intertwiner_shifted`).

    Returns:
        ``L`` normalized to a monic leading coefficient of ``a_rho``, or None when no
        intertwiner exists up to ``max_order``.
    """
    if max_order > MAX_INTERTWINER_ORDER:
        raise PreconditionError(
            f"Intertwiner order {max_order} exceeds the cap {MAX_INTERTWINER_ORDER}"
        )
    for order in range(max_order + 1):
        L = _solve_intertwiner(T, TB, order, max_op_degree)
        if L is not None:
            logger.info("Found intertwiner of order %d", L.order)
            return L
    logger.info("No intertwiner up to order %d", max_order)
    return None


def find_intertwiner_shifted(
    T: SecondOrderOp,
    TB: SecondOrderOp,
    shifts: Iterable,
    max_order: int = MAX_INTERTWINER_ORDER,
    max_op_degree: int = 0,
) -> Optional[Tuple[Rational, DiffOp]]:
    """Scan constant shifts ``gamma`` and intertwine ``T`` with ``TB + gamma``.

    Returns:
        ``(gamma, L)`` with the smallest order over all shifts, or None.
    """
    best = None
    for gamma in dict.fromkeys(rat(g) for g in shifts):
        L = find_intertwiner(T, TB + gamma, max_order, max_op_degree)
        if L is not None and (best is None or L.order < best[1].order):
            best = (gamma, L)
    return best


def shift_candidates(eigenvalues: Sequence[Rational]) -> List[Rational]:
    """Sums of eigenvalue subsets: the constant shifts that can occur along a chain."""
    sums = {Rational(0)}
    for lam in eigenvalues:
        sums |= {s + lam for s in sums} | {s - lam for s in sums}
    return sorted(sums)


def corpus_chains() -> Dict[str, DarbouxChain]:
    """Named chains used throughout the tests and the documentation."""
    hermite = Family.hermite()
    laguerre = Family.laguerre(Rational(-3, 2))
    jacobi = Family.jacobi(Rational(1, 2), Rational(3, 2))

    def native_trivial(family: Family) -> DarbouxStep:
        kind = SeedKind.POLYNOMIAL if family.kind is hermite.kind else SeedKind.I
        return DarbouxStep(seed(family, kind, 0), b=1, transport=False)

    def shifted(family: Family, k: int) -> Family:
        params = (getattr(family, p) + k for p in family.kind.parameters)
        return family.with_parameters(*params)

    return {
        "hermite-krein-adler-1-2": DarbouxChain(
            hermite,
            [
                DarbouxStep(seed(hermite, "polynomial", 1)),
                DarbouxStep(seed(hermite, "polynomial", 2)),
            ],
        ),
        "hermite-pseudo-2": DarbouxChain(
            hermite, [DarbouxStep(seed(hermite, "pseudo", 2))]
        ),
        "laguerre-double-shift": DarbouxChain(
            laguerre, [native_trivial(shifted(laguerre, k)) for k in range(2)]
        ),
        "laguerre-i1-iii2": DarbouxChain(
            laguerre,
            [
                DarbouxStep(seed(laguerre, "I", 1)),
                DarbouxStep(seed(laguerre, "III", 2)),
            ],
        ),
        "laguerre-x1": DarbouxChain(
            Family.laguerre(1), [DarbouxStep(seed(Family.laguerre(1), "III", 1))]
        ),
        "laguerre-triple-shift": DarbouxChain(
            laguerre, [native_trivial(shifted(laguerre, k)) for k in range(3)]
        ),
        "jacobi-shift": DarbouxChain(jacobi, [native_trivial(jacobi)]),
        "jacobi-ii-1": DarbouxChain(jacobi, [DarbouxStep(seed(jacobi, "II", 1))]),
    }
