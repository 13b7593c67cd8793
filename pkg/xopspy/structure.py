# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Natural and reduced gauges, invariant polynomial subspaces and gap data.

An operator is in natural form for a polynomial ``eta`` when, for some ``p`` of degree
at most 2 and ``s`` of degree at most 1,

* ``q = p'/2 + s - 2 p eta'/eta``
* ``r = p eta''/eta + (p'/2 - s) eta'/eta``

so that ``eta * T[y]`` is the bilinear expression
``p(eta y'' - 2 eta' y' + eta'' y) + p'/2 (eta y' + eta' y) + s (eta y' - eta' y)``.
"""

import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

from sympy import Matrix, Poly, Rational

from xopspy.defaults import DEFAULT_MAX_DEGREE, GCD_WINDOW
from xopspy.diffop import SecondOrderOp, gauge_conjugate
from xopspy.exact import (
    ONE,
    ZERO,
    RatFunc,
    coeffs,
    nullspace,
    poly,
    rat,
    squarefree_factor,
    taylor,
)
from xopspy.exception import (
    IdentityViolation,
    NotNaturalError,
    NotReducedError,
    PreconditionError,
    SubspaceError,
)

logger = logging.getLogger(__name__)


def poly_vector(p: Poly, size: int) -> List[Rational]:
    """Ascending coefficient vector of ``p`` padded to ``size`` entries."""
    c = coeffs(p)
    if len(c) > size:
        raise PreconditionError(f"Degree of {p.as_expr()} exceeds {size - 1}")
    return c + [Rational(0)] * (size - len(c))


def echelon_by_degree(polys: Sequence[Poly], N: int) -> List[Poly]:
    """Basis of ``span(polys)`` with distinct degrees, monic, sorted by degree.

    Rows are reduced against each other, so every member has zero coefficients at the
    degrees of the other members.
    """
    rows = [list(reversed(poly_vector(p, N + 1))) for p in polys if not p.is_zero]
    if not rows:
        return []
    reduced, _ = Matrix(rows).rref()
    basis = []
    for i in range(reduced.rows):
        row = [Rational(x) for x in reduced.row(i)]
        if any(row):
            basis.append(poly(reversed(row)))
    return sorted(basis, key=lambda b: b.degree())


@dataclass(frozen=True)
class NaturalForm:
    """Natural form data ``(p, s, eta)`` with ``eta`` monic."""

    p: Poly
    s: Poly
    eta: Poly

    def __post_init__(self):
        if self.eta.is_zero:
            raise PreconditionError("eta must be nonzero")
        object.__setattr__(self, "eta", self.eta.monic())

    @property
    def q(self) -> RatFunc:
        p, eta = RatFunc(self.p), RatFunc(self.eta)
        return p.diff() / 2 + RatFunc(self.s) - 2 * p * eta.log_diff()

    @property
    def r(self) -> RatFunc:
        p, s, eta = RatFunc(self.p), RatFunc(self.s), RatFunc(self.eta)
        return p * eta.diff().diff() / eta + (p.diff() / 2 - s) * eta.log_diff()

    def operator(self) -> SecondOrderOp:
        """The natural operator with these data."""
        return SecondOrderOp(self.p, self.q, self.r)

    def bilinear(self, y: Poly) -> Poly:
        """``eta * T[y]`` computed from the bilinear expression."""
        p, s, eta = self.p, self.s, self.eta
        dy, deta = y.diff(), eta.diff()
        half_dp = p.diff().quo_ground(2)
        return (
            p * (eta * dy.diff() - 2 * deta * dy + deta.diff() * y)
            + half_dp * (eta * dy + deta * y)
            + s * (eta * dy - deta * y)
        )

    def subspace_residue(self, y: Poly) -> Poly:
        """Remainder of ``2 p eta' y' - (p eta'' + p' eta'/2 - s eta') y`` modulo eta.

        Zero for every ``y`` in the maximal invariant polynomial subspace. The converse
        holds only when eta is squarefree: at a root of multiplicity ``nu >= 2`` all
        but one of the conditions are automatic.
        """
        p, s, eta = self.p, self.s, self.eta
        deta = eta.diff()
        expr = 2 * p * deta * y.diff() - (
            p * deta.diff() + p.diff() * deta.quo_ground(2) - s * deta
        ) * y
        return expr.rem(eta)

    def in_subspace(self, y: Poly) -> bool:
        """True iff the orbit ``y, T[y], T^2[y], ...`` stays polynomial.

        Images of polynomials have degree at most ``deg y``, so the orbit spans a
        finite invariant subspace once it stops growing.
        """
        if y.is_zero:
            return True
        if not self.subspace_residue(y).is_zero:
            return False
        T, N = self.operator(), y.degree()
        span: List[Poly] = []
        v = y
        while True:
            extended = echelon_by_degree([*span, v], N)
            if len(extended) == len(span):
                return True
            span = extended
            image = T.apply(v)
            if not image.is_poly or image.as_poly().degree() > N:
                return False
            v = image.as_poly()


def verify_natural(T: SecondOrderOp, eta: Poly) -> NaturalForm:
    """Check that ``T`` is natural for ``eta`` and return its natural data.

    Raises:
        NotNaturalError: if ``s = q - p'/2 + 2 p eta'/eta`` is not a polynomial of
            degree at most one, or if ``r`` does not have the natural form.
    """
    if eta.is_zero:
        raise PreconditionError("eta must be nonzero")
    if not T.p.is_poly or T.p.as_poly().degree() > 2:
        raise NotNaturalError(f"p = {T.p} is not a polynomial of degree <= 2")
    p = T.p.as_poly()
    s = T.q - T.p.diff() / 2 + 2 * T.p * RatFunc(eta).log_diff()
    if not s.is_poly or s.degree() > 1:
        raise NotNaturalError(f"not natural for given eta: s = {s}")
    nf = NaturalForm(p, s.as_poly(), eta)
    if nf.r != T.r:
        raise NotNaturalError(f"r fails natural form: residual {T.r - nf.r}")
    logger.debug("Verified natural form with eta = %s", nf.eta.as_expr())
    return nf


def _split_off(den: Poly, p: Poly) -> Tuple[Poly, Poly]:
    """Split ``den = inner * outer`` where ``inner`` holds all roots shared with p."""
    inner, outer = ONE, den
    g = outer.gcd(p)
    while g.degree() > 0:
        inner, outer = inner * g, outer.exquo(g)
        g = outer.gcd(p)
    return inner, outer


def infer_eta(
    T: SecondOrderOp, max_deg: int = DEFAULT_MAX_DEGREE
) -> Optional[Tuple[Poly, Poly]]:
    """Recover ``(eta, s)`` with ``q = p'/2 + s - 2 p eta'/eta`` from ``T``.

    Away from the roots of ``p``, ``eta'/eta = (p'/2 - q)/(2p)`` up to a polynomial, so
    the simple poles of that function carry the root multiplicities of ``eta`` as
    residues. Residues are computed as residue classes modulo the squarefree
    denominator, so no roots are extracted. Roots of ``eta`` at zeros of ``p`` do not
    show in ``q``; the minimal solution omits them.

    Returns:
        Monic ``eta`` of degree at most ``max_deg`` and ``s``, or None.
    """
    if not T.p.is_poly or T.p.as_poly().degree() > 2:
        return None
    p = T.p.as_poly()
    f = (T.p.diff() / 2 - T.q) / (2 * T.p)
    at_p, den = _split_off(f.den, p)
    if den.degree() > 0 and den.gcd(den.diff()).degree() > 0:
        return None
    eta = ONE
    if den.degree() > 0:
        # residue of num/(den * at_p) at the roots of den, as a class modulo den
        partial = (f.num * at_p.invert(den)).rem(den)
        residue = (partial * den.diff().invert(den)).rem(den)
        remaining = den
        for nu in range(1, max_deg + 1):
            g = remaining.gcd(residue - nu)
            if g.degree() > 0:
                eta = eta * g**nu
                remaining = remaining.exquo(g)
        if remaining.degree() > 0 or eta.degree() > max_deg:
            return None
    s = T.q - T.p.diff() / 2 + 2 * T.p * RatFunc(eta).log_diff()
    if not s.is_poly or s.degree() > 1:
        return None
    logger.debug("Inferred eta = %s, s = %s", eta.as_expr(), s)
    return eta, s.as_poly()


@dataclass(frozen=True)
class ReducedForm:
    """Reduced form data; ``mu = prod f_i^(nu_i (nu_i - 1)/2)`` over eta's factors."""

    p: Poly
    s: Poly
    eta: Poly
    mu: Poly
    c: Rational

    @property
    def natural_eta(self) -> Poly:
        return (self.mu * self.eta).monic()


def mu_of(eta: Poly) -> Poly:
    """``prod f_i^(nu_i (nu_i - 1)/2)`` over the squarefree factors of ``eta``."""
    mu = ONE
    for factor, nu in squarefree_factor(eta)[1]:
        mu = mu * factor ** (nu * (nu - 1) // 2)
    return mu


def reduced_form_check(
    T: SecondOrderOp, max_deg: int = DEFAULT_MAX_DEGREE
) -> ReducedForm:
    """Check the reduced exceptional form of ``T``.

    ``r = p eta''/eta + (p'/2 - s) eta'/eta + 2p(mu''/mu - (mu'/mu)^2)
    + p' mu'/mu + c``.

    Raises:
        NotReducedError: if no ``eta`` is found or the residual ``c`` is not constant.
    """
    found = infer_eta(T, max_deg)
    if found is None:
        raise NotReducedError("not a reduced exceptional form: no eta found")
    eta, s = found
    mu = mu_of(eta)
    p, mu_f = T.p, RatFunc(mu)
    natural_r = NaturalForm(p.as_poly(), s, eta).r
    ld = mu_f.log_diff()
    expected = natural_r + 2 * p * (mu_f.diff().diff() / mu_f - ld * ld) + p.diff() * ld
    residual = T.r - expected
    if not residual.is_constant:
        raise NotReducedError(f"not a reduced exceptional form: residual {residual}")
    logger.debug("Reduced form with eta = %s, mu = %s", eta.as_expr(), mu.as_expr())
    return ReducedForm(p.as_poly(), s, eta, mu, residual.as_constant())


def gauge_to_natural(T_red: SecondOrderOp) -> SecondOrderOp:
    """The natural operator ``mu T_red mu^-1 - c`` of a reduced operator."""
    rf = reduced_form_check(T_red)
    result = gauge_conjugate(T_red, rf.mu) - rf.c
    verify_natural(result, rf.natural_eta)
    return result


def to_reduced(
    T: SecondOrderOp, eigenpolys: Sequence[Poly], window: int = GCD_WINDOW
) -> Tuple[Poly, SecondOrderOp]:
    """Divide out the common factor ``sigma`` of the eigenpolynomials.

    Returns:
        ``(sigma, sigma^-1 T sigma)``; ``sigma`` is monic.

    Raises:
        PreconditionError: if no eigenpolynomial is given, or if the GCD changed within
            the last ``window`` entries.
    """
    if not eigenpolys:
        raise PreconditionError("to_reduced needs at least one eigenpolynomial")
    sigma, changed_at = ZERO, 0
    for i, y in enumerate(eigenpolys):
        g = sigma.gcd(y)
        if g != sigma:
            sigma, changed_at = g, i
    if len(eigenpolys) - changed_at < window:
        raise PreconditionError(
            f"GCD of eigenpolynomials changed at entry {changed_at} of "
            f"{len(eigenpolys)}; not stabilized over {window}"
        )
    sigma = sigma.monic()
    return sigma, gauge_conjugate(T, RatFunc(ONE, sigma))


@dataclass(frozen=True)
class SubspaceBasis:
    """Basis of ``U`` intersected with polynomials of degree at most ``N``.

    Members have distinct degrees and are monic.
    """

    N: int
    basis: Tuple[Poly, ...]

    def __post_init__(self):
        object.__setattr__(self, "basis", tuple(self.basis))

    @property
    def dim(self) -> int:
        return len(self.basis)

    @property
    def codim(self) -> int:
        return self.N + 1 - self.dim

    @property
    def degrees(self) -> List[int]:
        return [b.degree() for b in self.basis]

    @property
    def missing_degrees(self) -> List[int]:
        present = set(self.degrees)
        return [k for k in range(self.N + 1) if k not in present]

    def contains(self, y: Poly) -> bool:
        if y.is_zero:
            return True
        if y.degree() > self.N:
            return False
        return len(echelon_by_degree([*self.basis, y], self.N)) == self.dim


def subspace_basis(nf: NaturalForm, N: int) -> SubspaceBasis:
    """Basis of ``U`` up to degree ``N``.

    The divisibility test modulo eta cuts ``P_N`` down to a superspace of ``U``; at
    repeated roots of eta that superspace is too large, so it is then restricted to
    its largest ``T``-invariant part.
    """
    size = N + 1
    eta_deg = nf.eta.degree()
    columns = [
        poly_vector(nf.subspace_residue(poly([0] * k + [1])), max(eta_deg, 1))
        for k in range(size)
    ]
    rows = [[col[i] for col in columns] for i in range(max(eta_deg, 1))]
    rows = [row for row in rows if any(row)]
    kernel = nullspace(rows, size)
    candidates = echelon_by_degree([poly(v) for v in kernel], N)
    basis = _largest_invariant(nf.operator(), candidates, N)
    if len(basis) < len(candidates):
        logger.debug(
            "Divisibility test leaves %d spurious directions up to degree %d",
            len(candidates) - len(basis),
            N,
        )
    logger.debug("Subspace basis up to degree %d has dimension %d", N, len(basis))
    return SubspaceBasis(N, basis)


def _largest_invariant(T: SecondOrderOp, current: List[Poly], N: int) -> List[Poly]:
    """Iterate ``V <- {y in V : T[y] in V}`` until the dimension is stable."""
    common = T.lcm_denominator()
    while current:
        dim = len(current)
        images = [(T.apply(v) * RatFunc(common)).as_poly() for v in current]
        scaled = [common * v for v in current]
        top = max(
            max((im.degree() for im in images if not im.is_zero), default=0),
            max(sv.degree() for sv in scaled),
        )
        # unknowns (c, d): sum c_i T[v_i] - sum d_k v_k = 0, cleared by `common`
        columns = [poly_vector(im, top + 1) for im in images]
        columns += [[-x for x in poly_vector(sv, top + 1)] for sv in scaled]
        rows = [[col[i] for col in columns] for i in range(top + 1)]
        kernel = nullspace([row for row in rows if any(row)], 2 * dim)
        restricted = []
        for vec in kernel:
            y = poly([])
            for c, v in zip(vec[:dim], current):
                if c != 0:
                    y = y + v.mul_ground(c)
            restricted.append(y)
        restricted = echelon_by_degree(restricted, N)
        if len(restricted) == dim:
            break
        current = restricted
    for v in current:
        image = T.apply(v)
        if not image.is_poly:
            raise SubspaceError(f"T[{v.as_expr()}] is not a polynomial")
    return current


def invariant_subspace(T: SecondOrderOp, N: int) -> SubspaceBasis:
    """Largest subspace ``V`` of ``P_N`` with ``T[V] ⊂ V``.

    Starts from all polynomials of degree at most ``N``. Valid in any gauge.
    """
    current = _largest_invariant(T, [poly([0] * k + [1]) for k in range(N + 1)], N)
    logger.debug("Invariant subspace up to degree %d has dimension %d", N, len(current))
    return SubspaceBasis(N, current)


@dataclass(frozen=True)
class OrderSequence:
    """Vanishing orders at ``zeta`` realized by a subspace, up to ``cutoff``."""

    zeta: Rational
    cutoff: int
    orders: Tuple[int, ...]
    gaps: int
    conclusive: bool

    @property
    def gap_orders(self) -> List[int]:
        return [k for k in range(self.cutoff + 1) if k not in self.orders]


def reduced_gap_shape(nu: int, cutoff: int) -> List[int]:
    """Orders ``{2j : j <= nu} ∪ {n >= 2 nu + 1}`` up to ``cutoff``."""
    return sorted({2 * j for j in range(nu + 1)} | set(range(2 * nu + 1, cutoff + 1)))


def order_sequence(
    basis: SubspaceBasis, zeta, cutoff: int, expect_reduced: bool = False
) -> OrderSequence:
    """Triangularize ``basis`` by vanishing order at ``zeta``.

    The result is inconclusive when the truncation at degree ``N`` may hide orders
    (``cutoff > N - codim``) or when the cutoff does not reach past the last possible
    gap (``cutoff < 2 gaps + 1``).

    Raises:
        IdentityViolation: with ``expect_reduced``, if a conclusive sequence does not
            have the reduced gap shape.
    """
    zeta = rat(zeta)
    if cutoff > basis.N:
        raise PreconditionError(f"cutoff {cutoff} exceeds basis degree {basis.N}")
    size = basis.N + 1
    rows = [poly_vector(poly(taylor(b, zeta)), size) for b in basis.basis]
    pivots = Matrix(rows).rref()[1] if rows else ()
    orders = tuple(k for k in pivots if k <= cutoff)
    gaps = cutoff + 1 - len(orders)
    conclusive = cutoff <= basis.N - basis.codim and cutoff >= 2 * gaps + 1
    result = OrderSequence(zeta, cutoff, orders, gaps, conclusive)
    if not conclusive:
        logger.warning("Order sequence at z = %s is inconclusive", zeta)
    elif expect_reduced and list(orders) != reduced_gap_shape(gaps, cutoff):
        raise IdentityViolation(f"reduced gap shape at z = {zeta}", orders)
    return result


@dataclass(frozen=True)
class PoleData:
    """Gap data of one primary pole: a rational point or an irrational factor."""

    nu: int
    zeta: Optional[Rational] = None
    factor: Optional[Poly] = None
    order_prefix: Optional[Tuple[int, ...]] = None


@dataclass
class GapData:
    codim: int
    eta_degree: int
    poles: List[PoleData] = field(default_factory=list)


def codimension_report(nf: NaturalForm, basis: SubspaceBasis) -> GapData:
    """Codimension accounting: the gap counts add up to ``deg eta``.

    Raises:
        PreconditionError: if ``basis.N < 2 deg eta + 2``, or if the order sequence at
            a rational root is inconclusive at degree ``basis.N``.
        IdentityViolation: naming the violated identity.
    """
    eta_degree = nf.eta.degree()
    if basis.N < 2 * eta_degree + 2:
        raise PreconditionError(
            f"Basis degree {basis.N} is below the margin {2 * eta_degree + 2}"
        )
    report = GapData(basis.codim, eta_degree)
    if basis.codim != eta_degree:
        raise IdentityViolation("codim U = deg eta", basis.codim - eta_degree)
    total = 0
    cutoff = basis.N - basis.codim
    for factor, mult in squarefree_factor(nf.eta)[1]:
        for irreducible, _ in factor.factor_list()[1]:
            if irreducible.degree() == 1:
                zeta = -Rational(irreducible.nth(0)) / Rational(irreducible.LC())
                seq = order_sequence(basis, zeta, cutoff)
                if not seq.conclusive:
                    raise PreconditionError(
                        f"Order sequence at z = {zeta} is inconclusive up to degree "
                        f"{basis.N}; need at least {3 * eta_degree + 1}"
                    )
                if seq.gaps != mult:
                    identity = f"nu at z = {zeta} is its multiplicity"
                    raise IdentityViolation(identity, seq)
                report.poles.append(
                    PoleData(seq.gaps, zeta=zeta, order_prefix=seq.orders)
                )
                total += seq.gaps
            else:
                report.poles.append(PoleData(mult, factor=irreducible.monic()))
                total += mult * irreducible.degree()
    if total != eta_degree:
        raise IdentityViolation("sum of gap counts = deg eta", total - eta_degree)
    logger.info("Codimension %d equals deg eta", report.codim)
    return report


def stabilizer_check(f: Poly, nf: NaturalForm, basis: SubspaceBasis) -> bool:
    """True iff ``eta`` divides ``f'``; then multiplication by ``f`` preserves ``U``.

    Raises:
        IdentityViolation: if ``eta | f'`` but ``f y`` leaves ``U`` for a basis member.
    """
    if not f.diff().rem(nf.eta).is_zero:
        return False
    for y in basis.basis:
        fy = f * y
        if fy.degree() <= basis.N and not basis.contains(fy):
            raise IdentityViolation("f U ⊂ U", fy.as_expr())
    return True

