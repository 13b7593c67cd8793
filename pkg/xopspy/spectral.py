# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Eigenpolynomials, Wronskian families, Frobenius series and spectral checks.

Eigenvalues of an operator of operator degree zero are read off its symbol:
``lambda_k = sigma(k)``. A degree ``k`` with no polynomial eigenfunction of degree
exactly ``k`` is *exceptional*.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import mpmath
import sympy
from sympy import Matrix, Poly, Rational

from xopspy.classical import Family, Seed, classical_poly
from xopspy.defaults import (
    DEFAULT_MAX_DEGREE,
    GCD_WINDOW,
    MONODROMY_LAMBDA_SAMPLES,
    NUMERIC_FAIL_THRESHOLD,
    NUMERIC_PASS_THRESHOLD,
    PRECISION_BITS,
    series_depth,
)
from xopspy.diffop import (
    SecondOrderOp,
    gauge_conjugate,
    leading_order,
    local_expansion,
    op_degree,
    symbol_poly,
)
from xopspy.exact import (
    ONE,
    RatFunc,
    coeffs,
    mp_coeffs,
    nullspace,
    order_at,
    poly,
    rank,
    rat,
    rational_roots,
    series_divide,
    squarefree_factor,
    z,
)
from xopspy.exception import (
    DegenerateSeedError,
    IdentityViolation,
    NotRegularSingularError,
    PreconditionError,
    SubspaceError,
)
from xopspy.structure import (
    NaturalForm,
    SubspaceBasis,
    poly_vector,
    reduced_form_check,
    to_reduced,
    verify_natural,
)

logger = logging.getLogger(__name__)


# Eigenpolynomials
@dataclass(frozen=True)
class EigenPair:
    """Monic eigenpolynomial ``y`` of degree ``k`` with ``T[y] = eigenvalue * y``."""

    k: int
    eigenvalue: Rational
    y: Poly


@dataclass(frozen=True)
class ExceptionalSystem:
    """Polynomial eigenfunctions of an operator up to degree ``N``.

    Attributes:
        T: The operator.
        nf: Natural form data, when ``T`` was verified to be natural.
        exceptional_degrees: Degrees ``k <= N`` without an eigenpolynomial.
        eigenpairs: Map from degree to eigenpair.
        N: Degree bound.
        symbol: ``sigma(n)``, so that ``lambda_k = sigma(k)``.
        gauge: ``g`` with ``T = g T_input g^-1 - shift`` when built by
            :func:`naturalize`; one otherwise.
        shift: Additive constant removed by :func:`naturalize`.
    """

    T: SecondOrderOp
    nf: Optional[NaturalForm]
    exceptional_degrees: Tuple[int, ...]
    eigenpairs: Dict[int, EigenPair]
    N: int
    symbol: Poly
    gauge: RatFunc = field(default_factory=lambda: RatFunc(1))
    shift: Rational = Rational(0)

    @property
    def eta(self) -> Optional[Poly]:
        return None if self.nf is None else self.nf.eta

    def eigenvalue(self, k: int) -> Rational:
        return Rational(self.symbol.eval(k))

    def eigenpolys(self) -> List[Poly]:
        return [self.eigenpairs[k].y for k in sorted(self.eigenpairs)]

    @property
    def codimension_matches(self) -> Optional[bool]:
        """Whether the number of exceptional degrees equals ``deg eta``."""
        if self.nf is None:
            return None
        return len(self.exceptional_degrees) == self.nf.eta.degree()


def _columns(T: SecondOrderOp, nf: Optional[NaturalForm], N: int):
    """Cleared images ``(C[z^i], C z^i)`` of ``T - lambda`` split into two parts.

    ``C`` is eta in the natural gauge and the common denominator otherwise.
    """
    if nf is not None:
        images = [nf.bilinear(poly([0] * i + [1])) for i in range(N + 1)]
        return images, [nf.eta * poly([0] * i + [1]) for i in range(N + 1)]
    clear = RatFunc(T.lcm_denominator())
    images, scaled = [], []
    for i in range(N + 1):
        monomial = RatFunc(poly([0] * i + [1]))
        images.append((clear * T.apply(monomial)).as_poly())
        scaled.append((clear * monomial).as_poly())
    return images, scaled


def _orthogonal_representative(x: Matrix, ambiguity: List[Matrix]) -> Matrix:
    """Project ``x`` orthogonally to the span of ``ambiguity``."""
    if not ambiguity:
        return x
    B = Matrix.hstack(*ambiguity)
    t = (B.T * B).LUsolve(B.T * x)
    return x - B * t


def _solve_degree(images, scaled, k: int, eigenvalue: Rational) -> Optional[Poly]:
    columns = [images[i] - scaled[i].mul_ground(eigenvalue) for i in range(k + 1)]
    size = max((c.degree() for c in columns if not c.is_zero), default=0) + 1
    vectors = [poly_vector(c, size) for c in columns]
    rows = [[vec[j] for vec in vectors] for j in range(size)]
    rows = [row for row in rows if any(row)]
    kernel = [Matrix(v) for v in nullspace(rows, k + 1)]
    index = next((i for i, v in enumerate(kernel) if v[k] != 0), None)
    if index is None:
        return None
    lead = kernel[index] / kernel[index][k]
    ambiguity = [v - v[k] * lead for i, v in enumerate(kernel) if i != index]
    ambiguity = [v for v in ambiguity if any(v)]
    if ambiguity:
        logger.debug("Degree %d: eigenvalue %s is not simple", k, eigenvalue)
    solution = _orthogonal_representative(lead, ambiguity)
    return poly([Rational(c) for c in solution])


def eigenpolys(
    T: SecondOrderOp, eta: Optional[Poly] = None, N: int = DEFAULT_MAX_DEGREE
) -> ExceptionalSystem:
    """Solve ``T[y] = sigma(k) y`` for a monic ``y`` of degree exactly ``k <= N``.

    With ``eta`` the operator is first verified to be natural and the system is solved
    in the eta-cleared bilinear form; without it the common denominator of the
    coefficients is cleared. A non-simple eigenvalue leaves an affine space of
    solutions; the representative orthogonal to its direction space (in coefficient
    space) is returned.

    Raises:
        NotNaturalError: if ``eta`` is given and ``T`` is not natural for it.
        PreconditionError: if ``T`` does not have operator degree zero.
        IdentityViolation: if a computed eigenpair fails ``T[y] = lambda y``.
    """
    nf = None if eta is None else verify_natural(T, eta)
    if op_degree(T) != 0:
        raise PreconditionError(f"Operator degree of T is {op_degree(T)}, expected 0")
    symbol = symbol_poly(T)
    images, scaled = _columns(T, nf, N)
    pairs, exceptional = {}, []
    for k in range(N + 1):
        eigenvalue = Rational(symbol.eval(k))
        y = _solve_degree(images, scaled, k, eigenvalue)
        if y is None:
            exceptional.append(k)
            continue
        if T.apply(y) != RatFunc(y) * eigenvalue:
            raise IdentityViolation(f"T[y_{k}] = lambda_{k} y_{k}", T.apply(y))
        if nf is not None and nf.bilinear(y) != (nf.eta * y).mul_ground(eigenvalue):
            raise IdentityViolation(f"bilinear identity for y_{k}")
        pairs[k] = EigenPair(k, eigenvalue, y)
    logger.info(
        "Eigenpolynomials up to degree %d; exceptional degrees %s", N, exceptional
    )
    return ExceptionalSystem(T, nf, tuple(exceptional), pairs, N, symbol)


def naturalize(T: SecondOrderOp, N: int = DEFAULT_MAX_DEGREE) -> ExceptionalSystem:
    """Bring an exceptional operator to its natural gauge.

    The common factor of the eigenpolynomials is divided out, the reduced form is
    recognized and conjugated by ``mu``, and the eigenproblem is solved again in the
    natural gauge. The search for the common factor runs past ``N`` until its GCD has
    been stable over ``GCD_WINDOW`` eigenpolynomials.

    Raises:
        PreconditionError: if no eigenpolynomial exists up to degree ``N``.
        NotReducedError: if the divided operator is not a reduced exceptional form.
    """
    found = eigenpolys(T, None, N).eigenpolys()
    if not found:
        raise PreconditionError(f"No eigenpolynomials up to degree {N}")
    search = N
    while True:
        try:
            sigma, T_red = to_reduced(T, found)
            break
        except PreconditionError:
            search += GCD_WINDOW
            logger.debug("GCD not stable; searching eigenpolynomials to %d", search)
            found = eigenpolys(T, None, search).eigenpolys()
    rf = reduced_form_check(T_red)
    T_nat = gauge_conjugate(T_red, rf.mu) - rf.c
    natural = eigenpolys(T_nat, rf.natural_eta, N)
    logger.info(
        "Natural gauge: sigma = %s, mu = %s, shift %s",
        sigma.as_expr(),
        rf.mu.as_expr(),
        rf.c,
    )
    return ExceptionalSystem(
        natural.T,
        natural.nf,
        natural.exceptional_degrees,
        natural.eigenpairs,
        N,
        natural.symbol,
        gauge=RatFunc(rf.mu, sigma),
        shift=rf.c,
    )


# Wronskians of quasi-rational functions
def _derivative_column(
    poly_part: Poly, log_prefactor: RatFunc, size: int
) -> List[RatFunc]:
    """``Q_j`` with ``(e^G P)^(j) = e^G Q_j`` where ``G' = log_prefactor``."""
    column = [RatFunc(poly_part)]
    for _ in range(size - 1):
        column.append(column[-1].diff() + log_prefactor * column[-1])
    return column


def _stripped_wronskian(functions: Sequence[Tuple[Poly, RatFunc]]) -> Poly:
    """Monic numerator of the Wronskian with the exponential prefactors removed."""
    size = len(functions)
    columns = [_derivative_column(p, g, size) for p, g in functions]
    matrix = Matrix(size, size, lambda i, j: columns[j][i].as_expr())
    det = sympy.cancel(matrix.det(method="berkowitz"))
    numerator, _ = sympy.fraction(det)
    result = Poly(numerator, z, domain=sympy.QQ)
    return result if result.is_zero else result.monic()


def _seed_functions(seeds: Sequence[Seed]) -> List[Tuple[Poly, RatFunc]]:
    functions = [(s.poly_part, s.log_prefactor) for s in seeds]
    if len(functions) > 1 and _stripped_wronskian(functions).is_zero:
        for i in range(len(functions)):
            for j in range(i + 1, len(functions)):
                if _stripped_wronskian([functions[i], functions[j]]).is_zero:
                    raise DegenerateSeedError(i, j)
        raise DegenerateSeedError(0, len(functions) - 1)
    return functions


def wronskian_family(
    base: Family, seeds: Sequence[Seed], N: int = DEFAULT_MAX_DEGREE
) -> Tuple[Poly, Dict[int, Poly]]:
    """``eta = Wr[seeds]`` and the polynomials ``Wr[P_j, seeds]``.

    Wronskians are taken of the polynomial parts after factoring out each seed's
    exponential or power prefactor; the global quasi-rational factor is stripped and
    results are monic.

    Returns:
        ``(eta, polys)`` where ``polys`` maps the actual degree (at most ``N``) of each
        nonzero Wronskian to the polynomial.

    Raises:
        DegenerateSeedError: naming a pair of dependent seeds.
    """
    functions = _seed_functions(seeds)
    eta = _stripped_wronskian(functions) if functions else ONE
    polys: Dict[int, Poly] = {}
    for j in range(N + len(functions) + 1):
        entry = (classical_poly(base, j), RatFunc())
        w = _stripped_wronskian([entry, *functions])
        if w.is_zero:
            logger.debug("Wronskian with P_%d vanishes identically", j)
            continue
        if w.degree() <= N and w.degree() not in polys:
            polys[w.degree()] = w
    logger.debug("Wronskian family: eta = %s", eta.as_expr())
    return eta, dict(sorted(polys.items()))


# Frobenius series
@dataclass(frozen=True)
class FrobeniusSolution:
    """Series ``sum_j a_j (z - zeta)^(root + j)`` solving ``T[y] = eigenvalue y``."""

    zeta: object
    indicial_root: object
    coefficients: Tuple
    eigenvalue: Rational


@dataclass(frozen=True)
class FrobeniusResult:
    """Outcome of the Frobenius construction at one point.

    ``status`` is one of ``log-free``, ``logarithmic`` (nonzero obstruction),
    ``double-root``, ``non-integer`` (roots with non-integer difference) and
    ``irrational`` (no rational indicial roots).
    """

    zeta: object
    eigenvalue: Rational
    indicial_roots: Optional[Tuple]
    solutions: Tuple[FrobeniusSolution, ...]
    obstruction: object
    status: str

    @property
    def log_free(self) -> bool:
        return self.status in ("log-free", "non-integer")

    @property
    def trivial_monodromy(self) -> bool:
        """Log-free with integer exponents."""
        return self.status == "log-free"


def _series(action, root, depth: int, resonance: Optional[int]):
    """Coefficients from ``sum_{i<=j} F_i(root + j - i) a_(j-i) = 0`` with ``a_0 = 1``.

    At the resonant index the free coefficient is set to zero and the compatibility
    sum is returned as the obstruction.
    """
    a, obstruction = [1], None
    for j in range(1, depth + 1):
        rhs = -sum(action(i, root + j - i) * a[j - i] for i in range(1, j + 1))
        if j == resonance:
            obstruction = rhs
            a.append(0 * rhs)
        else:
            a.append(rhs / action(0, root + j))
    return a, obstruction


def _check_regular(T: SecondOrderOp, zeta: Rational) -> int:
    d = leading_order(T, zeta)
    ord_p = order_at(T.p, zeta)
    if d != ord_p - 2:
        raise NotRegularSingularError(zeta, d, ord_p)
    return d


def indicial_roots(T: SecondOrderOp, zeta) -> Optional[Tuple[Rational, Rational]]:
    """Roots of the indicial polynomial at a rational point, sorted, with repetition.

    Returns:
        None when the roots are irrational.

    Raises:
        NotRegularSingularError: if ``zeta`` is an irregular point.
    """
    zeta = rat(zeta)
    d = _check_regular(T, zeta)
    F0 = local_expansion(T, zeta, d).action_poly(0)
    roots = rational_roots(F0)
    if sum(roots.values()) < 2:
        return None
    expanded = sorted(r for r, mult in roots.items() for _ in range(mult))
    return expanded[0], expanded[1]


def frobenius_solutions(
    T: SecondOrderOp, zeta, eigenvalue, depth: int
) -> FrobeniusResult:
    """Exact Frobenius series of ``T[y] = eigenvalue * y`` at a rational point.

    The series of the larger indicial root always exists. For the lower root the
    recursion passes the resonant index only when the compatibility sum vanishes;
    otherwise that sum is reported as the obstruction.

    Raises:
        NotRegularSingularError: if ``zeta`` is an irregular point.
    """
    zeta, eigenvalue = rat(zeta), rat(eigenvalue)
    shifted = T - eigenvalue
    d = _check_regular(shifted, zeta)
    expansion = local_expansion(shifted, zeta, d + depth)
    actions = [expansion.action_poly(i) for i in range(depth + 1)]

    def action(i, x):
        return Rational(actions[i].eval(x))

    roots = indicial_roots(shifted, zeta)
    if roots is None:
        logger.debug("Irrational indicial roots at z = %s", zeta)
        return FrobeniusResult(zeta, eigenvalue, None, (), None, "irrational")
    low, high = roots
    a_high, _ = _series(action, high, depth, None)
    upper = FrobeniusSolution(zeta, high, tuple(a_high), eigenvalue)
    gap = high - low
    if gap == 0:
        return FrobeniusResult(zeta, eigenvalue, roots, (upper,), None, "double-root")
    if not gap.is_integer:
        a_low, _ = _series(action, low, depth, None)
        lower = FrobeniusSolution(zeta, low, tuple(a_low), eigenvalue)
        return FrobeniusResult(
            zeta, eigenvalue, roots, (lower, upper), None, "non-integer"
        )
    a_low, obstruction = _series(action, low, depth, int(gap))
    if obstruction is not None and obstruction != 0:
        logger.debug(
            "Obstruction %s at z = %s, lambda = %s", obstruction, zeta, eigenvalue
        )
        return FrobeniusResult(
            zeta, eigenvalue, roots, (upper,), obstruction, "logarithmic"
        )
    lower = FrobeniusSolution(zeta, low, tuple(a_low), eigenvalue)
    return FrobeniusResult(
        zeta, eigenvalue, roots, (lower, upper), obstruction, "log-free"
    )


# Numeric local data at irrational points
def _mp_taylor(c: Sequence, zeta, count: int) -> list:
    """Taylor coefficients at ``zeta`` of a polynomial given highest power first."""
    c, out = list(c), []
    for _ in range(count):
        if not c:
            out.append(mpmath.mpf(0))
            continue
        acc, quotient = 0, []
        for value in c:
            acc = acc * zeta + value
            quotient.append(acc)
        out.append(quotient.pop())
        c = quotient
    return out


def _mp_deflate(c: Sequence, zeta) -> list:
    """Quotient of a polynomial (highest power first) by ``z - zeta``."""
    acc, quotient = 0, []
    for value in c:
        acc = acc * zeta + value
        quotient.append(acc)
    quotient.pop()
    return quotient


def _series_mul(a: Sequence, b: Sequence, count: int) -> list:
    return [sum(a[i] * b[j - i] for i in range(j + 1)) for j in range(count)]


def _multiplicity(den: Poly, factor: Poly) -> Tuple[int, Poly]:
    m = 0
    while den.rem(factor).is_zero:
        den, m = den.exquo(factor), m + 1
    return m, den


def _mp_laurent(f: RatFunc, factor: Poly, zeta, k_min: int, k_max: int) -> dict:
    """Laurent coefficients of ``f`` at a root ``zeta`` of an irreducible ``factor``."""
    zero = mpmath.mpf(0)
    if f.is_zero:
        return {k: zero for k in range(k_min, k_max + 1)}
    m, rest = _multiplicity(f.den, factor)
    count = k_max + m + 1
    if count <= 0:
        return {k: zero for k in range(k_min, k_max + 1)}
    den = _mp_taylor(mp_coeffs(rest), zeta, count)
    cofactor = _mp_taylor(_mp_deflate(mp_coeffs(factor), zeta), zeta, count)
    for _ in range(m):
        den = _series_mul(den, cofactor, count)
    series = series_divide(_mp_taylor(mp_coeffs(f.num), zeta, count), den, count)
    return {k: (series[k + m] if k + m >= 0 else zero) for k in range(k_min, k_max + 1)}


def _verdict(magnitude) -> str:
    if magnitude < mpmath.mpf(NUMERIC_PASS_THRESHOLD):
        return "pass"
    if magnitude > mpmath.mpf(NUMERIC_FAIL_THRESHOLD):
        return "fail"
    return "inconclusive"


# Monodromy certificate
@dataclass(frozen=True)
class MonodromyEntry:
    """Verdict for one pole and one eigenvalue sample.

    ``verdict`` is ``pass``, ``fail``, ``inconclusive`` or ``skipped`` (a root of
    ``p``, where no primary-pole statement applies).
    """

    zeta: object
    factor: Poly
    method: str
    eigenvalue: Rational
    verdict: str
    obstruction: object = None
    reason: str = ""


@dataclass
class MonodromyReport:
    eta: Poly
    precision_bits: int
    entries: List[MonodromyEntry] = field(default_factory=list)

    @property
    def verdict(self) -> str:
        verdicts = {e.verdict for e in self.entries}
        if "fail" in verdicts:
            return "fail"
        if "inconclusive" in verdicts:
            return "inconclusive"
        return "pass"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


def _exact_entry(T, factor, zeta, eigenvalue, depth) -> MonodromyEntry:
    try:
        result = frobenius_solutions(T, zeta, eigenvalue, depth)
    except NotRegularSingularError:
        return MonodromyEntry(
            zeta, factor, "exact", eigenvalue, "fail", reason="not regular singular"
        )
    if result.trivial_monodromy:
        return MonodromyEntry(zeta, factor, "exact", eigenvalue, "pass", Rational(0))
    return MonodromyEntry(
        zeta,
        factor,
        "exact",
        eigenvalue,
        "fail",
        result.obstruction,
        reason=result.status,
    )


def _numeric_entry(T, factor, zeta, eigenvalue, depth) -> MonodromyEntry:
    """Frobenius recursion in floating point at an irrational root of ``factor``.

    ``depth >= 2``, so the constant term of ``r`` is among the computed coefficients.
    """
    p_ = _mp_laurent(T.p, factor, zeta, 0, depth)
    q_ = _mp_laurent(T.q, factor, zeta, -1, depth - 1)
    r_ = _mp_laurent(T.r, factor, zeta, -2, depth - 2)
    r_[0] -= mpmath.mpf(eigenvalue.p) / eigenvalue.q

    def entry(verdict, obstruction=None, reason=""):
        return MonodromyEntry(
            zeta, factor, "numeric", eigenvalue, verdict, obstruction, reason
        )

    if _multiplicity(T.q.den, factor)[0] > 1 or _multiplicity(T.r.den, factor)[0] > 2:
        return entry("fail", reason="not regular singular")

    def action(i, x):
        return p_[i] * x * (x - 1) + q_[i - 1] * x + r_[i - 2]

    roots = mpmath.polyroots(
        [p_[0], q_[-1] - p_[0], r_[-2]], maxsteps=200, extraprec=PRECISION_BITS
    )
    integers = [int(mpmath.nint(mpmath.re(root))) for root in roots]
    deviation = max(abs(root - k) for root, k in zip(roots, integers))
    if _verdict(deviation) != "pass":
        return entry(_verdict(deviation), deviation, reason="non-integer exponents")
    low, high = sorted(integers)
    if low == high:
        return entry("fail", reason="double-root")
    _, obstruction = _series(action, low, depth, high - low)
    magnitude = abs(obstruction) if obstruction is not None else mpmath.mpf(0)
    return entry(_verdict(magnitude), magnitude)


def trivial_monodromy_certificate(
    T: SecondOrderOp,
    eta: Poly,
    depth: Optional[int] = None,
    lambda_samples: Optional[Sequence] = None,
    precision_bits: int = PRECISION_BITS,
) -> MonodromyReport:
    """Check that ``T - lambda`` has log-free local solutions at the roots of eta.

    Rational roots are handled by the exact Frobenius recursion. Roots of irreducible
    factors of higher degree are approximated with :func:`mpmath.polyroots` and the
    recursion is run in ``precision_bits`` floating point; obstructions below
    ``NUMERIC_PASS_THRESHOLD`` pass, above ``NUMERIC_FAIL_THRESHOLD`` fail and
    anything in between is inconclusive. Roots of ``p`` are skipped.

    Raises:
        PreconditionError: if ``depth`` is below 2.
    """
    if depth is not None and depth < 2:
        raise PreconditionError(f"Series depth must be at least 2, got {depth}")
    samples = [rat(x) for x in (lambda_samples or MONODROMY_LAMBDA_SAMPLES)]
    report = MonodromyReport(eta, precision_bits)
    if eta.degree() <= 0:
        logger.info("eta is constant: no poles to certify")
        return report
    p = T.p.as_poly() if T.p.is_poly else T.p.num
    for sqf, nu in squarefree_factor(eta)[1]:
        size = depth if depth is not None else series_depth(nu)
        for factor, _ in sqf.factor_list()[1]:
            factor = factor.monic()
            if factor.degree() == 1:
                zeta = -Rational(factor.nth(0))
                if p.eval(zeta) == 0:
                    report.entries.append(
                        MonodromyEntry(zeta, factor, "exact", Rational(0), "skipped")
                    )
                    continue
                for eigenvalue in samples:
                    entry = _exact_entry(T, factor, zeta, eigenvalue, size)
                    report.entries.append(entry)
                continue
            if p.rem(factor).is_zero:
                report.entries.append(
                    MonodromyEntry(None, factor, "numeric", Rational(0), "skipped")
                )
                continue
            with mpmath.workprec(precision_bits):
                for zeta in mpmath.polyroots(
                    mp_coeffs(factor), maxsteps=200, extraprec=precision_bits
                ):
                    for eigenvalue in samples:
                        report.entries.append(
                            _numeric_entry(T, factor, zeta, eigenvalue, size)
                        )
    logger.info(
        "Monodromy certificate: %s over %d entries", report.verdict, len(report.entries)
    )
    return report


# Semi-simplicity
@dataclass(frozen=True)
class DefectiveEigenvalue:
    """A non-diagonalizable eigenvalue with a generalized eigenvector ``witness``.

    ``image`` is ``T[witness]``, whose difference from ``eigenvalue * witness`` is a
    genuine eigenvector.
    """

    eigenvalue: Rational
    algebraic: int
    geometric: int
    witness: Poly
    image: Poly


@dataclass
class SemisimplicityReport:
    dim: int
    multiplicities: Dict[Rational, Tuple[int, int]]
    defective: List[DefectiveEigenvalue] = field(default_factory=list)

    @property
    def semisimple(self) -> bool:
        return not self.defective


def _action_matrix(T: SecondOrderOp, basis: SubspaceBasis) -> Matrix:
    """Matrix of ``T`` on the basis; coordinates are coefficients at basis degrees."""
    degrees = basis.degrees
    dim = len(degrees)
    columns = []
    for b in basis.basis:
        image = T.apply(b)
        if not image.is_poly:
            raise SubspaceError(f"T[{b.as_expr()}] is not a polynomial")
        image = image.as_poly()
        c = coeffs(image)
        column = [c[k] if k < len(c) else Rational(0) for k in degrees]
        rebuilt = sum(
            (b_i.mul_ground(x) for b_i, x in zip(basis.basis, column)), poly()
        )
        if rebuilt != image:
            raise SubspaceError(f"T[{b.as_expr()}] leaves the subspace")
        columns.append(column)
    return Matrix(dim, dim, lambda i, j: columns[j][i])


def _witness(A: Matrix, eigenvalue: Rational, basis: SubspaceBasis) -> Poly:
    shifted = A - eigenvalue * sympy.eye(A.rows)
    eigenspace = shifted.nullspace()
    for v in (shifted * shifted).nullspace():
        if any(shifted * v):
            v = _orthogonal_representative(v, eigenspace)
            w = sum((b.mul_ground(x) for b, x in zip(basis.basis, v)), poly())
            return w.monic()
    raise IdentityViolation(f"generalized eigenvector for defective {eigenvalue}")


def semisimplicity_check(
    T: SecondOrderOp, basis: SubspaceBasis
) -> SemisimplicityReport:
    """Compare algebraic and geometric multiplicities of ``T`` on ``span(basis)``.

    Raises:
        SubspaceError: if ``T`` does not map the span into itself.
    """
    A = _action_matrix(T, basis)
    dim = A.rows
    diagonal = [A[i, i] for i in range(dim)]
    report = SemisimplicityReport(dim, {})
    for eigenvalue in sorted(set(diagonal)):
        algebraic = diagonal.count(eigenvalue)
        shifted = A - eigenvalue * sympy.eye(dim)
        geometric = dim - rank(shifted.tolist(), dim)
        report.multiplicities[eigenvalue] = (algebraic, geometric)
        if algebraic != geometric:
            w = _witness(A, eigenvalue, basis)
            report.defective.append(
                DefectiveEigenvalue(
                    eigenvalue, algebraic, geometric, w, T.apply(w).as_poly()
                )
            )
            logger.info(
                "Eigenvalue %s is defective: algebraic %d, geometric %d",
                eigenvalue,
                algebraic,
                geometric,
            )
    return report
