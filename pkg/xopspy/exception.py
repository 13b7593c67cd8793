# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Exception classes used in xopspy.
"""

import difflib
import logging
from typing import Iterable, Optional

logger = logging.getLogger(__name__)


class ZeroInputError(ValueError):
    """Error raised when an operation is undefined for the zero polynomial/function."""

    def __init__(self, operation: str) -> None:
        super().__init__(f"{operation}: zero input")


class PreconditionError(ValueError):
    """Error raised when the arguments of an operation violate its precondition."""


class UnknownFamilyError(ValueError):
    """Error raised when an unknown classical family or seed kind is requested."""

    def __init__(self, name: str, available: Iterable[str], what="family") -> None:
        available = list(available)
        close_matches = difflib.get_close_matches(name, available, n=1)
        if close_matches:
            suggestions = f"Did you mean {close_matches[0]!r}?"
        else:
            suggestions = f"Available values are {', '.join(available)}"
        super().__init__(f"Unknown {what} {name!r}. {suggestions}")


class InvalidSeedError(ValueError):
    """Error raised when a seed fails the Ricatti check against an operator."""

    def __init__(self, seed_name: str, residual, note: str = "") -> None:
        super().__init__(
            f"Invalid seed {seed_name}: Ricatti residual {residual} is not constant"
            f"{note}"
        )


class DegenerateSeedError(ValueError):
    """Error raised when two seeds are dependent (vanishing Wronskian)."""

    def __init__(self, first: int, second: int) -> None:
        self.pair = (first, second)
        super().__init__(
            f"Seeds {first} and {second} are linearly dependent: their Wronskian "
            "vanishes identically"
        )


class ChainStepError(ValueError):
    """Error raised by run_chain when a step cannot be performed."""

    def __init__(self, step: int, reason: str) -> None:
        self.step = step
        super().__init__(f"Darboux chain aborted at step {step}: {reason}")


class NotNaturalError(ValueError):
    """Error raised when an operator is not in natural form for the given eta."""


class NotReducedError(ValueError):
    """Error raised when an operator does not have the reduced exceptional form."""


class NotRegularSingularError(ValueError):
    """Error raised when a local series is requested at an irregular point."""

    def __init__(self, zeta, d: int, ord_p: int) -> None:
        super().__init__(
            f"Point z = {zeta} is not regular singular: leading order {d} differs "
            f"from ord p - 2 = {ord_p - 2}"
        )


class SubspaceError(RuntimeError):
    """Error raised when a polynomial subspace is not invariant under an operator."""


class NoWeightError(ValueError):
    """Error raised when no Sturm-Liouville orthogonality weight can exist."""

    def __init__(self, reason: str) -> None:
        super().__init__(f"No SL-OPS weight: {reason}")


class QuadratureError(RuntimeError):
    """Error raised when high precision quadrature does not converge."""

    def __init__(self, error_estimate, interval, subdivisions: int) -> None:
        self.interval = interval
        super().__init__(
            f"Quadrature did not converge after {subdivisions} subdivisions: "
            f"error estimate {error_estimate} on worst subinterval {interval}"
        )


class IdentityViolation(RuntimeError):
    """Error raised when an exact identity that must hold by construction fails.

    The CLI maps this error to exit code 3.
    """

    def __init__(self, identity: str, residual: Optional[object] = None) -> None:
        self.identity = identity
        details = "" if residual is None else f" (residual: {residual})"
        super().__init__(f"Identity violated: {identity}{details}")


class FormatVersionError(ValueError):
    """Error raised when reading a document with an unsupported format version."""

    def __init__(self, found: str, supported: str) -> None:
        super().__init__(
            f"Unsupported document format version {found!r}; "
            f"this version of xopspy reads format {supported}.x"
        )
