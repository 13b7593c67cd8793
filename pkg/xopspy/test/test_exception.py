import pytest
from sympy import Rational

from xopspy.exact import Interval
from xopspy.exception import (
    ChainStepError,
    DegenerateSeedError,
    FormatVersionError,
    IdentityViolation,
    InvalidSeedError,
    NoWeightError,
    NotRegularSingularError,
    QuadratureError,
    SubspaceError,
    UnknownFamilyError,
    ZeroInputError,
)


def test_unknown_family_suggestions():
    available = ["hermite", "laguerre", "jacobi"]
    close = UnknownFamilyError("jacoby", available)
    assert str(close) == "Unknown family 'jacoby'. Did you mean 'jacobi'?"
    assert "Did you mean 'laguerre'?" in str(UnknownFamilyError("legendre", available))
    far = UnknownFamilyError("bessel", available, what="family kind")
    assert "Available values are hermite, laguerre, jacobi" in str(far)
    assert str(far).startswith("Unknown family kind 'bessel'")


def test_error_attributes():
    assert DegenerateSeedError(0, 2).pair == (0, 2)
    step_error = ChainStepError(3, "zero Wronskian")
    assert step_error.step == 3
    assert "step 3: zero Wronskian" in str(step_error)
    violation = IdentityViolation("codim U = deg eta", -1)
    assert violation.identity == "codim U = deg eta"
    assert str(violation).endswith("(residual: -1)")
    assert str(IdentityViolation("T L = L T")) == "Identity violated: T L = L T"
    interval = Interval.closure_of(Interval(Rational(0), Rational(1)))
    assert QuadratureError("1e-5", interval, 6).interval is interval


def test_messages():
    assert str(ZeroInputError("monic")) == "monic: zero input"
    assert "is not constant" in str(InvalidSeedError("hermite/I/0", "z"))
    assert "leading order -3" in str(NotRegularSingularError(0, -3, 0))
    assert str(NoWeightError("eta vanishes")) == "No SL-OPS weight: eta vanishes"
    message = str(FormatVersionError("2.0", "1"))
    assert "'2.0'" in message
    assert message.endswith("reads format 1.x")


@pytest.mark.parametrize(
    "error, base",
    [
        (ZeroInputError("x"), ValueError),
        (UnknownFamilyError("x", []), ValueError),
        (FormatVersionError("2", "1"), ValueError),
        (SubspaceError("x"), RuntimeError),
        (QuadratureError(1, None, 0), RuntimeError),
        (IdentityViolation("x"), RuntimeError),
    ],
)
def test_exit_code_classes(error, base):
    # The CLI maps ValueError to invalid input and RuntimeError to failed checks
    assert isinstance(error, base)
