# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.
"""Default settings used throughout xopspy.

Numeric settings
----------------

.. data:: PRECISION_BITS

    Working precision (in bits) of all high precision computations: numeric
    monodromy, quadrature and root isolation. Override with the environment variable
    ``XOPSPY_PRECISION_BITS``.

.. data:: NUMERIC_PASS_THRESHOLD

    A numeric obstruction below this magnitude counts as zero.

.. data:: NUMERIC_FAIL_THRESHOLD

    A numeric obstruction above this magnitude counts as nonzero. Values in between
    produce an ``inconclusive`` verdict.

Exact algorithms
----------------

.. data:: GCD_WINDOW

    Number of consecutive degrees over which the GCD of eigenpolynomials must be
    unchanged before it is accepted. Override with ``XOPSPY_GCD_WINDOW``.

.. data:: MAX_INTERTWINER_ORDER

    Cap on the order of intertwiners searched by
    :func:`xopspy.darboux.find_intertwiner`. Override with
    ``XOPSPY_MAX_INTERTWINER_ORDER``.

.. data:: DEFAULT_MAX_DEGREE

    Default degree bound N for eigenpolynomial tables.

.. data:: MONODROMY_LAMBDA_SAMPLES

    Eigenvalues at which trivial monodromy is checked when none are given.

.. data:: GRAM_TOLERANCE

    Largest normalized off-diagonal Gram entry accepted as orthogonal.
"""

import os

PRECISION_BITS = int(os.getenv("XOPSPY_PRECISION_BITS", "256"))
NUMERIC_PASS_THRESHOLD = "1e-40"
NUMERIC_FAIL_THRESHOLD = "1e-10"

GCD_WINDOW = int(os.getenv("XOPSPY_GCD_WINDOW", "5"))
MAX_INTERTWINER_ORDER = int(os.getenv("XOPSPY_MAX_INTERTWINER_ORDER", "8"))
DEFAULT_MAX_DEGREE = 10
MONODROMY_LAMBDA_SAMPLES = ("0", "1", "-1", "1/2", "-7/3")

QUAD_REL_TOL = "1e-30"
QUAD_MAX_SUBDIVISIONS = 6
GRAM_TOLERANCE = "1e-20"


def series_depth(nu: int) -> int:
    """Default Frobenius series depth for a pole with gap count ``nu``."""
    return 2 * (2 * nu + 1) + 10
