# This file is part of xopspy.
# You should have received the xopspy LICENSE file with this project.

# isort: skip_file

__version__ = "0.3.0"

version = __version__

# Import logging _first_
from . import setup_logging

# Main user API
from .exact import Interval, RatFunc, Z, poly
from .diffop import DiffOp, FirstOrderOp, SecondOrderOp
from .classical import Family, SeedKind, bochner_operator, classical_poly, seed
from .darboux import DarbouxChain, DarbouxStep, run_chain
from .structure import NaturalForm
from .spectral import ExceptionalSystem, eigenpolys, naturalize

from . import (
    classical,
    darboux,
    diffop,
    exact,
    quadform,
    serialize,
    spectral,
    structure,
    util,
)

from .serialize import FORMAT_VERSION
