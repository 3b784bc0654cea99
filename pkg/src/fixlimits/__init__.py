"""Executable checks for fixed points, self-reference and transparency.

Modules: ``lattice`` (finite powerset lattices, Kleene iteration),
``truth`` (three-valued grounded truth, LP), ``mucalc`` (modal mu-calculus),
``gl`` (provability-logic frames), ``gaming`` (self-auditing toy programs),
``optimize`` (disclosure risk and accountability), ``scenario``/``cli``
(batch front door).
"""
from .errors import CapacityError, DomainError, FixlimitsError, FuelError, MonotonicityError, ParseError
from .lattice import Operator, Universe, gfp, lfp

__version__ = "0.1.0"

__all__ = ["CapacityError", "DomainError", "FixlimitsError", "FuelError", "MonotonicityError", "ParseError",
           "Operator", "Universe", "gfp", "lfp", "__version__"]
