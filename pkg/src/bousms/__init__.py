"""Multi-symplectic Boussinesq systems: structure tests, traveling waves and simulation."""
from .coeffs import (DispersionCoefficients, NonlinearCoefficients, SystemCoefficients, ThetaNuMu,
                     abcd_from_theta, classify_structure, classify_wellposedness,
                     coefficients_from_mapping, preset)
from .errors import (BlowUpError, BousmsError, ConvergenceError, DegenerateError, DomainError,
                     NoBifurcationError, StructureError, UnsupportedRegimeError, WrongSolverError)
from .spectralkit import PeriodicGrid

__all__ = [
    "DispersionCoefficients", "NonlinearCoefficients", "SystemCoefficients", "ThetaNuMu",
    "abcd_from_theta", "classify_structure", "classify_wellposedness",
    "coefficients_from_mapping", "preset", "PeriodicGrid",
    "BousmsError", "DomainError", "StructureError", "DegenerateError", "NoBifurcationError",
    "WrongSolverError", "UnsupportedRegimeError", "ConvergenceError", "BlowUpError",
]
__version__ = "0.1.0"
