"""Timelike minimal surfaces in de Sitter space from complex generating data.

Modules
-------
lorentz     Minkowski products, causal character, orientation, null c-basis.
lightcone   Stereographic coordinates of lightlike rays and the vector W(x, y).
grid        Rectangular (u, v) grids, scalar/vector fields, CSV interchange.
wirtinger   Finite-difference Wirtinger calculus and path integration.
oneform     Closed vector 1-forms and their primitives.
surface     Frame assembly from (x, y, mu) and every surface residual.
holomin     Holomorphic generating data: ODE, Möbius constant, phase θ.
gallery     Closed-form example families.
cli         Batch driver.
"""

from .errors import (BranchError, ConfigError, DegenerateBasisError, DegeneratePairError,
                     DegeneratePlaneError, DomainError, IllPosedError,
                     InconsistentGeneratorsError, MarginError, NonHolomorphicError,
                     SurfaceError, UnwrapError)
from .grid import Grid, ScalarField, VectorField
from .residuals import ConditionEntry, ConditionReport, ResidualStats, Tolerances
from .surface import SurfaceFrame, SurfaceGenerators, assemble_frame, verify

__all__ = [
    "BranchError", "ConfigError", "DegenerateBasisError", "DegeneratePairError",
    "DegeneratePlaneError", "DomainError", "IllPosedError", "InconsistentGeneratorsError",
    "MarginError", "NonHolomorphicError", "SurfaceError", "UnwrapError",
    "Grid", "ScalarField", "VectorField",
    "ConditionEntry", "ConditionReport", "ResidualStats", "Tolerances",
    "SurfaceFrame", "SurfaceGenerators", "assemble_frame", "verify",
]
__version__ = "0.1.0"
