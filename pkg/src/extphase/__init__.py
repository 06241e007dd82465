"""Numerical toolkit for Hamiltonian dynamics on the extended phase space.

Time t and the negative energy -e are treated as an extra canonically
conjugate pair, so time-mixing maps (Lorentz boosts, time scalings, the
KS transformation, TD-oscillator reductions) become ordinary canonical
transformations with generating functions.
"""

__version__ = "0.1.0"

from .errors import (
    CoefficientSingularityError,
    CollisionChartError,
    DegeneracyError,
    DegenerateTimeError,
    DomainEvaluationError,
    ExtphaseError,
    ImplicitSolveError,
    IntegrationStallError,
    SuperluminalError,
    UnphysicalMapError,
)
from .numkit import Dual, IntegratorOptions, Trajectory, integrate, value_of
from .phase import (
    ExtendedPoint,
    HamiltonianSystem,
    Parameterization,
    extended_value,
    lift,
    poisson_extended,
    propagate,
    symplectic_residual,
)
from .transform import (
    GeneratingFunction,
    TransformReport,
    apply_generating,
    embed_conventional,
    hessian_det,
    legendre_convert,
    restriction_report,
    transform_hamiltonian,
)

__all__ = [
    "CoefficientSingularityError",
    "CollisionChartError",
    "DegeneracyError",
    "DegenerateTimeError",
    "DomainEvaluationError",
    "Dual",
    "ExtendedPoint",
    "ExtphaseError",
    "GeneratingFunction",
    "HamiltonianSystem",
    "ImplicitSolveError",
    "IntegrationStallError",
    "IntegratorOptions",
    "Parameterization",
    "SuperluminalError",
    "Trajectory",
    "TransformReport",
    "UnphysicalMapError",
    "apply_generating",
    "embed_conventional",
    "extended_value",
    "hessian_det",
    "integrate",
    "legendre_convert",
    "lift",
    "poisson_extended",
    "propagate",
    "restriction_report",
    "symplectic_residual",
    "transform_hamiltonian",
    "value_of",
]
