"""Numerical laboratory for integrable oscillators and MICZ-Kepler-like systems.

Every integrability, reduction and separation statement is checked through
exact Poisson-bracket residuals, level-set identities and trajectory drift.
"""

from .brackets import (
    CANONICAL_4D,
    TWISTED,
    ContractError,
    Curvature,
    DomainError,
    Observable,
    PhasePoint4C,
    PoissonStructure,
    ReducedPoint3,
    SingularityError,
    SystemParams,
    check_jacobi,
    grad,
    hamiltonian_vector_field,
    poisson_bracket,
)

__all__ = [
    "CANONICAL_4D",
    "TWISTED",
    "ContractError",
    "Curvature",
    "DomainError",
    "Observable",
    "PhasePoint4C",
    "PoissonStructure",
    "ReducedPoint3",
    "SingularityError",
    "SystemParams",
    "check_jacobi",
    "grad",
    "hamiltonian_vector_field",
    "poisson_bracket",
]

__version__ = "0.1.0"
