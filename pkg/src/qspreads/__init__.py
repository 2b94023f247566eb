"""Spreads, partial parallelisms, and exact bounds for finite vector spaces."""

__version__ = "0.1.0"

from .errors import BudgetExceededError, CertificationError
from .field import ZERO, FieldTower, ScalarField, build_tower

__all__ = [
    "BudgetExceededError",
    "CertificationError",
    "ZERO",
    "FieldTower",
    "ScalarField",
    "build_tower",
    "__version__",
]
