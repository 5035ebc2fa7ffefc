"""Pseudo-Hermitian curvature toolkit: tensor algebra, pointwise inequalities,
Heisenberg-group calculus, conformal examples and rigidity thresholds."""

__version__ = "0.1.0"

from .errors import CRKitError, DomainError, InvariantViolation, SymmetryError  # noqa: E402
