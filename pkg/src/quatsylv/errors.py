"""Exception types shared across the package."""

from __future__ import annotations


class QuatSylvError(Exception):
    """Base class for all package errors."""


class ShapeMismatch(QuatSylvError, ValueError):
    """Tensor shapes are not conformable for the requested operation."""


class ParseError(QuatSylvError, ValueError):
    """A tensor or spec document could not be decoded."""


class Inconsistent(QuatSylvError):
    """The system has no solution; carries the failing consistency report."""

    def __init__(self, report, stage: str | None = None):
        failing = report.failing() if report is not None else []
        first = failing[0].condition_id if failing else "?"
        where = f" at stage {stage}" if stage else ""
        super().__init__(f"system is inconsistent{where}: condition {first} fails")
        self.report = report
        self.stage = stage
        self.condition_id = first


class NotEtaHermitianRHS(QuatSylvError, ValueError):
    """A right-hand side of an eta system is not eta-Hermitian."""


class UnknownFixture(QuatSylvError, KeyError):
    """No bundled fixture with the requested id."""


class NoNullSpace(QuatSylvError, ValueError):
    """The targeted coefficient is surjective, so no inconsistent perturbation exists."""


class NumericalError(QuatSylvError, ArithmeticError):
    """A numerical safeguard failed (for example a broken adjoint structure)."""
