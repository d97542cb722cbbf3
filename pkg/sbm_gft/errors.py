# -*- coding: UTF8 -*-

from typing import Optional, Sequence


class SBMError(Exception):
    pass


class ValidationError(SBMError, ValueError):
    """
    Raised when an input breaks a precondition: shapes, measures, probabilities, seeds, files.
    """


class ConvergenceError(SBMError, RuntimeError):
    """
    Raised when a numerical procedure does not reach the requested accuracy.
    The residuals achieved are kept on the exception so that callers can report them.
    """

    def __init__(self, message: str, residuals: Optional[Sequence[float]] = None):
        super().__init__(message)
        self.residuals = list(residuals) if residuals is not None else []


class ToleranceError(ConvergenceError):
    """
    An identity that holds exactly in theory failed at the configured tolerance.
    """


class CorrespondenceError(SBMError):
    """
    The eigengroups of a perturbed matrix cannot be matched unambiguously to the original ones.
    """
