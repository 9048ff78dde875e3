"""Spectral solvers and revival analysis for two dispersive boundary value problems."""

from .airy import AiryRevival
from .dislocation import DislocationRevival
from .exceptions import (
    AccuracyError,
    ConvergenceError,
    DomainError,
    RevlabError,
    SingularityError,
)
from .piecewise import ModulatedFn, PeriodicPoint, PiecewiseFn
from .validation import AiryRationalTime, DislocRationalTime

__all__ = [
    "AccuracyError",
    "AiryRationalTime",
    "AiryRevival",
    "ConvergenceError",
    "DislocRationalTime",
    "DislocationRevival",
    "DomainError",
    "ModulatedFn",
    "PeriodicPoint",
    "PiecewiseFn",
    "RevlabError",
    "SingularityError",
]

__version__ = "0.1.0"
