"""Numerical Gevrey wave-front sets of sampled one-dimensional signals."""

__version__ = "0.1.0"

from .decay import INCONCLUSIVE, REGULAR, SINGULAR, ClassifierParams, Cone, DecayReport, classify
from .exceptions import (BudgetError, CharacteristicError, ConfigurationError, FitError, GeometryError,
                         ResolutionError, WavefrontError)
from .grid import Grid, GridSignal, Spectrum, forward_transform, inverse_transform
from .operators import OperatorSpec, apply_operator
from .scanner import ProbeSet, WavefrontEstimate, scan, singular_support
from .windows import WindowSpec

__all__ = [
    "__version__", "Grid", "GridSignal", "Spectrum", "forward_transform", "inverse_transform", "WindowSpec",
    "ClassifierParams", "Cone", "DecayReport", "classify", "REGULAR", "SINGULAR", "INCONCLUSIVE",
    "ProbeSet", "WavefrontEstimate", "scan", "singular_support", "OperatorSpec", "apply_operator",
    "WavefrontError", "ConfigurationError", "GeometryError", "ResolutionError", "BudgetError", "FitError",
    "CharacteristicError",
]
