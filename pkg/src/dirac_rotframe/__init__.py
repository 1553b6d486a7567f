"""Localized Dirac states in a rotating circularly polarized wave plus a static magnetic field."""
from __future__ import annotations

from .core import (ALGEBRA, Branch, DomainError, FieldSign, NormalizedConfig, NumericalError,
                   PhysicalInput, UnsupportedCase, build_algebra, denormalize,
                   localization_length, normalize_input)
from .spectrum import (StateKind, characteristic_roots, lambda_param, series_vs_root_error,
                       singular_momentum, singular_roots, singular_series)
from .states import Frame, GridSpec, build_state, dirac_residual, quadrature_norm, wavefunction_at

__version__ = "0.1.0"

__all__ = [
    "ALGEBRA", "Branch", "DomainError", "FieldSign", "Frame", "GridSpec", "NormalizedConfig",
    "NumericalError", "PhysicalInput", "StateKind", "UnsupportedCase", "build_algebra",
    "build_state", "characteristic_roots", "denormalize", "dirac_residual", "lambda_param",
    "localization_length", "normalize_input", "quadrature_norm", "series_vs_root_error",
    "singular_momentum", "singular_roots", "singular_series", "wavefunction_at", "__version__",
]
