"""Low-energy resolvent laboratory for model operators on asymptotically conic spaces."""

from .model import (AngularMode, InvalidParameters, ModelParams, OperatorKind, Potential, RadialCoeffs,
                    SpectralParam, apply_coeffs, apply_conjugation, build_coeffs, validate_params)

__version__ = "0.1.0"

__all__ = [
    "AngularMode", "InvalidParameters", "ModelParams", "OperatorKind", "Potential", "RadialCoeffs",
    "SpectralParam", "apply_coeffs", "apply_conjugation", "build_coeffs", "validate_params",
]
