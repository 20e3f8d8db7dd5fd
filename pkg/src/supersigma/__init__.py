"""Grassmann-algebra arithmetic, Berezin integration, and supersymmetric
sigma-model verification on flat tori."""

from .grassmann import (
    DimensionMismatchError,
    GrassmannNumber,
    Parity,
    ParityError,
    generator,
    gmul,
    monomial_sign,
    unit,
)
from .gridfield import GrassmannField, Grid, spectral_derivative, trig_interpolate
from .superdomain import SuperFunction, apply_D, apply_Q
from .berezin import BerezinDomain, berezin_integrate
from .spin_surface import (
    CLIFFORD,
    CliffordConvention,
    GravitinoField,
    SpinorField,
    SurfaceGeometry,
)
from .sigma2d import (
    ActionCoefficients,
    CalibrationError,
    ComponentFields,
    Target,
    UnsupportedRegimeError,
)
from .config import SuiteConfig
from .report import CheckReport, SuiteReport

__version__ = "0.1.0"

__all__ = [
    "ActionCoefficients",
    "BerezinDomain",
    "CLIFFORD",
    "CalibrationError",
    "CheckReport",
    "CliffordConvention",
    "ComponentFields",
    "DimensionMismatchError",
    "GrassmannNumber",
    "GrassmannField",
    "GravitinoField",
    "Grid",
    "Parity",
    "ParityError",
    "SpinorField",
    "SuiteConfig",
    "SuiteReport",
    "SuperFunction",
    "SurfaceGeometry",
    "Target",
    "UnsupportedRegimeError",
    "apply_D",
    "apply_Q",
    "berezin_integrate",
    "generator",
    "gmul",
    "monomial_sign",
    "spectral_derivative",
    "trig_interpolate",
    "unit",
    "__version__",
]
