"""Ricci metrics on surfaces: curvature checks, spinor and Weierstrass-Enneper
constructions, log-harmonic functions and conical metrics."""

from .analytic import Chart, GridField, LaurentSeries
from .conformal import ConformalMetric, gaussian_curvature, ricci_residual, sign_analysis
from .errors import DomainError, NotHarmonicError, PreconditionError
from .spinor import SpinorPair, metric_from_spinor
from .weierstrass import WEData, immerse

__version__ = "0.1.0"

__all__ = [
    "Chart",
    "ConformalMetric",
    "DomainError",
    "GridField",
    "LaurentSeries",
    "NotHarmonicError",
    "PreconditionError",
    "SpinorPair",
    "WEData",
    "gaussian_curvature",
    "immerse",
    "metric_from_spinor",
    "ricci_residual",
    "sign_analysis",
]
