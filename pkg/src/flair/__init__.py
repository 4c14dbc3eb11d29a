"""Rank-1 Level x Shape periodic forecaster with a graceful fallback cascade."""

from .cascade import CascadeConfig, forecast, quantiles
from .diagnostics import Diagnosis, Route, diagnose
from .io import Corpus, ingest
from .series import Branch, ForecastResult, Freq, Horizon, TimeSeries, positivity_shift

__version__ = "0.1.0"

__all__ = [
    "Branch",
    "CascadeConfig",
    "Corpus",
    "Diagnosis",
    "ForecastResult",
    "Freq",
    "Horizon",
    "Route",
    "TimeSeries",
    "diagnose",
    "forecast",
    "ingest",
    "positivity_shift",
    "quantiles",
]
