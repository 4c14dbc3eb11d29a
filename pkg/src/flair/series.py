"""Domain types shared by the whole pipeline.

A :class:`TimeSeries` is validated once at construction (non-empty, finite)
and is read-only afterwards. The positivity shift and the integer-value check
are the two transforms applied at pipeline entry.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

INTEGER_TOL = 1e-9


class IngestionError(ValueError):
    """Raised when a series cannot enter the pipeline (empty, NaN, inf)."""


class InsufficientData(ValueError):
    """Raised when a series is too short for the requested operation."""


class Freq(str, enum.Enum):
    SECOND_10 = "10-second"
    MINUTE_5 = "5-minute"
    MINUTE_10 = "10-minute"
    MINUTE_15 = "15-minute"
    MINUTE_30 = "30-minute"
    HOURLY = "hourly"
    DAILY = "daily"
    WEEKLY = "weekly"
    MONTHLY = "monthly"
    QUARTERLY = "quarterly"
    YEARLY = "yearly"
    UNKNOWN = "unknown"

    @classmethod
    def parse(cls, code) -> "Freq":
        """Map a pandas-style code ("H", "30T", ...) or a long name to a tag.

        Anything unrecognised maps to ``UNKNOWN``.
        """
        if isinstance(code, Freq):
            return code
        if code is None:
            return cls.UNKNOWN
        key = str(code).strip()
        if key in _CODES:
            return _CODES[key]
        key = key.upper()
        if key in _CODES:
            return _CODES[key]
        for member in cls:
            if member.value.upper() == key:
                return member
        return cls.UNKNOWN


_CODES = {
    "10S": Freq.SECOND_10,
    "5T": Freq.MINUTE_5,
    "5MIN": Freq.MINUTE_5,
    "10T": Freq.MINUTE_10,
    "10MIN": Freq.MINUTE_10,
    "15T": Freq.MINUTE_15,
    "15MIN": Freq.MINUTE_15,
    "30T": Freq.MINUTE_30,
    "30MIN": Freq.MINUTE_30,
    "H": Freq.HOURLY,
    "1H": Freq.HOURLY,
    "D": Freq.DAILY,
    "1D": Freq.DAILY,
    "W": Freq.WEEKLY,
    "W-SUN": Freq.WEEKLY,
    "M": Freq.MONTHLY,
    "MS": Freq.MONTHLY,
    "ME": Freq.MONTHLY,
    "Q": Freq.QUARTERLY,
    "QS": Freq.QUARTERLY,
    "QE": Freq.QUARTERLY,
    "Y": Freq.YEARLY,
    "A": Freq.YEARLY,
    "YS": Freq.YEARLY,
    "YE": Freq.YEARLY,
}


def _frozen(values) -> np.ndarray:
    arr = np.array(values, dtype=np.float64).ravel()
    arr.setflags(write=False)
    return arr


def detect_integer_valued(values, tol: float = INTEGER_TOL) -> bool:
    """True iff every value is within ``tol`` of its nearest integer."""
    arr = np.asarray(getattr(values, "values", values), dtype=np.float64)
    return bool(np.all(np.abs(arr - np.round(arr)) <= tol))


@dataclass(frozen=True)
class TimeSeries:
    values: np.ndarray
    freq: Freq = Freq.UNKNOWN
    is_integer_valued: bool = field(init=False)

    def __post_init__(self):
        arr = _frozen(self.values)
        if arr.size == 0:
            raise IngestionError("series is empty")
        if not np.all(np.isfinite(arr)):
            raise IngestionError("series contains NaN or infinite values")
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "freq", Freq.parse(self.freq))
        object.__setattr__(self, "is_integer_valued", detect_integer_valued(arr))

    def __len__(self):
        return self.values.size


@dataclass(frozen=True)
class ShiftedSeries:
    values: np.ndarray
    shift: float

    def __len__(self):
        return self.values.size

    def unshift(self, x):
        return np.asarray(x) - self.shift


def positivity_shift(series) -> ShiftedSeries:
    """Add ``max(1 - min(y), 1)`` so every entry is at least 1."""
    y = np.asarray(getattr(series, "values", series), dtype=np.float64)
    if y.size == 0:
        raise IngestionError("series is empty")
    if not np.all(np.isfinite(y)):
        raise IngestionError("series contains NaN or infinite values")
    shift = max(1.0 - float(y.min()), 1.0)
    return ShiftedSeries(_frozen(y + shift), shift)


@dataclass(frozen=True)
class Horizon:
    steps: int

    def __post_init__(self):
        if int(self.steps) != self.steps or self.steps < 1:
            raise ValueError(f"horizon must be a positive integer, got {self.steps!r}")
        object.__setattr__(self, "steps", int(self.steps))


class Branch(str, enum.Enum):
    RANK1 = "Rank1"
    PLAIN_RIDGE = "PlainRidge"
    LAST_VALUE_GAUSSIAN = "LastValueGaussian"


@dataclass(frozen=True)
class ForecastResult:
    point: np.ndarray
    samples: np.ndarray
    branch: Branch
    diagnostics: dict

    @property
    def horizon(self) -> int:
        return self.point.size
