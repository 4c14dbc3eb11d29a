"""Point and probabilistic forecast metrics, plus the Seasonal Naive baseline."""

from __future__ import annotations

import numpy as np

DECILES = tuple(round(0.1 * k, 1) for k in range(1, 10))
COVERAGE_LEVELS = (0.5, 0.8, 0.9, 0.95)


class DegenerateMetric(ValueError):
    """A metric denominator is zero; the config should be excluded and counted."""


def seasonal_naive(train, P: int, H: int) -> np.ndarray:
    """Repeat the last observed cycle; P=1 (or a too-short train) carries the last value."""
    y = np.asarray(train, dtype=np.float64)
    P = int(P) if P and int(P) >= 1 else 1
    if y.size < P:
        P = 1
    last = y[y.size - P:]
    return last[np.arange(H) % P]


def mase_scale(train, m: int) -> float:
    y = np.asarray(train, dtype=np.float64)
    m = max(int(m), 1)
    if y.size <= m:
        raise DegenerateMetric(f"train length {y.size} <= seasonal period {m}")
    scale = float(np.mean(np.abs(y[m:] - y[:-m])))
    if scale <= 0.0:
        raise DegenerateMetric("in-sample seasonal-naive MAE is zero")
    return scale


def mase(actual, forecast, train, m: int) -> float:
    actual = np.asarray(actual, dtype=np.float64)
    forecast = np.asarray(forecast, dtype=np.float64)
    return float(np.mean(np.abs(actual - forecast)) / mase_scale(train, m))


def sample_crps(actual: float, samples) -> float:
    """Energy-form CRPS of an empirical sample, O(s log s).

    E|X - y| - 0.5 E|X - X'| with the pairwise term from sorted order
    statistics: sum_{i<j} (x_j - x_i) = sum_i (2i - s + 1) x_(i).
    """
    x = np.sort(np.asarray(samples, dtype=np.float64).ravel())
    s = x.size
    if s == 0:
        raise ValueError("need at least one sample")
    first = np.mean(np.abs(x - actual))
    coef = 2.0 * np.arange(s) - s + 1.0
    pair = 2.0 * np.dot(coef, x) / (s * s)
    return float(first - 0.5 * pair)


def crps_path(actual, samples) -> float:
    """Mean sample-CRPS over the horizon; ``samples`` is (n_samples, H)."""
    actual = np.asarray(actual, dtype=np.float64)
    samples = np.asarray(samples, dtype=np.float64)
    return float(np.mean([sample_crps(actual[h], samples[:, h]) for h in range(actual.size)]))


def pinball(actual, pred, q):
    diff = np.asarray(actual, dtype=np.float64) - np.asarray(pred, dtype=np.float64)
    return np.maximum(q * diff, (q - 1.0) * diff)


def wql(actual, quantile_matrix, levels=DECILES) -> float:
    """Weighted quantile loss: 2 sum pinball / (n_levels * sum |actual|)."""
    actual = np.asarray(actual, dtype=np.float64)
    qm = np.atleast_2d(np.asarray(quantile_matrix, dtype=np.float64))
    levels = np.asarray(levels, dtype=np.float64)
    denom = np.sum(np.abs(actual))
    if denom == 0.0:
        raise DegenerateMetric("sum of |actual| is zero")
    loss = sum(np.sum(pinball(actual, qm[k], q)) for k, q in enumerate(levels))
    return float(2.0 * loss / (levels.size * denom))


def coverage(actual, samples, level: float) -> float:
    """Fraction of actuals inside the central ``level`` interval of the samples."""
    lo, hi = np.quantile(np.asarray(samples), [(1 - level) / 2, (1 + level) / 2], axis=0)
    actual = np.asarray(actual, dtype=np.float64)
    return float(np.mean((actual >= lo) & (actual <= hi)))


def geomean(values) -> float:
    v = np.asarray(values, dtype=np.float64)
    return float(np.exp(np.mean(np.log(v))))
