"""Cycle matrix construction and rank-1 energy statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .series import InsufficientData

MAX_COMPLETE = 500


@dataclass(frozen=True)
class CycleMatrix:
    """P x n_c matrix, one column per complete cycle, oldest column first."""

    entries: np.ndarray
    singular_values: np.ndarray

    @property
    def P(self) -> int:
        return self.entries.shape[0]

    @property
    def n_c(self) -> int:
        return self.entries.shape[1]

    @property
    def n_used(self) -> int:
        return self.entries.size

    @property
    def level(self) -> np.ndarray:
        """Column sums (one Level value per cycle)."""
        return self.entries.sum(axis=0)

    @classmethod
    def from_entries(cls, entries) -> "CycleMatrix":
        m = np.array(entries, dtype=np.float64, ndmin=2)
        m.setflags(write=False)
        sv = np.linalg.svd(m, compute_uv=False)
        sv.setflags(write=False)
        return cls(m, sv)


def reshape(series, P: int, max_cycles: int = MAX_COMPLETE) -> CycleMatrix:
    """Fold the trailing ``n_c * P`` values into a cycle matrix.

    The incomplete remainder is dropped from the front so the last column
    ends on the last observation. At most ``max_cycles`` columns are kept.
    """
    y = np.asarray(getattr(series, "values", series), dtype=np.float64)
    P = int(P)
    if P < 1:
        raise ValueError("period must be >= 1")
    if y.size < P:
        raise InsufficientData(f"series of length {y.size} is shorter than period {P}")
    n_c = min(y.size // P, max_cycles)
    tail = y[y.size - n_c * P:]
    return CycleMatrix.from_entries(tail.reshape(n_c, P).T)


def energy_ratio(singular_values) -> float:
    """sigma_1^2 / sum sigma_i^2; 0 for an all-zero spectrum."""
    s2 = np.asarray(singular_values, dtype=np.float64) ** 2
    total = s2.sum()
    if total <= 0.0:
        return 0.0
    return float(s2[0] / total)


@dataclass(frozen=True)
class Rank1Energy:
    r1_shifted: float
    r1_centered: float
    residual: np.ndarray


def centered_r1(entries) -> float:
    m = np.asarray(entries, dtype=np.float64)
    c = m - m.mean(axis=1, keepdims=True)
    # rows that are constant leave exact zeros; guard against 1e-30 style noise
    scale = np.abs(m).max() if m.size else 0.0
    if scale == 0.0 or np.abs(c).max() <= 1e-13 * scale:
        return 0.0
    return energy_ratio(np.linalg.svd(c, compute_uv=False))


def rank1_energy(m: CycleMatrix, K: int = 2) -> Rank1Energy:
    """Shifted and row-centered r1, plus the residual E = M - S L^T."""
    from .shape import frozen_shape

    S = frozen_shape(m, K).weights
    residual = m.entries - np.outer(S, m.level)
    return Rank1Energy(
        r1_shifted=energy_ratio(m.singular_values),
        r1_centered=centered_r1(m.entries),
        residual=residual,
    )


def rank1_relative_residual(entries) -> float:
    """Relative Frobenius error of the best rank-1 approximation."""
    sv = np.linalg.svd(np.asarray(entries, dtype=np.float64), compute_uv=False)
    total = np.sum(sv**2)
    if total == 0.0:
        return 0.0
    return float(np.sqrt(np.sum(sv[1:] ** 2) / total))


def prop1_bound(amplitude_lipschitz: float, min_amplitude: float, P: int):
    """Slow-amplitude bound ``2 C_A P / min|A|`` on the rank-1 relative residual.

    Returns ``None`` (vacuous) outside the regime ``2 C_A P <= min|A|``.
    """
    if min_amplitude <= 0:
        raise ValueError("min_amplitude must be positive")
    if amplitude_lipschitz < 0:
        raise ValueError("amplitude_lipschitz must be non-negative")
    numerator = 2.0 * amplitude_lipschitz * P
    if numerator > min_amplitude:
        return None
    return numerator / min_amplitude
