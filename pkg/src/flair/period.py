"""Calendar period candidates and BIC period selection."""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .reshape import MAX_COMPLETE, reshape
from .series import Freq

MIN_COMPLETE = 3
RSS_FLOOR = 1e-12

_CANDIDATES = {
    Freq.SECOND_10: (6, 360),
    Freq.MINUTE_5: (288, 2016),
    Freq.MINUTE_10: (144, 1008),
    Freq.MINUTE_15: (96, 672),
    Freq.MINUTE_30: (48, 336),
    Freq.HOURLY: (24, 168),
    Freq.DAILY: (7, 30),
    Freq.WEEKLY: (52,),
    Freq.MONTHLY: (12,),
    Freq.QUARTERLY: (4,),
    Freq.YEARLY: (),
    Freq.UNKNOWN: (),
}


class Guard(str, enum.Enum):
    NONE = "None"
    TOO_FEW_CYCLES = "TooFewCycles"
    DOF_GUARD = "DofGuard"


@dataclass(frozen=True)
class PeriodCandidates:
    periods: tuple
    derived_from: Freq = Freq.UNKNOWN

    def __iter__(self):
        return iter(self.periods)

    def __len__(self):
        return len(self.periods)


@dataclass(frozen=True)
class PeriodChoice:
    P_star: int
    bic_scores: dict
    guard_fired: Guard = Guard.NONE
    bic_winner: int = 1
    n_c: int = 0
    sec: int | None = None
    ridge_feature_count: int = 3
    notes: dict = field(default_factory=dict)


def candidates_for(freq) -> PeriodCandidates:
    freq = Freq.parse(freq)
    return PeriodCandidates(tuple(_CANDIDATES[freq]), freq)


def secondary_lag(candidates, P: int, n_c: int):
    """Cycles per secondary period, or None when no usable secondary exists.

    A secondary period must be a strict multiple of P, and the Level must
    cover at least two full secondary periods.
    """
    multiples = sorted(c for c in candidates if c > P and c % P == 0)
    if not multiples:
        return None
    sec = multiples[0] // P
    if n_c < 2 * sec:
        return None
    return sec


def _bic(n, rss, k):
    return n * math.log(rss / n) + k * math.log(n)


def bic_scores(values, candidates, max_cycles: int = MAX_COMPLETE) -> dict:
    """BIC for the P=1 null and every candidate with at least 3 cycles."""
    y = np.asarray(getattr(values, "values", values), dtype=np.float64)
    n = y.size
    scale = float(np.dot(y, y))
    floor = max(RSS_FLOOR * scale, np.finfo(float).tiny)
    scores = {1: _bic(n, max(n * float(np.var(y)), floor), 1)}
    for P in sorted(set(int(c) for c in candidates)):
        if P < 2 or y.size // P < MIN_COMPLETE:
            continue
        m = reshape(y, P, max_cycles)
        s2 = m.singular_values**2
        n_p = m.n_used
        rss = max(float(s2[1:].sum()), RSS_FLOOR * float(s2.sum()), np.finfo(float).tiny)
        scores[P] = _bic(n_p, rss, P + m.n_c - 1)
    return scores


def select_period(series, candidates, ridge_feature_count=None,
                  max_cycles: int = MAX_COMPLETE) -> PeriodChoice:
    """Pick P* from {1} U candidates by BIC, then apply the cycle/DoF guards.

    ``ridge_feature_count`` fixes p for the DoF guard; by default p is 4 when
    a secondary-period lag is available for the winner and 3 otherwise.
    """
    y = np.asarray(getattr(series, "values", series), dtype=np.float64)
    eligible = [int(c) for c in candidates if int(c) >= 2]
    scores = bic_scores(y, eligible, max_cycles)
    # ties go to the smaller period
    winner = min(scores, key=lambda p: (scores[p], p))
    if winner == 1:
        guard = Guard.NONE
        if eligible and all(y.size // p < MIN_COMPLETE for p in eligible):
            guard = Guard.TOO_FEW_CYCLES
        return PeriodChoice(1, scores, guard, bic_winner=1, n_c=y.size)
    n_c = min(y.size // winner, max_cycles)
    sec = secondary_lag(eligible, winner, n_c)
    p = ridge_feature_count if ridge_feature_count is not None else (4 if sec else 3)
    if n_c < 2 * p:
        return PeriodChoice(1, scores, Guard.DOF_GUARD, bic_winner=winner, n_c=n_c, sec=sec,
                            ridge_feature_count=p)
    return PeriodChoice(winner, scores, Guard.NONE, bic_winner=winner, n_c=n_c, sec=sec,
                        ridge_feature_count=p)
