"""Training-window routing: when to trust the rank-1 forecaster."""

from __future__ import annotations

import csv
import enum
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .period import candidates_for, select_period
from .reshape import MAX_COMPLETE, centered_r1, reshape
from .series import TimeSeries, positivity_shift

MIN_CYCLES_ROUTE = 5
ZERO_FRACTION_CROSTON = 0.5
WEAK_R1 = 0.5
HEADLINE_R1 = 0.77
HEADLINE_NC = 10


class Route(str, enum.Enum):
    FLAIR = "Flair"
    SEASONAL_NAIVE = "SeasonalNaive"
    STL_OR_ETS = "StlOrEts"
    CROSTON_LIKE = "CrostonLike"
    PLAIN_RIDGE_OR_FOUNDATION = "PlainRidgeOrFoundation"


@dataclass(frozen=True)
class Diagnosis:
    r1_centered: float
    n_c: int
    P_star: int
    bbp_second_spike_subcritical: bool
    route: Route
    headline_regime: bool
    zero_fraction: float
    reasons: list = field(default_factory=list)

    def to_dict(self) -> dict:
        d = asdict(self)
        d["route"] = self.route.value
        return d


def bbp_second_spike(r1_centered: float, P: int, n_c: int) -> bool:
    """True when the second-spike bound (1 - r1) min(P, n_c) is at or below sqrt(P / n_c)."""
    if P < 2 or n_c < 2:
        raise ValueError("need P >= 2 and n_c >= 2")
    return bbp_terms(r1_centered, P, n_c)[0] <= bbp_terms(r1_centered, P, n_c)[1]


def bbp_terms(r1_centered: float, P: int, n_c: int):
    """(LHS, RHS) of the second-spike inequality."""
    return (1.0 - r1_centered) * min(P, n_c), math.sqrt(P / n_c)


def route_for(P_star: int, n_c: int, zero_fraction: float, r1_centered: float):
    """Apply the four-step rule (plus the intermittent-demand check) in order."""
    if P_star < 2:
        return Route.PLAIN_RIDGE_OR_FOUNDATION, ["no_period"]
    if n_c < MIN_CYCLES_ROUTE:
        return Route.SEASONAL_NAIVE, ["few_cycles"]
    if zero_fraction > ZERO_FRACTION_CROSTON:
        return Route.CROSTON_LIKE, ["intermittent"]
    if r1_centered < WEAK_R1:
        return Route.STL_OR_ETS, ["weak_rank1"]
    return Route.FLAIR, ["rank1_regime"]


def diagnose(series) -> Diagnosis:
    """Route a series using only its training window.

    The period is the BIC winner before the Level DoF guard: the guard is a
    forecaster safety rule, while the routing question is whether a period
    is detectable at all.
    """
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    y = positivity_shift(series).values
    choice = select_period(y, candidates_for(series.freq))
    P = choice.bic_winner
    zero_fraction = float(np.mean(series.values == 0.0))
    if P >= 2:
        m = reshape(y, P, MAX_COMPLETE)
        n_c = m.n_c
        r1 = centered_r1(m.entries)
        subcritical = bbp_second_spike(r1, P, n_c) if n_c >= 2 else True
    else:
        n_c, r1, subcritical = len(series), 0.0, True
    route, reasons = route_for(P, n_c, zero_fraction, r1)
    headline = P >= 2 and r1 >= HEADLINE_R1 and n_c >= HEADLINE_NC
    if choice.guard_fired.value != "None":
        reasons.append(f"guard:{choice.guard_fired.value}")
    return Diagnosis(r1, n_c, P, subcritical, route, headline, zero_fraction, reasons)


PHASE_DIAGRAM_FIELDS = ("series_id", "r1_centered", "n_c", "route", "rel_mase")


def write_phase_diagram(path, rows) -> None:
    """CSV of (series_id, r1_centered, n_c, route, rel_mase) for external plotting."""
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.DictWriter(fh, fieldnames=PHASE_DIAGRAM_FIELDS, extrasaction="ignore")
        w.writeheader()
        for row in rows:
            w.writerow({k: ("" if row.get(k) is None else row.get(k)) for k in PHASE_DIAGRAM_FIELDS})
