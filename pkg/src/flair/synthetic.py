"""LSR1 synthetic corpora: M[j, i] = L(i / n_c) * S[j] + noise."""

from __future__ import annotations

import enum
from dataclasses import asdict, dataclass

import numpy as np

from .shape import EPS_POS


class LevelKind(str, enum.Enum):
    RANDOM_WALK = "RandomWalk"
    QUADRATIC_DRIFT = "QuadraticDrift"
    FLAT = "Flat"


class ShapeKind(str, enum.Enum):
    UNIFORM = "Uniform"
    PEAKED_2TO1 = "Peaked2to1"
    SOLAR_NIGHT_ZEROS = "SolarNightZeros"


@dataclass(frozen=True)
class LSR1GenSpec:
    P: int = 24
    n_c: int = 100
    sigma: float = 1.0
    level_kind: LevelKind = LevelKind.QUADRATIC_DRIFT   # smooth L(t) on rescaled time
    shape_kind: ShapeKind = ShapeKind.PEAKED_2TO1
    seed: int = 0
    n_series: int = 1
    horizon: int | None = None          # defaults to one cycle
    base_level: float = 100.0           # mean per-entry value
    level_volatility: float = 0.02      # relative Level step (RandomWalk) or drift size
    freq: str = "H"
    family: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "level_kind", LevelKind(self.level_kind))
        object.__setattr__(self, "shape_kind", ShapeKind(self.shape_kind))
        if self.P < 1 or self.n_c < 1:
            raise ValueError("P and n_c must be positive")

    @property
    def H(self) -> int:
        return self.horizon if self.horizon is not None else self.P

    def to_dict(self) -> dict:
        d = asdict(self)
        d["level_kind"] = self.level_kind.value
        d["shape_kind"] = self.shape_kind.value
        return d


def make_shape(kind, P: int) -> np.ndarray:
    kind = ShapeKind(kind)
    j = np.arange(P)
    if kind is ShapeKind.UNIFORM:
        s = np.ones(P)
    elif kind is ShapeKind.PEAKED_2TO1:
        # "day" is the middle half of the cycle at twice the "night" value
        s = np.where((j >= P // 4) & (j < P // 4 + P // 2), 2.0, 1.0)
    else:
        # night half at eps_pos, daytime half a sine bump
        day = (j >= P // 4) & (j < P // 4 + P // 2)
        bump = np.sin(np.pi * (j - P // 4 + 0.5) / (P // 2))
        s = np.where(day, bump, EPS_POS)
    return s / s.sum()


def make_level(kind, n_cycles: int, total: float, volatility: float, rng) -> np.ndarray:
    """Level (cycle totals) at t = i / n_c for i = 1..n_cycles."""
    kind = LevelKind(kind)
    if kind is LevelKind.FLAT:
        return np.full(n_cycles, total)
    if kind is LevelKind.RANDOM_WALK:
        steps = rng.normal(0.0, volatility * total, n_cycles)
        path = total + np.cumsum(steps)
        return np.maximum(path, 0.05 * total)
    t = np.arange(1, n_cycles + 1) / n_cycles
    a, b = rng.uniform(-1, 1, 2) * volatility * 10
    return total * (1.0 + a * t + b * t**2)


def generate_series(spec: LSR1GenSpec, rng):
    """One (train, test, truth) triple; ``truth`` is the noiseless test path."""
    H = spec.H
    test_cycles = -(-H // spec.P)
    n_cycles = spec.n_c + test_cycles
    S = make_shape(spec.shape_kind, spec.P)
    L = make_level(spec.level_kind, n_cycles, spec.base_level * spec.P, spec.level_volatility, rng)
    clean = np.outer(S, L).T.ravel()
    noisy = clean + rng.normal(0.0, spec.sigma, clean.size)
    n_train = spec.n_c * spec.P
    return noisy[:n_train], noisy[n_train:n_train + H], clean[n_train:n_train + H]


def generate_corpus(spec: LSR1GenSpec) -> list:
    """A list of corpus entries (dicts) ready for evaluation or JSONL output."""
    rng = np.random.default_rng(spec.seed)
    entries = []
    for k in range(spec.n_series):
        train, test, truth = generate_series(spec, rng)
        family = spec.family or f"{spec.level_kind.value}-{spec.shape_kind.value}"
        entries.append({
            "series_id": f"lsr1-{spec.seed}-{k}",
            "family": f"{family}-{k % 10}" if spec.family is None else family,
            "freq": spec.freq,
            "train": train,
            "test": test,
            "truth": truth,
        })
    return entries


def exact_rank1_series(P: int, n_c: int, rng, horizon: int | None = None):
    """Noiseless constant-Level rank-1 series with random positive L and S."""
    S = rng.uniform(0.2, 5.0, P)
    S /= S.sum()
    L = rng.uniform(10.0, 1e4)
    H = horizon if horizon is not None else P
    full = np.tile(L * S, n_c + -(-H // P))
    return full[: n_c * P], full[n_c * P: n_c * P + H]
