"""Grouped paired bootstrap, sign-flip permutation test and Holm adjustment."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

DEFAULT_B = 10_000


@dataclass(frozen=True)
class BootstrapCI:
    point: float
    lo: float
    hi: float
    B: int
    n_groups: int
    degenerate: bool = False

    def crosses(self, value: float = 1.0) -> bool:
        return self.lo <= value <= self.hi


def grouped_paired_bootstrap(log_ratios, families, B: int = DEFAULT_B, seed: int = 0,
                             level: float = 0.95) -> BootstrapCI:
    """Percentile CI for exp(mean log-ratio), resampling whole families.

    Each replicate draws families with replacement and pools every config of
    the drawn families, so within-family correlation is preserved.
    """
    x = np.asarray(log_ratios, dtype=np.float64)
    fam = np.asarray(families)
    if x.size == 0:
        raise ValueError("no log-ratios")
    labels, inverse = np.unique(fam, return_inverse=True)
    G = labels.size
    point = float(np.exp(x.mean()))
    if G < 2:
        return BootstrapCI(point, point, point, B, G, degenerate=True)
    sums = np.bincount(inverse, weights=x, minlength=G)
    counts = np.bincount(inverse, minlength=G).astype(float)
    rng = np.random.default_rng(seed)
    draws = rng.multinomial(G, np.full(G, 1.0 / G), size=B).astype(float)
    stat = np.exp((draws @ sums) / (draws @ counts))
    alpha = (1.0 - level) / 2.0
    lo, hi = np.quantile(stat, [alpha, 1.0 - alpha])
    return BootstrapCI(point, float(min(lo, point)), float(max(hi, point)), B, G)


def sign_flip_test(deltas, n_flips: int = DEFAULT_B, seed: int = 0) -> float:
    """Two-sided paired sign-flip permutation p-value for mean(deltas) = 0."""
    d = np.asarray(deltas, dtype=np.float64)
    if d.size == 0:
        return 1.0
    obs = abs(d.mean())
    if obs == 0.0:
        return 1.0
    rng = np.random.default_rng(seed)
    signs = rng.integers(0, 2, size=(n_flips, d.size)) * 2.0 - 1.0
    null = np.abs(signs @ d) / d.size
    return float((1 + np.sum(null >= obs - 1e-15 * obs)) / (n_flips + 1))


def holm_adjust(p_values) -> np.ndarray:
    """Holm step-down adjusted p-values, in the input order."""
    p = np.asarray(p_values, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    m = p.size
    order = np.argsort(p, kind="stable")
    scaled = np.minimum(1.0, (m - np.arange(m)) * p[order])
    adjusted = np.empty(m)
    adjusted[order] = np.maximum.accumulate(scaled)
    return adjusted
