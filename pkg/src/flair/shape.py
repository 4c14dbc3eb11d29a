"""Within-cycle Shape estimators.

``frozen_shape`` is the forecaster's estimator: the average of the K most
recent per-cycle proportion columns, renormalised onto the simplex. The
other variants exist for the shape-learning ablation.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.signal import savgol_filter

from .reshape import CycleMatrix

EPS_POS = 1e-9
EWMA_RHO = 0.7


class ShapeVariant(str, enum.Enum):
    FROZEN_K2 = "frozen_k2"
    EWMA = "ewma7"
    FOURIER_J1 = "fourier1"
    SAVITZKY_GOLAY = "savgol"
    JS_UNIFORM = "js_uniform"
    JS_HARMONIC = "js_harmonic"
    POOLED_MLE = "pooled_mle"
    RANK2_SVD = "rank2"
    RANK3_SVD = "rank3"


LEARNING_VARIANTS = tuple(v for v in ShapeVariant if v is not ShapeVariant.FROZEN_K2)


@dataclass(frozen=True)
class ShapeVector:
    weights: np.ndarray
    K_used: int

    @property
    def P(self) -> int:
        return self.weights.size


def to_simplex(profile, eps: float = EPS_POS) -> np.ndarray:
    w = np.maximum(np.asarray(profile, dtype=np.float64), eps)
    w = w / w.sum()
    w.setflags(write=False)
    return w


def _entries(m):
    return np.asarray(getattr(m, "entries", m), dtype=np.float64)


def proportions(m) -> np.ndarray:
    """Each column divided by its column sum."""
    e = _entries(m)
    return e / e.sum(axis=0, keepdims=True)


def frozen_shape(m, K: int = 2) -> ShapeVector:
    e = _entries(m)
    n_c = e.shape[1]
    K = max(1, min(int(K), n_c))
    tilde = proportions(e[:, n_c - K:]).mean(axis=1)
    return ShapeVector(to_simplex(tilde), K)


def _pooled_profile(e):
    return proportions(e).mean(axis=1)


def _first_harmonic(profile):
    P = profile.size
    j = np.arange(P)
    basis = np.column_stack([np.ones(P), np.cos(2 * np.pi * j / P), np.sin(2 * np.pi * j / P)])
    coef, *_ = np.linalg.lstsq(basis, profile, rcond=None)
    return basis @ coef


def _james_stein(e, target, shrinkage=None):
    props = proportions(e)
    n_c = props.shape[1]
    pooled = props.mean(axis=1)
    P = pooled.size
    if shrinkage is None:
        gap = float(np.sum((pooled - target) ** 2))
        if gap == 0.0 or n_c < 2:
            return pooled
        v_hat = float(np.mean(props.var(axis=1, ddof=1))) / n_c
        # positive-part rule; no shrinkage below three phases
        keep = max(0.0, 1.0 - max(P - 3, 0) * v_hat / gap)
    else:
        keep = 1.0 - float(shrinkage)
    return target + keep * (pooled - target)


def _savgol(profile):
    P = profile.size
    window = min(7, P if P % 2 else P - 1)
    if window <= 2:
        return profile
    return savgol_filter(profile, window, 2, mode="wrap")


def _rank_r(e, r, K):
    if min(e.shape) < r:
        return None
    u, s, vt = np.linalg.svd(e, full_matrices=False)
    if s[1] <= s[0] * 1e-14:
        return None
    approx = (u[:, :r] * s[:r]) @ vt[:r]
    return frozen_shape(np.maximum(approx, EPS_POS), K)


def variant_shape(m, kind=ShapeVariant.FROZEN_K2, K: int = 2, shrinkage=None) -> ShapeVector:
    """Shape under one of the ablation variants.

    ``shrinkage`` overrides the James-Stein shrinkage weight (1 = target).
    """
    kind = ShapeVariant(kind)
    e = _entries(m)
    n_c = e.shape[1]
    if kind is ShapeVariant.FROZEN_K2:
        return frozen_shape(e, K)
    if kind is ShapeVariant.EWMA:
        w = EWMA_RHO ** np.arange(n_c - 1, -1, -1, dtype=np.float64)
        return ShapeVector(to_simplex(proportions(e) @ w), n_c)
    if kind is ShapeVariant.POOLED_MLE:
        return ShapeVector(to_simplex(e.sum(axis=1)), n_c)
    if kind is ShapeVariant.FOURIER_J1:
        return ShapeVector(to_simplex(_first_harmonic(_pooled_profile(e))), n_c)
    if kind is ShapeVariant.SAVITZKY_GOLAY:
        return ShapeVector(to_simplex(_savgol(_pooled_profile(e))), n_c)
    if kind is ShapeVariant.JS_UNIFORM:
        target = np.full(e.shape[0], 1.0 / e.shape[0])
        return ShapeVector(to_simplex(_james_stein(e, target, shrinkage)), n_c)
    if kind is ShapeVariant.JS_HARMONIC:
        target = _first_harmonic(_pooled_profile(e))
        return ShapeVector(to_simplex(_james_stein(e, target, shrinkage)), n_c)
    rank = 2 if kind is ShapeVariant.RANK2_SVD else 3
    out = _rank_r(e, rank, K)
    return out if out is not None else frozen_shape(e, K)


__all__ = [
    "EPS_POS",
    "LEARNING_VARIANTS",
    "ShapeVariant",
    "ShapeVector",
    "CycleMatrix",
    "frozen_shape",
    "proportions",
    "to_simplex",
    "variant_shape",
]
