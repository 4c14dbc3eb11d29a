"""The forecaster: branch selection, reconstruction and predictive sampling."""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from . import level as lv
from .period import MIN_COMPLETE, candidates_for, secondary_lag, select_period
from .reshape import MAX_COMPLETE, centered_r1, energy_ratio, reshape
from .series import Branch, ForecastResult, Horizon, TimeSeries, positivity_shift
from .shape import ShapeVariant, variant_shape

DEFAULT_SAMPLES = 200
PHASE_NOISE_K = 50
SHAPE_K = 2
MIN_LOO_FOR_BOOTSTRAP = 4

CANONICAL_CONSTANTS = {
    "shape_k": SHAPE_K,
    "phase_noise_k": PHASE_NOISE_K,
    "min_complete": MIN_COMPLETE,
    "max_complete": MAX_COMPLETE,
    "min_positive_bc": lv.MIN_POSITIVE_FOR_BC,
    "bc_exp_clip": lv.BC_EXP_CLIP,
    "n_alphas": lv.N_ALPHAS,
}


@dataclass(frozen=True)
class CascadeConfig:
    """Forecaster settings.

    ``n_samples`` and ``seed`` are the only user-facing knobs. The remaining
    fields exist for the ablation harness and default to the canonical
    constants.
    """

    n_samples: int = DEFAULT_SAMPLES
    seed: int = 0
    shape_k: int | None = SHAPE_K
    shape_variant: ShapeVariant = ShapeVariant.FROZEN_K2
    phase_noise_k: int = PHASE_NOISE_K
    max_complete: int = MAX_COMPLETE
    force_period: int | None = None
    pin_alpha: float | None = None
    temperature: str = "gcv_min"

    def with_(self, **kw) -> "CascadeConfig":
        return replace(self, **kw)

    @property
    def is_canonical(self) -> bool:
        return (self.shape_k == SHAPE_K and self.shape_variant == ShapeVariant.FROZEN_K2
                and self.phase_noise_k == PHASE_NOISE_K and self.max_complete == MAX_COMPLETE
                and self.force_period is None and self.pin_alpha is None
                and self.temperature == "gcv_min")


@dataclass(frozen=True)
class LevelNoiseModel:
    mode: str                  # "BootstrapLOO" or "StudentT"
    loo_residuals: np.ndarray
    t_dof: int | None = None

    @classmethod
    def from_residuals(cls, loo) -> "LevelNoiseModel":
        loo = np.asarray(loo, dtype=np.float64)
        if loo.size < MIN_LOO_FOR_BOOTSTRAP:
            return cls("StudentT", loo, max(loo.size - 1, 2))
        return cls("BootstrapLOO", loo)

    def draw(self, rng, shape):
        if self.mode == "BootstrapLOO":
            return rng.choice(self.loo_residuals, size=shape, replace=True)
        scale = float(np.std(self.loo_residuals, ddof=1)) if self.loo_residuals.size > 1 else 0.0
        return scale * rng.standard_t(self.t_dof, size=shape)


@dataclass(frozen=True)
class PhaseNoiseModel:
    residual_columns: np.ndarray   # P x k
    deflation: float

    def draw(self, rng, n_paths, n_cycles):
        k = self.residual_columns.shape[1]
        picks = rng.integers(0, k, size=(n_paths, n_cycles))
        # (paths, cycles, P) -> (paths, cycles * P)
        cols = self.residual_columns.T[picks]
        return self.deflation * cols.reshape(n_paths, -1)


@dataclass
class _Fitted:
    """Everything needed to reconstruct forecasts for one training window."""

    P: int
    shape: np.ndarray
    level: lv.LevelSeries
    fit: lv.RidgeFit
    phi: float
    shift: float
    phase: PhaseNoiseModel
    diagnostics: dict = field(default_factory=dict)


def _fit_window(shifted_values, P, candidates, config: CascadeConfig, shift):
    """Fit shape and Level for a fixed period (P=1 means plain Ridge)."""
    y = np.asarray(shifted_values, dtype=np.float64)
    m = reshape(y, P, config.max_complete)
    diag = {"P": P, "n_c": m.n_c}
    if P >= 2:
        K = m.n_c if config.shape_k is None else config.shape_k
        S = variant_shape(m, config.shape_variant, K=K).weights
        diag["r1_shifted"] = energy_ratio(m.singular_values)
        diag["r1_centered"] = centered_r1(m.entries)
        levels = m.level
    else:
        S = np.ones(1)
        levels = m.entries[0]
    sec = secondary_lag(candidates, P, levels.size)
    level = lv.prepare_level(levels, sec)
    fit = lv.ridge_fit(level, temperature=config.temperature, pin_alpha=config.pin_alpha)
    phi = lv.damping(level.innovations)
    residual = m.entries - np.outer(S, levels)
    k = min(config.phase_noise_k, m.n_c)
    phase = PhaseNoiseModel(residual[:, m.n_c - k:], 1.0 / math.sqrt(1.0 + fit.leverage))
    diag.update(
        lam=level.boxcox.lam,
        phi=phi,
        gcv_min=float(fit.gcv.min()),
        sec=level.sec,
        shift=shift,
        leverage=fit.leverage,
    )
    return _Fitted(P, S, level, fit, phi, shift, phase, diag)


def _reconstruct(f: _Fitted, H: int, level_paths):
    """Level paths (paths, cycles) -> value paths (paths, H) on the shifted scale."""
    per_cycle = level_paths[:, :, None] * f.shape[None, None, :]
    return per_cycle.reshape(level_paths.shape[0], -1)[:, :H]


def _rank_or_ridge(series: TimeSeries, H: int, config: CascadeConfig, rng):
    shifted = positivity_shift(series)
    y = shifted.values
    candidates = candidates_for(series.freq)
    if config.force_period is not None:
        P = int(config.force_period)
        n_c = min(y.size // P, config.max_complete) if P >= 1 else 0
        sec = secondary_lag(candidates, P, n_c) if P >= 2 else None
        p = 4 if sec else 3
        if P < 2 or n_c < max(MIN_COMPLETE, 2 * p):
            P = 1
        choice = None
    else:
        choice = select_period(y, candidates, max_cycles=config.max_complete)
        P = choice.P_star
    branch = Branch.RANK1 if P >= 2 else Branch.PLAIN_RIDGE
    f = _fit_window(y, P, candidates, config, shifted.shift)
    if choice is not None:
        f.diagnostics.update(bic_winner=choice.bic_winner, guard=choice.guard_fired.value)
    n_steps = -(-H // P)

    point_levels = lv.forecast_levels(f.fit, f.level, n_steps, f.phi)
    point = _reconstruct(f, H, point_levels[None, :])[0] - f.shift

    noise_model = LevelNoiseModel.from_residuals(f.fit.loo_residuals)
    noise = noise_model.draw(rng, (config.n_samples, n_steps))
    level_paths = lv.forecast_levels(f.fit, f.level, n_steps, f.phi, noise=noise)
    samples = _reconstruct(f, H, level_paths)
    samples = samples + f.phase.draw(rng, config.n_samples, n_steps)[:, :H] - f.shift
    f.diagnostics["level_noise"] = noise_model.mode
    return branch, point, samples, f.diagnostics


def _last_value(series: TimeSeries, H: int, config: CascadeConfig, rng):
    y = series.values
    diffs = np.diff(y)[-SHAPE_K:]
    sd = float(np.sqrt(np.mean(diffs**2))) if diffs.size else 0.0
    point = np.full(H, y[-1])
    samples = y[-1] + sd * rng.standard_normal((config.n_samples, H))
    return Branch.LAST_VALUE_GAUSSIAN, point, samples, {"P": 1, "n_c": y.size, "noise_sd": sd}


def forecast(series, horizon, config: CascadeConfig | None = None) -> ForecastResult:
    """Point forecast and predictive samples for ``horizon`` steps."""
    config = config or CascadeConfig()
    if not isinstance(series, TimeSeries):
        series = TimeSeries(series)
    H = horizon.steps if isinstance(horizon, Horizon) else Horizon(horizon).steps
    if config.n_samples < 1:
        raise ValueError("n_samples must be positive")
    rng = np.random.default_rng(config.seed)
    if len(series) < 3:
        branch, point, samples, diag = _last_value(series, H, config, rng)
    else:
        branch, point, samples, diag = _rank_or_ridge(series, H, config, rng)
    if series.is_integer_valued:
        # + 0.0 folds -0.0 into 0.0
        point = np.round(point) + 0.0
        samples = np.round(samples) + 0.0
    if not (np.all(np.isfinite(point)) and np.all(np.isfinite(samples))):
        raise FloatingPointError("non-finite forecast produced")
    diag["branch"] = branch.value
    point.setflags(write=False)
    samples.setflags(write=False)
    return ForecastResult(point, samples, branch, diag)


def quantiles(result, levels) -> np.ndarray:
    """Per-step empirical quantiles, shape (len(levels), H)."""
    levels = np.atleast_1d(np.asarray(levels, dtype=np.float64))
    if np.any((levels <= 0) | (levels >= 1)):
        raise ValueError("quantile levels must lie strictly inside (0, 1)")
    samples = np.asarray(getattr(result, "samples", result), dtype=np.float64)
    if samples.size == 0:
        raise ValueError("no samples")
    return np.quantile(samples, levels, axis=0, method="linear")
