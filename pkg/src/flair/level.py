"""Cycle-Level model.

Pipeline: Box-Cox -> divide out the secondary index -> centre at the last
value -> prior-centred Ridge (as standard Ridge on the differenced target)
at 25 strengths from one SVD -> GCV softmax average -> damped recursion.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

N_ALPHAS = 25
ALPHA_RANGE = (1e-4, 1e4)
MIN_POSITIVE_FOR_BC = 10
BC_EXP_CLIP = 30.0
BC_GRID = 101
PHI_EPS = 1e-3


def alpha_grid(n: int = N_ALPHAS) -> np.ndarray:
    return np.logspace(np.log10(ALPHA_RANGE[0]), np.log10(ALPHA_RANGE[1]), n)


# --------------------------------------------------------------------------
# Box-Cox


@dataclass(frozen=True)
class BoxCox:
    lam: float = 1.0

    def transform(self, x):
        x = np.asarray(x, dtype=np.float64)
        if self.lam == 1.0:
            return x - 1.0
        if self.lam == 0.0:
            return np.log(x)
        return (np.power(x, self.lam) - 1.0) / self.lam

    def inverse(self, z):
        z = np.asarray(z, dtype=np.float64)
        if self.lam == 1.0:
            return z + 1.0
        if self.lam == 0.0:
            return np.exp(np.clip(z, -BC_EXP_CLIP, BC_EXP_CLIP))
        base = np.maximum(self.lam * z + 1.0, np.finfo(float).tiny)
        return np.exp(np.clip(np.log(base) / self.lam, -BC_EXP_CLIP, BC_EXP_CLIP))


def box_cox_fit(level, min_positive: int = MIN_POSITIVE_FOR_BC, grid: int = BC_GRID) -> BoxCox:
    """Grid MLE of lambda on [0, 1]; identity when data are too few or flat."""
    x = np.asarray(level, dtype=np.float64)
    pos = x[x > 0]
    if pos.size < min_positive or pos.size < x.size:
        return BoxCox(1.0)
    if np.ptp(pos) <= 1e-12 * np.abs(pos).max():
        return BoxCox(1.0)
    lams = np.linspace(0.0, 1.0, grid)
    llf = profile_llf(lams, pos)
    if not np.any(np.isfinite(llf)):
        return BoxCox(1.0)
    return BoxCox(float(lams[np.argmax(np.where(np.isfinite(llf), llf, -np.inf))]))


def profile_llf(lams, x):
    """Gaussian profile log-likelihood of the Box-Cox transform, one value per lambda."""
    lams = np.atleast_1d(np.asarray(lams, dtype=np.float64))
    logx = np.log(np.asarray(x, dtype=np.float64))
    n = logx.size
    # transform x / exp(mean log x) for conditioning; the variance rescales exactly
    with np.errstate(divide="ignore", invalid="ignore"):
        z = np.where(lams[:, None] == 0.0, logx[None, :],
                     np.expm1(lams[:, None] * (logx - logx.mean())[None, :])
                     / np.where(lams == 0.0, 1.0, lams)[:, None])
    var = z.var(axis=1)
    log_var = np.log(var) + 2.0 * lams * logx.mean()
    with np.errstate(divide="ignore"):
        return (lams - 1.0) * logx.sum() - 0.5 * n * log_var


# --------------------------------------------------------------------------
# Level series


@dataclass(frozen=True)
class LevelSeries:
    raw: np.ndarray
    transformed: np.ndarray
    boxcox: BoxCox
    sec: int | None
    sec_index: np.ndarray | None
    divided: np.ndarray
    anchor: float

    @property
    def innovations(self) -> np.ndarray:
        return self.divided - self.anchor

    @property
    def n(self) -> int:
        return self.raw.size

    def sec_factor(self, cycle_index):
        """Secondary index at 0-based cycle positions (training indexing continued)."""
        idx = np.asarray(cycle_index)
        if self.sec_index is None:
            return np.ones(idx.shape)
        return self.sec_index[idx % self.sec]

    def restore(self, innov, cycle_index):
        """Map centred innovations back to the raw Level scale."""
        z = (np.asarray(innov) + self.anchor) * self.sec_factor(cycle_index)
        return self.boxcox.inverse(z)


def secondary_index(transformed, sec: int):
    """Grouped means by ``i mod sec`` normalised to average 1, or None if unusable."""
    x = np.asarray(transformed, dtype=np.float64)
    if sec is None or sec < 2 or x.size < 2 * sec:
        return None
    groups = np.array([x[r::sec].mean() for r in range(sec)])
    if np.any(groups <= 0) or not np.all(np.isfinite(groups)):
        return None
    return groups / groups.mean()


def prepare_level(raw, sec=None, boxcox: BoxCox | None = None) -> LevelSeries:
    raw = np.asarray(raw, dtype=np.float64)
    bc = boxcox if boxcox is not None else box_cox_fit(raw)
    z = bc.transform(raw)
    index = secondary_index(z, sec)
    if index is None:
        sec = None
        divided = z
    else:
        divided = z / index[np.arange(z.size) % sec]
    return LevelSeries(raw, z, bc, sec, index, divided, float(divided[-1]))


def secondary_divide(level: LevelSeries, candidates, P_star: int) -> LevelSeries:
    from .period import secondary_lag

    sec = secondary_lag(candidates, P_star, level.n)
    return prepare_level(level.raw, sec, level.boxcox)


# --------------------------------------------------------------------------
# Ridge


def design(innov, sec=None):
    """Differenced-target design: rows i with features (1, i/n, -L[i-1], L[i-sec]).

    Returns (X, target, rows) with ``rows`` the 0-based cycle index of each row.
    """
    L = np.asarray(innov, dtype=np.float64)
    n = L.size
    start = max(1, sec or 1)
    rows = np.arange(start, n)
    cols = [np.ones(rows.size), (rows + 1) / n, -L[rows - 1]]
    if sec:
        cols.append(L[rows - sec])
    X = np.column_stack(cols)
    return X, L[rows] - L[rows - 1], rows


def feature_row(history, i, n_ref, sec=None):
    """Features for 0-based cycle ``i`` given a (paths, >= i) history of innovations."""
    h = np.atleast_2d(history)
    cols = [np.ones(h.shape[0]), np.full(h.shape[0], (i + 1) / n_ref), -h[:, i - 1]]
    if sec:
        cols.append(h[:, i - sec])
    return np.column_stack(cols)


def softmax_weights(gcv, temperature: str = "gcv_min") -> np.ndarray:
    gcv = np.asarray(gcv, dtype=np.float64)
    g_min = gcv.min()
    tau = g_min if temperature == "gcv_min" else float(np.median(gcv))
    if temperature == "argmin":
        tau = 0.0
    if not tau > 0.0 or not np.isfinite(tau):
        w = (gcv <= g_min).astype(float)
    else:
        w = np.exp(-(gcv - g_min) / tau)
    return w / w.sum()


@dataclass(frozen=True)
class RidgeFit:
    alphas: np.ndarray
    per_alpha: np.ndarray          # (n_alphas, p) standardized-space deviations
    gcv: np.ndarray
    weights: np.ndarray
    coefficients: np.ndarray       # weighted average, standardized space
    x_mean: np.ndarray
    x_scale: np.ndarray
    leverage: float
    loo_residuals: np.ndarray
    fitted_residuals: np.ndarray
    sec: int | None
    n_ref: int

    @property
    def p(self) -> int:
        return self.coefficients.size

    def standardize(self, X):
        return (np.atleast_2d(X) - self.x_mean) / self.x_scale

    def predict(self, X):
        return self.standardize(X) @ self.coefficients

    @property
    def raw_coefficients(self) -> np.ndarray:
        """Deviation coefficients delta on the unstandardized features."""
        d = self.coefficients / self.x_scale
        d = d.copy()
        d[0] = self.coefficients[0] - np.sum(self.coefficients[1:] * self.x_mean[1:] / self.x_scale[1:])
        return d

    @property
    def beta(self) -> np.ndarray:
        """Prior-centred coefficients (beta_2 = 1 - delta_2)."""
        b = self.raw_coefficients.copy()
        b[2] = 1.0 - b[2]
        return b


def standardize_design(X):
    mean = X.mean(axis=0)
    scale = X.std(axis=0)
    mean[0] = 0.0
    scale[0] = 1.0
    scale = np.where(scale > 1e-12 * np.maximum(np.abs(mean), 1.0), scale, 1.0)
    return (X - mean) / scale, mean, scale


def ridge_path(Z, y, alphas):
    """All Ridge solutions from one SVD. Returns (coefs, hat_traces, hat_diags, svd)."""
    u, d, vt = np.linalg.svd(Z, full_matrices=False)
    uty = u.T @ y
    shrink = d[None, :] / (d[None, :] ** 2 + alphas[:, None])
    coefs = (shrink * uty[None, :]) @ vt
    frac = d[None, :] ** 2 / (d[None, :] ** 2 + alphas[:, None])
    traces = frac.sum(axis=1)
    diags = (u**2) @ frac.T           # (n, n_alphas)
    return coefs, traces, diags, (u, d, vt)


def ridge_fit(level: LevelSeries, alphas=None, temperature: str = "gcv_min",
              pin_alpha: float | None = None) -> RidgeFit:
    """Fit the averaged Ridge on the differenced, centred Level."""
    alphas = alpha_grid() if alphas is None else np.asarray(alphas, dtype=np.float64)
    innov = level.innovations
    X, y, _ = design(innov, level.sec)
    n_train = y.size
    if n_train < 1:
        raise ValueError("Level too short for a Ridge fit")
    Z, mean, scale = standardize_design(X)
    coefs, traces, diags, (u, d, vt) = ridge_path(Z, y, alphas)
    resid = y[None, :] - coefs @ Z.T
    rss = np.sum(resid**2, axis=1)
    denom = np.maximum(n_train - traces, 1e-12) ** 2
    gcv = n_train * rss / denom
    if pin_alpha is not None:
        weights = np.isclose(alphas, pin_alpha, rtol=1e-9).astype(float)
        if weights.sum() == 0:
            raise ValueError(f"alpha {pin_alpha} is not on the grid")
        weights /= weights.sum()
    else:
        weights = softmax_weights(gcv, temperature)
    delta = weights @ coefs

    # leverage of the one-step-ahead point, using the full p x p inverse
    p = Z.shape[1]
    d_full = np.zeros(p)
    d_full[: d.size] = d
    v_full = np.linalg.svd(Z, full_matrices=True)[2] if d.size < p else vt
    x_star = feature_row(innov, innov.size, innov.size, level.sec)[0] if innov.size else None
    z_star = (x_star - mean) / scale
    proj = (v_full @ z_star) ** 2
    h_test = float(weights @ (proj[None, :] / (d_full[None, :] ** 2 + alphas[:, None])).sum(axis=1))

    h_diag = diags @ weights
    fitted_res = y - Z @ delta
    loo = fitted_res / np.maximum(1.0 - h_diag, 1e-12)
    return RidgeFit(alphas, coefs, gcv, weights, delta, mean, scale, h_test, loo,
                    fitted_res, level.sec, innov.size)


def prior_centered_solve(X, y_level, alpha, beta_star):
    """Direct minimiser of ||y - X b||^2 + alpha ||b - b*||^2 (reference path)."""
    X = np.asarray(X, dtype=np.float64)
    A = X.T @ X + alpha * np.eye(X.shape[1])
    return np.linalg.solve(A, X.T @ y_level + alpha * np.asarray(beta_star, dtype=np.float64))


# --------------------------------------------------------------------------
# Damping and recursion


def damping(innov) -> float:
    """phi = clip(lag-1 autocorrelation of the Level differences, 0, 1 - eps)."""
    diff = np.diff(np.asarray(innov, dtype=np.float64))
    if diff.size < 3:
        return 0.0
    c = diff - diff.mean()
    denom = float(np.dot(c, c))
    if denom <= 1e-300:
        return 0.0
    rho = float(np.dot(c[1:], c[:-1]) / denom)
    return min(max(rho, 0.0), 1.0 - PHI_EPS)


def recurse_innovations(fit: RidgeFit, innov, n_steps: int, phi: float, noise=None):
    """Roll the increment model forward on the centred scale.

    ``noise`` is an optional (paths, n_steps) array added to each damped
    increment. Returns a (paths, n_steps) array of future innovations.
    """
    innov = np.asarray(innov, dtype=np.float64)
    n = innov.size
    paths = 1 if noise is None else noise.shape[0]
    hist = np.empty((paths, n + n_steps))
    hist[:, :n] = innov
    for h in range(n_steps):
        i = n + h
        inc = fit.predict(feature_row(hist, i, fit.n_ref, fit.sec)) * phi**h
        if noise is not None:
            inc = inc + noise[:, h]
        hist[:, i] = hist[:, i - 1] + inc
    return hist[:, n:]


def forecast_levels(fit: RidgeFit, level: LevelSeries, n_steps: int, phi: float, noise=None):
    """Future Level values on the (shifted) input scale.

    One row per noise path; a 1-D array when ``noise`` is None.
    """
    future = recurse_innovations(fit, level.innovations, n_steps, phi, noise)
    out = level.restore(future, np.arange(level.n, level.n + n_steps))
    return out[0] if noise is None else out
