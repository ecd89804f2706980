"""Least-squares fit of a bivariate VAR(1) model to Phase I data."""
from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import DataError, EstimationError, StationarityError
from .var1 import STATIONARITY_MARGIN, Var1Model, spectral_radius

MIN_LENGTH = 10
S0_MAX_COND = 1e12


@dataclass(frozen=True, eq=False)
class PhaseISeries:
    """Ordered ``(x_t, y_t)`` observations, shape ``(T, 2)``."""

    observations: np.ndarray

    def __post_init__(self):
        obs = np.array(self.observations, dtype=float)
        if obs.ndim != 2 or obs.shape[1] != 2:
            raise DataError(f"observations must have shape (T, 2), got {obs.shape}")
        if obs.shape[0] < 3:
            raise DataError("a Phase I series needs at least 3 observations")
        if not np.all(np.isfinite(obs)):
            raise DataError("Phase I series contains missing or non-finite values")
        obs.setflags(write=False)
        object.__setattr__(self, "observations", obs)

    @property
    def T(self) -> int:
        return self.observations.shape[0]


@dataclass(frozen=True, eq=False)
class EstimationResult:
    mu: np.ndarray
    phi: np.ndarray
    sigma_eps: np.ndarray
    residuals: np.ndarray
    T: int
    spectral_radius: float
    stationary: bool
    residual_ccf: np.ndarray  # (max_lag, 2, 2); [k-1, i, j] = corr(e_{t,i}, e_{t-k,j})

    @property
    def model(self) -> Var1Model:
        if not self.stationary:
            raise StationarityError(
                f"estimated transition matrix is not stationary (spectral radius {self.spectral_radius:.6g})")
        return Var1Model(self.mu, self.phi, self.sigma_eps)


def residual_cross_correlation(resid: np.ndarray, max_lag: int) -> np.ndarray:
    e = resid - resid.mean(axis=0)
    m = e.shape[0]
    c0 = e.T @ e / m
    scale = np.sqrt(np.outer(np.diag(c0), np.diag(c0)))
    out = np.empty((max_lag, 2, 2))
    for k in range(1, max_lag + 1):
        ck = e[k:].T @ e[:-k] / m if k < m else np.zeros((2, 2))
        out[k - 1] = ck / scale
    return out


def estimate_var1(series: PhaseISeries, min_length: int = MIN_LENGTH, max_lag: int = 5) -> EstimationResult:
    """Mean-centred least-squares VAR(1) fit.

    ``mu`` is the sample mean, ``Phi = S1 S0^{-1}`` from the lag-0/lag-1
    moment matrices of the centred series over ``t = 2..T``, and the
    innovation covariance divides the residual cross-products by ``T - 3``.
    A non-stationary ``Phi`` is returned with ``stationary=False`` and a
    warning rather than an error.
    """
    if not isinstance(series, PhaseISeries):
        series = PhaseISeries(series)
    w = series.observations
    T = series.T
    if T < min_length:
        raise EstimationError(f"series of length {T} is shorter than the minimum {min_length}")
    mu = w.mean(axis=0)
    c = w - mu
    lagged, current = c[:-1], c[1:]
    s0 = lagged.T @ lagged
    s1 = current.T @ lagged
    cond = np.linalg.cond(s0)
    if not np.isfinite(cond) or cond > S0_MAX_COND:
        raise EstimationError("lagged moment matrix S0 is singular (constant or collinear series)")
    phi = np.linalg.solve(s0.T, s1.T).T
    resid = current - lagged @ phi.T
    sigma_eps = resid.T @ resid / (T - 1 - 2)
    sigma_eps = 0.5 * (sigma_eps + sigma_eps.T)
    rad = spectral_radius(phi)
    stationary = rad < 1.0 - STATIONARITY_MARGIN
    if not stationary:
        warnings.warn(f"estimated VAR(1) is not stationary (spectral radius {rad:.6g})", RuntimeWarning,
                      stacklevel=2)
    lags = max(0, min(max_lag, resid.shape[0] - 1))
    return EstimationResult(mu=mu, phi=phi, sigma_eps=sigma_eps, residuals=resid, T=T,
                            spectral_radius=rad, stationary=stationary,
                            residual_ccf=residual_cross_correlation(resid, lags))
