"""Peaks-over-threshold tail model with a generalized Pareto (GPD) fit."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize

from .errors import DegenerateSample, InsufficientTail, QuantileBelowThreshold

XI_EPS = 1e-6
XI_CAP = 5.0
MIN_EXCEEDANCES = 10


@dataclass(frozen=True)
class GpdParams:
    scale: float
    shape: float

    def __post_init__(self):
        if not self.scale > 0:
            raise ValueError(f"GPD scale must be positive, got {self.scale}")

    @property
    def upper_support(self) -> float:
        """Largest admissible exceedance (``inf`` unless shape < 0)."""
        if self.shape < 0:
            return -self.scale / self.shape
        return np.inf


@dataclass(frozen=True)
class TailModel:
    threshold: float
    exceed_prob: float
    params: GpdParams
    num_exceedances: int

    def __post_init__(self):
        if not 0.0 < self.exceed_prob < 1.0:
            raise ValueError(f"exceed_prob must lie in (0, 1), got {self.exceed_prob}")

    def survival(self, x):
        """P(X > x) for x >= threshold."""
        return self.exceed_prob * (1.0 - gpd_cdf(np.asarray(x, float) - self.threshold, self.params))

    def quantile(self, eps):
        return tail_quantile(eps, self)


def gpd_cdf(y, params: GpdParams):
    """GPD CDF of exceedance ``y``; saturates at 1 beyond the upper support."""
    y = np.asarray(y, dtype=float)
    if np.any(y < 0):
        raise ValueError("exceedance must be nonnegative")
    s, xi = params.scale, params.shape
    if abs(xi) < XI_EPS:
        out = -np.expm1(-y / s)
    else:
        z = 1.0 + xi * y / s
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(z > 0, -np.expm1(-np.log1p(xi * y / s) / xi), 1.0)
    return float(out) if out.ndim == 0 else out


def tail_quantile(eps, model: TailModel):
    """Level exceeded with probability ``eps``: ``u + s/xi ((rho/eps)^xi - 1)``."""
    eps_arr = np.asarray(eps, dtype=float)
    rho = model.exceed_prob
    # tiny slack so eps == rho computed via 1 - (1 - rho) is accepted
    if np.any(eps_arr <= 0) or np.any(eps_arr > rho * (1 + 1e-12)):
        raise QuantileBelowThreshold(
            f"eps={eps} outside (0, rho_u={rho}]; use the bulk model"
        )
    s, xi = model.params.scale, model.params.shape
    log_ratio = np.log(rho / np.minimum(eps_arr, rho))
    if abs(xi) < XI_EPS:
        out = model.threshold + s * log_ratio
    else:
        out = model.threshold + s * np.expm1(xi * log_ratio) / xi
    return float(out) if out.ndim == 0 else out


def gpd_nll(params: tuple[float, float], y: np.ndarray) -> float:
    """Negative log-likelihood of exceedances ``y`` under GPD(scale, shape).

    Returns ``inf`` for infeasible points (nonpositive scale or a sample
    beyond the upper support).
    """
    s, xi = params
    if s <= 0:
        return np.inf
    n = len(y)
    if abs(xi) < XI_EPS:
        return n * np.log(s) + y.sum() / s
    z = xi * y / s
    if np.any(z <= -1.0):
        return np.inf
    return n * np.log(s) + (1.0 + 1.0 / xi) * np.log1p(z).sum()


def _moment_init(y: np.ndarray) -> tuple[float, float]:
    m, v = y.mean(), y.var()
    xi = 0.5 * (1.0 - m * m / v)
    s = 0.5 * m * (m * m / v + 1.0)
    if not np.isfinite(gpd_nll((s, xi), y)):
        xi, s = 0.0, m
    return s, float(np.clip(xi, -XI_CAP, XI_CAP))


def fit_gpd_mle(exceedances, min_exceedances: int = MIN_EXCEEDANCES) -> GpdParams:
    """Maximum-likelihood GPD fit to positive threshold exceedances.

    Nelder-Mead over ``(log scale, shape)`` starting from the method-of-moments
    estimate. Infeasible points score ``inf``; shape is confined to
    ``[-XI_CAP, XI_CAP]``. The returned point never has lower likelihood than
    the starting point.
    """
    y = np.asarray(exceedances, dtype=float)
    if len(y) < min_exceedances:
        raise InsufficientTail(f"{len(y)} exceedances < minimum {min_exceedances}")
    if np.any(y <= 0):
        raise ValueError("exceedances must be strictly positive")
    if np.ptp(y) == 0:
        raise DegenerateSample("all exceedances identical")

    s0, xi0 = _moment_init(y)

    def objective(theta):
        log_s, xi = theta
        if abs(xi) > XI_CAP:
            return np.inf
        return gpd_nll((np.exp(log_s), xi), y)

    x0 = np.array([np.log(s0), xi0])
    res = minimize(
        objective, x0, method="Nelder-Mead",
        options={"xatol": 1e-8, "fatol": 1e-10, "maxiter": 4000},
    )
    best = res.x if res.fun <= objective(x0) else x0
    return GpdParams(scale=float(np.exp(best[0])), shape=float(best[1]))


def fit_tail(samples, threshold: float, min_exceedances: int = MIN_EXCEEDANCES) -> TailModel:
    """Fit a tail model to values strictly above ``threshold``."""
    x = np.asarray(samples, dtype=float)
    exc = x[x > threshold] - threshold
    params = fit_gpd_mle(exc, min_exceedances=min_exceedances)
    return TailModel(
        threshold=float(threshold),
        exceed_prob=len(exc) / len(x),
        params=params,
        num_exceedances=len(exc),
    )
