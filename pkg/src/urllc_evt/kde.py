"""Gaussian kernel density estimate for the bulk of a distribution.

``kernel_variance`` is the kernel's *variance* (not its standard deviation):
each sample contributes ``N(x_n, kernel_variance)``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr

from .errors import DegenerateSample


@dataclass(frozen=True)
class KdeModel:
    samples: np.ndarray
    kernel_variance: float

    def __post_init__(self):
        object.__setattr__(self, "samples", np.sort(np.asarray(self.samples, dtype=float)))
        if self.samples.size == 0:
            raise ValueError("KdeModel needs at least one sample")
        if not self.kernel_variance > 0:
            raise ValueError("kernel_variance must be positive")

    @classmethod
    def fit(cls, samples, kernel_variance: float | None = None) -> "KdeModel":
        if kernel_variance is None:
            kernel_variance = select_bandwidth(samples)
        return cls(np.asarray(samples, dtype=float), kernel_variance)

    @property
    def bandwidth(self) -> float:
        return float(np.sqrt(self.kernel_variance))

    def pdf(self, x):
        return kde_pdf(x, self)

    def cdf(self, x):
        return kde_cdf(x, self)

    def quantile(self, p):
        return kde_quantile(p, self)


def select_bandwidth(samples) -> float:
    """Silverman's robust rule of thumb, returned as a kernel variance.

    ``(1.06 * s * n**-0.2)**2`` with ``s = min(std, IQR/1.34)``; falls back
    to the standard deviation when the IQR is zero.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise DegenerateSample("need at least two samples to select a bandwidth")
    std = x.std(ddof=1)
    if std == 0:
        raise DegenerateSample("zero-variance sample")
    q75, q25 = np.percentile(x, [75, 25])
    iqr = (q75 - q25) / 1.34
    s = min(std, iqr) if iqr > 0 else std
    return float((1.06 * s * x.size ** (-0.2)) ** 2)


def kde_pdf(x, model: KdeModel):
    x = np.asarray(x, dtype=float)
    d = x[..., None] - model.samples
    T = model.kernel_variance
    out = np.exp(-d * d / (2.0 * T)).mean(axis=-1) / np.sqrt(2.0 * np.pi * T)
    return float(out) if out.ndim == 0 else out


def kde_cdf(x, model: KdeModel):
    x = np.asarray(x, dtype=float)
    out = ndtr((x[..., None] - model.samples) / np.sqrt(model.kernel_variance)).mean(axis=-1)
    return float(out) if out.ndim == 0 else out


def kde_quantile(p: float, model: KdeModel, tol: float = 1e-9) -> float:
    """Invert ``kde_cdf`` by bisection.

    The bracket ``[min - 6h, max + 6h]`` is widened if needed so that it
    contains the answer for extreme ``p``.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie in (0, 1), got {p}")
    h = model.bandwidth
    lo = model.samples[0] - 6.0 * h
    hi = model.samples[-1] + 6.0 * h
    while kde_cdf(lo, model) > p:
        lo -= 6.0 * h
    while kde_cdf(hi, model) < p:
        hi += 6.0 * h
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        f = kde_cdf(mid, model)
        if abs(f - p) <= tol * 0.1:
            return mid
        if f < p:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 4 * np.finfo(float).eps * max(abs(lo), abs(hi), 1.0):
            break
    return 0.5 * (lo + hi)
