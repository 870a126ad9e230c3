"""Finite-blocklength link adaptation over an AWGN-equivalent channel.

Normal approximation: ``b ~= M C(g) - Qinv(eps) sqrt(M V(g))``. Solving the
quadratic in ``sqrt(M)`` gives the blocklength needed for ``b`` bits at error
probability ``eps``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import ndtr, ndtri

from .errors import DomainError, InfeasibleChannel

LOG2E = np.log2(np.e)


def q_func(x):
    """Gaussian tail probability Q(x) = P(Z > x)."""
    return ndtr(-np.asarray(x, dtype=float))


def q_inv(p):
    p_arr = np.asarray(p, dtype=float)
    if np.any((p_arr <= 0) | (p_arr >= 1)):
        raise DomainError(f"q_inv needs p in (0, 1), got {p}")
    out = -ndtri(p_arr)
    return float(out) if out.ndim == 0 else out


def capacity(gamma):
    return np.log2(1.0 + np.asarray(gamma, dtype=float))


def dispersion(gamma):
    g = np.asarray(gamma, dtype=float)
    return LOG2E**2 * (1.0 - (1.0 + g) ** -2)


def sinr_from_inr(snr, inr):
    return np.asarray(snr, dtype=float) / (1.0 + np.asarray(inr, dtype=float))


@dataclass(frozen=True)
class AllocationRequest:
    payload_bits: int
    target_outage: float
    max_blocklength: float | None = None

    def __post_init__(self):
        if self.payload_bits < 1:
            raise ValueError("payload_bits must be >= 1")
        if not 0.0 < self.target_outage <= 0.5:
            raise ValueError("target_outage must lie in (0, 0.5]")


@dataclass(frozen=True)
class AllocationDecision:
    blocklength: int
    predicted_sinr: float
    capped: bool


def blocklength(b, eps, gamma, max_blocklength=None):
    """Real-valued blocklength for ``b`` bits at error ``eps`` and SINR ``gamma``.

    Vectorized over ``gamma``. Values above ``max_blocklength`` are clipped.
    """
    g = np.asarray(gamma, dtype=float)
    if np.any(g <= 0):
        raise InfeasibleChannel("SINR must be positive to carry any bits")
    C, V = capacity(g), dispersion(g)
    q = q_inv(eps)
    if q == 0.0:
        M = b / C
    else:
        qqV = q * q * V
        M = b / C + qqV / (2.0 * C * C) * (1.0 + np.sqrt(1.0 + 4.0 * b * C / qqV))
    if max_blocklength is not None:
        M = np.minimum(M, max_blocklength)
    return M


def required_blocklength(request: AllocationRequest, gamma: float) -> AllocationDecision:
    """Integer allocation: ceiling of the real-valued blocklength, then the cap."""
    if gamma <= 0:
        raise InfeasibleChannel(f"gamma={gamma} cannot carry any bits")
    M = float(blocklength(request.payload_bits, request.target_outage, gamma))
    # guard against ceil(11.000000000000002) = 12
    M = int(np.ceil(M - 1e-9))
    cap = request.max_blocklength
    if cap is not None and M > cap:
        return AllocationDecision(int(cap), float(gamma), True)
    return AllocationDecision(max(M, 1), float(gamma), False)


def achieved_error_probability(M, b, gamma_actual):
    """Error probability of ``b`` bits sent in ``M`` channel uses at SINR ``gamma_actual``."""
    M = np.asarray(M, dtype=float)
    g = np.asarray(gamma_actual, dtype=float)
    C, V = capacity(g), dispersion(g)
    with np.errstate(divide="ignore", invalid="ignore"):
        z = (M * C - b) / np.sqrt(M * V)
    out = np.where(g > 0, q_func(z), 1.0 if b > 0 else 0.0)
    return float(out) if out.ndim == 0 else out


def bits_delivered(M, eps, gamma):
    """Payload supported by ``M`` uses at error ``eps``; the forward normal approximation."""
    return M * capacity(gamma) - q_inv(eps) * np.sqrt(M * dispersion(gamma))
