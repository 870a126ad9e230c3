"""Aggregate interference traces from on/off interferers over Rayleigh fading.

Each interferer alternates between geometric idle periods (mean ``1/mu``
slots) and fixed-length messages of ``zeta`` slots. Its channel coefficient is
an equal-tap moving average of i.i.d. circularly-symmetric complex Gaussian
innovations, so ``|h|^2`` is unit-mean exponential with correlation that
decays linearly over ``filter_length`` slots. Noise power is fixed at 1, so
trace values are linear INR.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np

from .errors import NonPositiveValue


def db_to_linear(x):
    out = 10.0 ** (np.asarray(x, dtype=float) / 10.0)
    return float(out) if out.ndim == 0 else out


def linear_to_db(x):
    arr = np.asarray(x, dtype=float)
    if np.any(arr <= 0):
        raise NonPositiveValue(f"linear_to_db needs positive input, got {x!r}")
    out = 10.0 * np.log10(arr)
    return float(out) if out.ndim == 0 else out


def duty_cycle(mu: float, zeta: int) -> float:
    """Long-run fraction of slots an interferer spends transmitting.

    Idle periods are geometric on {1, 2, ...} with mean ``1/mu`` and messages
    last exactly ``zeta`` slots, so the renewal-reward ratio is
    ``zeta / (zeta + 1/mu)``.
    """
    if mu == 0:
        return 0.0
    if not 0 < mu <= 1 or zeta < 1:
        raise ValueError(f"need 0 < mu <= 1 and zeta >= 1, got mu={mu}, zeta={zeta}")
    return zeta / (zeta + 1.0 / mu)


@dataclass(frozen=True)
class SimConfig:
    num_interferers: int = 5
    activation_factor: float = 0.4
    message_duration: int = 10
    filter_length: int = 100
    mean_inr_db: float = 0.0
    mean_snr_db: float = 20.0
    seed: int = 0

    def __post_init__(self):
        if self.num_interferers < 1:
            raise ValueError("num_interferers must be >= 1")
        if not 0.0 <= self.activation_factor <= 1.0:
            raise ValueError("activation_factor must lie in [0, 1]")
        if self.message_duration < 1:
            raise ValueError("message_duration must be >= 1")
        if self.filter_length < 1:
            raise ValueError("filter_length must be >= 1")

    @property
    def warmup(self) -> int:
        return max(self.filter_length, 10 * self.message_duration)

    @property
    def per_interferer_power(self) -> float:
        d = duty_cycle(self.activation_factor, self.message_duration)
        total = float(db_to_linear(self.mean_inr_db))
        if d == 0.0:
            # never transmits; any positive power gives an all-zero trace
            return total / self.num_interferers
        return total / (self.num_interferers * d)

    def with_(self, **changes) -> "SimConfig":
        return replace(self, **changes)


@dataclass
class InterfererState:
    remaining_message: int
    fading_taps: np.ndarray
    power: float

    @property
    def active(self) -> bool:
        return self.remaining_message > 0


@dataclass
class InterferenceTrace:
    values: np.ndarray
    config: SimConfig | None = None

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=float)
        if np.any(self.values < 0):
            raise ValueError("interference values must be nonnegative")

    def __len__(self) -> int:
        return len(self.values)

    @property
    def length(self) -> int:
        return len(self.values)

    def to_csv(self, path) -> None:
        path = Path(path)
        with path.open("w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["slot", "inr_linear"])
            for t, v in enumerate(self.values):
                w.writerow([t, repr(float(v))])

    @classmethod
    def from_csv(cls, path) -> "InterferenceTrace":
        with Path(path).open(newline="") as fh:
            rows = list(csv.DictReader(fh))
        return cls(np.array([float(r["inr_linear"]) for r in rows]))


class InterferenceGenerator:
    """Stateful trace generator; successive ``next_block`` calls continue the same process.

    Example:
        >>> gen = InterferenceGenerator(SimConfig(seed=1))
        >>> train = gen.next_block(1000)
        >>> runtime = gen.next_block(10_000)   # continues fading and traffic
    """

    def __init__(self, config: SimConfig, warmup: bool = True):
        self.config = config
        self.rng = np.random.default_rng(config.seed)
        F = config.filter_length
        power = config.per_interferer_power
        self.states = [
            InterfererState(
                remaining_message=0,
                fading_taps=self._innovations(F - 1),
                power=power,
            )
            for _ in range(config.num_interferers)
        ]
        if warmup:
            self._advance(config.warmup)

    def _innovations(self, n: int) -> np.ndarray:
        z = self.rng.standard_normal((n, 2))
        return (z[:, 0] + 1j * z[:, 1]) / np.sqrt(2.0)

    def _fading_power(self, state: InterfererState, n: int) -> np.ndarray:
        F = self.config.filter_length
        w = np.concatenate([state.fading_taps, self._innovations(n)])
        c = np.concatenate([[0.0], np.cumsum(w)])
        h = (c[F:] - c[:-F]) / np.sqrt(F)
        state.fading_taps = w[len(w) - (F - 1):] if F > 1 else w[:0]
        return np.abs(h) ** 2

    def _activity(self, state: InterfererState, n: int) -> np.ndarray:
        mu, zeta = self.config.activation_factor, self.config.message_duration
        out = np.zeros(n, dtype=bool)
        head = min(state.remaining_message, n)
        out[:head] = True
        state.remaining_message -= head
        pos = head
        if pos == n or mu == 0.0:
            return out
        # idle gap (geometric >= 1) then a full message, repeated
        while pos < n:
            k = int((n - pos) / (zeta + 1.0 / mu)) + 8
            gaps = self.rng.geometric(mu, size=k)
            for g in gaps:
                start = pos + int(g)
                if start > n:
                    return out
                if start == n:
                    state.remaining_message = zeta
                    return out
                stop = min(start + zeta, n)
                out[start:stop] = True
                state.remaining_message = start + zeta - stop
                pos = start + zeta
                if pos >= n:
                    return out
        return out

    def _advance(self, n: int) -> np.ndarray:
        total = np.zeros(n)
        for s in self.states:
            # traffic drawn before fading so each interferer consumes the stream in a fixed order
            active = self._activity(s, n)
            total += s.power * self._fading_power(s, n) * active
        return total

    def next_block(self, length: int) -> InterferenceTrace:
        if length < 1:
            raise ValueError("length must be >= 1")
        return InterferenceTrace(self._advance(length), self.config)


def generate_trace(config: SimConfig, length: int) -> InterferenceTrace:
    """Generate ``length`` post-warm-up slots of aggregate INR."""
    return InterferenceGenerator(config).next_block(length)
