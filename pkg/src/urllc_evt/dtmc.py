"""First-order discrete-time Markov chain baseline predictor.

Uses the same quantile partition as the mixture predictor. The prediction is
the upper boundary of the ``eta``-quantile successor state; the top state is
represented by the largest training sample.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InsufficientData
from .mixture import StatePartition, build_partition, state_of


@dataclass(frozen=True)
class DtmcPredictor:
    partition: StatePartition
    transitions: np.ndarray
    state_upper_bounds: np.ndarray

    @property
    def num_states(self) -> int:
        return self.partition.num_states

    def quantile_table(self, eta: float) -> np.ndarray:
        if not 0.0 < eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {eta}")
        cum = np.cumsum(self.transitions, axis=1)
        # 1e-12 absorbs rounding in row sums such as 0.99 computed as 0.98999...
        m = np.argmax(cum >= eta - 1e-12, axis=1)
        return self.state_upper_bounds[m]

    def predict_next(self, inr, eta: float):
        out = self.quantile_table(eta)[state_of(inr, self.partition)]
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "kind": "dtmc",
            "boundaries": [float(b) for b in self.partition.inner],
            "transitions": self.transitions.tolist(),
            "state_upper_bounds": self.state_upper_bounds.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DtmcPredictor":
        return cls(
            StatePartition((0.0, *d["boundaries"], np.inf)),
            np.array(d["transitions"], dtype=float),
            np.array(d["state_upper_bounds"], dtype=float),
        )

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True))


def transition_matrix(states: np.ndarray, num_states: int) -> np.ndarray:
    """Empirical row-stochastic transition matrix of an integer state sequence.

    Rows of states never left (no observed successor) are set to the
    marginal occupancy of the sequence.
    """
    states = np.asarray(states, dtype=int)
    counts = np.zeros((num_states, num_states))
    np.add.at(counts, (states[:-1], states[1:]), 1.0)
    marginal = np.bincount(states, minlength=num_states) / len(states)
    totals = counts.sum(axis=1, keepdims=True)
    with np.errstate(invalid="ignore", divide="ignore"):
        P = np.where(totals > 0, counts / totals, marginal[None, :])
    return P / P.sum(axis=1, keepdims=True)


def train_dtmc(training_trace, L: int = 15, partition: StatePartition | None = None) -> DtmcPredictor:
    x = np.asarray(getattr(training_trace, "values", training_trace), dtype=float)
    if x.size < 2:
        raise InsufficientData("training needs at least two observations")
    part = partition if partition is not None else build_partition(x, L)
    states = state_of(x, part)
    P = transition_matrix(states, part.num_states)
    upper = np.append(part.inner, x.max())
    return DtmcPredictor(part, P, upper)
