"""State-conditional KDE-bulk + GPD-tail mixture predictor.

The observed interference range is cut into ``L`` quantile states. For every
state the *successor* values (the next-slot interference after an observation
in that state) are modelled by a mixture: a Gaussian KDE below a high
threshold ``u`` and a generalized Pareto tail above it. Prediction returns the
``eta``-quantile of the successor distribution of the current state.

States are indexed from 0 in code.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import DegeneratePartition, InsufficientData, InsufficientTail
from .evt import MIN_EXCEEDANCES, GpdParams, TailModel, fit_gpd_mle, tail_quantile
from .kde import KdeModel, kde_cdf, kde_quantile, select_bandwidth

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class StatePartition:
    """Half-open intervals ``[b[l], b[l+1])`` with ``b[0] = 0`` and ``b[L] = inf``."""

    boundaries: tuple[float, ...]

    def __post_init__(self):
        b = np.asarray(self.boundaries, dtype=float)
        if len(b) < 2 or b[0] != 0.0 or not np.isinf(b[-1]):
            raise ValueError("boundaries must start at 0 and end at +inf")
        if np.any(np.diff(b) <= 0):
            raise DegeneratePartition("boundaries must be strictly increasing")

    @property
    def num_states(self) -> int:
        return len(self.boundaries) - 1

    @property
    def inner(self) -> np.ndarray:
        return np.asarray(self.boundaries[1:-1], dtype=float)

    def state_of(self, inr):
        return state_of(inr, self)


def build_partition(samples, L: int, scheme: str = "equiprobable") -> StatePartition:
    """Quantile-based partition of the interference range into ``L`` states.

    ``equiprobable`` puts inner boundaries at the ``j/L`` empirical quantiles.
    ``tail_refined`` uses ``L - 2`` equiprobable levels over the body and adds
    the 95th and 99th percentiles, giving finer resolution in the upper tail.
    """
    x = np.asarray(samples, dtype=float)
    if L < 1:
        raise ValueError("L must be >= 1")
    if np.unique(x).size < L:
        raise DegeneratePartition(
            f"{np.unique(x).size} distinct values cannot fill {L} states"
        )
    if scheme == "equiprobable":
        levels = np.arange(1, L) / L
    elif scheme == "tail_refined":
        if L < 4:
            raise ValueError("tail_refined needs L >= 4")
        body = np.arange(1, L - 2) / (L - 2)
        levels = np.concatenate([body[body < 0.95], [0.95, 0.99]])
    else:
        raise ValueError(f"unknown partition scheme {scheme!r}")
    inner = np.quantile(x, levels) if len(levels) else np.array([])
    bounds = (0.0, *map(float, inner), np.inf)
    if np.any(np.diff(bounds) <= 0):
        raise DegeneratePartition("quantile boundaries are not strictly increasing")
    part = StatePartition(bounds)
    counts = np.bincount(state_of(x, part), minlength=part.num_states)
    if np.any(counts == 0):
        raise DegeneratePartition(f"empty state(s) in partition, counts={counts.tolist()}")
    return part


def state_of(inr, partition: StatePartition):
    """Index of the state containing ``inr``; values on a boundary go up."""
    idx = np.searchsorted(partition.inner, inr, side="right")
    return int(idx) if np.ndim(idx) == 0 else idx


@dataclass(frozen=True)
class ConditionalMixture:
    bulk: KdeModel
    tail: TailModel
    sample_count: int
    pooled_tail: bool = False

    @property
    def bulk_mass(self) -> float:
        return 1.0 - self.tail.exceed_prob

    @property
    def _bulk_norm(self) -> float:
        return kde_cdf(self.tail.threshold, self.bulk)

    def cdf(self, x):
        """Mixture CDF: renormalized KDE below the threshold, GPD tail above."""
        x = np.asarray(x, dtype=float)
        u = self.tail.threshold
        below = self.bulk_mass * kde_cdf(np.minimum(x, u), self.bulk) / self._bulk_norm
        above = 1.0 - self.tail.survival(np.maximum(x, u))
        out = np.where(x < u, below, above)
        return float(out) if out.ndim == 0 else out

    def quantile(self, eta: float) -> float:
        if not 0.0 < eta < 1.0:
            raise ValueError(f"eta must lie in (0, 1), got {eta}")
        u = self.tail.threshold
        if eta <= self.bulk_mass:
            level = eta * self._bulk_norm / self.bulk_mass
            if level >= 1.0:
                return u
            return min(kde_quantile(level, self.bulk), u)
        return tail_quantile(1.0 - eta, self.tail)

    def uses_tail(self, eta: float) -> bool:
        return eta > self.bulk_mass


@dataclass(frozen=True)
class MixturePredictor:
    partition: StatePartition
    models: tuple[ConditionalMixture, ...]
    exceed_percentile: float
    global_tail: TailModel
    _cache: dict = field(default_factory=dict, compare=False, repr=False)

    @property
    def num_states(self) -> int:
        return self.partition.num_states

    def conditional_cdf(self, state: int, x):
        return self.models[state].cdf(x)

    def quantile_table(self, eta: float) -> np.ndarray:
        """Per-state ``eta``-quantiles; predictions are a lookup into this table."""
        key = float(eta)
        if key not in self._cache:
            self._cache[key] = np.array([m.quantile(eta) for m in self.models])
        return self._cache[key]

    def predict_next(self, inr, eta: float):
        """Predicted next-slot INR that is not exceeded with probability ``eta``."""
        table = self.quantile_table(eta)
        out = table[state_of(inr, self.partition)]
        return float(out) if np.ndim(out) == 0 else out

    def to_dict(self) -> dict:
        return {
            "kind": "mixture",
            "boundaries": [float(b) for b in self.partition.inner],
            "exceed_percentile": self.exceed_percentile,
            "global_tail": _tail_to_dict(self.global_tail),
            "states": [
                {
                    **_tail_to_dict(m.tail),
                    "pooled_tail": m.pooled_tail,
                    "sample_count": m.sample_count,
                    "kernel_variance": m.bulk.kernel_variance,
                    "bulk_samples": m.bulk.samples.tolist(),
                }
                for m in self.models
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MixturePredictor":
        part = StatePartition((0.0, *d["boundaries"], np.inf))
        models = tuple(
            ConditionalMixture(
                bulk=KdeModel(np.array(s["bulk_samples"]), s["kernel_variance"]),
                tail=_tail_from_dict(s),
                sample_count=s["sample_count"],
                pooled_tail=s["pooled_tail"],
            )
            for s in d["states"]
        )
        return cls(part, models, d["exceed_percentile"], _tail_from_dict(d["global_tail"]))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True))

    @classmethod
    def load(cls, path) -> "MixturePredictor":
        return cls.from_dict(json.loads(Path(path).read_text()))


def _tail_to_dict(t: TailModel) -> dict:
    return {
        "threshold": t.threshold,
        "scale": t.params.scale,
        "shape": t.params.shape,
        "exceed_prob": t.exceed_prob,
        "num_exceedances": t.num_exceedances,
    }


def _tail_from_dict(d: dict) -> TailModel:
    return TailModel(
        threshold=d["threshold"],
        exceed_prob=d["exceed_prob"],
        params=GpdParams(d["scale"], d["shape"]),
        num_exceedances=d["num_exceedances"],
    )


def fit_global_tail(samples, exceed_percentile: float,
                    min_exceedances: int = MIN_EXCEEDANCES) -> TailModel:
    """GPD tail over all samples.

    The threshold sits at ``exceed_percentile``; if that leaves fewer than
    ``min_exceedances`` points above it, it is lowered to the order statistic
    with exactly ``min_exceedances`` values above (short training traces).
    """
    x = np.sort(np.asarray(samples, dtype=float))
    u = float(np.quantile(x, exceed_percentile))
    if np.count_nonzero(x > u) < min_exceedances:
        if len(x) <= min_exceedances:
            raise InsufficientTail(
                f"{len(x)} samples cannot supply {min_exceedances} exceedances"
            )
        u = float(x[-(min_exceedances + 1)])
    exc = x[x > u] - u
    return TailModel(u, len(exc) / len(x), fit_gpd_mle(exc, min_exceedances), len(exc))


def fit_conditional(successors, exceed_percentile: float, global_tail: TailModel,
                    global_kernel_variance: float, threshold: float | None = None,
                    min_exceedances: int = MIN_EXCEEDANCES,
                    kernel_variance: float | None = None) -> ConditionalMixture:
    """Fit one state's bulk + tail mixture.

    Tails with fewer than ``min_exceedances`` points reuse the global GPD
    scale and shape with the state's own threshold and exceedance probability.
    Bulks too small for a bandwidth rule borrow the global kernel variance.
    """
    x = np.asarray(successors, dtype=float)
    u = float(np.quantile(x, exceed_percentile)) if threshold is None else float(threshold)
    above = x[x > u]
    bulk = x[x <= u]
    if bulk.size == 0:
        # every successor exceeds a shared threshold; keep the lowest one in the bulk
        u = float(x.min())
        above, bulk = x[x > u], x[x <= u]

    rho = above.size / x.size if above.size else 1.0 - exceed_percentile
    pooled = above.size < min_exceedances
    if not pooled:
        try:
            params = fit_gpd_mle(above - u, min_exceedances)
        except (InsufficientTail, ValueError):
            pooled = True
    if pooled:
        params = global_tail.params
    tail = TailModel(u, rho, params, int(above.size))

    if kernel_variance is None:
        try:
            kernel_variance = select_bandwidth(bulk)
        except Exception:
            kernel_variance = global_kernel_variance
    return ConditionalMixture(KdeModel(bulk, kernel_variance), tail, int(x.size), pooled)


def train(training_trace, L: int = 15, exceed_percentile: float = 0.97, *,
          scheme: str = "equiprobable", per_state_threshold: bool = True,
          min_exceedances: int = MIN_EXCEEDANCES,
          kernel_variance: float | None = None) -> MixturePredictor:
    """Train a mixture predictor on consecutive interference observations.

    Args:
        training_trace: interference values (array or ``InterferenceTrace``).
        L: number of quantile states.
        exceed_percentile: percentile of each state's successors used as the
            tail threshold.
        scheme: partition scheme, see ``build_partition``.
        per_state_threshold: if False, all states share the global threshold.
        min_exceedances: fewest exceedances for a state-local GPD fit.
        kernel_variance: fixed KDE kernel variance overriding the bandwidth rule.

    Raises:
        InsufficientData: fewer than two observations.
        DegenerateSample: no variability to model (includes DegeneratePartition).
    """
    x = np.asarray(getattr(training_trace, "values", training_trace), dtype=float)
    if x.size < 2:
        raise InsufficientData("training needs at least two observations")
    part = build_partition(x, L, scheme)
    current, succ = x[:-1], x[1:]
    global_tail = fit_global_tail(succ, exceed_percentile, min_exceedances)
    global_T = kernel_variance or select_bandwidth(succ[succ <= global_tail.threshold])
    states = state_of(current, part)

    models = []
    for l in range(part.num_states):
        sl = succ[states == l]
        if sl.size == 0:
            # state seen only as the final training sample
            log.debug("state %d has no successors; using the pooled model", l)
            sl = succ
        models.append(
            fit_conditional(
                sl, exceed_percentile, global_tail, global_T,
                threshold=None if per_state_threshold else global_tail.threshold,
                min_exceedances=min_exceedances,
                kernel_variance=kernel_variance,
            )
        )
    return MixturePredictor(part, tuple(models), exceed_percentile, global_tail)
