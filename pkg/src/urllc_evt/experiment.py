"""Monte Carlo experiment harness: train predictors, run the runtime phase, score.

One *draw* is a random mean INR (and activation factor) with its own seeded
interference trace. Every requested method sees the same trace. For each
confidence level and target outage, every runtime slot predicts the next
slot's INR, allocates a blocklength for the predicted SINR and is scored with
the analytic error probability at the SINR that actually occurs.
"""

from __future__ import annotations

import csv
import hashlib
import json
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from .dtmc import train_dtmc
from .errors import UrllcEvtError
from .interference import InterferenceGenerator, SimConfig, db_to_linear
from .link import achieved_error_probability, blocklength, sinr_from_inr
from .mixture import build_partition, train

log = logging.getLogger(__name__)

METHODS = ("mixture", "dtmc", "genie")
TARGETS = tuple(10.0 ** -k for k in range(1, 8))
CSV_HEADER = [
    "method", "eta", "target_outage", "achieved_outage", "underprediction_rate",
    "mean_blocklength", "resource_ratio", "capped_fraction", "inr_db", "seed",
]
TAIL_PERCENTILE = 0.9999


@dataclass(frozen=True)
class ExperimentConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    num_inr_draws: int = 100
    inr_range_db: tuple[float, float] = (-10.0, 5.0)
    # per-draw activation factor; None keeps sim.activation_factor
    activation_range: tuple[float, float] | None = (0.4, 1.0)
    training_samples: int = 1000
    runtime_slots: int = 100_000
    L: int = 15
    exceed_percentile: float = 0.97
    confidence_levels: tuple[float, ...] = (0.95, 0.99)
    target_outages: tuple[float, ...] = TARGETS
    payload_bits: int = 50
    max_blocklength: float | None = None
    methods: tuple[str, ...] = METHODS
    master_seed: int = 0
    integer_blocklength: bool = False
    partition_scheme: str = "equiprobable"
    per_state_threshold: bool = True
    refit_interval: int | None = None
    workers: int = 1

    def __post_init__(self):
        for name in ("num_inr_draws", "training_samples", "runtime_slots", "L", "payload_bits"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if any(not 0 < t < 0.5 for t in self.target_outages):
            raise ValueError("target outages must lie in (0, 0.5)")
        if any(not 0 < e < 1 for e in self.confidence_levels):
            raise ValueError("confidence levels must lie in (0, 1)")
        unknown = set(self.methods) - set(METHODS)
        if unknown:
            raise ValueError(f"unknown methods {sorted(unknown)}")
        if self.refit_interval is not None and self.refit_interval < 1:
            raise ValueError("refit_interval must be positive")

    def quick(self) -> "ExperimentConfig":
        return replace(self, num_inr_draws=10, runtime_slots=10_000)

    def full(self) -> "ExperimentConfig":
        return replace(self, num_inr_draws=100, runtime_slots=100_000)

    def with_(self, **changes) -> "ExperimentConfig":
        return replace(self, **changes)

    def to_dict(self) -> dict:
        d = asdict(self)
        d.pop("workers")
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        d = dict(d)
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ValueError(f"unknown config keys {sorted(extra)}")
        if "sim" in d and isinstance(d["sim"], dict):
            d["sim"] = SimConfig(**d["sim"])
        for key in ("inr_range_db", "activation_range", "confidence_levels",
                    "target_outages", "methods"):
            if d.get(key) is not None:
                d[key] = tuple(d[key])
        return cls(**d)

    @classmethod
    def from_json(cls, path) -> "ExperimentConfig":
        return cls.from_dict(json.loads(Path(path).read_text()))


@dataclass(frozen=True)
class TrialResult:
    method: str
    eta: float
    target_outage: float
    achieved_outage_analytic: float
    underprediction_rate: float
    mean_blocklength: float
    resource_ratio_vs_genie: float
    capped_fraction: float
    inr_draw_db: float
    seed: int
    draw: int = 0
    training_samples: int = 0

    def csv_row(self) -> list[str]:
        vals = [
            self.method, self.eta, self.target_outage, self.achieved_outage_analytic,
            self.underprediction_rate, self.mean_blocklength, self.resource_ratio_vs_genie,
            self.capped_fraction, self.inr_draw_db, self.seed,
        ]
        return [v if isinstance(v, str) else repr(v) for v in vals]


@dataclass
class DrawOutcome:
    draw: int
    seed: int
    inr_db: float
    activation_factor: float
    trace_sha256: str = ""
    trials: list[TrialResult] = field(default_factory=list)
    # largest per-slot error probabilities per (method, eta, target)
    tail_errors: dict = field(default_factory=dict)
    error: str | None = None


@dataclass
class ExperimentReport:
    config: ExperimentConfig
    trials: list[TrialResult]
    draws: list[DrawOutcome]
    aggregates: list[dict]

    @property
    def failed_draws(self) -> list[DrawOutcome]:
        return [d for d in self.draws if d.error is not None]

    def aggregate(self, method: str, eta: float, target: float) -> dict:
        for a in self.aggregates:
            if (a["method"], a["eta"], a["target_outage"]) == (method, eta, target):
                return a
        raise KeyError((method, eta, target))

    def summary(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "aggregates": self.aggregates,
            "draws": [
                {
                    "draw": d.draw, "seed": d.seed, "inr_db": d.inr_db,
                    "activation_factor": d.activation_factor,
                    "trace_sha256": d.trace_sha256, "error": d.error,
                }
                for d in self.draws
            ],
            "num_failed_draws": len(self.failed_draws),
        }


def draw_parameters(config: ExperimentConfig, draw: int) -> tuple[int, float, float]:
    """Seed, mean INR (dB) and activation factor of one draw, derived from the master seed."""
    ss = np.random.SeedSequence([config.master_seed, draw])
    rng = np.random.default_rng(ss)
    lo, hi = config.inr_range_db
    inr_db = float(rng.uniform(lo, hi))
    if config.activation_range is None:
        mu = config.sim.activation_factor
    else:
        mu = float(rng.uniform(*config.activation_range))
    seed = int(ss.generate_state(2, dtype=np.uint64)[1] >> np.uint64(1))
    return seed, inr_db, mu


def _fit(method: str, history: np.ndarray, config: ExperimentConfig):
    if method == "mixture":
        return train(
            history, config.L, config.exceed_percentile,
            scheme=config.partition_scheme,
            per_state_threshold=config.per_state_threshold,
        )
    partition = build_partition(history, config.L, config.partition_scheme)
    return train_dtmc(history, config.L, partition=partition)


def predict_series(method: str, x: np.ndarray, start: int, n_train: int,
                   eta: float, config: ExperimentConfig, models: dict | None = None) -> np.ndarray:
    """Predictions of ``x[start+1 : start+1+R]`` from ``x[start : start+R]``.

    The first model is trained on ``x[start+1-n_train : start+1]``. With
    ``refit_interval`` set, a fresh model is trained on the trailing
    ``n_train`` observations before each block of that many slots.
    """
    R = len(x) - start - 1
    if method == "genie":
        return x[start + 1:].copy()
    step = config.refit_interval or R
    out = np.empty(R)
    models = {} if models is None else models
    for b0 in range(0, R, step):
        t = start + b0  # last observed slot
        key = (method, t)
        if key not in models:
            models[key] = _fit(method, x[t + 1 - n_train: t + 1], config)
        b1 = min(b0 + step, R)
        out[b0:b1] = models[key].predict_next(x[start + b0: start + b1], eta)
    return out


def run_draw(config: ExperimentConfig, draw: int, history: int | None = None) -> DrawOutcome:
    """Run every (method, eta, target) combination on one seeded draw.

    ``history`` is the number of pre-runtime slots generated; training uses
    the last ``training_samples`` of them. Sweeps fix ``history`` so that the
    runtime realization is shared across training sizes.
    """
    seed, inr_db, mu = draw_parameters(config, draw)
    out = DrawOutcome(draw, seed, inr_db, mu)
    n_train = config.training_samples
    history = n_train if history is None else history
    sim = config.sim.with_(mean_inr_db=inr_db, activation_factor=mu, seed=seed)
    x = InterferenceGenerator(sim).next_block(history + config.runtime_slots).values
    out.trace_sha256 = hashlib.sha256(x.tobytes()).hexdigest()
    start = history - 1
    actual = x[start + 1:]

    snr = db_to_linear(sim.mean_snr_db)
    gamma_actual = sinr_from_inr(snr, actual)
    b, cap = config.payload_bits, config.max_blocklength
    n_total = config.num_inr_draws * config.runtime_slots
    keep = min(len(actual), math.ceil(n_total * (1 - TAIL_PERCENTILE)) + 2)

    def allocate(pred, eps):
        M = blocklength(b, eps, sinr_from_inr(snr, pred))
        if config.integer_blocklength:
            M = np.ceil(M - 1e-9)
        capped = np.zeros(M.shape, dtype=bool) if cap is None else M > cap
        if cap is not None:
            M = np.minimum(M, cap)
        return M, capped

    try:
        models: dict = {}
        preds = {
            (m, eta): predict_series(m, x, start, n_train, eta, config, models)
            for m in config.methods for eta in config.confidence_levels
        }
    except UrllcEvtError as exc:
        log.warning("draw %d failed during training: %s", draw, exc)
        out.error = f"{type(exc).__name__}: {exc}"
        return out

    for eps in config.target_outages:
        M_genie, _ = allocate(actual, eps)
        genie_mean = float(M_genie.mean())
        for (method, eta), pred in preds.items():
            M, capped = allocate(pred, eps)
            err = achieved_error_probability(M, b, gamma_actual)
            out.trials.append(TrialResult(
                method=method, eta=eta, target_outage=eps,
                achieved_outage_analytic=float(err.mean()),
                underprediction_rate=float(np.mean(pred < actual)),
                mean_blocklength=float(M.mean()),
                resource_ratio_vs_genie=float(M.mean()) / genie_mean,
                capped_fraction=float(capped.mean()),
                inr_draw_db=inr_db, seed=seed, draw=draw,
                training_samples=n_train,
            ))
            out.tail_errors[(method, eta, eps)] = np.sort(
                np.partition(err, len(err) - keep)[len(err) - keep:]
            )
    return out


def pooled_upper_quantile(tops: list[np.ndarray], n_total: int, q: float) -> float:
    """Linear-interpolation quantile of a pooled population known only by its top values.

    Each array in ``tops`` holds the largest values of one sub-population;
    together they must include the ``n_total - floor((n_total-1) q)`` largest
    values of the pool.
    """
    top = np.sort(np.concatenate(tops))
    h = (n_total - 1) * q
    lo = math.floor(h)
    offset = n_total - len(top)
    i = lo - offset
    if i < 0:
        raise ValueError("not enough top values retained for this quantile")
    hi_val = top[min(i + 1, len(top) - 1)]
    return float(top[i] + (h - lo) * (hi_val - top[i]))


AGG_FIELDS = {
    "mean_achieved_outage": "achieved_outage_analytic",
    "mean_underprediction_rate": "underprediction_rate",
    "mean_blocklength": "mean_blocklength",
    "mean_resource_ratio": "resource_ratio_vs_genie",
    "mean_capped_fraction": "capped_fraction",
}


def aggregate_trials(trials: list[TrialResult]) -> list[dict]:
    """Per (method, eta, target) means over draws, in canonical order."""
    groups: dict = {}
    for t in trials:
        groups.setdefault((t.method, t.eta, t.target_outage), []).append(t)
    rows = []
    for (method, eta, eps), ts in sorted(groups.items(), key=lambda kv: (
            METHODS.index(kv[0][0]), kv[0][1], -kv[0][2])):
        row = {"method": method, "eta": eta, "target_outage": eps, "num_draws": len(ts)}
        for name, attr in AGG_FIELDS.items():
            row[name] = math.fsum(getattr(t, attr) for t in ts) / len(ts)
        rows.append(row)
    return rows


def _build_report(config: ExperimentConfig, draws: list[DrawOutcome]) -> ExperimentReport:
    draws = sorted(draws, key=lambda d: d.draw)
    ok = [d for d in draws if d.error is None]
    if len(ok) < len(draws):
        log.warning("%d of %d draws failed and are excluded", len(draws) - len(ok), len(draws))
    trials = [t for d in ok for t in d.trials]
    aggregates = aggregate_trials(trials)
    n_total = len(ok) * config.runtime_slots
    for row in aggregates:
        key = (row["method"], row["eta"], row["target_outage"])
        row["p9999_error"] = pooled_upper_quantile(
            [d.tail_errors[key] for d in ok], n_total, TAIL_PERCENTILE
        )
    return ExperimentReport(config, trials, draws, aggregates)


def _run_draws(config: ExperimentConfig, history: int | None) -> list[DrawOutcome]:
    idx = range(config.num_inr_draws)
    if config.workers > 1:
        with ProcessPoolExecutor(config.workers) as ex:
            return list(ex.map(run_draw, [config] * len(idx), idx, [history] * len(idx)))
    return [run_draw(config, d, history) for d in idx]


def run_experiment(config: ExperimentConfig) -> ExperimentReport:
    return _build_report(config, _run_draws(config, None))


def sweep_training_sizes(config: ExperimentConfig, sizes) -> dict[int, ExperimentReport]:
    """Repeat the experiment for each training size with seeds and runtime traces held fixed."""
    sizes = [int(s) for s in sizes]
    if not sizes or any(s < 2 for s in sizes) or sizes != sorted(sizes):
        raise ValueError("sizes must be ascending and each at least 2")
    history = max(sizes)
    out = {}
    for n in sizes:
        cfg = config.with_(training_samples=n)
        out[n] = _build_report(cfg, _run_draws(cfg, history))
    return out


def emit_report(report: ExperimentReport, path) -> tuple[Path, Path]:
    """Write ``trials.csv`` and ``summary.json`` into directory ``path``."""
    d = Path(path)
    try:
        d.mkdir(parents=True, exist_ok=True)
        csv_path, json_path = d / "trials.csv", d / "summary.json"
        with csv_path.open("w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(CSV_HEADER)
            for t in report.trials:
                w.writerow(t.csv_row())
        json_path.write_text(json.dumps(report.summary(), indent=2, sort_keys=True) + "\n")
    except OSError as exc:
        raise OSError(f"could not write report to {d}: {exc}") from exc
    return csv_path, json_path


def read_trials(path) -> list[dict]:
    """Parse a ``trials.csv`` back into typed dicts."""
    with Path(path).open(newline="") as fh:
        rows = list(csv.DictReader(fh))
    for r in rows:
        for k in CSV_HEADER[1:]:
            r[k] = int(r[k]) if k == "seed" else float(r[k])
    return rows
