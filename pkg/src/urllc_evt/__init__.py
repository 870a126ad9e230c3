"""Risk-sensitive interference prediction and finite-blocklength link adaptation."""

from .dtmc import DtmcPredictor, train_dtmc
from .errors import (
    DegeneratePartition,
    DegenerateSample,
    DomainError,
    InfeasibleChannel,
    InsufficientData,
    InsufficientTail,
    NonPositiveValue,
    QuantileBelowThreshold,
)
from .evt import GpdParams, TailModel, fit_gpd_mle, gpd_cdf, tail_quantile
from .experiment import ExperimentConfig, ExperimentReport, emit_report, run_experiment, sweep_training_sizes
from .interference import InterferenceTrace, SimConfig, db_to_linear, duty_cycle, generate_trace, linear_to_db
from .kde import KdeModel, kde_cdf, kde_pdf, kde_quantile, select_bandwidth
from .link import (
    AllocationDecision,
    AllocationRequest,
    achieved_error_probability,
    capacity,
    dispersion,
    q_inv,
    required_blocklength,
    sinr_from_inr,
)
from .mixture import MixturePredictor, StatePartition, build_partition, state_of, train

__version__ = "0.1.0"
