"""Conjugate Bayesian inference and remaining-useful-life prediction for gamma degradation processes."""

__version__ = "0.1.0"

from .conjugate import (
    AGGParams,
    AGMGParams,
    auto_hyperparams,
    auto_hyperparams_agmg,
    jensen_gap,
    posterior_update_agg,
    posterior_update_agmg,
    recursive_update,
)
from .data import DegradationDataset, MeasurementGrid, read_long_csv, sufficient_stats, write_long_csv
from .errors import (
    ConfigurationError,
    DegeneracyWarning,
    GammaRulError,
    NumericalError,
    ProperError,
    ResolutionWarning,
    ValidationError,
)
from .lifetime import lifetime_cdf_exact, mc_rul_predict, mttf, reliability, rul_mean, rul_quantile
from .online import OnlineState, ingest, predict, replay
from .samplers import SamplerConfig, PosteriorDraws, sample_posterior, summarize
from .specfun import RngStream

__all__ = [
    "AGGParams",
    "AGMGParams",
    "ConfigurationError",
    "DegeneracyWarning",
    "DegradationDataset",
    "GammaRulError",
    "MeasurementGrid",
    "NumericalError",
    "OnlineState",
    "PosteriorDraws",
    "ProperError",
    "ResolutionWarning",
    "RngStream",
    "SamplerConfig",
    "ValidationError",
    "auto_hyperparams",
    "auto_hyperparams_agmg",
    "ingest",
    "jensen_gap",
    "lifetime_cdf_exact",
    "mc_rul_predict",
    "mttf",
    "posterior_update_agg",
    "posterior_update_agmg",
    "predict",
    "read_long_csv",
    "recursive_update",
    "reliability",
    "replay",
    "rul_mean",
    "rul_quantile",
    "sample_posterior",
    "sufficient_stats",
    "summarize",
    "write_long_csv",
]
